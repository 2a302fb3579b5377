//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use pingpong_core::cayley::{
    check_local_quasigeodesic, estimate_delta, CayleyBall, DeltaMode, QuasiParams, QuasiVerdict,
};
use pingpong_core::pingpong::{
    abstract_ping_pong_check, assemble_syllable_path, certify, count_a, enumerate_tuples,
    free_left_multiplication_instance, index_two_instance, measure_overlaps, oracle_free_product_check, sample_tuples,
    schottky_power_search, tuple_factors, Certificate, CertifyOptions, OracleOutcome, PingPongInstance,
    PingPongOutcome, SchottkyOutcome, Side, TheoremMode, Verdict, ORACLE_BUDGET,
};
use pingpong_core::rational::{int, parse_rational, rat, Rational};
use pingpong_core::residual::{
    corollary_instance, find_deep_quotient, shortest_kernel_element, DeepQuotientOutcome, DEEP_QUOTIENT_BUDGET,
};
use pingpong_core::subgroup::{
    estimate_mu, lemma6_constants, MalnormalVerdict, MembershipOracle, RelativeBall, SubgroupSpec,
};
use pingpong_core::{Presentation, Word, WordOracle};

type Outcome = Result<String, String>;

fn oracle(p: Presentation) -> Arc<WordOracle> {
    Arc::new(WordOracle::new(p))
}

fn ball(o: &Arc<WordOracle>, r: usize) -> Arc<CayleyBall> {
    Arc::new(CayleyBall::build(o.clone(), r).expect("ball"))
}

fn sub(o: &Arc<WordOracle>, name: &str, gens: &[&str]) -> SubgroupSpec {
    let words = gens.iter().map(|g| o.presentation().parse_word(g).unwrap()).collect();
    SubgroupSpec::new(o.clone(), name, words).unwrap()
}

fn t1(b: &Arc<CayleyBall>, h: &str, k: &str, h1: &str, k1: &str) -> PingPongInstance {
    let o = b.oracle();
    PingPongInstance::new(
        TheoremMode::Theorem1,
        b.clone(),
        sub(o, "H", &[h]),
        sub(o, "K", &[k]),
        sub(o, "H1", &[h1]),
        Some(sub(o, "K1", &[k1])),
    )
    .unwrap()
}

fn t2(b: &Arc<CayleyBall>, h: &str, k: &str) -> PingPongInstance {
    let o = b.oracle();
    PingPongInstance::new(
        TheoremMode::Theorem2,
        b.clone(),
        sub(o, "H", &[h]),
        sub(o, "K", &[k]),
        sub(o, "H1", &[h]),
        None,
    )
    .unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn num(c: &Option<pingpong_core::pingpong::Tagged<usize>>) -> usize {
    c.as_ref().map_or(0, |t| t.value)
}

fn parse_rat(s: &str) -> Rational {
    parse_rational(s).expect("certificate rationals parse")
}

/// Local check of every assembled syllable path of length at most the
/// window radius against `(lambda, epsilon, L)`.
fn sweep_local(inst: &PingPongInstance, params: &QuasiParams) -> Result<usize, String> {
    let r = inst.ball.radius();
    let h = inst.syllables(Side::H, r).map_err(|e| e.to_string())?;
    let k = inst.syllables(Side::K, r).map_err(|e| e.to_string())?;
    let tuples = enumerate_tuples(&h, &k, r, 1_000_000).ok_or("too many syllable paths")?;
    for t in &tuples {
        let sp = assemble_syllable_path(inst, &tuple_factors(&h, &k, t)).map_err(|e| e.to_string())?;
        match check_local_quasigeodesic(&inst.ball, &sp.path, params).map_err(|e| e.to_string())? {
            QuasiVerdict::Pass => {}
            QuasiVerdict::Fail { label, .. } => {
                return Err(format!("path {} fails on subpath {label}", sp.path.letters));
            }
        }
    }
    Ok(tuples.len())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f2 = oracle(Presentation::free(2));
    let b = ball(&f2, 8);
    let delta = estimate_delta(&b, DeltaMode::Exhaustive)
        .map_err(|e| e.to_string())?
        .delta;
    let mu = |g: &str| -> Result<usize, String> {
        let m = MembershipOracle::build(&sub(&f2, "H", &[g]), &b);
        estimate_mu(&m, &b).map(|e| e.mu).map_err(|e| e.to_string())
    };
    let (mu_a, mu_ab) = (mu("a")?, mu("ab")?);
    let ball2 = b.within(2).len();
    let elapsed = start.elapsed();
    ensure(delta == 0, format!("delta = {delta}"))?;
    ensure(mu_a == 0 && mu_ab == 1, format!("mu(<a>) = {mu_a}, mu(<ab>) = {mu_ab}"))?;
    ensure(ball2 == 17, format!("ball(2) has {ball2} vertices"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("delta 0, mu 0 and 1, |B(2)| = 17 in {elapsed:.2?}"))
}

fn certificate_2() -> Certificate {
    let f2 = oracle(Presentation::free(2));
    certify(&t1(&ball(&f2, 6), "a", "b", "a", "b"), &CertifyOptions::default())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cert = certificate_2();
    let elapsed = start.elapsed();
    ensure(
        cert.verdict == Verdict::Certified,
        format!("verdict {:?}", cert.verdict),
    )?;
    let oracle = cert.oracle.as_ref().ok_or("no oracle record")?;
    ensure(
        oracle.outcome == OracleOutcome::Consistent { maxlen: 12 },
        format!("oracle {:?}", oracle.outcome),
    )?;
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!(
        "CERTIFIED, oracle consistent to 12 over {} products in {elapsed:.2?}",
        oracle.products
    ))
}

fn criterion_3() -> Outcome {
    let z2 = oracle(Presentation::free_abelian(2));
    let deltas: Vec<usize> = [4, 5, 6]
        .iter()
        .map(|&r| estimate_delta(&ball(&z2, r), DeltaMode::Exhaustive).map(|d| d.delta))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(deltas[0] < deltas[2], format!("delta(4..6) = {deltas:?}"))?;
    let inst = t1(&ball(&z2, 6), "a", "b", "a", "b");
    let rec = oracle_free_product_check(&inst, 4, ORACLE_BUDGET).map_err(|e| e.to_string())?;
    match &rec.outcome {
        OracleOutcome::Counterexample { word, .. } if word == "abAB" => {}
        other => return Err(format!("oracle {other:?}")),
    }
    Ok(format!("delta(R = 4, 5, 6) = {deltas:?}, counterexample abAB"))
}

/// Per-path `(max l5, max l6)`, with the bounds `4 mu A` and `M`.
type Overlaps = (Vec<(usize, usize)>, usize, usize);

/// Overlap maxima on 100 seeded genus-2 syllable paths at R = 3.
fn overlaps_4() -> Result<Overlaps, String> {
    let s2 = oracle(Presentation::surface(2).unwrap());
    let b = ball(&s2, 3);
    let inst = t1(&b, "a", "c", "a", "c");
    let delta = estimate_delta(&b, DeltaMode::Exhaustive)
        .map_err(|e| e.to_string())?
        .delta;
    let mu = [&inst.mh, &inst.mk]
        .iter()
        .map(|m| estimate_mu(m, &b).map(|e| e.mu))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .max()
        .unwrap();
    let a = count_a(&b, mu, delta).map_err(|e| e.to_string())?;
    let rel = RelativeBall::build(&inst.mh, mu + 2 * delta).map_err(|e| e.to_string())?;
    let big_m = lemma6_constants(&rel, mu, delta).map_err(|e| e.to_string())?.big_m;
    let h = inst.syllables(Side::H, 3).map_err(|e| e.to_string())?;
    let k = inst.syllables(Side::K, 3).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for t in sample_tuples(&h, &k, 3, 100, 7) {
        let sp = assemble_syllable_path(&inst, &tuple_factors(&h, &k, &t)).map_err(|e| e.to_string())?;
        let rep = measure_overlaps(&b, &sp, delta, true);
        out.push((rep.max_l5(), rep.max_l6()));
    }
    Ok((out, 4 * mu * a, big_m))
}

fn criterion_4() -> Outcome {
    let (obs, l5_bound, big_m) = overlaps_4()?;
    ensure(obs.len() == 100, format!("{} paths sampled", obs.len()))?;
    let bad = obs.iter().filter(|&&(l5, l6)| l5 > l5_bound || l6 >= big_m).count();
    ensure(
        bad == 0,
        format!("{bad} violations of l5 <= {l5_bound} or l6 < {big_m}"),
    )?;
    Ok(format!("100 paths, l5 <= {l5_bound}, l6 < M = {big_m}, 0 violations"))
}

fn criterion_5() -> Outcome {
    let f2 = oracle(Presentation::free(2));
    let b = ball(&f2, 6);
    let opts = CertifyOptions::default();
    let bad = certify(&t2(&b, "aa", "b"), &opts);
    match (&bad.verdict, &bad.malnormality) {
        (Verdict::Inconclusive { gate, .. }, Some(MalnormalVerdict::Violation { g, .. }))
            if gate == "malnormality" && g.to_string() == "a" => {}
        other => return Err(format!("<aa>: {other:?}")),
    }
    let inst = t2(&b, "a", "b");
    let good = certify(&inst, &opts);
    ensure(good.verdict == Verdict::Certified, format!("<a>: {:?}", good.verdict))?;
    let c = &good.constants;
    let (mu, a, delta, big_m) = (num(&c.mu), num(&c.a), num(&c.delta), num(&c.big_m));
    let eps0 = 4 * mu * a + delta + big_m;
    ensure(
        c.epsilon0.as_ref().map(|t| t.value.clone()) == Some(eps0.to_string()),
        format!("epsilon0 {:?} vs {eps0}", c.epsilon0),
    )?;
    let l = parse_rat(&c.l.as_ref().ok_or("no L")?.value);
    let params = QuasiParams::new(rat(1, 6), int(eps0 as i64), Some(l)).map_err(|e| e.to_string())?;
    let n = sweep_local(&inst, &params)?;
    Ok(format!(
        "<aa> blocked by g = a; <a> CERTIFIED, local condition holds on {n} paths"
    ))
}

fn criterion_6() -> Outcome {
    let f2 = oracle(Presentation::free(2));
    let s2 = oracle(Presentation::surface(2).unwrap());
    let b6 = ball(&f2, 6);
    let corpus = vec![
        ("F2 <a>,<b>", t1(&b6, "a", "b", "a", "b")),
        ("F2 <a>,<b> powers", t1(&b6, "a", "b", "aa", "bbb")),
        ("F2 <ab>,<aB>", t1(&b6, "ab", "aB", "ab", "aB")),
        ("genus 2 <a>,<c>", t1(&ball(&s2, 3), "a", "c", "a", "c")),
    ];
    let opts = CertifyOptions::default();
    let mut checked = 0;
    let mut total = 0;
    for (name, inst) in &corpus {
        let cert = certify(inst, &opts);
        if cert.verdict != Verdict::Certified {
            continue;
        }
        checked += 1;
        let c = &cert.constants;
        let eps = 4 * num(&c.mu) * num(&c.a) + num(&c.delta);
        let l = parse_rat(&c.l.as_ref().ok_or("no L")?.value);
        let params = QuasiParams::new(rat(1, 3), int(eps as i64), Some(l)).map_err(|e| e.to_string())?;
        total += sweep_local(inst, &params).map_err(|e| format!("{name}: {e}"))?;
    }
    ensure(checked > 0, "no certified instance in the corpus")?;
    Ok(format!(
        "{checked} certified instances, {total} syllable paths, all local quasigeodesics"
    ))
}

fn criterion_7() -> Outcome {
    let f2 = oracle(Presentation::free(2));
    let inst = free_left_multiplication_instance(&ball(&f2, 6));
    let verdict = abstract_ping_pong_check(&inst, 3).map_err(|e| e.to_string())?;
    let products = match verdict {
        PingPongOutcome::Verified {
            maxsyll: 3, products, ..
        } => products,
        other => return Err(format!("left multiplication: {other:?}")),
    };
    let guard = abstract_ping_pong_check(&index_two_instance(), 5).map_err(|e| e.to_string())?;
    ensure(guard == PingPongOutcome::IndexGuard, format!("index two: {guard:?}"))?;
    Ok(format!(
        "verified(3) over {products} products; index-2 instance guarded"
    ))
}

fn certificate_8() -> Result<(Certificate, usize), String> {
    let report = match find_deep_quotient(2, 4, DEEP_QUOTIENT_BUDGET, 0).map_err(|e| e.to_string())? {
        DeepQuotientOutcome::Found { report, .. } => report,
        other => return Err(format!("search: {other:?}")),
    };
    let again = shortest_kernel_element(&report.spec);
    ensure(
        again.depth == report.depth && again.depth >= 4,
        format!("re-verified depth {}", again.depth),
    )?;
    let f2 = oracle(Presentation::free(2));
    let (a, b) = (Word::parse("a").unwrap(), Word::parse("b").unwrap());
    let (inst, _) =
        corollary_instance(&ball(&f2, 6), &a, &b, &report.spec, Some(&report.spec)).map_err(|e| e.to_string())?;
    Ok((certify(&inst, &CertifyOptions::default()), report.depth))
}

fn criterion_8() -> Outcome {
    let (cert, depth) = certificate_8()?;
    ensure(
        cert.verdict == Verdict::Certified,
        format!("verdict {:?}", cert.verdict),
    )?;
    let rec = cert.oracle.as_ref().ok_or("no oracle record")?;
    ensure(
        rec.outcome == OracleOutcome::Consistent { maxlen: 12 },
        format!("oracle {:?}", rec.outcome),
    )?;
    Ok(format!(
        "depth {depth}, H1 = <{}>, K1 = <{}> CERTIFIED and consistent to 12",
        cert.subgroups.h1.join(", "),
        cert.subgroups.k1.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let f2 = oracle(Presentation::free(2));
    let (h, k) = (Word::parse("ab").unwrap(), Word::parse("aB").unwrap());
    match schottky_power_search(&ball(&f2, 6), &h, &k, 4, &CertifyOptions::default()).map_err(|e| e.to_string())? {
        SchottkyOutcome::Found {
            m: 1,
            n: 1,
            certificate,
        } if certificate.verdict == Verdict::Certified => Ok("found (1, 1), CERTIFIED".into()),
        other => Err(format!("{other:?}")),
    }
}

fn criterion_10() -> Outcome {
    let c2 = (certificate_2().to_json(), certificate_2().to_json());
    ensure(c2.0 == c2.1, "criterion 2 certificate differs between runs")?;
    let o4 = (overlaps_4()?, overlaps_4()?);
    ensure(o4.0 == o4.1, "criterion 4 overlaps differ between runs")?;
    let c8 = (certificate_8()?.0.to_json(), certificate_8()?.0.to_json());
    ensure(c8.0 == c8.1, "criterion 8 certificate differs between runs")?;
    Ok("certificates of criteria 2, 4 and 8 are byte-identical across runs".into())
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {n:>2}: PASS  {msg}"),
            Err(msg) => {
                println!("criterion {n:>2}: FAIL  {msg}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
