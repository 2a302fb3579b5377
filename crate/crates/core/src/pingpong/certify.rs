use serde::{Deserialize, Serialize};

use super::constants::{
    compute_c, count_a, local_to_global, short_element_condition, LgeResult, LgeStrategy, ShortElements,
};
use super::instance::{PingPongInstance, Side, TheoremMode};
use super::oracle::{oracle_free_product_check, OracleOutcome, OracleRecord, ORACLE_BUDGET};
use super::paths::{
    assemble_syllable_path, enumerate_tuples, measure_overlaps, sample_tuples, tuple_factors, OverlapReport,
};
use crate::cayley::{check_local_quasigeodesic, estimate_delta, DeltaMode, QuasiParams, QuasiVerdict};
use crate::error::Result;
use crate::presentation::OracleKind;
use crate::rational::{int, rat, Rational};
use crate::subgroup::{
    check_malnormal, estimate_mu, estimate_mu_at, lemma6_constants, MalnormalVerdict, MembershipOracle, MuEstimate,
    RelativeBall, SubgroupSpec,
};

pub const CERTIFICATE_SCHEMA: &str = "pingpong-certificate/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub lge: LgeStrategy,
    /// Oracle cross-check length; `None` disables it.
    pub oracle_maxlen: Option<usize>,
    pub oracle_budget: usize,
    pub delta_mode: DeltaMode,
    /// Beyond this many syllable paths the sweep samples instead.
    pub sweep_limit: usize,
    pub sweep_seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            lge: LgeStrategy::Empirical,
            oracle_maxlen: Some(12),
            oracle_budget: ORACLE_BUDGET,
            delta_mode: DeltaMode::Exhaustive,
            sweep_limit: 20_000,
            sweep_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    WindowEmpirical,
    ExternalLiterature,
    PaperFormula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn tag<T>(value: T, provenance: Provenance) -> Tagged<T> {
    Tagged { value, provenance }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub delta: Option<Tagged<usize>>,
    pub mu: Option<Tagged<usize>>,
    pub mu_h: Option<usize>,
    pub mu_k: Option<usize>,
    /// Quasiconvexity of `H₁` and `K₁`, where measurable.
    pub mu1: Option<Tagged<usize>>,
    #[serde(rename = "A")]
    pub a: Option<Tagged<usize>>,
    pub m_rel: Option<Tagged<usize>>,
    #[serde(rename = "M")]
    pub big_m: Option<Tagged<usize>>,
    pub lambda0: Option<Tagged<String>>,
    pub epsilon0: Option<Tagged<String>>,
    #[serde(rename = "L")]
    pub l: Option<Tagged<String>>,
    pub lambda: Option<Tagged<String>>,
    pub epsilon: Option<Tagged<String>>,
    pub lge_provenance: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<Tagged<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateOutcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub outcome: GateOutcome,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    #[serde(rename = "CERTIFIED")]
    Certified,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive { gate: String, reason: String },
    #[serde(rename = "REFUTED")]
    Refuted { counterexample: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Inconclusive { .. } => "INCONCLUSIVE",
            Verdict::Refuted { .. } => "REFUTED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupsSummary {
    #[serde(rename = "H")]
    pub h: Vec<String>,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(rename = "H1")]
    pub h1: Vec<String>,
    #[serde(rename = "K1")]
    pub k1: Vec<String>,
    #[serde(rename = "G0")]
    pub g0: String,
    pub g0_trivial: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub paths: usize,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub max_l5: usize,
    pub max_l6: Option<usize>,
    pub l5_bound: usize,
    #[serde(rename = "M")]
    pub l6_bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub theorem: TheoremMode,
    pub presentation_hash: String,
    pub oracle_kind: OracleKind,
    pub window_radius: usize,
    pub subgroups: SubgroupsSummary,
    pub constants: Constants,
    pub malnormality: Option<MalnormalVerdict>,
    pub gates: Vec<Gate>,
    pub sweep: Option<SweepRecord>,
    pub oracle: Option<OracleRecord>,
    pub join_mu: Option<Tagged<usize>>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn first_failing_gate(&self) -> Option<&Gate> {
        self.gates.iter().find(|g| g.outcome == GateOutcome::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Stops the pipeline at the first failing gate.
struct Stop;

struct Pipeline<'a> {
    inst: &'a PingPongInstance,
    opts: &'a CertifyOptions,
    gates: Vec<Gate>,
    constants: Constants,
    malnormality: Option<MalnormalVerdict>,
    sweep: Option<SweepRecord>,
    notes: Vec<String>,
}

impl Pipeline<'_> {
    fn pass(&mut self, name: &str, detail: String) {
        self.gates.push(Gate {
            name: name.into(),
            outcome: GateOutcome::Pass,
            detail,
        });
    }

    fn fail<T>(&mut self, name: &str, detail: String) -> std::result::Result<T, Stop> {
        self.gates.push(Gate {
            name: name.into(),
            outcome: GateOutcome::Fail,
            detail,
        });
        Err(Stop)
    }

    fn check<T>(&mut self, name: &str, r: Result<T>) -> std::result::Result<T, Stop> {
        r.or_else(|e| self.fail(name, e.to_string()))
    }

    fn mu_of(&mut self, name: &str, m: &MembershipOracle) -> std::result::Result<MuEstimate, Stop> {
        let ball = &self.inst.ball;
        let full = self.check("mu", estimate_mu(m, ball))?;
        let r = ball.radius();
        let prev = self.check("mu-stability", estimate_mu_at(m, ball, r.saturating_sub(1)))?;
        if prev.mu != full.mu {
            return self.fail(
                "mu-stability",
                format!(
                    "mu({name}) is {} at radius {} but {} at radius {r}",
                    prev.mu,
                    r - 1,
                    full.mu
                ),
            );
        }
        Ok(full)
    }

    fn run(&mut self) -> std::result::Result<(), Stop> {
        let inst = self.inst;
        let ball = &inst.ball;
        let r = ball.radius();
        let t2 = inst.mode == TheoremMode::Theorem2;
        let we = Provenance::WindowEmpirical;
        let pf = Provenance::PaperFormula;

        if inst.oracle().kind() == OracleKind::FreeAbelianControl {
            return self.fail(
                "ambient-hyperbolic",
                "free abelian control group is not negatively curved".into(),
            );
        }
        self.pass("ambient-hyperbolic", format!("{:?} presentation", inst.oracle().kind()));

        if t2 {
            let v = self.check("malnormality", check_malnormal(&inst.mh, ball))?;
            self.malnormality = Some(v.clone());
            match v {
                MalnormalVerdict::Violation { g, witness } => {
                    return self.fail(
                        "malnormality",
                        format!(
                            "g = {} is not in H but conjugates {} into H",
                            inst.oracle().format(&g),
                            inst.oracle().format(&witness)
                        ),
                    )
                }
                MalnormalVerdict::NoViolation { radius, exact } => {
                    if !exact {
                        self.notes.push(format!(
                            "malnormality of H is assumed from a window search (radius {radius})"
                        ));
                    }
                    self.pass("malnormality", format!("no violation within radius {radius}"));
                }
            }
        }

        let delta = self.check("delta", estimate_delta(ball, self.opts.delta_mode))?.delta;
        self.constants.delta = Some(tag(delta, we));
        self.pass("delta", format!("delta = {delta}"));

        let mu_h = self.mu_of("H", &inst.mh)?.mu;
        let mu_k = self.mu_of("K", &inst.mk)?.mu;
        let mu = mu_h.max(mu_k);
        self.constants.mu_h = Some(mu_h);
        self.constants.mu_k = Some(mu_k);
        self.constants.mu = Some(tag(mu, we));
        self.pass(
            "mu-stability",
            format!("mu(H) = {mu_h}, mu(K) = {mu_k}, stable at radius {}", r - 1),
        );
        let mu1 = [&inst.mh1, &inst.mk1]
            .iter()
            .map(|m| estimate_mu(m, ball).map(|e| e.mu))
            .collect::<Result<Vec<_>>>();
        match mu1 {
            Ok(v) => self.constants.mu1 = Some(tag(v.into_iter().max().unwrap_or(0), we)),
            Err(e) => self.notes.push(format!("mu1 not measured: {e}")),
        }

        let a = self.check("count-A", count_a(ball, mu, delta))?;
        self.constants.a = Some(tag(a, we));
        self.pass("count-A", format!("A = {a} elements shorter than {}", 2 * mu + delta));
        self.notes
            .push("A counts group elements, not words, shorter than 2 mu + delta".into());

        let four_mu_a = 4 * mu * a;
        let (lambda0, epsilon0, big_m) = if t2 {
            let rel = self.check("lemma6", RelativeBall::build(&inst.mh, mu + 2 * delta))?;
            let l6 = self.check("lemma6", lemma6_constants(&rel, mu, delta))?;
            self.constants.m_rel = Some(tag(l6.m_rel, we));
            self.constants.big_m = Some(tag(l6.big_m, we));
            self.pass("lemma6", format!("m_rel = {}, M = {}", l6.m_rel, l6.big_m));
            (rat(1, 6), int((four_mu_a + delta + l6.big_m) as i64), Some(l6.big_m))
        } else {
            (rat(1, 3), int((four_mu_a + delta) as i64), None)
        };
        self.constants.lambda0 = Some(tag(lambda0.to_string(), pf));
        self.constants.epsilon0 = Some(tag(epsilon0.to_string(), pf));

        let lge: LgeResult = self.check(
            "local-to-global",
            local_to_global(self.opts.lge, lambda0, epsilon0, ball),
        )?;
        let lge_prov = match self.opts.lge {
            LgeStrategy::Empirical => we,
            LgeStrategy::Supplied { .. } => Provenance::ExternalLiterature,
        };
        let l = lge.horizon();
        self.constants.l = Some(tag(l.to_string(), lge_prov));
        self.constants.lambda = Some(tag(lge.params.lambda.to_string(), lge_prov));
        self.constants.epsilon = Some(tag(lge.params.epsilon.to_string(), lge_prov));
        self.constants.lge_provenance = Some(lge.provenance.clone());
        self.pass(
            "local-to-global",
            format!(
                "L = {l}, lambda = {}, epsilon = {} ({})",
                lge.params.lambda, lge.params.epsilon, lge.provenance
            ),
        );

        let c: Rational = self.check("C", compute_c(l, lge.params.lambda, lge.params.epsilon))?;
        self.constants.c = Some(tag(c.to_string(), pf));
        self.pass("C", format!("C = {c}"));

        let sides: &[(Side, &str)] = if t2 {
            &[(Side::H, "H1")]
        } else {
            &[(Side::H, "H1"), (Side::K, "K1")]
        };
        for &(side, name) in sides {
            match self.check(
                "short-elements",
                short_element_condition(inst.member(side), c, &inst.g0, ball),
            )? {
                ShortElements::Holds { checked } => self.pass(
                    "short-elements",
                    format!("{name}: {checked} elements shorter than {c}, all in G0"),
                ),
                ShortElements::Fails { witness } => {
                    return self.fail(
                        "short-elements",
                        format!(
                            "{name} has {} shorter than {c} outside G0",
                            inst.oracle().format(&witness)
                        ),
                    )
                }
            }
        }

        let local = QuasiParams::new(lambda0, epsilon0, Some(l)).map_err(|_| Stop)?;
        self.sweep(local, four_mu_a, big_m)
    }

    fn sweep(&mut self, local: QuasiParams, four_mu_a: usize, big_m: Option<usize>) -> std::result::Result<(), Stop> {
        let inst = self.inst;
        let ball = &inst.ball;
        let r = ball.radius();
        let name = "window-path-sweep";
        let h = self.check(name, inst.syllables(Side::H, r))?;
        let k = self.check(name, inst.syllables(Side::K, r))?;
        let (tuples, exhaustive) = match enumerate_tuples(&h, &k, r, self.opts.sweep_limit) {
            Some(t) => (t, true),
            None => (
                sample_tuples(&h, &k, r, self.opts.sweep_limit, self.opts.sweep_seed),
                false,
            ),
        };
        let delta = self.constants.delta.as_ref().map_or(0, |d| d.value);
        let mut worst = OverlapReport::default();
        for t in &tuples {
            let factors = tuple_factors(&h, &k, t);
            let sp = self.check(name, assemble_syllable_path(inst, &factors))?;
            let label = inst.oracle().format(&sp.path.letters);
            match self.check(name, check_local_quasigeodesic(ball, &sp.path, &local))? {
                QuasiVerdict::Pass => {}
                QuasiVerdict::Fail {
                    label: sub,
                    geodesic_len,
                    ..
                } => {
                    return self.fail(
                        name,
                        format!(
                            "path {label} is not a local quasigeodesic: subpath {} spans distance {geodesic_len}",
                            inst.oracle().format(&sub)
                        ),
                    )
                }
            }
            let rep = measure_overlaps(ball, &sp, delta, big_m.is_some());
            if rep.max_l5() > four_mu_a {
                return self.fail(
                    name,
                    format!("path {label}: l5 = {} exceeds 4 mu A = {four_mu_a}", rep.max_l5()),
                );
            }
            if let Some(m) = big_m {
                if rep.max_l6() >= m {
                    return self.fail(
                        name,
                        format!("path {label}: l6 = {} is not below M = {m}", rep.max_l6()),
                    );
                }
            }
            worst.l5.push(rep.max_l5());
            worst.l6.push(rep.max_l6());
        }
        self.sweep = Some(SweepRecord {
            paths: tuples.len(),
            exhaustive,
            seed: (!exhaustive).then_some(self.opts.sweep_seed),
            max_l5: worst.max_l5(),
            max_l6: big_m.map(|_| worst.max_l6()),
            l5_bound: four_mu_a,
            l6_bound: big_m,
        });
        self.pass(
            name,
            format!(
                "{} syllable paths ({}) satisfy the local condition and overlap bounds",
                tuples.len(),
                if exhaustive { "exhaustive" } else { "sampled" }
            ),
        );
        Ok(())
    }
}

fn summary(inst: &PingPongInstance) -> SubgroupsSummary {
    SubgroupsSummary {
        h: inst.h.generator_strings(),
        k: inst.k.generator_strings(),
        h1: inst.h1.generator_strings(),
        k1: inst.k1.generator_strings(),
        g0: inst.g0.describe().into(),
        g0_trivial: inst.g0_trivial().ok(),
    }
}

/// Runs the gates of Theorem 1 or 2 (per the instance mode), then the
/// oracle cross-check.
pub fn certify(inst: &PingPongInstance, opts: &CertifyOptions) -> Certificate {
    let mut p = Pipeline {
        inst,
        opts,
        gates: Vec::new(),
        constants: Constants::default(),
        malnormality: None,
        sweep: None,
        notes: Vec::new(),
    };
    let gates_ok = p.run().is_ok();
    let oracle = opts
        .oracle_maxlen
        .map(|n| match oracle_free_product_check(inst, n, opts.oracle_budget) {
            Ok(rec) => {
                if let OracleOutcome::Counterexample { reason, .. } = &rec.outcome {
                    p.notes.push(format!("oracle: {reason}"));
                }
                rec
            }
            Err(e) => {
                p.notes.push(format!("oracle could not run: {e}"));
                OracleRecord {
                    maxlen: n,
                    outcome: OracleOutcome::Partial { achieved: 0 },
                    products: 0,
                    syllables_h: 0,
                    syllables_k: 0,
                }
            }
        });
    let verdict = match oracle.as_ref().map(|o| &o.outcome) {
        Some(OracleOutcome::Counterexample { word, .. }) => Verdict::Refuted {
            counterexample: word.clone(),
        },
        _ if !gates_ok => {
            let g = p
                .gates
                .iter()
                .find(|g| g.outcome == GateOutcome::Fail)
                .expect("a gate failed");
            Verdict::Inconclusive {
                gate: g.name.clone(),
                reason: g.detail.clone(),
            }
        }
        Some(OracleOutcome::Partial { achieved }) => Verdict::Inconclusive {
            gate: "oracle-cross-check".into(),
            reason: format!("budget exhausted after length {achieved}"),
        },
        _ => Verdict::Certified,
    };
    let join_mu = if verdict == Verdict::Certified {
        estimate_join_quasiconvexity(inst)
            .map(|e| tag(e.mu, Provenance::WindowEmpirical))
            .map_err(|e| p.notes.push(format!("join quasiconvexity not measured: {e}")))
            .ok()
    } else {
        None
    };
    Certificate {
        schema: CERTIFICATE_SCHEMA.into(),
        theorem: inst.mode,
        presentation_hash: inst.oracle().presentation().hash(),
        oracle_kind: inst.oracle().kind(),
        window_radius: inst.ball.radius(),
        subgroups: summary(inst),
        constants: p.constants,
        malnormality: p.malnormality,
        gates: p.gates,
        sweep: p.sweep,
        oracle,
        join_mu,
        verdict,
        notes: p.notes,
    }
}

pub fn certify_theorem1(inst: &PingPongInstance, opts: &CertifyOptions) -> Certificate {
    debug_assert_eq!(inst.mode, TheoremMode::Theorem1);
    certify(inst, opts)
}

pub fn certify_theorem2(inst: &PingPongInstance, opts: &CertifyOptions) -> Certificate {
    debug_assert_eq!(inst.mode, TheoremMode::Theorem2);
    certify(inst, opts)
}

/// Quasiconvexity of `⟨H₁, K₁⟩` measured on the window.
pub fn estimate_join_quasiconvexity(inst: &PingPongInstance) -> Result<MuEstimate> {
    let gens = inst
        .h1
        .generators()
        .iter()
        .chain(inst.k1.generators())
        .cloned()
        .collect();
    let join = SubgroupSpec::new(inst.oracle().clone(), "join", gens)?;
    estimate_mu(&MembershipOracle::build(&join, &inst.ball), &inst.ball)
}
