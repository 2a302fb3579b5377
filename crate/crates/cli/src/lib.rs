//! The `pingpong` command line. Every subcommand writes one JSON document
//! (to `--out`, default `<subcommand>.json`) and prints a short summary.
//!
//! Exit codes: 0 success or CERTIFIED, 2 INCONCLUSIVE or search exhausted,
//! 3 REFUTED or violation found, 1 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pingpong_core::cayley::{estimate_delta, CayleyBall, DeltaMode};
use pingpong_core::pingpong::{
    abstract_ping_pong_check, certify, free_left_multiplication_instance, index_two_instance,
    oracle_free_product_check, schottky_power_search, AbstractPingPongInstance, Certificate, CertifyOptions,
    LgeStrategy, OracleOutcome, PingPongInstance, PingPongOutcome, SchottkyOutcome, TheoremMode, Verdict,
    ORACLE_BUDGET,
};
use pingpong_core::presentation::{parse_presentation, PresentationFile};
use pingpong_core::rational::parse_rational;
use pingpong_core::residual::{
    corollary_instance, find_deep_quotient, shortest_kernel_element, DeepQuotientOutcome, FiniteQuotientSpec,
    DEEP_QUOTIENT_BUDGET,
};
use pingpong_core::subgroup::{
    check_malnormal, estimate_mu, estimate_mu_at, MalnormalVerdict, MembershipOracle, RelativeBall, SubgroupSpec,
};
use pingpong_core::{Alphabet, Error, Presentation, Word, WordOracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pingpong",
    version,
    about = "Free-product certificates on finite Cayley-graph windows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Export the radius-R ball of the Cayley graph.
    Ball(GroupArgs),
    /// Thin-triangle constant of the window.
    Delta {
        #[command(flatten)]
        group: GroupArgs,
        /// Sample this many triangles instead of scanning all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quasiconvexity constant of a subgroup, with a stability check at R - 1.
    Mu {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
    },
    /// Search the window for a malnormality violation.
    Malnormal {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
    },
    /// Ball of right cosets `Hg` in the relative Cayley graph.
    Relball {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
    },
    /// Certify `<H1, K1> = H1 *_G0 K1` for quasiconvex H, K.
    #[command(name = "certify-t1")]
    CertifyT1 {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
        #[arg(long = "K")]
        k: String,
        #[arg(long = "H1")]
        h1: String,
        #[arg(long = "K1")]
        k1: String,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Certify `<H1, K> = H1 *_G0 K` for malnormal quasiconvex H.
    #[command(name = "certify-t2")]
    CertifyT2 {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
        #[arg(long = "K")]
        k: String,
        #[arg(long = "H1")]
        h1: String,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Brute-force search for relations among alternating products.
    Oracle {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H1")]
        h1: String,
        #[arg(long = "K1")]
        k1: String,
        /// Ambient subgroup containing H1 (default: H1).
        #[arg(long = "H")]
        h: Option<String>,
        /// Ambient subgroup containing K1 (default: K1).
        #[arg(long = "K")]
        k: Option<String>,
        #[arg(long, default_value_t = 12)]
        maxlen: usize,
        #[arg(long, default_value_t = ORACLE_BUDGET)]
        budget: usize,
    },
    /// Check the Ping-Pong Lemma on a finite action.
    #[command(name = "pingpong-abstract")]
    PingpongAbstract {
        /// JSON instance file; overrides --preset.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Preset::FreeBall)]
        preset: Preset,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        /// Largest number of syllables in the products checked.
        #[arg(long, default_value_t = 3)]
        maxlen: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest powers `h^m`, `k^n` generating a certified free product.
    Schottky {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "H")]
        h: String,
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value_t = 4)]
        maxpow: usize,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Finite permutation quotient of a free group whose kernel has no short
    /// elements, optionally turned into a certified instance.
    #[command(name = "deep-quotient")]
    DeepQuotient(DeepArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Presentation file (`gens:`, `rel:` and `sub:` lines).
    #[arg(long)]
    pres: PathBuf,
    #[arg(long, default_value_t = 6)]
    radius: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertArgs {
    /// Oracle cross-check length (0 disables it).
    #[arg(long, default_value_t = 12)]
    maxlen: usize,
    /// Oracle product budget.
    #[arg(long, default_value_t = ORACLE_BUDGET)]
    budget: usize,
    /// Seed for the sampled path sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Local-to-global constants from the literature: `L,LAMBDA,EPS`.
    #[arg(long = "supplied-lge")]
    supplied_lge: Option<String>,
}

#[derive(Args, Debug)]
struct DeepArgs {
    /// Rank of the free group (default: from --pres, else 2).
    #[arg(long)]
    rank: Option<usize>,
    /// Target depth n: no nontrivial kernel element shorter than n.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// BFS state budget for the search.
    #[arg(long, default_value_t = DEEP_QUOTIENT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use this quotient (`perm:` lines) instead of searching.
    #[arg(long)]
    quotient: Option<PathBuf>,
    /// Free presentation for the induced instance.
    #[arg(long)]
    pres: Option<PathBuf>,
    #[arg(long = "H")]
    h: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    /// Keep K whole (theorem-2 flavour) instead of passing to K1.
    #[arg(long = "whole-k")]
    whole_k: bool,
    #[arg(long, default_value_t = 6)]
    radius: usize,
    /// Oracle cross-check length for the induced certificate.
    #[arg(long, default_value_t = 12)]
    maxlen: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// F2 acting on its ball by left multiplication.
    FreeBall,
    /// Two involutions; both indices are 2.
    IndexTwo,
}

/// A failure that ends the run with a given exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceExceeded { .. } | Error::RadiusTooSmall { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Output of one subcommand: the JSON document, summary lines and exit code.
struct Report {
    doc: Value,
    summary: Vec<String>,
    code: i32,
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Outcome {
    let (name, out, report) = match cmd {
        Command::Ball(g) => ("ball", g.out.clone(), cmd_ball(&g)?),
        Command::Delta { group, samples, seed } => ("delta", group.out.clone(), cmd_delta(&group, samples, seed)?),
        Command::Mu { group, h } => ("mu", group.out.clone(), cmd_mu(&group, &h)?),
        Command::Malnormal { group, h } => ("malnormal", group.out.clone(), cmd_malnormal(&group, &h)?),
        Command::Relball { group, h } => ("relball", group.out.clone(), cmd_relball(&group, &h)?),
        Command::CertifyT1 {
            group,
            h,
            k,
            h1,
            k1,
            cert,
        } => (
            "certify-t1",
            group.out.clone(),
            cmd_certify(&group, TheoremMode::Theorem1, [&h, &k, &h1], Some(&k1), &cert)?,
        ),
        Command::CertifyT2 { group, h, k, h1, cert } => (
            "certify-t2",
            group.out.clone(),
            cmd_certify(&group, TheoremMode::Theorem2, [&h, &k, &h1], None, &cert)?,
        ),
        Command::Oracle {
            group,
            h1,
            k1,
            h,
            k,
            maxlen,
            budget,
        } => {
            let h = h.unwrap_or_else(|| h1.clone());
            let k = k.unwrap_or_else(|| k1.clone());
            (
                "oracle",
                group.out.clone(),
                cmd_oracle(&group, [&h, &k, &h1, &k1], maxlen, budget)?,
            )
        }
        Command::PingpongAbstract {
            instance,
            preset,
            radius,
            maxlen,
            out,
        } => (
            "pingpong-abstract",
            out,
            cmd_abstract(instance.as_deref(), preset, radius, maxlen)?,
        ),
        Command::Schottky {
            group,
            h,
            k,
            maxpow,
            cert,
        } => (
            "schottky",
            group.out.clone(),
            cmd_schottky(&group, &h, &k, maxpow, &cert)?,
        ),
        Command::DeepQuotient(d) => ("deep-quotient", d.out.clone(), cmd_deep(&d)?),
    };
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{name}.json")));
    write_doc(&path, &report.doc)?;
    for line in &report.summary {
        let _ = writeln!(stdout, "{line}");
    }
    let _ = writeln!(stdout, "wrote {}", path.display());
    Ok(report.code)
}

fn write_doc(path: &Path, doc: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

struct Group {
    file: PresentationFile,
    oracle: Arc<WordOracle>,
    ball: Arc<CayleyBall>,
}

impl Group {
    fn load(args: &GroupArgs) -> Result<Group, Failure> {
        let file = read_presentation(&args.pres)?;
        let oracle = Arc::new(WordOracle::new(file.presentation.clone()));
        let ball = Arc::new(CayleyBall::build(oracle.clone(), args.radius)?);
        Ok(Group { file, oracle, ball })
    }

    fn presentation(&self) -> &Presentation {
        &self.file.presentation
    }

    /// A subgroup given by a declared `sub:` name or a comma-separated
    /// list of generator words.
    fn subgroup(&self, label: &str, text: &str) -> Result<SubgroupSpec, Failure> {
        let gens = match self.file.subgroup(text.trim()) {
            Some(decl) => decl.generators.clone(),
            None => text
                .split(',')
                .map(|w| self.presentation().parse_word(w.trim()))
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(SubgroupSpec::new(self.oracle.clone(), label, gens)?)
    }

    fn word(&self, text: &str) -> Result<Word, Failure> {
        Ok(self.presentation().parse_word(text.trim())?)
    }

    fn header(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("presentation_hash".into(), json!(self.presentation().hash()));
        m.insert("oracle_kind".into(), to_value(&self.oracle.kind()));
        m.insert("radius".into(), json!(self.ball.radius()));
        m
    }
}

fn read_presentation(path: &Path) -> Result<PresentationFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    parse_presentation(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn cmd_ball(args: &GroupArgs) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let export = g.ball.export();
    Ok(Report {
        summary: vec![
            format!("ball of radius {}: {} vertices", g.ball.radius(), g.ball.len()),
            format!("sphere sizes {:?}", export.sphere_sizes),
        ],
        doc: to_value(&export),
        code: EXIT_OK,
    })
}

fn cmd_delta(args: &GroupArgs, samples: Option<usize>, seed: u64) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let mode = match samples {
        Some(count) => DeltaMode::Sampled { count, seed },
        None => DeltaMode::Exhaustive,
    };
    let est = estimate_delta(&g.ball, mode)?;
    let mut doc = g.header("delta");
    doc.insert("estimate".into(), to_value(&est));
    Ok(Report {
        summary: vec![format!("delta = {} over {} triangles", est.delta, est.triangles)],
        doc: Value::Object(doc),
        code: EXIT_OK,
    })
}

fn cmd_mu(args: &GroupArgs, h: &str) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let spec = g.subgroup("H", h)?;
    let m = MembershipOracle::build(&spec, &g.ball);
    let full = estimate_mu(&m, &g.ball)?;
    let r = g.ball.radius();
    let prev = estimate_mu_at(&m, &g.ball, r.saturating_sub(1))?;
    let stable = prev.mu == full.mu;
    let mut doc = g.header("mu");
    doc.insert("subgroup".into(), json!(spec.generator_strings()));
    doc.insert("membership".into(), json!(m.describe()));
    doc.insert("estimate".into(), to_value(&full));
    doc.insert("previous".into(), to_value(&prev));
    doc.insert("stable".into(), json!(stable));
    let mut summary = vec![format!("mu(H) = {} at radius {r}", full.mu)];
    if !stable {
        summary.push(format!(
            "unstable: mu(H) = {} at radius {}",
            prev.mu,
            r.saturating_sub(1)
        ));
    }
    Ok(Report {
        summary,
        doc: Value::Object(doc),
        code: if stable { EXIT_OK } else { EXIT_INCONCLUSIVE },
    })
}

fn cmd_malnormal(args: &GroupArgs, h: &str) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let spec = g.subgroup("H", h)?;
    let m = MembershipOracle::build(&spec, &g.ball);
    let v = check_malnormal(&m, &g.ball)?;
    let (line, code) = match &v {
        MalnormalVerdict::NoViolation { radius, exact } => (
            format!(
                "no malnormality violation within radius {radius}{}",
                if *exact { " (exact)" } else { "" }
            ),
            EXIT_OK,
        ),
        MalnormalVerdict::Violation { g: x, witness } => (
            format!(
                "violation: g = {} conjugates {} into H",
                g.presentation().format(x),
                g.presentation().format(witness)
            ),
            EXIT_REFUTED,
        ),
    };
    let mut doc = g.header("malnormal");
    doc.insert("subgroup".into(), json!(spec.generator_strings()));
    doc.insert("result".into(), to_value(&v));
    Ok(Report {
        summary: vec![line],
        doc: Value::Object(doc),
        code,
    })
}

fn cmd_relball(args: &GroupArgs, h: &str) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let spec = g.subgroup("H", h)?;
    let m = MembershipOracle::build(&spec, &g.ball);
    let rel = RelativeBall::build(&m, g.ball.radius())?;
    let counts: Vec<usize> = (0..=rel.radius()).map(|r| rel.count_within(r)).collect();
    let big_m: Vec<usize> = counts.iter().map(|&c| c * c + 1).collect();
    let mut doc = g.header("relball");
    doc.insert("subgroup".into(), json!(spec.generator_strings()));
    doc.insert("cosets".into(), json!(rel.len()));
    doc.insert("sphere_sizes".into(), json!(rel.sphere_sizes()));
    doc.insert("m".into(), json!(counts));
    doc.insert("M".into(), json!(big_m));
    Ok(Report {
        summary: vec![
            format!("{} cosets within radius {}", rel.len(), rel.radius()),
            format!("m(r) = {counts:?}"),
        ],
        doc: Value::Object(doc),
        code: EXIT_OK,
    })
}

fn options(cert: &CertArgs) -> Result<CertifyOptions, Failure> {
    let lge = match &cert.supplied_lge {
        None => LgeStrategy::Empirical,
        Some(text) => {
            let parts: Vec<_> = text.split(',').map(|p| parse_rational(p.trim())).collect();
            match parts.as_slice() {
                [Some(l), Some(lambda), Some(epsilon)] => LgeStrategy::Supplied {
                    l: *l,
                    lambda: *lambda,
                    epsilon: *epsilon,
                },
                _ => {
                    return Err(input_error(format!(
                        "--supplied-lge expects L,LAMBDA,EPS, got {text:?}"
                    )))
                }
            }
        }
    };
    Ok(CertifyOptions {
        lge,
        oracle_maxlen: (cert.maxlen > 0).then_some(cert.maxlen),
        oracle_budget: cert.budget,
        sweep_seed: cert.seed,
        ..CertifyOptions::default()
    })
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Certified => EXIT_OK,
        Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        Verdict::Refuted { .. } => EXIT_REFUTED,
    }
}

fn certificate_summary(c: &Certificate) -> Vec<String> {
    let mut out = vec![format!("verdict: {}", c.verdict.label())];
    match &c.verdict {
        Verdict::Inconclusive { gate, reason } => out.push(format!("first failing gate: {gate} ({reason})")),
        Verdict::Refuted { counterexample } => {
            out.push(format!("counterexample: {counterexample}"));
            if let Some(g) = c.first_failing_gate() {
                out.push(format!("first failing gate: {} ({})", g.name, g.detail));
            }
        }
        Verdict::Certified => {}
    }
    let k = &c.constants;
    let mut consts = Vec::new();
    let mut push = |name: &str, v: Option<String>| {
        if let Some(v) = v {
            consts.push(format!("{name} = {v}"));
        }
    };
    push("delta", k.delta.as_ref().map(|t| t.value.to_string()));
    push("mu", k.mu.as_ref().map(|t| t.value.to_string()));
    push("A", k.a.as_ref().map(|t| t.value.to_string()));
    push("M", k.big_m.as_ref().map(|t| t.value.to_string()));
    push("L", k.l.as_ref().map(|t| t.value.clone()));
    push("C", k.c.as_ref().map(|t| t.value.clone()));
    if !consts.is_empty() {
        out.push(consts.join(", "));
    }
    if let Some(o) = &c.oracle {
        out.push(format!(
            "oracle: {} ({} products)",
            oracle_label(&o.outcome),
            o.products
        ));
    }
    out
}

fn oracle_label(o: &OracleOutcome) -> String {
    match o {
        OracleOutcome::Consistent { maxlen } => format!("consistent to length {maxlen}"),
        OracleOutcome::Counterexample { word, .. } => format!("counterexample {word}"),
        OracleOutcome::Partial { achieved } => format!("budget exhausted after length {achieved}"),
    }
}

fn cmd_certify(
    args: &GroupArgs,
    mode: TheoremMode,
    [h, k, h1]: [&String; 3],
    k1: Option<&String>,
    cert: &CertArgs,
) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let k1 = k1.map(|k1| g.subgroup("K1", k1)).transpose()?;
    let inst = PingPongInstance::new(
        mode,
        g.ball.clone(),
        g.subgroup("H", h)?,
        g.subgroup("K", k)?,
        g.subgroup("H1", h1)?,
        k1,
    )?;
    let c = certify(&inst, &options(cert)?);
    Ok(Report {
        summary: certificate_summary(&c),
        code: verdict_code(&c.verdict),
        doc: to_value(&c),
    })
}

fn cmd_oracle(args: &GroupArgs, [h, k, h1, k1]: [&String; 4], maxlen: usize, budget: usize) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let inst = PingPongInstance::new(
        TheoremMode::Theorem1,
        g.ball.clone(),
        g.subgroup("H", h)?,
        g.subgroup("K", k)?,
        g.subgroup("H1", h1)?,
        Some(g.subgroup("K1", k1)?),
    )?;
    let rec = oracle_free_product_check(&inst, maxlen, budget)?;
    let code = match rec.outcome {
        OracleOutcome::Consistent { .. } => EXIT_OK,
        OracleOutcome::Partial { .. } => EXIT_INCONCLUSIVE,
        OracleOutcome::Counterexample { .. } => EXIT_REFUTED,
    };
    let mut summary = vec![format!(
        "oracle: {} ({} products)",
        oracle_label(&rec.outcome),
        rec.products
    )];
    if let OracleOutcome::Counterexample { reason, .. } = &rec.outcome {
        summary.push(reason.clone());
    }
    let mut doc = g.header("oracle");
    doc.insert("H1".into(), json!(inst.h1.generator_strings()));
    doc.insert("K1".into(), json!(inst.k1.generator_strings()));
    doc.insert("record".into(), to_value(&rec));
    Ok(Report {
        summary,
        doc: Value::Object(doc),
        code,
    })
}

fn cmd_abstract(instance: Option<&Path>, preset: Preset, radius: usize, maxsyll: usize) -> Result<Report, Failure> {
    let inst: AbstractPingPongInstance = match instance {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?
        }
        None => match preset {
            Preset::FreeBall => {
                let oracle = Arc::new(WordOracle::new(Presentation::free(2)));
                free_left_multiplication_instance(&CayleyBall::build(oracle, radius)?)
            }
            Preset::IndexTwo => index_two_instance(),
        },
    };
    let outcome = abstract_ping_pong_check(&inst, maxsyll)?;
    let (line, code) = match &outcome {
        PingPongOutcome::Verified {
            products,
            undefined,
            undecided,
            ..
        } => (
            format!(
                "verified({maxsyll}): {products} odd products each move a point of S_H \
                 ({undecided} undecided, {undefined} mapping checks undefined)"
            ),
            EXIT_OK,
        ),
        PingPongOutcome::IndexGuard => ("index guard: |H:G0| = |K:G0| = 2".to_string(), EXIT_INCONCLUSIVE),
        PingPongOutcome::HypothesesFail { reason } => (format!("hypotheses fail: {reason}"), EXIT_INCONCLUSIVE),
        PingPongOutcome::Refuted { product } => (format!("refuted by {}", product.join(" ")), EXIT_REFUTED),
    };
    let doc = json!({
        "command": "pingpong-abstract",
        "points": inst.points,
        "elements": inst.elements.len(),
        "maxsyll": maxsyll,
        "outcome": to_value(&outcome),
    });
    Ok(Report {
        summary: vec![line],
        doc,
        code,
    })
}

fn cmd_schottky(args: &GroupArgs, h: &str, k: &str, maxpow: usize, cert: &CertArgs) -> Result<Report, Failure> {
    let g = Group::load(args)?;
    let (hw, kw) = (g.word(h)?, g.word(k)?);
    let outcome = schottky_power_search(&g.ball, &hw, &kw, maxpow, &options(cert)?)?;
    let (summary, code) = match &outcome {
        SchottkyOutcome::Found { m, n, certificate } => {
            let mut s = vec![format!("found m = {m}, n = {n}")];
            s.extend(certificate_summary(certificate));
            (s, EXIT_OK)
        }
        SchottkyOutcome::Exhausted { maxpow, tried } => (
            vec![format!(
                "exhausted: no certified pair with powers up to {maxpow} ({} pairs tried)",
                tried.len()
            )],
            EXIT_INCONCLUSIVE,
        ),
    };
    let mut doc = g.header("schottky");
    doc.insert("result".into(), to_value(&outcome));
    Ok(Report {
        summary,
        doc: Value::Object(doc),
        code,
    })
}

fn cmd_deep(d: &DeepArgs) -> Result<Report, Failure> {
    let file = d.pres.as_deref().map(read_presentation).transpose()?;
    let rank = match (&file, d.rank) {
        (Some(f), Some(r)) if f.presentation.rank() != r => {
            return Err(input_error(format!(
                "--rank {r} disagrees with the presentation rank {}",
                f.presentation.rank()
            )))
        }
        (Some(f), _) => f.presentation.rank(),
        (None, r) => r.unwrap_or(2),
    };
    let alphabet = file
        .as_ref()
        .map(|f| f.presentation.alphabet().clone())
        .unwrap_or_else(|| Alphabet::standard(rank));
    let mut summary = Vec::new();
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), json!("deep-quotient"));
    let spec: FiniteQuotientSpec = match &d.quotient {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            let spec = FiniteQuotientSpec::parse(&text, &alphabet)?;
            let report = shortest_kernel_element(&spec);
            summary.push(format!(
                "depth {} (witness {})",
                report.depth,
                alphabet.format(&report.witness)
            ));
            doc.insert("report".into(), to_value(&report));
            if report.depth < d.depth {
                summary.push(format!("below the target depth {}", d.depth));
                doc.insert("target".into(), json!(d.depth));
                return Ok(Report {
                    summary,
                    doc: Value::Object(doc),
                    code: EXIT_INCONCLUSIVE,
                });
            }
            spec
        }
        None => {
            let outcome = find_deep_quotient(rank, d.depth, d.budget, d.seed)?;
            doc.insert("search".into(), to_value(&outcome));
            match outcome {
                DeepQuotientOutcome::Found { report, tried, .. } => {
                    summary.push(format!(
                        "found degree-{} quotient of depth {} after {tried} candidates (witness {})",
                        report.spec.degree(),
                        report.depth,
                        alphabet.format(&report.witness)
                    ));
                    for line in report.spec.to_text(&alphabet).lines() {
                        summary.push(format!("  {line}"));
                    }
                    report.spec
                }
                DeepQuotientOutcome::Exhausted { tried, states, .. } => {
                    summary.push(format!(
                        "exhausted after {tried} candidates and {states} states without depth {}",
                        d.depth
                    ));
                    return Ok(Report {
                        summary,
                        doc: Value::Object(doc),
                        code: EXIT_INCONCLUSIVE,
                    });
                }
            }
        }
    };
    let mut code = EXIT_OK;
    if let (Some(file), Some(h), Some(k)) = (&file, &d.h, &d.k) {
        let oracle = Arc::new(WordOracle::new(file.presentation.clone()));
        let ball = Arc::new(CayleyBall::build(oracle, d.radius)?);
        let hw = file.presentation.parse_word(h.trim())?;
        let kw = file.presentation.parse_word(k.trim())?;
        let quotient_k = (!d.whole_k).then_some(&spec);
        let (inst, corollary) = corollary_instance(&ball, &hw, &kw, &spec, quotient_k)?;
        let opts = CertifyOptions {
            oracle_maxlen: (d.maxlen > 0).then_some(d.maxlen),
            ..CertifyOptions::default()
        };
        let cert = certify(&inst, &opts);
        summary.push(format!(
            "H1 = <{}>, K1 = <{}>",
            alphabet.format(&corollary.h1),
            alphabet.format(&corollary.k1)
        ));
        summary.extend(certificate_summary(&cert));
        code = verdict_code(&cert.verdict);
        doc.insert("corollary".into(), to_value(&corollary));
        doc.insert("certificate".into(), to_value(&cert));
    } else if d.h.is_some() || d.k.is_some() {
        return Err(input_error("an induced instance needs --pres, --H and --K together"));
    }
    Ok(Report {
        summary,
        doc: Value::Object(doc),
        code,
    })
}
