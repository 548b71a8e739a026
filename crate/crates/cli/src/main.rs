//! `esamp`: classify sequence prefixes, resample them, compose kernels and
//! run the verification suites.
//!
//! Exit codes: 0 pass or in-domain, 1 failed check or out-of-domain,
//! 2 usage error or malformed input, 3 inconclusive.

mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use esamp::empirical::{
    classify_countable, classify_finite, classify_real, classify_real_avg, default_epsilon,
    default_grid, empirical_expectation, empirical_measure, frequency_count, EmpiricalMeasure,
    HorizonSchedule, RegulatedFn, SetSpec, Status,
};
use esamp::kernel::{compose, tensor, KernelJson};
use esamp::kernel::laws::{run_law_suite, LawCheck};
use esamp::prefix::{Provenance, ValueKind};
use esamp::rational::{self, ratio};
use esamp::sequence::{resample_index_average, resample_truncated};
use esamp::verify::{
    default_moment_configs, sixth_moment_suite, verify_concentration, verify_ecdf_concentration,
    verify_empirical_adequacy, verify_glivenko_cantelli, verify_maximal_ergodic,
    verify_permutation_invariance, verify_resampling_idempotence, verify_slln, SequenceModel,
    TrialPlan, VerificationReport,
};
use esamp::{rng, Dist, EmpiricalVerdict, MixtureModel, SequencePrefix};

use input::SequenceSource;

#[derive(Parser)]
#[command(name = "esamp", version, about = "Empirical sampling of sequences and its limit theorems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed; trial t draws from stream (seed, t).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Tolerance ε.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Horizons, comma separated or repeated.
    #[arg(long, global = true, value_delimiter = ',')]
    horizon: Vec<usize>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a prefix lies in the domain of empirical sampling.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        /// Thresholds checked by the real classifiers.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
    },
    /// Classify, then report the empirical measure, frequencies and averages.
    Measure {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// A set such as `{1,2}`, `cofinite{1}` or `(-inf,0.5]`. Repeatable.
        #[arg(long = "set")]
        sets: Vec<String>,
        /// A regulated function as JSON. Repeatable.
        #[arg(long = "fn")]
        functions: Vec<String>,
        /// Horizon for frequencies and averages; defaults to the length.
        #[arg(long)]
        at: Option<usize>,
        /// Write atoms as `value,mass,cdf` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Law of the first m letters after a random permutation of the first n.
    Resample {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        m: usize,
        /// Defaults to the prefix length.
        #[arg(long = "at")]
        at: Option<usize>,
    },
    /// Exact kernel algebra on JSON kernels.
    Kernel {
        #[command(subcommand)]
        op: KernelOp,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
struct SourceArgs {
    /// One value per line; `-` reads stdin.
    #[arg(long, group = "source")]
    file: Option<String>,
    /// `{"dist": ..., "params": {...}, "seed": s, "n": N}`.
    #[arg(long, group = "source")]
    gen: Option<String>,
    /// A built-in deterministic sequence, e.g. `naturals`.
    #[arg(long, group = "source")]
    named: Option<String>,
    /// Length for `--named`; truncates the other sources.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alphabet: Option<usize>,
}

impl SourceArgs {
    fn source(&self) -> SequenceSource<'_> {
        SequenceSource {
            file: self.file.as_deref(),
            gen: self.gen.as_deref(),
            named: self.named.as_deref(),
            n: self.n,
            alphabet: self.alphabet,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Finite,
    #[value(alias = "natural")]
    Nat,
    Real,
    #[value(alias = "real-avg")]
    Avg,
}

impl KindArg {
    fn value_kind(self) -> ValueKind {
        match self {
            KindArg::Finite => ValueKind::Finite,
            KindArg::Nat => ValueKind::Natural,
            KindArg::Real | KindArg::Avg => ValueKind::Real,
        }
    }

    fn name(self) -> &'static str {
        match self {
            KindArg::Finite => "finite",
            KindArg::Nat => "natural",
            KindArg::Real => "real",
            KindArg::Avg => "real-avg",
        }
    }
}

#[derive(Subcommand)]
enum KernelOp {
    /// Run the first kernel, then the second.
    Compose { first: String, second: String },
    Tensor { left: String, right: String },
    /// Check the algebraic laws on random exact instances.
    Laws {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// A catalogue law such as `uniform01` or `bernoulli(1/3)`.
    #[arg(long)]
    dist: Option<String>,
    /// A mixture of IID laws as JSON, inline or a path.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Threshold for the maximal ergodic suite.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Head length permuted by the invariance suite.
    #[arg(long, default_value_t = 100)]
    head: usize,
    /// Standard errors allowed on Monte Carlo comparisons.
    #[arg(long)]
    slack: Option<f64>,
    /// Write per-trial raw values as CSV.
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Gc,
    Slln,
    Concentration,
    Ecdf,
    #[value(alias = "ergodic")]
    MaximalErgodic,
    Adequacy,
    Permutation,
    Idempotence,
    SixthMoment,
}

impl Suite {
    /// Default law, trials, N and tolerance.
    fn defaults(self) -> (&'static str, usize, usize, f64) {
        match self {
            Suite::Gc => ("uniform01", 100, 100_000, 0.01),
            Suite::Slln => ("exponential(1)", 100, 100_000, 0.01),
            Suite::Concentration => ("bernoulli(1/2)", 1000, 80, 0.2),
            Suite::Ecdf => ("uniform01", 1000, 2000, 0.1),
            Suite::MaximalErgodic => ("exponential(1)", 10_000, 10_000, 0.01),
            Suite::Adequacy => ("", 1000, 10_000, 0.01),
            Suite::Permutation => ("bernoulli(1/2)", 100, 10_000, 0.01),
            Suite::Idempotence => ("bernoulli(1/2)", 100, 10_000, 0.01),
            Suite::SixthMoment => ("", 0, 0, 0.0),
        }
    }
}

/// Usage errors and malformed input, exit code 2.
#[derive(Debug)]
pub struct Usage(String);

impl Usage {
    pub fn new(message: impl Into<String>) -> Self {
        Usage(message.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Pass = 0,
    Fail = 1,
    Inconclusive = 3,
}

impl From<Status> for Exit {
    fn from(s: Status) -> Self {
        match s {
            Status::InDomain => Exit::Pass,
            Status::OutOfDomain => Exit::Fail,
            Status::Inconclusive => Exit::Inconclusive,
        }
    }
}

fn pass_or_fail(pass: bool) -> Exit {
    if pass {
        Exit::Pass
    } else {
        Exit::Fail
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(Usage(message)) => {
            eprintln!("esamp: error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Exit, Usage> {
    let g = &cli.global;
    validate(g)?;
    match &cli.command {
        Command::Classify { input, grid } => classify(g, input, grid),
        Command::Measure {
            input,
            grid,
            sets,
            functions,
            at,
            csv,
        } => measure(g, input, grid, sets, functions, *at, csv.as_ref()),
        Command::Resample { source, m, at } => resample(g, source, *m, *at),
        Command::Kernel { op } => kernel(g, op),
        Command::Verify(args) => verify(g, args),
    }
}

fn validate(g: &Global) -> Result<(), Usage> {
    if let Some(tol) = g.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Usage::new(format!("--tol {tol} must be positive")));
        }
    }
    if g.trials == Some(0) {
        return Err(Usage::new("--trials must be positive"));
    }
    if g.horizon.first() == Some(&0) || g.horizon.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Usage::new(format!("--horizon {:?} must be positive and increasing", g.horizon)));
    }
    Ok(())
}

fn emit(g: &Global, json: &str, text: &str) -> Result<(), Usage> {
    if let Some(path) = &g.out {
        std::fs::write(path, format!("{json}\n"))
            .map_err(|e| Usage::new(format!("{}: {e}", path.display())))?;
    }
    // A closed pipe downstream is not an error worth reporting.
    let mut stdout = std::io::stdout().lock();
    let _ = if g.json {
        writeln!(stdout, "{json}")
    } else {
        write!(stdout, "{text}")
    };
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn schedule(g: &Global, len: usize) -> Result<HorizonSchedule, Usage> {
    let h = if g.horizon.is_empty() {
        let h = HorizonSchedule::default_for(len).map_err(|e| Usage::new(e.to_string()))?;
        match g.tol {
            Some(tol) => h.with_epsilon(tol),
            None => Ok(h),
        }
    } else {
        let last = *g.horizon.last().expect("non-empty");
        if last > len {
            return Err(Usage::new(format!("horizon {last} exceeds the prefix length {len}")));
        }
        HorizonSchedule::new(g.horizon.clone(), g.tol.unwrap_or_else(|| default_epsilon(last)))
    };
    h.map_err(|e| Usage::new(e.to_string()))
}

fn run_classifier(
    g: &Global,
    input: &InputArgs,
    grid: &[f64],
) -> Result<(SequencePrefix, EmpiricalVerdict), Usage> {
    let x = input.source.source().load(input.kind.value_kind())?;
    let h = schedule(g, x.len())?;
    let grid = if grid.is_empty() { default_grid() } else { grid.to_vec() };
    let verdict = match input.kind {
        KindArg::Finite => classify_finite(&x, &h),
        KindArg::Nat => classify_countable(&x, &h),
        KindArg::Real => classify_real(&x, &h, &grid),
        KindArg::Avg => classify_real_avg(&x, &h, &grid),
    }
    .map_err(|e| Usage::new(e.to_string()))?;
    Ok((x, verdict))
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    schema: &'static str,
    kind: &'static str,
    input: &'a Provenance,
    length: usize,
    verdict: &'a EmpiricalVerdict,
}

fn verdict_text(kind: KindArg, x: &SequencePrefix, v: &EmpiricalVerdict) -> String {
    let mut out = String::new();
    let h = &v.schedule;
    let _ = writeln!(
        out,
        "{} ({}, N = {}, checkpoints {:?}, ε = {})",
        v.status,
        kind.name(),
        x.len(),
        h.checkpoints(),
        h.epsilon()
    );
    for c in &v.criteria {
        let _ = write!(
            out,
            "  {:<30} {:<9} {:.4e} (tol {:.4e})",
            c.name,
            format!("{:?}", c.outcome).to_lowercase(),
            c.discrepancy,
            c.tolerance
        );
        if let Some(w) = &c.witness {
            let _ = write!(out, " at N = {} vs {}", w.horizons.0, w.horizons.1);
            if let Some(p) = w.point {
                let _ = write!(out, ", point {p}");
            }
        }
        out.push('\n');
    }
    if let Some(mean) = v.mean {
        let _ = writeln!(out, "  mean {mean}");
    }
    for note in &v.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    out
}

fn classify(g: &Global, input: &InputArgs, grid: &[f64]) -> Result<Exit, Usage> {
    let (x, v) = run_classifier(g, input, grid)?;
    let report = ClassifyReport {
        schema: "esamp.classify/1",
        kind: input.kind.name(),
        input: x.provenance(),
        length: x.len(),
        verdict: &v,
    };
    emit(g, &to_json(&report), &verdict_text(input.kind, &x, &v))?;
    Ok(v.status.into())
}

#[derive(Serialize)]
struct Frequency {
    set: String,
    horizon: usize,
    count: usize,
    relative: f64,
}

#[derive(Serialize)]
struct Expectation {
    function: serde_json::Value,
    horizon: usize,
    integral: f64,
    average: f64,
}

#[derive(Serialize)]
struct MeasureReport<'a> {
    schema: &'static str,
    kind: &'static str,
    input: &'a Provenance,
    length: usize,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<EmpiricalMeasure>,
    frequencies: Vec<Frequency>,
    expectations: Vec<Expectation>,
}

fn measure(
    g: &Global,
    input: &InputArgs,
    grid: &[f64],
    sets: &[String],
    functions: &[String],
    at: Option<usize>,
    csv: Option<&PathBuf>,
) -> Result<Exit, Usage> {
    let sets = sets
        .iter()
        .map(|s| SetSpec::parse(s, input.kind.value_kind()).map(|spec| (s.clone(), spec)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Usage::new(e.to_string()))?;
    let functions = functions
        .iter()
        .map(|f| {
            let value: serde_json::Value =
                serde_json::from_str(f).map_err(|e| Usage::new(format!("--fn: {e}")))?;
            let parsed: RegulatedFn =
                serde_json::from_value(value.clone()).map_err(|e| Usage::new(format!("--fn: {e}")))?;
            Ok((value, parsed))
        })
        .collect::<Result<Vec<_>, Usage>>()?;

    let (x, v) = run_classifier(g, input, grid)?;
    let n = at.unwrap_or(x.len());
    let measure = match v.status {
        Status::InDomain => Some(empirical_measure(&x, &v).map_err(|e| Usage::new(e.to_string()))?),
        _ => None,
    };
    let frequencies = sets
        .into_iter()
        .map(|(text, spec)| {
            let count = frequency_count(&x, &spec, n)?;
            Ok(Frequency {
                set: text,
                horizon: n,
                count,
                relative: count as f64 / n as f64,
            })
        })
        .collect::<Result<Vec<_>, esamp::empirical::EmpiricalError>>()
        .map_err(|e| Usage::new(e.to_string()))?;
    let expectations = functions
        .into_iter()
        .map(|(value, f)| {
            let (integral, average) = empirical_expectation(&x, &f, n)?;
            Ok(Expectation {
                function: value,
                horizon: n,
                integral,
                average,
            })
        })
        .collect::<Result<Vec<_>, esamp::empirical::EmpiricalError>>()
        .map_err(|e| Usage::new(e.to_string()))?;

    if let (Some(path), Some(m)) = (csv, &measure) {
        let mut body = String::from("value,mass,cdf\n");
        for (value, mass) in m.atoms() {
            let _ = writeln!(body, "{value},{mass},{}", m.cdf(value));
        }
        std::fs::write(path, body).map_err(|e| Usage::new(format!("{}: {e}", path.display())))?;
    }

    let mut text = verdict_text(input.kind, &x, &v);
    if let Some(m) = &measure {
        let atoms = m.atoms();
        let _ = writeln!(
            text,
            "measure at N = {}: {} atoms, total mass {}",
            m.horizon(),
            atoms.len(),
            m.total_mass()
        );
        for (value, mass) in atoms.iter().take(20) {
            let _ = writeln!(text, "  {value:>12} {mass:.6}");
        }
        if atoms.len() > 20 {
            let _ = writeln!(text, "  … {} more", atoms.len() - 20);
        }
    }
    for f in &frequencies {
        let _ = writeln!(text, "frequency of {} at N = {}: {} ({})", f.set, f.horizon, f.count, f.relative);
    }
    for e in &expectations {
        let _ = writeln!(text, "average of {} at N = {}: {}", e.function, e.horizon, e.average);
    }
    let report = MeasureReport {
        schema: "esamp.measure/1",
        kind: input.kind.name(),
        input: x.provenance(),
        length: x.len(),
        status: v.status,
        measure,
        frequencies,
        expectations,
    };
    emit(g, &to_json(&report), &text)?;
    Ok(v.status.into())
}

#[derive(Serialize)]
struct WordProb {
    word: Vec<usize>,
    p: String,
}

#[derive(Serialize)]
struct ResampleReport<'a> {
    schema: &'static str,
    input: &'a Provenance,
    alphabet: usize,
    m: usize,
    n: usize,
    pmf: Vec<WordProb>,
    /// Distance to the IID law of the empirical frequencies.
    index_average_tv: String,
    tv_bound: String,
}

fn resample(g: &Global, source: &SourceArgs, m: usize, at: Option<usize>) -> Result<Exit, Usage> {
    let x = source.source().load(ValueKind::Finite)?;
    let n = at.unwrap_or(x.len());
    let law = resample_truncated(&x, m, n).map_err(|e| Usage::new(e.to_string()))?;
    let iid = resample_index_average(&x, m, n).map_err(|e| Usage::new(e.to_string()))?;
    let tv = law.total_variation(&iid);
    let bound = ratio((m * (m - 1)) as i64, 2 * n as i64);
    let pmf: Vec<WordProb> = law
        .pmf()
        .iter()
        .map(|(w, p)| WordProb {
            word: w.clone(),
            p: rational::format(p),
        })
        .collect();
    let mut text = format!("first {m} of a random permutation of the first {n} letters\n");
    for wp in &pmf {
        let word: Vec<String> = wp.word.iter().map(usize::to_string).collect();
        let _ = writeln!(text, "  {:<16} {}", word.join(" "), wp.p);
    }
    let _ = writeln!(
        text,
        "TV to the IID frequency law {} ≤ {}",
        rational::format(&tv),
        rational::format(&bound)
    );
    let report = ResampleReport {
        schema: "esamp.resample/1",
        input: x.provenance(),
        alphabet: law.alphabet(),
        m,
        n,
        pmf,
        index_average_tv: rational::format(&tv),
        tv_bound: rational::format(&bound),
    };
    emit(g, &to_json(&report), &text)?;
    Ok(Exit::Pass)
}

#[derive(Serialize)]
struct KernelReport {
    schema: &'static str,
    op: &'static str,
    kernel: KernelJson,
}

#[derive(Serialize)]
struct LawsReport {
    schema: &'static str,
    op: &'static str,
    seed: u64,
    instances: usize,
    pass: bool,
    checks: Vec<LawCheck>,
}

fn kernel(g: &Global, op: &KernelOp) -> Result<Exit, Usage> {
    let (name, k) = match op {
        KernelOp::Compose { first, second } => {
            let (f, h) = (input::kernel(first)?, input::kernel(second)?);
            ("compose", compose(&f, &h).map_err(|e| Usage::new(e.to_string()))?)
        }
        KernelOp::Tensor { left, right } => ("tensor", tensor(&input::kernel(left)?, &input::kernel(right)?)),
        KernelOp::Laws { instances } => {
            if *instances == 0 {
                return Err(Usage::new("--instances must be positive"));
            }
            let checks = run_law_suite(&mut rng::stream(g.seed, 0), *instances);
            let pass = checks.iter().all(LawCheck::passed);
            let mut text = String::new();
            for c in &checks {
                let _ = write!(
                    text,
                    "{} {:<40} {}/{}",
                    if c.passed() { "ok  " } else { "FAIL" },
                    c.law,
                    c.instances - c.failures,
                    c.instances
                );
                if let Some(f) = &c.first_failure {
                    let _ = write!(text, "  first failure: {f}");
                }
                text.push('\n');
            }
            let report = LawsReport {
                schema: "esamp.kernel/1",
                op: "laws",
                seed: g.seed,
                instances: *instances,
                pass,
                checks,
            };
            emit(g, &to_json(&report), &text)?;
            return Ok(pass_or_fail(pass));
        }
    };
    let report = KernelReport {
        schema: "esamp.kernel/1",
        op: name,
        kernel: KernelJson::from(&k),
    };
    emit(g, &to_json(&report), &format!("{}\n", k.to_json()))?;
    Ok(Exit::Pass)
}

fn verify(g: &Global, args: &VerifyArgs) -> Result<Exit, Usage> {
    let (law, trials, n, tol) = args.suite.defaults();
    let dist = || Dist::parse(args.dist.as_deref().unwrap_or(law)).map_err(|e| Usage::new(format!("--dist: {e}")));
    let mut plan = TrialPlan::new(g.trials.unwrap_or(trials), g.seed, args.n.unwrap_or(n))
        .with_epsilons(vec![g.tol.unwrap_or(tol)]);
    if let Some(m) = args.m {
        plan = plan.with_m(m);
    }
    if let Some(slack) = args.slack {
        plan = plan.with_slack(slack);
    }
    if !g.horizon.is_empty() {
        plan = plan.with_horizons(g.horizon.clone());
    }
    let sequence_model = || -> Result<SequenceModel, Usage> {
        match &args.model {
            Some(m) => Ok(SequenceModel::Mixture(input::mixture(m)?)),
            None => Ok(SequenceModel::Law(dist()?)),
        }
    };
    let report = match args.suite {
        Suite::Gc => verify_glivenko_cantelli(&dist()?, &plan),
        Suite::Slln => verify_slln(&dist()?, &plan),
        Suite::Concentration => verify_concentration(&dist()?, &plan),
        Suite::Ecdf => verify_ecdf_concentration(&dist()?, &plan),
        Suite::MaximalErgodic => verify_maximal_ergodic(&dist()?, args.r, &plan),
        Suite::Adequacy => {
            if args.dist.is_some() {
                return Err(Usage::new("adequacy takes an exact --model, not --dist"));
            }
            let model = match &args.model {
                Some(m) => input::mixture(m)?,
                None => MixtureModel::iid(vec![ratio(2, 3), ratio(1, 3)]).expect("valid pmf"),
            };
            if args.m.is_none() {
                plan = plan.with_m(3);
            }
            verify_empirical_adequacy(&model, &plan)
        }
        Suite::Permutation => verify_permutation_invariance(&sequence_model()?, args.head, &plan),
        Suite::Idempotence => verify_resampling_idempotence(&sequence_model()?, &plan),
        Suite::SixthMoment => sixth_moment_suite(&default_moment_configs()),
    }
    .map_err(|e| Usage::new(e.to_string()))?;
    write_raw(args, &report)?;
    emit(g, &report.to_json(), &report.table())?;
    Ok(pass_or_fail(report.pass))
}

fn write_raw(args: &VerifyArgs, report: &VerificationReport) -> Result<(), Usage> {
    if let Some(path) = &args.raw {
        std::fs::write(path, report.raw_csv()).map_err(|e| Usage::new(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
