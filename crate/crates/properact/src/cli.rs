//! Problem ingestion, command dispatch, and deterministic report emission.
//!
//! Problems and reports are JSON; matrices travel as row-major arrays of
//! numbers.  Exit codes: 0 = verdict produced (positive), 1 = NotProper /
//! NotEquivalent (a successful decision, distinguished in the report),
//! 2 = undecided or budget exhausted, 3 = input error, 4 = internal
//! consistency failure.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::{Complex, DMatrix, DVector};

use crate::cartan::{self, AmbientGroup, GroupKind, SubgroupSpec};
use crate::catzero::{
    self, CPoint, Cat0Model, GeodesicRay, HypBoundary, RayDirection,
};
use crate::numerics::{DenseMatrix, TolerancePolicy};
use crate::properness::{
    self, Budgets, EquivalenceVerdict, Mode, PropernessProblem, Verdict,
};
use crate::quotient::{self, MetricGSpaceModel};
use crate::sample::Sampler;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

// ---------------------------------------------------------------------------
// Wire formats.

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ProblemFile {
    pub ambient: AmbientDesc,
    pub h1: SubgroupDesc,
    pub h2: SubgroupDesc,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub budgets: Budgets,
    /// Seed for all randomized sweeps; defaulted so every run reproduces.
    #[serde(default)]
    pub seed: u64,
}

fn default_mode() -> Mode {
    Mode::Auto
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AmbientDesc {
    pub kind: GroupKind,
    pub n: usize,
}

impl AmbientDesc {
    pub fn to_group(&self) -> Result<AmbientGroup> {
        AmbientGroup::new(self.kind, self.n)
    }
}

/// Row-major matrix payload.
pub type MatrixRows = Vec<Vec<f64>>;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "variant")]
pub enum SubgroupDesc {
    ReductiveCartan { generators: Vec<MatrixRows> },
    Discrete { generators: Vec<MatrixRows> },
    OneParameter { x: MatrixRows },
    ElementList { elements: Vec<MatrixRows> },
}

pub fn matrix_from_rows(rows: &MatrixRows, label: &str) -> Result<DenseMatrix> {
    if rows.is_empty() {
        return Err(Error::Input(format!("{label}: empty matrix")));
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::Input(format!("{label}: empty row")));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Input(format!(
                "{label}: row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Input(format!("{label}: entry ({i},{j}) is not finite")));
            }
        }
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().copied(),
    ))
}

pub fn matrix_to_rows(m: &DenseMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl SubgroupDesc {
    pub fn to_spec(&self, label: &str) -> Result<SubgroupSpec> {
        let many = |ms: &[MatrixRows], what: &str| -> Result<Vec<DenseMatrix>> {
            ms.iter()
                .enumerate()
                .map(|(i, m)| matrix_from_rows(m, &format!("{label}.{what}[{i}]")))
                .collect()
        };
        Ok(match self {
            SubgroupDesc::ReductiveCartan { generators } => SubgroupSpec::ReductiveCartan {
                generators: many(generators, "generators")?,
            },
            SubgroupDesc::Discrete { generators } => SubgroupSpec::Discrete {
                generators: many(generators, "generators")?,
            },
            SubgroupDesc::OneParameter { x } => SubgroupSpec::OneParameter {
                x: matrix_from_rows(x, &format!("{label}.x"))?,
            },
            SubgroupDesc::ElementList { elements } => SubgroupSpec::ElementList {
                elements: many(elements, "elements")?,
            },
        })
    }
}

/// One pass/fail line of a verification sweep.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SuiteLine {
    pub name: String,
    pub pass: bool,
    /// Worst margin observed; sign convention is per-sweep, stated in
    /// `detail`.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind")]
pub enum VerdictPayload {
    Proper {
        gap: Option<f64>,
    },
    NotProper {
        witness: Vec<f64>,
        component1: usize,
        component2: usize,
    },
    EmpiricalProper {
        radius: f64,
        word_length: usize,
        max_capture_norm: f64,
    },
    EmpiricalNotProper {
        radius: f64,
        word_length: usize,
        offender_norm: f64,
    },
    Undecided {
        reason: String,
    },
    Equivalent,
    NotEquivalent,
}

impl VerdictPayload {
    fn from_verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Proper { certificate } => VerdictPayload::Proper {
                gap: certificate.gap,
            },
            Verdict::NotProper {
                witness,
                component1,
                component2,
            } => VerdictPayload::NotProper {
                witness: witness.iter().copied().collect(),
                component1: *component1,
                component2: *component2,
            },
            Verdict::EmpiricalProper {
                radius,
                word_length,
                max_capture_norm,
            } => VerdictPayload::EmpiricalProper {
                radius: *radius,
                word_length: *word_length,
                max_capture_norm: *max_capture_norm,
            },
            Verdict::EmpiricalNotProper {
                radius,
                word_length,
                offender_norm,
            } => VerdictPayload::EmpiricalNotProper {
                radius: *radius,
                word_length: *word_length,
                offender_norm: *offender_norm,
            },
            Verdict::Undecided { reason } => VerdictPayload::Undecided {
                reason: reason.clone(),
            },
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            VerdictPayload::Proper { .. }
            | VerdictPayload::EmpiricalProper { .. }
            | VerdictPayload::Equivalent => EXIT_OK,
            VerdictPayload::NotProper { .. }
            | VerdictPayload::EmpiricalNotProper { .. }
            | VerdictPayload::NotEquivalent => EXIT_NEGATIVE,
            VerdictPayload::Undecided { .. } => EXIT_UNDECIDED,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field allowed to differ
    /// between identical runs.
    pub timestamp: u64,
    pub command: String,
    pub seed: u64,
    pub tolerance: TolerancePolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Budgets>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictPayload>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub suites: Vec<SuiteLine>,
}

impl ReportFile {
    fn new(command: &str, seed: u64, tol: &TolerancePolicy) -> Self {
        ReportFile {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            command: command.to_string(),
            seed,
            tolerance: *tol,
            budgets: None,
            verdict: None,
            suites: Vec::new(),
        }
    }

    fn all_pass(&self) -> bool {
        self.suites.iter().all(|l| l.pass)
    }
}

// ---------------------------------------------------------------------------
// Command line.

#[derive(Debug, Parser)]
#[command(name = "properact", version, about = "Properness of subgroup pairs via Cartan projections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide properness of the pair in a problem file.
    Decide(ProblemArgs),
    /// Decide coarse equivalence of the pair in a problem file.
    Equiv(ProblemArgs),
    /// Print the Cartan projection of a matrix.
    Project(ProjectArgs),
    /// Rank criterion report for h1 of a problem file.
    Rank(ProblemArgs),
    /// Comparison-triangle and asymptotic-ray sweeps on the CAT(0) models.
    Cat0Verify(SweepArgs),
    /// Basepoint-move witness sweeps on the hyperbolic plane and a product.
    PropertyS(SweepArgs),
    /// Orbit-quotient sweeps: non-expanding conditions, neighborhood
    /// equations, section intersections.
    QuotientVerify(SweepArgs),
    /// Saturation / neighborhood theorem suite on the rank-one model.
    Suite(SweepArgs),
    /// Run every decision layer on a problem file and compare.
    CrossValidate(ProblemArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Report file to write (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Override the problem file's mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Override the word-length budget.
    #[arg(long)]
    pub word_length: Option<usize>,
    /// Override the exploration radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Override the net thickening radius.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Override the net resolution.
    #[arg(long)]
    pub mesh: Option<f64>,
    /// Override the seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the geometric tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
    Auto,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Sampled => Mode::Sampled,
            ModeArg::Auto => Mode::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Matrix inline as a JSON array of rows.
    #[arg(long)]
    pub matrix: Option<String>,
    /// File containing the matrix as a JSON array of rows.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Report file to write (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sample count per sweep.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Neighborhood radius where a sweep takes one.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    /// Net resolution where a sweep takes one.
    #[arg(long, default_value_t = 0.01)]
    pub mesh: f64,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Report file to write (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn tolerance_with(eps_geom: Option<f64>) -> TolerancePolicy {
    let mut tol = TolerancePolicy::default();
    if let Some(e) = eps_geom {
        tol.eps_geom = e;
    }
    tol
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Contract(_) | Error::Domain(_) | Error::Unsupported(_) => {
            EXIT_INPUT
        }
        Error::Budget(_) | Error::WitnessNotFound(_) => EXIT_UNDECIDED,
        Error::Numerical(_) | Error::Inconsistency(_) => EXIT_INCONSISTENT,
    }
}

/// Parse `args` (including the program name) and run.  Returns the exit
/// code; all human-readable output goes to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success exits.
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Decide(a) => cmd_decide(a),
        Command::Equiv(a) => cmd_equiv(a),
        Command::Project(a) => cmd_project(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Cat0Verify(a) => cmd_cat0_verify(a),
        Command::PropertyS(a) => cmd_property_s(a),
        Command::QuotientVerify(a) => cmd_quotient_verify(a),
        Command::Suite(a) => cmd_suite(a),
        Command::CrossValidate(a) => cmd_cross_validate(a),
    }
}

fn load_problem(args: &ProblemArgs) -> Result<(PropernessProblem, u64)> {
    let text = std::fs::read_to_string(&args.problem)
        .map_err(|e| Error::Input(format!("{}: {e}", args.problem.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{}: {e}", args.problem.display())))?;
    let ambient = file.ambient.to_group()?;
    let mut budgets = file.budgets;
    if let Some(l) = args.word_length {
        budgets.word_length = l;
    }
    if let Some(r) = args.radius {
        budgets.radius = r;
    }
    if let Some(r) = args.rho {
        budgets.rho = r;
    }
    if let Some(m) = args.mesh {
        budgets.mesh = m;
    }
    let problem = PropernessProblem {
        h1: file.h1.to_spec("h1")?,
        h2: file.h2.to_spec("h2")?,
        ambient,
        mode: args.mode.map(Mode::from).unwrap_or(file.mode),
        budgets,
    };
    Ok((problem, args.seed.unwrap_or(file.seed)))
}

fn write_report(path: &Option<PathBuf>, report: &ReportFile) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Input(format!("report serialization: {e}")))?;
    text.push('\n');
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn cmd_decide(args: &ProblemArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let (problem, seed) = load_problem(args)?;
    let verdict = properness::decide(&problem, &tol)?;
    let payload = VerdictPayload::from_verdict(&verdict);
    let mut report = ReportFile::new("decide", seed, &tol);
    report.budgets = Some(problem.budgets);
    report.verdict = Some(payload.clone());
    write_report(&args.report, &report)?;
    println!("verdict: {}", verdict.kind());
    if let VerdictPayload::Proper { gap: Some(g) } = &payload {
        println!("gap: {g:.6}");
    }
    if let VerdictPayload::NotProper { witness, .. } = &payload {
        let entries: Vec<String> = witness.iter().map(|v| format!("{v:.6}")).collect();
        println!("witness: ({})", entries.join(", "));
    }
    Ok(payload.exit_code())
}

fn cmd_equiv(args: &ProblemArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let (problem, seed) = load_problem(args)?;
    let verdict = properness::decide_equivalence(&problem, &tol)?;
    let payload = match &verdict {
        EquivalenceVerdict::Equivalent => VerdictPayload::Equivalent,
        EquivalenceVerdict::NotEquivalent => VerdictPayload::NotEquivalent,
        EquivalenceVerdict::Undecided { reason } => VerdictPayload::Undecided {
            reason: reason.clone(),
        },
    };
    let mut report = ReportFile::new("equiv", seed, &tol);
    report.budgets = Some(problem.budgets);
    report.verdict = Some(payload.clone());
    write_report(&args.report, &report)?;
    println!(
        "verdict: {}",
        match &verdict {
            EquivalenceVerdict::Equivalent => "Equivalent",
            EquivalenceVerdict::NotEquivalent => "NotEquivalent",
            EquivalenceVerdict::Undecided { .. } => "Undecided",
        }
    );
    Ok(payload.exit_code())
}

fn cmd_project(args: &ProjectArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let rows: MatrixRows = match (&args.matrix, &args.file) {
        (Some(inline), None) => serde_json::from_str(inline)
            .map_err(|e| Error::Input(format!("--matrix: {e}")))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?
        }
        _ => {
            return Err(Error::Input(
                "project takes exactly one of --matrix or --file".into(),
            ))
        }
    };
    let m = matrix_from_rows(&rows, "matrix")?;
    if m.nrows() != m.ncols() {
        return Err(Error::Input(format!(
            "matrix: {}x{} is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let mu = cartan::cartan_projection(&m, &tol)?;
    let entries: Vec<String> = mu.iter().map(|v| format!("{v:.4}")).collect();
    println!("({})", entries.join(", "));
    if args.report.is_some() {
        let mut report = ReportFile::new("project", 0, &tol);
        report.suites.push(SuiteLine {
            name: "cartan-projection".into(),
            pass: true,
            worst: 0.0,
            detail: format!("mu = [{}]", entries.join(", ")),
        });
        write_report(&args.report, &report)?;
    }
    Ok(EXIT_OK)
}

fn cmd_rank(args: &ProblemArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let (problem, seed) = load_problem(args)?;
    let rep = properness::calabi_markus(&problem.ambient, &problem.h1, &tol)?;
    println!(
        "ambient rank: {}\nsubgroup rank: {}\nadmits infinite discontinuous group: {}",
        rep.ambient_rank, rep.subgroup_rank, rep.admits_infinite_discontinuous_group
    );
    if args.report.is_some() {
        let mut report = ReportFile::new("rank", seed, &tol);
        report.suites.push(SuiteLine {
            name: "rank-criterion".into(),
            pass: true,
            worst: 0.0,
            detail: serde_json::to_string(&rep)
                .map_err(|e| Error::Input(format!("report serialization: {e}")))?,
        });
        write_report(&args.report, &report)?;
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// Verification sweeps.

fn print_and_exit(report: &ReportFile, path: &Option<PathBuf>) -> Result<i32> {
    for line in &report.suites {
        println!(
            "{}: {} (worst {:.3e}; {})",
            line.name,
            if line.pass { "pass" } else { "FAIL" },
            line.worst,
            line.detail
        );
    }
    write_report(path, report)?;
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    })
}

fn cat0_models() -> Vec<(&'static str, Cat0Model)> {
    vec![
        ("euclidean-3", Cat0Model::Euclidean { n: 3 }),
        ("hyperbolic", Cat0Model::HyperbolicPlane),
        ("posdef-2", Cat0Model::PosDef { n: 2 }),
        (
            "product",
            Cat0Model::Product(vec![
                Cat0Model::Euclidean { n: 2 },
                Cat0Model::HyperbolicPlane,
            ]),
        ),
    ]
}

fn random_cpoint(model: &Cat0Model, rng: &mut Sampler, scale: f64) -> CPoint {
    match model {
        Cat0Model::Euclidean { n } => CPoint::Euclidean(rng.gaussian_vector(*n) * scale),
        Cat0Model::HyperbolicPlane => CPoint::Hyp(Complex::new(
            rng.uniform_in(-scale, scale),
            rng.uniform_in(-1.5, 1.5).exp(),
        )),
        Cat0Model::PosDef { n } => {
            let tol = TolerancePolicy::default();
            let x = rng.random_symmetric(*n, scale.min(1.5));
            CPoint::Spd(crate::numerics::sym_exp(&x, &tol).expect("exp of symmetric"))
        }
        Cat0Model::Product(models) => CPoint::Product(
            models
                .iter()
                .map(|m| random_cpoint(m, rng, scale))
                .collect(),
        ),
    }
}

fn random_ray_direction(model: &Cat0Model, rng: &mut Sampler) -> RayDirection {
    match model {
        Cat0Model::Euclidean { n } => {
            let v = rng.gaussian_vector(*n);
            let v = if v.norm() < 1e-9 {
                DVector::from_element(*n, 1.0 / (*n as f64).sqrt())
            } else {
                v.clone() / v.norm()
            };
            RayDirection::Euclidean(v)
        }
        Cat0Model::HyperbolicPlane => {
            if rng.uniform() < 0.25 {
                RayDirection::Hyp(HypBoundary::Infinity)
            } else {
                RayDirection::Hyp(HypBoundary::Real(rng.uniform_in(-3.0, 3.0)))
            }
        }
        Cat0Model::PosDef { n } => {
            let x = rng.random_symmetric(*n, 1.0);
            let x = if x.norm() < 1e-9 {
                DMatrix::identity(*n, *n) / (*n as f64).sqrt()
            } else {
                x.clone() / x.norm()
            };
            RayDirection::Spd(x)
        }
        Cat0Model::Product(models) => {
            let mut weights: Vec<f64> = models.iter().map(|_| rng.uniform_in(0.2, 1.0)).collect();
            let rss: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            for w in &mut weights {
                *w /= rss;
            }
            RayDirection::Product(
                models
                    .iter()
                    .zip(weights)
                    .map(|(m, w)| (random_ray_direction(m, rng), w))
                    .collect(),
            )
        }
    }
}

fn cmd_cat0_verify(args: &SweepArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let mut report = ReportFile::new("cat0-verify", args.seed, &tol);
    for (name, model) in cat0_models() {
        let mut rng = Sampler::new(args.seed);
        let mut worst = f64::INFINITY;
        let mut worst_flat = 0.0f64;
        for _ in 0..args.samples {
            let x1 = random_cpoint(&model, &mut rng, 2.0);
            let x2 = random_cpoint(&model, &mut rng, 2.0);
            let x3 = random_cpoint(&model, &mut rng, 2.0);
            let s = rng.uniform();
            let margin = catzero::comparison_check(&model, &x1, &x2, &x3, s, &tol)?;
            worst = worst.min(margin);
            if matches!(model, Cat0Model::Euclidean { .. }) {
                worst_flat = worst_flat.max(margin.abs());
            }
        }
        let mut pass = worst >= -1e-9;
        let mut detail = "min comparison margin".to_string();
        if matches!(model, Cat0Model::Euclidean { .. }) {
            pass = pass && worst_flat <= 1e-9;
            detail = format!("min comparison margin; flat deviation {worst_flat:.3e}");
        }
        report.suites.push(SuiteLine {
            name: format!("cat0-comparison-{name}"),
            pass,
            worst,
            detail,
        });
    }
    // Asymptotic rays: d(c(t), c'(t)) <= d(p, p'), checked out to t = 100.
    for (name, model) in cat0_models() {
        if matches!(model, Cat0Model::PosDef { .. }) {
            // Rays from a new base with the same direction data are only
            // constructed on the other models.
            continue;
        }
        let mut rng = Sampler::new(args.seed.wrapping_add(1));
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..args.samples {
            let p = random_cpoint(&model, &mut rng, 2.0);
            let p_new = random_cpoint(&model, &mut rng, 2.0);
            let dir = random_ray_direction(&model, &mut rng);
            let ray = GeodesicRay {
                base: p.clone(),
                direction: dir,
            };
            let ray2 = catzero::asymptotic_ray(&model, &ray, &p_new)?;
            let bound = model.dist(&p, &p_new, &tol)?;
            for &t in &[0.0, 1.0, 10.0, 100.0] {
                let a = ray.at(&model, t, &tol)?;
                let b = ray2.at(&model, t, &tol)?;
                let excess = model.dist(&a, &b, &tol)? - bound;
                worst = worst.max(excess);
            }
        }
        report.suites.push(SuiteLine {
            name: format!("cat0-asymptotic-ray-{name}"),
            pass: worst <= 1e-6,
            worst,
            detail: "max d(c(t), c'(t)) - d(p, p') over t <= 100".into(),
        });
    }
    print_and_exit(&report, &args.report)
}

fn cmd_property_s(args: &SweepArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let mut report = ReportFile::new("property-s", args.seed, &tol);
    let models: Vec<(&str, Cat0Model)> = vec![
        ("euclidean-3", Cat0Model::Euclidean { n: 3 }),
        ("hyperbolic", Cat0Model::HyperbolicPlane),
        (
            "product",
            Cat0Model::Product(vec![
                Cat0Model::Euclidean { n: 2 },
                Cat0Model::HyperbolicPlane,
            ]),
        ),
    ];
    for (name, model) in models {
        let mut rng = Sampler::new(args.seed);
        let mut worst_fix = 0.0f64;
        let mut worst_move = f64::NEG_INFINITY;
        for _ in 0..args.samples {
            let p = random_cpoint(&model, &mut rng, 2.0);
            let p0 = random_cpoint(&model, &mut rng, 2.0);
            let q = random_cpoint(&model, &mut rng, 2.0);
            let w = catzero::property_s_witness(&model, &p0, &p, &q, &tol)?;
            let moved_p = w.g.apply(&p)?;
            worst_fix = worst_fix.max(model.dist(&moved_p, &p0, &tol)?);
            let moved_q = w.g.apply(&q)?;
            let excess = model.dist(&q, &moved_q, &tol)? - w.bound;
            worst_move = worst_move.max(excess);
        }
        report.suites.push(SuiteLine {
            name: format!("property-s-{name}-basepoint"),
            pass: worst_fix <= 1e-9,
            worst: worst_fix,
            detail: "max d(g p, p0)".into(),
        });
        report.suites.push(SuiteLine {
            name: format!("property-s-{name}-displacement"),
            pass: worst_move <= 1e-6,
            worst: worst_move,
            detail: "max d(q, g q) - (r + 2b)".into(),
        });
    }
    print_and_exit(&report, &args.report)
}

fn cmd_quotient_verify(args: &SweepArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let mut report = ReportFile::new("quotient-verify", args.seed, &tol);
    let models: Vec<(String, MetricGSpaceModel)> = (2..=4)
        .map(|n| (format!("posdef-{n}"), MetricGSpaceModel::PosDefConj { n }))
        .chain(std::iter::once((
            "euclidean-3".to_string(),
            MetricGSpaceModel::EuclideanOrth { n: 3 },
        )))
        .collect();
    for (name, model) in &models {
        let mut rng = Sampler::new(args.seed);
        let rep = quotient::verify_nonexpanding_conditions(model, args.samples, &mut rng, &tol)?;
        report.suites.push(SuiteLine {
            name: format!("quotient-nonexpanding-{name}"),
            pass: rep.max_condition1_violation <= 1e-8 && rep.max_condition2_residual <= 1e-8,
            worst: rep
                .max_condition1_violation
                .max(rep.max_condition2_residual),
            detail: "max violation of conditions (1) and (2)".into(),
        });

        let mut rng = Sampler::new(args.seed.wrapping_add(1));
        let c: Vec<quotient::Point> = (0..4).map(|_| model.sample_point(&mut rng, 1.0)).collect();
        let rep =
            quotient::verify_lemma_neighborhoods(model, &c, args.radius, args.samples, &mut rng, &tol)?;
        report.suites.push(SuiteLine {
            name: format!("quotient-neighborhoods-{name}"),
            pass: rep.counterexample.is_none(),
            worst: rep.max_defect,
            detail: rep
                .counterexample
                .unwrap_or_else(|| "max inclusion defect".into()),
        });

        // Section sweeps: (K p) meets the section exactly in W p.
        let section = model.section()?;
        let mut rng = Sampler::new(args.seed.wrapping_add(2));
        let mut worst = 0.0f64;
        let scans = (args.samples / 5).max(1);
        for _ in 0..scans.min(100) {
            let p = match model {
                MetricGSpaceModel::EuclideanOrth { .. } => rng.gaussian_vector(1),
                MetricGSpaceModel::PosDefConj { n } => {
                    let mut v = rng.gaussian_vector(*n);
                    let mean = v.sum() / *n as f64;
                    for i in 0..*n {
                        v[i] -= mean;
                    }
                    v
                }
            };
            let scan =
                quotient::orbit_section_scan(&section, &p, args.mesh, 50, &mut rng, &tol)?;
            worst = worst.max(scan.max_deviation_from_w_orbit);
        }
        report.suites.push(SuiteLine {
            name: format!("quotient-section-{name}"),
            pass: worst <= 1e-2,
            worst,
            detail: "max deviation of section hits from the W-orbit".into(),
        });
    }
    print_and_exit(&report, &args.report)
}

fn cmd_suite(args: &SweepArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let mut report = ReportFile::new("suite", args.seed, &tol);
    let config = properness::SuiteConfig {
        n: 2,
        samples: args.samples,
        configs: 100,
        r: args.radius,
        seed: args.seed,
    };
    let rep = properness::theorem_suite(&config, &tol)?;
    report.suites.push(SuiteLine {
        name: "hbi-four-conditions".into(),
        pass: rep.condition_disagreements == 0,
        worst: rep.condition_disagreements as f64,
        detail: format!("{} configurations", rep.configs_checked),
    });
    report.suites.push(SuiteLine {
        name: "saturation-forward".into(),
        pass: rep.saturation_forward_defect <= 1e-6,
        worst: rep.saturation_forward_defect,
        detail: "max dist to image minus r".into(),
    });
    report.suites.push(SuiteLine {
        name: "saturation-converse".into(),
        pass: rep.saturation_converse_defect <= 1e-6,
        worst: rep.saturation_converse_defect,
        detail: "max factor budget excess".into(),
    });
    report.suites.push(SuiteLine {
        name: "neighborhood-tau".into(),
        pass: rep.tau_observed <= rep.tau_predicted + 1e-6,
        worst: rep.tau_observed,
        detail: format!("predicted {}", rep.tau_predicted),
    });
    print_and_exit(&report, &args.report)
}

fn cmd_cross_validate(args: &ProblemArgs) -> Result<i32> {
    let tol = tolerance_with(args.tolerance);
    let (problem, seed) = load_problem(args)?;
    let rep = properness::cross_validate(&problem, &tol)?;
    let mut report = ReportFile::new("cross-validate", seed, &tol);
    report.budgets = Some(problem.budgets);
    report.suites.push(SuiteLine {
        name: "layer-agreement".into(),
        pass: rep.consistent,
        worst: if rep.consistent { 0.0 } else { 1.0 },
        detail: rep.detail.clone(),
    });
    for line in &report.suites {
        println!(
            "{}: {} ({})",
            line.name,
            if line.pass { "pass" } else { "FAIL" },
            line.detail
        );
    }
    if let Some(kind) = &rep.exact_kind {
        println!("exact: {kind}");
    }
    println!("sampled: {}", rep.sampled_kind);
    write_report(&args.report, &report)?;
    if !rep.consistent {
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(match rep.exact_kind.as_deref().unwrap_or(&rep.sampled_kind) {
        "Proper" | "EmpiricalProper" => EXIT_OK,
        "NotProper" | "EmpiricalNotProper" => EXIT_NEGATIVE,
        _ => EXIT_UNDECIDED,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem_json(h1: serde_json::Value, h2: serde_json::Value) -> String {
        serde_json::json!({
            "ambient": {"kind": "SL", "n": 3},
            "h1": h1,
            "h2": h2,
        })
        .to_string()
    }

    fn one_param_json(diag: &[f64]) -> serde_json::Value {
        let n = diag.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0.0 }).collect())
            .collect();
        serde_json::json!({"variant": "OneParameter", "x": rows})
    }

    #[test]
    fn problem_file_round_trip() {
        let text = problem_json(
            one_param_json(&[1.0, 1.0, -2.0]),
            one_param_json(&[1.0, -1.0, 0.0]),
        );
        let file: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.seed, 0);
        assert!(matches!(file.mode, Mode::Auto));
        let spec = file.h1.to_spec("h1").unwrap();
        assert!(matches!(spec, SubgroupSpec::OneParameter { .. }));
        // Serializing and re-parsing preserves the payload.
        let again: ProblemFile =
            serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(again.ambient.n, 3);
    }

    #[test]
    fn report_round_trips_verdict_bit_exactly() {
        let tol = TolerancePolicy::default();
        let mut report = ReportFile::new("decide", 7, &tol);
        report.verdict = Some(VerdictPayload::Proper {
            gap: Some(0.1234567890123456789),
        });
        let text = serde_json::to_string(&report).unwrap();
        let parsed: ReportFile = serde_json::from_str(&text).unwrap();
        let (Some(VerdictPayload::Proper { gap: Some(a) }), Some(VerdictPayload::Proper { gap: Some(b) })) =
            (&report.verdict, &parsed.verdict)
        else {
            panic!()
        };
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn malformed_matrix_is_input_error() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        let e = matrix_from_rows(&rows, "h1.x").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("h1.x"), "{msg}");
        assert!(msg.contains("row 1"), "{msg}");
    }

    #[test]
    fn project_inline_golden() {
        // Captured via the library: log singular values of [[1,1],[0,1]].
        let code = run([
            "properact",
            "project",
            "--matrix",
            "[[1,1],[0,1]]",
        ]);
        assert_eq!(code, EXIT_OK);
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(exit_code_for(&Error::Input("x".into())), EXIT_INPUT);
        assert_eq!(exit_code_for(&Error::Budget("x".into())), EXIT_UNDECIDED);
        assert_eq!(
            exit_code_for(&Error::Inconsistency("x".into())),
            EXIT_INCONSISTENT
        );
    }
}
