//! Command-line front end: `solve`, `converge` and `quality`.
//!
//! Every [`StudyConfig`] field can come from a JSON file (`--config`) or a
//! flag; flags override the file. Exit codes: 0 success, 2 usage or
//! configuration error, 3 numerical failure, 4 failed `converge --check`.

mod config;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{CaseConfig, CaseKind, StudyConfig, MAX_TOL};

use crate::analysis::report::{
    quality_rate_rows, rate_rows, write_quality_csv, write_rates_csv, write_report_csv,
};
use crate::analysis::study::{run_convergence, run_quality, QualityLevel, QualityReport, StudyOptions};
use crate::analysis::{certify_quality, AnalysisError, ConvergenceReport, Norm, QuadOrder, SIGMA_REQUIRED};
use crate::biharmonic::{solve_mixed, MixedSolution, SolveError};
use crate::fem::{interpolate, MassMode, NodalField};
use crate::mesh::obj::{read_obj, write_obj_file};
use crate::mesh::TriMesh;
use crate::surfaces::harmonics::real_harmonic;
use crate::surfaces::{ExactSolution, LanternCoupling, SurfaceError};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BIHARM_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Gate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Gate(_) => 4,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solve(e) => e.into(),
            AnalysisError::Fem(e) => CliError::Numerical(e.to_string()),
            AnalysisError::Surface(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "biharm", version, about = "Mixed P1 finite elements for the biharmonic equation on surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve once and write solution.csv (and optionally mesh.obj).
    Solve(SolveArgs),
    /// Run a refinement study and write report.csv, rates.csv and plot.svg.
    Converge(ConvergeArgs),
    /// Certify mesh quality per level and write quality.csv.
    Quality(QualityArgs),
}

fn parse_coupling(s: &str) -> Result<LanternCoupling, String> {
    match s {
        "linear" => Ok(LanternCoupling::Linear),
        "quadratic" => Ok(LanternCoupling::Quadratic),
        other => Err(format!("unknown coupling {other:?} (expected linear or quadratic)")),
    }
}

fn parse_mass(s: &str) -> Result<MassMode, String> {
    match s {
        "consistent" => Ok(MassMode::Consistent),
        "lumped" => Ok(MassMode::Lumped),
        other => Err(format!("unknown mass mode {other:?} (expected consistent or lumped)")),
    }
}

fn parse_quad(s: &str) -> Result<QuadOrder, String> {
    s.parse::<u8>().map_err(|e| e.to_string()).and_then(QuadOrder::try_from)
}

/// Flags shared by all subcommands.
#[derive(Debug, Default, Clone, Args)]
pub struct StudyArgs {
    /// JSON study configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// cap, sphere or lantern.
    #[arg(long)]
    pub case: Option<CaseKind>,
    /// Comma-separated resolutions (rings, subdivisions or axial counts).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Cap opening angle in radians.
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Lantern coupling: linear (m = 2n) or quadratic (m = n²).
    #[arg(long, value_parser = parse_coupling)]
    pub coupling: Option<LanternCoupling>,
    /// Spherical-harmonic degree of the sphere case.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Spherical-harmonic order of the sphere case.
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<i32>,
    /// Surface radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Lantern height.
    #[arg(long)]
    pub height: Option<f64>,
    /// consistent or lumped.
    #[arg(long, value_parser = parse_mass)]
    pub mass: Option<MassMode>,
    /// Relative residual tolerance of the iterative solvers.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Quadrature order for error norms: 2 or 4.
    #[arg(long, value_parser = parse_quad)]
    pub quad: Option<QuadOrder>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Solve on this OBJ mesh instead of a generated one.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Load: `const:VALUE` or `harmonic:l,m`. Defaults to the case's exact load.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Resolution of the generated mesh (defaults to the first level).
    #[arg(long)]
    pub n: Option<usize>,
    /// Also write the mesh as mesh.obj.
    #[arg(long)]
    pub write_mesh: bool,
}

#[derive(Debug, Default, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Exit with code 4 unless the fitted rates meet the acceptance bands.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Default, Clone, Args)]
pub struct QualityArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Certify this OBJ mesh against the case surface instead of a family.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

impl StudyArgs {
    /// Merges the config file (if any) with the flags; flags win.
    pub fn resolve(&self) -> Result<StudyConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                Some(StudyConfig::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?)
            }
            None => None,
        };
        let mut config = match (file, self.case) {
            (Some(c), None) => c,
            (Some(c), Some(kind)) if c.case.kind() == kind => c,
            (Some(c), Some(kind)) => StudyConfig { case: self.default_case(kind), ..c },
            (None, Some(kind)) => StudyConfig::new(self.default_case(kind)),
            (None, None) => return Err(CliError::Usage("no case given: use --case or --config".into())),
        };
        self.apply(&mut config.case)?;
        if let Some(mass) = self.mass {
            config.mass_mode = mass;
        }
        if let Some(tol) = self.tol {
            config.tol = tol;
        }
        if let Some(quad) = self.quad {
            config.quad_order = quad;
        }
        if let Some(out) = &self.out {
            config.output = out.clone();
        }
        Ok(config)
    }

    fn default_case(&self, kind: CaseKind) -> CaseConfig {
        match (kind, self.coupling) {
            (CaseKind::Lantern, Some(coupling)) => CaseConfig::lantern_default(coupling),
            _ => CaseConfig::default_for(kind),
        }
    }

    fn apply(&self, case: &mut CaseConfig) -> Result<(), CliError> {
        let name = case_name(case);
        let misplaced = |flag: &str| CliError::Usage(format!("--{flag} does not apply to the {name} case"));
        if let Some(levels) = &self.levels {
            *case.levels_mut() = levels.clone();
        }
        match case {
            CaseConfig::Cap { theta0, radius, .. } => {
                if self.coupling.is_some() {
                    return Err(misplaced("coupling"));
                }
                if self.degree.is_some() || self.order.is_some() {
                    return Err(misplaced("degree/--order"));
                }
                if self.height.is_some() {
                    return Err(misplaced("height"));
                }
                *theta0 = self.theta0.unwrap_or(*theta0);
                *radius = self.radius.unwrap_or(*radius);
            }
            CaseConfig::Sphere { l, m, radius, .. } => {
                if self.theta0.is_some() {
                    return Err(misplaced("theta0"));
                }
                if self.coupling.is_some() {
                    return Err(misplaced("coupling"));
                }
                if self.height.is_some() {
                    return Err(misplaced("height"));
                }
                *l = self.degree.unwrap_or(*l);
                *m = self.order.unwrap_or(*m);
                *radius = self.radius.unwrap_or(*radius);
            }
            CaseConfig::Lantern { coupling, radius, height, .. } => {
                if self.theta0.is_some() {
                    return Err(misplaced("theta0"));
                }
                if self.degree.is_some() || self.order.is_some() {
                    return Err(misplaced("degree/--order"));
                }
                *coupling = self.coupling.unwrap_or(*coupling);
                *radius = self.radius.unwrap_or(*radius);
                *height = self.height.unwrap_or(*height);
            }
        }
        Ok(())
    }
}

fn case_name(case: &CaseConfig) -> &'static str {
    match case.kind() {
        CaseKind::Cap => "cap",
        CaseKind::Sphere => "sphere",
        CaseKind::Lantern => "lantern",
    }
}

/// Load specification of `solve --rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    Constant(f64),
    /// Real spherical harmonic evaluated at the radial projection of each vertex.
    Harmonic { l: u32, m: i32 },
}

impl std::str::FromStr for Rhs {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid --rhs {s:?} (expected const:VALUE or harmonic:l,m)");
        match s.split_once(':') {
            Some(("const", v)) => v.trim().parse().map(Rhs::Constant).map_err(|_| bad()),
            Some(("harmonic", lm)) => {
                let (l, m) = lm.split_once(',').ok_or_else(bad)?;
                let l: u32 = l.trim().parse().map_err(|_| bad())?;
                let m: i32 = m.trim().parse().map_err(|_| bad())?;
                if m.unsigned_abs() > l {
                    return Err(bad());
                }
                Ok(Rhs::Harmonic { l, m })
            }
            _ => Err(bad()),
        }
    }
}

impl Rhs {
    pub fn interpolate(&self, mesh: &TriMesh) -> NodalField {
        match *self {
            Rhs::Constant(v) => NodalField::constant(mesh, v),
            Rhs::Harmonic { l, m } => interpolate(mesh, |p| {
                let r = p.norm();
                if r > 0.0 {
                    real_harmonic(l, m, &(p / r))
                } else {
                    0.0
                }
            }),
        }
    }
}

/// Runs `work` on a pool capped by `BIHARM_THREADS` when it is set.
pub fn with_thread_cap<T: Send>(work: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(value) => {
            let threads: usize = value
                .trim()
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(work))
        }
        Err(_) => Ok(work()),
    }
}

fn create_output_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn study_options(config: &StudyConfig) -> StudyOptions {
    StudyOptions { mass_mode: config.mass_mode, tol: config.tol, quad_order: config.quad_order }
}

/// Result of `solve`: the mesh, the load and the solution.
pub struct SolveOutcome {
    pub mesh: TriMesh,
    pub f: NodalField,
    pub solution: MixedSolution,
    pub files: Vec<PathBuf>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<SolveOutcome, CliError> {
    let rhs: Option<Rhs> = args.rhs.as_deref().map(str::parse).transpose().map_err(CliError::Usage)?;
    let (mesh, f, output, mass_mode, tol) = match &args.mesh {
        Some(path) => {
            let mesh = read_obj(path).map_err(|e| CliError::Usage(e.to_string()))?;
            let rhs = rhs.ok_or_else(|| CliError::Usage("--mesh requires --rhs".into()))?;
            let f = rhs.interpolate(&mesh);
            let study = &args.study;
            let tol = study.tol.unwrap_or(1e-10);
            if !(tol > 0.0 && tol <= MAX_TOL) {
                return Err(CliError::Usage(format!("tol must lie in (0, {MAX_TOL:e}], got {tol}")));
            }
            (mesh, f, study.out.clone().unwrap_or_else(|| "out".into()), study.mass.unwrap_or_default(), tol)
        }
        None => {
            let config = args.study.resolve()?;
            config.validate(1).map_err(CliError::Usage)?;
            let resolution = args.n.unwrap_or(config.case.levels()[0]);
            let family = config.case.family_with_levels(&[resolution])?;
            let mesh = family.levels[0].generate()?;
            let f = match rhs {
                Some(rhs) => rhs.interpolate(&mesh),
                None => interpolate(&mesh, |p| family.case.exact_f(p)),
            };
            (mesh, f, config.output, config.mass_mode, config.tol)
        }
    };

    let solution = with_thread_cap(|| solve_mixed(&mesh, &f, mass_mode, tol))??;
    create_output_dir(&output)?;
    let mut files = Vec::new();
    let path = output.join("solution.csv");
    let mut w = csv::Writer::from_writer(create_file(&path)?);
    let write = |w: &mut csv::Writer<_>| -> Result<(), csv::Error> {
        w.write_record(["vertex", "u1", "u2"])?;
        for (i, (a, b)) in solution.u1.values().iter().zip(solution.u2.values()).enumerate() {
            w.write_record([i.to_string(), format!("{a:.11e}"), format!("{b:.11e}")])?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).map_err(|e| io_error(&path, e))?;
    files.push(path);
    if args.write_mesh {
        let path = output.join("mesh.obj");
        write_obj_file(&mesh, &path).map_err(|e| io_error(&path, e))?;
        files.push(path);
    }
    Ok(SolveOutcome { mesh, f, solution, files })
}

/// Acceptance band on one fitted exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    /// `true` for `value ≤ bound`, `false` for `value ≥ bound`.
    pub upper: bool,
}

impl Gate {
    pub fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.bound
        } else {
            self.value >= self.bound
        }
    }
}

/// Acceptance bands of a study, evaluated on its report.
pub fn gates(case: &CaseConfig, report: &ConvergenceReport) -> Vec<Gate> {
    let lower = |norm: Norm, bound| Gate { name: norm.name(), value: report.rate(norm), bound, upper: false };
    match case {
        CaseConfig::Cap { .. } => vec![lower(Norm::L2U1, 0.85), lower(Norm::H1U1, 0.60), lower(Norm::L2U2, 0.40)],
        CaseConfig::Sphere { .. } => vec![lower(Norm::L2U1, 1.8), lower(Norm::L2U2, 1.8), lower(Norm::H1U1, 0.9)],
        CaseConfig::Lantern { coupling: LanternCoupling::Linear, .. } => {
            vec![lower(Norm::L2U2, 0.4), lower(Norm::L2U1, 0.85)]
        }
        CaseConfig::Lantern { coupling: LanternCoupling::Quadratic, .. } => vec![
            Gate { name: "l2_u2", value: report.rate(Norm::L2U2), bound: 0.25, upper: true },
            Gate { name: "epsilon", value: report.epsilon.map_or(f64::NAN, |e| e.slope), bound: 0.3, upper: true },
        ],
    }
}

pub struct ConvergeOutcome {
    pub config: StudyConfig,
    pub report: ConvergenceReport,
    pub gates: Vec<Gate>,
    pub files: Vec<PathBuf>,
}

fn guide_slopes(case: &CaseConfig) -> Vec<f64> {
    match case {
        CaseConfig::Cap { .. } => vec![1.0, 0.75, 0.5],
        CaseConfig::Sphere { .. } => vec![2.0, 1.0],
        CaseConfig::Lantern { .. } => vec![1.0, 0.5],
    }
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<ConvergeOutcome, CliError> {
    let config = args.study.resolve()?;
    config.validate(3).map_err(CliError::Usage)?;
    let family = config.case.family()?;
    let label = config.case.label();
    let options = study_options(&config);
    let report = with_thread_cap(|| run_convergence(&label, &family, &options))??;

    create_output_dir(&config.output)?;
    let report_path = config.output.join("report.csv");
    write_report_csv(create_file(&report_path)?, &report)?;
    let rates_path = config.output.join("rates.csv");
    write_rates_csv(create_file(&rates_path)?, &rate_rows(&report))?;

    let series: Vec<svg::Series> = Norm::ALL
        .iter()
        .map(|&norm| svg::Series {
            name: norm.name().into(),
            points: report.records.iter().map(|r| (r.h, norm.of(r))).collect(),
        })
        .collect();
    let plot_path = config.output.join("plot.svg");
    let plot = svg::loglog_plot(&format!("{} ({})", label, family.case.describe()), &series, &guide_slopes(&config.case));
    fs::write(&plot_path, plot).map_err(|e| io_error(&plot_path, e))?;

    let gates = gates(&config.case, &report);
    Ok(ConvergeOutcome { config, report, gates, files: vec![report_path, rates_path, plot_path] })
}

pub struct QualityOutcome {
    pub report: QualityReport,
    pub files: Vec<PathBuf>,
    /// Set when the family violates `σ ≥ 3/2`.
    pub warning: Option<String>,
}

pub fn cmd_quality(args: &QualityArgs) -> Result<QualityOutcome, CliError> {
    let config = args.study.resolve()?;
    let label = config.case.label();
    let report = match &args.mesh {
        Some(path) => {
            config.validate(1).map_err(CliError::Usage)?;
            let mesh = read_obj(path).map_err(|e| CliError::Usage(e.to_string()))?;
            let case = config.case.family()?.case;
            let quality = certify_quality(&mesh, &case)?;
            QualityReport::new(&label, vec![QualityLevel { level: 0, h: mesh.max_edge_length(), quality }])
        }
        None => {
            config.validate(1).map_err(CliError::Usage)?;
            let family = config.case.family()?;
            with_thread_cap(|| run_quality(&label, &family))??
        }
    };
    create_output_dir(&config.output)?;
    let quality_path = config.output.join("quality.csv");
    write_quality_csv(create_file(&quality_path)?, &report)?;
    let mut files = vec![quality_path];
    let rows = quality_rate_rows(&report);
    if !rows.is_empty() {
        let path = config.output.join("quality_rates.csv");
        write_rates_csv(create_file(&path)?, &rows)?;
        files.push(path);
    }
    let warning = report
        .sigma_estimate
        .filter(|&s| s < SIGMA_REQUIRED)
        .map(|s| format!("warning: sigma estimate {s:.3} is below 3/2; the family violates the mesh-quality conditions"));
    Ok(QualityOutcome { report, files, warning })
}

fn print_report(report: &ConvergenceReport) {
    println!("{:>5} {:>12} {:>9} {:>12} {:>12} {:>12}", "level", "h", "dofs", "l2_u1", "h1_u1", "l2_u2");
    for r in &report.records {
        println!(
            "{:>5} {:>12.4e} {:>9} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.level, r.h, r.dofs, r.l2_u1, r.h1_u1, r.l2_u2
        );
    }
    for (norm, fit) in &report.rates {
        println!("rate {:<6} {:>7.3} (residual {:.2e})", norm.name(), fit.slope, fit.residual);
    }
    if let Some(sigma) = report.sigma_estimate {
        println!("sigma estimate {sigma:.3}");
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let outcome = cmd_solve(&args)?;
            let u1 = outcome.solution.u1.values();
            let max = u1.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            println!(
                "solved {} vertices with {} (residual {:.2e}); max u1 = {max:.6e}",
                outcome.mesh.vertex_count(),
                outcome.solution.solve_report.method,
                outcome.solution.solve_report.relative_residual
            );
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
        }
        Command::Converge(args) => {
            let outcome = cmd_converge(&args)?;
            print_report(&outcome.report);
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            if args.check {
                let failed: Vec<String> = outcome
                    .gates
                    .iter()
                    .filter(|g| !g.passed())
                    .map(|g| format!("{} = {:.3} (needs {} {})", g.name, g.value, if g.upper { "≤" } else { "≥" }, g.bound))
                    .collect();
                if !failed.is_empty() {
                    return Err(CliError::Gate(format!("acceptance check failed: {}", failed.join(", "))));
                }
                println!("acceptance check passed");
            }
        }
        Command::Quality(args) => {
            let outcome = cmd_quality(&args)?;
            for l in &outcome.report.levels {
                let q = &l.quality;
                println!(
                    "level {} h {:.4e}: kappa_min {:.4} K_max {:.4} max_dist {:.4e} max_normal_angle {:.4e}",
                    l.level, l.h, q.kappa_min, q.k_max, q.max_distance, q.max_normal_angle
                );
            }
            if let (Some(g), Some(e)) = (outcome.report.gamma, outcome.report.epsilon) {
                println!("gamma {:.3} epsilon {:.3}", g.slope, e.slope);
            }
            if let Some(warning) = &outcome.warning {
                eprintln!("{warning}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
