//! Command-line front end: validate tomographic sets, generate and invert
//! tomograms, run built-in verification targets, and demonstrate the
//! marginals counterexample. Reports go to stdout, human-readable by default
//! or JSON with --json.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use tomokit::io::{
    MatrixJson, PhotonTomogramJson, SetJson, SpinGridJson, SymplecticTomogramJson, TomogramJson,
};
use tomokit::report::{RunReport, RunStatus};
use tomokit::*;

#[derive(Parser)]
#[command(name = "tomokit", version, about = "Quantum state tomography toolkit")]
struct Cli {
    /// Emit the run report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for all randomized fixtures.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for grid evaluation (1 = serial reference).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a projector set file is a minimal tomographic set.
    CheckSet {
        /// JSON set file {"dim", "projectors", "labels"}.
        set_file: PathBuf,
    },
    /// Reconstruct an operator from a tomogram file.
    Reconstruct(ReconstructArgs),
    /// Run a built-in verification target and exit 0/1 on pass/fail.
    Verify(VerifyArgs),
    /// Two Gaussian states with identical position and momentum marginals.
    DemoPauli {
        #[arg(long, default_value_t = 1.0)]
        alpha_re: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_im: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Grid half-width for the wavefunctions.
        #[arg(long, default_value_t = 8.0)]
        grid_q: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Finite,
    Spin,
    Photon,
    Symplectic,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Tomogram file; the schema must match the scheme.
    tomogram_file: PathBuf,

    #[arg(long, value_enum)]
    scheme: Scheme,

    /// Ordering parameter for the photon scheme, in (-1, 1).
    #[arg(long)]
    s: Option<f64>,

    /// Output file for the reconstructed matrix (JSON).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Optional reference state file for a fidelity metric.
    #[arg(long)]
    reference: Option<PathBuf>,

    /// Output grid for the symplectic scheme: min,max,npoints.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    grid_q: Option<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyTarget {
    IdentityFinite,
    IdentitySpinhalf,
    IdentitySpinj,
    DeltaSymplectic,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: VerifyTarget,

    /// Finite-scheme dimension.
    #[arg(long, default_value_t = 3)]
    dim: usize,

    /// Doubled spin for identity-spinj.
    #[arg(long, default_value_t = 2)]
    j2: i32,

    #[arg(long)]
    nodes_theta: Option<usize>,

    #[arg(long)]
    nodes_phi: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        configure_threads(n);
    }
    let verbose = std::env::var("TOMOKIT_LOG")
        .map(|v| !v.is_empty() && v != "0" && v.to_lowercase() != "off")
        .unwrap_or(false);

    let started = Instant::now();
    let (mut report, exit_code) = match run(&cli) {
        Ok((report, code)) => (report, code),
        Err(err) => {
            let mut report = RunReport::new(command_name(&cli.command));
            report.fail(err.0);
            (report, 2)
        }
    };
    report.metric("runtime_seconds", started.elapsed().as_secs_f64());
    if verbose {
        eprintln!(
            "tomokit: {} finished in {:.3}s (exit {exit_code})",
            report.command,
            started.elapsed().as_secs_f64()
        );
    }
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    std::process::exit(exit_code);
}

#[cfg(feature = "parallel")]
fn configure_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_n: usize) {}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CheckSet { .. } => "check-set",
        Command::Reconstruct(_) => "reconstruct",
        Command::Verify(_) => "verify",
        Command::DemoPauli { .. } => "demo-pauli",
    }
}

/// Errors that map to the usage/parse exit code.
struct CliError(String);

type CliResult<T> = std::result::Result<T, CliError>;

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn run(cli: &Cli) -> CliResult<(RunReport, i32)> {
    match &cli.command {
        Command::CheckSet { set_file } => cmd_check_set(set_file),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Verify(args) => cmd_verify(args, cli.seed),
        Command::DemoPauli {
            alpha_re,
            alpha_im,
            beta,
            grid_q,
        } => cmd_demo_pauli(*alpha_re, *alpha_im, *beta, *grid_q),
    }
}

fn read_file(report: &mut RunReport, path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    report.input_digest(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|e| CliError(format!("{}: not UTF-8: {e}", path.display())))
}

fn cmd_check_set(set_file: &Path) -> CliResult<(RunReport, i32)> {
    let mut report = RunReport::new("check-set");
    let text = read_file(&mut report, set_file)?;
    let json: SetJson = serde_json::from_str(&text)
        .map_err(|e| CliError(format!("{}: parse error: {e}", set_file.display())))?;
    let set = json.to_set()?;
    let diag = is_minimal_tomographic_set(&set)?;
    report
        .metric("rank", diag.rank as f64)
        .metric("condition_number", diag.condition_number)
        .metric("minimal", if diag.minimal { 1.0 } else { 0.0 });
    Ok((report, 0))
}

fn cmd_reconstruct(args: &ReconstructArgs) -> CliResult<(RunReport, i32)> {
    let mut report = RunReport::new("reconstruct");
    let text = read_file(&mut report, &args.tomogram_file)?;
    let base_dir = args.tomogram_file.parent().map(Path::to_path_buf);

    let (matrix, warnings): (OperatorMatrix, Vec<String>) = match args.scheme {
        Scheme::Finite => {
            let json: TomogramJson = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("finite tomogram parse error: {e}")))?;
            let tom = json.to_tomogram(base_dir.as_deref())?;
            let kernel = gram_schmidt(tom.set())?;
            (reconstruct(&tom, &kernel)?, Vec::new())
        }
        Scheme::Spin => {
            let json: SpinGridJson = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("spin tomogram parse error: {e}")))?;
            let grid = json.to_grid()?;
            let rec = spin_j_reconstruct(&grid)?;
            (rec.matrix, rec.warnings)
        }
        Scheme::Photon => {
            let s = args
                .s
                .ok_or_else(|| CliError("--s is required for the photon scheme".into()))?;
            let json: PhotonTomogramJson = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("photon tomogram parse error: {e}")))?;
            let tom = json.to_tomogram()?;
            let rec = photon_reconstruct(&tom, s)?;
            (rec.matrix, rec.warnings)
        }
        Scheme::Symplectic => {
            let json: SymplecticTomogramJson = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("symplectic tomogram parse error: {e}")))?;
            let tom = json.to_tomogram()?;
            let qgrid = match &args.grid_q {
                Some(v) if v.len() == 3 => GridSpec::new(v[0], v[1], v[2] as usize)?,
                Some(_) => {
                    return Err(CliError("--grid-q expects min,max,npoints".into()));
                }
                None => default_grids().qgrid,
            };
            let rec = symplectic_reconstruct(&tom, &qgrid)?;
            let matrix = OperatorMatrix::from_matrix(rec.density.clone())?;
            report.metric("grid_trace", rec.trace());
            (matrix, rec.warnings)
        }
    };

    for w in warnings {
        report.warn(w);
    }
    report
        .metric("hermiticity_residual", matrix.hermiticity_defect())
        .metric("trace_re", matrix.trace().re)
        .metric("trace_im", matrix.trace().im);

    if let Some(reference) = &args.reference {
        let ref_text = read_file(&mut report, reference)?;
        let ref_json: MatrixJson = serde_json::from_str(&ref_text)
            .map_err(|e| CliError(format!("reference parse error: {e}")))?;
        let rho_ref = ref_json.to_operator()?;
        if rho_ref.dim() == matrix.dim() {
            report.metric("fidelity", uhlmann_fidelity(&rho_ref, &matrix));
        } else {
            report.warn(format!(
                "reference dimension {} does not match reconstruction {}",
                rho_ref.dim(),
                matrix.dim()
            ));
        }
    }

    if let Some(out) = &args.out {
        let json = MatrixJson::from_operator(&matrix);
        std::fs::write(out, serde_json::to_string_pretty(&json).unwrap())
            .map_err(|e| CliError(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok((report, 0))
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 through Hermitian
/// eigendecompositions, with eigenvalues clamped at zero.
fn uhlmann_fidelity(rho: &OperatorMatrix, sigma: &OperatorMatrix) -> f64 {
    let sqrt_rho = psd_sqrt(rho);
    let inner = sqrt_rho
        .mul(&sigma.hermitized())
        .unwrap()
        .mul(&sqrt_rho)
        .unwrap()
        .hermitized();
    let root: f64 = inner
        .hermitian_eigenvalues()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    root * root
}

fn psd_sqrt(rho: &OperatorMatrix) -> OperatorMatrix {
    let (vals, vecs) = rho.hermitized().hermitian_eigen();
    let n = rho.dim();
    let mut acc = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (k, &l) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let w = Complex64::new(l.max(0.0).sqrt(), 0.0);
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += col[i] * col[j].conj() * w;
            }
        }
    }
    OperatorMatrix::from_matrix(acc).unwrap()
}

fn cmd_verify(args: &VerifyArgs, seed: u64) -> CliResult<(RunReport, i32)> {
    let mut report = RunReport::new("verify");
    let passed = match args.target {
        VerifyTarget::IdentityFinite => {
            let set = random_minimal_set(args.dim, seed, 1e6)?;
            let kernel = gram_schmidt(&set)?;
            let residual = identity_check(&kernel, &set)?;
            report
                .metric("residual", residual)
                .metric("threshold", 1e-8);
            residual < 1e-8
        }
        VerifyTarget::IdentitySpinhalf => {
            let quad = SphereQuadrature::gauss_product(
                args.nodes_theta.unwrap_or(16),
                args.nodes_phi.unwrap_or(16),
            )?;
            let kernel_outside = worst_reconstruction_residual(&quad, seed);
            let projector_outside = dual_identity_check(&quad);
            let residual = kernel_outside.max(projector_outside);
            report
                .metric("residual_kernel_outside", kernel_outside)
                .metric("residual_projector_outside", projector_outside)
                .metric("residual", residual)
                .metric("threshold", 1e-8);
            residual < 1e-8
        }
        VerifyTarget::IdentitySpinj => {
            let j = HalfInteger::from_twice(args.j2);
            let n_default = 8 * j.dimension();
            let quad = SphereQuadrature::gauss_product(
                args.nodes_theta.unwrap_or(n_default),
                args.nodes_phi.unwrap_or(n_default),
            )?;
            let rho = random_density_matrix(j.dimension(), seed)?;
            let grid = spin_j_tomogram(&rho, j, &quad)?;
            let rec = spin_j_reconstruct(&grid)?;
            for w in &rec.warnings {
                report.warn(w.clone());
            }
            let residual = rec.matrix.sub(&rho)?.frobenius_norm();
            report
                .metric("residual", residual)
                .metric("threshold", 1e-6);
            residual < 1e-6
        }
        VerifyTarget::DeltaSymplectic => {
            let grids = ProbeGrids::default_probe();
            let (y, yp) = (0.5, -0.5);
            let peak = delta_identity_probe(y, yp, y, yp, &grids)?.norm();
            let dq = 16.0 / 127.0;
            let off = delta_identity_probe(y, yp, y + 5.0 * dq, yp, &grids)?.norm();
            let ratio = peak / off.max(f64::MIN_POSITIVE);
            report
                .metric("peak", peak)
                .metric("off_peak", off)
                .metric("peak_ratio", ratio)
                .metric("threshold", 10.0);
            ratio >= 10.0
        }
    };
    if passed {
        Ok((report, 0))
    } else {
        report.status = RunStatus::Error;
        report.error = Some("residual above threshold".into());
        Ok((report, 1))
    }
}

/// Worst Frobenius error over a batch of seeded Hermitian operators pushed
/// through the kernel-outside decomposition.
fn worst_reconstruction_residual(quad: &SphereQuadrature, seed: u64) -> f64 {
    let mut worst = 0.0_f64;
    for k in 0..5 {
        let a = random_density_matrix(2, seed.wrapping_add(k)).unwrap();
        let rec = spin_half_reconstruct_fn(
            |dir| hs_inner(spin_half_projector(dir).matrix(), &a).unwrap().re,
            quad,
        );
        worst = worst.max(rec.sub(&a).unwrap().frobenius_norm());
    }
    worst
}

fn cmd_demo_pauli(
    alpha_re: f64,
    alpha_im: f64,
    beta: f64,
    grid_q: f64,
) -> CliResult<(RunReport, i32)> {
    let mut report = RunReport::new("demo-pauli");
    if alpha_re <= 0.0 {
        return Err(CliError("alpha-re must be positive".into()));
    }
    let grid = GridSpec::new(-grid_q, grid_q, 128)?;
    let result = pauli_counterexample(Complex64::new(alpha_re, alpha_im), beta, grid)?;
    report
        .metric("marginal_gap_q", result.marginal_gap_q)
        .metric("marginal_gap_p", result.marginal_gap_p)
        .metric("fidelity", result.fidelity);
    report.warn(format!(
        "the two Gaussian states share position and momentum marginals \
         (gaps {:.2e} / {:.2e}) yet their overlap fidelity is {:.5}: marginals \
         of position and momentum alone do not determine the state",
        result.marginal_gap_q, result.marginal_gap_p, result.fidelity
    ));
    Ok((report, 0))
}
