//! `csqpt` command-line front end.
//!
//! Exit codes: 0 ok, 1 I/O or format error, 2 invalid flags, 3 synthesis
//! error, 4 underdetermined or rank-deficient fit, 5 ill-conditioned fit
//! (tensor still written), 6 cutoff or mode mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::bounds::{self, CutoffBound};
use crate::error::Error;
use crate::fock::{self, CoherentAmplitude, DensityMatrix, FockCutoff};
use crate::io::{self, NoiseSpec};
use crate::processes::{analytic_tensor, ProcessParams, ProcessTensor};
use crate::tomography::{self, EstimateOptions, EstimateReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FLAGS: i32 = 2;
pub const EXIT_SYNTH: i32 = 3;
pub const EXIT_UNDERDETERMINED: i32 = 4;
pub const EXIT_ILL_CONDITIONED: i32 = 5;
pub const EXIT_MISMATCH: i32 = 6;

/// Tolerance used by `diagnose` when counting rule violations.
pub const DIAGNOSE_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "csqpt",
    version,
    about = "Coherent-state process tomography on a truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a probe dataset from an analytic process.
    Synth(SynthArgs),
    /// Estimate a process tensor from a probe dataset.
    Estimate(EstimateArgs),
    /// Apply a tensor to an input state.
    Apply(ApplyArgs),
    /// Write the closed-form tensor of a standard process.
    Analytic(AnalyticArgs),
    /// Compare two tensors.
    Compare(CompareArgs),
    /// Cutoff error budget and its scaling with N.
    ErrorBound(ErrorBoundArgs),
    /// Check a tensor against the trace and selection rules.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct ProcessSpec {
    /// identity, attenuation, photon_add, photon_sub, cat, beam_splitter or pdc
    #[arg(long)]
    process: String,
    /// Parameters as key=value[,key=value] (eta, theta, r)
    #[arg(long, default_value = "")]
    params: String,
    /// Per-mode photon-number cutoff N
    #[arg(long)]
    nmax: usize,
    /// Number of modes (defaults to the process's own)
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("probes").required(true).args(["radii", "grid"])))]
struct SynthArgs {
    #[command(flatten)]
    process: ProcessSpec,
    /// Real probe radii start:stop:count (single mode)
    #[arg(long)]
    radii: Option<String>,
    /// Rings times phases start:stop:countxPHASES (product grid for two modes)
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fail (exit 3) if any probe keeps less than this weight inside the cutoff
    #[arg(long)]
    min_weight: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EstimateMode {
    PhaseInvariant,
    General,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = EstimateMode::General)]
    mode: EstimateMode,
    #[arg(long)]
    out: PathBuf,
    /// Per-element fit summary as CSV
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, env = "CSQPT_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[arg(long)]
    tensor: PathBuf,
    /// coherent:RE[,IM][/RE,IM] | fock:N[,N2] | file:PATH
    #[arg(long)]
    state: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[command(flatten)]
    process: ProcessSpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("target").required(true).args(["epsilon", "gamma", "nmax"])))]
struct ErrorBoundArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    nmax: Option<u64>,
    /// Mean-energy bound U
    #[arg(long)]
    energy: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Cutoffs for the scaling table, comma separated
    #[arg(long, default_value = "100,1000,10000,100000")]
    table: String,
    /// Write the scaling table here instead of stdout
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(long)]
    tensor: PathBuf,
}

/// A failed run: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn flag(flag: &str, message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_FLAGS,
            message: format!("{flag}: {message}"),
        }
    }

    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

/// Exit code for library errors outside flag parsing.
fn classify(err: &Error) -> i32 {
    match err {
        Error::Underdetermined { .. } | Error::RankDeficient(_) => EXIT_UNDERDETERMINED,
        Error::CutoffMismatch(_) | Error::DimensionMismatch { .. } | Error::ModeMismatch { .. } => EXIT_MISMATCH,
        _ => EXIT_IO,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(classify(&err), err)
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command,
/// writing normal output to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_FLAGS,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut text = String::new();
    let mut warnings = String::new();
    let result = match cli.command {
        Command::Synth(a) => synth(a, &mut text),
        Command::Estimate(a) => estimate(a, &mut text, &mut warnings),
        Command::Apply(a) => apply(a, &mut text),
        Command::Analytic(a) => analytic(a, &mut text),
        Command::Compare(a) => compare(a, &mut text),
        Command::ErrorBound(a) => error_bound(a, &mut text),
        Command::Diagnose(a) => diagnose(a, &mut text),
    };
    let _ = out.write_all(text.as_bytes());
    let _ = err.write_all(warnings.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn resolve_process(spec: &ProcessSpec) -> std::result::Result<(ProcessParams, FockCutoff), Failure> {
    let params = ProcessParams::parse(&spec.process, &spec.params).map_err(|e| {
        let flag = if ProcessParams::NAMES.contains(&spec.process.as_str()) {
            "--params"
        } else {
            "--process"
        };
        Failure::flag(flag, e)
    })?;
    let modes = spec.modes.unwrap_or_else(|| params.modes());
    if !params.supports_modes(modes) {
        return Err(Failure::flag(
            "--modes",
            format!("{} acts on {} mode(s), not {modes}", params.name(), params.modes()),
        ));
    }
    let cutoff = FockCutoff::new(spec.nmax, modes).map_err(|e| Failure::flag("--nmax", e))?;
    if modes == 2 && spec.nmax > crate::processes::TWO_MODE_CAP {
        return Err(Failure::flag(
            "--nmax",
            format!("two-mode cutoff is capped at {}", crate::processes::TWO_MODE_CAP),
        ));
    }
    Ok((params, cutoff))
}

/// `start:stop:count`, evenly spaced and inclusive.
pub fn parse_range(flag: &str, s: &str) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::flag(flag, format!("`{s}` is not start:stop:count")));
    }
    let num = |p: &str| -> std::result::Result<f64, Failure> {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::flag(flag, format!("`{p}` is not a finite number")))
    };
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Failure::flag(flag, format!("count `{}` is not a positive integer", parts[2])))?;
    if count == 0 {
        return Err(Failure::flag(flag, "count must be positive"));
    }
    if start < 0.0 || stop < 0.0 {
        return Err(Failure::flag(flag, "radii must be nonnegative"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

/// `start:stop:countxPHASES` as ring points; a zero-radius ring is one point.
fn parse_grid(s: &str) -> std::result::Result<Vec<Complex64>, Failure> {
    let (range, phases) = s
        .rsplit_once('x')
        .ok_or_else(|| Failure::flag("--grid", format!("`{s}` is not start:stop:countxPHASES")))?;
    let phases: usize = phases
        .trim()
        .parse()
        .ok()
        .filter(|&p| p > 0)
        .ok_or_else(|| Failure::flag("--grid", format!("phase count `{phases}` is not a positive integer")))?;
    let radii = parse_range("--grid", range)?;
    let mut points = Vec::new();
    for r in radii {
        if r == 0.0 {
            points.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for p in 0..phases {
            let angle = 2.0 * std::f64::consts::PI * p as f64 / phases as f64;
            points.push(Complex64::from_polar(r, angle));
        }
    }
    Ok(points)
}

fn probe_amplitudes(a: &SynthArgs, modes: usize) -> std::result::Result<Vec<CoherentAmplitude>, Failure> {
    let build = |v: Vec<Complex64>| CoherentAmplitude::new(v).map_err(|e| Failure::flag("--grid", e));
    match (&a.radii, &a.grid) {
        (Some(r), None) => {
            if modes != 1 {
                return Err(Failure::flag("--radii", "real radii apply to one mode; use --grid"));
            }
            parse_range("--radii", r)?
                .into_iter()
                .map(|x| build(vec![Complex64::new(x, 0.0)]))
                .collect()
        }
        (None, Some(g)) => {
            let ring = parse_grid(g)?;
            if modes == 1 {
                ring.into_iter().map(|z| build(vec![z])).collect()
            } else {
                let mut out = Vec::with_capacity(ring.len() * ring.len());
                for &a1 in &ring {
                    for &a2 in &ring {
                        out.push(build(vec![a1, a2])?);
                    }
                }
                Ok(out)
            }
        }
        _ => Err(Failure::flag("--radii", "give exactly one of --radii and --grid")),
    }
}

fn synth(a: SynthArgs, text: &mut String) -> CliResult {
    let (params, cutoff) = resolve_process(&a.process)?;
    if !(a.noise_sigma.is_finite() && a.noise_sigma >= 0.0) {
        return Err(Failure::flag("--noise-sigma", "must be a finite number >= 0"));
    }
    let amplitudes = probe_amplitudes(&a, cutoff.modes())?;
    let min_weight = match a.min_weight {
        Some(m) => io::check_truncation(&amplitudes, cutoff, m).map_err(|e| Failure::new(EXIT_SYNTH, e))?,
        None => io::check_truncation(&amplitudes, cutoff, 0.0).map_err(|e| Failure::new(EXIT_SYNTH, e))?,
    };
    let noise = NoiseSpec {
        sigma: a.noise_sigma,
        seed: a.seed,
    };
    let ds = io::generate_synthetic(params, cutoff, &amplitudes, noise).map_err(|e| Failure::new(EXIT_SYNTH, e))?;
    io::write_dataset(&ds, &a.out)?;
    let _ = writeln!(text, "records={}", ds.records().len());
    let _ = writeln!(text, "min_truncation_weight={min_weight:.6}");
    let _ = writeln!(text, "wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn report_csv(report: &EstimateReport) -> String {
    let mut s = String::from("j,k,residual_rms,condition_number\n");
    for f in &report.fits {
        let _ = writeln!(s, "{},{},{:.6e},{:.6e}", f.j, f.k, f.residual_rms, f.condition_number);
    }
    s
}

fn estimate(a: EstimateArgs, text: &mut String, warnings: &mut String) -> CliResult {
    if a.threads == 0 {
        return Err(Failure::flag("--threads", "must be at least 1"));
    }
    let ds = io::read_dataset(&a.input)?;
    let cutoff = ds.cutoff();
    let options = EstimateOptions { threads: a.threads };
    let estimate = match (a.mode, cutoff.modes()) {
        (EstimateMode::PhaseInvariant, 1) => {
            tomography::estimate_phase_invariant(ds.records(), cutoff, options).map(|(e, _)| e)
        }
        (EstimateMode::PhaseInvariant, _) => {
            return Err(Failure::flag(
                "--mode",
                "phase-invariant estimation is single-mode only",
            ))
        }
        (EstimateMode::General, 1) => tomography::estimate_general(ds.records(), cutoff, options),
        (EstimateMode::General, _) => tomography::estimate_general_two_mode(ds.records(), cutoff, options),
    };
    let mut estimate = match estimate {
        Ok(e) => e,
        Err(Error::InvariantViolation { record, message }) => {
            return Err(Failure::new(
                EXIT_UNDERDETERMINED,
                format!("record {record}: {message}"),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let label = match ds.metadata.get("process") {
        Some(p) => format!("estimate of {p}"),
        None => "estimate".to_string(),
    };
    estimate.tensor.set_label(label);
    io::write_tensor(&estimate.tensor, &a.out)?;
    let report = &estimate.report;
    if let Some(path) = &a.report {
        write_text(path, &report_csv(report))?;
    }
    let _ = writeln!(text, "records={}", ds.records().len());
    let _ = writeln!(text, "residual_rms={:.6e}", report.residual_rms);
    let _ = writeln!(text, "condition_number={:.6e}", report.condition_number);
    let _ = writeln!(text, "low_weight_probes={}", report.low_weight_records.len());
    let _ = writeln!(text, "wrote {}", a.out.display());
    if report.ill_conditioned() {
        let _ = writeln!(
            warnings,
            "warning: ill-conditioned fit (condition number {:.3e} > {:.0e}); tensor written but unreliable",
            report.condition_number,
            tomography::ILL_CONDITIONED
        );
        return Ok(EXIT_ILL_CONDITIONED);
    }
    Ok(EXIT_OK)
}

fn write_text(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e).into())
}

fn read_tensor_checked(path: &Path, warnings: &mut String) -> std::result::Result<ProcessTensor, Failure> {
    let file = io::read_tensor(path)?;
    if file.symmetry_warning {
        let _ = writeln!(
            warnings,
            "warning: {} breaks the tensor symmetry by {:.3e}",
            path.display(),
            file.symmetry_deviation
        );
    }
    Ok(file.tensor)
}

/// Parses `--state` for a tensor's cutoff.
fn parse_state(spec: &str, cutoff: FockCutoff) -> std::result::Result<DensityMatrix, Failure> {
    let bad = |m: String| Failure::flag("--state", m);
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("`{spec}` is not kind:value")))?;
    let number = |s: &str| -> std::result::Result<f64, Failure> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(format!("`{s}` is not a finite number")))
    };
    let rho = match kind {
        "coherent" => {
            let values = value
                .split('/')
                .map(|mode| {
                    let parts: Vec<&str> = mode.split(',').collect();
                    match parts.as_slice() {
                        [re] => Ok(Complex64::new(number(re)?, 0.0)),
                        [re, im] => Ok(Complex64::new(number(re)?, number(im)?)),
                        _ => Err(bad(format!("`{mode}` is not RE[,IM]"))),
                    }
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if values.len() != cutoff.modes() {
                return Err(Failure::new(
                    EXIT_MISMATCH,
                    format!(
                        "--state: {} amplitude(s) for a {}-mode tensor",
                        values.len(),
                        cutoff.modes()
                    ),
                ));
            }
            let alpha = CoherentAmplitude::new(values).map_err(|e| bad(e.to_string()))?;
            fock::coherent_density(&alpha, cutoff)?
        }
        "fock" => {
            let n = value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| bad(format!("`{s}` is not a photon number")))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if n.len() != cutoff.modes() {
                return Err(Failure::new(
                    EXIT_MISMATCH,
                    format!(
                        "--state: {} photon number(s) for a {}-mode tensor",
                        n.len(),
                        cutoff.modes()
                    ),
                ));
            }
            if n.iter().any(|&k| k > cutoff.n_max()) {
                return Err(Failure::new(
                    EXIT_MISMATCH,
                    format!(
                        "--state: Fock state {value} lies above the tensor cutoff {}",
                        cutoff.n_max()
                    ),
                ));
            }
            DensityMatrix::fock(cutoff, &n)?
        }
        "file" => {
            let rho = io::read_state(Path::new(value))?;
            if rho.cutoff() != cutoff {
                return Err(Failure::new(
                    EXIT_MISMATCH,
                    format!("state cutoff {} does not match tensor cutoff {cutoff}", rho.cutoff()),
                ));
            }
            rho
        }
        other => return Err(bad(format!("unknown state kind `{other}`"))),
    };
    rho.validate_state().map_err(|e| bad(e.to_string()))?;
    Ok(rho)
}

fn apply(a: ApplyArgs, text: &mut String) -> CliResult {
    let mut warnings = String::new();
    let tensor = read_tensor_checked(&a.tensor, &mut warnings)?;
    text.push_str(&warnings);
    let rho = parse_state(&a.state, tensor.cutoff())?;
    let output = tensor.apply(&rho)?;
    let _ = writeln!(text, "input_trace={:.12}", rho.trace());
    let _ = writeln!(text, "output_trace={:.12}", output.trace());
    if let Some(path) = &a.out {
        io::write_state(&output, path)?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

fn analytic(a: AnalyticArgs, text: &mut String) -> CliResult {
    let (params, cutoff) = resolve_process(&a.process)?;
    let tensor = analytic_tensor(params, cutoff)?;
    io::write_tensor(&tensor, &a.out)?;
    let _ = writeln!(text, "label={}", tensor.label());
    let _ = writeln!(text, "nonzero_entries={}", tensor.nonzero().count());
    let _ = writeln!(text, "wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn compare(a: CompareArgs, text: &mut String) -> CliResult {
    let ta = read_tensor_checked(&a.a, text)?;
    let tb = read_tensor_checked(&a.b, text)?;
    let diff = ta.max_abs_diff(&tb)?;
    let _ = writeln!(text, "max_abs_error={diff:.6e}");
    for (name, t) in [("a", &ta), ("b", &tb)] {
        let _ = writeln!(text, "{name}.label={}", t.label());
        let _ = writeln!(text, "{name}.symmetry_deviation={:.6e}", t.symmetry_deviation());
        let _ = writeln!(text, "{name}.choi_min_eigenvalue={:.6e}", t.choi_min_eigenvalue());
    }
    Ok(EXIT_OK)
}

fn error_bound(a: ErrorBoundArgs, text: &mut String) -> CliResult {
    if !(a.energy > 0.0 && a.energy.is_finite()) {
        return Err(Failure::flag("--energy", "must be a positive number"));
    }
    if !(a.omega > 0.0 && a.omega.is_finite()) {
        return Err(Failure::flag("--omega", "must be a positive number"));
    }
    let bound = match (a.epsilon, a.gamma, a.nmax) {
        (Some(e), None, None) => {
            CutoffBound::from_epsilon(a.energy, a.omega, e).map_err(|e| Failure::flag("--epsilon", e))?
        }
        (None, Some(g), None) => {
            CutoffBound::from_gamma(a.energy, a.omega, g).map_err(|e| Failure::flag("--gamma", e))?
        }
        (None, None, Some(n)) => {
            CutoffBound::from_cutoff(a.energy, a.omega, n).map_err(|e| Failure::flag("--nmax", e))?
        }
        _ => {
            return Err(Failure::flag(
                "--epsilon",
                "give exactly one of --epsilon, --gamma, --nmax",
            ))
        }
    };
    let table: Vec<u64> = a
        .table
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::flag("--table", format!("`{s}` is not a cutoff")))
        })
        .collect::<std::result::Result<_, _>>()?;

    let _ = writeln!(text, "energy={}", a.energy);
    let _ = writeln!(text, "omega={}", a.omega);
    let _ = writeln!(text, "gamma={:.6e}", bound.gamma);
    let _ = writeln!(text, "epsilon={:.6e}", bound.epsilon);
    let _ = writeln!(text, "required_nmax={}", bound.required_n);
    let _ = writeln!(text, "naive_nmax_u_over_gamma={:.1}", bound.naive_cutoff());
    let _ = writeln!(
        text,
        "note: required_nmax is the smallest N with U/((N+3/2)*omega) <= gamma; \
         U/gamma is the rounder scale estimate that drops the 3/2 offset and omega. \
         Both are conservative; the bound uses only the mean energy."
    );
    let mut csv = String::from("n,gamma,epsilon,epsilon_sqrt_n\n");
    for row in bounds::scaling_table(a.energy, a.omega, &table) {
        let _ = writeln!(
            csv,
            "{},{:.6e},{:.6e},{:.6e}",
            row.n,
            row.gamma,
            row.epsilon,
            row.epsilon * (row.n as f64).sqrt()
        );
    }
    match &a.csv {
        Some(path) => {
            write_text(path, &csv)?;
            let _ = writeln!(text, "wrote {}", path.display());
        }
        None => text.push_str(&csv),
    }
    Ok(EXIT_OK)
}

fn diagnose(a: DiagnoseArgs, text: &mut String) -> CliResult {
    let t = read_tensor_checked(&a.tensor, text)?;
    let c = t.cutoff();
    let d = t.dim();
    let mut trace_violations = 0;
    let mut trace_worst = 0.0f64;
    for m in 0..d {
        for n in 0..d {
            let want = if m == n { 1.0 } else { 0.0 };
            let dev = (t.image_trace(m, n) - want).norm();
            trace_worst = trace_worst.max(dev);
            if dev > DIAGNOSE_TOLERANCE {
                trace_violations += 1;
            }
        }
    }
    let mut parity_violations = 0;
    let mut parity_worst = 0.0f64;
    for ([m, n, j, k], v) in t.nonzero() {
        let left = c.total_photons(m) as i64 - c.total_photons(j) as i64;
        let right = c.total_photons(n) as i64 - c.total_photons(k) as i64;
        if left != right {
            parity_worst = parity_worst.max(v.norm());
            if v.norm() > DIAGNOSE_TOLERANCE {
                parity_violations += 1;
            }
        }
    }
    let _ = writeln!(text, "label={}", t.label());
    let _ = writeln!(text, "cutoff={c}");
    let _ = writeln!(text, "symmetry_deviation={:.6e}", t.symmetry_deviation());
    let _ = writeln!(text, "trace_rule_violations={trace_violations}");
    let _ = writeln!(text, "trace_rule_max_deviation={trace_worst:.6e}");
    let _ = writeln!(text, "parity_rule_violations={parity_violations}");
    let _ = writeln!(text, "parity_rule_max_deviation={parity_worst:.6e}");
    let _ = writeln!(text, "choi_min_eigenvalue={:.6e}", t.choi_min_eigenvalue());
    Ok(EXIT_OK)
}
