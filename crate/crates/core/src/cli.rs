//! The `statorforge` command line.
//!
//! Exit codes: `0` when every check passes, `1` when checks ran and at least
//! one failed, `2` for unreadable input, precondition failures and usage
//! errors. Reports are pretty-printed JSON on stdout and, with `--out`, also
//! written atomically to a file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dynamics::protocol_report;
use crate::error::{Error, Result};
use crate::groups::{make_group, FiniteGroup, IrrepSet};
use crate::io::{read_json, read_matrix, to_json_string, write_atomic, write_json, write_matrix, GroupJson, SiteJson, StatorJson};
use crate::manybody::{plaquette_demo, site_product, GlobalStator};
use crate::numerics::{eig_normal, two_sided_unitarity_residual, ComplexMatrix, VERIFY_TOL};
use crate::stator::{construct_stator, group_element_stator, spectra_match, standard_labels, ConstructionChoices};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Largest composite dimension `(Π_k N_k)·N_B` that `compose` will build.
pub const MAX_COMPOSE_DIM: usize = 1024;

#[derive(Debug, Parser)]
#[command(name = "statorforge", version, about = "Construct and verify stators, and run ancilla-mediated dynamics")]
struct Cli {
    /// Relative verification tolerance.
    #[arg(long, global = true, env = "STATORFORGE_TOL", allow_negative_numbers = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a stator for a normal Θ_A and write it with Θ_B and the dilation.
    Construct(ConstructArgs),
    /// Check completeness and the eigenoperator relation of a stator file.
    Verify(VerifyArgs),
    /// Compare ancilla-mediated evolution with direct evolution.
    Evolve(EvolveArgs),
    /// Compose projective single-site stators sharing one ancilla.
    Compose(ComposeArgs),
    /// Run the K-site σ_z product interaction demo.
    DemoPlaquette(DemoArgs),
    /// Describe a built-in or file-defined group and check its irreps.
    GroupInfo(GroupArgs),
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    theta_a: PathBuf,
    #[arg(long)]
    w: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<PathBuf>,
    /// Spectrum permutation, e.g. `1,0`.
    #[arg(long, value_delimiter = ',')]
    perm: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    stator: PathBuf,
    #[arg(long)]
    theta_a: PathBuf,
    #[arg(long)]
    theta_b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    u_ab: PathBuf,
    #[arg(long)]
    h_b: PathBuf,
    #[arg(long)]
    h_a: PathBuf,
    /// Evolution times; repeat the flag or separate with commas.
    #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    times: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ComposeArgs {
    /// Site files, in tensor-factor order.
    #[arg(long, num_args = 1.., required = true)]
    sites: Vec<PathBuf>,
    /// Optional Θ^k_A per site; their product is checked against `--theta-b`.
    #[arg(long, num_args = 1.., requires = "theta_b")]
    theta_a: Vec<PathBuf>,
    #[arg(long)]
    theta_b: Option<PathBuf>,
    /// Also write the composed stator here.
    #[arg(long)]
    stator_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    coupling: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// A built-in name (Z3, D4, S3, Q8, …) or a group JSON file.
    #[arg(long)]
    group: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ConstructReport {
    dim: usize,
    completeness_residual: f64,
    eigenop_residual: f64,
    spectra_match: bool,
    dilation_unitarity_residual: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    dim_a: usize,
    dim_b: usize,
    completeness_residual: f64,
    completeness_bound: f64,
    eigenop_residual: f64,
    eigenop_bound: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ComposeReport {
    sites: usize,
    site_dims: Vec<usize>,
    dim_b: usize,
    completeness_residual: f64,
    sequential_vs_monolithic: f64,
    eigenop_residual: Option<f64>,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct IrrepSummary {
    label: String,
    dim: usize,
}

#[derive(Serialize)]
struct GroupReport {
    name: String,
    order: usize,
    abelian: bool,
    elements: Vec<String>,
    irreps: Option<Vec<IrrepSummary>>,
    sum_dim_squared: Option<usize>,
    fourier_unitarity_residual: Option<f64>,
    orthogonality_residual: Option<f64>,
    max_eigenop_residual: Option<f64>,
    pass: bool,
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs one job.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli)));
    match outcome {
        Ok(Ok((report, pass))) => {
            let _ = write!(out, "{report}");
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal failure");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<(String, bool)> {
    let tol = cli.tol.unwrap_or(VERIFY_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    match cli.command {
        Command::Construct(a) => construct(a, tol),
        Command::Verify(a) => verify(a, tol),
        Command::Evolve(a) => evolve(a, tol),
        Command::Compose(a) => compose(a, tol),
        Command::DemoPlaquette(a) => demo(a, tol),
        Command::GroupInfo(a) => group_info(a),
    }
}

fn emit<T: Serialize>(report: &T, pass: bool, out: Option<&Path>) -> Result<(String, bool)> {
    let text = to_json_string(report)?;
    if let Some(path) = out {
        write_atomic(path, &text)?;
    }
    Ok((text, pass))
}

fn construct(a: ConstructArgs, tol: f64) -> Result<(String, bool)> {
    let theta_a = read_matrix(&a.theta_a)?;
    let n = theta_a.nrows();
    let mut choices = ConstructionChoices::identity(n);
    if let Some(path) = &a.w {
        choices.w = read_matrix(path)?;
    }
    if let Some(path) = &a.kappa {
        choices.kappa = read_matrix(path)?;
    }
    choices.spectrum_permutation = a.perm;
    let (stator, theta_b) = construct_stator(&theta_a, &choices)?;
    let u_ab = stator.dilate(0)?;

    let completeness_residual = stator.completeness_residual();
    let eigenop_residual = stator.eigenop_residual(&theta_a, &theta_b)?;
    let scale = theta_a.norm().max(1.0);
    let matched = spectra_match(
        &eig_normal(&theta_a)?.eigenvalues,
        &eig_normal(&theta_b)?.eigenvalues,
        1e-9 * scale,
    );
    let dilation_unitarity_residual = two_sided_unitarity_residual(&u_ab);
    let pass = completeness_residual <= tol * n as f64
        && eigenop_residual <= tol * scale
        && matched
        && dilation_unitarity_residual <= tol * u_ab.nrows() as f64;
    let report = ConstructReport {
        dim: n,
        completeness_residual,
        eigenop_residual,
        spectra_match: matched,
        dilation_unitarity_residual,
        tol,
        pass,
    };

    std::fs::create_dir_all(&a.out)?;
    write_json(&a.out.join("stator.json"), &StatorJson::from(&stator))?;
    write_matrix(&a.out.join("theta_b.json"), &theta_b)?;
    write_matrix(&a.out.join("u_ab.json"), &u_ab)?;
    emit(&report, pass, Some(&a.out.join("report.json")))
}

fn verify(a: VerifyArgs, tol: f64) -> Result<(String, bool)> {
    let stator = read_json::<StatorJson>(&a.stator)?.to_stator_unchecked()?;
    let theta_a = read_matrix(&a.theta_a)?;
    let theta_b = read_matrix(&a.theta_b)?;
    let completeness_residual = stator.completeness_residual();
    let eigenop_residual = stator.eigenop_residual(&theta_a, &theta_b)?;
    let completeness_bound = tol * stator.dim_a() as f64;
    let eigenop_bound = tol * theta_a.norm().max(1.0);
    let pass = completeness_residual <= completeness_bound && eigenop_residual <= eigenop_bound;
    let report = VerifyReport {
        dim_a: stator.dim_a(),
        dim_b: stator.dim_b(),
        completeness_residual,
        completeness_bound,
        eigenop_residual,
        eigenop_bound,
        pass,
    };
    emit(&report, pass, a.out.as_deref())
}

fn evolve(a: EvolveArgs, tol: f64) -> Result<(String, bool)> {
    if a.trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    if a.times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite".into()));
    }
    let u_ab = read_matrix(&a.u_ab)?;
    let h_b = read_matrix(&a.h_b)?;
    let h_a = read_matrix(&a.h_a)?;
    let report = protocol_report(&u_ab, &h_a, &h_b, &a.times, a.trials, a.seed, tol)?;
    emit(&report, report.pass, a.out.as_deref())
}

fn compose(a: ComposeArgs, tol: f64) -> Result<(String, bool)> {
    let sites = a
        .sites
        .iter()
        .map(|path| read_json::<SiteJson>(path)?.to_projective())
        .collect::<Result<Vec<_>>>()?;
    let global = GlobalStator::compose(sites)?;
    let dim_a: usize = global.site_dims().iter().product();
    let total = dim_a * global.dim_b();
    if total > MAX_COMPOSE_DIM {
        return Err(Error::TooLarge(format!(
            "composite dimension {total} exceeds {MAX_COMPOSE_DIM}"
        )));
    }
    let stator = global.to_stator()?;
    let monolithic = global.dilate();
    let sequential = global
        .site_unitaries()
        .iter()
        .fold(ComplexMatrix::identity(total, total), |acc, u| u * acc);
    let sequential_vs_monolithic = (sequential - &monolithic).norm();
    let completeness_residual = stator.completeness_residual();

    let mut pass = completeness_residual <= tol * dim_a as f64
        && sequential_vs_monolithic <= tol * total as f64;
    let eigenop_residual = match &a.theta_b {
        Some(path) => {
            if a.theta_a.len() != a.sites.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} --theta-a files for {} sites",
                    a.theta_a.len(),
                    a.sites.len()
                )));
            }
            let ops = a.theta_a.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>>>()?;
            let theta_a = site_product(&ops);
            let theta_b = read_matrix(path)?;
            let r = stator.eigenop_residual(&theta_a, &theta_b)?;
            pass &= r <= tol * theta_a.norm().max(1.0);
            Some(r)
        }
        None => None,
    };
    if let Some(path) = &a.stator_out {
        write_json(path, &StatorJson::from(&stator))?;
    }
    let report = ComposeReport {
        sites: global.sites().len(),
        site_dims: global.site_dims(),
        dim_b: global.dim_b(),
        completeness_residual,
        sequential_vs_monolithic,
        eigenop_residual,
        tol,
        pass,
    };
    emit(&report, pass, a.out.as_deref())
}

fn demo(a: DemoArgs, tol: f64) -> Result<(String, bool)> {
    let report = plaquette_demo(a.k, a.coupling, a.t, tol)?;
    emit(&report, report.pass, a.out.as_deref())
}

fn load_group(spec: &str) -> Result<(FiniteGroup, Option<IrrepSet>)> {
    let path = Path::new(spec);
    if path.is_file() {
        let file: GroupJson = read_json(path)?;
        let group = file.to_group()?;
        return match file.to_irrep_set() {
            Ok(set) => Ok((group, Some(set))),
            Err(Error::IncompleteIrreps(_)) if file.irreps.is_none() => Ok((group, None)),
            Err(e) => Err(e),
        };
    }
    let group = make_group(spec)?;
    let set = crate::groups::irreps(&group)?;
    Ok((group, Some(set)))
}

fn group_info(a: GroupArgs) -> Result<(String, bool)> {
    let (group, set) = load_group(&a.group)?;
    let mut report = GroupReport {
        name: group.name().to_string(),
        order: group.order(),
        abelian: group.is_abelian(),
        elements: group.elements().to_vec(),
        irreps: None,
        sum_dim_squared: None,
        fourier_unitarity_residual: None,
        orthogonality_residual: None,
        max_eigenop_residual: None,
        pass: true,
    };
    if let Some(set) = set {
        let order = set.order() as f64;
        let fourier = two_sided_unitarity_residual(&set.fourier_matrix());
        let orth = set.orthogonality_check();
        let (stator, pairs) = group_element_stator(&set);
        let rebased = stator.rebase_b(&set.fourier_matrix(), standard_labels(stator.dim_b()))?;
        let mut max_eigenop: f64 = 0.0;
        for pair in &pairs {
            let theta_b = set.rep_operator_repbasis(pair.irrep, pair.m, pair.n)?;
            // (U, U) in the element basis and (U, F†UF) after rebasing
            max_eigenop = max_eigenop.max(stator.eigenop_residual(&pair.operator, &pair.operator)?);
            max_eigenop = max_eigenop.max(rebased.eigenop_residual(&pair.operator, &theta_b)?);
        }
        let sum: usize = set.irreps().iter().map(|j| j.dim * j.dim).sum();
        report.pass = fourier <= 1e-12 * order
            && orth.pass
            && sum == set.order()
            && max_eigenop <= 1e-12 * order;
        report.irreps = Some(
            set.irreps()
                .iter()
                .map(|j| IrrepSummary { label: j.label.clone(), dim: j.dim })
                .collect(),
        );
        report.sum_dim_squared = Some(sum);
        report.fourier_unitarity_residual = Some(fourier);
        report.orthogonality_residual = Some(orth.residual);
        report.max_eigenop_residual = Some(max_eigenop);
    }
    let pass = report.pass;
    emit(&report, pass, a.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["statorforge"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).0, EXIT_INPUT);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["demo-plaquette"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["demo-plaquette", "--k", "x"]).0, EXIT_INPUT);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("construct"));
    }

    #[test]
    fn demo_codes() {
        let (code, out, _) = run_args(&["demo-plaquette", "--k", "4", "--coupling", "1", "--t", "0.5"]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert!(out.contains("\"pass\": true"));
        let (code, _, err) = run_args(&["demo-plaquette", "--k", "9"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("TooLarge"));
    }

    #[test]
    fn bad_tolerance_is_an_input_error() {
        let (code, _, err) = run_args(&["--tol", "-1", "demo-plaquette", "--k", "2"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("InvalidArgument"));
    }

    #[test]
    fn group_info_builtins() {
        for name in ["Z2", "Z5", "S3", "D4", "Q8"] {
            let (code, out, err) = run_args(&["group-info", "--group", name]);
            assert_eq!(code, EXIT_PASS, "{name}: {out}{err}");
        }
        let (code, _, err) = run_args(&["group-info", "--group", "E8"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("UnknownBuiltin"));
    }
}
