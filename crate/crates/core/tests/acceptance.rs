//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use statorforge::dynamics::protocol_report;
use statorforge::groups::builtin_irrep_set;
use statorforge::manybody::{plaquette_demo, plaquette_sites, GlobalStator};
use statorforge::numerics::{
    dft_matrix, eig_normal, pauli, random, real_matrix, two_sided_unitarity_residual, C64,
};
use statorforge::stator::{
    construct_from_spectrum, construct_stator, cyclic_shift_stator, extract_kraus, group_element_stator,
    rep_basis_kraus, shift_operator, spectra_match, spin_half_stator, standard_labels, ConstructionChoices, Stator,
};

const GROUPS: [&str; 6] = ["Z2", "Z3", "Z5", "S3", "D4", "Q8"];

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_choices(rng: &mut ChaCha8Rng, n: usize) -> ConstructionChoices {
    ConstructionChoices {
        w: random::unitary(rng, n),
        kappa: random::unitary(rng, n),
        ..ConstructionChoices::identity(n)
    }
}

fn construction_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_completeness: f64 = 0.0;
    let mut worst_eigenop: f64 = 0.0;
    let mut pass = true;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let theta = random::normal(&mut rng, n);
        let choices = random_choices(&mut rng, n);
        let (s, theta_b) = construct_stator(&theta, &choices).expect("normal input");
        let completeness = s.completeness_residual() / n as f64;
        let eigenop = s.eigenop_residual(&theta, &theta_b).unwrap() / theta.norm();
        let spectra = spectra_match(
            &eig_normal(&theta).unwrap().eigenvalues,
            &eig_normal(&theta_b).unwrap().eigenvalues,
            1e-9,
        );
        pass &= completeness <= 1e-12 && eigenop <= 1e-10 && spectra;
        worst_completeness = worst_completeness.max(completeness);
        worst_eigenop = worst_eigenop.max(eigenop);
    }
    check(
        pass,
        format!("50 random normal operators, completeness/N {worst_completeness:.1e}, eigenop/|Θ_A| {worst_eigenop:.1e}"),
    )
}

fn reference_stators() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for sigma in [pauli::x(), pauli::y(), pauli::z()] {
        let s = spin_half_stator(&sigma).unwrap();
        let r = s.eigenop_residual(&sigma, &pauli::x()).unwrap();
        pass &= s.completeness_residual() <= 1e-10 * 2.0 && r <= 1e-10;
        worst = worst.max(r);
    }
    for n in [2, 3, 5] {
        let q = shift_operator(n);
        let shift = cyclic_shift_stator(n);
        let (elements, _) = group_element_stator(&builtin_irrep_set(&format!("Z{n}")).unwrap());
        // in the element basis Q is the cyclic irrep's generator
        let q_elem = builtin_irrep_set(&format!("Z{n}")).unwrap().rep_operator(1, 0, 0).unwrap();
        for (s, op) in [(&shift, &q), (&elements, &q_elem)] {
            let r = s.eigenop_residual(op, op).unwrap();
            pass &= s.completeness_residual() <= 1e-10 * n as f64 && r <= 1e-10;
            worst = worst.max(r);
        }
    }
    // Hadamard and DFT rebases give projector Kraus operators
    let mut worst_projector: f64 = 0.0;
    let had = spin_half_stator(&pauli::x()).unwrap().rebase_b(&pauli::hadamard(), standard_labels(2)).unwrap();
    for (m, expected) in had
        .kraus()
        .iter()
        .zip([real_matrix(2, 2, &[0.5, 0.5, 0.5, 0.5]), real_matrix(2, 2, &[0.5, -0.5, -0.5, 0.5])])
    {
        worst_projector = worst_projector.max((m - expected).norm());
    }
    for n in [2, 3, 5] {
        let f = dft_matrix(n);
        let r = cyclic_shift_stator(n).rebase_b(&f, standard_labels(n)).unwrap();
        for (a, m) in r.kraus().iter().enumerate() {
            let col = f.column(a);
            worst_projector = worst_projector.max((m - col * col.adjoint()).norm());
        }
    }
    pass &= worst_projector <= 1e-13;
    check(
        pass,
        format!("spin-1/2 and Z_2/Z_3/Z_5 eigenop {worst:.1e}, projector form after rebase {worst_projector:.1e}"),
    )
}

fn group_layer() -> Outcome {
    let mut pass = true;
    let mut worst_fourier: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut worst_eigenop: f64 = 0.0;
    for name in GROUPS {
        let set = builtin_irrep_set(name).unwrap();
        let order = set.order();
        let fourier = two_sided_unitarity_residual(&set.fourier_matrix());
        let orth = set.orthogonality_check().residual;
        let dims: usize = set.irreps().iter().map(|j| j.dim * j.dim).sum();
        let (s, pairs) = group_element_stator(&set);
        let eigenop = pairs
            .iter()
            .map(|p| s.eigenop_residual(&p.operator, &p.operator).unwrap())
            .fold(0.0, f64::max);
        pass &= fourier <= 1e-12 * order as f64 && orth <= 1e-12 && dims == order && eigenop <= 1e-12;
        worst_fourier = worst_fourier.max(fourier / order as f64);
        worst_orth = worst_orth.max(orth);
        worst_eigenop = worst_eigenop.max(eigenop);
    }
    check(
        pass,
        format!(
            "{}: Fourier unitarity/|G| {worst_fourier:.1e}, orthogonality {worst_orth:.1e}, eigenop {worst_eigenop:.1e}",
            GROUPS.join(",")
        ),
    )
}

fn representation_basis() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in GROUPS {
        let set = builtin_irrep_set(name).unwrap();
        let (s, _) = group_element_stator(&set);
        let rebased = s.rebase_b(&set.fourier_matrix(), set.rep_basis_labels()).unwrap();
        for ((j, m, n), kraus) in set.rep_basis().into_iter().zip(rebased.kraus()) {
            let weight = (set.irreps()[j].dim as f64 / set.order() as f64).sqrt();
            let expected = set.rep_operator(j, m, n).unwrap().adjoint() * C64::new(weight, 0.0);
            worst = worst.max((kraus - expected).norm());
        }
    }
    check(worst <= 1e-12, format!("max |M_jmn - sqrt(d/|G|) U^j_mn†| = {worst:.1e}"))
}

fn effective_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let times: Vec<f64> = (0..10).map(|k| 2.0 * k as f64 / 9.0).collect();
    let mut worst_dev: f64 = 0.0;
    let mut worst_leak: f64 = 0.0;
    let mut pass = true;
    for trial in 0..10 {
        let n = rng.random_range(2..=6);
        let h_a = random::hermitian(&mut rng, n);
        let choices = random_choices(&mut rng, n);
        let (s, h_b) = construct_stator(&h_a, &choices).unwrap();
        let u_ab = s.dilate(0).unwrap();
        let report = protocol_report(&u_ab, &h_a, &h_b, &times, 10, 100 + trial, 1e-9).unwrap();
        pass &= report.max_deviation <= 1e-9 && report.max_leak <= 1e-10;
        worst_dev = worst_dev.max(report.max_deviation);
        worst_leak = worst_leak.max(report.max_leak);
    }
    check(pass, format!("10 Hamiltonians x 10 times x 10 states, deviation {worst_dev:.1e}, leak {worst_leak:.1e}"))
}

fn spectrum_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for n in [3, 5, 7] {
        for theta in [random::hermitian(&mut rng, n), random::normal(&mut rng, n)] {
            let spectrum = eig_normal(&theta).unwrap();
            let shifted = spectrum.map_eigenvalues(|l| l * l + l);
            let choices = random_choices(&mut rng, n);
            let (s1, tb1) = construct_from_spectrum(&spectrum, &choices).unwrap();
            let (s2, tb2) = construct_from_spectrum(&shifted, &choices).unwrap();
            let f_theta = &theta * &theta + &theta;
            let r1 = s1.eigenop_residual(&theta, &tb1).unwrap() / theta.norm();
            let r2 = s2.eigenop_residual(&f_theta, &tb2).unwrap() / f_theta.norm();
            pass &= s1.kraus() == s2.kraus() && r1 <= 1e-10 && r2 <= 1e-10;
            worst = worst.max(r1).max(r2);
        }
    }
    check(pass, format!("Θ_A and Θ_A²+Θ_A give bit-identical Kraus, relative eigenop {worst:.1e}"))
}

fn plaquette() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (k, bound) in [(4, 1e-10), (6, 1e-9)] {
        let mut worst: f64 = 0.0;
        for t in [0.1, 0.5, 1.0] {
            let report = plaquette_demo(k, 1.0, t, bound).unwrap();
            pass &= report.pass && report.deviation <= bound;
            worst = worst.max(report.deviation);
        }
        details.push(format!("K={k} deviation {worst:.1e}"));
    }
    check(pass, details.join(", "))
}

fn dilation_fixtures() -> Vec<(String, Stator)> {
    let mut out = Vec::new();
    for (name, sigma) in [("x", pauli::x()), ("y", pauli::y()), ("z", pauli::z())] {
        out.push((format!("spin-1/2 σ_{name}"), spin_half_stator(&sigma).unwrap()));
    }
    for n in [2, 3, 5] {
        out.push((format!("Z_{n} shift"), cyclic_shift_stator(n)));
    }
    for name in GROUPS {
        let set = builtin_irrep_set(name).unwrap();
        out.push((format!("{name} elements"), group_element_stator(&set).0));
        out.push((format!("{name} irreps"), rep_basis_kraus(&set)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 4, 6] {
        let theta = random::normal(&mut rng, n);
        let choices = random_choices(&mut rng, n);
        out.push((format!("random n={n}"), construct_stator(&theta, &choices).unwrap().0));
    }
    let global = GlobalStator::compose(plaquette_sites(4).unwrap()).unwrap();
    out.push(("plaquette K=4".into(), global.to_stator().unwrap()));
    out
}

fn dilation_round_trip() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let fixtures = dilation_fixtures();
    for (name, s) in &fixtures {
        let u = s.dilate(0).unwrap();
        let exact = extract_kraus(&u, s.dim_b(), 0).unwrap() == s.kraus();
        let unitarity = two_sided_unitarity_residual(&u);
        if !exact {
            eprintln!("  {name}: extracted Kraus differ");
        }
        pass &= exact && unitarity <= 1e-10 * u.nrows() as f64;
        worst = worst.max(unitarity / u.nrows() as f64);
    }
    check(pass, format!("{} stators, Kraus recovered exactly, unitarity/dim {worst:.1e}", fixtures.len()))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_statorforge"))
        .args(args)
        .env_remove("STATORFORGE_TOL")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        out.stdout,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn cli_contract() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("statorforge-acceptance-{}", std::process::id()));
    let dirs = [tmp.join("a"), tmp.join("b")];
    let dir_args: Vec<String> = dirs.iter().map(|d| d.to_string_lossy().into_owned()).collect();
    let (sx, sz, stator) = (fixture("sigma_x.json"), fixture("sigma_z.json"), fixture("spin_half_stator.json"));
    let (site, u_ab, h_b) = (
        fixture("site_sigma_z.json"),
        fixture("sigma_x_construct/u_ab.json"),
        fixture("sigma_x_construct/theta_b.json"),
    );
    let nilpotent = fixture("nilpotent.json");

    // (args, expected exit code, expected stderr token)
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["construct", "--theta-a", &sx, "--out", &dir_args[0]], 0, ""),
        (vec!["construct", "--theta-a", &nilpotent, "--out", &dir_args[1]], 2, "NotNormal"),
        (vec!["verify", "--stator", &stator, "--theta-a", &sx, "--theta-b", &sx], 0, ""),
        (vec!["verify", "--stator", &stator, "--theta-a", &sz, "--theta-b", &sx], 1, ""),
        (
            vec!["evolve", "--u-ab", &u_ab, "--h-b", &h_b, "--h-a", &sx, "--t", "0.3,1.7", "--trials", "5", "--seed", "9"],
            0,
            "",
        ),
        (
            vec!["compose", "--sites", &site, &site, "--theta-a", &sz, &sz, "--theta-b", &sx],
            0,
            "",
        ),
        (vec!["demo-plaquette", "--k", "4", "--coupling", "1", "--t", "0.5"], 0, ""),
        (vec!["demo-plaquette", "--k", "9", "--coupling", "1", "--t", "0.5"], 2, "TooLarge"),
        (vec!["group-info", "--group", "D4"], 0, ""),
    ];
    let mut failures = Vec::new();
    for (args, expected, token) in &cases {
        let first = run_cli(args);
        let second = run_cli(args);
        if first.0 != *expected || !first.2.contains(token) || first.1 != second.1 {
            failures.push(format!("{} (exit {})", args[0], first.0));
        }
    }
    // construct's files are deterministic too
    let (_, _, _) = run_cli(&["construct", "--theta-a", &sx, "--out", &dir_args[1]]);
    for file in ["stator.json", "theta_b.json", "u_ab.json", "report.json"] {
        let a = std::fs::read(dirs[0].join(file)).ok();
        let b = std::fs::read(dirs[1].join(file)).ok();
        if a.is_none() || a != b {
            failures.push(format!("construct {file} not reproducible"));
        }
    }
    let _ = std::fs::remove_dir_all(&tmp);
    let detail = if failures.is_empty() {
        format!("{} invocations, exit codes and byte-identical reports as documented", cases.len())
    } else {
        format!("failing: {}", failures.join(", "))
    };
    check(failures.is_empty(), detail)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("construction soundness", construction_soundness, Some(Duration::from_secs(5))),
        ("reference stators", reference_stators, Some(Duration::from_secs(1))),
        ("group layer", group_layer, Some(Duration::from_secs(10))),
        ("representation-basis identity", representation_basis, None),
        ("effective-dynamics protocol", effective_dynamics, Some(Duration::from_secs(30))),
        ("spectrum independence", spectrum_independence, None),
        ("many-body plaquette", plaquette, Some(Duration::from_secs(10))),
        ("dilation round-trip", dilation_round_trip, None),
        ("CLI contract", cli_contract, None),
    ];
    let mut failed = 0;
    for (index, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = match budget {
            Some(b) => format!(" (limit {:.0} s)", b.as_secs_f64()),
            None => String::new(),
        };
        println!(
            "{} {}. {name}: {} [{:.2} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            index + 1,
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
