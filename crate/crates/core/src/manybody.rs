//! Projective stators and global stators over several sites sharing one
//! ancilla. A projective stator comes from a B-diagonal unitary
//! `U = Σ_m u_m ⊗ |m><m|` acting on a fixed ancilla state, so products of
//! such unitaries over sites yield Kraus operators `c_m ⊗_k u^k_m`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::Entanglers;
use crate::error::{Error, Result};
use crate::numerics::{
    expm_hermitian, identity, kron, kron_all, pauli, random, two_sided_unitarity_residual, ComplexMatrix,
    ComplexVector, C64, ALGEBRAIC_TOL,
};
use crate::stator::{standard_labels, Stator};

/// Largest site count accepted by [`plaquette_demo`].
pub const MAX_PLAQUETTE_SITES: usize = 6;
/// Seed for the random input states of [`plaquette_demo`].
pub const PLAQUETTE_SEED: u64 = 0x5eed;
/// Number of random input states per demo run.
pub const PLAQUETTE_TRIALS: usize = 4;

/// Residual above which `M_m / c_m` is not accepted as unitary.
const FACTOR_TOL: f64 = 1e-8;

/// Unitaries `u_m` on A and the ancilla reference state `c_m = <m|0_B>`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveStator {
    unitaries: Vec<ComplexMatrix>,
    b_state: ComplexVector,
}

impl ProjectiveStator {
    pub fn new(unitaries: Vec<ComplexMatrix>, b_state: ComplexVector) -> Result<Self> {
        let first = unitaries
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no unitaries given".into()))?;
        let dim = crate::numerics::ensure_square(first)?;
        if b_state.len() != unitaries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} unitaries for an ancilla state of length {}",
                unitaries.len(),
                b_state.len()
            )));
        }
        for (index, u) in unitaries.iter().enumerate() {
            if u.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "u[{index}] is {}x{}, expected {dim}x{dim}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let residual = two_sided_unitarity_residual(u);
            if residual > ALGEBRAIC_TOL * dim as f64 {
                return Err(Error::NotUnitaryElement { index, residual });
            }
        }
        let norm = b_state.norm();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(ProjectiveStator { unitaries, b_state })
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn b_state(&self) -> &ComplexVector {
        &self.b_state
    }

    pub fn dim_a(&self) -> usize {
        self.unitaries[0].nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.unitaries.len()
    }

    /// Kraus operators `c_m u_m`.
    pub fn to_stator(&self) -> Result<Stator> {
        let kraus = self
            .unitaries
            .iter()
            .zip(self.b_state.iter())
            .map(|(u, &c)| u * c)
            .collect();
        Stator::from_kraus(kraus, standard_labels(self.dim_b()))
    }

    /// `Σ_m u_m ⊗ |m><m|` on the A-major composite space.
    pub fn dilate(&self) -> ComplexMatrix {
        b_diagonal(&self.unitaries)
    }
}

fn b_diagonal(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let nb = blocks.len();
    let na = blocks[0].nrows();
    let mut out = ComplexMatrix::zeros(na * nb, na * nb);
    for (m, u) in blocks.iter().enumerate() {
        for a in 0..na {
            for ap in 0..na {
                out[(a * nb + m, ap * nb + m)] = u[(a, ap)];
            }
        }
    }
    out
}

/// Splits each Kraus operator as `M_m = c_m u_m` with `u_m` unitary.
///
/// `|c_m| = sqrt(tr(M_m† M_m) / N_A)`. The phase is fixed by making the
/// largest-magnitude entry of `u_m` (first in row-major order on ties) real
/// and positive; whatever phase that removes from `u_m` is carried by `c_m`.
pub fn factor_projective(stator: &Stator) -> Result<ProjectiveStator> {
    let na = stator.dim_a();
    let mut unitaries = Vec::with_capacity(stator.dim_b());
    let mut coeffs = Vec::with_capacity(stator.dim_b());
    for (index, m) in stator.kraus().iter().enumerate() {
        let magnitude = (m.norm_squared() / na as f64).sqrt();
        if magnitude <= f64::EPSILON {
            return Err(Error::ZeroKraus(index));
        }
        let mut u = m.unscale(magnitude);
        let residual = (u.adjoint() * &u - identity(na)).norm();
        if residual > FACTOR_TOL {
            return Err(Error::NotProportionalToUnitary { index, residual });
        }
        let best = u.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let (r, k) = (0..na)
            .flat_map(|r| (0..na).map(move |k| (r, k)))
            .find(|&(r, k)| u[(r, k)].norm() >= best - 1e-12)
            .expect("nonzero matrix has a largest entry");
        let lead = u[(r, k)];
        let phase = lead / lead.norm();
        u *= phase.conj();
        u[(r, k)] = C64::new(lead.norm(), 0.0);
        unitaries.push(u);
        coeffs.push(phase * magnitude);
    }
    Ok(ProjectiveStator {
        unitaries,
        b_state: ComplexVector::from_vec(coeffs),
    })
}

/// Several projective stators sharing one ancilla and reference state.
/// Site `0` is the most significant tensor factor and is applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalStator {
    sites: Vec<ProjectiveStator>,
}

impl GlobalStator {
    pub fn compose(sites: Vec<ProjectiveStator>) -> Result<Self> {
        let first = sites
            .first()
            .ok_or_else(|| Error::MismatchedAncilla("no sites given".into()))?;
        for (k, site) in sites.iter().enumerate() {
            if site.dim_b() != first.dim_b() {
                return Err(Error::MismatchedAncilla(format!(
                    "site {k} has ancilla dimension {}, site 0 has {}",
                    site.dim_b(),
                    first.dim_b()
                )));
            }
            let gap = (site.b_state() - first.b_state()).norm();
            if gap > ALGEBRAIC_TOL {
                return Err(Error::MismatchedAncilla(format!(
                    "site {k} ancilla state differs from site 0 by {gap:.3e}"
                )));
            }
        }
        Ok(GlobalStator { sites })
    }

    pub fn sites(&self) -> &[ProjectiveStator] {
        &self.sites
    }

    pub fn site_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dim_a()).collect()
    }

    pub fn dim_b(&self) -> usize {
        self.sites[0].dim_b()
    }

    pub fn b_state(&self) -> &ComplexVector {
        self.sites[0].b_state()
    }

    /// Products `⊗_k u^k_m`, one per ancilla basis state.
    fn product_unitaries(&self) -> Vec<ComplexMatrix> {
        (0..self.dim_b())
            .map(|m| kron_all(self.sites.iter().map(|s| &s.unitaries()[m])))
            .collect()
    }

    /// The flattened stator on `(⊗_k A_k) ⊗ B`, Kraus `c_m ⊗_k u^k_m`.
    pub fn to_stator(&self) -> Result<Stator> {
        let kraus = self
            .product_unitaries()
            .into_iter()
            .zip(self.b_state().iter())
            .map(|(u, &c)| u * c)
            .collect();
        Stator::from_kraus(kraus, standard_labels(self.dim_b()))
    }

    /// The composed B-diagonal unitary `Σ_m (⊗_k u^k_m) ⊗ |m><m|`.
    pub fn dilate(&self) -> ComplexMatrix {
        b_diagonal(&self.product_unitaries())
    }

    /// Each site's two-body unitary `U^k_AB` lifted to the full space, in
    /// application order.
    pub fn site_unitaries(&self) -> Vec<ComplexMatrix> {
        let dims = self.site_dims();
        self.sites
            .iter()
            .enumerate()
            .map(|(k, s)| embed_site_operator(&s.dilate(), &dims, k, self.dim_b()))
            .collect()
    }
}

/// Lifts an operator on `A_site ⊗ B` to `(⊗_k A_k) ⊗ B`, acting as the
/// identity on the other sites.
pub fn embed_site_operator(
    op: &ComplexMatrix,
    site_dims: &[usize],
    site: usize,
    dim_b: usize,
) -> ComplexMatrix {
    let total: usize = site_dims.iter().product::<usize>() * dim_b;
    let d = site_dims[site];
    assert_eq!(op.shape(), (d * dim_b, d * dim_b));
    // stride of the site digit within the A index
    let stride: usize = site_dims[site + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(total, total);
    for row in 0..total {
        let (ar, br) = (row / dim_b, row % dim_b);
        let digit_r = (ar / stride) % d;
        let rest = ar - digit_r * stride;
        for digit_c in 0..d {
            let ac = rest + digit_c * stride;
            for bc in 0..dim_b {
                let v = op[(digit_r * dim_b + br, digit_c * dim_b + bc)];
                if v != C64::new(0.0, 0.0) {
                    out[(row, ac * dim_b + bc)] = v;
                }
            }
        }
    }
    out
}

/// Serialized as the demo report JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteReport {
    pub k_sites: usize,
    pub coupling: f64,
    pub t: f64,
    pub deviation: f64,
    pub leak: f64,
    pub pass: bool,
    pub seed: u64,
}

/// `K` spin-1/2 sites, each with the projective stator `{1, σ_z}` on the
/// ancilla state `(|0> + |1>)/√2`.
pub fn plaquette_sites(k_sites: usize) -> Result<Vec<ProjectiveStator>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let b_state = ComplexVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]);
    (0..k_sites)
        .map(|_| ProjectiveStator::new(vec![identity(2), pauli::z()], b_state.clone()))
        .collect()
}

/// Evolves `K` spins under `coupling · σ_z^{⊗K}` by entangling each with a
/// shared ancilla through a two-body unitary, evolving the ancilla under
/// `coupling · σ_x`, and undoing the entanglers. Reports the worst
/// deviation from direct evolution over [`PLAQUETTE_TRIALS`] seeded states.
pub fn plaquette_demo(k_sites: usize, coupling: f64, t: f64, tol: f64) -> Result<PlaquetteReport> {
    if k_sites > MAX_PLAQUETTE_SITES {
        return Err(Error::TooLarge(format!(
            "{k_sites} sites requested, at most {MAX_PLAQUETTE_SITES} supported"
        )));
    }
    if k_sites < 2 {
        return Err(Error::InvalidArgument(format!("{k_sites} sites requested, at least 2 required")));
    }
    if !coupling.is_finite() || !t.is_finite() {
        return Err(Error::InvalidArgument("coupling and t must be finite".into()));
    }
    let global = GlobalStator::compose(plaquette_sites(k_sites)?)?;
    let entanglers = Entanglers::new(global.site_unitaries(), global.b_state().clone())?;
    let c = C64::new(coupling, 0.0);
    let h_b = pauli::x() * c;
    let h_a = kron_all(std::iter::repeat_n(&pauli::z(), k_sites).collect::<Vec<_>>()) * c;

    let evolve_b = expm_hermitian(&h_b, t)?;
    let evolve_a = expm_hermitian(&h_a, t)?;
    let dim = 1usize << k_sites;
    let mut rng = ChaCha8Rng::seed_from_u64(PLAQUETTE_SEED);
    let mut deviation: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for _ in 0..PLAQUETTE_TRIALS {
        let psi = random::state(&mut rng, dim);
        let eff = entanglers.evolve_with(&evolve_b, &psi)?;
        deviation = deviation.max((&eff.psi_out - &evolve_a * &psi).norm());
        leak = leak.max(eff.leak);
    }
    Ok(PlaquetteReport {
        k_sites,
        coupling,
        t,
        deviation,
        leak,
        pass: deviation <= tol,
        seed: PLAQUETTE_SEED,
    })
}

/// `⊗_k ops[k]`, the product interaction `Π_k Θ^k_A` on separate sites.
pub fn site_product(ops: &[ComplexMatrix]) -> ComplexMatrix {
    ops.iter().fold(identity(1), |acc, op| kron(&acc, op))
}
