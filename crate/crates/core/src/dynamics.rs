//! Ancilla-mediated evolution: entangle A with B through `U_AB`, evolve B
//! alone, disentangle, and read A out of the ancilla's reference state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    basis_vector, ensure_hermitian, ensure_square, expm_hermitian, random, ComplexMatrix,
    ComplexVector, C64, VERIFY_TOL,
};

/// Inputs of one protocol run, with `ħ = 1`.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub u_ab: ComplexMatrix,
    pub h_b: ComplexMatrix,
    pub t: f64,
    pub zero_index: usize,
    pub psi_a: ComplexVector,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub psi_out: ComplexVector,
    /// `1 − ‖psi_out‖²`: weight left outside the ancilla reference state.
    pub leak: f64,
}

/// `<0_B| U† e^{−i H_B t} U |ψ_A>|0_B>` with `|0_B>` the basis state at
/// `zero_index`.
pub fn effective_evolve(run: &ProtocolRun) -> Result<Evolution> {
    let nb = ensure_square(&run.h_b)?;
    if run.zero_index >= nb {
        return Err(Error::IndexOutOfRange(format!(
            "zero index {} for ancilla dimension {nb}",
            run.zero_index
        )));
    }
    effective_evolve_sequence(
        std::slice::from_ref(&run.u_ab),
        &run.h_b,
        run.t,
        &run.psi_a,
        &basis_vector(nb, run.zero_index),
    )
}

/// Entangling unitaries on `A ⊗ B` and the ancilla reference state,
/// validated once and reusable across times and input states.
#[derive(Clone, Debug)]
pub struct Entanglers {
    unitaries: Vec<ComplexMatrix>,
    b_state: ComplexVector,
    dim_a: usize,
}

impl Entanglers {
    /// `unitaries[0]` is applied first. Each must be unitary on the
    /// `N_A·N_B` composite space, with `N_B` the length of `b_state`.
    pub fn new(unitaries: Vec<ComplexMatrix>, b_state: ComplexVector) -> Result<Self> {
        let nb = b_state.len();
        let total = unitaries
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no entangling unitaries given".into()))?
            .nrows();
        if nb == 0 || total % nb != 0 {
            return Err(Error::DimensionMismatch(format!(
                "U_AB has dimension {total}, not a multiple of the ancilla dimension {nb}"
            )));
        }
        for (k, u) in unitaries.iter().enumerate() {
            if u.shape() != (total, total) {
                return Err(Error::DimensionMismatch(format!(
                    "U_AB[{k}] is {}x{}, expected {total}x{total}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            crate::numerics::ensure_unitary(u, "U_AB", VERIFY_TOL * total as f64)?;
        }
        ensure_normalized(&b_state)?;
        Ok(Entanglers {
            dim_a: total / nb,
            unitaries,
            b_state,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.b_state.len()
    }

    /// Runs the protocol for ancilla Hamiltonian `h_b` over time `t`.
    pub fn evolve(&self, h_b: &ComplexMatrix, t: f64, psi_a: &ComplexVector) -> Result<Evolution> {
        let nb = ensure_square(h_b)?;
        if nb != self.dim_b() {
            return Err(Error::DimensionMismatch(format!(
                "H_B is {nb}x{nb}, ancilla dimension is {}",
                self.dim_b()
            )));
        }
        let evolve_b = expm_hermitian(h_b, t)?;
        self.evolve_with(&evolve_b, psi_a)
    }

    /// Like [`evolve`](Self::evolve) with `e^{−i H_B t}` already computed.
    pub fn evolve_with(&self, evolve_b: &ComplexMatrix, psi_a: &ComplexVector) -> Result<Evolution> {
        let (na, nb) = (self.dim_a, self.dim_b());
        if psi_a.len() != na {
            return Err(Error::DimensionMismatch(format!(
                "state has length {}, system dimension is {na}",
                psi_a.len()
            )));
        }
        ensure_normalized(psi_a)?;
        let mut state = psi_a.kronecker(&self.b_state);
        for u in &self.unitaries {
            state = u * state;
        }
        state = apply_on_ancilla(evolve_b, &state, na, nb);
        for u in self.unitaries.iter().rev() {
            state = u.ad_mul(&state);
        }
        let psi_out = ComplexVector::from_fn(na, |a, _| {
            (0..nb).map(|b| self.b_state[b].conj() * state[a * nb + b]).sum::<C64>()
        });
        let leak = 1.0 - psi_out.norm_squared();
        Ok(Evolution { psi_out, leak })
    }
}

/// The protocol with a list of entangling unitaries applied in order
/// (`unitaries[0]` first), undone in reverse, and an arbitrary normalized
/// ancilla reference state.
pub fn effective_evolve_sequence(
    unitaries: &[ComplexMatrix],
    h_b: &ComplexMatrix,
    t: f64,
    psi_a: &ComplexVector,
    b_state: &ComplexVector,
) -> Result<Evolution> {
    ensure_hermitian(h_b)?;
    Entanglers::new(unitaries.to_vec(), b_state.clone())?.evolve(h_b, t, psi_a)
}

/// `e^{−i H_A t} ψ_A`.
pub fn direct_evolve(h_a: &ComplexMatrix, t: f64, psi_a: &ComplexVector) -> Result<ComplexVector> {
    let u = expm_hermitian(h_a, t)?;
    if psi_a.len() != u.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, H_A is {}x{}",
            psi_a.len(),
            u.nrows(),
            u.ncols()
        )));
    }
    Ok(u * psi_a)
}

fn ensure_normalized(v: &ComplexVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > crate::numerics::ALGEBRAIC_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `(1_A ⊗ op) v` for an A-major composite vector.
fn apply_on_ancilla(op: &ComplexMatrix, v: &ComplexVector, na: usize, nb: usize) -> ComplexVector {
    let mut out = ComplexVector::zeros(na * nb);
    for a in 0..na {
        let block = v.rows(a * nb, nb);
        out.rows_mut(a * nb, nb).copy_from(&(op * block));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub t: f64,
    pub deviation: f64,
    pub leak: f64,
}

/// Serialized as the protocol report JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub max_deviation: f64,
    pub max_leak: f64,
    pub per_time: Vec<TimePoint>,
    pub pass: bool,
    pub seed: u64,
}

/// Compares the ancilla-mediated evolution with the direct one over `times`
/// and `trials` random states drawn from `ChaCha8Rng::seed_from_u64(seed)`.
///
/// Each time point records the worst deviation and leak over the trials. The
/// run passes when both maxima are at most `tol`.
pub fn protocol_report(
    u_ab: &ComplexMatrix,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
    times: &[f64],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ProtocolReport> {
    let na = ensure_square(h_a)?;
    ensure_hermitian(h_a)?;
    ensure_hermitian(h_b)?;
    let nb = ensure_square(h_b)?;
    let entanglers = Entanglers::new(vec![u_ab.clone()], basis_vector(nb, 0))?;
    if entanglers.dim_a() != na {
        return Err(Error::DimensionMismatch(format!(
            "U_AB acts on a {}-dimensional system, H_A is {na}x{na}",
            entanglers.dim_a()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<ComplexVector> = (0..trials).map(|_| random::state(&mut rng, na)).collect();

    let mut per_time = Vec::with_capacity(times.len());
    for &t in times {
        let evolve_b = expm_hermitian(h_b, t)?;
        let evolve_a = expm_hermitian(h_a, t)?;
        let mut deviation: f64 = 0.0;
        let mut leak: f64 = 0.0;
        for psi in &states {
            let eff = entanglers.evolve_with(&evolve_b, psi)?;
            deviation = deviation.max((&eff.psi_out - &evolve_a * psi).norm());
            leak = leak.max(eff.leak);
        }
        per_time.push(TimePoint { t, deviation, leak });
    }
    let max_deviation = per_time.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let max_leak = per_time.iter().map(|p| p.leak).fold(0.0, f64::max);
    Ok(ProtocolReport {
        max_deviation,
        max_leak,
        pass: max_deviation <= tol && max_leak <= tol,
        per_time,
        seed,
    })
}
