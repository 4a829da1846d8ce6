//! The stator `S = Σ_i M_i ⊗ |i>`, its defining checks, the general
//! construction from a normal `Θ_A`, ancilla basis changes and unitary
//! dilation.

use crate::error::{Error, Result};
use crate::groups::IrrepSet;
use crate::numerics::{
    complete_isometry, eig_normal, ensure_finite, ensure_square, identity,
    ComplexMatrix, ComplexVector, Spectrum, C64, ALGEBRAIC_TOL, VERIFY_TOL,
};

/// `"0", "1", …` for an ancilla of dimension `n`.
pub fn standard_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// A list of Kraus operators on system A, one per ancilla basis label.
#[derive(Clone, Debug, PartialEq)]
pub struct Stator {
    dim_a: usize,
    b_labels: Vec<String>,
    kraus: Vec<ComplexMatrix>,
}

impl Stator {
    /// Builds a stator and checks completeness at the default tolerance
    /// (`VERIFY_TOL · N_A`).
    pub fn from_kraus(kraus: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        Self::from_kraus_with_tol(kraus, labels, VERIFY_TOL)
    }

    /// Like [`from_kraus`](Self::from_kraus) with completeness bound
    /// `tol · N_A`.
    pub fn from_kraus_with_tol(
        kraus: Vec<ComplexMatrix>,
        labels: Vec<String>,
        tol: f64,
    ) -> Result<Self> {
        let stator = Self::from_parts_unchecked(kraus, labels)?;
        let residual = stator.completeness_residual();
        let bound = tol * stator.dim_a as f64;
        if residual > bound {
            return Err(Error::IncompleteKraus { residual, bound });
        }
        Ok(stator)
    }

    /// Checks shapes only. Used when loading stators that are about to be
    /// verified, so that an incomplete Kraus set is reported rather than
    /// rejected.
    pub fn from_parts_unchecked(kraus: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::DimensionMismatch("a stator needs at least one Kraus operator".into()))?;
        let dim_a = ensure_square(first)?;
        for (i, m) in kraus.iter().enumerate() {
            if m.shape() != (dim_a, dim_a) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_a}x{dim_a}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            ensure_finite(m)?;
        }
        if labels.len() != kraus.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} Kraus operators",
                labels.len(),
                kraus.len()
            )));
        }
        Ok(Stator {
            dim_a,
            b_labels: labels,
            kraus,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn labels(&self) -> &[String] {
        &self.b_labels
    }

    pub fn into_parts(self) -> (Vec<ComplexMatrix>, Vec<String>) {
        (self.kraus, self.b_labels)
    }

    /// `‖Σ_i M_i† M_i − 1‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_a, self.dim_a), |acc, m| {
                acc + m.adjoint() * m
            });
        (sum - identity(self.dim_a)).norm()
    }

    /// The stator as an `(N_A·N_B) × N_A` isometry, A-major rows.
    pub fn isometry(&self) -> ComplexMatrix {
        let nb = self.dim_b();
        ComplexMatrix::from_fn(self.dim_a * nb, self.dim_a, |row, col| {
            self.kraus[row % nb][(row / nb, col)]
        })
    }

    /// `S|ψ> = Σ_i (M_i ψ) ⊗ |i>`.
    pub fn apply(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        if psi.len() != self.dim_a {
            return Err(Error::DimensionMismatch(format!(
                "state has length {}, system dimension is {}",
                psi.len(),
                self.dim_a
            )));
        }
        let nb = self.dim_b();
        let images: Vec<ComplexVector> = self.kraus.iter().map(|m| m * psi).collect();
        Ok(ComplexVector::from_fn(self.dim_a * nb, |idx, _| {
            images[idx % nb][idx / nb]
        }))
    }

    /// `max_i ‖Σ_j R_ij M_j − M_i Θ_A‖_F` with `R = Θ_B` in the stator's
    /// ancilla basis. Zero exactly when `Θ_B S = S Θ_A`.
    pub fn eigenop_residual(&self, theta_a: &ComplexMatrix, theta_b: &ComplexMatrix) -> Result<f64> {
        if theta_a.shape() != (self.dim_a, self.dim_a) {
            return Err(Error::DimensionMismatch(format!(
                "theta_a is {}x{}, system dimension is {}",
                theta_a.nrows(),
                theta_a.ncols(),
                self.dim_a
            )));
        }
        let nb = self.dim_b();
        if theta_b.shape() != (nb, nb) {
            return Err(Error::DimensionMismatch(format!(
                "theta_b is {}x{}, ancilla dimension is {nb}",
                theta_b.nrows(),
                theta_b.ncols()
            )));
        }
        let mut worst: f64 = 0.0;
        for (i, mi) in self.kraus.iter().enumerate() {
            let mut diff = -(mi * theta_a);
            for (j, mj) in self.kraus.iter().enumerate() {
                let r = theta_b[(i, j)];
                if r != C64::new(0.0, 0.0) {
                    diff += mj * r;
                }
            }
            worst = worst.max(diff.norm());
        }
        Ok(worst)
    }

    /// Re-expresses the stator in the ancilla basis whose vectors are the
    /// columns of `basis_change`: `M'_i = Σ_j conj(C[j,i]) M_j`.
    pub fn rebase_b(&self, basis_change: &ComplexMatrix, new_labels: Vec<String>) -> Result<Stator> {
        let nb = self.dim_b();
        if basis_change.shape() != (nb, nb) {
            return Err(Error::DimensionMismatch(format!(
                "basis change is {}x{}, ancilla dimension is {nb}",
                basis_change.nrows(),
                basis_change.ncols()
            )));
        }
        crate::numerics::ensure_unitary(basis_change, "basis change", ALGEBRAIC_TOL * nb as f64)?;
        if new_labels.len() != nb {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for ancilla dimension {nb}",
                new_labels.len()
            )));
        }
        let kraus = (0..nb)
            .map(|i| {
                self.kraus
                    .iter()
                    .enumerate()
                    .fold(ComplexMatrix::zeros(self.dim_a, self.dim_a), |acc, (j, mj)| {
                        acc + mj * basis_change[(j, i)].conj()
                    })
            })
            .collect();
        Ok(Stator {
            dim_a: self.dim_a,
            b_labels: new_labels,
            kraus,
        })
    }

    /// A unitary `U_AB` on the A-major composite space with
    /// `<i_B| U |zero_index_B> = M_i`.
    ///
    /// The remaining columns come from [`complete_isometry`] and fill the
    /// other column positions in increasing order.
    pub fn dilate(&self, zero_index: usize) -> Result<ComplexMatrix> {
        let nb = self.dim_b();
        if zero_index >= nb {
            return Err(Error::IndexOutOfRange(format!(
                "zero index {zero_index} for ancilla dimension {nb}"
            )));
        }
        let completed = complete_isometry(&self.isometry())?;
        let total = self.dim_a * nb;
        let mut u = ComplexMatrix::zeros(total, total);
        let mut extra = self.dim_a;
        for col in 0..total {
            let (a, b) = (col / nb, col % nb);
            let src = if b == zero_index {
                a
            } else {
                extra += 1;
                extra - 1
            };
            u.set_column(col, &completed.column(src));
        }
        Ok(u)
    }
}

/// Reads `<i_B| U |zero_index_B>` out of an A-major composite unitary.
pub fn extract_kraus(u: &ComplexMatrix, dim_b: usize, zero_index: usize) -> Result<Vec<ComplexMatrix>> {
    let total = ensure_square(u)?;
    if dim_b == 0 || total % dim_b != 0 || zero_index >= dim_b {
        return Err(Error::DimensionMismatch(format!(
            "cannot split dimension {total} with ancilla dimension {dim_b} at index {zero_index}"
        )));
    }
    let dim_a = total / dim_b;
    Ok((0..dim_b)
        .map(|i| {
            ComplexMatrix::from_fn(dim_a, dim_a, |a, ap| u[(a * dim_b + i, ap * dim_b + zero_index)])
        })
        .collect())
}

/// The free data of the general construction: the unitary `W` that rotates
/// the ancilla eigenbasis, the unitary `κ` that mixes the rank-one blocks,
/// ancilla labels, and an optional reordering of the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionChoices {
    pub w: ComplexMatrix,
    pub kappa: ComplexMatrix,
    pub b_labels: Vec<String>,
    /// `ω_i = λ_{perm[i]}`; `None` means `Ω = Λ`.
    pub spectrum_permutation: Option<Vec<usize>>,
}

impl ConstructionChoices {
    /// `W = κ = 1`, labels `0..n`, no permutation.
    pub fn identity(n: usize) -> Self {
        ConstructionChoices {
            w: identity(n),
            kappa: identity(n),
            b_labels: standard_labels(n),
            spectrum_permutation: None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (which, m) in [("w", &self.w), ("kappa", &self.kappa)] {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "{which} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let residual = crate::numerics::two_sided_unitarity_residual(m);
            if residual > ALGEBRAIC_TOL * n as f64 {
                return Err(Error::NotUnitaryChoice { which, residual });
            }
        }
        if self.b_labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} ancilla labels, expected {n}",
                self.b_labels.len()
            )));
        }
        if let Some(perm) = &self.spectrum_permutation {
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
                return Err(Error::InvalidArgument(format!(
                    "spectrum permutation {perm:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(())
    }
}

/// An operator pair meant to satisfy `Θ_B S = S Θ_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenoperatorPair {
    pub theta_a: ComplexMatrix,
    pub theta_b: ComplexMatrix,
}

impl EigenoperatorPair {
    /// Requires equal dimensions and equal spectra (as multisets, within
    /// `1e-9` relative to the larger norm).
    pub fn new(theta_a: ComplexMatrix, theta_b: ComplexMatrix) -> Result<Self> {
        let n = ensure_square(&theta_a)?;
        if theta_b.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "theta_b is {}x{}, theta_a is {n}x{n}",
                theta_b.nrows(),
                theta_b.ncols()
            )));
        }
        let sa = eig_normal(&theta_a)?;
        let sb = eig_normal(&theta_b)?;
        let scale = theta_a.norm().max(theta_b.norm()).max(1.0);
        if !spectra_match(&sa.eigenvalues, &sb.eigenvalues, 1e-9 * scale) {
            return Err(Error::InvalidArgument("theta_a and theta_b have different spectra".into()));
        }
        Ok(EigenoperatorPair { theta_a, theta_b })
    }

    pub fn residual(&self, stator: &Stator) -> Result<f64> {
        stator.eigenop_residual(&self.theta_a, &self.theta_b)
    }
}

/// Multiset equality of two eigenvalue lists within `tol`, by greedy
/// nearest matching.
pub fn spectra_match(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((k, d)) if d <= tol => used[k] = true,
            _ => return false,
        }
    }
    true
}

/// Builds a minimal stator (`N_B = N_A`) with `Θ_B S = S Θ_A` for a normal
/// `Θ_A`. Returns the stator and `Θ_B`.
pub fn construct_stator(
    theta_a: &ComplexMatrix,
    choices: &ConstructionChoices,
) -> Result<(Stator, ComplexMatrix)> {
    let spectrum = eig_normal(theta_a)?;
    construct_from_spectrum(&spectrum, choices)
}

/// The construction driven directly by an eigendecomposition `Θ_A = V Λ V†`.
///
/// With `p` the spectrum permutation, the blocks in the eigenbasis are
/// `K_j = Σ_α κ_{αj} |α><p(j)|`, which satisfy `K_j Λ = λ_{p(j)} K_j`. They
/// are mixed as `N_i = Σ_j W_ij K_j` and rotated back to
/// `M_i = V N_i V†`, while `Θ_B = W diag(λ_{p(j)}) W†`. The Kraus operators
/// depend only on `V`, `W` and `κ`, never on the eigenvalues.
pub fn construct_from_spectrum(
    spectrum: &Spectrum,
    choices: &ConstructionChoices,
) -> Result<(Stator, ComplexMatrix)> {
    let n = spectrum.dim();
    let v = &spectrum.eigenvectors;
    if v.shape() != (n, n) {
        return Err(Error::DimensionMismatch("eigenvector matrix does not match the spectrum".into()));
    }
    choices.validate(n)?;
    let perm: Vec<usize> = choices
        .spectrum_permutation
        .clone()
        .unwrap_or_else(|| (0..n).collect());

    let vh = v.adjoint();
    let kraus = (0..n)
        .map(|i| {
            let mut mixed = ComplexMatrix::zeros(n, n);
            for j in 0..n {
                let w = choices.w[(i, j)];
                for alpha in 0..n {
                    mixed[(alpha, perm[j])] += w * choices.kappa[(alpha, j)];
                }
            }
            v * mixed * &vh
        })
        .collect();

    let omega: Vec<C64> = perm.iter().map(|&p| spectrum.eigenvalues[p]).collect();
    let theta_b = &choices.w * crate::numerics::diag(&omega) * choices.w.adjoint();
    let stator = Stator {
        dim_a: n,
        b_labels: choices.b_labels.clone(),
        kraus,
    };
    Ok((stator, theta_b))
}

/// A `(Θ_A, Θ_B)` pair certified for the group-element stator, tagged by
/// the irrep index and matrix position it came from.
#[derive(Clone, Debug)]
pub struct CertifiedPair {
    pub irrep: usize,
    pub m: usize,
    pub n: usize,
    /// `U^j_{mn}`, used on both sides.
    pub operator: ComplexMatrix,
}

/// `S = Σ_g |g><g| ⊗ |g>` together with every pair `(U^j_mn, U^j_mn)` it
/// intertwines.
pub fn group_element_stator(set: &IrrepSet) -> (Stator, Vec<CertifiedPair>) {
    let order = set.order();
    let kraus = (0..order)
        .map(|g| {
            let mut p = ComplexMatrix::zeros(order, order);
            p[(g, g)] = C64::new(1.0, 0.0);
            p
        })
        .collect();
    let stator = Stator {
        dim_a: order,
        b_labels: set.group().elements().to_vec(),
        kraus,
    };
    let pairs = set
        .rep_basis()
        .into_iter()
        .map(|(j, m, n)| CertifiedPair {
            irrep: j,
            m,
            n,
            operator: set.rep_operator(j, m, n).expect("indices come from rep_basis"),
        })
        .collect();
    (stator, pairs)
}

/// The group-element stator written in the representation basis of the
/// ancilla: `M_{jmm'} = sqrt(dim(j)/|G|) (U^j_{mm'})†`.
pub fn rep_basis_kraus(set: &IrrepSet) -> Stator {
    let order = set.order();
    let kraus = set
        .rep_basis()
        .into_iter()
        .map(|(j, m, n)| {
            let weight = (set.irreps()[j].dim as f64 / order as f64).sqrt();
            set.rep_operator(j, m, n).expect("indices come from rep_basis").adjoint() * C64::new(weight, 0.0)
        })
        .collect();
    Stator {
        dim_a: order,
        b_labels: set.rep_basis_labels(),
        kraus,
    }
}

/// `(1/√N) Σ_m Q^m ⊗ |m>` with the shift `Q|m> = |m−1>`, the cyclic stator
/// written in the basis where `Q` is not diagonal. Satisfies
/// `Q_B S = S Q_A`.
pub fn cyclic_shift_stator(n: usize) -> Stator {
    let q = shift_operator(n);
    let weight = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut power = identity(n);
    let mut kraus = Vec::with_capacity(n);
    for _ in 0..n {
        kraus.push(&power * weight);
        power = &power * &q;
    }
    Stator {
        dim_a: n,
        b_labels: standard_labels(n),
        kraus,
    }
}

/// `Q|m> = |m−1 mod n>`.
pub fn shift_operator(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, k| {
        if (r + 1) % n == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    })
}

/// The two-level stator `(1_A ⊗ |0> + σ_A ⊗ |1>)/√2` for an involution `σ`.
pub fn spin_half_stator(sigma: &ComplexMatrix) -> Result<Stator> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let n = ensure_square(sigma)?;
    Stator::from_kraus(vec![identity(n) * h, sigma * h], standard_labels(2))
}
