//! Dense complex linear algebra: normal-matrix diagonalization, the Hermitian
//! matrix exponential, tensor products and isometry completion.
//!
//! Matrices are plain `nalgebra` dynamic matrices over `Complex64`. Composite
//! spaces use A-major indexing: the index of `|a>|b>` is `a * dim_b + b`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default tolerance for verification-style checks (relative Frobenius).
pub const VERIFY_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities that should hold to rounding.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Relative gap below which two eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Residual norm below which a standard basis vector is skipped during
/// unitary completion.
pub const COMPLETION_SKIP: f64 = 1e-10;

// Weight of the anti-Hermitian part in the mixed Hermitian operator used to
// diagonalize a normal matrix. Any irrational value works.
const MIX: f64 = 0.618_033_988_749_894_8;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `|i>` in an `n`-dimensional space.
pub fn basis_vector(n: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |r, k| C64::new(entries[r * cols + k], 0.0))
}

pub fn diag(values: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(values))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `‖m m† − m† m‖_F`.
pub fn normality_residual(m: &ComplexMatrix) -> f64 {
    let mh = m.adjoint();
    (m * &mh - &mh * m).norm()
}

/// `‖m − m†‖_F`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖m† m − 1‖_F`; for a non-square `m` this is the isometry residual.
pub fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    (m.adjoint() * m - identity(m.ncols())).norm()
}

/// Unitarity residual including `‖m m† − 1‖_F`, so it also rejects
/// non-square isometries.
pub fn two_sided_unitarity_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let left = unitarity_residual(m);
    let right = (m * m.adjoint() - identity(m.nrows())).norm();
    left.max(right)
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    Ok(m.nrows())
}

/// Checks `‖h − h†‖_F ≤ ALGEBRAIC_TOL·‖h‖_F`.
pub fn ensure_hermitian(h: &ComplexMatrix) -> Result<()> {
    ensure_square(h)?;
    ensure_finite(h)?;
    let residual = hermiticity_residual(h);
    let bound = ALGEBRAIC_TOL * h.norm();
    if residual > bound {
        return Err(Error::NotHermitian { residual, bound });
    }
    Ok(())
}

/// Checks two-sided unitarity within `tol` (absolute Frobenius).
pub fn ensure_unitary(m: &ComplexMatrix, what: &str, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let residual = two_sided_unitarity_residual(m);
    if residual > tol {
        return Err(Error::NotUnitary {
            what: what.to_string(),
            residual,
            bound: tol,
        });
    }
    Ok(())
}

/// Eigendecomposition `m = V diag(λ) V†` of a normal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.function(|l| l)
    }

    /// `V diag(f(λ)) V†`.
    pub fn function(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let values: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = ComplexMatrix::from_fn(v.nrows(), v.ncols(), |r, k| v[(r, k)] * values[k]);
        scaled * v.adjoint()
    }

    /// Same eigenvectors, eigenvalues replaced by `f(λ)`.
    pub fn map_eigenvalues(&self, f: impl Fn(C64) -> C64) -> Spectrum {
        Spectrum {
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// Diagonalizes a normal matrix.
///
/// Eigenvalues come out sorted ascending by real part; real parts within the
/// degeneracy tolerance are ordered by imaginary part. Degenerate eigenspaces
/// get a canonical basis that depends only on the subspace, and every
/// eigenvector is phased so its largest entry (lowest index on ties) is real
/// positive.
pub fn eig_normal(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let scale = m.norm();
    let residual = normality_residual(m);
    let bound = ALGEBRAIC_TOL * scale * scale;
    if residual > bound {
        return Err(Error::NotNormal { residual, bound });
    }
    if scale == 0.0 {
        return Ok(Spectrum {
            eigenvalues: vec![C64::new(0.0, 0.0); n],
            eigenvectors: identity(n),
        });
    }

    // m = A + iB with commuting Hermitian A, B.
    let mh = m.adjoint();
    let herm = (m + &mh) * c(0.5, 0.0);
    let anti = (m - &mh) * c(0.0, -0.5);
    let mixed = &herm + &anti * c(MIX, 0.0);
    let tol = DEGENERACY_TOL * scale;

    let (mixed_vals, mut basis) = hermitian_eigh(&mixed);
    // A cluster of the mixed operator can still merge distinct eigenvalues
    // by coincidence; splitting it by the Hermitian part resolves that.
    for range in clusters(&mixed_vals, tol) {
        if range.len() < 2 {
            continue;
        }
        let sub = basis.columns(range.start, range.len()).into_owned();
        let projected = sub.adjoint() * &herm * &sub;
        let (_, rot) = hermitian_eigh(&projected);
        basis
            .columns_mut(range.start, range.len())
            .copy_from(&(sub * rot));
    }

    let raw: Vec<C64> = (0..n)
        .map(|k| {
            let v = basis.column(k).into_owned();
            C64::new(rayleigh(&herm, &v), rayleigh(&anti, &v))
        })
        .collect();

    let order = spectral_order(&raw, tol);
    let eigenvalues: Vec<C64> = order.iter().map(|&k| raw[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &basis.column(src));
    }

    for range in degenerate_runs(&eigenvalues, tol) {
        if range.len() < 2 {
            continue;
        }
        let sub = eigenvectors.columns(range.start, range.len()).into_owned();
        let canon = canonical_subspace_basis(&sub);
        eigenvectors
            .columns_mut(range.start, range.len())
            .copy_from(&canon);
    }
    for k in 0..n {
        let mut v = eigenvectors.column(k).into_owned();
        fix_phase(&mut v);
        eigenvectors.set_column(k, &v);
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `e^{-i h t}` for Hermitian `h`, computed as `V diag(e^{-iλt}) V†`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ensure_hermitian(h)?;
    if t == 0.0 {
        return Ok(identity(h.nrows()));
    }
    let spectrum = eig_normal(h)?;
    Ok(spectrum.function(|l| C64::from_polar(1.0, -l.re * t)))
}

/// Tensor product with A-major composite indexing.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Tensor product of several factors, leftmost factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// Extends an isometry to a square unitary.
///
/// The first `iso.ncols()` columns are copied verbatim. The remaining columns
/// come from Gram-Schmidt over the standard basis vectors in index order,
/// skipping any whose residual falls below [`COMPLETION_SKIP`]. Each accepted
/// vector is orthogonalized twice.
pub fn complete_isometry(iso: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = iso.shape();
    if cols == 0 || rows < cols {
        return Err(Error::DimensionMismatch(format!(
            "isometry must have rows >= cols > 0, got {rows}x{cols}"
        )));
    }
    ensure_finite(iso)?;
    let residual = unitarity_residual(iso);
    let bound = VERIFY_TOL * cols as f64;
    if residual > bound {
        return Err(Error::NotIsometry { residual, bound });
    }

    let mut out = ComplexMatrix::zeros(rows, rows);
    out.columns_mut(0, cols).copy_from(iso);
    let mut filled = cols;
    for k in 0..rows {
        if filled == rows {
            break;
        }
        let mut v = basis_vector(rows, k);
        orthogonalize(&mut v, &out, filled);
        let norm = v.norm();
        if norm <= COMPLETION_SKIP {
            continue;
        }
        v.unscale_mut(norm);
        orthogonalize(&mut v, &out, filled);
        let norm = v.norm();
        v.unscale_mut(norm);
        out.set_column(filled, &v);
        filled += 1;
    }
    if filled != rows {
        return Err(Error::NotIsometry {
            residual: f64::NAN,
            bound,
        });
    }
    Ok(out)
}

/// Unitary discrete Fourier matrix, `F[m, a] = e^{2πi m a / n} / √n`.
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |m, a| {
        let phase = 2.0 * std::f64::consts::PI * ((m * a) % n) as f64 / n as f64;
        C64::from_polar(norm, phase)
    })
}

/// Pauli matrices and the Hadamard gate.
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])
    }
}

/// Seeded random states, unitaries and Hermitian matrices.
pub mod random {
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::{C64, ComplexMatrix, ComplexVector};

    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
        DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
    }

    /// Normalized complex Gaussian vector.
    pub fn state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
        let v = ComplexVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        v.unscale(norm)
    }

    /// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
    pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
        let qr = gaussian_matrix(rng, n, n).qr();
        let r = qr.r();
        let mut q = qr.q();
        for k in 0..n {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            for z in q.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        q
    }

    pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
        let a = gaussian_matrix(rng, n, n);
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    /// `U diag(λ) U†` with Haar `U` and Gaussian complex `λ`.
    pub fn normal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
        let u = unitary(rng, n);
        let lambda: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        &u * super::diag(&lambda) * u.adjoint()
    }
}

fn rayleigh(h: &ComplexMatrix, v: &ComplexVector) -> f64 {
    v.dotc(&(h * v)).re
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
fn hermitian_eigh(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Maximal runs of a sorted sequence whose consecutive gaps are within `tol`.
fn clusters(sorted: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    runs(sorted.len(), |k| (sorted[k] - sorted[k - 1]).abs() <= tol)
}

fn degenerate_runs(values: &[C64], tol: f64) -> Vec<std::ops::Range<usize>> {
    runs(values.len(), |k| (values[k] - values[k - 1]).norm() <= tol)
}

fn runs(n: usize, joined: impl Fn(usize) -> bool) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || !joined(k) {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Ascending by real part; chains of real parts within `tol` are then ordered
/// by imaginary part.
fn spectral_order(values: &[C64], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let re: Vec<f64> = idx.iter().map(|&k| values[k].re).collect();
    for range in clusters(&re, tol) {
        idx[range].sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
    }
    idx
}

/// Orthonormal basis of span(sub) obtained by projecting standard basis
/// vectors, greedily taking the largest residual (lowest index on ties).
fn canonical_subspace_basis(sub: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = sub.shape();
    let mut residual = sub * sub.adjoint();
    let mut out = ComplexMatrix::zeros(n, k);
    for step in 0..k {
        let norms: Vec<f64> = (0..n).map(|i| residual.column(i).norm()).collect();
        let best = norms.iter().cloned().fold(0.0_f64, f64::max);
        let pick = norms
            .iter()
            .position(|&x| x >= best - 1e-12)
            .unwrap_or(0);
        let mut q = residual.column(pick).into_owned();
        q.unscale_mut(norms[pick]);
        orthogonalize(&mut q, &out, step);
        let norm = q.norm();
        q.unscale_mut(norm);
        let proj = &q * (q.adjoint() * &residual);
        residual -= proj;
        out.set_column(step, &q);
    }
    out
}

/// Removes from `v` its components along the first `count` columns of `q`.
fn orthogonalize(v: &mut ComplexVector, q: &ComplexMatrix, count: usize) {
    for j in 0..count {
        let col = q.column(j);
        let overlap = col.dotc(v);
        v.axpy(-overlap, &col, C64::new(1.0, 0.0));
    }
}

fn fix_phase(v: &mut ComplexVector) {
    let best = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if best == 0.0 {
        return;
    }
    let pick = v.iter().position(|z| z.norm() >= best - 1e-12).unwrap_or(0);
    let lead = v[pick];
    let phase = lead.conj() / lead.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pick] = C64::new(lead.norm(), 0.0);
}
