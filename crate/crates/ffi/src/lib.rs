//! C ABI for statorforge.
//!
//! Objects cross the boundary as opaque handles (`SfMatrix`, `SfStator`,
//! `SfGroup`) that the caller releases with the matching `*_free` function.
//! Every fallible function returns an `SfStatus`; on failure the message is
//! available from `sf_last_error_message` on the same thread. Matrices are
//! passed as separate row-major real and imaginary `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use statorforge::dynamics::Entanglers;
use statorforge::groups::{builtin_irrep_set, IrrepSet};
use statorforge::io::{MatrixJson, StatorJson};
use statorforge::manybody::plaquette_demo;
use statorforge::numerics::{basis_vector, ComplexMatrix, ComplexVector, C64};
use statorforge::stator::{construct_stator, group_element_stator, standard_labels, ConstructionChoices, Stator};
use statorforge::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotSquare = 3,
    NotNormal = 4,
    NotHermitian = 5,
    NotUnitary = 6,
    NotIsometry = 7,
    DimensionMismatch = 8,
    NonFinite = 9,
    InvalidTable = 10,
    UnknownBuiltin = 11,
    IncompleteIrreps = 12,
    UnknownIrrep = 13,
    IndexOutOfRange = 14,
    IncompleteKraus = 15,
    NotUnitaryChoice = 16,
    NotUnitaryElement = 17,
    NotNormalized = 18,
    ZeroKraus = 19,
    NotProportionalToUnitary = 20,
    MismatchedAncilla = 21,
    TooLarge = 22,
    Parse = 23,
    Io = 24,
    Panic = 25,
}

impl From<&Error> for SfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotSquare { .. } => SfStatus::NotSquare,
            Error::NotNormal { .. } => SfStatus::NotNormal,
            Error::NotHermitian { .. } => SfStatus::NotHermitian,
            Error::NotUnitary { .. } => SfStatus::NotUnitary,
            Error::NotIsometry { .. } => SfStatus::NotIsometry,
            Error::DimensionMismatch(_) => SfStatus::DimensionMismatch,
            Error::NonFinite => SfStatus::NonFinite,
            Error::InvalidTable(_) => SfStatus::InvalidTable,
            Error::UnknownBuiltin(_) => SfStatus::UnknownBuiltin,
            Error::IncompleteIrreps(_) => SfStatus::IncompleteIrreps,
            Error::UnknownIrrep(_) => SfStatus::UnknownIrrep,
            Error::IndexOutOfRange(_) => SfStatus::IndexOutOfRange,
            Error::IncompleteKraus { .. } => SfStatus::IncompleteKraus,
            Error::NotUnitaryChoice { .. } => SfStatus::NotUnitaryChoice,
            Error::NotUnitaryElement { .. } => SfStatus::NotUnitaryElement,
            Error::NotNormalized { .. } => SfStatus::NotNormalized,
            Error::ZeroKraus(_) => SfStatus::ZeroKraus,
            Error::NotProportionalToUnitary { .. } => SfStatus::NotProportionalToUnitary,
            Error::MismatchedAncilla(_) => SfStatus::MismatchedAncilla,
            Error::TooLarge(_) => SfStatus::TooLarge,
            Error::InvalidArgument(_) => SfStatus::InvalidArgument,
            Error::Parse(_) => SfStatus::Parse,
            Error::Io(_) => SfStatus::Io,
        }
    }
}

/// A dense complex matrix.
pub struct SfMatrix(ComplexMatrix);

/// A stator (Kraus operators with ancilla labels).
pub struct SfStator(Stator);

/// A finite group with its irreps.
pub struct SfGroup(IrrepSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(SfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(SfStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SfStatus::NullPointer, format!("NullPointer: {what} is null"))
}

fn invalid(message: String) -> Failure {
    Failure(SfStatus::InvalidArgument, format!("InvalidArgument: {message}"))
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            SfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("Panic: internal failure".into());
            SfStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn read_complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<C64>, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = unsafe { std::slice::from_raw_parts(re, len) };
    let im = if im.is_null() { None } else { Some(unsafe { std::slice::from_raw_parts(im, len) }) };
    Ok((0..len)
        .map(|k| C64::new(re[k], im.map_or(0.0, |v| v[k])))
        .collect())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn string_out(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| invalid("output contains a NUL byte".into()))
}

/// Returns the message of the last failed call on this thread, or NULL.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Creates a `rows × cols` matrix from row-major arrays of length
/// `rows·cols`. `im` may be NULL for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-NULL) must point to `rows·cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_new(
    rows: usize,
    cols: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SfMatrix,
) -> SfStatus {
    guard(|| {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("matrix shape {rows}x{cols} is empty")));
        }
        let len = rows.checked_mul(cols).ok_or_else(|| invalid("matrix too large".into()))?;
        let values = unsafe { read_complex(re, im, len) }?;
        let m = ComplexMatrix::from_row_slice(rows, cols, &values);
        statorforge::numerics::ensure_finite(&m)?;
        unsafe { write_out(out, boxed(SfMatrix(m)), "out") }
    })
}

/// Parses a matrix from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_from_json(json: *const c_char, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let text = unsafe { read_str(json, "json") }?;
        let parsed: MatrixJson = serde_json::from_str(text).map_err(Error::from)?;
        let m = ComplexMatrix::try_from(&parsed)?;
        unsafe { write_out(out, boxed(SfMatrix(m)), "out") }
    })
}

/// Serializes a matrix to JSON. Free the result with `sf_string_free`.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_to_json(m: *const SfMatrix, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let m = unsafe { borrow(m, "m") }?;
        let text = serde_json::to_string(&MatrixJson::from(&m.0)).map_err(Error::from)?;
        unsafe { write_out(out, string_out(text)?, "out") }
    })
}

/// # Safety
/// `m` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_free(m: *mut SfMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Number of rows, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_rows(m: *const SfMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.nrows())
}

/// Number of columns, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_cols(m: *const SfMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.ncols())
}

/// Copies the entries row-major into `re` and `im`, each of length `len`,
/// which must equal `rows·cols`.
///
/// # Safety
/// `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_copy(m: *const SfMatrix, re: *mut f64, im: *mut f64, len: usize) -> SfStatus {
    guard(|| {
        let m = unsafe { borrow(m, "m") }?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let (rows, cols) = m.0.shape();
        if len != rows * cols {
            return Err(Failure(
                SfStatus::DimensionMismatch,
                format!("DimensionMismatch: buffer length {len}, matrix has {} entries", rows * cols),
            ));
        }
        let re = unsafe { std::slice::from_raw_parts_mut(re, len) };
        let im = unsafe { std::slice::from_raw_parts_mut(im, len) };
        for r in 0..rows {
            for c in 0..cols {
                re[r * cols + c] = m.0[(r, c)].re;
                im[r * cols + c] = m.0[(r, c)].im;
            }
        }
        Ok(())
    })
}

/// Builds a stator for a normal `theta_a`. `w` and `kappa` may be NULL for
/// identity choices. Writes the stator and `Θ_B`.
///
/// # Safety
/// Handles must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_construct(
    theta_a: *const SfMatrix,
    w: *const SfMatrix,
    kappa: *const SfMatrix,
    out_stator: *mut *mut SfStator,
    out_theta_b: *mut *mut SfMatrix,
) -> SfStatus {
    guard(|| {
        let theta_a = unsafe { borrow(theta_a, "theta_a") }?;
        if out_stator.is_null() || out_theta_b.is_null() {
            return Err(null("output"));
        }
        let n = theta_a.0.nrows();
        let mut choices = ConstructionChoices::identity(n);
        if let Some(w) = unsafe { w.as_ref() } {
            choices.w = w.0.clone();
        }
        if let Some(kappa) = unsafe { kappa.as_ref() } {
            choices.kappa = kappa.0.clone();
        }
        let (stator, theta_b) = construct_stator(&theta_a.0, &choices)?;
        unsafe {
            write_out(out_stator, boxed(SfStator(stator)), "out_stator")?;
            write_out(out_theta_b, boxed(SfMatrix(theta_b)), "out_theta_b")
        }
    })
}

/// Parses a stator from JSON, checking completeness.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_from_json(json: *const c_char, out: *mut *mut SfStator) -> SfStatus {
    guard(|| {
        let text = unsafe { read_str(json, "json") }?;
        let parsed: StatorJson = serde_json::from_str(text).map_err(Error::from)?;
        let s = parsed.to_stator()?;
        unsafe { write_out(out, boxed(SfStator(s)), "out") }
    })
}

/// Serializes a stator to JSON. Free the result with `sf_string_free`.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_to_json(s: *const SfStator, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        let text = serde_json::to_string(&StatorJson::from(&s.0)).map_err(Error::from)?;
        unsafe { write_out(out, string_out(text)?, "out") }
    })
}

/// # Safety
/// `s` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_free(s: *mut SfStator) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// `N_A`, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_dim_a(s: *const SfStator) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.0.dim_a())
}

/// `N_B`, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_dim_b(s: *const SfStator) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.0.dim_b())
}

/// A copy of Kraus operator `index`.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_kraus(s: *const SfStator, index: usize, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        let m = s.0.kraus().get(index).ok_or_else(|| {
            Failure(
                SfStatus::IndexOutOfRange,
                format!("IndexOutOfRange: Kraus index {index} for {} operators", s.0.dim_b()),
            )
        })?;
        unsafe { write_out(out, boxed(SfMatrix(m.clone())), "out") }
    })
}

/// `‖Σ M†M − 1‖_F`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_completeness_residual(s: *const SfStator, out: *mut f64) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        unsafe { write_out(out, s.0.completeness_residual(), "out") }
    })
}

/// `max_i ‖Σ_j (Θ_B)_ij M_j − M_i Θ_A‖_F`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_eigenop_residual(
    s: *const SfStator,
    theta_a: *const SfMatrix,
    theta_b: *const SfMatrix,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        let a = unsafe { borrow(theta_a, "theta_a") }?;
        let b = unsafe { borrow(theta_b, "theta_b") }?;
        let r = s.0.eigenop_residual(&a.0, &b.0)?;
        unsafe { write_out(out, r, "out") }
    })
}

/// Rebases the ancilla by the unitary `c`; the new labels are `0..N_B`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_rebase(s: *const SfStator, c: *const SfMatrix, out: *mut *mut SfStator) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        let c = unsafe { borrow(c, "c") }?;
        let r = s.0.rebase_b(&c.0, standard_labels(s.0.dim_b()))?;
        unsafe { write_out(out, boxed(SfStator(r)), "out") }
    })
}

/// The unitary dilation `U_AB` with `U|ψ>|zero_index> = S|ψ>`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_stator_dilate(s: *const SfStator, zero_index: usize, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let s = unsafe { borrow(s, "s") }?;
        let u = s.0.dilate(zero_index)?;
        unsafe { write_out(out, boxed(SfMatrix(u)), "out") }
    })
}

/// A built-in group by name (`Z3`, `D4`, `S3`, `Q8`, …).
///
/// # Safety
/// `name` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_group_builtin(name: *const c_char, out: *mut *mut SfGroup) -> SfStatus {
    guard(|| {
        let name = unsafe { read_str(name, "name") }?;
        let set = builtin_irrep_set(name)?;
        unsafe { write_out(out, boxed(SfGroup(set)), "out") }
    })
}

/// # Safety
/// `g` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_group_free(g: *mut SfGroup) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// `|G|`, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_group_order(g: *const SfGroup) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.0.order())
}

/// The unitary Fourier matrix `F[g, (j,m,n)] = sqrt(d_j/|G|) D^j_mn(g)`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_group_fourier_matrix(g: *const SfGroup, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let g = unsafe { borrow(g, "g") }?;
        unsafe { write_out(out, boxed(SfMatrix(g.0.fourier_matrix())), "out") }
    })
}

/// The stator `Σ_g |g><g| ⊗ |g>`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_group_element_stator(g: *const SfGroup, out: *mut *mut SfStator) -> SfStatus {
    guard(|| {
        let g = unsafe { borrow(g, "g") }?;
        let (s, _) = group_element_stator(&g.0);
        unsafe { write_out(out, boxed(SfStator(s)), "out") }
    })
}

/// `<0_B| U† e^{−i H_B t} U |ψ>|0_B>` for a state given as arrays of length
/// `len`. Writes the output state into `out_re`/`out_im` (length `len`) and
/// the leaked weight into `out_leak`.
///
/// # Safety
/// Handles must be live; arrays must hold `len` doubles (`psi_im` may be
/// NULL for a real state).
#[no_mangle]
pub unsafe extern "C" fn sf_effective_evolve(
    u_ab: *const SfMatrix,
    h_b: *const SfMatrix,
    t: f64,
    psi_re: *const f64,
    psi_im: *const f64,
    len: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_leak: *mut f64,
) -> SfStatus {
    guard(|| {
        let u = unsafe { borrow(u_ab, "u_ab") }?;
        let h_b = unsafe { borrow(h_b, "h_b") }?;
        if out_re.is_null() || out_im.is_null() || out_leak.is_null() {
            return Err(null("output"));
        }
        let psi = ComplexVector::from_vec(unsafe { read_complex(psi_re, psi_im, len) }?);
        statorforge::numerics::ensure_hermitian(&h_b.0)?;
        let nb = h_b.0.nrows();
        let entanglers = Entanglers::new(vec![u.0.clone()], basis_vector(nb, 0))?;
        let result = entanglers.evolve(&h_b.0, t, &psi)?;
        let re = unsafe { std::slice::from_raw_parts_mut(out_re, len) };
        let im = unsafe { std::slice::from_raw_parts_mut(out_im, len) };
        for (k, z) in result.psi_out.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        unsafe { write_out(out_leak, result.leak, "out_leak") }
    })
}

/// Runs the `K`-site `σ_z^{⊗K}` demo and reports its worst deviation from
/// direct evolution, the worst leak, and whether the deviation is within
/// `tol`.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_plaquette_demo(
    k_sites: usize,
    coupling: f64,
    t: f64,
    tol: f64,
    out_deviation: *mut f64,
    out_leak: *mut f64,
    out_pass: *mut bool,
) -> SfStatus {
    guard(|| {
        if out_deviation.is_null() || out_leak.is_null() || out_pass.is_null() {
            return Err(null("output"));
        }
        let report = plaquette_demo(k_sites, coupling, t, tol)?;
        unsafe {
            write_out(out_deviation, report.deviation, "out_deviation")?;
            write_out(out_leak, report.leak, "out_leak")?;
            write_out(out_pass, report.pass, "out_pass")
        }
    })
}
