//! C ABI over the invariant-surface library: opaque handles, status codes,
//! out-pointers.  Every constructor has a matching `_free`; strings come
//! from `kl_poly_to_json` and go back through `kl_string_free`.

use std::ffi::CString;

use libc::c_char;

use koopman_lab::error::Error;
use koopman_lab::linflow::closed_form_flow3;
use koopman_lab::polynomials::{self, Box2, MultiPoly};
use koopman_lab::surface::{self, PieceId, SurfaceSpec};
use koopman_lab::symspace;
use koopman_lab::verify::{self, TamingPair, TurnCount};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RangeError = 3,
    NumericalFailure = 4,
}

fn status_of(err: &Error) -> KlStatus {
    match err {
        Error::ExpOutOfRange { .. } => KlStatus::RangeError,
        Error::NumericalFailure(_) | Error::DegenerateGram { .. } => KlStatus::NumericalFailure,
        _ => KlStatus::InvalidArgument,
    }
}

/// Opaque surface handle.
pub struct KlSurface(SurfaceSpec);

/// Opaque sparse-polynomial handle.
pub struct KlPoly(MultiPoly);

/// Classification returned by `kl_surface_membership`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlPieceKind {
    NotOnSurface = 0,
    Plane = 1,
    Bridge = 2,
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn kl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds the surface with `l` isolated equilibria and snake amplitude `a`.
///
/// # Safety
/// `out` must be a valid pointer; on `Ok` it receives a handle that must be
/// released with `kl_surface_free`.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_build(l: u32, a: f64, out: *mut *mut KlSurface) -> KlStatus {
    if out.is_null() {
        return KlStatus::NullPointer;
    }
    match surface::build_surface(l as usize, a) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(KlSurface(spec)));
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `s` must be a handle from `kl_surface_build`, not yet freed; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_free(s: *mut KlSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_equilibrium_count(
    s: *const KlSurface,
    out: *mut usize,
) -> KlStatus {
    if s.is_null() || out.is_null() {
        return KlStatus::NullPointer;
    }
    *out = (*s).0.l();
    KlStatus::Ok
}

/// Writes the equilibria as consecutive (x, y, z) triples.
///
/// # Safety
/// `out` must have room for `capacity` doubles; `written` receives the
/// number of doubles stored.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_equilibria(
    s: *const KlSurface,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> KlStatus {
    if s.is_null() || out.is_null() || written.is_null() {
        return KlStatus::NullPointer;
    }
    let points = surface::equilibria(&(*s).0);
    if capacity < 3 * points.len() {
        return KlStatus::InvalidArgument;
    }
    for (i, p) in points.iter().enumerate() {
        for (k, &coord) in p.iter().enumerate() {
            *out.add(3 * i + k) = coord;
        }
    }
    *written = 3 * points.len();
    KlStatus::Ok
}

/// Classifies an ambient point against the surface.
///
/// # Safety
/// All pointers must be valid; `out_index` receives the plane height k or
/// the bridge number j when the point is on the surface.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_membership(
    s: *const KlSurface,
    x: f64,
    y: f64,
    z: f64,
    tol: f64,
    out_kind: *mut KlPieceKind,
    out_index: *mut u32,
) -> KlStatus {
    if s.is_null() || out_kind.is_null() || out_index.is_null() {
        return KlStatus::NullPointer;
    }
    if !(tol > 0.0) {
        return KlStatus::InvalidArgument;
    }
    match surface::membership(&(*s).0, [x, y, z], tol) {
        Some(PieceId::Plane(k)) => {
            *out_kind = KlPieceKind::Plane;
            *out_index = k as u32;
        }
        Some(PieceId::Bridge(j)) => {
            *out_kind = KlPieceKind::Bridge;
            *out_index = j as u32;
        }
        None => {
            *out_kind = KlPieceKind::NotOnSurface;
            *out_index = 0;
        }
    }
    KlStatus::Ok
}

/// The snake displacement g(z) and its derivative.
///
/// # Safety
/// `s`, `out_g` and `out_g_prime` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kl_surface_snake(
    s: *const KlSurface,
    z: f64,
    out_g: *mut f64,
    out_g_prime: *mut f64,
) -> KlStatus {
    if s.is_null() || out_g.is_null() || out_g_prime.is_null() {
        return KlStatus::NullPointer;
    }
    *out_g = (*s).0.snake().g(z);
    *out_g_prime = (*s).0.snake().g_prime(z);
    KlStatus::Ok
}

/// Closed-form flow of the 3-D system: out = exp(A t) applied to xyz.
///
/// # Safety
/// `xyz` and `out` must point to at least 3 doubles each.
#[no_mangle]
pub unsafe extern "C" fn kl_closed_form_flow3(t: f64, xyz: *const f64, out: *mut f64) -> KlStatus {
    if xyz.is_null() || out.is_null() {
        return KlStatus::NullPointer;
    }
    let p = closed_form_flow3(t, [*xyz, *xyz.add(1), *xyz.add(2)]);
    for (k, &v) in p.iter().enumerate() {
        *out.add(k) = v;
    }
    KlStatus::Ok
}

unsafe fn poly_out(result: Result<MultiPoly, Error>, out: *mut *mut KlPoly) -> KlStatus {
    if out.is_null() {
        return KlStatus::NullPointer;
    }
    match result {
        Ok(p) => {
            *out = Box::into_raw(Box::new(KlPoly(p)));
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The section coordinate q(x, y, z) = y.
///
/// # Safety
/// `out` receives a handle that must be released with `kl_poly_free`.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_taming_q(out: *mut *mut KlPoly) -> KlStatus {
    poly_out(Ok(polynomials::taming_q()), out)
}

/// The weighted-height polynomial (1 + y^2)^(l-1) M z + x Pi(z).
///
/// # Safety
/// As for `kl_poly_taming_q`.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_taming_p(l: u32, m_const: f64, out: *mut *mut KlPoly) -> KlStatus {
    poly_out(polynomials::taming_p(l as usize, m_const), out)
}

/// The hand-picked degree-3 polynomial (z - 1/2)(x + (1 + y^2)).
///
/// # Safety
/// As for `kl_poly_taming_q`.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_example2_p(out: *mut *mut KlPoly) -> KlStatus {
    poly_out(Ok(polynomials::example2_p()), out)
}

/// The turn-level product Pi(z).
///
/// # Safety
/// As for `kl_poly_taming_q`.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_turn_product(l: u32, out: *mut *mut KlPoly) -> KlStatus {
    poly_out(polynomials::turn_product(l as usize), out)
}

/// # Safety
/// `p` must be a handle from one of the polynomial constructors; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_free(p: *mut KlPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Evaluates the polynomial at a point of length `len`.
///
/// # Safety
/// `point` must hold `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_eval(
    p: *const KlPoly,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> KlStatus {
    if p.is_null() || point.is_null() || out.is_null() {
        return KlStatus::NullPointer;
    }
    let coords = std::slice::from_raw_parts(point, len);
    match (*p).0.eval(coords) {
        Ok(v) => {
            *out = v;
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Total degree of the polynomial.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_degree(p: *const KlPoly, out: *mut u32) -> KlStatus {
    if p.is_null() || out.is_null() {
        return KlStatus::NullPointer;
    }
    *out = (*p).0.degree();
    KlStatus::Ok
}

/// Serializes the polynomial to its JSON form (graded-lex term order).
/// Returns null on failure; release with `kl_string_free`.
///
/// # Safety
/// `p` must be a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn kl_poly_to_json(p: *const KlPoly) -> *mut c_char {
    if p.is_null() {
        return std::ptr::null_mut();
    }
    let Ok(json) = serde_json::to_string(&(*p).0) else {
        return std::ptr::null_mut();
    };
    CString::new(json).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from `kl_poly_to_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// (1 + margin) times the maximum of |x Pi'(z)| over the box.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_compute_m(
    l: u32,
    x_lo: f64,
    x_hi: f64,
    z_lo: f64,
    z_hi: f64,
    margin: f64,
    out: *mut f64,
) -> KlStatus {
    if out.is_null() {
        return KlStatus::NullPointer;
    }
    let result = Box2::new(x_lo, x_hi, z_lo, z_hi)
        .and_then(|b| polynomials::compute_m(l as usize, &b, margin));
    match result {
        Ok(v) => {
            *out = v;
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Dimension of the degree-m polynomial space on n variables.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_basis_dim(n: u32, m: u32, out: *mut u64) -> KlStatus {
    if out.is_null() {
        return KlStatus::NullPointer;
    }
    match symspace::basis_dim(n as usize, m as usize) {
        Ok(dim) => {
            *out = dim as u64;
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Necessary degree condition for taming a snake with the given turns;
/// `infinite` overrides `turns`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_obstruction_check(
    turns: u64,
    infinite: bool,
    degree: u64,
    out: *mut bool,
) -> KlStatus {
    if out.is_null() {
        return KlStatus::NullPointer;
    }
    let count = if infinite { TurnCount::Infinite } else { TurnCount::Finite(turns) };
    *out = verify::obstruction_check(count, degree).taming_possible;
    KlStatus::Ok
}

/// Runs the monotone-and-onto taming sweep of `p` (with q = y) over the
/// given section heights.  `out_pass` receives the verdict, `out_margin`
/// the worst derivative margin measured along the traversals.
///
/// # Safety
/// `s` and `p` must be live handles; `y_grid` must hold `y_len` doubles;
/// `out_pass` and `out_margin` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_verify_taming(
    s: *const KlSurface,
    p: *const KlPoly,
    y_grid: *const f64,
    y_len: usize,
    margin: f64,
    out_pass: *mut bool,
    out_margin: *mut f64,
) -> KlStatus {
    if s.is_null() || p.is_null() || y_grid.is_null() || out_pass.is_null() || out_margin.is_null()
    {
        return KlStatus::NullPointer;
    }
    if y_len == 0 {
        return KlStatus::InvalidArgument;
    }
    let grid = std::slice::from_raw_parts(y_grid, y_len);
    let poly = (*p).0.clone();
    let degree = poly.degree().max(1) as usize;
    let pair = match TamingPair::new(polynomials::taming_q(), poly, degree) {
        Ok(pair) => pair,
        Err(e) => return status_of(&e),
    };
    match verify::verify_taming(&(*s).0, &pair, grid, margin) {
        Ok(report) => {
            *out_pass = report.pass;
            *out_margin = -report.worst_residual;
            KlStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
