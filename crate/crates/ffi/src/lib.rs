//! C interface to `mspec-core`.
//!
//! Every fallible function returns an [`MspecStatus`]. The message of the
//! last failure on the calling thread is available from
//! [`mspec_last_error_message`]. Configurations and spectra are opaque
//! handles owned by the caller and released with their `_free` function.

// `!(x >= 0.0)` rejects NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mspec_core::amplitudes::{phi_qed, phi_z, Kinematics};
use mspec_core::config::{self, Assignment};
use mspec_core::covariance::{verify_all, RngSeed};
use mspec_core::minkowski::{minkowski_dot, zeta, FourVector};
use mspec_core::spectrum::{find_peaks, integral_mass_spectrum, SpectrumCurve};
use mspec_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MspecStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Index = 3,
    Config = 4,
    Io = 5,
    Verification = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// A four-vector `(t, x, y, z)` in natural units.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MspecFourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<MspecFourVector> for FourVector {
    fn from(v: MspecFourVector) -> Self {
        FourVector::new(v.t, v.x, v.y, v.z)
    }
}

/// Incoming `p1, p2` and outgoing `p1_out, p2_out` momenta.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MspecKinematics {
    pub p1: MspecFourVector,
    pub p2: MspecFourVector,
    pub p1_out: MspecFourVector,
    pub p2_out: MspecFourVector,
}

impl From<&MspecKinematics> for Kinematics {
    fn from(k: &MspecKinematics) -> Self {
        Kinematics {
            p1: k.p1.into(),
            p2: k.p2.into(),
            p1_out: k.p1_out.into(),
            p2_out: k.p2_out.into(),
        }
    }
}

/// A located spectrum peak.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MspecPeak {
    pub mass: f64,
    pub height: f64,
    pub prominence: f64,
    pub index: usize,
}

/// Accumulated `key = value` assignments; opaque to C.
pub struct MspecConfig {
    assignments: Vec<Assignment>,
}

/// A computed spectrum; opaque to C.
pub struct MspecSpectrum {
    curve: SpectrumCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MspecStatus {
    match e {
        Error::Domain(_) => MspecStatus::Domain,
        Error::Index(_) => MspecStatus::Index,
        Error::Config(_) => MspecStatus::Config,
        Error::Io(_) => MspecStatus::Io,
        Error::Verification(_) => MspecStatus::Verification,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (MspecStatus, String)>) -> MspecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MspecStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MspecStatus::Internal
        }
    }
}

fn core_err(e: Error) -> (MspecStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MspecStatus, String) {
    (MspecStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read<'a, T>(p: *const T, what: &str) -> Result<&'a T, (MspecStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), (MspecStatus, String)> {
    match p.as_mut() {
        Some(slot) => {
            *slot = v;
            Ok(())
        }
        None => Err(null(what)),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MspecStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MspecStatus::Config, format!("{what} is not valid UTF-8")))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mspec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mspec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Minkowski product with signature `(+,-,-,-)`.
///
/// # Safety
/// `a`, `b` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn mspec_minkowski_dot(
    a: *const MspecFourVector,
    b: *const MspecFourVector,
    out: *mut f64,
) -> MspecStatus {
    guard(|| {
        let (a, b) = (read(a, "a")?, read(b, "b")?);
        write(out, minkowski_dot((*a).into(), (*b).into()), "out")
    })
}

/// Invariant mass `(p·p)^½` of a forward timelike vector.
///
/// # Safety
/// `p` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn mspec_zeta(p: *const MspecFourVector, out: *mut f64) -> MspecStatus {
    guard(|| {
        let p = read(p, "p")?;
        write(out, zeta((*p).into()).map_err(core_err)?, "out")
    })
}

/// Spin-averaged squared amplitude of `e⁺e⁻ → γ → l⁺l⁻`.
///
/// # Safety
/// `k` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn mspec_phi_qed(
    alpha: f64,
    m: f64,
    m_out: f64,
    k: *const MspecKinematics,
    out: *mut f64,
) -> MspecStatus {
    guard(|| {
        let k = read(k, "kinematics")?;
        write(out, phi_qed(alpha, m, m_out, &k.into()).map_err(core_err)?, "out")
    })
}

/// Spin-averaged squared amplitude of `e⁺e⁻ → Z⁰ → μ⁺μ⁻` for boson mass
/// `mass`.
///
/// # Safety
/// `k` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn mspec_phi_z(
    alpha_w: f64,
    mass: f64,
    m_e: f64,
    m_mu: f64,
    k: *const MspecKinematics,
    out: *mut f64,
) -> MspecStatus {
    guard(|| {
        let k = read(k, "kinematics")?;
        write(
            out,
            phi_z(alpha_w, mass, m_e, m_mu, &k.into()).map_err(core_err)?,
            "out",
        )
    })
}

/// A new empty configuration; defaults follow the first lepton listing
/// until keys say otherwise. Never null.
#[no_mangle]
pub extern "C" fn mspec_config_new() -> *mut MspecConfig {
    Box::into_raw(Box::new(MspecConfig {
        assignments: Vec::new(),
    }))
}

/// Appends `key = value`; `value` may be an expression over earlier keys.
/// Keys are checked when the spectrum is computed.
///
/// # Safety
/// `cfg` must come from [`mspec_config_new`]; strings must be
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mspec_config_set(
    cfg: *mut MspecConfig,
    key: *const c_char,
    value: *const c_char,
) -> MspecStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let line = format!("{} = {}", read_str(key, "key")?, read_str(value, "value")?);
        let a = config::parse_assignment(&line, "mspec_config_set").map_err(core_err)?;
        cfg.assignments.push(a);
        Ok(())
    })
}

/// Parses configuration text in the file format and appends its
/// assignments.
///
/// # Safety
/// `cfg` must come from [`mspec_config_new`]; `text` must be
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mspec_config_parse(cfg: *mut MspecConfig, text: *const c_char) -> MspecStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let mut a = config::parse_text(read_str(text, "text")?, "text").map_err(core_err)?;
        cfg.assignments.append(&mut a);
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`mspec_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mspec_config_free(cfg: *mut MspecConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Computes the spectrum for `cfg` with `threads` workers (0 for one per
/// core) and stores a new handle in `out`.
///
/// # Safety
/// `cfg` must come from [`mspec_config_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mspec_spectrum_compute(
    cfg: *const MspecConfig,
    threads: usize,
    out: *mut *mut MspecSpectrum,
) -> MspecStatus {
    guard(|| {
        let cfg = read(cfg, "cfg")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let run = config::build(&cfg.assignments, None).map_err(core_err)?;
        let curve = integral_mass_spectrum(&run.spec(), &run.quadrature, threads).map_err(core_err)?;
        *out = Box::into_raw(Box::new(MspecSpectrum { curve }));
        Ok(())
    })
}

/// Number of bins, 0 for a null handle.
///
/// # Safety
/// `s` must come from [`mspec_spectrum_compute`] or be null.
#[no_mangle]
pub unsafe extern "C" fn mspec_spectrum_len(s: *const MspecSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.curve.bins.len())
}

/// Bin center and density of bin `i`.
///
/// # Safety
/// `s` must come from [`mspec_spectrum_compute`]; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn mspec_spectrum_bin(
    s: *const MspecSpectrum,
    i: usize,
    mass: *mut f64,
    density: *mut f64,
) -> MspecStatus {
    guard(|| {
        let s = read(s, "spectrum")?;
        let &(m, d) = s.curve.bins.get(i).ok_or_else(|| {
            (
                MspecStatus::Index,
                format!("bin {i} out of range 0..{}", s.curve.bins.len()),
            )
        })?;
        write(mass, m, "mass")?;
        write(density, d, "density")
    })
}

/// Writes up to `capacity` peaks, tallest first, into `peaks` and the total
/// number found into `count`. `peaks` may be null when `capacity` is 0.
///
/// # Safety
/// `s` must come from [`mspec_spectrum_compute`]; `peaks` must hold
/// `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn mspec_spectrum_peaks(
    s: *const MspecSpectrum,
    min_prominence: f64,
    peaks: *mut MspecPeak,
    capacity: usize,
    count: *mut usize,
) -> MspecStatus {
    guard(|| {
        let s = read(s, "spectrum")?;
        if !(min_prominence >= 0.0) {
            return Err((MspecStatus::Domain, "min_prominence must be non-negative".into()));
        }
        if peaks.is_null() && capacity > 0 {
            return Err(null("peaks"));
        }
        let found = find_peaks(&s.curve, min_prominence);
        for (i, p) in found.iter().take(capacity).enumerate() {
            *peaks.add(i) = MspecPeak {
                mass: p.mass,
                height: p.height,
                prominence: p.prominence,
                index: p.index,
            };
        }
        write(count, found.len(), "count")
    })
}

/// # Safety
/// `s` must come from [`mspec_spectrum_compute`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mspec_spectrum_free(s: *mut MspecSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs the seeded covariance checks. Stores the largest residual in
/// `max_residual` (when non-null) and returns
/// [`MspecStatus::Verification`] if any check fails.
///
/// # Safety
/// `max_residual` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mspec_verify(seed: u64, trials: usize, max_residual: *mut f64) -> MspecStatus {
    guard(|| {
        let reports = verify_all(RngSeed(seed), trials.max(1));
        let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
        if let Some(slot) = max_residual.as_mut() {
            *slot = worst;
        }
        match reports.iter().find(|r| !r.passed()) {
            Some(r) => Err((
                MspecStatus::Verification,
                format!("{} failed, max residual {:e}", r.name, r.max_residual),
            )),
            None => Ok(()),
        }
    })
}
