//! C ABI for the spatial-modulation performance library.
//!
//! The surface is a handle-based wrapper around the core crate: build an
//! opaque system description once, then query analytical bounds or run
//! Monte Carlo points against it. All functions return a status code;
//! outputs go through pointers supplied by the caller. Handles must be
//! released with [`smperf_system_free`].
//!
//! The matching header (`include/smperf.h`) is generated by cbindgen at
//! build time.

use std::ffi::{c_char, CStr};

use smperf::analysis::{abep_bound, BoundConfig, PrefactorMode};
use smperf::channel::{exponential_correlation, ChannelSpec};
use smperf::constellation::{build_constellation, Constellation};
use smperf::montecarlo::{simulate_point, StoppingRule};
use smperf::numerics::HermitianPsdMatrix;

/// Status codes returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmperfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NumericFailure = 4,
}

/// Spatial correlation model selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmperfCorrelation {
    None = 0,
    Exponential = 1,
}

/// Union-bound normalization selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmperfPrefactor {
    Paper = 0,
    Conventional = 1,
}

/// Result of one Monte Carlo BER point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SmperfSimResult {
    pub snr_db: f64,
    pub ber: f64,
    pub frames: u64,
    pub bit_errors: u64,
    /// Nonzero when the frame cap was hit without observing any error.
    pub below_resolution: u8,
}

/// Opaque system handle: channel description plus modulation alphabet.
pub struct SmperfSystem {
    spec: ChannelSpec,
    constellation: Constellation,
}

fn to_status<T>(r: smperf::Result<T>) -> Result<T, SmperfStatus> {
    r.map_err(|e| match e {
        smperf::Error::InvalidParameter { .. }
        | smperf::Error::UnsupportedConstellation { .. }
        | smperf::Error::IndexOutOfRange { .. }
        | smperf::Error::Dimension { .. }
        | smperf::Error::Config { .. }
        | smperf::Error::LabelLength { .. } => SmperfStatus::InvalidArgument,
        _ => SmperfStatus::NumericFailure,
    })
}

/// Build a system handle.
///
/// `constellation` is one of `bpsk`, `qpsk`, `qam8`, `qam16`, `qam32` or
/// `ssk`. `gamma_t` / `gamma_r` are ignored unless `correlation` is
/// exponential. On success `*out` owns the handle.
///
/// # Safety
///
/// `constellation` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn smperf_system_new(
    n_t: u32,
    n_r: u32,
    constellation: *const c_char,
    k_factor: f64,
    correlation: SmperfCorrelation,
    gamma_t: f64,
    gamma_r: f64,
    out: *mut *mut SmperfSystem,
) -> SmperfStatus {
    if constellation.is_null() || out.is_null() {
        return SmperfStatus::NullPointer;
    }
    let name = match CStr::from_ptr(constellation).to_str() {
        Ok(s) => s,
        Err(_) => return SmperfStatus::InvalidUtf8,
    };
    let cons = if name == "ssk" {
        Constellation::ssk()
    } else {
        match to_status(build_constellation(name)) {
            Ok(c) => c,
            Err(s) => return s,
        }
    };
    let (n_t, n_r) = (n_t as usize, n_r as usize);
    let spec = match correlation {
        SmperfCorrelation::None => to_status(ChannelSpec::uncorrelated(n_t, n_r, k_factor)),
        SmperfCorrelation::Exponential => to_status(exponential_correlation(n_t, gamma_t)).and_then(
            |sigma_t: HermitianPsdMatrix| {
                let sigma_r = to_status(exponential_correlation(n_r, gamma_r))?;
                to_status(ChannelSpec::new(n_t, n_r, k_factor, sigma_t, sigma_r))
            },
        ),
    };
    match spec {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(SmperfSystem { spec, constellation: cons }));
            SmperfStatus::Ok
        }
        Err(s) => s,
    }
}

/// Release a handle created by [`smperf_system_new`]. A null pointer is a
/// no-op.
///
/// # Safety
///
/// `system` must be null or a pointer previously returned by
/// [`smperf_system_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn smperf_system_free(system: *mut SmperfSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Analytical union bound on the average bit error probability at one SNR
/// point. Writes the raw bound and the value clipped to 1/2.
///
/// # Safety
///
/// `system`, `out_raw` and `out_clipped` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn smperf_abep_bound(
    system: *const SmperfSystem,
    snr_db: f64,
    quad_nodes: u32,
    prefactor: SmperfPrefactor,
    out_raw: *mut f64,
    out_clipped: *mut f64,
) -> SmperfStatus {
    if system.is_null() || out_raw.is_null() || out_clipped.is_null() {
        return SmperfStatus::NullPointer;
    }
    let system = &*system;
    let cfg = BoundConfig {
        quad_nodes: quad_nodes as usize,
        prefactor: match prefactor {
            SmperfPrefactor::Paper => PrefactorMode::Paper,
            SmperfPrefactor::Conventional => PrefactorMode::Conventional,
        },
    };
    let rho = 10f64.powf(snr_db / 10.0);
    match to_status(abep_bound(&system.spec, &system.constellation, rho, &cfg)) {
        Ok(bound) => {
            *out_raw = bound.raw;
            *out_clipped = bound.clipped;
            SmperfStatus::Ok
        }
        Err(s) => s,
    }
}

/// Monte Carlo BER at one SNR point, stopping at `min_bit_errors` observed
/// errors or `max_frames` simulated frames. Deterministic for a fixed seed
/// regardless of the caller's threading.
///
/// # Safety
///
/// `system` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn smperf_simulate_point(
    system: *const SmperfSystem,
    snr_db: f64,
    min_bit_errors: u64,
    max_frames: u64,
    seed: u64,
    out: *mut SmperfSimResult,
) -> SmperfStatus {
    if system.is_null() || out.is_null() {
        return SmperfStatus::NullPointer;
    }
    let system = &*system;
    let rule = StoppingRule { min_bit_errors, max_frames };
    match to_status(simulate_point(&system.spec, &system.constellation, snr_db, &rule, seed)) {
        Ok(point) => {
            *out = SmperfSimResult {
                snr_db: point.snr_db,
                ber: point.ber,
                frames: point.frames,
                bit_errors: point.bit_errors,
                below_resolution: point.below_resolution as u8,
            };
            SmperfStatus::Ok
        }
        Err(s) => s,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn smperf_status_message(status: SmperfStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        SmperfStatus::Ok => b"ok\0",
        SmperfStatus::NullPointer => b"null pointer argument\0",
        SmperfStatus::InvalidUtf8 => b"string argument is not valid UTF-8\0",
        SmperfStatus::InvalidArgument => b"invalid argument\0",
        SmperfStatus::NumericFailure => b"numeric failure\0",
    };
    msg.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    #[test]
    fn rejects_null_and_bad_names() {
        let mut handle: *mut SmperfSystem = ptr::null_mut();
        let status = unsafe {
            smperf_system_new(4, 4, ptr::null(), 0.0, SmperfCorrelation::None, 0.0, 0.0, &mut handle)
        };
        assert_eq!(status, SmperfStatus::NullPointer);

        let bad = CString::new("qam7").unwrap();
        let status = unsafe {
            smperf_system_new(4, 4, bad.as_ptr(), 0.0, SmperfCorrelation::None, 0.0, 0.0, &mut handle)
        };
        assert_eq!(status, SmperfStatus::InvalidArgument);

        let name = CString::new("bpsk").unwrap();
        let status = unsafe {
            smperf_system_new(4, 4, name.as_ptr(), -1.0, SmperfCorrelation::None, 0.0, 0.0, &mut handle)
        };
        assert_eq!(status, SmperfStatus::InvalidArgument);
    }

    #[test]
    fn status_messages_are_nul_terminated() {
        for status in [
            SmperfStatus::Ok,
            SmperfStatus::NullPointer,
            SmperfStatus::InvalidUtf8,
            SmperfStatus::InvalidArgument,
            SmperfStatus::NumericFailure,
        ] {
            let ptr = smperf_status_message(status);
            let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap();
            assert!(!s.is_empty());
        }
    }
}
