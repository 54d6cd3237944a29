//! C ABI for `retfields`.
//!
//! Trajectories are opaque [`RfTrajectory`] handles created by
//! [`rf_trajectory_from_json`] and released with [`rf_trajectory_free`]. Every
//! function returns an [`RfStatus`]; on failure a description is available from
//! [`rf_last_error_message`] on the same thread until the next call. Strings
//! returned through out-parameters are owned by the caller and released with
//! [`rf_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use retfields::trajectory::{boost_trajectory, BoostWindow};
use retfields::{electrodynamics, fields, retarded, Boost, Error, FieldPoint, Formulation, Trajectory, Vec3};

/// Opaque trajectory handle.
pub struct RfTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidTrajectory = 4,
    InvalidArgument = 5,
    NotAdmissible = 6,
    OutsideG = 7,
    IterationLimit = 8,
    ChartDomain = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RfVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Fundamental fields at an event.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RfFundamental {
    pub tau: f64,
    pub delay: f64,
    pub r12: RfVec3,
    pub e: RfVec3,
    pub v: RfVec3,
    pub a: RfVec3,
    pub u: f64,
    pub z: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RfEmFields {
    pub e_field: RfVec3,
    pub b_field: RfVec3,
    pub a_potential: RfVec3,
    pub phi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RfRetarded {
    pub tau: f64,
    pub delay: f64,
    pub iterations: u64,
    pub certified_error: f64,
    pub speed_bound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RfAdmissibility {
    pub stop_time: f64,
    pub speed_bound: f64,
    pub accel_bound: f64,
    pub admissible: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfFormulation {
    Feynman = 0,
    Explicit = 1,
    Potentials = 2,
}

impl From<RfVec3> for Vec3 {
    fn from(v: RfVec3) -> Self {
        Vec3::new(v.x, v.y, v.z)
    }
}

impl From<Vec3> for RfVec3 {
    fn from(v: Vec3) -> Self {
        RfVec3 { x: v.x, y: v.y, z: v.z }
    }
}

impl From<RfFormulation> for Formulation {
    fn from(f: RfFormulation) -> Self {
        match f {
            RfFormulation::Feynman => Formulation::Feynman,
            RfFormulation::Explicit => Formulation::Explicit,
            RfFormulation::Potentials => Formulation::Potentials,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(RfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config { .. } => RfStatus::Config,
            Error::InvalidTrajectory { .. } => RfStatus::InvalidTrajectory,
            Error::InvalidArgument { .. } => RfStatus::InvalidArgument,
            Error::NotAdmissible { .. } => RfStatus::NotAdmissible,
            Error::OutsideG { .. } => RfStatus::OutsideG,
            Error::IterationLimit { .. } => RfStatus::IterationLimit,
            Error::ChartDomain { .. } => RfStatus::ChartDomain,
            Error::Io { .. } => RfStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(RfStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RfStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {message}"));
            RfStatus::Panic
        }
    }
}

unsafe fn traj_ref<'a>(traj: *const RfTrajectory) -> Result<&'a Trajectory, Failure> {
    traj.as_ref().map(|t| &t.0).ok_or_else(|| null("traj"))
}

fn need<T>(out: *mut T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        Err(null(name))
    } else {
        Ok(())
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn point(r1: RfVec3, t: f64) -> FieldPoint {
    FieldPoint::new(r1.into(), t)
}

/// Message describing the last failure on this thread; empty after success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a JSON trajectory config into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_from_json(json: *const c_char, out: *mut *mut RfTrajectory) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(RfStatus::InvalidUtf8, e.to_string()))?;
        let traj = Trajectory::from_json(text)?;
        write(out, "out", Box::into_raw(Box::new(RfTrajectory(traj))))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `traj` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_free(traj: *mut RfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Serialises a trajectory back to its JSON config; free the result with [`rf_string_free`].
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_to_json(traj: *const RfTrajectory, out: *mut *mut c_char) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let json = traj_ref(traj)?.to_config().to_json_pretty();
        let c = CString::new(json).map_err(|e| Failure(RfStatus::InvalidUtf8, e.to_string()))?;
        write(out, "out", c.into_raw())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Position, velocity and acceleration at time `t`. Any out-pointer may be null.
///
/// # Safety
/// `traj` must be a valid handle; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_eval(
    traj: *const RfTrajectory,
    t: f64,
    position: *mut RfVec3,
    velocity: *mut RfVec3,
    acceleration: *mut RfVec3,
) -> RfStatus {
    guard(|| {
        let traj = traj_ref(traj)?;
        let k = traj.eval(t, 2)?;
        for (out, v) in [position, velocity, acceleration].into_iter().zip(k) {
            if !out.is_null() {
                out.write(v.into());
            }
        }
        Ok(())
    })
}

/// Speed and acceleration bounds on `(−∞, stop_time]`.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_check_admissible(
    traj: *const RfTrajectory,
    stop_time: f64,
    out: *mut RfAdmissibility,
) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let r = traj_ref(traj)?.check_admissible(stop_time);
        write(
            out,
            "out",
            RfAdmissibility {
                stop_time: r.stop_time,
                speed_bound: r.speed_bound,
                accel_bound: r.accel_bound,
                admissible: r.admissible,
            },
        )
    })
}

/// Proper time elapsed over `[t0, t1]`.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_proper_time(traj: *const RfTrajectory, t0: f64, t1: f64, out: *mut f64) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let tau = traj_ref(traj)?.proper_time(t0, t1)?;
        write(out, "out", tau)
    })
}

/// Boosts by `speed` along `axis` and resamples over boosted times `[start, end]`
/// with `knots` knots. Writes a new handle and the interpolation-error estimate.
///
/// # Safety
/// `traj` must be a valid handle; `out` must be valid; `interpolation_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_boost(
    traj: *const RfTrajectory,
    speed: f64,
    axis: RfVec3,
    start: f64,
    end: f64,
    knots: usize,
    out: *mut *mut RfTrajectory,
    interpolation_error: *mut f64,
) -> RfStatus {
    guard(|| {
        let traj = traj_ref(traj)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let boost = Boost::new(speed, axis.into())?;
        let boosted = boost_trajectory(traj, &boost, BoostWindow { start, end, knots })?;
        if !interpolation_error.is_null() {
            interpolation_error.write(boosted.interpolation_error);
        }
        write(out, "out", Box::into_raw(Box::new(RfTrajectory(boosted.trajectory))))
    })
}

/// Retarded time of the event `(r1, t)`.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_retarded_time(
    traj: *const RfTrajectory,
    r1: RfVec3,
    t: f64,
    tol: f64,
    out: *mut RfRetarded,
) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let s = retarded::retarded_time(traj_ref(traj)?, &r1.into(), t, tol)?;
        write(
            out,
            "out",
            RfRetarded {
                tau: s.tau,
                delay: s.delay,
                iterations: s.iterations as u64,
                certified_error: s.certified_error,
                speed_bound: s.speed_bound,
            },
        )
    })
}

/// Fundamental fields at `(r1, t)`.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_fundamental_fields(
    traj: *const RfTrajectory,
    r1: RfVec3,
    t: f64,
    tol: f64,
    out: *mut RfFundamental,
) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let f = fields::fundamental(traj_ref(traj)?, &point(r1, t), tol)?;
        write(
            out,
            "out",
            RfFundamental {
                tau: f.tau,
                delay: f.delay,
                r12: f.r12.into(),
                e: f.e.into(),
                v: f.v.into(),
                a: f.a.into(),
                u: f.u,
                z: f.z,
            },
        )
    })
}

fn em(state: electrodynamics::EmState) -> RfEmFields {
    RfEmFields {
        e_field: state.e_field.into(),
        b_field: state.b_field.into(),
        a_potential: state.a_potential.into(),
        phi: state.phi,
    }
}

/// `E`, `B`, `A` and `φ` at `(r1, t)`.
///
/// # Safety
/// `traj` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_em_fields(
    traj: *const RfTrajectory,
    r1: RfVec3,
    t: f64,
    tol: f64,
    method: RfFormulation,
    out: *mut RfEmFields,
) -> RfStatus {
    guard(|| {
        need(out, "out")?;
        let s = electrodynamics::em_state(traj_ref(traj)?, &point(r1, t), tol, method.into())?;
        write(out, "out", em(s))
    })
}

/// Fields at `n` events given as `events[4k..4k+4] = (x, y, z, t)`, evaluated in
/// parallel. `statuses` (may be null) receives one status per event; failed
/// entries of `out` are zeroed. Returns the first failing status, or `OK`.
///
/// # Safety
/// `events` must hold `4n` doubles, `out` `n` records and `statuses`, if non-null, `n` entries.
#[no_mangle]
pub unsafe extern "C" fn rf_em_fields_batch(
    traj: *const RfTrajectory,
    events: *const f64,
    n: usize,
    tol: f64,
    method: RfFormulation,
    out: *mut RfEmFields,
    statuses: *mut RfStatus,
) -> RfStatus {
    guard(|| {
        let traj = traj_ref(traj)?;
        if n == 0 {
            return Ok(());
        }
        if events.is_null() {
            return Err(null("events"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = std::slice::from_raw_parts(events, 4 * n);
        let points: Vec<FieldPoint> = raw
            .chunks_exact(4)
            .map(|c| FieldPoint::new(Vec3::new(c[0], c[1], c[2]), c[3]))
            .collect();
        let results = electrodynamics::evaluate_batch(traj, &points, tol, method.into());
        let out = std::slice::from_raw_parts_mut(out, n);
        let mut first: Option<Failure> = None;
        for (k, r) in results.into_iter().enumerate() {
            let status = match r {
                Ok(s) => {
                    out[k] = em(s);
                    RfStatus::Ok
                }
                Err(e) => {
                    out[k] = RfEmFields::default();
                    let f = Failure::from(e);
                    let status = f.0;
                    if first.is_none() {
                        first = Some(Failure(f.0, format!("event {k}: {}", f.1)));
                    }
                    status
                }
            };
            if !statuses.is_null() {
                statuses.add(k).write(status);
            }
        }
        first.map_or(Ok(()), Err)
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_handles_are_rejected() {
        let mut out = RfRetarded::default();
        let s = unsafe { rf_retarded_time(ptr::null(), RfVec3::default(), 0.0, 1e-12, &mut out) };
        assert_eq!(s, RfStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(rf_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("traj"));
    }

    #[test]
    fn panics_are_contained() {
        assert_eq!(guard(|| panic!("boom")), RfStatus::Panic);
        let msg = unsafe { CStr::from_ptr(rf_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }
}
