//! Admissible point-mass trajectories `t ↦ r₂(t)`.
//!
//! A trajectory is total on ℝ and exposes its position and derivatives up to
//! order three. Admissibility on an initial interval `(−∞, t₁]` is certified by
//! the supremum bounds `q(t₁) = sup |w|` and `A(t₁) = sup |ẇ|`, computed in closed
//! form for the analytic kinds and by exact per-segment extremum search for
//! piecewise-cubic splines.

mod boost;
mod config;
mod spline;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

pub use boost::{boost_trajectory, Boost, BoostWindow, BoostedTrajectory};
pub use config::{CircularConfig, OscillationConfig, SplineConfig, StaticConfig, TrajectoryConfig, UniformConfig};
pub use spline::PiecewiseCubic;

/// Position and its first three time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub jerk: Vec3,
}

/// Uniform circular motion `c + R(cos θ b₁ + sin θ b₂)`, `θ = ωt + φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circular {
    pub center: Vec3,
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
    pub normal: Vec3,
    basis: [Vec3; 2],
}

impl Circular {
    /// `normal` fixes the orbital plane; the orbit starts (θ = 0) on the in-plane
    /// direction closest to +x, or +y when the normal is along x.
    pub fn new(center: Vec3, radius: f64, omega: f64, phase: f64, normal: Vec3) -> Result<Self> {
        check_finite_vec("center", &center)?;
        check_finite("radius", radius)?;
        check_finite("omega", omega)?;
        check_finite("phase", phase)?;
        check_finite_vec("normal", &normal)?;
        if radius < 0.0 {
            return Err(invalid("radius", "must be nonnegative"));
        }
        let norm = normal.norm();
        if norm == 0.0 {
            return Err(invalid("normal", "must be a nonzero vector"));
        }
        let n = normal / norm;
        let seed = if n.x.abs() > 0.9 { Vec3::y() } else { Vec3::x() };
        let b1 = (seed - n * n.dot(&seed)).normalize();
        let b2 = n.cross(&b1);
        Ok(Self {
            center,
            radius,
            omega,
            phase,
            normal: n,
            basis: [b1, b2],
        })
    }

    fn kinematics(&self, t: f64) -> Kinematics {
        let theta = self.omega * t + self.phase;
        let (s, c) = theta.sin_cos();
        let [b1, b2] = self.basis;
        let r = self.radius;
        let w = self.omega;
        Kinematics {
            position: self.center + (b1 * c + b2 * s) * r,
            velocity: (b2 * c - b1 * s) * (r * w),
            acceleration: (b1 * c + b2 * s) * (-r * w * w),
            jerk: (b1 * s - b2 * c) * (r * w * w * w),
        }
    }
}

/// Harmonic motion along a fixed line, `c + A sin(ωt + φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Oscillation {
    pub center: Vec3,
    pub amplitude: Vec3,
    pub omega: f64,
    pub phase: f64,
}

impl Oscillation {
    pub fn new(center: Vec3, amplitude: Vec3, omega: f64, phase: f64) -> Result<Self> {
        check_finite_vec("center", &center)?;
        check_finite_vec("amplitude", &amplitude)?;
        check_finite("omega", omega)?;
        check_finite("phase", phase)?;
        Ok(Self {
            center,
            amplitude,
            omega,
            phase,
        })
    }

    fn kinematics(&self, t: f64) -> Kinematics {
        let theta = self.omega * t + self.phase;
        let (s, c) = theta.sin_cos();
        let w = self.omega;
        Kinematics {
            position: self.center + self.amplitude * s,
            velocity: self.amplitude * (w * c),
            acceleration: self.amplitude * (-w * w * s),
            jerk: self.amplitude * (-w * w * w * c),
        }
    }
}

/// A point-mass trajectory from the built-in catalogue.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Static { position: Vec3 },
    /// `position` is the location at `t = 0`.
    Uniform { position: Vec3, velocity: Vec3 },
    Circular(Circular),
    LinearOscillation(Oscillation),
    PiecewiseCubic(PiecewiseCubic),
}

/// Outcome of [`Trajectory::check_admissible`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub stop_time: f64,
    /// `q(t₁)`; may be ≥ 1 when the report is negative.
    pub speed_bound: f64,
    /// `A(t₁)`
    pub accel_bound: f64,
    pub admissible: bool,
}

impl Trajectory {
    pub fn stationary(position: Vec3) -> Self {
        Trajectory::Static { position }
    }

    pub fn uniform(position: Vec3, velocity: Vec3) -> Self {
        Trajectory::Uniform { position, velocity }
    }

    /// Circle of `radius` in the xy-plane around the origin, starting on +x.
    pub fn circular(radius: f64, omega: f64) -> Result<Self> {
        Ok(Trajectory::Circular(Circular::new(
            Vec3::zeros(),
            radius,
            omega,
            0.0,
            Vec3::z(),
        )?))
    }

    /// `amplitude · sin(ωt)` about the origin.
    pub fn oscillation(amplitude: Vec3, omega: f64) -> Result<Self> {
        Ok(Trajectory::LinearOscillation(Oscillation::new(
            Vec3::zeros(),
            amplitude,
            omega,
            0.0,
        )?))
    }

    pub fn piecewise_cubic(times: Vec<f64>, positions: Vec<Vec3>, velocities: Vec<Vec3>) -> Result<Self> {
        Ok(Trajectory::PiecewiseCubic(PiecewiseCubic::new(
            times, positions, velocities,
        )?))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Trajectory::Static { .. } => "static",
            Trajectory::Uniform { .. } => "uniform",
            Trajectory::Circular(_) => "circular",
            Trajectory::LinearOscillation(_) => "linear-oscillation",
            Trajectory::PiecewiseCubic(_) => "piecewise-cubic",
        }
    }

    /// True for the kinds whose position is C^∞ in time.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, Trajectory::PiecewiseCubic(_))
    }

    pub fn kinematics(&self, t: f64) -> Kinematics {
        match self {
            Trajectory::Static { position } => Kinematics {
                position: *position,
                velocity: Vec3::zeros(),
                acceleration: Vec3::zeros(),
                jerk: Vec3::zeros(),
            },
            Trajectory::Uniform { position, velocity } => Kinematics {
                position: position + velocity * t,
                velocity: *velocity,
                acceleration: Vec3::zeros(),
                jerk: Vec3::zeros(),
            },
            Trajectory::Circular(c) => c.kinematics(t),
            Trajectory::LinearOscillation(o) => o.kinematics(t),
            Trajectory::PiecewiseCubic(s) => s.kinematics(t),
        }
    }

    /// `[r₂(t), w(t), ẇ(t), ẅ(t)]` truncated after `order`.
    pub fn eval(&self, t: f64, order: usize) -> Result<Vec<Vec3>> {
        if order > 3 {
            return Err(Error::invalid_argument("order", format!("{order} is not in 0..=3")));
        }
        let k = self.kinematics(t);
        Ok([k.position, k.velocity, k.acceleration, k.jerk][..=order].to_vec())
    }

    pub fn position(&self, t: f64) -> Vec3 {
        match self {
            Trajectory::Static { position } => *position,
            Trajectory::Uniform { position, velocity } => position + velocity * t,
            Trajectory::PiecewiseCubic(s) => s.position(t),
            _ => self.kinematics(t).position,
        }
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            Trajectory::Static { .. } => Vec3::zeros(),
            Trajectory::Uniform { velocity, .. } => *velocity,
            _ => self.kinematics(t).velocity,
        }
    }

    /// Supremum of `|w(s)|` over `s ≤ t₁` without the admissibility verdict.
    pub fn speed_sup(&self, stop_time: f64) -> f64 {
        match self {
            Trajectory::Static { .. } => 0.0,
            Trajectory::Uniform { velocity, .. } => velocity.norm(),
            Trajectory::Circular(c) => (c.radius * c.omega).abs(),
            Trajectory::LinearOscillation(o) => o.amplitude.norm() * o.omega.abs(),
            Trajectory::PiecewiseCubic(s) => s.speed_sup(stop_time),
        }
    }

    /// Supremum of `|ẇ(s)|` over `s ≤ t₁` without the admissibility verdict.
    pub fn accel_sup(&self, stop_time: f64) -> f64 {
        match self {
            Trajectory::Static { .. } | Trajectory::Uniform { .. } => 0.0,
            Trajectory::Circular(c) => c.radius * c.omega * c.omega,
            Trajectory::LinearOscillation(o) => o.amplitude.norm() * o.omega * o.omega,
            Trajectory::PiecewiseCubic(s) => s.accel_sup(stop_time),
        }
    }

    /// `q(t₁) = sup{|w(s)| : s ≤ t₁}`, failing when the bound reaches the speed of light.
    pub fn speed_bound(&self, stop_time: f64) -> Result<f64> {
        let q = self.speed_sup(stop_time);
        if !q.is_finite() || q >= 1.0 {
            return Err(Error::NotAdmissible {
                stop_time,
                quantity: "speed",
                bound: q,
                reason: "supremum of |w| is not below c = 1",
            });
        }
        Ok(q)
    }

    /// `A(t₁) = sup{|ẇ(s)| : s ≤ t₁}`, failing when unbounded.
    pub fn accel_bound(&self, stop_time: f64) -> Result<f64> {
        let a = self.accel_sup(stop_time);
        if !a.is_finite() {
            return Err(Error::NotAdmissible {
                stop_time,
                quantity: "acceleration",
                bound: a,
                reason: "supremum of |dw/dt| is unbounded",
            });
        }
        Ok(a)
    }

    pub fn check_admissible(&self, stop_time: f64) -> AdmissibilityReport {
        let speed_bound = self.speed_sup(stop_time);
        let accel_bound = self.accel_sup(stop_time);
        AdmissibilityReport {
            stop_time,
            speed_bound,
            accel_bound,
            admissible: speed_bound < 1.0 && accel_bound.is_finite(),
        }
    }

    /// Proper time `∫ √(1 − |w|²) dt` over `[t₀, t₁]`, relative accuracy 1e−10.
    pub fn proper_time(&self, t0: f64, t1: f64) -> Result<f64> {
        check_finite("t0", t0)?;
        check_finite("t1", t1)?;
        if t0 > t1 {
            return Err(Error::invalid_argument("t0", format!("{t0} exceeds t1 = {t1}")));
        }
        if t0 == t1 {
            return Ok(0.0);
        }
        let mut breaks = vec![t0];
        match self {
            Trajectory::Circular(Circular { omega, .. })
            | Trajectory::LinearOscillation(Oscillation { omega, .. })
                if *omega != 0.0 =>
            {
                let step = FRAC_PI_2 / omega.abs();
                let mut s = t0 + step;
                while s < t1 {
                    breaks.push(s);
                    s += step;
                }
            }
            Trajectory::PiecewiseCubic(s) => {
                breaks.extend(s.knots().iter().copied().filter(|&k| k > t0 && k < t1));
            }
            _ => {}
        }
        breaks.push(t1);

        let integrand = |t: f64| {
            let speed = self.velocity(t).norm();
            ((1.0 - speed) * (1.0 + speed)).max(0.0).sqrt()
        };
        Ok(breaks
            .windows(2)
            .map(|w| adaptive_integral(&integrand, w[0], w[1], 1e-11 * (w[1] - w[0]), 0))
            .sum())
    }
}

fn adaptive_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, target: f64, depth: u32) -> f64 {
    let out = quadrature::integrate(f, a, b, target);
    if out.error_estimate <= target || depth >= 40 {
        return out.integral;
    }
    let mid = 0.5 * (a + b);
    adaptive_integral(f, a, mid, 0.5 * target, depth + 1)
        + adaptive_integral(f, mid, b, 0.5 * target, depth + 1)
}

/// `q = √(1 − 1/(1 + k/m₀)²)` with `c = 1`: the speed bound implied by a
/// kinetic-energy bound `k` for rest mass `m₀`.
pub fn speed_bound_from_kinetic(kinetic: f64, rest_mass: f64) -> Result<f64> {
    if !(kinetic >= 0.0) || !kinetic.is_finite() {
        return Err(Error::invalid_argument("k", format!("kinetic energy {kinetic} must be finite and >= 0")));
    }
    if !(rest_mass > 0.0) || !rest_mass.is_finite() {
        return Err(Error::invalid_argument("m0", format!("rest mass {rest_mass} must be finite and > 0")));
    }
    let x = kinetic / rest_mass;
    // 1 − 1/(1+x)² = x(2+x)/(1+x)², kept in this form for small x.
    Ok((x * (2.0 + x)).sqrt() / (1.0 + x))
}

/// Length of the interval of significance `a = (δ + 2vt₁)/(c − v)` for a system of
/// initial diameter `δ`, velocity bound `v` and observation period `t₁`.
pub fn significance_interval(diameter: f64, speed: f64, period: f64, c: f64) -> Result<f64> {
    check_finite("delta", diameter)?;
    check_finite("t1", period)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid("c", "speed of light must be positive"));
    }
    if !(0.0..c).contains(&speed) {
        return Err(invalid("v", "velocity bound must lie in [0, c)"));
    }
    if diameter < 0.0 {
        return Err(invalid("delta", "diameter must be nonnegative"));
    }
    Ok((diameter + 2.0 * speed * period) / (c - speed))
}

fn invalid(name: &'static str, message: &str) -> Error {
    Error::invalid_argument(name, message)
}

pub(crate) fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

pub(crate) fn check_finite_vec(name: &'static str, v: &Vec3) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(name, "components must be finite"))
    }
}
