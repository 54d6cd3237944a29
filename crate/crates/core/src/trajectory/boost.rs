//! Lorentz boosts of events, velocities and whole trajectories.
//!
//! A boost with speed `u` along the unit axis `n` acts on the component of the
//! position along `n` exactly as the axis-aligned transform
//! `y′₃ = γ(y₃ − u y₄)`, `y′₄ = γ(y₄ − u y₃)` and leaves the transverse part
//! unchanged; decomposing along `n` is the rotation to the z-axis and back.

use serde::{Deserialize, Serialize};

use super::{PiecewiseCubic, Trajectory};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boost {
    speed: f64,
    axis: Vec3,
    gamma: f64,
}

impl Boost {
    pub fn new(speed: f64, axis: Vec3) -> Result<Self> {
        if !speed.is_finite() || speed.abs() >= 1.0 {
            return Err(Error::invalid_argument("u", format!("boost speed {speed} must satisfy |u| < 1")));
        }
        let norm = axis.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid_argument("axis", "must be a finite nonzero vector"));
        }
        Ok(Self {
            speed,
            axis: axis / norm,
            gamma: 1.0 / ((1.0 - speed) * (1.0 + speed)).sqrt(),
        })
    }

    pub fn along_z(speed: f64) -> Result<Self> {
        Self::new(speed, Vec3::z())
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn inverse(&self) -> Self {
        Self {
            speed: -self.speed,
            ..*self
        }
    }

    /// Coordinates `(r′, t′)` of the event `(r, t)` in the moving frame.
    pub fn event(&self, r: Vec3, t: f64) -> (Vec3, f64) {
        let along = self.axis.dot(&r);
        let along_p = self.gamma * (along - self.speed * t);
        let t_p = self.gamma * (t - self.speed * along);
        (r + self.axis * (along_p - along), t_p)
    }

    /// `dt′/dt = γ(1 − u v∥)`, bounded below by `γ(1 − |u|)`.
    pub fn time_rate(&self, velocity: Vec3) -> f64 {
        self.gamma * (1.0 - self.speed * self.axis.dot(&velocity))
    }

    /// `v′∥ = (v∥ − u)/(1 − u v∥)`, `v′⊥ = v⊥ / (γ(1 − u v∥))`.
    pub fn velocity(&self, v: Vec3) -> Vec3 {
        let along = self.axis.dot(&v);
        let perp = v - self.axis * along;
        let den = 1.0 - self.speed * along;
        self.axis * ((along - self.speed) / den) + perp / (self.gamma * den)
    }

    /// `dv′/dt′` for a particle with velocity `v` and acceleration `a` in the
    /// original frame. The parallel part is `a∥(1 − u²)/(γ(1 − u v∥)³)`.
    pub fn acceleration(&self, v: Vec3, a: Vec3) -> Vec3 {
        let (u, g) = (self.speed, self.gamma);
        let v_par = self.axis.dot(&v);
        let a_par = self.axis.dot(&a);
        let v_perp = v - self.axis * v_par;
        let a_perp = a - self.axis * a_par;
        let den = 1.0 - u * v_par;
        let den3 = den * den * den;
        self.axis * (a_par * (1.0 - u * u) / (g * den3)) + (a_perp * den + v_perp * (u * a_par)) / (g * g * den3)
    }

    /// Frame-independent acceleration bound `A(1 − u²)/(γ(1 − |u|)³)`.
    pub fn acceleration_bound(&self, accel_bound: f64) -> f64 {
        let d = 1.0 - self.speed.abs();
        accel_bound * (1.0 - self.speed * self.speed) / (self.gamma * d * d * d)
    }
}

/// Resampling window in the boosted frame's time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostWindow {
    pub start: f64,
    pub end: f64,
    pub knots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedTrajectory {
    pub trajectory: Trajectory,
    /// Max position deviation of the spline from the exactly transformed path,
    /// probed at quarter points of every segment.
    pub interpolation_error: f64,
    pub boost: Boost,
    pub window: BoostWindow,
}

/// Original-frame time `t` with `t′ = γ(t − u n·r₂(t))`; the map is strictly
/// increasing with slope at least `γ(1 − |u|)`.
pub fn original_time(traj: &Trajectory, boost: &Boost, t_prime: f64) -> f64 {
    let g = |t: f64| boost.event(traj.position(t), t).1 - t_prime;
    let slope_min = boost.gamma * (1.0 - boost.speed.abs());
    let guess = t_prime / boost.gamma;
    let d = g(guess);
    if d == 0.0 {
        return guess;
    }
    let reach = d.abs() / slope_min;
    let (mut lo, mut hi) = if d > 0.0 { (guess - reach, guess) } else { (guess, guess + reach) };
    let mut t = guess;
    for _ in 0..200 {
        let val = g(t);
        if val == 0.0 {
            return t;
        }
        if val > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let step = val / boost.time_rate(traj.velocity(t));
        let next = t - step;
        let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) || hi - lo <= f64::EPSILON * t.abs().max(1.0) {
            return next;
        }
        t = next;
    }
    t
}

/// Transforms `traj` into the boosted frame as a Hermite spline with knots
/// evenly spaced in the boosted time over `window`.
pub fn boost_trajectory(traj: &Trajectory, boost: &Boost, window: BoostWindow) -> Result<BoostedTrajectory> {
    if !(window.start.is_finite() && window.end.is_finite() && window.start < window.end) {
        return Err(Error::invalid_argument("window", "start must be finite and below end"));
    }
    if window.knots < 2 {
        return Err(Error::invalid_argument("window", "at least two knots are required"));
    }
    let t_end = original_time(traj, boost, window.end);
    let report = traj.check_admissible(t_end);
    if !report.admissible {
        return Err(Error::NotAdmissible {
            stop_time: t_end,
            quantity: "speed",
            bound: report.speed_bound,
            reason: "trajectory must be admissible over the resampling window",
        });
    }

    let step = (window.end - window.start) / (window.knots - 1) as f64;
    let primed_times: Vec<f64> = (0..window.knots)
        .map(|k| if k + 1 == window.knots { window.end } else { window.start + step * k as f64 })
        .collect();
    let mut positions = Vec::with_capacity(window.knots);
    let mut velocities = Vec::with_capacity(window.knots);
    let mut knots = Vec::with_capacity(window.knots);
    for &tp in &primed_times {
        let t = original_time(traj, boost, tp);
        let k = traj.kinematics(t);
        let (r, t_exact) = boost.event(k.position, t);
        knots.push(t_exact);
        positions.push(r);
        velocities.push(boost.velocity(k.velocity));
    }
    // knot times are the exact images, so they stay strictly increasing
    let spline = PiecewiseCubic::new(knots, positions, velocities)?;

    let mut interpolation_error = 0.0f64;
    for w in primed_times.windows(2) {
        for frac in [0.25, 0.5, 0.75] {
            let tp = w[0] + frac * (w[1] - w[0]);
            let t = original_time(traj, boost, tp);
            let (r, tp_exact) = boost.event(traj.position(t), t);
            interpolation_error = interpolation_error.max((spline.position(tp_exact) - r).norm());
        }
    }

    Ok(BoostedTrajectory {
        trajectory: Trajectory::PiecewiseCubic(spline),
        interpolation_error,
        boost: *boost,
        window,
    })
}

impl BoostedTrajectory {
    /// The spline collapsed to `uniform` when all knot velocities agree and the
    /// knot positions lie on the corresponding straight line (within `tol`).
    pub fn simplified(&self, tol: f64) -> Trajectory {
        let Trajectory::PiecewiseCubic(s) = &self.trajectory else {
            return self.trajectory.clone();
        };
        let v0 = s.velocities()[0];
        let p0 = s.positions()[0] - v0 * s.knots()[0];
        let linear = s
            .knots()
            .iter()
            .zip(s.positions())
            .zip(s.velocities())
            .all(|((&t, p), v)| (v - v0).norm() <= tol && (p0 + v0 * t - p).norm() <= tol * (1.0 + t.abs()));
        if linear {
            Trajectory::uniform(p0, v0)
        } else {
            self.trajectory.clone()
        }
    }
}
