//! Cubic Hermite trajectories with constant-velocity extrapolation.
//!
//! Each segment `[t_k, t_{k+1}]` carries the polynomial
//! `p(s) = c₀ + c₁s + c₂s² + c₃s³` in local time `s = t − t_k`. The curve is C¹
//! at knots and C^∞ inside segments. Outside the knot range the trajectory
//! continues on a straight line with the end-knot velocity.

use crate::{Error, Result, Vec3};

use super::Kinematics;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCubic {
    knots: Vec<f64>,
    positions: Vec<Vec3>,
    velocities: Vec<Vec3>,
    coeffs: Vec<[Vec3; 4]>,
    /// `prefix_speed[k]`: sup of |w| over `(−∞, t_k]`.
    prefix_speed: Vec<f64>,
    /// `prefix_accel[k]`: sup of |ẇ| over `(−∞, t_k]` (one-sided limits included).
    prefix_accel: Vec<f64>,
}

impl PiecewiseCubic {
    pub fn new(knots: Vec<f64>, positions: Vec<Vec3>, velocities: Vec<Vec3>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("t", "at least two knots are required"));
        }
        if positions.len() != knots.len() {
            return Err(invalid(
                "position",
                format!("has {} rows, expected {}", positions.len(), knots.len()),
            ));
        }
        if velocities.len() != knots.len() {
            return Err(invalid(
                "velocity",
                format!("has {} rows, expected {}", velocities.len(), knots.len()),
            ));
        }
        for (i, t) in knots.iter().enumerate() {
            if !t.is_finite() {
                return Err(invalid(format!("t[{i}]"), "must be finite"));
            }
            if i > 0 && *t <= knots[i - 1] {
                return Err(invalid(format!("t[{i}]"), "knot times must be strictly increasing"));
            }
        }
        for (name, rows) in [("position", &positions), ("velocity", &velocities)] {
            for (i, r) in rows.iter().enumerate() {
                if let Some(j) = r.iter().position(|x| !x.is_finite()) {
                    return Err(invalid(format!("{name}[{i}][{j}]"), "must be finite"));
                }
            }
        }

        let coeffs: Vec<[Vec3; 4]> = (0..knots.len() - 1)
            .map(|k| {
                let h = knots[k + 1] - knots[k];
                let (p0, p1) = (positions[k], positions[k + 1]);
                let (v0, v1) = (velocities[k], velocities[k + 1]);
                let slope = (p1 - p0) / h;
                [
                    p0,
                    v0,
                    (slope * 3.0 - v0 * 2.0 - v1) / h,
                    (v0 + v1 - slope * 2.0) / (h * h),
                ]
            })
            .collect();

        let mut prefix_speed = Vec::with_capacity(knots.len());
        let mut prefix_accel = Vec::with_capacity(knots.len());
        let mut speed = velocities[0].norm();
        let mut accel = 0.0f64;
        prefix_speed.push(speed);
        prefix_accel.push(accel);
        for (k, c) in coeffs.iter().enumerate() {
            let h = knots[k + 1] - knots[k];
            speed = speed.max(segment_speed_sup(c, h));
            accel = accel.max(segment_accel_sup(c, h));
            prefix_speed.push(speed);
            prefix_accel.push(accel);
        }

        Ok(Self {
            knots,
            positions,
            velocities,
            coeffs,
            prefix_speed,
            prefix_accel,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec3] {
        &self.velocities
    }

    /// Index of the segment containing `t`, or `None` outside `[t₀, t_N)`.
    pub fn segment(&self, t: f64) -> Option<usize> {
        let n = self.knots.len();
        if t < self.knots[0] || t >= self.knots[n - 1] {
            return None;
        }
        Some(self.knots.partition_point(|&k| k <= t) - 1)
    }

    /// Distance from `t` to the nearest knot.
    pub fn knot_distance(&self, t: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= t);
        let mut d = f64::INFINITY;
        if i > 0 {
            d = d.min(t - self.knots[i - 1]);
        }
        if i < self.knots.len() {
            d = d.min(self.knots[i] - t);
        }
        d
    }

    pub fn position(&self, t: f64) -> Vec3 {
        match self.segment(t) {
            Some(k) => {
                let c = &self.coeffs[k];
                let s = t - self.knots[k];
                c[0] + (c[1] + (c[2] + c[3] * s) * s) * s
            }
            None => self.kinematics(t).position,
        }
    }

    pub fn kinematics(&self, t: f64) -> Kinematics {
        let n = self.knots.len();
        match self.segment(t) {
            Some(k) => {
                let c = &self.coeffs[k];
                let s = t - self.knots[k];
                Kinematics {
                    position: c[0] + (c[1] + (c[2] + c[3] * s) * s) * s,
                    velocity: c[1] + (c[2] * 2.0 + c[3] * (3.0 * s)) * s,
                    acceleration: c[2] * 2.0 + c[3] * (6.0 * s),
                    jerk: c[3] * 6.0,
                }
            }
            None => {
                let i = if t < self.knots[0] { 0 } else { n - 1 };
                Kinematics {
                    position: self.positions[i] + self.velocities[i] * (t - self.knots[i]),
                    velocity: self.velocities[i],
                    acceleration: Vec3::zeros(),
                    jerk: Vec3::zeros(),
                }
            }
        }
    }

    pub(crate) fn speed_sup(&self, stop_time: f64) -> f64 {
        let n = self.knots.len();
        if stop_time <= self.knots[0] {
            return self.prefix_speed[0];
        }
        if stop_time >= self.knots[n - 1] {
            return self.prefix_speed[n - 1];
        }
        let k = self.knots.partition_point(|&x| x <= stop_time) - 1;
        self.prefix_speed[k].max(segment_speed_sup(&self.coeffs[k], stop_time - self.knots[k]))
    }

    pub(crate) fn accel_sup(&self, stop_time: f64) -> f64 {
        let n = self.knots.len();
        if stop_time <= self.knots[0] {
            return 0.0;
        }
        if stop_time >= self.knots[n - 1] {
            return self.prefix_accel[n - 1];
        }
        let k = self.knots.partition_point(|&x| x <= stop_time) - 1;
        self.prefix_accel[k].max(segment_accel_sup(&self.coeffs[k], stop_time - self.knots[k]))
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::InvalidTrajectory {
        path: path.into(),
        message: message.into(),
    }
}

/// Max of `|w(s)|` for `s ∈ [0, len]`: endpoints plus the real roots of
/// `d|w|²/ds = 2⟨w, ẇ⟩`, a cubic in `s`.
fn segment_speed_sup(c: &[Vec3; 4], len: f64) -> f64 {
    let speed = |s: f64| (c[1] + (c[2] * 2.0 + c[3] * (3.0 * s)) * s).norm();
    let d = [
        2.0 * c[1].dot(&c[2]),
        6.0 * c[1].dot(&c[3]) + 4.0 * c[2].norm_squared(),
        18.0 * c[2].dot(&c[3]),
        18.0 * c[3].norm_squared(),
    ];
    poly_roots_in(&d, 0.0, len)
        .into_iter()
        .map(speed)
        .fold(speed(0.0).max(speed(len)), f64::max)
}

/// `|ẇ|` is the norm of an affine function of `s`, hence convex: the max is at an endpoint.
fn segment_accel_sup(c: &[Vec3; 4], len: f64) -> f64 {
    let accel = |s: f64| (c[2] * 2.0 + c[3] * (6.0 * s)).norm();
    accel(0.0).max(accel(len))
}

fn poly_eval(d: &[f64; 4], s: f64) -> f64 {
    d[0] + (d[1] + (d[2] + d[3] * s) * s) * s
}

/// Real roots in `(lo, hi)` of `d₀ + d₁s + d₂s² + d₃s³`.
///
/// The critical points of the cubic come from the quadratic formula; between
/// consecutive critical points the cubic is monotone and each sign change is
/// located by bisection to full precision.
pub(crate) fn poly_roots_in(d: &[f64; 4], lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = vec![lo];
    for r in quadratic_roots(d[1], 2.0 * d[2], 3.0 * d[3]) {
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);

    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (poly_eval(d, a), poly_eval(d, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = poly_eval(d, m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// Real roots of `c₀ + c₁s + c₂s²`, degrading to the linear case.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return if c1 != 0.0 { vec![-c0 / c1] } else { vec![] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return vec![];
    }
    // numerically stable pair
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / c2, c0 / q]
}
