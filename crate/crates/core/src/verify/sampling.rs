//! Reproducible low-discrepancy sampling of field points and manifold points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffeo::ManifoldPoint;
use crate::fields::{self, FieldPoint};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

const PRIMES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `index` in `base`.
pub fn halton(index: u64, base: u32) -> f64 {
    let b = f64::from(base);
    let (mut i, mut f, mut r) = (index, 1.0, 0.0);
    while i > 0 {
        f /= b;
        r += f * (i % u64::from(base)) as f64;
        i /= u64::from(base);
    }
    r
}

/// Halton points in `[0,1)⁴` with a seeded Cranley-Patterson rotation.
struct RotatedHalton {
    shift: [f64; 4],
    index: u64,
}

impl RotatedHalton {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            shift: std::array::from_fn(|_| rng.gen::<f64>()),
            index: 0,
        }
    }
}

impl Iterator for RotatedHalton {
    type Item = [f64; 4];

    fn next(&mut self) -> Option<[f64; 4]> {
        self.index += 1;
        Some(std::array::from_fn(|d| (halton(self.index, PRIMES[d]) + self.shift[d]).fract()))
    }
}

/// Sampling plan over a box in `(x₁, x₂, x₃, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub points: usize,
    pub seed: u64,
    /// Lower corner `(x₁, x₂, x₃, t)`.
    pub lower: [f64; 4],
    pub upper: [f64; 4],
    /// Accepted delays `[T_min, T_max]`.
    pub delay_range: (f64, f64),
    /// For spline trajectories, minimum distance of `τ` from any knot.
    pub knot_margin: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            points: 500,
            seed: 0,
            lower: [-4.0, -4.0, -4.0, -4.0],
            upper: [4.0, 4.0, 4.0, 4.0],
            delay_range: (0.5, 10.0),
            knot_margin: 0.05,
        }
    }
}

impl SamplerSpec {
    pub fn with_points(mut self, points: usize, seed: u64) -> Self {
        self.points = points;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for d in 0..4 {
            if !(self.lower[d].is_finite() && self.upper[d].is_finite() && self.lower[d] <= self.upper[d]) {
                return Err(Error::invalid_argument("sampler", format!("axis {d}: need finite min <= max")));
            }
        }
        let (lo, hi) = self.delay_range;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::invalid_argument("sampler", "delay range needs 0 < T_min <= T_max"));
        }
        Ok(())
    }
}

/// Draws `spec.points` events, rejecting delays outside the range and spline
/// points whose retarded time lies within `knot_margin` of a knot.
pub fn sample_field_points(traj: &Trajectory, spec: &SamplerSpec, tol: f64) -> Result<Vec<FieldPoint>> {
    spec.validate()?;
    let (t_min, t_max) = spec.delay_range;
    let max_attempts = 1000 * spec.points + 1000;
    let mut out = Vec::with_capacity(spec.points);
    for (attempt, x) in RotatedHalton::new(spec.seed).enumerate() {
        if out.len() == spec.points {
            break;
        }
        if attempt >= max_attempts {
            return Err(Error::invalid_argument(
                "sampler",
                format!("accepted only {} of {} points after {max_attempts} draws", out.len(), spec.points),
            ));
        }
        let c: [f64; 4] = std::array::from_fn(|d| spec.lower[d] + x[d] * (spec.upper[d] - spec.lower[d]));
        let p = FieldPoint::new(Vec3::new(c[0], c[1], c[2]), c[3]);
        let Ok(f) = fields::fundamental(traj, &p, tol) else {
            continue;
        };
        if f.delay < t_min || f.delay > t_max {
            continue;
        }
        if let Trajectory::PiecewiseCubic(s) = traj {
            if s.knot_distance(f.tau) < spec.knot_margin {
                continue;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Sampling plan over `[τ_min, τ_max] × [T_min, T_max] × S²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSampler {
    pub points: usize,
    pub seed: u64,
    pub tau_range: (f64, f64),
    pub delay_range: (f64, f64),
}

/// Manifold points with `e` uniform on the sphere.
pub fn sample_manifold_points(spec: &ManifoldSampler) -> Result<Vec<ManifoldPoint>> {
    let (t0, t1) = spec.tau_range;
    let (d0, d1) = spec.delay_range;
    if !(t0 <= t1 && 0.0 < d0 && d0 <= d1 && t1.is_finite() && d1.is_finite()) {
        return Err(Error::invalid_argument("sampler", "need finite tau range and 0 < T_min <= T_max"));
    }
    RotatedHalton::new(spec.seed)
        .take(spec.points)
        .map(|x| {
            let cos = 2.0 * x[2] - 1.0;
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            let phi = std::f64::consts::TAU * x[3];
            let e = Vec3::new(sin * phi.cos(), sin * phi.sin(), cos).normalize();
            ManifoldPoint::new(t0 + x[0] * (t1 - t0), d0 + x[1] * (d1 - d0), e)
        })
        .collect()
}
