//! Independent numerical oracles for the analytic field formulas.
//!
//! Everything here differentiates field values by central differences and
//! compares the result against the closed forms in [`crate::fields`] and
//! [`crate::electrodynamics`]. Stencils that come within `10·tol` of the
//! trajectory are refused.

mod sampling;
mod suite;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::electrodynamics::{self, EmState};
use crate::fields::{self, Direction, FieldPoint, FundamentalFields, Partials};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

pub use sampling::{halton, sample_field_points, sample_manifold_points, ManifoldSampler, SamplerSpec};
pub use suite::{suite, CheckResult, SuiteOptions, SuiteReport};

/// Step sequence used for convergence-order estimates.
pub const RESIDUAL_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Fails unless every point `p ± h·d` has delay at least `10·tol`.
pub fn check_stencil(traj: &Trajectory, p: &FieldPoint, directions: &[Direction], h: f64, tol: f64) -> Result<()> {
    let floor = 10.0 * tol;
    for &d in directions {
        for s in [h, -h] {
            let q = p.shifted(d, s);
            let delay = crate::retarded::delay(traj, &q.r1, q.t, tol)?;
            if !(delay >= floor) {
                return Err(Error::OutsideG {
                    x: q.r1.x,
                    y: q.r1.y,
                    z: q.r1.z,
                    t: q.t,
                    delay,
                    threshold: floor,
                });
            }
        }
    }
    Ok(())
}

/// Central difference `(f(p + h·d) − f(p − h·d)) / 2h`.
pub fn fd_partial<V, F>(traj: &Trajectory, field: F, p: &FieldPoint, direction: Direction, h: f64, tol: f64) -> Result<V>
where
    V: Copy + Sub<Output = V> + Mul<f64, Output = V>,
    F: Fn(&FieldPoint) -> Result<V>,
{
    if !(h > 0.0) {
        return Err(Error::invalid_argument("h", "step must be positive"));
    }
    check_stencil(traj, p, &[direction], h, tol)?;
    let plus = field(&p.shifted(direction, h))?;
    let minus = field(&p.shifted(direction, -h))?;
    Ok((plus - minus) * (0.5 / h))
}

/// Finite-difference residuals of Maxwell's equations, the wave equations and the gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub point: FieldPoint,
    pub h: f64,
    /// `|∇×E + DB|`
    pub faraday: f64,
    /// `|∇·E|`
    pub gauss_e: f64,
    /// `|∇×B − DE|`
    pub ampere: f64,
    /// `|∇·B|`
    pub gauss_b: f64,
    pub wave_e: f64,
    pub wave_b: f64,
    pub wave_a: f64,
    pub wave_phi: f64,
    /// `|∇·A + Dφ|` by differences.
    pub gauge_fd: f64,
    /// `|∇·A + Dφ|` from the closed-form partials.
    pub gauge_analytic: f64,
    /// `|E| + |B| + u²` at the point.
    pub scale: f64,
    /// Ratio of the summed residuals at `h` and `h/2`.
    pub order_estimate: f64,
    /// Largest `|(4R(h/2) − R(h))/3|`, which cancels the `h²` truncation term.
    pub extrapolated: f64,
}

impl ResidualReport {
    pub const NAMES: [&'static str; 9] = [
        "faraday", "gauss_e", "ampere", "gauss_b", "wave_E", "wave_B", "wave_A", "wave_phi", "gauge_fd",
    ];

    /// The differenced residuals in [`ResidualReport::NAMES`] order.
    pub fn residuals(&self) -> [f64; 9] {
        [
            self.faraday,
            self.gauss_e,
            self.ampere,
            self.gauss_b,
            self.wave_e,
            self.wave_b,
            self.wave_a,
            self.wave_phi,
            self.gauge_fd,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }

    pub fn max_relative(&self) -> f64 {
        self.max_residual() / self.scale
    }
}

struct Stencil {
    center: EmState,
    /// `[direction][0 = +h, 1 = −h]`
    sides: [[EmState; 2]; 4],
}

impl Stencil {
    fn eval(traj: &Trajectory, p: &FieldPoint, h: f64, tol: f64) -> Result<Self> {
        let at = |q: &FieldPoint| fields::fundamental(traj, q, tol).map(|f| EmState::explicit(&f));
        let center = at(p)?;
        let mut sides = [[center; 2]; 4];
        for (k, d) in Direction::ALL.into_iter().enumerate() {
            sides[k] = [at(&p.shifted(d, h))?, at(&p.shifted(d, -h))?];
        }
        Ok(Self { center, sides })
    }

    fn d<V>(&self, k: usize, h: f64, f: impl Fn(&EmState) -> V) -> V
    where
        V: Sub<Output = V> + Mul<f64, Output = V>,
    {
        (f(&self.sides[k][0]) - f(&self.sides[k][1])) * (0.5 / h)
    }

    /// `∇² − D²` by second central differences.
    fn dalembertian<V>(&self, h: f64, f: impl Fn(&EmState) -> V) -> V
    where
        V: Copy + Add<Output = V> + Sub<Output = V> + Mul<f64, Output = V>,
    {
        let c = f(&self.center);
        let second = |k: usize| (f(&self.sides[k][0]) + f(&self.sides[k][1]) - c * 2.0) * (1.0 / (h * h));
        second(1) + second(2) + second(3) - second(0)
    }

    fn curl(&self, h: f64, f: impl Fn(&EmState) -> Vec3) -> Vec3 {
        let (d1, d2, d3) = (self.d(1, h, &f), self.d(2, h, &f), self.d(3, h, &f));
        Vec3::new(d2.z - d3.y, d3.x - d1.z, d1.y - d2.x)
    }

    fn div(&self, h: f64, f: impl Fn(&EmState) -> Vec3) -> f64 {
        self.d(1, h, &f).x + self.d(2, h, &f).y + self.d(3, h, &f).z
    }
}

/// Residual vectors in [`ResidualReport::NAMES`] order; scalar residuals use the x slot.
fn residuals_at(traj: &Trajectory, p: &FieldPoint, h: f64, tol: f64) -> Result<[Vec3; 9]> {
    let s = Stencil::eval(traj, p, h, tol)?;
    let e = |m: &EmState| m.e_field;
    let b = |m: &EmState| m.b_field;
    let a = |m: &EmState| m.a_potential;
    let scalar = |x: f64| Vec3::new(x, 0.0, 0.0);
    Ok([
        s.curl(h, e) + s.d(0, h, b),
        scalar(s.div(h, e)),
        s.curl(h, b) - s.d(0, h, e),
        scalar(s.div(h, b)),
        s.dalembertian(h, e),
        s.dalembertian(h, b),
        s.dalembertian(h, a),
        scalar(s.dalembertian(h, |m| m.phi)),
        scalar(s.div(h, a) + s.d(0, h, |m| m.phi)),
    ])
}

/// Residuals at step `h`, with a second pass at `h/2` for the order estimate and
/// the Richardson-extrapolated residual.
pub fn maxwell_residuals(traj: &Trajectory, p: &FieldPoint, h: f64, tol: f64) -> Result<ResidualReport> {
    if !(h > 0.0) {
        return Err(Error::invalid_argument("h", "step must be positive"));
    }
    check_stencil(traj, p, &Direction::ALL, h, tol)?;
    let coarse = residuals_at(traj, p, h, tol)?;
    let fine = residuals_at(traj, p, 0.5 * h, tol)?;
    let r = coarse.map(|v| v.norm());
    let extrapolated = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| ((f * 4.0 - c) / 3.0).norm())
        .fold(0.0, f64::max);
    let jet = fields::jet(traj, p, tol)?;
    let center = EmState::explicit(&jet.base);
    Ok(ResidualReport {
        point: *p,
        h,
        faraday: r[0],
        gauss_e: r[1],
        ampere: r[2],
        gauss_b: r[3],
        wave_e: r[4],
        wave_b: r[5],
        wave_a: r[6],
        wave_phi: r[7],
        gauge_fd: r[8],
        gauge_analytic: electrodynamics::gauge_residual(&jet).abs(),
        scale: center.e_field.norm() + center.b_field.norm() + jet.base.u * jet.base.u,
        order_estimate: r.iter().sum::<f64>() / fine.iter().map(|v| v.norm()).sum::<f64>(),
        extrapolated,
    })
}

/// [`maxwell_residuals`] for each step in `steps`.
pub fn residual_sequence(traj: &Trajectory, p: &FieldPoint, steps: &[f64], tol: f64) -> Result<Vec<ResidualReport>> {
    steps.iter().map(|&h| maxwell_residuals(traj, p, h, tol)).collect()
}

/// The twelve closed-form partial derivatives of the fundamental fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Formula {
    #[serde(rename = "D_i tau")]
    DiTau,
    #[serde(rename = "D tau")]
    DTau,
    #[serde(rename = "D_i T")]
    DiT,
    #[serde(rename = "D T")]
    DT,
    #[serde(rename = "D_i u")]
    DiU,
    #[serde(rename = "D u")]
    DU,
    #[serde(rename = "D_i v")]
    DiV,
    #[serde(rename = "D v")]
    DV,
    #[serde(rename = "D_i e")]
    DiE,
    #[serde(rename = "D e")]
    DE,
    #[serde(rename = "D_i z")]
    DiZ,
    #[serde(rename = "D z")]
    DZ,
}

impl Formula {
    pub const ALL: [Formula; 12] = [
        Formula::DiTau,
        Formula::DTau,
        Formula::DiT,
        Formula::DT,
        Formula::DiU,
        Formula::DU,
        Formula::DiV,
        Formula::DV,
        Formula::DiE,
        Formula::DE,
        Formula::DiZ,
        Formula::DZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::DiTau => "D_i tau",
            Formula::DTau => "D tau",
            Formula::DiT => "D_i T",
            Formula::DT => "D T",
            Formula::DiU => "D_i u",
            Formula::DU => "D u",
            Formula::DiV => "D_i v",
            Formula::DV => "D v",
            Formula::DiE => "D_i e",
            Formula::DE => "D e",
            Formula::DiZ => "D_i z",
            Formula::DZ => "D z",
        }
    }

    fn is_spatial(self) -> bool {
        matches!(
            self,
            Formula::DiTau | Formula::DiT | Formula::DiU | Formula::DiV | Formula::DiE | Formula::DiZ
        )
    }

    /// Largest component of `|closed − fd|`.
    fn deviation(self, closed: &Partials, fd: &Partials) -> f64 {
        match self {
            Formula::DiTau | Formula::DTau => (closed.tau - fd.tau).abs(),
            Formula::DiT | Formula::DT => (closed.delay - fd.delay).abs(),
            Formula::DiU | Formula::DU => (closed.u - fd.u).abs(),
            Formula::DiV | Formula::DV => (closed.v - fd.v).amax(),
            Formula::DiE | Formula::DE => (closed.e - fd.e).amax(),
            Formula::DiZ | Formula::DZ => (closed.z - fd.z).abs(),
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-formula maximum absolute deviation between closed form and central differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeTable {
    pub h: f64,
    pub deviations: BTreeMap<Formula, f64>,
}

impl DerivativeTable {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.values().copied().fold(0.0, f64::max)
    }
}

fn fd_partials(traj: &Trajectory, p: &FieldPoint, d: Direction, h: f64, tol: f64) -> Result<Partials> {
    let plus = fields::fundamental(traj, &p.shifted(d, h), tol)?;
    let minus = fields::fundamental(traj, &p.shifted(d, -h), tol)?;
    let s = 0.5 / h;
    let diff = |g: fn(&FundamentalFields) -> f64| (g(&plus) - g(&minus)) * s;
    Ok(Partials {
        tau: diff(|f| f.tau),
        delay: diff(|f| f.delay),
        u: diff(|f| f.u),
        z: diff(|f| f.z),
        v: (plus.v - minus.v) * s,
        e: (plus.e - minus.e) * s,
    })
}

pub fn derivative_table_check(traj: &Trajectory, p: &FieldPoint, h: f64, tol: f64) -> Result<DerivativeTable> {
    if !(h > 0.0) {
        return Err(Error::invalid_argument("h", "step must be positive"));
    }
    check_stencil(traj, p, &Direction::ALL, h, tol)?;
    let jet = fields::jet(traj, p, tol)?;
    let mut deviations: BTreeMap<Formula, f64> = Formula::ALL.iter().map(|&f| (f, 0.0)).collect();
    for d in Direction::ALL {
        let fd = fd_partials(traj, p, d, h, tol)?;
        let closed = jet.partial(d);
        for f in Formula::ALL {
            if f.is_spatial() == d.spatial_index().is_some() {
                let dev = deviations.get_mut(&f).expect("all formulas present");
                *dev = dev.max(f.deviation(closed, &fd));
            }
        }
    }
    Ok(DerivativeTable { h, deviations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-14;

    fn origin() -> Trajectory {
        Trajectory::stationary(Vec3::zeros())
    }

    fn delay_of(traj: &Trajectory) -> impl Fn(&FieldPoint) -> Result<f64> + '_ {
        move |q| fields::fundamental(traj, q, TOL).map(|f| f.delay)
    }

    #[test]
    fn fd_partial_examples() {
        let o = origin();
        let p = FieldPoint::new(Vec3::new(2.0, 0.0, 0.0), 0.0);
        let d = fd_partial(&o, delay_of(&o), &p, Direction::X1, 1e-4, TOL).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
        let c = fd_partial(&o, |_| Ok(3.5), &p, Direction::X2, 1e-4, TOL).unwrap();
        assert_eq!(c, 0.0);
        let tau = fd_partial(&o, |q| fields::fundamental(&o, q, TOL).map(|f| f.tau), &p, Direction::T, 1e-4, TOL).unwrap();
        assert_abs_diff_eq!(tau, 1.0, epsilon = 1e-9);
        let ev = fd_partial(&o, |q| fields::fundamental(&o, q, TOL).map(|f| f.e), &p, Direction::X2, 1e-4, TOL).unwrap();
        assert_abs_diff_eq!(ev, Vec3::new(0.0, 0.5, 0.0), epsilon = 1e-8);
    }

    #[test]
    fn refuses_stencils_crossing_the_trajectory() {
        let o = origin();
        let p = FieldPoint::new(Vec3::new(1e-3, 0.0, 0.0), 0.0);
        let err = fd_partial(&o, delay_of(&o), &p, Direction::X1, 1e-3, TOL).unwrap_err();
        assert!(matches!(err, Error::OutsideG { .. }), "{err}");
        assert!(fd_partial(&o, delay_of(&o), &p, Direction::X1, 0.0, TOL).is_err());
    }

    #[test]
    fn coulomb_residuals_are_truncation_only() {
        let p = FieldPoint::new(Vec3::x(), 0.0);
        // ∇·E truncation h²/6 Σ ∂ᵢ³Eᵢ = h²/6 (−24 − 9 − 9) at (1, 0, 0)
        let r = maxwell_residuals(&origin(), &p, 1e-3, TOL).unwrap();
        assert_abs_diff_eq!(r.gauss_e, 7e-6, epsilon = 1e-8);
        assert!(r.gauss_b <= 1e-10 && r.gauge_analytic <= 1e-10);
        assert!(r.max_relative() <= 1e-4);
        let r = maxwell_residuals(&origin(), &p, 1e-4, TOL).unwrap();
        for (name, v) in ResidualReport::NAMES.iter().zip(r.residuals()) {
            assert!(v <= 1e-6, "{name} = {v}");
        }
    }

    #[test]
    fn circular_residuals_converge_at_second_order() {
        let traj = Trajectory::circular(1.0, 0.5).unwrap();
        let p = FieldPoint::new(Vec3::new(0.0, 0.0, 5.0), 0.0);
        let seq = residual_sequence(&traj, &p, &RESIDUAL_STEPS, TOL).unwrap();
        for w in seq.windows(2) {
            let (coarse, fine) = (w[0].residuals(), w[1].residuals());
            for k in 0..coarse.len() {
                let ratio = coarse[k] / fine[k];
                assert!((3.5..=4.5).contains(&ratio), "{} ratio {ratio}", ResidualReport::NAMES[k]);
            }
        }
        assert!(seq[0].gauge_analytic <= 1e-10);
        let r = maxwell_residuals(&traj, &p, 1e-3, TOL).unwrap();
        assert!(r.max_relative() <= 1e-4, "{r:?}");
        assert!((3.5..=4.5).contains(&seq[1].order_estimate));
    }

    #[test]
    fn static_derivative_table() {
        let t = derivative_table_check(&origin(), &FieldPoint::new(Vec3::new(1.0, 2.0, -0.5), 0.3), 1e-4, TOL).unwrap();
        assert_eq!(t.deviations.len(), 12);
        assert!(t.max_deviation() <= 1e-8, "{t:?}");
    }

    #[test]
    fn derivative_table_converges() {
        let traj = Trajectory::circular(1.0, 0.5).unwrap();
        let p = FieldPoint::new(Vec3::new(1.5, -2.0, 1.0), 0.4);
        let coarse = derivative_table_check(&traj, &p, 2e-3, TOL).unwrap();
        let fine = derivative_table_check(&traj, &p, 1e-3, TOL).unwrap();
        for f in Formula::ALL {
            let ratio = coarse.deviations[&f] / fine.deviations[&f];
            assert!((3.5..=4.5).contains(&ratio), "{f}: {ratio}");
        }
        assert!(derivative_table_check(&traj, &p, 1e-4, TOL).unwrap().max_deviation() <= 1e-6);
    }

    #[test]
    fn uniform_time_derivative_of_delay() {
        let traj = Trajectory::uniform(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.5));
        let p = FieldPoint::new(Vec3::x(), 0.0);
        let dt = fd_partial(&traj, delay_of(&traj), &p, Direction::T, 1e-4, TOL).unwrap();
        assert_abs_diff_eq!(dt, -1.0 / 3.0, epsilon = 1e-8);
        let t = derivative_table_check(&traj, &p, 1e-4, TOL).unwrap();
        assert!(t.deviations[&Formula::DT] <= 1e-8);
    }
}
