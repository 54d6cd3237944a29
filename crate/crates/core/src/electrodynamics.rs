//! Electric and magnetic fields of a moving point charge.
//!
//! Three independent routes to `E` are provided:
//!
//! * [`e_feynman`]: `E = u²e + u⁻¹D(u²e) + D²e`, built from the field jet;
//! * [`e_explicit`]: the seven-term closed form in `(e, v, a, u, z)`;
//! * [`e_from_potentials`]: `E = −∇φ − DA` with `A = uzv`, `φ = uz`.
//!
//! `B` is `e × E`, or independently `∇ × A`. Unit charge, `c = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fields::{self, FieldJet, FieldPoint, FundamentalFields};
use crate::trajectory::Trajectory;
use crate::{Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Feynman,
    Explicit,
    Potentials,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Feynman, Formulation::Explicit, Formulation::Potentials];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmState {
    pub e_field: Vec3,
    pub b_field: Vec3,
    pub a_potential: Vec3,
    pub phi: f64,
    pub method: Formulation,
}

pub fn e_feynman(jet: &FieldJet) -> Vec3 {
    let f = &jet.base;
    let (u, e) = (f.u, f.e);
    let (du, de) = (jet.time.u, jet.time.e);
    // D(u²e) = 2u(Du)e + u²(De)
    let d_u2e = e * (2.0 * u * du) + de * (u * u);
    e * (u * u) + d_u2e / u + jet.d2e
}

pub fn e_explicit(f: &FundamentalFields) -> Vec3 {
    let FundamentalFields { e, v, a, u, z, .. } = *f;
    let ea = e.dot(&a);
    let vv = v.norm_squared();
    let z2 = z * z;
    let z3 = z2 * z;
    let u2 = u * u;
    -a * (u * z2) + e * (u * z3 * ea) - v * (u * z3 * ea) + e * (u2 * z3) - e * (u2 * z3 * vv) - v * (u2 * z3)
        + v * (u2 * z3 * vv)
}

/// Velocity (Coulomb-like, `∝ u²`) part of `E`: `u²z³(1 − |v|²)(e − v)`.
pub fn e_velocity_part(f: &FundamentalFields) -> Vec3 {
    (f.e - f.v) * (f.u * f.u * f.z.powi(3) * (1.0 - f.v.norm_squared()))
}

/// Acceleration (radiation, `∝ u`) part of `E`.
pub fn e_acceleration_part(f: &FundamentalFields) -> Vec3 {
    let z3 = f.z.powi(3);
    (f.e - f.v) * (f.u * z3 * f.e.dot(&f.a)) - f.a * (f.u * f.z * f.z)
}

/// Liénard-Wiechert potentials `(A, φ) = (uzv, uz)`.
pub fn potentials(f: &FundamentalFields) -> (Vec3, f64) {
    let phi = f.u * f.z;
    (f.v * phi, phi)
}

pub fn e_from_potentials(jet: &FieldJet) -> Vec3 {
    let FundamentalFields { v, u, z, .. } = jet.base;
    let grad_phi = Vec3::from_fn(|i, _| jet.spatial[i].u * z + u * jet.spatial[i].z);
    let d = &jet.time;
    let da = v * (d.u * z) + v * (u * d.z) + d.v * (u * z);
    -grad_phi - da
}

/// `Dᵢ A` for `A = uzv`.
fn grad_a(jet: &FieldJet) -> [Vec3; 3] {
    let FundamentalFields { v, u, z, .. } = jet.base;
    jet.spatial.map(|p| v * (p.u * z) + v * (u * p.z) + p.v * (u * z))
}

pub fn b_field(f: &FundamentalFields, e_field: &Vec3) -> Vec3 {
    f.e.cross(e_field)
}

/// `∇ × A` from the analytic partials.
pub fn b_from_potentials(jet: &FieldJet) -> Vec3 {
    let d = grad_a(jet);
    Vec3::new(d[1].z - d[2].y, d[2].x - d[0].z, d[0].y - d[1].x)
}

/// Lorenz-gauge residual `∇·A + Dφ`, evaluated analytically.
pub fn gauge_residual(jet: &FieldJet) -> f64 {
    let d = grad_a(jet);
    let div_a = d[0].x + d[1].y + d[2].z;
    let FundamentalFields { u, z, .. } = jet.base;
    div_a + jet.time.u * z + u * jet.time.z
}

impl EmState {
    pub fn from_jet(jet: &FieldJet, method: Formulation) -> Self {
        let f = &jet.base;
        let (a_potential, phi) = potentials(f);
        let (e_field, b_field) = match method {
            Formulation::Feynman => {
                let e = e_feynman(jet);
                (e, b_field(f, &e))
            }
            Formulation::Explicit => {
                let e = e_explicit(f);
                (e, b_field(f, &e))
            }
            Formulation::Potentials => (e_from_potentials(jet), b_from_potentials(jet)),
        };
        Self {
            e_field,
            b_field,
            a_potential,
            phi,
            method,
        }
    }

    /// Same as [`EmState::from_jet`] for the explicit route, which needs no jet.
    pub fn explicit(f: &FundamentalFields) -> Self {
        let e = e_explicit(f);
        let (a_potential, phi) = potentials(f);
        Self {
            e_field: e,
            b_field: b_field(f, &e),
            a_potential,
            phi,
            method: Formulation::Explicit,
        }
    }
}

pub fn em_state(traj: &Trajectory, p: &FieldPoint, tol: f64, method: Formulation) -> Result<EmState> {
    let f = fields::fundamental(traj, p, tol)?;
    Ok(match method {
        Formulation::Explicit => EmState::explicit(&f),
        _ => EmState::from_jet(&FieldJet::from_fields(&f), method),
    })
}

/// Evaluates disjoint points in parallel on the current rayon pool; output order matches input.
pub fn evaluate_batch(traj: &Trajectory, points: &[FieldPoint], tol: f64, method: Formulation) -> Vec<Result<EmState>> {
    points.par_iter().map(|p| em_state(traj, p, tol, method)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::jet;
    use crate::retarded;
    use crate::test_support::{arb_point, arb_trajectory};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn origin() -> Trajectory {
        Trajectory::stationary(Vec3::zeros())
    }

    fn uniform() -> Trajectory {
        Trajectory::uniform(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.5))
    }

    #[test]
    fn coulomb_examples() {
        let j = jet(&origin(), &FieldPoint::new(Vec3::x(), 0.0), 1e-12).unwrap();
        assert_abs_diff_eq!(e_feynman(&j), Vec3::x(), epsilon = 1e-15);
        let j = jet(&origin(), &FieldPoint::new(Vec3::new(0.0, 0.0, 2.0), 3.0), 1e-12).unwrap();
        assert_abs_diff_eq!(e_feynman(&j), Vec3::new(0.0, 0.0, 0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(e_explicit(&j.base), Vec3::new(0.0, 0.0, 0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(e_from_potentials(&j), Vec3::new(0.0, 0.0, 0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(b_field(&j.base, &e_explicit(&j.base)), Vec3::zeros());
        let (a, phi) = potentials(&j.base);
        assert_eq!((a, phi), (Vec3::zeros(), 0.5));
    }

    #[test]
    fn uniform_motion_fields() {
        // hand-evaluated: u = √3/2, z = 4/3, v = (0,0,½), a = 0
        let j = jet(&uniform(), &FieldPoint::new(Vec3::x(), 0.0), 1e-14).unwrap();
        let e = e_explicit(&j.base);
        let s3 = 3f64.sqrt();
        assert_abs_diff_eq!(e, Vec3::new(2.0 / s3, 0.0, 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(e_feynman(&j), e, epsilon = 1e-10);
        assert_abs_diff_eq!(e_from_potentials(&j), e, epsilon = 1e-10);
        assert_abs_diff_eq!(b_field(&j.base, &e), Vec3::new(0.0, 1.0 / s3, 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(b_from_potentials(&j), Vec3::new(0.0, 1.0 / s3, 0.0), epsilon = 1e-12);
        let (a, phi) = potentials(&j.base);
        assert_abs_diff_eq!(phi, 2.0 / s3, epsilon = 1e-12);
        assert_abs_diff_eq!(a, Vec3::new(0.0, 0.0, 1.0 / s3), epsilon = 1e-12);
    }

    #[test]
    fn uniform_field_matches_boosted_coulomb() {
        // Independent oracle: the field of a uniformly moving charge measured from
        // its present position R is (1 − v²) R / (R² − |v × R|²)^{3/2}.
        let v = Vec3::new(0.0, 0.0, 0.5);
        for (p, t) in [(Vec3::x(), 0.0), (Vec3::new(0.3, -1.2, 2.0), 1.5), (Vec3::new(-2.0, 0.1, -0.4), -3.0)] {
            let present = p - v * t;
            let denom = (present.norm_squared() - v.cross(&present).norm_squared()).powf(1.5);
            let want = present * ((1.0 - v.norm_squared()) / denom);
            let got = em_state(&uniform(), &FieldPoint::new(p, t), 1e-14, Formulation::Explicit).unwrap();
            assert_abs_diff_eq!(got.e_field, want, epsilon = 1e-12);
            assert_abs_diff_eq!(got.b_field, v.cross(&want), epsilon = 1e-12);
        }
    }

    #[test]
    fn radiation_term_decays_as_one_over_distance() {
        let traj = Trajectory::circular(1.0, 0.5).unwrap();
        let dir = Vec3::new(1.0, 2.0, 0.5).normalize();
        let mut scaled = vec![];
        for dist in [10.0, 20.0, 40.0, 80.0] {
            let f = fields::fundamental(&traj, &FieldPoint::new(dir * dist, 0.0), 1e-12).unwrap();
            let rad = e_explicit(&f) - e_velocity_part(&f);
            assert_abs_diff_eq!(rad, e_acceleration_part(&f), epsilon = 1e-14);
            scaled.push(rad.norm() * f.delay);
            // velocity part falls off one power faster
            assert!(e_velocity_part(&f).norm() * f.delay * f.delay < 10.0);
        }
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
        assert!(hi < 1.0 && lo > 0.0, "{scaled:?}");
    }

    #[test]
    fn batch_matches_pointwise() {
        let traj = Trajectory::circular(1.0, 0.5).unwrap();
        let pts: Vec<_> = (0..50)
            .map(|i| FieldPoint::new(Vec3::new(2.0 + i as f64 * 0.1, 1.0, -0.5), 0.3 * i as f64))
            .collect();
        let batch = evaluate_batch(&traj, &pts, 1e-12, Formulation::Feynman);
        for (p, b) in pts.iter().zip(batch) {
            assert_eq!(b.unwrap(), em_state(&traj, p, 1e-12, Formulation::Feynman).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn formulations_agree(traj in arb_trajectory(), (r1, t) in arb_point()) {
            prop_assume!(retarded::in_g(&traj, &r1, t, 0.05));
            let j = jet(&traj, &FieldPoint::new(r1, t), 1e-12).unwrap();
            let ex = e_explicit(&j.base);
            let scale = ex.norm();
            prop_assert!((e_feynman(&j) - ex).norm() <= 1e-9 * scale);
            prop_assert!((e_from_potentials(&j) - ex).norm() <= 1e-9 * scale);
            let b = b_field(&j.base, &ex);
            prop_assert!((b_from_potentials(&j) - b).norm() <= 1e-9 * scale);
            prop_assert!(b.dot(&j.base.e).abs() <= 1e-12 * scale);
            prop_assert!(b.dot(&ex).abs() <= 1e-12 * scale * scale);
            let f = &j.base;
            let gscale = f.u * f.u * f.z.powi(3) * (1.0 + f.z * f.a.norm() / f.u.max(1e-300));
            prop_assert!(gauge_residual(&j).abs() <= 1e-12 * gscale.max(1.0));
            let (_, phi) = potentials(f);
            prop_assert!((phi * f.delay / f.z - 1.0).abs() <= 1e-14);
        }
    }
}
