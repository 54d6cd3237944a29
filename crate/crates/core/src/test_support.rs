//! Shared generators for property tests.

use proptest::prelude::*;

use crate::trajectory::{Circular, Oscillation, Trajectory};
use crate::Vec3;

pub fn arb_vec(scale: f64) -> impl Strategy<Value = Vec3> {
    (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn arb_unit() -> impl Strategy<Value = Vec3> {
    arb_vec(1.0).prop_filter("nonzero", |v| v.norm() > 0.1).prop_map(|v| v.normalize())
}

/// Admissible trajectories of every kind with speeds up to 0.9.
pub fn arb_trajectory() -> impl Strategy<Value = Trajectory> {
    prop_oneof![
        arb_vec(2.0).prop_map(Trajectory::stationary),
        (arb_vec(2.0), arb_unit(), 0.0f64..0.9).prop_map(|(p, d, s)| Trajectory::uniform(p, d * s)),
        (arb_vec(1.0), 0.2f64..2.0, 0.05f64..0.9, -3.0f64..3.0, arb_unit(), any::<bool>()).prop_map(
            |(c, r, speed, phase, n, flip)| {
                let omega = if flip { -speed / r } else { speed / r };
                Trajectory::Circular(Circular::new(c, r, omega, phase, n).unwrap())
            }
        ),
        (arb_vec(1.0), arb_unit(), 0.1f64..1.5, 0.05f64..0.9, -3.0f64..3.0).prop_map(|(c, d, amp, speed, phase)| {
            Trajectory::LinearOscillation(Oscillation::new(c, d * amp, speed / amp, phase).unwrap())
        }),
        spline(),
    ]
}

fn spline() -> impl Strategy<Value = Trajectory> {
    (3usize..8, any::<u64>()).prop_map(|(n, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut t = -4.0;
        let mut p = Vec3::zeros();
        let (mut ts, mut ps, mut vs) = (vec![], vec![], vec![]);
        for _ in 0..n {
            let v = Vec3::new(rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15));
            ts.push(t);
            ps.push(p);
            vs.push(v);
            let h = rng.gen_range(0.5..2.0);
            // chord and knot speeds ≤ 0.26 keep the Hermite speed below 0.8
            p += Vec3::new(rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15)) * h;
            t += h;
        }
        Trajectory::piecewise_cubic(ts, ps, vs).unwrap()
    })
}

pub fn arb_point() -> impl Strategy<Value = (Vec3, f64)> {
    (arb_vec(6.0), -8.0f64..8.0)
}
