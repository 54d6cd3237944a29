//! Certified solver for the retarded time.
//!
//! For an admissible trajectory and an event `(r₁, t)` the map
//! `f(s) = t − |r₁ − r₂(s)|` sends `(−∞, t]` into itself and is a contraction with
//! constant `v₁ = q(t)`, the speed bound at stopping time `t`. Its unique fixed
//! point is the retarded time `τ`. Every returned solution carries the
//! a-posteriori certificate `|τ − f(x)| ≤ v₁/(1 − v₁)·|f(x) − x|`, which stays
//! valid when Newton steps on `g(s) = s − f(s)` are interleaved with the Picard
//! iteration.

use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 1_000_000;

/// First iterate of the fixed-point sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Start {
    /// `s₀ = t`, the observation time.
    #[default]
    Observation,
    /// Any `s₀ ≤ t`.
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Interleave Newton steps after the first two Picard steps.
    pub newton: bool,
    pub start: Start,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            max_iterations: MAX_ITERATIONS,
            newton: true,
            start: Start::Observation,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn picard_only(tol: f64) -> Self {
        Self {
            tol,
            newton: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetardedSolution {
    pub tau: f64,
    /// `T = t − τ`
    pub delay: f64,
    pub iterations: usize,
    /// Certified bound on `|τ − τ_exact|`.
    pub certified_error: f64,
    /// Contraction constant `v₁` used for the certificate.
    pub speed_bound: f64,
}

/// `τ(r₁, t)` with default options and tolerance `tol`.
pub fn retarded_time(traj: &Trajectory, r1: &Vec3, t: f64, tol: f64) -> Result<RetardedSolution> {
    solve(traj, r1, t, &SolverOptions::with_tol(tol))
}

/// Delay `T = t − τ`, the light travel time from the emission event.
pub fn delay(traj: &Trajectory, r1: &Vec3, t: f64, tol: f64) -> Result<f64> {
    retarded_time(traj, r1, t, tol).map(|s| s.delay)
}

/// Whether `(r₁, t)` lies in `G` at resolution `tol`, i.e. `T > tol`.
pub fn in_g(traj: &Trajectory, r1: &Vec3, t: f64, tol: f64) -> bool {
    matches!(delay(traj, r1, t, tol), Ok(d) if d > tol)
}

pub fn solve(traj: &Trajectory, r1: &Vec3, t: f64, opts: &SolverOptions) -> Result<RetardedSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid_argument("tol", format!("{} must be positive", opts.tol)));
    }
    if !t.is_finite() || r1.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid_argument("point", "coordinates must be finite"));
    }
    let v1 = traj.speed_bound(t)?;
    let mut x = start_value(opts.start, t)?;
    let gain = v1 / (1.0 - v1);

    let mut use_newton = opts.newton;
    let mut prev_step = f64::INFINITY;
    let mut last_bound = f64::INFINITY;
    for n in 1..=opts.max_iterations {
        let r2 = traj.position(x);
        let fx = t - (r1 - r2).norm();
        let step = (fx - x).abs();
        let bound = gain * step;
        // below this step size the residual is rounding noise
        let floor = 8.0 * f64::EPSILON * (t.abs() + x.abs() + r1.norm() + r2.norm());
        if bound <= opts.tol || step <= floor {
            let certified_error = if bound <= opts.tol { bound } else { bound.max(floor / (1.0 - v1)) };
            return Ok(RetardedSolution {
                tau: fx,
                delay: t - fx,
                iterations: n,
                certified_error,
                speed_bound: v1,
            });
        }
        last_bound = bound;

        x = if use_newton && n >= 2 {
            if step >= prev_step {
                use_newton = false;
                fx
            } else {
                newton_step(traj, r1, x, fx, r2).filter(|&s| s <= t).unwrap_or(fx)
            }
        } else {
            fx
        };
        prev_step = step;
    }
    Err(Error::IterationLimit {
        iterations: opts.max_iterations,
        tol: opts.tol,
        bound: last_bound,
    })
}

/// Newton step for `g(s) = s − f(s)`, where `g′(s) = 1 − ⟨e(s), w(s)⟩ ≥ 1 − v₁`.
fn newton_step(traj: &Trajectory, r1: &Vec3, x: f64, fx: f64, r2: Vec3) -> Option<f64> {
    let sep = r1 - r2;
    let dist = sep.norm();
    let slope = if dist > 0.0 {
        1.0 - sep.dot(&traj.velocity(x)) / dist
    } else {
        1.0
    };
    let next = x - (x - fx) / slope;
    next.is_finite().then_some(next)
}

fn start_value(start: Start, t: f64) -> Result<f64> {
    match start {
        Start::Observation => Ok(t),
        Start::At(s) if s.is_finite() && s <= t => Ok(s),
        Start::At(s) => Err(Error::invalid_argument("start", format!("s0 = {s} must be finite and <= t = {t}"))),
    }
}

/// The plain Picard sequence `s₀, s₁ = f(s₀), …, s_n`.
pub fn picard_iterates(traj: &Trajectory, r1: &Vec3, t: f64, start: Start, n: usize) -> Result<Vec<f64>> {
    let mut s = start_value(start, t)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(s);
    for _ in 0..n {
        s = t - (r1 - traj.position(s)).norm();
        out.push(s);
    }
    Ok(out)
}

/// A-priori bound `|τ − s_n| ≤ v₁ⁿ/(1 − v₁)·|s₁ − s₀|`.
pub fn a_priori_bound(speed_bound: f64, n: usize, first_step: f64) -> f64 {
    speed_bound.powi(n as i32) / (1.0 - speed_bound) * first_step.abs()
}

/// Smallest `n` whose a-priori bound is at most `tol`.
pub fn picard_steps_needed(speed_bound: f64, first_step: f64, tol: f64) -> usize {
    if first_step == 0.0 || a_priori_bound(speed_bound, 0, first_step) <= tol {
        return 0;
    }
    if speed_bound == 0.0 {
        return 1;
    }
    let n = ((tol * (1.0 - speed_bound) / first_step.abs()).ln() / speed_bound.ln()).ceil();
    let mut n = n.max(0.0) as usize;
    while a_priori_bound(speed_bound, n, first_step) > tol {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{arb_point, arb_trajectory};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn uniform() -> Trajectory {
        Trajectory::uniform(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.5))
    }

    #[test]
    fn static_source_converges_in_one_step() {
        let s = retarded_time(&Trajectory::stationary(Vec3::zeros()), &Vec3::x(), 0.0, 1e-12).unwrap();
        assert_eq!(s.tau, -1.0);
        assert_eq!(s.iterations, 1);
        assert_eq!(s.speed_bound, 0.0);
        assert_eq!(s.certified_error, 0.0);
    }

    #[test]
    fn uniform_source_matches_quadratic_root() {
        // τ² = 1 + 0.25τ² with τ < 0
        let want = -2.0 / 3f64.sqrt();
        for opts in [SolverOptions::with_tol(1e-13), SolverOptions::picard_only(1e-13)] {
            let s = solve(&uniform(), &Vec3::x(), 0.0, &opts).unwrap();
            assert_abs_diff_eq!(s.tau, want, epsilon = 1e-12);
            assert!(s.certified_error <= 1e-13);
            assert!((s.tau - want).abs() <= s.certified_error + 1e-15);
        }
    }

    #[test]
    fn newton_needs_fewer_iterations() {
        let fast = Trajectory::circular(1.0, 0.95).unwrap();
        let p = Vec3::new(2.0, -1.0, 0.5);
        let a = solve(&fast, &p, 3.0, &SolverOptions::with_tol(1e-13)).unwrap();
        let b = solve(&fast, &p, 3.0, &SolverOptions::picard_only(1e-13)).unwrap();
        assert!(a.iterations < b.iterations, "{} vs {}", a.iterations, b.iterations);
        assert!((a.tau - b.tau).abs() <= a.certified_error + b.certified_error + 1e-15);
    }

    #[test]
    fn iterates_obey_a_priori_bound() {
        let want = -2.0 / 3f64.sqrt();
        let it = picard_iterates(&uniform(), &Vec3::x(), 0.0, Start::Observation, 40).unwrap();
        let first = it[1] - it[0];
        assert_abs_diff_eq!(first.abs(), 1.0);
        for (n, s) in it.iter().enumerate() {
            assert!((want - s).abs() <= a_priori_bound(0.5, n, first) + 1e-15);
            assert!((want - s).abs() <= 2.0 * 0.5f64.powi(n as i32) + 1e-15);
        }
    }

    #[test]
    fn steps_needed_is_minimal() {
        let n = picard_steps_needed(0.5, 1.0, 1e-12);
        assert!(a_priori_bound(0.5, n, 1.0) <= 1e-12);
        assert!(a_priori_bound(0.5, n - 1, 1.0) > 1e-12);
        assert_eq!(picard_steps_needed(0.0, 3.0, 1e-12), 1);
    }

    #[test]
    fn delay_examples() {
        let st = Trajectory::stationary(Vec3::zeros());
        assert_eq!(delay(&st, &Vec3::new(0.0, 0.0, 2.0), 3.0, 1e-12).unwrap(), 2.0);
        assert_abs_diff_eq!(delay(&uniform(), &Vec3::x(), 0.0, 1e-13).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-12);
        let circ = Trajectory::circular(1.0, 0.5).unwrap();
        let on = circ.position(1.7);
        assert!(delay(&circ, &on, 1.7, 1e-12).unwrap().abs() < 1e-12);
    }

    #[test]
    fn membership_in_g() {
        let st = Trajectory::stationary(Vec3::zeros());
        assert!(in_g(&st, &Vec3::x(), 0.0, 1e-12));
        assert!(!in_g(&st, &Vec3::zeros(), 0.0, 1e-12));
        assert!(!in_g(&uniform(), &Vec3::new(0.0, 0.0, 0.5), 1.0, 1e-12));
    }

    #[test]
    fn rejects_bad_input() {
        let fast = Trajectory::uniform(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
        assert!(matches!(retarded_time(&fast, &Vec3::y(), 0.0, 1e-12), Err(Error::NotAdmissible { .. })));
        assert!(retarded_time(&uniform(), &Vec3::y(), 0.0, 0.0).is_err());
        let opts = SolverOptions {
            start: Start::At(1.0),
            ..SolverOptions::default()
        };
        assert!(solve(&uniform(), &Vec3::y(), 0.0, &opts).is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let fast = Trajectory::circular(1.0, 0.999).unwrap();
        let opts = SolverOptions {
            max_iterations: 3,
            ..SolverOptions::picard_only(1e-14)
        };
        assert!(matches!(
            solve(&fast, &Vec3::new(5.0, 0.0, 0.0), 0.0, &opts),
            Err(Error::IterationLimit { iterations: 3, .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn solution_is_unique_from_any_start(traj in arb_trajectory(), (r1, t) in arb_point(), back in 0.0f64..50.0) {
            let tol = 1e-11;
            let a = retarded_time(&traj, &r1, t, tol).unwrap();
            let opts = SolverOptions { start: Start::At(t - back), ..SolverOptions::picard_only(tol) };
            let b = solve(&traj, &r1, t, &opts).unwrap();
            prop_assert!((a.tau - b.tau).abs() <= 2.0 * tol + 1e-13);
            prop_assert!(a.tau <= t && a.delay >= 0.0);
        }

        #[test]
        fn picard_steps_contract(traj in arb_trajectory(), (r1, t) in arb_point()) {
            let v1 = traj.speed_bound(t).unwrap();
            let it = picard_iterates(&traj, &r1, t, Start::Observation, 30).unwrap();
            for w in it.windows(3) {
                prop_assert!((w[2] - w[1]).abs() <= v1 * (w[1] - w[0]).abs() + 1e-13);
            }
        }

        #[test]
        fn retarded_time_is_lipschitz(traj in arb_trajectory(), (r1, t) in arb_point(), (r2, t2) in arb_point()) {
            let tol = 1e-12;
            let stop = t.max(t2);
            let v1 = traj.speed_bound(stop).unwrap();
            let a = retarded_time(&traj, &r1, t, tol).unwrap();
            let b = retarded_time(&traj, &r2, t2, tol).unwrap();
            let lip = ((t - t2).abs() + (r1 - r2).norm()) / (1.0 - v1);
            prop_assert!((a.tau - b.tau).abs() <= lip + 4.0 * tol);
        }

        #[test]
        fn solution_lies_on_light_cone(traj in arb_trajectory(), (r1, t) in arb_point()) {
            let tol = 1e-12;
            let s = retarded_time(&traj, &r1, t, tol).unwrap();
            let sep = (r1 - traj.position(s.tau)).norm_squared();
            let residual = (sep - s.delay * s.delay).abs();
            prop_assert!(residual <= 4.0 * s.delay * tol.max(s.certified_error) + 1e-13, "{residual}");
            prop_assert!((s.tau - (t - (r1 - traj.position(s.tau)).norm())).abs() <= s.certified_error.max(tol) + 1e-13);
        }
    }
}
