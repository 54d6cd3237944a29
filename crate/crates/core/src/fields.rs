//! Fundamental fields of a trajectory and their closed-form first partials.
//!
//! On `G = {(r₁, t) : T > 0}` the fields are
//! `τ`, `T = t − τ`, `r₁₂ = r₁ − r₂(τ)`, `e = r₁₂/T`, `v = w(τ)`, `a = ẇ(τ)`,
//! `u = 1/T` and `z = 1/(1 − ⟨e, v⟩)`. Every first partial derivative is an
//! algebraic expression in these fields, so a [`FieldJet`] is assembled from a
//! single retarded-time solve.
//!
//! A retarded time certified to `tol` perturbs the first-order terms by at most
//! `(1 + |v|·z²)·tol` relative to their scale.

use serde::Serialize;

use crate::retarded::{self, SolverOptions};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3, BASIS};

/// An event `(r₁, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldPoint {
    pub r1: Vec3,
    pub t: f64,
}

/// Differentiation direction in space-time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    T,
    X1,
    X2,
    X3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::T, Direction::X1, Direction::X2, Direction::X3];
    pub const SPACE: [Direction; 3] = [Direction::X1, Direction::X2, Direction::X3];

    pub fn spatial_index(self) -> Option<usize> {
        match self {
            Direction::T => None,
            Direction::X1 => Some(0),
            Direction::X2 => Some(1),
            Direction::X3 => Some(2),
        }
    }
}

impl FieldPoint {
    pub fn new(r1: Vec3, t: f64) -> Self {
        Self { r1, t }
    }

    pub fn shifted(&self, direction: Direction, h: f64) -> Self {
        match direction.spatial_index() {
            None => Self::new(self.r1, self.t + h),
            Some(i) => Self::new(self.r1 + BASIS[i] * h, self.t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalFields {
    pub tau: f64,
    /// `T`
    pub delay: f64,
    pub r12: Vec3,
    pub e: Vec3,
    pub v: Vec3,
    pub a: Vec3,
    pub u: f64,
    pub z: f64,
    /// Certified error of `tau`.
    pub tau_error: f64,
}

/// First partials of the scalar and vector fundamental fields along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Partials {
    pub tau: f64,
    pub delay: f64,
    pub u: f64,
    pub v: Vec3,
    pub e: Vec3,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldJet {
    pub base: FundamentalFields,
    /// `D₁, D₂, D₃`
    pub spatial: [Partials; 3],
    /// `D = ∂/∂t`
    pub time: Partials,
    /// `D²e`
    pub d2e: Vec3,
}

/// Fundamental fields at `p`, refusing points within `tol` of the trajectory.
pub fn fundamental(traj: &Trajectory, p: &FieldPoint, tol: f64) -> Result<FundamentalFields> {
    let sol = retarded::solve(traj, &p.r1, p.t, &SolverOptions::with_tol(tol))?;
    let k = traj.kinematics(sol.tau);
    let r12 = p.r1 - k.position;
    let delay = r12.norm();
    if !(delay > tol) || !(sol.delay > tol) {
        return Err(Error::OutsideG {
            x: p.r1.x,
            y: p.r1.y,
            z: p.r1.z,
            t: p.t,
            delay: delay.min(sol.delay),
            threshold: tol,
        });
    }
    let u = 1.0 / delay;
    let e = r12 * u;
    Ok(FundamentalFields {
        tau: sol.tau,
        delay,
        r12,
        e,
        v: k.velocity,
        a: k.acceleration,
        u,
        z: 1.0 / (1.0 - e.dot(&k.velocity)),
        tau_error: sol.certified_error,
    })
}

pub fn jet(traj: &Trajectory, p: &FieldPoint, tol: f64) -> Result<FieldJet> {
    fundamental(traj, p, tol).map(|f| FieldJet::from_fields(&f))
}

impl FundamentalFields {
    pub fn e_dot_a(&self) -> f64 {
        self.e.dot(&self.a)
    }

    pub fn v_dot_v(&self) -> f64 {
        self.v.norm_squared()
    }

    /// Spatial partials `Dᵢ` of every fundamental field.
    pub fn spatial_partial(&self, i: usize) -> Partials {
        let Self { e, v, a, u, z, .. } = *self;
        let ei = e[i];
        let (ea, vv) = (self.e_dot_a(), self.v_dot_v());
        Partials {
            delay: z * ei,
            u: -z * u * u * ei,
            v: a * (-ei * z),
            tau: -z * ei,
            e: e * (-u * z * ei) + BASIS[i] * u + v * (u * z * ei),
            z: -z * z * z * ei * ea - u * z * z * z * ei + u * z * z * ei + u * z * z * v[i] + u * z * z * z * ei * vv,
        }
    }

    /// Time partials `D` of every fundamental field.
    pub fn time_partial(&self) -> Partials {
        let Self { e, v, a, u, z, .. } = *self;
        let (ea, vv) = (self.e_dot_a(), self.v_dot_v());
        Partials {
            delay: 1.0 - z,
            u: z * u * u - u * u,
            tau: z,
            v: a * z,
            e: e * (-u) + e * (u * z) - v * (u * z),
            z: u * z - 2.0 * u * z * z + z * z * z * ea + u * z * z * z - u * z * z * z * vv,
        }
    }
}

impl FieldJet {
    pub fn from_fields(f: &FundamentalFields) -> Self {
        let spatial = [f.spatial_partial(0), f.spatial_partial(1), f.spatial_partial(2)];
        let d = f.time_partial();
        let (e, v, u, z) = (f.e, f.v, f.u, f.z);
        // product rule on De = −ue + uze − uzv
        let d2e = -e * d.u - d.e * u + e * (d.u * z) + e * (u * d.z) + d.e * (u * z)
            - v * (d.u * z)
            - v * (u * d.z)
            - d.v * (u * z);
        Self {
            base: *f,
            spatial,
            time: d,
            d2e,
        }
    }

    pub fn partial(&self, direction: Direction) -> &Partials {
        match direction.spatial_index() {
            None => &self.time,
            Some(i) => &self.spatial[i],
        }
    }

    pub fn grad_u(&self) -> Vec3 {
        Vec3::new(self.spatial[0].u, self.spatial[1].u, self.spatial[2].u)
    }

    pub fn grad_z(&self) -> Vec3 {
        Vec3::new(self.spatial[0].z, self.spatial[1].z, self.spatial[2].z)
    }
}
