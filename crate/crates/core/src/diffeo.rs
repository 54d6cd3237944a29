//! The diffeomorphism `φ: (r, t) ↦ (τ, T, e)` of `G` onto `G₁ = ℝ × (0,∞) × S²`
//! and its inverse `ψ: (τ, T, e) ↦ (r₂(τ) + Te, τ + T)`.
//!
//! `S²` is covered by six hemisphere charts. A chart on the `±x_k` hemisphere uses
//! the cyclically next coordinates `(e_{k+1}, e_{k+2})`; with that ordering the
//! Jacobian `∂(τ, T, e_{k+1}, e_{k+2})/∂(t, x₁, x₂, x₃)` equals `z u² e_k` for
//! every chart, negative on the minus hemispheres.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::fields::{self, Direction, FieldPoint, FundamentalFields};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

/// Minimum `|e_k|` on the chart's own axis.
pub const CHART_MARGIN: f64 = 0.577_350_269_189_625_8; // 1/√3

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldPoint {
    pub tau: f64,
    pub delay: f64,
    pub e: Vec3,
}

impl ManifoldPoint {
    pub fn new(tau: f64, delay: f64, e: Vec3) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::invalid_argument("tau", "must be finite"));
        }
        if !(delay > 0.0) || !delay.is_finite() {
            return Err(Error::invalid_argument("T", format!("{delay} must be finite and positive")));
        }
        if !((e.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::invalid_argument("e", format!("|e| = {} is not 1", e.norm())));
        }
        Ok(Self { tau, delay, e })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ChartAxis {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Chart {
    pub axis: ChartAxis,
}

impl Chart {
    pub const ALL: [Chart; 6] = [
        Chart { axis: ChartAxis::PlusX },
        Chart { axis: ChartAxis::MinusX },
        Chart { axis: ChartAxis::PlusY },
        Chart { axis: ChartAxis::MinusY },
        Chart { axis: ChartAxis::PlusZ },
        Chart { axis: ChartAxis::MinusZ },
    ];

    pub fn new(axis: ChartAxis) -> Self {
        Self { axis }
    }

    /// Index of the omitted coordinate.
    pub fn omitted(&self) -> usize {
        match self.axis {
            ChartAxis::PlusX | ChartAxis::MinusX => 0,
            ChartAxis::PlusY | ChartAxis::MinusY => 1,
            ChartAxis::PlusZ | ChartAxis::MinusZ => 2,
        }
    }

    pub fn sign(&self) -> f64 {
        match self.axis {
            ChartAxis::PlusX | ChartAxis::PlusY | ChartAxis::PlusZ => 1.0,
            _ => -1.0,
        }
    }

    /// Indices of the two local coordinates, in cyclic order after the omitted one.
    pub fn local_indices(&self) -> (usize, usize) {
        let k = self.omitted();
        ((k + 1) % 3, (k + 2) % 3)
    }

    /// Chart whose axis carries the largest `|e_k|` (always `≥ 1/√3`).
    pub fn select(e: &Vec3) -> Self {
        let k = e.iamax();
        let axis = match (k, e[k] >= 0.0) {
            (0, true) => ChartAxis::PlusX,
            (0, false) => ChartAxis::MinusX,
            (1, true) => ChartAxis::PlusY,
            (1, false) => ChartAxis::MinusY,
            (_, true) => ChartAxis::PlusZ,
            (_, false) => ChartAxis::MinusZ,
        };
        Self { axis }
    }

    pub fn contains(&self, e: &Vec3) -> bool {
        self.sign() * e[self.omitted()] >= CHART_MARGIN * (1.0 - 1e-12)
    }

    pub fn local(&self, e: &Vec3) -> (f64, f64) {
        let (i, j) = self.local_indices();
        (e[i], e[j])
    }

    pub fn embed(&self, local: (f64, f64)) -> Vec3 {
        let (i, j) = self.local_indices();
        let mut e = Vec3::zeros();
        e[i] = local.0;
        e[j] = local.1;
        e[self.omitted()] = self.sign() * (1.0 - local.0 * local.0 - local.1 * local.1).max(0.0).sqrt();
        e
    }

    /// Closed-form Jacobian determinant `z u² e_k` in this chart.
    pub fn jacobian(&self, f: &FundamentalFields) -> f64 {
        f.z * f.u * f.u * f.e[self.omitted()]
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.axis {
            ChartAxis::PlusX => "+x",
            ChartAxis::MinusX => "-x",
            ChartAxis::PlusY => "+y",
            ChartAxis::MinusY => "-y",
            ChartAxis::PlusZ => "+z",
            ChartAxis::MinusZ => "-z",
        };
        f.write_str(name)
    }
}

pub fn phi_map(traj: &Trajectory, p: &FieldPoint, tol: f64) -> Result<ManifoldPoint> {
    let f = fields::fundamental(traj, p, tol)?;
    Ok(ManifoldPoint {
        tau: f.tau,
        delay: f.delay,
        e: f.e,
    })
}

pub fn psi_map(traj: &Trajectory, m: &ManifoldPoint) -> FieldPoint {
    FieldPoint::new(traj.position(m.tau) + m.e * m.delay, m.tau + m.delay)
}

/// Field value in manifold coordinates: `field(ψ(m))`.
pub fn pullback<V>(
    traj: &Trajectory,
    field: impl Fn(&FieldPoint) -> Result<V>,
    m: &ManifoldPoint,
) -> Result<V> {
    field(&psi_map(traj, m))
}

/// Fundamental fields written directly as functions of `(τ, T, e)`:
/// `v = w(τ)`, `a = ẇ(τ)`, `u = 1/T`, `z = 1/(1 − ⟨e, w(τ)⟩)`, `r₁₂ = Te`.
pub fn represent(traj: &Trajectory, m: &ManifoldPoint) -> FundamentalFields {
    let k = traj.kinematics(m.tau);
    FundamentalFields {
        tau: m.tau,
        delay: m.delay,
        r12: m.e * m.delay,
        e: m.e,
        v: k.velocity,
        a: k.acceleration,
        u: 1.0 / m.delay,
        z: 1.0 / (1.0 - m.e.dot(&k.velocity)),
        tau_error: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub chart: Chart,
    pub h: f64,
    /// Determinant of the central-difference Jacobian at step `h`.
    pub numeric: f64,
    /// Same at step `h/2`.
    pub numeric_half: f64,
    pub closed_form: f64,
}

impl JacobianCheck {
    pub fn relative_error(&self) -> f64 {
        ((self.numeric - self.closed_form) / self.closed_form).abs()
    }

    /// Error ratio between steps `h` and `h/2`; near 4 in the truncation regime.
    pub fn richardson_ratio(&self) -> f64 {
        (self.numeric - self.closed_form).abs() / (self.numeric_half - self.closed_form).abs()
    }
}

/// Scale-aware differencing step `10⁻⁴·max(1, T)`.
pub fn default_jacobian_step(delay: f64) -> f64 {
    1e-4 * delay.max(1.0)
}

/// Compares the numeric 4×4 Jacobian of `(τ, T, e_i, e_j)` against `z u² e_k`.
pub fn jacobian_check(traj: &Trajectory, p: &FieldPoint, chart: Chart, h: f64, tol: f64) -> Result<JacobianCheck> {
    if !(h > 0.0) {
        return Err(Error::invalid_argument("h", "step must be positive"));
    }
    let f = fields::fundamental(traj, p, tol)?;
    if !chart.contains(&f.e) {
        return Err(Error::ChartDomain {
            chart: chart.to_string(),
            message: format!(
                "omitted coordinate e[{}] = {} is closer to the equator than 1/sqrt(3)",
                chart.omitted(),
                f.e[chart.omitted()]
            ),
        });
    }
    let numeric = numeric_jacobian(traj, p, chart, h, tol)?;
    let numeric_half = numeric_jacobian(traj, p, chart, 0.5 * h, tol)?;
    Ok(JacobianCheck {
        chart,
        h,
        numeric,
        numeric_half,
        closed_form: chart.jacobian(&f),
    })
}

fn numeric_jacobian(traj: &Trajectory, p: &FieldPoint, chart: Chart, h: f64, tol: f64) -> Result<f64> {
    let (i, j) = chart.local_indices();
    let coords = |q: &FieldPoint| -> Result<[f64; 4]> {
        let f = fields::fundamental(traj, q, tol)?;
        Ok([f.tau, f.delay, f.e[i], f.e[j]])
    };
    let mut m = Matrix4::zeros();
    for (row, d) in Direction::ALL.into_iter().enumerate() {
        let plus = coords(&p.shifted(d, h))?;
        let minus = coords(&p.shifted(d, -h))?;
        for col in 0..4 {
            m[(row, col)] = (plus[col] - minus[col]) / (2.0 * h);
        }
    }
    Ok(m.determinant())
}
