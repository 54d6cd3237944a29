//! Grid sampling with chunked parallel evaluation and ordered streaming output.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::electrodynamics::EmState;
use crate::fields::{self, FieldPoint, FundamentalFields};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

/// Points evaluated per parallel chunk; bounds the memory held before writing.
pub const CHUNK: usize = 4096;

/// Default cap on the number of grid points.
pub const DEFAULT_MAX_POINTS: u64 = 100_000_000;

/// `min,max,count` range of one grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn fixed(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            count: 1,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else if k + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
        }
    }
}

impl FromStr for AxisRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("expected `min,max,count`, got `{s}`"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let (min, max) = (num(min)?, num(max)?);
        let count: usize = count.parse().map_err(|e| format!("count `{count}`: {e}"))?;
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(format!("need finite min <= max, got {min}, {max}"));
        }
        if count == 0 {
            return Err("count must be at least 1".into());
        }
        Ok(Self { min, max, count })
    }
}

/// Quantities that can be written per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
pub enum Quantity {
    #[value(name = "tau")]
    Tau,
    #[value(name = "T")]
    Delay,
    #[value(name = "e")]
    E,
    #[value(name = "v")]
    V,
    #[value(name = "a")]
    A,
    #[value(name = "u")]
    U,
    #[value(name = "z")]
    Z,
    #[value(name = "E")]
    EField,
    #[value(name = "B")]
    BField,
    #[value(name = "A")]
    Potential,
    #[value(name = "phi")]
    Phi,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Tau => "tau",
            Quantity::Delay => "T",
            Quantity::E => "e",
            Quantity::V => "v",
            Quantity::A => "a",
            Quantity::U => "u",
            Quantity::Z => "z",
            Quantity::EField => "E",
            Quantity::BField => "B",
            Quantity::Potential => "A",
            Quantity::Phi => "phi",
        }
    }

    fn is_vector(self) -> bool {
        matches!(
            self,
            Quantity::E | Quantity::V | Quantity::A | Quantity::EField | Quantity::BField | Quantity::Potential
        )
    }

    fn is_electromagnetic(self) -> bool {
        matches!(self, Quantity::EField | Quantity::BField | Quantity::Potential | Quantity::Phi)
    }

    fn columns(self) -> Vec<String> {
        if self.is_vector() {
            ["x", "y", "z"].iter().map(|c| format!("{}_{c}", self.name())).collect()
        } else {
            vec![self.name().to_string()]
        }
    }

    /// Components; electromagnetic quantities are multiplied by `scale`.
    fn values(self, f: &FundamentalFields, em: Option<&EmState>, scale: f64) -> Vec<f64> {
        let v3 = |v: Vec3| vec![v.x, v.y, v.z];
        let em = || em.expect("electromagnetic state computed when requested");
        match self {
            Quantity::Tau => vec![f.tau],
            Quantity::Delay => vec![f.delay],
            Quantity::E => v3(f.e),
            Quantity::V => v3(f.v),
            Quantity::A => v3(f.a),
            Quantity::U => vec![f.u],
            Quantity::Z => vec![f.z],
            Quantity::EField => v3(em().e_field * scale),
            Quantity::BField => v3(em().b_field * scale),
            Quantity::Potential => v3(em().a_potential * scale),
            Quantity::Phi => vec![em().phi * scale],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Axis ranges and requested quantities. Points are ordered with `x₁` varying
/// fastest, then `x₂`, `x₃` and `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub x1: AxisRange,
    pub x2: AxisRange,
    pub x3: AxisRange,
    pub t: AxisRange,
    pub quantities: Vec<Quantity>,
}

impl GridSpec {
    pub fn len(&self) -> u128 {
        [self.x1, self.x2, self.x3, self.t].iter().map(|a| a.count as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, max_points: u64) -> Result<()> {
        if self.quantities.is_empty() {
            return Err(Error::invalid_argument("quantities", "at least one quantity is required"));
        }
        if self.len() > u128::from(max_points) {
            return Err(Error::invalid_argument(
                "grid",
                format!("{} points exceed the cap of {max_points}", self.len()),
            ));
        }
        Ok(())
    }

    pub fn point(&self, index: usize) -> FieldPoint {
        let mut k = index;
        let mut next = |a: &AxisRange| {
            let v = a.value(k % a.count);
            k /= a.count;
            v
        };
        let x = next(&self.x1);
        let y = next(&self.x2);
        let z = next(&self.x3);
        let t = next(&self.t);
        FieldPoint::new(Vec3::new(x, y, z), t)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["x1", "x2", "x3", "t"].map(String::from).to_vec();
        h.extend(self.quantities.iter().flat_map(|q| q.columns()));
        h.push("status".into());
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub tol: f64,
    pub scale: f64,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SampleSummary {
    pub rows: usize,
    pub outside_g: usize,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        num(x)
    } else {
        "null".into()
    }
}

/// One output record, including its trailing newline; `None` values mark a point outside `G`.
fn record(grid: &GridSpec, p: &FieldPoint, values: Option<&[Vec<f64>]>, format: Format) -> String {
    let status = if values.is_some() { "ok" } else { "outside_G" };
    let coords = [p.r1.x, p.r1.y, p.r1.z, p.t];
    let mut s = String::new();
    match format {
        Format::Csv => {
            let mut cells: Vec<String> = coords.iter().map(|&c| num(c)).collect();
            for (k, q) in grid.quantities.iter().enumerate() {
                match values {
                    Some(v) => cells.extend(v[k].iter().map(|&x| num(x))),
                    None => cells.extend(q.columns().iter().map(|_| String::new())),
                }
            }
            cells.push(status.into());
            s.push_str(&cells.join(","));
        }
        Format::Jsonl => {
            s.push('{');
            for (name, c) in ["x1", "x2", "x3", "t"].iter().zip(coords) {
                let _ = write!(s, "\"{name}\":{},", json_num(c));
            }
            for (k, q) in grid.quantities.iter().enumerate() {
                let value = match values {
                    None => "null".to_string(),
                    Some(v) if q.is_vector() => {
                        format!("[{}]", v[k].iter().map(|&x| json_num(x)).collect::<Vec<_>>().join(","))
                    }
                    Some(v) => json_num(v[k][0]),
                };
                let _ = write!(s, "\"{}\":{value},", q.name());
            }
            let _ = write!(s, "\"status\":\"{status}\"}}");
        }
    }
    s.push('\n');
    s
}

/// Evaluates one point. Only points off the trajectory are recorded as `outside_G`;
/// every other failure aborts the run.
fn evaluate(traj: &Trajectory, grid: &GridSpec, p: &FieldPoint, opts: &SampleOptions) -> Result<Option<Vec<Vec<f64>>>> {
    let f = match fields::fundamental(traj, p, opts.tol) {
        Ok(f) => f,
        Err(Error::OutsideG { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let em = grid
        .quantities
        .iter()
        .any(|q| q.is_electromagnetic())
        .then(|| EmState::explicit(&f));
    Ok(Some(grid.quantities.iter().map(|q| q.values(&f, em.as_ref(), opts.scale)).collect()))
}

/// Streams the grid to `out` on the current rayon pool. Chunks are evaluated in
/// parallel and written in order, so the output does not depend on thread count.
pub fn sample_grid<W: Write>(traj: &Trajectory, grid: &GridSpec, opts: &SampleOptions, out: &mut W) -> Result<SampleSummary> {
    let io = |e| Error::io(None, e);
    grid.validate(u64::MAX)?;
    if opts.format == Format::Csv {
        writeln!(out, "{}", grid.header().join(",")).map_err(io)?;
    }
    let total = usize::try_from(grid.len())
        .map_err(|_| Error::invalid_argument("grid", "too many points for this platform"))?;
    let mut summary = SampleSummary::default();
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let rows: Vec<Result<(String, bool)>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let p = grid.point(i);
                let values = evaluate(traj, grid, &p, opts)?;
                Ok((record(grid, &p, values.as_deref(), opts.format), values.is_none()))
            })
            .collect();
        for row in rows {
            let (line, outside) = row?;
            out.write_all(line.as_bytes()).map_err(io)?;
            summary.rows += 1;
            summary.outside_g += usize::from(outside);
        }
        start = end;
    }
    out.flush().map_err(io)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(format: Format) -> SampleOptions {
        SampleOptions {
            tol: 1e-12,
            scale: 1.0,
            format,
        }
    }

    fn run(traj: &Trajectory, grid: &GridSpec, format: Format) -> String {
        let mut out = Vec::new();
        sample_grid(traj, grid, &opts(format), &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    fn cells(line: &str) -> Vec<&str> {
        line.split(',').collect()
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("1,2,11".parse::<AxisRange>().unwrap(), AxisRange { min: 1.0, max: 2.0, count: 11 });
        assert!("2,1,3".parse::<AxisRange>().is_err());
        assert!("1,2,0".parse::<AxisRange>().is_err());
        assert!("1,2".parse::<AxisRange>().is_err());
        assert!("1,x,2".parse::<AxisRange>().is_err());
        let a: AxisRange = "1,2,11".parse().unwrap();
        assert_eq!((a.value(0), a.value(10)), (1.0, 2.0));
    }

    #[test]
    fn coulomb_line() {
        let grid = GridSpec {
            x1: "1,2,11".parse().unwrap(),
            x2: AxisRange::fixed(0.0),
            x3: AxisRange::fixed(0.0),
            t: AxisRange::fixed(0.0),
            quantities: vec![Quantity::EField],
        };
        let text = run(&Trajectory::stationary(Vec3::zeros()), &grid, Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,x3,t,E_x,E_y,E_z,status");
        assert_eq!(lines.len(), 12);
        for line in &lines[1..] {
            let c = cells(line);
            let x: f64 = c[0].parse().unwrap();
            let ex: f64 = c[4].parse().unwrap();
            assert!((ex - 1.0 / (x * x)).abs() <= 1e-15);
            assert_eq!(c[7], "ok");
        }
    }

    #[test]
    fn uniform_point_values() {
        let grid = GridSpec {
            x1: AxisRange::fixed(1.0),
            x2: AxisRange::fixed(0.0),
            x3: AxisRange::fixed(0.0),
            t: AxisRange::fixed(0.0),
            quantities: vec![Quantity::Tau, Quantity::Delay, Quantity::Z],
        };
        let traj = Trajectory::uniform(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.5));
        let text = run(&traj, &grid, Format::Csv);
        let row: Vec<f64> = cells(text.lines().nth(1).unwrap())[4..7].iter().map(|c| c.parse().unwrap()).collect();
        assert!((row[0] + 1.1547005).abs() < 1e-7);
        assert!((row[1] - 1.1547005).abs() < 1e-7);
        assert!((row[2] - 1.3333333).abs() < 1e-7);
        // 17 significant digits
        let tau = cells(text.lines().nth(1).unwrap())[4];
        assert_eq!(tau.split(['.', 'e']).nth(1).unwrap().len(), 16, "{tau}");
        assert_eq!(tau.parse::<f64>().unwrap(), row[0]);
    }

    #[test]
    fn on_trajectory_point_is_flagged() {
        let grid = GridSpec {
            x1: "0,1,2".parse().unwrap(),
            x2: AxisRange::fixed(0.0),
            x3: AxisRange::fixed(0.0),
            t: AxisRange::fixed(0.0),
            quantities: vec![Quantity::Delay, Quantity::BField],
        };
        let traj = Trajectory::stationary(Vec3::zeros());
        let mut out = Vec::new();
        let s = sample_grid(&traj, &grid, &opts(Format::Csv), &mut out).unwrap();
        assert_eq!(s, SampleSummary { rows: 2, outside_g: 1 });
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",,,,outside_G"));
        let jsonl = run(&traj, &grid, Format::Jsonl);
        let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(first["status"], "outside_G");
        assert!(first["B"].is_null());
        let second: serde_json::Value = serde_json::from_str(jsonl.lines().nth(1).unwrap()).unwrap();
        assert_eq!(second["T"], 1.0);
        assert_eq!(second["B"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn ordering_and_scale() {
        let grid = GridSpec {
            x1: "1,2,2".parse().unwrap(),
            x2: "0,1,2".parse().unwrap(),
            x3: AxisRange::fixed(0.0),
            t: "0,1,2".parse().unwrap(),
            quantities: vec![Quantity::Phi],
        };
        assert_eq!(grid.point(1), FieldPoint::new(Vec3::new(2.0, 0.0, 0.0), 0.0));
        assert_eq!(grid.point(2), FieldPoint::new(Vec3::new(1.0, 1.0, 0.0), 0.0));
        assert_eq!(grid.point(4), FieldPoint::new(Vec3::new(1.0, 0.0, 0.0), 1.0));
        let traj = Trajectory::stationary(Vec3::zeros());
        let mut out = Vec::new();
        let o = SampleOptions { scale: 2.0, ..opts(Format::Csv) };
        sample_grid(&traj, &grid, &o, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let phi: f64 = cells(text.lines().nth(1).unwrap())[4].parse().unwrap();
        assert_eq!(phi, 2.0);
    }

    #[test]
    fn output_is_independent_of_thread_count() {
        let grid = GridSpec {
            x1: "-3,3,90".parse().unwrap(),
            x2: "-3,3,60".parse().unwrap(),
            x3: AxisRange::fixed(0.5),
            t: AxisRange::fixed(1.0),
            quantities: vec![Quantity::EField, Quantity::BField],
        };
        let traj = Trajectory::circular(1.0, 0.5).unwrap();
        let with = |n| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            pool.install(|| run(&traj, &grid, Format::Jsonl))
        };
        assert_eq!(with(1), with(3));
    }

    #[test]
    fn cap_is_enforced() {
        let grid = GridSpec {
            x1: "0,1,1000".parse().unwrap(),
            x2: "0,1,1000".parse().unwrap(),
            x3: "0,1,1000".parse().unwrap(),
            t: "0,1,1000".parse().unwrap(),
            quantities: vec![Quantity::U],
        };
        assert!(grid.validate(DEFAULT_MAX_POINTS).is_err());
        let mut g = grid.clone();
        g.quantities.clear();
        g.x1 = AxisRange::fixed(1.0);
        assert!(g.validate(DEFAULT_MAX_POINTS).is_err());
    }
}
