//! First-order path-conservative finite-volume solver with forward Euler
//! time stepping on a radial interval away from the axis.
//!
//! Interface fluctuations use the straight-segment path with a midpoint
//! rule and a Rusanov-type viscosity:
//!
//! ```text
//! D±_{i+1/2} = ½ (A(Ū) ± s I)(U_{i+1} − U_i),   Ū = (U_i + U_{i+1})/2
//! U_i ← U_i − Δt/Δr (D+_{i−1/2} + D−_{i+1/2}) + Δt (G(U_i, r_i) + S(U_i))
//! ```

use std::io::{self, Write};
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format_real;
use crate::model::{Model, MomentState, Orders};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_cells: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_cells: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min.is_finite()) {
            return Err(Error::NonPositiveRadius(r_min));
        }
        if !(r_max > r_min && r_max.is_finite()) {
            return Err(Error::invalid(
                "r_max",
                format!("must exceed r_min = {r_min}, got {r_max}"),
            ));
        }
        if n_cells == 0 {
            return Err(Error::invalid("n_cells", "must be positive"));
        }
        Ok(RadialGrid {
            r_min,
            r_max,
            n_cells,
        })
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.r_min + (i as f64 + 0.5) * self.dr()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Same interval with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        RadialGrid::new(self.r_min, self.r_max, self.n_cells * factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Zero-order extrapolation into the ghost cells.
    #[default]
    Outflow,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "outflow" | "extrapolation" | "outflow-extrapolation" => Ok(Boundary::Outflow),
            _ => Err(Error::UnknownName {
                kind: "boundary",
                name: s.into(),
                known: "outflow".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub cfl: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub snapshot_times: Vec<f64>,
}

impl SolverParams {
    pub fn new(cfl: f64, t_end: f64) -> Result<Self> {
        let p = SolverParams {
            cfl,
            t_end,
            boundary: Boundary::Outflow,
            snapshot_times: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Result<Self> {
        self.snapshot_times = times;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::invalid(
                "cfl",
                format!("must lie in (0, 1], got {}", self.cfl),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(
                "t_end",
                format!("must be non-negative, got {}", self.t_end),
            ));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= self.t_end))
        {
            return Err(Error::invalid(
                "snapshot_times",
                format!("{t} lies outside [0, {}]", self.t_end),
            ));
        }
        Ok(())
    }
}

/// Cell values at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub step: usize,
    pub orders: Orders,
    pub r: Vec<f64>,
    pub states: Vec<MomentState>,
}

/// Primitive quantities that can be read off a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    H,
    VRm,
    VThetam,
    Alpha(usize),
    Gamma(usize),
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "field",
            name: s.into(),
            known: "h, v_rm, v_thm, alpha_<i>, gamma_<i>".into(),
        };
        match s {
            "h" => Ok(Field::H),
            "v_rm" => Ok(Field::VRm),
            "v_thm" => Ok(Field::VThetam),
            _ => {
                let (kind, idx) = s.split_once('_').ok_or_else(unknown)?;
                let i: usize = idx.parse().map_err(|_| unknown())?;
                match (kind, i) {
                    ("alpha", 1..) => Ok(Field::Alpha(i)),
                    ("gamma", 1..) => Ok(Field::Gamma(i)),
                    _ => Err(unknown()),
                }
            }
        }
    }
}

impl Snapshot {
    pub fn n_cells(&self) -> usize {
        self.states.len()
    }

    /// Per-cell values of a primitive field; zero for moments beyond the
    /// snapshot's orders.
    pub fn field(&self, field: Field) -> Vec<f64> {
        let o = self.orders;
        self.states
            .iter()
            .map(|s| {
                let u = s.as_slice();
                let h = u[0];
                match field {
                    Field::H => h,
                    Field::VRm => u[o.v_r()] / h,
                    Field::VThetam => u[o.v_theta()] / h,
                    Field::Alpha(i) if (1..=o.nr).contains(&i) => u[o.alpha(i)] / h,
                    Field::Gamma(i) if (1..=o.nt).contains(&i) => u[o.gamma(i)] / h,
                    _ => 0.0,
                }
            })
            .collect()
    }

    pub fn csv_header(orders: Orders) -> String {
        let mut cols = vec!["r".to_string(), "h".into(), "v_rm".into()];
        cols.extend((1..=orders.nr).map(|i| format!("alpha_{i}")));
        cols.push("v_thm".into());
        cols.extend((1..=orders.nt).map(|i| format!("gamma_{i}")));
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", Self::csv_header(self.orders))?;
        let o = self.orders;
        for (r, s) in self.r.iter().zip(&self.states) {
            let u = s.as_slice();
            let h = u[0];
            let mut row = vec![format_real(*r), format_real(h)];
            row.extend((1..o.dim()).map(|k| format_real(u[k] / h)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub final_state: Snapshot,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

fn spectral_radii(model: &Model, states: &[MomentState]) -> Result<Vec<f64>> {
    states
        .par_iter()
        .map(|s| model.spectral_radius(s))
        .collect()
}

fn dt_from_radii(radii: &[f64], grid: &RadialGrid, params: &SolverParams, t: f64) -> Result<f64> {
    let remaining = params.t_end - t;
    let mut smax = 0.0f64;
    for (cell, s) in radii.iter().enumerate() {
        if !s.is_finite() {
            return Err(Error::SolverBreakdown {
                cell,
                time: t,
                reason: "non-finite wave speed".into(),
            });
        }
        smax = smax.max(*s);
    }
    if smax == 0.0 {
        return Ok(remaining);
    }
    Ok((params.cfl * grid.dr() / smax).min(remaining))
}

/// CFL time step at time `t`; never exceeds the remaining time and falls
/// back to it when no wave moves.
pub fn stable_dt(
    states: &[MomentState],
    grid: &RadialGrid,
    model: &Model,
    params: &SolverParams,
    t: f64,
) -> Result<f64> {
    let radii = spectral_radii(model, states)?;
    dt_from_radii(&radii, grid, params, t)
}

/// One forward Euler step of size `dt` starting at time `t`.
pub fn step(
    states: &[MomentState],
    grid: &RadialGrid,
    model: &Model,
    dt: f64,
    t: f64,
) -> Result<Vec<MomentState>> {
    let radii = spectral_radii(model, states)?;
    step_with_radii(states, &radii, grid, model, dt, t)
}

fn step_with_radii(
    states: &[MomentState],
    radii: &[f64],
    grid: &RadialGrid,
    model: &Model,
    dt: f64,
    t: f64,
) -> Result<Vec<MomentState>> {
    let n = grid.n_cells;
    if states.len() != n {
        return Err(Error::invalid(
            "states",
            format!("grid has {n} cells, got {} states", states.len()),
        ));
    }
    let dim = model.orders().dim();
    let breakdown = |cell: usize, reason: String| Error::SolverBreakdown {
        cell,
        time: t,
        reason,
    };

    // Interior interfaces; with outflow ghosts the boundary jumps vanish.
    let fluct: Vec<(DVector<f64>, DVector<f64>)> = (0..n.saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let (ul, ur) = (states[i].as_slice(), states[i + 1].as_slice());
            let jump = DVector::from_iterator(dim, ur.iter().zip(ul).map(|(r, l)| r - l));
            if jump.iter().all(|x| *x == 0.0) {
                return Ok((DVector::zeros(dim), DVector::zeros(dim)));
            }
            let mid = MomentState(ul.iter().zip(ur).map(|(l, r)| 0.5 * (l + r)).collect());
            let a = model
                .system_matrix(&mid)
                .map_err(|e| breakdown(i, format!("interface {i}+1/2: {e}")))?;
            let s = radii[i].max(radii[i + 1]);
            let aj = a * &jump;
            let sj = &jump * s;
            Ok((0.5 * (&aj + &sj), 0.5 * (aj - sj)))
        })
        .collect::<Result<_>>()?;

    let ratio = dt / grid.dr();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let u = &states[i];
            let w = model
                .primitives(u)
                .map_err(|e| breakdown(i, e.to_string()))?;
            let g = model.forcing_from(&w, grid.center(i));
            let src = model.friction_from(&w);
            let mut out = u.0.clone();
            for k in 0..dim {
                let mut flux = 0.0;
                if i > 0 {
                    flux += fluct[i - 1].0[k];
                }
                if i + 1 < n {
                    flux += fluct[i].1[k];
                }
                out[k] += -ratio * flux + dt * (g[k] + src[k]);
            }
            let next = MomentState(out);
            if !next.is_finite() {
                return Err(breakdown(i, "non-finite state".into()));
            }
            if !(next.h() > 0.0) {
                return Err(breakdown(
                    i,
                    format!("water height {} after update", next.h()),
                ));
            }
            Ok(next)
        })
        .collect()
}

fn snapshot(
    grid: &RadialGrid,
    model: &Model,
    states: &[MomentState],
    t: f64,
    step: usize,
) -> Snapshot {
    Snapshot {
        time: t,
        step,
        orders: model.orders(),
        r: grid.centers(),
        states: states.to_vec(),
    }
}

/// Integrates from `t = 0` to `params.t_end`. Snapshots are taken at the
/// completed step closest to each requested time.
pub fn run(
    initial: &[MomentState],
    grid: &RadialGrid,
    model: &Model,
    params: &SolverParams,
) -> Result<RunOutput> {
    params.validate()?;
    if initial.len() != grid.n_cells {
        return Err(Error::invalid(
            "initial",
            format!(
                "grid has {} cells, got {} states",
                grid.n_cells,
                initial.len()
            ),
        ));
    }
    for (cell, s) in initial.iter().enumerate() {
        model.primitives(s).map_err(|e| Error::SolverBreakdown {
            cell,
            time: 0.0,
            reason: e.to_string(),
        })?;
    }
    let mut pending: Vec<f64> = params.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let mut pending = pending.into_iter().peekable();

    let mut states = initial.to_vec();
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let mut steps = 0;
    let (mut dt_min, mut dt_max) = (f64::INFINITY, 0.0f64);

    while t < params.t_end {
        let radii = spectral_radii(model, &states)?;
        let dt = dt_from_radii(&radii, grid, params, t)?;
        while let Some(&ts) = pending.peek() {
            if ts > t + 0.5 * dt {
                break;
            }
            snapshots.push(snapshot(grid, model, &states, t, steps));
            pending.next();
        }
        if !(dt > 0.0) {
            return Err(Error::SolverBreakdown {
                cell: 0,
                time: t,
                reason: format!("time step {dt} is not positive"),
            });
        }
        states = step_with_radii(&states, &radii, grid, model, dt, t)?;
        steps += 1;
        dt_min = dt_min.min(dt);
        dt_max = dt_max.max(dt);
        t = if params.t_end - t <= dt {
            params.t_end
        } else {
            t + dt
        };
    }
    for _ in pending {
        snapshots.push(snapshot(grid, model, &states, t, steps));
    }
    if steps == 0 {
        dt_min = 0.0;
    }
    Ok(RunOutput {
        final_state: snapshot(grid, model, &states, t, steps),
        snapshots,
        steps,
        dt_min,
        dt_max,
    })
}
