//! Canonical experiments, initial conditions, error norms and the
//! order-convergence study.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::project_velocity_profile;
use crate::error::{Error, Result};
use crate::format_real;
use crate::model::{Model, ModelConfig, MomentState, Orders, Primitives, Variant};
use crate::solver::{run, Field, RadialGrid, Snapshot, SolverParams};

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An experiment: domain, model, end time and initial profiles.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: RadialGrid,
    pub cfg: ModelConfig,
    pub t_end: f64,
    pub cfl: f64,
    /// Initial water height `h(r)`.
    pub height: RadialFn,
    /// Initial radial velocity profile `v_r(ζ)`.
    pub radial_profile: RadialFn,
    /// Initial angular velocity profile `v_θ(ζ)`.
    pub angular_profile: RadialFn,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("cfg", &self.cfg)
            .field("t_end", &self.t_end)
            .field("cfl", &self.cfl)
            .finish_non_exhaustive()
    }
}

/// Optional replacements for scenario defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScenarioOverrides {
    pub orders: Option<Orders>,
    pub variant: Option<Variant>,
    pub n_cells: Option<usize>,
    pub t_end: Option<f64>,
    pub cfl: Option<f64>,
    pub g: Option<f64>,
    pub nu: Option<f64>,
    pub slip: Option<f64>,
}

pub const DEFAULT_CFL: f64 = 0.1;
pub const DEFAULT_CELLS: usize = 1000;
pub const DAM_BREAK_DEFAULT_T_END: f64 = 0.1;
pub const SMOOTH_T_END: f64 = 0.5;

impl Scenario {
    fn build(
        name: &str,
        defaults: (f64, f64, f64),
        t_end: f64,
        ov: &ScenarioOverrides,
        profiles: [RadialFn; 3],
    ) -> Result<Self> {
        let (nu, slip, g) = defaults;
        let orders = ov.orders.unwrap_or(Orders::new(3, 3));
        let cfg = ModelConfig::new(orders.nr, orders.nt, ov.variant.unwrap_or(Variant::Haswme))
            .with_gravity(ov.g.unwrap_or(g))
            .with_friction(ov.nu.unwrap_or(nu), ov.slip.unwrap_or(slip));
        cfg.validate()?;
        let [height, radial_profile, angular_profile] = profiles;
        let s = Scenario {
            name: name.into(),
            grid: RadialGrid::new(10.0, 20.0, ov.n_cells.unwrap_or(DEFAULT_CELLS))?,
            cfg,
            t_end: ov.t_end.unwrap_or(t_end),
            cfl: ov.cfl.unwrap_or(DEFAULT_CFL),
            height,
            radial_profile,
            angular_profile,
        };
        s.params()?;
        Ok(s)
    }

    pub fn params(&self) -> Result<SolverParams> {
        SolverParams::new(self.cfl, self.t_end)
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.cfg)
    }

    /// Same scenario with another model configuration or grid.
    pub fn with_model(&self, orders: Orders, variant: Variant) -> Self {
        let mut s = self.clone();
        s.cfg.orders = orders;
        s.cfg.variant = variant;
        s
    }

    pub fn with_cells(&self, n_cells: usize) -> Result<Self> {
        let mut s = self.clone();
        s.grid = RadialGrid::new(self.grid.r_min, self.grid.r_max, n_cells)?;
        Ok(s)
    }
}

/// Radial dam break: `h = 5` for `r ≤ 14`, `h = 1` beyond, cubic radial
/// profile, no swirl.
pub fn dam_break_scenario(ov: &ScenarioOverrides) -> Result<Scenario> {
    Scenario::build(
        "dam-break",
        (0.1, 0.1, 1.0),
        DAM_BREAK_DEFAULT_T_END,
        ov,
        [
            Arc::new(|r| if r <= 14.0 { 5.0 } else { 1.0 }),
            Arc::new(|z| 0.25 - 2.5 * z + 7.5 * z * z - 5.0 * z * z * z),
            Arc::new(|_| 0.0),
        ],
    )
}

/// Smooth height transition with constant swirl `v_θ = 0.5`.
pub fn smooth_scenario(ov: &ScenarioOverrides) -> Result<Scenario> {
    Scenario::build(
        "smooth",
        (1.0, 0.1, 1.0),
        SMOOTH_T_END,
        ov,
        [
            Arc::new(|r| 1.0 + 4.0 / (1.0 + (2.0 * (r - 14.0)).exp())),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.5),
        ],
    )
}

pub type ScenarioFactory = fn(&ScenarioOverrides) -> Result<Scenario>;

pub const SCENARIOS: [(&str, ScenarioFactory); 2] = [
    ("dam-break", dam_break_scenario),
    ("smooth", smooth_scenario),
];

pub fn scenario_by_name(name: &str, ov: &ScenarioOverrides) -> Result<Scenario> {
    let key = name.to_ascii_lowercase().replace('_', "-");
    match SCENARIOS.iter().find(|(n, _)| *n == key) {
        Some((_, f)) => f(ov),
        None => Err(Error::UnknownName {
            kind: "scenario",
            name: name.into(),
            known: SCENARIOS.map(|(n, _)| n).join(", "),
        }),
    }
}

/// Cell-centre initial states; velocity profiles are projected once.
pub fn initial_states(s: &Scenario) -> Result<Vec<MomentState>> {
    let o = s.cfg.orders;
    let (v_r, alpha) = project_velocity_profile(s.radial_profile.as_ref(), o.nr);
    let (v_theta, gamma) = project_velocity_profile(s.angular_profile.as_ref(), o.nt);
    s.grid
        .centers()
        .into_iter()
        .map(|r| {
            let h = (s.height)(r);
            if !(h > 0.0) {
                return Err(Error::NonPositiveHeight(h));
            }
            Ok(Primitives {
                h,
                v_r,
                alpha: alpha.clone(),
                v_theta,
                gamma: gamma.clone(),
            }
            .to_state())
        })
        .collect()
}

pub fn run_scenario(s: &Scenario, snapshot_times: Vec<f64>) -> Result<crate::solver::RunOutput> {
    let model = s.model()?;
    let params = s.params()?.with_snapshots(snapshot_times)?;
    run(&initial_states(s)?, &s.grid, &model, &params)
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::H => "h",
        Field::VRm => "v_rm",
        Field::VThetam => "v_thm",
        Field::Alpha(_) => "alpha",
        Field::Gamma(_) => "gamma",
    }
}

/// Relative discrete L1 error `Σ|q − q_ref| / Σ|q_ref|`.
pub fn error_norm(solution: &Snapshot, reference: &Snapshot, field: Field) -> Result<f64> {
    if solution.n_cells() != reference.n_cells() {
        return Err(Error::GridMismatch {
            left: solution.n_cells(),
            right: reference.n_cells(),
        });
    }
    let q = solution.field(field);
    let qr = reference.field(field);
    relative_l1(&q, &qr).ok_or(Error::ZeroReferenceNorm(field_name(field)))
}

fn relative_l1(q: &[f64], qr: &[f64]) -> Option<f64> {
    let den: f64 = qr.iter().map(|x| x.abs()).sum();
    if den == 0.0 {
        return None;
    }
    let num: f64 = q.iter().zip(qr).map(|(a, b)| (a - b).abs()).sum();
    Some(num / den)
}

/// Averages conservative cell values over groups of `fine / n_cells` cells.
pub fn restrict(fine: &Snapshot, n_cells: usize) -> Result<Snapshot> {
    let n = fine.n_cells();
    if n_cells == 0 || !n.is_multiple_of(n_cells) {
        return Err(Error::GridMismatch {
            left: n,
            right: n_cells,
        });
    }
    let k = n / n_cells;
    let inv = 1.0 / k as f64;
    let dim = fine.orders.dim();
    let states = fine
        .states
        .chunks(k)
        .map(|group| {
            let mut acc = vec![0.0; dim];
            for s in group {
                acc.iter_mut().zip(s.as_slice()).for_each(|(a, x)| *a += x);
            }
            MomentState(acc.into_iter().map(|x| x * inv).collect())
        })
        .collect();
    let r = fine
        .r
        .chunks(k)
        .map(|c| c.iter().sum::<f64>() * inv)
        .collect();
    Ok(Snapshot {
        time: fine.time,
        step: fine.step,
        orders: fine.orders,
        r,
        states,
    })
}

/// `Σ |q_{i+1} − q_i|`.
pub fn total_variation(q: &[f64]) -> f64 {
    q.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// How the surrogate reference solution is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub orders: Orders,
    pub variant: Variant,
    /// Cell-count multiplier relative to the scenario grid.
    pub refinement: usize,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        ReferenceSpec {
            orders: Orders::new(4, 4),
            variant: Variant::Haswme,
            refinement: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub variant: Variant,
    pub order: usize,
    /// Errors for `h`, `v_rm`, `v_thm`, or the failure message.
    pub errors: std::result::Result<[f64; 3], String>,
}

pub const STUDY_FIELDS: [Field; 3] = [Field::H, Field::VRm, Field::VThetam];

/// Runs the reference once and every `(variant, N)` pair with orders
/// `(N, N)` on the scenario grid. A failed row does not stop the others.
pub fn convergence_study(
    scenario: &Scenario,
    orders: &[usize],
    variants: &[Variant],
    reference: &ReferenceSpec,
) -> Result<Vec<ConvergenceRow>> {
    if orders.is_empty() {
        return Err(Error::invalid("orders", "at least one order is required"));
    }
    if reference.refinement == 0 {
        return Err(Error::invalid("refinement", "must be positive"));
    }
    let reference_run = scenario
        .with_model(reference.orders, reference.variant)
        .with_cells(scenario.grid.n_cells * reference.refinement)?;
    let fine = run_scenario(&reference_run, Vec::new())?.final_state;
    let reference = restrict(&fine, scenario.grid.n_cells)?;

    let jobs: Vec<(Variant, usize)> = variants
        .iter()
        .flat_map(|v| orders.iter().map(move |n| (*v, *n)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(variant, order)| {
            let errors = run_scenario(
                &scenario.with_model(Orders::new(order, order), variant),
                Vec::new(),
            )
            .and_then(|out| {
                let mut e = [0.0; 3];
                for (slot, f) in e.iter_mut().zip(STUDY_FIELDS) {
                    *slot = error_norm(&out.final_state, &reference, f)?;
                }
                Ok(e)
            })
            .map_err(|e| e.to_string());
            ConvergenceRow {
                variant,
                order,
                errors,
            }
        })
        .collect())
}

pub fn write_convergence_csv<W: Write>(
    rows: &[ConvergenceRow],
    mut w: W,
    comment: Option<&str>,
) -> io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "variant,order,error_h,error_v_rm,error_v_thm,status")?;
    for row in rows {
        match &row.errors {
            Ok(e) => writeln!(
                w,
                "{},{},{},{},{},ok",
                row.variant,
                row.order,
                format_real(e[0]),
                format_real(e[1]),
                format_real(e[2])
            )?,
            Err(msg) => writeln!(
                w,
                "{},{},,,,\"failed: {}\"",
                row.variant,
                row.order,
                msg.replace('"', "'")
            )?,
        }
    }
    Ok(())
}
