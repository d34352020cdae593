use std::time::Instant;

use haswme_core::scenarios::{run_scenario, scenario_by_name, Scenario, ScenarioOverrides};
use haswme_core::solver::{Field, Snapshot};
use toml::{Table, Value};

use crate::args::{RunOverrides, SimulateArgs};
use crate::error::CliError;
use crate::output::{fingerprint, Output};

pub fn overrides(run: &RunOverrides) -> ScenarioOverrides {
    ScenarioOverrides {
        n_cells: run.cells,
        t_end: run.t_end,
        cfl: run.cfl,
        g: run.g,
        nu: run.nu,
        slip: run.slip,
        ..Default::default()
    }
}

fn manifest(s: &Scenario, steps: usize, dt: (f64, f64), wall: f64, files: &[String]) -> Table {
    let mut grid = Table::new();
    grid.insert("r_min".into(), s.grid.r_min.into());
    grid.insert("r_max".into(), s.grid.r_max.into());
    grid.insert("cells".into(), Value::Integer(s.grid.n_cells as i64));

    let mut solver = Table::new();
    solver.insert("cfl".into(), s.cfl.into());
    solver.insert("t_end".into(), s.t_end.into());
    solver.insert("steps".into(), Value::Integer(steps as i64));
    solver.insert("dt_min".into(), dt.0.into());
    solver.insert("dt_max".into(), dt.1.into());
    solver.insert("wall_time_s".into(), wall.into());

    let mut physics = Table::new();
    physics.insert("g".into(), s.cfg.g.into());
    physics.insert("nu".into(), s.cfg.nu.into());
    physics.insert("slip".into(), s.cfg.slip.into());

    let mut t = Table::new();
    t.insert("scenario".into(), s.name.clone().into());
    t.insert("variant".into(), s.cfg.variant.as_str().into());
    t.insert(
        "orders".into(),
        Value::Array(vec![
            Value::Integer(s.cfg.orders.nr as i64),
            Value::Integer(s.cfg.orders.nt as i64),
        ]),
    );
    t.insert(
        "files".into(),
        Value::Array(files.iter().cloned().map(Value::from).collect()),
    );
    t.insert("grid".into(), grid.into());
    t.insert("solver".into(), solver.into());
    t.insert("physics".into(), physics.into());
    t
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(*x), hi.max(*x))
        })
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let ov = ScenarioOverrides {
        orders: args.orders,
        variant: args.model,
        ..overrides(&args.run)
    };
    let s = scenario_by_name(&args.scenario, &ov)?;
    let times = args
        .snapshots
        .as_ref()
        .map(|l| l.0.clone())
        .unwrap_or_default();
    s.params()?.with_snapshots(times.clone())?;
    let out = Output::new(
        &args.common,
        &fingerprint("simulate", args, |a| a.common = Default::default()),
    )?;

    let start = Instant::now();
    let result = run_scenario(&s, times)?;
    let wall = start.elapsed().as_secs_f64();

    let o = s.cfg.orders;
    let stem = format!("{}_{}_{}-{}", s.name, s.cfg.variant, o.nr, o.nt);
    let write_snapshot = |name: String, snap: &Snapshot| -> Result<String, CliError> {
        out.write(&name, |f| snap.write_csv(f, Some(out.header())))?;
        Ok(name)
    };
    let mut files = Vec::new();
    for snap in &result.snapshots {
        files.push(write_snapshot(
            format!("{stem}_t{:.6}.csv", snap.time),
            snap,
        )?);
    }
    files.push(write_snapshot(
        format!("{stem}_final.csv"),
        &result.final_state,
    )?);

    let table = manifest(
        &s,
        result.steps,
        (result.dt_min, result.dt_max),
        wall,
        &files,
    );
    let manifest_name = format!("{stem}_manifest.toml");
    out.write(&manifest_name, |f| {
        writeln!(f, "# {}", out.header())?;
        write!(f, "{table}")
    })?;

    let (hmin, hmax) = range(&result.final_state.field(Field::H));
    say!(
        "{}: {} ({},{}) on {} cells, t = {}, {} steps, dt in [{:.3e}, {:.3e}], {:.2} s",
        s.name,
        s.cfg.variant,
        o.nr,
        o.nt,
        s.grid.n_cells,
        result.final_state.time,
        result.steps,
        result.dt_min,
        result.dt_max,
        wall
    );
    say!("h in [{hmin:.6}, {hmax:.6}]");
    for name in files.iter().chain([&manifest_name]) {
        say!("wrote {}", out.dir().join(name).display());
    }
    Ok(())
}
