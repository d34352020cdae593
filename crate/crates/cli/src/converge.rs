use std::time::Instant;

use haswme_core::scenarios::{
    convergence_study, scenario_by_name, write_convergence_csv, ReferenceSpec,
};

use crate::args::ConvergeArgs;
use crate::error::CliError;
use crate::output::{fingerprint, Output};
use crate::simulate::overrides;

pub fn run(args: &ConvergeArgs) -> Result<(), CliError> {
    if args.orders.0.is_empty() || args.variants.0.is_empty() {
        return Err(CliError::Config(
            "orders and variants must be nonempty".into(),
        ));
    }
    let s = scenario_by_name(&args.scenario, &overrides(&args.run))?;
    let reference = ReferenceSpec {
        orders: args.ref_orders,
        variant: args.ref_model,
        refinement: args.refinement,
    };
    if reference.refinement == 0 {
        return Err(CliError::Config("--refinement must be positive".into()));
    }
    let out = Output::new(
        &args.common,
        &fingerprint("converge", args, |a| a.common = Default::default()),
    )?;

    let start = Instant::now();
    let rows = convergence_study(&s, &args.orders.0, &args.variants.0, &reference)?;
    let wall = start.elapsed().as_secs_f64();

    let path = out.write(&format!("convergence_{}.csv", s.name), |f| {
        write_convergence_csv(&rows, f, Some(out.header()))
    })?;

    say!(
        "{} on {} cells, reference {} ({},{}) x{}, {:.1} s",
        s.name,
        s.grid.n_cells,
        reference.variant,
        reference.orders.nr,
        reference.orders.nt,
        reference.refinement,
        wall
    );
    say!(
        "{:<8} {:>3} {:>12} {:>12} {:>12}",
        "variant",
        "N",
        "h",
        "v_rm",
        "v_thm"
    );
    for row in &rows {
        match &row.errors {
            Ok(e) => say!(
                "{:<8} {:>3} {:>12.4e} {:>12.4e} {:>12.4e}",
                row.variant.as_str(),
                row.order,
                e[0],
                e[1],
                e[2]
            ),
            Err(msg) => say!("{:<8} {:>3} failed: {msg}", row.variant.as_str(), row.order),
        }
    }
    say!("wrote {}", path.display());

    let failed = rows.iter().filter(|r| r.errors.is_err()).count();
    if failed > 0 {
        return Err(CliError::RowsFailed {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}
