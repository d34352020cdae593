use haswme_core::spectral::{scan_region, AxisRange, RegionSystem};
use haswme_core::ModelConfig;

use crate::args::RegionArgs;
use crate::error::CliError;
use crate::output::{fingerprint, Output};

fn system(args: &RegionArgs) -> Result<(RegionSystem, String), CliError> {
    match args.system.to_ascii_lowercase().as_str() {
        "radial20" => Ok((RegionSystem::Radial20, "radial20".into())),
        "full22" => Ok((RegionSystem::Full22, "full22".into())),
        "custom" => {
            let o = args.orders;
            let cfg = ModelConfig::new(o.nr, o.nt, args.model);
            cfg.validate()?;
            Ok((
                RegionSystem::Custom(cfg),
                format!("custom_{}_{}-{}", args.model, o.nr, o.nt),
            ))
        }
        other => Err(CliError::Config(format!(
            "unknown system `{other}` (known: radial20, full22, custom)"
        ))),
    }
}

pub fn run(args: &RegionArgs) -> Result<(), CliError> {
    let (sys, stem) = system(args)?;
    let a1 = AxisRange::new(args.alpha1_range.0, args.alpha1_range.1, args.n_alpha1)?;
    let a2 = AxisRange::new(args.alpha2_range.0, args.alpha2_range.1, args.n_alpha2)?;
    let out = Output::new(
        &args.common,
        &fingerprint("region", args, |a| a.common = Default::default()),
    )?;

    let grid = scan_region(sys, a1, a2, args.tol_imag)?;
    let csv = out.write(&format!("region_{stem}.csv"), |f| {
        grid.write_csv(f, Some(out.header()))
    })?;
    let pgm = out.write(&format!("region_{stem}.pgm"), |f| {
        grid.write_pgm(f, Some(out.header()))
    })?;

    say!(
        "{stem}: {} x {} points, hyperbolic fraction {:.6}, symmetric in alpha_1: {}",
        a1.n,
        a2.n,
        grid.hyperbolic_fraction(),
        grid.is_symmetric_in_alpha1()
    );
    say!("wrote {}", csv.display());
    say!("wrote {}", pgm.display());
    Ok(())
}
