use haswme_core::format_real;
use haswme_core::spectral::{
    classify_hyperbolic, haswme_eigenvalues, known_char_poly_roots, KnownPolynomial,
};
use haswme_core::{Model, ModelConfig, Orders, Primitives, Variant};
use nalgebra::Complex;

use crate::args::EigenArgs;
use crate::error::CliError;
use crate::output::{fingerprint, Output};

fn moments(
    given: Option<&[f64]>,
    first: Option<f64>,
    n: usize,
    name: &str,
) -> Result<Vec<f64>, CliError> {
    let mut out = given.map(<[f64]>::to_vec).unwrap_or_default();
    if out.len() > n {
        return Err(CliError::Config(format!(
            "--{name} has {} entries but the orders allow {n}",
            out.len()
        )));
    }
    out.resize(n, 0.0);
    if let Some(x) = first {
        match out.first_mut() {
            Some(slot) => *slot = x,
            None => {
                return Err(CliError::Config(format!(
                    "--{name}1 needs an order of at least 1"
                )))
            }
        }
    }
    Ok(out)
}

fn state(args: &EigenArgs) -> Result<Primitives, CliError> {
    let o = args.orders;
    let w = Primitives {
        h: args.h,
        v_r: args.vrm,
        alpha: moments(
            args.alpha.as_ref().map(|l| l.0.as_slice()),
            args.alpha1,
            o.nr,
            "alpha",
        )?,
        v_theta: args.vthm,
        gamma: moments(
            args.gamma.as_ref().map(|l| l.0.as_slice()),
            args.gamma1,
            o.nt,
            "gamma",
        )?,
    };
    let all = [w.h, w.v_r, w.v_theta]
        .into_iter()
        .chain(w.alpha.iter().copied())
        .chain(w.gamma.iter().copied());
    if all.into_iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config("state values must be finite".into()));
    }
    if !(w.h > 0.0) {
        return Err(CliError::Config(format!(
            "--h must be positive, got {}",
            w.h
        )));
    }
    Ok(w)
}

/// Roots of the known characteristic polynomial mapped back to wave
/// speeds, for the order pairs where one is known.
fn polynomial_oracle(
    variant: Variant,
    o: Orders,
    w: &Primitives,
    g: f64,
) -> Option<haswme_core::Result<Vec<Complex<f64>>>> {
    let c = (g * w.h).sqrt();
    let a2 = match variant {
        Variant::Haswme => 0.0,
        Variant::Aswme => w.alpha.get(1).copied().unwrap_or(0.0),
    };
    let system = match (o.nr, o.nt) {
        (2, 0) => KnownPolynomial::Radial20,
        (2, 2) if a2 == 0.0 => KnownPolynomial::Full22,
        _ => return None,
    };
    Some(
        known_char_poly_roots(system, w.alpha1() / c, a2 / c).map(|roots| {
            let mut speeds: Vec<Complex<f64>> = roots
                .into_iter()
                .map(|z| Complex::new(w.v_r + c * z.re, c * z.im))
                .collect();
            speeds.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            speeds
        }),
    )
}

/// Largest distance under greedy nearest matching.
fn delta(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    a.iter().fold(0.0, |worst, x| {
        let best = (0..b.len())
            .filter(|j| !used[*j])
            .min_by(|i, j| (x - b[*i]).norm().total_cmp(&(x - b[*j]).norm()));
        match best {
            Some(j) => {
                used[j] = true;
                f64::max(worst, (x - b[j]).norm())
            }
            None => worst,
        }
    })
}

fn show(z: &Complex<f64>) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else {
        format!(
            "{}{}{}i",
            format_real(z.re),
            if z.im < 0.0 { "-" } else { "+" },
            format_real(z.im.abs())
        )
    }
}

fn show_all(v: &[Complex<f64>]) -> String {
    v.iter().map(show).collect::<Vec<_>>().join(" ")
}

pub fn run(args: &EigenArgs) -> Result<(), CliError> {
    let w = state(args)?;
    let o = args.orders;
    let cfg = ModelConfig::new(o.nr, o.nt, args.model).with_gravity(args.g);
    cfg.validate()?;
    let out = Output::new(
        &args.common,
        &fingerprint("eigen", args, |a| a.common = Default::default()),
    )?;

    let model = Model::new(cfg)?;
    let m = model.system_matrix(&w.to_state())?;
    let report = classify_hyperbolic(&m, args.tol_imag, true)?;
    let dense = &report.eigenvalues;

    let closed = if args.model == Variant::Haswme && (o.nt == 0 || o.nt == o.nr) {
        Some(
            haswme_eigenvalues(&cfg, w.h, w.v_r, w.alpha1())?
                .into_iter()
                .map(|x| Complex::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let poly = polynomial_oracle(args.model, o, &w, args.g).transpose()?;

    say!(
        "model {}, orders ({},{}), dimension {}",
        args.model,
        o.nr,
        o.nt,
        o.dim()
    );
    say!("dense:       {}", show_all(dense));
    let sources = [("closed form", &closed), ("polynomial", &poly)];
    for (name, values) in sources {
        match values {
            Some(v) => say!("{:<12} {}", format!("{name}:"), show_all(v)),
            None => say!("{:<12} not applicable", format!("{name}:")),
        }
    }
    for (name, values) in sources {
        if let Some(v) = values {
            say!("delta dense vs {name}: {:.3e}", delta(dense, v));
        }
    }
    say!("max |Im|: {:.3e}", report.max_abs_imag);
    let diag = match report.diagonalizable {
        Some(true) => "diagonalizable",
        Some(false) => "not diagonalizable",
        None => "diagonalizability unknown",
    };
    say!(
        "verdict: {}, {diag}",
        if report.hyperbolic {
            "hyperbolic"
        } else {
            "not hyperbolic"
        }
    );

    let path = out.write("eigen.csv", |f| {
        writeln!(f, "# {}", out.header())?;
        writeln!(f, "source,index,re,im")?;
        for (name, values) in [
            ("dense", Some(dense)),
            ("closed_form", closed.as_ref()),
            ("polynomial", poly.as_ref()),
        ] {
            for (k, z) in values.into_iter().flatten().enumerate() {
                writeln!(f, "{name},{k},{},{}", format_real(z.re), format_real(z.im))?;
            }
        }
        Ok(())
    })?;
    say!("wrote {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_delta() {
        let a = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
        let b = [Complex::new(1.0, 1e-3), Complex::new(0.0, 0.0)];
        assert!((delta(&a, &b) - 1e-3).abs() < 1e-15);
        assert_eq!(delta(&a, &b[..1]), f64::INFINITY);
    }

    #[test]
    fn moment_lists_are_padded_and_overridden() {
        assert_eq!(
            moments(Some(&[0.5]), Some(2.0), 3, "alpha").unwrap(),
            vec![2.0, 0.0, 0.0]
        );
        assert!(moments(Some(&[1.0, 2.0]), None, 1, "alpha").is_err());
        assert!(moments(None, Some(1.0), 0, "gamma").is_err());
        assert!(moments(None, None, 0, "gamma").unwrap().is_empty());
    }
}
