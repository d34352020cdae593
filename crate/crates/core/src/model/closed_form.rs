use nalgebra::DMatrix;

use super::{ModelConfig, Variant};
use crate::error::{Error, Result};

/// Regularized system matrix built entry by entry from its known banded
/// structure. Available for `N_θ = 0` and for `N_θ = N_r`.
pub fn haswme_closed_form(
    cfg: &ModelConfig,
    h: f64,
    v: f64,
    alpha1: f64,
    v_theta: f64,
    gamma1: f64,
) -> Result<DMatrix<f64>> {
    let o = cfg.orders;
    if cfg.variant != Variant::Haswme || (o.nt != 0 && o.nt != o.nr) {
        return Err(Error::NoClosedForm { nr: o.nr, nt: o.nt });
    }
    if !(h > 0.0) {
        return Err(Error::NonPositiveHeight(h));
    }
    let n = o.nr;
    let a1 = alpha1;
    let g1 = if o.nt == 0 { 0.0 } else { gamma1 };
    let mut m = DMatrix::<f64>::zeros(o.dim(), o.dim());

    m[(0, 1)] = 1.0;
    m[(1, 0)] = cfg.g * h - v * v - a1 * a1 / 3.0;
    m[(1, 1)] = 2.0 * v;
    if n >= 1 {
        m[(1, o.alpha(1))] = 2.0 * a1 / 3.0;
        m[(o.alpha(1), 0)] = -2.0 * v * a1;
        m[(o.alpha(1), 1)] = 2.0 * a1;
    }
    if n >= 2 {
        m[(o.alpha(2), 0)] = -2.0 * a1 * a1 / 3.0;
    }
    for i in 1..=n {
        let fi = i as f64;
        let r = o.alpha(i);
        m[(r, r)] = v;
        if i < n {
            m[(r, o.alpha(i + 1))] = (fi + 2.0) / (2.0 * fi + 3.0) * a1;
        }
        if i >= 2 {
            m[(r, o.alpha(i - 1))] = (fi - 1.0) / (2.0 * fi - 1.0) * a1;
        }
    }

    // angular momentum row
    let r = o.v_theta();
    m[(r, 0)] = -v * v_theta;
    m[(r, 1)] = v_theta;
    m[(r, r)] = v;
    if o.nt >= 1 {
        m[(r, 0)] -= a1 * g1 / 3.0;
        m[(r, o.alpha(1))] = g1 / 3.0;
        m[(r, o.gamma(1))] = a1 / 3.0;
    }

    // angular moment rows
    for i in 1..=o.nt {
        let fi = i as f64;
        let r = o.gamma(i);
        match i {
            1 => {
                m[(r, 0)] = -v * g1 - v_theta * a1;
                m[(r, 1)] = g1;
                m[(r, o.v_theta())] = a1;
            }
            2 => m[(r, 0)] = -2.0 * a1 * g1 / 3.0,
            _ => {}
        }
        if i < n {
            m[(r, o.alpha(i + 1))] = g1 / (2.0 * fi + 3.0);
        }
        if i >= 2 {
            m[(r, o.alpha(i - 1))] = -g1 / (2.0 * fi - 1.0);
            m[(r, o.gamma(i - 1))] = fi / (2.0 * fi - 1.0) * a1;
        }
        m[(r, r)] = v;
        if i < o.nt {
            m[(r, o.gamma(i + 1))] = (fi + 1.0) / (2.0 * fi + 3.0) * a1;
        }
    }
    Ok(m)
}
