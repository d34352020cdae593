use super::{Model, MomentState, Primitives};
use crate::error::{Error, Result};

impl Model {
    /// Geometric `1/r` forcing on the right-hand side. The mass entry is
    /// `−h v_rm / r`.
    pub fn forcing(&self, state: &MomentState, r: f64) -> Result<Vec<f64>> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let w = self.primitives(state)?;
        Ok(self.forcing_from(&w, r))
    }

    pub(crate) fn forcing_from(&self, w: &Primitives, r: f64) -> Vec<f64> {
        let o = self.orders();
        let t = self.tables();
        let (nr, nt) = (o.nr, o.nt);
        let (h, v, vt) = (w.h, w.v_r, w.v_theta);
        let (al, ga) = (&w.alpha, &w.gamma);
        let inv_r = 1.0 / r;
        let mut g = vec![0.0; o.dim()];

        g[0] = -h * v;

        let mut g0 = -v * v + vt * vt;
        for j in 1..=nr {
            g0 -= al[j - 1] * al[j - 1] / (2 * j + 1) as f64;
        }
        for j in 1..=nt {
            g0 += ga[j - 1] * ga[j - 1] / (2 * j + 1) as f64;
        }
        g[1] = h * g0;

        for i in 1..=nr {
            let mut s = -v * al[i - 1];
            if i <= nt {
                s += 2.0 * vt * ga[i - 1];
            }
            for j in 1..=nr {
                for k in 1..=nr {
                    s -= (t.a(i, j, k) + t.b(i, j, k)) * al[j - 1] * al[k - 1];
                }
            }
            for j in 1..=nt {
                for k in 1..=nt {
                    s += t.a(i, j, k) * ga[j - 1] * ga[k - 1];
                }
            }
            g[o.alpha(i)] = h * s;
        }

        let mut gt0 = v * vt;
        for j in 1..=nr.min(nt) {
            gt0 += al[j - 1] * ga[j - 1] / (2 * j + 1) as f64;
        }
        g[o.v_theta()] = -2.0 * h * gt0;

        for i in 1..=nt {
            let mut s = 2.0 * v * ga[i - 1];
            if i <= nr {
                s += vt * al[i - 1];
            }
            for j in 1..=nr {
                for k in 1..=nt {
                    s += (2.0 * t.a(i, j, k) + t.b(i, j, k)) * al[j - 1] * ga[k - 1];
                }
            }
            g[o.gamma(i)] = -h * s;
        }

        g.iter_mut().for_each(|x| *x *= inv_r);
        g
    }

    /// Bottom friction source `S(V)`.
    pub fn source_friction(&self, state: &MomentState) -> Result<Vec<f64>> {
        let w = self.primitives(state)?;
        Ok(self.friction_from(&w))
    }

    pub(crate) fn friction_from(&self, w: &Primitives) -> Vec<f64> {
        let o = self.orders();
        let cfg = self.config();
        let mut s = vec![0.0; o.dim()];
        if cfg.nu == 0.0 {
            return s;
        }
        let k = cfg.nu / cfg.slip;
        let ratio = cfg.slip / w.h;
        let t = self.tables();

        let mut branch = |mean: f64, coeffs: &[f64], row0: usize, row: &dyn Fn(usize) -> usize| {
            s[row0] = -k * (mean + coeffs.iter().sum::<f64>());
            for i in 1..=coeffs.len() {
                let mut acc = mean;
                for (j, c) in coeffs.iter().enumerate() {
                    acc += c * (1.0 + ratio * t.c(i, j + 1));
                }
                s[row(i)] = -((2 * i + 1) as f64) * k * acc;
            }
        };
        branch(w.v_r, &w.alpha, o.v_r(), &|i| o.alpha(i));
        branch(w.v_theta, &w.gamma, o.v_theta(), &|i| o.gamma(i));
        s
    }
}
