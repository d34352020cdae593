use nalgebra::DMatrix;

use super::{Model, MomentState, Primitives};
use crate::error::Result;

/// Every flux row except mass is `h · P(q)` with `P` a homogeneous quadratic
/// in the velocity unknowns `q_k = V_k / h`. For such rows
/// `∂F/∂V_0 = −P(q)` and `∂F/∂V_k = ∂P/∂q_k(q)`.
struct FluxParts {
    p: Vec<f64>,
    grad: DMatrix<f64>,
}

impl Model {
    fn flux_parts(&self, w: &Primitives) -> FluxParts {
        let o = self.orders();
        let t = self.tables();
        let m = o.dim();
        let (nr, nt) = (o.nr, o.nt);
        let (v, vt) = (w.v_r, w.v_theta);
        let (al, ga) = (&w.alpha, &w.gamma);
        let mut p = vec![0.0; m];
        let mut grad = DMatrix::<f64>::zeros(m, m);

        // radial momentum
        let r = o.v_r();
        p[r] = v * v;
        grad[(r, o.v_r())] = 2.0 * v;
        for j in 1..=nr {
            let w2 = 1.0 / (2 * j + 1) as f64;
            p[r] += al[j - 1] * al[j - 1] * w2;
            grad[(r, o.alpha(j))] = 2.0 * al[j - 1] * w2;
        }

        // radial moments
        for i in 1..=nr {
            let r = o.alpha(i);
            let mut s = 2.0 * v * al[i - 1];
            grad[(r, o.v_r())] = 2.0 * al[i - 1];
            grad[(r, o.alpha(i))] += 2.0 * v;
            for j in 1..=nr {
                let mut dj = 0.0;
                for k in 1..=nr {
                    let a = t.a(i, j, k);
                    s += a * al[j - 1] * al[k - 1];
                    dj += a * al[k - 1];
                }
                grad[(r, o.alpha(j))] += 2.0 * dj;
            }
            p[r] = s;
        }

        // angular momentum
        let r = o.v_theta();
        p[r] = v * vt;
        grad[(r, o.v_r())] = vt;
        grad[(r, o.v_theta())] = v;
        for j in 1..=nr.min(nt) {
            let w2 = 1.0 / (2 * j + 1) as f64;
            p[r] += al[j - 1] * ga[j - 1] * w2;
            grad[(r, o.alpha(j))] = ga[j - 1] * w2;
            grad[(r, o.gamma(j))] = al[j - 1] * w2;
        }

        // angular moments
        for i in 1..=nt {
            let r = o.gamma(i);
            let mut s = v * ga[i - 1];
            grad[(r, o.v_r())] = ga[i - 1];
            grad[(r, o.gamma(i))] += v;
            if i <= nr {
                s += vt * al[i - 1];
                grad[(r, o.v_theta())] = al[i - 1];
                grad[(r, o.alpha(i))] += vt;
            }
            for j in 1..=nr {
                for k in 1..=nt {
                    let a = t.a(i, j, k);
                    s += a * al[j - 1] * ga[k - 1];
                    grad[(r, o.alpha(j))] += a * ga[k - 1];
                    grad[(r, o.gamma(k))] += a * al[j - 1];
                }
            }
            p[r] = s;
        }

        FluxParts { p, grad }
    }

    /// Conservative radial flux `F_r(V)`.
    pub fn flux_radial(&self, state: &MomentState) -> Result<Vec<f64>> {
        let w = self.primitives(state)?;
        Ok(self.flux_from(&w))
    }

    pub(crate) fn flux_from(&self, w: &Primitives) -> Vec<f64> {
        let parts = self.flux_parts(w);
        let mut f: Vec<f64> = parts.p.iter().map(|p| w.h * p).collect();
        f[0] = w.h * w.v_r;
        f[1] += 0.5 * self.config().g * w.h * w.h;
        f
    }

    /// Analytic `∂F_r/∂V`.
    pub fn flux_jacobian(&self, state: &MomentState) -> Result<DMatrix<f64>> {
        let w = self.primitives(state)?;
        Ok(self.jacobian_from(&w))
    }

    fn jacobian_from(&self, w: &Primitives) -> DMatrix<f64> {
        let m = self.orders().dim();
        let FluxParts { p, mut grad } = self.flux_parts(w);
        // mass row: F = hv_rm is linear in V
        grad.row_mut(0).fill(0.0);
        grad[(0, 1)] = 1.0;
        for r in 1..m {
            grad[(r, 0)] = -p[r];
        }
        grad[(1, 0)] += self.config().g * w.h;
        grad
    }

    /// `Q_r` such that the non-conservative product is `Q_r · ∂V/∂r`.
    pub fn nonconservative_matrix(&self, state: &MomentState) -> Result<DMatrix<f64>> {
        let w = self.primitives(state)?;
        Ok(self.nonconservative_from(&w))
    }

    fn nonconservative_from(&self, w: &Primitives) -> DMatrix<f64> {
        let o = self.orders();
        let t = self.tables();
        let (nr, nt) = (o.nr, o.nt);
        let mut q = DMatrix::<f64>::zeros(o.dim(), o.dim());
        for i in 1..=nr {
            let r = o.alpha(i);
            q[(r, o.alpha(i))] += w.v_r;
            for j in 1..=nr {
                let s: f64 = (1..=nr).map(|k| t.b(i, j, k) * w.alpha[k - 1]).sum();
                q[(r, o.alpha(j))] -= s;
            }
        }
        for i in 1..=nt {
            let r = o.gamma(i);
            if i <= nr {
                q[(r, o.alpha(i))] += w.v_theta;
            }
            for j in 1..=nr {
                let s: f64 = (1..=nt).map(|k| t.b(i, j, k) * w.gamma[k - 1]).sum();
                q[(r, o.alpha(j))] -= s;
            }
        }
        q
    }

    /// `∂F_r/∂V − Q_r` evaluated at `w` as given (no truncation).
    pub fn assembled_matrix(&self, w: &Primitives) -> DMatrix<f64> {
        self.jacobian_from(w) - self.nonconservative_from(w)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ModelConfig, Orders, Variant};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(nr: usize, nt: usize) -> Model {
        Model::new(ModelConfig::new(nr, nt, Variant::Aswme)).unwrap()
    }

    fn prims(h: f64, v: f64, alpha: &[f64], vt: f64, gamma: &[f64]) -> Primitives {
        Primitives {
            h,
            v_r: v,
            alpha: alpha.to_vec(),
            v_theta: vt,
            gamma: gamma.to_vec(),
        }
    }

    fn random_prims(rng: &mut ChaCha8Rng, o: Orders) -> Primitives {
        Primitives {
            h: rng.random_range(0.5..3.0),
            v_r: rng.random_range(-1.0..1.0),
            alpha: (0..o.nr).map(|_| rng.random_range(-1.0..1.0)).collect(),
            v_theta: rng.random_range(-1.0..1.0),
            gamma: (0..o.nt).map(|_| rng.random_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn rest_state_flux() {
        for (nr, nt) in [(0, 0), (2, 0), (2, 2), (3, 1)] {
            let m = model(nr, nt);
            let s = Primitives::at_rest(1.0, m.orders()).to_state();
            let f = m.flux_radial(&s).unwrap();
            assert_eq!(f[1], 0.5);
            assert!(f.iter().enumerate().all(|(i, x)| i == 1 || *x == 0.0));
        }
    }

    #[test]
    fn second_order_radial_flux() {
        let m = model(2, 0);
        let f = m
            .flux_radial(&prims(1.0, 1.0, &[1.0, 1.0], 0.0, &[]).to_state())
            .unwrap();
        let expected = [
            1.0,
            1.0 + 1.0 / 3.0 + 1.0 / 5.0 + 0.5,
            4.0 / 5.0 + 2.0,
            2.0 / 3.0 + 2.0 / 7.0 + 2.0,
            0.0,
        ];
        for (a, b) in f.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{f:?}");
        }
    }

    #[test]
    fn angular_momentum_flux_couples_first_moments() {
        let m = model(1, 1);
        let f = m
            .flux_radial(&prims(1.0, 1.0, &[1.0], 2.0, &[1.0]).to_state())
            .unwrap();
        assert!((f[m.orders().v_theta()] - (2.0 + 1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn rest_state_jacobian() {
        let m = model(2, 2);
        let s = Primitives::at_rest(1.0, m.orders()).to_state();
        let j = m.flux_jacobian(&s).unwrap();
        assert_eq!(j[(0, 1)], 1.0);
        assert_eq!(j[(1, 0)], 1.0);
        let nonzero = j.iter().filter(|x| **x != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (nr, nt) in [(2, 0), (2, 2), (1, 3)] {
            let m = model(nr, nt);
            for _ in 0..20 {
                let s = random_prims(&mut rng, m.orders()).to_state();
                let j = m.flux_jacobian(&s).unwrap();
                for c in 0..s.len() {
                    let step = 1e-6 * s.0[c].abs().max(1.0);
                    let mut plus = s.clone();
                    let mut minus = s.clone();
                    plus.0[c] += step;
                    minus.0[c] -= step;
                    let fp = m.flux_radial(&plus).unwrap();
                    let fm = m.flux_radial(&minus).unwrap();
                    for r in 0..s.len() {
                        let fd = (fp[r] - fm[r]) / (2.0 * step);
                        assert!((fd - j[(r, c)]).abs() <= 1e-6 * (1.0 + fd.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn second_order_nonconservative_block() {
        let m = model(2, 0);
        let w = prims(1.0, 2.0, &[1.0, 1.0], 0.0, &[]);
        let q = m.nonconservative_matrix(&w.to_state()).unwrap();
        let (a1, a2) = (2, 3);
        assert!((q[(a1, a1)] - (-1.0 / 5.0 + 2.0)).abs() < 1e-14);
        assert!((q[(a1, a2)] - 1.0 / 5.0).abs() < 1e-14);
        assert!((q[(a2, a1)] - 1.0).abs() < 1e-14);
        assert!((q[(a2, a2)] - (1.0 / 7.0 + 2.0)).abs() < 1e-14);
        for c in 0..5 {
            assert_eq!(q[(0, c)], 0.0);
            assert_eq!(q[(1, c)], 0.0);
            assert_eq!(q[(4, c)], 0.0);
        }
    }

    #[test]
    fn nonconservative_diagonals_without_moments() {
        let m = model(3, 2);
        let o = m.orders();
        let mut w = Primitives::at_rest(2.0, o);
        w.v_r = 0.7;
        w.v_theta = -0.4;
        let q = m.nonconservative_matrix(&w.to_state()).unwrap();
        for r in 0..o.dim() {
            for c in 0..o.dim() {
                let expected = match (r, c) {
                    (r, c) if r == c && (2..=4).contains(&r) => 0.7,
                    (r, c) if r == o.gamma(1) && c == o.alpha(1) => -0.4,
                    (r, c) if r == o.gamma(2) && c == o.alpha(2) => -0.4,
                    _ => 0.0,
                };
                assert_eq!(q[(r, c)], expected, "({r},{c})");
            }
        }
    }

    #[test]
    fn angular_moment_row_carries_mean_angular_velocity() {
        let m = model(1, 1);
        let w = prims(1.0, 0.2, &[0.0], 0.9, &[0.5]);
        let q = m.nonconservative_matrix(&w.to_state()).unwrap();
        let o = m.orders();
        // Q̃^1 = v_θm ∂(hα_1) − B_111 γ_1 ∂(hα_1), B_111 = 0
        assert!((q[(o.gamma(1), o.alpha(1))] - 0.9).abs() < 1e-15);
    }
}
