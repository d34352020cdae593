use crate::error::{Error, Result};

/// Expansion orders `(N_r, N_θ)` and the index layout they induce on the
/// conservative vector `(h, hv_rm, hα_1..hα_Nr, hv_θm, hγ_1..hγ_Nθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Orders {
    pub nr: usize,
    pub nt: usize,
}

impl Orders {
    pub const fn new(nr: usize, nt: usize) -> Self {
        Orders { nr, nt }
    }

    /// System dimension `3 + N_r + N_θ`.
    #[inline]
    pub const fn dim(&self) -> usize {
        3 + self.nr + self.nt
    }

    #[inline]
    pub const fn h(&self) -> usize {
        0
    }

    #[inline]
    pub const fn v_r(&self) -> usize {
        1
    }

    /// Index of `hα_i`, 1-based `i`.
    #[inline]
    pub const fn alpha(&self, i: usize) -> usize {
        1 + i
    }

    #[inline]
    pub const fn v_theta(&self) -> usize {
        2 + self.nr
    }

    /// Index of `hγ_i`, 1-based `i`.
    #[inline]
    pub const fn gamma(&self, i: usize) -> usize {
        2 + self.nr + i
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                nr: self.nr,
                nt: self.nt,
                expected: self.dim(),
                got: len,
            })
        }
    }
}

/// Primitive variables at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitives {
    pub h: f64,
    pub v_r: f64,
    pub alpha: Vec<f64>,
    pub v_theta: f64,
    pub gamma: Vec<f64>,
}

impl Primitives {
    pub fn at_rest(h: f64, orders: Orders) -> Self {
        Primitives {
            h,
            v_r: 0.0,
            alpha: vec![0.0; orders.nr],
            v_theta: 0.0,
            gamma: vec![0.0; orders.nt],
        }
    }

    pub fn orders(&self) -> Orders {
        Orders::new(self.alpha.len(), self.gamma.len())
    }

    /// Moments above the first set to zero.
    pub fn truncated(&self) -> Self {
        let mut out = self.clone();
        out.alpha.iter_mut().skip(1).for_each(|a| *a = 0.0);
        out.gamma.iter_mut().skip(1).for_each(|g| *g = 0.0);
        out
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha.first().copied().unwrap_or(0.0)
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma.first().copied().unwrap_or(0.0)
    }

    pub fn to_state(&self) -> MomentState {
        let o = self.orders();
        let mut v = Vec::with_capacity(o.dim());
        v.push(self.h);
        v.push(self.h * self.v_r);
        v.extend(self.alpha.iter().map(|a| self.h * a));
        v.push(self.h * self.v_theta);
        v.extend(self.gamma.iter().map(|g| self.h * g));
        MomentState(v)
    }
}

/// Conservative unknowns at one spatial point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState(pub Vec<f64>);

impl MomentState {
    pub fn new(values: Vec<f64>, orders: Orders) -> Result<Self> {
        orders.check_len(values.len())?;
        Ok(MomentState(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.0[0]
    }

    /// Divides out `h`; rejects `h ≤ 0` and a length that does not match
    /// `orders`.
    pub fn primitives(&self, orders: Orders) -> Result<Primitives> {
        orders.check_len(self.0.len())?;
        let h = self.0[0];
        if !(h > 0.0) {
            return Err(Error::NonPositiveHeight(h));
        }
        let inv = 1.0 / h;
        Ok(Primitives {
            h,
            v_r: self.0[orders.v_r()] * inv,
            alpha: (1..=orders.nr)
                .map(|i| self.0[orders.alpha(i)] * inv)
                .collect(),
            v_theta: self.0[orders.v_theta()] * inv,
            gamma: (1..=orders.nt)
                .map(|i| self.0[orders.gamma(i)] * inv)
                .collect(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}
