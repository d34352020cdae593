//! Runtime-selectable system-matrix strategies.
//!
//! Each strategy decides how the quasilinear matrix is formed from a state
//! and how the fastest wave speed is obtained. Strategies are registered by
//! name in a [`VariantRegistry`] and picked from configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Model, ModelConfig, MomentState};
use crate::spectral::{eigenvalues_dense, UnitSpectra};

pub trait SystemVariant: Send + Sync {
    fn name(&self) -> &'static str;

    fn system_matrix(&self, model: &Model, state: &MomentState) -> Result<DMatrix<f64>>;

    /// Largest eigenvalue modulus. The default solves the dense eigenproblem.
    fn spectral_radius(&self, model: &Model, state: &MomentState) -> Result<f64> {
        let m = self.system_matrix(model, state)?;
        Ok(eigenvalues_dense(&m)?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

/// Full moment system: `∂F/∂V − Q` at the state itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct Aswme;

impl SystemVariant for Aswme {
    fn name(&self) -> &'static str {
        "aswme"
    }

    fn system_matrix(&self, model: &Model, state: &MomentState) -> Result<DMatrix<f64>> {
        let w = model.primitives(state)?;
        Ok(model.assembled_matrix(&w))
    }
}

/// Regularized system: the same assembly at the state with all moments above
/// the first removed. Wave speeds come from the analytic spectrum when the
/// orders admit one.
#[derive(Debug, Clone)]
pub struct Haswme {
    unit: Option<UnitSpectra>,
}

impl Haswme {
    pub fn new(cfg: &ModelConfig) -> Self {
        let o = cfg.orders;
        let unit = (o.nt == 0 || o.nt == o.nr).then(|| UnitSpectra::new(o));
        Haswme { unit }
    }
}

impl SystemVariant for Haswme {
    fn name(&self) -> &'static str {
        "haswme"
    }

    fn system_matrix(&self, model: &Model, state: &MomentState) -> Result<DMatrix<f64>> {
        let w = model.primitives(state)?.truncated();
        Ok(model.assembled_matrix(&w))
    }

    fn spectral_radius(&self, model: &Model, state: &MomentState) -> Result<f64> {
        let Some(unit) = &self.unit else {
            let m = self.system_matrix(model, state)?;
            return Ok(eigenvalues_dense(&m)?
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max));
        };
        let w = model.primitives(state)?;
        let a1 = w.alpha1().abs();
        let gravity = (model.config().g * w.h + a1 * a1).sqrt();
        let moments = unit.max_abs() * a1;
        Ok(w.v_r.abs() + gravity.max(moments))
    }
}

pub type VariantFactory = Arc<dyn Fn(&ModelConfig) -> Result<Box<dyn SystemVariant>> + Send + Sync>;

/// Name → factory table for system-matrix strategies.
#[derive(Clone, Default)]
pub struct VariantRegistry {
    factories: BTreeMap<String, VariantFactory>,
}

impl VariantRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(
            "aswme",
            Arc::new(|_| Ok(Box::new(Aswme) as Box<dyn SystemVariant>)),
        );
        reg.register(
            "haswme",
            Arc::new(|cfg| Ok(Box::new(Haswme::new(cfg)) as Box<dyn SystemVariant>)),
        );
        reg
    }

    /// Adds or replaces the factory stored under `name` (case-insensitive).
    pub fn register(&mut self, name: &str, factory: VariantFactory) {
        self.factories.insert(name.to_ascii_lowercase(), factory);
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn build(&self, name: &str, cfg: &ModelConfig) -> Result<Box<dyn SystemVariant>> {
        match self.factories.get(&name.to_ascii_lowercase()) {
            Some(f) => f(cfg),
            None => Err(Error::UnknownName {
                kind: "model variant",
                name: name.to_string(),
                known: self.names().join(", "),
            }),
        }
    }
}

impl std::fmt::Debug for VariantRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}
