//! Axisymmetric moment system: fluxes, non-conservative products,
//! system matrices, geometric forcing and friction.
//!
//! The quasilinear form is
//!
//! ```text
//! ∂V/∂t + A(V) ∂V/∂r = G(V, r) + S(V),     A = ∂F/∂V − Q
//! ```
//!
//! with `V = (h, hv_rm, hα_1..hα_Nr, hv_θm, hγ_1..hγ_Nθ)`. Bottom topography
//! is flat and gravity points along `e_z`.

mod assembly;
mod closed_form;
mod state;
mod terms;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::basis::CouplingTables;
use crate::error::{Error, Result};
use crate::variant::{SystemVariant, VariantRegistry};

pub use closed_form::haswme_closed_form;
pub use state::{MomentState, Orders, Primitives};

/// Which system matrix the transport part uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Full axisymmetric moment equations.
    Aswme,
    /// Hyperbolic regularization: matrix evaluated with `α_i = γ_i = 0`, `i ≥ 2`.
    Haswme,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Aswme, Variant::Haswme];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Aswme => "aswme",
            Variant::Haswme => "haswme",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aswme" => Ok(Variant::Aswme),
            "haswme" => Ok(Variant::Haswme),
            _ => Err(Error::UnknownName {
                kind: "model variant",
                name: s.to_string(),
                known: "aswme, haswme".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub orders: Orders,
    pub g: f64,
    /// Kinematic viscosity ν.
    pub nu: f64,
    /// Slip length λ.
    pub slip: f64,
    pub variant: Variant,
}

impl ModelConfig {
    pub fn new(nr: usize, nt: usize, variant: Variant) -> Self {
        ModelConfig {
            orders: Orders::new(nr, nt),
            g: 1.0,
            nu: 0.0,
            slip: 1.0,
            variant,
        }
    }

    pub fn with_gravity(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_friction(mut self, nu: f64, slip: f64) -> Self {
        self.nu = nu;
        self.slip = slip;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn dim(&self) -> usize {
        self.orders.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::invalid(
                "g",
                format!("must be positive, got {}", self.g),
            ));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(
                "nu",
                format!("must be non-negative, got {}", self.nu),
            ));
        }
        if !(self.slip > 0.0 && self.slip.is_finite()) {
            return Err(Error::NonPositiveSlip(self.slip));
        }
        Ok(())
    }
}

/// A configured moment system: orders, physical constants, coupling tables
/// and the system-matrix strategy.
#[derive(Clone)]
pub struct Model {
    cfg: ModelConfig,
    tables: Arc<CouplingTables>,
    strategy: Arc<dyn SystemVariant>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("cfg", &self.cfg)
            .field("strategy", &self.strategy.name())
            .finish()
    }
}

impl Model {
    /// Builds the model with the strategy registered under `cfg.variant`.
    pub fn new(cfg: ModelConfig) -> Result<Self> {
        let strategy = VariantRegistry::builtin().build(cfg.variant.as_str(), &cfg)?;
        Self::with_strategy(cfg, strategy)
    }

    pub fn with_strategy(cfg: ModelConfig, strategy: Box<dyn SystemVariant>) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.orders.nr.max(cfg.orders.nt);
        Ok(Model {
            cfg,
            tables: Arc::new(CouplingTables::new(n)),
            strategy: Arc::from(strategy),
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn orders(&self) -> Orders {
        self.cfg.orders
    }

    pub fn tables(&self) -> &CouplingTables {
        &self.tables
    }

    pub fn strategy(&self) -> &dyn SystemVariant {
        self.strategy.as_ref()
    }

    pub fn primitives(&self, state: &MomentState) -> Result<Primitives> {
        state.primitives(self.cfg.orders)
    }

    /// Quasilinear system matrix of the configured variant.
    pub fn system_matrix(&self, state: &MomentState) -> Result<DMatrix<f64>> {
        self.strategy.system_matrix(self, state)
    }

    /// Largest eigenvalue modulus of [`Model::system_matrix`].
    pub fn spectral_radius(&self, state: &MomentState) -> Result<f64> {
        self.strategy.spectral_radius(self, state)
    }
}
