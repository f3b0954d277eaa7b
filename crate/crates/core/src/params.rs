//! Physical parameters and the rescaling to dimensionless form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Turning kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Cells scan the signal in the direction of the post-turning velocity.
    A,
    /// Cells scan the signal in the direction of the velocity change.
    B,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(ModelKind::A),
            "B" | "b" => Ok(ModelKind::B),
            other => Err(Error::invalid(
                "model",
                format!("expected A or B, got {other:?}"),
            )),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::A => f.write_str("A"),
            ModelKind::B => f.write_str("B"),
        }
    }
}

/// Dimensional coefficients: turning sensing range `alpha`, production `beta`,
/// decay `gamma`, turning rate `kappa` and signal diffusivity `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub d: f64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, kappa: f64, d: f64) -> Result<Self> {
        let p = PhysicalParams {
            alpha,
            beta,
            gamma,
            kappa,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("D", self.d),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

/// Multipliers taking dimensional variables to dimensionless ones:
/// `t → time·t`, `v → velocity·v`, `x → space·x`, `f → density·f`,
/// `S → signal·S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    pub time: f64,
    pub velocity: f64,
    pub space: f64,
    pub density: f64,
    pub signal: f64,
}

impl ScalingFactors {
    pub fn identity() -> Self {
        ScalingFactors {
            time: 1.0,
            velocity: 1.0,
            space: 1.0,
            density: 1.0,
            signal: 1.0,
        }
    }

    /// Multipliers of the inverse map.
    pub fn inverse(&self) -> Self {
        ScalingFactors {
            time: 1.0 / self.time,
            velocity: 1.0 / self.velocity,
            space: 1.0 / self.space,
            density: 1.0 / self.density,
            signal: 1.0 / self.signal,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        ScalingFactors {
            time: self.time * other.time,
            velocity: self.velocity * other.velocity,
            space: self.space * other.space,
            density: self.density * other.density,
            signal: self.signal * other.signal,
        }
    }
}

/// Rescaling that removes every parameter from the kinetic/elliptic system.
pub fn rescale(params: &PhysicalParams) -> Result<ScalingFactors> {
    params.validate()?;
    let PhysicalParams {
        alpha,
        beta,
        gamma,
        kappa,
        d,
    } = *params;
    let k = (gamma / d).sqrt();
    Ok(ScalingFactors {
        time: alpha,
        velocity: 1.0 / (alpha * k),
        space: 1.0 / k,
        density: alpha * gamma * gamma / (kappa * beta * d),
        signal: k / kappa,
    })
}
