//! Named families of initial phase-space densities.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{SpatialGrid, VelocityGrid};

use super::io::read_field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialFamily {
    /// `exp(−(x−c_x)²/2σ_x²) · exp(−(v−c_v)²/2σ_v²)`; centers `[c_x, c_v]`,
    /// widths `[σ_x, σ_v]`.
    GaussianProduct,
    /// `exp(−|x−c|/w) · ½e^{−|v|}`; centers `[c]`, widths `[w]`.
    ExponentialSignal,
    /// Two Gaussians in `x` at `centers = [a, b]` times a Gaussian in `v`;
    /// widths `[σ_x, σ_v]`.
    DoubleBump,
    /// A binary field written by [`super::io::write_field`]; its grid
    /// replaces the configured one.
    File,
}

impl std::str::FromStr for InitialFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-product" => Ok(InitialFamily::GaussianProduct),
            "exponential-signal" => Ok(InitialFamily::ExponentialSignal),
            "double-bump" => Ok(InitialFamily::DoubleBump),
            "file" => Ok(InitialFamily::File),
            other => Err(Error::invalid(
                "family",
                format!("unknown initial family {other:?}"),
            )),
        }
    }
}

/// Family plus parameters; the result is always rescaled to mass `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialCondition {
    pub family: InitialFamily,
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub path: Option<PathBuf>,
}

impl InitialCondition {
    pub fn gaussian_product() -> Self {
        InitialCondition {
            family: InitialFamily::GaussianProduct,
            centers: Vec::new(),
            widths: Vec::new(),
            path: None,
        }
    }

    fn expected_len(&self) -> Option<usize> {
        match self.family {
            InitialFamily::GaussianProduct | InitialFamily::DoubleBump => Some(2),
            InitialFamily::ExponentialSignal => Some(1),
            InitialFamily::File => None,
        }
    }

    fn defaults(&self) -> (Vec<f64>, Vec<f64>) {
        match self.family {
            InitialFamily::GaussianProduct => (vec![0.0, 0.0], vec![1.0, 1.0]),
            InitialFamily::ExponentialSignal => (vec![0.0], vec![1.0]),
            InitialFamily::DoubleBump => (vec![-3.0, 3.0], vec![1.0, 1.0]),
            InitialFamily::File => (Vec::new(), Vec::new()),
        }
    }

    fn parameters(&self) -> (Vec<f64>, Vec<f64>) {
        let (c, w) = self.defaults();
        let centers = if self.centers.is_empty() {
            c
        } else {
            self.centers.clone()
        };
        let widths = if self.widths.is_empty() {
            w
        } else {
            self.widths.clone()
        };
        (centers, widths)
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == InitialFamily::File {
            return match &self.path {
                Some(_) => Ok(()),
                None => Err(Error::invalid(
                    "initial.path",
                    "family \"file\" needs a path",
                )),
            };
        }
        let n = self.expected_len().expect("parametric family");
        let (centers, widths) = self.parameters();
        if centers.len() != n {
            return Err(Error::invalid(
                "initial.centers",
                format!("expected {n} values, got {}", centers.len()),
            ));
        }
        if widths.len() != n {
            return Err(Error::invalid(
                "initial.widths",
                format!("expected {n} values, got {}", widths.len()),
            ));
        }
        if let Some(c) = centers.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "initial.centers",
                format!("must be finite, got {c}"),
            ));
        }
        if let Some(w) = widths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::invalid(
                "initial.widths",
                format!("must be positive, got {w}"),
            ));
        }
        Ok(())
    }

    /// Samples the family on `x × v` and rescales to `mass`.
    pub fn build(&self, x: SpatialGrid, v: VelocityGrid, mass: f64) -> Result<PhaseField> {
        self.validate()?;
        let (c, w) = self.parameters();
        let raw = match self.family {
            InitialFamily::GaussianProduct => PhaseField::from_fn(x, v, |a, b| {
                let (ya, yb) = ((a - c[0]) / w[0], (b - c[1]) / w[1]);
                (-0.5 * (ya * ya + yb * yb)).exp()
            })?,
            InitialFamily::ExponentialSignal => PhaseField::from_fn(x, v, |a, b| {
                (-(a - c[0]).abs() / w[0]).exp() * 0.5 * (-b.abs()).exp()
            })?,
            InitialFamily::DoubleBump => PhaseField::from_fn(x, v, |a, b| {
                let bump = |z: f64| (-0.5 * (z / w[0]).powi(2)).exp();
                (bump(a - c[0]) + bump(a - c[1])) * (-0.5 * (b / w[1]).powi(2)).exp()
            })?,
            InitialFamily::File => read_field(self.path.as_ref().expect("validated"))?,
        };
        if !(raw.mass() > 0.0) {
            return Err(Error::invalid(
                "initial",
                "initial density has no mass on the grid",
            ));
        }
        raw.normalized(mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grids;

    #[test]
    fn families_have_requested_mass() {
        let (x, v) = make_grids(10.0, 101, 10.0, 101).unwrap();
        for family in [
            InitialFamily::GaussianProduct,
            InitialFamily::ExponentialSignal,
            InitialFamily::DoubleBump,
        ] {
            let ic = InitialCondition {
                family,
                centers: vec![],
                widths: vec![],
                path: None,
            };
            let f = ic.build(x, v, 3.5).unwrap();
            assert!((f.mass() - 3.5).abs() < 1e-12);
            assert!(f.values().iter().all(|&y| y >= 0.0));
        }
    }

    #[test]
    fn wrong_parameter_count_names_field() {
        let ic = InitialCondition {
            family: InitialFamily::ExponentialSignal,
            centers: vec![0.0, 1.0],
            widths: vec![],
            path: None,
        };
        assert!(
            matches!(ic.validate(), Err(Error::InvalidParameter { ref name, .. }) if name == "initial.centers")
        );
    }

    #[test]
    fn off_grid_bump_is_rejected() {
        let (x, v) = make_grids(1.0, 11, 1.0, 11).unwrap();
        let ic = InitialCondition {
            family: InitialFamily::GaussianProduct,
            centers: vec![1e4, 0.0],
            widths: vec![1.0, 1.0],
            path: None,
        };
        assert!(ic.build(x, v, 1.0).is_err());
    }
}
