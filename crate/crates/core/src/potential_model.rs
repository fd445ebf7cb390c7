//! Named deterministic background potentials, expressible from configuration.

use crate::error::Result;
use crate::grid::GridSpec;
use crate::operator::PotentialField;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Deterministic potential families used by scans and experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PotentialModel {
    Zero,
    Constant { value: f64 },
    /// 1-periodic separable well, amplitude·Σ_i sin²(π x_i); zero at cell
    /// centers j ∈ Z^d, maximal on the cell faces.
    SinSquaredWell { amplitude: f64 },
    /// amplitude·Σ_i cos(2π x_i).
    Cosine { amplitude: f64 },
}

impl PotentialModel {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PotentialModel::Zero => 0.0,
            PotentialModel::Constant { value } => *value,
            PotentialModel::SinSquaredWell { amplitude } => {
                amplitude * x.iter().map(|&xi| (PI * xi).sin().powi(2)).sum::<f64>()
            }
            PotentialModel::Cosine { amplitude } => {
                amplitude * x.iter().map(|&xi| (2.0 * PI * xi).cos()).sum::<f64>()
            }
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<PotentialField> {
        PotentialField::from_fn(grid, |x| self.eval(x))
    }

    /// `zero`, `constant:<v>`, `sin2well:<amp>`, `cosine:<amp>`.
    pub fn parse(s: &str) -> crate::error::Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> crate::error::Result<f64> {
            a.ok_or_else(|| crate::error::Error::Parse(format!("potential `{s}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|_| crate::error::Error::Parse(format!("bad potential parameter in `{s}`")))
        };
        match name {
            "zero" => Ok(PotentialModel::Zero),
            "constant" => Ok(PotentialModel::Constant { value: num(arg)? }),
            "sin2well" => Ok(PotentialModel::SinSquaredWell { amplitude: num(arg)? }),
            "cosine" => Ok(PotentialModel::Cosine { amplitude: num(arg)? }),
            other => Err(crate::error::Error::Parse(format!("unknown potential model `{other}`"))),
        }
    }

    pub fn to_key(&self) -> String {
        match self {
            PotentialModel::Zero => "zero".into(),
            PotentialModel::Constant { value } => format!("constant:{value}"),
            PotentialModel::SinSquaredWell { amplitude } => format!("sin2well:{amplitude}"),
            PotentialModel::Cosine { amplitude } => format!("cosine:{amplitude}"),
        }
    }
}
