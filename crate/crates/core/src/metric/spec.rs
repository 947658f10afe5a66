use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    conformal_control, euclidean, minkowski, randers, reverse, sum, zermelo, FinslerMetric,
    FormField, MatrixField, WindField,
};
use crate::body::{BodySpec, ConvexBody};
use crate::error::{FinslerError, Result};
use crate::funk_hilbert::{
    funk_metric, hilbert_metric, klein_metric, reverse_funk_metric, spherical_projective_metric,
};

fn square(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(FinslerError::InvalidMetric("matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSpec {
    Constant(Vec<Vec<f64>>),
    KleinBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormSpec {
    Zero,
    Constant(Vec<f64>),
    FunkBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindSpec {
    Constant(Vec<f64>),
    Position,
    Linear {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
}

/// JSON description of a metric, tagged by `"type"`. Body-based metrics
/// use the body passed to [`MetricSpec::build`] unless they carry their own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricSpec {
    Funk {
        #[serde(default)]
        body: Option<BodySpec>,
    },
    ReverseFunk {
        #[serde(default)]
        body: Option<BodySpec>,
    },
    Hilbert {
        #[serde(default)]
        body: Option<BodySpec>,
    },
    Klein {
        #[serde(default)]
        dim: Option<usize>,
    },
    Spherical {
        #[serde(default)]
        dim: Option<usize>,
    },
    Euclidean {
        #[serde(default)]
        dim: Option<usize>,
    },
    Conformal {
        #[serde(default)]
        dim: Option<usize>,
    },
    /// Gauge of the unit body.
    Minkowski {
        #[serde(default)]
        body: Option<BodySpec>,
    },
    Randers {
        g: FieldSpec,
        theta: FormSpec,
        #[serde(default)]
        dim: Option<usize>,
    },
    Zermelo {
        base: Box<MetricSpec>,
        wind: WindSpec,
    },
    Reverse {
        inner: Box<MetricSpec>,
    },
    Sum {
        a: Box<MetricSpec>,
        b: Box<MetricSpec>,
    },
}

impl MetricSpec {
    /// Shorthand for a bare selector such as `"hilbert"`.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "funk" => MetricSpec::Funk { body: None },
            "reverse-funk" => MetricSpec::ReverseFunk { body: None },
            "hilbert" => MetricSpec::Hilbert { body: None },
            "klein" => MetricSpec::Klein { dim: None },
            "spherical" => MetricSpec::Spherical { dim: None },
            "euclidean" => MetricSpec::Euclidean { dim: None },
            "conformal" => MetricSpec::Conformal { dim: None },
            "minkowski" => MetricSpec::Minkowski { body: None },
            _ => return None,
        })
    }

    pub fn build(&self, body: Option<&ConvexBody>) -> Result<FinslerMetric> {
        let pick = |own: &Option<BodySpec>| -> Result<ConvexBody> {
            match (own, body) {
                (Some(spec), _) => spec.build(),
                (None, Some(b)) => Ok(b.clone()),
                (None, None) => Err(FinslerError::InvalidMetric("metric needs a body".into())),
            }
        };
        let dim = |d: &Option<usize>| -> Result<usize> {
            d.or_else(|| body.map(|b| b.dim()))
                .ok_or_else(|| FinslerError::InvalidMetric("dimension not given".into()))
        };
        match self {
            MetricSpec::Funk { body: own } => funk_metric(pick(own)?),
            MetricSpec::ReverseFunk { body: own } => reverse_funk_metric(pick(own)?),
            MetricSpec::Hilbert { body: own } => hilbert_metric(pick(own)?),
            MetricSpec::Klein { dim: d } => Ok(klein_metric(dim(d)?)),
            MetricSpec::Spherical { dim: d } => Ok(spherical_projective_metric(dim(d)?)),
            MetricSpec::Euclidean { dim: d } => Ok(euclidean(dim(d)?)),
            MetricSpec::Conformal { dim: d } => Ok(conformal_control(dim(d)?)),
            MetricSpec::Minkowski { body: own } => minkowski(pick(own)?),
            MetricSpec::Randers { g, theta, dim: d } => {
                let g = match g {
                    FieldSpec::Constant(m) => MatrixField::Constant(square(m)?),
                    FieldSpec::KleinBall => MatrixField::KleinBall,
                };
                let n = match &g {
                    MatrixField::Constant(m) => m.nrows(),
                    MatrixField::KleinBall => dim(d)?,
                };
                let theta = match theta {
                    FormSpec::Zero => FormField::Zero,
                    FormSpec::Constant(b) => FormField::Constant(b.clone()),
                    FormSpec::FunkBall => FormField::FunkBall,
                };
                randers(n, g, theta)
            }
            MetricSpec::Zermelo { base, wind } => {
                let base = base.build(body)?;
                let wind = match wind {
                    WindSpec::Constant(z) => WindField::Constant(z.clone()),
                    WindSpec::Position => WindField::Position,
                    WindSpec::Linear { matrix, offset } => {
                        WindField::Linear(square(matrix)?, offset.clone())
                    }
                };
                zermelo(base, wind)
            }
            MetricSpec::Reverse { inner } => Ok(reverse(inner.build(body)?)),
            MetricSpec::Sum { a, b } => sum(a.build(body)?, b.build(body)?),
        }
    }
}
