use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ConvexBody, HalfSpace};
use crate::error::{FinslerError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// JSON description of a body, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Polytope {
        halfspaces: Vec<HalfSpaceSpec>,
    },
    LsePolytope {
        halfspaces: Vec<HalfSpaceSpec>,
        #[serde(default)]
        beta: Option<f64>,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
}

fn facets(hs: &[HalfSpaceSpec]) -> Result<Vec<HalfSpace>> {
    hs.iter()
        .map(|h| HalfSpace::new(h.normal.clone(), h.offset))
        .collect()
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                if shape.len() != n || shape.iter().any(|r| r.len() != n) {
                    return Err(FinslerError::InvalidBody("shape must be n×n".into()));
                }
                ConvexBody::ellipsoid(center.clone(), DMatrix::from_fn(n, n, |i, j| shape[i][j]))
            }
            BodySpec::Polytope { halfspaces } => ConvexBody::polytope(facets(halfspaces)?),
            BodySpec::LsePolytope { halfspaces, beta } => {
                ConvexBody::lse_polytope(facets(halfspaces)?, *beta)
            }
            BodySpec::Halfspace { normal, offset } => {
                ConvexBody::half_space(normal.clone(), *offset)
            }
        }
    }
}
