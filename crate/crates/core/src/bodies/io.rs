//! JSON body files.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{reuleaux, Body, Ellipsoid, EllipsoidParams, VPolytope};

/// Default number of arc samples for `{"type":"reuleaux"}`.
pub const REULEAUX_DEFAULT_SAMPLES: usize = 360;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Reuleaux {
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    EllipsoidParams {
        #[serde(rename = "R")]
        big_r: f64,
        r: f64,
        delta: f64,
        /// Ambient dimension, 2 when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

fn square_matrix(rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("shape must be a {n}x{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl BodySpec {
    pub fn build(&self) -> Result<Body> {
        match self {
            BodySpec::Vpolytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::Parse("vpolytope needs at least one vertex".into()));
                }
                Ok(Body::Polytope(VPolytope::from_rows(vertices)?))
            }
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                Ok(Body::Ellipsoid(Ellipsoid::new(
                    DVector::from_vec(center.clone()),
                    square_matrix(shape, n)?,
                )?))
            }
            BodySpec::Ball { center, radius } => Ok(Body::Ellipsoid(Ellipsoid::ball(
                DVector::from_vec(center.clone()),
                *radius,
            )?)),
            BodySpec::Reuleaux { width, m } => reuleaux(*width, m.unwrap_or(REULEAUX_DEFAULT_SAMPLES)),
            BodySpec::EllipsoidParams {
                big_r,
                r,
                delta,
                dim,
            } => Ok(Body::Ellipsoid(
                EllipsoidParams::new(*big_r, *r, *delta)?.to_ellipsoid(dim.unwrap_or(2))?,
            )),
        }
    }

    /// Canonical form: polytopes as vertex lists, ellipsoids as center+shape.
    pub fn from_body(body: &Body) -> Self {
        match body {
            Body::Polytope(p) => BodySpec::Vpolytope {
                vertices: p.vertices().iter().map(|v| v.iter().cloned().collect()).collect(),
            },
            Body::Ellipsoid(e) => BodySpec::Ellipsoid {
                center: e.center().iter().cloned().collect(),
                shape: e
                    .shape()
                    .row_iter()
                    .map(|r| r.iter().cloned().collect())
                    .collect(),
            },
        }
    }
}

pub fn parse_body(text: &str) -> Result<Body> {
    let spec: BodySpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.build()
}

impl Body {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&BodySpec::from_body(self)).expect("body specs serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_variant() {
        let cases = [
            r#"{"type":"vpolytope","vertices":[[0,0],[1,0],[0,1]]}"#,
            r#"{"type":"ellipsoid","center":[0,0],"shape":[[2,0],[0,1]]}"#,
            r#"{"type":"ball","center":[0,0,0],"radius":1.5}"#,
            r#"{"type":"reuleaux","width":2}"#,
            r#"{"type":"ellipsoid_params","R":1,"r":0.5,"delta":0.25}"#,
            r#"{"type":"ellipsoid_params","R":1,"r":0.5,"delta":0.25,"dim":3}"#,
        ];
        let dims = [2, 2, 3, 2, 2, 3];
        for (c, d) in cases.iter().zip(dims) {
            assert_eq!(parse_body(c).unwrap().dim(), d, "{c}");
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_body(r#"{"type":"cone"}"#).is_err());
        assert!(parse_body(r#"{"type":"ellipsoid","center":[0,0],"shape":[[1,0]]}"#).is_err());
        assert!(parse_body("not json").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let b = parse_body(r#"{"type":"vpolytope","vertices":[[0.1,0.2],[1.7,0.3],[0.3,1.9]]}"#).unwrap();
        assert_eq!(parse_body(&b.to_json()).unwrap(), b);
        let e = parse_body(r#"{"type":"ellipsoid","center":[0.1,0],"shape":[[0.3,0.1],[0,1]]}"#).unwrap();
        assert_eq!(parse_body(&e.to_json()).unwrap(), e);
    }
}
