//! JSON formats for matrices, tomographic sets, tomograms and grids.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! arrays. Readers reject ragged input.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};
use crate::fock::{FockSpace, PhotonTomogram, PolarGrid};
use crate::operator::{projector_from_vector, OperatorMatrix};
use crate::sets::{Tomogram, TomographicSet};
use crate::special::{gauss_legendre, QuadratureRule};
use crate::spin::{SphereDirection, SphereNode, SphereQuadrature, SpinTomogramGrid};
use crate::symplectic::{GridSpec, GridWavefunction, SymplecticTomogram};

pub type ComplexPair = [f64; 2];

fn to_pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

fn from_pair(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Clamp applied when writing tomogram probabilities: tiny negatives from
/// roundoff become exact zeros; anything below the tolerance is preserved so
/// that genuinely bad data stays visible.
pub fn clamp_probability(v: f64) -> f64 {
    if (-1e-12..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<ComplexPair>>,
}

impl MatrixJson {
    pub fn from_operator(op: &OperatorMatrix) -> Self {
        let n = op.dim();
        Self {
            dim: n,
            entries: (0..n)
                .map(|i| (0..n).map(|j| to_pair(op.get(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<OperatorMatrix> {
        if self.entries.len() != self.dim {
            return Err(TomoError::RaggedRows {
                row: 0,
                expected: self.dim,
                got: self.entries.len(),
            });
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(TomoError::RaggedRows {
                    row: i,
                    expected: self.dim,
                    got: row.len(),
                });
            }
        }
        OperatorMatrix::from_matrix(DMatrix::from_fn(self.dim, self.dim, |i, j| {
            from_pair(self.entries[i][j])
        }))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SetJson {
    pub dim: usize,
    /// State vectors, one per projector.
    pub projectors: Vec<Vec<ComplexPair>>,
    #[serde(default)]
    pub labels: Option<Vec<serde_json::Value>>,
}

impl SetJson {
    pub fn from_set(set: &TomographicSet) -> Self {
        Self {
            dim: set.dim(),
            projectors: set
                .projectors()
                .iter()
                .map(|p| p.vector().iter().map(|&z| to_pair(z)).collect())
                .collect(),
            labels: Some(
                set.labels()
                    .iter()
                    .map(|l| serde_json::Value::String(l.clone()))
                    .collect(),
            ),
        }
    }

    pub fn to_set(&self) -> Result<TomographicSet> {
        let mut projectors = Vec::with_capacity(self.projectors.len());
        for (i, v) in self.projectors.iter().enumerate() {
            if v.len() != self.dim {
                return Err(TomoError::RaggedRows {
                    row: i,
                    expected: self.dim,
                    got: v.len(),
                });
            }
            let vec = DVector::from_iterator(self.dim, v.iter().map(|&p| from_pair(p)));
            projectors.push(projector_from_vector(&vec)?);
        }
        let labels = match &self.labels {
            Some(ls) => {
                if ls.len() != projectors.len() {
                    return Err(TomoError::LengthMismatch {
                        expected: projectors.len(),
                        got: ls.len(),
                        detail: " (labels)".into(),
                    });
                }
                ls.iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect()
            }
            None => (0..projectors.len()).map(|k| k.to_string()).collect(),
        };
        TomographicSet::new(self.dim, projectors, labels)
    }
}

/// Tomogram file: the set is either inline or a path to a set file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetRef {
    Path(String),
    Inline(SetJson),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TomogramJson {
    pub set: SetRef,
    pub values: Vec<f64>,
}

impl TomogramJson {
    pub fn from_tomogram(tom: &Tomogram) -> Self {
        Self {
            set: SetRef::Inline(SetJson::from_set(tom.set())),
            values: tom.values().iter().map(|&v| clamp_probability(v)).collect(),
        }
    }

    /// Resolves the set reference; relative paths are joined to `base_dir`.
    pub fn to_tomogram(&self, base_dir: Option<&std::path::Path>) -> Result<Tomogram> {
        let set = match &self.set {
            SetRef::Inline(json) => json.to_set()?,
            SetRef::Path(p) => {
                let path = match base_dir {
                    Some(dir) if std::path::Path::new(p).is_relative() => dir.join(p),
                    _ => std::path::PathBuf::from(p),
                };
                let text =
                    std::fs::read_to_string(&path).map_err(|e| TomoError::LengthMismatch {
                        expected: 0,
                        got: 0,
                        detail: format!(" (cannot read set file {}: {e})", path.display()),
                    })?;
                let json: SetJson =
                    serde_json::from_str(&text).map_err(|e| TomoError::LengthMismatch {
                        expected: 0,
                        got: 0,
                        detail: format!(" (set file parse error: {e})"),
                    })?;
                json.to_set()?
            }
        };
        Tomogram::new(Arc::new(set), self.values.clone())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SphereNodeJson {
    pub theta: f64,
    pub phi: f64,
    pub wtheta: f64,
    pub wphi: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpinGridJson {
    pub j2: i32,
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<SphereNodeJson>,
    /// values[node][m] with m descending from +j.
    pub values: Vec<Vec<f64>>,
}

impl SpinGridJson {
    pub fn from_grid(grid: &SpinTomogramGrid) -> Self {
        Self {
            j2: grid.j.twice(),
            n_theta: grid.quad.n_theta,
            n_phi: grid.quad.n_phi,
            nodes: grid
                .quad
                .nodes()
                .iter()
                .map(|n| SphereNodeJson {
                    theta: n.dir.theta,
                    phi: n.dir.phi,
                    wtheta: n.w_theta,
                    wphi: n.w_phi,
                })
                .collect(),
            values: grid
                .values
                .iter()
                .map(|row| row.iter().map(|&v| clamp_probability(v)).collect())
                .collect(),
        }
    }

    pub fn to_grid(&self) -> Result<SpinTomogramGrid> {
        let j = crate::special::HalfInteger::from_twice(self.j2);
        if !j.is_nonnegative() {
            return Err(TomoError::BadAngularMomentum(format!(
                "negative j2 = {}",
                self.j2
            )));
        }
        if self.values.len() != self.nodes.len() {
            return Err(TomoError::LengthMismatch {
                expected: self.nodes.len(),
                got: self.values.len(),
                detail: " (value rows)".into(),
            });
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                Ok(SphereNode {
                    dir: SphereDirection::new(n.theta, n.phi)?,
                    w_theta: n.wtheta,
                    w_phi: n.wphi,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpinTomogramGrid {
            j,
            quad: SphereQuadrature::from_nodes(nodes, self.n_theta, self.n_phi),
            values: self.values.clone(),
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolarGridJson {
    pub radial_nodes: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angular_count: usize,
    pub radius: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PhotonTomogramJson {
    pub nmax: usize,
    pub ncut: usize,
    pub grid: PolarGridJson,
    /// values[n][node]
    pub values: Vec<Vec<f64>>,
}

impl PhotonTomogramJson {
    pub fn from_tomogram(tom: &PhotonTomogram) -> Self {
        Self {
            nmax: tom.space.nmax,
            ncut: tom.ncut,
            grid: PolarGridJson {
                radial_nodes: tom.grid.radial.nodes.clone(),
                radial_weights: tom.grid.radial.weights.clone(),
                angular_count: tom.grid.angular_count,
                radius: tom.grid.radius,
            },
            values: tom
                .values
                .iter()
                .map(|row| row.iter().map(|&v| clamp_probability(v)).collect())
                .collect(),
        }
    }

    pub fn to_tomogram(&self) -> Result<PhotonTomogram> {
        if self.grid.radial_nodes.len() != self.grid.radial_weights.len() {
            return Err(TomoError::LengthMismatch {
                expected: self.grid.radial_nodes.len(),
                got: self.grid.radial_weights.len(),
                detail: " (radial weights)".into(),
            });
        }
        let radial = QuadratureRule {
            nodes: self.grid.radial_nodes.clone(),
            weights: self.grid.radial_weights.clone(),
            a: 0.0,
            b: self.grid.radius,
        };
        Ok(PhotonTomogram {
            space: FockSpace::new(self.nmax)?,
            ncut: self.ncut,
            grid: PolarGrid {
                radial,
                angular_count: self.grid.angular_count,
                radius: self.grid.radius,
            },
            values: self.values.clone(),
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridSpecJson {
    pub min: f64,
    pub max: f64,
    pub npoints: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SymplecticTomogramJson {
    pub xgrid: GridSpecJson,
    /// (mu, nu, mu-weight) per row.
    pub munu_nodes: Vec<[f64; 3]>,
    pub values: Vec<Vec<f64>>,
}

impl SymplecticTomogramJson {
    pub fn from_tomogram(tom: &SymplecticTomogram) -> Self {
        Self {
            xgrid: GridSpecJson {
                min: tom.xgrid.qmin,
                max: tom.xgrid.qmax,
                npoints: tom.xgrid.npoints,
            },
            munu_nodes: tom
                .munu_nodes
                .iter()
                .map(|&(mu, nu, w)| [mu, nu, w])
                .collect(),
            values: tom
                .values
                .iter()
                .map(|row| row.iter().map(|&v| clamp_probability(v)).collect())
                .collect(),
        }
    }

    pub fn to_tomogram(&self) -> Result<SymplecticTomogram> {
        let tom = SymplecticTomogram {
            xgrid: GridSpec::new(self.xgrid.min, self.xgrid.max, self.xgrid.npoints)?,
            munu_nodes: self.munu_nodes.iter().map(|&[m, n, w]| (m, n, w)).collect(),
            values: self.values.clone(),
        };
        tom.validate()?;
        Ok(tom)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WavefunctionJson {
    pub qmin: f64,
    pub qmax: f64,
    pub values: Vec<ComplexPair>,
}

impl WavefunctionJson {
    pub fn from_wavefunction(psi: &GridWavefunction) -> Self {
        Self {
            qmin: psi.grid.qmin,
            qmax: psi.grid.qmax,
            values: psi.values.iter().map(|&z| to_pair(z)).collect(),
        }
    }

    pub fn to_wavefunction(&self) -> Result<GridWavefunction> {
        let grid = GridSpec::new(self.qmin, self.qmax, self.values.len())?;
        GridWavefunction::new(grid, self.values.iter().map(|&p| from_pair(p)).collect())
    }
}

/// Convenience: a seeded default polar grid matching the photon-number
/// reconstruction defaults.
pub fn default_polar_grid() -> Result<PolarGrid> {
    let radial = gauss_legendre(24, 0.0, 4.0)?;
    Ok(PolarGrid {
        radial,
        angular_count: 24,
        radius: 4.0,
    })
}
