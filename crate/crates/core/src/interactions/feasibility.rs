use serde::{Deserialize, Serialize};

use super::ConstraintSet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::DrModel;
use crate::pca::PcaConfig;
use crate::Point2;

/// PCA cells are feasible when the constrained residual is at most this
/// fraction of the plane width.
pub const PCA_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneBounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl PlaneBounds {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let b = PlaneBounds { xmin, xmax, ymin, ymax };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite())
            && self.xmax > self.xmin
            && self.ymax > self.ymin;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("plane bounds need positive extent: {self:?}")))
        }
    }

    /// Bounding box of `positions` expanded by `margin` of its extent on
    /// every side. A zero extent is widened to 1.
    pub fn around(positions: &[Point2], margin: f64) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in positions {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        if positions.is_empty() {
            (xmin, xmax, ymin, ymax) = (-0.5, 0.5, -0.5, 0.5);
        }
        let expand = |lo: f64, hi: f64| {
            let w = hi - lo;
            if w > 0.0 {
                (lo - margin * w, hi + margin * w)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (xmin, xmax) = expand(xmin, xmax);
        let (ymin, ymax) = expand(ymin, ymax);
        PlaneBounds { xmin, xmax, ymin, ymax }
    }

    /// Default plane: bounding box plus 10% per side.
    pub fn default_for(positions: &[Point2]) -> Self {
        Self::around(positions, 0.1)
    }

    /// Plane width `m`.
    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn cell_center(&self, i: usize, j: usize, resolution: (usize, usize)) -> Point2 {
        [
            self.xmin + (i as f64 + 0.5) * self.width() / resolution.0 as f64,
            self.ymin + (j as f64 + 0.5) * self.height() / resolution.1 as f64,
        ]
    }
}

/// Binary feasibility mask over a regular grid of cell centers.
///
/// `mask[i][j]` is the cell at column `i` (x) and row `j` (y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMap {
    pub plane_bounds: PlaneBounds,
    pub resolution: (usize, usize),
    pub mask: Vec<Vec<bool>>,
    /// PCA: constrained residual. Autoencoder: number of violations.
    pub residuals: Vec<Vec<f64>>,
}

impl FeasibilityMap {
    pub fn feasible_count(&self) -> usize {
        self.mask.iter().flatten().filter(|&&b| b).count()
    }

    pub fn all_feasible(&self) -> bool {
        self.mask.iter().flatten().all(|&b| b)
    }
}

/// Feasibility of moving the point at `x` to plane position `y`.
///
/// Returns the verdict and the residual (PCA) or violation count
/// (autoencoder).
pub fn is_feasible_at(
    model: &DrModel,
    x: &[f64],
    constraints: &ConstraintSet,
    y: Point2,
    plane_width: f64,
) -> Result<(bool, f64)> {
    match model {
        DrModel::Pca(m) => {
            let anchor = m.project(x)?;
            let dy = [y[0] - anchor[0], y[1] - anchor[1]];
            let sol = m.backward_constrained(dy, constraints, x, &PcaConfig::default())?;
            Ok((sol.residual <= PCA_FEASIBILITY_TOL * plane_width, sol.residual))
        }
        DrModel::Autoencoder(m) => {
            let f = m.feasibility(y, constraints);
            Ok((f.feasible, f.violations.len() as f64))
        }
    }
}

/// Evaluates feasibility at every cell center of a `resolution` grid over
/// `bounds` for the point currently at `x`.
pub fn compute_feasibility_map(
    model: &DrModel,
    x: &[f64],
    constraints: &ConstraintSet,
    resolution: (usize, usize),
    bounds: PlaneBounds,
    exec: Execution,
) -> Result<FeasibilityMap> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::InvalidConfig(format!(
            "resolution must be at least 2x2, got {}x{}",
            resolution.0, resolution.1
        )));
    }
    bounds.validate()?;
    if constraints.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: constraints.dim(),
        });
    }
    constraints.validate()?;
    let (nx, ny) = resolution;
    let width = bounds.width();
    let cells = exec.map_range(nx * ny, |k| {
        let (i, j) = (k / ny, k % ny);
        is_feasible_at(model, x, constraints, bounds.cell_center(i, j, resolution), width)
    });
    let mut mask = vec![vec![false; ny]; nx];
    let mut residuals = vec![vec![0.0; ny]; nx];
    for (k, cell) in cells.into_iter().enumerate() {
        let (ok, r) = cell?;
        mask[k / ny][k % ny] = ok;
        residuals[k / ny][k % ny] = r;
    }
    Ok(FeasibilityMap {
        plane_bounds: bounds,
        resolution,
        mask,
        residuals,
    })
}
