//! Two-component PCA with exact out-of-sample forward projection and
//! least-norm / constrained backward projection.
//!
//! Features are optionally z-scored before the fit. The public operations all
//! take and return original feature units; the standardized space only shows
//! up in `components`, whose columns are orthonormal there. A change `dx` in
//! original units maps to the plane as `dy = sum_i (dx[i] / scale[i]) * E[i]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::interactions::ConstraintSet;
use crate::solver::{self, QpProblem, QpSolution};
use crate::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaConfig {
    pub standardize: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PcaConfig {
    fn default() -> Self {
        PcaConfig {
            standardize: true,
            tol: solver::DEFAULT_TOL,
            max_iter: solver::DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PcaModelJson", try_from = "PcaModelJson")]
pub struct PcaModel {
    mean: Vec<f64>,
    /// Population std per feature, as seen at fit time.
    sigmas: Vec<f64>,
    /// Divisor applied after centering: `sigma` (or 1 for constant
    /// features) when standardizing, else 1.
    scale: Vec<f64>,
    components: Vec<Point2>,
    explained_variance: Point2,
    standardize: bool,
}

/// Wire form: components are stored column-major (`e0` then `e1`).
#[derive(Serialize, Deserialize)]
struct PcaModelJson {
    mean: Vec<f64>,
    components: Vec<f64>,
    explained_variance: Point2,
    standardize: bool,
    sigmas: Vec<f64>,
}

impl From<PcaModel> for PcaModelJson {
    fn from(m: PcaModel) -> Self {
        let mut components: Vec<f64> = m.components.iter().map(|r| r[0]).collect();
        components.extend(m.components.iter().map(|r| r[1]));
        PcaModelJson {
            mean: m.mean,
            components,
            explained_variance: m.explained_variance,
            standardize: m.standardize,
            sigmas: m.sigmas,
        }
    }
}

impl TryFrom<PcaModelJson> for PcaModel {
    type Error = Error;

    fn try_from(j: PcaModelJson) -> Result<Self> {
        let d = j.mean.len();
        if j.components.len() != 2 * d {
            return Err(Error::DimensionMismatch {
                expected: 2 * d,
                found: j.components.len(),
            });
        }
        if j.sigmas.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: j.sigmas.len(),
            });
        }
        let components: Vec<Point2> = (0..d).map(|i| [j.components[i], j.components[d + i]]).collect();
        let err = solver::orthonormality_error(&components);
        if !(err <= 1e-8) {
            return Err(Error::NotOrthonormal(err));
        }
        Ok(PcaModel {
            scale: scale_for(&j.sigmas, j.standardize),
            mean: j.mean,
            sigmas: j.sigmas,
            components,
            explained_variance: j.explained_variance,
            standardize: j.standardize,
        })
    }
}

fn scale_for(sigmas: &[f64], standardize: bool) -> Vec<f64> {
    sigmas
        .iter()
        .map(|&s| if standardize && s > 0.0 { s } else { 1.0 })
        .collect()
}

/// Fits the first two principal components via a thin SVD of the centered
/// (and optionally standardized) data matrix.
pub fn fit_pca(data: &Dataset, config: &PcaConfig) -> Result<PcaModel> {
    let (n, d) = (data.n(), data.d());
    if d < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 features, found {d}")));
    }
    let varying = data.stats().iter().filter(|s| !s.is_constant()).count();
    if varying < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 non-constant features, found {varying}"
        )));
    }
    let mean: Vec<f64> = data.stats().iter().map(|s| s.mean).collect();
    let sigmas: Vec<f64> = data.stats().iter().map(|s| s.std).collect();
    let scale = scale_for(&sigmas, config.standardize);

    let z = DMatrix::from_fn(n, d, |i, j| (data.row(i)[j] - mean[j]) / scale[j]);
    let svd = z.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    if order.len() < 2 {
        return Err(Error::DegenerateFit("fewer than two singular values".into()));
    }
    let s0 = svd.singular_values[order[0]];
    let s1 = svd.singular_values[order[1]];
    let rank_tol = (n.max(d) as f64) * f64::EPSILON * s0;
    if !(s1 > rank_tol) {
        return Err(Error::DegenerateFit("centered data has rank below 2".into()));
    }

    let mut components: Vec<Point2> = (0..d).map(|j| [v_t[(order[0], j)], v_t[(order[1], j)]]).collect();
    for c in 0..2 {
        let pivot = (0..d)
            .max_by(|&a, &b| {
                components[a][c]
                    .abs()
                    .total_cmp(&components[b][c].abs())
                    .then(b.cmp(&a))
            })
            .unwrap();
        if components[pivot][c] < 0.0 {
            components.iter_mut().for_each(|r| r[c] = -r[c]);
        }
    }

    Ok(PcaModel {
        mean,
        sigmas,
        scale,
        components,
        explained_variance: [s0 * s0 / n as f64, s1 * s1 / n as f64],
        standardize: config.standardize,
    })
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `E`, one row per feature, orthonormal columns in standardized units.
    pub fn components(&self) -> &[Point2] {
        &self.components
    }

    pub fn explained_variance(&self) -> Point2 {
        self.explained_variance
    }

    pub fn standardize(&self) -> bool {
        self.standardize
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// `y = ((x - mean) / scale) E`.
    pub fn project(&self, x: &[f64]) -> Result<Point2> {
        self.check_dim(x.len())?;
        let mut y = [0.0; 2];
        for i in 0..x.len() {
            let z = (x[i] - self.mean[i]) / self.scale[i];
            y[0] += z * self.components[i][0];
            y[1] += z * self.components[i][1];
        }
        Ok(y)
    }

    /// Out-of-sample forward projection of a feature change.
    pub fn forward(&self, delta_x: &[f64]) -> Result<Point2> {
        self.check_dim(delta_x.len())?;
        let mut y = [0.0; 2];
        for i in 0..delta_x.len() {
            let z = delta_x[i] / self.scale[i];
            y[0] += z * self.components[i][0];
            y[1] += z * self.components[i][1];
        }
        Ok(y)
    }

    /// Least-norm feature change (in standardized units) moving the
    /// projection by `delta_y`.
    pub fn backward(&self, delta_y: Point2) -> Result<Vec<f64>> {
        let dz = solver::least_norm(&self.components, delta_y)?;
        Ok(dz.iter().zip(&self.scale).map(|(z, s)| z * s).collect())
    }

    /// Feature change at `x` that best realizes `delta_y` while honouring
    /// absolute locks and bounds. The solution is in original units.
    pub fn backward_constrained(
        &self,
        delta_y: Point2,
        constraints: &ConstraintSet,
        x: &[f64],
        config: &PcaConfig,
    ) -> Result<QpSolution> {
        self.check_dim(x.len())?;
        let delta = constraints.delta_form(x)?;
        let problem = QpProblem {
            basis: self.components.clone(),
            target: delta_y,
            locks: delta
                .locks
                .iter()
                .zip(&self.scale)
                .map(|(l, s)| l.map(|v| v / s))
                .collect(),
            lower: delta.lower.iter().zip(&self.scale).map(|(v, s)| v / s).collect(),
            upper: delta.upper.iter().zip(&self.scale).map(|(v, s)| v / s).collect(),
        };
        let sol = solver::solve_qp(&problem, config.tol, config.max_iter)?;
        let delta_x: Vec<f64> = sol
            .delta_x
            .iter()
            .enumerate()
            .map(|(i, z)| match delta.locks[i] {
                Some(v) => v,
                None => (z * self.scale[i]).clamp(delta.lower[i], delta.upper[i]),
            })
            .collect();
        let dy = self.forward(&delta_x)?;
        Ok(QpSolution {
            residual: (dy[0] - delta_y[0]).hypot(dy[1] - delta_y[1]),
            delta_x,
            converged: sol.converged,
            iterations: sol.iterations,
        })
    }

    /// Effective basis in original units: row `i` is `E[i] / scale[i]`.
    pub fn original_unit_basis(&self) -> Vec<Point2> {
        self.components
            .iter()
            .zip(&self.scale)
            .map(|(r, s)| [r[0] / s, r[1] / s])
            .collect()
    }

    /// `mean + (y E^T) * scale`: the least-norm preimage of a plane point.
    pub fn reconstruct(&self, y: Point2) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.mean[i] + (y[0] * self.components[i][0] + y[1] * self.components[i][1]) * self.scale[i])
            .collect()
    }

    pub fn project_all(&self, data: &Dataset) -> Result<Vec<Point2>> {
        data.rows().map(|r| self.project(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::apply_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|j| format!("f{j}")).collect()
    }

    fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| (0..d).map(|j| rng.random_range(-1.0..1.0) * (j + 1) as f64).collect())
            .collect();
        Dataset::with_default_ids(names(d), rows).unwrap()
    }

    #[test]
    fn planar_data_is_reconstructed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = [1.0, 2.0, 0.0, -1.0, 0.5];
        let v = [0.0, 1.0, 1.0, 1.0, -2.0];
        let offset = [3.0, -1.0, 2.0, 0.0, 7.0];
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                (0..5).map(|j| offset[j] + a * u[j] + b * v[j]).collect()
            })
            .collect();
        let ds = Dataset::with_default_ids(names(5), rows).unwrap();
        for standardize in [false, true] {
            let m = fit_pca(&ds, &PcaConfig { standardize, ..Default::default() }).unwrap();
            for row in ds.rows() {
                let back = m.reconstruct(m.project(row).unwrap());
                for (a, b) in back.iter().zip(row) {
                    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn axis_aligned_variance_gives_axis_components() {
        // Columns with std 10, 3, 0.1 and random signs: covariance is diagonal
        // up to sampling noise, eigenvectors are the coordinate axes.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> = (0..400)
            .map(|_| {
                [10.0, 3.0, 0.1]
                    .iter()
                    .map(|s| if rng.random_bool(0.5) { *s } else { -*s })
                    .collect()
            })
            .collect();
        let ds = Dataset::with_default_ids(names(3), rows).unwrap();
        let m = fit_pca(&ds, &PcaConfig { standardize: false, ..Default::default() }).unwrap();
        let e = m.components();
        assert!((e[0][0] - 1.0).abs() < 1e-2 && e[0][0] > 0.0);
        assert!((e[1][1] - 1.0).abs() < 1e-2 && e[1][1] > 0.0);
        assert!(m.explained_variance()[0] >= m.explained_variance()[1]);
    }

    #[test]
    fn sign_convention_and_orthonormality() {
        let ds = random_dataset(30, 6, 4);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        assert!(solver::orthonormality_error(m.components()) < 1e-8);
        for c in 0..2 {
            let col: Vec<f64> = m.components().iter().map(|r| r[c]).collect();
            let max = col.iter().copied().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(col.iter().any(|&v| v == max));
        }
    }

    #[test]
    fn collinear_data_is_degenerate() {
        let rows = (0..10).map(|i| vec![i as f64, 2.0 * i as f64, -(i as f64)]).collect();
        let ds = Dataset::with_default_ids(names(3), rows).unwrap();
        assert!(matches!(fit_pca(&ds, &PcaConfig::default()), Err(Error::DegenerateFit(_))));
        let rows = (0..10).map(|i| vec![i as f64, 1.0, 1.0]).collect();
        let ds = Dataset::with_default_ids(names(3), rows).unwrap();
        assert!(matches!(fit_pca(&ds, &PcaConfig::default()), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn projection_of_mean_and_unit_step() {
        let ds = random_dataset(25, 4, 2);
        let m = fit_pca(&ds, &PcaConfig { standardize: false, ..Default::default() }).unwrap();
        assert_eq!(m.project(m.mean()).unwrap(), [0.0, 0.0]);
        let x: Vec<f64> = m.mean().iter().zip(m.components()).map(|(mu, e)| mu + e[0]).collect();
        let y = m.project(&x).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && y[1].abs() < 1e-12);
        let e0: Vec<f64> = m.components().iter().map(|r| r[0]).collect();
        let dy = m.forward(&e0).unwrap();
        assert!((dy[0] - 1.0).abs() < 1e-12 && dy[1].abs() < 1e-12);
        assert_eq!(m.forward(&[0.0; 4]).unwrap(), [0.0, 0.0]);
        assert!(matches!(m.project(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn training_rows_match_covariance_eigen_oracle() {
        // Independent route: eigenvectors of the covariance of the
        // standardized matrix, same sign rule.
        let ds = random_dataset(50, 5, 8);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let (n, d) = (ds.n(), ds.d());
        let st = ds.stats();
        let z = DMatrix::from_fn(n, d, |i, j| (ds.row(i)[j] - st[j].mean) / st[j].std);
        let cov = z.transpose() * &z / n as f64;
        let eig = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut basis: Vec<Point2> = (0..d)
            .map(|j| [eig.eigenvectors[(j, order[0])], eig.eigenvectors[(j, order[1])]])
            .collect();
        for c in 0..2 {
            let pivot = (0..d).max_by(|&a, &b| basis[a][c].abs().total_cmp(&basis[b][c].abs())).unwrap();
            if basis[pivot][c] < 0.0 {
                basis.iter_mut().for_each(|r| r[c] = -r[c]);
            }
        }
        for i in 0..n {
            let zi: Vec<f64> = (0..d).map(|j| z[(i, j)]).collect();
            let oracle = apply_basis(&basis, &zi);
            let y = m.project(ds.row(i)).unwrap();
            assert!((y[0] - oracle[0]).abs() < 1e-8 && (y[1] - oracle[1]).abs() < 1e-8);
        }
        assert!((m.explained_variance()[0] - eig.eigenvalues[order[0]]).abs() < 1e-8);
    }

    #[test]
    fn json_round_trip_is_column_major() {
        let ds = random_dataset(20, 3, 5);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        let comps = v["components"].as_array().unwrap();
        assert_eq!(comps.len(), 6);
        assert_eq!(comps[1].as_f64().unwrap(), m.components()[1][0]);
        assert_eq!(comps[4].as_f64().unwrap(), m.components()[1][1]);
        let back: PcaModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn constrained_backward_without_constraints_is_least_norm() {
        let ds = random_dataset(30, 5, 6);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let x = ds.row(3).to_vec();
        let sol = m
            .backward_constrained([0.7, -0.4], &ConstraintSet::unconstrained(5), &x, &PcaConfig::default())
            .unwrap();
        let ln = m.backward([0.7, -0.4]).unwrap();
        assert!(sol.residual < 1e-9);
        for (a, b) in sol.delta_x.iter().zip(&ln) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fully_locked_point_keeps_its_features() {
        let ds = random_dataset(30, 4, 6);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let x = ds.row(0).to_vec();
        let mut cs = ConstraintSet::unconstrained(4);
        for (i, &v) in x.iter().enumerate() {
            cs.lock(i, v);
        }
        let dy = [0.3, 0.4];
        let sol = m.backward_constrained(dy, &cs, &x, &PcaConfig::default()).unwrap();
        assert_eq!(sol.delta_x, vec![0.0; 4]);
        assert!((sol.residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn forward_backward_consistency() {
        let ds = random_dataset(40, 7, 10);
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let dy = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let back = m.forward(&m.backward(dy).unwrap()).unwrap();
            assert!((back[0] - dy[0]).abs() < 1e-9 && (back[1] - dy[1]).abs() < 1e-9);
        }
    }
}
