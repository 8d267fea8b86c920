//! Rank-1 decomposition of symmetric order-3 tensors: whiten with the top-m
//! eigenspace of a mode flattening, contract with two random vectors,
//! eigendecompose M_a M_b^{-1} in the whitened space, then recover scales by
//! least squares. Components come back with the real cube root of their
//! weight, so signs are meaningful (the contraction order is odd).

use crate::error::{Error, Result};
use crate::subspace::{thin_left_svd, Tolerances};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Dense order-3 tensor with equal mode dimensions, row-major strides.
#[derive(Clone, Debug, PartialEq)]
pub struct Order3Tensor {
    dim: usize,
    data: Vec<f64>,
}

impl Order3Tensor {
    pub fn zeros(dim: usize) -> Self {
        Order3Tensor {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_data(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim * dim {
            return Err(Error::MalformedInput("order-3 tensor data length mismatch".into()));
        }
        Ok(Order3Tensor { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize, k: usize) -> &mut f64 {
        &mut self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn add_rank_one(&mut self, v: &[f64], weight: f64) {
        let n = self.dim;
        for i in 0..n {
            let wi = weight * v[i];
            if wi == 0.0 {
                continue;
            }
            for j in 0..n {
                let wij = wi * v[j];
                let row = (i * n + j) * n;
                for k in 0..n {
                    self.data[row + k] += wij * v[k];
                }
            }
        }
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Worst entry deviation under the three mode transpositions.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.at(i, j, k);
                    worst = worst.max((a - self.at(j, i, k)).abs());
                    worst = worst.max((a - self.at(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// Gram matrix of the mode-1 flattening: G = M1 M1^T.
    fn flattening_gram(&self) -> DMatrix<f64> {
        let n = self.dim;
        // the row-major tensor layout makes the data exactly the
        // column-major flattening of M1^T: rows of M1 are contiguous
        let m1t = faer::MatRef::from_column_major_slice(&self.data, n * n, n);
        let gram = m1t.transpose() * m1t;
        DMatrix::from_fn(n, n, |i, j| gram[(i, j)])
    }

    /// Tucker-style contraction T(W, W, W) for a whitening matrix W (n x m).
    fn contract_all_modes(&self, w: &DMatrix<f64>) -> Vec<f64> {
        let n = self.dim;
        let m = w.ncols();
        // stage 1: contract mode 3
        let mut s1 = vec![0.0; n * n * m];
        for i in 0..n {
            for j in 0..n {
                let row = (i * n + j) * n;
                for r in 0..m {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += self.data[row + k] * w[(k, r)];
                    }
                    s1[(i * n + j) * m + r] = acc;
                }
            }
        }
        // stage 2: contract mode 2
        let mut s2 = vec![0.0; n * m * m];
        for i in 0..n {
            for q in 0..m {
                for r in 0..m {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc += s1[(i * n + j) * m + r] * w[(j, q)];
                    }
                    s2[(i * m + q) * m + r] = acc;
                }
            }
        }
        // stage 3: contract mode 1
        let mut out = vec![0.0; m * m * m];
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += s2[(i * m + q) * m + r] * w[(i, p)];
                    }
                    out[(p * m + q) * m + r] = acc;
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct JennrichDiagnostics {
    pub retries: usize,
    pub eigen_gap: f64,
    pub max_imag_fraction: f64,
    pub scale_residual: f64,
    pub reconstruction_residual: f64,
}

const SYMMETRY_TOLERANCE: f64 = 1e-9;
const EIGEN_COLLISION_REL: f64 = 1e-8;
const IMAG_FRACTION_LIMIT: f64 = 1e-6;
const RETRY_BUDGET: usize = 5;

/// Decompose T ~ sum_{t<=m} v_t^{⊗3} into its m component vectors.
pub fn jennrich_decompose(
    t: &Order3Tensor,
    m: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<DVector<f64>>, JennrichDiagnostics)> {
    let n = t.dim();
    if m == 0 || m > n {
        return Err(Error::Parameter(format!("rank {} out of range for dim {}", m, n)));
    }
    let defect = t.symmetry_defect();
    let scale = t.frob_norm().max(1e-300);
    if defect > SYMMETRY_TOLERANCE * scale.max(1.0) {
        return Err(Error::MalformedInput(format!(
            "input tensor not symmetric: defect {:.3e}",
            defect
        )));
    }

    // whitening: top-m eigenspace of the flattening Gram
    let gram = t.flattening_gram();
    let (u, _evals) = thin_left_svd(&gram);
    let w = u.columns(0, m).into_owned();

    // project into the m-dimensional whitened space
    let tw = t.contract_all_modes(&w);
    let slice = |r: usize| -> DMatrix<f64> {
        DMatrix::from_fn(m, m, |p, q| tw[(p * m + q) * m + r])
    };

    let mut diag = JennrichDiagnostics::default();
    let mut directions: Option<Vec<DVector<f64>>> = None;
    for attempt in 0..RETRY_BUDGET {
        diag.retries = attempt;
        let a = DVector::<f64>::from_fn(m, |_, _| rng.sample(StandardNormal));
        let b = DVector::<f64>::from_fn(m, |_, _| rng.sample(StandardNormal));
        let mut ma = DMatrix::<f64>::zeros(m, m);
        let mut mb = DMatrix::<f64>::zeros(m, m);
        for r in 0..m {
            ma += slice(r) * a[r];
            mb += slice(r) * b[r];
        }
        let Some(mb_inv) = mb.clone().try_inverse() else {
            continue;
        };
        let e = &ma * mb_inv;

        let eigvals = e.complex_eigenvalues();
        let radius = eigvals.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let max_imag = eigvals.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
        diag.max_imag_fraction = if radius > 0.0 { max_imag / radius } else { 0.0 };
        if diag.max_imag_fraction > IMAG_FRACTION_LIMIT {
            continue;
        }
        let mut lambdas: Vec<f64> = eigvals.iter().map(|z| z.re).collect();
        lambdas.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut min_gap = f64::INFINITY;
        for w2 in lambdas.windows(2) {
            min_gap = min_gap.min((w2[1] - w2[0]).abs());
        }
        diag.eigen_gap = min_gap;
        if m > 1 && min_gap < EIGEN_COLLISION_REL * radius.max(1e-300) {
            continue;
        }

        // eigenvector per eigenvalue via the null space of (E - lambda I)
        let mut dirs = Vec::with_capacity(m);
        for &lambda in &lambdas {
            let shifted = &e - DMatrix::<f64>::identity(m, m) * lambda;
            let (_, _, v) = crate::subspace::thin_svd(&shifted);
            let null_dir = v.column(m - 1).into_owned();
            dirs.push(&w * null_dir);
        }
        directions = Some(dirs);
        break;
    }

    let Some(mut dirs) = directions else {
        return Err(Error::EigenCollision { retries: RETRY_BUDGET });
    };
    for d in dirs.iter_mut() {
        let norm = d.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateInput("zero eigenvector direction".into()));
        }
        *d /= norm;
    }

    // scale recovery in the whitened space: T(W,W,W) = sum_t s_t (W^T d_t)^{⊗3}
    let mut design = DMatrix::<f64>::zeros(m * m * m, m);
    for (tcol, d) in dirs.iter().enumerate() {
        let dw = w.transpose() * d;
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    design[((p * m + q) * m + r, tcol)] = dw[p] * dw[q] * dw[r];
                }
            }
        }
    }
    let rhs = DVector::from_column_slice(&tw);
    let tol = Tolerances::default();
    let ls = crate::subspace::least_squares(&design, &rhs, &tol)
        .map_err(|e| e.at_stage("jennrich-scale"))?;
    diag.scale_residual = ls.residual / rhs.norm().max(1e-300);
    if diag.scale_residual > 1e-3 {
        return Err(Error::ScaleResidual {
            residual: diag.scale_residual,
        });
    }

    let components: Vec<DVector<f64>> = dirs
        .iter()
        .zip(ls.solution.iter())
        .map(|(d, &s)| d * s.cbrt())
        .collect();

    let mut recon = Order3Tensor::zeros(n);
    for c in &components {
        recon.add_rank_one(c.as_slice(), 1.0);
    }
    let mut err2 = 0.0;
    for (x, y) in recon.data.iter().zip(&t.data) {
        err2 += (x - y) * (x - y);
    }
    diag.reconstruction_residual = err2.sqrt();

    Ok((components, diag))
}
