//! Empirical verification of the rank, null-space, and singular-value
//! structure the decomposition relies on: the probe suite builds the
//! analysis matrices for random instances and measures them directly.
//!
//! Numerical rank uses one definition everywhere:
//! rank = #{sigma_i > 1e-9 * sigma_1}. Regime guards encode the lemma
//! hypotheses with polylog factors replaced by a fixed constant; runs
//! outside the regime are marked skipped, never failed.

pub mod report;
pub mod witness;

use crate::error::Result;
use crate::pipeline::{
    build_sym_rows, multiples_matrix, restricted_partials_matrix, sym_cube_matrix,
    PipelineParams, RestrictionWorkspace,
};
use crate::polyring::{
    binomial, monomial_count, sym, DenseTensor, MultisetIter, Poly, RestrictionMap, SymTensor,
};
use crate::subspace::{singular_values, subspace_distance, Subspace, Tolerances};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub use report::{run_probe, GuardStatus, ProbeLemma, ProbeParams, ProbeReport, TrialRecord};

/// Single crate-wide numerical rank definition.
pub const RANK_THRESHOLD_REL: f64 = 1e-9;

pub fn numerical_rank(svals: &[f64]) -> usize {
    let top = svals.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > RANK_THRESHOLD_REL * top).count()
}

pub fn random_poly(n: usize, degree: usize, rng: &mut impl Rng) -> Poly {
    let count = monomial_count(n, degree);
    Poly::new(n, degree, (0..count).map(|_| rng.sample(StandardNormal)).collect())
        .expect("count matches")
}

/// V matrix: columns are coefficient vectors of B_t(y)^D y_T over t in [m]
/// and |T| = 2(K-1)D.
pub fn build_v(b_list: &[Poly], power: usize, comp_degree: usize) -> Result<DMatrix<f64>> {
    let ell = b_list[0].n();
    let tail = 2 * (comp_degree - 1) * power;
    let mut blocks = Vec::with_capacity(b_list.len());
    for b in b_list {
        let bd = b.pow(power)?;
        blocks.push(multiples_matrix(&bd, tail, ell));
    }
    Ok(hcat(&blocks))
}

fn hcat(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// N matrix: one row per (t1 < t2, |T| = (K-2)D) encoding the null tuple
/// p_{t1} = B_{t2}^D y_T, p_{t2} = -B_{t1}^D y_T.
pub fn build_n(b_list: &[Poly], power: usize, comp_degree: usize) -> Result<DMatrix<f64>> {
    let m = b_list.len();
    let ell = b_list[0].n();
    let unit_degree = (comp_degree - 2) * power;
    let block_width = monomial_count(ell, 2 * (comp_degree - 1) * power);
    let units: Vec<Vec<usize>> = MultisetIter::new(ell, unit_degree).collect();
    let rows = binomial(m, 2) as usize * units.len();
    let powers: Vec<Poly> = b_list.iter().map(|b| b.pow(power)).collect::<Result<_>>()?;
    // shifted coefficient vectors B_t^D y_T for every unit T
    let shifted: Vec<DMatrix<f64>> = powers
        .iter()
        .map(|bd| multiples_matrix(bd, unit_degree, ell))
        .collect();
    let mut n_mat = DMatrix::<f64>::zeros(rows, m * block_width);
    let mut row = 0;
    for t1 in 0..m {
        for t2 in t1 + 1..m {
            for u in 0..units.len() {
                for r in 0..block_width {
                    n_mat[(row, t1 * block_width + r)] = shifted[t2][(r, u)];
                    n_mat[(row, t2 * block_width + r)] = -shifted[t1][(r, u)];
                }
                row += 1;
            }
        }
    }
    Ok(n_mat)
}

/// U matrix: restricted partial derivatives of P = sum_t A_t^{3D}.
pub fn build_u(
    a_list: &[Poly],
    subset: &RestrictionMap,
    power: usize,
    comp_degree: usize,
) -> Result<DMatrix<f64>> {
    let n = a_list[0].n();
    let mut p = Poly::zero(n, 3 * comp_degree * power);
    for a in a_list {
        p = p.add(&a.pow(3 * power)?)?;
    }
    let params = PipelineParams {
        n,
        n_components: a_list.len(),
        comp_degree,
        power,
        ell: subset.len(),
        tol: Tolerances::default(),
        seed: 0,
    };
    let ws = RestrictionWorkspace::new(&params);
    Ok(restricted_partials_matrix(&p, subset, &params, &ws))
}

/// L matrix for quadratic components: for each bucket profile
/// (gamma_1, gamma_2) with gamma_1 + 2 gamma_2 = 2D, rows indexed by
/// (t, J in [ell]^{gamma_1}) holding the flattened symmetric 2D-order tensor
/// Sym((A_t M)[j_1] ⊗ .. ⊗ (A_t M)[j_{gamma_1}] ⊗ A_t^{⊗gamma_2}).
pub fn build_l(a_list: &[Poly], subset: &RestrictionMap, power: usize) -> Result<DMatrix<f64>> {
    let n = a_list[0].n();
    let two_d = 2 * power;
    let cols = n.pow(two_d as u32);
    let mut rows_data: Vec<Vec<f64>> = Vec::new();
    for gamma2 in (0..=power).rev() {
        let gamma1 = two_d - 2 * gamma2;
        for a in a_list {
            let at = SymTensor::from_poly(a);
            // columns of A_t M: the restricted columns of the matrix A_t
            for j_tuple in MultisetIter::new(subset.len(), gamma1) {
                let mut dense = DenseTensor::<f64>::zero(n, two_d);
                let mut idx = vec![0usize; two_d];
                loop {
                    let mut v = 1.0;
                    for (k, &jk) in j_tuple.iter().enumerate() {
                        v *= at.get(&[idx[k], subset.global(jk)]);
                    }
                    for g in 0..gamma2 {
                        v *= at.get(&[idx[gamma1 + 2 * g], idx[gamma1 + 2 * g + 1]]);
                    }
                    dense.set(&idx, v);
                    if !odometer(&mut idx, n) {
                        break;
                    }
                }
                let symmed = sym(&dense);
                // expand to the full flattened n^{2D} vector
                let mut flat = vec![0.0; cols];
                let mut idx = vec![0usize; two_d];
                loop {
                    let mut sorted = idx.clone();
                    sorted.sort_unstable();
                    let off = idx.iter().fold(0, |acc, &v| acc * n + v);
                    flat[off] = *symmed.get_sorted(&sorted);
                    if !odometer(&mut idx, n) {
                        break;
                    }
                }
                rows_data.push(flat);
            }
        }
    }
    let rows = rows_data.len();
    Ok(DMatrix::from_fn(rows, cols, |r, c| rows_data[r][c]))
}

fn odometer(idx: &mut [usize], n: usize) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < n {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// Expected row count of L: m * sum over bucket profiles of ell_{gamma_1}.
pub fn l_row_count(m: usize, ell: usize, power: usize) -> usize {
    (0..=power).map(|g2| m * monomial_count(ell, 2 * power - 2 * g2)).sum()
}

/// Desymmetrization matrix Sym * W^{⊗3}_uniq for W an orthonormal basis of
/// span{B_t^D}.
pub fn build_desym(b_list: &[Poly], power: usize) -> Result<DMatrix<f64>> {
    let ell = b_list[0].n();
    let kd = b_list[0].degree() * power;
    let powers: Vec<Poly> = b_list.iter().map(|b| b.pow(power)).collect::<Result<_>>()?;
    let mut cols = DMatrix::<f64>::zeros(powers[0].coeffs().len(), powers.len());
    for (i, p) in powers.iter().enumerate() {
        cols.set_column(i, &DVector::from_column_slice(p.coeffs()));
    }
    let w = Subspace::from_columns(&cols, &Tolerances::default());
    let sym_rows = build_sym_rows(ell, kd);
    Ok(sym_cube_matrix(w.basis(), ell, kd, &sym_rows))
}

/// V-bar and N-bar for K >= 3: V extended by the block of multiples of a
/// random degree-2(K-1)D polynomial G, and the matrix spanning its null
/// space (pair relations plus the G-relations).
pub fn build_vbar_nbar(
    b_list: &[Poly],
    g: &Poly,
    power: usize,
    comp_degree: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let ell = b_list[0].n();
    let m = b_list.len();
    let kd = comp_degree * power;
    let block_width = monomial_count(ell, 2 * (comp_degree - 1) * power);
    let scale = (ell as f64).powf(-(((comp_degree - 2) * power) as f64) / 2.0);

    let v = build_v(b_list, power, comp_degree)?;
    let vg = multiples_matrix(&g.scaled(&scale), kd, ell);
    let vbar = hcat(&[v, vg.clone()]);

    let n_top = build_n(b_list, power, comp_degree)?;
    let g_cols = monomial_count(ell, kd);
    let rows_top = n_top.nrows();
    let mut nbar = DMatrix::<f64>::zeros(rows_top + m, m * block_width + g_cols);
    nbar.view_mut((0, 0), (rows_top, m * block_width)).copy_from(&n_top);
    let powers: Vec<Poly> = b_list.iter().map(|b| b.pow(power)).collect::<Result<_>>()?;
    for s in 0..m {
        for (i, c) in g.coeffs().iter().enumerate() {
            nbar[(rows_top + s, s * block_width + i)] = scale * c;
        }
        for (j, c) in powers[s].coeffs().iter().enumerate() {
            nbar[(rows_top + s, m * block_width + j)] = -c;
        }
    }
    Ok((vbar, nbar))
}

/// Matrix with columns the coefficient vectors of A_t(x)^D; its condition
/// number controls tensor-decomposition stability.
pub fn component_power_matrix(a_list: &[Poly], power: usize) -> Result<DMatrix<f64>> {
    let powers: Vec<Poly> = a_list.iter().map(|a| a.pow(power)).collect::<Result<_>>()?;
    let rows = powers[0].coeffs().len();
    let mut m = DMatrix::<f64>::zeros(rows, powers.len());
    for (i, p) in powers.iter().enumerate() {
        m.set_column(i, &DVector::from_column_slice(p.coeffs()));
    }
    Ok(m)
}

/// Max |V N^T| entry, the orthogonality defect.
pub fn orthogonality_defect(v: &DMatrix<f64>, n: &DMatrix<f64>) -> f64 {
    let prod = v * n.transpose();
    prod.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Frobenius distance between the column spans of two matrices at their
/// shared numerical rank.
pub fn colspan_distance(a: &DMatrix<f64>, b: &DMatrix<f64>, rank: usize) -> Result<f64> {
    let tol = Tolerances::default();
    let sa = crate::subspace::principal_left_subspace(a, rank, &tol)?;
    let sb = crate::subspace::principal_left_subspace(b, rank, &tol)?;
    subspace_distance(&sa, &sb)
}
