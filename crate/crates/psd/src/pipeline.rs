//! Per-restriction core of the decomposition: estimate the span of
//! restricted partial derivatives, extract span{B_t(y)^D} by intersecting
//! with multiples of a random divisor and dividing it out, then invert the
//! outer symmetrization by least squares.
//!
//! Everything is stateless given (inputs, seed); distinct restrictions can
//! run fully in parallel.

use crate::error::{Error, Result};
use crate::jennrich::Order3Tensor;
use crate::polyring::{
    binomial, monomial_count, perm_count_sorted, rank_sorted, MultisetIter, Poly, RestrictionMap,
};
use crate::subspace::{
    least_squares, principal_left_subspace, robust_intersection, Subspace, Tolerances,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct PipelineParams {
    /// Ambient variable count n.
    pub n: usize,
    /// Number of components m.
    pub n_components: usize,
    /// Component degree K.
    pub comp_degree: usize,
    /// Power parameter D; the input polynomial is sum_t A_t^{3D}.
    pub power: usize,
    /// Restriction size.
    pub ell: usize,
    pub tol: Tolerances,
    pub seed: u64,
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.comp_degree < 2 {
            return Err(Error::Parameter("component degree K must be >= 2".into()));
        }
        if self.power < 1 {
            return Err(Error::Parameter("power D must be >= 1".into()));
        }
        if self.n_components < 1 {
            return Err(Error::Parameter("component count m must be >= 1".into()));
        }
        if self.ell > self.n || self.ell == 0 {
            return Err(Error::Parameter(format!(
                "restriction size ell = {} out of range 1..={}",
                self.ell, self.n
            )));
        }
        if self.total_degree() > crate::polyring::MAX_DEGREE {
            return Err(Error::Capacity {
                requested: self.total_degree(),
                cap: crate::polyring::MAX_DEGREE,
            });
        }
        Ok(())
    }

    /// Degree of the input polynomial, 3KD.
    pub fn total_degree(&self) -> usize {
        3 * self.comp_degree * self.power
    }

    /// Degree of A_t^D, i.e. KD; also the tensor mode degree.
    pub fn inner_degree(&self) -> usize {
        self.comp_degree * self.power
    }

    /// Order of the partial derivatives taken, 2D.
    pub fn deriv_order(&self) -> usize {
        2 * self.power
    }

    /// Degree of restricted partials, (3K-2)D.
    pub fn partials_degree(&self) -> usize {
        (3 * self.comp_degree - 2) * self.power
    }

    /// Degree of the monomial tails y_T multiplying B_t^D, 2(K-1)D.
    pub fn tail_degree(&self) -> usize {
        2 * (self.comp_degree - 1) * self.power
    }

    /// dim V_D = m * ell_{2(K-1)D} - C(m,2) * ell_{(K-2)D}.
    pub fn partials_span_dim(&self) -> usize {
        let m = self.n_components;
        let tail = monomial_count(self.ell, self.tail_degree());
        let kernel_unit = monomial_count(self.ell, (self.comp_degree - 2) * self.power);
        m * tail - binomial(m, 2) as usize * kernel_unit
    }
}

/// Index maps shared across restrictions of the same shape; building them
/// once keeps the per-restriction cost down.
pub struct RestrictionWorkspace {
    /// All derivative multisets I over [n], |I| = 2D.
    pub deriv_indices: Vec<Vec<usize>>,
    /// Local monomials of the restricted-partials degree over [ell].
    partial_monos: Vec<Vec<usize>>,
    /// Local monomials of degree KD over [ell] (tensor modes).
    pub mode_monos: Vec<Vec<usize>>,
    /// Row rank in degree-3KD space for every (a, b, c) mode triple.
    sym_rows: Vec<u32>,
    params_key: (usize, usize, usize, usize),
}

impl RestrictionWorkspace {
    pub fn new(params: &PipelineParams) -> Self {
        let n = params.n;
        let ell = params.ell;
        let deriv_indices: Vec<Vec<usize>> = MultisetIter::new(n, params.deriv_order()).collect();
        let partial_monos: Vec<Vec<usize>> =
            MultisetIter::new(ell, params.partials_degree()).collect();
        let mode_monos: Vec<Vec<usize>> = MultisetIter::new(ell, params.inner_degree()).collect();

        let sym_rows = build_sym_rows(ell, params.inner_degree());
        RestrictionWorkspace {
            deriv_indices,
            partial_monos,
            mode_monos,
            sym_rows,
            params_key: (n, ell, params.comp_degree, params.power),
        }
    }

    fn check(&self, params: &PipelineParams) {
        debug_assert_eq!(
            self.params_key,
            (params.n, params.ell, params.comp_degree, params.power)
        );
    }

    pub fn sym_row(&self, ldim: usize, a: usize, b: usize, c: usize) -> usize {
        self.sym_rows[(a * ldim + b) * ldim + c] as usize
    }
}

/// Row map of the 0/1 symmetrization operator in degree-3kd space:
/// entry (a, b, c) is the rank of the multiset union I_a ⊎ I_b ⊎ I_c.
pub fn build_sym_rows(ell: usize, kd: usize) -> Vec<u32> {
    let mode_monos: Vec<Vec<usize>> = MultisetIter::new(ell, kd).collect();
    let ldim = mode_monos.len();
    let mut sym_rows = vec![0u32; ldim * ldim * ldim];
    let mut merged = Vec::with_capacity(3 * kd);
    for a in 0..ldim {
        for b in 0..ldim {
            for c in 0..ldim {
                merged.clear();
                merged.extend_from_slice(&mode_monos[a]);
                merged.extend_from_slice(&mode_monos[b]);
                merged.extend_from_slice(&mode_monos[c]);
                merged.sort_unstable();
                sym_rows[(a * ldim + b) * ldim + c] = rank_sorted(ell, &merged) as u32;
            }
        }
    }
    sym_rows
}

/// Sym * W^{⊗3}_uniq: columns indexed by multisets [i, j, k] over the
/// columns of `w`, rows by degree-3kd monomials.
pub fn sym_cube_matrix(w: &DMatrix<f64>, ell: usize, kd: usize, sym_rows: &[u32]) -> DMatrix<f64> {
    let ldim = w.nrows();
    debug_assert_eq!(ldim, monomial_count(ell, kd));
    let rows = monomial_count(ell, 3 * kd);
    let m = w.ncols();
    let triples: Vec<Vec<usize>> = MultisetIter::new(m, 3).collect();
    let mut sw = DMatrix::<f64>::zeros(rows, triples.len());
    for (col, triple) in triples.iter().enumerate() {
        let (wi, wj, wk) = (w.column(triple[0]), w.column(triple[1]), w.column(triple[2]));
        for a in 0..ldim {
            let wa = wi[a];
            if wa == 0.0 {
                continue;
            }
            for b in 0..ldim {
                let wab = wa * wj[b];
                let base = (a * ldim + b) * ldim;
                for c in 0..ldim {
                    sw[(sym_rows[base + c] as usize, col)] += wab * wk[c];
                }
            }
        }
    }
    sw
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StageDiagnostics {
    /// Singular values around the rank cut of the partials matrix.
    pub partials_spectrum_at_cut: Vec<f64>,
    /// Eigenvalues of the projector sum at the intersection cut.
    pub intersection_spectrum_at_cut: Vec<f64>,
    pub division_residuals: Vec<f64>,
    pub desym_sigma_min: f64,
    pub desym_residual: f64,
    pub divisor_retries: usize,
}

#[derive(Debug)]
pub struct RestrictedResult {
    pub map: RestrictionMap,
    /// Estimate of sum_t c_t^{⊗3} over the local degree-KD coefficient
    /// space, with c_t the coefficient vector of B_t(y)^D.
    pub tensor_estimate: Order3Tensor,
    pub diagnostics: StageDiagnostics,
}

/// Columns of the restricted-partials matrix: coefficient vectors of
/// (∂_I P)∘M_S over all multisets |I| = 2D.
///
/// The (J, I) entry is P[S(J) + I] scaled by the falling-factorial constant
/// of differentiating the monomial x^{S(J)+I} by I.
pub fn restricted_partials_matrix(
    p: &Poly,
    map: &RestrictionMap,
    params: &PipelineParams,
    ws: &RestrictionWorkspace,
) -> DMatrix<f64> {
    ws.check(params);
    let n = params.n;
    let rows = ws.partial_monos.len();
    let cols = ws.deriv_indices.len();
    let mut u = DMatrix::<f64>::zeros(rows, cols);
    let mut beta = vec![0u16; n];
    let mut alpha = vec![0u16; n];
    for (row, local) in ws.partial_monos.iter().enumerate() {
        for b in beta.iter_mut() {
            *b = 0;
        }
        for &v in local {
            beta[map.global(v)] += 1;
        }
        for col in 0..ws.deriv_indices.len() {
            let mut factor = 1.0f64;
            alpha.copy_from_slice(&beta);
            for &v in &ws.deriv_indices[col] {
                alpha[v] += 1;
                factor *= alpha[v] as f64;
            }
            // alpha = beta + I built incrementally; factor = prod (beta_v + i_v)!/beta_v!
            let src = crate::polyring::rank_exponents(n, &alpha);
            u[(row, col)] = factor * p.coeffs()[src];
        }
    }
    u
}

/// Algorithm step 2a: top singular subspace of the restricted partials.
pub fn restricted_partials_span(
    p: &Poly,
    map: &RestrictionMap,
    params: &PipelineParams,
    ws: &RestrictionWorkspace,
) -> Result<Subspace> {
    if p.degree() != params.total_degree() {
        return Err(Error::MalformedInput(format!(
            "input degree {} != 3KD = {}",
            p.degree(),
            params.total_degree()
        )));
    }
    if map.len() != params.ell {
        return Err(Error::MalformedInput("restriction size != ell".into()));
    }
    let u = restricted_partials_matrix(p, map, params, ws);
    let target = params.partials_span_dim();
    if target > u.nrows().min(u.ncols()) {
        return Err(Error::Parameter(format!(
            "target dimension {} exceeds partials matrix budget {}x{}",
            target,
            u.nrows(),
            u.ncols()
        )));
    }
    principal_left_subspace(&u, target, &params.tol)
}

/// Matrix whose columns are divisor(y) * y_S over all multisets |S| = KD.
pub fn multiples_matrix(divisor: &Poly, shift_degree: usize, ell: usize) -> DMatrix<f64> {
    let out_degree = divisor.degree() + shift_degree;
    let rows = monomial_count(ell, out_degree);
    let shifts: Vec<Vec<usize>> = MultisetIter::new(ell, shift_degree).collect();
    let divisor_monos: Vec<Vec<usize>> = MultisetIter::new(ell, divisor.degree()).collect();
    let mut m = DMatrix::<f64>::zeros(rows, shifts.len());
    for (col, s) in shifts.iter().enumerate() {
        for (j, dm) in divisor_monos.iter().enumerate() {
            let c = divisor.coeffs()[j];
            if c == 0.0 {
                continue;
            }
            let merged = crate::polyring::merge_sorted(dm, s);
            m[(rank_sorted(ell, &merged), col)] += c;
        }
    }
    m
}

fn random_poly(ell: usize, degree: usize, rng: &mut impl Rng) -> Poly {
    let count = monomial_count(ell, degree);
    Poly::new(
        ell,
        degree,
        (0..count).map(|_| rng.sample(StandardNormal)).collect(),
    )
    .expect("count matches")
}

const DIVISOR_RETRY_BUDGET: usize = 3;

/// Algorithm step 2b: intersect the partials span with multiples of a random
/// divisor and divide it out, leaving span{B_t(y)^D}.
///
/// For K = 2 the divisor is p(y)^D for a random quadratic p; for K > 2 it is
/// a random polynomial of degree 2(K-1)D directly.
pub fn span_finding(
    v_tilde: &Subspace,
    params: &PipelineParams,
    ws: &RestrictionWorkspace,
    rng: &mut impl Rng,
) -> Result<(Subspace, StageDiagnostics)> {
    ws.check(params);
    let ell = params.ell;
    let m = params.n_components;
    let mut diag = StageDiagnostics::default();
    let mut last_lambda = 0.0;
    for attempt in 0..=DIVISOR_RETRY_BUDGET {
        diag.divisor_retries = attempt;
        let divisor = if params.comp_degree == 2 {
            random_poly(ell, 2, rng).pow(params.power)?
        } else {
            random_poly(ell, params.tail_degree(), rng)
        };
        let v_div = multiples_matrix(&divisor, params.inner_degree(), ell);
        // factor the divisor matrix once; the intersection basis and every
        // division solve reuse it
        let (du, ds, dv) = crate::subspace::thin_svd(&v_div);
        let (smax, smin) = (ds[0], *ds.last().unwrap());
        if !(smin > params.tol.rank_floor * smax) {
            return Err(Error::RankDeficient(format!(
                "divisor multiples matrix has sigma_min = {:.3e}",
                smin
            )));
        }
        let div_space = Subspace::from_orthonormal(du.clone());
        let w_p = robust_intersection(v_tilde, &div_space, m, &params.tol)?;
        let spectrum = &w_p.meta.spectrum;
        let hi = spectrum.len().min(m + 3);
        diag.intersection_spectrum_at_cut = spectrum[..hi].to_vec();
        last_lambda = spectrum.get(m - 1).copied().unwrap_or(0.0);
        if w_p.meta.weak_intersection {
            continue;
        }

        // robust division: each intersection basis vector is (close to) a
        // multiple of the divisor; solve for the quotient via the factored
        // pseudo-inverse
        let mut quotients = DMatrix::<f64>::zeros(ws.mode_monos.len(), m);
        diag.division_residuals.clear();
        for i in 0..m {
            let target = w_p.basis_column(i);
            let mut proj = du.transpose() * &target;
            for (r, p) in proj.iter_mut().enumerate() {
                *p /= ds[r];
            }
            let solution = &dv * proj;
            diag.division_residuals.push((&v_div * &solution - &target).norm());
            quotients.set_column(i, &solution);
        }
        let w_d = Subspace::from_columns(&quotients, &params.tol);
        return Ok((w_d, diag));
    }
    Err(Error::WeakIntersection {
        lambda_m: last_lambda,
        retries: DIVISOR_RETRY_BUDGET,
    })
}

/// Algorithm step 2c: desymmetrization. Solve for the coordinates of the
/// order-3 tensor in the basis W^{⊗3}, observing only its symmetrization
/// (the restricted input polynomial).
pub fn desymmetrize(
    w_tilde: &Subspace,
    p_restricted: &Poly,
    params: &PipelineParams,
    ws: &RestrictionWorkspace,
) -> Result<(Order3Tensor, StageDiagnostics)> {
    ws.check(params);
    let m = params.n_components;
    if w_tilde.dim() != m {
        return Err(Error::MalformedInput(format!(
            "span dimension {} != m = {}",
            w_tilde.dim(),
            m
        )));
    }
    if p_restricted.degree() != params.total_degree() || p_restricted.n() != params.ell {
        return Err(Error::MalformedInput(
            "restricted polynomial has wrong shape".into(),
        ));
    }
    let ldim = ws.mode_monos.len();
    let mode_triples: Vec<Vec<usize>> = MultisetIter::new(m, 3).collect();
    let w = w_tilde.basis();
    let sw = sym_cube_matrix(w, params.ell, params.inner_degree(), &ws.sym_rows);
    let target = DVector::from_column_slice(p_restricted.coeffs());
    let ls = least_squares(&sw, &target, &params.tol).map_err(|e| match e {
        Error::RankDeficient(_) => Error::DesymRank { sigma_min: 0.0 },
        other => other,
    })?;
    let mut diag = StageDiagnostics {
        desym_sigma_min: ls.sigma_min,
        desym_residual: ls.residual,
        ..StageDiagnostics::default()
    };
    diag.division_residuals.clear();

    // expand multiset coordinates Y to the symmetric cube coordinates Z
    let mut tensor = Order3Tensor::zeros(ldim);
    for (pos, triple) in mode_triples.iter().enumerate() {
        let z = ls.solution[pos] / perm_count_sorted(triple) as f64;
        let mut perm = triple.clone();
        // accumulate over the distinct orderings of the triple
        loop {
            let (i, j, k) = (perm[0], perm[1], perm[2]);
            let (wi, wj, wk) = (w.column(i), w.column(j), w.column(k));
            for a in 0..ldim {
                let za = z * wi[a];
                if za == 0.0 {
                    continue;
                }
                for b in 0..ldim {
                    let zab = za * wj[b];
                    let base = (a * ldim + b) * ldim;
                    for c in 0..ldim {
                        tensor.data_mut()[base + c] += zab * wk[c];
                    }
                }
            }
            if !advance_permutation(&mut perm) {
                break;
            }
        }
    }
    Ok((tensor, diag))
}

fn advance_permutation(a: &mut [usize]) -> bool {
    let mut i = a.len().saturating_sub(1);
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Steps 2a-2c composed for one restriction, diagnostics threaded through.
pub fn decompose_restriction(
    p: &Poly,
    map: &RestrictionMap,
    params: &PipelineParams,
    ws: &RestrictionWorkspace,
    rng: &mut impl Rng,
) -> Result<RestrictedResult> {
    let v_tilde = restricted_partials_span(p, map, params, ws)
        .map_err(|e| e.at_stage("partials-span"))?;
    let mut partials_diag = Vec::new();
    let cut = params.partials_span_dim();
    let lo = cut.saturating_sub(2);
    let hi = (cut + 2).min(v_tilde.meta.spectrum.len());
    partials_diag.extend_from_slice(&v_tilde.meta.spectrum[lo..hi]);

    let (w_tilde, mut diag) =
        span_finding(&v_tilde, params, ws, rng).map_err(|e| e.at_stage("span-finding"))?;
    let p_restricted = p.restrict(map)?;
    let (tensor, desym_diag) = desymmetrize(&w_tilde, &p_restricted, params, ws)
        .map_err(|e| e.at_stage("desymmetrize"))?;
    diag.partials_spectrum_at_cut = partials_diag;
    diag.desym_sigma_min = desym_diag.desym_sigma_min;
    diag.desym_residual = desym_diag.desym_residual;
    Ok(RestrictedResult {
        map: map.clone(),
        tensor_estimate: tensor,
        diagnostics: diag,
    })
}
