//! End-to-end decomposition driver: pseudorandom restrictions, the
//! per-restriction pipeline, aggregation, order-3 tensor decomposition, and
//! D-th roots, with diagnostics from every stage.
//!
//! Aggregation strategy. The desymmetrized global tensor has order 3KD, so a
//! fixed-size cover family can only reconstruct all of it when ell >= 3KD.
//! - ell >= 3KD ("cover-full"): cover every 3KD-variable support, average
//!   entries over observing members, decompose the aggregated tensor once.
//! - ell < 3KD ("cover-stitched"): cover every KD-variable support (enough
//!   to see each component coefficient), decompose each restricted tensor
//!   locally, and stitch the per-restriction component estimates together by
//!   matching them on already-covered coordinates. Signs are well defined
//!   because the local tensors are odd (third) powers; the permutation per
//!   restriction is resolved by overlap matching.
//! - "paper": enumerate the exact GF(q) hash family and divide out the
//!   inclusion probabilities; exact but only viable at tiny n.

use super::instance::GenParams;
use super::rng::{stream_rng, subset_salt};
use crate::error::{Error, Result};
use crate::jennrich::{jennrich_decompose, JennrichDiagnostics, Order3Tensor};
use crate::pipeline::{
    decompose_restriction, PipelineParams, RestrictedResult, RestrictionWorkspace,
    StageDiagnostics,
};
use crate::polyring::{monomial_count, MultisetIter, Poly, RestrictionMap, SymTensor};
use crate::restrictions::{
    aggregate_cover, aggregate_paper, cover_family, next_prime, CoverDiagnostics, FamilySubsets,
    HashFamily, RestrictedTensor,
};
use crate::roots::{dth_root_poly, RootConfig, RootDiagnostics};
use crate::subspace::Tolerances;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AggMode {
    Paper,
    Cover,
}

impl std::str::FromStr for AggMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(AggMode::Paper),
            "cover" => Ok(AggMode::Cover),
            other => Err(Error::Parameter(format!("unknown aggregation mode '{}'", other))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub n_components: usize,
    pub comp_degree: usize,
    pub power: usize,
    /// Restriction size; defaults to max(ceil(sqrt(n)), 2KD) capped at n.
    pub ell: Option<usize>,
    pub agg: AggMode,
    pub seed: u64,
    /// Pad a non-prime n to the next prime for the paper-mode field.
    pub field_pad: bool,
    pub tol: Tolerances,
    pub root: RootConfig,
}

impl DecomposeOptions {
    pub fn new(m: usize, comp_degree: usize, power: usize) -> Self {
        DecomposeOptions {
            n_components: m,
            comp_degree,
            power,
            ell: None,
            agg: AggMode::Cover,
            seed: 0,
            field_pad: true,
            tol: Tolerances::default(),
            root: RootConfig::default(),
        }
    }

    pub fn from_gen(params: &GenParams) -> Self {
        DecomposeOptions::new(params.m, params.comp_degree, params.power)
    }
}

pub fn default_ell(n: usize, comp_degree: usize, power: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize)
        .max(2 * comp_degree * power)
        .min(n)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StitchDiagnostics {
    pub deferred_members: usize,
    pub min_match_margin: f64,
    pub max_entry_spread: f64,
}

#[derive(Debug, Serialize)]
pub struct DriverDiagnostics {
    pub mode: String,
    pub ell: usize,
    pub family_size: usize,
    pub restrictions: Vec<StageDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregation: Option<CoverDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stitch: Option<StitchDiagnostics>,
    pub jennrich: Vec<JennrichDiagnostics>,
    pub roots: Vec<RootDiagnostics>,
}

#[derive(Debug)]
pub struct Decomposition {
    pub components: Vec<Poly>,
    pub sign_ambiguous: bool,
    pub diagnostics: DriverDiagnostics,
}

pub fn decompose(p: &Poly, opts: &DecomposeOptions) -> Result<Decomposition> {
    let n = p.n();
    let ell = opts.ell.unwrap_or_else(|| default_ell(n, opts.comp_degree, opts.power));
    let params = PipelineParams {
        n,
        n_components: opts.n_components,
        comp_degree: opts.comp_degree,
        power: opts.power,
        ell,
        tol: opts.tol,
        seed: opts.seed,
    };
    params.validate()?;
    if p.degree() != params.total_degree() {
        return Err(Error::MalformedInput(format!(
            "input degree {} != 3KD = {}",
            p.degree(),
            params.total_degree()
        )));
    }
    let order = params.total_degree();
    match opts.agg {
        AggMode::Paper => decompose_paper(p, &params, opts),
        AggMode::Cover if ell >= order => decompose_cover_full(p, &params, opts),
        AggMode::Cover => decompose_cover_stitched(p, &params, opts),
    }
}

fn run_restrictions(
    p: &Poly,
    params: &PipelineParams,
    subsets: &[Vec<usize>],
) -> Result<Vec<RestrictedResult>> {
    let ws = RestrictionWorkspace::new(params);
    let outcomes: Vec<Result<RestrictedResult>> = subsets
        .par_iter()
        .map(|s| {
            let map = RestrictionMap::new(params.n, s.clone())?;
            let mut rng = stream_rng(params.seed, "restriction", subset_salt(s));
            decompose_restriction(p, &map, params, &ws, &mut rng)
        })
        .collect();
    outcomes.into_iter().collect()
}

/// Components from the aggregated global tensor: tensor decomposition
/// followed by the D-th root per component.
fn finish_from_tensor(
    tensor: &Order3Tensor,
    params: &PipelineParams,
    opts: &DecomposeOptions,
    mut diagnostics: DriverDiagnostics,
) -> Result<Decomposition> {
    let mut rng = stream_rng(params.seed, "jennrich", 0);
    let (vectors, jd) = jennrich_decompose(tensor, params.n_components, &mut rng)
        .map_err(|e| e.at_stage("tensor-decomposition"))?;
    diagnostics.jennrich.push(jd);
    finish_from_power_vectors(&vectors, params, opts, diagnostics)
}

fn finish_from_power_vectors(
    vectors: &[DVector<f64>],
    params: &PipelineParams,
    opts: &DecomposeOptions,
    mut diagnostics: DriverDiagnostics,
) -> Result<Decomposition> {
    let mut components = Vec::with_capacity(vectors.len());
    let mut sign_ambiguous = false;
    for v in vectors {
        let power_poly = Poly::new(params.n, params.inner_degree(), v.as_slice().to_vec())?;
        let pd = SymTensor::from_poly(&power_poly);
        let root = dth_root_poly(&pd, params.power, params.comp_degree, &opts.root)
            .map_err(|e| e.at_stage("roots"))?;
        sign_ambiguous |= root.sign_ambiguous;
        components.push(root.component.to_poly());
        diagnostics.roots.push(root.diagnostics);
    }
    Ok(Decomposition {
        components,
        sign_ambiguous,
        diagnostics,
    })
}

fn decompose_cover_full(
    p: &Poly,
    params: &PipelineParams,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let mut fam_rng = stream_rng(params.seed, "cover-family", 0);
    let family = cover_family(params.n, params.ell, params.total_degree(), &mut fam_rng)?;
    let results = run_restrictions(p, params, &family.members)?;
    let tensors: Vec<RestrictedTensor> = results
        .iter()
        .map(|r| RestrictedTensor {
            map: r.map.clone(),
            tensor: r.tensor_estimate.clone(),
        })
        .collect();
    let (global, agg_diag) = aggregate_cover(&tensors, params.n, params.inner_degree())?;
    let diagnostics = DriverDiagnostics {
        mode: "cover-full".into(),
        ell: params.ell,
        family_size: family.members.len(),
        restrictions: results.into_iter().map(|r| r.diagnostics).collect(),
        aggregation: Some(agg_diag),
        stitch: None,
        jennrich: Vec::new(),
        roots: Vec::new(),
    };
    finish_from_tensor(&global, params, opts, diagnostics)
}

fn decompose_cover_stitched(
    p: &Poly,
    params: &PipelineParams,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let kd = params.inner_degree();
    if params.ell < kd {
        return Err(Error::Parameter(format!(
            "ell = {} cannot observe degree-KD = {} coefficient supports",
            params.ell, kd
        )));
    }
    let m = params.n_components;
    let mut fam_rng = stream_rng(params.seed, "cover-family", 0);
    let family = cover_family(params.n, params.ell, kd.min(params.ell), &mut fam_rng)?;
    let results = run_restrictions(p, params, &family.members)?;

    // local tensor decomposition per restriction
    let mut local: Vec<(RestrictionMap, Vec<DVector<f64>>)> = Vec::with_capacity(results.len());
    let mut jennrich_diags = Vec::with_capacity(results.len());
    for r in &results {
        let mut rng = stream_rng(params.seed, "jennrich", subset_salt(r.map.subset()));
        let (vectors, jd) = jennrich_decompose(&r.tensor_estimate, m, &mut rng)
            .map_err(|e| e.at_stage("tensor-decomposition"))?;
        jennrich_diags.push(jd);
        local.push((r.map.clone(), vectors));
    }

    // stitch: accumulate each slot's coefficient vector over the global
    // degree-KD monomials, matching new members on already covered
    // coordinates
    let dim = monomial_count(params.n, kd);
    let mut sums = vec![vec![0.0f64; dim]; m];
    let mut lo = vec![vec![f64::INFINITY; dim]; m];
    let mut hi = vec![vec![f64::NEG_INFINITY; dim]; m];
    let mut counts = vec![0u32; dim];
    let mut stitch = StitchDiagnostics {
        min_match_margin: f64::INFINITY,
        ..StitchDiagnostics::default()
    };

    let mut queue: std::collections::VecDeque<(usize, bool)> =
        (0..local.len()).map(|i| (i, false)).collect();
    while let Some((idx, deferred)) = queue.pop_front() {
        let (map, vectors) = &local[idx];
        let globals: Vec<usize> = MultisetIter::new(map.len(), kd)
            .map(|mono| {
                let g: Vec<usize> = mono.iter().map(|&v| map.global(v)).collect();
                crate::polyring::rank_sorted(params.n, &g)
            })
            .collect();
        let overlap: Vec<(usize, usize)> = globals
            .iter()
            .enumerate()
            .filter(|(_, &g)| counts[g] > 0)
            .map(|(l, &g)| (l, g))
            .collect();

        let assignment: Vec<usize> = if counts.iter().all(|&c| c == 0) {
            (0..m).collect()
        } else {
            let signal: f64 = overlap
                .iter()
                .map(|&(_, g)| {
                    (0..m)
                        .map(|s| (sums[s][g] / counts[g] as f64).abs())
                        .fold(0.0f64, f64::max)
                })
                .fold(0.0f64, f64::max);
            if overlap.is_empty() || signal < 1e-10 {
                if deferred {
                    return Err(Error::DegenerateInput(
                        "restriction shares no usable coordinates with the stitched estimate"
                            .into(),
                    ));
                }
                stitch.deferred_members += 1;
                queue.push_back((idx, true));
                continue;
            }
            match_local_to_slots(vectors, &sums, &counts, &overlap, m, &mut stitch)?
        };

        for (local_t, &slot) in assignment.iter().enumerate() {
            let v = &vectors[local_t];
            for (l, &g) in globals.iter().enumerate() {
                sums[slot][g] += v[l];
                lo[slot][g] = lo[slot][g].min(v[l]);
                hi[slot][g] = hi[slot][g].max(v[l]);
            }
        }
        for &g in &globals {
            counts[g] += 1;
        }
    }

    for (g, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::Coverage(format!(
                "coefficient support {} not observed by any restriction",
                g
            )));
        }
    }
    let mut spread = 0.0f64;
    let vectors: Vec<DVector<f64>> = (0..m)
        .map(|s| {
            DVector::from_fn(dim, |g, _| {
                if counts[g] > 1 {
                    spread = spread.max(hi[s][g] - lo[s][g]);
                }
                sums[s][g] / counts[g] as f64
            })
        })
        .collect();
    stitch.max_entry_spread = spread;

    let diagnostics = DriverDiagnostics {
        mode: "cover-stitched".into(),
        ell: params.ell,
        family_size: family.members.len(),
        restrictions: results.into_iter().map(|r| r.diagnostics).collect(),
        aggregation: None,
        stitch: Some(stitch),
        jennrich: jennrich_diags,
        roots: Vec::new(),
    };
    finish_from_power_vectors(&vectors, params, opts, diagnostics)
}

fn match_local_to_slots(
    vectors: &[DVector<f64>],
    sums: &[Vec<f64>],
    counts: &[u32],
    overlap: &[(usize, usize)],
    m: usize,
    stitch: &mut StitchDiagnostics,
) -> Result<Vec<usize>> {
    let mut cost = vec![vec![0.0f64; m]; m];
    for (t, v) in vectors.iter().enumerate() {
        for (s, sum) in sums.iter().enumerate() {
            let mut acc = 0.0;
            for &(l, g) in overlap {
                let mean = sum[g] / counts[g] as f64;
                acc += (v[l] - mean) * (v[l] - mean);
            }
            cost[t][s] = acc.sqrt();
        }
    }
    // bottleneck assignment over subsets
    let full = 1usize << m;
    let mut best = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    best[0] = 0.0;
    for mask in 1..full {
        let t = (mask as u32).count_ones() as usize - 1;
        for s in 0..m {
            if mask >> s & 1 == 0 {
                continue;
            }
            let cand = best[mask ^ (1 << s)].max(cost[t][s]);
            if cand < best[mask] {
                best[mask] = cand;
                choice[mask] = s;
            }
        }
    }
    let mut assignment = vec![0usize; m];
    let mut mask = full - 1;
    for t in (0..m).rev() {
        let s = choice[mask];
        assignment[t] = s;
        mask ^= 1 << s;
    }
    // margin: optimal bottleneck vs the best assignment avoiding one choice
    let margin = {
        let mut second = f64::INFINITY;
        for t in 0..m {
            for s in 0..m {
                if s != assignment[t] {
                    second = second.min(cost[t][s]);
                }
            }
        }
        second - best[full - 1]
    };
    if m > 1 {
        stitch.min_match_margin = stitch.min_match_margin.min(margin);
    }
    Ok(assignment)
}

fn decompose_paper(p: &Poly, params: &PipelineParams, opts: &DecomposeOptions) -> Result<Decomposition> {
    let n = params.n;
    let q = if crate::restrictions::is_prime(n as u64) {
        n as u64
    } else if opts.field_pad {
        next_prime(n as u64)
    } else {
        return Err(Error::UnsupportedField(n as u64));
    };
    let order = params.total_degree();
    let family = HashFamily::new(q, order, params.ell)?;
    let subsets: FamilySubsets = family.enumerate()?;

    // group members by their effective subset over the real variables
    let mut effective: HashMap<Vec<usize>, u64> = HashMap::new();
    for &(mask, count) in &subsets.subsets {
        let vars: Vec<usize> = FamilySubsets::subset_vars(mask)
            .into_iter()
            .filter(|&v| v < n)
            .collect();
        *effective.entry(vars).or_insert(0) += count;
    }
    let mut keys: Vec<Vec<usize>> = effective.keys().cloned().collect();
    keys.sort();

    let mut tensors = Vec::with_capacity(keys.len());
    let mut restriction_diags = Vec::new();
    for vars in keys {
        let map = RestrictionMap::new(n, vars.clone())?;
        if vars.is_empty() {
            // the restriction kills every monomial; its tensor is exactly zero
            tensors.push(RestrictedTensor {
                map,
                tensor: Order3Tensor::zeros(0),
            });
            continue;
        }
        let member_params = PipelineParams {
            ell: vars.len(),
            ..params.clone()
        };
        let budget = monomial_count(member_params.ell, member_params.partials_degree());
        if member_params.partials_span_dim() > budget.min(monomial_count(n, 2 * params.power)) {
            return Err(Error::Parameter(format!(
                "paper-mode member of size {} cannot satisfy the span dimension; \
                 this n is too small for m = {} (use cover aggregation)",
                vars.len(),
                params.n_components
            )));
        }
        let ws = RestrictionWorkspace::new(&member_params);
        let mut rng = stream_rng(params.seed, "restriction", subset_salt(&vars));
        let r = decompose_restriction(p, &map, &member_params, &ws, &mut rng)?;
        restriction_diags.push(r.diagnostics);
        tensors.push(RestrictedTensor {
            map,
            tensor: r.tensor_estimate,
        });
    }

    let global = aggregate_paper(&tensors, &subsets, n, params.inner_degree())?;
    let diagnostics = DriverDiagnostics {
        mode: "paper".into(),
        ell: params.ell,
        family_size: subsets.total as usize,
        restrictions: restriction_diags,
        aggregation: None,
        stitch: None,
        jennrich: Vec::new(),
        roots: Vec::new(),
    };
    finish_from_tensor(&global, params, opts, diagnostics)
}
