//! Aggregation of per-restriction desymmetrized tensors into the global one.
//!
//! The order-3 objects here live over coefficient space: modes are indexed by
//! degree-KD monomials, and the target is sum_t c_t^{⊗3} where c_t is the
//! coefficient vector of A_t(x)^D. A restriction contributes the entries
//! whose variable support lies inside its subset; entries outside are zero
//! (paper mode) or simply missing (cover mode).

use super::family::FamilySubsets;
use crate::error::{Error, Result};
use crate::jennrich::Order3Tensor;
use crate::polyring::{merge_sorted, monomial_count, rank_sorted, MultisetIter, RestrictionMap};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::HashMap;

/// Correction value (q^{order-r} ell^r - ell) / (q^order - q) for an index
/// with r unique variables, evaluated exactly and returned in double
/// precision.
pub fn correction_value(r: usize, q: u64, ell: usize, order: usize) -> Result<f64> {
    if r == 0 || r > order {
        return Err(Error::Parameter(format!(
            "unique count {} out of range 1..={}",
            r, order
        )));
    }
    let v = correction_rational(r, q, ell, order)
        .to_f64()
        .ok_or_else(|| Error::Precision("correction value not representable".into()))?;
    if v <= f64::MIN_POSITIVE {
        return Err(Error::Precision(format!(
            "correction value underflow at r = {}",
            r
        )));
    }
    Ok(v)
}

pub fn correction_rational(r: usize, q: u64, ell: usize, order: usize) -> BigRational {
    let qb = BigInt::from(q);
    let eb = BigInt::from(ell as u64);
    let num = qb.pow((order - r) as u32) * eb.pow(r as u32) - &eb;
    let den = qb.pow(order as u32) - &qb;
    BigRational::new(num, den)
}

/// A restriction's contribution: the subset (over the global, possibly
/// prime-padded variable range) and the order-3 tensor over its local
/// coefficient space.
pub struct RestrictedTensor {
    pub map: RestrictionMap,
    pub tensor: Order3Tensor,
}

fn local_to_global_ranks(map: &RestrictionMap, n: usize, kd: usize) -> Vec<usize> {
    MultisetIter::new(map.len(), kd)
        .map(|mono| {
            let global: Vec<usize> = mono.iter().map(|&v| map.global(v)).collect();
            rank_sorted(n, &global)
        })
        .collect()
}

/// Unique-variable count per global entry (a, b, c), memoized by support.
struct UniqueCounter {
    monos: Vec<Vec<usize>>,
}

impl UniqueCounter {
    fn new(n: usize, kd: usize) -> Self {
        UniqueCounter {
            monos: MultisetIter::new(n, kd).collect(),
        }
    }

    fn vars(&self, a: usize, b: usize, c: usize) -> Vec<usize> {
        let ab = merge_sorted(&self.monos[a], &self.monos[b]);
        let mut all = merge_sorted(&ab, &self.monos[c]);
        all.dedup();
        all
    }
}

/// Paper-mode aggregation: average the zero-embedded restricted tensors over
/// the whole family, then undo the inclusion-probability attenuation
/// entrywise. Expects one tensor per distinct subset of the family; members
/// inducing the same subset share it, weighted by multiplicity.
pub fn aggregate_paper(
    results: &[RestrictedTensor],
    family: &FamilySubsets,
    n: usize,
    kd: usize,
) -> Result<Order3Tensor> {
    let dim = monomial_count(n, kd);
    let mut sum = Order3Tensor::zeros(dim);

    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    for r in results {
        if seen.insert(r.map.subset().to_vec(), ()).is_some() {
            return Err(Error::MalformedInput("duplicate subset in results".into()));
        }
    }
    // multiplicity per subset, restricted to real variables
    let mut weight_of: HashMap<Vec<usize>, u64> = HashMap::new();
    for &(mask, count) in &family.subsets {
        let vars: Vec<usize> = FamilySubsets::subset_vars(mask)
            .into_iter()
            .filter(|&v| v < n)
            .collect();
        *weight_of.entry(vars).or_insert(0) += count;
    }

    let mut covered_weight: u64 = 0;
    for r in results {
        let Some(&w) = weight_of.get(r.map.subset()) else {
            return Err(Error::MalformedInput(
                "result subset not present in family".into(),
            ));
        };
        covered_weight += w;
        let g = local_to_global_ranks(&r.map, n, kd);
        let ldim = g.len();
        let weight = w as f64;
        for a in 0..ldim {
            for b in 0..ldim {
                let row = (g[a] * dim + g[b]) * dim;
                let lrow = (a * ldim + b) * ldim;
                for c in 0..ldim {
                    sum.data_mut()[row + g[c]] += weight * r.tensor.data()[lrow + c];
                }
            }
        }
    }
    if covered_weight != family.total {
        return Err(Error::MalformedInput(format!(
            "results cover weight {} of {} family members",
            covered_weight, family.total
        )));
    }

    // entrywise: divide the family average by the exact inclusion probability
    let counter = UniqueCounter::new(n, kd);
    let total = family.total as f64;
    let mut prob_cache: HashMap<u64, f64> = HashMap::new();
    let mut out = sum;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let vars = counter.vars(a, b, c);
                let mask = vars.iter().fold(0u64, |acc, &v| acc | 1 << v);
                let p = match prob_cache.get(&mask) {
                    Some(&p) => p,
                    None => {
                        let cnt = family.count_containing(&vars);
                        if cnt == 0 {
                            return Err(Error::Coverage(format!(
                                "no family member contains variables {:?}",
                                vars
                            )));
                        }
                        let p = cnt as f64 / total;
                        prob_cache.insert(mask, p);
                        p
                    }
                };
                let idx = (a * dim + b) * dim + c;
                out.data_mut()[idx] = out.data()[idx] / total / p;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoverDiagnostics {
    /// Largest disagreement between members observing the same entry.
    pub max_entry_spread: f64,
    pub min_cover_count: usize,
}

/// Cover-mode aggregation: each global entry is the mean over the members
/// whose subset contains its variable support. Every entry must be covered.
pub fn aggregate_cover(
    results: &[RestrictedTensor],
    n: usize,
    kd: usize,
) -> Result<(Order3Tensor, CoverDiagnostics)> {
    let dim = monomial_count(n, kd);
    let mut sum = vec![0.0f64; dim * dim * dim];
    let mut count = vec![0u32; dim * dim * dim];
    let mut lo = vec![f64::INFINITY; dim * dim * dim];
    let mut hi = vec![f64::NEG_INFINITY; dim * dim * dim];

    for r in results {
        let g = local_to_global_ranks(&r.map, n, kd);
        let ldim = g.len();
        for a in 0..ldim {
            for b in 0..ldim {
                let row = (g[a] * dim + g[b]) * dim;
                let lrow = (a * ldim + b) * ldim;
                for c in 0..ldim {
                    let v = r.tensor.data()[lrow + c];
                    let idx = row + g[c];
                    sum[idx] += v;
                    count[idx] += 1;
                    lo[idx] = lo[idx].min(v);
                    hi[idx] = hi[idx].max(v);
                }
            }
        }
    }

    let mut out = Order3Tensor::zeros(dim);
    let mut spread = 0.0f64;
    let mut min_cover = usize::MAX;
    for idx in 0..dim * dim * dim {
        if count[idx] == 0 {
            return Err(Error::Coverage(format!(
                "entry {} not observed by any restriction",
                idx
            )));
        }
        out.data_mut()[idx] = sum[idx] / count[idx] as f64;
        spread = spread.max(hi[idx] - lo[idx]);
        min_cover = min_cover.min(count[idx] as usize);
    }
    Ok((
        out,
        CoverDiagnostics {
            max_entry_spread: spread,
            min_cover_count: min_cover,
        },
    ))
}
