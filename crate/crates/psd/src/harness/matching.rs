//! Component matching: the reported metric is
//! min over permutations of max_t min over allowed signs of
//! ||estimate_t - sigma * truth_{pi(t)}||_F, solved exactly by a bottleneck
//! assignment over subsets (m stays small here).

use crate::error::{Error, Result};
use crate::polyring::Poly;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    /// permutation[t] = index of the truth component matched to estimate t.
    pub permutation: Vec<usize>,
    /// Chosen sign per estimate (always +1 when signs are not allowed).
    pub signs: Vec<i8>,
    pub per_component: Vec<f64>,
    pub max_error: f64,
}

const MATCH_LIMIT: usize = 20;

pub fn match_components(estimates: &[Poly], truth: &[Poly], allow_sign: bool) -> Result<MatchReport> {
    let m = truth.len();
    if estimates.len() != m {
        return Err(Error::MalformedInput(format!(
            "component count mismatch: {} estimates vs {} truth",
            estimates.len(),
            m
        )));
    }
    if m == 0 || m > MATCH_LIMIT {
        return Err(Error::Parameter(format!("component count {} out of range", m)));
    }

    // cost[t][s] with the sign minimized out per pair
    let mut cost = vec![vec![0.0f64; m]; m];
    let mut sign = vec![vec![1i8; m]; m];
    for (t, e) in estimates.iter().enumerate() {
        for (s, a) in truth.iter().enumerate() {
            let direct = e.sub(a)?.norm();
            if allow_sign {
                let flipped = e.add(a)?.norm();
                if flipped < direct {
                    cost[t][s] = flipped;
                    sign[t][s] = -1;
                    continue;
                }
            }
            cost[t][s] = direct;
        }
    }

    // bottleneck assignment: best[mask] = minimal achievable max-cost when
    // the first popcount(mask) estimates use exactly the truth set `mask`
    let full = 1usize << m;
    let mut best = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    best[0] = 0.0;
    for mask in 1..full {
        let t = (mask as u32).count_ones() as usize - 1;
        let mut b = f64::INFINITY;
        let mut pick = usize::MAX;
        for s in 0..m {
            if mask >> s & 1 == 0 {
                continue;
            }
            let prev = best[mask ^ (1 << s)];
            let cand = prev.max(cost[t][s]);
            if cand < b {
                b = cand;
                pick = s;
            }
        }
        best[mask] = b;
        choice[mask] = pick;
    }

    let mut permutation = vec![0usize; m];
    let mut mask = full - 1;
    for t in (0..m).rev() {
        let s = choice[mask];
        permutation[t] = s;
        mask ^= 1 << s;
    }
    let signs: Vec<i8> = (0..m).map(|t| sign[t][permutation[t]]).collect();
    let per_component: Vec<f64> = (0..m).map(|t| cost[t][permutation[t]]).collect();
    let max_error = per_component.iter().cloned().fold(0.0f64, f64::max);
    debug_assert!((max_error - best[full - 1]).abs() <= 1e-12 * (1.0 + max_error));
    Ok(MatchReport {
        permutation,
        signs,
        per_component,
        max_error,
    })
}
