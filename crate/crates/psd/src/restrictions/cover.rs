//! Greedy randomized covering families: size-ell subsets of [n] such that
//! every subset of at most `order` variables lies inside some member. The
//! paper's hash family is exact but has n^k - n members; the cover family is
//! the desk-scale alternative for end-to-end runs, exact in the noiseless
//! case because restricted desymmetrized tensors agree with the global
//! tensor on fully contained indices.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

const ITERATION_BUDGET: usize = 200_000;

/// Candidate pool per greedy step; small target sets afford a wider search,
/// which directly shrinks the family (every member costs a pipeline run).
fn candidate_pool(targets: usize) -> usize {
    if targets <= 1000 {
        96
    } else {
        32
    }
}

#[derive(Clone, Debug)]
pub struct CoverFamily {
    pub n: usize,
    pub ell: usize,
    pub order: usize,
    pub members: Vec<Vec<usize>>,
    /// Set only after the exhaustive coverage check passed.
    pub certified: bool,
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut mask = 0u64;
        for &v in &idx {
            mask |= 1 << v;
        }
        out.push(mask);
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Extend `seed_mask` to a random subset of exactly `ell` variables.
fn random_extension(n: usize, ell: usize, seed_mask: u64, rng: &mut impl Rng) -> u64 {
    let mut mask = seed_mask;
    let mut pool: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 0).collect();
    pool.shuffle(rng);
    let mut it = pool.into_iter();
    while (mask.count_ones() as usize) < ell {
        let v = it.next().expect("enough variables to extend");
        mask |= 1 << v;
    }
    mask
}

pub fn cover_family(n: usize, ell: usize, order: usize, rng: &mut impl Rng) -> Result<CoverFamily> {
    if order > ell || ell > n || n > 63 {
        return Err(Error::Parameter(format!(
            "cover family needs order <= ell <= n <= 63; got order = {}, ell = {}, n = {}",
            order, ell, n
        )));
    }
    if ell == n {
        return Ok(CoverFamily {
            n,
            ell,
            order,
            members: vec![(0..n).collect()],
            certified: true,
        });
    }

    let targets = combinations(n, order);
    let pool = candidate_pool(targets.len());
    let mut uncovered: Vec<u64> = targets.clone();
    let mut members: Vec<u64> = Vec::new();
    let mut iterations = 0usize;
    while !uncovered.is_empty() {
        iterations += 1;
        if iterations > ITERATION_BUDGET {
            return Err(Error::Coverage(format!(
                "coverage not reached within {} iterations ({} targets left)",
                ITERATION_BUDGET,
                uncovered.len()
            )));
        }
        let seed = uncovered[0];
        // score candidates against a bounded sample of the uncovered list
        let sample = &uncovered[..uncovered.len().min(3000)];
        let mut best_mask = 0u64;
        let mut best_score = -1i64;
        for _ in 0..pool {
            let cand = random_extension(n, ell, seed, rng);
            let score = sample.iter().filter(|&&t| t & !cand == 0).count() as i64;
            if score > best_score {
                best_score = score;
                best_mask = cand;
            }
        }
        members.push(best_mask);
        uncovered.retain(|&t| t & !best_mask != 0);
    }

    // certificate: re-check every target against the final member list
    let certified = targets.iter().all(|&t| members.iter().any(|&m| t & !m == 0));
    if !certified {
        return Err(Error::Coverage("certificate check failed".into()));
    }

    let members = members
        .into_iter()
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
        .collect();
    Ok(CoverFamily {
        n,
        ell,
        order,
        members,
        certified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_subset_when_ell_equals_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fam = cover_family(6, 6, 4, &mut rng).unwrap();
        assert_eq!(fam.members, vec![(0..6).collect::<Vec<_>>()]);
        assert!(fam.certified);
    }

    #[test]
    fn members_have_exact_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fam = cover_family(10, 5, 3, &mut rng).unwrap();
        assert!(fam.members.iter().all(|m| m.len() == 5));
    }

    #[test]
    fn sixteen_choose_six_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fam = cover_family(16, 8, 6, &mut rng).unwrap();
        assert!(fam.certified);
        assert!(
            fam.members.len() <= 2000,
            "family size {} above budget",
            fam.members.len()
        );
        // independent exhaustive re-check over all C(16,6) = 8008 subsets
        let masks: Vec<u64> = fam
            .members
            .iter()
            .map(|m| m.iter().fold(0u64, |acc, &v| acc | 1 << v))
            .collect();
        for t in combinations(16, 6) {
            assert!(masks.iter().any(|&m| t & !m == 0));
        }
    }

    #[test]
    fn infeasible_parameters_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(cover_family(10, 4, 6, &mut rng).is_err());
    }
}
