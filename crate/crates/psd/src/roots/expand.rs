//! Symbolic expansion of Sym(A^{⊗D}) entries as polynomials in the entries
//! of the symmetric order-K tensor A.
//!
//! For an index I of size KD,
//!   Sym(A^{⊗D})[I] = (K!^D D! / (KD)!) * sum over unordered partitions of
//!                    the KD positions into D blocks of size K of
//!                    prod_b A[values(block_b)],
//! grouped here by the multiset of value blocks with exact rational
//! coefficients. This is the single source of truth for every entrywise
//! identity used by the root-extraction routines and their tests.

use num_rational::Ratio;

pub type Coefficient = Ratio<i64>;

/// One term of the expansion: an unordered collection of sorted K-multisets
/// (the blocks) with its rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    /// Sorted list of sorted blocks; each block indexes an entry of A.
    pub blocks: Vec<Vec<usize>>,
    pub coeff: Coefficient,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Enumerate unordered partitions of `positions` values into `blocks` blocks
/// of size `block_size`, canonically (each block claims the smallest unused
/// position), and group them by value-block multiset.
pub fn sym_power_terms(index: &[usize], blocks: usize, block_size: usize) -> Vec<Term> {
    assert_eq!(index.len(), blocks * block_size, "index size must be K*D");
    let total = index.len();
    let mut used = vec![false; total];
    let mut current: Vec<Vec<usize>> = Vec::with_capacity(blocks);
    let mut counts: std::collections::HashMap<Vec<Vec<usize>>, u64> = std::collections::HashMap::new();

    fn recurse(
        index: &[usize],
        block_size: usize,
        blocks: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<Vec<usize>>,
        counts: &mut std::collections::HashMap<Vec<Vec<usize>>, u64>,
    ) {
        if current.len() == blocks {
            let mut key: Vec<Vec<usize>> = current
                .iter()
                .map(|b| {
                    let mut vals: Vec<usize> = b.iter().map(|&p| index[p]).collect();
                    vals.sort_unstable();
                    vals
                })
                .collect();
            key.sort();
            *counts.entry(key).or_insert(0) += 1;
            return;
        }
        let anchor = used.iter().position(|&u| !u).expect("positions remain");
        used[anchor] = true;
        let mut chosen = vec![anchor];
        fn pick(
            index: &[usize],
            block_size: usize,
            blocks: usize,
            start: usize,
            used: &mut Vec<bool>,
            chosen: &mut Vec<usize>,
            current: &mut Vec<Vec<usize>>,
            counts: &mut std::collections::HashMap<Vec<Vec<usize>>, u64>,
        ) {
            if chosen.len() == block_size {
                current.push(chosen.clone());
                recurse(index, block_size, blocks, used, current, counts);
                current.pop();
                return;
            }
            for p in start..index.len() {
                if used[p] {
                    continue;
                }
                used[p] = true;
                chosen.push(p);
                pick(index, block_size, blocks, p + 1, used, chosen, current, counts);
                chosen.pop();
                used[p] = false;
            }
        }
        pick(index, block_size, blocks, anchor + 1, used, &mut chosen, current, counts);
        used[anchor] = false;
    }

    recurse(index, block_size, blocks, &mut used, &mut current, &mut counts);

    let unit = Coefficient::new(
        (factorial(block_size).pow(blocks as u32) * factorial(blocks)) as i64,
        factorial(total) as i64,
    );
    let mut terms: Vec<Term> = counts
        .into_iter()
        .map(|(blocks, count)| Term {
            blocks,
            coeff: unit * Coefficient::from_integer(count as i64),
        })
        .collect();
    terms.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    terms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(n: i64, d: i64) -> Coefficient {
        Coefficient::new(n, d)
    }

    #[test]
    fn matrix_square_iijj() {
        // Sym(P^{⊗2})[i,i,j,j] = 1/3 P[ii] P[jj] + 2/3 P[ij]^2
        let terms = sym_power_terms(&[0, 0, 1, 1], 2, 2);
        assert_eq!(terms.len(), 2);
        let diag = terms
            .iter()
            .find(|t| t.blocks == vec![vec![0, 0], vec![1, 1]])
            .unwrap();
        assert_eq!(diag.coeff, coeff(1, 3));
        let cross = terms
            .iter()
            .find(|t| t.blocks == vec![vec![0, 1], vec![0, 1]])
            .unwrap();
        assert_eq!(cross.coeff, coeff(2, 3));
    }

    #[test]
    fn matrix_square_pure_and_single() {
        // [i,i,i,i] -> P[ii]^2 with coefficient 1
        let terms = sym_power_terms(&[0, 0, 0, 0], 2, 2);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coeff, coeff(1, 1));
        // [i,i,i,j] -> P[ii] P[ij] with coefficient 1
        let terms = sym_power_terms(&[0, 0, 0, 1], 2, 2);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].blocks, vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(terms[0].coeff, coeff(1, 1));
    }

    #[test]
    fn matrix_square_all_distinct() {
        // [i,j,k,l] -> 1/3 (P[ij]P[kl] + P[ik]P[jl] + P[il]P[jk])
        let terms = sym_power_terms(&[0, 1, 2, 3], 2, 2);
        assert_eq!(terms.len(), 3);
        for t in &terms {
            assert_eq!(t.coeff, coeff(1, 3));
        }
    }

    #[test]
    fn coefficients_sum_to_one() {
        // total weight of any expansion is 1 (partitions of identical values)
        for (blocks, size, idx) in [
            (3usize, 2usize, vec![0, 0, 1, 1, 2, 2]),
            (2, 3, vec![0, 1, 1, 2, 2, 2]),
            (3, 3, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]),
        ] {
            let total: Coefficient = sym_power_terms(&idx, blocks, size)
                .iter()
                .map(|t| t.coeff)
                .sum();
            let count: Coefficient = sym_power_terms(&vec![0; blocks * size], blocks, size)
                .iter()
                .map(|t| t.coeff)
                .sum();
            assert_eq!(total, count);
            assert_eq!(count, coeff(1, 1));
        }
    }

    #[test]
    fn expansion_matches_brute_force_symmetrization() {
        // check Sym(A^{⊗2})[I] for order-3 A against direct permutation average
        use crate::polyring::{sym, DenseTensor, MultisetIter};
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::StandardNormal;

        let n = 3;
        let k = 3;
        let d = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // random symmetric order-3 A as a canonical entry table
        let mut a = crate::polyring::SymTensor::<f64>::zero(n, k);
        for e in a.entries_mut() {
            *e = rng.sample(StandardNormal);
        }
        // dense A^{⊗2} then symmetrize
        let mut dense = DenseTensor::<f64>::zero(n, k * d);
        let mut idx = vec![0usize; k * d];
        loop {
            let v = a.get(&idx[0..k]) * a.get(&idx[k..2 * k]);
            dense.set(&idx, v);
            let mut p = k * d;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
            }
            if idx.iter().all(|&x| x == 0) {
                break;
            }
        }
        let direct = sym(&dense);
        for (r, mono) in MultisetIter::new(n, k * d).enumerate() {
            let mut from_terms = 0.0;
            for t in sym_power_terms(&mono, d, k) {
                let mut prod = *t.coeff.numer() as f64 / *t.coeff.denom() as f64;
                for b in &t.blocks {
                    prod *= a.get(b);
                }
                from_terms += prod;
            }
            assert!(
                (direct.entries()[r] - from_terms).abs() < 1e-12,
                "index {:?}",
                mono
            );
        }
    }
}
