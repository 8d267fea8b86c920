//! GENERATED FILE — do not edit by hand.
//!
//! Entrywise identity constants for Sym(P^{⊗2}) of a symmetric matrix P
//! under this crate's symmetrization convention (average over all index
//! permutations). Regenerate with:
//!
//!     cargo run -p psd --bin derive-root-constants
//!
//! and paste the output over this file. The test
//! `roots::constants::tests::table_matches_fresh_derivation` fails if this
//! table drifts from the derivation in `roots::expand`.

/// P2[i,i,i,i] = SQ_PURE * P[ii]^2
pub const SQ_PURE: (i64, i64) = (1, 1);
/// P2[i,i,i,j] = SQ_TRIPLE * P[ii] P[ij]
pub const SQ_TRIPLE: (i64, i64) = (1, 1);
/// P2[i,i,j,j] = SQ_PAIR_DIAG * P[ii] P[jj] + SQ_PAIR_CROSS * P[ij]^2
pub const SQ_PAIR_DIAG: (i64, i64) = (1, 3);
pub const SQ_PAIR_CROSS: (i64, i64) = (2, 3);
/// P2[i,i,j,k] = SQ_SINGLE_DIAG * P[ii] P[jk] + SQ_SINGLE_CROSS * P[ij] P[ik]
pub const SQ_SINGLE_DIAG: (i64, i64) = (1, 3);
pub const SQ_SINGLE_CROSS: (i64, i64) = (2, 3);
/// P2[i,j,k,l] = SQ_DISTINCT * (P[ij]P[kl] + P[ik]P[jl] + P[il]P[jk])
pub const SQ_DISTINCT: (i64, i64) = (1, 3);

pub fn as_f64(c: (i64, i64)) -> f64 {
    c.0 as f64 / c.1 as f64
}

/// Re-derive the table from the partition expansion. Returns the constants
/// in declaration order; used by the generator binary and the drift test.
pub fn derive() -> [(i64, i64); 7] {
    use super::expand::sym_power_terms;
    let pick = |index: &[usize], blocks: [&[usize]; 2]| -> (i64, i64) {
        let want: Vec<Vec<usize>> = {
            let mut v: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
            v.sort();
            v
        };
        let terms = sym_power_terms(index, 2, 2);
        let t = terms
            .iter()
            .find(|t| t.blocks == want)
            .unwrap_or_else(|| panic!("no term {:?} in expansion of {:?}", want, index));
        (*t.coeff.numer(), *t.coeff.denom())
    };
    [
        pick(&[0, 0, 0, 0], [&[0, 0], &[0, 0]]),
        pick(&[0, 0, 0, 1], [&[0, 0], &[0, 1]]),
        pick(&[0, 0, 1, 1], [&[0, 0], &[1, 1]]),
        pick(&[0, 0, 1, 1], [&[0, 1], &[0, 1]]),
        pick(&[0, 0, 1, 2], [&[0, 0], &[1, 2]]),
        pick(&[0, 0, 1, 2], [&[0, 1], &[0, 2]]),
        pick(&[0, 1, 2, 3], [&[0, 1], &[2, 3]]),
    ]
}

pub const TABLE: [(&str, (i64, i64)); 7] = [
    ("SQ_PURE", SQ_PURE),
    ("SQ_TRIPLE", SQ_TRIPLE),
    ("SQ_PAIR_DIAG", SQ_PAIR_DIAG),
    ("SQ_PAIR_CROSS", SQ_PAIR_CROSS),
    ("SQ_SINGLE_DIAG", SQ_SINGLE_DIAG),
    ("SQ_SINGLE_CROSS", SQ_SINGLE_CROSS),
    ("SQ_DISTINCT", SQ_DISTINCT),
];
