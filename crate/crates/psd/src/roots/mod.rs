//! Recovery of a degree-K component A from a noisy estimate of Sym(A^{⊗D}).
//!
//! All identities between entries of Sym(A^{⊗D}) and products of entries of
//! A are derived symbolically in `expand`; nothing is hard-coded from
//! external sources. `square_root_poly` is the order-4 case with the
//! dedicated small-diagonal branch for matrices with vanishing diagonal;
//! `dth_root_poly` handles general (K, D) by pivoted triangular extraction
//! and, for even D, a square stage first (signs are then only recoverable up
//! to a global flip).

pub mod constants;
pub mod expand;

use crate::error::{Error, Result};
use crate::polyring::{MultisetIter, SymTensorF};
use expand::sym_power_terms;
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    /// Pivot magnitude floor, relative to max|PD|^{1/D}.
    pub pivot_floor_rel: f64,
    /// Residual acceptance threshold, relative to max(1, ||PD||_F).
    pub verify_threshold_rel: f64,
    /// Assumed entrywise noise level, used only to pick the square-root
    /// branch the way the analysis does (threshold 4 * max|P2| * noise^{1/3}).
    pub noise_hint: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            pivot_floor_rel: 1e-7,
            verify_threshold_rel: 1e-2,
            noise_hint: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RootBranch {
    Passthrough,
    PivotExtraction,
    SquareLargeDiagonal,
    SquareSmallDiagonal,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDiagnostics {
    pub branches: Vec<RootBranch>,
    pub pivot_magnitudes: Vec<f64>,
    /// ||Sym(Q^{⊗D}) - PD||_F of the returned component.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct RootResult {
    pub component: SymTensorF,
    /// True iff D is even: both signs reproduce PD.
    pub sign_ambiguous: bool,
    pub diagnostics: RootDiagnostics,
}

/// Rebuild Sym(Q^{⊗blocks}) from a symmetric tensor Q via the expansion.
pub fn sym_power(q: &SymTensorF, blocks: usize) -> SymTensorF {
    let k = q.order();
    let order = k * blocks;
    let mut out = SymTensorF::zero(q.n(), order);
    for (r, mono) in MultisetIter::new(q.n(), order).enumerate() {
        let mut acc = 0.0;
        for term in sym_power_terms(&mono, blocks, k) {
            let mut prod = *term.coeff.numer() as f64 / *term.coeff.denom() as f64;
            for b in &term.blocks {
                prod *= q.get_sorted(b);
            }
            acc += prod;
        }
        out.entries_mut()[r] = acc;
    }
    out
}

/// Pivoted triangular extraction of Q from PD ~ Sym(Q^{⊗blocks}), where Q is
/// symmetric of order `block_size`.
///
/// The pivot variable i* is the one maximizing |PD[(i*)^order]|; entries of
/// Q are then solved in decreasing order of their pivot multiplicity. For an
/// index (i*)^{K(D-1)} ⊎ J, the only partition containing a block with as
/// few pivots as J is {e, .., e, J}, so every other term in the expansion is
/// already known when J is reached.
fn extract_root_pivot(
    pd: &SymTensorF,
    blocks: usize,
    block_size: usize,
    cfg: &RootConfig,
) -> Result<(SymTensorF, f64)> {
    let n = pd.n();
    let order = blocks * block_size;
    debug_assert_eq!(pd.order(), order);

    let mut pivot = 0usize;
    let mut pivot_val = f64::NEG_INFINITY;
    for i in 0..n {
        let v = pd.get_sorted(&vec![i; order]).abs();
        if v > pivot_val {
            pivot_val = v;
            pivot = i;
        }
    }
    let lead_mag = pivot_val.powf(1.0 / blocks as f64);
    let floor = cfg.pivot_floor_rel * pd.max_abs_entry().powf(1.0 / blocks as f64);
    if !(lead_mag > floor) {
        return Err(Error::DegenerateInput(format!(
            "all pure-pivot entries below floor ({:.3e} <= {:.3e})",
            lead_mag, floor
        )));
    }
    let raw = *pd.get_sorted(&vec![pivot; order]);
    let lead = if blocks % 2 == 1 {
        raw.signum() * lead_mag
    } else {
        lead_mag
    };

    let mut q = SymTensorF::zero(n, block_size);
    let pure_block = vec![pivot; block_size];
    q.set_sorted(&pure_block, lead);

    let lead_pow = lead.powi(blocks as i32 - 1);
    for t in (0..block_size).rev() {
        for j in MultisetIter::new(n, block_size) {
            if j.iter().filter(|&&v| v == pivot).count() != t {
                continue;
            }
            // index (i*)^{K(D-1)} ⊎ J, sorted
            let mut index = vec![pivot; block_size * (blocks - 1)];
            index.extend_from_slice(&j);
            index.sort_unstable();

            let mut distinguished = vec![pure_block.clone(); blocks - 1];
            distinguished.push(j.clone());
            distinguished.sort();

            let mut rest = 0.0;
            let mut c_dist = 0.0;
            for term in sym_power_terms(&index, blocks, block_size) {
                let c = *term.coeff.numer() as f64 / *term.coeff.denom() as f64;
                if term.blocks == distinguished {
                    c_dist = c;
                } else {
                    let mut prod = c;
                    for b in &term.blocks {
                        prod *= q.get_sorted(b);
                    }
                    rest += prod;
                }
            }
            debug_assert!(c_dist > 0.0, "distinguished partition missing");
            let value = (pd.get_sorted(&index) - rest) / (c_dist * lead_pow);
            q.set_sorted(&j, value);
        }
    }
    Ok((q, lead_mag))
}

/// Square root of a matrix polynomial: recover ±P from P2 ~ Sym(P^{⊗2}).
pub fn square_root_poly(p2: &SymTensorF, cfg: &RootConfig) -> Result<RootResult> {
    if p2.order() != 4 {
        return Err(Error::MalformedInput(format!(
            "square_root_poly expects an order-4 tensor, got order {}",
            p2.order()
        )));
    }
    let n = p2.n();
    let max_entry = p2.max_abs_entry();
    if max_entry == 0.0 {
        return Err(Error::DegenerateInput("zero tensor has no meaningful root".into()));
    }
    let branch_threshold = 4.0 * max_entry * cfg.noise_hint.powf(1.0 / 3.0);
    let max_diag = (0..n)
        .map(|i| p2.get_sorted(&[i, i, i, i]).abs())
        .fold(0.0f64, f64::max);

    let (q, branch, pivot_mag) = if max_diag > branch_threshold {
        let (q, mag) = extract_root_pivot(p2, 2, 2, cfg)?;
        (q, RootBranch::SquareLargeDiagonal, mag)
    } else {
        small_diagonal_square_root(p2, cfg)?
    };

    let rebuilt = sym_power(&q, 2);
    let residual = rebuilt.sub(p2)?.frob_norm();
    let threshold = cfg.verify_threshold_rel * p2.frob_norm().max(1.0);
    if residual > threshold {
        return Err(Error::RootVerification { residual, threshold });
    }
    Ok(RootResult {
        component: q,
        sign_ambiguous: true,
        diagnostics: RootDiagnostics {
            branches: vec![branch],
            pivot_magnitudes: vec![pivot_mag],
            residual,
        },
    })
}

/// Off-diagonal pivot path for matrices whose diagonal is (near) zero.
fn small_diagonal_square_root(
    p2: &SymTensorF,
    cfg: &RootConfig,
) -> Result<(SymTensorF, RootBranch, f64)> {
    use constants::{as_f64, SQ_DISTINCT, SQ_PAIR_CROSS, SQ_SINGLE_CROSS};
    let n = p2.n();
    let c_cross = as_f64(SQ_PAIR_CROSS);
    let c_single = as_f64(SQ_SINGLE_CROSS);
    let c_dist = as_f64(SQ_DISTINCT);

    // pivot pair maximizing P2[iijj] ~ c_cross * P[ij]^2
    let mut best = (0usize, 1usize);
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let v = *p2.get_sorted(&[i, i, j, j]);
            if v > best_val {
                best_val = v;
                best = (i, j);
            }
        }
    }
    let (pi, pj) = best;
    let q_ij = (best_val.max(0.0) / c_cross).sqrt();
    let floor = cfg.pivot_floor_rel * p2.max_abs_entry().sqrt();
    if !(q_ij > floor) {
        return Err(Error::DegenerateInput(format!(
            "no usable pivot: diagonal and off-diagonal magnitudes below floor {:.3e}",
            floor
        )));
    }

    let mut q = SymTensorF::zero(n, 2);
    q.set_sorted(&[pi, pj], q_ij);
    // diagonal is declared zero on this branch
    for k in 0..n {
        if k == pi || k == pj {
            continue;
        }
        let mut iijk = vec![pi, pi, pj, k];
        iijk.sort_unstable();
        let mut ijjk = vec![pi, pj, pj, k];
        ijjk.sort_unstable();
        let q_ik = p2.get_sorted(&iijk) / (c_single * q_ij);
        let q_jk = p2.get_sorted(&ijjk) / (c_single * q_ij);
        let mut e_ik = vec![pi, k];
        e_ik.sort_unstable();
        let mut e_jk = vec![pj, k];
        e_jk.sort_unstable();
        q.set_sorted(&e_ik, q_ik);
        q.set_sorted(&e_jk, q_jk);
    }
    for k in 0..n {
        if k == pi || k == pj {
            continue;
        }
        for l in k + 1..n {
            if l == pi || l == pj {
                continue;
            }
            let mut ijkl = vec![pi, pj, k, l];
            ijkl.sort_unstable();
            let mut e_ik = vec![pi, k];
            e_ik.sort_unstable();
            let mut e_il = vec![pi, l];
            e_il.sort_unstable();
            let mut e_jk = vec![pj, k];
            e_jk.sort_unstable();
            let mut e_jl = vec![pj, l];
            e_jl.sort_unstable();
            let v = (p2.get_sorted(&ijkl)
                - c_dist * (q.get_sorted(&e_ik) * q.get_sorted(&e_jl)
                    + q.get_sorted(&e_il) * q.get_sorted(&e_jk)))
                / (c_dist * q_ij);
            q.set_sorted(&[k, l], v);
        }
    }
    Ok((q, RootBranch::SquareSmallDiagonal, q_ij))
}

/// D-th root: recover A (symmetric, order K) from PD ~ Sym(A^{⊗D}).
pub fn dth_root_poly(pd: &SymTensorF, power: usize, comp_degree: usize, cfg: &RootConfig) -> Result<RootResult> {
    if power == 0 {
        return Err(Error::Parameter("power must be at least 1".into()));
    }
    if pd.order() != power * comp_degree {
        return Err(Error::MalformedInput(format!(
            "tensor order {} != K*D = {}",
            pd.order(),
            power * comp_degree
        )));
    }
    if power == 1 {
        return Ok(RootResult {
            component: pd.clone(),
            sign_ambiguous: false,
            diagnostics: RootDiagnostics {
                branches: vec![RootBranch::Passthrough],
                pivot_magnitudes: vec![],
                residual: 0.0,
            },
        });
    }

    let result = if power % 2 == 1 {
        let (q, mag) = extract_root_pivot(pd, power, comp_degree, cfg)?;
        RootResult {
            component: q,
            sign_ambiguous: false,
            diagnostics: RootDiagnostics {
                branches: vec![RootBranch::PivotExtraction],
                pivot_magnitudes: vec![mag],
                residual: 0.0,
            },
        }
    } else {
        // even D: PD = Sym(Q^{⊗2}) for Q = Sym(A^{⊗ D/2}), take the square
        // root first, then recurse. The sign is lost here.
        let half_order = comp_degree * power / 2;
        let (q_half, mut branches, mut pivots) = if half_order == 2 {
            let r = square_root_poly(pd, cfg)?;
            (r.component, r.diagnostics.branches, r.diagnostics.pivot_magnitudes)
        } else {
            let (q, mag) = extract_root_pivot(pd, 2, half_order, cfg)?;
            (q, vec![RootBranch::PivotExtraction], vec![mag])
        };
        let inner = dth_root_poly(&q_half, power / 2, comp_degree, cfg)?;
        branches.extend(inner.diagnostics.branches);
        pivots.extend(inner.diagnostics.pivot_magnitudes);
        RootResult {
            component: inner.component,
            sign_ambiguous: true,
            diagnostics: RootDiagnostics {
                branches,
                pivot_magnitudes: pivots,
                residual: 0.0,
            },
        }
    };

    // verification residual is always computed and attached
    let rebuilt = sym_power(&result.component, power);
    let residual = rebuilt.sub(pd)?.frob_norm();
    let threshold = cfg.verify_threshold_rel * pd.frob_norm().max(1.0);
    if residual > threshold {
        return Err(Error::RootVerification { residual, threshold });
    }
    Ok(RootResult {
        diagnostics: RootDiagnostics {
            residual,
            ..result.diagnostics
        },
        ..result
    })
}
