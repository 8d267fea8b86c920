//! Non-identifiability witnesses: concrete instances where power-sum
//! decompositions are not unique.
//!
//! The cubic witness is two sets of three bivariate quadratics whose cubes
//! sum to the same degree-6 polynomial once the cross coefficient is sqrt(6);
//! verified exactly over Q(sqrt 6) and in floats. The quartic witness shows
//! sums of squares of two random quadratics are never unique: any rotation of
//! the coefficient pair preserving the outer product sum gives another valid
//! decomposition.

use super::report::{GuardStatus, ProbeLemma, ProbeParams, ProbeReport, TrialRecord};
use crate::error::{Error, Result};
use crate::polyring::{monomial_count, HomPoly, Poly, QuadSqrt6};
use crate::subspace::thin_left_svd;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type QuadPoly = HomPoly<QuadSqrt6>;

fn quad(rat: i64, irr: i64) -> QuadSqrt6 {
    QuadSqrt6::new(
        BigRational::from_integer(BigInt::from(rat)),
        BigRational::from_integer(BigInt::from(irr)),
    )
}

/// The two exact component sets, with a = sqrt(6) implicit in the entries.
/// Coefficient order over n = 2, degree 2: (x^2, xy, y^2).
pub fn cubic_witness_sets() -> (Vec<QuadPoly>, Vec<QuadPoly>) {
    let mk = |c: [QuadSqrt6; 3]| QuadPoly::new(2, 2, c.to_vec()).expect("shape");
    let set1 = vec![
        mk([quad(1, 0), quad(0, 1), quad(0, 0)]), // x^2 + a xy
        mk([quad(1, 0), quad(0, 0), quad(1, 0)]), // x^2 + y^2
        mk([quad(0, 0), quad(0, 1), quad(1, 0)]), // y^2 + a xy
    ];
    let set2 = vec![
        mk([quad(1, 0), quad(0, 0), quad(0, 0)]), // x^2
        mk([quad(1, 0), quad(0, 1), quad(1, 0)]), // x^2 + a xy + y^2
        mk([quad(0, 0), quad(0, 0), quad(1, 0)]), // y^2
    ];
    (set1, set2)
}

fn cube_sum_exact(set: &[QuadPoly]) -> Result<QuadPoly> {
    let mut acc = QuadPoly::zero(2, 6);
    for p in set {
        acc = acc.add(&p.pow(3)?)?;
    }
    Ok(acc)
}

pub struct CubicWitness {
    /// True iff the two cube sums agree coefficient-for-coefficient over
    /// Q(sqrt 6).
    pub exact_equal: bool,
    /// Largest float-coefficient difference between the two sums.
    pub float_defect: f64,
    /// min over permutations of max per-component coefficient distance.
    pub set_distance: f64,
    /// Both sides' x^3 y^3 coefficient, which forces a = sqrt(6).
    pub cross_coefficient: f64,
}

pub fn cubic_witness() -> Result<CubicWitness> {
    let (s1, s2) = cubic_witness_sets();
    let c1 = cube_sum_exact(&s1)?;
    let c2 = cube_sum_exact(&s2)?;
    let exact_equal = c1 == c2;

    let float_defect = c1
        .coeffs()
        .iter()
        .zip(c2.coeffs())
        .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
        .fold(0.0f64, f64::max);

    // x^3 y^3 has index (0,0,0,1,1,1); both sides must be 2 * 6^{3/2} since
    // 2a^3 = 6a + a^3 at a = sqrt(6)
    let idx = crate::polyring::MonomialIndex::new(vec![0, 0, 0, 1, 1, 1]);
    let cross = c1.coeff(&idx)?.to_f64();

    let to_f64 = |p: &QuadPoly| -> Vec<f64> { p.coeffs().iter().map(|c| c.to_f64()).collect() };
    let v1: Vec<Vec<f64>> = s1.iter().map(to_f64).collect();
    let v2: Vec<Vec<f64>> = s2.iter().map(to_f64).collect();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    // min over the 6 permutations of the max per-component distance
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let set_distance = perms
        .iter()
        .map(|p| {
            (0..3)
                .map(|i| dist(&v1[i], &v2[p[i]]))
                .fold(0.0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min);

    Ok(CubicWitness {
        exact_equal,
        float_defect,
        set_distance,
        cross_coefficient: cross,
    })
}

pub struct QuarticWitness {
    /// Coefficient-vector distance between the degree-4 polynomials built
    /// from the original and the alternative pair.
    pub poly_defect: f64,
    /// min-sign matched distance between the two component pairs.
    pub component_distance: f64,
}

/// Sum of squares of two random quadratics admits an alternative
/// decomposition through the eigenvectors of c1 c1^T + c2 c2^T.
pub fn quartic_witness(n: usize, seed: u64) -> Result<QuarticWitness> {
    if n < 2 {
        return Err(Error::Parameter("quartic witness needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = monomial_count(n, 2);
    let a: Vec<Poly> = (0..2)
        .map(|_| {
            Poly::new(n, 2, (0..count).map(|_| rng.sample(StandardNormal)).collect())
                .expect("shape")
        })
        .collect();

    // rank-2 Gram of the coefficient vectors and its exact eigen-split
    let c = DMatrix::<f64>::from_fn(count, 2, |i, j| a[j].coeffs()[i]);
    let gram = &c * c.transpose();
    let (u, s) = thin_left_svd(&gram);
    let alt: Vec<Poly> = (0..2)
        .map(|j| {
            let col: DVector<f64> = u.column(j) * s[j].sqrt();
            Poly::new(n, 2, col.as_slice().to_vec()).expect("shape")
        })
        .collect();

    let square_sum = |ps: &[Poly]| -> Result<Poly> {
        let mut acc = Poly::zero(n, 4);
        for p in ps {
            acc = acc.add(&p.pow(2)?)?;
        }
        Ok(acc)
    };
    let q1 = square_sum(&a)?;
    let q2 = square_sum(&alt)?;
    let poly_defect = q1.sub(&q2)?.norm();

    let dist = |x: &Poly, y: &Poly| -> f64 {
        let direct = x.sub(y).unwrap().norm();
        let flipped = x.add(y).unwrap().norm();
        direct.min(flipped)
    };
    let component_distance = [[0usize, 1], [1, 0]]
        .iter()
        .map(|p| dist(&a[0], &alt[p[0]]).max(dist(&a[1], &alt[p[1]])))
        .fold(f64::INFINITY, f64::min);

    Ok(QuarticWitness {
        poly_defect,
        component_distance,
    })
}

pub fn witness_report(params: &ProbeParams) -> Result<ProbeReport> {
    let cubic = cubic_witness()?;
    let n = params.n.max(4);
    let quartic = quartic_witness(n, params.seed)?;
    let cubic_pass =
        cubic.exact_equal && cubic.float_defect <= 1e-12 && cubic.set_distance >= 0.5;
    let quartic_pass = quartic.poly_defect <= 1e-10 && quartic.component_distance >= 1e-3;
    let trials = vec![
        TrialRecord {
            trial: 0,
            defect: Some(cubic.float_defect),
            distance: Some(cubic.set_distance),
            pass: cubic_pass,
            ..TrialRecord::default()
        },
        TrialRecord {
            trial: 1,
            defect: Some(quartic.poly_defect),
            distance: Some(quartic.component_distance),
            pass: quartic_pass,
            ..TrialRecord::default()
        },
    ];
    Ok(ProbeReport {
        lemma: ProbeLemma::Witness,
        params: *params,
        guard: GuardStatus {
            name: "none".into(),
            in_regime: true,
        },
        pass: Some(cubic_pass && quartic_pass),
        trials,
        notes: vec![
            format!(
                "cubic witness: exact equality over Q(sqrt6) = {}, x^3y^3 coefficient = {:.12}",
                cubic.exact_equal, cubic.cross_coefficient
            ),
            format!("quartic witness over n = {} variables", n),
        ],
    })
}
