//! Instance generation: random (or smoothed) components, the power-sum
//! polynomial, and Gaussian coefficient noise rescaled to a requested norm.

use super::rng::stream_rng;
use crate::error::{Error, Result};
use crate::polyring::{monomial_count, Poly};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub comp_degree: usize,
    #[serde(rename = "D")]
    pub power: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn total_degree(&self) -> usize {
        3 * self.comp_degree * self.power
    }

    pub fn validate(&self) -> Result<()> {
        if self.comp_degree < 2 || self.power < 1 || self.m < 1 || self.n < 1 {
            return Err(Error::Parameter(format!(
                "need K >= 2, D >= 1, m >= 1, n >= 1; got K={}, D={}, m={}, n={}",
                self.comp_degree, self.power, self.m, self.n
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
}

/// Smoothed-instance mode: components are base + rho * G instead of pure
/// Gaussians (the base may be adversarial).
#[derive(Clone, Debug)]
pub struct Smoothing {
    pub base: Vec<Poly>,
    pub rho: f64,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub params: GenParams,
    pub components: Vec<Poly>,
    pub p: Poly,
    pub noise: Poly,
    pub noise_norm: f64,
}

pub fn generate(params: &GenParams, noise_norm: f64, smoothing: Option<&Smoothing>) -> Result<Instance> {
    params.validate()?;
    if noise_norm < 0.0 {
        return Err(Error::Parameter("noise norm must be nonnegative".into()));
    }
    let mut comp_rng = stream_rng(params.seed, "components", 0);
    let count = monomial_count(params.n, params.comp_degree);
    let components: Vec<Poly> = match smoothing {
        None => (0..params.m)
            .map(|_| {
                Poly::new(
                    params.n,
                    params.comp_degree,
                    (0..count).map(|_| comp_rng.sample(StandardNormal)).collect(),
                )
                .expect("count matches")
            })
            .collect(),
        Some(s) => {
            if s.base.len() != params.m {
                return Err(Error::Parameter("smoothing base count != m".into()));
            }
            s.base
                .iter()
                .map(|b| {
                    if b.n() != params.n || b.degree() != params.comp_degree {
                        return Err(Error::MalformedInput("smoothing base has wrong shape".into()));
                    }
                    let mut p = b.clone();
                    for c in p.coeffs_mut() {
                        *c += s.rho * comp_rng.sample::<f64, _>(StandardNormal);
                    }
                    Ok(p)
                })
                .collect::<Result<_>>()?
        }
    };

    let degree = params.total_degree();
    let mut p = Poly::zero(params.n, degree);
    for a in &components {
        p = p.add(&a.pow(3 * params.power)?)?;
    }

    let mut noise = Poly::zero(params.n, degree);
    if noise_norm > 0.0 {
        let mut noise_rng = stream_rng(params.seed, "noise", 0);
        for c in noise.coeffs_mut() {
            *c = noise_rng.sample(StandardNormal);
        }
        let scale = noise_norm / noise.norm();
        for c in noise.coeffs_mut() {
            *c *= scale;
        }
        p = p.add(&noise)?;
    }

    Ok(Instance {
        params: *params,
        components,
        p,
        noise,
        noise_norm,
    })
}

impl Instance {
    /// Rebuild sum_t A_t^{3D} + E from the stored pieces and compare to P.
    pub fn rebuild_defect(&self) -> Result<f64> {
        let mut q = Poly::zero(self.params.n, self.params.total_degree());
        for a in &self.components {
            q = q.add(&a.pow(3 * self.params.power)?)?;
        }
        q = q.add(&self.noise)?;
        Ok(q.sub(&self.p)?.norm() / self.p.norm().max(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(n: usize, m: usize, k: usize, d: usize, seed: u64) -> GenParams {
        GenParams {
            n,
            m,
            comp_degree: k,
            power: d,
            seed,
        }
    }

    #[test]
    fn single_component_noiseless_is_exact_cube() {
        let inst = generate(&gp(5, 1, 2, 1, 3), 0.0, None).unwrap();
        let cube = inst.components[0].pow(3).unwrap();
        assert_eq!(inst.p, cube);
    }

    #[test]
    fn rebuild_invariant_over_seeds() {
        for seed in 0..20 {
            let inst = generate(&gp(6, 2, 2, 1, seed), 1e-6, None).unwrap();
            assert!(inst.rebuild_defect().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn noise_norm_is_respected() {
        let inst = generate(&gp(6, 2, 2, 1, 5), 1e-3, None).unwrap();
        assert!((inst.noise.norm() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate(&gp(6, 2, 2, 1, 11), 1e-9, None).unwrap();
        let b = generate(&gp(6, 2, 2, 1, 11), 1e-9, None).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.components, b.components);
    }

    #[test]
    fn smoothing_perturbs_at_rho_scale() {
        let ones = Poly::new(4, 2, vec![1.0; monomial_count(4, 2)]).unwrap();
        let smoothing = Smoothing {
            base: vec![ones.clone()],
            rho: 1e-3,
        };
        let inst = generate(&gp(4, 1, 2, 1, 9), 0.0, Some(&smoothing)).unwrap();
        for c in inst.components[0].coeffs() {
            let dev = (c - 1.0).abs();
            assert!(dev > 0.0 && dev < 1e-2, "deviation {:.3e}", dev);
        }
    }
}
