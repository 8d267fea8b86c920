//! Stable JSON file formats exchanged by the CLI.
//!
//! A polynomial record is {"n", "degree", "coeffs"} with coefficients in
//! canonical monomial-rank order; floats round-trip exactly (shortest
//! round-trip decimal). Every parser here is total: arbitrary input bytes
//! produce an error, never a panic, since these files cross trust
//! boundaries.

use super::instance::{GenParams, Instance};
use crate::error::{Error, Result};
use crate::polyring::{Poly, MAX_DEGREE};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyRecord {
    pub n: usize,
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl PolyRecord {
    pub fn from_poly(p: &Poly) -> Self {
        PolyRecord {
            n: p.n(),
            degree: p.degree(),
            coeffs: p.coeffs().to_vec(),
        }
    }

    pub fn into_poly(self) -> Result<Poly> {
        if self.n > 64 {
            return Err(Error::MalformedInput(format!(
                "variable count {} above supported range",
                self.n
            )));
        }
        if self.degree > MAX_DEGREE {
            return Err(Error::Capacity {
                requested: self.degree,
                cap: MAX_DEGREE,
            });
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedInput("non-finite coefficient".into()));
        }
        Poly::new(self.n, self.degree, self.coeffs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub params: GenParams,
    #[serde(rename = "P")]
    pub p: PolyRecord,
    pub components: Vec<PolyRecord>,
    pub noise_norm: f64,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            params: inst.params,
            p: PolyRecord::from_poly(&inst.p),
            components: inst.components.iter().map(PolyRecord::from_poly).collect(),
            noise_norm: inst.noise_norm,
        }
    }
}

/// Validated view of a parsed instance file.
pub struct ParsedInstance {
    pub params: GenParams,
    pub p: Poly,
    pub components: Vec<Poly>,
    pub noise_norm: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentsFile {
    pub components: Vec<PolyRecord>,
    pub sign_ambiguous: bool,
    pub diagnostics: serde_json::Value,
}

pub fn parse_poly_json(bytes: &[u8]) -> Result<Poly> {
    let record: PolyRecord = serde_json::from_slice(bytes)?;
    record.into_poly()
}

pub fn parse_instance_json(bytes: &[u8]) -> Result<ParsedInstance> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    file.params.validate()?;
    let p = file.p.into_poly()?;
    if p.n() != file.params.n || p.degree() != file.params.total_degree() {
        return Err(Error::MalformedInput(
            "P record inconsistent with instance parameters".into(),
        ));
    }
    let components: Vec<Poly> = file
        .components
        .into_iter()
        .map(|r| {
            let c = r.into_poly()?;
            if c.n() != file.params.n || c.degree() != file.params.comp_degree {
                return Err(Error::MalformedInput(
                    "component record inconsistent with instance parameters".into(),
                ));
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    if !components.is_empty() && components.len() != file.params.m {
        return Err(Error::MalformedInput(format!(
            "instance declares m = {} but carries {} components",
            file.params.m,
            components.len()
        )));
    }
    if !(file.noise_norm.is_finite() && file.noise_norm >= 0.0) {
        return Err(Error::MalformedInput("invalid noise norm".into()));
    }
    Ok(ParsedInstance {
        params: file.params,
        p,
        components,
        noise_norm: file.noise_norm,
    })
}

pub fn parse_components_json(bytes: &[u8]) -> Result<(Vec<Poly>, bool, serde_json::Value)> {
    let file: ComponentsFile = serde_json::from_slice(bytes)?;
    let components: Vec<Poly> = file
        .components
        .into_iter()
        .map(PolyRecord::into_poly)
        .collect::<Result<_>>()?;
    if components.is_empty() {
        return Err(Error::MalformedInput("components file carries no components".into()));
    }
    let (n, d) = (components[0].n(), components[0].degree());
    if components.iter().any(|c| c.n() != n || c.degree() != d) {
        return Err(Error::MalformedInput("components have inconsistent shapes".into()));
    }
    Ok((components, file.sign_ambiguous, file.diagnostics))
}

/// Families serialize as a plain list of index lists.
pub fn parse_family_json(bytes: &[u8]) -> Result<Vec<Vec<usize>>> {
    let family: Vec<Vec<usize>> = serde_json::from_slice(bytes)?;
    for member in &family {
        if member.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedInput(
                "family member indices must be strictly increasing".into(),
            ));
        }
        if member.iter().any(|&v| v > 64) {
            return Err(Error::MalformedInput("family member index out of range".into()));
        }
    }
    Ok(family)
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}
