use serde::{Deserialize, Serialize};

use super::lattice::LatticeVector;
use super::law::{EnvironmentLaw, JumpDistribution, JumpKernel, SiteLaw};
use super::presets;
use super::si_infty::SiInftyLaw;
use crate::error::{Result, RwreError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSpec {
    pub z: Vec<i64>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub weight: f64,
    pub jumps: Vec<JumpSpec>,
}

/// JSON description of a law: either explicit atoms or a named family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LawSpec {
    Explicit { dim: usize, u_hat: Vec<i64>, atoms: Vec<AtomSpec> },
    Family {
        family: String,
        #[serde(default)]
        params: serde_json::Value,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LazyNnParams {
    #[serde(default = "default_p_right")]
    p_right: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

fn default_p_right() -> Vec<f64> {
    vec![1.0, 0.5]
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SiInftyParams {
    #[serde(default)]
    i_max: Option<u32>,
}

/// A law ready for simulation: finite and validated, or the countable si-infty mixture.
#[derive(Clone, Debug)]
pub enum LawModel {
    Finite(EnvironmentLaw),
    SiInfty(SiInftyLaw),
}

impl LawModel {
    pub fn finite(&self) -> Result<&EnvironmentLaw> {
        match self {
            LawModel::Finite(l) => Ok(l),
            LawModel::SiInfty(_) => Err(RwreError::InvalidLaw(
                "operation needs a finite-support law; the si-infty family is simulation-only".into(),
            )),
        }
    }

    pub fn kernel(&self) -> &dyn JumpKernel {
        match self {
            LawModel::Finite(l) => l,
            LawModel::SiInfty(l) => l,
        }
    }
}

impl LawSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Site law and direction without hypothesis checks, so that invalid
    /// laws can still be inspected.
    pub fn raw(&self) -> Result<(SiteLaw, LatticeVector)> {
        match self {
            LawSpec::Explicit { dim, u_hat, atoms } => {
                if u_hat.len() != *dim {
                    return Err(RwreError::DimensionMismatch { expected: *dim, got: u_hat.len() });
                }
                let site_atoms = atoms
                    .iter()
                    .map(|a| {
                        let jumps = a
                            .jumps
                            .iter()
                            .map(|j| {
                                if j.z.len() != *dim {
                                    return Err(RwreError::DimensionMismatch { expected: *dim, got: j.z.len() });
                                }
                                Ok((LatticeVector::new(&j.z)?, j.p))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((a.weight, JumpDistribution::new(jumps)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((SiteLaw::new(site_atoms)?, LatticeVector::new(u_hat)?))
            }
            LawSpec::Family { family, params } => match family.as_str() {
                "lazy-nn" => {
                    let p: LazyNnParams = parse_params(params)?;
                    let weights = p.weights.unwrap_or_else(|| vec![1.0 / p.p_right.len() as f64; p.p_right.len()]);
                    if weights.len() != p.p_right.len() {
                        return Err(RwreError::InvalidParameter("weights and p_right differ in length".into()));
                    }
                    let atoms = p
                        .p_right
                        .iter()
                        .zip(&weights)
                        .map(|(&q, &w)| {
                            let jd = JumpDistribution::new(vec![
                                (LatticeVector::from_1d(0), 1.0 - q),
                                (LatticeVector::from_1d(1), q),
                            ])?;
                            Ok((w, jd))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((SiteLaw::new(atoms)?, LatticeVector::from_1d(1)))
                }
                "si-infty-example" => {
                    let p: SiInftyParams = parse_params(params)?;
                    let i_max = p.i_max.ok_or_else(|| {
                        RwreError::InvalidParameter("si-infty-example has no finite site law without i_max".into())
                    })?;
                    Ok((SiInftyLaw::new().truncated(i_max)?.0, LatticeVector::of(&[1, 0])))
                }
                other => Err(RwreError::InvalidLaw(format!("unknown family '{other}'"))),
            },
        }
    }

    pub fn build(&self) -> Result<LawModel> {
        if let LawSpec::Family { family, params } = self {
            if family == "si-infty-example" {
                let p: SiInftyParams = parse_params(params)?;
                if p.i_max.is_none() {
                    return Ok(LawModel::SiInfty(SiInftyLaw::new()));
                }
            }
        }
        let (site, u_hat) = self.raw()?;
        Ok(LawModel::Finite(EnvironmentLaw::new(site, u_hat)?))
    }

    /// A preset name given in place of a JSON document.
    pub fn preset(name: &str) -> Result<LawModel> {
        presets::by_name(name).ok_or_else(|| RwreError::InvalidLaw(format!("unknown preset '{name}'")))
    }
}

fn parse_params<T: serde::de::DeserializeOwned + Default>(v: &serde_json::Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    Ok(serde_json::from_value(v.clone())?)
}

impl Default for LazyNnParams {
    fn default() -> Self {
        Self { p_right: default_p_right(), weights: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_law_round_trip() {
        let s = r#"{"dim": 1, "u_hat": [1], "atoms": [
            {"weight": 0.5, "jumps": [{"z": [1], "p": 1.0}]},
            {"weight": 0.5, "jumps": [{"z": [0], "p": 0.5}, {"z": [1], "p": 0.5}]}]}"#;
        let spec = LawSpec::from_json(s).unwrap();
        let law = spec.build().unwrap();
        let v = law.finite().unwrap().one_dim().unwrap().velocity();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(LawSpec::from_json(&back).unwrap(), spec);
    }

    #[test]
    fn families() {
        let lazy = LawSpec::from_json(r#"{"family": "lazy-nn", "params": {}}"#).unwrap();
        let v = lazy.build().unwrap().finite().unwrap().one_dim().unwrap().velocity();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let si = LawSpec::from_json(r#"{"family": "si-infty-example"}"#).unwrap();
        assert!(matches!(si.build().unwrap(), LawModel::SiInfty(_)));
        let si5 = LawSpec::from_json(r#"{"family": "si-infty-example", "params": {"i_max": 5}}"#).unwrap();
        assert!(matches!(si5.build().unwrap(), LawModel::Finite(_)));
        assert!(LawSpec::from_json(r#"{"family": "nope"}"#).unwrap().build().is_err());
    }

    #[test]
    fn backward_jump_rejected_but_inspectable() {
        let s = r#"{"dim": 2, "u_hat": [1, 0], "atoms": [
            {"weight": 1.0, "jumps": [{"z": [-1, 0], "p": 0.5}, {"z": [1, 0], "p": 0.5}]}]}"#;
        let spec = LawSpec::from_json(s).unwrap();
        assert!(spec.build().is_err());
        assert!(spec.raw().is_ok());
    }
}
