use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::lattice::LatticeVector;
use super::law::SiteLaw;
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenDirectionReport {
    pub ok: bool,
    /// Indices of atoms that charge some z with z·û < 0.
    pub violating_atoms: Vec<usize>,
    /// The offending jumps, one per violating atom (first in canonical order).
    pub violating_jumps: Vec<LatticeVector>,
}

/// Checks that every atom puts all its mass on {z : z·û ≥ 0}.
pub fn validate_forbidden_direction(site: &SiteLaw, u_hat: &LatticeVector) -> ForbiddenDirectionReport {
    let mut violating_atoms = Vec::new();
    let mut violating_jumps = Vec::new();
    for (i, (_, jd)) in site.atoms().iter().enumerate() {
        if let Some((z, _)) = jd.atoms().iter().find(|(z, _)| z.dot(u_hat) < 0) {
            violating_atoms.push(i);
            violating_jumps.push(*z);
        }
    }
    ForbiddenDirectionReport { ok: violating_atoms.is_empty(), violating_atoms, violating_jumps }
}

/// δ = min over charged atoms of Σ_z (z·û) π_0z.
pub fn nonnestling_delta(site: &SiteLaw, u_hat: &LatticeVector) -> f64 {
    site.charged()
        .map(|(_, _, jd)| jd.atoms().iter().map(|(z, p)| z.dot(u_hat) as f64 * p).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// M = max over charged atoms of (Σ |z|^p π_0z)^{1/p}.
pub fn moment_bound(site: &SiteLaw, p: f64) -> f64 {
    assert!(p >= 1.0, "moment order must be at least 1");
    site.charged().map(|(_, _, jd)| jd.abs_moment(p).powf(1.0 / p)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEReport {
    /// Every charged atom is supported on {0, z} for a single z ≠ 0.
    pub restricted_path: bool,
    pub span_dim: usize,
    /// 𝒥 = {y : 𝔼 π_0y > 0}.
    pub j_set: Vec<LatticeVector>,
    pub holds: bool,
}

fn is_restricted_atom(jd: &super::law::JumpDistribution) -> bool {
    jd.atoms().iter().filter(|(z, _)| !z.is_zero()).count() == 1
}

pub fn check_hypothesis_e(site: &SiteLaw) -> HypothesisEReport {
    let restricted_path = site.charged().all(|(_, _, jd)| is_restricted_atom(jd));
    let some_unrestricted = site.charged().any(|(_, _, jd)| !is_restricted_atom(jd));
    let j: BTreeSet<LatticeVector> = site.mean_kernel().into_iter().map(|(z, _)| z).collect();
    let rows: Vec<Vec<i64>> = j.iter().map(|z| z.coords().to_vec()).collect();
    let span_dim = linalg::rank(&rows, site.dim());
    HypothesisEReport {
        restricted_path,
        span_dim,
        j_set: j.into_iter().collect(),
        holds: some_unrestricted && span_dim >= 2,
    }
}

#[cfg(test)]
mod tests {
    use super::super::law::JumpDistribution;
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::of(c)
    }

    #[test]
    fn backward_jump_is_reported() {
        let site = SiteLaw::uniform(vec![
            JumpDistribution::dirac(v(&[1, 0])),
            JumpDistribution::new(vec![(v(&[-1, 0]), 0.5), (v(&[1, 1]), 0.5)]).unwrap(),
        ])
        .unwrap();
        let r = validate_forbidden_direction(&site, &v(&[1, 0]));
        assert!(!r.ok);
        assert_eq!(r.violating_atoms, vec![1]);
        assert_eq!(r.violating_jumps, vec![v(&[-1, 0])]);
    }

    #[test]
    fn delta_and_moment_examples() {
        let site = SiteLaw::uniform(vec![
            JumpDistribution::dirac(v(&[1])),
            JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[1]), 0.5)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(nonnestling_delta(&site, &v(&[1])), 0.5);
        assert!(moment_bound(&site, 3.0) <= 1.0);
        let zero = SiteLaw::uniform(vec![JumpDistribution::dirac(v(&[0]))]).unwrap();
        assert_eq!(nonnestling_delta(&zero, &v(&[1])), 0.0);
        let two = SiteLaw::uniform(vec![
            JumpDistribution::new(vec![(v(&[2, 0]), 0.5), (v(&[0, 0]), 0.5)]).unwrap(),
        ])
        .unwrap();
        assert!((moment_bound(&two, 1.0) - 1.0).abs() < 1e-15);
        let si = SiteLaw::uniform(vec![
            JumpDistribution::new(vec![(v(&[1, 0]), 0.5), (v(&[0, 1]), 0.5)]).unwrap(),
            JumpDistribution::new(vec![(v(&[1, 0]), 0.5), (v(&[0, -1]), 0.5)]).unwrap(),
        ])
        .unwrap();
        assert!((moment_bound(&si, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_e_examples() {
        let single = SiteLaw::uniform(vec![JumpDistribution::dirac(v(&[1, 1]))]).unwrap();
        let r = check_hypothesis_e(&single);
        assert!(r.restricted_path);
        assert_eq!(r.span_dim, 1);
        assert!(!r.holds);
    }
}
