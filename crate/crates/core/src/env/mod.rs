//! Environment laws, seeded realizations, and the model hypotheses.

mod hypotheses;
mod lattice;
mod law;
pub mod presets;
mod si_infty;
mod spec;

pub use hypotheses::{
    check_hypothesis_e, moment_bound, nonnestling_delta, validate_forbidden_direction,
    ForbiddenDirectionReport, HypothesisEReport,
};
pub use lattice::{LatticeVector, MAX_DIM};
pub use law::{
    EnvironmentLaw, JumpDistribution, JumpKernel, OneDimAtom, OneDimLaw, SiteLaw, PROB_TOL,
};
pub use si_infty::SiInftyLaw;
pub use spec::{AtomSpec, JumpSpec, LawModel, LawSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Result, RwreError};
use crate::rng::site_hash;

/// A realized environment ω. Nothing is stored: the atom at a site is a pure
/// function of `(seed, x + offset)`, and the offset implements the shift T_z.
#[derive(Debug)]
pub struct Environment<'a, K: ?Sized = EnvironmentLaw> {
    law: &'a K,
    seed: u64,
    offset: LatticeVector,
}

impl<K: ?Sized> Clone for Environment<'_, K> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<K: ?Sized> Copy for Environment<'_, K> {}

impl<'a, K: JumpKernel + ?Sized> Environment<'a, K> {
    pub fn new(law: &'a K, seed: u64) -> Self {
        Self { law, seed, offset: LatticeVector::zero(law.dim()) }
    }

    pub fn law(&self) -> &'a K {
        self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// T_z ω: site x of the result is site x + z of `self`.
    pub fn shifted(&self, z: &LatticeVector) -> Self {
        Self { law: self.law, seed: self.seed, offset: self.offset + *z }
    }

    /// Index of the atom realized at `x`.
    #[inline]
    pub fn site_atom(&self, x: &LatticeVector) -> usize {
        self.law.atom_from_hash(site_hash(self.seed, &(*x + self.offset)))
    }

    #[inline]
    pub fn site_atom_1d(&self, x: i64) -> usize {
        self.site_atom(&LatticeVector::from_1d(x))
    }

    /// One jump from `x` driven by the uniform `u`.
    #[inline]
    pub fn step(&self, x: &LatticeVector, u: f64) -> LatticeVector {
        self.law.jump(self.site_atom(x), u)
    }
}

impl<'a> Environment<'a, EnvironmentLaw> {
    /// ω_x as a jump distribution.
    pub fn site_env(&self, x: &LatticeVector) -> &'a JumpDistribution {
        &self.law.site_law().atoms()[self.site_atom(x)].1
    }
}

/// A cylinder event {ω_x = atom i for each constraint}, 𝔖_{−k}-measurable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowEvent {
    pub constraints: Vec<(LatticeVector, usize)>,
    pub level: i64,
}

impl WindowEvent {
    pub fn new(constraints: Vec<(LatticeVector, usize)>, level: i64, u_hat: &LatticeVector) -> Result<Self> {
        for (x, _) in &constraints {
            if x.dim() != u_hat.dim() {
                return Err(RwreError::DimensionMismatch { expected: u_hat.dim(), got: x.dim() });
            }
            if x.dot(u_hat) < -level {
                return Err(RwreError::InvalidParameter(format!(
                    "site {x} lies below level -{level} in direction u_hat"
                )));
            }
        }
        Ok(Self { constraints, level })
    }

    /// The trivial event.
    pub fn full() -> Self {
        Self { constraints: Vec::new(), level: 0 }
    }
}

/// 1{T_base ω ∈ A}.
pub fn event_holds<K: JumpKernel + ?Sized>(env: &Environment<'_, K>, ev: &WindowEvent, base: &LatticeVector) -> bool {
    ev.constraints.iter().all(|(x, i)| env.site_atom(&(*base + *x)) == *i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::mix64;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::of(c)
    }

    #[test]
    fn site_env_is_pure_and_shift_consistent() {
        let law = presets::one_two_jump();
        let env = Environment::new(&law, 17);
        for k in 0..10_000u64 {
            let x = v(&[(mix64(k) % 2001) as i64 - 1000]);
            assert_eq!(env.site_atom(&x), env.site_atom(&x));
            let z = v(&[(k % 13) as i64 - 6]);
            assert_eq!(env.shifted(&z).site_atom(&x), env.site_atom(&(x + z)));
        }
    }

    #[test]
    fn atom_frequency_matches_weight() {
        let third = 1.0 / 3.0;
        let site = SiteLaw::new(vec![
            (third, JumpDistribution::dirac(v(&[1]))),
            (1.0 - third, JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[1]), 0.5)]).unwrap()),
        ])
        .unwrap();
        let law = EnvironmentLaw::new(site, v(&[1])).unwrap();
        let env = Environment::new(&law, 3);
        let n = 1_000_000;
        let hits = (0..n).filter(|&x| env.site_atom_1d(x) == 0).count() as f64;
        let se = (third * (1.0 - third) / n as f64).sqrt();
        assert!((hits / n as f64 - third).abs() < 3.0 * se);
    }

    #[test]
    fn neighbouring_sites_uncorrelated_across_seeds() {
        let law = presets::lazy_nn();
        let n = 100_000u64;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for s in 0..n {
            let env = Environment::new(&law, s);
            let a = env.site_atom_1d(0) as f64;
            let b = env.site_atom_1d(1) as f64;
            sa += a;
            sb += b;
            sab += a * b;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        // atom indicators have variance 1/4, so corr = 4 cov and se(corr) ≈ 1/sqrt(n)
        assert!((4.0 * cov).abs() < 4.0 / nf.sqrt());
    }

    #[test]
    fn events() {
        let law = presets::abscont();
        let env = Environment::new(&law, 5);
        let empty = WindowEvent::full();
        assert!(event_holds(&env, &empty, &v(&[0, 0])));
        let contra = WindowEvent::new(vec![(v(&[0, 0]), 0), (v(&[0, 0]), 1)], 0, &v(&[1, 0])).unwrap();
        for s in 0..100 {
            assert!(!event_holds(&Environment::new(&law, s), &contra, &v(&[0, 0])));
        }
        assert!(WindowEvent::new(vec![(v(&[-2, 0]), 0)], 1, &v(&[1, 0])).is_err());
    }
}
