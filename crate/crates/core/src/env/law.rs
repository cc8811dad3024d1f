use serde::{Deserialize, Serialize};

use super::hypotheses::{nonnestling_delta, validate_forbidden_direction};
use super::lattice::LatticeVector;
use crate::error::{Result, RwreError};
use crate::rng::unit_f64;

/// Tolerance on total probability mass.
pub const PROB_TOL: f64 = 1e-12;

/// A finitely supported probability vector on jumps z (one realized ω_x).
///
/// Atoms are stored in lexicographic order of z, which fixes the inverse-CDF
/// sampling order independently of input order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(LatticeVector, f64)>", into = "Vec<(LatticeVector, f64)>")]
pub struct JumpDistribution {
    atoms: Vec<(LatticeVector, f64)>,
    cumulative: Vec<f64>,
}

impl JumpDistribution {
    pub fn new(mut atoms: Vec<(LatticeVector, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(RwreError::InvalidLaw("jump distribution has no atoms".into()));
        }
        let dim = atoms[0].0.dim();
        let mut total = 0.0;
        for (z, p) in &atoms {
            if z.dim() != dim {
                return Err(RwreError::DimensionMismatch { expected: dim, got: z.dim() });
            }
            if !p.is_finite() || *p < 0.0 {
                return Err(RwreError::InvalidLaw(format!("negative or non-finite probability {p} at {z}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(RwreError::InvalidLaw(format!(
                "jump probabilities sum to {total:.15}, not 1"
            )));
        }
        atoms.sort_by_key(|a| a.0);
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(RwreError::InvalidLaw("duplicate jump in support".into()));
        }
        atoms.retain(|(_, p)| *p > 0.0);
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { atoms, cumulative })
    }

    /// Point mass at `z`.
    pub fn dirac(z: LatticeVector) -> Self {
        Self::new(vec![(z, 1.0)]).expect("dirac mass is valid")
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.dim()
    }

    /// Support points with positive mass, in canonical order.
    pub fn atoms(&self) -> &[(LatticeVector, f64)] {
        &self.atoms
    }

    pub fn prob(&self, z: &LatticeVector) -> f64 {
        match self.atoms.binary_search_by(|a| a.0.cmp(z)) {
            Ok(i) => self.atoms[i].1,
            Err(_) => 0.0,
        }
    }

    /// π_00, the holding probability.
    pub fn holding(&self) -> f64 {
        self.prob(&LatticeVector::zero(self.dim()))
    }

    /// Local drift Σ z π_0z.
    pub fn drift(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for (z, p) in &self.atoms {
            for (k, c) in z.coords().iter().enumerate() {
                d[k] += *c as f64 * p;
            }
        }
        d
    }

    /// Σ |z|^p π_0z with the l1 norm.
    pub fn abs_moment(&self, p: f64) -> f64 {
        self.atoms.iter().map(|(z, q)| (z.norm1() as f64).powf(p) * q).sum()
    }

    /// Inverse-CDF sample from a uniform `u` in [0, 1).
    #[inline]
    pub fn sample(&self, u: f64) -> LatticeVector {
        for (i, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return self.atoms[i].0;
            }
        }
        self.atoms[self.atoms.len() - 1].0
    }
}

impl TryFrom<Vec<(LatticeVector, f64)>> for JumpDistribution {
    type Error = RwreError;
    fn try_from(v: Vec<(LatticeVector, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<JumpDistribution> for Vec<(LatticeVector, f64)> {
    fn from(j: JumpDistribution) -> Self {
        j.atoms
    }
}

/// The one-site marginal of the product law: a finite mixture of jump
/// distributions. Atom indices are positions in the input list.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteLaw {
    atoms: Vec<(f64, JumpDistribution)>,
    cumulative: Vec<f64>,
}

impl SiteLaw {
    pub fn new(atoms: Vec<(f64, JumpDistribution)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(RwreError::InvalidLaw("site law has no atoms".into()));
        }
        let dim = atoms[0].1.dim();
        let mut total = 0.0;
        for (w, jd) in &atoms {
            if jd.dim() != dim {
                return Err(RwreError::DimensionMismatch { expected: dim, got: jd.dim() });
            }
            if !w.is_finite() || *w < 0.0 {
                return Err(RwreError::InvalidLaw(format!("negative or non-finite weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(RwreError::InvalidLaw(format!("site weights sum to {total:.15}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|(w, _)| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self { atoms, cumulative })
    }

    /// Equally weighted mixture.
    pub fn uniform(jds: Vec<JumpDistribution>) -> Result<Self> {
        let w = 1.0 / jds.len().max(1) as f64;
        Self::new(jds.into_iter().map(|j| (w, j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].1.dim()
    }

    pub fn atoms(&self) -> &[(f64, JumpDistribution)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms that carry positive weight, i.e. occur almost surely.
    pub fn charged(&self) -> impl Iterator<Item = (usize, f64, &JumpDistribution)> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, (w, _))| *w > 0.0)
            .map(|(i, (w, jd))| (i, *w, jd))
    }

    #[inline]
    pub fn atom_index(&self, u: f64) -> usize {
        for (i, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return i;
            }
        }
        self.atoms.len() - 1
    }

    /// 𝔼 π_0z for every z in the support of some charged atom.
    pub fn mean_kernel(&self) -> Vec<(LatticeVector, f64)> {
        let mut acc: std::collections::BTreeMap<LatticeVector, f64> = Default::default();
        for (_, w, jd) in self.charged() {
            for (z, p) in jd.atoms() {
                *acc.entry(*z).or_insert(0.0) += w * p;
            }
        }
        acc.into_iter().collect()
    }
}

/// Access to a site kernel through a hash word: the contract that lets walks
/// and environments work for finite laws and for parametric countable laws.
pub trait JumpKernel: Sync {
    fn dim(&self) -> usize;
    fn u_hat(&self) -> LatticeVector;
    /// Atom index realized at a site whose hash word is `h`.
    fn atom_from_hash(&self, h: u64) -> usize;
    /// Jump drawn from atom `atom` with uniform `u`.
    fn jump(&self, atom: usize, u: f64) -> LatticeVector;
}

/// One atom of a one-dimensional law seen as a vector indexed by jump length.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimAtom {
    pub weight: f64,
    /// π_{0,y} for y = 0..=R.
    pub pi: Vec<f64>,
    /// Jump law conditioned on moving: π_{0,y}/(1−π_00), with r[0] = 0.
    pub r: Vec<f64>,
    /// ρ = 1/(1−π_00).
    pub rho: f64,
    pub drift: f64,
}

/// Dense view of a one-dimensional law with û = +1, used by the exact paths.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimLaw {
    /// Largest jump R.
    pub max_jump: usize,
    pub atoms: Vec<OneDimAtom>,
}

impl OneDimLaw {
    fn from_site_law(site: &SiteLaw) -> Self {
        let max_jump = site
            .atoms()
            .iter()
            .flat_map(|(_, jd)| jd.atoms().iter().map(|(z, _)| z.get(0)))
            .max()
            .unwrap_or(0)
            .max(1) as usize;
        let atoms = site
            .atoms()
            .iter()
            .map(|(w, jd)| {
                let mut pi = vec![0.0; max_jump + 1];
                for (z, p) in jd.atoms() {
                    pi[z.get(0) as usize] = *p;
                }
                let rho = 1.0 / (1.0 - pi[0]);
                let mut r: Vec<f64> = pi.iter().map(|p| p * rho).collect();
                r[0] = 0.0;
                let drift = pi.iter().enumerate().map(|(y, p)| y as f64 * p).sum();
                OneDimAtom { weight: *w, pi, r, rho, drift }
            })
            .collect();
        Self { max_jump, atoms }
    }

    fn charged(&self) -> impl Iterator<Item = &OneDimAtom> {
        self.atoms.iter().filter(|a| a.weight > 0.0)
    }

    /// 𝔼ρ = E_0 σ_1 for unit threshold.
    pub fn mean_rho(&self) -> f64 {
        self.charged().map(|a| a.weight * a.rho).sum()
    }

    /// 𝔼 D.
    pub fn mean_drift(&self) -> f64 {
        self.charged().map(|a| a.weight * a.drift).sum()
    }

    /// Exact velocity 𝔼[Dρ]/𝔼ρ.
    pub fn velocity(&self) -> f64 {
        self.charged().map(|a| a.weight * a.drift * a.rho).sum::<f64>() / self.mean_rho()
    }

    /// 𝔼_∞ of an atom functional via the density ρ/𝔼ρ.
    pub fn pinfty_expect(&self, f: impl Fn(&OneDimAtom) -> f64) -> f64 {
        self.charged().map(|a| a.weight * a.rho * f(a)).sum::<f64>() / self.mean_rho()
    }

    /// Whether the drift is almost surely equal to the velocity.
    pub fn drift_is_constant(&self) -> bool {
        let v = self.velocity();
        self.charged().all(|a| (a.drift - v).abs() <= 1e-12 * (1.0 + v.abs()))
    }
}

/// A validated product law: site marginal plus direction û, satisfying the
/// forbidden-direction and non-nestling conditions.
#[derive(Clone, Debug)]
pub struct EnvironmentLaw {
    site_law: SiteLaw,
    u_hat: LatticeVector,
    delta: f64,
    one_dim: Option<OneDimLaw>,
}

impl EnvironmentLaw {
    pub fn new(site_law: SiteLaw, u_hat: LatticeVector) -> Result<Self> {
        if u_hat.is_zero() {
            return Err(RwreError::InvalidLaw("u_hat must be nonzero".into()));
        }
        if u_hat.dim() != site_law.dim() {
            return Err(RwreError::DimensionMismatch { expected: site_law.dim(), got: u_hat.dim() });
        }
        let report = validate_forbidden_direction(&site_law, &u_hat);
        if !report.ok {
            return Err(RwreError::Hypothesis(format!(
                "forbidden direction violated by atoms {:?}",
                report.violating_atoms
            )));
        }
        let delta = nonnestling_delta(&site_law, &u_hat);
        if delta <= 0.0 {
            return Err(RwreError::Hypothesis(format!("non-nestling fails: delta = {delta}")));
        }
        let one_dim = (site_law.dim() == 1 && u_hat.get(0) > 0).then(|| OneDimLaw::from_site_law(&site_law));
        Ok(Self { site_law, u_hat, delta, one_dim })
    }

    pub fn site_law(&self) -> &SiteLaw {
        &self.site_law
    }

    pub fn dim(&self) -> usize {
        self.site_law.dim()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// M for Hypothesis (M) at order p.
    pub fn moment_m(&self, p: f64) -> f64 {
        super::hypotheses::moment_bound(&self.site_law, p)
    }

    /// Dense one-dimensional view; `NotOneDimensional` otherwise.
    pub fn one_dim(&self) -> Result<&OneDimLaw> {
        self.one_dim.as_ref().ok_or(RwreError::NotOneDimensional)
    }

    /// Largest projection z·û over the support.
    pub fn max_step_projection(&self) -> i64 {
        self.site_law
            .atoms()
            .iter()
            .flat_map(|(_, jd)| jd.atoms().iter().map(|(z, _)| z.dot(&self.u_hat)))
            .max()
            .unwrap_or(0)
    }
}

impl JumpKernel for EnvironmentLaw {
    fn dim(&self) -> usize {
        self.site_law.dim()
    }

    fn u_hat(&self) -> LatticeVector {
        self.u_hat
    }

    #[inline]
    fn atom_from_hash(&self, h: u64) -> usize {
        self.site_law.atom_index(unit_f64(h))
    }

    #[inline]
    fn jump(&self, atom: usize, u: f64) -> LatticeVector {
        self.site_law.atoms[atom].1.sample(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::of(c)
    }

    #[test]
    fn jump_distribution_normalization() {
        assert!(JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[1]), 0.5)]).is_ok());
        assert!(JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[1]), 0.5 + 1e-9)]).is_err());
        assert!(JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[0]), 0.5)]).is_err());
        assert!(JumpDistribution::new(vec![(v(&[0]), -0.5), (v(&[1]), 1.5)]).is_err());
    }

    #[test]
    fn canonical_order_and_sampling() {
        let jd = JumpDistribution::new(vec![(v(&[2]), 0.25), (v(&[0]), 0.5), (v(&[1]), 0.25)]).unwrap();
        assert_eq!(jd.atoms()[0].0, v(&[0]));
        assert_eq!(jd.sample(0.1), v(&[0]));
        assert_eq!(jd.sample(0.6), v(&[1]));
        assert_eq!(jd.sample(0.9), v(&[2]));
        assert_eq!(jd.holding(), 0.5);
        assert!((jd.drift()[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_backward_jump_and_zero_drift() {
        let back = SiteLaw::uniform(vec![JumpDistribution::dirac(v(&[-1, 0]))]).unwrap();
        assert!(EnvironmentLaw::new(back, v(&[1, 0])).is_err());
        let lazy = SiteLaw::uniform(vec![JumpDistribution::dirac(v(&[0]))]).unwrap();
        assert!(EnvironmentLaw::new(lazy, v(&[1])).is_err());
    }

    #[test]
    fn one_dim_view_of_lazy_law() {
        let site = SiteLaw::uniform(vec![
            JumpDistribution::dirac(v(&[1])),
            JumpDistribution::new(vec![(v(&[0]), 0.5), (v(&[1]), 0.5)]).unwrap(),
        ])
        .unwrap();
        let law = EnvironmentLaw::new(site, v(&[1])).unwrap();
        let od = law.one_dim().unwrap();
        assert!((od.mean_rho() - 1.5).abs() < 1e-15);
        assert!((od.velocity() - 2.0 / 3.0).abs() < 1e-15);
        assert!(!od.drift_is_constant());
    }
}
