use super::lattice::LatticeVector;
use super::law::{JumpDistribution, JumpKernel, SiteLaw};
use crate::error::Result;
use crate::rng::mix64;

/// Countable two-dimensional mixture with infinite mean regeneration time.
///
/// Atoms p_i = α_i δ_{e2} + (1−α_i) δ_{e1} and q_i = α_i δ_{−e2} + (1−α_i) δ_{e1}
/// with α_i = 1 − 4^{−i}, i ≥ 1, each charged with weight 2^{−i−1}. A walk
/// started in a column escapes it at rate 4^{−i}, so E σ_1 = ∞.
///
/// Atom index encoding: `2 (i − 1) + t` with t = 0 for p_i and t = 1 for q_i.
#[derive(Clone, Copy, Debug, Default)]
pub struct SiInftyLaw;

impl SiInftyLaw {
    pub fn new() -> Self {
        Self
    }

    /// Escape probability 1 − α_i.
    pub fn escape_prob(i: u32) -> f64 {
        0.25f64.powi(i as i32)
    }

    pub fn decode(atom: usize) -> (u32, bool) {
        ((atom / 2 + 1) as u32, atom % 2 == 1)
    }

    pub fn jump_distribution(i: u32, down: bool) -> JumpDistribution {
        let e = Self::escape_prob(i);
        let vertical = LatticeVector::of(&[0, if down { -1 } else { 1 }]);
        JumpDistribution::new(vec![(LatticeVector::of(&[1, 0]), e), (vertical, 1.0 - e)])
            .expect("si-infty atom is a probability vector")
    }

    /// Finite site law over indices i ≤ i_max, renormalized; returns it with
    /// the truncated tail mass 2^{−i_max}.
    pub fn truncated(&self, i_max: u32) -> Result<(SiteLaw, f64)> {
        let tail = 0.5f64.powi(i_max as i32);
        let norm = 1.0 - tail;
        let mut atoms = Vec::new();
        for i in 1..=i_max {
            let w = 0.5f64.powi(i as i32 + 1) / norm;
            atoms.push((w, Self::jump_distribution(i, false)));
            atoms.push((w, Self::jump_distribution(i, true)));
        }
        Ok((SiteLaw::new(atoms)?, tail))
    }
}

impl JumpKernel for SiInftyLaw {
    fn dim(&self) -> usize {
        2
    }

    fn u_hat(&self) -> LatticeVector {
        LatticeVector::of(&[1, 0])
    }

    #[inline]
    fn atom_from_hash(&self, h: u64) -> usize {
        // P(trailing_zeros = i − 1) = 2^{−i}; the type bit comes from an
        // independent rehash.
        let i = h.trailing_zeros().min(62) as usize + 1;
        let t = (mix64(h) & 1) as usize;
        2 * (i - 1) + t
    }

    #[inline]
    fn jump(&self, atom: usize, u: f64) -> LatticeVector {
        let (i, down) = Self::decode(atom);
        if u < Self::escape_prob(i) {
            LatticeVector::of(&[1, 0])
        } else if down {
            LatticeVector::of(&[0, -1])
        } else {
            LatticeVector::of(&[0, 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_frequencies_follow_geometric_weights() {
        let law = SiInftyLaw::new();
        let n = 200_000u64;
        let mut counts = [0u64; 4];
        let mut down = 0u64;
        for k in 0..n {
            let a = law.atom_from_hash(mix64(k ^ 0xABCDEF));
            let (i, d) = SiInftyLaw::decode(a);
            if i <= 4 {
                counts[i as usize - 1] += 1;
            }
            down += d as u64;
        }
        for (i, c) in counts.iter().enumerate() {
            let p = 0.5f64.powi(i as i32 + 1);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se);
        }
        assert!((down as f64 / n as f64 - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn truncation_reports_tail() {
        let (site, tail) = SiInftyLaw::new().truncated(10).unwrap();
        assert_eq!(site.len(), 20);
        assert!((tail - 1.0 / 1024.0).abs() < 1e-15);
    }
}
