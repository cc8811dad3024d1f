//! Named laws used by the worked examples and the test suite.

use super::lattice::LatticeVector;
use super::law::{EnvironmentLaw, JumpDistribution, SiteLaw};
use super::spec::LawModel;
use super::SiInftyLaw;
use super::WindowEvent;

fn v(c: &[i64]) -> LatticeVector {
    LatticeVector::of(c)
}

fn jd(atoms: &[(&[i64], f64)]) -> JumpDistribution {
    JumpDistribution::new(atoms.iter().map(|(z, p)| (v(z), *p)).collect()).expect("preset jump distribution")
}

fn build(atoms: Vec<(f64, JumpDistribution)>, u_hat: &[i64]) -> EnvironmentLaw {
    EnvironmentLaw::new(SiteLaw::new(atoms).expect("preset site law"), v(u_hat)).expect("preset law")
}

/// Nearest-neighbour lazy law on Z: atom k moves right with probability `p_right[k]`.
pub fn lazy_nn_with(p_right: &[f64], weights: &[f64]) -> crate::error::Result<EnvironmentLaw> {
    let atoms = p_right
        .iter()
        .zip(weights)
        .map(|(&p, &w)| {
            let j = if p >= 1.0 {
                JumpDistribution::dirac(v(&[1]))
            } else {
                JumpDistribution::new(vec![(v(&[0]), 1.0 - p), (v(&[1]), p)])?
            };
            Ok((w, j))
        })
        .collect::<crate::error::Result<Vec<_>>>()?;
    EnvironmentLaw::new(SiteLaw::new(atoms)?, v(&[1]))
}

/// π_01 ∈ {1, ½} with equal probability.
pub fn lazy_nn() -> EnvironmentLaw {
    lazy_nn_with(&[1.0, 0.5], &[0.5, 0.5]).expect("lazy-nn preset")
}

/// π_01 = 1 − q, π_02 = q for each q in `qs`, equally weighted.
pub fn one_two_jump_with(qs: &[f64]) -> EnvironmentLaw {
    let w = 1.0 / qs.len() as f64;
    build(qs.iter().map(|&q| (w, jd(&[(&[1], 1.0 - q), (&[2], q)]))).collect(), &[1])
}

/// q ∈ {0.2, 0.6} with equal probability.
pub fn one_two_jump() -> EnvironmentLaw {
    one_two_jump_with(&[0.2, 0.6])
}

/// Two-dimensional law with atoms ½(δ(1,1)+δ(1,−1)), ½(δ(1,1)+δ(1,0)), ½(δ(1,−1)+δ(1,0)).
pub fn abscont() -> EnvironmentLaw {
    let t = 1.0 / 3.0;
    build(
        vec![
            (t, jd(&[(&[1, 1], 0.5), (&[1, -1], 0.5)])),
            (t, jd(&[(&[1, 1], 0.5), (&[1, 0], 0.5)])),
            (1.0 - 2.0 * t, jd(&[(&[1, -1], 0.5), (&[1, 0], 0.5)])),
        ],
        &[1, 0],
    )
}

/// The event {ω_(−1,0)=p_1, ω_(−1,1)=p_2, ω_(−1,−1)=p_3}, measurable at level 1.
pub fn abscont_event() -> WindowEvent {
    WindowEvent::new(
        vec![(v(&[-1, 0]), 0), (v(&[-1, 1]), 1), (v(&[-1, -1]), 2)],
        1,
        &v(&[1, 0]),
    )
    .expect("abscont event")
}

/// Homogeneous walk jumping to a or b with probability ½ each, û = (1,1).
pub fn two_jump_homogeneous() -> EnvironmentLaw {
    build(vec![(1.0, jd(&[(&[1, 0], 0.5), (&[0, 1], 0.5)]))], &[1, 1])
}

/// Deterministic walk with constant jump `z0`.
pub fn deterministic(z0: &[i64], u_hat: &[i64]) -> EnvironmentLaw {
    build(vec![(1.0, JumpDistribution::dirac(v(z0)))], u_hat)
}

/// Random environment with drift identically 1: atoms δ_1 and ½(δ_0+δ_2).
pub fn constant_drift() -> EnvironmentLaw {
    build(vec![(0.5, jd(&[(&[1], 1.0)])), (0.5, jd(&[(&[0], 0.5), (&[2], 0.5)]))], &[1])
}

/// Restricted-path law in Z^2: ½(δ_0+δ_(1,0)) or δ_(1,1), equally.
pub fn restricted_2d() -> EnvironmentLaw {
    build(
        vec![(0.5, jd(&[(&[0, 0], 0.5), (&[1, 0], 0.5)])), (0.5, jd(&[(&[1, 1], 1.0)]))],
        &[1, 0],
    )
}

/// Restricted-path law on Z with jumps of length 1 or 2 and random holding.
pub fn restricted_1d_two_lengths() -> EnvironmentLaw {
    build(
        vec![
            (0.3, jd(&[(&[0], 0.25), (&[1], 0.75)])),
            (0.2, jd(&[(&[2], 1.0)])),
            (0.5, jd(&[(&[0], 0.6), (&[2], 0.4)])),
        ],
        &[1],
    )
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "lazy-nn",
    "one-two-jump",
    "abscont",
    "si-infty",
    "two-jump-homogeneous",
    "constant-drift",
    "restricted-2d",
    "deterministic",
];

pub fn by_name(name: &str) -> Option<LawModel> {
    Some(match name {
        "lazy-nn" => LawModel::Finite(lazy_nn()),
        "one-two-jump" => LawModel::Finite(one_two_jump()),
        "abscont" => LawModel::Finite(abscont()),
        "si-infty" => LawModel::SiInfty(SiInftyLaw::new()),
        "two-jump-homogeneous" => LawModel::Finite(two_jump_homogeneous()),
        "constant-drift" => LawModel::Finite(constant_drift()),
        "restricted-2d" => LawModel::Finite(restricted_2d()),
        "deterministic" => LawModel::Finite(deterministic(&[1], &[1])),
        _ => return None,
    })
}
