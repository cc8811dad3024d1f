//! Quenched and annealed walk simulation and regeneration blocks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Environment, JumpKernel, LatticeVector};
use crate::error::{Result, RwreError};
use crate::rng::{derive_seed, tags, walk_rng};

/// Default per-block step cap.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub start: LatticeVector,
    pub steps: Vec<LatticeVector>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// X_0, X_1, …, X_n.
    pub fn positions(&self) -> impl Iterator<Item = LatticeVector> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().scan(self.start, |x, z| {
            *x = *x + *z;
            Some(*x)
        }))
    }

    pub fn end(&self) -> LatticeVector {
        self.steps.iter().fold(self.start, |x, z| x + *z)
    }
}

/// A walker in a fixed environment with its own random stream.
pub struct Walker<'a, K: ?Sized> {
    env: Environment<'a, K>,
    pos: LatticeVector,
    rng: ChaCha8Rng,
}

impl<'a, K: JumpKernel + ?Sized> Walker<'a, K> {
    pub fn new(env: Environment<'a, K>, x0: LatticeVector, walk_seed: u64) -> Self {
        Self { env, pos: x0, rng: walk_rng(walk_seed) }
    }

    pub fn position(&self) -> LatticeVector {
        self.pos
    }

    /// Takes one step and returns the increment.
    #[inline]
    pub fn step(&mut self) -> LatticeVector {
        let z = self.env.step(&self.pos, self.rng.gen::<f64>());
        self.pos = self.pos + z;
        z
    }
}

pub fn run_quenched<K: JumpKernel + ?Sized>(
    env: &Environment<'_, K>,
    x0: LatticeVector,
    n_steps: usize,
    walk_seed: u64,
) -> Path {
    let mut w = Walker::new(*env, x0, walk_seed);
    let steps = (0..n_steps).map(|_| w.step()).collect();
    Path { start: x0, steps }
}

/// Regeneration times σ_0 = 0 < σ_1 < … completed within the path.
pub fn regeneration_times(path: &Path, u_hat: &LatticeVector, threshold: f64) -> Vec<usize> {
    let mut out = vec![0];
    let mut anchor = path.start.dot(u_hat);
    for (n, x) in path.positions().enumerate().skip(1) {
        let level = x.dot(u_hat);
        if (level - anchor) as f64 >= threshold {
            out.push(n);
            anchor = level;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegenerationBlock {
    pub duration: u64,
    /// Empty when the sampler was asked not to keep increments.
    pub increments: Vec<LatticeVector>,
    pub displacement: LatticeVector,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockConfig {
    pub threshold: f64,
    pub step_cap: u64,
    /// Blocks harvested from one environment before it is refreshed.
    pub blocks_per_replicate: usize,
    pub keep_increments: bool,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self { threshold: 1.0, step_cap: DEFAULT_STEP_CAP, blocks_per_replicate: 100, keep_increments: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplicateAbort {
    pub replicate: usize,
    pub completed_blocks: usize,
    pub steps_in_open_block: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSample {
    /// (replicate, block) in replicate order.
    pub blocks: Vec<(usize, RegenerationBlock)>,
    pub aborted: Vec<ReplicateAbort>,
}

impl BlockSample {
    pub fn iter(&self) -> impl Iterator<Item = &RegenerationBlock> {
        self.blocks.iter().map(|(_, b)| b)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Per-replicate slices, in replicate order.
    pub fn by_replicate(&self) -> Vec<Vec<&RegenerationBlock>> {
        let mut out: Vec<Vec<&RegenerationBlock>> = Vec::new();
        let mut last = None;
        for (r, b) in &self.blocks {
            if last != Some(*r) {
                out.push(Vec::new());
                last = Some(*r);
            }
            out.last_mut().unwrap().push(b);
        }
        out
    }
}

/// Runs one replicate: blocks from the walk started at 0 in environment `env`.
pub fn blocks_from_walk<K: JumpKernel + ?Sized>(
    env: Environment<'_, K>,
    walk_seed: u64,
    n_blocks: usize,
    cfg: &BlockConfig,
) -> std::result::Result<Vec<RegenerationBlock>, (Vec<RegenerationBlock>, u64)> {
    let u_hat = env.law().u_hat();
    let mut w = Walker::new(env, LatticeVector::zero(u_hat.dim()), walk_seed);
    let mut out = Vec::with_capacity(n_blocks);
    let mut anchor = w.position();
    while out.len() < n_blocks {
        let mut inc = Vec::new();
        let mut duration = 0u64;
        loop {
            let z = w.step();
            duration += 1;
            if cfg.keep_increments {
                inc.push(z);
            }
            let gain = (w.position() - anchor).dot(&u_hat);
            if gain as f64 >= cfg.threshold {
                break;
            }
            if duration >= cfg.step_cap {
                return Err((out, duration));
            }
        }
        let pos = w.position();
        out.push(RegenerationBlock { duration, increments: inc, displacement: pos - anchor });
        anchor = pos;
    }
    Ok(out)
}

/// Annealed regeneration blocks: replicate r uses a fresh environment and a
/// private walk stream, both derived from `(master_seed, r)`. Output order and
/// content do not depend on the number of worker threads.
pub fn sample_blocks<K: JumpKernel + ?Sized>(law: &K, count: usize, master_seed: u64, cfg: &BlockConfig) -> BlockSample {
    let per = cfg.blocks_per_replicate.max(1);
    let n_rep = count.div_ceil(per);
    let results: Vec<_> = (0..n_rep)
        .into_par_iter()
        .map(|r| {
            let want = per.min(count - r * per);
            let env = Environment::new(law, derive_seed(master_seed, tags::ENV, r as u64));
            blocks_from_walk(env, derive_seed(master_seed, tags::WALK, r as u64), want, cfg)
        })
        .collect();
    let mut blocks = Vec::with_capacity(count);
    let mut aborted = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(bs) => blocks.extend(bs.into_iter().map(|b| (r, b))),
            Err((bs, open)) => {
                aborted.push(ReplicateAbort { replicate: r, completed_blocks: bs.len(), steps_in_open_block: open });
                blocks.extend(bs.into_iter().map(|b| (r, b)));
            }
        }
    }
    BlockSample { blocks, aborted }
}

/// Distinct sites visited by a monotone one-dimensional walk, in increasing order.
struct VisitedSites<'a, K: ?Sized> {
    walker: Walker<'a, K>,
    first: bool,
}

impl<K: JumpKernel + ?Sized> Iterator for VisitedSites<'_, K> {
    type Item = i64;
    fn next(&mut self) -> Option<i64> {
        if self.first {
            self.first = false;
            return Some(self.walker.position().get(0));
        }
        loop {
            if self.walker.step().get(0) != 0 {
                return Some(self.walker.position().get(0));
            }
        }
    }
}

/// Successive common points L_1 < L_2 < … ≤ `horizon` of two independent walks
/// from 0 in the same one-dimensional environment.
pub fn two_walker_common_points<K: JumpKernel + ?Sized>(
    env: &Environment<'_, K>,
    seeds: (u64, u64),
    horizon: i64,
) -> Result<Vec<i64>> {
    if env.law().dim() != 1 || env.law().u_hat().get(0) <= 0 {
        return Err(RwreError::NotOneDimensional);
    }
    let x0 = LatticeVector::from_1d(0);
    let mut a = VisitedSites { walker: Walker::new(*env, x0, seeds.0), first: false };
    let mut b = VisitedSites { walker: Walker::new(*env, x0, seeds.1), first: false };
    let mut out = Vec::new();
    let (mut x, mut y) = (a.next().unwrap(), b.next().unwrap());
    while x <= horizon && y <= horizon {
        if x == y {
            out.push(x);
            x = a.next().unwrap();
            y = b.next().unwrap();
        } else if x < y {
            x = a.next().unwrap();
        } else {
            y = b.next().unwrap();
        }
    }
    if out.is_empty() {
        return Err(RwreError::HorizonExceeded { what: "no common point found".into(), cap: horizon as u64 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::of(c)
    }

    #[test]
    fn deterministic_walk() {
        let law = presets::deterministic(&[1, 1], &[1, 0]);
        let env = Environment::new(&law, 1);
        let p = run_quenched(&env, v(&[2, 3]), 5, 9);
        assert_eq!(p.end(), v(&[7, 8]));
        assert_eq!(regeneration_times(&p, &v(&[1, 0]), 1.0), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn no_gain_means_no_regeneration() {
        let p = Path { start: v(&[0, 0]), steps: vec![v(&[0, 1]); 4] };
        assert_eq!(regeneration_times(&p, &v(&[1, 0]), 1.0), vec![0]);
    }

    #[test]
    fn lazy_sojourns_are_blocks() {
        let law = presets::lazy_nn();
        let env = Environment::new(&law, 4);
        let p = run_quenched(&env, v(&[0]), 500, 2);
        let s = regeneration_times(&p, &v(&[1]), 1.0);
        let xs: Vec<_> = p.positions().collect();
        for w in s.windows(2) {
            assert_eq!(xs[w[0]].get(0) + 1, xs[w[1]].get(0));
            assert!((w[0]..w[1]).all(|n| xs[n] == xs[w[0]]));
        }
    }

    #[test]
    fn blocks_are_thread_count_independent() {
        let law = presets::one_two_jump();
        let cfg = BlockConfig { blocks_per_replicate: 7, keep_increments: true, ..Default::default() };
        let a = sample_blocks(&law, 100, 11, &cfg);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_blocks(&law, 100, 11, &cfg));
        assert_eq!(a.blocks, b.blocks);
        assert_eq!(a.len(), 100);
        for blk in a.iter() {
            assert_eq!(blk.increments.iter().fold(v(&[0]), |s, z| s + *z), blk.displacement);
        }
    }

    #[test]
    fn step_cap_abort_is_reported() {
        let law = crate::env::SiInftyLaw::new();
        let cfg = BlockConfig { step_cap: 3, blocks_per_replicate: 10, ..Default::default() };
        let s = sample_blocks(&law, 200, 5, &cfg);
        assert!(!s.aborted.is_empty());
    }

    #[test]
    fn nearest_neighbour_walkers_share_every_site() {
        let law = presets::lazy_nn();
        let env = Environment::new(&law, 8);
        let l = two_walker_common_points(&env, (1, 2), 50).unwrap();
        assert_eq!(l, (1..=50).collect::<Vec<_>>());
    }
}
