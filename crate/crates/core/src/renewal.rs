//! Common points of two independent delayed renewal processes.
//!
//! For renewal points i + S_m and j + S̃_n, L_{i,j} is the first common point
//! ≥ 1. The overshoot chain ζ (ζ_{k+1} = forward recurrence of one process
//! over the current gap) turns L_{0,j} into Σ_{k ≤ ν_0} ζ_k with ζ_0 = j,
//! where ν_0 is the absorption time at 0.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RwreError};
use crate::rng::{derive_seed, tags, walk_rng};
use crate::stats::ols_slope;

/// Default horizon for simulated renewal quantities.
pub const DEFAULT_HORIZON: u64 = 1_000_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Finitely supported law of a positive integer step Y.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenewalLaw {
    pmf: Vec<(u64, f64)>,
    cumulative: Vec<f64>,
    period: u64,
}

impl RenewalLaw {
    pub fn new(mut pmf: Vec<(u64, f64)>) -> Result<Self> {
        pmf.retain(|(_, p)| *p != 0.0);
        if pmf.is_empty() {
            return Err(RwreError::InvalidLaw("renewal law has empty support".into()));
        }
        pmf.sort_by_key(|(k, _)| *k);
        if pmf.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(RwreError::InvalidLaw("duplicate support point".into()));
        }
        if pmf.iter().any(|(k, p)| *k == 0 || !p.is_finite() || *p < 0.0) {
            return Err(RwreError::InvalidLaw("support must be positive with nonnegative masses".into()));
        }
        let total: f64 = pmf.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > crate::env::PROB_TOL {
            return Err(RwreError::InvalidLaw(format!("renewal masses sum to {total:.15}")));
        }
        let period = pmf.iter().fold(0, |g, (k, _)| gcd(g, *k));
        let mut acc = 0.0;
        let cumulative = pmf.iter().map(|(_, p)| {
            acc += p;
            acc
        }).collect();
        Ok(Self { pmf, cumulative, period })
    }

    /// Uniform on {a, …, b}.
    pub fn uniform(a: u64, b: u64) -> Result<Self> {
        let w = 1.0 / (b - a + 1) as f64;
        Self::new((a..=b).map(|k| (k, w)).collect())
    }

    pub fn constant(k: u64) -> Result<Self> {
        Self::new(vec![(k, 1.0)])
    }

    pub fn pmf(&self) -> &[(u64, f64)] {
        &self.pmf
    }

    pub fn max_support(&self) -> u64 {
        self.pmf.last().unwrap().0
    }

    pub fn prob(&self, k: u64) -> f64 {
        self.pmf.iter().find(|(s, _)| *s == k).map_or(0.0, |(_, p)| *p)
    }

    pub fn moment(&self, p: f64) -> f64 {
        self.pmf.iter().map(|(k, q)| (*k as f64).powf(p) * q).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        for (i, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return self.pmf[i].0;
            }
        }
        self.pmf.last().unwrap().0
    }

    /// The law of Y/h.
    fn reduced(&self) -> Self {
        let h = self.period;
        Self::new(self.pmf.iter().map(|(k, p)| (k / h, *p)).collect()).expect("reduced law is valid")
    }

    /// Renewal masses u(k) = P(k ∈ {S_n}) for k = 0..len.
    pub fn renewal_mass(&self, len: usize) -> Vec<f64> {
        let mut u = vec![0.0; len];
        if len > 0 {
            u[0] = 1.0;
        }
        for k in 1..len {
            u[k] = self.pmf.iter().filter(|(y, _)| *y as usize <= k).map(|(y, p)| p * u[k - *y as usize]).sum();
        }
        u
    }

    /// q(x, ·), the law of B⁰_x, on 0..max_support.
    pub fn overshoot_law(&self, x: u64) -> Vec<f64> {
        let rho = self.max_support() as usize;
        let mut q = vec![0.0; rho];
        if x == 0 {
            q[0] = 1.0;
            return q;
        }
        let x = x as usize;
        let u = self.renewal_mass(x);
        for (k, uk) in u.iter().enumerate().skip(x.saturating_sub(rho)) {
            for (y, p) in &self.pmf {
                let land = k + *y as usize;
                if land >= x {
                    q[land - x] += uk * p;
                }
            }
        }
        q
    }
}

/// Period h: gcd of the support.
pub fn period_h(law: &RenewalLaw) -> u64 {
    law.period
}

fn check_lattice(law: &RenewalLaw, i: u64, j: u64) -> Result<()> {
    if !i.is_multiple_of(law.period) || !j.is_multiple_of(law.period) {
        return Err(RwreError::InvalidParameter(format!("i={i}, j={j} must be multiples of h={}", law.period)));
    }
    Ok(())
}

/// Simulates L_{i,j}.
pub fn sample_l<R: Rng + ?Sized>(law: &RenewalLaw, i: u64, j: u64, rng: &mut R, horizon: u64) -> Result<u64> {
    check_lattice(law, i, j)?;
    let (mut a, mut b) = (i, j);
    loop {
        if a == b && a >= 1 {
            return Ok(a);
        }
        if a.max(b) > horizon {
            return Err(RwreError::HorizonExceeded { what: "no common renewal point".into(), cap: horizon });
        }
        if a <= b {
            a += law.sample(rng);
        } else {
            b += law.sample(rng);
        }
    }
}

/// Simulates B⁰_x = min{m ≥ 0 : x + m ∈ {S_n}}.
pub fn forward_recurrence<R: Rng + ?Sized>(law: &RenewalLaw, x: u64, rng: &mut R) -> u64 {
    let mut s = 0;
    while s < x {
        s += law.sample(rng);
    }
    s - x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    /// Absorbing-chain linear system; first moment only.
    LinearSystem,
    /// Exact distribution of L by dynamic programming, truncated at negligible mass.
    Dp,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Zero for exact methods.
    pub std_err: f64,
    /// Probability mass left out by the DP truncation.
    pub truncated_mass: f64,
    pub method: MomentMethod,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub horizon: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, horizon: DEFAULT_HORIZON }
    }
}

/// Solves m(y) = y + Σ_{y'} q(y, y') m(y') on y = 1..ρ−1.
fn ell_means(law: &RenewalLaw) -> Result<Vec<f64>> {
    let rho = law.max_support() as usize;
    let n = rho.saturating_sub(1);
    let mut m = vec![0.0; rho];
    if n == 0 {
        return Ok(m);
    }
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for y in 1..rho {
        let q = law.overshoot_law(y as u64);
        rhs[y - 1] = y as f64;
        for y2 in 1..rho {
            a[(y - 1, y2 - 1)] -= q[y2];
        }
    }
    let sol = a.lu().solve(&rhs).ok_or_else(|| RwreError::InvalidLaw("singular overshoot chain".into()))?;
    for y in 1..rho {
        m[y] = sol[y - 1];
    }
    Ok(m)
}

/// Distribution of ℓ(y) = Σ_k ζ_k from ζ_0 = y, for y = 0..ρ−1, truncated
/// once the unabsorbed mass falls below `tol`. Returns the pmfs and the
/// largest leftover mass.
fn ell_distributions(law: &RenewalLaw, tol: f64) -> (Vec<Vec<f64>>, f64) {
    let rho = law.max_support() as usize;
    let q: Vec<Vec<f64>> = (0..rho).map(|y| law.overshoot_law(y as u64)).collect();
    let mut out = vec![vec![1.0]];
    let mut worst = 0.0f64;
    for y0 in 1..rho {
        // live[s][ζ]: mass with accumulated sum s and current state ζ > 0.
        let mut live: Vec<Vec<f64>> = vec![vec![0.0; rho]; y0 + 1];
        live[y0][y0] = 1.0;
        let mut pmf: Vec<f64> = vec![0.0; y0 + 1];
        let mut remaining = 1.0f64;
        let mut s = y0;
        while remaining > tol && s < live.len() {
            for z in 1..rho {
                let m = live[s][z];
                if m == 0.0 {
                    continue;
                }
                for (z2, p) in q[z].iter().enumerate() {
                    let w = m * p;
                    if w == 0.0 {
                        continue;
                    }
                    if z2 == 0 {
                        if pmf.len() <= s {
                            pmf.resize(s + 1, 0.0);
                        }
                        pmf[s] += w;
                        remaining -= w;
                    } else {
                        let t = s + z2;
                        if live.len() <= t {
                            live.resize(t + 1, vec![0.0; rho]);
                        }
                        live[t][z2] += w;
                    }
                }
            }
            s += 1;
        }
        let left: f64 = live[s.min(live.len())..].iter().flatten().sum();
        worst = worst.max(left);
        out.push(pmf);
    }
    (out, worst)
}

fn mc_moment(law: &RenewalLaw, i: u64, j: u64, p: f64, cfg: &McConfig) -> Result<MomentEstimate> {
    const CHUNK: usize = 1 << 14;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = walk_rng(derive_seed(cfg.seed, tags::RENEWAL, c as u64));
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in c * CHUNK..((c + 1) * CHUNK).min(cfg.samples) {
                let l = (sample_l(law, i, j, &mut rng, cfg.horizon)? as f64).powf(p);
                s += l;
                s2 += l * l;
            }
            Ok((s, s2))
        })
        .collect::<Result<Vec<_>>>()?;
    let (s, s2) = parts.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = cfg.samples as f64;
    let mean = s / n;
    let se = ((s2 / n - mean * mean).max(0.0) / (n - 1.0)).sqrt();
    Ok(MomentEstimate { value: mean, std_err: se, truncated_mass: 0.0, method: MomentMethod::MonteCarlo })
}

/// Tail mass below which the DP stops.
pub const DP_TOL: f64 = 1e-16;

/// E(L_{i,j}^p) by the requested method.
pub fn exact_moment_l_with(
    law: &RenewalLaw,
    i: u64,
    j: u64,
    p: f64,
    method: MomentMethod,
    mc: &McConfig,
) -> Result<MomentEstimate> {
    check_lattice(law, i, j)?;
    let (i, j) = (i.min(j), i.max(j));
    if method == MomentMethod::MonteCarlo {
        return mc_moment(law, i, j, p, mc);
    }
    if method == MomentMethod::LinearSystem && p != 1.0 {
        return Err(RwreError::InvalidParameter("the linear system gives the first moment only".into()));
    }
    let exact = |value: f64, truncated_mass: f64| MomentEstimate { value, std_err: 0.0, truncated_mass, method };
    if i == j && i > 0 {
        return Ok(exact((i as f64).powf(p), 0.0));
    }
    let h = law.period;
    if h > 1 {
        let r = exact_moment_l_with(&law.reduced(), i / h, j / h, p, method, mc)?;
        return Ok(MomentEstimate { value: r.value * (h as f64).powf(p), ..r });
    }
    // L_{i,j} has the law of i + L_{0, j−i}; L_{0,0} first moves one process by Y.
    let d = j - i;
    let starts: Vec<(u64, f64)> = if d == 0 { law.pmf.clone() } else { vec![(d, 1.0)] };
    let shift = i as f64;
    match method {
        MomentMethod::LinearSystem => {
            let m = ell_means(law)?;
            let mut total = 0.0;
            for (jj, w) in starts {
                let q = law.overshoot_law(jj);
                total += w * (shift + jj as f64 + q.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>());
            }
            Ok(exact(total, 0.0))
        }
        MomentMethod::Dp => {
            let (dists, left) = ell_distributions(law, DP_TOL);
            let mut total = 0.0;
            for (jj, w) in starts {
                let q = law.overshoot_law(jj);
                for (y, qy) in q.iter().enumerate() {
                    if *qy == 0.0 {
                        continue;
                    }
                    let base = shift + jj as f64;
                    let e: f64 = if y == 0 {
                        base.powf(p)
                    } else {
                        dists[y].iter().enumerate().map(|(s, f)| f * (base + s as f64).powf(p)).sum()
                    };
                    total += w * qy * e;
                }
            }
            Ok(exact(total, left))
        }
        MomentMethod::MonteCarlo => unreachable!(),
    }
}

/// E(L_{i,j}^p): linear system for p = 1, exact DP otherwise.
pub fn exact_moment_l(law: &RenewalLaw, i: u64, j: u64, p: f64) -> Result<MomentEstimate> {
    let method = if p == 1.0 { MomentMethod::LinearSystem } else { MomentMethod::Dp };
    exact_moment_l_with(law, i, j, p, method, &McConfig::default())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioRow {
    pub j: u64,
    pub moment: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentBoundReport {
    pub p: f64,
    pub rows: Vec<RatioRow>,
    pub c_hat: f64,
    /// OLS slope of ln ratio against ln j, with its standard error.
    pub slope: f64,
    pub slope_se: f64,
    /// slope ≤ 4·slope_se.
    pub pass: bool,
}

/// Ratios E(L_{0,j}^p)/(1 + j^p) over `j_grid` and their log-log trend.
pub fn verify_moment_bound(law: &RenewalLaw, p: f64, j_grid: &[u64]) -> Result<MomentBoundReport> {
    let rows = j_grid
        .iter()
        .map(|&j| {
            let m = exact_moment_l(law, 0, j, p)?.value;
            Ok(RatioRow { j, moment: m, ratio: m / (1.0 + (j as f64).powf(p)) })
        })
        .collect::<Result<Vec<_>>>()?;
    let c_hat = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let lx: Vec<f64> = rows.iter().map(|r| (r.j as f64).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    let (slope, slope_se) = ols_slope(&lx, &ly);
    Ok(MomentBoundReport { p, rows, c_hat, slope, slope_se, pass: slope <= 4.0 * slope_se })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaRow {
    pub x: u64,
    pub moment: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaReport {
    pub p: f64,
    pub rows: Vec<ZetaRow>,
    pub max_ratio: f64,
    /// The upper half of the grid does not exceed the lower half's maximum.
    pub bounded: bool,
}

/// E_x(ζ_1^p)/E(Y^{p+1}) over `x_grid`, exactly.
pub fn zeta_moment_check(law: &RenewalLaw, p: f64, x_grid: &[u64]) -> ZetaReport {
    let ey = law.moment(p + 1.0);
    let rows: Vec<ZetaRow> = x_grid
        .iter()
        .map(|&x| {
            let q = law.overshoot_law(x);
            let m: f64 = q.iter().enumerate().map(|(y, w)| w * (y as f64).powf(p)).sum();
            ZetaRow { x, moment: m, ratio: m / ey }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let half = rows.len() / 2;
    let lower = rows[..half.max(1)].iter().map(|r| r.ratio).fold(0.0, f64::max);
    let upper = rows[half..].iter().map(|r| r.ratio).fold(0.0, f64::max);
    ZetaReport { p, rows, max_ratio, bounded: upper <= lower * (1.0 + 1e-9) + 1e-15 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub n: u64,
    pub estimate: f64,
    pub std_err: f64,
    pub exact: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Nu0Report {
    pub x: u64,
    pub rows: Vec<TailRow>,
    /// Fitted slope of ln P(ν_0 > n) against n over points with at least 10 hits.
    pub slope: f64,
    pub slope_se: f64,
    /// slope + 4·se < 0, or the tail vanishes on the grid.
    pub pass: bool,
}

/// P_x(ν_0 > n) by simulation of the ζ-chain, with the exact chain value alongside.
pub fn nu0_tail(law: &RenewalLaw, x: u64, n_grid: &[u64], samples: usize, seed: u64) -> Result<Nu0Report> {
    let n_max = *n_grid.iter().max().unwrap_or(&0);
    let horizon = DEFAULT_HORIZON;
    let counts = (0..samples.div_ceil(1 << 14))
        .into_par_iter()
        .map(|c| {
            let mut rng = walk_rng(derive_seed(seed, tags::RENEWAL, c as u64));
            let mut hist = vec![0u64; n_grid.len()];
            for _ in c << 14..((c + 1) << 14).min(samples) {
                let mut z = x;
                let mut nu = 0u64;
                while z != 0 && nu <= n_max {
                    z = forward_recurrence(law, z, &mut rng);
                    nu += 1;
                    if nu > horizon {
                        return Err(RwreError::HorizonExceeded { what: "zeta chain not absorbed".into(), cap: horizon });
                    }
                }
                for (k, &n) in n_grid.iter().enumerate() {
                    if nu > n {
                        hist[k] += 1;
                    }
                }
            }
            Ok(hist)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(vec![0u64; n_grid.len()], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    // Exact: distribution of ζ_n on 0..ρ−1 after the first step from x.
    let rho = law.max_support() as usize;
    let q: Vec<Vec<f64>> = (0..rho).map(|y| law.overshoot_law(y as u64)).collect();
    let mut dist = law.overshoot_law(x);
    let mut exact_tail = vec![if x == 0 { 0.0 } else { 1.0 }];
    for _ in 1..=n_max {
        exact_tail.push(1.0 - dist[0]);
        let mut next = vec![0.0; rho];
        next[0] = dist[0];
        for z in 1..rho {
            for (z2, p) in q[z].iter().enumerate() {
                next[z2] += dist[z] * p;
            }
        }
        dist = next;
    }
    let m = samples as f64;
    let rows: Vec<TailRow> = n_grid
        .iter()
        .zip(&counts)
        .map(|(&n, &c)| {
            let e = c as f64 / m;
            TailRow { n, estimate: e, std_err: (e * (1.0 - e) / m).sqrt(), exact: exact_tail[n as usize] }
        })
        .collect();
    let fit: Vec<(f64, f64)> =
        rows.iter().zip(&counts).filter(|(_, c)| **c >= 10).map(|(r, _)| (r.n as f64, r.estimate.ln())).collect();
    let (slope, slope_se) = if fit.len() >= 3 {
        let (a, b): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        ols_slope(&a, &b)
    } else {
        (f64::NAN, f64::NAN)
    };
    let vanishes = counts.iter().skip(1).all(|c| *c == 0);
    let pass = vanishes || slope + 4.0 * slope_se < 0.0;
    Ok(Nu0Report { x, rows, slope, slope_se, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods() {
        assert_eq!(period_h(&RenewalLaw::uniform(1, 2).unwrap()), 1);
        assert_eq!(period_h(&RenewalLaw::new(vec![(2, 0.5), (4, 0.5)]).unwrap()), 2);
        assert_eq!(period_h(&RenewalLaw::new(vec![(3, 0.5), (5, 0.5)]).unwrap()), 1);
        assert!(RenewalLaw::new(vec![(0, 1.0)]).is_err());
    }

    #[test]
    fn sample_l_simple_cases() {
        let mut rng = walk_rng(1);
        let u = RenewalLaw::uniform(1, 3).unwrap();
        assert_eq!(sample_l(&u, 3, 3, &mut rng, 100).unwrap(), 3);
        let one = RenewalLaw::constant(1).unwrap();
        assert_eq!(sample_l(&one, 0, 5, &mut rng, 100).unwrap(), 5);
        assert_eq!(sample_l(&one, 0, 0, &mut rng, 100).unwrap(), 1);
        for _ in 0..1000 {
            assert!(sample_l(&u, 0, 0, &mut rng, 1000).unwrap() >= 1);
        }
    }

    #[test]
    fn overshoot_laws() {
        let u = RenewalLaw::uniform(1, 2).unwrap();
        assert_eq!(u.overshoot_law(0), vec![1.0, 0.0]);
        assert_eq!(u.overshoot_law(1), vec![0.5, 0.5]);
        let one = RenewalLaw::constant(1).unwrap();
        assert_eq!(one.overshoot_law(17), vec![1.0]);
        let mut rng = walk_rng(3);
        let n = 100_000;
        let zeros = (0..n).filter(|_| forward_recurrence(&u, 1, &mut rng) == 0).count() as f64 / n as f64;
        assert!((zeros - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
        assert_eq!(forward_recurrence(&u, 0, &mut rng), 0);
    }

    #[test]
    fn first_moments_by_hand() {
        let u = RenewalLaw::uniform(1, 2).unwrap();
        assert!((exact_moment_l(&u, 0, 1, 1.0).unwrap().value - 2.0).abs() < 1e-12);
        assert!((exact_moment_l(&u, 0, 2, 1.0).unwrap().value - 2.5).abs() < 1e-12);
        let one = RenewalLaw::constant(1).unwrap();
        assert!((exact_moment_l(&one, 0, 7, 1.0).unwrap().value - 7.0).abs() < 1e-12);
        assert!((exact_moment_l(&one, 0, 0, 1.0).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(exact_moment_l(&u, 4, 4, 3.0).unwrap().value, 64.0);
    }

    #[test]
    fn dp_agrees_with_linear_system() {
        for law in [RenewalLaw::uniform(1, 2).unwrap(), RenewalLaw::uniform(1, 5).unwrap()] {
            for j in [0, 1, 2, 3, 7, 40] {
                let a = exact_moment_l_with(&law, 0, j, 1.0, MomentMethod::LinearSystem, &McConfig::default()).unwrap();
                let b = exact_moment_l_with(&law, 0, j, 1.0, MomentMethod::Dp, &McConfig::default()).unwrap();
                assert!((a.value - b.value).abs() < 1e-9, "{j}: {} {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn lattice_rescaling() {
        let law = RenewalLaw::new(vec![(2, 0.5), (4, 0.5)]).unwrap();
        let red = RenewalLaw::uniform(1, 2).unwrap();
        for p in [1.0, 2.0] {
            let a = exact_moment_l(&law, 2, 8, p).unwrap().value;
            let b = exact_moment_l(&red, 1, 4, p).unwrap().value;
            assert!((a - 2f64.powf(p) * b).abs() < 1e-9 * a);
        }
        assert!(exact_moment_l(&law, 0, 3, 1.0).is_err());
    }

    #[test]
    fn zeta_and_nu0() {
        let one = RenewalLaw::constant(1).unwrap();
        let z = zeta_moment_check(&one, 2.0, &[1, 2, 3]);
        assert!(z.rows.iter().all(|r| r.ratio == 0.0));
        let r = nu0_tail(&one, 3, &[1, 2, 3], 1000, 1).unwrap();
        assert!(r.pass && r.rows.iter().all(|t| t.estimate == 0.0));
        let u = RenewalLaw::uniform(1, 2).unwrap();
        let r = nu0_tail(&u, 1, &(1..=30).collect::<Vec<_>>(), 100_000, 2).unwrap();
        assert!(r.pass);
        for t in &r.rows {
            assert!((t.exact - 0.5f64.powi(t.n as i32)).abs() < 1e-15);
        }
    }
}
