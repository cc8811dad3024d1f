//! Exact quenched computations in a fixed environment.
//!
//! In one dimension with û = +1 the walk is monotone, so the law of X_n has a
//! dense window representation and hitting probabilities of sites satisfy a
//! finite-range forward recursion. Holding probabilities are eliminated by
//! working with the jump law conditioned on moving, r_y = π_0y / (1 − π_00).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::env::{Environment, EnvironmentLaw, LatticeVector, OneDimAtom, OneDimLaw};
use crate::error::{Result, RwreError};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// Entries below this mass are dropped and booked as leak.
    pub prune: f64,
    pub support_cap: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { prune: 1e-15, support_cap: 1 << 22 }
    }
}

/// P^ω_{x0}(X_n = ·) up to pruned mass.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteMassFunction {
    pub entries: BTreeMap<LatticeVector, f64>,
    pub tracked_leak: f64,
}

impl SiteMassFunction {
    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let d = self.entries.keys().next().map_or(1, |x| x.dim());
        let mut m = vec![0.0; d];
        for (x, p) in &self.entries {
            for (k, c) in x.coords().iter().enumerate() {
                m[k] += *c as f64 * p;
            }
        }
        m
    }
}

/// Lazily realized one-dimensional site data for x ≥ base.
pub struct SiteStrip<'a> {
    od: &'a OneDimLaw,
    env: Environment<'a, EnvironmentLaw>,
    base: i64,
    atoms: Vec<&'a OneDimAtom>,
}

impl<'a> SiteStrip<'a> {
    pub fn new(env: &Environment<'a, EnvironmentLaw>, base: i64) -> Result<Self> {
        let od = env.law().one_dim()?;
        Ok(Self { od, env: *env, base, atoms: Vec::new() })
    }

    /// Site data at base + k.
    #[inline]
    pub fn at(&mut self, k: usize) -> &'a OneDimAtom {
        while self.atoms.len() <= k {
            let x = self.base + self.atoms.len() as i64;
            self.atoms.push(&self.od.atoms[self.env.site_atom_1d(x)]);
        }
        self.atoms[k]
    }

    pub fn law(&self) -> &'a OneDimLaw {
        self.od
    }
}

/// Dense window of the quenched law in one dimension.
///
/// `mean` accumulates the normalized one-step drift Σ p(x) D(x) / Σ p(x), so
/// pruning perturbs it only through the shape of the retained mass.
struct Dense1d {
    lo: i64,
    mass: Vec<f64>,
    leak: f64,
    mean: f64,
}

impl Dense1d {
    fn new(x0: i64) -> Self {
        Self { lo: x0, mass: vec![1.0], leak: 0.0, mean: x0 as f64 }
    }

    fn step(&mut self, strip: &mut SiteStrip<'_>, prune: f64) {
        let r = strip.law().max_jump;
        let mut next = vec![0.0; self.mass.len() + r];
        let (mut total, mut drift) = (0.0, 0.0);
        for (k, &m) in self.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let site = strip.at((self.lo - strip.base) as usize + k);
            total += m;
            drift += m * site.drift;
            for (y, p) in site.pi.iter().enumerate() {
                next[k + y] += m * p;
            }
        }
        self.mean += drift / total;
        let mut start = 0;
        while start + 1 < next.len() && next[start] < prune {
            self.leak += next[start];
            start += 1;
        }
        let mut end = next.len();
        while end > start + 1 && next[end - 1] < prune {
            self.leak += next[end - 1];
            end -= 1;
        }
        self.lo += start as i64;
        next.truncate(end);
        next.drain(..start);
        self.mass = next;
    }
}

/// Exact law of X_n under P^ω_{x0}, up to pruned mass.
pub fn forward_law(
    env: &Environment<'_, EnvironmentLaw>,
    x0: LatticeVector,
    n: usize,
    cfg: &PropagationConfig,
) -> Result<SiteMassFunction> {
    if env.law().one_dim().is_ok() {
        let mut strip = SiteStrip::new(env, x0.get(0))?;
        let mut d = Dense1d::new(x0.get(0));
        for _ in 0..n {
            d.step(&mut strip, cfg.prune);
            if d.mass.len() > cfg.support_cap {
                return Err(RwreError::SupportCapExceeded { size: d.mass.len(), cap: cfg.support_cap });
            }
        }
        let entries = d
            .mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(k, m)| (LatticeVector::from_1d(d.lo + k as i64), *m))
            .collect();
        return Ok(SiteMassFunction { entries, tracked_leak: d.leak });
    }
    let mut cur: HashMap<LatticeVector, f64> = HashMap::from([(x0, 1.0)]);
    let mut leak = 0.0;
    for _ in 0..n {
        let mut next: HashMap<LatticeVector, f64> = HashMap::with_capacity(cur.len() * 2);
        for (x, m) in &cur {
            for (z, p) in env.site_env(x).atoms() {
                *next.entry(*x + *z).or_insert(0.0) += m * p;
            }
        }
        next.retain(|_, m| {
            if *m < cfg.prune {
                leak += *m;
                false
            } else {
                true
            }
        });
        if next.len() > cfg.support_cap {
            return Err(RwreError::SupportCapExceeded { size: next.len(), cap: cfg.support_cap });
        }
        cur = next;
    }
    Ok(SiteMassFunction { entries: cur.into_iter().collect(), tracked_leak: leak })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuenchedMean {
    pub mean: Vec<f64>,
    /// Pruned mass; the retained mass is 1 − leak.
    pub leak: f64,
}

/// E^ω_{x0}(X_n).
pub fn quenched_mean(
    env: &Environment<'_, EnvironmentLaw>,
    x0: LatticeVector,
    n: usize,
    cfg: &PropagationConfig,
) -> Result<QuenchedMean> {
    if env.law().one_dim().is_ok() {
        let mut strip = SiteStrip::new(env, x0.get(0))?;
        let mut d = Dense1d::new(x0.get(0));
        for _ in 0..n {
            d.step(&mut strip, cfg.prune);
        }
        return Ok(QuenchedMean { mean: vec![d.mean], leak: d.leak });
    }
    let law = forward_law(env, x0, n, cfg)?;
    Ok(QuenchedMean { mean: law.mean(), leak: law.tracked_leak })
}

/// E^ω_0(X_n) in one dimension at every n in the nondecreasing `grid`, in one pass.
pub fn quenched_mean_series_1d(
    env: &Environment<'_, EnvironmentLaw>,
    grid: &[usize],
    cfg: &PropagationConfig,
) -> Result<Vec<f64>> {
    let mut strip = SiteStrip::new(env, 0)?;
    let mut d = Dense1d::new(0);
    let mut out = Vec::with_capacity(grid.len());
    let mut n = 0;
    for &target in grid {
        while n < target {
            d.step(&mut strip, cfg.prune);
            n += 1;
        }
        out.push(d.mean);
    }
    Ok(out)
}

/// P^ω_x(V_i), the probability that the walk from x ever visits i.
pub fn hitting_prob_1d(env: &Environment<'_, EnvironmentLaw>, x: i64, i: i64) -> Result<f64> {
    if x > i {
        return Ok(0.0);
    }
    let mut strip = SiteStrip::new(env, x)?;
    let r = strip.law().max_jump;
    let len = (i - x) as usize;
    // h[k] = P_{x+k}(V_i), computed backwards; h beyond i is zero.
    let mut h = vec![0.0; len + 1 + r];
    h[len] = 1.0;
    for k in (0..len).rev() {
        let site = strip.at(k);
        h[k] = (1..=r).map(|y| site.r[y] * h[k + y]).sum();
    }
    Ok(h[0])
}

/// Forward hitting probabilities P_start(V_j) for j = 0..len relative to a strip.
fn forward_hitting(strip: &mut SiteStrip<'_>, start: usize, len: usize) -> Vec<f64> {
    let r = strip.law().max_jump;
    let mut h = vec![0.0; len];
    if start < len {
        h[start] = 1.0;
    }
    for j in start + 1..len {
        let lo = j.saturating_sub(r).max(start);
        h[j] = (lo..j).map(|k| h[k] * strip.at(k).r[j - k]).sum();
    }
    h
}

/// Coefficients a_i(T_base ω) = ρ(ω_{base+i}) (P_0(V_i) − P_1(V_i)) for i < len, exactly.
pub fn corrector_coefficients(env: &Environment<'_, EnvironmentLaw>, base: i64, len: usize) -> Result<Vec<f64>> {
    let mut strip = SiteStrip::new(env, base)?;
    let h0 = forward_hitting(&mut strip, 0, len);
    let h1 = forward_hitting(&mut strip, 1, len);
    Ok((0..len).map(|i| strip.at(i).rho * (h0[i] - h1[i])).collect())
}

/// P^ω_{0,1}(L > i) for i = 0..len, where L is the first common site of two
/// independent walks started at 0 and 1 in the same environment.
///
/// The pair is tracked by (trailing position, gap to the leader); the trailing
/// walker moves until it lands on the leader (a meeting) or passes it.
pub fn pair_noncoalescence(strip: &mut SiteStrip<'_>, len: usize) -> Vec<f64> {
    let r = strip.law().max_jump;
    let width = r.max(1);
    let span = len + r + 2;
    let mut pending = vec![0.0; span * width];
    let mut meets = vec![0.0; span];
    pending[0] = 1.0; // trailing 0, gap 1
    let mut out = Vec::with_capacity(len);
    out.push(1.0);
    for a in 0..len.saturating_sub(1) {
        let site = strip.at(a);
        for g in 1..=width {
            let m = pending[a * width + g - 1];
            if m == 0.0 {
                continue;
            }
            pending[a * width + g - 1] = 0.0;
            let b = a + g;
            for y in 1..=r {
                let q = m * site.r[y];
                if q == 0.0 {
                    continue;
                }
                let t = a + y;
                if t == b {
                    meets[b] += q;
                } else if t < b {
                    pending[t * width + (b - t) - 1] += q;
                } else {
                    pending[b * width + (t - b) - 1] += q;
                }
            }
        }
        let i = a + 1;
        // Survivors: unprocessed pair states (trailing ≥ i) plus meetings beyond i.
        let mut s: f64 = pending[i * width..(i + r + 1).min(span) * width].iter().sum();
        s += meets[i + 1..(i + r + 1).min(span)].iter().sum::<f64>();
        out.push(s);
    }
    out
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CorrectorConfig {
    /// Target bound on |Δ − truncated sum|.
    pub tol: f64,
    pub index_cap: usize,
    /// Moment order used in the envelope constant (M/δ)^{p/(p−1)}.
    pub envelope_p: f64,
}

impl Default for CorrectorConfig {
    fn default() -> Self {
        Self { tol: 1e-12, index_cap: 100_000, envelope_p: 2.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrectorTable {
    pub a: Vec<f64>,
    pub delta_value: f64,
    pub truncation_index: usize,
    pub tail_bound: f64,
    /// P_{0,1}(L > i) for the retained indices.
    pub noncoalescence: Vec<f64>,
    /// (M/δ)^{p/(p−1)}.
    pub envelope_const: f64,
    pub v: f64,
}

/// (M/δ)^{p/(p−1)}, a bound on ρ = 1/(1 − π_00) under Hypotheses (N) and (M).
pub fn envelope_constant(law: &EnvironmentLaw, p: f64) -> f64 {
    (law.moment_m(p) / law.delta()).powf(p / (p - 1.0))
}

/// Geometric-ratio bound on Σ_{j>i} s_j from the last `w` values of a decaying sequence.
fn geometric_tail(s: &[f64], w: usize) -> Option<f64> {
    let i = s.len() - 1;
    let last = s[i];
    if last == 0.0 {
        return Some(0.0);
    }
    if i < w {
        return None;
    }
    let ratio = (last / s[i - w]).powf(1.0 / w as f64);
    (ratio < 1.0).then(|| last * ratio / (1.0 - ratio))
}

/// Δ(T_base ω) = Σ_i a_i g(T_{base+i} ω), truncated with a certified tail.
pub fn corrector_at(
    env: &Environment<'_, EnvironmentLaw>,
    base: i64,
    v: Option<f64>,
    cfg: &CorrectorConfig,
) -> Result<CorrectorTable> {
    let law = env.law();
    let od = law.one_dim()?;
    let v = v.unwrap_or_else(|| od.velocity());
    let c_env = envelope_constant(law, cfg.envelope_p);
    let gmax = od.atoms.iter().filter(|a| a.weight > 0.0).map(|a| (a.drift - v).abs()).fold(0.0, f64::max);
    let r = od.max_jump;
    let window = 8 * r;
    let mut strip = SiteStrip::new(env, base)?;
    let mut len = 64usize;
    loop {
        let surv = pair_noncoalescence(&mut strip, len);
        let h0 = forward_hitting(&mut strip, 0, len);
        let h1 = forward_hitting(&mut strip, 1, len);
        // Tail bound at each candidate cut i: C·gmax·Σ_{j>i} P(L>j).
        let mut cut = None;
        for i in window..len {
            if let Some(t) = geometric_tail(&surv[..=i], window) {
                let bound = c_env * gmax * t;
                if bound < cfg.tol {
                    cut = Some((i, bound));
                    break;
                }
            }
        }
        if let Some((i, bound)) = cut {
            let a: Vec<f64> = (0..=i).map(|k| strip.at(k).rho * (h0[k] - h1[k])).collect();
            let delta_value = a.iter().enumerate().map(|(k, ak)| ak * (strip.at(k).drift - v)).sum();
            return Ok(CorrectorTable {
                a,
                delta_value,
                truncation_index: i,
                tail_bound: bound,
                noncoalescence: surv[..=i].to_vec(),
                envelope_const: c_env,
                v,
            });
        }
        if len >= cfg.index_cap {
            let achieved = geometric_tail(&surv, window).map_or(f64::INFINITY, |t| c_env * gmax * t);
            return Err(RwreError::TruncationFailed { tol: cfg.tol, cap: cfg.index_cap, achieved });
        }
        len = (len * 4).min(cfg.index_cap);
    }
}

pub fn corrector(env: &Environment<'_, EnvironmentLaw>, v: Option<f64>, cfg: &CorrectorConfig) -> Result<CorrectorTable> {
    corrector_at(env, 0, v, cfg)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChiValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// χ(x, ω) = Σ_{y<x} Δ(T_y ω).
pub fn chi(env: &Environment<'_, EnvironmentLaw>, x: i64, v: Option<f64>, cfg: &CorrectorConfig) -> Result<ChiValue> {
    let mut value = 0.0;
    let mut tail_bound = 0.0;
    for y in 0..x.max(0) {
        let t = corrector_at(env, y, v, cfg)?;
        value += t.delta_value;
        tail_bound += t.tail_bound;
    }
    Ok(ChiValue { value, tail_bound })
}

/// Absolute slack added to certified bounds for floating-point cancellation.
pub const FP_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MartingaleCheck {
    /// E^ω_0[χ(X_1, ω)].
    pub expected_chi: f64,
    /// g(ω) = D(ω) − v.
    pub g: f64,
    pub residual: f64,
    pub bound: f64,
}

impl MartingaleCheck {
    pub fn holds(&self) -> bool {
        self.residual.abs() <= self.bound
    }
}

/// E^ω_0[χ(X_1, ω)] − g(ω) with its certified bound.
pub fn martingale_residual(
    env: &Environment<'_, EnvironmentLaw>,
    v: Option<f64>,
    cfg: &CorrectorConfig,
) -> Result<MartingaleCheck> {
    let od = env.law().one_dim()?;
    let v = v.unwrap_or_else(|| od.velocity());
    let site0 = &od.atoms[env.site_atom_1d(0)];
    let mut deltas = Vec::with_capacity(od.max_jump);
    for y in 0..od.max_jump as i64 {
        deltas.push(corrector_at(env, y, Some(v), cfg)?);
    }
    let mut expected_chi = 0.0;
    let mut bound = FP_SLACK;
    for (y, p) in site0.pi.iter().enumerate() {
        let chi_y: f64 = deltas[..y].iter().map(|t| t.delta_value).sum();
        let tail: f64 = deltas[..y].iter().map(|t| t.tail_bound).sum();
        expected_chi += p * chi_y;
        bound += p * tail;
    }
    let g = site0.drift - v;
    Ok(MartingaleCheck { expected_chi, g, residual: expected_chi - g, bound })
}

/// Σ_{j=0}^{i} a_j(T_{i−j} ω) Σ_{y>i−j} π_0y(ω) for i = 1..=i_max.
pub fn corrector_identity_residuals(env: &Environment<'_, EnvironmentLaw>, i_max: usize) -> Result<Vec<f64>> {
    let od = env.law().one_dim()?;
    let pi0 = &od.atoms[env.site_atom_1d(0)].pi;
    let tail_mass = |k: usize| -> f64 { pi0.iter().skip(k + 1).sum() };
    let coeffs: Vec<Vec<f64>> = (0..=i_max)
        .map(|s| corrector_coefficients(env, s as i64, i_max + 1))
        .collect::<Result<_>>()?;
    Ok((1..=i_max)
        .map(|i| (0..=i).map(|j| coeffs[i - j][j] * tail_mass(i - j)).sum())
        .collect())
}

/// λ_0 = δ / (2 M_û²) with M_û² = max over atoms of Σ (z·û)² π_0z; for
/// λ ≤ λ_0 one has E^ω e^{−λ Z·û} ≤ 1 − λδ/2 at every site.
pub fn lambda0(law: &EnvironmentLaw) -> f64 {
    use crate::env::JumpKernel;
    let u = law.u_hat();
    let m2 = law
        .site_law()
        .charged()
        .map(|(_, _, jd)| jd.atoms().iter().map(|(z, p)| (z.dot(&u) as f64).powi(2) * p).sum::<f64>())
        .fold(0.0, f64::max);
    law.delta() / (2.0 * m2)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExpBoundCheck {
    /// E^ω_x e^{−λ X_n·û} over the retained mass.
    pub lhs: f64,
    /// Upper bound on the contribution of pruned mass.
    pub leak_bound: f64,
    pub rhs: f64,
}

impl ExpBoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs + self.leak_bound <= self.rhs * (1.0 + 1e-12)
    }
}

/// Exact check of E^ω_x(e^{−λ X_n·û}) ≤ e^{−λ x·û} (1 − λδ/2)^n.
pub fn exp_bound_check(
    env: &Environment<'_, EnvironmentLaw>,
    x: LatticeVector,
    n: usize,
    lambda: f64,
    cfg: &PropagationConfig,
) -> Result<ExpBoundCheck> {
    use crate::env::JumpKernel;
    let law = env.law();
    let l0 = lambda0(law);
    if !(0.0..=l0).contains(&lambda) {
        return Err(RwreError::InvalidParameter(format!("lambda {lambda} outside [0, {l0}]")));
    }
    let u = law.u_hat();
    let dist = forward_law(env, x, n, cfg)?;
    let lhs = dist.entries.iter().map(|(y, p)| p * (-lambda * y.dot(&u) as f64).exp()).sum();
    let base = (-lambda * x.dot(&u) as f64).exp();
    let rhs = base * (1.0 - lambda * law.delta() / 2.0).powi(n as i32);
    Ok(ExpBoundCheck { lhs, leak_bound: dist.tracked_leak * base, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets;

    fn v1(x: i64) -> LatticeVector {
        LatticeVector::from_1d(x)
    }

    #[test]
    fn deterministic_forward_law() {
        let law = presets::deterministic(&[1, 2], &[1, 0]);
        let env = Environment::new(&law, 0);
        let d = forward_law(&env, LatticeVector::of(&[1, 1]), 3, &Default::default()).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[&LatticeVector::of(&[4, 7])], 1.0);
    }

    #[test]
    fn homogeneous_lazy_walk_is_binomial() {
        let law = presets::lazy_nn_with(&[0.5], &[1.0]).unwrap();
        let env = Environment::new(&law, 0);
        let n = 20;
        let d = forward_law(&env, v1(3), n, &Default::default()).unwrap();
        let mut binom = 1.0f64;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            let p = binom * 0.5f64.powi(n as i32);
            assert!((d.entries[&v1(3 + k as i64)] - p).abs() < 1e-14);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let law = presets::one_two_jump();
        for s in 0..5 {
            let env = Environment::new(&law, s);
            let d = forward_law(&env, v1(0), 100, &Default::default()).unwrap();
            assert!((d.total_mass() + d.tracked_leak - 1.0).abs() < 1e-9);
        }
        let law2 = presets::abscont();
        let env = Environment::new(&law2, 2);
        let d = forward_law(&env, LatticeVector::of(&[0, 0]), 40, &Default::default()).unwrap();
        assert!((d.total_mass() + d.tracked_leak - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_step_mean_is_the_drift() {
        let law = presets::one_two_jump();
        let env = Environment::new(&law, 9);
        let q = quenched_mean(&env, v1(5), 1, &Default::default()).unwrap();
        let d = env.site_env(&v1(5)).drift()[0];
        assert!((q.mean[0] - 5.0 - d).abs() < 1e-14);
    }

    #[test]
    fn hitting_probabilities() {
        let law = presets::lazy_nn();
        let env = Environment::new(&law, 1);
        assert_eq!(hitting_prob_1d(&env, 4, 4).unwrap(), 1.0);
        assert!((hitting_prob_1d(&env, -3, 10).unwrap() - 1.0).abs() < 1e-15);
        let law = presets::one_two_jump();
        let env = Environment::new(&law, 1);
        let site = &law.one_dim().unwrap().atoms[env.site_atom_1d(0)];
        let p = hitting_prob_1d(&env, 0, 1).unwrap();
        assert!((p - site.pi[1] / (site.pi[1] + site.pi[2])).abs() < 1e-15);
    }

    #[test]
    fn lazy_corrector_closed_form() {
        let law = presets::lazy_nn();
        for s in 0..20 {
            let env = Environment::new(&law, s);
            let t = corrector(&env, None, &Default::default()).unwrap();
            let p01 = env.site_env(&v1(0)).prob(&v1(1));
            assert!((t.a[0] - 1.0 / p01).abs() < 1e-15);
            assert!(t.a[1..].iter().all(|a| *a == 0.0));
            assert!((t.delta_value - (p01 - 2.0 / 3.0) / p01).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_drift_corrector_vanishes() {
        let law = presets::constant_drift();
        let env = Environment::new(&law, 3);
        let t = corrector(&env, None, &Default::default()).unwrap();
        assert!(t.delta_value.abs() < 1e-15);
        let m = martingale_residual(&env, None, &Default::default()).unwrap();
        assert!(m.residual.abs() < 1e-15);
    }

    #[test]
    fn corrector_envelope_and_martingale() {
        let law = presets::one_two_jump();
        for s in 0..10 {
            let env = Environment::new(&law, s);
            let t = corrector(&env, None, &Default::default()).unwrap();
            for (a, p) in t.a.iter().zip(&t.noncoalescence) {
                assert!(a.abs() <= t.envelope_const * p * (1.0 + 1e-12));
            }
            let m = martingale_residual(&env, None, &Default::default()).unwrap();
            assert!(m.holds(), "{m:?}");
        }
    }

    #[test]
    fn noncoalescence_matches_brute_force() {
        // Walks from 0 and 1 with jumps {1,2}: enumerate paths up to site 12.
        let law = presets::one_two_jump();
        let env = Environment::new(&law, 21);
        let mut strip = SiteStrip::new(&env, 0).unwrap();
        let surv = pair_noncoalescence(&mut strip, 12);
        let od = law.one_dim().unwrap();
        let r = |x: i64, y: usize| od.atoms[env.site_atom_1d(x)].r[y];
        fn paths(x: i64, end: i64, r: &dyn Fn(i64, usize) -> f64) -> Vec<(Vec<i64>, f64)> {
            if x > end {
                return vec![(vec![], 1.0)];
            }
            let mut out = Vec::new();
            for y in 1..=2 {
                let p = r(x, y);
                if p == 0.0 {
                    continue;
                }
                for (mut tail, q) in paths(x + y as i64, end, r) {
                    tail.insert(0, x);
                    out.push((tail, p * q));
                }
            }
            out
        }
        let end = 12;
        let pa = paths(0, end, &r);
        let pb = paths(1, end, &r);
        for i in 1..12i64 {
            let mut s = 0.0;
            for (a, p) in &pa {
                for (b, q) in &pb {
                    let meet = a.iter().any(|x| *x >= 1 && *x <= i && b.contains(x));
                    if !meet {
                        s += p * q;
                    }
                }
            }
            assert!((s - surv[i as usize]).abs() < 1e-13, "i={i}: {s} vs {}", surv[i as usize]);
        }
    }

    #[test]
    fn identity_below_martingale_relation() {
        for law in [presets::lazy_nn(), presets::one_two_jump(), presets::constant_drift()] {
            for s in 0..5 {
                let env = Environment::new(&law, s);
                let r = corrector_identity_residuals(&env, 15).unwrap();
                assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");
            }
        }
    }

    #[test]
    fn exponential_bound_examples() {
        let law = presets::deterministic(&[1], &[1]);
        let env = Environment::new(&law, 0);
        let c = exp_bound_check(&env, v1(2), 5, 0.0, &Default::default()).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15 && (c.rhs - 1.0).abs() < 1e-15);
        let l = lambda0(&law);
        let c = exp_bound_check(&env, v1(2), 5, l, &Default::default()).unwrap();
        assert!((c.lhs - (-l * 7.0).exp()).abs() < 1e-15);
        assert!(c.holds());
        assert!(exp_bound_check(&env, v1(0), 1, 2.0 * l, &Default::default()).is_err());
    }
}
