//! Finite-sample diagnostics for the limit theorems.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::env::{Environment, EnvironmentLaw, JumpKernel, LatticeVector};
use crate::error::{Result, RwreError};
use crate::exactq::{quenched_mean, quenched_mean_series_1d, PropagationConfig};
use crate::rng::{derive_seed, tags};
use crate::walk::{RegenerationBlock, Walker};

/// Asymptotic 1% critical value of √n·KS.
pub const KS_CRIT_1PCT: f64 = 1.6276;
pub const MIN_NORMALITY_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub test: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    /// Passes iff |statistic| ≤ threshold.
    pub fn within(test: &str, statistic: f64, threshold: f64) -> Self {
        Self { test: test.into(), statistic, threshold, pass: statistic.abs() <= threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// KS distance to N(0, σ²) with σ² the target or sample variance; NaN if σ² = 0.
    pub ks_statistic: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Standard error of the sample variance, from the fourth central moment.
pub fn variance_se(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2).max(0.0) / n).sqrt()
}

fn ks_to_normal(x: &[f64], sd: f64) -> f64 {
    let normal = Normal::new(0.0, sd).expect("positive sd");
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, v)| {
            let f = normal.cdf(*v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn summarize(x: &[f64], ks_variance: Option<f64>) -> SampleSummary {
    let n = x.len();
    let nf = n as f64;
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / nf;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / nf;
    let (skewness, excess_kurtosis) = if m2 > 0.0 { (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0) } else { (0.0, 0.0) };
    let var = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let ks_var = ks_variance.unwrap_or(var);
    let ks_statistic = if ks_var > 0.0 { ks_to_normal(x, ks_var.sqrt()) } else { f64::NAN };
    SampleSummary { n, mean: m, variance: var, skewness, excess_kurtosis, ks_statistic }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalityResult {
    pub summary: SampleSummary,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

/// Skewness and excess kurtosis within 4 standard errors of 0, KS against
/// N(0, σ²) below the 1% critical value, and, if a target is given, the sample
/// variance within 4 standard errors of it.
pub fn normality_check(x: &[f64], target_variance: Option<f64>) -> Result<NormalityResult> {
    if x.len() < MIN_NORMALITY_SAMPLES {
        return Err(RwreError::InvalidParameter(format!(
            "normality check needs at least {MIN_NORMALITY_SAMPLES} samples, got {}",
            x.len()
        )));
    }
    let summary = summarize(x, target_variance);
    let nf = x.len() as f64;
    let mut verdicts = Vec::new();
    if summary.variance == 0.0 || target_variance == Some(0.0) {
        let degenerate_ok = target_variance == Some(0.0) && x.iter().all(|v| v.abs() <= 1e-12);
        verdicts.push(Verdict {
            test: "degenerate".into(),
            statistic: summary.variance,
            threshold: 0.0,
            pass: degenerate_ok,
        });
    } else {
        verdicts.push(Verdict::within("skewness", summary.skewness, 4.0 * (6.0 / nf).sqrt()));
        verdicts.push(Verdict::within("excess_kurtosis", summary.excess_kurtosis, 4.0 * (24.0 / nf).sqrt()));
        verdicts.push(Verdict::within("ks", summary.ks_statistic, KS_CRIT_1PCT / nf.sqrt()));
        if let Some(t) = target_variance {
            verdicts.push(Verdict::within("variance_vs_target", summary.variance - t, 4.0 * variance_se(x)));
        }
    }
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(NormalityResult { summary, verdicts, pass })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuenchedClt {
    pub n: usize,
    pub quenched_mean: f64,
    pub samples: Vec<f64>,
    pub variance: f64,
    pub variance_se: f64,
}

/// Samples of (X_n − E^ω_0 X_n)/√n under P^ω_0 with the exact quenched mean.
pub fn quenched_clt_check(
    env: &Environment<'_, EnvironmentLaw>,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<QuenchedClt> {
    let qm = quenched_mean(env, LatticeVector::from_1d(0), n, &PropagationConfig::default())?.mean[0];
    let sn = (n as f64).sqrt();
    let samples: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut w = Walker::new(*env, LatticeVector::from_1d(0), derive_seed(seed, tags::WALK, r as u64));
            for _ in 0..n {
                w.step();
            }
            (w.position().get(0) as f64 - qm) / sn
        })
        .collect();
    let var = samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64;
    let var_se = (samples.iter().map(|v| (v * v - var).powi(2)).sum::<f64>() / samples.len() as f64).sqrt()
        / (samples.len() as f64).sqrt();
    Ok(QuenchedClt { n, quenched_mean: qm, samples, variance: var, variance_se: var_se })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TightnessReport {
    pub grid: Vec<usize>,
    /// c_n = (E^ω_0 X_n − n v)/√n.
    pub c: Vec<f64>,
    pub range_top_half: f64,
    pub floor: f64,
    /// True when the top-half range exceeds 4 × floor.
    pub non_stabilizing: bool,
}

/// Numerical floor of exactly computed, pruned quenched means.
pub const EXACT_MEAN_FLOOR: f64 = 1e-9;

pub fn tightness_diagnostic(env: &Environment<'_, EnvironmentLaw>, grid: &[usize], v: f64) -> Result<TightnessReport> {
    let means = quenched_mean_series_1d(env, grid, &PropagationConfig::default())?;
    let c: Vec<f64> = grid.iter().zip(&means).map(|(&n, m)| (m - n as f64 * v) / (n as f64).sqrt()).collect();
    let top = &c[c.len() / 2..];
    let hi = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = top.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = hi - lo;
    Ok(TightnessReport {
        grid: grid.to_vec(),
        c,
        range_top_half: range,
        floor: EXACT_MEAN_FLOOR,
        non_stabilizing: range > 4.0 * EXACT_MEAN_FLOOR,
    })
}

/// Lag-k sample autocorrelation.
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let m = mean(x);
    let den: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    if den == 0.0 {
        return 0.0;
    }
    let num: f64 = x.windows(lag + 1).map(|w| (w[0] - m) * (w[lag] - m)).sum();
    num / den
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LagRow {
    pub lag: usize,
    pub duration: f64,
    /// One entry per coordinate of the displacement.
    pub displacement: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockIndependence {
    pub n_blocks: usize,
    pub lags: Vec<LagRow>,
    pub threshold: f64,
    pub chi_square: f64,
    pub chi_square_dof: usize,
    pub chi_square_p: f64,
    pub pass: bool,
}

/// Duration categories with roughly balanced counts, at most four.
fn duration_categories(d: &[u64]) -> Vec<u64> {
    let mut s = d.to_vec();
    s.sort_unstable();
    let mut cuts: Vec<u64> = (1..4).map(|q| s[q * s.len() / 4]).collect();
    cuts.dedup();
    cuts.retain(|c| *c > s[0]);
    cuts
}

/// Lag-1..5 autocorrelations of durations and displacement coordinates, each
/// within 4/√N of 0; a contingency chi-square on consecutive duration
/// categories is reported alongside.
pub fn block_independence_test(blocks: &[&RegenerationBlock]) -> Result<BlockIndependence> {
    let n = blocks.len();
    if n < 1000 {
        return Err(RwreError::InvalidParameter(format!("need at least 1000 blocks, got {n}")));
    }
    let dur: Vec<f64> = blocks.iter().map(|b| b.duration as f64).collect();
    let dim = blocks[0].displacement.dim();
    let disp: Vec<Vec<f64>> =
        (0..dim).map(|k| blocks.iter().map(|b| b.displacement.get(k) as f64).collect()).collect();
    let threshold = 4.0 / (n as f64).sqrt();
    let lags: Vec<LagRow> = (1..=5)
        .map(|lag| LagRow {
            lag,
            duration: autocorrelation(&dur, lag),
            displacement: disp.iter().map(|x| autocorrelation(x, lag)).collect(),
        })
        .collect();
    let pass = lags.iter().all(|r| r.duration.abs() <= threshold && r.displacement.iter().all(|a| a.abs() <= threshold));

    let raw: Vec<u64> = blocks.iter().map(|b| b.duration).collect();
    let cuts = duration_categories(&raw);
    let cat = |d: u64| cuts.iter().filter(|c| d >= **c).count();
    let k = cuts.len() + 1;
    let (chi_square, chi_square_dof, chi_square_p) = if k < 2 {
        (0.0, 0, 1.0)
    } else {
        let mut table = vec![vec![0.0; k]; k];
        for w in raw.windows(2) {
            table[cat(w[0])][cat(w[1])] += 1.0;
        }
        let total = (n - 1) as f64;
        let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
        let cols: Vec<f64> = (0..k).map(|j| table.iter().map(|r| r[j]).sum()).collect();
        let mut chi = 0.0;
        for i in 0..k {
            for j in 0..k {
                let e = rows[i] * cols[j] / total;
                if e > 0.0 {
                    chi += (table[i][j] - e).powi(2) / e;
                }
            }
        }
        let dof = (k - 1) * (k - 1);
        let p = 1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(chi);
        (chi, dof, p)
    };
    Ok(BlockIndependence { n_blocks: n, lags, threshold, chi_square, chi_square_dof, chi_square_p, pass })
}

/// Ordinary least squares slope and its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let se = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, se)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub h: f64,
    pub tail: f64,
    pub std_err: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub p_bar: f64,
    pub rows: Vec<TailRow>,
    /// Fitted log-log slope over rows with a positive tail; NaN if fewer than 3.
    pub slope: f64,
    pub slope_se: f64,
    pub pass: bool,
}

/// Annealed samples of X_n·û − n v·û from fresh environments.
pub fn annealed_displacements<K: JumpKernel + ?Sized>(law: &K, n: usize, samples: usize, v_proj: f64, seed: u64) -> Vec<f64> {
    let u = law.u_hat();
    (0..samples)
        .into_par_iter()
        .map(|r| {
            let env = Environment::new(law, derive_seed(seed, tags::ENV, r as u64));
            let mut w = Walker::new(env, LatticeVector::zero(law.dim()), derive_seed(seed, tags::WALK, r as u64));
            for _ in 0..n {
                w.step();
            }
            w.position().dot(&u) as f64 - n as f64 * v_proj
        })
        .collect()
}

/// Empirical P(|X_n − nv| > h) against the envelope C h^{−p̄} n^{p̄/2}, with C
/// calibrated at the first grid point; passes if every point lies below the
/// envelope within 3 binomial standard errors.
pub fn annealed_tail_check(deviations: &[f64], n: usize, h_grid: &[f64], p_bar: f64) -> TailReport {
    let m = deviations.len() as f64;
    let tails: Vec<(f64, f64)> = h_grid
        .iter()
        .map(|h| {
            let t = deviations.iter().filter(|d| d.abs() > *h).count() as f64 / m;
            (t, (t * (1.0 - t) / m).sqrt())
        })
        .collect();
    let (t0, s0) = tails[0];
    let c = (t0 + 3.0 * s0) * h_grid[0].powf(p_bar) / (n as f64).powf(p_bar / 2.0);
    let rows: Vec<TailRow> = h_grid
        .iter()
        .zip(&tails)
        .map(|(h, (t, s))| TailRow { h: *h, tail: *t, std_err: *s, envelope: c * h.powf(-p_bar) * (n as f64).powf(p_bar / 2.0) })
        .collect();
    let pass = rows.iter().all(|r| r.tail <= r.envelope + 3.0 * r.std_err);
    let pos: Vec<&TailRow> = rows.iter().filter(|r| r.tail > 0.0).collect();
    let (slope, slope_se) = if pos.len() >= 3 {
        let lx: Vec<f64> = pos.iter().map(|r| r.h.ln()).collect();
        let ly: Vec<f64> = pos.iter().map(|r| r.tail.ln()).collect();
        ols_slope(&lx, &ly)
    } else {
        (f64::NAN, f64::NAN)
    };
    TailReport { n, p_bar, rows, slope, slope_se, pass }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeRow {
    pub cap: u64,
    pub mean: f64,
    pub std_err: f64,
    /// Mean and standard error of the paired increment over the previous cap.
    pub increment: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub samples: usize,
    pub rows: Vec<ProbeRow>,
    /// Every paired increment exceeds 4 standard errors.
    pub strictly_increasing: bool,
}

/// First time the û-projection gains `threshold`, capped at `cap`.
pub fn sigma1_capped<K: JumpKernel + ?Sized>(env: Environment<'_, K>, walk_seed: u64, cap: u64) -> u64 {
    let u = env.law().u_hat();
    let mut w = Walker::new(env, LatticeVector::zero(u.dim()), walk_seed);
    let mut n = 0;
    while n < cap {
        n += 1;
        if w.step().dot(&u) > 0 {
            break;
        }
    }
    n
}

/// Truncated means E[σ_1 ∧ cap] from one set of samples, so that increments
/// between caps are paired differences.
pub fn sigma1_divergence_probe<K: JumpKernel + ?Sized>(law: &K, caps: &[u64], samples: usize, seed: u64) -> ProbeReport {
    let cap_max = *caps.iter().max().expect("nonempty caps");
    let k = caps.len();
    const CHUNK: usize = 1 << 14;
    let n_chunks = samples.div_ceil(CHUNK);
    // Per cap: Σ x, Σ x²; per increment: Σ d, Σ d².
    let sums = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0f64; 4 * k];
            for r in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let env = Environment::new(law, derive_seed(seed, tags::ENV, r as u64));
                let s = sigma1_capped(env, derive_seed(seed, tags::WALK, r as u64), cap_max);
                for (i, &cap) in caps.iter().enumerate() {
                    let x = s.min(cap) as f64;
                    acc[2 * i] += x;
                    acc[2 * i + 1] += x * x;
                    if i > 0 {
                        let d = x - s.min(caps[i - 1]) as f64;
                        acc[2 * k + 2 * i] += d;
                        acc[2 * k + 2 * i + 1] += d * d;
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![0.0; 4 * k], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let m = samples as f64;
    let ms = |s: f64, s2: f64| {
        let mu = s / m;
        (mu, ((s2 / m - mu * mu).max(0.0) / (m - 1.0)).sqrt())
    };
    let rows: Vec<ProbeRow> = (0..k)
        .map(|i| {
            let (mean, std_err) = ms(sums[2 * i], sums[2 * i + 1]);
            let increment = (i > 0).then(|| ms(sums[2 * k + 2 * i], sums[2 * k + 2 * i + 1]));
            ProbeRow { cap: caps[i], mean, std_err, increment }
        })
        .collect();
    let strictly_increasing = rows.iter().filter_map(|r| r.increment).all(|(d, se)| d > 4.0 * se);
    ProbeReport { samples, rows, strictly_increasing }
}

/// Standard normal samples for calibration tests.
pub fn gaussian_samples(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = crate::rng::walk_rng(seed);
    let normal = rand_distr::StandardNormal;
    (0..n).map(|_| rng.sample::<f64, _>(normal)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets;
    use crate::walk::{sample_blocks, BlockConfig};

    #[test]
    fn normality_calibration() {
        let x = gaussian_samples(5000, 1);
        assert!(normality_check(&x, None).unwrap().pass);
        assert!(normality_check(&x, Some(1.0)).unwrap().pass);
        let e: Vec<f64> = gaussian_samples(5000, 2).iter().map(|v| v.exp()).collect();
        assert!(!normality_check(&e, None).unwrap().pass);
        assert!(!normality_check(&x, Some(2.0)).unwrap().pass);
    }

    #[test]
    fn constant_samples() {
        let z = vec![0.0; 2000];
        assert!(!normality_check(&z, None).unwrap().pass);
        assert!(normality_check(&z, Some(0.0)).unwrap().pass);
        assert!(normality_check(&z[..10], None).is_err());
    }

    #[test]
    fn independence_calibration() {
        let law = presets::lazy_nn();
        let cfg = BlockConfig { blocks_per_replicate: 5000, ..Default::default() };
        let s = sample_blocks(&law, 5000, 3, &cfg);
        let b: Vec<_> = s.iter().collect();
        assert!(block_independence_test(&b).unwrap().pass);
        // Alternative: a strongly autocorrelated duration sequence.
        let mut fake = Vec::new();
        let mut d = 1u64;
        for i in 0..5000u64 {
            if i % 50 == 0 {
                d = 1 + (i / 50) % 7;
            }
            fake.push(RegenerationBlock { duration: d, increments: vec![], displacement: LatticeVector::from_1d(1) });
        }
        let fr: Vec<_> = fake.iter().collect();
        assert!(!block_independence_test(&fr).unwrap().pass);
    }

    #[test]
    fn ols_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let (s, se) = ols_slope(&x, &y);
        assert!((s - 2.0).abs() < 1e-12 && se < 1e-10);
    }

    #[test]
    fn probe_plateaus_for_finite_mean() {
        let law = presets::lazy_nn();
        let r = sigma1_divergence_probe(&law, &[100, 1000], 20_000, 5);
        assert!((r.rows[0].mean - 1.5).abs() < 4.0 * r.rows[0].std_err);
        assert!(!r.strictly_increasing);
        let det = presets::deterministic(&[1], &[1]);
        let r = sigma1_divergence_probe(&det, &[100, 1000], 100, 5);
        assert!(r.rows.iter().all(|row| row.mean == 1.0));
    }

    #[test]
    fn tightness_regimes() {
        let law = presets::constant_drift();
        let env = Environment::new(&law, 1);
        let grid: Vec<usize> = (1..=20).map(|k| 50 * k).collect();
        let t = tightness_diagnostic(&env, &grid, 1.0).unwrap();
        assert!(t.c.iter().all(|c| c.abs() < 1e-10));
        assert!(!t.non_stabilizing);
        let law = presets::lazy_nn();
        let env = Environment::new(&law, 1);
        let t = tightness_diagnostic(&env, &grid, 2.0 / 3.0).unwrap();
        assert!(t.non_stabilizing);
    }
}
