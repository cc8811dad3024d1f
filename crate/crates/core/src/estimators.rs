//! Limit quantities: velocity, diffusion matrices, one-dimensional
//! coefficients, invariant-measure functionals and degeneracy subspaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{
    check_hypothesis_e, event_holds, Environment, EnvironmentLaw, JumpKernel, LatticeVector, OneDimLaw, SiteLaw,
    WindowEvent,
};
use crate::error::{Result, RwreError};
use crate::exactq::{corrector_at, quenched_mean, quenched_mean_series_1d, CorrectorConfig, PropagationConfig, SiteStrip};
use crate::linalg;
use crate::rng::{derive_seed, tags};
use crate::stats::{normality_check, ols_slope, variance, variance_se, NormalityResult};
use crate::walk::{two_walker_common_points, RegenerationBlock, Walker};

pub type Matrix = Vec<Vec<f64>>;

fn zeros(d: usize) -> Matrix {
    vec![vec![0.0; d]; d]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VelocityEstimate {
    pub v: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_blocks: usize,
}

/// v̂ = mean displacement / mean duration, with delta-method standard errors.
pub fn velocity(blocks: &[&RegenerationBlock]) -> Result<VelocityEstimate> {
    let n = blocks.len();
    if n < 2 {
        return Err(RwreError::InvalidParameter("velocity needs at least two blocks".into()));
    }
    let d = blocks[0].displacement.dim();
    let nf = n as f64;
    let t_bar = blocks.iter().map(|b| b.duration as f64).sum::<f64>() / nf;
    let mut v = vec![0.0; d];
    for b in blocks {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk += b.displacement.get(k) as f64;
        }
    }
    for vk in v.iter_mut() {
        *vk /= nf * t_bar;
    }
    let std_err = (0..d)
        .map(|k| {
            let r: Vec<f64> = blocks.iter().map(|b| b.displacement.get(k) as f64 - v[k] * b.duration as f64).collect();
            (variance(&r) / nf).sqrt() / t_bar
        })
        .collect();
    Ok(VelocityEstimate { v, std_err, n_blocks: n })
}

/// How the velocity inside the diffusion estimator was obtained.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocitySource {
    Exact(Vec<f64>),
    Estimated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffusionReport {
    pub v_hat: Vec<f64>,
    pub v_exact: bool,
    pub d_hat: Matrix,
    pub std_err: Matrix,
    pub n_blocks: usize,
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue ≥ −1e-9·trace.
    pub psd: bool,
    #[serde(skip)]
    pub jackknife: Vec<Matrix>,
}

/// Block sums for the ratio estimator.
#[derive(Clone)]
struct Sums {
    t: f64,
    tt: f64,
    x: Vec<f64>,
    xt: Vec<f64>,
    xx: Matrix,
}

impl Sums {
    fn new(d: usize) -> Self {
        Self { t: 0.0, tt: 0.0, x: vec![0.0; d], xt: vec![0.0; d], xx: zeros(d) }
    }

    fn add(&mut self, b: &RegenerationBlock, sign: f64) {
        let t = b.duration as f64;
        self.t += sign * t;
        self.tt += sign * t * t;
        let d = self.x.len();
        for i in 0..d {
            let xi = b.displacement.get(i) as f64;
            self.x[i] += sign * xi;
            self.xt[i] += sign * xi * t;
            for j in 0..d {
                self.xx[i][j] += sign * xi * b.displacement.get(j) as f64;
            }
        }
    }

    fn sub(&self, o: &Sums) -> Sums {
        let d = self.x.len();
        let mut s = self.clone();
        s.t -= o.t;
        s.tt -= o.tt;
        for i in 0..d {
            s.x[i] -= o.x[i];
            s.xt[i] -= o.xt[i];
            for j in 0..d {
                s.xx[i][j] -= o.xx[i][j];
            }
        }
        s
    }

    fn velocity(&self) -> Vec<f64> {
        self.x.iter().map(|x| x / self.t).collect()
    }

    /// Σ (X − vT)(X − vT)^t / Σ T.
    fn diffusion(&self, v: &[f64]) -> Matrix {
        let d = v.len();
        let mut m = zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[i][j] = (self.xx[i][j] - v[i] * self.xt[j] - self.xt[i] * v[j] + v[i] * v[j] * self.tt) / self.t;
            }
        }
        m
    }
}

/// Number of jackknife groups.
pub const JACKKNIFE_GROUPS: usize = 100;

/// 𝔇̂ = mean of (ΔX − vΔσ)(ΔX − vΔσ)^t over blocks divided by mean duration,
/// with delete-a-group jackknife standard errors.
pub fn annealed_diffusion(blocks: &[&RegenerationBlock], v: &VelocitySource) -> Result<DiffusionReport> {
    let n = blocks.len();
    if n < 2 {
        return Err(RwreError::InvalidParameter("diffusion needs at least two blocks".into()));
    }
    let d = blocks[0].displacement.dim();
    let g = JACKKNIFE_GROUPS.min(n);
    let mut groups = vec![Sums::new(d); g];
    for (k, b) in blocks.iter().enumerate() {
        groups[k * g / n].add(b, 1.0);
    }
    let mut total = Sums::new(d);
    for b in blocks {
        total.add(b, 1.0);
    }
    let pick_v = |s: &Sums| match v {
        VelocitySource::Exact(v) => v.clone(),
        VelocitySource::Estimated => s.velocity(),
    };
    let v_hat = pick_v(&total);
    let d_hat = total.diffusion(&v_hat);
    let jackknife: Vec<Matrix> = groups
        .iter()
        .map(|gs| {
            let s = total.sub(gs);
            s.diffusion(&pick_v(&s))
        })
        .collect();
    let gf = g as f64;
    let mut std_err = zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mean = jackknife.iter().map(|m| m[i][j]).sum::<f64>() / gf;
            let ss: f64 = jackknife.iter().map(|m| (m[i][j] - mean).powi(2)).sum();
            std_err[i][j] = ((gf - 1.0) / gf * ss).sqrt();
        }
    }
    let mat = DMatrix::from_fn(d, d, |i, j| 0.5 * (d_hat[i][j] + d_hat[j][i]));
    let eig = SymmetricEigen::new(mat);
    let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let trace: f64 = (0..d).map(|i| d_hat[i][i]).sum();
    Ok(DiffusionReport {
        v_hat,
        v_exact: matches!(v, VelocitySource::Exact(_)),
        d_hat,
        std_err,
        n_blocks: n,
        min_eigenvalue,
        psd: min_eigenvalue >= -1e-9 * trace.abs(),
        jackknife,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegeneracySubspace {
    pub j_set: Vec<LatticeVector>,
    pub rank: usize,
    /// Integer basis of span{x − y : x, y ∈ 𝒥}.
    pub span_basis: Vec<Vec<i64>>,
    /// Integer basis of its orthogonal complement.
    pub complement_basis: Vec<Vec<i64>>,
}

pub fn degeneracy_subspace(site: &SiteLaw) -> DegeneracySubspace {
    let j_set = check_hypothesis_e(site).j_set;
    let d = site.dim();
    let mut rows = Vec::new();
    for x in &j_set {
        for y in &j_set {
            if x < y {
                rows.push((*x - *y).coords().to_vec());
            }
        }
    }
    DegeneracySubspace {
        rank: linalg::rank(&rows, d),
        span_basis: linalg::row_space_basis(&rows, d),
        complement_basis: linalg::orthogonal_complement(&rows, d),
        j_set,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadraticFormCheck {
    pub u: Vec<f64>,
    pub value: f64,
    pub std_err: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// |u^t 𝔇̂ u| ≤ 4·se + 1e-12·trace for every unit u in the complement basis.
pub fn verify_degeneracy(report: &DiffusionReport, sub: &DegeneracySubspace) -> Vec<QuadraticFormCheck> {
    let quad = |m: &Matrix, u: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                s += u[i] * m[i][j] * u[j];
            }
        }
        s
    };
    let trace: f64 = (0..report.d_hat.len()).map(|i| report.d_hat[i][i]).sum();
    sub.complement_basis
        .iter()
        .map(|b| {
            let norm = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
            let u: Vec<f64> = b.iter().map(|x| *x as f64 / norm).collect();
            let value = quad(&report.d_hat, &u);
            let g = report.jackknife.len() as f64;
            let reps: Vec<f64> = report.jackknife.iter().map(|m| quad(m, &u)).collect();
            let mean = reps.iter().sum::<f64>() / g.max(1.0);
            let std_err = if g > 1.0 {
                ((g - 1.0) / g * reps.iter().map(|r| (r - mean).powi(2)).sum::<f64>()).sqrt()
            } else {
                0.0
            };
            let threshold = 4.0 * std_err + 1e-12 * trace.abs();
            QuadraticFormCheck { u, value, std_err, threshold, pass: value.abs() <= threshold }
        })
        .collect()
}

/// Exact velocity when it has a closed form over the atom mixture.
pub fn exact_velocity(law: &EnvironmentLaw) -> Option<Vec<f64>> {
    if let Ok(od) = law.one_dim() {
        return Some(vec![od.velocity()]);
    }
    let charged: Vec<_> = law.site_law().charged().collect();
    if charged.len() == 1 {
        return Some(charged[0].2.drift());
    }
    restricted_path_coefficients(law).ok().map(|r| r.v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffMethod {
    Formula,
    Mc,
    Alt,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OneDimCoefficients {
    pub kappa_m_sq: f64,
    pub kappa_q_sq: f64,
    pub d_total: f64,
    pub v: f64,
    pub method: CoeffMethod,
    pub kappa_m_se: f64,
    pub kappa_q_se: f64,
    pub truncation_index: usize,
    pub tail_bound: f64,
    pub n_samples: usize,
}

/// 𝔇 = E_0[(X_σ1 − vσ_1)²]/E_0σ_1 in one dimension: σ_1 is the geometric
/// sojourn at 0 and X_σ1 the independent first nonzero jump.
pub fn exact_diffusion_1d(od: &OneDimLaw) -> f64 {
    let v = od.velocity();
    od.atoms
        .iter()
        .filter(|a| a.weight > 0.0)
        .map(|a| {
            let p = 1.0 - a.pi[0];
            let ey: f64 = a.r.iter().enumerate().map(|(y, r)| y as f64 * r).sum();
            let ey2: f64 = a.r.iter().enumerate().map(|(y, r)| (y * y) as f64 * r).sum();
            let es = 1.0 / p;
            let es2 = (2.0 - p) / (p * p);
            a.weight * (ey2 - 2.0 * v * ey * es + v * v * es2)
        })
        .sum::<f64>()
        / od.mean_rho()
}

/// 𝔼[G²] with G = ρ (D − v) = E^ω_0(X_σ1 − vσ_1).
pub fn mean_g_squared(od: &OneDimLaw) -> f64 {
    let v = od.velocity();
    od.atoms.iter().filter(|a| a.weight > 0.0).map(|a| a.weight * (a.rho * (a.drift - v)).powi(2)).sum()
}

/// 𝔼_∞ π_0k for k = 0..=R.
fn pinfty_kernel(od: &OneDimLaw) -> Vec<f64> {
    (0..=od.max_jump).map(|k| od.pinfty_expect(|a| a.pi[k])).collect()
}

/// Series tolerance on the absolute tail of the i-sums.
pub const SERIES_TOL: f64 = 1e-14;
const SERIES_CAP: usize = 1_000_000;

/// κ_m², κ_q² and 𝔇 exactly over the finite atom mixture.
///
/// With W_i = (P_1(V_i), …, P_R(V_i)) one has P_0(V_i) = r(ω_0)·W_i for
/// i ≥ 1, W_i independent of ω_0, and the second moments
/// S_i = 𝔼[W_i W_i^t] obey S_1 = e_1 e_1^t, S_{i+1} = Σ_a w_a M_a S_i M_a^t
/// with M_a the companion matrix of r_a. Cross terms between distinct sites
/// vanish because 𝔼G = 0, so both series reduce to quadratic forms in S_i.
pub fn kappa_coeffs_formula(law: &EnvironmentLaw) -> Result<OneDimCoefficients> {
    let od = law.one_dim()?;
    let r = od.max_jump;
    let v = od.velocity();
    let erho = od.mean_rho();
    let eg2 = mean_g_squared(od);
    let c = pinfty_kernel(od);
    let atoms: Vec<_> = od.atoms.iter().filter(|a| a.weight > 0.0).collect();
    let rvec = |a: &crate::env::OneDimAtom| DVector::from_fn(r, |k, _| a.r[k + 1]);
    let beta: Vec<DVector<f64>> =
        atoms.iter().map(|a| rvec(a) * (1.0 - c[0]) - DVector::from_fn(r, |k, _| c[k + 1])).collect();
    // γ_{a,y} = r_a − e_y, weighted by w_a φ_y(a) with φ_y = ρ π_0y.
    let gamma: Vec<Vec<(f64, DVector<f64>)>> = (1..=r)
        .map(|y| {
            atoms
                .iter()
                .map(|a| {
                    let mut g = rvec(a);
                    g[y - 1] -= 1.0;
                    (a.weight * a.rho * a.pi[y], g)
                })
                .collect()
        })
        .collect();
    let companions: Vec<(f64, DMatrix<f64>)> = atoms
        .iter()
        .map(|a| {
            let mut m = DMatrix::zeros(r, r);
            for k in 0..r {
                m[(0, k)] = a.r[k + 1];
            }
            for k in 1..r {
                m[(k, k - 1)] = 1.0;
            }
            (a.weight, m)
        })
        .collect();

    let mut s = DMatrix::zeros(r, r);
    s[(0, 0)] = 1.0;
    let mut sum_m = (1.0 - c[0]).powi(2);
    let mut sum_q = vec![0.0; r];
    let mut history: Vec<f64> = Vec::new();
    let mut tail_bound = 0.0;
    let mut index = 0;
    for i in 1..SERIES_CAP {
        let tm: f64 = atoms.iter().zip(&beta).map(|(a, b)| a.weight * (b.transpose() * &s * b)[(0, 0)]).sum();
        let mut tq_total = 0.0;
        for (y, gs) in gamma.iter().enumerate() {
            let t: f64 = gs.iter().map(|(w, g)| w * (g.transpose() * &s * g)[(0, 0)]).sum();
            sum_q[y] += t;
            tq_total += t;
        }
        sum_m += tm;
        let t = tm.abs() + tq_total.abs();
        history.push(t);
        index = i;
        if t <= 1e-300 {
            tail_bound = 0.0;
            break;
        }
        let w = 8 * r;
        if history.len() > w {
            let prev = history[history.len() - 1 - w];
            let ratio = if prev > 0.0 { (t / prev).powf(1.0 / w as f64) } else { 1.0 };
            if ratio < 1.0 {
                let tail = t * ratio / (1.0 - ratio);
                if tail < SERIES_TOL {
                    tail_bound = tail;
                    break;
                }
            }
            // Rounding floor: further terms are below double precision of the sums.
            if t < 1e-17 * (sum_m.abs() + sum_q.iter().sum::<f64>().abs()) {
                tail_bound = t * w as f64;
                break;
            }
        }
        if i + 1 == SERIES_CAP {
            return Err(RwreError::TruncationFailed { tol: SERIES_TOL, cap: SERIES_CAP, achieved: t });
        }
        let mut next = DMatrix::zeros(r, r);
        for (wt, m) in &companions {
            next += m * &s * m.transpose() * *wt;
        }
        s = next;
    }
    let kappa_m_sq = eg2 / v * sum_m;

    let mut kq = 0.0;
    for y in 0..=r {
        let yv = y as f64 - v;
        let e_phi: f64 = atoms.iter().map(|a| a.weight * a.rho * a.pi[y]).sum();
        kq += e_phi * yv * yv;
        if y >= 1 {
            let cross: f64 = atoms.iter().map(|a| a.weight * a.rho * a.pi[y] * (a.drift - v) * a.rho).sum();
            let sq0: f64 = atoms.iter().map(|a| a.weight * a.rho * a.pi[y] * ((a.drift - v) * a.rho).powi(2)).sum();
            kq += -2.0 * yv * cross + sq0 + eg2 * sum_q[y - 1];
        }
    }
    let kappa_q_sq = kq / erho;
    Ok(OneDimCoefficients {
        kappa_m_sq,
        kappa_q_sq,
        d_total: exact_diffusion_1d(od),
        v,
        method: CoeffMethod::Formula,
        kappa_m_se: 0.0,
        kappa_q_se: 0.0,
        truncation_index: index,
        tail_bound: tail_bound * eg2 / v.min(erho).max(1e-300),
        n_samples: 0,
    })
}

/// Per-environment Monte Carlo of the defining series: exact hitting
/// probabilities and the exact corrector in each sampled ω, averaged over
/// `n_envs` environments. The i-series is cut at `series_len`.
pub fn kappa_coeffs_mc(law: &EnvironmentLaw, n_envs: usize, series_len: usize, seed: u64) -> Result<OneDimCoefficients> {
    let od = law.one_dim()?;
    let r = od.max_jump;
    let v = od.velocity();
    let erho = od.mean_rho();
    let eg2 = mean_g_squared(od);
    let c = pinfty_kernel(od);
    let ccfg = CorrectorConfig::default();
    let per_env = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env = Environment::new(law, derive_seed(seed, tags::OMEGA_SAMPLE, e as u64));
            let mut strip = SiteStrip::new(&env, 0)?;
            let mut bracket_sum = 0.0;
            for i in 0..series_len {
                // h[k] = P_k(V_i) for k = 0..=i by backward recursion.
                let mut h = vec![0.0; i + 1 + r];
                h[i] = 1.0;
                for k in (0..i).rev() {
                    let site = strip.at(k);
                    h[k] = (1..=r).map(|y| site.r[y] * h[k + y]).sum();
                }
                let b = h[0] - (0..=i.min(r)).map(|k| h[k] * c[k]).sum::<f64>();
                bracket_sum += b * b;
            }
            let site0 = strip.at(0);
            let mut chi = vec![0.0; r + 1];
            for y in 1..=r {
                chi[y] = chi[y - 1] + corrector_at(&env, y as i64 - 1, Some(v), &ccfg)?.delta_value;
            }
            let q: f64 = (0..=r).map(|y| site0.pi[y] * (y as f64 - v - chi[y]).powi(2)).sum::<f64>() * site0.rho;
            Ok((bracket_sum, q))
        })
        .collect::<Result<Vec<_>>>()?;
    let (bm, bq): (Vec<f64>, Vec<f64>) = per_env.into_iter().unzip();
    let nf = n_envs as f64;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / nf;
    Ok(OneDimCoefficients {
        kappa_m_sq: eg2 / v * mean(&bm),
        kappa_q_sq: mean(&bq) / erho,
        d_total: exact_diffusion_1d(od),
        v,
        method: CoeffMethod::Mc,
        kappa_m_se: eg2 / v * (variance(&bm) / nf).sqrt(),
        kappa_q_se: (variance(&bq) / nf).sqrt() / erho,
        truncation_index: series_len,
        tail_bound: f64::NAN,
        n_samples: n_envs,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaAlt {
    pub kappa_m_sq: f64,
    pub std_err: f64,
    /// Estimated E_{0,0}(L).
    pub mean_l: f64,
    pub mean_l_se: f64,
    pub n_envs: usize,
}

/// κ_m² = v 𝔼[G²] / E_{0,0}(L), with E_{0,0}(L) the mean spacing of common
/// points of two walks in one environment, estimated over `n_envs`
/// environments up to `horizon`.
pub fn kappa_m_alt(law: &EnvironmentLaw, n_envs: usize, horizon: i64, seed: u64) -> Result<KappaAlt> {
    let od = law.one_dim()?;
    let v = od.velocity();
    let eg2 = mean_g_squared(od);
    let per = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env = Environment::new(law, derive_seed(seed, tags::ENV, e as u64));
            let pts = two_walker_common_points(
                &env,
                (derive_seed(seed, tags::WALK, e as u64), derive_seed(seed, tags::WALK_PAIR, e as u64)),
                horizon,
            )?;
            Ok((*pts.last().unwrap() as f64, pts.len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let sl: f64 = per.iter().map(|p| p.0).sum();
    let sn: f64 = per.iter().map(|p| p.1).sum();
    let mean_l = sl / sn;
    let nf = n_envs as f64;
    let resid: Vec<f64> = per.iter().map(|(l, c)| l - mean_l * c).collect();
    let mean_l_se = (variance(&resid) / nf).sqrt() / (sn / nf);
    let k = v * eg2 / mean_l;
    Ok(KappaAlt { kappa_m_sq: k, std_err: k * mean_l_se / mean_l, mean_l, mean_l_se, n_envs })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub kappa_sum: f64,
    pub d_total: f64,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// |κ_m² + κ_q² − 𝔇| ≤ 4·combined se + `abs_tol`.
pub fn decomposition_check(coeffs: &OneDimCoefficients, d_total: f64, d_se: f64, abs_tol: f64) -> DecompositionCheck {
    let se = (coeffs.kappa_m_se.powi(2) + coeffs.kappa_q_se.powi(2) + d_se * d_se).sqrt();
    let kappa_sum = coeffs.kappa_m_sq + coeffs.kappa_q_sq;
    let residual = kappa_sum - d_total;
    let threshold = 4.0 * se + abs_tol;
    DecompositionCheck { kappa_sum, d_total, residual, threshold, pass: residual.abs() <= threshold }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub p: f64,
    pub std_err: f64,
    pub hits: u64,
    pub trials: u64,
}

/// ℙ_∞(A) = E_0[Σ_{σ_k ≤ m < σ_{k+1}} 1{T_{X_m}ω ∈ A}] / E_0σ_1, harvesting
/// every block j ≥ k of one long walk per replicate.
pub fn pinfty_via_regeneration<K: JumpKernel + ?Sized>(
    law: &K,
    ev: &WindowEvent,
    replicates: usize,
    blocks_per_replicate: usize,
    seed: u64,
) -> ProbEstimate {
    let u = law.u_hat();
    let k = ev.level.max(0) as usize;
    let per: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let env = Environment::new(law, derive_seed(seed, tags::ENV, rep as u64));
            let mut w = Walker::new(env, LatticeVector::zero(law.dim()), derive_seed(seed, tags::WALK, rep as u64));
            let mut anchor = 0i64;
            let mut block = 0usize;
            let (mut occ, mut dur) = (0.0, 0.0);
            while block < k + blocks_per_replicate {
                if block >= k {
                    dur += 1.0;
                    if event_holds(&env, ev, &w.position()) {
                        occ += 1.0;
                    }
                }
                w.step();
                let level = w.position().dot(&u);
                if level - anchor >= 1 {
                    anchor = level;
                    block += 1;
                }
            }
            (occ, dur)
        })
        .collect();
    let so: f64 = per.iter().map(|p| p.0).sum();
    let sd: f64 = per.iter().map(|p| p.1).sum();
    let p = so / sd;
    let nf = replicates as f64;
    let resid: Vec<f64> = per.iter().map(|(o, d)| o - p * d).collect();
    let std_err = if replicates > 1 { (variance(&resid) / nf).sqrt() / (sd / nf) } else { f64::NAN };
    ProbEstimate { p, std_err, hits: so as u64, trials: sd as u64 }
}

/// ℙ_n(A) = P_0(T_{X_n}ω ∈ A) for every n in `ns`, from one set of annealed walks.
pub fn pinfty_via_limit<K: JumpKernel + ?Sized>(law: &K, ev: &WindowEvent, ns: &[usize], replicates: usize, seed: u64) -> Vec<ProbEstimate> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    const CHUNK: usize = 1 << 14;
    let hits = (0..replicates.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; ns.len()];
            for rep in c * CHUNK..((c + 1) * CHUNK).min(replicates) {
                let env = Environment::new(law, derive_seed(seed, tags::ENV, rep as u64));
                let mut w = Walker::new(env, LatticeVector::zero(law.dim()), derive_seed(seed, tags::WALK, rep as u64));
                for n in 0..=n_max {
                    for (k, &t) in ns.iter().enumerate() {
                        if t == n && event_holds(&env, ev, &w.position()) {
                            h[k] += 1;
                        }
                    }
                    if n < n_max {
                        w.step();
                    }
                }
            }
            h
        })
        .reduce(|| vec![0u64; ns.len()], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let m = replicates as f64;
    hits.into_iter()
        .map(|h| {
            let p = h as f64 / m;
            ProbEstimate { p, std_err: (p * (1.0 - p) / m).sqrt(), hits: h, trials: replicates as u64 }
        })
        .collect()
}

/// ℙ_∞(ω_0 = atom j) in one dimension: w_j ρ_j / 𝔼ρ.
pub fn pinfty_atom_exact(od: &OneDimLaw, j: usize) -> f64 {
    od.atoms[j].weight * od.atoms[j].rho / od.mean_rho()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub n: usize,
    /// (E^ω_0 X_n − n v)/√n per environment.
    pub samples: Vec<f64>,
    pub variance: f64,
    pub variance_se: f64,
    pub normality: Option<NormalityResult>,
}

/// Scaled quenched means over independent environments.
pub fn quenched_mean_fluctuation(law: &EnvironmentLaw, n: usize, n_envs: usize, seed: u64) -> Result<FluctuationReport> {
    let v = exact_velocity(law).ok_or_else(|| RwreError::InvalidParameter("no exact velocity for this law".into()))?;
    let u = law.u_hat();
    let vu: f64 = v.iter().zip(u.coords()).map(|(a, b)| a * *b as f64).sum();
    let cfg = PropagationConfig::default();
    let samples = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env = Environment::new(law, derive_seed(seed, tags::ENV, e as u64));
            let m = quenched_mean(&env, LatticeVector::zero(law.dim()), n, &cfg)?;
            let proj: f64 = m.mean.iter().zip(u.coords()).map(|(a, b)| a * *b as f64).sum();
            Ok((proj - n as f64 * vu) / (n as f64).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let normality = if samples.len() >= crate::stats::MIN_NORMALITY_SAMPLES { normality_check(&samples, None).ok() } else { None };
    Ok(FluctuationReport { n, variance: variance(&samples), variance_se: variance_se(&samples), samples, normality })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictedCoefficients {
    pub v: Vec<f64>,
    pub d_m: Matrix,
    pub kappa0_sq: f64,
    pub d_total: Matrix,
    /// max |𝔇 − 𝔇_m − κ_0² v v^t| entrywise.
    pub identity_residual: f64,
}

/// Closed forms for laws whose every atom is supported on {0, w̃}: λ_1 is a
/// geometric sojourn with E λ = ρ and E λ² = (1 + π_00) ρ².
pub fn restricted_path_coefficients(law: &EnvironmentLaw) -> Result<RestrictedCoefficients> {
    let site = law.site_law();
    if !check_hypothesis_e(site).restricted_path {
        return Err(RwreError::NotRestrictedPath("some atom charges two distinct nonzero jumps".into()));
    }
    let d = site.dim();
    let atoms: Vec<(f64, f64, Vec<f64>)> = site
        .charged()
        .map(|(_, w, jd)| {
            let h = jd.holding();
            let wt = jd.atoms().iter().find(|(z, _)| !z.is_zero()).expect("restricted atom has a jump").0;
            (w, h, wt.to_f64())
        })
        .collect();
    let erho: f64 = atoms.iter().map(|(w, h, _)| w / (1.0 - h)).sum();
    let mut v = vec![0.0; d];
    for (w, _, wt) in &atoms {
        for k in 0..d {
            v[k] += w * wt[k];
        }
    }
    for vk in v.iter_mut() {
        *vk /= erho;
    }
    let mut d_total = zeros(d);
    let mut d_m = zeros(d);
    let mut k0 = 0.0;
    for (w, h, wt) in &atoms {
        let rho = 1.0 / (1.0 - h);
        let el2 = (1.0 + h) * rho * rho;
        k0 += w * h * rho * rho;
        for i in 0..d {
            for j in 0..d {
                d_total[i][j] += w * (wt[i] * wt[j] - rho * (wt[i] * v[j] + v[i] * wt[j]) + el2 * v[i] * v[j]);
                d_m[i][j] += w * (wt[i] - rho * v[i]) * (wt[j] - rho * v[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            d_total[i][j] /= erho;
            d_m[i][j] /= erho;
        }
    }
    let kappa0_sq = k0 / erho;
    let mut identity_residual = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            identity_residual = identity_residual.max((d_total[i][j] - d_m[i][j] - kappa0_sq * v[i] * v[j]).abs());
        }
    }
    Ok(RestrictedCoefficients { v, d_m, kappa0_sq, d_total, identity_residual })
}

/// p_0 = 19/6 + (√139/3) cos(⅓ arccos(1504/139^{3/2})).
pub fn p0_constant() -> f64 {
    19.0 / 6.0 + (139f64.sqrt() / 3.0) * ((1504.0 / 139f64.powf(1.5)).acos() / 3.0).cos()
}

/// (2p−2)(5p−9) − p(p−3)(2p−3).
pub fn p0_cubic(p: f64) -> f64 {
    (2.0 * p - 2.0) * (5.0 * p - 9.0) - p * (p - 3.0) * (2.0 * p - 3.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftRow {
    pub n: usize,
    pub value: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftBoundReport {
    pub rows: Vec<DriftRow>,
    /// OLS slope of E_0(X_n)·û − n v·û against n, with its standard error.
    pub slope: f64,
    pub slope_se: f64,
    /// |slope| ≤ 4·se (no linear growth).
    pub bounded: bool,
}

/// E_0(X_n) − n v (projected on û) over `n_grid`, averaging exact quenched
/// means over `n_envs` environments.
pub fn quenched_mean_drift_bound(law: &EnvironmentLaw, n_grid: &[usize], n_envs: usize, seed: u64) -> Result<DriftBoundReport> {
    let v = exact_velocity(law).ok_or_else(|| RwreError::InvalidParameter("no exact velocity for this law".into()))?;
    let u = law.u_hat();
    let vu: f64 = v.iter().zip(u.coords()).map(|(a, b)| a * *b as f64).sum();
    let cfg = PropagationConfig::default();
    let per_env = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env = Environment::new(law, derive_seed(seed, tags::ENV, e as u64));
            let means: Vec<f64> = if law.one_dim().is_ok() {
                quenched_mean_series_1d(&env, n_grid, &cfg)?
            } else {
                n_grid
                    .iter()
                    .map(|&n| {
                        let m = quenched_mean(&env, LatticeVector::zero(law.dim()), n, &cfg)?;
                        Ok(m.mean.iter().zip(u.coords()).map(|(a, b)| a * *b as f64).sum())
                    })
                    .collect::<Result<_>>()?
            };
            Ok(n_grid.iter().zip(means).map(|(&n, m)| m - n as f64 * vu).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let nf = n_envs as f64;
    let rows: Vec<DriftRow> = n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let col: Vec<f64> = per_env.iter().map(|r| r[k]).collect();
            let mean = col.iter().sum::<f64>() / nf;
            let se = if n_envs > 1 { (variance(&col) / nf).sqrt() } else { 0.0 };
            DriftRow { n, value: mean, std_err: se }
        })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (slope, slope_se) = if rows.len() >= 3 { ols_slope(&x, &y) } else { (0.0, 0.0) };
    // Exact zero series (D ≡ v laws) has zero slope and zero se.
    let bounded = slope.abs() <= 4.0 * slope_se + 1e-12;
    Ok(DriftBoundReport { rows, slope, slope_se, bounded })
}
