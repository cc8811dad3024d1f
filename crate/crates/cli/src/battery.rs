//! Worked-example batteries run by `rwre examples`.

use serde::Serialize;

use rwre_core::env::{presets, Environment, SiInftyLaw};
use rwre_core::estimators::{
    annealed_diffusion, degeneracy_subspace, exact_velocity, kappa_coeffs_formula, kappa_coeffs_mc, pinfty_via_limit,
    pinfty_via_regeneration, quenched_mean_fluctuation, restricted_path_coefficients, velocity, verify_degeneracy,
    VelocitySource,
};
use rwre_core::rng::{derive_seed, tags};
use rwre_core::stats::{sigma1_divergence_probe, tightness_diagnostic, EXACT_MEAN_FLOOR};
use rwre_core::walk::{sample_blocks, BlockConfig};
use rwre_core::env::EnvironmentLaw;
use rwre_core::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub threshold: f64,
    /// How value, target and threshold are compared.
    pub rule: &'static str,
    pub pass: bool,
}

impl Check {
    fn near(name: &str, value: f64, target: f64, threshold: f64) -> Self {
        let pass = (value - target).abs() <= threshold;
        Self { name: name.into(), value, target, threshold, rule: "|value - target| <= threshold", pass }
    }

    fn exceeds(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, target: f64::NAN, threshold, rule: "value > threshold", pass: value > threshold }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Battery {
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

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

/// Exact targets of a one-dimensional battery.
struct Targets {
    v: f64,
    kappa_m_sq: f64,
    kappa_q_sq: f64,
    d: f64,
}

fn scaled(base: usize, scale: f64) -> usize {
    ((base as f64 * scale).round() as usize).max(1)
}

pub fn run(name: &str, seed: u64, scale: f64) -> Result<Battery> {
    let checks = match name {
        "lazy-nn" => one_dim(
            &presets::lazy_nn(),
            &Targets { v: 2.0 / 3.0, kappa_m_sq: 2.0 / 27.0, kappa_q_sq: 8.0 / 27.0, d: 10.0 / 27.0 },
            true,
            seed,
            scale,
        )?,
        "one-two-jump" => one_dim(
            &presets::one_two_jump(),
            &Targets { v: 1.4, kappa_m_sq: 0.03, kappa_q_sq: 0.21, d: 0.24 },
            false,
            seed,
            scale,
        )?,
        "abscont" => abscont(seed, scale)?,
        "si-infty" => si_infty(seed, scale),
        "two-jump-homogeneous" => two_jump(seed, scale)?,
        "constant-drift" => constant_drift(seed)?,
        "restricted-2d" => {
            let r = restricted_path_coefficients(&presets::restricted_2d())?;
            vec![Check::near("identity residual", r.identity_residual, 0.0, 1e-12)]
        }
        "deterministic" => deterministic(seed)?,
        other => {
            return Err(rwre_core::RwreError::InvalidParameter(format!(
                "unknown example '{other}'; expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Battery { name: name.into(), checks, pass })
}

fn one_dim(law: &EnvironmentLaw, t: &Targets, restricted: bool, seed: u64, scale: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f = kappa_coeffs_formula(law)?;
    out.push(Check::near("formula v", f.v, t.v, 1e-10));
    out.push(Check::near("formula kappa_m^2", f.kappa_m_sq, t.kappa_m_sq, 1e-10));
    out.push(Check::near("formula kappa_q^2", f.kappa_q_sq, t.kappa_q_sq, 1e-10));
    out.push(Check::near("formula D", f.d_total, t.d, 1e-10));
    out.push(Check::near("formula kappa_m^2 + kappa_q^2 - D", f.kappa_m_sq + f.kappa_q_sq - f.d_total, 0.0, 1e-10));

    let blocks = sample_blocks(law, scaled(100_000, scale), seed, &BlockConfig::default());
    let b: Vec<_> = blocks.iter().collect();
    let v = velocity(&b)?;
    out.push(Check::near("blocks v", v.v[0], t.v, 4.0 * v.std_err[0]));
    let d = annealed_diffusion(&b, &VelocitySource::Estimated)?;
    out.push(Check::near("blocks D", d.d_hat[0][0], t.d, 4.0 * d.std_err[0][0]));

    let envs = scaled(2000, scale);
    let q = quenched_mean_fluctuation(law, 2000, envs, derive_seed(seed, tags::OMEGA_SAMPLE, 1))?;
    out.push(Check::near("quenched-mean variance (n=2000)", q.variance, t.kappa_m_sq, 4.0 * q.variance_se));

    let mc = kappa_coeffs_mc(law, envs, f.truncation_index.max(64), derive_seed(seed, tags::OMEGA_SAMPLE, 2))?;
    // The floor covers laws whose per-environment series is deterministic (se = 0).
    out.push(Check::near("mc kappa_m^2", mc.kappa_m_sq, t.kappa_m_sq, 4.0 * mc.kappa_m_se + 1e-12));
    out.push(Check::near("mc kappa_q^2", mc.kappa_q_sq, t.kappa_q_sq, 4.0 * mc.kappa_q_se + 1e-12));

    if restricted {
        let r = restricted_path_coefficients(law)?;
        out.push(Check::near("restricted identity residual", r.identity_residual, 0.0, 1e-12));
        out.push(Check::near("kappa_0^2 v^2 - kappa_q^2", r.kappa0_sq * r.v[0] * r.v[0] - f.kappa_q_sq, 0.0, 1e-12));
    }
    Ok(out)
}

fn abscont(seed: u64, scale: f64) -> Result<Vec<Check>> {
    let law = presets::abscont();
    let ev = presets::abscont_event();
    let m = scaled(1_000_000, scale);
    let est = pinfty_via_limit(&law, &ev, &[0, 1, 5, 20], m, seed);
    let p = 1.0 / 27.0;
    let mut out = vec![Check::near("P(A) at X_0", est[0].p, p, 4.0 * (p * (1.0 - p) / m as f64).sqrt())];
    for (n, e) in [1, 5, 20].iter().zip(&est[1..]) {
        out.push(Check::near(&format!("hits of A at X_{n}"), e.hits as f64, 0.0, 0.0));
    }
    let r = pinfty_via_regeneration(&law, &ev, scaled(1000, scale), 100, seed);
    out.push(Check::near("regeneration-formula hits of A", r.hits as f64, 0.0, 0.0));

    let sub = degeneracy_subspace(law.site_law());
    out.push(Check::near("difference-span rank", sub.rank as f64, 1.0, 0.0));
    let blocks = sample_blocks(&law, scaled(10_000, scale), seed, &BlockConfig::default());
    let d = annealed_diffusion(&blocks.iter().collect::<Vec<_>>(), &VelocitySource::Estimated)?;
    for q in verify_degeneracy(&d, &sub) {
        out.push(Check::near("complement quadratic form", q.value, 0.0, q.threshold));
    }
    Ok(out)
}

fn si_infty(seed: u64, scale: f64) -> Vec<Check> {
    let probe = sigma1_divergence_probe(&SiInftyLaw::new(), &[100, 1_000, 10_000, 100_000], scaled(1 << 21, scale), seed);
    probe
        .rows
        .iter()
        .filter_map(|r| r.increment.map(|(d, se)| Check::exceeds(&format!("E[sigma_1 ^ {}] increment", r.cap), d, 4.0 * se)))
        .collect()
}

fn two_jump(seed: u64, scale: f64) -> Result<Vec<Check>> {
    let law = presets::two_jump_homogeneous();
    let blocks = sample_blocks(&law, scaled(100_000, scale), seed, &BlockConfig::default());
    let d = annealed_diffusion(&blocks.iter().collect::<Vec<_>>(), &VelocitySource::Estimated)?;
    // ¼(a − b)(a − b)^t with a − b = (1, −1).
    let target = [[0.25, -0.25], [-0.25, 0.25]];
    let mut out = Vec::new();
    for (i, row) in target.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            out.push(Check::near(&format!("D[{i}][{j}]"), d.d_hat[i][j], *t, 4.0 * d.std_err[i][j]));
        }
    }
    for q in verify_degeneracy(&d, &degeneracy_subspace(law.site_law())) {
        out.push(Check::near("complement quadratic form", q.value, 0.0, q.threshold));
    }
    Ok(out)
}

fn constant_drift(seed: u64) -> Result<Vec<Check>> {
    let law = presets::constant_drift();
    let f = kappa_coeffs_formula(&law)?;
    let env = Environment::new(&law, derive_seed(seed, tags::ENV, 0));
    let grid: Vec<usize> = (1..=20).map(|k| 100 * k).collect();
    let t = tightness_diagnostic(&env, &grid, f.v)?;
    let max_c = t.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    Ok(vec![
        Check::near("formula kappa_m^2", f.kappa_m_sq, 0.0, 1e-12),
        Check::near("formula kappa_q^2 - D", f.kappa_q_sq - f.d_total, 0.0, 1e-10),
        Check::near("max |c_n|", max_c, 0.0, EXACT_MEAN_FLOOR),
    ])
}

fn deterministic(seed: u64) -> Result<Vec<Check>> {
    let law = presets::deterministic(&[1], &[1]);
    let blocks = sample_blocks(&law, 1000, seed, &BlockConfig::default());
    let b: Vec<_> = blocks.iter().collect();
    let v = velocity(&b)?;
    let d = annealed_diffusion(&b, &VelocitySource::Exact(exact_velocity(&law).expect("deterministic velocity")))?;
    Ok(vec![Check::near("v", v.v[0], 1.0, 0.0), Check::near("D", d.d_hat[0][0], 0.0, 0.0)])
}
