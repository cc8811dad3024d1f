//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Criteria 2 to 6 run the `rwre examples` batteries.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use rwre_core::env::{presets, Environment, EnvironmentLaw};
use rwre_core::estimators::{kappa_coeffs_formula, p0_constant, quenched_mean_fluctuation, restricted_path_coefficients};
use rwre_core::exactq::{exp_bound_check, lambda0, martingale_residual, CorrectorConfig, PropagationConfig};
use rwre_core::renewal::{exact_moment_l, exact_moment_l_with, verify_moment_bound, McConfig, MomentMethod, RenewalLaw};
use rwre_core::rng::{derive_seed, tags};
use rwre_core::stats::{block_independence_test, tightness_diagnostic, EXACT_MEAN_FLOOR};
use rwre_core::walk::{blocks_from_walk, BlockConfig};
use rwre_core::LatticeVector;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rwre(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_rwre"))
        .args(args)
        .env_remove("RWRE_SEED")
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), v)
}

/// Runs an example battery and summarizes its checks.
fn battery(name: &str) -> Outcome {
    let seed = SEED.to_string();
    let (code, v) = rwre(&["examples", "--name", name, "--seed", &seed]);
    let checks = v["report"]["checks"].as_array().cloned().unwrap_or_default();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c["pass"] != true)
        .map(|c| format!("{} = {} (target {}, threshold {})", c["name"], c["value"], c["target"], c["threshold"]))
        .collect();
    let pass = code == Some(0) && !checks.is_empty() && failed.is_empty();
    let detail = if failed.is_empty() {
        format!("{} checks, exit {:?}", checks.len(), code)
    } else {
        format!("exit {:?}; failed: {}", code, failed.join("; "))
    };
    outcome(pass, detail)
}

fn c1_p0() -> Outcome {
    let (code, v) = rwre(&["p0"]);
    let value = v["report"]["value"].as_f64().unwrap_or(f64::NAN);
    let pass = code == Some(0) && (value - 7.06025).abs() < 1e-4 && (value - p0_constant()).abs() < 1e-12;
    outcome(pass, format!("p0 = {value:.8}"))
}

fn c7_martingale() -> Outcome {
    let cfg = CorrectorConfig::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for law in [presets::lazy_nn(), presets::one_two_jump()] {
        for e in 0..100 {
            let env = Environment::new(&law, derive_seed(SEED, tags::ENV, e));
            let m = martingale_residual(&env, None, &cfg).expect("corrector");
            worst = worst.max(m.residual / m.bound.max(f64::MIN_POSITIVE));
            if !m.holds() {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("200 environments, {failures} violations, max residual/bound = {worst:.3}"))
}

fn c8_exponential_bound() -> Outcome {
    let laws = [presets::lazy_nn(), presets::one_two_jump(), presets::abscont(), presets::restricted_2d()];
    let cfg = PropagationConfig { prune: 0.0, ..Default::default() };
    let mut violations = 0;
    let mut checks = 0;
    for e in 0..20u64 {
        let law = &laws[e as usize % laws.len()];
        let env = Environment::new(law, derive_seed(SEED, tags::ENV, 1000 + e));
        let lambda = lambda0(law) / 2.0;
        let x = LatticeVector::unit(law.dim(), 0).scale(e as i64 % 3);
        for n in 1..=30 {
            let c = exp_bound_check(&env, x, n, lambda, &cfg).expect("propagation");
            checks += 1;
            if !c.holds() {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{checks} checks over 20 environments, {violations} violations"))
}

fn c9_restricted() -> Outcome {
    let laws = [
        ("lazy-nn", presets::lazy_nn()),
        ("restricted-2d", presets::restricted_2d()),
        ("restricted-1d-two-lengths", presets::restricted_1d_two_lengths()),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, law) in &laws {
        let r = restricted_path_coefficients(law).expect("restricted law");
        pass &= r.identity_residual <= 1e-12;
        parts.push(format!("{name} residual {:.1e}", r.identity_residual));
    }
    let lazy = presets::lazy_nn();
    let r = restricted_path_coefficients(&lazy).unwrap();
    let kq = kappa_coeffs_formula(&lazy).unwrap().kappa_q_sq;
    let cross = (r.kappa0_sq * r.v[0] * r.v[0] - kq).abs();
    pass &= cross <= 1e-12;
    parts.push(format!("|kappa_0^2 v^2 - kappa_q^2| = {cross:.1e}"));
    outcome(pass, parts.join(", "))
}

fn c10_renewal() -> Outcome {
    let laws = [("U{1,2}", RenewalLaw::uniform(1, 2).unwrap()), ("U{1..5}", RenewalLaw::uniform(1, 5).unwrap())];
    let grid: Vec<u64> = (1..=200).collect();
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for (name, law) in &laws {
        for p in [1.0, 2.0, 3.0] {
            let diag_ok = (1..=20u64).all(|i| {
                let m = exact_moment_l(law, i, i, p).unwrap().value;
                (m - (i as f64).powf(p)).abs() <= 1e-12 * (i as f64).powf(p)
            });
            let rep = verify_moment_bound(law, p, &grid).unwrap();
            let mut oracle_ok = true;
            if p == 1.0 {
                let mc = McConfig::default();
                for &j in &grid {
                    let ls = exact_moment_l_with(law, 0, j, 1.0, MomentMethod::LinearSystem, &mc).unwrap().value;
                    let dp = exact_moment_l_with(law, 0, j, 1.0, MomentMethod::Dp, &mc).unwrap().value;
                    oracle_ok &= (ls - dp).abs() <= 1e-9;
                }
            }
            let ok = diag_ok && rep.pass && oracle_ok;
            lines.push(format!(
                "{name} p={p}: L_ii=i^p {}, slope {:+.4} (se {:.1e}, limit {:.1e}) {}, C_hat {:.3}{}",
                if diag_ok { "ok" } else { "BAD" },
                rep.slope,
                rep.slope_se,
                4.0 * rep.slope_se,
                if rep.pass { "ok" } else { "BAD" },
                rep.c_hat,
                if p == 1.0 { if oracle_ok { ", linear-system oracle ok" } else { ", linear-system oracle BAD" } } else { "" },
            ));
            if !ok {
                failures.push(format!("{name} p={p}"));
            }
        }
    }
    let head = if failures.is_empty() { "all six cases".to_string() } else { format!("failing: {}", failures.join(", ")) };
    outcome(failures.is_empty(), format!("{head}\n        {}", lines.join("\n        ")))
}

fn c11_blocks() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, law) in [("lazy-nn", presets::lazy_nn()), ("one-two-jump", presets::one_two_jump()), ("abscont", presets::abscont())] {
        let env = Environment::new(&law, derive_seed(SEED, tags::ENV, 7));
        let blocks = blocks_from_walk(env, derive_seed(SEED, tags::WALK, 7), 10_000, &BlockConfig::default()).expect("blocks");
        let t = block_independence_test(&blocks.iter().collect::<Vec<_>>()).unwrap();
        let worst = t
            .lags
            .iter()
            .flat_map(|l| std::iter::once(l.duration.abs()).chain(l.displacement.iter().map(|d| d.abs())))
            .fold(0.0f64, f64::max);
        pass &= t.pass;
        parts.push(format!("{name} max|acf| {worst:.4} (limit {:.4})", t.threshold));
    }
    outcome(pass, parts.join(", "))
}

fn c12_tightness() -> Outcome {
    let grid: Vec<usize> = (4..=13).map(|k| 1usize << k).collect();
    let cd = presets::constant_drift();
    let cd_env = Environment::new(&cd, derive_seed(SEED, tags::ENV, 3));
    let t0 = tightness_diagnostic(&cd_env, &grid, cd.one_dim().unwrap().velocity()).unwrap();
    let max_c = t0.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let lazy: EnvironmentLaw = presets::lazy_nn();
    let env = Environment::new(&lazy, derive_seed(SEED, tags::ENV, 3));
    let t1 = tightness_diagnostic(&env, &grid, 2.0 / 3.0).unwrap();
    let fl = quenched_mean_fluctuation(&lazy, 2000, 2000, derive_seed(SEED, tags::OMEGA_SAMPLE, 12)).unwrap();
    let km = 2.0 / 27.0;
    let var_ok = (fl.variance - km).abs() <= 4.0 * fl.variance_se;
    let pass = max_c <= EXACT_MEAN_FLOOR && !t0.non_stabilizing && t1.non_stabilizing && var_ok;
    outcome(
        pass,
        format!(
            "constant drift max|c_n| = {max_c:.1e}; lazy-nn top-half range {:.3} (non-stabilizing: {}); Var c_2000 = {:.5} vs {km:.5} (4 se {:.5})",
            t1.range_top_half,
            t1.non_stabilizing,
            fl.variance,
            4.0 * fl.variance_se
        ),
    )
}

fn main() {
    type Criterion = (usize, &'static str, Duration, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        (1, "p0 constant", Duration::from_secs(1), Box::new(c1_p0)),
        (2, "lazy-nn battery", Duration::from_secs(300), Box::new(|| battery("lazy-nn"))),
        (3, "one-two-jump battery", Duration::from_secs(300), Box::new(|| battery("one-two-jump"))),
        (4, "degeneracy, two-jump homogeneous walk", Duration::from_secs(60), Box::new(|| battery("two-jump-homogeneous"))),
        (5, "abscont invariant measure", Duration::from_secs(300), Box::new(|| battery("abscont"))),
        (6, "si-infty divergence of E sigma_1", Duration::from_secs(300), Box::new(|| battery("si-infty"))),
        (7, "martingale identity of the corrector", Duration::from_secs(60), Box::new(c7_martingale)),
        (8, "exponential bound", Duration::from_secs(60), Box::new(c8_exponential_bound)),
        (9, "restricted-path decomposition", Duration::from_secs(1), Box::new(c9_restricted)),
        (10, "renewal moment bound", Duration::from_secs(300), Box::new(c10_renewal)),
        (11, "regeneration block independence", Duration::from_secs(60), Box::new(c11_blocks)),
        (12, "tightness dichotomy", Duration::from_secs(600), Box::new(c12_tightness)),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in &criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = took <= *budget;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { String::new() } else { format!(" [over budget {:?}]", budget) };
        println!(
            "{} criterion {id:>2}: {name} ({:.2}s){timing}: {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
