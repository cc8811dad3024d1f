//! `rwre`: experiment runner for random walks in random environments.
//!
//! Every subcommand prints a JSON envelope carrying the library version and a
//! SHA-256 hash of the configuration that produced it. Exit codes: 0 success,
//! 1 malformed configuration, 2 validation failure, 3 failed example check.

mod battery;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rwre_core::env::{
    check_hypothesis_e, moment_bound, nonnestling_delta, validate_forbidden_direction, Environment, JumpKernel,
    LawModel, LawSpec, WindowEvent,
};
use rwre_core::estimators::{
    annealed_diffusion, degeneracy_subspace, exact_velocity, kappa_coeffs_formula, kappa_coeffs_mc, kappa_m_alt,
    p0_constant, pinfty_via_limit, pinfty_via_regeneration, quenched_mean_drift_bound, quenched_mean_fluctuation,
    restricted_path_coefficients, velocity, verify_degeneracy, VelocitySource,
};
use rwre_core::renewal::{exact_moment_l, verify_moment_bound, RenewalLaw};
use rwre_core::rng::{derive_seed, tags};
use rwre_core::stats::{
    annealed_displacements, annealed_tail_check, block_independence_test, normality_check, quenched_clt_check,
    sigma1_divergence_probe, tightness_diagnostic,
};
use rwre_core::walk::{blocks_from_walk, sample_blocks, BlockConfig, Walker};
use rwre_core::{LatticeVector, RwreError};

use report::{config_hash, emit, write_csv, ConfigFingerprint, Envelope};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("example check failed: {0}")]
    Assertion(String),
}

impl From<RwreError> for Failure {
    fn from(e: RwreError) -> Self {
        match e {
            RwreError::Hypothesis(_) => Failure::Validation(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Assertion(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "rwre", version, about = "Random walks in random environments with a forbidden direction")]
struct Cli {
    /// Law as a JSON document.
    #[arg(long, global = true, conflicts_with = "preset")]
    law: Option<PathBuf>,
    /// Named law: lazy-nn, one-two-jump, abscont, si-infty, two-jump-homogeneous,
    /// constant-drift, restricted-2d, deterministic.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Master seed; the RWRE_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the series or sample table here as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum KappaMethod {
    Formula,
    Mc,
    Alt,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum PinftyMethod {
    Regeneration,
    Limit,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum DiagTest {
    Tightness,
    Clt,
    Blocks,
    Tail,
    Sigma1,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Check the forbidden direction, non-nestling, moments and hypothesis (E).
    Validate,
    /// Quenched walks in one environment.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
    },
    /// Annealed regeneration blocks (CSV dump with --csv).
    Blocks {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        blocks_per_replicate: usize,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
    /// Velocity from regeneration blocks.
    Velocity {
        #[arg(long, default_value_t = 100_000)]
        count: usize,
    },
    /// Annealed diffusion matrix and degeneracy checks.
    Diffusion {
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        /// Center with the exact velocity when it is available.
        #[arg(long)]
        exact_v: bool,
    },
    /// One-dimensional coefficients κ_m², κ_q² and 𝔇.
    Kappas {
        #[arg(long, value_enum, default_value_t = KappaMethod::Formula)]
        method: KappaMethod,
        #[arg(long, default_value_t = 2000)]
        envs: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: i64,
    },
    /// Invariant-measure probability of a cylinder event.
    Pinfty {
        /// Event JSON {"level": k, "constraints": [{"x": [..], "atom": i}]};
        /// defaults to the worked event for the abscont preset.
        #[arg(long)]
        #[serde(skip)]
        event: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PinftyMethod::Regeneration)]
        method: PinftyMethod,
        #[arg(long, value_delimiter = ',', default_value = "0,1,5,20")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long, default_value_t = 100)]
        blocks_per_replicate: usize,
    },
    /// Fluctuations of exact quenched means across environments.
    Qmean {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        envs: usize,
        /// Also report E_0(X_n) − n v over this grid.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
    },
    /// Closed forms for restricted-path laws.
    Restricted,
    /// Moments of the first common point of two renewal processes.
    Renewal {
        /// Interarrival law uniform on a..b.
        #[arg(long, default_value = "1..2")]
        support: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        j_max: u64,
    },
    /// Statistical diagnostics.
    Diagnose {
        #[arg(long, value_enum)]
        test: DiagTest,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        /// Which environment (by index under the master seed) to fix.
        #[arg(long, default_value_t = 0)]
        env_index: u64,
        /// Tail exponent for the annealed tail test.
        #[arg(long, default_value_t = 3.0)]
        p_bar: f64,
    },
    /// The moment threshold p_0.
    P0,
    /// Run a worked-example battery; exit 3 if any check fails.
    Examples {
        #[arg(long)]
        name: String,
        /// Multiplies every sample size.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Simulate { .. } => "simulate",
            Command::Blocks { .. } => "blocks",
            Command::Velocity { .. } => "velocity",
            Command::Diffusion { .. } => "diffusion",
            Command::Kappas { .. } => "kappas",
            Command::Pinfty { .. } => "pinfty",
            Command::Qmean { .. } => "qmean",
            Command::Restricted => "restricted",
            Command::Renewal { .. } => "renewal",
            Command::Diagnose { .. } => "diagnose",
            Command::P0 => "p0",
            Command::Examples { .. } => "examples",
        }
    }
}

/// Where the law came from, kept for hashing and validation.
enum LawSource {
    Spec(LawSpec),
    Preset(String),
}

impl LawSource {
    fn fingerprint(&self) -> Value {
        match self {
            LawSource::Spec(s) => serde_json::to_value(s).expect("law spec serializes"),
            LawSource::Preset(p) => json!({ "preset": p }),
        }
    }

    fn build(&self) -> Result<LawModel, Failure> {
        Ok(match self {
            LawSource::Spec(s) => s.build()?,
            LawSource::Preset(p) => LawSpec::preset(p)?,
        })
    }
}

fn read_json(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn law_source(cli: &Cli) -> Result<Option<LawSource>, Failure> {
    match (&cli.law, &cli.preset) {
        (Some(path), _) => Ok(Some(LawSource::Spec(LawSpec::from_json(&read_json(path)?)?))),
        (None, Some(p)) => Ok(Some(LawSource::Preset(p.clone()))),
        (None, None) => Ok(None),
    }
}

fn require_law(src: &Option<LawSource>) -> Result<LawModel, Failure> {
    src.as_ref().ok_or_else(|| Failure::Config("this command needs --law or --preset".into()))?.build()
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct EventSpec {
    level: i64,
    constraints: Vec<ConstraintSpec>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintSpec {
    x: Vec<i64>,
    atom: usize,
}

fn load_event(path: &Path, u_hat: &LatticeVector) -> Result<WindowEvent, Failure> {
    let spec: EventSpec = serde_json::from_str(&read_json(path)?).map_err(|e| Failure::Config(e.to_string()))?;
    let constraints = spec
        .constraints
        .iter()
        .map(|c| Ok((LatticeVector::new(&c.x)?, c.atom)))
        .collect::<Result<Vec<_>, RwreError>>()?;
    Ok(WindowEvent::new(constraints, spec.level, u_hat)?)
}

fn parse_support(s: &str) -> Result<RenewalLaw, Failure> {
    let bad = || Failure::Config(format!("support '{s}' is not of the form a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    Ok(RenewalLaw::uniform(a, b)?)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

/// Runs the command; the returned flag is false when a validation or example
/// check failed after the report was produced.
fn execute(cli: &Cli, src: &Option<LawSource>, seed: u64) -> Result<(Value, Option<Failure>), Failure> {
    let csv = cli.csv.as_deref();
    match &cli.command {
        Command::Validate => {
            let src = src.as_ref().ok_or_else(|| Failure::Config("validate needs --law or --preset".into()))?;
            let raw = match src {
                LawSource::Spec(s) => Some(s.raw()?),
                LawSource::Preset(p) => match LawSpec::preset(p)? {
                    LawModel::Finite(l) => Some((l.site_law().clone(), l.u_hat())),
                    LawModel::SiInfty(_) => None,
                },
            };
            let Some((site, u_hat)) = raw else {
                let report = json!({
                    "parametric": "si-infty-example",
                    "forbidden_direction": true,
                    "delta": 0.0,
                    "nonnestling": false,
                });
                return Ok((report, Some(Failure::Validation("non-nestling fails: escape drift 4^-i has infimum 0".into()))));
            };
            let fd = validate_forbidden_direction(&site, &u_hat);
            let delta = nonnestling_delta(&site, &u_hat);
            let e = check_hypothesis_e(&site);
            let report = json!({
                "dim": site.dim(),
                "forbidden_direction": fd,
                "delta": delta,
                "nonnestling": delta > 0.0,
                "moment_bound_p2": moment_bound(&site, 2.0),
                "hypothesis_e": e,
            });
            let failure = if !fd.ok {
                let names: Vec<String> = fd
                    .violating_atoms
                    .iter()
                    .zip(&fd.violating_jumps)
                    .map(|(a, z)| format!("atom {a} charges backward jump {z}"))
                    .collect();
                Some(Failure::Validation(names.join("; ")))
            } else if delta <= 0.0 {
                Some(Failure::Validation(format!("non-nestling fails: delta = {delta}")))
            } else {
                None
            };
            Ok((report, failure))
        }
        Command::Simulate { n, replicates } => {
            let model = require_law(src)?;
            let k = model.kernel();
            let env = Environment::new(k, derive_seed(seed, tags::ENV, 0));
            let mut ends = Vec::with_capacity(*replicates);
            let mut rows = Vec::new();
            for r in 0..*replicates {
                let mut w = Walker::new(env, LatticeVector::zero(k.dim()), derive_seed(seed, tags::WALK, r as u64));
                if r == 0 {
                    rows.push(std::iter::once("0".to_string()).chain(w.position().coords().iter().map(|c| c.to_string())).collect());
                }
                for s in 1..=*n {
                    w.step();
                    if r == 0 {
                        rows.push(std::iter::once(s.to_string()).chain(w.position().coords().iter().map(|c| c.to_string())).collect());
                    }
                }
                ends.push(w.position());
            }
            if let Some(p) = csv {
                let header = std::iter::once("step".to_string()).chain((0..k.dim()).map(|i| format!("x{i}"))).collect::<Vec<_>>();
                write_csv(p, &header, rows)?;
            }
            Ok((json!({ "n": n, "endpoints": ends }), None))
        }
        Command::Blocks { count, blocks_per_replicate, threshold } => {
            let model = require_law(src)?;
            let cfg = BlockConfig { threshold: *threshold, blocks_per_replicate: *blocks_per_replicate, ..Default::default() };
            let s = sample_blocks(model.kernel(), *count, seed, &cfg);
            if let Some(p) = csv {
                let d = model.kernel().dim();
                let header: Vec<String> = ["replicate", "block_index", "duration"]
                    .iter()
                    .map(|s| s.to_string())
                    .chain((0..d).map(|i| format!("dx{i}")))
                    .collect();
                let mut idx = 0usize;
                let mut last = usize::MAX;
                let rows = s.blocks.iter().map(|(r, b)| {
                    if *r != last {
                        idx = 0;
                        last = *r;
                    }
                    let row = [r.to_string(), idx.to_string(), b.duration.to_string()]
                        .into_iter()
                        .chain(b.displacement.coords().iter().map(|c| c.to_string()))
                        .collect();
                    idx += 1;
                    row
                });
                write_csv(p, &header, rows.collect::<Vec<Vec<String>>>())?;
            }
            let total: u64 = s.iter().map(|b| b.duration).sum();
            Ok((
                json!({
                    "n_blocks": s.len(),
                    "mean_duration": total as f64 / s.len().max(1) as f64,
                    "aborted": s.aborted,
                }),
                None,
            ))
        }
        Command::Velocity { count } => {
            let model = require_law(src)?;
            let s = sample_blocks(model.kernel(), *count, seed, &BlockConfig::default());
            let est = velocity(&s.iter().collect::<Vec<_>>())?;
            let exact = model.finite().ok().and_then(exact_velocity);
            Ok((json!({ "quantity": "velocity", "method": "regeneration", "estimate": est, "exact": exact, "aborted": s.aborted.len() }), None))
        }
        Command::Diffusion { count, exact_v } => {
            let model = require_law(src)?;
            let law = model.finite()?;
            let s = sample_blocks(law, *count, seed, &BlockConfig::default());
            let source = match exact_velocity(law) {
                Some(v) if *exact_v => VelocitySource::Exact(v),
                _ => VelocitySource::Estimated,
            };
            let rep = annealed_diffusion(&s.iter().collect::<Vec<_>>(), &source)?;
            let sub = degeneracy_subspace(law.site_law());
            let checks = verify_degeneracy(&rep, &sub);
            Ok((
                json!({
                    "quantity": "diffusion",
                    "method": "regeneration",
                    "estimate": rep,
                    "degeneracy_subspace": sub,
                    "complement_checks": checks,
                }),
                None,
            ))
        }
        Command::Kappas { method, envs, horizon } => {
            let model = require_law(src)?;
            let law = model.finite()?;
            let report = match method {
                KappaMethod::Formula => to_value(&kappa_coeffs_formula(law)?),
                KappaMethod::Mc => {
                    let f = kappa_coeffs_formula(law)?;
                    to_value(&kappa_coeffs_mc(law, *envs, f.truncation_index.max(64), seed)?)
                }
                KappaMethod::Alt => to_value(&kappa_m_alt(law, *envs, *horizon, seed)?),
            };
            Ok((json!({ "quantity": "kappas", "method": method, "value": report }), None))
        }
        Command::Pinfty { event, method, n, replicates, blocks_per_replicate } => {
            let model = require_law(src)?;
            let k = model.kernel();
            let ev = match event {
                Some(p) => load_event(p, &k.u_hat())?,
                None if matches!(src, Some(LawSource::Preset(p)) if p == "abscont") => rwre_core::env::presets::abscont_event(),
                None => return Err(Failure::Config("pinfty needs --event for this law".into())),
            };
            let value = match method {
                PinftyMethod::Regeneration => to_value(&pinfty_via_regeneration(k, &ev, *replicates, *blocks_per_replicate, seed)),
                PinftyMethod::Limit => {
                    let est = pinfty_via_limit(k, &ev, n, *replicates, seed);
                    if let Some(p) = csv {
                        let header = ["n", "estimate", "std_err", "method"].map(String::from);
                        write_csv(p, &header, n.iter().zip(&est).map(|(n, e)| vec![n.to_string(), fmt(e.p), fmt(e.std_err), "limit".into()]))?;
                    }
                    json!(n.iter().zip(est).map(|(n, e)| json!({ "n": n, "estimate": e })).collect::<Vec<_>>())
                }
            };
            Ok((json!({ "quantity": "pinfty", "method": method, "value": value }), None))
        }
        Command::Qmean { n, envs, grid } => {
            let model = require_law(src)?;
            let law = model.finite()?;
            let mut fl = quenched_mean_fluctuation(law, *n, *envs, seed)?;
            if let Some(p) = csv {
                let header = ["env", "c_n"].map(String::from);
                write_csv(p, &header, fl.samples.iter().enumerate().map(|(i, c)| vec![i.to_string(), fmt(*c)]))?;
            }
            let target = kappa_coeffs_formula(law).ok().map(|c| c.kappa_m_sq);
            let drift = if grid.is_empty() { None } else { Some(quenched_mean_drift_bound(law, grid, *envs, seed)?) };
            fl.samples.clear();
            Ok((json!({ "quantity": "quenched-mean", "method": "exact-propagation", "fluctuation": fl, "kappa_m_sq": target, "drift_bound": drift }), None))
        }
        Command::Restricted => {
            let model = require_law(src)?;
            let r = restricted_path_coefficients(model.finite()?)?;
            Ok((json!({ "quantity": "restricted-path", "method": "closed-form", "value": r }), None))
        }
        Command::Renewal { support, p, j_max } => {
            let law = parse_support(support)?;
            let grid: Vec<u64> = (1..=*j_max).collect();
            let rep = verify_moment_bound(&law, *p, &grid)?;
            let diag: Vec<Value> = (1..=10u64)
                .map(|i| exact_moment_l(&law, i, i, *p).map(|m| json!({ "i": i, "moment": m.value, "i_pow_p": (i as f64).powf(*p) })))
                .collect::<Result<_, _>>()?;
            if let Some(path) = csv {
                let header = ["j", "estimate", "std_err", "method"].map(String::from);
                write_csv(path, &header, rep.rows.iter().map(|r| vec![r.j.to_string(), fmt(r.moment), "0".into(), "exact".into()]))?;
            }
            Ok((json!({ "quantity": "renewal-moments", "method": "exact", "value": rep, "diagonal": diag }), None))
        }
        Command::Diagnose { test, n, replicates, env_index, p_bar } => {
            let model = require_law(src)?;
            let env_seed = derive_seed(seed, tags::ENV, *env_index);
            let value = match test {
                DiagTest::Tightness => {
                    let law = model.finite()?;
                    let v = law.one_dim()?.velocity();
                    let env = Environment::new(law, env_seed);
                    let mut grid = Vec::new();
                    let mut g = 16usize;
                    while g <= *n {
                        grid.push(g);
                        g *= 2;
                    }
                    let t = tightness_diagnostic(&env, &grid, v)?;
                    if let Some(p) = csv {
                        let header = ["n", "c_n"].map(String::from);
                        write_csv(p, &header, t.grid.iter().zip(&t.c).map(|(n, c)| vec![n.to_string(), fmt(*c)]))?;
                    }
                    to_value(&t)
                }
                DiagTest::Clt => {
                    let law = model.finite()?;
                    let env = Environment::new(law, env_seed);
                    let mut q = quenched_clt_check(&env, *n, *replicates, seed)?;
                    let target = kappa_coeffs_formula(law).ok().map(|c| c.kappa_q_sq);
                    let norm = normality_check(&q.samples, target).ok();
                    q.samples.clear();
                    json!({ "clt": q, "kappa_q_sq": target, "normality": norm })
                }
                DiagTest::Blocks => {
                    let env = Environment::new(model.kernel(), env_seed);
                    let blocks = blocks_from_walk(env, derive_seed(seed, tags::WALK, *env_index), *replicates, &BlockConfig::default())
                        .map_err(|(b, _)| Failure::Config(format!("step cap reached after {} blocks", b.len())))?;
                    to_value(&block_independence_test(&blocks.iter().collect::<Vec<_>>())?)
                }
                DiagTest::Tail => {
                    let law = model.finite()?;
                    let v = exact_velocity(law).ok_or_else(|| Failure::Config("tail test needs an exact velocity".into()))?;
                    let u = law.u_hat();
                    let vu: f64 = v.iter().zip(u.coords()).map(|(a, b)| a * *b as f64).sum();
                    let devs = annealed_displacements(law, *n, *replicates, vu, seed);
                    let sn = (*n as f64).sqrt();
                    let h: Vec<f64> = (3..=10).map(|k| k as f64 * sn).collect();
                    to_value(&annealed_tail_check(&devs, *n, &h, *p_bar))
                }
                DiagTest::Sigma1 => {
                    to_value(&sigma1_divergence_probe(model.kernel(), &[100, 1_000, 10_000, 100_000], *replicates, seed))
                }
            };
            Ok((json!({ "test": test, "value": value }), None))
        }
        Command::P0 => Ok((json!({ "quantity": "p0", "method": "closed-form", "value": p0_constant() }), None)),
        Command::Examples { name, scale } => {
            if scale.is_nan() || *scale <= 0.0 {
                return Err(Failure::Config("scale must be positive".into()));
            }
            let b = battery::run(name, seed, *scale)?;
            let failure = (!b.pass).then(|| {
                let failed: Vec<&str> = b.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                Failure::Assertion(format!("{name}: {}", failed.join(", ")))
            });
            Ok((to_value(&b), failure))
        }
    }
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Config(e.to_string().trim_end().to_string())),
    };
    let seed = match std::env::var("RWRE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Config(format!("RWRE_SEED '{s}' is not a 64-bit integer")))?,
        Err(_) => cli.seed,
    };
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let src = law_source(&cli)?;
    let law_fp = src.as_ref().map(LawSource::fingerprint);
    let event = match &cli.command {
        Command::Pinfty { event: Some(p), .. } => {
            Some(serde_json::from_str::<Value>(&read_json(p)?).map_err(|e| Failure::Config(e.to_string()))?)
        }
        _ => None,
    };
    let hash = config_hash(&ConfigFingerprint { command: &cli.command, law: &law_fp, event: &event, seed });
    let (report, failure) = execute(&cli, &src, seed)?;
    emit(&Envelope { version: env!("CARGO_PKG_VERSION"), config_hash: &hash, seed, command: cli.command.label(), report }, cli.out.as_deref())?;
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rwre: {f}");
            ExitCode::from(f.code())
        }
    }
}
