//! Benchmark harness: instance families × algorithms, run in parallel and
//! merged in `(instance, algorithm)` order.
//!
//! Config (every field optional; `{}` is an empty benchmark):
//!
//! ```json
//! {
//!   "instances": [
//!     {"family": "gap", "d": 3, "k": [2, 4, 6, 8]},
//!     {"family": "random", "depth": [3, 4], "jobs": [12, 20], "seeds": [0, 1]},
//!     {"family": "file", "path": "instance.json"}
//!   ],
//!   "algorithms": ["det", "rand", "bye"],
//!   "trials": 20, "seed": 0, "eps": "1/20", "exact_reference": true, "timing": true
//! }
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::exact::{exact_tct_opt_with, ExactLimits};
use crate::generators::{gen_gap_instance, gen_random_layered, RandomLayeredParams};
use crate::io::{normalized_from_json, read_json};
use crate::model::NormalizedInstance;
use crate::normalize::normalize;
use crate::number::{int, parse_rational, rational_to_json, to_f64, Ext, Rational};
use crate::solve::{solve, Algorithm, LpChoice, SolveOptions};

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Gap {
        d: usize,
        k: Vec<usize>,
    },
    Random {
        depth: Vec<usize>,
        jobs: Vec<usize>,
        #[serde(default = "default_seeds")]
        seeds: Vec<u64>,
    },
    File {
        path: PathBuf,
    },
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_true() -> bool {
    true
}

fn default_trials() -> usize {
    1
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub instances: Vec<FamilySpec>,
    #[serde(default)]
    pub algorithms: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Rational as a string (`"1/20"`); absent means exact LP when affordable.
    #[serde(default)]
    pub eps: Option<String>,
    #[serde(default = "default_true")]
    pub exact_reference: bool,
    /// Wall times are zeroed when off, which makes reports byte-stable.
    #[serde(default = "default_true")]
    pub timing: bool,
}

impl BenchConfig {
    pub fn from_json(value: &Value) -> Result<Self> {
        Ok(serde_json::from_value(value.clone())?)
    }
}

/// A named benchmark instance; `gap` is set for members of the gap family.
#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub name: String,
    pub norm: NormalizedInstance,
    pub gap: Option<(usize, usize)>,
}

pub fn expand_instances(config: &BenchConfig) -> Result<Vec<BenchInstance>> {
    let mut out = Vec::new();
    for family in &config.instances {
        match family {
            FamilySpec::Gap { d, k } => {
                for &k in k {
                    let (norm, _) = gen_gap_instance(*d, k)?;
                    out.push(BenchInstance { name: format!("gap-d{d}-k{k}"), norm, gap: Some((*d, k)) });
                }
            }
            FamilySpec::Random { depth, jobs, seeds } => {
                for &d in depth {
                    for &n in jobs {
                        for &seed in seeds {
                            let norm = gen_random_layered(&RandomLayeredParams::new(d, n, seed))?;
                            out.push(BenchInstance { name: format!("random-d{d}-n{n}-s{seed}"), norm, gap: None });
                        }
                    }
                }
            }
            FamilySpec::File { path } => {
                let value = read_json(path)?;
                let norm = match normalized_from_json(&value) {
                    Ok(norm) => norm,
                    Err(_) => normalize(&crate::io::instance_from_json(&value)?)?,
                };
                out.push(BenchInstance { name: path.display().to_string(), norm, gap: None });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum Reference {
    Opt(Ext),
    NoOracle(String),
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub depth: usize,
    pub algorithm: Algorithm,
    pub lp: Option<Rational>,
    pub cost: Option<Ext>,
    pub mean_cost: Option<Rational>,
    pub ratio: Option<Rational>,
    pub bound: Option<Rational>,
    pub reference: Reference,
    pub pass: bool,
    pub error: Option<String>,
    pub notes: Vec<String>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapPoint {
    pub d: usize,
    pub k: usize,
    pub opt: Option<Ext>,
    /// Objective of the fractional cover `x_(i,j) = j/T`.
    pub fractional: Rational,
    /// `OPT / fractional`, exact when the optimum is known.
    pub ratio: Option<Rational>,
    /// The limit `d/2` of the curve.
    pub limit: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub gap_curve: Vec<GapPoint>,
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    let algorithms = config
        .algorithms
        .iter()
        .map(|a| a.parse::<Algorithm>())
        .collect::<Result<Vec<_>>>()?;
    let lp = match &config.eps {
        Some(eps) => LpChoice::Approx(parse_rational(eps)?),
        None => LpChoice::Auto,
    };
    let instances = expand_instances(config)?;
    let limits = ExactLimits { max_jobs: 30, ..ExactLimits::default() };
    let references: Vec<Reference> = instances
        .par_iter()
        .map(|inst| {
            if !config.exact_reference {
                return Reference::NoOracle("disabled".into());
            }
            match exact_tct_opt_with(&inst.norm, &limits) {
                Ok(sol) => Reference::Opt(sol.cost),
                Err(e) => Reference::NoOracle(e.to_string()),
            }
        })
        .collect();
    let tasks: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(i, algorithm)| {
            let inst = &instances[i];
            let options = SolveOptions {
                algorithm,
                lp: lp.clone(),
                seed: config.seed,
                trials: config.trials,
                limits: ExactLimits::default(),
            };
            let start = Instant::now();
            let result = solve(&inst.norm, &options);
            let wall_ms = if config.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let reference = references[i].clone();
            let depth = crate::model::compute_depth(inst.norm.base());
            match result {
                Ok(report) => {
                    let above_opt = match &reference {
                        Reference::Opt(opt) => report.solution.cost >= *opt,
                        Reference::NoOracle(_) => true,
                    };
                    BenchRow {
                        instance: inst.name.clone(),
                        n: inst.norm.n(),
                        depth,
                        algorithm: report.algorithm,
                        lp: report.lp_objective(),
                        ratio: report.ratio(),
                        pass: report.within_bound() && above_opt,
                        cost: Some(report.solution.cost.clone()),
                        mean_cost: report.mean_cost.clone(),
                        bound: report.factor.clone(),
                        reference,
                        error: None,
                        notes: report.notes,
                        wall_ms,
                    }
                }
                Err(e) => BenchRow {
                    instance: inst.name.clone(),
                    n: inst.norm.n(),
                    depth,
                    algorithm,
                    lp: None,
                    cost: None,
                    mean_cost: None,
                    ratio: None,
                    bound: None,
                    reference,
                    pass: false,
                    error: Some(e.to_string()),
                    notes: Vec::new(),
                    wall_ms,
                },
            }
        })
        .collect();
    let gap_curve = instances
        .iter()
        .zip(&references)
        .filter_map(|(inst, reference)| {
            let (d, k) = inst.gap?;
            let fractional = int(k as i64 + 1);
            let opt = match reference {
                Reference::Opt(opt) => Some(opt.clone()),
                Reference::NoOracle(_) => None,
            };
            let ratio = opt.as_ref().and_then(|o| o.finite()).map(|o| o / &fractional);
            Some(GapPoint { d, k, opt, fractional, ratio, limit: Rational::new((d as i64).into(), 2.into()) })
        })
        .collect();
    Ok(BenchReport { rows, gap_curve })
}

fn opt_json(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, rational_to_json)
}

fn opt_f64(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, |r| json!(to_f64(r)))
}

impl BenchReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let (opt, oracle) = match &r.reference {
                    Reference::Opt(opt) => (opt.to_json(), Value::Null),
                    Reference::NoOracle(why) => (Value::Null, json!(why)),
                };
                json!({
                    "instance": r.instance,
                    "n": r.n,
                    "depth": r.depth,
                    "algorithm": r.algorithm.name(),
                    "lp": opt_json(&r.lp),
                    "cost": r.cost.as_ref().map_or(Value::Null, Ext::to_json),
                    "mean_cost": opt_json(&r.mean_cost),
                    "ratio": opt_f64(&r.ratio),
                    "bound": opt_json(&r.bound),
                    "opt": opt,
                    "no_oracle": oracle,
                    "pass": r.pass,
                    "error": r.error,
                    "notes": r.notes,
                    "wall_ms": r.wall_ms,
                })
            })
            .collect();
        let curve: Vec<Value> = self
            .gap_curve
            .iter()
            .map(|g| {
                json!({
                    "d": g.d,
                    "k": g.k,
                    "opt": g.opt.as_ref().map_or(Value::Null, Ext::to_json),
                    "fractional": rational_to_json(&g.fractional),
                    "ratio": opt_json(&g.ratio),
                    "ratio_f64": opt_f64(&g.ratio),
                    "limit": rational_to_json(&g.limit),
                })
            })
            .collect();
        json!({ "rows": rows, "gap_curve": curve, "all_pass": self.all_pass() })
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let fmt_f = |r: &Option<Rational>| r.as_ref().map_or("-".to_string(), |r| format!("{:.4}", to_f64(r)));
        let _ = writeln!(
            out,
            "{:<24} {:>4} {:>3} {:<10} {:>10} {:>10} {:>8} {:>8} {:>10} {:<4} {:>9}",
            "instance", "n", "d", "algorithm", "lp", "cost", "ratio", "bound", "opt", "pass", "wall_ms"
        );
        for r in &self.rows {
            let cost = r.cost.as_ref().map_or("-".to_string(), |c| format!("{:.4}", c.to_f64()));
            let opt = match &r.reference {
                Reference::Opt(o) => format!("{:.4}", o.to_f64()),
                Reference::NoOracle(_) => "no oracle".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<24} {:>4} {:>3} {:<10} {:>10} {:>10} {:>8} {:>8} {:>10} {:<4} {:>9.2}",
                r.instance,
                r.n,
                r.depth,
                r.algorithm.name(),
                fmt_f(&r.lp),
                cost,
                fmt_f(&r.ratio),
                fmt_f(&r.bound),
                opt,
                if r.pass { "ok" } else { "FAIL" },
                r.wall_ms
            );
            if let Some(e) = &r.error {
                let _ = writeln!(out, "    error: {e}");
            }
        }
        if !self.gap_curve.is_empty() {
            let _ = writeln!(out, "\ngap curve (OPT / fractional)");
            let _ = writeln!(out, "{:>3} {:>4} {:>8} {:>10} {:>8} {:>6}", "d", "k", "opt", "fractional", "ratio", "limit");
            for g in &self.gap_curve {
                let opt = g.opt.as_ref().map_or("-".to_string(), |o| o.to_string());
                let _ = writeln!(
                    out,
                    "{:>3} {:>4} {:>8} {:>10} {:>8} {:>6}",
                    g.d,
                    g.k,
                    opt,
                    g.fractional,
                    fmt_f(&g.ratio),
                    g.limit
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::number::ratio;

    #[test]
    fn empty_config_gives_empty_report() {
        let config = BenchConfig::from_json(&json!({})).unwrap();
        let report = run_bench(&config).unwrap();
        assert!(report.rows.is_empty() && report.gap_curve.is_empty());
        assert!(report.all_pass());
    }

    #[test]
    fn unknown_algorithm_is_rejected() {
        let config = BenchConfig::from_json(&json!({"algorithms": ["magic"]})).unwrap();
        assert!(matches!(run_bench(&config), Err(Error::InvalidParameter(_))));
        assert!(BenchConfig::from_json(&json!({"bogus": 1})).is_err());
    }

    #[test]
    fn gap_curve_and_rows() {
        let config = BenchConfig::from_json(&json!({
            "instances": [{"family": "gap", "d": 3, "k": [2, 4]}, {"family": "random", "depth": [4], "jobs": [10], "seeds": [1, 2]}],
            "algorithms": ["det", "rand", "naive"],
            "trials": 3,
            "timing": false
        }))
        .unwrap();
        let report = run_bench(&config).unwrap();
        assert_eq!(report.rows.len(), 12);
        assert!(report.all_pass(), "{}", report.to_table());
        assert_eq!(report.rows[0].instance, "gap-d3-k2");
        assert_eq!(report.rows[1].algorithm, Algorithm::Rand);
        let ratios: Vec<_> = report.gap_curve.iter().map(|g| g.ratio.clone().unwrap()).collect();
        assert_eq!(ratios, vec![int(1), ratio(6, 5)]);
        let again = run_bench(&config).unwrap();
        assert_eq!(report.to_json().to_string(), again.to_json().to_string());
        assert!(report.to_table().contains("gap curve"));
    }
}
