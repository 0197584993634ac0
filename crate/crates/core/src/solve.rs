//! One-shot solving: fractional cover, then a rounding algorithm or an
//! exact/combinatorial baseline, with the guarantee the result is held to.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{exact_tct_opt_with, ExactLimits};
use crate::io::solution_to_json;
use crate::lp::{solve_lp_with, LpMode, LpOptions};
use crate::model::{check_feasible, layer, AccelerationSet, FractionalCover, LayeredView, NormalizedInstance, Quality};
use crate::number::{int, rational_to_json, ratio, to_f64, Ext, Rational};
use crate::rounding;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Det,
    Rand,
    SlackDet,
    SlackRand,
    Naive,
    Bye,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Det,
        Algorithm::Rand,
        Algorithm::SlackDet,
        Algorithm::SlackRand,
        Algorithm::Naive,
        Algorithm::Bye,
        Algorithm::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Det => "det",
            Algorithm::Rand => "rand",
            Algorithm::SlackDet => "slack-det",
            Algorithm::SlackRand => "slack-rand",
            Algorithm::Naive => "naive",
            Algorithm::Bye => "bye",
            Algorithm::Exact => "exact",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Rand | Algorithm::SlackRand)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

/// How the fractional cover is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpChoice {
    Exact,
    Approx(Rational),
    /// Exact when the blocker fits the limits, otherwise `Approx(1/20)`.
    Auto,
}

pub fn default_eps() -> Rational {
    ratio(1, 20)
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub lp: LpChoice,
    pub seed: u64,
    /// Independent runs of a randomized algorithm; the cheapest is kept.
    pub trials: usize,
    pub limits: ExactLimits,
}

impl SolveOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        SolveOptions { algorithm, lp: LpChoice::Auto, seed: 0, trials: 1, limits: ExactLimits::default() }
    }
}

/// Approximation factor against the fractional objective, for depth `d`
/// and `n` jobs. Randomized factors hold in expectation.
pub fn guarantee_factor(algorithm: Algorithm, d: usize, n: usize) -> Option<Rational> {
    let half = ratio(d.max(2) as i64, 2);
    let n = n.max(1) as i64;
    let d_i = d as i64;
    match algorithm {
        Algorithm::Det | Algorithm::Rand => Some(half),
        Algorithm::SlackDet => Some(half - ratio(d_i, 128 * n)),
        Algorithm::SlackRand => Some(half - ratio(d_i, 64 * n)),
        Algorithm::Naive | Algorithm::Bye => Some(int(d.max(1) as i64)),
        Algorithm::Exact => None,
    }
}

pub fn compute_cover(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    choice: &LpChoice,
    limits: &ExactLimits,
) -> Result<FractionalCover> {
    let options = LpOptions { limits: limits.clone(), ..LpOptions::default() };
    let approx = |eps: Rational| solve_lp_with(norm, layered, &LpMode::Approx(eps), &options).map(|s| s.cover);
    match choice {
        LpChoice::Exact => solve_lp_with(norm, layered, &LpMode::ExactSmallDepth, &options).map(|s| s.cover),
        LpChoice::Approx(eps) => approx(eps.clone()),
        LpChoice::Auto => match solve_lp_with(norm, layered, &LpMode::ExactSmallDepth, &options) {
            Ok(s) => Ok(s.cover),
            Err(Error::CapExceeded(_)) => approx(default_eps()),
            Err(e) => Err(e),
        },
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub trials: usize,
    pub depth: usize,
    pub cover: Option<FractionalCover>,
    pub solution: AccelerationSet,
    /// Mean cost over all trials of a randomized algorithm.
    pub mean_cost: Option<Rational>,
    /// Cost of every trial, in trial order.
    pub trial_costs: Vec<Rational>,
    pub factor: Option<Rational>,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn lp_objective(&self) -> Option<Rational> {
        self.cover.as_ref().and_then(|c| c.finite_objective().ok())
    }

    /// `cost / LP`, undefined when the LP value is zero.
    pub fn ratio(&self) -> Option<Rational> {
        let lp = self.lp_objective()?;
        let cost = self.solution.cost.finite()?;
        (!lp.is_zero()).then(|| cost / lp)
    }

    /// The cost is within the guarantee; vacuous when there is no LP value
    /// or no guarantee. Randomized guarantees bound the expectation, so the
    /// sample mean is allowed three standard errors above the bound, and a
    /// single trial is not tested.
    pub fn within_bound(&self) -> bool {
        let (Some(lp), Some(factor)) = (self.lp_objective(), &self.factor) else {
            return true;
        };
        let bound = factor * lp;
        let Some(mean) = &self.mean_cost else {
            return self.solution.cost <= Ext::Finite(bound);
        };
        let t = self.trial_costs.len();
        if t < 2 {
            return true;
        }
        let m = to_f64(mean);
        let var = self.trial_costs.iter().map(|c| (to_f64(c) - m).powi(2)).sum::<f64>() / (t - 1) as f64;
        m <= to_f64(&bound) + 3.0 * (var / t as f64).sqrt() + 1e-9
    }

    pub fn to_json(&self, norm: &NormalizedInstance) -> Value {
        let mut out = solution_to_json(norm, &self.solution);
        let obj = out.as_object_mut().expect("solution is an object");
        let opt_rational = |r: Option<Rational>| r.as_ref().map_or(Value::Null, rational_to_json);
        obj.insert("algorithm".into(), json!(self.algorithm.name()));
        obj.insert("seed".into(), json!(self.seed));
        obj.insert("trials".into(), json!(self.trials));
        obj.insert("depth".into(), json!(self.depth));
        obj.insert("lp_objective".into(), opt_rational(self.lp_objective()));
        let quality = match self.cover.as_ref().map(|c| &c.quality) {
            Some(Quality::Exact) => json!("exact"),
            Some(Quality::Approx(_)) => json!("approx"),
            None => Value::Null,
        };
        obj.insert("lp_quality".into(), quality);
        obj.insert("ratio".into(), self.ratio().map_or(Value::Null, |r| json!(to_f64(&r))));
        obj.insert("bound_factor".into(), opt_rational(self.factor.clone()));
        if let Some(mean) = &self.mean_cost {
            obj.insert("mean_cost".into(), rational_to_json(mean));
        }
        obj.insert("within_bound".into(), json!(self.within_bound()));
        obj.insert("notes".into(), json!(self.notes));
        out
    }
}

fn round_once(
    algorithm: Algorithm,
    norm: &NormalizedInstance,
    layered: &LayeredView,
    x: &[Rational],
    rng: &mut ChaCha8Rng,
) -> Result<AccelerationSet> {
    match algorithm {
        Algorithm::Det => rounding::round_deterministic(norm, layered, x),
        Algorithm::Rand => rounding::round_randomized(norm, layered, x, rng),
        Algorithm::SlackDet => rounding::round_slack_deterministic(norm, layered, x),
        Algorithm::SlackRand => rounding::round_slack_randomized(norm, layered, x, rng),
        Algorithm::Naive => rounding::round_naive(norm, layered, x),
        Algorithm::Bye | Algorithm::Exact => unreachable!("not a rounding algorithm"),
    }
}

pub fn solve(norm: &NormalizedInstance, options: &SolveOptions) -> Result<SolveReport> {
    let layered = layer(norm.base());
    let mut notes = Vec::new();
    let mut algorithm = options.algorithm;
    if matches!(algorithm, Algorithm::SlackDet | Algorithm::SlackRand) && layered.depth() < 4 {
        let fallback = if algorithm == Algorithm::SlackDet { Algorithm::Det } else { Algorithm::Rand };
        notes.push(format!(
            "depth {} is below 4, so {} ran instead of {}",
            layered.depth(),
            fallback,
            algorithm
        ));
        algorithm = fallback;
    }
    let needs_cover = !matches!(algorithm, Algorithm::Bye | Algorithm::Exact);
    let cover = match compute_cover(norm, &layered, &options.lp, &options.limits) {
        Ok(cover) => Some(cover),
        Err(e) if !needs_cover => {
            notes.push(format!("no LP reference: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let trials = if algorithm.is_randomized() { options.trials.max(1) } else { 1 };
    let mut mean_cost = None;
    let mut trial_costs = Vec::new();
    let solution = match algorithm {
        Algorithm::Bye => rounding::bar_yehuda_even(norm)?,
        Algorithm::Exact => exact_tct_opt_with(norm, &options.limits)?,
        _ => {
            let x = &cover.as_ref().expect("rounding algorithms have a cover").x;
            let mut best: Option<AccelerationSet> = None;
            let mut total = Rational::zero();
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                rng.set_stream(t as u64);
                let sol = round_once(algorithm, norm, &layered, x, &mut rng)?;
                let cost = sol.cost.finite().cloned().ok_or_else(|| Error::Internal("rounded to an infinite cost".into()))?;
                total += &cost;
                trial_costs.push(cost);
                if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                    best = Some(sol);
                }
            }
            if algorithm.is_randomized() {
                mean_cost = Some(total / int(trials as i64));
            }
            best.expect("at least one trial")
        }
    };
    if !check_feasible(norm, &solution).is_feasible() {
        return Err(Error::Internal(format!("{algorithm} produced an infeasible solution")));
    }
    Ok(SolveReport {
        algorithm,
        seed: options.seed,
        trials,
        depth: layered.depth(),
        factor: guarantee_factor(algorithm, layered.depth(), norm.n()),
        cover,
        solution,
        mean_cost,
        trial_costs: if algorithm.is_randomized() { trial_costs } else { Vec::new() },
        notes,
    })
}
