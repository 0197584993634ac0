//! Threshold rounding of fractional covers, plus the two simple baselines.
//!
//! Every threshold rule accelerates job `v` when `x_v` clears the threshold
//! of its layer `l(v)`; thresholds summing to at most 1 guarantee that every
//! violated chain (which has `Σ x_v ≥ 1` and meets each layer at most once)
//! gets a job accelerated.

pub mod assignment;
pub mod thresholds;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{check_feasible_mask, AccelerationSet, Feasibility, LayeredView, NormalizedInstance};
use crate::number::{int, Ext, Rational};
use assignment::min_cost_assignment;
use thresholds::{grid_denominator, interval, position_groups, sample_assignment, ThresholdAssignment};

fn check_point(norm: &NormalizedInstance, layered: &LayeredView, x: &[Rational]) -> Result<()> {
    if x.len() != norm.n() || layered.n() != norm.n() {
        return Err(Error::InvalidParameter(format!(
            "point has {} values and layering {} jobs for an instance of {} jobs",
            x.len(),
            layered.n(),
            norm.n()
        )));
    }
    if let Some(v) = x.iter().position(|xv| xv.is_negative() || *xv > int(1)) {
        return Err(Error::InvalidParameter(format!("x[{}] = {} lies outside [0, 1]", norm.id(v), x[v])));
    }
    Ok(())
}

/// The LP value `Σ c_v x_v`, which must be finite.
fn finite_objective(norm: &NormalizedInstance, x: &[Rational]) -> Result<Rational> {
    let mut total = Rational::zero();
    for (v, xv) in x.iter().enumerate().filter(|(_, xv)| !xv.is_zero()) {
        match norm.fast_cost(v) {
            Ext::Finite(c) => total += c * xv,
            Ext::Infinite => {
                return Err(Error::InvalidParameter(format!(
                    "x puts weight on `{}`, whose fast option has infinite cost",
                    norm.id(v)
                )))
            }
        }
    }
    Ok(total)
}

/// Threshold depth: layered instances of depth 1 use the two-level scheme.
fn threshold_depth(layered: &LayeredView) -> usize {
    layered.depth().max(2)
}

fn from_mask(norm: &NormalizedInstance, mask: &[bool]) -> AccelerationSet {
    AccelerationSet::new(norm, (0..mask.len()).filter(|&v| mask[v]))
}

/// Randomized rounding with precomputed integer comparisons, for repeated
/// trials on the same point: `x_v ≥ g / D` iff `⌊x_v D⌋ ≥ g`.
#[derive(Clone, Debug)]
pub struct RandomizedRounder {
    d: usize,
    level: Vec<usize>,
    floor_grid: Vec<i128>,
}

impl RandomizedRounder {
    pub fn new(norm: &NormalizedInstance, layered: &LayeredView, x: &[Rational]) -> Result<Self> {
        check_point(norm, layered, x)?;
        let d = threshold_depth(layered);
        let den = Rational::from_integer(grid_denominator(d).into());
        let floor_grid = x
            .iter()
            .map(|xv| (xv * &den).floor().to_integer().to_i128().expect("x ≤ 1 keeps the grid value in range"))
            .collect();
        Ok(RandomizedRounder { d, level: layered.levels().to_vec(), floor_grid })
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn round(&self, thresholds: &ThresholdAssignment) -> Vec<bool> {
        self.level
            .iter()
            .zip(&self.floor_grid)
            .map(|(&l, &g)| g >= thresholds.grid(l))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(ThresholdAssignment, Vec<bool>)> {
        let thresholds = sample_assignment(self.d, rng)?;
        let mask = self.round(&thresholds);
        Ok((thresholds, mask))
    }
}

/// Accelerates `v` iff `x_v ≥ a_{l(v)}` for random thresholds. Expected cost
/// at most `(d/2) Σ c_v x_v`.
pub fn round_randomized<R: Rng + ?Sized>(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    x: &[Rational],
    rng: &mut R,
) -> Result<AccelerationSet> {
    if norm.n() == 0 {
        return Ok(AccelerationSet::empty());
    }
    let (_, mask) = RandomizedRounder::new(norm, layered, x)?.sample(rng)?;
    Ok(from_mask(norm, &mask))
}

/// `E[x̄_v | σ(l(v)) = p]` for a threshold uniform in the interval of
/// position `p`.
pub fn conditional_expectation(xv: &Rational, p: usize, d: usize) -> Rational {
    let (lo, hi) = interval(p, d);
    if *xv < lo {
        Rational::zero()
    } else if *xv > hi {
        int(1)
    } else {
        (xv - lo) * int((d * d) as i64) / int(2)
    }
}

/// Derandomized threshold rounding: the permutation minimizes the expected
/// cost by an assignment, then each group picks the cheapest realizable
/// cut levels `a'_i` with `Σ a'_i < S_I` and `v` is accelerated iff
/// `x_v > a'_{l(v)}`. Cost at most `(d/2) Σ c_v x_v`.
pub fn round_deterministic(norm: &NormalizedInstance, layered: &LayeredView, x: &[Rational]) -> Result<AccelerationSet> {
    check_point(norm, layered, x)?;
    finite_objective(norm, x)?;
    if norm.n() == 0 {
        return Ok(AccelerationSet::empty());
    }
    let d = threshold_depth(layered);
    let layer = |i: usize| -> &[usize] { if i <= layered.depth() { layered.layer(i) } else { &[] } };
    let finite_cost = |v: usize| norm.fast_cost(v).finite().cloned().unwrap_or_else(Rational::zero);
    let rho: Vec<Vec<Rational>> = (1..=d)
        .map(|i| {
            (1..=d)
                .map(|p| {
                    layer(i)
                        .iter()
                        .filter(|&&v| !x[v].is_zero())
                        .fold(Rational::zero(), |acc, &v| acc + finite_cost(v) * conditional_expectation(&x[v], p, d))
                })
                .collect()
        })
        .collect();
    let sigma: Vec<usize> = min_cost_assignment(&rho).into_iter().map(|j| j + 1).collect();
    let mut cut_level = vec![Rational::zero(); d + 1];
    for group in position_groups(d) {
        let layers: Vec<usize> = (1..=d).filter(|&i| group.contains(&sigma[i - 1])).collect();
        let budget = group.iter().fold(Rational::zero(), |acc, &p| {
            let (lo, hi) = interval(p, d);
            acc + (lo + hi) / int(2)
        });
        // per layer: candidate cut levels and the cost of rounding above each
        let options: Vec<Vec<(Rational, Rational)>> = layers
            .iter()
            .map(|&i| {
                let (lo, hi) = interval(sigma[i - 1], d);
                let mut levels: Vec<Rational> = layer(i).iter().map(|&v| x[v].clone()).filter(|xv| *xv >= lo && *xv <= hi).collect();
                levels.push(lo);
                levels.sort();
                levels.dedup();
                levels
                    .into_iter()
                    .map(|a| {
                        let cost = layer(i).iter().filter(|&&v| x[v] > a).fold(Rational::zero(), |acc, &v| acc + finite_cost(v));
                        (a, cost)
                    })
                    .collect()
            })
            .collect();
        let mut best: Option<(Rational, Vec<usize>)> = None;
        let mut pick = vec![0usize; layers.len()];
        'enumerate: loop {
            let sum = pick.iter().enumerate().fold(Rational::zero(), |acc, (k, &o)| acc + &options[k][o].0);
            if sum < budget {
                let cost = pick.iter().enumerate().fold(Rational::zero(), |acc, (k, &o)| acc + &options[k][o].1);
                if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    best = Some((cost, pick.clone()));
                }
            }
            for k in (0..pick.len()).rev() {
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    continue 'enumerate;
                }
                pick[k] = 0;
            }
            break;
        }
        let (_, pick) = best.expect("the interval lower ends always fit the group budget");
        for (k, &i) in layers.iter().enumerate() {
            cut_level[i] = options[k][pick[k]].0.clone();
        }
    }
    let fast = (0..norm.n()).filter(|&v| x[v] > cut_level[layered.level(v)]);
    Ok(AccelerationSet::new(norm, fast))
}

/// Per-layer slack `s_i = min{1/d, a_i, a_i - max{x_v : v ∈ V_i, x_v < a_i}}`,
/// where an empty maximum drops the last term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlackVector {
    /// Slack of layer `i` at index `i - 1`.
    pub s: Vec<Rational>,
}

/// Slack of one layer holding `values` at threshold `a`.
pub fn layer_slack<'a>(values: impl IntoIterator<Item = &'a Rational>, a: &Rational, d: usize) -> Rational {
    let cap = Rational::new(1.into(), (d as i64).into());
    let mut s = cap.min(a.clone());
    if let Some(m) = values.into_iter().filter(|xv| *xv < a).max() {
        s = s.min(a - m);
    }
    s
}

pub fn slack_vector(layered: &LayeredView, x: &[Rational], thresholds: &ThresholdAssignment) -> SlackVector {
    let d = thresholds.d();
    let s = (1..=d)
        .map(|i| {
            let jobs: &[usize] = if i <= layered.depth() { layered.layer(i) } else { &[] };
            layer_slack(jobs.iter().map(|&v| &x[v]), &thresholds.threshold(i), d)
        })
        .collect();
    SlackVector { s }
}

/// Threshold rounding where level `λ` is raised by the slack of every layer
/// outside its group.
pub fn round_slack_with(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    x: &[Rational],
    thresholds: &ThresholdAssignment,
    lambda: usize,
) -> Result<AccelerationSet> {
    check_point(norm, layered, x)?;
    let slack = slack_vector(layered, x, thresholds);
    let group = thresholds.group_of_layer(lambda);
    let raise = (1..=thresholds.d())
        .filter(|i| !group.contains(i))
        .fold(Rational::zero(), |acc, i| acc + &slack.s[i - 1]);
    let level: Vec<Rational> = (1..=thresholds.d())
        .map(|i| if i == lambda { thresholds.threshold(i) + &raise } else { thresholds.threshold(i) })
        .collect();
    let fast = (0..norm.n()).filter(|&v| x[v] >= level[layered.level(v) - 1]);
    Ok(AccelerationSet::new(norm, fast))
}

fn require_depth_four(layered: &LayeredView) -> Result<()> {
    if layered.depth() < 4 {
        return Err(Error::InvalidParameter(format!(
            "slack rounding needs depth at least 4, instance has depth {}",
            layered.depth()
        )));
    }
    Ok(())
}

/// Expected cost at most `(d/2 - d/(64n)) Σ c_v x_v`; needs `d ≥ 4`.
pub fn round_slack_randomized<R: Rng + ?Sized>(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    x: &[Rational],
    rng: &mut R,
) -> Result<AccelerationSet> {
    require_depth_four(layered)?;
    let thresholds = sample_assignment(layered.depth(), rng)?;
    let lambda = rng.gen_range(1..=layered.depth());
    round_slack_with(norm, layered, x, &thresholds, lambda)
}

/// Costs rounded down to multiples of `u = d·LP/(128 n²)`, in units of `u`.
pub fn quantized_units(norm: &NormalizedInstance, d: usize, lp: &Rational) -> Result<Vec<u64>> {
    let n = norm.n() as i64;
    let unit = int(d as i64) * lp / int(128 * n * n);
    (0..norm.n())
        .map(|v| match norm.fast_cost(v) {
            Ext::Finite(c) => (c / &unit)
                .floor()
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::Internal("quantized cost out of range".into())),
            Ext::Infinite => Ok(u64::MAX),
        })
        .collect()
}

#[derive(Clone, Debug)]
struct SlackState {
    units: u64,
    budget: Rational,
    cost: Rational,
    picks: Vec<usize>,
}

/// Cheapest threshold choice after cost quantization. Per layer the cut
/// level `a'_i` is 0 or a positive x-value of the layer and `v` is
/// accelerated iff `x_v > a'_{l(v)}`; such levels are realizable by
/// thresholds with `Σ a_i ≤ 1` exactly when `Σ a'_i < 1`. Cost at most
/// `(d/2 - d/(128n)) Σ c_v x_v`; needs `d ≥ 4`.
pub fn round_slack_deterministic(norm: &NormalizedInstance, layered: &LayeredView, x: &[Rational]) -> Result<AccelerationSet> {
    require_depth_four(layered)?;
    check_point(norm, layered, x)?;
    let lp = finite_objective(norm, x)?;
    if lp.is_zero() {
        return Ok(AccelerationSet::new(norm, (0..norm.n()).filter(|&v| x[v].is_positive())));
    }
    let d = layered.depth();
    let units = quantized_units(norm, d, &lp)?;
    let one = int(1);
    let mut states = vec![SlackState { units: 0, budget: Rational::zero(), cost: Rational::zero(), picks: Vec::new() }];
    let mut levels_of = Vec::with_capacity(d);
    for i in 1..=d {
        let jobs = layered.layer(i);
        let mut levels: Vec<Rational> = jobs.iter().map(|&v| x[v].clone()).filter(|xv| xv.is_positive()).collect();
        levels.push(Rational::zero());
        levels.sort();
        levels.dedup();
        let options: Vec<(Rational, u64, Rational)> = levels
            .iter()
            .map(|a| {
                let above = jobs.iter().filter(|&&v| x[v] > *a);
                let u = above.clone().map(|&v| units[v]).sum();
                let c = above.fold(Rational::zero(), |acc, &v| acc + norm.fast_cost(v).finite().cloned().unwrap_or_default());
                (a.clone(), u, c)
            })
            .collect();
        let mut next = Vec::new();
        for state in &states {
            for (k, (a, u, c)) in options.iter().enumerate() {
                let budget = &state.budget + a;
                if budget >= one {
                    continue;
                }
                let mut picks = state.picks.clone();
                picks.push(k);
                next.push(SlackState { units: state.units + u, budget, cost: &state.cost + c, picks });
            }
        }
        next.sort_by(|p, q| p.units.cmp(&q.units).then(p.budget.cmp(&q.budget)).then(p.cost.cmp(&q.cost)).then(p.picks.cmp(&q.picks)));
        let mut front: Vec<SlackState> = Vec::new();
        for state in next {
            if front.last().is_none_or(|last| state.budget < last.budget) {
                front.push(state);
            }
        }
        states = front;
        levels_of.push(levels);
    }
    let best = states
        .into_iter()
        .min_by(|p, q| p.cost.cmp(&q.cost).then(p.units.cmp(&q.units)).then(p.picks.cmp(&q.picks)))
        .ok_or_else(|| Error::Internal("no threshold choice fits the budget".into()))?;
    let fast = (0..norm.n()).filter(|&v| {
        let i = layered.level(v);
        x[v] > levels_of[i - 1][best.picks[i - 1]]
    });
    Ok(AccelerationSet::new(norm, fast))
}

/// Accelerates every job with `x_v ≥ 1/d`. Cost at most `d Σ c_v x_v`.
pub fn round_naive(norm: &NormalizedInstance, layered: &LayeredView, x: &[Rational]) -> Result<AccelerationSet> {
    check_point(norm, layered, x)?;
    let cut = Rational::new(1.into(), (layered.depth().max(1) as i64).into());
    Ok(AccelerationSet::new(norm, (0..norm.n()).filter(|&v| x[v] >= cut)))
}

/// Primal-dual covering: while a chain exceeds the deadline, lower the
/// residual cost of its unaccelerated jobs by their minimum and accelerate
/// the jobs that reach zero. Cost at most `d·LP`.
pub fn bar_yehuda_even(norm: &NormalizedInstance) -> Result<AccelerationSet> {
    let n = norm.n();
    let all_finite: Vec<bool> = (0..n).map(|v| !norm.fast_cost(v).is_infinite()).collect();
    if let Feasibility::Violated { delay, .. } = check_feasible_mask(norm, &all_finite) {
        return Err(Error::Infeasible(format!(
            "even with every finite-cost job accelerated a chain has delay {delay}"
        )));
    }
    let mut residual: Vec<Option<Rational>> = (0..n).map(|v| norm.fast_cost(v).finite().cloned()).collect();
    let mut fast = vec![false; n];
    while let Feasibility::Violated { chain, .. } = check_feasible_mask(norm, &fast) {
        let live: Vec<usize> = chain
            .into_iter()
            .filter(|&v| !fast[v] && !norm.slow_delay(v).is_zero() && residual[v].is_some())
            .collect();
        let delta = live
            .iter()
            .filter_map(|&v| residual[v].clone())
            .min()
            .ok_or_else(|| Error::Internal("violated chain without an accelerable job".into()))?;
        for &v in &live {
            let r = residual[v].as_mut().expect("live job has finite cost");
            *r -= &delta;
            if r.is_zero() {
                fast[v] = true;
            }
        }
    }
    Ok(from_mask(norm, &fast))
}
