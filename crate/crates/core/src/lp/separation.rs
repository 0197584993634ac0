//! Separation oracles for the covering LP.

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{LayeredView, NormalizedInstance, ScaledDelays};
use crate::number::{int, Rational};

pub use crate::model::{check_feasible as separate_integral, Feasibility};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    Accept,
    Cut(Vec<usize>),
}

/// Quantized separation: `x_v` is rounded up to `q_v · ε/(2d)` and a chain
/// is accepted once its rounded sum reaches 1. A returned chain has slow
/// delay above the deadline and `Σ x_v < 1`; acceptance implies
/// `Σ x_v ≥ 1 - ε/2` on every chain that exceeds the deadline.
pub fn separate_fractional(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    x: &[Rational],
    eps: &Rational,
) -> Result<Separation> {
    let scaled = ScaledDelays::new(norm)?;
    separate_scaled(norm, layered.depth(), &scaled, x, eps)
}

pub(crate) fn separate_scaled(
    norm: &NormalizedInstance,
    depth: usize,
    scaled: &ScaledDelays,
    x: &[Rational],
    eps: &Rational,
) -> Result<Separation> {
    Ok(match quantized_witness(norm, depth, scaled, x, eps)? {
        Some(chain) => Separation::Cut(shrink_cut(scaled, chain)),
        None => Separation::Accept,
    })
}

/// The chain found by the quantized dynamic program before shrinking: the
/// slowest chain whose rounded sum stays below 1, ties broken towards the
/// lexicographically smallest chain.
pub fn quantized_witness(
    norm: &NormalizedInstance,
    depth: usize,
    scaled: &ScaledDelays,
    x: &[Rational],
    eps: &Rational,
) -> Result<Option<Vec<usize>>> {
    if *eps <= Rational::zero() || *eps > int(1) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0, 1], got {eps}")));
    }
    let n = norm.n();
    let span = int(2 * depth.max(1) as i64) / eps;
    let cap = span
        .ceil()
        .to_integer()
        .to_usize()
        .filter(|&q| q <= 1 << 20)
        .ok_or_else(|| Error::InvalidParameter("ε too small for the quantized oracle".into()))?;
    let q: Vec<usize> = x
        .iter()
        .map(|xv| (xv * &span).ceil().to_integer().to_usize().unwrap_or(cap).min(cap))
        .collect();
    let reach = norm.base().reachability();
    let topo = norm.base().topo_order();
    // best[v][s]: largest delay of a chain ending in v with rounded sum s < cap
    const NONE: i128 = -1;
    let mut best = vec![vec![NONE; cap]; n];
    let mut parent = vec![vec![usize::MAX; cap]; n];
    let mut done: Vec<usize> = Vec::with_capacity(n);
    for &v in topo {
        let (t, qv) = (scaled.delays[v], q[v]);
        if qv < cap {
            best[v][qv] = t;
            let mut preds: Vec<usize> = done.iter().copied().filter(|&u| reach[u][v]).collect();
            preds.sort_unstable();
            for s in qv..cap {
                for &u in &preds {
                    let b = best[u][s - qv];
                    if b != NONE && b + t > best[v][s] {
                        best[v][s] = b + t;
                        parent[v][s] = u;
                    }
                }
            }
        }
        done.push(v);
    }
    let mut witness: Option<(i128, Vec<usize>)> = None;
    for v in 0..n {
        for s in 0..cap {
            let delay = best[v][s];
            if delay > scaled.deadline && witness.as_ref().is_none_or(|(d, _)| delay >= *d) {
                let mut chain = vec![v];
                let (mut u, mut sum) = (v, s);
                while parent[u][sum] != usize::MAX {
                    let p = parent[u][sum];
                    sum -= q[u];
                    u = p;
                    chain.push(u);
                }
                chain.reverse();
                if witness.as_ref().is_none_or(|(d, w)| delay > *d || chain < *w) {
                    witness = Some((delay, chain));
                }
            }
        }
    }
    Ok(witness.map(|(_, chain)| chain))
}

/// Drops zero-delay jobs, then trims the ends of a violated chain while it
/// still exceeds the deadline.
pub fn shrink_cut(scaled: &ScaledDelays, chain: Vec<usize>) -> Vec<usize> {
    let mut chain: Vec<usize> = chain.into_iter().filter(|&v| scaled.delays[v] > 0).collect();
    let mut sum = scaled.chain_delay(&chain);
    loop {
        let front = chain.first().map(|&v| scaled.delays[v]);
        let back = chain.last().map(|&v| scaled.delays[v]);
        match (front, back) {
            (Some(f), Some(b)) if chain.len() > 1 && sum - f.min(b) > scaled.deadline => {
                if f <= b {
                    chain.remove(0);
                    sum -= f;
                } else {
                    chain.pop();
                    sum -= b;
                }
            }
            _ => return chain,
        }
    }
}
