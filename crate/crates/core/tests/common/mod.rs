//! Oracles written independently of the library: own topological order,
//! own transitive closure, plain subset enumeration.
#![allow(dead_code)]

use std::collections::VecDeque;

use tct_core::dvd::Digraph;
use tct_core::model::{NormalizedInstance, TctInstance};
use tct_core::{Ext, Rational};

fn topo(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(u, v) in edges {
        indeg[v] += 1;
        succ[u].push(v);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    assert_eq!(order.len(), n, "oracle expects an acyclic graph");
    order
}

/// Longest path delay with per-job weights.
pub fn longest(n: usize, edges: &[(usize, usize)], w: &[Ext]) -> Ext {
    let mut best: Vec<Ext> = w.to_vec();
    for &u in &topo(n, edges) {
        for &(a, b) in edges.iter().filter(|e| e.0 == u) {
            let cand = &best[a] + &w[b];
            if cand > best[b] {
                best[b] = cand;
            }
        }
    }
    best.into_iter().max().unwrap_or(Ext::zero())
}

pub fn residual(norm: &NormalizedInstance, fast: &[bool]) -> Vec<Ext> {
    (0..norm.n()).map(|v| if fast[v] { Ext::zero() } else { norm.slow_delay(v).clone() }).collect()
}

pub fn feasible(norm: &NormalizedInstance, fast: &[bool]) -> bool {
    longest(norm.n(), norm.base().edges(), &residual(norm, fast)) <= Ext::Finite(norm.deadline().clone())
}

pub fn mask(n: usize, set: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut m = vec![false; n];
    for v in set {
        m[v] = true;
    }
    m
}

pub fn cost(norm: &NormalizedInstance, fast: &[bool]) -> Ext {
    (0..norm.n()).filter(|&v| fast[v]).map(|v| norm.fast_cost(v).clone()).sum()
}

/// Minimum cost over all `2^n` subsets.
pub fn brute_tct_opt(norm: &NormalizedInstance) -> Option<Ext> {
    let n = norm.n();
    assert!(n <= 22, "brute force is limited to 22 jobs");
    let mut best: Option<Ext> = None;
    for bits in 0u32..(1u32 << n) {
        let fast: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
        let c = cost(norm, &fast);
        if best.as_ref().is_some_and(|b| c >= *b) {
            continue;
        }
        if feasible(norm, &fast) {
            best = Some(c);
        }
    }
    best
}

/// Minimum cost over all alternative vectors of a general instance.
pub fn brute_original_opt(instance: &TctInstance) -> Option<Ext> {
    let n = instance.n();
    let sizes: Vec<usize> = instance.jobs().iter().map(|j| j.alternatives.len()).collect();
    let mut choice = vec![0usize; n];
    let mut best: Option<Ext> = None;
    let deadline = Ext::Finite(instance.deadline().clone());
    loop {
        let delays: Vec<Ext> = (0..n).map(|v| instance.job(v).alternatives[choice[v]].delay.clone()).collect();
        let c: Ext = (0..n).map(|v| instance.job(v).alternatives[choice[v]].cost.clone()).sum();
        if !c.is_infinite() && longest(n, instance.edges(), &delays) <= deadline && best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < sizes[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Transitive closure by repeated relaxation.
pub fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for &(u, v) in edges {
        reach[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Every chain of the instance (sequences increasing in the order).
pub fn all_chains(norm: &NormalizedInstance) -> Vec<Vec<usize>> {
    let n = norm.n();
    let reach = closure(n, norm.base().edges());
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        for w in 0..n {
            if reach[last][w] {
                let mut next = chain.clone();
                next.push(w);
                stack.push(next);
            }
        }
        out.push(chain);
    }
    out
}

/// `Σ_{v∈P} x_v ≥ 1` for every chain whose slow delay exceeds the deadline.
pub fn lp_feasible(norm: &NormalizedInstance, x: &[Rational]) -> bool {
    let deadline = Ext::Finite(norm.deadline().clone());
    let one = Rational::from_integer(1.into());
    all_chains(norm).into_iter().all(|chain| {
        let delay: Ext = chain.iter().map(|&v| norm.slow_delay(v).clone()).sum();
        delay <= deadline || chain.iter().fold(Rational::from_integer(0.into()), |a, &v| a + &x[v]) >= one
    })
}

/// Whether a `k`-vertex path survives the removal.
pub fn has_k_path(graph: &Digraph, k: usize, removed: &[bool]) -> bool {
    let n = graph.n();
    let mut len = vec![0usize; n];
    for &u in &topo(n, graph.edges()) {
        if removed[u] {
            continue;
        }
        len[u] = len[u].max(1);
        if len[u] >= k {
            return true;
        }
        for &(a, b) in graph.edges().iter().filter(|e| e.0 == u) {
            if !removed[b] {
                len[b] = len[b].max(len[a] + 1);
            }
        }
    }
    false
}

pub fn brute_dvd_opt(graph: &Digraph, k: usize) -> usize {
    let n = graph.n();
    assert!(n <= 20);
    (0u32..(1 << n))
        .filter(|bits| !has_k_path(graph, k, &(0..n).map(|v| bits >> v & 1 == 1).collect::<Vec<_>>()))
        .map(|bits| bits.count_ones() as usize)
        .min()
        .unwrap()
}

/// Pearson statistic of bin counts against the uniform distribution.
pub fn chi_square_statistic(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}
