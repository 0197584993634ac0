//! Instance families: the integrality-gap family, seeded random layered
//! instances, and small random DAGs for the vertex-deletion side.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dvd::Digraph;
use crate::error::{Error, Result};
use crate::model::{FractionalCover, JobId, NormJob, NormalizedInstance, Quality};
use crate::number::{int, ratio, Ext, Rational};

pub fn gap_job_id(i: usize, j: usize) -> JobId {
    format!("({i},{j})")
}

/// Jobs `(i, j)`, `i = 1..d`, `j = 0..k`, with `(i,j) ≺ (i',j')` iff `i < i'`;
/// slow delay `j`, fast cost 1, deadline `dk/2`. Also returns the cover
/// `x_(i,j) = j / T` of objective `k + 1`.
pub fn gen_gap_instance(d: usize, k: usize) -> Result<(NormalizedInstance, FractionalCover)> {
    if d < 2 || k < 1 {
        return Err(Error::InvalidParameter(format!("gap family needs d ≥ 2 and k ≥ 1, got d = {d}, k = {k}")));
    }
    let deadline = ratio((d * k) as i64, 2);
    let mut jobs = Vec::new();
    for i in 1..=d {
        for j in 0..=k {
            jobs.push(NormJob::new(gap_job_id(i, j), Ext::int(j as i64), Ext::int(1)));
        }
    }
    let mut edges = Vec::new();
    for i in 1..d {
        for j in 0..=k {
            for j2 in 0..=k {
                edges.push((gap_job_id(i, j), gap_job_id(i + 1, j2)));
            }
        }
    }
    let norm = NormalizedInstance::build(jobs, edges, deadline.clone())?;
    let mut x = vec![int(0); norm.n()];
    for i in 1..=d {
        for j in 0..=k {
            let v = norm.base().index_of(&gap_job_id(i, j))?;
            x[v] = int(j as i64) / &deadline;
        }
    }
    let cover = FractionalCover::new(&norm, x, Quality::Exact)?;
    Ok((norm, cover))
}

#[derive(Clone, Debug)]
pub struct RandomLayeredParams {
    pub depth: usize,
    pub jobs: usize,
    pub seed: u64,
    /// Inclusive integer range of fast costs.
    pub cost_range: (i64, i64),
    /// Inclusive integer range of slow delays.
    pub delay_range: (i64, i64),
    /// Deadline as a fraction of the longest all-slow chain.
    pub slack_factor: Rational,
    pub edge_probability: f64,
}

impl RandomLayeredParams {
    pub fn new(depth: usize, jobs: usize, seed: u64) -> Self {
        RandomLayeredParams {
            depth,
            jobs,
            seed,
            cost_range: (1, 10),
            delay_range: (1, 10),
            slack_factor: ratio(3, 5),
            edge_probability: 0.3,
        }
    }
}

/// Random normalized instance of depth exactly `depth`: a spine chain fixes
/// the depth and every other edge goes from a lower to a higher assigned
/// layer.
pub fn gen_random_layered(p: &RandomLayeredParams) -> Result<NormalizedInstance> {
    if p.depth < 2 || p.jobs < p.depth {
        return Err(Error::InvalidParameter(format!(
            "random instance needs depth ≥ 2 and jobs ≥ depth, got {} and {}",
            p.depth, p.jobs
        )));
    }
    let ranges_ok = |(lo, hi): (i64, i64), min: i64| lo >= min && lo <= hi;
    if !ranges_ok(p.cost_range, 0) || !ranges_ok(p.delay_range, 0) {
        return Err(Error::InvalidParameter("cost and delay ranges must be nonempty and nonnegative".into()));
    }
    if p.slack_factor <= int(0) {
        return Err(Error::InvalidParameter("slack factor must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let layer: Vec<usize> = (0..p.jobs)
        .map(|v| if v < p.depth { v + 1 } else { rng.gen_range(1..=p.depth) })
        .collect();
    let delay: Vec<i64> = (0..p.jobs).map(|_| rng.gen_range(p.delay_range.0..=p.delay_range.1)).collect();
    let cost: Vec<i64> = (0..p.jobs).map(|_| rng.gen_range(p.cost_range.0..=p.cost_range.1)).collect();
    let id = |v: usize| format!("j{v:03}");
    let mut edges = Vec::new();
    for u in 0..p.jobs {
        for v in 0..p.jobs {
            if layer[u] >= layer[v] {
                continue;
            }
            let spine = u < p.depth && v == u + 1;
            if spine || rng.gen_bool(p.edge_probability) {
                edges.push((u, v));
            }
        }
    }
    // longest all-slow chain, over jobs sorted by assigned layer
    let mut order: Vec<usize> = (0..p.jobs).collect();
    order.sort_by_key(|&v| layer[v]);
    let mut longest = vec![0i64; p.jobs];
    for &v in &order {
        let incoming = edges.iter().filter(|e| e.1 == v).map(|e| longest[e.0]).max().unwrap_or(0);
        longest[v] = incoming + delay[v];
    }
    let max_chain = longest.into_iter().max().unwrap_or(0);
    let mut deadline = &p.slack_factor * int(max_chain);
    if deadline <= int(0) {
        deadline = int(1);
    }
    let jobs = (0..p.jobs)
        .map(|v| NormJob::new(id(v), Ext::int(delay[v]), Ext::int(cost[v])))
        .collect();
    let edges = edges.into_iter().map(|(u, v)| (id(u), id(v))).collect();
    NormalizedInstance::build(jobs, edges, deadline)
}

/// DAG on `1..=n` with each forward edge `(i, j)`, `i < j`, present with
/// probability `p`.
pub fn gen_random_dag(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Digraph::numbered(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;
    use crate::model::{check_feasible, compute_depth, AccelerationSet};

    #[test]
    fn gap_instance_sizes() {
        let (norm, cover) = gen_gap_instance(3, 2).unwrap();
        assert_eq!(norm.n(), 9);
        assert_eq!(norm.deadline(), &int(3));
        assert_eq!(cover.objective, Ext::int(3));
        assert_eq!(compute_depth(norm.base()), 3);
        let (norm, cover) = gen_gap_instance(3, 4).unwrap();
        assert_eq!(norm.n(), 15);
        assert_eq!(norm.deadline(), &int(6));
        assert_eq!(cover.objective, Ext::int(5));
    }

    #[test]
    fn random_instances_are_seed_stable_with_exact_depth() {
        for seed in 0..20 {
            let params = RandomLayeredParams::new(2 + (seed as usize % 4), 12, seed);
            let a = gen_random_layered(&params).unwrap();
            let b = gen_random_layered(&params).unwrap();
            assert_eq!(instance_to_json(a.base()), instance_to_json(b.base()));
            assert_eq!(compute_depth(a.base()), params.depth);
            let all = AccelerationSet::new(&a, 0..a.n());
            assert!(check_feasible(&a, &all).is_feasible());
        }
    }
}
