//! Brute-force ground truth: blocker enumeration, exact optima of the
//! scheduling and vertex-deletion problems, and the exact LP optimum over the
//! fully enumerated blocker.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::dvd::DvdInstance;
use crate::error::{Error, Result};
use crate::lp::simplex::PackingLp;
use crate::model::{
    compute_depth, AccelerationSet, FractionalCover, NormalizedInstance, Quality, ScaledDelays,
};
use crate::number::{int, Ext, Rational};

#[derive(Clone, Debug)]
pub struct ExactLimits {
    /// Blocker enumeration runs when `n ≤ max_jobs` or the depth is at most 4.
    pub max_jobs: usize,
    pub max_blocker: usize,
    pub max_nodes: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits { max_jobs: 25, max_blocker: 200_000, max_nodes: 5_000_000 }
    }
}

/// All minimal chains whose slow delay exceeds the deadline, each listed in
/// precedence order; the list is sorted.
pub fn enumerate_blocker(norm: &NormalizedInstance) -> Result<Vec<Vec<usize>>> {
    enumerate_blocker_with(norm, &ExactLimits::default())
}

pub fn enumerate_blocker_with(norm: &NormalizedInstance, limits: &ExactLimits) -> Result<Vec<Vec<usize>>> {
    let n = norm.n();
    if n > limits.max_jobs && compute_depth(norm.base()) > 4 {
        return Err(Error::CapExceeded(format!(
            "blocker enumeration needs at most {} jobs or depth at most 4",
            limits.max_jobs
        )));
    }
    let scaled = ScaledDelays::new(norm)?;
    let reach = norm.base().reachability();
    let topo = norm.base().topo_order();
    // successors in the transitive closure, in topological order
    let mut position = vec![0; n];
    for (i, &v) in topo.iter().enumerate() {
        position[v] = i;
    }
    let later: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let mut next: Vec<usize> = (0..n).filter(|&w| reach[u][w] && scaled.delays[w] > 0).collect();
            next.sort_by_key(|&w| position[w]);
            next
        })
        .collect();
    let mut out = Vec::new();
    let mut chain = Vec::new();
    for &v in topo {
        if scaled.delays[v] > 0 {
            chain.push(v);
            extend_chain(&scaled, &later, &mut chain, scaled.delays[v], limits.max_blocker, &mut out)?;
            chain.pop();
        }
    }
    out.sort();
    Ok(out)
}

fn extend_chain(
    scaled: &ScaledDelays,
    later: &[Vec<usize>],
    chain: &mut Vec<usize>,
    sum: i128,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if sum > scaled.deadline {
        let min = chain.iter().map(|&v| scaled.delays[v]).min().unwrap_or(0);
        if sum - min <= scaled.deadline {
            if out.len() >= cap {
                return Err(Error::CapExceeded(format!("blocker has more than {cap} members")));
            }
            out.push(chain.clone());
        }
        return Ok(());
    }
    let last = *chain.last().expect("chain is nonempty");
    for &w in &later[last] {
        chain.push(w);
        extend_chain(scaled, later, chain, sum + scaled.delays[w], cap, out)?;
        chain.pop();
    }
    Ok(())
}

/// Fast costs scaled to a common integer denominator; `None` for infinite
/// costs.
fn scaled_costs(costs: &[Ext]) -> Result<Vec<Option<i128>>> {
    let mut scale = num_bigint::BigInt::from(1);
    for c in costs.iter().filter_map(Ext::finite) {
        scale = scale.lcm(c.denom());
    }
    let scale = Rational::from_integer(scale);
    let mut total: i128 = 0;
    let too_large = || Error::InvalidInstance("costs too large for integer scaling".into());
    let mut out = Vec::with_capacity(costs.len());
    for c in costs {
        out.push(match c {
            Ext::Finite(r) => {
                let s = (r * &scale).to_integer().to_i128().ok_or_else(too_large)?;
                total = total.checked_add(s).ok_or_else(too_large)?;
                Some(s)
            }
            Ext::Infinite => None,
        });
    }
    Ok(out)
}

/// Minimum-cost hitting set by branch and bound.
///
/// `find(chosen)` returns a set that every feasible superset of `chosen`
/// must intersect, disjoint from `chosen`, or `None` when `chosen` is
/// already feasible; feasibility must be monotone. Elements with cost `None`
/// cannot be chosen. Each node runs a primal-dual pass whose dual value is
/// the lower bound and whose reverse-deleted primal is an incumbent.
pub fn min_hitting_set<F>(costs: &[Option<i128>], find: F, max_nodes: usize) -> Result<Option<Vec<usize>>>
where
    F: Fn(&[bool]) -> Option<Vec<usize>>,
{
    let n = costs.len();
    let mut chosen = vec![false; n];
    for (v, c) in costs.iter().enumerate() {
        if *c == Some(0) {
            chosen[v] = true;
        }
    }
    let mut search = Search { costs, find: &find, best: None, nodes: 0, max_nodes };
    let excluded = vec![false; n];
    search.node(&mut chosen, &excluded, 0)?;
    Ok(search.best.map(|(_, set)| set))
}

struct Search<'a, F> {
    costs: &'a [Option<i128>],
    find: &'a F,
    best: Option<(i128, Vec<usize>)>,
    nodes: usize,
    max_nodes: usize,
}

impl<F> Search<'_, F>
where
    F: Fn(&[bool]) -> Option<Vec<usize>>,
{
    fn improves(&self, cost: i128) -> bool {
        self.best.as_ref().is_none_or(|(b, _)| cost < *b)
    }

    fn node(&mut self, chosen: &mut Vec<bool>, excluded: &[bool], cost: i128) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::CapExceeded(format!("branch and bound exceeded {} nodes", self.max_nodes)));
        }
        let Some(first) = (self.find)(chosen) else {
            if self.improves(cost) {
                self.best = Some((cost, (0..chosen.len()).filter(|&v| chosen[v]).collect()));
            }
            return Ok(());
        };
        // primal-dual pass
        let mut residual: Vec<Option<i128>> = (0..chosen.len())
            .map(|v| if excluded[v] { None } else { self.costs[v] })
            .collect();
        let mut z = chosen.clone();
        let mut added = Vec::new();
        let mut bound = cost;
        let mut set = Some(first.clone());
        while let Some(s) = set {
            let live: Vec<usize> = s.into_iter().filter(|&v| residual[v].is_some()).collect();
            let Some(delta) = live.iter().filter_map(|&v| residual[v]).min() else {
                return Ok(());
            };
            bound += delta;
            for &v in &live {
                let r = residual[v].as_mut().expect("live element");
                *r -= delta;
                if *r == 0 && !z[v] {
                    z[v] = true;
                    added.push(v);
                }
            }
            if !self.improves(bound) {
                return Ok(());
            }
            set = (self.find)(&z);
        }
        for &v in added.iter().rev() {
            z[v] = false;
            if (self.find)(&z).is_some() {
                z[v] = true;
            }
        }
        let upper = cost + added.iter().filter(|&&v| z[v]).map(|&v| self.costs[v].unwrap_or(0)).sum::<i128>();
        if self.improves(upper) {
            self.best = Some((upper, (0..z.len()).filter(|&v| z[v]).collect()));
        }
        if !self.improves(bound) {
            return Ok(());
        }
        let mut branch: Vec<usize> = first.into_iter().filter(|&v| !excluded[v] && self.costs[v].is_some()).collect();
        branch.sort_by_key(|&v| (self.costs[v], v));
        let mut excluded = excluded.to_vec();
        for v in branch {
            let c = self.costs[v].expect("branch element has finite cost");
            if self.improves(cost + c) {
                chosen[v] = true;
                self.node(chosen, &excluded, cost + c)?;
                chosen[v] = false;
            }
            excluded[v] = true;
        }
        Ok(())
    }
}

/// Minimum-cost feasible acceleration set.
pub fn exact_tct_opt(norm: &NormalizedInstance) -> Result<AccelerationSet> {
    exact_tct_opt_with(norm, &ExactLimits { max_jobs: 30, ..ExactLimits::default() })
}

pub fn exact_tct_opt_with(norm: &NormalizedInstance, limits: &ExactLimits) -> Result<AccelerationSet> {
    if norm.n() > limits.max_jobs {
        return Err(Error::CapExceeded(format!(
            "exact search is limited to {} jobs, instance has {}",
            limits.max_jobs,
            norm.n()
        )));
    }
    let scaled = ScaledDelays::new(norm)?;
    let costs = scaled_costs(norm.fast_costs())?;
    let find = |z: &[bool]| -> Option<Vec<usize>> {
        let residual = scaled.residual(z);
        let (delay, chain) = norm.base().longest_chain(&residual);
        (delay > scaled.deadline).then(|| chain.into_iter().filter(|&v| !z[v] && scaled.delays[v] > 0).collect())
    };
    match min_hitting_set(&costs, find, limits.max_nodes)? {
        Some(set) => Ok(AccelerationSet::new(norm, set)),
        None => Err(Error::Infeasible("no finite-cost acceleration set meets the deadline".into())),
    }
}

/// Minimum set of vertices whose deletion destroys every `k`-vertex path.
pub fn exact_dvd_opt(dvd: &DvdInstance) -> Result<Vec<usize>> {
    exact_dvd_opt_with(dvd, &ExactLimits::default())
}

pub fn exact_dvd_opt_with(dvd: &DvdInstance, limits: &ExactLimits) -> Result<Vec<usize>> {
    if dvd.graph.n() > limits.max_jobs {
        return Err(Error::CapExceeded(format!(
            "exact search is limited to {} vertices, graph has {}",
            limits.max_jobs,
            dvd.graph.n()
        )));
    }
    let costs = vec![Some(1); dvd.graph.n()];
    let find = |z: &[bool]| dvd.graph.least_k_path(dvd.k, z);
    min_hitting_set(&costs, find, limits.max_nodes)?
        .ok_or_else(|| Error::Internal("deleting every vertex always destroys all paths".into()))
}

/// Exact optimum of the covering LP over the fully enumerated blocker.
pub fn exact_lp_opt(norm: &NormalizedInstance) -> Result<FractionalCover> {
    exact_lp_opt_with(norm, &ExactLimits::default())
}

pub fn exact_lp_opt_with(norm: &NormalizedInstance, limits: &ExactLimits) -> Result<FractionalCover> {
    let blocker = enumerate_blocker_with(norm, limits)?;
    solve_covering_exact(norm, &blocker)
}

/// Exact covering LP over an explicit list of cuts, with `x ≤ 1` enforced by
/// clipping (only zero-cost jobs can exceed 1 at an optimum).
pub fn solve_covering_exact(norm: &NormalizedInstance, cuts: &[Vec<usize>]) -> Result<FractionalCover> {
    let (row_of, capacities) = finite_rows(norm);
    let mut lp = PackingLp::<Rational>::new(&capacities)?;
    for cut in cuts {
        let support: Vec<usize> = cut.iter().filter_map(|&v| row_of[v]).collect();
        if support.is_empty() {
            return Err(Error::Infeasible(format!(
                "chain of {} jobs exceeds the deadline and has no finite-cost job",
                cut.len()
            )));
        }
        lp.add_column(&support);
    }
    lp.solve()?;
    let duals = lp.cover();
    let one = int(1);
    let x = (0..norm.n())
        .map(|v| match row_of[v] {
            Some(r) if duals[r] > one => one.clone(),
            Some(r) => duals[r].clone(),
            None => int(0),
        })
        .collect();
    FractionalCover::new(norm, x, Quality::Exact)
}

/// Row index of each finite-cost job in the packing LP, and the capacities.
pub(crate) fn finite_rows(norm: &NormalizedInstance) -> (Vec<Option<usize>>, Vec<Rational>) {
    let mut row_of = vec![None; norm.n()];
    let mut capacities = Vec::new();
    for v in 0..norm.n() {
        if let Ext::Finite(c) = norm.fast_cost(v) {
            row_of[v] = Some(capacities.len());
            capacities.push(c.clone());
        }
    }
    (row_of, capacities)
}

/// Whether `x` satisfies every cut exactly.
pub fn covers_all(x: &[Rational], cuts: &[Vec<usize>]) -> bool {
    let one = int(1);
    cuts.iter().all(|cut| cut.iter().fold(Rational::zero(), |acc, &v| acc + &x[v]) >= one)
}

/// Searches for delays and a deadline that realize exactly `target` as the
/// blocker of an instance on `n` jobs with the given layer of each job.
///
/// Every relation compatible with the layering (all subsets of the forward
/// cross-layer pairs, closed transitively) is combined with every integer
/// delay vector in `0..=max_delay` and every integer deadline in
/// `1..=max_deadline`. This is a bounded search, not a proof.
pub fn search_blocker_realization(
    layer_of: &[usize],
    target: &[Vec<usize>],
    max_delay: u32,
    max_deadline: u32,
) -> Result<Option<(Vec<(usize, usize)>, Vec<u32>, u32)>> {
    let n = layer_of.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| layer_of[u] < layer_of[v])
        .collect();
    if pairs.len() > 20 || n > 12 {
        return Err(Error::CapExceeded("realization search is limited to 12 jobs and 20 candidate pairs".into()));
    }
    let target_masks: Vec<u32> = {
        let mut m: Vec<u32> = target.iter().map(|set| set.iter().fold(0, |acc, &v| acc | (1 << v))).collect();
        m.sort();
        m
    };
    for bits in 0u32..(1 << pairs.len()) {
        let mut reach = vec![0u32; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if bits >> i & 1 == 1 {
                reach[u] |= 1 << v;
            }
        }
        // closure in layer order (edges only go forward)
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(layer_of[v]));
        for &u in &order {
            let mut r = reach[u];
            for w in 0..n {
                if reach[u] >> w & 1 == 1 {
                    r |= reach[w];
                }
            }
            reach[u] = r;
        }
        let comparable = |u: usize, v: usize| reach[u] >> v & 1 == 1 || reach[v] >> u & 1 == 1;
        let chains: Vec<u32> = (1u32..(1 << n))
            .filter(|&m| {
                let members: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
                members.iter().enumerate().all(|(i, &u)| members[i + 1..].iter().all(|&v| comparable(u, v)))
            })
            .collect();
        if !target_masks.iter().all(|t| chains.contains(t)) {
            continue;
        }
        let mut delays = vec![0u32; n];
        loop {
            for deadline in 1..=max_deadline {
                let mut blocker: Vec<u32> = chains
                    .iter()
                    .copied()
                    .filter(|&m| {
                        let (sum, min) = (0..n)
                            .filter(|&v| m >> v & 1 == 1)
                            .fold((0, u32::MAX), |(s, mn), v| (s + delays[v], mn.min(delays[v])));
                        sum > deadline && sum - min <= deadline
                    })
                    .collect();
                blocker.sort();
                if blocker == target_masks {
                    let edges = pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &p)| p).collect();
                    return Ok(Some((edges, delays.clone(), deadline)));
                }
            }
            // next delay vector
            let mut i = 0;
            while i < n && delays[i] == max_delay {
                delays[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            delays[i] += 1;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvd::{gen_path, gen_tournament, Digraph};
    use crate::generators::{gap_job_id, gen_gap_instance};
    use crate::model::{check_feasible, NormJob};

    fn weighted_chain(costs: &[i64]) -> NormalizedInstance {
        let jobs = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| NormJob::new(format!("j{i}"), Ext::int(1), Ext::int(c)))
            .collect();
        let edges = (1..costs.len()).map(|i| (format!("j{}", i - 1), format!("j{i}"))).collect();
        NormalizedInstance::build(jobs, edges, int(2)).unwrap()
    }

    #[test]
    fn blocker_of_gap_instance() {
        let (norm, _) = gen_gap_instance(3, 2).unwrap();
        let blocker = enumerate_blocker(&norm).unwrap();
        let top: Vec<usize> = (1..=3).map(|i| norm.base().index_of(&gap_job_id(i, 2)).unwrap()).collect();
        // the slowest chain has delay 6 but already two of its jobs exceed 3
        assert!(!blocker.contains(&top));
        assert!(blocker.contains(&top[..2].to_vec()));
        assert!(blocker.contains(&top[1..].to_vec()));
        for cut in &blocker {
            let d = norm.chain_delay(cut);
            let min = cut.iter().map(|&v| norm.slow_delay(v).clone()).min().unwrap();
            assert!(d > Ext::int(3));
            assert!(d.sub_finite(&min).unwrap() <= Ext::int(3));
            assert!(norm.is_chain(cut));
        }
    }

    #[test]
    fn no_binding_chain_gives_empty_everything() {
        let jobs = vec![NormJob::new("a", Ext::int(1), Ext::int(1))];
        let norm = NormalizedInstance::build(jobs, vec![], int(5)).unwrap();
        assert!(enumerate_blocker(&norm).unwrap().is_empty());
        assert!(exact_tct_opt(&norm).unwrap().is_empty());
        assert_eq!(exact_lp_opt(&norm).unwrap().objective, Ext::zero());
    }

    #[test]
    fn single_cut_with_costs_1_2_3() {
        let norm = weighted_chain(&[1, 2, 3]);
        assert_eq!(enumerate_blocker(&norm).unwrap(), vec![vec![0, 1, 2]]);
        let opt = exact_tct_opt(&norm).unwrap();
        assert_eq!(opt.cost, Ext::int(1));
        let lp = exact_lp_opt(&norm).unwrap();
        assert_eq!(lp.objective, Ext::int(1));
        assert_eq!(lp.x, vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn gap_instance_optimum() {
        let (norm, cover) = gen_gap_instance(3, 2).unwrap();
        let opt = exact_tct_opt(&norm).unwrap();
        assert_eq!(opt.cost, Ext::int(3));
        assert!(check_feasible(&norm, &opt).is_feasible());
        let lp = exact_lp_opt(&norm).unwrap();
        assert!(lp.objective <= cover.objective);
        let blocker = enumerate_blocker(&norm).unwrap();
        assert!(covers_all(&lp.x, &blocker));
        assert!(covers_all(&cover.x, &blocker));
    }

    #[test]
    fn dvd_optima() {
        let p9 = DvdInstance::new(gen_path(9).unwrap(), 3).unwrap();
        assert_eq!(exact_dvd_opt(&p9).unwrap().len(), 3);
        let d5 = DvdInstance::new(gen_tournament(5).unwrap(), 2).unwrap();
        assert_eq!(exact_dvd_opt(&d5).unwrap().len(), 4);
        let edgeless = DvdInstance::new(Digraph::numbered(4, []).unwrap(), 2).unwrap();
        assert!(exact_dvd_opt(&edgeless).unwrap().is_empty());
    }

    #[test]
    fn infinite_cost_jobs_are_never_chosen() {
        let jobs = vec![
            NormJob::new("a", Ext::int(2), Ext::Infinite),
            NormJob::new("b", Ext::int(2), Ext::int(5)),
        ];
        let norm = NormalizedInstance::build(jobs, vec![("a".into(), "b".into())], int(3)).unwrap();
        let opt = exact_tct_opt(&norm).unwrap();
        assert_eq!(opt.ids(&norm).collect::<Vec<_>>(), vec!["b"]);
        let lp = exact_lp_opt(&norm).unwrap();
        assert_eq!(lp.objective, Ext::int(5));
        let stuck = NormalizedInstance::build(vec![NormJob::new("a", Ext::int(4), Ext::Infinite)], vec![], int(3)).unwrap();
        assert!(matches!(exact_tct_opt(&stuck), Err(Error::Infeasible(_))));
        assert!(matches!(exact_lp_opt(&stuck), Err(Error::Infeasible(_))));
    }

    #[test]
    fn node_cap_is_reported() {
        let (norm, _) = gen_gap_instance(3, 4).unwrap();
        let limits = ExactLimits { max_nodes: 1, ..ExactLimits::default() };
        assert!(matches!(exact_tct_opt_with(&norm, &limits), Err(Error::CapExceeded(_))));
    }
}
