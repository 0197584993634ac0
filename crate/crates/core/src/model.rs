//! Time-cost tradeoff instances, their normalized form, layerings and
//! solutions, together with the longest-chain primitives everything else is
//! built on.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::number::{Ext, Rational};

pub type JobId = String;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub delay: Ext,
    pub cost: Ext,
}

impl Alternative {
    pub fn new(delay: Ext, cost: Ext) -> Self {
        Alternative { delay, cost }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub alternatives: Vec<Alternative>,
}

/// An instance of the deadline time-cost tradeoff problem.
///
/// Jobs are stored sorted by id; every index-based API refers to that order.
/// Edges are the direct precedences; the precedence order is their transitive
/// closure.
#[derive(Debug)]
pub struct TctInstance {
    jobs: Vec<Job>,
    edges: Vec<(usize, usize)>,
    deadline: Rational,
    index: HashMap<JobId, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Vec<usize>,
    reach: OnceLock<Vec<Vec<bool>>>,
}

impl Clone for TctInstance {
    fn clone(&self) -> Self {
        TctInstance {
            jobs: self.jobs.clone(),
            edges: self.edges.clone(),
            deadline: self.deadline.clone(),
            index: self.index.clone(),
            preds: self.preds.clone(),
            succs: self.succs.clone(),
            topo: self.topo.clone(),
            reach: OnceLock::new(),
        }
    }
}

impl PartialEq for TctInstance {
    fn eq(&self, other: &Self) -> bool {
        self.jobs == other.jobs && self.edges == other.edges && self.deadline == other.deadline
    }
}

impl TctInstance {
    pub fn new(mut jobs: Vec<Job>, edges: Vec<(JobId, JobId)>, deadline: Rational) -> Result<Self> {
        if jobs.is_empty() {
            return Err(Error::InvalidInstance("instance has no jobs".into()));
        }
        if !deadline.is_positive() {
            return Err(Error::InvalidInstance(format!("deadline must be positive, got {deadline}")));
        }
        jobs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(jobs.len());
        for (i, job) in jobs.iter().enumerate() {
            if index.insert(job.id.clone(), i).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate job id `{}`", job.id)));
            }
            if job.alternatives.is_empty() {
                return Err(Error::InvalidInstance(format!("job `{}` has no alternatives", job.id)));
            }
            for alt in &job.alternatives {
                let negative = |e: &Ext| e.finite().is_some_and(|r| r.is_negative());
                if negative(&alt.delay) || negative(&alt.cost) {
                    return Err(Error::InvalidInstance(format!(
                        "job `{}` has a negative delay or cost",
                        job.id
                    )));
                }
            }
        }
        let mut indexed = BTreeSet::new();
        for (src, dst) in edges {
            let s = *index.get(&src).ok_or_else(|| Error::UnknownJob(src.clone()))?;
            let t = *index.get(&dst).ok_or_else(|| Error::UnknownJob(dst.clone()))?;
            if s == t {
                return Err(Error::Cycle(src));
            }
            indexed.insert((s, t));
        }
        Self::from_indexed(jobs, indexed.into_iter().collect(), deadline, index)
    }

    fn from_indexed(
        jobs: Vec<Job>,
        edges: Vec<(usize, usize)>,
        deadline: Rational,
        index: HashMap<JobId, usize>,
    ) -> Result<Self> {
        let n = jobs.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(s, t) in &edges {
            preds[t].push(s);
            succs[s].push(t);
        }
        let topo = topological_order(n, &preds, &succs)
            .map_err(|v| Error::Cycle(jobs[v].id.clone()))?;
        Ok(TctInstance {
            jobs,
            edges,
            deadline,
            index,
            preds,
            succs,
            topo,
            reach: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, v: usize) -> &Job {
        &self.jobs[v]
    }

    pub fn id(&self, v: usize) -> &str {
        &self.jobs[v].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownJob(id.to_string()))
    }

    /// Direct precedences as index pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn deadline(&self) -> &Rational {
        &self.deadline
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succs[v]
    }

    /// Deterministic topological order (smallest available index first).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// `precedes(u, v)` iff `u ≺ v` in the transitive closure.
    pub fn precedes(&self, u: usize, v: usize) -> bool {
        self.reachability()[u][v]
    }

    pub fn reachability(&self) -> &[Vec<bool>] {
        self.reach.get_or_init(|| {
            let n = self.n();
            let mut reach = vec![Vec::new(); n];
            for &v in self.topo.iter().rev() {
                let mut row = vec![false; n];
                for &w in &self.succs[v] {
                    row[w] = true;
                    for (x, &y) in row.iter_mut().zip(&reach[w]) {
                        *x |= y;
                    }
                }
                reach[v] = row;
            }
            reach
        })
    }

    /// Maximum chain delay and total cost when job `v` runs with alternative
    /// `choice[v]`.
    pub fn evaluate_choice(&self, choice: &[usize]) -> Result<(Ext, Ext)> {
        if choice.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "choice vector has {} entries for {} jobs",
                choice.len(),
                self.n()
            )));
        }
        let mut delays = Vec::with_capacity(self.n());
        let mut cost = Ext::zero();
        for (job, &c) in self.jobs.iter().zip(choice) {
            let alt = job.alternatives.get(c).ok_or_else(|| {
                Error::InvalidParameter(format!("job `{}` has no alternative {c}", job.id))
            })?;
            delays.push(alt.delay.clone());
            cost = &cost + &alt.cost;
        }
        let (delay, _) = self.longest_chain(&delays);
        Ok((delay, cost))
    }

    /// Longest chain under per-job weights. Ties prefer the smallest index,
    /// both for the end job and for each predecessor.
    pub fn longest_chain<W>(&self, weight: &[W]) -> (W, Vec<usize>)
    where
        W: Clone + Ord + Zero,
    {
        let n = self.n();
        let mut best: Vec<W> = vec![W::zero(); n];
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for &v in &self.topo {
            let mut incoming = W::zero();
            for &u in &self.preds[v] {
                if best[u] > incoming {
                    incoming = best[u].clone();
                    parent[v] = Some(u);
                }
            }
            best[v] = incoming + weight[v].clone();
        }
        let mut end = 0;
        for v in 1..n {
            if best[v] > best[end] {
                end = v;
            }
        }
        let mut chain = vec![end];
        while let Some(p) = parent[*chain.last().unwrap()] {
            chain.push(p);
        }
        chain.reverse();
        (best[end].clone(), chain)
    }
}

fn topological_order(n: usize, preds: &[Vec<usize>], succs: &[Vec<usize>]) -> std::result::Result<Vec<usize>, usize> {
    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &succs[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
        return Err(stuck);
    }
    Ok(order)
}

/// Back-translation data produced by normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OriginMap {
    /// Normalized job id → (original job id, copy index `i` of `v_0..=v_r`).
    pub copies: BTreeMap<JobId, (JobId, usize)>,
    /// Original job id → original alternative index of the i-th nondominated
    /// pair (entry `i - 1` for pair `i`), sorted by increasing delay.
    pub pairs: BTreeMap<JobId, Vec<usize>>,
}

/// An instance where every job is either free and slow (`t_v`) or instant
/// at cost `c_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedInstance {
    base: TctInstance,
    slow_delay: Vec<Ext>,
    fast_cost: Vec<Ext>,
    origin: Option<OriginMap>,
}

/// One job of a normalized instance, used for construction.
#[derive(Clone, Debug)]
pub struct NormJob {
    pub id: JobId,
    pub slow_delay: Ext,
    pub fast_cost: Ext,
}

impl NormJob {
    pub fn new(id: impl Into<JobId>, slow_delay: Ext, fast_cost: Ext) -> Self {
        NormJob { id: id.into(), slow_delay, fast_cost }
    }
}

impl NormalizedInstance {
    pub fn build(jobs: Vec<NormJob>, edges: Vec<(JobId, JobId)>, deadline: Rational) -> Result<Self> {
        let jobs = jobs
            .into_iter()
            .map(|j| Job {
                id: j.id,
                alternatives: vec![
                    Alternative::new(Ext::zero(), j.fast_cost),
                    Alternative::new(j.slow_delay, Ext::zero()),
                ],
            })
            .collect();
        Self::from_instance(TctInstance::new(jobs, edges, deadline)?)
    }

    /// Accepts an instance already in normalized form.
    pub fn from_instance(base: TctInstance) -> Result<Self> {
        let mut slow_delay = Vec::with_capacity(base.n());
        let mut fast_cost = Vec::with_capacity(base.n());
        for job in base.jobs() {
            let [a, b] = job.alternatives.as_slice() else {
                return Err(Error::InvalidInstance(format!(
                    "job `{}` does not have exactly two alternatives",
                    job.id
                )));
            };
            let (fast, slow) = if a.delay.is_zero() && b.cost.is_zero() {
                (a, b)
            } else if b.delay.is_zero() && a.cost.is_zero() {
                (b, a)
            } else {
                return Err(Error::InvalidInstance(format!(
                    "job `{}` is not of the form {{(0,c),(t,0)}}",
                    job.id
                )));
            };
            slow_delay.push(slow.delay.clone());
            fast_cost.push(fast.cost.clone());
        }
        Ok(NormalizedInstance { base, slow_delay, fast_cost, origin: None })
    }

    pub(crate) fn with_origin(mut self, origin: OriginMap) -> Result<Self> {
        for job in self.base.jobs() {
            if !origin.copies.contains_key(&job.id) {
                return Err(Error::Internal(format!("origin map misses job `{}`", job.id)));
            }
        }
        self.origin = Some(origin);
        Ok(self)
    }

    pub fn base(&self) -> &TctInstance {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn id(&self, v: usize) -> &str {
        self.base.id(v)
    }

    pub fn deadline(&self) -> &Rational {
        self.base.deadline()
    }

    pub fn slow_delay(&self, v: usize) -> &Ext {
        &self.slow_delay[v]
    }

    pub fn slow_delays(&self) -> &[Ext] {
        &self.slow_delay
    }

    pub fn fast_cost(&self, v: usize) -> &Ext {
        &self.fast_cost[v]
    }

    pub fn fast_costs(&self) -> &[Ext] {
        &self.fast_cost
    }

    pub fn origin(&self) -> Option<&OriginMap> {
        self.origin.as_ref()
    }

    /// Whether `delay` exceeds the deadline.
    pub fn exceeds_deadline(&self, delay: &Ext) -> bool {
        match delay {
            Ext::Finite(r) => r > self.deadline(),
            Ext::Infinite => true,
        }
    }

    /// Delays with the jobs of `fast` contributing zero.
    pub fn residual_delays(&self, fast: &[bool]) -> Vec<Ext> {
        self.slow_delay
            .iter()
            .zip(fast)
            .map(|(t, &f)| if f { Ext::zero() } else { t.clone() })
            .collect()
    }

    /// Sum of slow delays along `chain`.
    pub fn chain_delay(&self, chain: &[usize]) -> Ext {
        chain.iter().map(|&v| self.slow_delay[v].clone()).sum()
    }

    /// Whether `jobs` are pairwise comparable.
    pub fn is_chain(&self, jobs: &[usize]) -> bool {
        jobs.iter().enumerate().all(|(i, &u)| {
            jobs[i + 1..]
                .iter()
                .all(|&v| u != v && (self.base.precedes(u, v) || self.base.precedes(v, u)))
        })
    }
}

/// The canonical d-partition: `level[v]` is the number of jobs on the longest
/// chain ending in `v` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredView {
    level: Vec<usize>,
    layers: Vec<Vec<usize>>,
}

impl LayeredView {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// 1-based level of job `v`.
    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.level
    }

    /// Jobs of 1-based layer `i`.
    pub fn layer(&self, i: usize) -> &[usize] {
        &self.layers[i - 1]
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn n(&self) -> usize {
        self.level.len()
    }
}

pub fn layer(instance: &TctInstance) -> LayeredView {
    let n = instance.n();
    let mut level = vec![0usize; n];
    for &v in instance.topo_order() {
        level[v] = 1 + instance.predecessors(v).iter().map(|&u| level[u]).max().unwrap_or(0);
    }
    let depth = level.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth];
    for (v, &l) in level.iter().enumerate() {
        layers[l - 1].push(v);
    }
    LayeredView { level, layers }
}

pub fn compute_depth(instance: &TctInstance) -> usize {
    layer(instance).depth()
}

/// A set of accelerated jobs of a normalized instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccelerationSet {
    pub fast: BTreeSet<usize>,
    pub cost: Ext,
}

impl AccelerationSet {
    pub fn new(norm: &NormalizedInstance, fast: impl IntoIterator<Item = usize>) -> Self {
        let fast: BTreeSet<usize> = fast.into_iter().collect();
        let cost = fast.iter().map(|&v| norm.fast_cost(v).clone()).sum();
        AccelerationSet { fast, cost }
    }

    pub fn empty() -> Self {
        AccelerationSet { fast: BTreeSet::new(), cost: Ext::zero() }
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.fast {
            mask[v] = true;
        }
        mask
    }

    pub fn contains(&self, v: usize) -> bool {
        self.fast.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.fast.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fast.is_empty()
    }

    pub fn ids<'a>(&'a self, norm: &'a NormalizedInstance) -> impl Iterator<Item = &'a str> + 'a {
        self.fast.iter().map(move |&v| norm.id(v))
    }
}

pub fn solution_cost(norm: &NormalizedInstance, fast: &[JobId]) -> Result<Ext> {
    let mut seen = BTreeSet::new();
    let mut total = Ext::zero();
    for id in fast {
        let v = norm.base().index_of(id)?;
        if seen.insert(v) {
            total = &total + norm.fast_cost(v);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible { max_delay: Ext },
    Violated { chain: Vec<usize>, delay: Ext },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Longest residual chain with accelerated jobs at delay zero.
pub fn check_feasible(norm: &NormalizedInstance, sol: &AccelerationSet) -> Feasibility {
    check_feasible_mask(norm, &sol.mask(norm.n()))
}

pub fn check_feasible_mask(norm: &NormalizedInstance, fast: &[bool]) -> Feasibility {
    let delays = norm.residual_delays(fast);
    let (delay, chain) = norm.base().longest_chain(&delays);
    if norm.exceeds_deadline(&delay) {
        Feasibility::Violated { chain, delay }
    } else {
        Feasibility::Feasible { max_delay: delay }
    }
}

/// Slow delays and deadline scaled to a common integer denominator, for the
/// inner loops of the dynamic programs. Infinite delays become
/// `deadline + 1`, which exceeds the deadline on its own.
#[derive(Clone, Debug)]
pub struct ScaledDelays {
    pub delays: Vec<i128>,
    pub deadline: i128,
}

impl ScaledDelays {
    pub fn new(norm: &NormalizedInstance) -> Result<Self> {
        let mut scale = norm.deadline().denom().clone();
        for t in norm.slow_delays().iter().filter_map(Ext::finite) {
            scale = scale.lcm(t.denom());
        }
        let too_large = || Error::InvalidInstance("delays too large for integer scaling".into());
        let to_int = |r: &Rational| -> Result<i128> {
            (r * &scale).to_integer().to_i128().ok_or_else(too_large)
        };
        let deadline = to_int(norm.deadline())?;
        let mut total: i128 = 0;
        let mut delays = Vec::with_capacity(norm.n());
        for t in norm.slow_delays() {
            let scaled = match t {
                Ext::Finite(r) => to_int(r)?,
                Ext::Infinite => deadline.checked_add(1).ok_or_else(too_large)?,
            };
            total = total.checked_add(scaled).ok_or_else(too_large)?;
            delays.push(scaled);
        }
        if total.checked_add(deadline).is_none_or(|s| s > i128::MAX / 4) {
            return Err(too_large());
        }
        Ok(ScaledDelays { delays, deadline })
    }

    pub fn chain_delay(&self, chain: &[usize]) -> i128 {
        chain.iter().map(|&v| self.delays[v]).sum()
    }

    pub fn residual(&self, fast: &[bool]) -> Vec<i128> {
        self.delays.iter().zip(fast).map(|(&t, &f)| if f { 0 } else { t }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quality {
    Exact,
    Approx(Rational),
}

/// A fractional solution of the vertex cover LP.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalCover {
    pub x: Vec<Rational>,
    pub objective: Ext,
    pub quality: Quality,
}

impl FractionalCover {
    pub fn new(norm: &NormalizedInstance, x: Vec<Rational>, quality: Quality) -> Result<Self> {
        if x.len() != norm.n() {
            return Err(Error::InvalidParameter(format!(
                "cover has {} values for {} jobs",
                x.len(),
                norm.n()
            )));
        }
        if let Some(v) = x.iter().position(|xv| xv.is_negative() || *xv > Rational::one()) {
            return Err(Error::InvalidParameter(format!(
                "x[{}] = {} lies outside [0, 1]",
                norm.id(v),
                x[v]
            )));
        }
        let objective = objective_of(norm, &x);
        Ok(FractionalCover { x, objective, quality })
    }

    pub fn value(&self, v: usize) -> &Rational {
        &self.x[v]
    }

    /// Finite objective, or an error if positive weight sits on an
    /// infinite-cost job.
    pub fn finite_objective(&self) -> Result<Rational> {
        self.objective
            .finite()
            .cloned()
            .ok_or_else(|| Error::InvalidParameter("cover puts weight on an infinite-cost job".into()))
    }
}

pub fn objective_of(norm: &NormalizedInstance, x: &[Rational]) -> Ext {
    x.iter()
        .enumerate()
        .filter(|(_, xv)| !xv.is_zero())
        .map(|(v, xv)| norm.fast_cost(v).mul_rational(xv))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::int;

    fn chain_instance(n: usize) -> NormalizedInstance {
        let jobs = (0..n).map(|i| NormJob::new(format!("j{i}"), Ext::int(1), Ext::int(1))).collect();
        let edges = (1..n).map(|i| (format!("j{}", i - 1), format!("j{i}"))).collect();
        NormalizedInstance::build(jobs, edges, int(2)).unwrap()
    }

    #[test]
    fn depth_of_single_job_and_path() {
        let single = chain_instance(1);
        assert_eq!(compute_depth(single.base()), 1);
        assert_eq!(compute_depth(chain_instance(4).base()), 4);
    }

    #[test]
    fn incomparable_jobs_share_a_layer() {
        let jobs = vec![NormJob::new("a", Ext::int(1), Ext::int(1)), NormJob::new("b", Ext::int(1), Ext::int(1))];
        let norm = NormalizedInstance::build(jobs, vec![], int(1)).unwrap();
        let view = layer(norm.base());
        assert_eq!(view.depth(), 1);
        assert_eq!(view.layer(1), &[0, 1]);
    }

    #[test]
    fn chain_levels_are_positions() {
        let norm = chain_instance(3);
        let view = layer(norm.base());
        assert_eq!(view.levels(), &[1, 2, 3]);
    }

    #[test]
    fn rejects_cycles_and_bad_input() {
        let jobs = || vec![NormJob::new("a", Ext::int(1), Ext::int(1)), NormJob::new("b", Ext::int(1), Ext::int(1))];
        let cyclic = NormalizedInstance::build(
            jobs(),
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
            int(1),
        );
        assert!(matches!(cyclic, Err(Error::Cycle(_))));
        let unknown = NormalizedInstance::build(jobs(), vec![("a".into(), "z".into())], int(1));
        assert!(matches!(unknown, Err(Error::UnknownJob(_))));
        assert!(NormalizedInstance::build(jobs(), vec![], int(0)).is_err());
        let empty_alts = TctInstance::new(vec![Job { id: "a".into(), alternatives: vec![] }], vec![], int(1));
        assert!(empty_alts.is_err());
    }

    #[test]
    fn feasibility_on_a_chain() {
        let norm = chain_instance(3);
        let none = AccelerationSet::empty();
        match check_feasible(&norm, &none) {
            Feasibility::Violated { chain, delay } => {
                assert_eq!(chain, vec![0, 1, 2]);
                assert_eq!(delay, Ext::int(3));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        let one = AccelerationSet::new(&norm, [1]);
        assert!(check_feasible(&norm, &one).is_feasible());
        assert_eq!(one.cost, Ext::int(1));
    }

    #[test]
    fn reachability_is_transitive() {
        let norm = chain_instance(4);
        assert!(norm.base().precedes(0, 3));
        assert!(!norm.base().precedes(3, 0));
        assert!(norm.is_chain(&[0, 2, 3]));
    }

    #[test]
    fn solution_cost_rejects_unknown_ids() {
        let norm = chain_instance(2);
        assert_eq!(solution_cost(&norm, &[]).unwrap(), Ext::zero());
        assert!(matches!(solution_cost(&norm, &["nope".into()]), Err(Error::UnknownJob(_))));
    }
}
