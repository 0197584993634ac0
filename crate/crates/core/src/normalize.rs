//! Reduction of arbitrary instances to the two-alternative form and the
//! translation of solutions back.
//!
//! A job with nondominated pairs `(t_1,c_1), …, (t_r,c_r)` (increasing delay,
//! decreasing cost) becomes `r + 1` mutually incomparable copies
//! `v_0, …, v_r` with `S_{v_i} = {(0, c_i - c_{i+1}), (t_{i+1}, 0)}`, where
//! `c_0 = ∞`, `c_{r+1} = 0` and `t_{r+1} = ∞`. Every copy inherits the
//! predecessors and successors of `v`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{AccelerationSet, Job, JobId, NormJob, NormalizedInstance, OriginMap, TctInstance};
use crate::number::Ext;

pub fn copy_id(job: &str, copy: usize) -> JobId {
    format!("{job}#{copy}")
}

/// Sorted nondominated pairs of a job as `(original index, delay, cost)`.
///
/// Infinite-cost alternatives can never be selected and are dropped first.
pub fn nondominated_pairs(job: &Job) -> Result<Vec<(usize, Ext, Ext)>> {
    let mut finite: Vec<(usize, Ext, Ext)> = job
        .alternatives
        .iter()
        .enumerate()
        .filter(|(_, alt)| !alt.cost.is_infinite())
        .map(|(i, alt)| (i, alt.delay.clone(), alt.cost.clone()))
        .collect();
    if finite.is_empty() {
        return Err(Error::InvalidInstance(format!(
            "job `{}` has no finite-cost alternative",
            job.id
        )));
    }
    finite.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, Ext, Ext)> = Vec::with_capacity(finite.len());
    for pair in finite {
        if kept.last().is_none_or(|last| pair.2 < last.2) {
            kept.push(pair);
        }
    }
    Ok(kept)
}

pub fn normalize(instance: &TctInstance) -> Result<NormalizedInstance> {
    let mut jobs = Vec::new();
    let mut copies_of: Vec<Vec<JobId>> = Vec::with_capacity(instance.n());
    let mut origin = OriginMap { copies: BTreeMap::new(), pairs: BTreeMap::new() };
    for job in instance.jobs() {
        let pairs = nondominated_pairs(job)?;
        let r = pairs.len();
        let cost = |i: usize| -> Ext {
            match i {
                0 => Ext::Infinite,
                i if i == r + 1 => Ext::zero(),
                i => pairs[i - 1].2.clone(),
            }
        };
        let delay = |i: usize| -> Ext { if i == r + 1 { Ext::Infinite } else { pairs[i - 1].1.clone() } };
        let mut ids = Vec::with_capacity(r + 1);
        for i in 0..=r {
            let id = copy_id(&job.id, i);
            let fast_cost = cost(i)
                .sub_finite(&cost(i + 1))
                .ok_or_else(|| Error::Internal("copy cost difference undefined".into()))?;
            jobs.push(NormJob::new(id.clone(), delay(i + 1), fast_cost));
            origin.copies.insert(id.clone(), (job.id.clone(), i));
            ids.push(id);
        }
        origin.pairs.insert(job.id.clone(), pairs.iter().map(|p| p.0).collect());
        copies_of.push(ids);
    }
    let mut edges = Vec::new();
    for &(u, w) in instance.edges() {
        for a in &copies_of[u] {
            for b in &copies_of[w] {
                edges.push((a.clone(), b.clone()));
            }
        }
    }
    NormalizedInstance::build(jobs, edges, instance.deadline().clone())?.with_origin(origin)
}

/// Closes a solution to suffix form: for each original job, if copy `v_i` is
/// fast then so are `v_{i+1}, …, v_r`. Zero-cost copies are always added.
pub fn canonicalize(norm: &NormalizedInstance, sol: &AccelerationSet) -> Result<AccelerationSet> {
    let origin = origin_of(norm)?;
    let mut first_fast: BTreeMap<&str, usize> = BTreeMap::new();
    for &v in &sol.fast {
        let (job, copy) = &origin.copies[norm.id(v)];
        let entry = first_fast.entry(job.as_str()).or_insert(*copy);
        *entry = (*entry).min(*copy);
    }
    let mut fast = Vec::new();
    for (v, job) in norm.base().jobs().iter().enumerate() {
        let (orig, copy) = &origin.copies[&job.id];
        let from = first_fast.get(orig.as_str()).copied().unwrap_or(usize::MAX);
        if *copy >= from || norm.fast_cost(v).is_zero() {
            fast.push(v);
        }
    }
    Ok(AccelerationSet::new(norm, fast))
}

/// Original alternative index chosen for every original job.
pub fn denormalize_solution(norm: &NormalizedInstance, sol: &AccelerationSet) -> Result<BTreeMap<JobId, usize>> {
    let origin = origin_of(norm)?;
    let canonical = canonicalize(norm, sol)?;
    let mut first_fast: BTreeMap<&str, usize> = BTreeMap::new();
    for &v in &canonical.fast {
        let (job, copy) = &origin.copies[norm.id(v)];
        if *copy == 0 {
            return Err(Error::Infeasible(format!(
                "solution accelerates `{}`, whose fast option has infinite cost",
                norm.id(v)
            )));
        }
        let entry = first_fast.entry(job.as_str()).or_insert(*copy);
        *entry = (*entry).min(*copy);
    }
    let mut choice = BTreeMap::new();
    for (job, pairs) in &origin.pairs {
        let j = first_fast.get(job.as_str()).copied().ok_or_else(|| {
            Error::Infeasible(format!(
                "no copy of `{job}` is accelerated, so its last copy keeps unbounded delay"
            ))
        })?;
        choice.insert(job.clone(), pairs[j - 1]);
    }
    Ok(choice)
}

/// Choice vector in instance job order, as accepted by
/// [`TctInstance::evaluate_choice`].
pub fn choice_vector(instance: &TctInstance, choice: &BTreeMap<JobId, usize>) -> Result<Vec<usize>> {
    instance
        .jobs()
        .iter()
        .map(|job| {
            choice
                .get(&job.id)
                .copied()
                .ok_or_else(|| Error::UnknownJob(job.id.clone()))
        })
        .collect()
}

fn origin_of(norm: &NormalizedInstance) -> Result<&OriginMap> {
    norm.origin()
        .ok_or_else(|| Error::InvalidParameter("instance carries no normalization origin map".into()))
}
