//! JSON file formats.
//!
//! Instances: `{"jobs":[{"id":..,"alternatives":[[delay,cost],..]}],"edges":[[src,dst],..],"deadline":..}`
//! with `"inf"` for the infinite value and rationals as numbers or `"p/q"`.
//! Solutions: `{"fast":[ids],"cost":..}`. Covers:
//! `{"x":{id:..},"objective":..,"quality":"exact"|"approx","eps":..}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::dvd::{Digraph, DvdInstance};
use crate::error::{Error, Result};
use crate::model::{AccelerationSet, Alternative, FractionalCover, Job, NormalizedInstance, OriginMap, Quality, TctInstance};
use crate::number::{rational_from_json, rational_to_json, Ext, Rational};

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| Error::Parse(format!("missing field `{name}`")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("`{what}` must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::Parse(format!("`{what}` must be a string")))
}

pub fn instance_from_json(value: &Value) -> Result<TctInstance> {
    let mut jobs = Vec::new();
    for job in as_array(field(value, "jobs")?, "jobs")? {
        let id = as_str(field(job, "id")?, "id")?.to_string();
        let mut alternatives = Vec::new();
        for pair in as_array(field(job, "alternatives")?, "alternatives")? {
            let pair = as_array(pair, "alternative")?;
            if pair.len() != 2 {
                return Err(Error::Parse(format!("alternative of `{id}` must be a [delay, cost] pair")));
            }
            alternatives.push(Alternative::new(Ext::from_json(&pair[0])?, Ext::from_json(&pair[1])?));
        }
        jobs.push(Job { id, alternatives });
    }
    let mut edges = Vec::new();
    if let Some(list) = value.get("edges") {
        for edge in as_array(list, "edges")? {
            let edge = as_array(edge, "edge")?;
            if edge.len() != 2 {
                return Err(Error::Parse("edge must be a [src, dst] pair".into()));
            }
            edges.push((as_str(&edge[0], "edge")?.to_string(), as_str(&edge[1], "edge")?.to_string()));
        }
    }
    let deadline = rational_from_json(field(value, "deadline")?)?;
    TctInstance::new(jobs, edges, deadline)
}

pub fn instance_to_json(instance: &TctInstance) -> Value {
    let jobs: Vec<Value> = instance
        .jobs()
        .iter()
        .map(|job| {
            let alts: Vec<Value> = job
                .alternatives
                .iter()
                .map(|a| Value::Array(vec![a.delay.to_json(), a.cost.to_json()]))
                .collect();
            json!({ "id": job.id, "alternatives": alts })
        })
        .collect();
    let edges: Vec<Value> = instance
        .edges()
        .iter()
        .map(|&(s, t)| json!([instance.id(s), instance.id(t)]))
        .collect();
    json!({
        "jobs": jobs,
        "edges": edges,
        "deadline": rational_to_json(instance.deadline()),
    })
}

pub fn normalized_from_json(value: &Value) -> Result<NormalizedInstance> {
    NormalizedInstance::from_instance(instance_from_json(value)?)
}

/// A normalized instance, or the normalization of a general one.
pub fn load_normalized(value: &Value) -> Result<NormalizedInstance> {
    let instance = instance_from_json(value)?;
    match NormalizedInstance::from_instance(instance.clone()) {
        Ok(norm) => Ok(norm),
        Err(Error::InvalidInstance(_)) => crate::normalize::normalize(&instance),
        Err(e) => Err(e),
    }
}

/// `{"vertices":[labels],"edges":[[a,b],..],"k":K}`; `k` may be absent.
pub fn dvd_to_json(graph: &Digraph, k: Option<usize>) -> Value {
    let edges: Vec<Value> = graph.edges().iter().map(|&(a, b)| json!([graph.label(a), graph.label(b)])).collect();
    let mut out = json!({ "vertices": graph.labels(), "edges": edges });
    if let Some(k) = k {
        out["k"] = json!(k);
    }
    out
}

pub fn graph_from_json(value: &Value) -> Result<(Digraph, Option<usize>)> {
    let labels = as_array(field(value, "vertices")?, "vertices")?
        .iter()
        .map(|v| as_str(v, "vertex").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut edges = Vec::new();
    for edge in as_array(field(value, "edges")?, "edges")? {
        let edge = as_array(edge, "edge")?;
        if edge.len() != 2 {
            return Err(Error::Parse("edge must be a [src, dst] pair".into()));
        }
        let end = |v: &Value| -> Result<usize> {
            let l = as_str(v, "edge")?;
            index.get(l).copied().ok_or_else(|| Error::UnknownJob(l.to_string()))
        };
        edges.push((end(&edge[0])?, end(&edge[1])?));
    }
    let k = match value.get("k") {
        None | Some(Value::Null) => None,
        Some(k) => Some(k.as_u64().ok_or_else(|| Error::Parse("`k` must be a nonnegative integer".into()))? as usize),
    };
    Ok((Digraph::new(labels, edges)?, k))
}

/// A DVD instance; `k` overrides the file's value.
pub fn dvd_from_json(value: &Value, k: Option<usize>) -> Result<DvdInstance> {
    let (graph, file_k) = graph_from_json(value)?;
    let k = k.or(file_k).ok_or_else(|| Error::InvalidParameter("path length k is not given".into()))?;
    DvdInstance::new(graph, k)
}

pub fn solution_to_json(norm: &NormalizedInstance, sol: &AccelerationSet) -> Value {
    let fast: Vec<&str> = sol.ids(norm).collect();
    json!({ "fast": fast, "cost": sol.cost.to_json() })
}

/// The solution and the cost it declares (which may disagree with the
/// recomputed one).
pub fn solution_from_json(norm: &NormalizedInstance, value: &Value) -> Result<(AccelerationSet, Option<Ext>)> {
    let mut fast = Vec::new();
    for id in as_array(field(value, "fast")?, "fast")? {
        fast.push(norm.base().index_of(as_str(id, "fast")?)?);
    }
    let declared = value.get("cost").map(Ext::from_json).transpose()?;
    Ok((AccelerationSet::new(norm, fast), declared))
}

pub fn cover_to_json(norm: &NormalizedInstance, cover: &FractionalCover) -> Value {
    let mut x = Map::new();
    for (v, xv) in cover.x.iter().enumerate() {
        x.insert(norm.id(v).to_string(), rational_to_json(xv));
    }
    let (quality, eps) = match &cover.quality {
        Quality::Exact => ("exact", Value::from(0)),
        Quality::Approx(eps) => ("approx", rational_to_json(eps)),
    };
    json!({
        "x": Value::Object(x),
        "objective": cover.objective.to_json(),
        "quality": quality,
        "eps": eps,
    })
}

pub fn cover_from_json(norm: &NormalizedInstance, value: &Value) -> Result<FractionalCover> {
    let map = field(value, "x")?
        .as_object()
        .ok_or_else(|| Error::Parse("`x` must be an object".into()))?;
    let mut x = vec![Rational::from_integer(0.into()); norm.n()];
    for (id, xv) in map {
        x[norm.base().index_of(id)?] = rational_from_json(xv)?;
    }
    let quality = match value.get("quality").and_then(Value::as_str) {
        Some("approx") => Quality::Approx(rational_from_json(field(value, "eps")?)?),
        _ => Quality::Exact,
    };
    FractionalCover::new(norm, x, quality)
}

pub fn origin_to_json(origin: &OriginMap) -> Value {
    let copies: Map<String, Value> = origin
        .copies
        .iter()
        .map(|(id, (job, copy))| (id.clone(), json!({ "job": job, "copy": copy })))
        .collect();
    let pairs: Map<String, Value> = origin
        .pairs
        .iter()
        .map(|(job, idx)| (job.clone(), json!(idx)))
        .collect();
    json!({ "copies": copies, "pairs": pairs })
}

pub fn origin_from_json(value: &Value) -> Result<OriginMap> {
    let mut copies = BTreeMap::new();
    let obj = |v: &Value, what: &str| -> Result<Map<String, Value>> {
        v.as_object().cloned().ok_or_else(|| Error::Parse(format!("`{what}` must be an object")))
    };
    for (id, entry) in obj(field(value, "copies")?, "copies")? {
        let job = as_str(field(&entry, "job")?, "job")?.to_string();
        let copy = field(&entry, "copy")?
            .as_u64()
            .ok_or_else(|| Error::Parse("`copy` must be a nonnegative integer".into()))?;
        copies.insert(id, (job, copy as usize));
    }
    let mut pairs = BTreeMap::new();
    for (job, list) in obj(field(value, "pairs")?, "pairs")? {
        let idx = as_array(&list, "pairs")?
            .iter()
            .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| Error::Parse("pair index".into())))
            .collect::<Result<Vec<_>>>()?;
        pairs.insert(job, idx);
    }
    Ok(OriginMap { copies, pairs })
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Value> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: impl AsRef<Path>, value: &Value) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}
