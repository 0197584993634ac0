//! Vertex deletion in acyclic digraphs: destroy every directed path with `k`
//! vertices by deleting as few vertices as possible.
//!
//! Besides the digraph type this module holds the reduction to time-cost
//! tradeoff, the tensor product with an acyclic tournament, the extremal
//! families and the greedy `k`-approximation.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::model::{JobId, NormJob, NormalizedInstance};
use crate::number::{int, Ext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl Digraph {
    /// Builds an acyclic digraph; duplicate edges are merged.
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = labels.len();
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        let mut succs = vec![Vec::new(); n];
        let mut preds = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) refers to a missing vertex")));
            }
            if u == v {
                return Err(Error::Cycle(labels[u].clone()));
            }
            succs[u].push(v);
            preds[v].push(u);
        }
        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            topo.push(v);
            for &w in &succs[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        if topo.len() < n {
            let v = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
            return Err(Error::Cycle(labels[v].clone()));
        }
        Ok(Digraph { labels, edges: edges.into_iter().collect(), succs, preds, topo })
    }

    /// Vertices labelled `1..=n`.
    pub fn numbered(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succs[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succs[u].binary_search(&v).is_ok()
    }

    /// 1-based level: vertices on the longest path ending in `v`.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0; self.n()];
        for &v in &self.topo {
            level[v] = 1 + self.preds[v].iter().map(|&u| level[u]).max().unwrap_or(0);
        }
        level
    }

    /// Number of vertices on a longest path.
    pub fn depth(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Vertices on the longest path starting in each vertex, ignoring
    /// `removed` vertices.
    pub fn path_lengths_from(&self, removed: &[bool]) -> Vec<usize> {
        let mut len = vec![0; self.n()];
        for &v in self.topo.iter().rev() {
            if removed[v] {
                continue;
            }
            len[v] = 1 + self.succs[v].iter().filter(|&&w| !removed[w]).map(|&w| len[w]).max().unwrap_or(0);
        }
        len
    }

    /// Lexicographically least path with exactly `k` vertices avoiding
    /// `removed`.
    pub fn least_k_path(&self, k: usize, removed: &[bool]) -> Option<Vec<usize>> {
        if k == 0 {
            return None;
        }
        let len = self.path_lengths_from(removed);
        let mut current = (0..self.n()).find(|&v| !removed[v] && len[v] >= k)?;
        let mut path = vec![current];
        while path.len() < k {
            let need = k - path.len();
            current = *self.succs[current]
                .iter()
                .find(|&&w| !removed[w] && len[w] >= need)
                .expect("path length table is consistent");
            path.push(current);
        }
        Some(path)
    }

    /// Whether deleting `removed` destroys every `k`-vertex path.
    pub fn destroys_k_paths(&self, k: usize, removed: &[bool]) -> bool {
        self.path_lengths_from(removed).iter().all(|&l| l < k)
    }

    pub fn is_path(&self, vertices: &[usize]) -> bool {
        vertices.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvdInstance {
    pub graph: Digraph,
    pub k: usize,
}

impl DvdInstance {
    pub fn new(graph: Digraph, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("path length k must be at least 1".into()));
        }
        Ok(DvdInstance { graph, k })
    }

    pub fn is_feasible(&self, deleted: &[usize]) -> bool {
        let mut removed = vec![false; self.graph.n()];
        for &v in deleted {
            removed[v] = true;
        }
        self.graph.destroys_k_paths(self.k, &removed)
    }
}

/// The acyclic tournament `D_n`: edges `(i, j)` for all `i < j`.
pub fn gen_tournament(n: usize) -> Result<Digraph> {
    Digraph::numbered(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// The directed path `P_n`.
pub fn gen_path(n: usize) -> Result<Digraph> {
    Digraph::numbered(n, (1..n).map(|i| (i - 1, i)))
}

/// Index of vertex `(v, i)` (with 1-based `i`) in a tensor product with `d`
/// copies.
pub fn tensor_index(v: usize, i: usize, d: usize) -> usize {
    v * d + (i - 1)
}

/// `G^d`: vertices `V × {1..d}`, edges `((v,i),(w,j))` for `(v,w) ∈ E`, `i < j`.
pub fn tensor_with_tournament(dvd: &DvdInstance, d: usize) -> Result<DvdInstance> {
    if d < dvd.k {
        return Err(Error::InvalidParameter(format!("tensor depth d = {d} is below k = {}", dvd.k)));
    }
    let g = &dvd.graph;
    let labels = (0..g.n())
        .flat_map(|v| (1..=d).map(move |i| (v, i)))
        .map(|(v, i)| format!("({},{i})", g.label(v)))
        .collect();
    let mut edges = Vec::new();
    for &(v, w) in g.edges() {
        for i in 1..=d {
            for j in i + 1..=d {
                edges.push((tensor_index(v, i, d), tensor_index(w, j, d)));
            }
        }
    }
    DvdInstance::new(Digraph::new(labels, edges)?, dvd.k)
}

/// `W × {1..d}` for a vertex set `W` of the base graph.
pub fn lift_solution(base: &[usize], d: usize) -> Vec<usize> {
    base.iter().flat_map(|&v| (1..=d).map(move |i| tensor_index(v, i, d))).collect()
}

/// Job id of `(v, i)` in the time-cost tradeoff instance built from a DVD
/// instance.
pub fn dvd_job_id(graph: &Digraph, v: usize, i: usize) -> JobId {
    format!("({},{i})", graph.label(v))
}

/// Equivalent normalized time-cost tradeoff instance of the same depth.
///
/// Job `(v, l(v))` is variable (fast at cost 1, slow `d + 1`); every other
/// `(v, i)` is fixed at delay `d`, encoded as `{(0, ∞), (d, 0)}`. The deadline
/// is `d² + k - 1`. Precedences `(v,i) → (v,i+1)` and `(v,i) → (w,i+1)` for
/// `(v,w) ∈ E`, `i ≥ l(v)`, generate the required order transitively.
pub fn dvd_to_tct(dvd: &DvdInstance) -> Result<NormalizedInstance> {
    let g = &dvd.graph;
    if g.n() == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    let level = g.levels();
    let d = level.iter().copied().max().unwrap_or(1);
    let d_ext = Ext::int(d as i64);
    let mut jobs = Vec::with_capacity(g.n() * d);
    for v in 0..g.n() {
        for i in 1..=d {
            let id = dvd_job_id(g, v, i);
            if i == level[v] {
                jobs.push(NormJob::new(id, Ext::int(d as i64 + 1), Ext::int(1)));
            } else {
                jobs.push(NormJob::new(id, d_ext.clone(), Ext::Infinite));
            }
        }
    }
    let mut edges = Vec::new();
    for v in 0..g.n() {
        for i in 1..d {
            edges.push((dvd_job_id(g, v, i), dvd_job_id(g, v, i + 1)));
        }
    }
    for &(v, w) in g.edges() {
        for i in level[v]..d {
            edges.push((dvd_job_id(g, v, i), dvd_job_id(g, w, i + 1)));
        }
    }
    let deadline = (d * d + dvd.k - 1) as i64;
    NormalizedInstance::build(jobs, edges, int(deadline))
}

/// Vertices whose variable job is accelerated.
pub fn dvd_vertices_from_tct(dvd: &DvdInstance, norm: &NormalizedInstance, fast: &BTreeSet<usize>) -> Result<Vec<usize>> {
    let level = dvd.graph.levels();
    let mut out = Vec::new();
    for v in 0..dvd.graph.n() {
        let job = norm.base().index_of(&dvd_job_id(&dvd.graph, v, level[v]))?;
        if fast.contains(&job) {
            out.push(v);
        }
    }
    Ok(out)
}

/// `rd` vertex-disjoint `k`-vertex paths in `P_n^d`, `n = (r+1)k - 1`, as
/// 1-based `(s, t)` pairs in path order.
///
/// Path `(i, j)` starts from `{(ki, j), (ki+1, j+1), …, (ki+k-1, j+k-1)}`;
/// entries whose second coordinate `d + t` overflows wrap to `(s - k, t)`.
pub fn path_packing_certificate(r: usize, d: usize, k: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if r < 1 || k < 2 || k > d {
        return Err(Error::InvalidParameter(format!(
            "packing certificate needs r ≥ 1 and 2 ≤ k ≤ d, got r = {r}, d = {d}, k = {k}"
        )));
    }
    let mut paths = Vec::with_capacity(r * d);
    for i in 1..=r {
        for j in 1..=d {
            let mut path: Vec<(usize, usize)> = (0..k)
                .map(|m| {
                    let (s, t) = (k * i + m, j + m);
                    if t > d { (s - k, t - d) } else { (s, t) }
                })
                .collect();
            path.sort();
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Checks that `paths` are pairwise vertex-disjoint directed paths with
/// exactly `k` vertices in `P_n^d`.
pub fn verify_packing(n: usize, d: usize, k: usize, paths: &[Vec<(usize, usize)>]) -> Result<()> {
    let graph = tensor_with_tournament(&DvdInstance::new(gen_path(n)?, k.min(d))?, d)?.graph;
    let mut seen = BTreeSet::new();
    for path in paths {
        if path.len() != k {
            return Err(Error::Infeasible(format!("path {path:?} does not have {k} vertices")));
        }
        let mut idx = Vec::with_capacity(k);
        for &(s, t) in path {
            if s < 1 || s > n || t < 1 || t > d {
                return Err(Error::Infeasible(format!("vertex ({s},{t}) is outside P_{n}^{d}")));
            }
            if !seen.insert((s, t)) {
                return Err(Error::Infeasible(format!("vertex ({s},{t}) is used twice")));
            }
            idx.push(tensor_index(s - 1, t, d));
        }
        if !graph.is_path(&idx) {
            return Err(Error::Infeasible(format!("{path:?} is not a directed path")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyCover {
    pub vertices: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
}

/// Takes all vertices of a maximal family of vertex-disjoint `k`-paths,
/// choosing the lexicographically least remaining path each round.
pub fn dvd_greedy(dvd: &DvdInstance) -> GreedyCover {
    let mut removed = vec![false; dvd.graph.n()];
    let mut paths = Vec::new();
    while let Some(path) = dvd.graph.least_k_path(dvd.k, &removed) {
        for &v in &path {
            removed[v] = true;
        }
        paths.push(path);
    }
    let vertices = (0..dvd.graph.n()).filter(|&v| removed[v]).collect();
    GreedyCover { vertices, paths }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tournament_and_path_edge_counts() {
        assert_eq!(gen_tournament(3).unwrap().edges().len(), 3);
        assert_eq!(gen_path(5).unwrap().edges().len(), 4);
        assert!(Digraph::numbered(2, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn tensor_of_p4() {
        let p4 = DvdInstance::new(gen_path(4).unwrap(), 2).unwrap();
        let g4 = tensor_with_tournament(&p4, 4).unwrap();
        assert_eq!(g4.graph.n(), 16);
        assert_eq!(g4.graph.edges().len(), 18);
        assert!(g4.graph.depth() <= 4);
        let edgeless = DvdInstance::new(Digraph::numbered(3, []).unwrap(), 2).unwrap();
        assert!(tensor_with_tournament(&edgeless, 3).unwrap().graph.edges().is_empty());
    }

    #[test]
    fn greedy_on_p9() {
        let p9 = DvdInstance::new(gen_path(9).unwrap(), 3).unwrap();
        let greedy = dvd_greedy(&p9);
        assert_eq!(greedy.paths, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        assert_eq!(greedy.vertices.len(), 9);
        assert!(p9.is_feasible(&greedy.vertices));
    }

    #[test]
    fn greedy_on_edgeless_and_tournament() {
        let edgeless = DvdInstance::new(Digraph::numbered(4, []).unwrap(), 2).unwrap();
        assert!(dvd_greedy(&edgeless).vertices.is_empty());
        let d4 = DvdInstance::new(gen_tournament(4).unwrap(), 4).unwrap();
        let greedy = dvd_greedy(&d4);
        assert_eq!(greedy.paths.len(), 1);
        assert_eq!(greedy.vertices.len(), 4);
    }

    #[test]
    fn small_packing_certificate() {
        let paths = path_packing_certificate(1, 2, 2).unwrap();
        assert_eq!(paths, vec![vec![(2, 1), (3, 2)], vec![(1, 1), (2, 2)]]);
        verify_packing(3, 2, 2, &paths).unwrap();
        assert!(path_packing_certificate(1, 2, 3).is_err());
    }

    #[test]
    fn packing_checker_rejects_overlap() {
        let bad = vec![vec![(2, 1), (3, 2)], vec![(2, 1), (3, 2)]];
        assert!(verify_packing(3, 2, 2, &bad).is_err());
        let not_path = vec![vec![(1, 1), (3, 2)]];
        assert!(verify_packing(3, 2, 2, &not_path).is_err());
    }

    #[test]
    fn dvd_reduction_levels_match_copy_index() {
        let p3 = DvdInstance::new(gen_path(3).unwrap(), 2).unwrap();
        let norm = dvd_to_tct(&p3).unwrap();
        assert_eq!(norm.n(), 9);
        assert_eq!(norm.deadline(), &int(10));
        let view = crate::model::layer(norm.base());
        assert_eq!(view.depth(), 3);
        for v in 0..3 {
            for i in 1..=3 {
                let job = norm.base().index_of(&dvd_job_id(&p3.graph, v, i)).unwrap();
                assert_eq!(view.level(job), i);
            }
        }
    }
}
