//! Simple undirected graphs, hypercubes, and Cartesian products.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

/// Largest vertex count any constructor accepts.
pub const MAX_VERTICES: usize = 1 << 24;
/// Largest hypercube dimension `build_hypercube` accepts.
pub const MAX_HYPERCUBE_DIM: usize = 24;
/// Largest vertex count for which bitset adjacency rows are materialized.
pub const ROW_LIMIT: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypercubeMeta {
    pub d: usize,
}

/// An immutable simple graph on vertices `0..n`.
///
/// Adjacency is stored as sorted neighbor lists; bitset rows are built on
/// first use for graphs with at most [`ROW_LIMIT`] vertices.
#[derive(Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    labels: Option<Vec<String>>,
    meta: Option<HypercubeMeta>,
    rows: OnceLock<Vec<VertexSet>>,
}

/// The two parts of a bipartite graph. `first` holds vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub first: VertexSet,
    pub second: VertexSet,
}

impl Bipartition {
    pub fn swapped(self) -> Self {
        Bipartition {
            first: self.second,
            second: self.first,
        }
    }
}

impl Graph {
    fn from_sorted_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in lists {
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            labels: None,
            meta: None,
            rows: OnceLock::new(),
        }
    }

    /// The hypercube `Q_d`: vertex `i` is adjacent to `j` iff `i ^ j` has one bit set.
    pub fn hypercube(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_HYPERCUBE_DIM {
            return Err(Error::DimensionOutOfRange {
                d,
                max: MAX_HYPERCUBE_DIM,
            });
        }
        let n = 1usize << d;
        let lists = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = (0..d).map(|i| (v ^ (1 << i)) as u32).collect();
                nb.sort_unstable();
                nb
            })
            .collect();
        let mut g = Self::from_sorted_lists(lists);
        g.labels = Some((0..n).map(|v| format!("{v:0d$b}")).collect());
        g.meta = Some(HypercubeMeta { d });
        Ok(g)
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("a graph needs at least one vertex".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::GraphTooLarge {
                n,
                limit: MAX_VERTICES,
                what: "construction",
            });
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        for list in lists.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_sorted_lists(lists))
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Cartesian product. Vertex `(u, u')` gets index `u * |V(H)| + u'`.
    pub fn cartesian_product(&self, h: &Graph) -> Result<Self> {
        let (ng, nh) = (self.n(), h.n());
        let n = ng
            .checked_mul(nh)
            .filter(|&n| n <= MAX_VERTICES)
            .ok_or(Error::GraphTooLarge {
                n: ng.saturating_mul(nh),
                limit: MAX_VERTICES,
                what: "cartesian product",
            })?;
        let mut lists = Vec::with_capacity(n);
        for u in 0..ng {
            for up in 0..nh {
                let mut nb: Vec<u32> = self
                    .neighbors(u)
                    .map(|w| (w * nh + up) as u32)
                    .chain(h.neighbors(up).map(|wp| (u * nh + wp) as u32))
                    .collect();
                nb.sort_unstable();
                lists.push(nb);
            }
        }
        let mut g = Self::from_sorted_lists(lists);
        if let (Some(lg), Some(lh)) = (&self.labels, &h.labels) {
            let mut labels = Vec::with_capacity(n);
            for a in lg {
                for b in lh {
                    labels.push(format!("{a}{b}"));
                }
            }
            g.labels = Some(labels);
        }
        if let (Some(mg), Some(mh)) = (self.meta, h.meta) {
            g.meta = Some(HypercubeMeta { d: mg.d + mh.d });
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn hypercube_meta(&self) -> Option<HypercubeMeta> {
        self.meta
    }

    pub fn hypercube_dim(&self) -> Option<usize> {
        self.meta.map(|m| m.d)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Parse(format!(
                "expected {} labels, got {}",
                self.n(),
                labels.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Neighbors of `v` in ascending order. Panics if `v >= n`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.targets[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(|&w| w as usize)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n()
            && v < self.n()
            && self.targets[self.offsets[u]..self.offsets[u + 1]]
                .binary_search(&(v as u32))
                .is_ok()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn neighborhood(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        let mut s = VertexSet::empty(self.n());
        for w in self.neighbors(v) {
            s.insert(w);
        }
        Ok(s)
    }

    pub fn closed_neighborhood(&self, v: usize) -> Result<VertexSet> {
        let mut s = self.neighborhood(v)?;
        s.insert(v);
        Ok(s)
    }

    /// Open neighborhoods as bitsets, one per vertex.
    pub fn rows(&self) -> Result<&[VertexSet]> {
        if self.n() > ROW_LIMIT {
            return Err(Error::GraphTooLarge {
                n: self.n(),
                limit: ROW_LIMIT,
                what: "bitset adjacency rows",
            });
        }
        Ok(self.rows.get_or_init(|| {
            (0..self.n())
                .map(|v| self.neighborhood(v).expect("in range"))
                .collect()
        }))
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// `Some(k)` if every vertex has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.degree(0);
        (0..self.n()).all(|v| self.degree(v) == k).then_some(k)
    }

    fn bfs(&self, src: usize) -> (Vec<Option<usize>>, Vec<u128>) {
        let n = self.n();
        let mut dist = vec![None; n];
        let mut paths = vec![0u128; n];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        paths[src] = 1;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for w in self.neighbors(u) {
                match dist[w] {
                    None => {
                        dist[w] = Some(du + 1);
                        paths[w] = paths[u];
                        queue.push_back(w);
                    }
                    Some(dw) if dw == du + 1 => paths[w] = paths[w].saturating_add(paths[u]),
                    _ => {}
                }
            }
        }
        (dist, paths)
    }

    /// Shortest-path length, or `None` when `v` is unreachable from `u`.
    pub fn distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let d = self.bfs(u).0[v];
        if self.meta.is_some() {
            assert_eq!(d, Some((u ^ v).count_ones() as usize), "hypercube distance");
        }
        Ok(d)
    }

    /// Number of distinct shortest `u`-`v` paths (saturating). Zero if unreachable.
    pub fn shortest_path_count(&self, u: usize, v: usize) -> Result<u128> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs(u).1[v])
    }

    /// Two-coloring by BFS. Each component's smallest vertex lands in `first`.
    pub fn bipartition(&self) -> Result<Bipartition> {
        let n = self.n();
        let mut color: Vec<Option<bool>> = vec![None; n];
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        for root in 0..n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for w in self.neighbors(u) {
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            parent[w] = u;
                            depth[w] = depth[u] + 1;
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => {
                            return Err(Error::NotBipartite {
                                cycle: odd_cycle(&parent, &depth, u, w),
                            });
                        }
                        _ => {}
                    }
                }
            }
        }
        let mut first = VertexSet::empty(n);
        for (v, c) in color.iter().enumerate() {
            if *c == Some(false) {
                first.insert(v);
            }
        }
        let second = first.complement();
        Ok(Bipartition { first, second })
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_ok()
    }

    /// Stable digest of `n` and the sorted edge list.
    pub fn canonical_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n={};", self.n()).as_bytes());
        for (u, v) in self.edges() {
            hasher.update(format!("{u}-{v};").as_bytes());
        }
        hex::encode(hasher.finalize())
    }

    /// Checks the hypercube invariants when metadata is present.
    pub fn check_invariants(&self) -> Result<()> {
        for u in 0..self.n() {
            for v in self.neighbors(u) {
                if v == u {
                    return Err(Error::SelfLoop(u));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::InternalConsistency(format!(
                        "asymmetric edge {u}->{v}"
                    )));
                }
            }
        }
        if let Some(HypercubeMeta { d }) = self.meta {
            let ok = self.n() == 1 << d
                && self.edge_count() == d << (d - 1)
                && self.regular_degree() == Some(d)
                && self.edges().all(|(u, v)| (u ^ v).count_ones() == 1);
            if !ok {
                return Err(Error::InternalConsistency(format!("not a valid Q_{d}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
            hypercube_dim: self.hypercube_dim(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut g = Self::from_edges(json.n, &edges)?;
        if let Some(labels) = &json.labels {
            g = g.with_labels(labels.clone())?;
        }
        if let Some(d) = json.hypercube_dim {
            let q = Self::hypercube(d)?;
            if q.n() != g.n() || q.edges().ne(g.edges()) {
                return Err(Error::Parse(format!(
                    "hypercube_dim {d} does not match the edge list"
                )));
            }
            g.meta = Some(HypercubeMeta { d });
            if g.labels.is_none() {
                g.labels = q.labels;
            }
        }
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: GraphJson = serde_json::from_str(s)?;
        Self::from_json(&json)
    }

    /// Parses the text format: a header `n m`, then `m` lines `u v` (0-based).
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let (n, m) = parse_pair(header)?;
        let edges = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Self::from_edges(n, &edges)
    }

    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

fn odd_cycle(parent: &[usize], depth: &[usize], u: usize, w: usize) -> Vec<usize> {
    let (mut a, mut b) = (u, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    left.extend(right.into_iter().rev());
    left
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.edge_count())
            .field("meta", &self.meta)
            .finish()
    }
}

impl PartialEq for Graph {
    /// Adjacency-identical graphs compare equal; labels and metadata are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.offsets == other.offsets && self.targets == other.targets
    }
}

impl Eq for Graph {}

/// JSON graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypercube_dim: Option<usize>,
}
