//! Graph types: unconditional dependence graphs over measurement variables,
//! edge clique covers, the bipartite latent→measurement (MCM) graphs they
//! induce, and NCFA graphs with per-clique latent multiplicities.

mod metrics;

pub use metrics::{assign_latents, default_lambda, ecc_equivalent, sfd, shd, udg_error_bound};

use serde::{Deserialize, Serialize};

use crate::{NcfaError, Result};

/// Undirected graph on vertices `0..n`. Edges are stored once as `(i, j)`
/// with `i < j`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UdgJson", into = "UdgJson")]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UdgJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<UdgJson> for UndirectedGraph {
    type Error = NcfaError;

    fn try_from(value: UdgJson) -> Result<Self> {
        UndirectedGraph::new(value.n, value.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<UndirectedGraph> for UdgJson {
    fn from(g: UndirectedGraph) -> Self {
        UdgJson {
            n: g.n,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl UndirectedGraph {
    /// Builds a graph from unordered pairs. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![false; n * n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(NcfaError::InvalidInput(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(NcfaError::InvalidInput(format!("self-loop at vertex {a}")));
            }
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        Ok(Self::from_adjacency(n, adj))
    }

    fn from_adjacency(n: usize, adj: Vec<bool>) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if adj[i * n + j] {
                    edges.push((i, j));
                }
            }
        }
        UndirectedGraph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(n, vec![false; n * n])
    }

    pub fn complete(n: usize) -> Self {
        let mut adj = vec![true; n * n];
        for i in 0..n {
            adj[i * n + i] = false;
        }
        Self::from_adjacency(n, adj)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertex pairs that are not edges.
    pub fn absent_count(&self) -> usize {
        pair_count(self.n) - self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adj[i * self.n + j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adj[i * self.n + j])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    /// True when every pair of distinct vertices in `vertices` is adjacent.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(k, &a)| {
            vertices[k + 1..]
                .iter()
                .all(|&b| a != b && self.has_edge(a, b))
        })
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(NcfaError::DimensionMismatch(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Self::new(self.n, self.edges.iter().map(|&(i, j)| (perm[i], perm[j])))
    }
}

pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An ordered list of vertex sets. Each clique is stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCover {
    n: usize,
    cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    pub fn new(n: usize, cliques: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(cliques.len());
        for mut c in cliques {
            if c.is_empty() {
                return Err(NcfaError::InvalidInput("empty clique".into()));
            }
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(NcfaError::InvalidInput(format!(
                    "clique {c:?} repeats a vertex"
                )));
            }
            if let Some(&v) = c.last().filter(|&&v| v >= n) {
                return Err(NcfaError::InvalidInput(format!(
                    "vertex {v} out of range for {n} vertices"
                )));
            }
            out.push(c);
        }
        Ok(CliqueCover { n, cliques: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Cliques sorted lexicographically, for comparing covers as sets of sets.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut c = self.cliques.clone();
        c.sort();
        c.dedup();
        c
    }

    /// True iff every clique is complete in `graph` and every edge of `graph`
    /// lies in some clique. Minimality is not checked.
    pub fn covers(&self, graph: &UndirectedGraph) -> Result<bool> {
        if self.n != graph.n() {
            return Err(NcfaError::DimensionMismatch(format!(
                "cover over {} vertices, graph over {}",
                self.n,
                graph.n()
            )));
        }
        if !self.cliques.iter().all(|c| graph.is_clique(c)) {
            return Ok(false);
        }
        let n = self.n;
        let mut covered = vec![false; n * n];
        for c in &self.cliques {
            for (k, &a) in c.iter().enumerate() {
                for &b in &c[k + 1..] {
                    covered[a * n + b] = true;
                }
            }
        }
        Ok(graph.edges().iter().all(|&(i, j)| covered[i * n + j]))
    }

    /// Appends a singleton clique for every vertex of `graph` with no
    /// neighbours, so each measurement ends up with a latent parent.
    pub fn with_isolated_singletons(&self, graph: &UndirectedGraph) -> Self {
        let mut cliques = self.cliques.clone();
        cliques.extend(
            (0..graph.n())
                .filter(|&v| graph.degree(v) == 0)
                .filter(|&v| !self.cliques.iter().any(|c| c.contains(&v)))
                .map(|v| vec![v]),
        );
        CliqueCover { n: self.n, cliques }
    }
}

/// Checks `cover` against `graph`; see [`CliqueCover::covers`].
pub fn validate_cover(graph: &UndirectedGraph, cover: &CliqueCover) -> Result<bool> {
    cover.covers(graph)
}

/// Bipartite DAG from latents to measurements, stored as a K×n 0/1
/// biadjacency matrix. Row `i` marks the children of latent `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFileJson", into = "GraphFileJson")]
pub struct McmGraph {
    n: usize,
    rows: Vec<Vec<bool>>,
}

/// On-disk form shared by MCM and NCFA graphs.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFileJson {
    n: usize,
    biadjacency: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<usize>>,
}

impl GraphFileJson {
    fn rows(&self) -> Result<Vec<Vec<bool>>> {
        self.biadjacency
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(NcfaError::InvalidInput(format!(
                            "biadjacency entry {other} is not 0 or 1"
                        ))),
                    })
                    .collect()
            })
            .collect()
    }
}

fn rows_to_json(rows: &[Vec<bool>]) -> Vec<Vec<u8>> {
    rows.iter()
        .map(|r| r.iter().map(|&b| u8::from(b)).collect())
        .collect()
}

impl TryFrom<GraphFileJson> for McmGraph {
    type Error = NcfaError;

    fn try_from(value: GraphFileJson) -> Result<Self> {
        McmGraph::from_rows(value.n, value.rows()?)
    }
}

impl From<McmGraph> for GraphFileJson {
    fn from(g: McmGraph) -> Self {
        GraphFileJson {
            n: g.n,
            biadjacency: rows_to_json(&g.rows),
            multiplicities: None,
        }
    }
}

impl McmGraph {
    pub fn from_rows(n: usize, rows: Vec<Vec<bool>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(NcfaError::DimensionMismatch(format!(
                    "biadjacency row {i} has {} columns, expected {n}",
                    r.len()
                )));
            }
            if !r.iter().any(|&b| b) {
                return Err(NcfaError::InvalidInput(format!(
                    "latent {i} has no children"
                )));
            }
        }
        Ok(McmGraph { n, rows })
    }

    /// Convenience constructor from 0/1 integer rows.
    pub fn from_binary(n: usize, rows: &[&[u8]]) -> Result<Self> {
        Self::from_rows(
            n,
            rows.iter()
                .map(|r| r.iter().map(|&b| b != 0).collect())
                .collect(),
        )
    }

    /// One latent per clique, in clique order.
    pub fn from_cover(cover: &CliqueCover) -> Result<Self> {
        if cover.is_empty() {
            return Err(NcfaError::InvalidInput(
                "cannot build an MCM graph from an empty cover".into(),
            ));
        }
        let rows = cover
            .cliques()
            .iter()
            .map(|c| {
                let mut row = vec![false; cover.n()];
                for &v in c {
                    row[v] = true;
                }
                row
            })
            .collect();
        Self::from_rows(cover.n(), rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of latents, the causal degrees of freedom.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn children(&self, latent: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[latent]
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }

    /// Row-major n×n matrix BᵀB: entry (i, j) counts the latents that are
    /// parents of both i and j.
    pub fn gram(&self) -> Vec<i64> {
        let n = self.n;
        let mut g = vec![0i64; n * n];
        for row in &self.rows {
            let ones: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            for &a in &ones {
                for &b in &ones {
                    g[a * n + b] += 1;
                }
            }
        }
        g
    }

    /// Two measurements are adjacent iff they share a latent parent, the
    /// d-separation structure given the empty set.
    pub fn udg(&self) -> UndirectedGraph {
        let n = self.n;
        let mut adj = vec![false; n * n];
        for row in &self.rows {
            let ones: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            for &a in &ones {
                for &b in &ones {
                    if a != b {
                        adj[a * n + b] = true;
                    }
                }
            }
        }
        UndirectedGraph::from_adjacency(n, adj)
    }

    pub fn to_cover(&self) -> CliqueCover {
        CliqueCover {
            n: self.n,
            cliques: (0..self.k()).map(|i| self.children(i).collect()).collect(),
        }
    }
}

/// Free-function form of [`McmGraph::from_cover`].
pub fn mcm_from_cover(cover: &CliqueCover) -> Result<McmGraph> {
    McmGraph::from_cover(cover)
}

/// Free-function form of [`McmGraph::udg`].
pub fn udg_of_mcm(mcm: &McmGraph) -> UndirectedGraph {
    mcm.udg()
}

/// An MCM graph whose latent `i` is replicated `multiplicities[i]` times.
/// The total is the latent degrees of freedom λ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFileJson", into = "GraphFileJson")]
pub struct NcfaGraph {
    mcm: McmGraph,
    multiplicities: Vec<usize>,
    lambda: usize,
}

impl TryFrom<GraphFileJson> for NcfaGraph {
    type Error = NcfaError;

    fn try_from(value: GraphFileJson) -> Result<Self> {
        let rows = value.rows()?;
        let k = rows.len();
        let mcm = McmGraph::from_rows(value.n, rows)?;
        NcfaGraph::new(mcm, value.multiplicities.unwrap_or_else(|| vec![1; k]))
    }
}

impl From<NcfaGraph> for GraphFileJson {
    fn from(g: NcfaGraph) -> Self {
        GraphFileJson {
            n: g.mcm.n,
            biadjacency: rows_to_json(&g.mcm.rows),
            multiplicities: Some(g.multiplicities),
        }
    }
}

impl NcfaGraph {
    pub fn new(mcm: McmGraph, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != mcm.k() {
            return Err(NcfaError::DimensionMismatch(format!(
                "{} multiplicities for {} latents",
                multiplicities.len(),
                mcm.k()
            )));
        }
        if multiplicities.contains(&0) {
            return Err(NcfaError::InvalidInput(
                "every clique needs at least one latent".into(),
            ));
        }
        let lambda = multiplicities.iter().sum();
        Ok(NcfaGraph {
            mcm,
            multiplicities,
            lambda,
        })
    }

    /// The fully connected architecture: one all-ones clique with λ latents.
    pub fn complete(n: usize, lambda: usize) -> Result<Self> {
        let mcm = McmGraph::from_rows(n, vec![vec![true; n]])?;
        Self::new(mcm, vec![lambda])
    }

    pub fn mcm(&self) -> &McmGraph {
        &self.mcm
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.mcm.n
    }

    /// λ×n biadjacency: row `i` of the MCM graph repeated `k_i` times.
    pub fn expanded_biadjacency(&self) -> Vec<Vec<bool>> {
        self.mcm
            .rows
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(row, &k)| std::iter::repeat_n(row.clone(), k))
            .collect()
    }

    /// Index of the clique each expanded latent belongs to.
    pub fn latent_cliques(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
            .collect()
    }
}
