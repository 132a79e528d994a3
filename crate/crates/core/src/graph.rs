//! Symmetric N-nearest-neighbor graphs over context vectors.
//!
//! Every word with a nonzero context vector picks its `N` most similar other
//! words by cosine; an undirected edge joins two words whenever either one
//! picked the other. Vertices left without any edge are dropped, since the
//! degree normalization downstream is undefined for them.

use std::io::Write;

use crate::context::ContextMatrix;
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborGraph {
    /// Vocabulary rank of each vertex.
    pub word_ids: Vec<usize>,
    pub labels: Vec<String>,
    /// Sorted neighbor lists, by vertex index.
    adjacency: Vec<Vec<usize>>,
    /// Words dropped for having no edges, in row order of the source matrix.
    pub removed: Vec<String>,
}

impl NeighborGraph {
    /// Builds a graph from an explicit undirected edge list over vertex
    /// indices. Duplicate edges are merged; self-loops are rejected. Vertices
    /// are kept even when isolated.
    pub fn from_edges(
        word_ids: Vec<usize>,
        labels: Vec<String>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let n = word_ids.len();
        if labels.len() != n {
            return Err(Error::Argument("labels and word ids differ in length".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Argument(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Argument(format!("edge ({a}, {b}) out of range")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(NeighborGraph {
            word_ids,
            labels,
            adjacency,
            removed: Vec::new(),
        })
    }

    /// Unlabeled graph on `n` vertices, labels `v0..`.
    pub fn unlabeled(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges((0..n).collect(), (0..n).map(|i| format!("v{i}")).collect(), edges)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as vertex pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Edges as pairs of vocabulary ranks, smaller rank first, sorted.
    pub fn word_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let (a, b) = (self.word_ids[i], self.word_ids[j]);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// The 0/1 adjacency matrix `M` and the degree vector (diagonal of `D`).
    pub fn adjacency_and_degrees(&self) -> Result<(SymmetricMatrix, Vec<f64>)> {
        if self.is_empty() {
            return Err(Error::Argument("graph has no vertices".into()));
        }
        let mut m = SymmetricMatrix::zeros(self.len());
        for (i, j) in self.edges() {
            m.set(i, j, 1.0);
        }
        let degrees = self.adjacency.iter().map(|l| l.len() as f64).collect();
        Ok((m, degrees))
    }

    /// `word_i<TAB>word_j`, one line per edge, lower-ranked word first.
    pub fn write_edges_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut edges: Vec<(usize, usize, usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let (i, j) = if self.word_ids[i] <= self.word_ids[j] { (i, j) } else { (j, i) };
                (self.word_ids[i], self.word_ids[j], i, j)
            })
            .collect();
        edges.sort_unstable();
        for (_, _, i, j) in edges {
            writeln!(w, "{}\t{}", self.labels[i], self.labels[j])?;
        }
        Ok(())
    }

    pub fn write_removed<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for word in &self.removed {
            writeln!(w, "{word}")?;
        }
        Ok(())
    }
}

/// Nearest-neighbor union graph over the rows of `ctx`.
///
/// Candidates are ranked by cosine, descending, with ties going to the lower
/// vocabulary rank. All-zero rows select nothing; a row that ends up with no
/// edges is removed and listed in [`NeighborGraph::removed`].
pub fn knn_graph(ctx: &ContextMatrix, n: usize) -> Result<NeighborGraph> {
    let k = ctx.len();
    if n == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    if n >= k {
        return Err(Error::Argument(format!("N = {n} must be smaller than K = {k}")));
    }
    let sims = ctx.similarities();
    let mut edges = Vec::with_capacity(k * n);
    let mut candidates: Vec<usize> = Vec::with_capacity(k);
    for i in 0..k {
        if ctx.rows[i].is_zero() {
            continue;
        }
        let row = &sims[i * k..(i + 1) * k];
        candidates.clear();
        candidates.extend((0..k).filter(|&j| j != i));
        let order = |&a: &usize, &b: &usize| {
            row[b]
                .total_cmp(&row[a])
                .then(ctx.word_ids[a].cmp(&ctx.word_ids[b]))
        };
        candidates.select_nth_unstable_by(n - 1, order);
        edges.extend(candidates[..n].iter().map(|&j| (i, j)));
    }
    let full = NeighborGraph::from_edges(ctx.word_ids.clone(), ctx.words.clone(), &edges)?;

    let keep: Vec<usize> = (0..k).filter(|&v| full.degree(v) > 0).collect();
    if keep.len() == k {
        return Ok(full);
    }
    let mut new_index = vec![usize::MAX; k];
    for (new, &old) in keep.iter().enumerate() {
        new_index[old] = new;
    }
    let removed = (0..k)
        .filter(|&v| full.degree(v) == 0)
        .map(|v| ctx.words[v].clone())
        .collect();
    let edges: Vec<(usize, usize)> = full
        .edges()
        .into_iter()
        .map(|(a, b)| (new_index[a], new_index[b]))
        .collect();
    let mut g = NeighborGraph::from_edges(
        keep.iter().map(|&v| ctx.word_ids[v]).collect(),
        keep.iter().map(|&v| ctx.words[v].clone()).collect(),
        &edges,
    )?;
    g.removed = removed;
    Ok(g)
}
