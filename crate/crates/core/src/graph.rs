//! Colored bipartite graphs, matchings and color profiles.
//!
//! Sides are called `A` and `B`, each holding vertices `0..n`. Colors are
//! 1-based (`1..=q`). Vertex sets passed across the public API are sorted,
//! duplicate-free index slices.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A color index in `1..=q`.
pub type Color = usize;

/// Absolute tolerance on the sum of the color probabilities.
pub const ALPHA_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex index {index} out of range for side size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: usize },
    #[error("pair ({0}, {1}) is not an edge of the graph")]
    InvalidMatching(usize, usize),
    #[error("A-vertex {0} is unmatched")]
    UnmatchedVertex(usize),
    #[error("A-vertex {0} assigned twice")]
    DuplicateAssignment(usize),
    #[error("matching covers {got} A-vertices, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid color spec: {0}")]
    InvalidColorSpec(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Color probabilities `alpha_1..alpha_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorSpec {
    alphas: Vec<f64>,
}

impl ColorSpec {
    pub fn new(alphas: Vec<f64>) -> Result<Self, GraphError> {
        if alphas.is_empty() {
            return Err(GraphError::InvalidColorSpec("at least one color required".into()));
        }
        if let Some(bad) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(GraphError::InvalidColorSpec(format!("probability {bad} is not strictly positive")));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > ALPHA_SUM_TOLERANCE {
            return Err(GraphError::InvalidColorSpec(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(ColorSpec { alphas })
    }

    /// Equal probability `1/q` for every color.
    pub fn uniform(q: usize) -> Result<Self, GraphError> {
        Self::new(vec![1.0 / q as f64; q])
    }

    pub fn q(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Probability of `color` (1-based).
    pub fn alpha(&self, color: Color) -> f64 {
        self.alphas[color - 1]
    }

    pub fn alpha_min(&self) -> f64 {
        self.alphas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The lowest-indexed color attaining `alpha_min`.
    pub fn rarest_color(&self) -> Color {
        let min = self.alpha_min();
        self.alphas.iter().position(|&a| a == min).unwrap() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub color: Color,
}

/// An `n x n` bipartite graph with exactly one color on every edge.
///
/// Immutable after construction. Adjacency is indexed by side, vertex and
/// color so that `N_i(v)` lookups are slice reads.
#[derive(Debug, Clone)]
pub struct ColoredBipartiteGraph {
    n: usize,
    q: usize,
    alphas: Option<Vec<f64>>,
    /// Sorted by `(a, b)`.
    edges: Vec<Edge>,
    /// `a_adj[a]` holds `(b, color)` sorted by `b`.
    a_adj: Vec<Vec<(usize, Color)>>,
    /// `a_nbrs[color - 1][a]`, sorted.
    a_nbrs: Vec<Vec<Vec<usize>>>,
    /// `b_nbrs[color - 1][b]`, sorted.
    b_nbrs: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for ColoredBipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.q == other.q && self.alphas == other.alphas && self.edges == other.edges
    }
}

impl ColoredBipartiteGraph {
    /// Validates and indexes an edge list.
    pub fn new(n: usize, q: usize, edges: impl IntoIterator<Item = (usize, usize, Color)>) -> Result<Self, GraphError> {
        if q == 0 {
            return Err(GraphError::InvalidColorSpec("at least one color required".into()));
        }
        let mut list = Vec::new();
        for (a, b, color) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            if color == 0 || color > q {
                return Err(GraphError::ColorOutOfRange { color, q });
            }
            list.push(Edge { a, b, color });
        }
        list.sort();
        if let Some(w) = list.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(GraphError::DuplicateEdge(w[0].a, w[0].b));
        }

        let mut a_adj = vec![Vec::new(); n];
        let mut a_nbrs = vec![vec![Vec::new(); n]; q];
        let mut b_nbrs = vec![vec![Vec::new(); n]; q];
        // Edges are sorted by (a, b), so every pushed list comes out sorted.
        for e in &list {
            a_adj[e.a].push((e.b, e.color));
            a_nbrs[e.color - 1][e.a].push(e.b);
            b_nbrs[e.color - 1][e.b].push(e.a);
        }

        Ok(ColoredBipartiteGraph {
            n,
            q,
            alphas: None,
            edges: list,
            a_adj,
            a_nbrs,
            b_nbrs,
        })
    }

    /// Attaches the color probabilities the graph was sampled with.
    pub fn with_alphas(mut self, colors: &ColorSpec) -> Result<Self, GraphError> {
        if colors.q() != self.q {
            return Err(GraphError::InvalidColorSpec(format!(
                "{} probabilities for {} colors",
                colors.q(),
                self.q
            )));
        }
        self.alphas = Some(colors.alphas().to_vec());
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn alphas(&self) -> Option<&[f64]> {
        self.alphas.as_deref()
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Color of edge `(a, b)`, if present.
    pub fn color_of(&self, a: usize, b: usize) -> Option<Color> {
        let adj = self.a_adj.get(a)?;
        adj.binary_search_by_key(&b, |&(v, _)| v).ok().map(|i| adj[i].1)
    }

    /// All `(b, color)` pairs incident to `a`, sorted by `b`.
    pub fn adjacent(&self, a: usize) -> &[(usize, Color)] {
        &self.a_adj[a]
    }

    /// `N_i(a)`: B-vertices joined to `a` by a color-`color` edge.
    pub fn a_neighbors(&self, a: usize, color: Color) -> &[usize] {
        &self.a_nbrs[color - 1][a]
    }

    /// A-vertices joined to `b` by a color-`color` edge.
    pub fn b_neighbors(&self, b: usize, color: Color) -> &[usize] {
        &self.b_nbrs[color - 1][b]
    }

    pub fn color_degree_a(&self, a: usize, color: Color) -> usize {
        self.a_nbrs[color - 1][a].len()
    }

    pub fn color_degree_b(&self, b: usize, color: Color) -> usize {
        self.b_nbrs[color - 1][b].len()
    }

    fn check_color(&self, color: Color) -> Result<(), GraphError> {
        if color == 0 || color > self.q {
            Err(GraphError::ColorOutOfRange { color, q: self.q })
        } else {
            Ok(())
        }
    }

    fn check_indices(&self, set: &[usize]) -> Result<(), GraphError> {
        match set.iter().find(|&&v| v >= self.n) {
            Some(&index) => Err(GraphError::IndexOutOfRange { index, n: self.n }),
            None => Ok(()),
        }
    }

    /// `N_i(S)` for a set `S` of A-vertices, returned sorted.
    pub fn color_neighborhood(&self, s: &[usize], color: Color) -> Result<Vec<usize>, GraphError> {
        self.check_color(color)?;
        self.check_indices(s)?;
        let mut hit = vec![false; self.n];
        for &a in s {
            for &b in self.a_neighbors(a, color) {
                hit[b] = true;
            }
        }
        Ok(indices_of(&hit))
    }

    /// `e_i(S, T)`: number of color-`color` edges between `S ⊆ A` and `T ⊆ B`.
    pub fn color_cut_count(&self, s: &[usize], t: &[usize], color: Color) -> Result<usize, GraphError> {
        self.check_color(color)?;
        self.check_indices(s)?;
        self.check_indices(t)?;
        let mut in_t = vec![false; self.n];
        for &b in t {
            in_t[b] = true;
        }
        Ok(s.iter()
            .map(|&a| self.a_neighbors(a, color).iter().filter(|&&b| in_t[b]).count())
            .sum())
    }

    /// Number of edges of any color between `S` and `T`.
    pub fn cut_count(&self, s: &[usize], t: &[usize]) -> Result<usize, GraphError> {
        self.check_indices(s)?;
        self.check_indices(t)?;
        let mut in_t = vec![false; self.n];
        for &b in t {
            in_t[b] = true;
        }
        Ok(s.iter().map(|&a| self.a_adj[a].iter().filter(|&&(b, _)| in_t[b]).count()).sum())
    }

    /// The same graph with edge `(a, b)` removed, if present.
    pub fn without_edge(&self, a: usize, b: usize) -> Result<Self, GraphError> {
        let edges = self.edges.iter().filter(|e| (e.a, e.b) != (a, b)).map(|e| (e.a, e.b, e.color));
        let mut g = Self::new(self.n, self.q, edges)?;
        g.alphas = self.alphas.clone();
        Ok(g)
    }

    /// The same graph with one more edge.
    pub fn with_edge(&self, a: usize, b: usize, color: Color) -> Result<Self, GraphError> {
        let edges = self.edges.iter().map(|e| (e.a, e.b, e.color)).chain(std::iter::once((a, b, color)));
        let mut g = Self::new(self.n, self.q, edges)?;
        g.alphas = self.alphas.clone();
        Ok(g)
    }
}

pub(crate) fn indices_of(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}

/// A partial assignment `A -> B`.
///
/// Construction only checks ranges and that each A-vertex is assigned once.
/// Injectivity and edge membership are properties of a matching *against a
/// graph* and are checked by [`crate::matcher::verify_matching`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    assign: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching { assign: vec![None; n] }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut m = Matching::empty(n);
        for &(a, b) in pairs {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            if m.assign[a].is_some() {
                return Err(GraphError::DuplicateAssignment(a));
            }
            m.assign[a] = Some(b);
        }
        Ok(m)
    }

    pub fn from_assignment(assign: Vec<Option<usize>>) -> Self {
        Matching { assign }
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn partner(&self, a: usize) -> Option<usize> {
        self.assign[a]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assign
    }

    pub(crate) fn set(&mut self, a: usize, b: Option<usize>) {
        self.assign[a] = b;
    }

    pub fn size(&self) -> usize {
        self.assign.iter().flatten().count()
    }

    pub fn is_perfect(&self) -> bool {
        self.assign.iter().all(Option::is_some)
    }

    /// Matched pairs in increasing `a`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assign.iter().enumerate().filter_map(|(a, b)| b.map(|b| (a, b)))
    }

    /// `M^{-1}` as a B-indexed table. Later pairs win if `b` is reused.
    pub fn inverse(&self) -> Vec<Option<usize>> {
        let mut inv = vec![None; self.assign.len()];
        for (a, b) in self.pairs() {
            if b < inv.len() {
                inv[b] = Some(a);
            }
        }
        inv
    }

    /// `M(S)` for a set of A-vertices, sorted.
    pub fn matched_image(&self, s: &[usize]) -> Result<Vec<usize>, GraphError> {
        let mut image = Vec::with_capacity(s.len());
        for &a in s {
            if a >= self.n() {
                return Err(GraphError::IndexOutOfRange { index: a, n: self.n() });
            }
            image.push(self.assign[a].ok_or(GraphError::UnmatchedVertex(a))?);
        }
        image.sort_unstable();
        image.dedup();
        Ok(image)
    }
}

/// Per-color edge counts `(m_1, ..., m_q)` of a matching.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColorProfile(pub Vec<usize>);

impl ColorProfile {
    pub fn zeros(q: usize) -> Self {
        ColorProfile(vec![0; q])
    }

    /// `n` edges of `color`, none of the others.
    pub fn corner(q: usize, n: usize, color: Color) -> Self {
        let mut p = Self::zeros(q);
        p.0[color - 1] = n;
        p
    }

    pub fn q(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Count for `color` (1-based).
    pub fn get(&self, color: Color) -> usize {
        self.0[color - 1]
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Lowest color attaining the maximum count.
    pub fn argmax(&self) -> Color {
        let max = self.0.iter().copied().max().unwrap_or(0);
        self.0.iter().position(|&c| c == max).map_or(1, |i| i + 1)
    }

    /// Parses `"334,333,333"`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        text.split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                    line: 1,
                    message: format!("bad profile entry {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ColorProfile)
    }
}

impl fmt::Display for ColorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `(|Q_1 ∩ M|, ..., |Q_q ∩ M|)`.
pub fn profile_of(g: &ColoredBipartiteGraph, m: &Matching) -> Result<ColorProfile, GraphError> {
    if m.n() != g.n() {
        return Err(GraphError::SizeMismatch {
            expected: g.n(),
            got: m.n(),
        });
    }
    let mut counts = ColorProfile::zeros(g.q());
    for (a, b) in m.pairs() {
        let color = g.color_of(a, b).ok_or(GraphError::InvalidMatching(a, b))?;
        counts.0[color - 1] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two disjoint perfect matchings, one per color.
    pub fn f1() -> ColoredBipartiteGraph {
        ColoredBipartiteGraph::new(2, 2, [(0, 0, 1), (1, 1, 1), (0, 1, 2), (1, 0, 2)]).unwrap()
    }

    pub fn f2() -> ColoredBipartiteGraph {
        ColoredBipartiteGraph::new(2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 2), (1, 1, 1)]).unwrap()
    }

    pub fn f3() -> ColoredBipartiteGraph {
        ColoredBipartiteGraph::new(3, 2, [(0, 0, 1), (1, 1, 1), (2, 2, 1), (0, 1, 2), (1, 0, 1)]).unwrap()
    }

    pub fn complete(n: usize, q: usize, color: Color) -> ColoredBipartiteGraph {
        let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, color)));
        ColoredBipartiteGraph::new(n, q, edges).unwrap()
    }

    pub fn identity(n: usize) -> Matching {
        Matching::from_assignment((0..n).map(Some).collect())
    }
}
