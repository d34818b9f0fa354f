//! Maximum matchings on color-restricted subgraphs.
//!
//! Hopcroft–Karp with a fixed scan order: free A-vertices in increasing
//! index, neighbours in increasing B-index. Results are deterministic for a
//! given graph and color set.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{indices_of, Color, ColoredBipartiteGraph, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: usize },
    #[error("no perfect matching in color {}: A-set {:?} has only {} neighbours", .0.color, .0.witness, .0.neighborhood.len())]
    NoPerfectMatching(HallViolation),
}

/// A set `S ⊆ A` with `|N_i(S)| < |S|`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HallViolation {
    pub color: Color,
    pub witness: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

/// First problem found by [`verify_matching`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingViolation {
    #[error("matching has {got} positions, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("B-vertex {b} out of range")]
    IndexOutOfRange { b: usize },
    #[error("pair ({a}, {b}) is not an edge")]
    NotAnEdge { a: usize, b: usize },
    #[error("B-vertex {b} reused by A-vertices {first} and {second}")]
    ReusedB { b: usize, first: usize, second: usize },
    #[error("A-vertex {a} unmatched")]
    Unmatched { a: usize },
}

fn color_mask(g: &ColoredBipartiteGraph, allowed: &[Color]) -> Result<Vec<bool>, MatchError> {
    let mut mask = vec![false; g.q() + 1];
    for &c in allowed {
        if c == 0 || c > g.q() {
            return Err(MatchError::ColorOutOfRange { color: c, q: g.q() });
        }
        mask[c] = true;
    }
    Ok(mask)
}

fn restricted_adjacency(g: &ColoredBipartiteGraph, mask: &[bool]) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|a| g.adjacent(a).iter().filter(|&&(_, c)| mask[c]).map(|&(b, _)| b).collect())
        .collect()
}

struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    mate_a: Vec<Option<usize>>,
    mate_b: Vec<Option<usize>>,
    dist: Vec<usize>,
}

const INF: usize = usize::MAX;

impl<'a> HopcroftKarp<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        HopcroftKarp {
            adj,
            mate_a: vec![None; n],
            mate_b: vec![None; n],
            dist: vec![INF; n],
        }
    }

    /// Layers free A-vertices at 0; true if some free B-vertex is reachable.
    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for a in 0..self.adj.len() {
            if self.mate_a[a].is_none() {
                self.dist[a] = 0;
                queue.push_back(a);
            } else {
                self.dist[a] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &b in &self.adj[u] {
                match self.mate_b[b] {
                    None => found = true,
                    Some(w) if self.dist[w] == INF => {
                        self.dist[w] = self.dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn augment_from(&mut self, root: usize, cursor: &mut [usize], via: &mut [usize]) -> bool {
        let mut stack = vec![root];
        while let Some(&u) = stack.last() {
            if cursor[u] == self.adj[u].len() {
                self.dist[u] = INF;
                stack.pop();
                continue;
            }
            let b = self.adj[u][cursor[u]];
            cursor[u] += 1;
            match self.mate_b[b] {
                None => {
                    via[u] = b;
                    for &x in &stack {
                        self.mate_a[x] = Some(via[x]);
                        self.mate_b[via[x]] = Some(x);
                    }
                    return true;
                }
                Some(w) if self.dist[w] == self.dist[u].wrapping_add(1) => {
                    via[u] = b;
                    stack.push(w);
                }
                Some(_) => {}
            }
        }
        false
    }

    fn run(mut self) -> Vec<Option<usize>> {
        let n = self.adj.len();
        let mut via = vec![0; n];
        while self.bfs() {
            let mut cursor = vec![0; n];
            for a in 0..n {
                if self.mate_a[a].is_none() {
                    self.augment_from(a, &mut cursor, &mut via);
                }
            }
        }
        self.mate_a
    }
}

/// Maximum-cardinality matching using only edges whose color is in `allowed`.
pub fn max_matching(g: &ColoredBipartiteGraph, allowed: &[Color]) -> Result<Matching, MatchError> {
    let mask = color_mask(g, allowed)?;
    let adj = restricted_adjacency(g, &mask);
    Ok(Matching::from_assignment(HopcroftKarp::new(&adj).run()))
}

/// A-vertices reachable by alternating paths from the unmatched A-vertices of
/// a maximum matching, together with their neighbourhood. Empty when the
/// matching is perfect.
fn hall_witness(adj: &[Vec<usize>], m: &Matching) -> (Vec<usize>, Vec<usize>) {
    let n = adj.len();
    let inv = m.inverse();
    let mut seen_a = vec![false; n];
    let mut seen_b = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&a| m.partner(a).is_none()).collect();
    for &a in &queue {
        seen_a[a] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &b in &adj[u] {
            if seen_b[b] {
                continue;
            }
            seen_b[b] = true;
            let w = inv[b].expect("maximum matching leaves no augmenting path");
            if !seen_a[w] {
                seen_a[w] = true;
                queue.push_back(w);
            }
        }
    }
    (indices_of(&seen_a), indices_of(&seen_b))
}

/// A perfect matching inside color class `color`, or a Hall violator.
pub fn monochromatic_perfect_matching(g: &ColoredBipartiteGraph, color: Color) -> Result<Matching, MatchError> {
    let mask = color_mask(g, &[color])?;
    let adj = restricted_adjacency(g, &mask);
    let m = Matching::from_assignment(HopcroftKarp::new(&adj).run());
    if m.is_perfect() {
        return Ok(m);
    }
    let (witness, neighborhood) = hall_witness(&adj, &m);
    Err(MatchError::NoPerfectMatching(HallViolation {
        color,
        witness,
        neighborhood,
    }))
}

/// Checks edge membership, injectivity and (optionally) totality, reporting
/// the first violation in increasing A-index.
pub fn verify_matching(g: &ColoredBipartiteGraph, m: &Matching, require_perfect: bool) -> Result<(), MatchingViolation> {
    if m.n() != g.n() {
        return Err(MatchingViolation::SizeMismatch {
            expected: g.n(),
            got: m.n(),
        });
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for (a, slot) in m.assignment().iter().enumerate() {
        let Some(b) = *slot else {
            if require_perfect {
                return Err(MatchingViolation::Unmatched { a });
            }
            continue;
        };
        if b >= g.n() {
            return Err(MatchingViolation::IndexOutOfRange { b });
        }
        if g.color_of(a, b).is_none() {
            return Err(MatchingViolation::NotAnEdge { a, b });
        }
        if let Some(first) = owner[b] {
            return Err(MatchingViolation::ReusedB { b, first, second: a });
        }
        owner[b] = Some(a);
    }
    Ok(())
}
