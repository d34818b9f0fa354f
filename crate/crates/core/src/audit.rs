//! Exhaustive witness searches for the structural events of random colored
//! bipartite graphs, and the isolated-vertex obstruction to monochromatic
//! perfect matchings.
//!
//! Every search enumerates vertex subsets of a fixed size in lexicographic
//! order and returns the lexicographically least witness, compared as the
//! tuple of sorted index lists in the order the fields are declared. Subsets
//! are `u32` bitmasks, which caps exhaustive mode at [`EXHAUSTIVE_LIMIT`].

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, ColoredBipartiteGraph};

pub use crate::constants::{default_constants, AsymptoticConstants};

pub const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("instance too large for exhaustive search: n = {n} > {EXHAUSTIVE_LIMIT}")]
    InstanceTooLarge { n: usize },
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

/// `X ⊆ S ⊆ A`, `T ⊆ B`, every `x ∈ X` with fewer than the cut of
/// color-`i` neighbours in `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDegreeWitness {
    pub x: Vec<usize>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// `X ⊆ A`, `Y ⊆ B`, every `x ∈ X` with at least `k` color-`i` neighbours in `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcentratedWitness {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    Exhaustive,
    /// Greedy; a `None` result proves nothing.
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptyCutWitness {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// False when produced by the heuristic search.
    pub complete: bool,
}

fn check_color(g: &ColoredBipartiteGraph, color: Color) -> Result<(), AuditError> {
    if color == 0 || color > g.q() {
        Err(AuditError::ColorOutOfRange { color, q: g.q() })
    } else {
        Ok(())
    }
}

fn check_exhaustive(g: &ColoredBipartiteGraph, color: Color) -> Result<(), AuditError> {
    check_color(g, color)?;
    if g.n() > EXHAUSTIVE_LIMIT {
        return Err(AuditError::InstanceTooLarge { n: g.n() });
    }
    Ok(())
}

fn bits(set: &[usize]) -> u32 {
    set.iter().fold(0, |m, &v| m | 1 << v)
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Size-`k` subsets of `0..n` as bitmasks, in lexicographic order of their
/// sorted index lists.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0..n).combinations(k).map(|c| bits(&c))
}

/// Color-`color` neighbourhoods of every A-vertex as B-bitmasks.
fn a_masks(g: &ColoredBipartiteGraph, color: Color) -> Vec<u32> {
    (0..g.n()).map(|a| bits(g.a_neighbors(a, color))).collect()
}

/// Vertices with zero color-`color` degree on each side. A nonempty side
/// rules out a color-`color` perfect matching.
pub fn isolated_color_vertices(g: &ColoredBipartiteGraph, color: Color) -> Result<(Vec<usize>, Vec<usize>), AuditError> {
    check_color(g, color)?;
    let a = (0..g.n()).filter(|&v| g.color_degree_a(v, color) == 0).collect();
    let b = (0..g.n()).filter(|&v| g.color_degree_b(v, color) == 0).collect();
    Ok((a, b))
}

/// `|S| >= s_size`, `|T| >= t_size`, `|X| = x_size` with every `x ∈ X`
/// having fewer than `deg_cut` color-`color` neighbours in `T`.
///
/// The degree condition is per vertex and only weakens as `T` shrinks, so
/// it suffices to enumerate `T` of size exactly `t_size`, take `X` as the
/// lowest qualifying vertices and `S = A`.
pub fn lemma1_witness(
    g: &ColoredBipartiteGraph,
    color: Color,
    s_size: usize,
    t_size: usize,
    x_size: usize,
    deg_cut: f64,
) -> Result<Option<LowDegreeWitness>, AuditError> {
    check_exhaustive(g, color)?;
    let n = g.n();
    if s_size > n || t_size > n || x_size > n {
        return Ok(None);
    }
    let nbrs = a_masks(g, color);
    let mut best: Option<(Vec<usize>, u32)> = None;
    for t in subsets(n, t_size) {
        let x: Vec<usize> = (0..n)
            .filter(|&a| ((nbrs[a] & t).count_ones() as f64) < deg_cut)
            .take(x_size)
            .collect();
        if x.len() == x_size && best.as_ref().is_none_or(|(bx, _)| x < *bx) {
            best = Some((x, t));
        }
    }
    Ok(best.map(|(x, t)| LowDegreeWitness {
        x,
        s: (0..n).collect(),
        t: members(t),
    }))
}

/// `|X| = x_size`, `|Y| = y_size`, every `x ∈ X` with at least `k`
/// color-`color` neighbours in `Y`.
pub fn lemma2_witness(
    g: &ColoredBipartiteGraph,
    color: Color,
    x_size: usize,
    y_size: usize,
    k: f64,
) -> Result<Option<ConcentratedWitness>, AuditError> {
    check_exhaustive(g, color)?;
    let n = g.n();
    if x_size > n || y_size > n {
        return Ok(None);
    }
    let nbrs = a_masks(g, color);
    let mut best: Option<(Vec<usize>, u32)> = None;
    for y in subsets(n, y_size) {
        let x: Vec<usize> = (0..n).filter(|&a| (nbrs[a] & y).count_ones() as f64 >= k).take(x_size).collect();
        if x.len() == x_size && best.as_ref().is_none_or(|(bx, _)| x < *bx) {
            best = Some((x, y));
        }
    }
    Ok(best.map(|(x, y)| ConcentratedWitness { x, y: members(y) }))
}

/// `|S| = s_size`, `|T| = t_size` with `e_i(S, T) >= min_edges`.
pub fn dense_cut_witness(
    g: &ColoredBipartiteGraph,
    color: Color,
    s_size: usize,
    t_size: usize,
    min_edges: f64,
) -> Result<Option<CutWitness>, AuditError> {
    check_exhaustive(g, color)?;
    let n = g.n();
    if s_size > n || t_size > n {
        return Ok(None);
    }
    let nbrs = a_masks(g, color);
    for s in (0..n).combinations(s_size) {
        let rows: Vec<u32> = s.iter().map(|&a| nbrs[a]).collect();
        // No T can beat the total degree of S.
        if (rows.iter().map(|r| r.count_ones()).sum::<u32>() as f64) < min_edges {
            continue;
        }
        for t in subsets(n, t_size) {
            let e: u32 = rows.iter().map(|r| (r & t).count_ones()).sum();
            if e as f64 >= min_edges {
                return Ok(Some(CutWitness { s, t: members(t) }));
            }
        }
    }
    Ok(None)
}

/// `|S| >= s_size`, `|T| >= t_size` with no color-`color` edge between them.
///
/// Exhaustive mode returns the least `S` of size `s_size` together with the
/// least `t_size` vertices outside `N_i(S)`. Heuristic mode grows `S` one
/// vertex at a time, always taking the vertex that enlarges `N_i(S)` least.
pub fn empty_cut_witness(
    g: &ColoredBipartiteGraph,
    color: Color,
    s_size: usize,
    t_size: usize,
    mode: SearchMode,
) -> Result<Option<EmptyCutWitness>, AuditError> {
    match mode {
        SearchMode::Exhaustive => check_exhaustive(g, color)?,
        SearchMode::Heuristic => check_color(g, color)?,
    }
    let n = g.n();
    if s_size > n || t_size > n {
        return Ok(None);
    }
    let outside = |s: &[usize]| -> Vec<usize> {
        let mut hit = vec![false; n];
        for &a in s {
            for &b in g.a_neighbors(a, color) {
                hit[b] = true;
            }
        }
        (0..n).filter(|&b| !hit[b]).take(t_size).collect()
    };
    match mode {
        SearchMode::Exhaustive => {
            let nbrs = a_masks(g, color);
            let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
            for s in (0..n).combinations(s_size) {
                let covered = s.iter().fold(0u32, |m, &a| m | nbrs[a]);
                if ((full & !covered).count_ones() as usize) >= t_size {
                    let t = outside(&s);
                    return Ok(Some(EmptyCutWitness { s, t, complete: true }));
                }
            }
            Ok(None)
        }
        SearchMode::Heuristic => {
            let mut covered = vec![false; n];
            let mut in_s = vec![false; n];
            let mut s = Vec::with_capacity(s_size);
            for _ in 0..s_size {
                let pick = (0..n)
                    .filter(|&a| !in_s[a])
                    .min_by_key(|&a| g.a_neighbors(a, color).iter().filter(|&&b| !covered[b]).count())
                    .expect("s_size <= n");
                in_s[pick] = true;
                s.push(pick);
                for &b in g.a_neighbors(pick, color) {
                    covered[b] = true;
                }
            }
            s.sort_unstable();
            let t = outside(&s);
            Ok((t.len() == t_size).then_some(EmptyCutWitness { s, t, complete: false }))
        }
    }
}
