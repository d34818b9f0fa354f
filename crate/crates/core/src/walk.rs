//! Profile walks: move a perfect matching through the profile simplex one
//! lattice step at a time.
//!
//! A step trades one matching edge of a source color for one edge of a
//! target color by switching along an alternating cycle whose edges all
//! have the source color except a single non-matching edge of the target
//! color.
//!
//! The cycle search is anchored at a matching edge `(a0, b0)` of the source
//! color. Two alternating trees grow from it, one layer at a time each:
//!
//! * forward, over A-vertices: `x -> y` along a non-matching source edge,
//!   then `y -> M^{-1}(y)` along a source-colored matching edge;
//! * backward, over B-vertices: `y <- x` along a non-matching source edge,
//!   then `x -> M(x)` along a source-colored matching edge.
//!
//! A non-matching target-colored edge from the forward tree into the
//! backward tree closes the cycle
//! `a -> b ~> b0 -> a0 ~> a`.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{profile_of, Color, ColorProfile, ColoredBipartiteGraph, GraphError, Matching};
use crate::matcher::{monochromatic_perfect_matching, MatchError};
use crate::seed;

/// Anchors tried per step before giving up.
pub const DEFAULT_ANCHOR_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOptions {
    pub anchor_budget: usize,
    /// Reseeded anchor orders tried per step. Only matters when there are
    /// more source edges than `anchor_budget`.
    pub step_attempts: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            anchor_budget: DEFAULT_ANCHOR_BUDGET,
            step_attempts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleViolation {
    #[error("cycle sequences have lengths {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("cycle is empty")]
    Empty,
    #[error("special index {0} out of range")]
    SpecialIndex(usize),
    #[error("source and target colors are both {0}")]
    SameColors(Color),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("vertex repeated on side {side}: {vertex}")]
    NotSimple { side: char, vertex: usize },
    #[error("({a}, {b}) is not an edge")]
    NotAnEdge { a: usize, b: usize },
    #[error("({a}, {b}) should be a non-matching edge")]
    ExpectedNonMatching { a: usize, b: usize },
    #[error("B-vertex {b} should be matched to A-vertex {a}")]
    ExpectedMatching { a: usize, b: usize },
    #[error("edge ({a}, {b}) has color {found}, expected {expected}")]
    WrongColor { a: usize, b: usize, found: Color, expected: Color },
    #[error("matching is not perfect")]
    NotPerfect,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("no recoloring cycle found after {anchors_tried} anchors")]
    NotFound { anchors_tried: usize },
    #[error("matching has no edge of color {0}")]
    NoSourceEdges(Color),
    #[error("source and target color are both {0}")]
    SameColors(Color),
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: usize },
    #[error("matching is not perfect")]
    NotPerfect,
    #[error("invalid cycle: {0}")]
    InvalidCycle(#[from] CycleViolation),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Cycle `x_1 y_1 x_2 y_2 ... x_l y_l x_1` with `(x_j, y_j)` non-matching
/// and `(y_j, x_{j+1})` matching (indices cyclic). The non-matching edge at
/// `special_index` has `to_color`; every other edge has `from_color`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingCycle {
    pub a_seq: Vec<usize>,
    pub b_seq: Vec<usize>,
    pub special_index: usize,
    pub from_color: Color,
    pub to_color: Color,
}

impl AlternatingCycle {
    /// Number of A-vertices (half the cycle length).
    pub fn len(&self) -> usize {
        self.a_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_seq.is_empty()
    }

    /// The same edge set written as an alternating cycle of `M Δ C`:
    /// `x = (x_1, x_l, ..., x_2)`, `y = (y_l, ..., y_1)`.
    pub fn reversed_sequences(&self) -> (Vec<usize>, Vec<usize>) {
        let l = self.len();
        let xs = (0..l).map(|t| self.a_seq[(l - t) % l]).collect();
        let ys = (0..l).map(|t| self.b_seq[l - 1 - t]).collect();
        (xs, ys)
    }
}

fn check_alternation(g: &ColoredBipartiteGraph, m: &Matching, xs: &[usize], ys: &[usize]) -> Result<(), CycleViolation> {
    if xs.len() != ys.len() {
        return Err(CycleViolation::LengthMismatch { a: xs.len(), b: ys.len() });
    }
    if xs.is_empty() {
        return Err(CycleViolation::Empty);
    }
    if m.n() != g.n() || !m.is_perfect() {
        return Err(CycleViolation::NotPerfect);
    }
    let n = g.n();
    for (side, seq) in [('A', xs), ('B', ys)] {
        let mut seen = vec![false; n];
        for &v in seq {
            if v >= n {
                return Err(CycleViolation::IndexOutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(CycleViolation::NotSimple { side, vertex: v });
            }
        }
    }
    let l = xs.len();
    for j in 0..l {
        let (x, y) = (xs[j], ys[j]);
        if g.color_of(x, y).is_none() {
            return Err(CycleViolation::NotAnEdge { a: x, b: y });
        }
        if m.partner(x) == Some(y) {
            return Err(CycleViolation::ExpectedNonMatching { a: x, b: y });
        }
        let next = xs[(j + 1) % l];
        if m.partner(next) != Some(y) {
            return Err(CycleViolation::ExpectedMatching { a: next, b: y });
        }
    }
    Ok(())
}

/// Checks every [`AlternatingCycle`] invariant against `(g, m)`.
pub fn validate_cycle(g: &ColoredBipartiteGraph, m: &Matching, c: &AlternatingCycle) -> Result<(), CycleViolation> {
    if c.from_color == c.to_color {
        return Err(CycleViolation::SameColors(c.from_color));
    }
    check_alternation(g, m, &c.a_seq, &c.b_seq)?;
    let l = c.len();
    if c.special_index >= l {
        return Err(CycleViolation::SpecialIndex(c.special_index));
    }
    let expect = |a: usize, b: usize, expected: Color| {
        let found = g.color_of(a, b).expect("edge membership checked");
        if found == expected {
            Ok(())
        } else {
            Err(CycleViolation::WrongColor { a, b, found, expected })
        }
    };
    for j in 0..l {
        let (x, y) = (c.a_seq[j], c.b_seq[j]);
        expect(x, y, if j == c.special_index { c.to_color } else { c.from_color })?;
        expect(c.a_seq[(j + 1) % l], y, c.from_color)?;
    }
    Ok(())
}

/// `M Δ E(C)` for any alternating cycle (no color conditions).
pub fn toggle_alternating_cycle(g: &ColoredBipartiteGraph, m: &Matching, xs: &[usize], ys: &[usize]) -> Result<Matching, CycleViolation> {
    check_alternation(g, m, xs, ys)?;
    let mut out = m.clone();
    for (&x, &y) in xs.iter().zip(ys) {
        out.set(x, Some(y));
    }
    Ok(out)
}

/// Switches `m` along a validated recoloring cycle.
pub fn apply_cycle(g: &ColoredBipartiteGraph, m: &Matching, c: &AlternatingCycle) -> Result<Matching, CycleViolation> {
    validate_cycle(g, m, c)?;
    toggle_alternating_cycle(g, m, &c.a_seq, &c.b_seq)
}

struct CycleSearch<'a> {
    g: &'a ColoredBipartiteGraph,
    m: &'a Matching,
    inv: Vec<usize>,
    /// A-vertices whose matching edge has the source color.
    source: Vec<bool>,
    from: Color,
    to: Color,
}

const NONE: usize = usize::MAX;

impl<'a> CycleSearch<'a> {
    fn new(g: &'a ColoredBipartiteGraph, m: &'a Matching, from: Color, to: Color) -> Self {
        let inv = m.inverse().into_iter().map(|a| a.unwrap_or(NONE)).collect();
        let source = (0..g.n())
            .map(|a| m.partner(a).and_then(|b| g.color_of(a, b)) == Some(from))
            .collect();
        CycleSearch {
            g,
            m,
            inv,
            source,
            from,
            to,
        }
    }

    fn mate(&self, a: usize) -> usize {
        self.m.partner(a).expect("perfect matching")
    }

    fn anchors(&self) -> Vec<usize> {
        (0..self.g.n()).filter(|&a| self.source[a]).collect()
    }

    fn try_anchor(&self, a0: usize) -> Option<AlternatingCycle> {
        let n = self.g.n();
        let b0 = self.mate(a0);
        // fparent[x] = (previous A-vertex, B-vertex between them)
        let mut fparent = vec![(NONE, NONE); n];
        // bparent[y] = (A-vertex between, previous B-vertex)
        let mut bparent = vec![(NONE, NONE); n];
        let mut in_f = vec![false; n];
        let mut in_b = vec![false; n];
        in_f[a0] = true;
        in_b[b0] = true;
        let mut f_layer = vec![a0];
        let mut b_layer = vec![b0];

        while !f_layer.is_empty() || !b_layer.is_empty() {
            let mut next = Vec::new();
            for &x in &f_layer {
                for &y in self.g.a_neighbors(x, self.from) {
                    let x2 = self.inv[y];
                    if x2 == x || !self.source[x2] || in_f[x2] {
                        continue;
                    }
                    in_f[x2] = true;
                    fparent[x2] = (x, y);
                    next.push(x2);
                    for &b in self.g.a_neighbors(x2, self.to) {
                        if in_b[b] {
                            if let Some(c) = self.splice(x2, b, &fparent, &bparent) {
                                return Some(c);
                            }
                        }
                    }
                }
            }
            f_layer = next;

            let mut next = Vec::new();
            for &y in &b_layer {
                for &x in self.g.b_neighbors(y, self.from) {
                    if self.inv[y] == x || !self.source[x] {
                        continue;
                    }
                    let y2 = self.mate(x);
                    if in_b[y2] {
                        continue;
                    }
                    in_b[y2] = true;
                    bparent[y2] = (x, y);
                    next.push(y2);
                    for &a in self.g.b_neighbors(y2, self.to) {
                        if in_f[a] {
                            if let Some(c) = self.splice(a, y2, &fparent, &bparent) {
                                return Some(c);
                            }
                        }
                    }
                }
            }
            b_layer = next;
        }
        None
    }

    /// Joins the tree paths through the crossing edge `(a, b)`; `None` when
    /// the two paths share a vertex.
    fn splice(&self, a: usize, b: usize, fparent: &[(usize, usize)], bparent: &[(usize, usize)]) -> Option<AlternatingCycle> {
        // Backward path b = w_s, ..., w_0 = b0 with z_t matched to w_t.
        let mut xs = vec![a];
        let mut ys = vec![b];
        let mut w = b;
        while bparent[w].0 != NONE {
            let (z, prev) = bparent[w];
            xs.push(z);
            ys.push(prev);
            w = prev;
        }
        // Forward path a0 = u_0, ..., u_r = a, collected from a backwards.
        let mut fx = Vec::new();
        let mut fy = Vec::new();
        let mut u = a;
        while fparent[u].0 != NONE {
            let (prev, v) = fparent[u];
            fx.push(prev);
            fy.push(v);
            u = prev;
        }
        xs.extend(fx.into_iter().rev());
        ys.extend(fy.into_iter().rev());

        let mut seen = vec![false; self.g.n()];
        if xs.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
            return None;
        }
        Some(AlternatingCycle {
            a_seq: xs,
            b_seq: ys,
            special_index: 0,
            from_color: self.from,
            to_color: self.to,
        })
    }
}

fn check_step_input(g: &ColoredBipartiteGraph, m: &Matching, from: Color, to: Color) -> Result<(), WalkError> {
    for color in [from, to] {
        if color == 0 || color > g.q() {
            return Err(WalkError::ColorOutOfRange { color, q: g.q() });
        }
    }
    if from == to {
        return Err(WalkError::SameColors(from));
    }
    if m.n() != g.n() || !m.is_perfect() {
        return Err(WalkError::NotPerfect);
    }
    profile_of(g, m)?;
    Ok(())
}

/// A cycle together with the number of anchors examined to find it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFound {
    pub cycle: AlternatingCycle,
    pub anchors_tried: usize,
}

pub fn find_recoloring_cycle(
    g: &ColoredBipartiteGraph,
    m: &Matching,
    from: Color,
    to: Color,
    rng_seed: u64,
) -> Result<AlternatingCycle, WalkError> {
    find_recoloring_cycle_with(g, m, from, to, rng_seed, DEFAULT_ANCHOR_BUDGET).map(|f| f.cycle)
}

/// Tries up to `anchor_budget` source-colored matching edges, in an order
/// shuffled by `rng_seed`.
pub fn find_recoloring_cycle_with(
    g: &ColoredBipartiteGraph,
    m: &Matching,
    from: Color,
    to: Color,
    rng_seed: u64,
    anchor_budget: usize,
) -> Result<CycleFound, WalkError> {
    check_step_input(g, m, from, to)?;
    let search = CycleSearch::new(g, m, from, to);
    let mut anchors = search.anchors();
    if anchors.is_empty() {
        return Err(WalkError::NoSourceEdges(from));
    }
    anchors.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    anchors.truncate(anchor_budget.max(1));
    for (i, &a0) in anchors.iter().enumerate() {
        if let Some(cycle) = search.try_anchor(a0) {
            validate_cycle(g, m, &cycle)?;
            return Ok(CycleFound {
                cycle,
                anchors_tried: i + 1,
            });
        }
    }
    Err(WalkError::NotFound {
        anchors_tried: anchors.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub matching: Matching,
    pub cycle: AlternatingCycle,
    pub anchors_tried: usize,
}

pub fn recolor_step(g: &ColoredBipartiteGraph, m: &Matching, from: Color, to: Color, seed: u64) -> Result<StepOutcome, WalkError> {
    recolor_step_with(g, m, from, to, seed, &WalkOptions::default())
}

/// One profile step `from -> to`, reseeding the anchor order up to
/// `options.step_attempts` times.
pub fn recolor_step_with(
    g: &ColoredBipartiteGraph,
    m: &Matching,
    from: Color,
    to: Color,
    seed: u64,
    options: &WalkOptions,
) -> Result<StepOutcome, WalkError> {
    let mut anchors_tried = 0;
    let attempts = options.step_attempts.max(1);
    for attempt in 0..attempts {
        let attempt_seed = seed::mix(seed, attempt as u64);
        match find_recoloring_cycle_with(g, m, from, to, attempt_seed, options.anchor_budget) {
            Ok(found) => {
                anchors_tried += found.anchors_tried;
                let matching = apply_cycle(g, m, &found.cycle)?;
                debug_assert!(conserves_profile(g, m, &matching, from, to));
                return Ok(StepOutcome {
                    matching,
                    cycle: found.cycle,
                    anchors_tried,
                });
            }
            Err(WalkError::NotFound { anchors_tried: t }) => {
                anchors_tried += t;
                // A full pass over every anchor cannot improve on reseeding.
                let total = CycleSearch::new(g, m, from, to).anchors().len();
                if total <= options.anchor_budget {
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(WalkError::NotFound { anchors_tried })
}

fn conserves_profile(g: &ColoredBipartiteGraph, before: &Matching, after: &Matching, from: Color, to: Color) -> bool {
    let (Ok(p0), Ok(p1)) = (profile_of(g, before), profile_of(g, after)) else {
        return false;
    };
    after.is_perfect()
        && (1..=g.q()).all(|c| {
            let expected = match c {
                c if c == from => p0.get(c).checked_sub(1),
                c if c == to => Some(p0.get(c) + 1),
                c => Some(p0.get(c)),
            };
            expected == Some(p1.get(c))
        })
}

/// Per-walk statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub steps_attempted: usize,
    pub steps_succeeded: usize,
    pub cycle_lengths: Vec<usize>,
    /// Anchors tried beyond the first, per step.
    pub retries: Vec<usize>,
    pub ms_per_step: Vec<f64>,
}

impl WalkReport {
    pub fn total_retries(&self) -> usize {
        self.retries.iter().sum()
    }

    /// One-line JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSuccess {
    pub matching: Matching,
    pub report: WalkReport,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkFailure {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("no monochromatic perfect matching in color {color}")]
    NoMonochromaticStart { color: Color, report: WalkReport },
    #[error("step towards color {color} exhausted at profile {reached}")]
    StepExhausted {
        color: Color,
        reached: ColorProfile,
        matching: Matching,
        report: WalkReport,
    },
}

impl WalkFailure {
    pub fn report(&self) -> Option<&WalkReport> {
        match self {
            WalkFailure::InvalidTarget(_) => None,
            WalkFailure::NoMonochromaticStart { report, .. } | WalkFailure::StepExhausted { report, .. } => Some(report),
        }
    }
}

#[allow(clippy::result_large_err)]
pub fn achieve_profile(g: &ColoredBipartiteGraph, target: &ColorProfile, seed: u64) -> Result<WalkSuccess, WalkFailure> {
    achieve_profile_with(g, target, seed, &WalkOptions::default())
}

/// Starts from a perfect matching in the target's largest color `i*` and
/// performs `target[j]` steps `i* -> j` for each other color `j` in
/// increasing order.
#[allow(clippy::result_large_err)]
pub fn achieve_profile_with(
    g: &ColoredBipartiteGraph,
    target: &ColorProfile,
    seed: u64,
    options: &WalkOptions,
) -> Result<WalkSuccess, WalkFailure> {
    if target.q() != g.q() {
        return Err(WalkFailure::InvalidTarget(format!(
            "{} coordinates for {} colors",
            target.q(),
            g.q()
        )));
    }
    if target.total() != g.n() {
        return Err(WalkFailure::InvalidTarget(format!(
            "profile sums to {}, expected {}",
            target.total(),
            g.n()
        )));
    }
    let main = target.argmax();
    let mut report = WalkReport::default();
    let mut m = match monochromatic_perfect_matching(g, main) {
        Ok(m) => m,
        Err(MatchError::NoPerfectMatching(_)) => return Err(WalkFailure::NoMonochromaticStart { color: main, report }),
        Err(e) => return Err(WalkFailure::InvalidTarget(e.to_string())),
    };
    let mut step_index = 0u64;
    for color in (1..=g.q()).filter(|&c| c != main) {
        for _ in 0..target.get(color) {
            let started = Instant::now();
            report.steps_attempted += 1;
            let outcome = recolor_step_with(g, &m, main, color, seed::mix(seed, step_index), options);
            step_index += 1;
            report.ms_per_step.push(started.elapsed().as_secs_f64() * 1e3);
            match outcome {
                Ok(step) => {
                    report.steps_succeeded += 1;
                    report.cycle_lengths.push(2 * step.cycle.len());
                    report.retries.push(step.anchors_tried.saturating_sub(1));
                    m = step.matching;
                }
                Err(e) => {
                    let tried = match e {
                        WalkError::NotFound { anchors_tried } => anchors_tried,
                        _ => 0,
                    };
                    report.retries.push(tried.saturating_sub(1));
                    let reached = profile_of(g, &m).expect("walk keeps a valid matching");
                    return Err(WalkFailure::StepExhausted {
                        color,
                        reached,
                        matching: m,
                        report,
                    });
                }
            }
        }
    }
    Ok(WalkSuccess { matching: m, report })
}
