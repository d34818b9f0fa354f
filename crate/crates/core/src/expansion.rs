//! Diagnostic reconstruction of the restricted expansion argument.
//!
//! For a perfect matching `M` and a color `i`, let `A_1` be the A-endpoints
//! of color-`i` matching edges and `B_1 = M(A_1)`. On the A side:
//!
//! * `D_0'`: vertices of `A_1` with at least `deg_threshold` color-`i`
//!   neighbours in `B_1`;
//! * `D_0`: vertices of `A_1` with at most `k0` color-`i` neighbours in
//!   `M(A_1 \ D_0')`;
//! * `W_0 = A_1 \ (D_0 ∩ D_0')`, grown greedily by adding the lowest-index
//!   vertex of `A_1` with at least `k0` neighbours in `M(W_j)` until none is
//!   left; the result is `W_τ`;
//! * `R_0 = A_1 \ W_τ`;
//! * layers `X_0 = {a0}`, `Y_j = N_i(X_j)`,
//!   `X_{j+1} = (M^{-1}(Y_j) \ ∪ X) ∩ R_0`.
//!
//! The B side is the mirror image, anchored at `b0 = M(a0)`. The solver does
//! not use any of this; it searches the whole alternating structure.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::AsymptoticConstants;
use crate::graph::{indices_of, Color, ColoredBipartiteGraph, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("matching is not perfect")]
    NotPerfect,
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: usize },
    #[error("anchor {0} is not matched by an edge of the traced color")]
    AnchorNotInClass(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub layer: usize,
    pub size: usize,
    pub next_size: usize,
    /// Whether `size` is within the bound under which growth is required.
    pub applies: bool,
    pub met: bool,
}

/// Sets and layer sizes for one side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SideTrace {
    pub class: Vec<usize>,
    pub d0_prime: Vec<usize>,
    pub d0: Vec<usize>,
    pub w0: Vec<usize>,
    /// `|A_1 \ (D_0 ∪ D_0')|`, the set as literally written.
    pub w0_literal_size: usize,
    pub w_final: Vec<usize>,
    pub tau: usize,
    pub r0: Vec<usize>,
    pub anchor: Option<usize>,
    pub anchor_in_r0: bool,
    /// False when the anchor is outside `R_0` and the layers were grown
    /// inside the whole class instead.
    pub restricted: bool,
    pub layer_sizes: Vec<usize>,
    pub neighborhood_sizes: Vec<usize>,
    pub cumulative_sizes: Vec<usize>,
    pub growth_checks: Vec<GrowthCheck>,
    pub stop_layer: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTrace {
    pub color: Color,
    pub forward: SideTrace,
    pub backward: SideTrace,
    /// `|R_0| / |A_1|`, or `None` for an empty class.
    pub r0_fraction: Option<f64>,
    pub r0_fraction_bound: f64,
    /// `min_{a ∈ R_0} |N_i(a) ∩ M(R_0)|`.
    pub r0_min_degree: Option<usize>,
    pub r0_degree_bound: f64,
    /// The same minimum with `N_j` for every other color `j`.
    pub r0_min_degree_other: Vec<(Color, Option<usize>)>,
}

/// One side of the bipartition seen through the matching: `nbrs(v)` lists
/// color-`i` neighbours on the other side, `back(u)` maps an other-side vertex
/// to its partner here, `rev(u)` lists this-side neighbours of `u`.
struct Side<'a> {
    n: usize,
    class: Vec<bool>,
    nbrs: Box<dyn Fn(usize) -> &'a [usize] + 'a>,
    rev: Box<dyn Fn(usize) -> &'a [usize] + 'a>,
    back: Vec<usize>,
    mate: Vec<usize>,
}

impl Side<'_> {
    fn count_into(&self, v: usize, target: &[bool]) -> usize {
        (self.nbrs)(v).iter().filter(|&&u| target[self.back[u]]).count()
    }

    fn trace(&self, consts: &AsymptoticConstants, anchor: Option<usize>) -> SideTrace {
        let n = self.n;
        let class = &self.class;
        let d0_prime: Vec<bool> = (0..n)
            .map(|v| class[v] && self.count_into(v, class) as f64 >= consts.deg_threshold)
            .collect();
        let outside_d0p: Vec<bool> = (0..n).map(|v| class[v] && !d0_prime[v]).collect();
        let d0: Vec<bool> = (0..n)
            .map(|v| class[v] && self.count_into(v, &outside_d0p) as f64 <= consts.k0)
            .collect();
        let mut w: Vec<bool> = (0..n).map(|v| class[v] && !(d0[v] && d0_prime[v])).collect();
        let w0 = indices_of(&w);
        let w0_literal_size = (0..n).filter(|&v| class[v] && !d0[v] && !d0_prime[v]).count();

        // Greedy closure: counts[v] = |N(v) ∩ M(W)|.
        let mut counts: Vec<usize> = (0..n).map(|v| if class[v] { self.count_into(v, &w) } else { 0 }).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..n)
            .filter(|&v| class[v] && !w[v] && counts[v] as f64 >= consts.k0)
            .map(Reverse)
            .collect();
        let mut tau = 0;
        while let Some(Reverse(v)) = heap.pop() {
            if w[v] {
                continue;
            }
            w[v] = true;
            tau += 1;
            for &u in (self.rev)(self.mate[v]) {
                if class[u] && !w[u] {
                    counts[u] += 1;
                    if counts[u] as f64 >= consts.k0 {
                        heap.push(Reverse(u));
                    }
                }
            }
        }
        let r0: Vec<bool> = (0..n).map(|v| class[v] && !w[v]).collect();

        let mut out = SideTrace {
            class: indices_of(class),
            d0_prime: indices_of(&d0_prime),
            d0: indices_of(&d0),
            w0,
            w0_literal_size,
            w_final: indices_of(&w),
            tau,
            r0: indices_of(&r0),
            ..SideTrace::default()
        };
        let Some(a0) = anchor else { return out };
        out.anchor = Some(a0);
        out.anchor_in_r0 = r0[a0];
        out.restricted = r0[a0];
        let allowed = if r0[a0] { &r0 } else { class };

        let mut seen = vec![false; n];
        seen[a0] = true;
        let mut layer = vec![a0];
        let mut cumulative = 1;
        loop {
            let j = out.layer_sizes.len();
            out.layer_sizes.push(layer.len());
            out.cumulative_sizes.push(cumulative);
            if layer.len() as f64 >= consts.stop_size {
                out.stop_layer = Some(j);
                break;
            }
            let mut hit = vec![false; n];
            for &v in &layer {
                for &u in (self.nbrs)(v) {
                    hit[u] = true;
                }
            }
            let ys = indices_of(&hit);
            out.neighborhood_sizes.push(ys.len());
            let mut next = Vec::new();
            for u in ys {
                let v = self.back[u];
                if allowed[v] && !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
            next.sort_unstable();
            let applies = layer.len() as f64 <= consts.lm_size_bound;
            out.growth_checks.push(GrowthCheck {
                layer: j,
                size: layer.len(),
                next_size: next.len(),
                applies,
                met: next.len() as f64 >= consts.expansion_factor * layer.len() as f64,
            });
            if next.is_empty() {
                break;
            }
            cumulative += next.len();
            layer = next;
        }
        out
    }
}

/// Rebuilds the restricted expansion sets for `color`. Without an anchor the
/// lowest-index vertex of `R_0` is used (falling back to the class).
pub fn expansion_trace(
    g: &ColoredBipartiteGraph,
    m: &Matching,
    color: Color,
    consts: &AsymptoticConstants,
    anchor: Option<usize>,
) -> Result<ExpansionTrace, TraceError> {
    if color == 0 || color > g.q() {
        return Err(TraceError::ColorOutOfRange { color, q: g.q() });
    }
    if m.n() != g.n() || !m.is_perfect() {
        return Err(TraceError::NotPerfect);
    }
    let n = g.n();
    let mate: Vec<usize> = m.assignment().iter().map(|b| b.unwrap()).collect();
    let inv: Vec<usize> = m
        .inverse()
        .into_iter()
        .map(|a| a.expect("perfect matching is a bijection"))
        .collect();
    let a_class: Vec<bool> = (0..n).map(|a| g.color_of(a, mate[a]) == Some(color)).collect();
    let b_class: Vec<bool> = (0..n).map(|b| a_class[inv[b]]).collect();
    if let Some(a0) = anchor {
        if a0 >= n || !a_class[a0] {
            return Err(TraceError::AnchorNotInClass(a0));
        }
    }

    let forward_side = Side {
        n,
        class: a_class.clone(),
        nbrs: Box::new(move |a| g.a_neighbors(a, color)),
        rev: Box::new(move |b| g.b_neighbors(b, color)),
        back: inv.clone(),
        mate: mate.clone(),
    };
    let provisional = forward_side.trace(consts, None);
    let a0 = anchor
        .or_else(|| provisional.r0.first().copied())
        .or_else(|| provisional.class.first().copied());
    let forward = forward_side.trace(consts, a0);

    let backward_side = Side {
        n,
        class: b_class,
        nbrs: Box::new(move |b| g.b_neighbors(b, color)),
        rev: Box::new(move |a| g.a_neighbors(a, color)),
        back: mate.clone(),
        mate: inv.clone(),
    };
    let backward = backward_side.trace(consts, a0.map(|a| mate[a]));

    let mut in_r0 = vec![false; n];
    for &a in &forward.r0 {
        in_r0[a] = true;
    }
    let min_degree = |c: Color| {
        forward
            .r0
            .iter()
            .map(|&a| g.a_neighbors(a, c).iter().filter(|&&b| in_r0[inv[b]]).count())
            .min()
    };
    let r0_fraction = (!forward.class.is_empty()).then(|| forward.r0.len() as f64 / forward.class.len() as f64);

    Ok(ExpansionTrace {
        color,
        r0_fraction,
        r0_fraction_bound: consts.r0_fraction_bound(),
        r0_min_degree: min_degree(color),
        r0_degree_bound: consts.r0_degree_bound(),
        r0_min_degree_other: (1..=g.q()).filter(|&c| c != color).map(|c| (c, min_degree(c))).collect(),
        forward,
        backward,
    })
}
