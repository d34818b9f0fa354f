//! Exact perfect-matching color profile sets for small graphs.
//!
//! [`enumerate_mcp`] runs a dynamic program over subsets of `B`: the state
//! after placing A-vertices `0..k` is the mask of used B-vertices (with
//! `popcount(mask) == k`) together with the set of partial profiles that
//! reach it. Partial profiles are keyed by their first `q - 1` coordinates
//! packed in base `n + 1`, most significant first, so numeric order on keys
//! is lexicographic order on tuples. The last coordinate is implied by `k`.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{ColorProfile, ColoredBipartiteGraph};

pub const DEFAULT_DP_LIMIT: usize = 20;
pub const NAIVE_LIMIT: usize = 9;
pub const MAX_COLORS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large: n = {n}, q = {q} (limits n <= {n_limit}, q <= {MAX_COLORS})")]
    InstanceTooLarge { n: usize, q: usize, n_limit: usize },
    #[error("profile sums to {sum}, expected {n}")]
    BadProfileSum { sum: usize, n: usize },
    #[error("profile has {got} coordinates, graph has {q} colors")]
    BadProfileLength { got: usize, q: usize },
}

pub type ProfileSet = BTreeSet<ColorProfile>;

fn check_size(g: &ColoredBipartiteGraph, n_limit: usize) -> Result<(), OracleError> {
    // Masks are machine words; 2^30 states is far past any desk-scale run.
    if g.n() > n_limit.min(30) || g.q() > MAX_COLORS {
        return Err(OracleError::InstanceTooLarge {
            n: g.n(),
            q: g.q(),
            n_limit,
        });
    }
    Ok(())
}

struct KeyCodec {
    n: usize,
    q: usize,
    /// `weights[c - 1]` is the key increment for one more edge of color `c`.
    weights: Vec<u64>,
}

impl KeyCodec {
    fn new(n: usize, q: usize) -> Self {
        let base = n as u64 + 1;
        let weights = (0..q).map(|i| if i + 1 == q { 0 } else { base.pow((q - 2 - i) as u32) }).collect();
        KeyCodec { n, q, weights }
    }

    fn encode(&self, counts: &[usize]) -> u64 {
        counts[..self.q - 1].iter().fold(0, |acc, &c| acc * (self.n as u64 + 1) + c as u64)
    }

    fn decode(&self, mut key: u64, total: usize) -> ColorProfile {
        let base = self.n as u64 + 1;
        let mut counts = vec![0; self.q];
        for i in (0..self.q - 1).rev() {
            counts[i] = (key % base) as usize;
            key /= base;
        }
        counts[self.q - 1] = total - counts[..self.q - 1].iter().sum::<usize>();
        ColorProfile(counts)
    }
}

/// Shared DP. `cap`, when set, bounds every coordinate (target pruning).
fn profile_dp(g: &ColoredBipartiteGraph, cap: Option<&ColorProfile>) -> Vec<u64> {
    let n = g.n();
    let codec = KeyCodec::new(n, g.q());
    if n == 0 {
        return vec![0];
    }
    let full = (1usize << n) - 1;
    let mut states: Vec<Vec<u64>> = vec![Vec::new(); 1 << n];
    states[0].push(0);
    let mut layer: Vec<usize> = vec![0];

    for a in 0..n {
        let mut next_layer = Vec::new();
        for &mask in &layer {
            let keys = std::mem::take(&mut states[mask]);
            for &(b, color) in g.adjacent(a) {
                if mask >> b & 1 == 1 {
                    continue;
                }
                let target = mask | 1 << b;
                let w = codec.weights[color - 1];
                let dest = &mut states[target];
                let was_empty = dest.is_empty();
                for &key in &keys {
                    let key = key + w;
                    if let Some(cap) = cap {
                        let profile = codec.decode(key, a + 1);
                        if profile.0.iter().zip(&cap.0).any(|(x, c)| x > c) {
                            continue;
                        }
                    }
                    dest.push(key);
                }
                if was_empty && !dest.is_empty() {
                    next_layer.push(target);
                }
            }
        }
        for &mask in &next_layer {
            let keys = &mut states[mask];
            keys.sort_unstable();
            keys.dedup();
        }
        next_layer.sort_unstable();
        layer = next_layer;
    }
    std::mem::take(&mut states[full])
}

/// `MCP(G)` with the default size limit.
pub fn enumerate_mcp(g: &ColoredBipartiteGraph) -> Result<ProfileSet, OracleError> {
    enumerate_mcp_with_limit(g, DEFAULT_DP_LIMIT)
}

pub fn enumerate_mcp_with_limit(g: &ColoredBipartiteGraph, n_limit: usize) -> Result<ProfileSet, OracleError> {
    check_size(g, n_limit)?;
    let codec = KeyCodec::new(g.n(), g.q());
    Ok(profile_dp(g, None).into_iter().map(|k| codec.decode(k, g.n())).collect())
}

/// `MCP(G)` by trying all `n!` bijections `A -> B`.
pub fn enumerate_mcp_naive(g: &ColoredBipartiteGraph) -> Result<ProfileSet, OracleError> {
    let n = g.n();
    if n > NAIVE_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            n,
            q: g.q(),
            n_limit: NAIVE_LIMIT,
        });
    }
    let mut out = ProfileSet::new();
    'perm: for perm in (0..n).permutations(n) {
        let mut counts = vec![0; g.q()];
        for (a, &b) in perm.iter().enumerate() {
            match g.color_of(a, b) {
                Some(c) => counts[c - 1] += 1,
                None => continue 'perm,
            }
        }
        out.insert(ColorProfile(counts));
    }
    Ok(out)
}

/// Whether some perfect matching has exactly this profile.
pub fn has_profile(g: &ColoredBipartiteGraph, target: &ColorProfile) -> Result<bool, OracleError> {
    has_profile_with_limit(g, target, DEFAULT_DP_LIMIT)
}

pub fn has_profile_with_limit(g: &ColoredBipartiteGraph, target: &ColorProfile, n_limit: usize) -> Result<bool, OracleError> {
    check_size(g, n_limit)?;
    if target.q() != g.q() {
        return Err(OracleError::BadProfileLength { got: target.q(), q: g.q() });
    }
    if target.total() != g.n() {
        return Err(OracleError::BadProfileSum {
            sum: target.total(),
            n: g.n(),
        });
    }
    let codec = KeyCodec::new(g.n(), g.q());
    Ok(profile_dp(g, Some(target)).contains(&codec.encode(&target.0)))
}
