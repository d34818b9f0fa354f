//! Seeded Monte Carlo trials around the threshold and their aggregation.

mod config;
mod emit;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{parse_omega, parse_omega_list, Checks, ConfigError, ExperimentConfig, ProfileSuite};
pub use emit::{emit, emit_summary, rows, summarize_rows, EmitError, OutputFormat, Row, CSV_HEADER};

use crate::audit::isolated_color_vertices;
use crate::graph::{ColorProfile, ColoredBipartiteGraph};
use crate::matcher::monochromatic_perfect_matching;
use crate::oracle::enumerate_mcp;
use crate::sampler::{sample_graph, threshold_p_clamped, SampleError, SampleParams};
use crate::seed::{derive_trial_seed, mix};
use crate::walk::achieve_profile;

/// Stream id for the per-trial random profile draw.
const SUITE_STREAM: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("grid index {grid} / trial {trial} out of range")]
    IndexOutOfRange { grid: usize, trial: usize },
    #[error("{0}")]
    Check(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    pub target: ColorProfile,
    pub corner: bool,
    pub success: bool,
    pub steps: usize,
    pub retries: usize,
    pub ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpCheck {
    pub profiles: Vec<ColorProfile>,
    /// Oracle membership of each suite profile, in suite order.
    pub suite_membership: Vec<(ColorProfile, bool)>,
    /// Walk success matches oracle membership for every suite profile.
    pub walk_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub omega: f64,
    pub p: f64,
    /// The threshold formula went outside `[0, 1]` and was clamped.
    pub p_clamped: bool,
    pub n: usize,
    pub q: usize,
    pub grid_index: usize,
    pub trial_index: usize,
    pub derived_seed: u64,
    /// Per color, whether a monochromatic perfect matching exists.
    pub pm_success: Option<Vec<bool>>,
    pub walks: Vec<WalkOutcome>,
    /// Per color, isolated vertices on each side `(A, B)`.
    pub isolated: Option<Vec<(usize, usize)>>,
    pub mcp: Option<McpCheck>,
    /// Suite profiles the walk reached; stands in for the MCP when it is
    /// not computed exactly.
    pub estimated_full_mcp: Vec<ColorProfile>,
    pub ms: Option<f64>,
}

impl TrialRecord {
    pub fn all_corners(&self) -> bool {
        self.walks.iter().filter(|w| w.corner).all(|w| w.success)
    }

    pub fn all_suite(&self) -> bool {
        self.walks.iter().all(|w| w.success)
    }
}

/// The corners followed by the configured extra profiles. Random profiles
/// are uniform over the simplex (stars and bars) and drawn from `seed`.
pub fn suite_profiles(config: &ExperimentConfig, seed: u64) -> Vec<ColorProfile> {
    let (n, q) = (config.n, config.colors.q());
    let mut out: Vec<ColorProfile> = (1..=q).map(|c| ColorProfile::corner(q, n, c)).collect();
    match &config.profile_suite {
        ProfileSuite::Corners => {}
        ProfileSuite::Explicit(list) => out.extend(list.iter().cloned()),
        ProfileSuite::RandomK(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, SUITE_STREAM));
            for _ in 0..*k {
                let mut bars = index::sample(&mut rng, n + q - 1, q - 1).into_vec();
                bars.sort_unstable();
                let mut counts = Vec::with_capacity(q);
                let mut prev = 0;
                for b in bars {
                    counts.push(b - prev);
                    prev = b + 1;
                }
                counts.push(n + q - 1 - prev);
                out.push(ColorProfile(counts));
            }
        }
    }
    out
}

pub fn run_trial(config: &ExperimentConfig, grid_index: usize, trial_index: usize) -> Result<TrialRecord, ExperimentError> {
    config.validate()?;
    run_validated(config, grid_index, trial_index)
}

fn run_validated(config: &ExperimentConfig, grid_index: usize, trial_index: usize) -> Result<TrialRecord, ExperimentError> {
    let omega = *config
        .omega_grid
        .get(grid_index)
        .filter(|_| trial_index < config.trials)
        .ok_or(ExperimentError::IndexOutOfRange {
            grid: grid_index,
            trial: trial_index,
        })?;
    let started = Instant::now();
    let (p, p_clamped) = threshold_p_clamped(config.n, omega, config.colors.alpha_min())?;
    let seed = derive_trial_seed(config.base_seed, grid_index, trial_index);
    let g = sample_graph(&SampleParams::new(config.n, p, config.colors.clone(), seed)?);
    let q = g.q();
    let checks = config.checks;
    let timed = config.record_timings;

    let pm_success = checks
        .per_color_pm
        .then(|| (1..=q).map(|c| monochromatic_perfect_matching(&g, c).is_ok()).collect());
    let isolated = checks.isolated.then(|| {
        (1..=q)
            .map(|c| {
                let (a, b) = isolated_color_vertices(&g, c).expect("color in range");
                (a.len(), b.len())
            })
            .collect()
    });

    let suite = suite_profiles(config, seed);
    let walks: Vec<WalkOutcome> = if checks.walk {
        suite
            .iter()
            .enumerate()
            .map(|(idx, target)| walk_outcome(&g, target, mix(seed, idx as u64), q, timed))
            .collect()
    } else {
        Vec::new()
    };

    let mcp = if checks.mcp_exact {
        let set = enumerate_mcp(&g).map_err(|e| ExperimentError::Check(e.to_string()))?;
        let walk_agrees = walks.iter().all(|w| w.success == set.contains(&w.target));
        let suite_membership = suite.iter().map(|t| (t.clone(), set.contains(t))).collect();
        Some(McpCheck {
            profiles: set.into_iter().collect(),
            suite_membership,
            walk_agrees,
        })
    } else {
        None
    };
    let estimated_full_mcp = walks.iter().filter(|w| w.success).map(|w| w.target.clone()).collect();

    Ok(TrialRecord {
        omega,
        p,
        p_clamped,
        n: config.n,
        q,
        grid_index,
        trial_index,
        derived_seed: seed,
        pm_success,
        walks,
        isolated,
        mcp,
        estimated_full_mcp,
        ms: timed.then(|| started.elapsed().as_secs_f64() * 1e3),
    })
}

fn walk_outcome(g: &ColoredBipartiteGraph, target: &ColorProfile, seed: u64, q: usize, timed: bool) -> WalkOutcome {
    let started = Instant::now();
    let result = achieve_profile(g, target, seed);
    let ms = timed.then(|| started.elapsed().as_secs_f64() * 1e3);
    let corner = target.get(target.argmax()) == target.total();
    let (success, report) = match &result {
        Ok(s) => (true, Some(&s.report)),
        Err(f) => (false, f.report()),
    };
    debug_assert_eq!(target.q(), q);
    WalkOutcome {
        target: target.clone(),
        corner,
        success,
        steps: report.map_or(0, |r| r.steps_succeeded),
        retries: report.map_or(0, |r| r.total_retries()),
        ms,
    }
}

/// Aggregate for one `(omega, check)` pair over the rows of that grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub grid_index: usize,
    pub omega: f64,
    pub check: String,
    pub count: usize,
    pub successes: usize,
    pub steps_sum: u64,
    pub steps_count: usize,
}

impl SummaryRow {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.count as f64
    }

    pub fn mean_steps(&self) -> Option<f64> {
        (self.steps_count > 0).then(|| self.steps_sum as f64 / self.steps_count as f64)
    }
}

/// Check names whose unit is a whole trial rather than a row.
pub const ALL_CORNERS: &str = "all_corners";
pub const ALL_SUITE: &str = "all_suite";

/// Per grid point: one row per row-level check (`pm`, `walk`, `isolated`,
/// `mcp`) and, when walks ran, the trial-level `all_corners` and
/// `all_suite` fractions. Ordered by grid index, then check name.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut acc: BTreeMap<(usize, String), SummaryRow> = BTreeMap::new();
    let mut add = |r: &TrialRecord, check: &str, success: bool, steps: Option<usize>| {
        let row = acc.entry((r.grid_index, check.to_string())).or_insert_with(|| SummaryRow {
            grid_index: r.grid_index,
            omega: r.omega,
            check: check.to_string(),
            count: 0,
            successes: 0,
            steps_sum: 0,
            steps_count: 0,
        });
        row.count += 1;
        row.successes += success as usize;
        if let Some(s) = steps {
            row.steps_sum += s as u64;
            row.steps_count += 1;
        }
    };
    for r in records {
        for row in emit::record_rows(r) {
            add(r, &row.check, row.success, row.steps);
        }
        if !r.walks.is_empty() {
            add(r, ALL_CORNERS, r.all_corners(), None);
            add(r, ALL_SUITE, r.all_suite(), None);
        }
    }
    acc.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every `(grid, trial)` pair on a pool of `config.workers` threads.
/// Records come back ordered by `(grid_index, trial_index)`.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepResult, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.omega_grid.len())
        .flat_map(|gi| (0..config.trials).map(move |ti| (gi, ti)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|&(gi, ti)| run_validated(config, gi, ti))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let summary = summarize(&records);
    Ok(SweepResult { records, summary })
}
