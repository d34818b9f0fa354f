use mcplab::audit::{empty_cut_witness, SearchMode};
use mcplab::experiment::{run_trial, ExperimentConfig, ProfileSuite};
use mcplab::{
    enumerate_mcp, has_profile, isolated_color_vertices, parse_graph, sample_graph, serialize_graph, ColorProfile, ColorSpec, SampleParams,
};

#[test]
fn isolated_vertex_excludes_its_corner() {
    let mut excluded = 0;
    for seed in 0..400u64 {
        let n = 2 + (seed % 7) as usize;
        let q = 1 + (seed % 3) as usize;
        let p = [0.2, 0.5, 0.8][(seed / 7 % 3) as usize];
        let g = sample_graph(&SampleParams::new(n, p, ColorSpec::uniform(q).unwrap(), seed).unwrap());
        for c in 1..=q {
            let (a, b) = isolated_color_vertices(&g, c).unwrap();
            if !a.is_empty() || !b.is_empty() {
                excluded += 1;
                assert!(!has_profile(&g, &ColorProfile::corner(q, n, c)).unwrap(), "seed {seed} color {c}");
            }
        }
    }
    assert!(excluded > 100);
}

#[test]
fn heuristic_empty_cut_reverifies() {
    for seed in 0..20 {
        let g = sample_graph(&SampleParams::new(40, 0.05, ColorSpec::uniform(2).unwrap(), seed).unwrap());
        if let Some(w) = empty_cut_witness(&g, 1, 10, 10, SearchMode::Heuristic).unwrap() {
            assert!(!w.complete);
            assert_eq!(g.color_cut_count(&w.s, &w.t, 1).unwrap(), 0);
            let nbhd = g.color_neighborhood(&w.s, 1).unwrap();
            assert!(w.t.iter().all(|b| !nbhd.contains(b)));
        }
    }
}

#[test]
fn graph_text_round_trip() {
    let colors = ColorSpec::new(vec![0.5, 0.3, 0.2]).unwrap();
    let g = sample_graph(&SampleParams::new(30, 0.2, colors, 4).unwrap());
    let back = parse_graph(&serialize_graph(&g)).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.alphas(), Some(&[0.5, 0.3, 0.2][..]));
}

#[test]
fn small_trial_matches_oracle() {
    let mut c = ExperimentConfig::new(6, ColorSpec::uniform(2).unwrap());
    c.omega_grid = vec![1.0];
    c.trials = 5;
    c.profile_suite = ProfileSuite::RandomK(3);
    c.checks.mcp_exact = true;
    for t in 0..5 {
        let r = run_trial(&c, 0, t).unwrap();
        let g = sample_graph(&SampleParams::new(6, r.p, c.colors.clone(), r.derived_seed).unwrap());
        let exact: Vec<ColorProfile> = enumerate_mcp(&g).unwrap().into_iter().collect();
        let mcp = r.mcp.as_ref().unwrap();
        assert_eq!(mcp.profiles, exact);
        // A walk success is always sound; the agreement bit also requires completeness.
        for w in r.walks.iter().filter(|w| w.success) {
            assert!(exact.contains(&w.target));
        }
        assert_eq!(mcp.walk_agrees, r.walks.iter().all(|w| w.success == exact.contains(&w.target)));
    }
}
