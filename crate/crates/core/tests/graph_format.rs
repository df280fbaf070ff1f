//! Round-trip and validation tests for the on-disk graph format.
//!
//! Written files must load back to the identical edge set (conductances
//! bit-for-bit, thanks to the 17-significant-digit emitter), and every axiom
//! violation seeded into a file must be named by the validator and refused by
//! the loader.

use lapnet::graph::{
    load_graph_file, materialize, read_raw_graph, validate, validate_raw, write_graph_file,
    GraphSystem, IndexSpace, Violation, WeightRule, Window,
};
use proptest::prelude::*;
use std::path::PathBuf;

fn scratch_file(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("lapnet-{tag}-{}.json", std::process::id()))
}

/// A random connected finite graph: a spanning tree plus a few extra edges.
fn connected_graph() -> impl Strategy<Value = GraphSystem> {
    (2usize..=12).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let weights = proptest::collection::vec(0.01f64..100.0, n - 1);
        let extras = proptest::collection::vec(
            (
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
                0.01f64..100.0,
            ),
            0..4,
        );
        (Just(n), parents, weights, extras).prop_map(|(n, parents, weights, extras)| {
            let mut edges: Vec<(usize, usize, f64)> = Vec::new();
            for (v, (p, c)) in parents.iter().zip(&weights).enumerate() {
                let v = v + 1;
                edges.push((p.index(v), v, *c));
            }
            for (a, b, c) in extras {
                let (a, b) = (a.index(n), b.index(n));
                let key = (a.min(b), a.max(b));
                if a != b && !edges.iter().any(|&(u, v, _)| (u.min(v), u.max(v)) == key) {
                    edges.push((key.0, key.1, c));
                }
            }
            GraphSystem::from_edges(n, &edges, None).unwrap()
        })
    })
}

fn sorted_edges(g: &GraphSystem) -> Vec<(usize, usize, f64)> {
    let w = materialize(g, &Window::All).unwrap();
    let mut edges = w.edges();
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    edges
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Write, reload, and compare: the edge set must survive unchanged with
    /// conductances reproduced bit-for-bit.
    #[test]
    fn files_round_trip_exactly(g in connected_graph()) {
        let path = scratch_file("roundtrip");
        write_graph_file(&g, &path).unwrap();
        let back = load_graph_file(&path).unwrap();
        let _ = std::fs::remove_file(&path);

        let before = sorted_edges(&g);
        let after = sorted_edges(&back);
        prop_assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            prop_assert_eq!(a.0, b.0);
            prop_assert_eq!(a.1, b.1);
            prop_assert!(a.2.to_bits() == b.2.to_bits(),
                "conductance changed across the round trip: {} vs {}", a.2, b.2);
        }
        prop_assert!(validate(&back).is_valid());
    }
}

/// Each seeded defect must be flagged by the validator with the right
/// violation kind, and the strict loader must refuse the file.
#[test]
fn validator_names_each_seeded_defect() {
    let cases: Vec<(&str, String, fn(&Violation) -> bool)> = vec![
        (
            "bad format tag",
            r#"{"format":"something-else","edges":[{"u":0,"v":1,"c":1.0}]}"#.into(),
            |v| matches!(v, Violation::BadFormatTag { .. }),
        ),
        (
            "self loop",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":0,"v":1,"c":1.0},{"u":1,"v":1,"c":2.0}]}"#.into(),
            |v| matches!(v, Violation::SelfLoop { v: 1 }),
        ),
        (
            "duplicate edge, reversed orientation",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":0,"v":1,"c":1.0},{"u":1,"v":0,"c":2.0}]}"#.into(),
            |v| matches!(v, Violation::DuplicateEdge { u: 0, v: 1 }),
        ),
        (
            "zero conductance",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":0,"v":1,"c":0.0}]}"#.into(),
            |v| matches!(v, Violation::NonPositiveConductance { .. }),
        ),
        (
            "negative conductance",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":0,"v":1,"c":-3.5}]}"#.into(),
            |v| matches!(v, Violation::NonPositiveConductance { .. }),
        ),
        (
            "negative vertex id",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":-1,"v":1,"c":1.0}]}"#.into(),
            |v| matches!(v, Violation::NegativeVertexId { id: -1 }),
        ),
        (
            "label count mismatch",
            r#"{"format":"lapnet-graph-v1","labels":["a"],"edges":[{"u":0,"v":1,"c":1.0}]}"#.into(),
            |v| matches!(v, Violation::LabelCountMismatch { .. }),
        ),
        (
            "no vertices",
            r#"{"format":"lapnet-graph-v1","edges":[]}"#.into(),
            |v| matches!(v, Violation::NoVertices),
        ),
        (
            "disconnected",
            r#"{"format":"lapnet-graph-v1","edges":[{"u":0,"v":1,"c":1.0},{"u":2,"v":3,"c":1.0}]}"#.into(),
            |v| matches!(v, Violation::Disconnected { components: 2 }),
        ),
    ];

    let path = scratch_file("corrupt");
    for (name, text, expected) in cases {
        std::fs::write(&path, &text).unwrap();
        let raw = read_raw_graph(&path).unwrap();
        let report = validate_raw(&raw);
        assert!(
            report.violations.iter().any(expected),
            "{name}: violation not flagged; got {:?}",
            report.violations
        );
        assert!(
            load_graph_file(&path).is_err(),
            "{name}: strict loader accepted a corrupt file"
        );
    }

    // Structurally broken JSON is a file error even before validation.
    std::fs::write(&path, "{\"format\": \"lapnet-graph-v1\", \"edges\": [oops").unwrap();
    assert!(read_raw_graph(&path).is_err());
    let _ = std::fs::remove_file(&path);
}

/// Builder specs must map onto the documented families and reject malformed
/// strings with a graph error rather than a panic.
#[test]
fn builder_specs_cover_the_documented_families() {
    let line = GraphSystem::from_spec("line").unwrap();
    let w = materialize(&line, &Window::Range { lo: -2, hi: 2 }).unwrap();
    assert_eq!(w.len(), 5);
    assert_eq!(w.degree_full(2), 2.0);

    let cyc = GraphSystem::from_spec("cyclic:6").unwrap();
    assert_eq!(materialize(&cyc, &Window::All).unwrap().len(), 6);

    let lin = GraphSystem::from_spec("chain:linear").unwrap();
    let w = materialize(&lin, &Window::Range { lo: 0, hi: 3 }).unwrap();
    // Conductance of edge (n, n+1) is n+1.
    assert_eq!(
        w.edges()
            .iter()
            .map(|&(_, _, c)| c)
            .fold(0.0f64, f64::max),
        3.0
    );

    let geo = GraphSystem::from_spec("chain:geometric:2.0").unwrap();
    let w = materialize(&geo, &Window::Range { lo: 0, hi: 3 }).unwrap();
    assert_eq!(
        w.edges().iter().map(|&(_, _, c)| c).fold(0.0f64, f64::max),
        8.0
    );

    let lat = GraphSystem::from_spec("lattice:2x4").unwrap();
    assert_eq!(materialize(&lat, &Window::All).unwrap().len(), 16);

    for bad in [
        "cyclic:2",
        "cyclic:x",
        "chain:cubic",
        "chain:geometric:-1",
        "lattice:0x9",
        "lattice:2x",
        "rings",
        "",
    ] {
        assert!(
            GraphSystem::from_spec(bad).is_err(),
            "spec {bad:?} should have been rejected"
        );
    }
}

/// Window parsing accepts `lo:hi` with optional whitespace and rejects
/// anything else; materializing an inverted range is a window error.
#[test]
fn window_parsing_and_materialization_guards() {
    assert_eq!(
        Window::parse_range("-3:7").unwrap(),
        Window::Range { lo: -3, hi: 7 }
    );
    assert_eq!(
        Window::parse_range(" 0 : 12 ").unwrap(),
        Window::Range { lo: 0, hi: 12 }
    );
    assert!(Window::parse_range("5").is_err());
    assert!(Window::parse_range("a:b").is_err());

    let line = GraphSystem::from_spec("line").unwrap();
    assert!(materialize(&line, &Window::Range { lo: 4, hi: -4 }).is_err());
    // Half-line chains clip nothing: negative indices are unknown vertices.
    let chain = GraphSystem::chain(WeightRule::Linear, IndexSpace::HalfLine).unwrap();
    assert!(materialize(&chain, &Window::Range { lo: -3, hi: 3 }).is_err());
    // Range windows are a chain concept.
    let cyc = GraphSystem::cyclic(5).unwrap();
    assert!(materialize(&cyc, &Window::Range { lo: 0, hi: 3 }).is_err());
}
