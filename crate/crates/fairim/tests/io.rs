use std::path::Path;

use fairim::io::{
    load_communities, load_communities_for, parse_communities, parse_edge_list, read_graph, read_sample, read_strategy, write_graph,
    write_sample, write_strategy, ColumnOrder, EdgeListOptions, GraphFile,
};
use fairim::Error;
use fairim_core::{
    sample_live_edges, CommunityStructure, DiffusionModel, NodeStrategy, SetStrategy, Strategy, WeightRule,
};

mod common;

fn opts() -> EdgeListOptions {
    EdgeListOptions::new(WeightRule::Constant(0.2), 0)
}

#[test]
fn undirected_path_doubles_arcs() {
    let o = EdgeListOptions {
        undirected: true,
        ..opts()
    };
    let g = parse_edge_list("0 1\n1 2\n", Path::new("e.txt"), &o).unwrap();
    assert_eq!(g.graph.n(), 3);
    assert_eq!(g.graph.arcs().len(), 4);
    assert!(g.graph.arcs().iter().all(|a| a.weight == 0.2));
}

#[test]
fn comments_and_sparse_labels() {
    let g = parse_edge_list("# header\n5 9\n", Path::new("e.txt"), &opts()).unwrap();
    assert_eq!(g.graph.n(), 2);
    assert_eq!(g.ids, vec![5, 9]);
    assert_eq!(g.graph.arcs().len(), 1);
}

#[test]
fn explicit_weights_are_kept_and_checked() {
    let g = parse_edge_list("0 1 0.7\n1 0\n", Path::new("e.txt"), &opts()).unwrap();
    let w: Vec<f64> = g.graph.arcs().iter().map(|a| a.weight).collect();
    assert_eq!(w, vec![0.7, 0.2]);
    assert!(matches!(
        parse_edge_list("0 1 1.5\n", Path::new("e.txt"), &opts()),
        Err(Error::Parse { line: 1, .. })
    ));
}

#[test]
fn malformed_line_reports_its_number() {
    let err = parse_edge_list("0 1\n1 2\nfoo\n", Path::new("e.txt"), &opts()).unwrap_err();
    match &err {
        Error::Parse { line, .. } => assert_eq!(*line, 3),
        e => panic!("unexpected {e:?}"),
    }
    assert!(err.to_string().contains('3'));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn duplicate_arcs_keep_the_first() {
    let g = parse_edge_list("0 1 0.3\n0 1 0.9\n", Path::new("e.txt"), &opts()).unwrap();
    assert_eq!(g.duplicates, 1);
    assert_eq!(g.graph.arcs().len(), 1);
    assert_eq!(g.graph.arcs()[0].weight, 0.3);
}

#[test]
fn lwcc_drops_small_components() {
    let o = EdgeListOptions { lwcc: true, ..opts() };
    let g = parse_edge_list("0 1\n1 2\n7 8\n", Path::new("e.txt"), &o).unwrap();
    assert_eq!(g.graph.n(), 3);
    assert_eq!(g.ids, vec![0, 1, 2]);
    assert_eq!(g.dropped, vec![7, 8]);
}

#[test]
fn community_file_groups_by_id() {
    let c = parse_communities("0 0\n0 1\n1 2\n", Path::new("c.txt"), 3, ColumnOrder::CommunityFirst, |v| {
        Ok::<_, String>(Some(v as u32))
    })
    .unwrap();
    assert_eq!(c.into_inner(), vec![vec![0, 1], vec![2]]);

    let c = parse_communities("0 7\n1 7\n2 7\n", Path::new("c.txt"), 3, ColumnOrder::NodeFirst, |v| {
        Ok::<_, String>(Some(v as u32))
    })
    .unwrap();
    assert_eq!(c.len(), 1);
}

#[test]
fn community_node_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "0 0\n0 5\n").unwrap();
    let err = load_communities(&path, 3, ColumnOrder::CommunityFirst);
    assert!(matches!(err, Err(Error::Parse { line: 2, .. })), "{err:?}");
}

#[test]
fn community_labels_follow_the_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let g = parse_edge_list("10 20\n20 30\n", Path::new("e.txt"), &opts()).unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "0 30\n1 10\n1 20\n").unwrap();
    let c = load_communities_for(&path, &g, ColumnOrder::CommunityFirst).unwrap();
    assert_eq!(c.into_inner(), vec![vec![2], vec![0, 1]]);
    std::fs::write(&path, "0 99\n").unwrap();
    assert!(load_communities_for(&path, &g, ColumnOrder::CommunityFirst).is_err());
}

#[test]
fn graph_fixture_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = common::graph(4, &[(0, 1, 0.25), (1, 2, 0.5), (3, 0, 1.0)]);
    let c = CommunityStructure::new(4, vec![vec![0, 3], vec![1, 2]]).unwrap();
    let path = dir.path().join("g.json");
    write_graph(&path, &GraphFile::new(&g, Some(&c))).unwrap();
    let inst = read_graph(&path).unwrap();
    assert_eq!(inst.graph, g);
    assert_eq!(inst.communities, Some(c));
}

#[test]
fn sample_fixture_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = common::random_graph(12, 30, 0.3, 4);
    let s = sample_live_edges(&g, DiffusionModel::IndependentCascade, 30, 9).unwrap();
    let path = dir.path().join("s.json");
    write_sample(&path, &s).unwrap();
    let back = read_sample(&path).unwrap();
    assert_eq!(back.len(), s.len());
    assert_eq!(back.out_degree(), s.out_degree());
    for v in 0..12 {
        assert_eq!(back.sigma_set(&[v]), s.sigma_set(&[v]));
    }
}

#[test]
fn strategy_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let x = Strategy::Node(NodeStrategy::new(vec![0.1, 0.7, 1.0 / 3.0, 0.2 + 1e-9], 2).unwrap());
    let p = Strategy::Set(SetStrategy::new(vec![(vec![0, 2], 0.3), (vec![1, 3], 0.7)], 2).unwrap());
    for s in [x, p] {
        write_strategy(&path, &s).unwrap();
        let back = read_strategy(&path).unwrap();
        match (&s, &back) {
            (Strategy::Node(a), Strategy::Node(b)) => {
                for (u, v) in a.x().iter().zip(b.x()) {
                    assert!((u - v).abs() < 1e-12);
                }
            }
            (Strategy::Set(a), Strategy::Set(b)) => {
                for ((s1, p1), (s2, p2)) in a.support().iter().zip(b.support()) {
                    assert_eq!(s1, s2);
                    assert!((p1 - p2).abs() < 1e-12);
                }
            }
            _ => panic!("kind changed"),
        }
    }
}

#[test]
fn seeds_are_stored_as_a_point_mass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    write_strategy(&path, &Strategy::Seeds(vec![3, 1])).unwrap();
    match read_strategy(&path).unwrap() {
        Strategy::Set(p) => assert_eq!(p.support(), &[(vec![1, 3], 1.0)]),
        s => panic!("unexpected {s:?}"),
    }
}

#[test]
fn corrupted_strategy_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, r#"{"kind": "node", "k": 1, "x": [0.5,"#).unwrap();
    let err = read_strategy(&path).unwrap_err();
    assert!(matches!(err, Error::Json { .. }), "{err:?}");
    assert_eq!(err.exit_code(), 1);
    let missing = read_strategy(&dir.path().join("nope.json")).unwrap_err();
    assert_eq!(missing.exit_code(), 2);
}
