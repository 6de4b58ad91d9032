//! Large balls in the tree: still a tree, with the right valences and orbits.

use std::collections::{BTreeMap, BTreeSet};

use splitkit::amalgam::desk;
use splitkit::tree::{ball, endpoints, incident_edges, orbit_rep, validate_subtree, FiniteSubtree, TreeItem};

#[test]
fn radius_six_balls_are_trees() {
    for p in desk::all() {
        let (vertices, edges) = ball(&p, 6, 1);
        assert_eq!(vertices.len(), edges.len() + 1, "{}", p.name);
        let s = FiniteSubtree { vertices: vertices.clone(), edges: edges.clone() };
        assert_eq!(validate_subtree(&p, &s), Ok(()), "{}", p.name);

        let mut degree: BTreeMap<_, usize> = BTreeMap::new();
        for e in &edges {
            let (a, b) = endpoints(&p, e);
            assert_ne!(a, b);
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        // every vertex not on the outer shell has all its sampled edges in the ball
        let (inner, _) = ball(&p, 5, 1);
        for v in &inner {
            assert_eq!(degree[v], incident_edges(&p, v, 1).len(), "{} at {v:?}", p.name);
        }

        let vertex_orbits: BTreeSet<_> = vertices.iter().map(|v| orbit_rep(&p, &TreeItem::Vertex(v.clone()))).collect();
        let edge_orbits: BTreeSet<_> = edges.iter().map(|e| orbit_rep(&p, &TreeItem::Edge(e.clone()))).collect();
        assert_eq!(vertex_orbits.len(), if p.is_amalgam() { 2 } else { 1 }, "{}", p.name);
        assert_eq!(edge_orbits.len(), 1, "{}", p.name);
    }
}

#[test]
fn infinite_dihedral_tree_is_a_line() {
    let p = desk::infinite_dihedral();
    let (vertices, edges) = ball(&p, 6, 1);
    assert_eq!((vertices.len(), edges.len()), (13, 12));
    for v in &ball(&p, 5, 1).0 {
        assert_eq!(incident_edges(&p, v, 1).len(), 2);
    }
}
