mod common;

use rand::Rng;

use splitkit::algsplit::{build_splitting, check_realization, default_seed, diff_support, embeds, realize, verify_splitting};
use splitkit::amalgam::{desk, Side};
use splitkit::tree::{ball, hull, TreeItem};

#[test]
fn random_complexes_split_and_verify() {
    for (k, p) in desk::all().into_iter().enumerate() {
        let mut rng = common::rng(1000 + k as u64);
        for _ in 0..50 {
            let c = common::random_complex(&p, &mut rng);
            assert!(c.validate(&p).is_ok());
            let u = realize(&p, &c, &default_seed(&p));
            assert!(check_realization(&p, &c, &u).is_ok());
            for r in 1..=c.top() {
                for v in &u.trees[r].vertices {
                    assert!(diff_support(&p, &c, r, v).is_subset(&u.trees[r - 1].vertices));
                }
            }
            let s = build_splitting(&p, &c, &u).unwrap();
            let rep = verify_splitting(&p, &s);
            assert!(rep.pass, "{}: {:?}", p.name, rep.violations);
        }
    }
}

/// Ranks of the pieces are the cell counts of the subtrees times the rank of C.
#[test]
fn piece_ranks_follow_the_subtrees() {
    for (k, p) in desk::all().into_iter().enumerate() {
        let mut rng = common::rng(3000 + k as u64);
        for _ in 0..10 {
            let c = common::random_complex(&p, &mut rng);
            let s = build_splitting(&p, &c, &realize(&p, &c, &default_seed(&p))).unwrap();
            for r in 0..=c.top() {
                let u = &s.seq.trees[r];
                assert_eq!(s.d.rank(r), u.edges.len() * c.rank(r));
                let first = u.side_vertices(Side::First).len();
                let second = u.side_vertices(Side::Second).len();
                match &s.c2 {
                    Some(c2) => {
                        assert_eq!(s.c1.rank(r), first * c.rank(r));
                        assert_eq!(c2.rank(r), second * c.rank(r));
                    }
                    None => assert_eq!(s.c1.rank(r), (first + second) * c.rank(r)),
                }
            }
        }
    }
}

/// A larger seed realizes to a larger sequence, and the smaller splitting embeds.
#[test]
fn realization_is_monotone_in_the_seed() {
    for (k, p) in desk::all().into_iter().enumerate() {
        let mut rng = common::rng(4000 + k as u64);
        let (vertices, _) = ball(&p, 3, 1);
        let vertices: Vec<_> = vertices.into_iter().collect();
        for _ in 0..10 {
            let c = common::random_complex(&p, &mut rng);
            let small = default_seed(&p);
            let extra = TreeItem::Vertex(vertices[rng.gen_range(0..vertices.len())].clone());
            let items: Vec<TreeItem> = small.items().into_iter().chain([extra]).collect();
            let big = hull(&p, &items).unwrap();
            let (u, v) = (realize(&p, &c, &small), realize(&p, &c, &big));
            for (a, b) in u.trees.iter().zip(&v.trees) {
                assert!(a.is_subset(b));
            }
            let (a, b) = (build_splitting(&p, &c, &u).unwrap(), build_splitting(&p, &c, &v).unwrap());
            assert!(embeds(&a, &b), "{}", p.name);
            assert!(verify_splitting(&p, &b).pass);
        }
    }
}
