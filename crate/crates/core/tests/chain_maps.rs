//! Cylinder constructions on random chain maps, and stability of the cone certificate.

mod common;

use splitkit::amalgam::desk;
use splitkit::chain::{double_mapping_cylinder, mapping_cylinder};
use splitkit::chain::ChainComplex;
use splitkit::amalgam::NormalForm;
use splitkit::oracle::{acyclic_cone, homotopy_identities, integer_homology, IntegerMatrix};

fn integer_homology_vanishes(c: &ChainComplex<NormalForm>) -> bool {
    let flat: Vec<IntegerMatrix> = (1..=c.top()).map(|r| IntegerMatrix::augment(&c.d(r))).collect();
    integer_homology(&c.ranks, &flat).iter().all(|h| h.is_zero())
}

#[test]
fn cylinders_of_random_maps() {
    let presentations = desk::all();
    for k in 0..100u64 {
        let p = &presentations[k as usize % presentations.len()];
        let mut rng = common::rng(5000 + k);
        let c = common::random_complex(p, &mut rng);
        let e = common::random_chain_map(p, &mut rng, &c);
        assert!(e.check_squares(p).is_ok(), "{} #{k}", p.name);
        let cyl = mapping_cylinder(p, &e).unwrap();
        assert!(cyl.complex.validate(p).is_ok(), "{} #{k}", p.name);
        assert!(cyl.incl.check_squares(p).is_ok());
        assert!(cyl.proj.check_squares(p).is_ok());
        assert_eq!(homotopy_identities(p, &cyl), Ok(()), "{} #{k}", p.name);
        let other = common::random_chain_map(p, &mut rng, &c);
        let dc = double_mapping_cylinder(p, &e, &other).unwrap();
        assert!(dc.complex.validate(p).is_ok(), "{} #{k}", p.name);
        assert!(dc.first.check_squares(p).is_ok());
        assert!(dc.second.check_squares(p).is_ok());
    }
}

/// `k + (h d + d h)` is a homotopy equivalence exactly when `k` is a unit, whatever the window.
#[test]
fn cone_verdict_is_stable_under_a_larger_window() {
    let presentations = desk::all();
    let mut units = 0;
    for k in 0..60u64 {
        let p = &presentations[k as usize % presentations.len()];
        let mut rng = common::rng(9000 + k);
        let c = common::random_complex(p, &mut rng);
        let (e, scalar) = common::random_chain_map_with_scalar(p, &mut rng, &c);
        let small = acyclic_cone(p, &e, 1);
        let large = acyclic_cone(p, &e, 3);
        assert_eq!(small.is_acyclic(), large.is_acyclic(), "{} #{k}: {small:?} / {large:?}", p.name);
        if scalar.abs() == 1 {
            units += 1;
            assert!(small.is_acyclic(), "{} #{k}: {small:?}", p.name);
        }
        if scalar == 0 {
            // the cone of a null-homotopic map has the homology of C and its shift
            assert!(!small.is_acyclic() || integer_homology_vanishes(&c), "{} #{k}", p.name);
        }
    }
    assert!(units > 0);
}

#[test]
fn svk_verdict_is_stable_under_a_larger_window() {
    use splitkit::cwsplit::{build_svk, cw_realize_default, examples};
    let p = desk::free_rank_two();
    let c = desk::circle();
    for (q, w) in [(&p, examples::wedge(&p)), (&c, examples::circle(&c))] {
        let real = cw_realize_default(q, &w).unwrap();
        let small = build_svk(q, &w, &real, 2).unwrap().verdict;
        let large = build_svk(q, &w, &real, 4).unwrap().verdict;
        assert!(small.is_acyclic() && large.is_acyclic(), "{small:?} / {large:?}");
    }
}
