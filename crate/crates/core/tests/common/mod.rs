//! Random group elements and random chain complexes shared by the integration suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use splitkit::amalgam::{Atom, NormalForm, PresKind, Presentation};
use splitkit::algsplit::{MVSplitting, ViolationClass};
use splitkit::chain::{ChainComplex, ChainMap};
use splitkit::groupring::{RingElement, RingMatrix};
use splitkit::groups::BaseGroup;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn letters_of(g: &BaseGroup, wrap: fn(splitkit::groups::BaseElement) -> Atom) -> Vec<Atom> {
    (0..g.rank()).flat_map(|i| [wrap(g.generator(i)), wrap(g.pow(&g.generator(i), -1))]).collect()
}

/// Generators of G and their inverses as atoms.
pub fn letters(p: &Presentation) -> Vec<Atom> {
    let mut out = letters_of(&p.g1, Atom::G1);
    match p.kind {
        PresKind::Amalgam => out.extend(letters_of(p.g2.as_ref().unwrap(), Atom::G2)),
        PresKind::Hnn => out.extend([Atom::T(true), Atom::T(false)]),
    }
    out
}

pub fn random_word(p: &Presentation, rng: &mut ChaCha8Rng, len: usize) -> Vec<Atom> {
    let ls = letters(p);
    (0..len).map(|_| ls[rng.gen_range(0..ls.len())].clone()).collect()
}

/// Random element with at most `max_syllables` syllables.
pub fn random_element(p: &Presentation, rng: &mut ChaCha8Rng, max_syllables: usize) -> NormalForm {
    loop {
        let len = rng.gen_range(0..=4);
        let nf = p.reduce_atoms(&random_word(p, rng, len));
        if nf.len() <= max_syllables {
            return nf;
        }
    }
}

pub fn random_ring_element(p: &Presentation, rng: &mut ChaCha8Rng, max_terms: usize) -> RingElement<NormalForm> {
    let mut x = RingElement::zero();
    while x.is_zero() {
        for _ in 0..rng.gen_range(1..=max_terms) {
            let c = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            x.add_term(random_element(p, rng, 3), BigInt::from(c));
        }
    }
    x
}

fn within_limits(m: &RingMatrix<NormalForm>) -> bool {
    m.entries().all(|(_, _, x)| x.len() <= 3 && x.support().all(|g| g.len() <= 3))
}

/// Random complex with top degree at most 3 and ranks at most 3.
///
/// Built from disjoint one-step pieces `Z[G] -x-> Z[G]` plus padding, then
/// scrambled by elementary changes of basis that keep `d d = 0`.
pub fn random_complex(p: &Presentation, rng: &mut ChaCha8Rng) -> ChainComplex<NormalForm> {
    let tag = p.id().clone();
    let n = rng.gen_range(0..=3);
    let ranks: Vec<usize> = (0..=n).map(|_| rng.gen_range(1..=3)).collect();
    let mut diffs: Vec<RingMatrix<NormalForm>> =
        (1..=n).map(|r| RingMatrix::zeros(&tag, ranks[r], ranks[r - 1])).collect();
    let mut used: Vec<Vec<bool>> = ranks.iter().map(|&c| vec![false; c]).collect();
    for r in 1..=n {
        for _ in 0..rng.gen_range(1..=2) {
            let i = rng.gen_range(0..ranks[r]);
            let j = rng.gen_range(0..ranks[r - 1]);
            if used[r][i] || used[r - 1][j] {
                continue;
            }
            used[r][i] = true;
            used[r - 1][j] = true;
            diffs[r - 1].set(i, j, random_ring_element(p, rng, 3));
        }
    }
    for _ in 0..rng.gen_range(0..=3) {
        let r = rng.gen_range(0..=n);
        if ranks[r] < 2 {
            continue;
        }
        let i = rng.gen_range(0..ranks[r]);
        let k = (i + rng.gen_range(1..ranks[r])) % ranks[r];
        let g = RingElement::unit(random_element(p, rng, 1));
        let mut trial = diffs.clone();
        // P = 1 + g e_{ik}: rows of d_r change, columns of d_{r+1} change by the inverse
        if r >= 1 {
            let d = &mut trial[r - 1];
            for col in 0..d.cols {
                let add = g.mul(p, d.get(k, col));
                let cur = d.get(i, col).add(&add);
                d.set(i, col, cur);
            }
        }
        if r < n {
            let d = &mut trial[r];
            for row in 0..d.rows {
                let sub = d.get(row, i).mul(p, &g);
                let cur = d.get(row, k).sub(&sub);
                d.set(row, k, cur);
            }
        }
        if trial.iter().all(within_limits) {
            diffs = trial;
        }
    }
    ChainComplex::new(&tag, ranks, diffs).expect("shapes")
}

/// Identity element of G1 lifted to G, handy for unit entries.
pub fn one(p: &Presentation) -> RingElement<NormalForm> {
    RingElement::unit(p.identity_nf())
}

/// `k + (h d + d h)` for a random homotopy `h`, a chain map from `c` to itself.
pub fn random_chain_map(p: &Presentation, rng: &mut ChaCha8Rng, c: &ChainComplex<NormalForm>) -> ChainMap<NormalForm> {
    random_chain_map_with_scalar(p, rng, c).0
}

/// As `random_chain_map`, also returning `k`.
pub fn random_chain_map_with_scalar(
    p: &Presentation,
    rng: &mut ChaCha8Rng,
    c: &ChainComplex<NormalForm>,
) -> (ChainMap<NormalForm>, i64) {
    let tag = p.id().clone();
    let top = c.top();
    let h: Vec<RingMatrix<NormalForm>> = (0..=top)
        .map(|r| {
            let up = if r < top { c.rank(r + 1) } else { 0 };
            let mut m = RingMatrix::zeros(&tag, c.rank(r), up);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if rng.gen_bool(0.4) {
                        m.set(i, j, RingElement::unit(random_element(p, rng, 2)));
                    }
                }
            }
            m
        })
        .collect();
    let scalar = rng.gen_range(-2..=2i64);
    let k = BigInt::from(scalar);
    let maps = (0..=top)
        .map(|r| {
            let mut m = RingMatrix::identity(&tag, c.rank(r), &p.identity_nf()).scale(&k);
            if r < top {
                m = m.add(&h[r].mul(p, &c.d(r + 1)).unwrap()).unwrap();
            }
            if r >= 1 {
                m = m.add(&c.d(r).mul(p, &h[r - 1]).unwrap()).unwrap();
            }
            m
        })
        .collect();
    (ChainMap::new(c.clone(), c.clone(), maps).expect("shapes"), scalar)
}

/// The three ways a splitting is corrupted for the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    CorruptedEntry,
    DeletedEdge,
    WrongRank,
}

/// Applies a fault, or returns `None` when the splitting has no room for it.
pub fn inject(s: &MVSplitting, fault: Fault) -> Option<MVSplitting> {
    let mut s = s.clone();
    match fault {
        Fault::CorruptedEntry => {
            // perturb e1 in a row that meets a nonzero row of the C1 differential
            let r = (1..=s.c1.top()).find(|&r| !s.c1.d(r).is_zero() && s.d.rank(r) > 0)?;
            let d = s.c1.d(r);
            let k = (0..d.rows).find(|&k| d.row(k).iter().any(|x| !x.is_zero()))?;
            let g = s.e1.at(r).entries().find_map(|(_, _, x)| x.support().next().cloned())?;
            let cur = s.e1.maps[r].get(0, k).add(&RingElement::monomial(g, 3));
            s.e1.maps[r].set(0, k, cur);
        }
        Fault::DeletedEdge => {
            let r = (0..s.seq.trees.len()).find(|&r| !s.seq.trees[r].edges.is_empty())?;
            let e = s.seq.trees[r].edges.iter().next().cloned().unwrap();
            s.seq.trees[r].edges.remove(&e);
        }
        Fault::WrongRank => {
            let r = (0..s.d_basis.len()).find(|&r| !s.d_basis[r].is_empty())?;
            s.d_basis[r].pop();
        }
    }
    Some(s)
}

pub fn expected_class(fault: Fault) -> ViolationClass {
    match fault {
        Fault::CorruptedEntry => ViolationClass::ChainMapSquare,
        Fault::DeletedEdge => ViolationClass::SubtreeValidity,
        Fault::WrongRank => ViolationClass::RankMismatch,
    }
}
