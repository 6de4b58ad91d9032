//! Normal forms for `G1 *_H G2` and `G1 *_H {t}` and canonical right coset keys.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{tokenize, BaseElement, BaseGroup, Group, GroupError, Homomorphism, Transversal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid presentation `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("normal form belongs to `{found}`, expected `{expected}`")]
    Mismatch { expected: String, found: String },
    #[error("coset kind {0:?} is not defined for this presentation")]
    Kind(CosetKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresKind {
    Amalgam,
    Hnn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CosetKind {
    G1,
    G2,
    H,
}

/// Vertex group side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    First(BaseElement),
    Second(BaseElement),
    /// `t` followed by a representative of `i2(H) \ G1`.
    Up(BaseElement),
    /// `t^-1` followed by a representative of `i1(H) \ G1`.
    Down(BaseElement),
}

impl Syllable {
    pub fn rep(&self) -> &BaseElement {
        match self {
            Syllable::First(r) | Syllable::Second(r) | Syllable::Up(r) | Syllable::Down(r) => r,
        }
    }

    fn rep_mut(&mut self) -> &mut BaseElement {
        match self {
            Syllable::First(r) | Syllable::Second(r) | Syllable::Up(r) | Syllable::Down(r) => r,
        }
    }
}

/// Amalgam: `head` lies in H, syllables alternate between nontrivial
/// representatives of the two factors. HNN: `head` lies in G1 and each syllable
/// is a signed stable letter followed by a representative, with no pinch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub head: BaseElement,
    pub syllables: Vec<Syllable>,
}

impl NormalForm {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

impl Ord for NormalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.syllables
            .len()
            .cmp(&other.syllables.len())
            .then_with(|| self.syllables.cmp(&other.syllables))
            .then_with(|| self.head.cmp(&other.head))
    }
}

impl PartialOrd for NormalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Letters of a word in the generators of G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    H(BaseElement),
    G1(BaseElement),
    G2(BaseElement),
    T(bool),
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub kind: PresKind,
    pub h: Arc<BaseGroup>,
    pub g1: Arc<BaseGroup>,
    pub g2: Option<Arc<BaseGroup>>,
    pub i1: Homomorphism,
    pub i2: Homomorphism,
    /// Representatives of `i1(H) \ G1`.
    pub t1: Transversal,
    /// Representatives of `i2(H) \ G2` (amalgam) or `i2(H) \ G1` (HNN).
    pub t2: Transversal,
    pub stable: String,
    id: Arc<str>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Presentation {
    pub fn amalgam(name: &str, i1: Homomorphism, i2: Homomorphism) -> Result<Self, AmalgamError> {
        let bad = |reason: &str| AmalgamError::Invalid { name: name.to_string(), reason: reason.to_string() };
        if i1.source.id() != i2.source.id() {
            return Err(bad("the two embeddings have different sources"));
        }
        if i1.target.id() == i2.target.id() {
            return Err(bad("the two factors must be distinct groups"));
        }
        let names: Vec<&String> = i1.target.generators.iter().chain(&i2.target.generators).collect();
        if (1..names.len()).any(|i| names[..i].contains(&names[i])) {
            return Err(bad("generator names of the factors must be distinct"));
        }
        Ok(Presentation {
            name: name.to_string(),
            kind: PresKind::Amalgam,
            h: i1.source.clone(),
            g1: i1.target.clone(),
            g2: Some(i2.target.clone()),
            t1: Transversal::new(i1.clone())?,
            t2: Transversal::new(i2.clone())?,
            i1,
            i2,
            stable: String::new(),
            id: name.into(),
        })
    }

    pub fn hnn(name: &str, i1: Homomorphism, i2: Homomorphism, stable: &str) -> Result<Self, AmalgamError> {
        let bad = |reason: &str| AmalgamError::Invalid { name: name.to_string(), reason: reason.to_string() };
        if i1.source.id() != i2.source.id() || i1.target.id() != i2.target.id() {
            return Err(bad("both embeddings must go from H to G1"));
        }
        if i1.target.generators.iter().any(|g| g == stable) {
            return Err(bad("stable letter clashes with a generator"));
        }
        Ok(Presentation {
            name: name.to_string(),
            kind: PresKind::Hnn,
            h: i1.source.clone(),
            g1: i1.target.clone(),
            g2: None,
            t1: Transversal::new(i1.clone())?,
            t2: Transversal::new(i2.clone())?,
            i1,
            i2,
            stable: stable.to_string(),
            id: name.into(),
        })
    }

    pub fn id(&self) -> &Arc<str> {
        &self.id
    }

    pub fn is_amalgam(&self) -> bool {
        self.kind == PresKind::Amalgam
    }

    pub fn factor(&self, side: Side) -> &Arc<BaseGroup> {
        match side {
            Side::First => &self.g1,
            Side::Second => self.g2.as_ref().unwrap_or(&self.g1),
        }
    }

    fn side_trans(&self, side: Side) -> &Transversal {
        match side {
            Side::First => &self.t1,
            Side::Second => &self.t2,
        }
    }

    fn side_hom(&self, side: Side) -> &Homomorphism {
        match side {
            Side::First => &self.i1,
            Side::Second => &self.i2,
        }
    }

    pub fn identity_nf(&self) -> NormalForm {
        let head = match self.kind {
            PresKind::Amalgam => self.h.identity(),
            PresKind::Hnn => self.g1.identity(),
        };
        NormalForm { head, syllables: Vec::new() }
    }

    pub fn owns(&self, nf: &NormalForm) -> bool {
        match self.kind {
            PresKind::Amalgam => self.h.contains(&nf.head),
            PresKind::Hnn => self.g1.contains(&nf.head),
        }
    }

    pub fn check(&self, nf: &NormalForm) -> Result<(), AmalgamError> {
        if self.owns(nf) {
            Ok(())
        } else {
            Err(AmalgamError::Mismatch { expected: self.name.clone(), found: nf.head.group.to_string() })
        }
    }

    // ---- strategy A: append on the right, cascading subgroup parts leftwards ----

    fn absorb_h(&self, nf: &mut NormalForm, upto: usize, mut h: BaseElement) {
        let e = self.h.identity();
        let mut k = upto;
        while k > 0 && h != e {
            let syl = &mut nf.syllables[k - 1];
            let side = if matches!(syl, Syllable::First(_)) { Side::First } else { Side::Second };
            let g = self.factor(side);
            let y = g.mul(syl.rep(), &self.side_hom(side).apply_unchecked(&h));
            let (h2, r) = self.side_trans(side).coset_factor(&y);
            *syl.rep_mut() = r;
            h = h2;
            k -= 1;
        }
        if h != e {
            nf.head = self.h.mul(&nf.head, &h);
        }
    }

    fn absorb_g1(&self, nf: &mut NormalForm, upto: usize, mut x: BaseElement) {
        let e = self.g1.identity();
        let mut k = upto;
        while k > 0 && x != e {
            let syl = &mut nf.syllables[k - 1];
            let up = matches!(syl, Syllable::Up(_));
            let y = self.g1.mul(syl.rep(), &x);
            let (h, r) = if up { self.t2.coset_factor(&y) } else { self.t1.coset_factor(&y) };
            *syl.rep_mut() = r;
            x = if up { self.i1.apply_unchecked(&h) } else { self.i2.apply_unchecked(&h) };
            k -= 1;
        }
        if x != e {
            nf.head = self.g1.mul(&nf.head, &x);
        }
    }

    fn append_factor(&self, nf: &mut NormalForm, side: Side, g: &BaseElement) {
        let grp = self.factor(side);
        let same = matches!(
            (nf.syllables.last(), side),
            (Some(Syllable::First(_)), Side::First) | (Some(Syllable::Second(_)), Side::Second)
        );
        let y = if same { grp.mul(nf.syllables.pop().unwrap().rep(), g) } else { g.clone() };
        let (h, r) = self.side_trans(side).coset_factor(&y);
        let n = nf.syllables.len();
        self.absorb_h(nf, n, h);
        if !self.side_trans(side).is_trivial_rep(&r) {
            nf.syllables.push(match side {
                Side::First => Syllable::First(r),
                Side::Second => Syllable::Second(r),
            });
        }
    }

    /// Appends one atom on the right.
    pub fn append(&self, nf: &mut NormalForm, atom: &Atom) {
        match (self.kind, atom) {
            (PresKind::Amalgam, Atom::H(h)) => {
                let n = nf.syllables.len();
                self.absorb_h(nf, n, h.clone());
            }
            (PresKind::Amalgam, Atom::G1(g)) => self.append_factor(nf, Side::First, g),
            (PresKind::Amalgam, Atom::G2(g)) => self.append_factor(nf, Side::Second, g),
            (PresKind::Hnn, Atom::H(h)) => self.append(nf, &Atom::G1(self.i1.apply_unchecked(h))),
            (PresKind::Hnn, Atom::G1(g)) => match nf.syllables.pop() {
                None => nf.head = self.g1.mul(&nf.head, g),
                Some(syl) => {
                    let up = matches!(syl, Syllable::Up(_));
                    let y = self.g1.mul(syl.rep(), g);
                    let (h, r) = if up { self.t2.coset_factor(&y) } else { self.t1.coset_factor(&y) };
                    nf.syllables.push(if up { Syllable::Up(r) } else { Syllable::Down(r) });
                    let x = if up { self.i1.apply_unchecked(&h) } else { self.i2.apply_unchecked(&h) };
                    let n = nf.syllables.len() - 1;
                    self.absorb_g1(nf, n, x);
                }
            },
            (PresKind::Hnn, Atom::T(up)) => {
                let e = self.g1.identity();
                let pinch = match nf.syllables.last() {
                    Some(Syllable::Down(r)) => *up && *r == e,
                    Some(Syllable::Up(r)) => !*up && *r == e,
                    _ => false,
                };
                if pinch {
                    nf.syllables.pop();
                } else {
                    nf.syllables.push(if *up { Syllable::Up(e) } else { Syllable::Down(e) });
                }
            }
            (PresKind::Amalgam, Atom::T(_)) | (PresKind::Hnn, Atom::G2(_)) => {
                panic!("atom {atom:?} is not a letter of {}", self.name)
            }
        }
    }

    // ---- strategy B: prepend on the left ----

    /// Prepends one atom on the left.
    pub fn prepend(&self, atom: &Atom, nf: &mut NormalForm) {
        match (self.kind, atom) {
            (PresKind::Amalgam, Atom::H(h)) => nf.head = self.h.mul(h, &nf.head),
            (PresKind::Amalgam, Atom::G1(g)) => self.prepend_factor(Side::First, g, nf),
            (PresKind::Amalgam, Atom::G2(g)) => self.prepend_factor(Side::Second, g, nf),
            (PresKind::Hnn, Atom::H(h)) => nf.head = self.g1.mul(&self.i1.apply_unchecked(h), &nf.head),
            (PresKind::Hnn, Atom::G1(g)) => nf.head = self.g1.mul(g, &nf.head),
            (PresKind::Hnn, Atom::T(up)) => {
                let e = self.g1.identity();
                let (h, r) = if *up { self.t2.coset_factor(&nf.head) } else { self.t1.coset_factor(&nf.head) };
                let pushed = if *up { self.i1.apply_unchecked(&h) } else { self.i2.apply_unchecked(&h) };
                let pinch = r == e
                    && match nf.syllables.first() {
                        Some(Syllable::Down(_)) => *up,
                        Some(Syllable::Up(_)) => !*up,
                        _ => false,
                    };
                if pinch {
                    let next = nf.syllables.remove(0);
                    nf.head = self.g1.mul(&pushed, next.rep());
                } else {
                    nf.head = pushed;
                    nf.syllables.insert(0, if *up { Syllable::Up(r) } else { Syllable::Down(r) });
                }
            }
            (PresKind::Amalgam, Atom::T(_)) | (PresKind::Hnn, Atom::G2(_)) => {
                panic!("atom {atom:?} is not a letter of {}", self.name)
            }
        }
    }

    fn prepend_factor(&self, side: Side, g: &BaseElement, nf: &mut NormalForm) {
        let grp = self.factor(side);
        let mut y = grp.mul(g, &self.side_hom(side).apply_unchecked(&nf.head));
        let same = matches!(
            (nf.syllables.first(), side),
            (Some(Syllable::First(_)), Side::First) | (Some(Syllable::Second(_)), Side::Second)
        );
        if same {
            y = grp.mul(&y, nf.syllables.remove(0).rep());
        }
        let (h, r) = self.side_trans(side).coset_factor(&y);
        nf.head = h;
        if !self.side_trans(side).is_trivial_rep(&r) {
            nf.syllables.insert(
                0,
                match side {
                    Side::First => Syllable::First(r),
                    Side::Second => Syllable::Second(r),
                },
            );
        }
    }

    /// The atoms spelling a normal form from left to right.
    pub fn atoms(&self, nf: &NormalForm) -> Vec<Atom> {
        let mut out = Vec::with_capacity(2 * nf.syllables.len() + 1);
        match self.kind {
            PresKind::Amalgam => out.push(Atom::H(nf.head.clone())),
            PresKind::Hnn => out.push(Atom::G1(nf.head.clone())),
        }
        for s in &nf.syllables {
            match s {
                Syllable::First(r) => out.push(Atom::G1(r.clone())),
                Syllable::Second(r) => out.push(Atom::G2(r.clone())),
                Syllable::Up(r) => {
                    out.push(Atom::T(true));
                    out.push(Atom::G1(r.clone()));
                }
                Syllable::Down(r) => {
                    out.push(Atom::T(false));
                    out.push(Atom::G1(r.clone()));
                }
            }
        }
        out
    }

    pub fn invert_atom(&self, a: &Atom) -> Atom {
        match a {
            Atom::H(h) => Atom::H(self.h.inv(h)),
            Atom::G1(g) => Atom::G1(self.g1.inv(g)),
            Atom::G2(g) => Atom::G2(self.factor(Side::Second).inv(g)),
            Atom::T(up) => Atom::T(!up),
        }
    }

    /// Leftmost strategy: append atoms one at a time.
    pub fn reduce_atoms(&self, atoms: &[Atom]) -> NormalForm {
        let mut nf = self.identity_nf();
        for a in atoms {
            self.append(&mut nf, a);
        }
        nf
    }

    /// Rightmost strategy: prepend atoms from the right end.
    pub fn reduce_atoms_rightmost(&self, atoms: &[Atom]) -> NormalForm {
        let mut nf = self.identity_nf();
        for a in atoms.iter().rev() {
            self.prepend(a, &mut nf);
        }
        nf
    }

    /// Parses a word in the generators of G1, G2 and the stable letter.
    pub fn parse_atoms(&self, text: &str) -> Result<Vec<Atom>, AmalgamError> {
        let mut out = Vec::new();
        for (sym, k) in tokenize(text)? {
            if self.kind == PresKind::Hnn && sym == self.stable {
                out.extend(std::iter::repeat(Atom::T(k > 0)).take(k.unsigned_abs() as usize));
            } else if let Some(i) = self.g1.generator_index(&sym) {
                out.push(Atom::G1(self.g1.pow(&self.g1.generator(i), k)));
            } else if let Some(i) = self.g2.as_ref().and_then(|g| g.generator_index(&sym)) {
                let g2 = self.factor(Side::Second);
                out.push(Atom::G2(g2.pow(&g2.generator(i), k)));
            } else if sym == "e" || sym == "1" {
            } else {
                return Err(GroupError::UnknownSymbol(sym).into());
            }
        }
        Ok(out)
    }

    pub fn reduce(&self, text: &str) -> Result<NormalForm, AmalgamError> {
        Ok(self.reduce_atoms(&self.parse_atoms(text)?))
    }

    pub fn reduce_rightmost(&self, text: &str) -> Result<NormalForm, AmalgamError> {
        Ok(self.reduce_atoms_rightmost(&self.parse_atoms(text)?))
    }

    /// Product by prepending the atoms of `a` onto `b`.
    pub fn nf_multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut out = b.clone();
        for atom in self.atoms(a).iter().rev() {
            self.prepend(atom, &mut out);
        }
        out
    }

    pub fn try_multiply(&self, a: &NormalForm, b: &NormalForm) -> Result<NormalForm, AmalgamError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.nf_multiply(a, b))
    }

    pub fn nf_invert(&self, a: &NormalForm) -> NormalForm {
        let mut out = self.identity_nf();
        for atom in self.atoms(a).iter().rev() {
            self.append(&mut out, &self.invert_atom(atom));
        }
        out
    }

    pub fn from_h(&self, h: &BaseElement) -> NormalForm {
        self.reduce_atoms(&[Atom::H(h.clone())])
    }

    pub fn from_factor(&self, side: Side, g: &BaseElement) -> NormalForm {
        match side {
            Side::First => self.reduce_atoms(&[Atom::G1(g.clone())]),
            Side::Second => self.reduce_atoms(&[Atom::G2(g.clone())]),
        }
    }

    pub fn stable_nf(&self, up: bool) -> NormalForm {
        self.reduce_atoms(&[Atom::T(up)])
    }

    /// The factor element represented by `nf`, if it lies in that factor.
    pub fn to_factor(&self, nf: &NormalForm, side: Side) -> Option<BaseElement> {
        let hom = self.side_hom(side);
        match (self.kind, side, nf.syllables.as_slice()) {
            (PresKind::Hnn, Side::First, []) => Some(nf.head.clone()),
            (PresKind::Hnn, _, _) => None,
            (PresKind::Amalgam, _, []) => Some(hom.apply_unchecked(&nf.head)),
            (PresKind::Amalgam, Side::First, [Syllable::First(s)]) => {
                Some(self.g1.mul(&hom.apply_unchecked(&nf.head), s))
            }
            (PresKind::Amalgam, Side::Second, [Syllable::Second(s)]) => {
                let g2 = self.factor(Side::Second);
                Some(g2.mul(&hom.apply_unchecked(&nf.head), s))
            }
            _ => None,
        }
    }

    /// The H element represented by `nf` (H sits in G through `i1`).
    pub fn to_h(&self, nf: &NormalForm) -> Option<BaseElement> {
        match self.kind {
            PresKind::Amalgam => nf.syllables.is_empty().then(|| nf.head.clone()),
            PresKind::Hnn => {
                if !nf.syllables.is_empty() {
                    return None;
                }
                self.t1.preimage(&nf.head)
            }
        }
    }

    /// Canonical normal form of the minimal representative of a right coset.
    pub fn coset_key(&self, g: &NormalForm, kind: CosetKind) -> Result<NormalForm, AmalgamError> {
        match (self.kind, kind) {
            (PresKind::Hnn, CosetKind::G2) => Err(AmalgamError::Kind(kind)),
            _ => Ok(self.coset_key_unchecked(g, kind)),
        }
    }

    pub(crate) fn coset_key_unchecked(&self, g: &NormalForm, kind: CosetKind) -> NormalForm {
        let mut out = g.clone();
        match (self.kind, kind) {
            (PresKind::Amalgam, CosetKind::H) => out.head = self.h.identity(),
            (PresKind::Amalgam, CosetKind::G1) => {
                out.head = self.h.identity();
                if matches!(out.syllables.first(), Some(Syllable::First(_))) {
                    out.syllables.remove(0);
                }
            }
            (PresKind::Amalgam, CosetKind::G2) => {
                out.head = self.h.identity();
                if matches!(out.syllables.first(), Some(Syllable::Second(_))) {
                    out.syllables.remove(0);
                }
            }
            (PresKind::Hnn, CosetKind::G1) => out.head = self.g1.identity(),
            (PresKind::Hnn, CosetKind::H) => out.head = self.t1.rep(&out.head),
            (PresKind::Hnn, CosetKind::G2) => panic!("no second factor in an HNN extension"),
        }
        out
    }

    /// Checks the structural normal form conditions.
    pub fn is_normal(&self, nf: &NormalForm) -> bool {
        if !self.owns(nf) {
            return false;
        }
        let e1 = self.g1.identity();
        match self.kind {
            PresKind::Amalgam => nf.syllables.iter().enumerate().all(|(i, s)| {
                let (side, r) = match s {
                    Syllable::First(r) => (Side::First, r),
                    Syllable::Second(r) => (Side::Second, r),
                    _ => return false,
                };
                let alt = i == 0 || std::mem::discriminant(s) != std::mem::discriminant(&nf.syllables[i - 1]);
                alt && self.factor(side).contains(r)
                    && !self.side_trans(side).is_trivial_rep(r)
                    && self.side_trans(side).rep(r) == *r
            }),
            PresKind::Hnn => nf.syllables.iter().enumerate().all(|(i, s)| {
                let ok = match s {
                    Syllable::Up(r) => self.g1.contains(r) && self.t2.rep(r) == *r,
                    Syllable::Down(r) => self.g1.contains(r) && self.t1.rep(r) == *r,
                    _ => false,
                };
                let pinch = i > 0
                    && match (&nf.syllables[i - 1], s) {
                        (Syllable::Up(r), Syllable::Down(_)) | (Syllable::Down(r), Syllable::Up(_)) => *r == e1,
                        _ => false,
                    };
                ok && !pinch
            }),
        }
    }

    /// Human readable word that parses back to the same element.
    pub fn show(&self, nf: &NormalForm) -> String {
        let mut parts = Vec::new();
        let head = match self.kind {
            PresKind::Amalgam => self.g1.show(&self.i1.apply_unchecked(&nf.head)),
            PresKind::Hnn => self.g1.show(&nf.head),
        };
        if head != "e" {
            parts.push(head);
        }
        for s in &nf.syllables {
            match s {
                Syllable::First(r) => parts.push(self.g1.show(r)),
                Syllable::Second(r) => parts.push(self.factor(Side::Second).show(r)),
                Syllable::Up(r) | Syllable::Down(r) => {
                    let up = matches!(s, Syllable::Up(_));
                    parts.push(if up { self.stable.clone() } else { format!("{}^-1", self.stable) });
                    let r = self.g1.show(r);
                    if r != "e" {
                        parts.push(r);
                    }
                }
            }
        }
        if parts.is_empty() {
            "e".into()
        } else {
            parts.join(" ")
        }
    }
}

impl Group for Presentation {
    type Elem = NormalForm;

    fn name(&self) -> &str {
        &self.id
    }

    fn identity(&self) -> NormalForm {
        self.identity_nf()
    }

    fn contains(&self, x: &NormalForm) -> bool {
        self.is_normal(x)
    }

    fn mul(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        self.nf_multiply(a, b)
    }

    fn inv(&self, a: &NormalForm) -> NormalForm {
        self.nf_invert(a)
    }

    fn show(&self, a: &NormalForm) -> String {
        Presentation::show(self, a)
    }
}

impl fmt::Display for PresKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresKind::Amalgam => "amalgam",
            PresKind::Hnn => "hnn",
        })
    }
}

/// Small presentations used throughout tests and examples.
pub mod desk {
    use super::*;

    fn z(name: &str, g: &str) -> Arc<BaseGroup> {
        Arc::new(BaseGroup::free(name, &[g]))
    }

    /// `Z/2 *_1 Z/2` with generators a, b.
    pub fn infinite_dihedral() -> Presentation {
        let one = Arc::new(BaseGroup::trivial("1"));
        let a = Arc::new(BaseGroup::cyclic("A", "a", 2).unwrap());
        let b = Arc::new(BaseGroup::cyclic("B", "b", 2).unwrap());
        let i1 = Homomorphism::new("i1", one.clone(), a, vec![], true).unwrap();
        let i2 = Homomorphism::new("i2", one, b, vec![], true).unwrap();
        Presentation::amalgam("dinf", i1, i2).unwrap()
    }

    /// `Z *_Z Z` with `z -> x^2`, `z -> y^3`.
    pub fn trefoil() -> Presentation {
        let h = z("Z", "z");
        let g1 = z("X", "x");
        let g2 = z("Y", "y");
        let i1 = Homomorphism::new("i1", h.clone(), g1.clone(), vec![g1.parse("x^2").unwrap()], true).unwrap();
        let i2 = Homomorphism::new("i2", h, g2.clone(), vec![g2.parse("y^3").unwrap()], true).unwrap();
        Presentation::amalgam("trefoil", i1, i2).unwrap()
    }

    /// `Z * Z` over the trivial group.
    pub fn free_rank_two() -> Presentation {
        let one = Arc::new(BaseGroup::trivial("1"));
        let g1 = z("X", "x");
        let g2 = z("Y", "y");
        let i1 = Homomorphism::new("i1", one.clone(), g1, vec![], true).unwrap();
        let i2 = Homomorphism::new("i2", one, g2, vec![], true).unwrap();
        Presentation::amalgam("f2", i1, i2).unwrap()
    }

    /// `1 *_1 {t}`, the infinite cyclic group.
    pub fn circle() -> Presentation {
        let one = Arc::new(BaseGroup::trivial("1"));
        let g1 = Arc::new(BaseGroup::trivial("G"));
        let i1 = Homomorphism::new("i1", one.clone(), g1.clone(), vec![], true).unwrap();
        let i2 = Homomorphism::new("i2", one, g1, vec![], true).unwrap();
        Presentation::hnn("circle", i1, i2, "t").unwrap()
    }

    /// `Z *_Z {t}` with `i1 = id`, `i2 = inversion`: the Klein bottle group.
    pub fn klein_bottle() -> Presentation {
        let h = z("Z", "z");
        let g1 = z("X", "x");
        let i1 = Homomorphism::new("i1", h.clone(), g1.clone(), vec![g1.parse("x").unwrap()], true).unwrap();
        let i2 = Homomorphism::new("i2", h, g1.clone(), vec![g1.parse("x^-1").unwrap()], true).unwrap();
        Presentation::hnn("klein", i1, i2, "t").unwrap()
    }

    pub fn all() -> Vec<Presentation> {
        vec![infinite_dihedral(), trefoil(), free_rank_two(), circle(), klein_bottle()]
    }
}

#[cfg(test)]
mod tests {
    use super::desk::*;
    use super::*;

    #[test]
    fn dihedral_reduce_cancels() {
        let p = infinite_dihedral();
        assert_eq!(p.reduce("a b b a").unwrap(), p.identity_nf());
    }

    #[test]
    fn trefoil_amalgamation() {
        let p = trefoil();
        assert_eq!(p.reduce("x x").unwrap(), p.reduce("y y y").unwrap());
        assert!(p.reduce("x x").unwrap().syllables.is_empty());
    }

    #[test]
    fn circle_free_reduction() {
        let p = circle();
        assert_eq!(p.reduce("t t t^-1").unwrap(), p.reduce("t").unwrap());
    }

    #[test]
    fn dihedral_products() {
        let p = infinite_dihedral();
        let ab = p.reduce("a b").unwrap();
        let ba = p.reduce("b a").unwrap();
        assert_eq!(p.nf_multiply(&ab, &ba), p.identity_nf());
        assert_eq!(p.nf_invert(&p.identity_nf()), p.identity_nf());
    }

    #[test]
    fn klein_relation() {
        let p = klein_bottle();
        let t = p.reduce("t").unwrap();
        let x = p.reduce("x").unwrap();
        assert_eq!(p.nf_multiply(&t, &x), p.reduce("x^-1 t").unwrap());
    }

    #[test]
    fn coset_keys() {
        let p = infinite_dihedral();
        let e = p.identity_nf();
        let a = p.reduce("a").unwrap();
        let b = p.reduce("b").unwrap();
        assert_eq!(p.coset_key(&a, CosetKind::G1).unwrap(), p.coset_key(&e, CosetKind::G1).unwrap());
        assert_ne!(p.coset_key(&b, CosetKind::G1).unwrap(), p.coset_key(&e, CosetKind::G1).unwrap());
        let c = circle();
        let t2 = c.reduce("t^2").unwrap();
        assert_eq!(c.coset_key(&t2, CosetKind::H).unwrap(), t2);
        assert!(c.coset_key(&t2, CosetKind::G2).is_err());
    }

    #[test]
    fn coset_key_is_left_invariant() {
        let p = trefoil();
        let g = p.reduce("y x y^-1 x^3").unwrap();
        let x = p.reduce("x^5").unwrap();
        let y = p.reduce("y^7").unwrap();
        let z = p.reduce("x^2").unwrap();
        assert_eq!(p.coset_key(&p.nf_multiply(&x, &g), CosetKind::G1), p.coset_key(&g, CosetKind::G1));
        assert_eq!(p.coset_key(&p.nf_multiply(&y, &g), CosetKind::G2), p.coset_key(&g, CosetKind::G2));
        assert_eq!(p.coset_key(&p.nf_multiply(&z, &g), CosetKind::H), p.coset_key(&g, CosetKind::H));
        let k = klein_bottle();
        let g = k.reduce("x t^-1 x^2 t x").unwrap();
        let x = k.reduce("x^3").unwrap();
        assert_eq!(k.coset_key(&k.nf_multiply(&x, &g), CosetKind::H), k.coset_key(&g, CosetKind::H));
    }

    #[test]
    fn show_round_trips() {
        for p in all() {
            for w in ["", "a b a", "x y^-1 x^3", "t x t^-1 x^-1", "t^2 t^-1"] {
                if let Ok(nf) = p.reduce(w) {
                    assert_eq!(p.reduce(&p.show(&nf)).unwrap(), nf, "{} {}", p.name, w);
                }
            }
        }
    }

    #[test]
    fn unknown_symbol_is_error() {
        assert!(trefoil().reduce("x q").is_err());
    }

    #[test]
    fn to_factor_round_trip() {
        let p = trefoil();
        let g = p.g1.parse("x^5").unwrap();
        let nf = p.from_factor(Side::First, &g);
        assert_eq!(p.to_factor(&nf, Side::First), Some(g));
        assert_eq!(p.to_factor(&p.reduce("y").unwrap(), Side::First), None);
        let k = klein_bottle();
        let h = k.h.parse("z^3").unwrap();
        assert_eq!(k.to_h(&k.from_h(&h)), Some(h));
    }
}
