//! Integral group rings, matrices over them, and coset decompositions of elements of Z[G].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::amalgam::{CosetKind, NormalForm, Presentation, Side};
use crate::groups::{BaseElement, Group};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring mismatch: `{left}` against `{right}`")]
    Tag { left: String, right: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Finite formal sum of group elements with nonzero integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement<E: Ord> {
    terms: BTreeMap<E, BigInt>,
}

impl<E: Ord> Default for RingElement<E> {
    fn default() -> Self {
        RingElement { terms: BTreeMap::new() }
    }
}

impl<E: Ord + Clone> RingElement<E> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(g: E, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(g, c.into());
        out
    }

    pub fn unit(g: E) -> Self {
        Self::monomial(g, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (E, BigInt)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn add_term(&mut self, g: E, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &E) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &E> {
        self.terms.keys()
    }

    /// Image under the augmentation Z[G] -> Z.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RingElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        RingElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect() }
    }

    pub fn mul<G: Group<Elem = E>>(&self, ring: &G, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(ring.mul(a, b), x * y);
            }
        }
        out
    }

    /// Left multiplication by a group element.
    pub fn left_shift<G: Group<Elem = E>>(&self, ring: &G, g: &E) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (ring.mul(g, a), c.clone())))
    }

    /// Right multiplication by a group element.
    pub fn right_shift<G: Group<Elem = E>>(&self, ring: &G, g: &E) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (ring.mul(a, g), c.clone())))
    }

    /// Termwise image under a map of groups.
    pub fn map<F: Ord + Clone>(&self, mut f: impl FnMut(&E) -> F) -> RingElement<F> {
        RingElement::from_terms(self.terms.iter().map(|(g, c)| (f(g), c.clone())))
    }

    /// The element `c * g` when this has exactly one term.
    pub fn as_monomial(&self) -> Option<(&E, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn render(&self, mut show: impl FnMut(&E) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let word = show(g);
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if word == "e" {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&word);
            } else {
                out.push_str(&format!("{mag}*{word}"));
            }
        }
        out
    }
}

/// Matrix over a tagged group ring, row-major. Module elements are row vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingMatrix<E: Ord> {
    pub ring: Arc<str>,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<RingElement<E>>,
}

impl<E: Ord + Clone> RingMatrix<E> {
    pub fn zeros(ring: &Arc<str>, rows: usize, cols: usize) -> Self {
        RingMatrix { ring: ring.clone(), rows, cols, entries: vec![RingElement::zero(); rows * cols] }
    }

    pub fn identity(ring: &Arc<str>, n: usize, one: &E) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, RingElement::unit(one.clone()));
        }
        m
    }

    pub fn from_rows(ring: &Arc<str>, cols: usize, rows: Vec<Vec<RingElement<E>>>) -> Result<Self, RingError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(RingError::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            entries.extend(r);
        }
        Ok(RingMatrix { ring: ring.clone(), rows: n, cols, entries })
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement<E> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement<E>) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut RingElement<E> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[RingElement<E>] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &RingElement<E>)> {
        self.entries.iter().enumerate().map(move |(k, x)| (k / self.cols.max(1), k % self.cols.max(1), x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElement::is_zero)
    }

    fn same_shape(&self, other: &Self) -> Result<(), RingError> {
        if self.ring != other.ring {
            return Err(RingError::Tag { left: self.ring.to_string(), right: other.ring.to_string() });
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(RingError::Shape(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect();
        Ok(RingMatrix { entries, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RingMatrix { entries: self.entries.iter().map(RingElement::neg).collect(), ..self.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        RingMatrix { entries: self.entries.iter().map(|x| x.scale(k)).collect(), ..self.clone() }
    }

    pub fn mul<G: Group<Elem = E>>(&self, ring: &G, other: &Self) -> Result<Self, RingError> {
        for tag in [&self.ring, &other.ring] {
            if **tag != *ring.name() {
                return Err(RingError::Tag { left: tag.to_string(), right: ring.name().to_string() });
            }
        }
        if self.cols != other.rows {
            return Err(RingError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let prod = a.mul(ring, b);
                        let slot = out.entry_mut(i, j);
                        *slot = slot.add(&prod);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copies `m` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, m: &Self) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r0 + i, c0 + j, m.get(i, j).clone());
            }
        }
    }

    /// Sub-block with the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(&self.ring, rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Entrywise image under a ring map, retagged.
    pub fn map<F: Ord + Clone>(&self, ring: &Arc<str>, mut f: impl FnMut(&E) -> F) -> RingMatrix<F> {
        RingMatrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x.map(&mut f)).collect(),
        }
    }

    /// Largest number of terms in any entry.
    pub fn max_terms(&self) -> usize {
        self.entries.iter().map(RingElement::len).max().unwrap_or(0)
    }
}

/// `{coset_key(g, kind) : g in support(x)}`.
pub fn support_cosets(p: &Presentation, x: &RingElement<NormalForm>, kind: CosetKind) -> BTreeSet<NormalForm> {
    x.support().map(|g| p.coset_key_unchecked(g, kind)).collect()
}

/// Component of `x` on the coset with key `c`, written over the subgroup ring:
/// terms `g = gamma * c` contribute `coeff * gamma`.
pub fn restrict_component(
    p: &Presentation,
    x: &RingElement<NormalForm>,
    kind: CosetKind,
    c: &NormalForm,
) -> RingElement<BaseElement> {
    let c_inv = p.nf_invert(c);
    let mut out = RingElement::zero();
    for (g, k) in x.terms() {
        if p.coset_key_unchecked(g, kind) != *c {
            continue;
        }
        let gamma = p.nf_multiply(g, &c_inv);
        let elem = match kind {
            CosetKind::G1 => p.to_factor(&gamma, Side::First),
            CosetKind::G2 => p.to_factor(&gamma, Side::Second),
            CosetKind::H => p.to_h(&gamma),
        }
        .expect("coset component lies in the subgroup");
        out.add_term(elem, k.clone());
    }
    out
}

/// Inverse of [`restrict_component`]: `sum coeff * gamma * c` in Z[G].
pub fn induce(p: &Presentation, y: &RingElement<BaseElement>, kind: CosetKind, c: &NormalForm) -> RingElement<NormalForm> {
    RingElement::from_terms(y.terms().map(|(gamma, k)| {
        let g = match kind {
            CosetKind::G1 => p.from_factor(Side::First, gamma),
            CosetKind::G2 => p.from_factor(Side::Second, gamma),
            CosetKind::H => p.from_h(gamma),
        };
        (p.nf_multiply(&g, c), k.clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::desk::*;

    fn el(p: &Presentation, terms: &[(i64, &str)]) -> RingElement<NormalForm> {
        RingElement::from_terms(terms.iter().map(|(c, w)| (p.reduce(w).unwrap(), BigInt::from(*c))))
    }

    #[test]
    fn products() {
        let c = circle();
        let g = c.reduce("t^2").unwrap();
        let x = RingElement::unit(g.clone()).mul(&c, &RingElement::unit(c.nf_invert(&g)));
        assert_eq!(x, RingElement::unit(c.identity_nf()));
        let a = el(&c, &[(1, "t"), (-1, "")]);
        let b = el(&c, &[(1, "t"), (1, "")]);
        assert_eq!(a.mul(&c, &b), el(&c, &[(1, "t^2"), (-1, "")]));
        let d = infinite_dihedral();
        let s = el(&d, &[(1, "a"), (1, "b")]);
        assert_eq!(s.mul(&d, &s), el(&d, &[(2, ""), (1, "a b"), (1, "b a")]));
    }

    #[test]
    fn supports() {
        let c = circle();
        assert!(support_cosets(&c, &RingElement::zero(), CosetKind::H).is_empty());
        let x = el(&c, &[(1, "t"), (-1, "")]);
        assert_eq!(support_cosets(&c, &x, CosetKind::H).len(), 2);
        let d = infinite_dihedral();
        let y = el(&d, &[(1, ""), (1, "a")]);
        assert_eq!(support_cosets(&d, &y, CosetKind::G1), BTreeSet::from([d.identity_nf()]));
    }

    #[test]
    fn restriction_examples() {
        let d = infinite_dihedral();
        let one = RingElement::unit(d.identity_nf());
        let r = restrict_component(&d, &one, CosetKind::G1, &d.identity_nf());
        assert_eq!(r, RingElement::unit(d.g1.identity()));
        let t = trefoil();
        let x3 = el(&t, &[(1, "x^3")]);
        let key = t.coset_key(&t.reduce("x").unwrap(), CosetKind::G1).unwrap();
        let r = restrict_component(&t, &x3, CosetKind::G1, &key);
        assert_eq!(r, RingElement::unit(t.g1.parse("x^3").unwrap()));
        let b = el(&d, &[(3, "b")]);
        assert!(restrict_component(&d, &b, CosetKind::G1, &d.identity_nf()).is_zero());
    }

    #[test]
    fn decomposition_identity() {
        for p in all() {
            let (vs, es) = crate::tree::ball(&p, 3, 2);
            let mut x = RingElement::zero();
            for (i, g) in vs.iter().map(|v| &v.key).chain(es.iter().map(|e| &e.key)).enumerate() {
                x.add_term(g.clone(), BigInt::from(i as i64 % 7 - 3));
            }
            for kind in [CosetKind::G1, CosetKind::H] {
                let mut back = RingElement::zero();
                for c in support_cosets(&p, &x, kind) {
                    back = back.add(&induce(&p, &restrict_component(&p, &x, kind, &c), kind, &c));
                }
                assert_eq!(back, x, "{}", p.name);
            }
        }
    }

    #[test]
    fn matrix_products_and_tags() {
        let c = circle();
        let tag: Arc<str> = c.id().clone();
        let m = RingMatrix::from_rows(&tag, 1, vec![vec![el(&c, &[(1, "t"), (-1, "")])]]).unwrap();
        let sq = m.mul(&c, &m).unwrap();
        assert_eq!(*sq.get(0, 0), el(&c, &[(1, "t^2"), (-2, "t"), (1, "")]));
        let other = RingMatrix::<NormalForm>::zeros(&Arc::from("other"), 1, 1);
        assert!(m.add(&other).is_err());
        assert_eq!(el(&c, &[(1, "t"), (-1, "")]).render(|g| c.show(g)), "-1 + t");
    }
}
