//! Finite based free chain complexes over a group ring, chain maps, and cylinder constructions.
//!
//! Modules are row vectors, so `d_r` is a `c_r x c_{r-1}` matrix, `d_r d_{r-1} = 0`,
//! and a chain map `f` satisfies `d_r f_{r-1} = f_r d'_r`.

use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::groupring::{RingElement, RingError, RingMatrix};
use crate::groups::Group;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("degree {degree}: {reason}")]
    Degree { degree: usize, reason: String },
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn at(degree: usize, reason: impl Into<String>) -> ChainError {
    ChainError::Degree { degree, reason: reason.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainComplex<E: Ord> {
    pub ring: Arc<str>,
    /// Rank in each degree `0..=top`.
    pub ranks: Vec<usize>,
    /// `diffs[r - 1]` is `d_r`.
    pub diffs: Vec<RingMatrix<E>>,
}

impl<E: Ord + Clone> ChainComplex<E> {
    /// Checks dimensions only; `validate` also checks `d d = 0`.
    pub fn new(ring: &Arc<str>, ranks: Vec<usize>, diffs: Vec<RingMatrix<E>>) -> Result<Self, ChainError> {
        if ranks.is_empty() {
            return Err(at(0, "no degrees"));
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(at(diffs.len(), format!("{} differentials for {} degrees", diffs.len(), ranks.len())));
        }
        for (i, d) in diffs.iter().enumerate() {
            let r = i + 1;
            if d.ring != *ring {
                return Err(RingError::Tag { left: d.ring.to_string(), right: ring.to_string() }.into());
            }
            if (d.rows, d.cols) != (ranks[r], ranks[r - 1]) {
                return Err(at(r, format!("d is {}x{}, ranks are {} and {}", d.rows, d.cols, ranks[r], ranks[r - 1])));
            }
        }
        Ok(ChainComplex { ring: ring.clone(), ranks, diffs })
    }

    pub fn zero(ring: &Arc<str>, top: usize) -> Self {
        ChainComplex {
            ring: ring.clone(),
            ranks: vec![0; top + 1],
            diffs: (0..top).map(|_| RingMatrix::zeros(ring, 0, 0)).collect(),
        }
    }

    /// One free module of rank `c` in degree 0.
    pub fn concentrated(ring: &Arc<str>, c: usize) -> Self {
        ChainComplex { ring: ring.clone(), ranks: vec![c], diffs: Vec::new() }
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, r: usize) -> usize {
        self.ranks.get(r).copied().unwrap_or(0)
    }

    /// `d_r`, or a zero matrix of the right shape outside the stored range.
    pub fn d(&self, r: usize) -> RingMatrix<E> {
        if r >= 1 && r <= self.diffs.len() {
            self.diffs[r - 1].clone()
        } else {
            RingMatrix::zeros(&self.ring, self.rank(r), if r == 0 { 0 } else { self.rank(r - 1) })
        }
    }

    /// Same complex with zero modules appended up to degree `top`.
    pub fn padded(&self, top: usize) -> Self {
        let mut out = self.clone();
        while out.top() < top {
            let r = out.top() + 1;
            out.diffs.push(RingMatrix::zeros(&self.ring, 0, out.rank(r - 1)));
            out.ranks.push(0);
        }
        out
    }

    pub fn validate<G: Group<Elem = E>>(&self, ring: &G) -> Result<(), ChainError> {
        ChainComplex::new(&self.ring, self.ranks.clone(), self.diffs.clone())?;
        for r in 2..=self.top() {
            let dd = self.diffs[r - 1].mul(ring, &self.diffs[r - 2])?;
            if !dd.is_zero() {
                let (i, j, _) = dd.entries().find(|(_, _, x)| !x.is_zero()).unwrap();
                return Err(at(r, format!("d_{r} d_{} has a nonzero entry at ({i}, {j})", r - 1)));
            }
        }
        Ok(())
    }

    /// Entrywise image under a ring map.
    pub fn map_ring<F: Ord + Clone>(&self, ring: &Arc<str>, mut f: impl FnMut(&E) -> F) -> ChainComplex<F> {
        ChainComplex {
            ring: ring.clone(),
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(|d| d.map(ring, &mut f)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, ChainError> {
        if self.ring != other.ring {
            return Err(RingError::Tag { left: self.ring.to_string(), right: other.ring.to_string() }.into());
        }
        let top = self.top().max(other.top());
        let (a, b) = (self.padded(top), other.padded(top));
        let ranks: Vec<usize> = (0..=top).map(|r| a.rank(r) + b.rank(r)).collect();
        let diffs = (1..=top)
            .map(|r| {
                let mut m = RingMatrix::zeros(&self.ring, ranks[r], ranks[r - 1]);
                m.place(0, 0, &a.d(r));
                m.place(a.rank(r), a.rank(r - 1), &b.d(r));
                m
            })
            .collect();
        Ok(ChainComplex { ring: self.ring.clone(), ranks, diffs })
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<E: Ord> {
    pub source: ChainComplex<E>,
    pub target: ChainComplex<E>,
    /// `maps[r]` is `source_r x target_r`.
    pub maps: Vec<RingMatrix<E>>,
}

impl<E: Ord + Clone> ChainMap<E> {
    /// Pads both complexes to a common top degree and checks shapes.
    pub fn new(source: ChainComplex<E>, target: ChainComplex<E>, maps: Vec<RingMatrix<E>>) -> Result<Self, ChainError> {
        if source.ring != target.ring {
            return Err(RingError::Tag { left: source.ring.to_string(), right: target.ring.to_string() }.into());
        }
        let top = source.top().max(target.top()).max(maps.len().saturating_sub(1));
        let (source, target) = (source.padded(top), target.padded(top));
        let mut maps = maps;
        while maps.len() <= top {
            maps.push(RingMatrix::zeros(&source.ring, source.rank(maps.len()), target.rank(maps.len())));
        }
        for (r, m) in maps.iter().enumerate() {
            if m.ring != source.ring {
                return Err(RingError::Tag { left: m.ring.to_string(), right: source.ring.to_string() }.into());
            }
            if (m.rows, m.cols) != (source.rank(r), target.rank(r)) {
                return Err(at(r, format!("map is {}x{}, expected {}x{}", m.rows, m.cols, source.rank(r), target.rank(r))));
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn identity<G: Group<Elem = E>>(ring: &G, c: &ChainComplex<E>) -> Self {
        let one = ring.identity();
        let maps = c.ranks.iter().map(|&n| RingMatrix::identity(&c.ring, n, &one)).collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &ChainComplex<E>, target: &ChainComplex<E>) -> Result<Self, ChainError> {
        ChainMap::new(source.clone(), target.clone(), Vec::new())
    }

    pub fn top(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn at(&self, r: usize) -> RingMatrix<E> {
        self.maps
            .get(r)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(&self.source.ring, self.source.rank(r), self.target.rank(r)))
    }

    /// Checks `d_r f_{r-1} = f_r d'_r` in every degree; the error names the first failing degree.
    pub fn check_squares<G: Group<Elem = E>>(&self, ring: &G) -> Result<(), ChainError> {
        for r in 1..=self.top() {
            let left = self.source.d(r).mul(ring, &self.at(r - 1))?;
            let right = self.at(r).mul(ring, &self.target.d(r))?;
            if left != right {
                return Err(at(r, "chain map square does not commute"));
            }
        }
        Ok(())
    }

    /// `self` followed by `next`.
    pub fn then<G: Group<Elem = E>>(&self, ring: &G, next: &ChainMap<E>) -> Result<Self, ChainError> {
        let top = self.top().max(next.top());
        let maps = (0..=top).map(|r| self.at(r).mul(ring, &next.at(r))).collect::<Result<Vec<_>, _>>()?;
        ChainMap::new(self.source.clone(), next.target.clone(), maps)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(RingMatrix::is_zero)
    }

    pub fn map_ring<F: Ord + Clone>(&self, ring: &Arc<str>, mut f: impl FnMut(&E) -> F) -> ChainMap<F> {
        ChainMap {
            source: self.source.map_ring(ring, &mut f),
            target: self.target.map_ring(ring, &mut f),
            maps: self.maps.iter().map(|m| m.map(ring, &mut f)).collect(),
        }
    }
}

fn sign(k: usize) -> BigInt {
    if k % 2 == 0 {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

/// Mapping cylinder of `e: V -> W` with its projection, inclusion and homotopy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderData<E: Ord> {
    pub complex: ChainComplex<E>,
    pub incl: ChainMap<E>,
    pub proj: ChainMap<E>,
    /// `homotopy[r]` maps degree `r` to degree `r + 1`.
    pub homotopy: Vec<RingMatrix<E>>,
}

/// Degree `r` is `W_r + V_{r-1} + V_r` with rows `[d_W 0 0]`, `[(-1)^r e, d_V, (-1)^(r-1)]`, `[0 0 d_V]`.
pub fn mapping_cylinder<G: Group<Elem = E>, E: Ord + Clone>(ring: &G, e: &ChainMap<E>) -> Result<CylinderData<E>, ChainError> {
    let tag = &e.source.ring;
    let one = ring.identity();
    let (v, w) = (&e.source, &e.target);
    let n = e.top() + 1;
    let vr = |r: isize| if r < 0 { 0 } else { v.rank(r as usize) };
    let offs = |r: usize| (w.rank(r), w.rank(r) + vr(r as isize - 1));
    let ranks: Vec<usize> = (0..=n).map(|r| w.rank(r) + vr(r as isize - 1) + vr(r as isize)).collect();
    let mut diffs = Vec::new();
    for r in 1..=n {
        let mut m = RingMatrix::zeros(tag, ranks[r], ranks[r - 1]);
        let (a, b) = offs(r);
        let (a1, b1) = offs(r - 1);
        m.place(0, 0, &w.d(r));
        m.place(a, 0, &e.at(r - 1).scale(&sign(r)));
        if r >= 2 {
            m.place(a, a1, &v.d(r - 1));
        }
        m.place(a, b1, &RingMatrix::identity(tag, vr(r as isize - 1), &one).scale(&sign(r - 1)));
        m.place(b, b1, &v.d(r));
        diffs.push(m);
    }
    let complex = ChainComplex::new(tag, ranks.clone(), diffs)?;
    let mut incl = Vec::new();
    let mut proj = Vec::new();
    let mut homotopy = Vec::new();
    for r in 0..=n {
        let (_, b) = offs(r);
        let mut i = RingMatrix::zeros(tag, w.rank(r), ranks[r]);
        i.place(0, 0, &RingMatrix::identity(tag, w.rank(r), &one));
        incl.push(i);
        let mut p = RingMatrix::zeros(tag, ranks[r], w.rank(r));
        p.place(0, 0, &RingMatrix::identity(tag, w.rank(r), &one));
        p.place(b, 0, &e.at(r));
        proj.push(p);
        let up = if r < n { ranks[r + 1] } else { 0 };
        let mut h = RingMatrix::zeros(tag, ranks[r], up);
        if r < n {
            let (a_up, _) = offs(r + 1);
            h.place(b, a_up, &RingMatrix::identity(tag, vr(r as isize), &one).scale(&sign(r + 1)));
        }
        homotopy.push(h);
    }
    let wp = w.padded(n);
    let incl = ChainMap::new(wp.clone(), complex.clone(), incl)?;
    let proj = ChainMap::new(complex.clone(), wp, proj)?;
    Ok(CylinderData { complex, incl, proj, homotopy })
}

/// Double mapping cylinder of `e1: V -> W1`, `e2: V -> W2`, with the inclusions of both ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCylinder<E: Ord> {
    pub complex: ChainComplex<E>,
    pub first: ChainMap<E>,
    pub second: ChainMap<E>,
    /// Offsets of the `V_{r-1}` and `W2_r` blocks in degree `r`.
    pub offsets: Vec<(usize, usize)>,
}

/// Degree `r` is `W1_r + V_{r-1} + W2_r` with rows `[d_W1 0 0]`, `[(-1)^r e1, d_V, (-1)^r e2]`, `[0 0 d_W2]`.
pub fn double_mapping_cylinder<G: Group<Elem = E>, E: Ord + Clone>(
    ring: &G,
    e1: &ChainMap<E>,
    e2: &ChainMap<E>,
) -> Result<DoubleCylinder<E>, ChainError> {
    let tag = &e1.source.ring;
    let one = ring.identity();
    let top = e1.top().max(e2.top());
    let v = e1.source.padded(top);
    if e2.source.padded(top) != v {
        return Err(at(0, "the two maps have different sources"));
    }
    let (w1, w2) = (&e1.target, &e2.target);
    let n = top + 1;
    let vr = |r: usize| if r == 0 { 0 } else { v.rank(r - 1) };
    let offs = |r: usize| (w1.rank(r), w1.rank(r) + vr(r));
    let ranks: Vec<usize> = (0..=n).map(|r| w1.rank(r) + vr(r) + w2.rank(r)).collect();
    let mut diffs = Vec::new();
    for r in 1..=n {
        let mut m = RingMatrix::zeros(tag, ranks[r], ranks[r - 1]);
        let (a, b) = offs(r);
        let (a1, b1) = offs(r - 1);
        m.place(0, 0, &w1.d(r));
        m.place(a, 0, &e1.at(r - 1).scale(&sign(r)));
        if r >= 2 {
            m.place(a, a1, &v.d(r - 1));
        }
        m.place(a, b1, &e2.at(r - 1).scale(&sign(r)));
        m.place(b, b1, &w2.d(r));
        diffs.push(m);
    }
    let complex = ChainComplex::new(tag, ranks.clone(), diffs)?;
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    for r in 0..=n {
        let (_, b) = offs(r);
        let mut i = RingMatrix::zeros(tag, w1.rank(r), ranks[r]);
        i.place(0, 0, &RingMatrix::identity(tag, w1.rank(r), &one));
        j1.push(i);
        let mut i = RingMatrix::zeros(tag, w2.rank(r), ranks[r]);
        i.place(0, b, &RingMatrix::identity(tag, w2.rank(r), &one));
        j2.push(i);
    }
    let first = ChainMap::new(w1.padded(n), complex.clone(), j1)?;
    let second = ChainMap::new(w2.padded(n), complex.clone(), j2)?;
    Ok(DoubleCylinder { complex, first, second, offsets: (0..=n).map(offs).collect() })
}

/// Mapping cone of `f: V -> W`: degree `r` is `W_r + V_{r-1}` with rows `[d_W 0]`, `[(-1)^r f, d_V]`.
pub fn mapping_cone<G: Group<Elem = E>, E: Ord + Clone>(ring: &G, f: &ChainMap<E>) -> Result<ChainComplex<E>, ChainError> {
    let zero = ChainComplex::zero(&f.source.ring, f.top());
    let to_zero = ChainMap::zero(&f.source, &zero)?;
    Ok(double_mapping_cylinder(ring, f, &to_zero)?.complex)
}

/// Rows of a matrix as ring elements, for building complexes from literals.
pub fn matrix_from<E: Ord + Clone>(ring: &Arc<str>, cols: usize, rows: Vec<Vec<RingElement<E>>>) -> RingMatrix<E> {
    RingMatrix::from_rows(ring, cols, rows).expect("rectangular literal")
}
