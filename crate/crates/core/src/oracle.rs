//! Exact integer linear algebra used to certify splittings: Smith normal form,
//! integral homology, tree exactness, windowed acyclicity of cones, homotopy identities.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::amalgam::Presentation;
use crate::chain::{mapping_cone, ChainComplex, ChainMap, CylinderData};
use crate::groupring::RingMatrix;
use crate::groups::Group;
use crate::tree::{endpoints, FiniteSubtree, TreeVertex};

/// Dense integer matrix acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<BigInt>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        IntegerMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }

    /// Augmentation image of a group ring matrix.
    pub fn augment<E: Ord + Clone>(m: &RingMatrix<E>) -> Self {
        let mut out = Self::zeros(m.rows, m.cols);
        for (i, j, x) in m.entries() {
            out.data[i][j] = x.augmentation();
        }
        out
    }
}

/// `left * M * right = diag(factors, 0...)` with unimodular `left`, `right`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub rank: usize,
    pub factors: Vec<BigInt>,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
}

impl Smith {
    pub fn diagonal(&self, rows: usize, cols: usize) -> IntegerMatrix {
        let mut d = IntegerMatrix::zeros(rows, cols);
        for (k, f) in self.factors.iter().enumerate() {
            d.data[k][k] = f.clone();
        }
        d
    }

    /// Re-multiplies the transforms against `m`.
    pub fn verify(&self, m: &IntegerMatrix) -> bool {
        let d = self.left.mul(m).mul(&self.right);
        let divides = self.factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        divides && d == self.diagonal(m.rows, m.cols) && self.factors.iter().all(Signed::is_positive)
    }

    /// Integer vector `y` with `y M = z`, if one exists.
    pub fn solve_row(&self, m: &IntegerMatrix, z: &[BigInt]) -> Option<Vec<BigInt>> {
        // y M = z  iff  (y left^-1) D = z right
        let w: Vec<BigInt> = (0..m.cols)
            .map(|j| (0..m.cols).map(|k| &z[k] * &self.right.data[k][j]).sum())
            .collect();
        let mut y1 = vec![BigInt::zero(); m.rows];
        for (k, wk) in w.iter().enumerate() {
            if k < self.rank {
                let (q, r) = wk.div_rem(&self.factors[k]);
                if !r.is_zero() {
                    return None;
                }
                y1[k] = q;
            } else if !wk.is_zero() {
                return None;
            }
        }
        Some((0..m.rows).map(|j| (0..m.rows).map(|k| &y1[k] * &self.left.data[k][j]).sum()).collect())
    }

    /// Basis of the left kernel `{x : x M = 0}`: the last rows of `left`.
    pub fn left_kernel(&self) -> Vec<Vec<BigInt>> {
        self.left.data[self.rank..].to_vec()
    }
}

fn swap_cols(m: &mut IntegerMatrix, a: usize, b: usize) {
    if a != b {
        for row in &mut m.data {
            row.swap(a, b);
        }
    }
}

fn row_axpy(m: &mut IntegerMatrix, dst: usize, q: &BigInt, src: usize) {
    if q.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (lo, hi) = m.data.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.data.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(m: &mut IntegerMatrix, dst: usize, q: &BigInt, src: usize) {
    if q.is_zero() {
        return;
    }
    for row in &mut m.data {
        if !row[src].is_zero() {
            let v = q * &row[src];
            row[dst] -= v;
        }
    }
}

/// Smith normal form by exact Euclidean elimination.
pub fn smith(m: &IntegerMatrix) -> Smith {
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(m.rows);
    let mut v = IntegerMatrix::identity(m.cols);
    let mut t = 0;
    while t < m.rows.min(m.cols) {
        let pivot = (t..m.rows)
            .flat_map(|i| (t..m.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a.data[i][j].is_zero())
            .min_by_key(|&(i, j)| a.data[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        a.data.swap(t, pi);
        u.data.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m.rows {
                if !a.data[i][t].is_zero() {
                    let q = a.data[i][t].div_floor(&a.data[t][t]);
                    row_axpy(&mut a, i, &q, t);
                    row_axpy(&mut u, i, &q, t);
                    clean &= a.data[i][t].is_zero();
                }
            }
            for j in t + 1..m.cols {
                if !a.data[t][j].is_zero() {
                    let q = a.data[t][j].div_floor(&a.data[t][t]);
                    col_axpy(&mut a, j, &q, t);
                    col_axpy(&mut v, j, &q, t);
                    clean &= a.data[t][j].is_zero();
                }
            }
            if !clean {
                // move the smallest remainder in row or column t to the pivot
                let best_row = (t + 1..m.rows).filter(|&i| !a.data[i][t].is_zero()).min_by_key(|&i| a.data[i][t].abs());
                let best_col = (t + 1..m.cols).filter(|&j| !a.data[t][j].is_zero()).min_by_key(|&j| a.data[t][j].abs());
                match (best_row, best_col) {
                    (Some(i), Some(j)) if a.data[t][j].abs() < a.data[i][t].abs() => {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                    }
                    (Some(i), _) => {
                        a.data.swap(t, i);
                        u.data.swap(t, i);
                    }
                    (None, Some(j)) => {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                    }
                    (None, None) => {}
                }
                continue;
            }
            let p = a.data[t][t].clone();
            let bad = (t + 1..m.rows).find(|&i| (t + 1..m.cols).any(|j| !a.data[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, &minus_one, i);
                    row_axpy(&mut u, t, &minus_one, i);
                }
                None => break,
            }
        }
        if a.data[t][t].is_negative() {
            for x in a.data[t].iter_mut().chain(u.data[t].iter_mut()) {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let factors: Vec<BigInt> = (0..t).map(|k| a.data[k][k].clone()).collect();
    Smith { rank: t, factors, left: u, right: v }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<String>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Homology of `Z^{c_n} -> ... -> Z^{c_0}` with `diffs[r - 1] = d_r` acting on rows.
/// The input must be a complex.
pub fn integer_homology(ranks: &[usize], diffs: &[IntegerMatrix]) -> Vec<HomologyGroup> {
    let snfs: Vec<Smith> = diffs.iter().map(smith).collect();
    (0..ranks.len())
        .map(|r| {
            let out_rank = if r >= 1 { snfs[r - 1].rank } else { 0 };
            let (in_rank, torsion) = match snfs.get(r) {
                Some(s) => (
                    s.rank,
                    s.factors.iter().filter(|f| !f.is_one()).map(|f| f.to_string()).collect(),
                ),
                None => (0, Vec::new()),
            };
            HomologyGroup { betti: ranks[r] - out_rank - in_rank, torsion }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeExactness {
    pub exact: bool,
    pub vertices: usize,
    pub edges: usize,
    pub boundary_rank: usize,
    pub augmentation_rank: usize,
}

/// Exactness of `0 -> Z^{|E| c} -> Z^{|V| c} -> Z^c -> 0` for the augmented chains of `u`.
pub fn tree_exactness(p: &Presentation, u: &FiniteSubtree, c: usize) -> TreeExactness {
    let idx: BTreeMap<&TreeVertex, usize> = u.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let (nv, ne) = (u.vertices.len(), u.edges.len());
    let mut boundary = IntegerMatrix::zeros(ne * c, nv * c);
    for (k, e) in u.edges.iter().enumerate() {
        let (a, b) = endpoints(p, e);
        for j in 0..c {
            if let Some(&ia) = idx.get(&a) {
                boundary.data[k * c + j][ia * c + j] -= 1;
            }
            if let Some(&ib) = idx.get(&b) {
                boundary.data[k * c + j][ib * c + j] += 1;
            }
        }
    }
    let mut aug = IntegerMatrix::zeros(nv * c, c);
    for i in 0..nv {
        for j in 0..c {
            aug.data[i * c + j][j] = BigInt::one();
        }
    }
    let sb = smith(&boundary);
    let sa = smith(&aug);
    // dangling edges break d d = 0, and then there is no homology to speak of
    let exact = boundary.mul(&aug).is_zero()
        && integer_homology(&[c, nv * c, ne * c], &[aug.clone(), boundary.clone()]).iter().all(HomologyGroup::is_zero)
        && sb.rank == ne * c
        && sa.rank == c;
    TreeExactness { exact, vertices: nv, edges: ne, boundary_rank: sb.rank, augmentation_rank: sa.rank }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConeVerdict {
    /// Exact over the whole group ring (finite groups).
    Acyclic,
    /// Every cycle on the inner window bounds a chain on the window.
    AcyclicOnWindow { window: usize, margin: usize, elements: usize },
    /// Homology survives after tensoring down to Z, so the cone is not acyclic.
    NotAcyclic { degree: usize, homology: HomologyGroup },
    Inconclusive { degree: Option<usize>, reason: String },
}

impl ConeVerdict {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, ConeVerdict::Acyclic | ConeVerdict::AcyclicOnWindow { .. })
    }
}

/// Expands a group ring complex over the listed elements: basis `(g, i)` for `g` in `rows_at[r]`.
fn expand<G: Group>(
    ring: &G,
    d: &RingMatrix<G::Elem>,
    rows_at: &[G::Elem],
    col_index: &mut BTreeMap<(G::Elem, usize), usize>,
    grow: bool,
) -> Vec<BTreeMap<usize, BigInt>> {
    let mut out = Vec::new();
    for g in rows_at {
        for i in 0..d.rows {
            let mut row = BTreeMap::new();
            for j in 0..d.cols {
                for (s, k) in d.get(i, j).terms() {
                    let key = (ring.mul(g, s), j);
                    let next = col_index.len();
                    let col = match col_index.get(&key) {
                        Some(c) => *c,
                        None if grow => {
                            col_index.insert(key, next);
                            next
                        }
                        None => continue,
                    };
                    *row.entry(col).or_insert_with(BigInt::zero) += k;
                }
            }
            out.push(row);
        }
    }
    out
}

type SparseRow = BTreeMap<usize, BigInt>;

/// `dst -= q src`, dropping zeros.
fn sparse_axpy(dst: &mut SparseRow, q: &BigInt, src: &SparseRow) {
    for (c, y) in src {
        let x = dst.entry(*c).or_insert_with(BigInt::zero);
        *x -= q * y;
        if x.is_zero() {
            dst.remove(c);
        }
    }
}

/// `a x + b y`.
fn sparse_comb(a: &BigInt, x: &SparseRow, b: &BigInt, y: &SparseRow) -> SparseRow {
    let mut out: SparseRow = x.iter().map(|(c, v)| (*c, a * v)).filter(|(_, v)| !v.is_zero()).collect();
    sparse_axpy(&mut out, &-b, y);
    out
}

/// Integer row lattice in echelon form: one basis row per leading column.
///
/// Colliding pivots are merged by a unimodular gcd step, so the rows always
/// span exactly the lattice of everything inserted.
#[derive(Default)]
struct Lattice {
    rows: BTreeMap<usize, SparseRow>,
}

impl Lattice {
    fn insert(&mut self, mut v: SparseRow) {
        while let Some((&c, x)) = v.iter().next() {
            let x = x.clone();
            let Some(p) = self.rows.remove(&c) else {
                self.rows.insert(c, v);
                return;
            };
            let y = &p[&c];
            if x.is_multiple_of(y) {
                sparse_axpy(&mut v, &(&x / y), &p);
                self.rows.insert(c, p);
                continue;
            }
            let eg = x.extended_gcd(y);
            let pivot = sparse_comb(&eg.x, &v, &eg.y, &p);
            let rest = sparse_comb(&(y / &eg.gcd), &v, &-(&x / &eg.gcd), &p);
            self.rows.insert(c, pivot);
            v = rest;
        }
    }

    fn contains(&self, mut v: SparseRow) -> bool {
        while let Some((&c, x)) = v.iter().next() {
            let Some(p) = self.rows.get(&c) else { return false };
            let (q, rem) = x.div_rem(&p[&c]);
            if !rem.is_zero() {
                return false;
            }
            sparse_axpy(&mut v, &q, p);
        }
        true
    }
}

/// Integer basis of `{y : y M = 0}` for the sparse rows of `M`, from the echelon form of `[M | 1]`.
fn left_kernel_sparse(rows: Vec<SparseRow>, cols: usize) -> Vec<SparseRow> {
    let mut lattice = Lattice::default();
    for (k, mut row) in rows.into_iter().enumerate() {
        row.insert(cols + k, BigInt::one());
        lattice.insert(row);
    }
    lattice
        .rows
        .range(cols..)
        .map(|(_, row)| row.iter().map(|(c, x)| (c - cols, x.clone())).collect())
        .collect()
}

/// Ball of radius `radius` in the Cayley graph for the symmetric set `gens`,
/// or `None` once it holds more than `limit` elements.
fn cayley_ball<G: Group>(ring: &G, gens: &BTreeSet<G::Elem>, radius: usize, limit: usize) -> Option<Vec<Vec<G::Elem>>> {
    let mut seen = BTreeSet::from([ring.identity()]);
    let mut shells = vec![vec![ring.identity()]];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in shells.last().unwrap() {
            for s in gens {
                let h = ring.mul(g, s);
                if seen.insert(h.clone()) {
                    next.push(h);
                    if seen.len() > limit {
                        return None;
                    }
                }
            }
        }
        shells.push(next);
    }
    Some(shells)
}

/// Largest number of expanded basis elements `(g, i)` a window may hold.
pub const WINDOW_BUDGET: usize = 60_000;

/// Certifies that the mapping cone of `f` is acyclic.
///
/// Finite groups are checked exactly. Otherwise homology of the cone tensored
/// down to Z refutes acyclicity, and a positive answer means every cycle on
/// the Cayley ball of radius `window - 1` (generated by the supports of the
/// cone differentials) bounds a chain within a further `margin` steps.
pub fn acyclic_cone<G: Group>(ring: &G, f: &ChainMap<G::Elem>, window: usize) -> ConeVerdict {
    match mapping_cone(ring, f) {
        Ok(cone) => acyclic_complex(ring, &cone, window),
        Err(e) => ConeVerdict::Inconclusive { degree: None, reason: e.to_string() },
    }
}

pub fn acyclic_complex<G: Group>(ring: &G, cone: &ChainComplex<G::Elem>, window: usize) -> ConeVerdict {
    let top = cone.top();
    let flat: Vec<IntegerMatrix> = (1..=top).map(|r| IntegerMatrix::augment(&cone.d(r))).collect();
    for (r, h) in integer_homology(&cone.ranks, &flat).into_iter().enumerate() {
        if !h.is_zero() {
            return ConeVerdict::NotAcyclic { degree: r, homology: h };
        }
    }
    let mut gens: BTreeSet<G::Elem> = BTreeSet::new();
    for r in 1..=top {
        for (_, _, x) in cone.d(r).entries() {
            for s in x.support() {
                gens.insert(s.clone());
                gens.insert(ring.inv(s));
            }
        }
    }
    // fillers may sit outside the cycles they fill: allow one generator step
    // per nonzero degree (the interaction radius)
    let margin = (1..=top).filter(|&r| !cone.d(r).is_zero()).count().max(1);
    let (elements, inner, exact) = match ring.finite_elements() {
        Some(all) => (all.clone(), all, true),
        None => {
            if window == 0 {
                return ConeVerdict::Inconclusive { degree: None, reason: "window must be at least 1".into() };
            }
            let widest = cone.ranks.iter().copied().max().unwrap_or(0).max(1);
            let Some(shells) = cayley_ball(ring, &gens, window - 1 + margin, WINDOW_BUDGET / widest) else {
                return ConeVerdict::Inconclusive {
                    degree: None,
                    reason: format!("the window of radius {} exceeds {WINDOW_BUDGET} basis elements", window - 1 + margin),
                };
            };
            let inner: Vec<G::Elem> = shells[..window].iter().flatten().cloned().collect();
            (shells.into_iter().flatten().collect(), inner, false)
        }
    };
    for r in 0..=top {
        // cycles supported on the inner window
        let mut cols = BTreeMap::new();
        let cycles: Vec<SparseRow> = if r == 0 {
            (0..inner.len() * cone.rank(0)).map(|k| SparseRow::from([(k, BigInt::one())])).collect()
        } else {
            let rows = expand(ring, &cone.d(r), &inner, &mut cols, true);
            left_kernel_sparse(rows, cols.len())
        };
        if cycles.is_empty() {
            continue;
        }
        // boundaries of chains on the full window, in coordinates indexed by (element, basis)
        let mut index: BTreeMap<(G::Elem, usize), usize> = BTreeMap::new();
        for g in &inner {
            for i in 0..cone.rank(r) {
                let n = index.len();
                index.insert((g.clone(), i), n);
            }
        }
        let mut boundaries = Lattice::default();
        if r < top {
            for row in expand(ring, &cone.d(r + 1), &elements, &mut index, true) {
                boundaries.insert(row);
            }
        }
        if cycles.iter().any(|z| !boundaries.contains(z.clone())) {
            return if exact {
                ConeVerdict::NotAcyclic { degree: r, homology: HomologyGroup { betti: 0, torsion: vec!["unbounded cycle".into()] } }
            } else {
                ConeVerdict::Inconclusive { degree: Some(r), reason: "a window cycle does not bound inside the window".into() }
            };
        }
    }
    if exact {
        ConeVerdict::Acyclic
    } else {
        ConeVerdict::AcyclicOnWindow { window, margin, elements: elements.len() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyFault {
    pub degree: usize,
    pub identity: &'static str,
}

/// Checks `incl p = 1` on the end and `h d + d h = p incl - 1` on the cylinder, exactly.
pub fn homotopy_identities<G: Group>(ring: &G, c: &CylinderData<G::Elem>) -> Result<(), HomotopyFault> {
    let one = ring.identity();
    let top = c.complex.top();
    for r in 0..=top {
        let fault = |identity| HomotopyFault { degree: r, identity };
        let w = c.incl.source.rank(r);
        let pi = c.incl.at(r).mul(ring, &c.proj.at(r)).map_err(|_| fault("projection after inclusion"))?;
        if pi != RingMatrix::identity(&c.complex.ring, w, &one) {
            return Err(fault("projection after inclusion"));
        }
        let n = c.complex.rank(r);
        let h_up = c.homotopy.get(r).cloned().unwrap_or_else(|| RingMatrix::zeros(&c.complex.ring, n, c.complex.rank(r + 1)));
        let hd = h_up.mul(ring, &c.complex.d(r + 1)).map_err(|_| fault("homotopy shape"))?;
        let total = if r >= 1 {
            let dh = c.complex.d(r).mul(ring, &c.homotopy[r - 1]).map_err(|_| fault("homotopy shape"))?;
            hd.add(&dh).map_err(|_| fault("homotopy shape"))?
        } else {
            hd
        };
        let ip = c.proj.at(r).mul(ring, &c.incl.at(r)).map_err(|_| fault("homotopy shape"))?;
        let want = ip.sub(&RingMatrix::identity(&c.complex.ring, n, &one)).map_err(|_| fault("homotopy shape"))?;
        if total != want {
            return Err(fault("dh + hd = incl p - 1"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::desk::*;
    use crate::chain::{mapping_cylinder, matrix_from};
    use crate::groupring::RingElement;
    use crate::groups::{BaseElement, BaseGroup};
    use crate::tree::{base_edge, base_vertex, vertex_of};

    fn sparse(row: &[BigInt]) -> SparseRow {
        row.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect()
    }

    #[test]
    fn sparse_lattice_agrees_with_smith() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (rows, cols) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            let m = IntegerMatrix::from_i64(&data);
            let s = smith(&m);
            let mut lattice = Lattice::default();
            for row in &m.data {
                lattice.insert(sparse(row));
            }
            assert_eq!(lattice.rows.len(), s.rank);
            for _ in 0..5 {
                let z: Vec<BigInt> = (0..cols).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect();
                assert_eq!(lattice.contains(sparse(&z)), s.solve_row(&m, &z).is_some(), "{data:?} {z:?}");
            }
            let kernel = left_kernel_sparse(m.data.iter().map(|r| sparse(r)).collect(), cols);
            assert_eq!(kernel.len(), rows - s.rank);
            for y in &kernel {
                let image: Vec<BigInt> = (0..cols).map(|j| y.iter().map(|(i, x)| x * &m.data[*i][j]).sum()).collect();
                assert!(image.iter().all(Zero::is_zero));
            }
            // the kernel basis is saturated: it spans every integer kernel vector smith finds
            let mut span = Lattice::default();
            for y in kernel {
                span.insert(y);
            }
            for y in s.left_kernel() {
                assert!(span.contains(sparse(&y)), "{data:?}");
            }
        }
    }

    fn factors(m: &IntegerMatrix) -> Vec<i64> {
        let s = smith(m);
        assert!(s.verify(m));
        s.factors.iter().map(|f| i64::try_from(f).unwrap()).collect()
    }

    #[test]
    fn smith_examples() {
        assert_eq!(factors(&IntegerMatrix::identity(3)), vec![1, 1, 1]);
        assert_eq!(factors(&IntegerMatrix::from_i64(&[vec![2, 0], vec![0, 4]])), vec![2, 4]);
        assert_eq!(factors(&IntegerMatrix::from_i64(&[vec![2, 1], vec![0, 3]])), vec![1, 6]);
        assert_eq!(factors(&IntegerMatrix::from_i64(&[vec![6, 0], vec![0, 4]])), vec![2, 12]);
        assert_eq!(factors(&IntegerMatrix::from_i64(&[vec![0, 0, 0], vec![0, 0, 5]])), vec![5]);
    }

    #[test]
    fn solve_and_kernel() {
        let m = IntegerMatrix::from_i64(&[vec![2, 4], vec![1, 3], vec![1, 1]]);
        let s = smith(&m);
        let z = vec![BigInt::from(3), BigInt::from(7)];
        let y = s.solve_row(&m, &z).unwrap();
        let back = IntegerMatrix { rows: 1, cols: 3, data: vec![y] }.mul(&m);
        assert_eq!(back.data[0], z);
        assert!(s.solve_row(&IntegerMatrix::from_i64(&[vec![2, 0]]), &[BigInt::from(1), BigInt::zero()]).is_none());
        for k in s.left_kernel() {
            let prod = IntegerMatrix { rows: 1, cols: 3, data: vec![k] }.mul(&m);
            assert!(prod.is_zero());
        }
    }

    #[test]
    fn homology_of_rp2_cells() {
        // Z -2-> Z -0-> Z : H0 = Z, H1 = Z/2, H2 = 0
        let h = integer_homology(
            &[1, 1, 1],
            &[IntegerMatrix::from_i64(&[vec![0]]), IntegerMatrix::from_i64(&[vec![2]])],
        );
        assert_eq!(h[0].betti, 1);
        assert_eq!((h[1].betti, h[1].torsion.clone()), (0, vec!["2".to_string()]));
        assert!(h[2].is_zero());
    }

    #[test]
    fn tree_exactness_examples() {
        let p = infinite_dihedral();
        let one = FiniteSubtree::single(base_vertex(&p));
        assert!(tree_exactness(&p, &one, 1).exact);
        let h = crate::tree::hull(&p, &[crate::tree::TreeItem::Edge(base_edge(&p))]).unwrap();
        let v = tree_exactness(&p, &h, 2);
        assert!(v.exact);
        assert_eq!((v.boundary_rank, v.edges * 2, v.vertices * 2, v.augmentation_rank), (2, 2, 4, 2));
        let split = FiniteSubtree {
            vertices: [base_vertex(&p), vertex_of(&p, &p.reduce("b").unwrap(), crate::amalgam::Side::First)].into(),
            edges: Default::default(),
        };
        assert!(!tree_exactness(&p, &split, 1).exact);
    }

    fn scalar(g: &BaseGroup, k: i64) -> ChainMap<BaseElement> {
        let pt = ChainComplex::concentrated(g.id(), 1);
        ChainMap::new(pt.clone(), pt, vec![matrix_from(g.id(), 1, vec![vec![RingElement::monomial(g.identity(), k)]])]).unwrap()
    }

    #[test]
    fn cone_examples() {
        let g = BaseGroup::trivial("1");
        assert_eq!(acyclic_cone(&g, &scalar(&g, 1), 2), ConeVerdict::Acyclic);
        assert!(matches!(acyclic_cone(&g, &scalar(&g, 0), 2), ConeVerdict::NotAcyclic { .. }));
        assert!(matches!(acyclic_cone(&g, &scalar(&g, 2), 2), ConeVerdict::NotAcyclic { .. }));
        let c = circle();
        let x = RingElement::unit(c.reduce("t").unwrap()).sub(&RingElement::unit(c.identity_nf()));
        let cc = ChainComplex::new(c.id(), vec![1, 1], vec![matrix_from(c.id(), 1, vec![vec![x]])]).unwrap();
        let id = ChainMap::identity(&c, &cc);
        for l in [1, 2, 4] {
            assert!(acyclic_cone(&c, &id, l).is_acyclic());
        }
        assert!(matches!(acyclic_cone(&c, &id, 0), ConeVerdict::Inconclusive { .. }));
        let zero = ChainMap::zero(&cc, &cc).unwrap();
        assert!(!acyclic_cone(&c, &zero, 2).is_acyclic());
    }

    #[test]
    fn oversized_window_is_inconclusive() {
        let f = free_rank_two();
        let unit = |w: &str| RingElement::unit(f.reduce(w).unwrap());
        let x = unit("x").add(&unit("y")).sub(&unit("").scale(&BigInt::from(2)));
        let cc = ChainComplex::new(f.id(), vec![1, 1], vec![matrix_from(f.id(), 1, vec![vec![x]])]).unwrap();
        let id = ChainMap::identity(&f, &cc);
        assert!(acyclic_cone(&f, &id, 2).is_acyclic());
        match acyclic_cone(&f, &id, 12) {
            ConeVerdict::Inconclusive { degree: None, reason } => assert!(reason.contains("exceeds")),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cone_detects_non_surjective_multiplication() {
        // (t - 1) : Z[t] -> Z[t] alone is not acyclic: H_0 = Z
        let c = circle();
        let x = RingElement::unit(c.reduce("t").unwrap()).sub(&RingElement::unit(c.identity_nf()));
        let cc = ChainComplex::new(c.id(), vec![1, 1], vec![matrix_from(c.id(), 1, vec![vec![x]])]).unwrap();
        assert!(matches!(acyclic_complex(&c, &cc, 2), ConeVerdict::NotAcyclic { degree: 0, .. }));
    }

    #[test]
    fn homotopy_examples() {
        let g = BaseGroup::trivial("1");
        for k in [1, 2] {
            let cyl = mapping_cylinder(&g, &scalar(&g, k)).unwrap();
            assert_eq!(homotopy_identities(&g, &cyl), Ok(()));
        }
        let mut cyl = mapping_cylinder(&g, &scalar(&g, 2)).unwrap();
        cyl.homotopy[0] = cyl.homotopy[0].neg();
        assert!(homotopy_identities(&g, &cyl).is_err());
    }
}
