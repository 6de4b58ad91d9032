//! Reduced words in free groups and Stallings folding with source tracking.

use std::collections::{HashMap, VecDeque};

/// Letters are signed generator indices offset by one: `k+1` is the k-th generator, `-(k+1)` its inverse.
pub type Letter = i32;

pub fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn mul(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut out = a.to_vec();
    for &l in b {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inv(a: &[Letter]) -> Vec<Letter> {
    a.iter().rev().map(|l| -l).collect()
}

/// Shortlex key of a letter: x < x^-1 < y < y^-1 < ...
pub fn letter_key(l: Letter) -> u32 {
    let g = l.unsigned_abs() - 1;
    2 * g + u32::from(l < 0)
}

pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let c = letter_key(*x).cmp(&letter_key(*y));
            if c.is_ne() {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Letters of a rank-n free group in shortlex order.
pub fn ordered_letters(rank: usize) -> Vec<Letter> {
    (1..=rank as i32).flat_map(|g| [g, -g]).collect()
}

/// All reduced words of length at most `len`.
pub fn words_up_to(rank: usize, len: usize) -> Vec<Vec<Letter>> {
    let letters = ordered_letters(rank);
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v: Vec<Letter> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[derive(Clone, Debug)]
struct Edge {
    from: usize,
    to: usize,
    label: Letter,
    volt: Vec<Letter>,
    alive: bool,
}

/// Loop at the base vertex whose label is trivial but whose source word is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelWitness(pub Vec<Letter>);

/// Folded graph of a finitely generated subgroup of a free group.
///
/// Each edge carries a word in the source alphabet (the voltage). Every closed
/// path at the base reads a subgroup element whose preimage is the product of voltages.
#[derive(Clone, Debug)]
pub struct Folded {
    pub rank: usize,
    base: usize,
    vertex_alive: Vec<bool>,
    edges: Vec<Edge>,
    step: HashMap<(usize, Letter), (usize, Vec<Letter>)>,
    path: HashMap<usize, (Vec<Letter>, Vec<Letter>)>,
}

impl Folded {
    /// Folds the bouquet of `gens`. With `track` set, a nontrivial voltage on a
    /// trivially labelled loop is reported as a kernel element.
    pub fn new(rank: usize, gens: &[Vec<Letter>], track: bool) -> Result<Self, KernelWitness> {
        let mut g = Folded {
            rank,
            base: 0,
            vertex_alive: vec![true],
            edges: Vec::new(),
            step: HashMap::new(),
            path: HashMap::new(),
        };
        for (i, w) in gens.iter().enumerate() {
            let w = reduce(w);
            if w.is_empty() {
                if track {
                    return Err(KernelWitness(vec![i as Letter + 1]));
                }
                continue;
            }
            let mut cur = 0;
            for (k, &l) in w.iter().enumerate() {
                let next = if k + 1 == w.len() {
                    0
                } else {
                    g.vertex_alive.push(true);
                    g.vertex_alive.len() - 1
                };
                let volt = if k == 0 { vec![i as Letter + 1] } else { Vec::new() };
                g.push_edge(cur, next, l, volt);
                cur = next;
            }
        }
        g.fold(track)?;
        g.index();
        Ok(g)
    }

    fn push_edge(&mut self, from: usize, to: usize, l: Letter, volt: Vec<Letter>) {
        if l > 0 {
            self.edges.push(Edge { from, to, label: l, volt, alive: true });
        } else {
            self.edges.push(Edge { from: to, to: from, label: -l, volt: inv(&volt), alive: true });
        }
    }

    fn traverse(&self, e: usize, forward: bool) -> (usize, Vec<Letter>) {
        let ed = &self.edges[e];
        if forward {
            (ed.to, ed.volt.clone())
        } else {
            (ed.from, inv(&ed.volt))
        }
    }

    fn find_fold(&self) -> Option<(usize, bool, usize, bool)> {
        let mut seen: HashMap<(usize, Letter), (usize, bool)> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !e.alive {
                continue;
            }
            for (v, lab, fwd) in [(e.from, e.label, true), (e.to, -e.label, false)] {
                if let Some(&(j, fj)) = seen.get(&(v, lab)) {
                    if j != i || fj != fwd {
                        return Some((j, fj, i, fwd));
                    }
                } else {
                    seen.insert((v, lab), (i, fwd));
                }
            }
        }
        None
    }

    fn gauge(&mut self, x: usize, beta: &[Letter]) {
        let bi = inv(beta);
        for e in self.edges.iter_mut().filter(|e| e.alive) {
            if e.to == x {
                e.volt = mul(&e.volt, beta);
            }
            if e.from == x {
                e.volt = mul(&bi, &e.volt);
            }
        }
    }

    fn fold(&mut self, track: bool) -> Result<(), KernelWitness> {
        while let Some((ea, fa, eb, fb)) = self.find_fold() {
            let (wa, va) = self.traverse(ea, fa);
            let (wb, vb) = self.traverse(eb, fb);
            if wa != wb {
                let (keep, gone, vk, vg) = if wb != self.base { (wa, wb, va, vb) } else { (wb, wa, vb, va) };
                let beta = mul(&inv(&vg), &vk);
                self.gauge(gone, &beta);
                for e in self.edges.iter_mut().filter(|e| e.alive) {
                    if e.from == gone {
                        e.from = keep;
                    }
                    if e.to == gone {
                        e.to = keep;
                    }
                }
                self.vertex_alive[gone] = false;
            }
            let (_, va) = self.traverse(ea, fa);
            let (_, vb) = self.traverse(eb, fb);
            if va != vb && track {
                return Err(KernelWitness(mul(&va, &inv(&vb))));
            }
            self.edges[eb].alive = false;
        }
        Ok(())
    }

    fn index(&mut self) {
        self.step.clear();
        for (i, e) in self.edges.iter().enumerate() {
            if !e.alive {
                continue;
            }
            self.step.insert((e.from, e.label), (e.to, e.volt.clone()));
            let (to, v) = self.traverse(i, false);
            self.step.insert((e.to, -e.label), (to, v));
        }
        let letters = ordered_letters(self.rank);
        let mut path = HashMap::new();
        path.insert(self.base, (Vec::new(), Vec::new()));
        let mut queue = VecDeque::from([self.base]);
        while let Some(u) = queue.pop_front() {
            let (word, volt) = path[&u].clone();
            for &l in &letters {
                if let Some((w, v)) = self.step.get(&(u, l)) {
                    if !path.contains_key(w) {
                        let mut nw = word.clone();
                        nw.push(l);
                        path.insert(*w, (nw, mul(&volt, v)));
                        queue.push_back(*w);
                    }
                }
            }
        }
        self.path = path;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_alive.iter().filter(|a| **a).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.alive).count()
    }

    /// Rank of the subgroup as a free group.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Finite index iff every vertex has all 2n half-edges.
    pub fn is_finite_index(&self) -> bool {
        let letters = ordered_letters(self.rank);
        self.path.keys().all(|v| letters.iter().all(|l| self.step.contains_key(&(*v, *l))))
    }

    /// Right coset factorisation `g = image(h) * r`: returns (voltage of h, r).
    pub fn factor(&self, g: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
        let mut v = self.base;
        let mut volt = Vec::new();
        let mut k = 0;
        while k < g.len() {
            match self.step.get(&(v, g[k])) {
                Some((w, a)) => {
                    volt = mul(&volt, a);
                    v = *w;
                    k += 1;
                }
                None => break,
            }
        }
        let (pw, pv) = &self.path[&v];
        let rep = mul(pw, &g[k..]);
        (mul(&volt, &inv(pv)), rep)
    }

    /// Representatives of all cosets when the index is finite.
    pub fn finite_reps(&self) -> Option<Vec<Vec<Letter>>> {
        if !self.is_finite_index() {
            return None;
        }
        let mut reps: Vec<Vec<Letter>> = self.path.values().map(|(w, _)| w.clone()).collect();
        reps.sort_by(|a, b| shortlex_cmp(a, b));
        Some(reps)
    }

    /// The subgroup is the whole free group.
    pub fn is_everything(&self) -> bool {
        self.vertex_count() == 1 && (1..=self.rank as i32).all(|l| self.step.contains_key(&(self.base, l)))
    }
}
