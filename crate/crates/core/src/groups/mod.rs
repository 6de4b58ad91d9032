//! Base groups, their elements, homomorphisms and right coset transversals.

pub mod free;
pub mod lattice;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use free::{Folded, Letter};
use lattice::Lattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element of group `{found}` used where `{expected}` was expected")]
    Mismatch { expected: String, found: String },
    #[error("unknown generator `{0}`")]
    UnknownSymbol(String),
    #[error("malformed word `{0}`")]
    Malformed(String),
    #[error("invalid group `{name}`: {reason}")]
    InvalidGroup { name: String, reason: String },
    #[error("invalid homomorphism `{name}`: {reason}")]
    InvalidHom { name: String, reason: String },
    #[error("cannot build transversal for `{name}`: {reason}")]
    Transversal { name: String, reason: String },
}

/// Minimal group interface shared by base groups and generalized free products.
pub trait Group: Send + Sync {
    type Elem: Clone + Ord + Hash + fmt::Debug + Send + Sync;
    fn name(&self) -> &str;
    fn identity(&self) -> Self::Elem;
    fn contains(&self, x: &Self::Elem) -> bool;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn show(&self, a: &Self::Elem) -> String;
    /// All elements when the group is known to be finite.
    fn finite_elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Finite(usize),
    Free(Vec<Letter>),
    Abelian(Vec<i64>),
}

impl Word {
    fn tag(&self) -> u8 {
        match self {
            Word::Finite(_) => 0,
            Word::Free(_) => 1,
            Word::Abelian(_) => 2,
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Word::Finite(a), Word::Finite(b)) => a.cmp(b),
            (Word::Free(a), Word::Free(b)) => free::shortlex_cmp(a, b),
            (Word::Abelian(a), Word::Abelian(b)) => {
                let na: i64 = a.iter().map(|x| x.abs()).sum();
                let nb: i64 = b.iter().map(|x| x.abs()).sum();
                na.cmp(&nb).then_with(|| a.cmp(b))
            }
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Element with its owning group id and canonical word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseElement {
    pub group: Arc<str>,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Trivial,
    Finite { table: Vec<Vec<usize>>, identity: usize, inverses: Vec<usize>, gens: Vec<usize> },
    Free { rank: usize },
    FreeAbelian { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGroup {
    id: Arc<str>,
    pub kind: GroupKind,
    pub generators: Vec<String>,
    names: Vec<String>,
}

impl BaseGroup {
    pub fn trivial(name: &str) -> Self {
        BaseGroup { id: name.into(), kind: GroupKind::Trivial, generators: Vec::new(), names: Vec::new() }
    }

    pub fn free(name: &str, gens: &[&str]) -> Self {
        BaseGroup {
            id: name.into(),
            kind: GroupKind::Free { rank: gens.len() },
            generators: gens.iter().map(|s| s.to_string()).collect(),
            names: Vec::new(),
        }
    }

    pub fn free_abelian(name: &str, gens: &[&str]) -> Self {
        BaseGroup {
            id: name.into(),
            kind: GroupKind::FreeAbelian { rank: gens.len() },
            generators: gens.iter().map(|s| s.to_string()).collect(),
            names: Vec::new(),
        }
    }

    /// Cyclic group of order n with one generator.
    pub fn cyclic(name: &str, gen: &str, n: usize) -> Result<Self, GroupError> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::finite(name, table, &[(gen, 1 % n.max(1))])
    }

    /// Finite group from a full multiplication table; generators name table indices.
    pub fn finite(name: &str, table: Vec<Vec<usize>>, gens: &[(&str, usize)]) -> Result<Self, GroupError> {
        let bad = |reason: String| GroupError::InvalidGroup { name: name.to_string(), reason };
        let n = table.len();
        if n == 0 {
            return Err(bad("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(bad("table is not square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| bad("no identity element".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for x in 0..n {
            inverses[x] = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| bad(format!("element {x} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        if gens.iter().any(|(_, i)| *i >= n) {
            return Err(bad("generator index out of range".into()));
        }
        let mut g = BaseGroup {
            id: name.into(),
            kind: GroupKind::Finite { table, identity, inverses, gens: gens.iter().map(|(_, i)| *i).collect() },
            generators: gens.iter().map(|(s, _)| s.to_string()).collect(),
            names: Vec::new(),
        };
        g.names = g.finite_names();
        Ok(g)
    }

    fn finite_names(&self) -> Vec<String> {
        let GroupKind::Finite { table, identity, gens, .. } = &self.kind else { return Vec::new() };
        let mut names: Vec<Option<String>> = vec![None; table.len()];
        names[*identity] = Some("e".into());
        let mut words: HashMap<usize, Vec<usize>> = HashMap::from([(*identity, Vec::new())]);
        let mut queue = VecDeque::from([*identity]);
        while let Some(x) = queue.pop_front() {
            for (k, g) in gens.iter().enumerate() {
                let y = table[x][*g];
                if names[y].is_none() {
                    let mut w = words[&x].clone();
                    w.push(k);
                    names[y] = Some(render_runs(&w.iter().map(|k| (k, 1i64)).collect::<Vec<_>>(), &self.generators));
                    words.insert(y, w);
                    queue.push_back(y);
                }
            }
        }
        names.into_iter().enumerate().map(|(i, n)| n.unwrap_or_else(|| format!("#{i}"))).collect()
    }

    pub fn id(&self) -> &Arc<str> {
        &self.id
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Trivial => Some(1),
            GroupKind::Finite { table, .. } => Some(table.len()),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == Some(1)
    }

    pub fn elem(&self, word: Word) -> BaseElement {
        BaseElement { group: self.id.clone(), word }
    }

    pub fn generator(&self, i: usize) -> BaseElement {
        match &self.kind {
            GroupKind::Trivial => self.identity(),
            GroupKind::Finite { gens, .. } => self.elem(Word::Finite(gens[i])),
            GroupKind::Free { .. } => self.elem(Word::Free(vec![i as Letter + 1])),
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; *rank];
                v[i] = 1;
                self.elem(Word::Abelian(v))
            }
        }
    }

    pub fn pow(&self, a: &BaseElement, k: i64) -> BaseElement {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    /// All elements of a finite group in index order.
    pub fn elements(&self) -> Option<Vec<BaseElement>> {
        match &self.kind {
            GroupKind::Trivial => Some(vec![self.identity()]),
            GroupKind::Finite { table, .. } => Some((0..table.len()).map(|i| self.elem(Word::Finite(i))).collect()),
            _ => None,
        }
    }

    pub fn check(&self, x: &BaseElement) -> Result<(), GroupError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GroupError::Mismatch { expected: self.id.to_string(), found: x.group.to_string() })
        }
    }

    pub fn generator_index(&self, sym: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == sym)
    }

    /// Parses a whitespace separated word such as `x^2 y^-1`.
    pub fn parse(&self, text: &str) -> Result<BaseElement, GroupError> {
        let mut out = self.identity();
        for (sym, k) in tokenize(text)? {
            let g = match self.generator_index(&sym) {
                Some(i) => self.generator(i),
                None if is_identity_symbol(&sym) => self.identity(),
                None => return Err(GroupError::UnknownSymbol(sym)),
            };
            out = self.mul(&out, &self.pow(&g, k));
        }
        Ok(out)
    }

    /// Subgroup generated by `elems` is the whole group.
    pub fn generated_by(&self, elems: &[BaseElement]) -> bool {
        match &self.kind {
            GroupKind::Trivial => true,
            GroupKind::Finite { table, .. } => {
                let mut seen = BTreeSet::from([self.identity()]);
                let mut queue = VecDeque::from([self.identity()]);
                let gens: Vec<BaseElement> =
                    elems.iter().flat_map(|g| [g.clone(), self.inv(g)]).collect();
                while let Some(x) = queue.pop_front() {
                    for g in &gens {
                        let y = self.mul(&x, g);
                        if seen.insert(y.clone()) {
                            queue.push_back(y);
                        }
                    }
                }
                seen.len() == table.len()
            }
            GroupKind::Free { rank } => {
                let words: Vec<Vec<Letter>> = elems.iter().map(|e| free_word(e).to_vec()).collect();
                Folded::new(*rank, &words, false).map(|f| f.is_everything()).unwrap_or(false)
            }
            GroupKind::FreeAbelian { rank } => {
                let vecs: Vec<Vec<i64>> = elems.iter().map(|e| abelian_vec(e).to_vec()).collect();
                Lattice::new(*rank, &vecs).is_everything()
            }
        }
    }
}

fn is_identity_symbol(s: &str) -> bool {
    s == "e" || s == "1"
}

pub(crate) fn free_word(e: &BaseElement) -> &[Letter] {
    match &e.word {
        Word::Free(w) => w,
        _ => &[],
    }
}

pub(crate) fn abelian_vec(e: &BaseElement) -> &[i64] {
    match &e.word {
        Word::Abelian(v) => v,
        _ => &[],
    }
}

/// Splits `x^2 t^-1 y` into (symbol, exponent) tokens.
pub fn tokenize(text: &str) -> Result<Vec<(String, i64)>, GroupError> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (sym, exp) = match tok.split_once('^') {
            Some((s, e)) => {
                let k: i64 = e.parse().map_err(|_| GroupError::Malformed(tok.to_string()))?;
                (s, k)
            }
            None => (tok, 1),
        };
        if sym.is_empty() || !sym.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            return Err(GroupError::Malformed(tok.to_string()));
        }
        out.push((sym.to_string(), exp));
    }
    Ok(out)
}

/// Renders (generator index, exponent) runs; identity is `e`.
pub fn render_runs(runs: &[(&usize, i64)], names: &[String]) -> String {
    let mut merged: Vec<(usize, i64)> = Vec::new();
    for (g, k) in runs {
        match merged.last_mut() {
            Some((h, m)) if h == *g => *m += k,
            _ => merged.push((**g, *k)),
        }
    }
    let parts: Vec<String> = merged
        .into_iter()
        .filter(|(_, k)| *k != 0)
        .map(|(g, k)| if k == 1 { names[g].clone() } else { format!("{}^{}", names[g], k) })
        .collect();
    if parts.is_empty() {
        "e".into()
    } else {
        parts.join(" ")
    }
}

impl Group for BaseGroup {
    type Elem = BaseElement;

    fn finite_elements(&self) -> Option<Vec<BaseElement>> {
        self.elements()
    }

    fn name(&self) -> &str {
        &self.id
    }

    fn identity(&self) -> BaseElement {
        let w = match &self.kind {
            GroupKind::Trivial => Word::Finite(0),
            GroupKind::Finite { identity, .. } => Word::Finite(*identity),
            GroupKind::Free { .. } => Word::Free(Vec::new()),
            GroupKind::FreeAbelian { rank } => Word::Abelian(vec![0; *rank]),
        };
        self.elem(w)
    }

    fn contains(&self, x: &BaseElement) -> bool {
        if x.group != self.id {
            return false;
        }
        match (&self.kind, &x.word) {
            (GroupKind::Trivial, Word::Finite(0)) => true,
            (GroupKind::Finite { table, .. }, Word::Finite(i)) => *i < table.len(),
            (GroupKind::Free { rank }, Word::Free(w)) => {
                w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank) && free::reduce(w) == *w
            }
            (GroupKind::FreeAbelian { rank }, Word::Abelian(v)) => v.len() == *rank,
            _ => false,
        }
    }

    fn mul(&self, a: &BaseElement, b: &BaseElement) -> BaseElement {
        debug_assert!(self.contains(a) && self.contains(b), "{a:?} * {b:?} in {}", self.id);
        let w = match (&self.kind, &a.word, &b.word) {
            (GroupKind::Trivial, _, _) => Word::Finite(0),
            (GroupKind::Finite { table, .. }, Word::Finite(x), Word::Finite(y)) => Word::Finite(table[*x][*y]),
            (GroupKind::Free { .. }, Word::Free(x), Word::Free(y)) => Word::Free(free::mul(x, y)),
            (GroupKind::FreeAbelian { .. }, Word::Abelian(x), Word::Abelian(y)) => {
                Word::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => panic!("element does not belong to group {}", self.id),
        };
        self.elem(w)
    }

    fn inv(&self, a: &BaseElement) -> BaseElement {
        let w = match (&self.kind, &a.word) {
            (GroupKind::Trivial, _) => Word::Finite(0),
            (GroupKind::Finite { inverses, .. }, Word::Finite(x)) => Word::Finite(inverses[*x]),
            (GroupKind::Free { .. }, Word::Free(x)) => Word::Free(free::inv(x)),
            (GroupKind::FreeAbelian { .. }, Word::Abelian(x)) => Word::Abelian(x.iter().map(|p| -p).collect()),
            _ => panic!("element does not belong to group {}", self.id),
        };
        self.elem(w)
    }

    fn show(&self, a: &BaseElement) -> String {
        match &a.word {
            Word::Finite(i) => self.names.get(*i).cloned().unwrap_or_else(|| "e".into()),
            Word::Free(w) => {
                let idx: Vec<usize> = w.iter().map(|l| l.unsigned_abs() as usize - 1).collect();
                let runs: Vec<(&usize, i64)> =
                    idx.iter().zip(w).map(|(g, l)| (g, if *l > 0 { 1 } else { -1 })).collect();
                render_runs(&runs, &self.generators)
            }
            Word::Abelian(v) => {
                let idx: Vec<usize> = (0..v.len()).collect();
                let runs: Vec<(&usize, i64)> = idx.iter().zip(v).map(|(g, k)| (g, *k)).collect();
                render_runs(&runs, &self.generators)
            }
        }
    }
}

/// Whether injectivity was checked by enumeration or taken on trust.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injectivity {
    Verified,
    Asserted,
    Unchecked,
    Refuted,
}

#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub name: String,
    pub source: Arc<BaseGroup>,
    pub target: Arc<BaseGroup>,
    pub images: Vec<BaseElement>,
    pub injectivity: Injectivity,
    table: Option<Vec<BaseElement>>,
}

impl Homomorphism {
    /// Builds a homomorphism from generator images. Finite sources are checked
    /// to respect every relation and their kernel is computed.
    pub fn new(
        name: &str,
        source: Arc<BaseGroup>,
        target: Arc<BaseGroup>,
        images: Vec<BaseElement>,
        assert_injective: bool,
    ) -> Result<Self, GroupError> {
        let bad = |reason: String| GroupError::InvalidHom { name: name.to_string(), reason };
        if images.len() != source.rank() {
            return Err(bad(format!("{} images for {} generators", images.len(), source.rank())));
        }
        for im in &images {
            target.check(im).map_err(|e| bad(e.to_string()))?;
        }
        let mut hom = Homomorphism {
            name: name.to_string(),
            source: source.clone(),
            target: target.clone(),
            images,
            injectivity: if assert_injective { Injectivity::Asserted } else { Injectivity::Unchecked },
            table: None,
        };
        match &source.kind {
            GroupKind::Trivial => hom.injectivity = Injectivity::Verified,
            GroupKind::Finite { table, identity, gens, .. } => {
                let n = table.len();
                let mut map: Vec<Option<BaseElement>> = vec![None; n];
                map[*identity] = Some(target.identity());
                let mut queue = VecDeque::from([*identity]);
                while let Some(x) = queue.pop_front() {
                    for (k, g) in gens.iter().enumerate() {
                        let y = table[x][*g];
                        let im = target.mul(map[x].as_ref().unwrap(), &hom.images[k]);
                        match &map[y] {
                            Some(old) if *old != im => return Err(bad("a relation of the source is not preserved".into())),
                            Some(_) => {}
                            None => {
                                map[y] = Some(im);
                                queue.push_back(y);
                            }
                        }
                    }
                }
                let map: Vec<BaseElement> = map
                    .into_iter()
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("source generators do not generate the source group".into()))?;
                for a in 0..n {
                    for b in 0..n {
                        if map[table[a][b]] != target.mul(&map[a], &map[b]) {
                            return Err(bad("map is not multiplicative".into()));
                        }
                    }
                }
                let e = target.identity();
                let kernel = map.iter().filter(|x| **x == e).count();
                hom.injectivity = if kernel == 1 { Injectivity::Verified } else { Injectivity::Refuted };
                if kernel != 1 && assert_injective {
                    return Err(bad(format!("kernel has {kernel} elements")));
                }
                hom.table = Some(map);
            }
            GroupKind::FreeAbelian { .. } => {
                for a in &hom.images {
                    for b in &hom.images {
                        if target.mul(a, b) != target.mul(b, a) {
                            return Err(bad("images of an abelian source do not commute".into()));
                        }
                    }
                }
            }
            GroupKind::Free { .. } => {}
        }
        Ok(hom)
    }

    pub fn identity(name: &str, g: Arc<BaseGroup>) -> Self {
        let images = (0..g.rank()).map(|i| g.generator(i)).collect();
        Self::new(name, g.clone(), g, images, true).expect("identity is a homomorphism")
    }

    pub fn is_declared_injective(&self) -> bool {
        matches!(self.injectivity, Injectivity::Verified | Injectivity::Asserted)
    }

    pub fn apply(&self, g: &BaseElement) -> Result<BaseElement, GroupError> {
        self.source.check(g)?;
        Ok(self.apply_unchecked(g))
    }

    pub(crate) fn apply_unchecked(&self, g: &BaseElement) -> BaseElement {
        let t = &self.target;
        match &g.word {
            Word::Finite(i) => match &self.table {
                Some(map) => map[*i].clone(),
                None => t.identity(),
            },
            Word::Free(w) => w.iter().fold(t.identity(), |acc, l| {
                let im = &self.images[l.unsigned_abs() as usize - 1];
                let im = if *l > 0 { im.clone() } else { t.inv(im) };
                t.mul(&acc, &im)
            }),
            Word::Abelian(v) => v
                .iter()
                .zip(&self.images)
                .fold(t.identity(), |acc, (k, im)| t.mul(&acc, &t.pow(im, *k))),
        }
    }
}

#[derive(Clone, Debug)]
enum Cosets {
    Whole,
    Table { rep: Vec<usize>, pre: HashMap<usize, BaseElement> },
    Folded(Box<Folded>),
    Lattice(Lattice),
}

/// Right coset representatives for `image(H) \ G`.
#[derive(Clone, Debug)]
pub struct Transversal {
    pub hom: Homomorphism,
    cosets: Cosets,
}

impl Transversal {
    pub fn new(hom: Homomorphism) -> Result<Self, GroupError> {
        let bad = |reason: &str| GroupError::Transversal { name: hom.name.clone(), reason: reason.to_string() };
        if !hom.is_declared_injective() {
            return Err(bad("embedding is not declared injective"));
        }
        let src = &hom.source;
        let tgt = &hom.target;
        let cosets = if src.is_trivial() {
            Cosets::Whole
        } else {
            match (&src.kind, &tgt.kind) {
                (_, GroupKind::Trivial) => return Err(bad("nontrivial group cannot embed in the trivial group")),
                (GroupKind::Finite { .. }, GroupKind::Finite { table, .. }) => {
                    let n = table.len();
                    let mut pre = HashMap::new();
                    for h in src.elements().unwrap() {
                        let Word::Finite(i) = hom.apply_unchecked(&h).word else { unreachable!() };
                        pre.insert(i, h);
                    }
                    let rep = (0..n)
                        .map(|g| pre.keys().map(|&i| table[i][g]).min().unwrap())
                        .collect();
                    Cosets::Table { rep, pre }
                }
                (GroupKind::Free { .. } | GroupKind::FreeAbelian { rank: 1 }, GroupKind::Free { rank }) => {
                    let gens: Vec<Vec<Letter>> = hom.images.iter().map(|e| free_word(e).to_vec()).collect();
                    if matches!(src.kind, GroupKind::FreeAbelian { .. }) && gens.len() != 1 {
                        return Err(bad("unsupported source"));
                    }
                    let f = Folded::new(*rank, &gens, true).map_err(|_| bad("embedding has a nontrivial kernel"))?;
                    Cosets::Folded(Box::new(f))
                }
                (GroupKind::FreeAbelian { .. } | GroupKind::Free { rank: 1 }, GroupKind::FreeAbelian { rank }) => {
                    let gens: Vec<Vec<i64>> = hom.images.iter().map(|e| abelian_vec(e).to_vec()).collect();
                    let l = Lattice::new(*rank, &gens);
                    if l.defect != 0 {
                        return Err(bad("embedding has a nontrivial kernel"));
                    }
                    Cosets::Lattice(l)
                }
                _ => return Err(bad("no injective embedding of this kind is supported")),
            }
        };
        Ok(Transversal { hom, cosets })
    }

    pub fn ambient(&self) -> &Arc<BaseGroup> {
        &self.hom.target
    }

    pub fn subgroup(&self) -> &Arc<BaseGroup> {
        &self.hom.source
    }

    fn source_from_letters(&self, w: Vec<Letter>) -> BaseElement {
        let src = &self.hom.source;
        match src.kind {
            GroupKind::FreeAbelian { .. } => src.elem(Word::Abelian(vec![w.iter().map(|l| l.signum() as i64).sum()])),
            _ => src.elem(Word::Free(w)),
        }
    }

    fn source_from_coords(&self, c: Vec<i64>) -> BaseElement {
        let src = &self.hom.source;
        match src.kind {
            GroupKind::Free { .. } => {
                let k = c[0];
                src.elem(Word::Free(vec![k.signum() as Letter; k.unsigned_abs() as usize]))
            }
            _ => src.elem(Word::Abelian(c)),
        }
    }

    /// `g = image(h) * r` with `r` the canonical representative of `image(H) g`.
    pub fn coset_factor(&self, g: &BaseElement) -> (BaseElement, BaseElement) {
        debug_assert!(self.ambient().contains(g));
        match &self.cosets {
            Cosets::Whole => (self.hom.source.identity(), g.clone()),
            Cosets::Table { rep, pre } => {
                let Word::Finite(i) = g.word else { unreachable!() };
                let r = self.ambient().elem(Word::Finite(rep[i]));
                let hr = self.ambient().mul(g, &self.ambient().inv(&r));
                let Word::Finite(k) = hr.word else { unreachable!() };
                (pre[&k].clone(), r)
            }
            Cosets::Folded(f) => {
                let (h, r) = f.factor(free_word(g));
                (self.source_from_letters(h), self.ambient().elem(Word::Free(r)))
            }
            Cosets::Lattice(l) => {
                let (c, r) = l.factor(abelian_vec(g));
                (self.source_from_coords(c), self.ambient().elem(Word::Abelian(r)))
            }
        }
    }

    pub fn rep(&self, g: &BaseElement) -> BaseElement {
        self.coset_factor(g).1
    }

    /// Preimage of an element known to lie in the image.
    pub fn preimage(&self, g: &BaseElement) -> Option<BaseElement> {
        let (h, r) = self.coset_factor(g);
        (r == self.ambient().identity()).then_some(h)
    }

    pub fn is_trivial_rep(&self, r: &BaseElement) -> bool {
        *r == self.ambient().identity()
    }

    /// All representatives when the index is finite, sorted.
    pub fn finite_reps(&self) -> Option<Vec<BaseElement>> {
        let amb = self.ambient();
        let mut out: Vec<BaseElement> = match &self.cosets {
            Cosets::Whole => amb.elements()?,
            Cosets::Table { rep, .. } => {
                let s: BTreeSet<usize> = rep.iter().copied().collect();
                s.into_iter().map(|i| amb.elem(Word::Finite(i))).collect()
            }
            Cosets::Folded(f) => f.finite_reps()?.into_iter().map(|w| amb.elem(Word::Free(w))).collect(),
            Cosets::Lattice(l) => l.finite_reps()?.into_iter().map(|v| amb.elem(Word::Abelian(v))).collect(),
        };
        out.sort();
        Some(out)
    }

    pub fn index(&self) -> Option<usize> {
        self.finite_reps().map(|r| r.len())
    }

    /// Distinct representatives of cosets meeting the ball of radius `bound`.
    pub fn sample_reps(&self, bound: usize) -> Vec<BaseElement> {
        if let Some(all) = self.finite_reps() {
            return all;
        }
        let amb = self.ambient();
        let set: BTreeSet<BaseElement> = match &amb.kind {
            GroupKind::Free { rank } => free::words_up_to(*rank, bound)
                .into_iter()
                .map(|w| self.rep(&amb.elem(Word::Free(w))))
                .collect(),
            GroupKind::FreeAbelian { rank } => {
                let b = bound as i64;
                let mut vecs = vec![Vec::new()];
                for _ in 0..*rank {
                    vecs = vecs
                        .into_iter()
                        .flat_map(|v: Vec<i64>| {
                            (-b..=b).map(move |k| {
                                let mut w = v.clone();
                                w.push(k);
                                w
                            })
                        })
                        .collect();
                }
                vecs.into_iter().map(|v| self.rep(&amb.elem(Word::Abelian(v)))).collect()
            }
            _ => amb.elements().unwrap_or_default().iter().map(|g| self.rep(g)).collect(),
        };
        set.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(name: &str, g: &str) -> Arc<BaseGroup> {
        Arc::new(BaseGroup::free(name, &[g]))
    }

    #[test]
    fn base_ops_examples() {
        let c2 = BaseGroup::cyclic("C2", "a", 2).unwrap();
        let a = c2.generator(0);
        assert_eq!(c2.mul(&a, &a), c2.identity());
        let f = BaseGroup::free("F", &["x"]);
        let x2 = f.parse("x^2").unwrap();
        assert_eq!(f.mul(&x2, &f.parse("x^-1").unwrap()), f.parse("x").unwrap());
        let z2 = BaseGroup::free_abelian("Z2", &["u", "v"]);
        let p = z2.elem(Word::Abelian(vec![1, 2]));
        let q = z2.elem(Word::Abelian(vec![3, -2]));
        assert_eq!(z2.mul(&p, &q).word, Word::Abelian(vec![4, 0]));
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let f = BaseGroup::free("F", &["x"]);
        let g = BaseGroup::free("G", &["x"]);
        assert!(f.check(&g.generator(0)).is_err());
    }

    #[test]
    fn hom_apply_trefoil() {
        let h = z("H", "z");
        let g1 = z("G1", "x");
        let g2 = z("G2", "y");
        let i1 = Homomorphism::new("i1", h.clone(), g1.clone(), vec![g1.parse("x^2").unwrap()], true).unwrap();
        let i2 = Homomorphism::new("i2", h.clone(), g2.clone(), vec![g2.parse("y^3").unwrap()], true).unwrap();
        assert_eq!(i1.apply(&h.parse("z").unwrap()).unwrap(), g1.parse("x^2").unwrap());
        assert_eq!(i1.apply(&h.identity()).unwrap(), g1.identity());
        assert_eq!(i2.apply(&h.parse("z^2").unwrap()).unwrap(), g2.parse("y^6").unwrap());
        assert!(i1.apply(&g1.identity()).is_err());
    }

    #[test]
    fn coset_factor_examples() {
        let h = z("H", "z");
        let g1 = z("G1", "x");
        let i1 = Homomorphism::new("i1", h.clone(), g1.clone(), vec![g1.parse("x^2").unwrap()], true).unwrap();
        let t = Transversal::new(i1).unwrap();
        let (hh, r) = t.coset_factor(&g1.parse("x^3").unwrap());
        assert_eq!(hh, h.parse("z").unwrap());
        assert_eq!(r, g1.parse("x").unwrap());
        let (hh, r) = t.coset_factor(&g1.identity());
        assert_eq!((hh, r), (h.identity(), g1.identity()));

        let one = Arc::new(BaseGroup::trivial("1"));
        let c2 = Arc::new(BaseGroup::cyclic("C2", "a", 2).unwrap());
        let inc = Homomorphism::new("inc", one.clone(), c2.clone(), vec![], true).unwrap();
        let t = Transversal::new(inc).unwrap();
        let a = c2.generator(0);
        assert_eq!(t.coset_factor(&a), (one.identity(), a));
    }

    #[test]
    fn finite_kernel_is_refuted() {
        let c4 = Arc::new(BaseGroup::cyclic("C4", "a", 4).unwrap());
        let c2 = Arc::new(BaseGroup::cyclic("C2", "b", 2).unwrap());
        let q = Homomorphism::new("q", c4.clone(), c2.clone(), vec![c2.generator(0)], false).unwrap();
        assert_eq!(q.injectivity, Injectivity::Refuted);
        assert!(Homomorphism::new("q", c4, c2.clone(), vec![c2.generator(0)], true).is_err());
    }

    #[test]
    fn relation_violation_detected() {
        let c2 = Arc::new(BaseGroup::cyclic("C2", "a", 2).unwrap());
        let c3 = Arc::new(BaseGroup::cyclic("C3", "b", 3).unwrap());
        assert!(Homomorphism::new("bad", c2, c3.clone(), vec![c3.generator(0)], false).is_err());
    }

    #[test]
    fn finite_subgroup_transversal() {
        // Z/4 with subgroup {0, 2}
        let c4 = Arc::new(BaseGroup::cyclic("C4", "a", 4).unwrap());
        let c2 = Arc::new(BaseGroup::cyclic("C2", "b", 2).unwrap());
        let a = c4.generator(0);
        let inc = Homomorphism::new("inc", c2.clone(), c4.clone(), vec![c4.pow(&a, 2)], true).unwrap();
        assert_eq!(inc.injectivity, Injectivity::Verified);
        let t = Transversal::new(inc).unwrap();
        assert_eq!(t.index(), Some(2));
        let g = c4.pow(&a, 3);
        let (h, r) = t.coset_factor(&g);
        assert_eq!(c4.mul(&t.hom.apply(&h).unwrap(), &r), g);
    }

    #[test]
    fn abelian_transversal() {
        let h = Arc::new(BaseGroup::free_abelian("H", &["p"]));
        let g = Arc::new(BaseGroup::free_abelian("G", &["u", "v"]));
        let inc = Homomorphism::new("inc", h.clone(), g.clone(), vec![g.elem(Word::Abelian(vec![2, 1]))], true).unwrap();
        let t = Transversal::new(inc).unwrap();
        let x = g.elem(Word::Abelian(vec![5, 7]));
        let (hh, r) = t.coset_factor(&x);
        assert_eq!(g.mul(&t.hom.apply(&hh).unwrap(), &r), x);
        assert_eq!(t.rep(&r), r);
        assert!(t.index().is_none());
    }

    #[test]
    fn printing_and_parsing_agree() {
        let f = BaseGroup::free("F", &["x", "y"]);
        let w = f.parse("x^2 y^-1 x").unwrap();
        assert_eq!(f.show(&w), "x^2 y^-1 x");
        assert_eq!(f.parse(&f.show(&w)).unwrap(), w);
        let c3 = BaseGroup::cyclic("C3", "a", 3).unwrap();
        let a2 = c3.parse("a^2").unwrap();
        assert_eq!(c3.parse(&c3.show(&a2)).unwrap(), a2);
    }

    #[test]
    fn generation_tests() {
        let f = BaseGroup::free("F", &["x", "y"]);
        assert!(f.generated_by(&[f.parse("x y").unwrap(), f.parse("y").unwrap()]));
        assert!(!f.generated_by(&[f.parse("x^2").unwrap(), f.parse("y").unwrap()]));
        let z2 = BaseGroup::free_abelian("Z2", &["u", "v"]);
        assert!(z2.generated_by(&[z2.parse("u v").unwrap(), z2.parse("v").unwrap()]));
        assert!(!z2.generated_by(&[z2.parse("u^2").unwrap(), z2.parse("v").unwrap()]));
        let c6 = BaseGroup::cyclic("C6", "a", 6).unwrap();
        assert!(c6.generated_by(&[c6.parse("a^5").unwrap()]));
        assert!(!c6.generated_by(&[c6.parse("a^2").unwrap()]));
    }
}
