//! Conjugacy in the first Grigorchuk group via the sets
//! `Q(g,h) = { Kf : g^f = h }`, `K` the normal closure of `[a,b]`.
//!
//! Each pair `(g,h)` is split according to whether `g, h` and the
//! conjugator stabilise the first level. The sets for the section pairs are
//! recombined through the relation "the pair of cosets `(Kf1, Kf2)` is the
//! pair of sections of some `f` in the first level stabilizer, and then `Kf`
//! is determined". Pairs are explored from the query; dependencies among
//! them form a finite system of monotone set equations, solved from above.

use std::fmt;
use std::sync::Arc;

use parking_lot::Mutex;
use rustc_hash::FxHashMap;

use crate::decision::{equal, is_trivial, DecisionError};
use crate::group::{builtin, GroupDefinition, Letter, Word};
use crate::perm::Perm;
use crate::quotients::{level_quotient, LevelQuotient, QuotientError};

pub const NUM_COSETS: usize = 16;

/// A set of cosets of `K`, as a bitmask over the transversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CosetSet(pub u16);

impl CosetSet {
    pub const EMPTY: CosetSet = CosetSet(0);
    pub const ALL: CosetSet = CosetSet(u16::MAX);

    pub fn contains(self, c: usize) -> bool {
        self.0 >> c & 1 == 1
    }

    pub fn insert(&mut self, c: usize) {
        self.0 |= 1 << c;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..NUM_COSETS).filter(move |&c| self.contains(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConjugacyError {
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("{0}")]
    Invalid(String),
}

/// `G/K` with its multiplication and the section-lifting relation.
pub struct Cosets {
    pub level: usize,
    /// Shortest word in each coset (coset 0 is `K`).
    pub names: Vec<Word>,
    act: Vec<Vec<u8>>,
    mul: Vec<[u8; NUM_COSETS]>,
    inv: [u8; NUM_COSETS],
    lift: Vec<[Option<u8>; NUM_COSETS]>,
}

/// Least `n` with `|G_n : image of K| = 16`.
pub fn k_membership_level() -> Result<usize, ConjugacyError> {
    let g = builtin("Gg").map_err(DecisionError::from)?;
    for n in 1..=10 {
        let q = level_quotient(&g, n)?;
        if image_of_k(&g, &q).index_in(q.group()) == 16u32.into() {
            return Ok(n);
        }
    }
    Err(ConjugacyError::Invalid("index of K never reached 16".into()))
}

fn image_of_k(g: &GroupDefinition, q: &LevelQuotient) -> crate::quotients::Subgroup {
    let ab = g.parse("[a,b]").expect("valid word");
    let c = g.element(&ab).level_perm(q.level);
    q.group().normal_closure(&q.gens(), vec![c])
}

impl Cosets {
    fn build(g: &GroupDefinition) -> Result<Cosets, ConjugacyError> {
        let n = k_membership_level()?;
        let q = level_quotient(g, n)?;
        let k = image_of_k(g, &q);
        let letters: Vec<Letter> = g.canonical_generators();
        let lp: Vec<Perm> = letters.iter().map(|&x| g.letter(0, x).state.level_perm(n)).collect();
        let mut reps: Vec<Perm> = vec![Perm::identity(q.degree)];
        let mut names = vec![Word::empty()];
        let mut act: Vec<Vec<u8>> = Vec::new();
        let find = |reps: &[Perm], x: &Perm| reps.iter().position(|r| k.contains(&x.compose(&r.inverse())));
        let mut i = 0;
        while i < reps.len() {
            let mut row = Vec::new();
            for (s, p) in letters.iter().zip(&lp) {
                let y = reps[i].compose(p);
                let j = match find(&reps, &y) {
                    Some(j) => j,
                    None => {
                        reps.push(y);
                        let mut w = names[i].0.clone();
                        w.push(*s);
                        names.push(g.reduce(&Word(w)));
                        reps.len() - 1
                    }
                };
                row.push(j as u8);
            }
            act.push(row);
            i += 1;
        }
        if reps.len() != NUM_COSETS {
            return Err(ConjugacyError::Invalid(format!("found {} cosets of K", reps.len())));
        }
        let mut cs = Cosets { level: n, names, act, mul: Vec::new(), inv: [0; NUM_COSETS], lift: Vec::new() };
        for i in 0..NUM_COSETS {
            let mut row = [0u8; NUM_COSETS];
            for (j, r) in row.iter_mut().enumerate() {
                *r = cs.apply(i, &cs.names[j].clone()) as u8;
            }
            cs.mul.push(row);
        }
        for i in 0..NUM_COSETS {
            cs.inv[i] = (0..NUM_COSETS).find(|&j| cs.mul[i][j] == 0).unwrap() as u8;
        }
        cs.lift = cs.lift_table(g)?;
        Ok(cs)
    }

    fn apply(&self, start: usize, w: &Word) -> usize {
        w.0.iter().fold(start, |c, &x| self.act[c][x as usize] as usize)
    }

    /// Coset of a word.
    pub fn of(&self, w: &Word) -> usize {
        self.apply(0, w)
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x][y] as usize
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    /// Image of the first level stabilizer in `(G/K)^3` under
    /// `f -> (Kf_1, Kf_2, Kf)`, closed from the images of `b, c, d` and their
    /// `a`-conjugates.
    fn lift_table(&self, g: &GroupDefinition) -> Result<Vec<[Option<u8>; NUM_COSETS]>, ConjugacyError> {
        let mut gens = Vec::new();
        for s in ["b", "c", "d", "aba", "aca", "ada"] {
            let w = g.parse(s).map_err(DecisionError::from)?;
            let (_, secs) = g.decompose(&w);
            gens.push((self.of(&secs[0]), self.of(&secs[1]), self.of(&w)));
        }
        let mut table = vec![[None; NUM_COSETS]; NUM_COSETS];
        table[0][0] = Some(0u8);
        let mut elems = vec![(0usize, 0usize, 0usize)];
        let mut k = 0;
        while k < elems.len() {
            let (x, y, z) = elems[k];
            k += 1;
            for &(p, q, r) in &gens {
                let (x2, y2, z2) = (self.mul(x, p), self.mul(y, q), self.mul(z, r));
                match table[x2][y2] {
                    Some(old) if old as usize != z2 => {
                        return Err(ConjugacyError::Invalid("section cosets do not determine the coset".into()))
                    }
                    Some(_) => {}
                    None => {
                        table[x2][y2] = Some(z2 as u8);
                        elems.push((x2, y2, z2));
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn lift(&self, c1: usize, c2: usize) -> Option<usize> {
        self.lift[c1][c2].map(|z| z as usize)
    }

    /// `{ x c y : c in s }`.
    fn translate(&self, s: CosetSet, x: usize, y: usize) -> CosetSet {
        let mut out = CosetSet::EMPTY;
        for c in s.iter() {
            out.insert(self.mul(self.mul(x, c), y));
        }
        out
    }

    /// Cosets `Kf` with `(Kg)^(Kf) = Kh` in `G/K`.
    fn filter(&self, cg: usize, ch: usize) -> CosetSet {
        let mut out = CosetSet::EMPTY;
        for f in 0..NUM_COSETS {
            if self.mul(self.mul(self.inv(f), cg), f) == ch {
                out.insert(f);
            }
        }
        out
    }
}

/// A reference to another pair: `{ left c right : c in Q(node) }`.
#[derive(Clone, Copy, Debug)]
struct Ref {
    node: usize,
    left: usize,
    right: usize,
}

#[derive(Clone, Debug)]
enum Term {
    /// Cases 1a/1b: `lift(c1, c2) * t` over `c1 in Q(r1)`, `c2 in Q(r2)`.
    Both { r1: Ref, r2: Ref, twist: usize },
    /// Cases 2a/2b: `lift(c1, x c1 y) * t` over `c1 in Q(r)`.
    Tied { r: Ref, x: usize, y: usize, twist: usize },
}

#[derive(Clone, Debug)]
struct Node {
    filter: CosetSet,
    terms: Vec<Term>,
    value: CosetSet,
    solved: bool,
}

/// Memoised solver; one per process is enough (see [`solver`]).
pub struct ConjugacySolver {
    g: Arc<GroupDefinition>,
    pub cosets: Cosets,
    a: Word,
    index: FxHashMap<(Word, Word), usize>,
    nodes: Vec<Node>,
}

/// Node cap per query.
pub const PAIR_CAP: usize = 1_000_000;

static SOLVER: once_cell::sync::OnceCell<Mutex<ConjugacySolver>> = once_cell::sync::OnceCell::new();

/// Shared solver for the builtin `Gg`.
pub fn solver() -> Result<&'static Mutex<ConjugacySolver>, ConjugacyError> {
    SOLVER.get_or_try_init(|| ConjugacySolver::new().map(Mutex::new))
}

pub fn q_set(g: &Word, h: &Word) -> Result<CosetSet, ConjugacyError> {
    solver()?.lock().q_set(g, h)
}

pub fn are_conjugate(g: &Word, h: &Word) -> Result<bool, ConjugacyError> {
    Ok(!q_set(g, h)?.is_empty())
}

impl ConjugacySolver {
    pub fn new() -> Result<Self, ConjugacyError> {
        let g = builtin("Gg").map_err(DecisionError::from)?;
        let cosets = Cosets::build(&g)?;
        let a = g.parse("a").map_err(DecisionError::from)?;
        Ok(ConjugacySolver { g, cosets, a, index: FxHashMap::default(), nodes: Vec::new() })
    }

    pub fn group(&self) -> &Arc<GroupDefinition> {
        &self.g
    }

    pub fn q_set(&mut self, g: &Word, h: &Word) -> Result<CosetSet, ConjugacyError> {
        let r = self.reference(g, h)?;
        self.solve()?;
        Ok(self.eval(r))
    }

    pub fn are_conjugate(&mut self, g: &Word, h: &Word) -> Result<bool, ConjugacyError> {
        Ok(!self.q_set(g, h)?.is_empty())
    }

    /// Normalises by cyclic reduction: with `g = u g' u^-1`, `h = v h' v^-1`,
    /// `Q(g,h) = Ku Q(g',h') (Kv)^-1`.
    fn reference(&mut self, g: &Word, h: &Word) -> Result<Ref, ConjugacyError> {
        let (g2, u) = self.g.cyclic_reduce(g);
        let (h2, v) = self.g.cyclic_reduce(h);
        let node = self.node(g2, h2)?;
        let left = self.cosets.of(&u);
        let right = self.cosets.inv(self.cosets.of(&v));
        Ok(Ref { node, left, right })
    }

    fn node(&mut self, g: Word, h: Word) -> Result<usize, ConjugacyError> {
        if let Some(&i) = self.index.get(&(g.clone(), h.clone())) {
            return Ok(i);
        }
        let i = self.nodes.len();
        if i >= PAIR_CAP {
            return Err(DecisionError::ResourceExceeded { what: "conjugacy pairs", cap: PAIR_CAP }.into());
        }
        self.index.insert((g.clone(), h.clone()), i);
        let gr = &*self.g.clone();
        let cs = &self.cosets;
        let filter = cs.filter(cs.of(&g), cs.of(&h));
        self.nodes.push(Node { filter, terms: Vec::new(), value: filter, solved: false });
        let (tg, th) = (is_trivial(gr, &g)?, is_trivial(gr, &h)?);
        if tg || th {
            let v = if tg && th { CosetSet::ALL } else { CosetSet::EMPTY };
            self.nodes[i].value = v;
            self.nodes[i].solved = true;
            return Ok(i);
        }
        let (pg, sg) = gr.decompose(&g);
        let (ph, sh) = gr.decompose(&h);
        if pg != ph || filter.is_empty() {
            self.nodes[i].value = CosetSet::EMPTY;
            self.nodes[i].solved = true;
            return Ok(i);
        }
        let ca = self.cosets.of(&self.a);
        let terms = if pg.is_identity() {
            let r1 = self.reference(&sg[0], &sh[0])?;
            let r2 = self.reference(&sg[1], &sh[1])?;
            let s1 = self.reference(&sg[0], &sh[1])?;
            let s2 = self.reference(&sg[1], &sh[0])?;
            vec![Term::Both { r1, r2, twist: 0 }, Term::Both { r1: s1, r2: s2, twist: ca }]
        } else {
            let cs = &self.cosets;
            let (c_g1, c_g2, c_h2) = (cs.of(&sg[0]), cs.of(&sg[1]), cs.of(&sh[1]));
            let g12 = gr.mul(&sg[0], &sg[1]);
            let ra = self.reference(&g12, &gr.mul(&sh[0], &sh[1]))?;
            let rb = self.reference(&g12, &gr.mul(&sh[1], &sh[0]))?;
            let cs = &self.cosets;
            vec![
                Term::Tied { r: ra, x: c_g2, y: cs.inv(c_h2), twist: 0 },
                Term::Tied { r: rb, x: cs.inv(c_g1), y: c_h2, twist: ca },
            ]
        };
        self.nodes[i].terms = terms;
        Ok(i)
    }

    fn eval(&self, r: Ref) -> CosetSet {
        self.cosets.translate(self.nodes[r.node].value, r.left, r.right)
    }

    fn apply(&self, i: usize) -> CosetSet {
        let cs = &self.cosets;
        let mut out = CosetSet::EMPTY;
        for t in &self.nodes[i].terms {
            match *t {
                Term::Both { r1, r2, twist } => {
                    let (q1, q2) = (self.eval(r1), self.eval(r2));
                    for c1 in q1.iter() {
                        for c2 in q2.iter() {
                            if let Some(z) = cs.lift(c1, c2) {
                                out.insert(cs.mul(z, twist));
                            }
                        }
                    }
                }
                Term::Tied { r, x, y, twist } => {
                    for c1 in self.eval(r).iter() {
                        let c2 = cs.mul(cs.mul(x, c1), y);
                        if let Some(z) = cs.lift(c1, c2) {
                            out.insert(cs.mul(z, twist));
                        }
                    }
                }
            }
        }
        CosetSet(out.0 & self.nodes[i].filter.0)
    }

    /// Iterates the open equations downwards from their filters to the
    /// greatest fixpoint.
    fn solve(&mut self) -> Result<(), ConjugacyError> {
        let open: Vec<usize> = (0..self.nodes.len()).filter(|&i| !self.nodes[i].solved).collect();
        loop {
            let mut changed = false;
            for &i in &open {
                let v = self.apply(i);
                if v != self.nodes[i].value {
                    self.nodes[i].value = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in open {
            self.nodes[i].solved = true;
        }
        Ok(())
    }

    /// Searches a conjugator of length at most `max_len` in the coset `c`.
    pub fn witness(&self, g: &Word, h: &Word, c: usize, max_len: usize) -> Result<Option<Word>, ConjugacyError> {
        let gr = &*self.g;
        let letters = gr.canonical_generators();
        let mut layer = vec![Word::empty()];
        let mut seen = rustc_hash::FxHashSet::default();
        seen.insert(Word::empty());
        for len in 0..=max_len {
            for f in &layer {
                if self.cosets.of(f) == c && equal(gr, &gr.conj(g, f), h)? {
                    return Ok(Some(f.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for f in &layer {
                for &x in &letters {
                    let mut v = f.0.clone();
                    v.push(x);
                    let v = gr.reduce(&Word(v));
                    if v.len() == len + 1 && seen.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
            layer = next;
        }
        Ok(None)
    }

    pub fn pairs_explored(&self) -> usize {
        self.nodes.len()
    }
}

/// Displays a coset set through the transversal words.
pub struct CosetDisplay<'a> {
    pub set: CosetSet,
    pub solver: &'a ConjugacySolver,
}

impl fmt::Display for CosetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.set.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "K{}", self.solver.g.format(&self.solver.cosets.names[c]))?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests;
