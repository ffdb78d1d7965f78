//! Element orders by recursion on first-return sections.
//!
//! For `W` with root permutation `p`, pick one point `i` in each cycle of
//! `p` (length `t`) and let `F_i` be the cyclically reduced section of
//! `W^t` at `i`. Then `W^n = 1` iff `t * pi(F_i)` divides `n` for every
//! cycle, so `pi(W) = lcm_i(t_i * pi(F_i))`. The recursion revisits words; a
//! return to a word on the current path through first-return steps whose
//! cycle lengths multiply to at least 2 shows infinite order, a return with
//! product 1 contributes nothing.

use num_integer::Integer;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{is_trivial, DecisionError};
use crate::group::{GroupDefinition, Letter, Word};
use crate::tree::{shape_of_id, TreeAutomorphism, Vertex};

const MAX_DEPTH: usize = 64;
const MAX_LEN: usize = 10_000;
const VISIT_CAP: usize = 1_000_000;
const CONJ_LEN: usize = 4;
const VERTEX_CAP: usize = 4096;
const VERIFY_LEN_CAP: u64 = 1 << 23;

/// `section(W^power, vertex) = conjugator^-1 W^sign conjugator`, where the
/// orbit of `vertex` under `W` has length exactly `power >= 2`. `W` is
/// `witness` over the letters of `class`. When `W` is not the queried
/// element `g` itself, `link` records `section(g^k0, v0) = f0^-1 W^s0 f0`
/// with `g^k0` fixing `v0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub class: usize,
    pub witness: Word,
    pub power: u64,
    pub vertex: Vertex,
    pub sign: i8,
    pub conjugator: Word,
    pub link: Option<Link>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub power: u64,
    pub vertex: Vertex,
    pub sign: i8,
    pub conjugator: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderResult {
    Finite(u64),
    InfiniteCertified(Certificate),
    Unknown(String),
}

enum Out {
    Fin(u64, usize),
    Inf { class: usize, word: Vec<Letter>, depth: usize, cycle: usize },
    Unknown(String),
}

struct Entry {
    class: usize,
    word: Vec<Letter>,
    t_in: u64,
}

/// Order computation with a memo shared across queries on one group.
pub struct OrderSolver<'g> {
    g: &'g GroupDefinition,
    memo: FxHashMap<(usize, Vec<Letter>), u64>,
    visits: usize,
}

pub fn order(g: &GroupDefinition, w: &Word, bound: u64) -> Result<OrderResult, DecisionError> {
    OrderSolver::new(g).order(w, bound)
}

impl<'g> OrderSolver<'g> {
    pub fn new(g: &'g GroupDefinition) -> Self {
        OrderSolver { g, memo: FxHashMap::default(), visits: 0 }
    }

    pub fn order(&mut self, w: &Word, bound: u64) -> Result<OrderResult, DecisionError> {
        if bound == 0 {
            return Err(DecisionError::Invalid("order bound must be at least 1".into()));
        }
        let g = self.g;
        let w = g.reduce(w);
        if w.is_empty() {
            return Ok(OrderResult::Finite(1));
        }
        let (r, _) = g.cyclic_reduce(&w);
        self.visits = 0;
        let mut path = Vec::new();
        match self.visit(0, r.0, 1, bound, &mut path) {
            Out::Fin(k, _) if k > bound => Ok(OrderResult::Unknown(format!("order exceeds bound {bound}"))),
            Out::Fin(k, _) => self.confirm(&w, k),
            Out::Unknown(why) => Ok(OrderResult::Unknown(why)),
            Out::Inf { class, word, depth, cycle } => {
                let Some(cert) = self.certify(&w, class, Word(word), depth, cycle) else {
                    return Ok(OrderResult::Unknown("cycle found but no short conjugator".into()));
                };
                if verify_certificate(g, &w, &cert)? {
                    Ok(OrderResult::InfiniteCertified(cert))
                } else {
                    Ok(OrderResult::Unknown("certificate failed verification".into()))
                }
            }
        }
    }

    fn confirm(&self, w: &Word, k: u64) -> Result<OrderResult, DecisionError> {
        let g = self.g;
        if k.saturating_mul(w.len() as u64) > VERIFY_LEN_CAP {
            return Ok(OrderResult::Unknown(format!("order {k} too large to verify")));
        }
        if !is_trivial(g, &g.pow(w, k as i64))? {
            return Ok(OrderResult::Unknown(format!("power {k} not trivial")));
        }
        for p in prime_factors(k) {
            if is_trivial(g, &g.pow(w, (k / p) as i64))? {
                return Ok(OrderResult::Unknown(format!("power {} already trivial", k / p)));
            }
        }
        Ok(OrderResult::Finite(k))
    }

    fn visit(&mut self, c: usize, w: Vec<Letter>, t_in: u64, bound: u64, path: &mut Vec<Entry>) -> Out {
        if w.is_empty() {
            return Out::Fin(1, usize::MAX);
        }
        let key = (c, w);
        if let Some(&k) = self.memo.get(&key) {
            return Out::Fin(k, usize::MAX);
        }
        let (c, w) = key;
        let inv = self.g.inverse_at(c, &Word(w.clone())).0;
        if let Some(j) = path.iter().position(|e| e.class == c && (e.word == w || e.word == inv)) {
            let product: u64 = path[j + 1..].iter().map(|e| e.t_in).product::<u64>() * t_in;
            if product >= 2 {
                return Out::Inf { class: c, word: path[j].word.clone(), depth: j, cycle: path.len() - j };
            }
            return Out::Fin(1, j);
        }
        if path.len() >= MAX_DEPTH {
            return Out::Unknown(format!("recursion deeper than {MAX_DEPTH}"));
        }
        if w.len() > MAX_LEN {
            return Out::Unknown(format!("section word longer than {MAX_LEN}"));
        }
        self.visits += 1;
        if self.visits > VISIT_CAP {
            return Out::Unknown(format!("more than {VISIT_CAP} sections visited"));
        }
        let g = self.g;
        let p = g.perm_of_at(c, &w);
        let next = g.class(c).next;
        path.push(Entry { class: c, word: w.clone(), t_in });
        let mut acc = 1u64;
        let mut low = usize::MAX;
        for cyc in p.cycles() {
            let t = cyc.len();
            let mut wt = Vec::with_capacity(w.len() * t);
            for _ in 0..t {
                wt.extend_from_slice(&w);
            }
            let s = g.section_at(c, &wt, cyc[0]);
            let (f, _) = g.cyclic_reduce_at(next, &s);
            match self.visit(next, f.0, t as u64, bound, path) {
                Out::Fin(k, l) => {
                    low = low.min(l);
                    let v = (t as u64).checked_mul(k);
                    let a = v.and_then(|v| (acc / acc.gcd(&v)).checked_mul(v));
                    match a {
                        Some(a) if a <= bound => acc = a,
                        _ => {
                            path.pop();
                            return Out::Unknown(format!("order exceeds bound {bound}"));
                        }
                    }
                }
                other => {
                    path.pop();
                    return other;
                }
            }
        }
        path.pop();
        if low >= path.len() {
            self.memo.insert((c, w), acc);
            Out::Fin(acc, usize::MAX)
        } else {
            Out::Fin(acc, low)
        }
    }

    fn certify(&self, w: &Word, class: usize, d: Word, depth: usize, cycle: usize) -> Option<Certificate> {
        let g = self.g;
        let levels = 1..=cycle.max(1);
        let (power, vertex, sign, conjugator) = find_section_conjugate(g, class, &d, class, &d, levels, true)?;
        let (r, f) = g.cyclic_reduce(w);
        let link = if depth == 0 {
            if r == *w {
                None
            } else {
                Some(Link { power: 1, vertex: Vertex::root(), sign: 1, conjugator: g.inverse(&f) })
            }
        } else {
            let (k0, v0, s0, f0) = find_section_conjugate(g, 0, w, class, &d, depth..=depth, false)?;
            Some(Link { power: k0, vertex: v0, sign: s0, conjugator: f0 })
        };
        Some(Certificate { class, witness: d, power, vertex, sign, conjugator, link })
    }
}

/// Searches vertices `v` on the given levels (lexicographic order) and
/// conjugators `f` of length at most 4 (shortest first) with
/// `section(src^l, v) = f^-1 dst^(+-1) f`, where `l` is the orbit length of
/// `v` under `src`.
fn find_section_conjugate(
    g: &GroupDefinition,
    c_src: usize,
    src: &Word,
    c_dst: usize,
    dst: &Word,
    levels: std::ops::RangeInclusive<usize>,
    need_orbit: bool,
) -> Option<(u64, Vertex, i8, Word)> {
    let shape = shape_of_id(g.class(c_src).shape);
    let state = g.element_at(c_src, &src.0);
    let mut cands: Vec<(u64, Vertex, TreeAutomorphism)> = Vec::new();
    let mut count = 0usize;
    for level in levels {
        if g.class_at_depth_from(c_src, level) != c_dst {
            continue;
        }
        let n = shape.level_size(level);
        for idx in 0..n {
            count += 1;
            if count > VERTEX_CAP {
                break;
            }
            let v = Vertex::from_index(&shape, level, idx);
            let l = orbit_length(state, &v)?;
            if need_orbit && l < 2 {
                continue;
            }
            let (_, s) = g.section_word(c_src, &g.pow_at(c_src, src, l as i64), &v.0);
            cands.push((l, v, g.element_at(c_dst, &s.0)));
        }
    }
    if cands.is_empty() {
        return None;
    }
    let targets = [(1i8, dst.clone()), (-1i8, g.inverse_at(c_dst, dst))];
    for f in short_words(g, c_dst, CONJ_LEN) {
        let conj: Vec<(i8, TreeAutomorphism)> =
            targets.iter().map(|(s, t)| (*s, g.element_at(c_dst, &g.conj_at(c_dst, t, &f).0))).collect();
        for (l, v, s) in &cands {
            for (sign, t) in &conj {
                if s == t {
                    return Some((*l, v.clone(), *sign, f));
                }
            }
        }
    }
    None
}

fn orbit_length(state: TreeAutomorphism, v: &Vertex) -> Option<u64> {
    let mut u = state.act(v).ok()?;
    let mut l = 1u64;
    while u != *v {
        u = state.act(&u).ok()?;
        l += 1;
        if l > 1 << 20 {
            return None;
        }
    }
    Some(l)
}

/// Reduced words of length at most `n` over the letters of a class, by
/// length and then in letter order.
fn short_words(g: &GroupDefinition, class: usize, n: usize) -> Vec<Word> {
    let letters = g.class(class).letters.len() as Letter;
    let mut out = vec![Word::empty()];
    let mut seen: FxHashSet<Word> = FxHashSet::default();
    seen.insert(Word::empty());
    let mut layer = vec![Word::empty()];
    for len in 1..=n {
        let mut nx = Vec::new();
        for w in &layer {
            for x in 0..letters {
                let mut v = w.0.clone();
                v.push(x);
                let v = g.reduce_at(class, &v);
                if v.len() == len && seen.insert(v.clone()) {
                    nx.push(v);
                }
            }
        }
        out.extend(nx.iter().cloned());
        layer = nx;
    }
    out
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Checks a certificate from scratch with exact state comparisons.
pub fn verify_certificate(g: &GroupDefinition, w: &Word, cert: &Certificate) -> Result<bool, DecisionError> {
    let w = g.reduce(w);
    let c = cert.class;
    let signed = |s: i8| if s < 0 { g.inverse_at(c, &cert.witness) } else { cert.witness.clone() };
    match &cert.link {
        None => {
            if c != 0 || g.reduce(&cert.witness) != w {
                return Ok(false);
            }
        }
        Some(link) => {
            let gk = g.pow(&w, link.power as i64);
            if g.element(&gk).act(&link.vertex).ok().as_ref() != Some(&link.vertex) {
                return Ok(false);
            }
            let (cs, s) = g.section_word(0, &gk, &link.vertex.0);
            if cs != c {
                return Ok(false);
            }
            let t = g.conj_at(c, &signed(link.sign), &link.conjugator);
            if g.element_at(c, &s.0) != g.element_at(c, &t.0) {
                return Ok(false);
            }
        }
    }
    if cert.power < 2 {
        return Ok(false);
    }
    let state = g.element_at(c, &cert.witness.0);
    if orbit_length(state, &cert.vertex) != Some(cert.power) {
        return Ok(false);
    }
    let (cs, s) = g.section_word(c, &g.pow_at(c, &cert.witness, cert.power as i64), &cert.vertex.0);
    if cs != c {
        return Ok(false);
    }
    let t = g.conj_at(c, &signed(cert.sign), &cert.conjugator);
    Ok(g.element_at(c, &s.0) == g.element_at(c, &t.0))
}
