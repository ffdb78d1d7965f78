//! Word problem, element orders, balls and growth weights.

mod order;

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::group::{BlockKind, GroupDefinition, GroupError, Letter, Word};
use crate::tree::TreeAutomorphism;

pub use order::{order, verify_certificate, Certificate, Link, OrderResult, OrderSolver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecisionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("resource bound exceeded: {what} (cap {cap})")]
    ResourceExceeded { what: &'static str, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Node cap for a single triviality query.
pub const TRIVIAL_NODE_CAP: usize = 2_000_000;

pub fn is_trivial(g: &GroupDefinition, w: &Word) -> Result<bool, DecisionError> {
    is_trivial_at(g, 0, w)
}

/// Word problem by recursion on first-level sections.
///
/// The closure of the word under taking reduced section words is explored
/// breadth first. A word with a nontrivial root permutation (or a single
/// letter, since letters are nontrivial) is nontrivial, and so is every word
/// above it. If the closure is exhausted with trivial root permutations
/// everywhere, every word in it is trivial. Results are memoised per group.
pub fn is_trivial_at(g: &GroupDefinition, class: usize, w: &Word) -> Result<bool, DecisionError> {
    let w = g.reduce_at(class, &w.0);
    match w.len() {
        0 => return Ok(true),
        1 => return Ok(false),
        _ => {}
    }
    let key = (class as u32, w.0.clone());
    if let Some(&v) = g.trivial_memo.read().get(&key) {
        return Ok(v);
    }
    if !g.perm_of_at(class, &w.0).is_identity() {
        g.trivial_memo.write().insert(key, false);
        return Ok(false);
    }
    let mut index: FxHashMap<(u32, Vec<Letter>), usize> = FxHashMap::default();
    let mut nodes: Vec<((u32, Vec<Letter>), usize)> = Vec::new();
    index.insert(key.clone(), 0);
    nodes.push((key, usize::MAX));
    let mut k = 0;
    let mut failed: Option<usize> = None;
    {
        let memo = g.trivial_memo.read();
        while k < nodes.len() {
            let (c, word) = nodes[k].0.clone();
            let known = if k > 0 { memo.get(&(c, word.clone())).copied() } else { None };
            match known {
                Some(true) => {
                    k += 1;
                    continue;
                }
                Some(false) => {
                    failed = Some(k);
                    break;
                }
                None => {}
            }
            if word.len() == 1 {
                failed = Some(k);
                break;
            }
            let (p, secs) = g.decompose_at(c as usize, &word);
            if !p.is_identity() {
                failed = Some(k);
                break;
            }
            let next = g.class(c as usize).next as u32;
            for s in secs {
                if s.is_empty() {
                    continue;
                }
                let ck = (next, s.0);
                if !index.contains_key(&ck) {
                    index.insert(ck.clone(), nodes.len());
                    nodes.push((ck, k));
                }
            }
            if nodes.len() > TRIVIAL_NODE_CAP {
                return Err(DecisionError::ResourceExceeded { what: "section closure in word problem", cap: TRIVIAL_NODE_CAP });
            }
            k += 1;
        }
    }
    let mut memo = g.trivial_memo.write();
    match failed {
        Some(mut f) => {
            while f != usize::MAX {
                memo.insert(nodes[f].0.clone(), false);
                f = nodes[f].1;
            }
            Ok(false)
        }
        None => {
            for (key, _) in nodes {
                memo.insert(key, true);
            }
            Ok(true)
        }
    }
}

pub fn equal(g: &GroupDefinition, u: &Word, v: &Word) -> Result<bool, DecisionError> {
    is_trivial(g, &g.mul(u, &g.inverse(v)))
}

/// Ball of radius `r` in the Cayley graph with respect to the canonical
/// generating set, one shortest representative per element (first found in
/// breadth-first order over the letters).
#[derive(Clone, Debug)]
pub struct Ball {
    pub elements: Vec<(Word, TreeAutomorphism)>,
    /// `spheres[n]` = number of elements of length exactly `n`.
    pub spheres: Vec<usize>,
}

impl Ball {
    /// `gamma(n)`: number of elements of length at most `n`.
    pub fn growth(&self, n: usize) -> usize {
        self.spheres.iter().take(n + 1).sum()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn ball(g: &GroupDefinition, radius: usize, cap: usize) -> Result<Ball, DecisionError> {
    let id = TreeAutomorphism::identity_on(g.class(0).shape);
    let mut seen: FxHashSet<TreeAutomorphism> = FxHashSet::default();
    seen.insert(id);
    let mut elements = vec![(Word::empty(), id)];
    let mut spheres = vec![1];
    let gens = g.canonical_generators();
    let mut frontier = 0..1;
    for _ in 0..radius {
        let start = elements.len();
        for i in frontier.clone() {
            let (w, s) = elements[i].clone();
            for &x in &gens {
                let t = s.compose(g.letter(0, x).state).map_err(GroupError::from)?;
                if seen.insert(t) {
                    let mut v = w.0.clone();
                    v.push(x);
                    elements.push((g.reduce_at(0, &v), t));
                    if elements.len() > cap {
                        return Err(DecisionError::ResourceExceeded { what: "ball size", cap });
                    }
                }
            }
        }
        spheres.push(elements.len() - start);
        frontier = start..elements.len();
    }
    Ok(Ball { elements, spheres })
}

/// Largest order over a ball, with counts of elements whose order was
/// certified infinite or left unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionGrowth {
    pub radius: usize,
    pub max_order: u64,
    pub witness: Word,
    pub infinite: usize,
    pub unknown: usize,
}

pub fn torsion_growth(g: &GroupDefinition, radius: usize, bound: u64) -> Result<TorsionGrowth, DecisionError> {
    let b = ball(g, radius, 5_000_000)?;
    let mut solver = OrderSolver::new(g);
    let mut out = TorsionGrowth { radius, max_order: 1, witness: Word::empty(), infinite: 0, unknown: 0 };
    for (w, _) in &b.elements {
        match solver.order(w, bound)? {
            OrderResult::Finite(k) => {
                if k > out.max_order {
                    out.max_order = k;
                    out.witness = w.clone();
                }
            }
            OrderResult::InfiniteCertified(_) => out.infinite += 1,
            OrderResult::Unknown(_) => out.unknown += 1,
        }
    }
    Ok(out)
}

/// Weights `tau_0, ..., tau_r` attached to the root `eta_r` in (0,1) of
/// `x^r + x^(r-1) + x^(r-2) - 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaWeights {
    pub r: usize,
    pub eta: f64,
    pub tau: Vec<f64>,
}

pub fn eta_weights(r: usize) -> Result<EtaWeights, DecisionError> {
    if r < 3 {
        return Err(DecisionError::Invalid(format!("eta weights need r >= 3, got {r}")));
    }
    let f = |x: f64| x.powi(r as i32) + x.powi(r as i32 - 1) + x.powi(r as i32 - 2) - 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = 0.5 * (lo + hi);
    let er = eta.powi(r as i32);
    let mut tau = vec![1.0 - er];
    for i in 1..=r {
        tau.push(er + eta.powi((r - i) as i32) - 1.0);
    }
    Ok(EtaWeights { r, eta, tau })
}

impl EtaWeights {
    /// Weight of each class-0 letter of a spinal group: `tau_0` on rooted
    /// letters and `tau_i` on a directed letter lying in the `i`-th kernel
    /// (the first level at which its non-spinal sections vanish).
    pub fn letter_weights(&self, g: &GroupDefinition) -> Result<Vec<f64>, DecisionError> {
        let mut out = Vec::new();
        for x in 0..g.letters().len() as Letter {
            let i = kernel_index(g, 0, x, self.r)?;
            out.push(self.tau[i]);
        }
        Ok(out)
    }

    pub fn weight(&self, weights: &[f64], w: &Word) -> f64 {
        w.0.iter().map(|&x| weights[x as usize]).sum()
    }
}

/// 0 for rooted letters; for a directed letter `b`, the least `i >= 1` with
/// `b` in `Ker(omega_i)`, found by walking down the spine.
fn kernel_index(g: &GroupDefinition, class: usize, x: Letter, r: usize) -> Result<usize, DecisionError> {
    match g.block_of(class, x).kind {
        BlockKind::Rooted => return Ok(0),
        BlockKind::Mixed => return Err(DecisionError::Invalid("weights need a spinal group".into())),
        BlockKind::Directed => {}
    }
    let mut c = class;
    let mut y = x;
    for i in 1..=r {
        let l = g.letter(c, y);
        let m = l.sections.len();
        if l.sections[..m - 1].iter().all(|s| s.is_empty()) {
            return Ok(i);
        }
        let spine = &l.sections[m - 1];
        if spine.len() != 1 {
            return Err(DecisionError::Invalid("weights need a spinal group".into()));
        }
        y = spine.0[0];
        c = g.class(c).next;
    }
    Err(DecisionError::Invalid(format!("the defining sequence is not {r}-homogeneous")))
}

/// All sections of a word at level `r`, in lexicographic vertex order.
pub fn level_sections(g: &GroupDefinition, w: &Word, r: usize) -> Vec<Word> {
    let mut cur = vec![(0usize, w.clone())];
    for _ in 0..r {
        let mut nx = Vec::new();
        for (c, u) in cur {
            let (_, secs) = g.decompose_at(c, &u.0);
            let n = g.class(c).next;
            nx.extend(secs.into_iter().map(|s| (n, s)));
        }
        cur = nx;
    }
    cur.into_iter().map(|(_, s)| s).collect()
}

/// Shortest word (breadth-first over the canonical letters) inducing a given
/// permutation on level `n`, if one of length at most `max_len` exists.
pub fn word_for_level_perm(
    g: &GroupDefinition,
    n: usize,
    target: &crate::perm::Perm,
    max_len: usize,
) -> Option<Word> {
    let gens = g.canonical_generators();
    let gp: Vec<crate::perm::Perm> = gens.iter().map(|&x| g.letter(0, x).state.level_perm(n)).collect();
    let id = crate::perm::Perm::identity(target.degree());
    let mut seen: FxHashMap<crate::perm::Perm, Word> = FxHashMap::default();
    seen.insert(id.clone(), Word::empty());
    let mut queue = VecDeque::from([(id, Word::empty())]);
    while let Some((p, w)) = queue.pop_front() {
        if p == *target {
            return Some(w);
        }
        if w.len() >= max_len {
            continue;
        }
        for (k, &x) in gens.iter().enumerate() {
            let q = p.compose(&gp[k]);
            if !seen.contains_key(&q) {
                let mut v = w.0.clone();
                v.push(x);
                let v = g.reduce_at(0, &v);
                seen.insert(q.clone(), v.clone());
                queue.push_back((q, v));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests;
