//! Finite level quotients `G_n = G / Stab_G(L_n)` as permutation groups on
//! the level-`n` vertices (lexicographic order).
//!
//! Subgroups are handled by one of two engines: a polycyclic table when
//! every vertex label is a rotation of prime order (all the `p`-groups in
//! the built-in list), and a Schreier-Sims chain otherwise.

mod chain;
mod pc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::group::{GroupDefinition, GroupError};
use crate::perm::{self, Perm};
use crate::tree::{TreeShape, Vertex};

pub use chain::Chain;
pub use pc::PcSeq;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("resource bound exceeded: {what} (cap {cap})")]
    ResourceExceeded { what: &'static str, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Largest level size handled.
pub const DEGREE_CAP: usize = 1 << 12;

/// The group induced on level `n`.
#[derive(Clone, Debug)]
pub struct LevelQuotient {
    pub name: String,
    pub level: usize,
    pub shape: TreeShape,
    pub degree: usize,
    pub generators: Vec<(String, Perm)>,
    /// Prime `p` when the polycyclic engine applies.
    pub prime: Option<u32>,
    group: Subgroup,
}

#[derive(Clone, Debug)]
enum Engine {
    Pc(PcSeq),
    Chain(Chain),
}

/// A subgroup of a level quotient given by generators.
#[derive(Clone, Debug)]
pub struct Subgroup {
    degree: usize,
    pc: Option<(u32, usize)>,
    gens: Vec<Perm>,
    engine: Engine,
}

impl Subgroup {
    fn build(degree: usize, prime: Option<(u32, usize)>, gens: Vec<Perm>) -> Subgroup {
        let gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let engine = match prime {
            Some((p, n)) => {
                let mut s = PcSeq::new(p, n);
                for g in &gens {
                    s.add(g.clone());
                }
                Engine::Pc(s)
            }
            None => Engine::Chain(Chain::new(degree, &gens, &[])),
        };
        Subgroup { degree, pc: prime, gens, engine }
    }

    /// A subgroup of the same ambient quotient (same engine).
    pub fn sibling(&self, gens: Vec<Perm>) -> Subgroup {
        Subgroup::build(self.degree, self.pc, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> BigUint {
        match &self.engine {
            Engine::Pc(s) => s.order(),
            Engine::Chain(c) => c.order(),
        }
    }

    pub fn contains(&self, g: &Perm) -> bool {
        match &self.engine {
            Engine::Pc(s) => s.contains(g),
            Engine::Chain(c) => c.contains(g),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    /// Adds a generator; returns whether the subgroup grew.
    pub fn add(&mut self, g: Perm) -> bool {
        if self.contains(&g) {
            return false;
        }
        self.gens.push(g.clone());
        match &mut self.engine {
            Engine::Pc(s) => {
                s.add(g);
            }
            Engine::Chain(c) => *c = Chain::new(self.degree, &self.gens, &[]),
        }
        true
    }

    /// `|sup : self|`, assuming `self <= sup`.
    pub fn index_in(&self, sup: &Subgroup) -> BigUint {
        sup.order() / self.order()
    }

    /// Pointwise stabilizer of a set of points.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Subgroup {
        match &self.engine {
            Engine::Pc(_) => {
                let mut cur = self.clone();
                for &x in points {
                    if cur.gens.iter().all(|g| g.apply(x) == x) {
                        continue;
                    }
                    let Engine::Pc(s) = &cur.engine else { unreachable!() };
                    let gens = s.point_stabilizer(x);
                    cur = cur.sibling(gens);
                }
                cur
            }
            Engine::Chain(_) => {
                let c = Chain::new(self.degree, &self.gens, points);
                let gens = c.stabilizer_gens(points.len());
                self.sibling(gens)
            }
        }
    }

    /// Orbits on all points, each sorted, listed by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for s in 0..self.degree {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut orb = vec![s];
            let mut k = 0;
            while k < orb.len() {
                let x = orb[k];
                k += 1;
                for g in &self.gens {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orb.push(y);
                    }
                }
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    /// Normal closure of `seeds` under conjugation by `ambient`.
    pub fn normal_closure(&self, ambient: &[Perm], seeds: Vec<Perm>) -> Subgroup {
        let mut sub = self.sibling(Vec::new());
        let mut queue: Vec<Perm> = Vec::new();
        for s in seeds {
            if sub.add(s.clone()) {
                queue.push(s);
            }
        }
        while let Some(h) = queue.pop() {
            for g in ambient {
                let c = g.inverse().compose(&h).compose(g);
                if sub.add(c.clone()) {
                    queue.push(c);
                }
            }
        }
        sub
    }

    /// `[H, K]` for subgroups `H = self` and `K` that are normal in the
    /// group generated by `ambient`.
    pub fn commutator_with(&self, other: &Subgroup, ambient: &[Perm]) -> Subgroup {
        let mut seeds = Vec::new();
        for h in &self.gens {
            for k in &other.gens {
                let c = h.commutator(k);
                if !c.is_identity() {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure(ambient, seeds)
    }
}

pub fn level_quotient(g: &GroupDefinition, n: usize) -> Result<LevelQuotient, QuotientError> {
    let shape = g.shape().clone();
    let degree = shape.level_size(n);
    if degree > DEGREE_CAP {
        return Err(QuotientError::ResourceExceeded { what: "level size", cap: DEGREE_CAP });
    }
    let generators: Vec<(String, Perm)> =
        g.generator_states().into_iter().map(|(name, s)| (name, s.level_perm(n))).collect();
    let prime = pc_prime(&shape, n, &generators);
    let gens: Vec<Perm> = generators.iter().map(|(_, p)| p.clone()).collect();
    let group = Subgroup::build(degree, prime.map(|p| (p, n)), gens);
    Ok(LevelQuotient { name: g.name().to_string(), level: n, shape, degree, generators, prime, group })
}

fn pc_prime(shape: &TreeShape, n: usize, gens: &[(String, Perm)]) -> Option<u32> {
    if n == 0 || !shape.is_regular() {
        return None;
    }
    let m = shape.arity(0) as u32;
    if !is_prime(m) {
        return None;
    }
    let probe = PcSeq::new(m, n);
    gens.iter().all(|(_, g)| probe.fits(g)).then_some(m)
}

fn is_prime(m: u32) -> bool {
    m >= 2 && (2..m).take_while(|d| d * d <= m).all(|d| m % d != 0)
}

impl LevelQuotient {
    /// A quotient-like wrapper around arbitrary permutations of level `n`.
    pub fn from_perms(name: &str, shape: &TreeShape, n: usize, generators: Vec<(String, Perm)>) -> LevelQuotient {
        let degree = shape.level_size(n);
        let prime = pc_prime(shape, n, &generators);
        let gens: Vec<Perm> = generators.iter().map(|(_, p)| p.clone()).collect();
        let group = Subgroup::build(degree, prime.map(|p| (p, n)), gens);
        LevelQuotient { name: name.to_string(), level: n, shape: shape.clone(), degree, generators, prime, group }
    }

    /// The full automorphism group of the tree truncated at level `n`,
    /// generated by `Sym(m_k)` acting at the vertices `0^k`.
    pub fn full_aut(shape: &TreeShape, n: usize) -> LevelQuotient {
        let degree = shape.level_size(n);
        let mut gens = Vec::new();
        for k in 0..n {
            let m = shape.arity(k);
            let block = shape.shift_by(k + 1).level_size(n - k - 1);
            let mut local = vec![Perm::rotation(m, 1)];
            if m > 2 {
                local.push(Perm::from_cycles(m, &[vec![0, 1]]).unwrap());
            }
            for (j, q) in local.iter().enumerate() {
                let img: Vec<u32> = (0..degree)
                    .map(|x| if x < m * block { (q.apply(x / block) * block + x % block) as u32 } else { x as u32 })
                    .collect();
                gens.push((format!("s{k}_{j}"), Perm::from_images(img).unwrap()));
            }
        }
        LevelQuotient::from_perms("Aut", shape, n, gens)
    }

    pub fn group(&self) -> &Subgroup {
        &self.group
    }

    /// The same group held by a Schreier-Sims chain regardless of engine.
    pub fn with_chain(&self) -> Subgroup {
        Subgroup::build(self.degree, None, self.gens())
    }

    pub fn gens(&self) -> Vec<Perm> {
        self.generators.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.group.order()
    }

    pub fn subgroup(&self, gens: Vec<Perm>) -> Subgroup {
        self.group.sibling(gens)
    }

    /// Order by enumerating all elements (small degrees only).
    pub fn brute_force_order(&self, cap: usize) -> Option<usize> {
        perm::closure(&self.gens(), self.degree, cap).map(|v| v.len())
    }

    /// Level-`n` vertices below `v`, as leaf indices.
    pub fn leaves_below(&self, v: &Vertex) -> std::ops::Range<usize> {
        let sub = self.shape.shift_by(v.len()).level_size(self.level - v.len());
        let start = v.index(&self.shape) * sub;
        start..start + sub
    }

    /// Elements of `G_n` fixing every leaf outside the subtree at `v`.
    pub fn rigid_stabilizer(&self, v: &Vertex) -> Subgroup {
        let inside = self.leaves_below(v);
        let outside: Vec<usize> = (0..self.degree).filter(|x| !inside.contains(x)).collect();
        self.group.pointwise_stabilizer(&outside)
    }

    /// Product of the rigid stabilizers of all level-`k` vertices.
    pub fn rigid_level_stabilizer(&self, k: usize) -> Subgroup {
        let mut gens = Vec::new();
        for idx in 0..self.shape.level_size(k) {
            let v = Vertex::from_index(&self.shape, k, idx);
            gens.extend(self.rigid_stabilizer(&v).generators().iter().cloned());
        }
        self.subgroup(gens)
    }

    /// Image of the level-`k` stabilizer: the kernel of the action on level
    /// `k`.
    pub fn level_stabilizer(&self, k: usize) -> Subgroup {
        if k == 0 {
            return self.group.clone();
        }
        if let Engine::Pc(s) = &self.group.engine {
            return self.subgroup(s.tail(k));
        }
        // act on level n and level k side by side, then fix the level-k copy
        let dk = self.shape.level_size(k);
        let block = self.degree / dk;
        let ext: Vec<Perm> = self
            .gens()
            .iter()
            .map(|g| {
                let mut img: Vec<u32> = g.images().to_vec();
                img.extend((0..dk).map(|u| (self.degree + g.apply(u * block) / block) as u32));
                Perm::from_images(img).unwrap()
            })
            .collect();
        let pts: Vec<usize> = (self.degree..self.degree + dk).collect();
        let c = Chain::new(self.degree + dk, &ext, &pts);
        let gens = c
            .stabilizer_gens(dk)
            .into_iter()
            .map(|g| Perm::from_images(g.images()[..self.degree].to_vec()).unwrap())
            .collect();
        self.subgroup(gens)
    }

    /// `gamma_1 = G`, `gamma_(k+1) = [gamma_k, G]`, until trivial or `kmax`
    /// terms.
    pub fn lower_central_series(&self, kmax: usize) -> Vec<Subgroup> {
        let ambient = self.gens();
        let mut out = vec![self.group.clone()];
        while out.len() < kmax + 1 {
            let last = out.last().unwrap();
            if last.is_trivial() {
                break;
            }
            let next = last.commutator_with(&self.group, &ambient);
            out.push(next);
        }
        out
    }

    /// `log_p |gamma_k / gamma_(k+1)|` for `k = 1..=kmax`.
    pub fn lower_central_ranks(&self, kmax: usize) -> Result<Vec<u32>, QuotientError> {
        let series = self.lower_central_series(kmax);
        let p = self.order_prime()?;
        let mut out = Vec::new();
        for k in 0..kmax {
            let r = match (series.get(k), series.get(k + 1)) {
                (Some(a), Some(b)) => log_prime(&(a.order() / b.order()), p),
                (Some(a), None) => log_prime(&a.order(), p),
                _ => Some(0),
            };
            out.push(r.ok_or_else(|| QuotientError::Invalid("section of the series is not a p-group".into()))?);
        }
        Ok(out)
    }

    /// Smallest `c` with `gamma_(c+1)` trivial.
    pub fn nilpotency_class(&self) -> usize {
        let s = self.lower_central_series(usize::MAX - 1);
        s.iter().take_while(|g| !g.is_trivial()).count()
    }

    /// Orders of `G^(0) = G, G^(1), ...` up to `kmax` terms or the trivial
    /// group.
    pub fn derived_series(&self, kmax: usize) -> Vec<Subgroup> {
        let ambient = self.gens();
        let mut out = vec![self.group.clone()];
        while out.len() <= kmax {
            let last = out.last().unwrap();
            if last.is_trivial() {
                break;
            }
            let next = last.commutator_with(last, &ambient);
            out.push(next);
        }
        out
    }

    /// The prime `p` when `|G_n|` is a power of `p`.
    pub fn order_prime(&self) -> Result<u32, QuotientError> {
        if let Some(p) = self.prime {
            return Ok(p);
        }
        let o = self.order();
        prime_power(&o).map(|(p, _)| p).ok_or_else(|| QuotientError::Invalid(format!("|G_n| = {o} is not a prime power")))
    }

    /// Orbit sizes (sorted) of the stabilizer of the basepoint `(m-1)(m-1)...`.
    pub fn suborbit_profile(&self) -> Vec<usize> {
        let base = self.degree - 1;
        let stab = self.group.pointwise_stabilizer(&[base]);
        let mut sizes: Vec<usize> = stab.orbits().iter().map(|o| o.len()).collect();
        sizes.sort_unstable();
        sizes
    }
}

/// Order of the full automorphism group of the tree truncated at level `n`.
pub fn full_aut_order(shape: &TreeShape, n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 0..n {
        let f: BigUint = (1..=shape.arity(k) as u32).map(BigUint::from).product();
        acc *= f.pow(shape.level_size(k) as u32);
    }
    acc
}

pub fn group_order(q: &LevelQuotient) -> BigUint {
    q.order()
}

/// Which group to measure the quotient orders against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalisation {
    /// Iterated wreath product of the groups generated by the vertex
    /// permutations occurring at each level.
    LocalWreath,
    /// The full group of the truncated tree.
    FullAut,
}

/// `log |G_n| / log |W_n|`.
pub fn hausdorff_ratio(g: &GroupDefinition, n: usize, norm: Normalisation) -> Result<f64, QuotientError> {
    let q = level_quotient(g, n)?;
    let num = ln_big(&q.order());
    let shape = g.shape();
    let mut den = 0.0;
    for k in 0..n {
        let local = match norm {
            Normalisation::FullAut => (1..=shape.arity(k) as u64).map(|x| (x as f64).ln()).sum::<f64>(),
            Normalisation::LocalWreath => {
                let c = g.class(g.class_at_depth(k));
                let perms: Vec<Perm> = c.letters.iter().map(|l| l.perm.clone()).collect();
                let size = perm::closure(&perms, c.arity, 1 << 20).map(|v| v.len()).unwrap_or(1);
                (size as f64).ln()
            }
        };
        den += shape.level_size(k) as f64 * local;
    }
    if den == 0.0 {
        return Err(QuotientError::Invalid("trivial normalising group".into()));
    }
    Ok(num / den)
}

pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(p, e)` with `x = p^e`, for `x > 1`.
pub fn prime_power(x: &BigUint) -> Option<(u32, u32)> {
    if *x <= BigUint::one() {
        return None;
    }
    let mut p = 2u32;
    loop {
        if (x % p).bits() == 0 {
            return log_prime(x, p).map(|e| (p, e));
        }
        p += 1;
        if p > 1 << 20 {
            return None;
        }
    }
}

fn log_prime(x: &BigUint, p: u32) -> Option<u32> {
    let mut x = x.clone();
    let mut e = 0;
    while x > BigUint::one() {
        if (&x % p).bits() != 0 {
            return None;
        }
        x /= p;
        e += 1;
    }
    Some(e)
}

/// `p^e` when the number is a prime power (and `1` for one), decimal
/// otherwise.
pub fn format_order(x: &BigUint) -> String {
    if x.is_one() {
        return "1".into();
    }
    match prime_power(x) {
        Some((p, e)) => format!("{p}^{e}"),
        None => x.to_string(),
    }
}
