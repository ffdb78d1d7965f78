//! Subgroups of the iterated wreath product `C_p wr ... wr C_p` acting on
//! level `n` of the `p`-regular tree.
//!
//! An element is a permutation of the `p^n` leaves; its label at an interior
//! vertex `u` is the rotation it applies to the children of `u`. The leading
//! vertex of an element is the first vertex in breadth-first order with a
//! nonzero label. Elements whose labels vanish before a vertex `v` form a
//! subgroup `H_v`, and `H_v / H_(v+1)` embeds in `C_p`, so a table with at
//! most one element per leading vertex (label normalised to 1) is a
//! polycyclic generating sequence once `p`-th powers and conjugates of table
//! elements sift to the identity.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::perm::Perm;

#[derive(Clone, Debug)]
pub struct PcSeq {
    p: u32,
    degree: usize,
    /// Per breadth-first vertex: leaf index of `u 0...0` and the place value
    /// of the digit below `u`.
    verts: Vec<(usize, usize)>,
    /// `table[v][e-1] = t_v^e` for `e = 1..p-1`.
    table: Vec<Option<Vec<Perm>>>,
    len: usize,
}

impl PcSeq {
    pub fn new(p: u32, n: usize) -> Self {
        let pu = p as usize;
        let degree = pu.pow(n as u32);
        let mut verts = Vec::new();
        for k in 0..n {
            let place = pu.pow((n - k - 1) as u32);
            for idx in 0..pu.pow(k as u32) {
                verts.push((idx * place * pu, place));
            }
        }
        let nv = verts.len();
        PcSeq { p, degree, verts, table: vec![None; nv], len: 0 }
    }

    /// Whether every vertex label of `g` is a rotation of the children.
    pub fn fits(&self, g: &Perm) -> bool {
        let p = self.p as usize;
        g.degree() == self.degree
            && self.verts.iter().all(|&(leaf, place)| {
                let l = (g.apply(leaf) / place) % p;
                (0..p).all(|i| (g.apply(leaf + i * place) / place) % p == (i + l) % p)
            })
    }

    #[inline]
    fn label(&self, g: &Perm, v: usize) -> u32 {
        let (leaf, place) = self.verts[v];
        ((g.apply(leaf) / place) % self.p as usize) as u32
    }

    /// Divides off table elements; returns the residue and, if nonzero, its
    /// leading vertex.
    fn sift(&self, mut g: Perm) -> (Perm, Option<usize>) {
        for v in 0..self.verts.len() {
            let l = self.label(&g, v);
            if l == 0 {
                continue;
            }
            match &self.table[v] {
                Some(pows) => g = g.compose(&pows[(self.p - l) as usize - 1]),
                None => return (g, Some(v)),
            }
        }
        (g, None)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.sift(g.clone()).1.is_none()
    }

    /// Adds a generator; returns whether the group grew.
    pub fn add(&mut self, g: Perm) -> bool {
        let mut grew = false;
        let mut queue = vec![g];
        while let Some(x) = queue.pop() {
            let (h, lead) = self.sift(x);
            let Some(v) = lead else { continue };
            grew = true;
            let l = self.label(&h, v);
            let e = inverse_mod(l, self.p);
            let t = h.pow(e as i64);
            let mut pows = vec![t.clone()];
            for _ in 2..self.p {
                let next = pows.last().unwrap().compose(&t);
                pows.push(next);
            }
            queue.push(pows.last().unwrap().compose(&t));
            for (w, s) in self.table.iter().enumerate() {
                if let Some(s) = s {
                    let s = &s[0];
                    // conjugate the later element by the earlier one
                    let c = if w < v { conj(&t, s) } else { conj(s, &t) };
                    queue.push(c);
                }
            }
            self.table[v] = Some(pows);
            self.len += 1;
        }
        grew
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.len as u32)
    }

    pub fn exponent(&self) -> usize {
        self.len
    }

    /// The table elements in breadth-first order of their leading vertices.
    pub fn pcgs(&self) -> Vec<Perm> {
        self.table.iter().flatten().map(|t| t[0].clone()).collect()
    }

    /// Table elements leading at level `k` or below; they generate the
    /// kernel of the action on level `k`.
    pub fn tail(&self, k: usize) -> Vec<Perm> {
        let p = self.p as usize;
        let start = (p.pow(k as u32) - 1) / (p - 1);
        self.table[start.min(self.table.len())..].iter().flatten().map(|t| t[0].clone()).collect()
    }

    /// Generators of the stabilizer of a point, as an induced sequence.
    pub fn point_stabilizer(&self, x: usize) -> Vec<Perm> {
        let seq = self.pcgs();
        let mut trans: HashMap<usize, Perm> = HashMap::new();
        trans.insert(x, Perm::identity(self.degree));
        let mut orbit = vec![x];
        let mut stab = Vec::new();
        for t in seq.iter().rev() {
            let y = t.apply(x);
            if let Some(n) = trans.get(&y) {
                stab.push(t.compose(&n.inverse()));
                continue;
            }
            let base: Vec<usize> = orbit.clone();
            let mut te = Perm::identity(self.degree);
            for _ in 1..self.p {
                te = te.compose(t);
                for &z in &base {
                    let z2 = te.apply(z);
                    let g = trans[&z].compose(&te);
                    trans.insert(z2, g);
                    orbit.push(z2);
                }
            }
        }
        stab
    }
}

/// `x^y = y^-1 x y`.
fn conj(x: &Perm, y: &Perm) -> Perm {
    y.inverse().compose(x).compose(y)
}

fn inverse_mod(l: u32, p: u32) -> u32 {
    (1..p).find(|e| (l * e) % p == 1).expect("p is prime")
}
