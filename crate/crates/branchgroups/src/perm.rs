//! Permutations acting on the right: `i^(pq) = (i^p)^q`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { img: (0..n as u32).collect() }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(img: Vec<u32>) -> Option<Self> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &x in &img {
            let x = x as usize;
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm { img })
    }

    pub(crate) fn from_images_unchecked(img: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(img.clone()).is_some());
        Perm { img }
    }

    /// Parses 0-based cycles, e.g. `[[0, 1, 2]]` on `n` points.
    pub fn from_cycles(n: usize, cycles: &[Vec<u32>]) -> Option<Self> {
        let mut img: Vec<u32> = (0..n as u32).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                let x = x as usize;
                if x >= n || used[x] {
                    return None;
                }
                used[x] = true;
                img[x] = c[(k + 1) % c.len()];
            }
        }
        Some(Perm { img })
    }

    /// The standard cycle `0 -> 1 -> ... -> n-1 -> 0` raised to `k`.
    pub fn rotation(n: usize, k: i64) -> Self {
        let n_i = n as i64;
        let s = k.rem_euclid(n_i);
        Perm { img: (0..n_i).map(|i| ((i + s) % n_i) as u32).collect() }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.img[i] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { img: self.img.iter().map(|&x| other.img[x as usize]).collect() }
    }

    pub fn compose_into(&self, other: &Perm, out: &mut Perm) {
        out.img.clear();
        out.img.extend(self.img.iter().map(|&x| other.img[x as usize]));
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { img: inv }
    }

    pub fn pow(&self, mut e: i64) -> Perm {
        let mut base = if e < 0 {
            e = -e;
            self.inverse()
        } else {
            self.clone()
        };
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// `p^-1 * self * p`, i.e. `self` conjugated by `p`.
    pub fn conj(&self, p: &Perm) -> Perm {
        p.inverse().compose(self).compose(p)
    }

    /// `[self, q] = self^-1 q^-1 self q`.
    pub fn commutator(&self, q: &Perm) -> Perm {
        self.inverse().compose(&q.inverse()).compose(self).compose(q)
    }

    /// Cycle lengths, sorted in decreasing order (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for s in 0..self.degree() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for s in 0..self.degree() {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().into_iter().fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Perm {
    /// 1-based cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles() {
            if c.len() < 2 {
                continue;
            }
            any = true;
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Closure of a set of permutations under composition (the generated group).
/// Returns `None` once more than `cap` elements are found.
pub fn closure(gens: &[Perm], degree: usize, cap: usize) -> Option<Vec<Perm>> {
    use std::collections::HashSet;
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut k = 0;
    while k < out.len() {
        let x = out[k].clone();
        k += 1;
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return None;
                }
                out.push(y);
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_action_composition() {
        let p = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let q = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
        let pq = p.compose(&q);
        for i in 0..3 {
            assert_eq!(pq.apply(i), q.apply(p.apply(i)));
        }
    }

    #[test]
    fn inverse_and_pow() {
        let r = Perm::rotation(5, 2);
        assert!(r.compose(&r.inverse()).is_identity());
        assert!(r.pow(5).is_identity());
        assert_eq!(r.pow(-1), r.inverse());
        assert_eq!(r.order(), 5);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_none());
        assert!(Perm::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_none());
    }

    #[test]
    fn display_is_one_based() {
        let p = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(p.to_string(), "(1 2 3)");
        assert_eq!(Perm::identity(4).to_string(), "()");
    }

    #[test]
    fn closure_of_s3() {
        let a = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(closure(&[a, b], 3, 100).unwrap().len(), 6);
    }
}
