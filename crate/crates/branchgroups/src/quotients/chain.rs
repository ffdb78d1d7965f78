//! Deterministic Schreier-Sims stabilizer chains.

use num_bigint::BigUint;

use crate::perm::Perm;

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `trans[x] = u` with `point^u = x`, and its inverse.
    trans: Vec<Option<(Perm, Perm)>>,
}

/// Base and strong generating set. Level `i` holds the generators fixing
/// the first `i` base points.
#[derive(Clone, Debug)]
pub struct Chain {
    degree: usize,
    levels: Vec<Level>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut l = Level { point, gens: Vec::new(), orbit: Vec::new(), trans: vec![None; degree] };
        l.recompute(degree);
        l
    }

    fn recompute(&mut self, degree: usize) {
        self.trans = vec![None; degree];
        let id = Perm::identity(degree);
        self.trans[self.point] = Some((id.clone(), id));
        self.orbit = vec![self.point];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            k += 1;
            for g in &self.gens {
                let y = g.apply(x);
                if self.trans[y].is_none() {
                    let u = self.trans[x].as_ref().unwrap().0.compose(g);
                    let ui = u.inverse();
                    self.trans[y] = Some((u, ui));
                    self.orbit.push(y);
                }
            }
        }
    }
}

impl Chain {
    /// Builds a chain for `<gens>` whose base starts with `prefix`.
    pub fn new(degree: usize, gens: &[Perm], prefix: &[usize]) -> Self {
        let mut c = Chain { degree, levels: prefix.iter().map(|&p| Level::new(p, degree)).collect() };
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            if c.levels.iter().all(|l| g.apply(l.point) == l.point) {
                let p = first_moved(g).unwrap();
                c.levels.push(Level::new(p, degree));
            }
        }
        for g in &gens {
            let mut j = 0;
            while j < c.levels.len() {
                c.levels[j].gens.push(g.clone());
                if g.apply(c.levels[j].point) != c.levels[j].point {
                    break;
                }
                j += 1;
            }
        }
        for l in &mut c.levels {
            l.recompute(degree);
        }
        c.complete();
        c
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            match self.find_missing(lvl) {
                None => i -= 1,
                Some((h, j)) => {
                    if j == self.levels.len() {
                        let p = first_moved(&h).unwrap();
                        self.levels.push(Level::new(p, self.degree));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(h.clone());
                        self.levels[l].recompute(self.degree);
                    }
                    i = j + 1;
                }
            }
        }
    }

    /// First Schreier generator at `lvl` that does not sift, with the level
    /// where sifting stopped.
    fn find_missing(&self, lvl: usize) -> Option<(Perm, usize)> {
        let l = &self.levels[lvl];
        for &x in &l.orbit {
            let ux = &l.trans[x].as_ref().unwrap().0;
            for s in &l.gens {
                let y = s.apply(x);
                let h = ux.compose(s).compose(&l.trans[y].as_ref().unwrap().1);
                if h.is_identity() {
                    continue;
                }
                let (r, j) = self.strip(h, lvl + 1);
                if j < self.levels.len() || !r.is_identity() {
                    return Some((r, j));
                }
            }
        }
        None
    }

    fn strip(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for j in from..self.levels.len() {
            let l = &self.levels[j];
            let x = h.apply(l.point);
            match &l.trans[x] {
                None => return (h, j),
                Some((_, ui)) => h = h.compose(ui),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (r, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && r.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Generators of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Perm> {
        if k >= self.levels.len() {
            return Vec::new();
        }
        self.levels[k].gens.clone()
    }
}

fn first_moved(g: &Perm) -> Option<usize> {
    (0..g.degree()).find(|&i| g.apply(i) != i)
}
