//! Spinal groups from defining triples `(A, B, omega)`, GG and GGS groups.

use num_integer::Integer;

use super::build::{self, assemble, finite_block_data, perm_closure_words, ClassDraft, Extras, LetterDraft};
use super::{Flavor, GroupDefinition, GroupError, Letter, Word};
use crate::perm::Perm;
use crate::tree::{intern_shape, TreeShape};
use crate::words::{format_free, Sym};

/// A finite group given by its multiplication table; element 0 is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Checks identity, closure, associativity and inverses.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self, GroupError> {
        let n = names.len();
        let bad = |m: &str| Err(GroupError::Validation(format!("multiplication table: {m}")));
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("table must be square over the named elements");
        }
        for x in 0..n {
            if table[0][x] != x || table[x][0] != x {
                return bad("element 0 must be the identity");
            }
            if !(0..n).any(|y| table[x][y] == 0) {
                return bad("some element has no inverse");
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return bad("not associative");
                    }
                }
            }
        }
        if generators.iter().any(|&g| g == 0 || g >= n) {
            return bad("generators must be nontrivial elements");
        }
        Ok(FiniteGroup { names, table, generators })
    }

    /// `Z/n` with elements `1, g, g^2, ...`.
    pub fn cyclic(n: usize, g: &str) -> FiniteGroup {
        let names = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => g.to_string(),
                _ => format!("{g}^{k}"),
            })
            .collect();
        let table = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        FiniteGroup { names, table, generators: vec![1] }
    }

    /// `(Z/2)^k` with the given basis names; element `x` is the bit vector
    /// `x`, named by juxtaposing basis names.
    pub fn elementary_abelian_2(basis: &[&str]) -> FiniteGroup {
        let k = basis.len();
        let n = 1usize << k;
        let names = (0..n)
            .map(|x| {
                if x == 0 {
                    return "1".to_string();
                }
                (0..k).filter(|i| x >> i & 1 == 1).map(|i| basis[i]).collect::<String>()
            })
            .collect();
        let table = (0..n).map(|x| (0..n).map(|y| x ^ y).collect()).collect();
        FiniteGroup { names, table, generators: (0..k).map(|i| 1 << i).collect() }
    }

    /// The Klein group `{1, b, c, d}` with `bc = d` (all three listed as
    /// generators, as in the first Grigorchuk group).
    pub fn klein(b: &str, c: &str, d: &str) -> FiniteGroup {
        let names = vec!["1".to_string(), b.to_string(), c.to_string(), d.to_string()];
        let table = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
        FiniteGroup { names, table, generators: vec![1, 2, 3] }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inverse(&self, x: usize) -> usize {
        (0..self.order()).find(|&y| self.table[x][y] == 0).unwrap()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
}

/// The maps `omega_{i,1..m_i-1}` of one level: `maps[j][x]` is the image of
/// element `x` of `B` under the `(j+1)`-th map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaLevel {
    pub maps: Vec<Vec<Perm>>,
}

impl OmegaLevel {
    fn degree(&self) -> usize {
        self.maps[0][0].degree()
    }

    fn kernel_contains(&self, x: usize) -> bool {
        self.maps.iter().all(|m| m[x].is_identity())
    }
}

/// A defining triple with eventually periodic level data `omega_1, omega_2,
/// ...` = `prefix` followed by `cycle` repeated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningTriple {
    pub a: Vec<Perm>,
    pub a_names: Vec<String>,
    pub b: FiniteGroup,
    pub prefix: Vec<OmegaLevel>,
    pub cycle: Vec<OmegaLevel>,
}

impl DefiningTriple {
    /// `omega_i`, 1-based.
    pub fn level(&self, i: usize) -> &OmegaLevel {
        assert!(i >= 1);
        if i <= self.prefix.len() {
            &self.prefix[i - 1]
        } else {
            &self.cycle[(i - 1 - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn shape(&self) -> Result<TreeShape, GroupError> {
        let m1 = self.a.first().map(|p| p.degree()).unwrap_or(0) as u32;
        let mut prefix = vec![m1];
        prefix.extend(self.prefix.iter().map(|l| l.degree() as u32));
        let cycle = self.cycle.iter().map(|l| l.degree() as u32).collect();
        TreeShape::new(prefix, cycle).map_err(|e| GroupError::Validation(e.to_string()))
    }

    /// Generators of `A_{sigma^r omega}` (r >= 1): all images of `omega_r`.
    pub fn rooted_generators(&self, r: usize) -> Vec<Perm> {
        if r == 0 {
            return self.a.clone();
        }
        let mut gens: Vec<Perm> = Vec::new();
        for m in &self.level(r).maps {
            for p in m {
                if !p.is_identity() && !gens.contains(p) {
                    gens.push(p.clone());
                }
            }
        }
        gens
    }

    /// The triple of the shifted sequence `sigma omega`, whose rooted group is
    /// `A_{sigma omega}`.
    pub fn shift(&self) -> DefiningTriple {
        let a = self.rooted_generators(1);
        let a_names = (1..=a.len()).map(|i| if a.len() == 1 { "a".to_string() } else { format!("a{i}") }).collect();
        let (prefix, cycle) = if self.prefix.is_empty() {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            (Vec::new(), c)
        } else {
            (self.prefix[1..].to_vec(), self.cycle.clone())
        };
        DefiningTriple { a, a_names, b: self.b.clone(), prefix, cycle }
    }

    /// Checks the arity bookkeeping, the homomorphism property of each map,
    /// spherical transitivity and strong kernel intersection.
    pub fn validate(&self) -> Result<(), GroupError> {
        let err = |m: String| Err(GroupError::Validation(m));
        if self.a.is_empty() {
            return err("A needs at least one generator".into());
        }
        if self.cycle.is_empty() {
            return err("the periodic part of omega must be nonempty".into());
        }
        if self.a_names.len() != self.a.len() {
            return err("one name per generator of A is required".into());
        }
        let m1 = self.a[0].degree();
        if self.a.iter().any(|p| p.degree() != m1) || m1 < 2 {
            return err("generators of A must act on the same m_1 >= 2 points".into());
        }
        let nb = self.b.order();
        let levels = self.prefix.len() + self.cycle.len();
        let mut m_i = m1;
        for i in 1..=levels + 1 {
            let lv = self.level(i);
            if lv.maps.len() + 1 != m_i {
                return err(format!("level {i} has {} maps but m_{i} - 1 = {}", lv.maps.len(), m_i - 1));
            }
            if lv.maps.iter().any(|m| m.len() != nb) {
                return err(format!("level {i}: every map needs an image for each element of B"));
            }
            let d = lv.degree();
            if d < 2 || lv.maps.iter().flatten().any(|p| p.degree() != d) {
                return err(format!("level {i}: images must act on the same m_{} >= 2 points", i + 1));
            }
            for (j, m) in lv.maps.iter().enumerate() {
                for x in 0..nb {
                    for y in 0..nb {
                        if m[self.b.mul(x, y)] != m[x].compose(&m[y]) {
                            return err(format!("omega_{{{i},{}}} is not a homomorphism", j + 1));
                        }
                    }
                }
            }
            m_i = d;
        }
        if !build::is_transitive(&self.a, m1) {
            return err("spherical transitivity fails: A is not transitive".into());
        }
        for r in 1..=levels {
            let gens = self.rooted_generators(r);
            let d = self.level(r).degree();
            if !build::is_transitive(&gens, d) {
                return err(format!("spherical transitivity fails: A at level {r} is not transitive"));
            }
        }
        for x in 1..nb {
            if self.cycle.iter().all(|l| l.kernel_contains(x)) {
                return err(format!(
                    "strong kernel intersection fails: {} lies in every kernel of the periodic part",
                    self.b.name(x)
                ));
            }
        }
        Ok(())
    }
}

fn is_rotation(p: &Perm) -> Option<usize> {
    let m = p.degree();
    let k = p.apply(0);
    (Perm::rotation(m, k as i64) == *p).then_some(k)
}

pub fn from_triple(t: &DefiningTriple) -> Result<GroupDefinition, GroupError> {
    build_triple(t, "spinal", Flavor::SpinalTriple, None)
}

fn build_triple(
    t: &DefiningTriple,
    name: &str,
    flavor: Flavor,
    ggs: Option<GgsVector>,
) -> Result<GroupDefinition, GroupError> {
    t.validate()?;
    let shape = t.shape()?;
    let last = t.prefix.len() + t.cycle.len();
    let nclass = last + 1;
    let next = |l: usize| if l == last { t.prefix.len() + 1 } else { l + 1 };
    let nb = t.b.order();

    // rooted groups per class
    let mut rooted: Vec<Vec<(Perm, Vec<usize>)>> = Vec::with_capacity(nclass);
    for l in 0..nclass {
        let gens = t.rooted_generators(l);
        let m = shape.arity(l);
        rooted.push(perm_closure_words(&gens, m)?);
    }
    let a_count: Vec<usize> = rooted.iter().map(|r| r.len() - 1).collect();
    let class0_names: Vec<(Perm, String)> = {
        let names: Vec<&str> = t.a_names.iter().map(|s| s.as_str()).collect();
        rooted[0]
            .iter()
            .skip(1)
            .map(|(p, w)| {
                let syms: Vec<Sym> = w.iter().map(|&g| Sym::new(g as u32)).collect();
                (p.clone(), format_free(&syms, &names))
            })
            .collect()
    };
    let a_letter = |l: usize, p: &Perm| -> Option<Letter> {
        rooted[l].iter().position(|(q, _)| q == p).filter(|&k| k > 0).map(|k| (k - 1) as Letter)
    };

    let mut drafts = Vec::with_capacity(nclass);
    for l in 0..nclass {
        let m = shape.arity(l);
        let nx = next(l);
        let na = a_count[l];
        let mut letters = Vec::new();
        let mut blocks = Vec::new();
        if na > 0 {
            let n = na + 1;
            let els = &rooted[l];
            let mut table = vec![0u16; n * n];
            for x in 0..n {
                for y in 0..n {
                    let p = els[x].0.compose(&els[y].0);
                    table[x * n + y] = els.iter().position(|e| e.0 == p).unwrap() as u16;
                }
            }
            for (k, (p, w)) in els.iter().enumerate().skip(1) {
                let name = if l == 0 {
                    class0_names[k - 1].1.clone()
                } else if let Some((_, nm)) = class0_names.iter().find(|(q, _)| q == p) {
                    nm.clone()
                } else if let Some(r) = is_rotation(p) {
                    if r == 1 {
                        "a".to_string()
                    } else {
                        format!("a^{r}")
                    }
                } else {
                    let names: Vec<String> = (1..=t.rooted_generators(l).len()).map(|i| format!("x{i}")).collect();
                    let nr: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                    let syms: Vec<Sym> = w.iter().map(|&g| Sym::new(g as u32)).collect();
                    format_free(&syms, &nr)
                };
                let inv = (0..n).find(|&y| table[k * n + y] == 0).unwrap();
                letters.push(LetterDraft {
                    name,
                    block: 0,
                    elt: k as u16,
                    perm: p.clone(),
                    sections: vec![Vec::new(); m],
                    inverse: (inv - 1) as Letter,
                });
            }
            blocks.push(finite_block_data(n, table, 0));
        }
        let lv = t.level(l + 1);
        let bblock = blocks.len() as u16;
        let mut btable = vec![0u16; nb * nb];
        for x in 0..nb {
            for y in 0..nb {
                btable[x * nb + y] = t.b.mul(x, y) as u16;
            }
        }
        let base = na as Letter;
        for x in 1..nb {
            let mut sections = Vec::with_capacity(m);
            for j in 0..m - 1 {
                sections.push(a_letter(nx, &lv.maps[j][x]).into_iter().collect());
            }
            sections.push(vec![a_count[nx] as Letter + (x - 1) as Letter]);
            letters.push(LetterDraft {
                name: t.b.name(x).to_string(),
                block: bblock,
                elt: x as u16,
                perm: Perm::identity(m),
                sections,
                inverse: base + (t.b.inverse(x) - 1) as Letter,
            });
        }
        blocks.push(finite_block_data(nb, btable, base));
        let mut names = Vec::new();
        if l == 0 {
            for (i, p) in t.a.iter().enumerate() {
                names.push((t.a_names[i].clone(), Word(a_letter(0, p).into_iter().collect())));
            }
        }
        drafts.push(ClassDraft {
            shape: intern_shape(&shape.shift_by(l)),
            arity: m,
            next: nx,
            letters,
            blocks,
            names,
        });
    }
    let mut generators: Vec<(String, Word)> = Vec::new();
    for (i, p) in t.a.iter().enumerate() {
        generators.push((t.a_names[i].clone(), Word(a_letter(0, p).into_iter().collect())));
    }
    for &x in t.b.generators() {
        generators.push((t.b.name(x).to_string(), Word(vec![(a_count[0] + x - 1) as Letter])));
    }
    assemble(name, flavor, shape, drafts, generators, Extras { triple: Some(t.clone()), ggs })
}

/// A GGS defining vector `E = (e_1, ..., e_{m-1})` over `Z/m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgsVector {
    pub m: u32,
    pub e: Vec<i64>,
}

impl GgsVector {
    pub fn new(m: u32, e: Vec<i64>) -> Result<GgsVector, GroupError> {
        let v = GgsVector { m, e };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        if self.m < 2 {
            return Err(GroupError::Validation("GGS arity must be at least 2".into()));
        }
        if self.e.len() != self.m as usize - 1 {
            return Err(GroupError::Validation(format!("a GGS vector for m = {} has {} entries", self.m, self.m - 1)));
        }
        let g = self.e.iter().fold(self.m as i64, |g, &x| g.gcd(&x.rem_euclid(self.m as i64)));
        if g != 1 {
            return Err(GroupError::Validation(format!("gcd(e_1, ..., e_{{m-1}}, m) = {g}, must be 1")));
        }
        Ok(())
    }

    pub fn triple(&self) -> DefiningTriple {
        let m = self.m as usize;
        let maps = self
            .e
            .iter()
            .map(|&e| (0..m).map(|k| Perm::rotation(m, k as i64 * e)).collect())
            .collect();
        DefiningTriple {
            a: vec![Perm::rotation(m, 1)],
            a_names: vec!["a".into()],
            b: FiniteGroup::cyclic(m, "b"),
            prefix: vec![],
            cycle: vec![OmegaLevel { maps }],
        }
    }
}

pub fn from_ggs(v: &GgsVector) -> Result<GroupDefinition, GroupError> {
    v.validate()?;
    let name = format!(
        "GGS(m={};E=({}))",
        v.m,
        v.e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    );
    build_triple(&v.triple(), &name, Flavor::GgsVector, Some(v.clone()))
}

/// The Grigorchuk 2-group `G_omega` for `omega = prefix cycle cycle ...`
/// over the symbols 0, 1, 2 (columns of the homomorphism table: symbol `s`
/// kills `d`, `c`, `b` respectively).
pub fn grigorchuk_2group(prefix: &str, cycle: &str) -> Result<GroupDefinition, GroupError> {
    let parse = |s: &str| -> Result<Vec<usize>, GroupError> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(GroupError::Validation(format!("symbol '{c}' is not in {{0,1,2}}"))),
            })
            .collect()
    };
    let p = parse(prefix)?;
    let c = parse(cycle)?;
    if c.is_empty() {
        return Err(GroupError::Validation("the periodic part of omega must be nonempty".into()));
    }
    for s in 0..3 {
        if !c.contains(&s) {
            return Err(GroupError::Validation(format!("symbol {s} must occur in the periodic part")));
        }
    }
    let a = Perm::rotation(2, 1);
    let level = |s: usize| {
        let kernel = [3, 2, 1][s];
        OmegaLevel {
            maps: vec![(0..4).map(|x| if x == 0 || x == kernel { Perm::identity(2) } else { a.clone() }).collect()],
        }
    };
    let t = DefiningTriple {
        a: vec![a.clone()],
        a_names: vec!["a".into()],
        b: FiniteGroup::klein("b", "c", "d"),
        prefix: p.iter().map(|&s| level(s)).collect(),
        cycle: c.iter().map(|&s| level(s)).collect(),
    };
    let name = if p.is_empty() { format!("G_({cycle})") } else { format!("G_{prefix}({cycle})") };
    build_triple(&t, &name, Flavor::GgSequence, None)
}

/// Torsion criterion for GGS groups over `m = p^n`: the sums of `e_s` over
/// `O_k = {p^k, 2p^k, ..., (p^{n-k}-1)p^k}` vanish modulo `p^{k+1}`.
pub fn is_ggs_torsion(v: &GgsVector) -> Result<bool, GroupError> {
    v.validate()?;
    let m = v.m as i64;
    let p = (2..=m).find(|d| m % d == 0).unwrap();
    let mut n = 0;
    let mut r = m;
    while r % p == 0 {
        r /= p;
        n += 1;
    }
    if r != 1 {
        return Err(GroupError::Validation(format!("m = {m} is not a prime power")));
    }
    for k in 0..n {
        let pk = p.pow(k);
        let top = p.pow(n - k) - 1;
        let sum: i64 = (1..=top).map(|j| v.e[(j * pk - 1) as usize]).sum();
        if sum.rem_euclid(p.pow(k + 1)) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
