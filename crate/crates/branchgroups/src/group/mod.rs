//! Group definitions over level classes.
//!
//! A group is described by one or more *level classes*. A class carries the
//! alphabet used for elements acting at the corresponding levels of the tree
//! (class 0 is the root), the class whose alphabet describes sections, and a
//! decomposition of its letters into blocks. A block is a finite group (the
//! rooted group `A`, the directed group `B`, a cyclic subgroup) or an infinite
//! cyclic group; words are reduced to the normal form of the free product of
//! the blocks, which is the "simple reduction" system (`bb -> 1`, `bc -> d` in
//! the first Grigorchuk group).

mod build;
mod builtin;
mod spinal;

use std::collections::HashMap;
use std::fmt;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::perm::Perm;
use crate::tree::{ShapeId, TreeAutomorphism, TreeError, TreeShape};
use crate::words::{self, Sym, WordParseError};

pub use build::{GenSpec, RecursiveSpec};
pub use builtin::{builtin, gupta_sidki, BUILTIN_NAMES};
pub use spinal::{
    from_ggs, from_triple, grigorchuk_2group, is_ggs_torsion, DefiningTriple, FiniteGroup, GgsVector, OmegaLevel,
};

pub type Letter = u16;

/// A word over the letters of one level class. Reduced words alternate
/// between blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    SpinalTriple,
    GgSequence,
    GgsVector,
    ExplicitRecursion,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::SpinalTriple => "spinal-triple",
            Flavor::GgSequence => "GG-sequence",
            Flavor::GgsVector => "GGS-vector",
            Flavor::ExplicitRecursion => "explicit-recursion",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("unknown group '{0}'")]
    UnknownGroup(String),
    #[error("invalid definition: {0}")]
    Validation(String),
    #[error("word syntax: {0}")]
    Parse(#[from] WordParseError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("resource bound exceeded: {what} (cap {cap})")]
    ResourceExceeded { what: &'static str, cap: usize },
}

/// What a block's letters look like on the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Letters act only at the root (rooted automorphisms).
    Rooted,
    /// Letters fix the root; in spinal groups these are the directed letters.
    Directed,
    /// Anything else (e.g. `tau = (1,tau)a`).
    Mixed,
}

#[derive(Clone, Debug)]
pub(crate) enum BlockData {
    /// Finite group on element indices `0..n` (0 is the identity);
    /// `table[x * n + y]` is the index of `x*y`.
    Finite { n: usize, table: Vec<u16>, letter_of: Vec<Letter> },
    /// Infinite cyclic group: one letter and its inverse.
    Free,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub kind: BlockKind,
    pub(crate) data: BlockData,
}

impl Block {
    pub fn is_finite(&self) -> bool {
        matches!(self.data, BlockData::Finite { .. })
    }

    /// Order of the block (`None` when infinite).
    pub fn order(&self) -> Option<usize> {
        match &self.data {
            BlockData::Finite { n, .. } => Some(*n),
            BlockData::Free => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LetterInfo {
    pub name: String,
    pub block: u16,
    /// Element index inside a finite block (unused for free blocks).
    pub(crate) elt: u16,
    pub perm: Perm,
    /// Reduced first-level section words, over the next class.
    pub sections: Vec<Word>,
    pub inverse: Letter,
    pub state: TreeAutomorphism,
}

#[derive(Clone, Debug)]
pub struct LevelClass {
    pub shape: ShapeId,
    pub arity: usize,
    pub next: usize,
    pub letters: Vec<LetterInfo>,
    pub blocks: Vec<Block>,
    names: HashMap<String, Word>,
}

impl LevelClass {
    pub fn letter_by_name(&self, name: &str) -> Option<&Word> {
        self.names.get(name)
    }
}

pub struct GroupDefinition {
    name: String,
    flavor: Flavor,
    shape: TreeShape,
    classes: Vec<LevelClass>,
    /// Declared generators and their class-0 words (empty for trivial ones).
    generators: Vec<(String, Word)>,
    triple: Option<DefiningTriple>,
    ggs: Option<GgsVector>,
    pub(crate) trivial_memo: RwLock<FxHashMap<(u32, Vec<Letter>), bool>>,
}

impl Clone for GroupDefinition {
    fn clone(&self) -> Self {
        GroupDefinition {
            name: self.name.clone(),
            flavor: self.flavor,
            shape: self.shape.clone(),
            classes: self.classes.clone(),
            generators: self.generators.clone(),
            triple: self.triple.clone(),
            ggs: self.ggs.clone(),
            trivial_memo: RwLock::new(FxHashMap::default()),
        }
    }
}

impl fmt::Debug for GroupDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupDefinition")
            .field("name", &self.name)
            .field("flavor", &self.flavor)
            .field("shape", &self.shape)
            .field("generators", &self.generators.iter().map(|g| &g.0).collect::<Vec<_>>())
            .finish()
    }
}

impl GroupDefinition {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn triple(&self) -> Option<&DefiningTriple> {
        self.triple.as_ref()
    }

    pub fn ggs_vector(&self) -> Option<&GgsVector> {
        self.ggs.as_ref()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, c: usize) -> &LevelClass {
        &self.classes[c]
    }

    /// Declared generators, in declaration order.
    pub fn generators(&self) -> &[(String, Word)] {
        &self.generators
    }

    /// States of the declared nontrivial generators.
    pub fn generator_states(&self) -> Vec<(String, TreeAutomorphism)> {
        self.generators
            .iter()
            .filter(|(_, w)| !w.is_empty())
            .map(|(n, w)| (n.clone(), self.element(w)))
            .collect()
    }

    /// The canonical generating set: every class-0 letter, i.e. all nontrivial
    /// elements of the finite blocks plus both signs of free letters.
    pub fn canonical_generators(&self) -> Vec<Letter> {
        (0..self.classes[0].letters.len() as Letter).collect()
    }

    pub fn letters(&self) -> &[LetterInfo] {
        &self.classes[0].letters
    }

    pub fn letter(&self, class: usize, x: Letter) -> &LetterInfo {
        &self.classes[class].letters[x as usize]
    }

    pub fn block_of(&self, class: usize, x: Letter) -> &Block {
        let c = &self.classes[class];
        &c.blocks[c.letters[x as usize].block as usize]
    }

    /// Whether every class splits into one rooted finite block and one
    /// directed finite block (the spinal shape used by the contraction lemma).
    pub fn is_spinal(&self) -> bool {
        self.classes.iter().all(|c| {
            c.blocks.len() <= 2
                && c.blocks.iter().all(|b| b.is_finite() && b.kind != BlockKind::Mixed)
                && c.blocks.iter().filter(|b| b.kind == BlockKind::Rooted).count() <= 1
        })
    }

    // ---- words ----

    pub fn parse(&self, text: &str) -> Result<Word, GroupError> {
        self.parse_at(0, text)
    }

    pub fn parse_at(&self, class: usize, text: &str) -> Result<Word, GroupError> {
        let cl = &self.classes[class];
        let fw = words::parse_word(text, &mut |name| {
            cl.names.get(name).map(|w| w.0.iter().map(|&x| Sym::new(x as u32)).collect())
        })?;
        let letters: Vec<Letter> = fw
            .iter()
            .map(|s| if s.inv { cl.letters[s.id as usize].inverse } else { s.id as Letter })
            .collect();
        Ok(self.reduce_at(class, &letters))
    }

    pub fn format(&self, w: &Word) -> String {
        self.format_at(0, w)
    }

    pub fn format_at(&self, class: usize, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let cl = &self.classes[class];
        let mut s = String::new();
        for &x in &w.0 {
            s.push_str(&cl.letters[x as usize].name);
        }
        s
    }

    pub fn reduce(&self, w: &Word) -> Word {
        self.reduce_at(0, &w.0)
    }

    /// Free-product normal form.
    pub fn reduce_at(&self, class: usize, w: &[Letter]) -> Word {
        let cl = &self.classes[class];
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &x in w {
            if let Some(&y) = out.last() {
                let lx = &cl.letters[x as usize];
                let ly = &cl.letters[y as usize];
                if lx.block == ly.block {
                    match &cl.blocks[lx.block as usize].data {
                        BlockData::Finite { n, table, letter_of } => {
                            let z = table[ly.elt as usize * n + lx.elt as usize];
                            out.pop();
                            if z != 0 {
                                out.push(letter_of[z as usize]);
                            }
                            continue;
                        }
                        BlockData::Free => {
                            if ly.inverse == x {
                                out.pop();
                                continue;
                            }
                        }
                    }
                }
            }
            out.push(x);
        }
        Word(out)
    }

    pub fn inverse(&self, w: &Word) -> Word {
        self.inverse_at(0, w)
    }

    pub fn inverse_at(&self, class: usize, w: &Word) -> Word {
        let cl = &self.classes[class];
        Word(w.0.iter().rev().map(|&x| cl.letters[x as usize].inverse).collect())
    }

    pub fn mul(&self, u: &Word, v: &Word) -> Word {
        self.mul_at(0, u, v)
    }

    pub fn mul_at(&self, class: usize, u: &Word, v: &Word) -> Word {
        let mut w = u.0.clone();
        w.extend_from_slice(&v.0);
        self.reduce_at(class, &w)
    }

    pub fn pow(&self, w: &Word, e: i64) -> Word {
        self.pow_at(0, w, e)
    }

    pub fn pow_at(&self, class: usize, w: &Word, e: i64) -> Word {
        let base = if e < 0 { self.inverse_at(class, w) } else { w.clone() };
        let mut out = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            out.extend_from_slice(&base.0);
        }
        self.reduce_at(class, &out)
    }

    /// `f^-1 w f`, reduced.
    pub fn conj(&self, w: &Word, f: &Word) -> Word {
        self.conj_at(0, w, f)
    }

    pub fn conj_at(&self, class: usize, w: &Word, f: &Word) -> Word {
        let mut out = self.inverse_at(class, f).0;
        out.extend_from_slice(&w.0);
        out.extend_from_slice(&f.0);
        self.reduce_at(class, &out)
    }

    pub fn cyclic_reduce(&self, w: &Word) -> (Word, Word) {
        self.cyclic_reduce_at(0, w)
    }

    /// Returns `(r, f)` with `r = f^-1 w f` cyclically reduced and
    /// `|r| <= |w|`.
    pub fn cyclic_reduce_at(&self, class: usize, w: &Word) -> (Word, Word) {
        let cl = &self.classes[class];
        let mut cur = self.reduce_at(class, &w.0);
        let mut conj: Vec<Letter> = Vec::new();
        while cur.len() >= 2 {
            let x = cur.0[0];
            let y = *cur.0.last().unwrap();
            let lx = &cl.letters[x as usize];
            let ly = &cl.letters[y as usize];
            let mergeable = lx.block == ly.block
                && match cl.blocks[lx.block as usize].data {
                    BlockData::Finite { .. } => true,
                    BlockData::Free => ly.inverse == x,
                };
            if !mergeable {
                break;
            }
            let mut next = cur.0[1..].to_vec();
            next.push(x);
            cur = self.reduce_at(class, &next);
            conj.push(x);
        }
        (cur, Word(conj))
    }

    /// Product of the root permutations of the letters.
    pub fn perm_of_at(&self, class: usize, w: &[Letter]) -> Perm {
        let cl = &self.classes[class];
        let mut p = Perm::identity(cl.arity);
        for &x in w {
            p = p.compose(&cl.letters[x as usize].perm);
        }
        p
    }

    pub fn perm_of(&self, w: &Word) -> Perm {
        self.perm_of_at(0, &w.0)
    }

    /// Root permutation and reduced first-level section words (over the next
    /// class), computed formally via `(fg)_u = f_u g_{u^f}`.
    pub fn decompose_at(&self, class: usize, w: &[Letter]) -> (Perm, Vec<Word>) {
        let cl = &self.classes[class];
        let m = cl.arity;
        let mut raw: Vec<Vec<Letter>> = vec![Vec::new(); m];
        let mut pos: Vec<usize> = (0..m).collect();
        for &x in w {
            let l = &cl.letters[x as usize];
            for i in 0..m {
                raw[i].extend_from_slice(&l.sections[pos[i]].0);
                pos[i] = l.perm.apply(pos[i]);
            }
        }
        let perm = Perm::from_images(pos.iter().map(|&p| p as u32).collect()).expect("letter permutations compose");
        let next = cl.next;
        (perm, raw.into_iter().map(|r| self.reduce_at(next, &r)).collect())
    }

    pub fn decompose(&self, w: &Word) -> (Perm, Vec<Word>) {
        self.decompose_at(0, &w.0)
    }

    /// Reduced section word at child `i` only.
    pub fn section_at(&self, class: usize, w: &[Letter], i: usize) -> Word {
        let cl = &self.classes[class];
        let mut raw = Vec::new();
        let mut p = i;
        for &x in w {
            let l = &cl.letters[x as usize];
            raw.extend_from_slice(&l.sections[p].0);
            p = l.perm.apply(p);
        }
        self.reduce_at(cl.next, &raw)
    }

    /// Section word at a vertex (0-based letters); returns the class of the
    /// result too.
    pub fn section_word(&self, class: usize, w: &Word, v: &[u32]) -> (usize, Word) {
        let mut c = class;
        let mut cur = w.clone();
        for &y in v {
            cur = self.section_at(c, &cur.0, y as usize);
            c = self.classes[c].next;
        }
        (c, cur)
    }

    /// Image of a vertex under a word, letter by letter.
    pub fn act_word(&self, w: &Word, v: &[u32]) -> Vec<u32> {
        let mut out = v.to_vec();
        for &x in &w.0 {
            out = self.letter(0, x).state.act(&crate::tree::Vertex(out)).expect("vertex fits the shape").0;
        }
        out
    }

    /// The automorphism denoted by a word (composition of letter states).
    pub fn element(&self, w: &Word) -> TreeAutomorphism {
        self.element_at(0, &w.0)
    }

    pub fn element_at(&self, class: usize, w: &[Letter]) -> TreeAutomorphism {
        let cl = &self.classes[class];
        // balanced product keeps intermediate automata small
        fn go(cl: &LevelClass, w: &[Letter]) -> TreeAutomorphism {
            match w.len() {
                0 => TreeAutomorphism::identity_on(cl.shape),
                1 => cl.letters[w[0] as usize].state,
                n => {
                    let (l, r) = w.split_at(n / 2);
                    go(cl, l).compose(go(cl, r)).expect("letters share the class shape")
                }
            }
        }
        go(cl, w)
    }

    /// Levels with the same class behave identically; this is the class
    /// reached after `k` section steps.
    pub fn class_at_depth(&self, k: usize) -> usize {
        let mut c = 0;
        for _ in 0..k {
            c = self.classes[c].next;
        }
        c
    }

    /// Class reached after `k` section steps starting from class `c`.
    pub fn class_at_depth_from(&self, c: usize, k: usize) -> usize {
        let mut c = c;
        for _ in 0..k {
            c = self.classes[c].next;
        }
        c
    }

    pub fn clear_memo(&self) {
        self.trivial_memo.write().clear();
    }
}

impl fmt::Display for GroupDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {} ({}) on tree {}", self.name, self.flavor, self.shape)?;
        let cl = &self.classes[0];
        for l in &cl.letters {
            write!(f, "  {} = ", l.name)?;
            let secs: Vec<String> = l.sections.iter().map(|s| self.format_at(cl.next, s)).collect();
            if l.perm.is_identity() {
                writeln!(f, "({})", secs.join(", "))?;
            } else if l.sections.iter().all(|s| s.is_empty()) {
                writeln!(f, "{}", l.perm)?;
            } else {
                writeln!(f, "({}){}", secs.join(", "), l.perm)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
