//! Turning recursive descriptions into level classes with states.

use std::collections::HashMap;
use std::hash::Hash;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use super::{Block, BlockData, BlockKind, Flavor, GroupDefinition, GroupError, Letter, LetterInfo, LevelClass, Word};
use super::{DefiningTriple, GgsVector};
use crate::perm::Perm;
use crate::tree::{define_states, intern_shape, Child, NodeSpec, ShapeId, TreeAutomorphism, TreeShape};
use crate::words::{format_free, Sym};

/// Node cap when unfolding recursive definitions into states.
pub(crate) const STATE_CAP: usize = 200_000;
/// Largest finite group accepted as a block of directed generators.
pub(crate) const DIRECTED_BLOCK_CAP: usize = 64;
const ROOTED_BLOCK_CAP: usize = 40_320;

/// Distinct shapes along the shift orbit and the successor of each.
pub(crate) fn shape_orbit(shape: &TreeShape) -> (Vec<TreeShape>, Vec<usize>) {
    let mut orbit = vec![shape.clone()];
    loop {
        let nx = orbit.last().unwrap().shift();
        if let Some(k) = orbit.iter().position(|s| *s == nx) {
            let mut next: Vec<usize> = (1..orbit.len()).collect();
            next.push(k);
            return (orbit, next);
        }
        orbit.push(nx);
    }
}

/// Builds states for a finite set of keys closed under `expand`. Keys for
/// which `trivial` holds are the identity of their shape.
pub(crate) fn explore<K, F>(
    roots: &[K],
    shape_of: impl Fn(&K) -> ShapeId,
    trivial: impl Fn(&K) -> bool,
    mut expand: F,
    cap: usize,
) -> Result<Vec<TreeAutomorphism>, GroupError>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K) -> (Perm, Vec<K>),
{
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut keys: Vec<K> = Vec::new();
    let mut intern = |k: &K, keys: &mut Vec<K>| -> usize {
        if let Some(&i) = index.get(k) {
            return i;
        }
        index.insert(k.clone(), keys.len());
        keys.push(k.clone());
        keys.len() - 1
    };
    let root_ix: Vec<Option<usize>> =
        roots.iter().map(|r| if trivial(r) { None } else { Some(intern(r, &mut keys)) }).collect();
    let mut specs = Vec::new();
    let mut k = 0;
    while k < keys.len() {
        let key = keys[k].clone();
        let (perm, kids) = expand(&key);
        let mut children = Vec::with_capacity(kids.len());
        for c in &kids {
            if trivial(c) {
                children.push(Child::State(TreeAutomorphism::identity_on(shape_of(c)).state()));
            } else {
                children.push(Child::Local(intern(c, &mut keys)));
            }
        }
        specs.push(NodeSpec { shape: shape_of(&key), perm, children });
        if keys.len() > cap {
            return Err(GroupError::ResourceExceeded { what: "reachable section words", cap });
        }
        k += 1;
    }
    let states = define_states(specs);
    Ok(roots
        .iter()
        .zip(root_ix)
        .map(|(r, ix)| match ix {
            Some(i) => states[i],
            None => TreeAutomorphism::identity_on(shape_of(r)),
        })
        .collect())
}

pub(crate) struct LetterDraft {
    pub name: String,
    pub block: u16,
    pub elt: u16,
    pub perm: Perm,
    pub sections: Vec<Vec<Letter>>,
    pub inverse: Letter,
}

pub(crate) struct ClassDraft {
    pub shape: ShapeId,
    pub arity: usize,
    pub next: usize,
    pub letters: Vec<LetterDraft>,
    pub blocks: Vec<BlockData>,
    /// Extra names resolvable in this class (declared generators).
    pub names: Vec<(String, Word)>,
}

pub(crate) struct Extras {
    pub triple: Option<DefiningTriple>,
    pub ggs: Option<GgsVector>,
}

/// Finishes a group: reduces section words, classifies blocks and attaches
/// a state to every letter.
pub(crate) fn assemble(
    name: &str,
    flavor: Flavor,
    shape: TreeShape,
    drafts: Vec<ClassDraft>,
    generators: Vec<(String, Word)>,
    extras: Extras,
) -> Result<GroupDefinition, GroupError> {
    let mut classes = Vec::with_capacity(drafts.len());
    for d in drafts {
        let mut names = HashMap::new();
        for (i, l) in d.letters.iter().enumerate() {
            names.entry(l.name.clone()).or_insert_with(|| Word(vec![i as Letter]));
        }
        for (n, w) in d.names {
            names.entry(n).or_insert(w);
        }
        let letters = d
            .letters
            .into_iter()
            .map(|l| LetterInfo {
                name: l.name,
                block: l.block,
                elt: l.elt,
                perm: l.perm,
                sections: l.sections.into_iter().map(Word).collect(),
                inverse: l.inverse,
                state: TreeAutomorphism::identity_on(d.shape),
            })
            .collect();
        let blocks = d.blocks.into_iter().map(|data| Block { kind: BlockKind::Mixed, data }).collect();
        classes.push(LevelClass { shape: d.shape, arity: d.arity, next: d.next, letters, blocks, names });
    }
    let mut g = GroupDefinition {
        name: name.to_string(),
        flavor,
        shape,
        classes,
        generators,
        triple: extras.triple,
        ggs: extras.ggs,
        trivial_memo: RwLock::new(FxHashMap::default()),
    };
    // section words arrive unreduced
    for c in 0..g.classes.len() {
        let next = g.classes[c].next;
        for x in 0..g.classes[c].letters.len() {
            let secs: Vec<Word> =
                g.classes[c].letters[x].sections.iter().map(|s| g.reduce_at(next, &s.0)).collect();
            g.classes[c].letters[x].sections = secs;
        }
    }
    for c in 0..g.classes.len() {
        for b in 0..g.classes[c].blocks.len() {
            let ls: Vec<&LetterInfo> = g.classes[c].letters.iter().filter(|l| l.block as usize == b).collect();
            let kind = if ls.iter().all(|l| l.sections.iter().all(|s| s.is_empty())) {
                BlockKind::Rooted
            } else if ls.iter().all(|l| l.perm.is_identity()) {
                BlockKind::Directed
            } else {
                BlockKind::Mixed
            };
            g.classes[c].blocks[b].kind = kind;
        }
    }
    let mut roots = Vec::new();
    for (c, cl) in g.classes.iter().enumerate() {
        for x in 0..cl.letters.len() {
            roots.push((c, Word(vec![x as Letter])));
        }
    }
    let states = explore(
        &roots,
        |k: &(usize, Word)| g.classes[k.0].shape,
        |k| k.1.is_empty(),
        |k| {
            let (p, secs) = g.decompose_at(k.0, &k.1 .0);
            let next = g.classes[k.0].next;
            (p, secs.into_iter().map(|s| (next, s)).collect())
        },
        STATE_CAP,
    )?;
    for ((c, w), s) in roots.iter().zip(states) {
        g.classes[*c].letters[w.0[0] as usize].state = s;
    }
    Ok(g)
}

/// Data of one generator at one level class: root permutation and section
/// entries `(generator, exponent)` over the next class (an empty entry list
/// is the identity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub perm: Perm,
    pub sections: Vec<Vec<(usize, i64)>>,
}

/// An explicit wreath recursion. `classes[c][g]` describes generator `g` on
/// the `c`-th tree of the shift orbit of `shape` (`None`: trivial there).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursiveSpec {
    pub name: String,
    pub shape: TreeShape,
    pub generators: Vec<String>,
    pub classes: Vec<Vec<Option<GenSpec>>>,
}

impl RecursiveSpec {
    /// Number of classes a spec for `shape` must provide.
    pub fn class_count(shape: &TreeShape) -> usize {
        shape_orbit(shape).0.len()
    }

    pub fn build(&self) -> Result<GroupDefinition, GroupError> {
        from_recursive(self, Flavor::ExplicitRecursion, Extras { triple: None, ggs: None })
    }
}

fn sym(g: usize, inv: bool) -> u32 {
    (g as u32) << 1 | inv as u32
}

pub(crate) fn from_recursive(spec: &RecursiveSpec, flavor: Flavor, extras: Extras) -> Result<GroupDefinition, GroupError> {
    let (orbit, next) = shape_orbit(&spec.shape);
    let nc = orbit.len();
    let ng = spec.generators.len();
    if spec.classes.len() != nc {
        return Err(GroupError::Validation(format!(
            "expected generator data for {nc} level classes, got {}",
            spec.classes.len()
        )));
    }
    let shapes: Vec<ShapeId> = orbit.iter().map(intern_shape).collect();
    for (c, gens) in spec.classes.iter().enumerate() {
        if gens.len() != ng {
            return Err(GroupError::Validation(format!("class {c} lists {} generators, expected {ng}", gens.len())));
        }
        let m = orbit[c].arity(0);
        for (g, data) in gens.iter().enumerate() {
            let Some(d) = data else { continue };
            let gname = &spec.generators[g];
            if d.perm.degree() != m || d.sections.len() != m {
                return Err(GroupError::Validation(format!(
                    "generator {gname} has {} sections and a permutation of degree {} where the arity is {m}",
                    d.sections.len(),
                    d.perm.degree()
                )));
            }
            if d.sections.iter().flatten().any(|&(h, _)| h >= ng) {
                return Err(GroupError::Validation(format!("generator {gname} refers to an unknown generator")));
            }
        }
    }

    // section of a raw symbol at a point, over the next class
    let raw_section = |c: usize, s: u32, p: usize| -> Vec<u32> {
        let g = (s >> 1) as usize;
        let d = spec.classes[c][g].as_ref().unwrap();
        let nx = next[c];
        let expand = |q: usize| -> Vec<u32> {
            let mut out = Vec::new();
            for &(h, e) in &d.sections[q] {
                if spec.classes[nx][h].is_none() {
                    continue;
                }
                for _ in 0..e.unsigned_abs() {
                    out.push(sym(h, e < 0));
                }
            }
            out
        };
        if s & 1 == 0 {
            expand(p)
        } else {
            let q = d.perm.inverse().apply(p);
            expand(q).into_iter().rev().map(|x| x ^ 1).collect()
        }
    };
    let sym_perm = |c: usize, s: u32| -> Perm {
        let d = spec.classes[c][(s >> 1) as usize].as_ref().unwrap();
        if s & 1 == 0 {
            d.perm.clone()
        } else {
            d.perm.inverse()
        }
    };
    let expand_raw = |c: usize, w: &[u32]| -> (Perm, Vec<Vec<u32>>) {
        let m = orbit[c].arity(0);
        let mut raw: Vec<Vec<u32>> = vec![Vec::new(); m];
        let mut perm = Perm::identity(m);
        for &s in w {
            let p = sym_perm(c, s);
            for i in 0..m {
                raw[i].extend(raw_section(c, s, perm.apply(i)));
            }
            perm = perm.compose(&p);
        }
        let red = raw.into_iter().map(|r| free_reduce_syms(&r)).collect();
        (perm, red)
    };

    let mut roots = Vec::new();
    for c in 0..nc {
        for g in 0..ng {
            if spec.classes[c][g].is_some() {
                roots.push((c, vec![sym(g, false)]));
            }
        }
    }
    let root_states = explore(
        &roots,
        |k: &(usize, Vec<u32>)| shapes[k.0],
        |k| k.1.is_empty(),
        |k| {
            let (p, kids) = expand_raw(k.0, &k.1);
            (p, kids.into_iter().map(|w| (next[k.0], w)).collect())
        },
        STATE_CAP,
    )?;
    let mut gen_state: Vec<Vec<Option<TreeAutomorphism>>> = vec![vec![None; ng]; nc];
    for ((c, w), s) in roots.iter().zip(root_states) {
        if !s.is_identity() {
            gen_state[*c][(w[0] >> 1) as usize] = Some(s);
        }
    }

    // blocks, letters, and the generator -> letter map, class by class
    struct Proto {
        letters: Vec<(String, u16, u16, Perm, Vec<u32>, Letter)>, // name, block, elt, perm, raw word, inverse
        blocks: Vec<BlockData>,
        gen_letter: Vec<Option<Letter>>,
    }
    let mut protos = Vec::with_capacity(nc);
    for c in 0..nc {
        let m = orbit[c].arity(0);
        let is_rooted = |s: TreeAutomorphism| s.decompose().1.iter().all(|x| x.is_identity());
        let rooted: Vec<usize> = (0..ng).filter(|&g| gen_state[c][g].is_some_and(is_rooted)).collect();
        let other: Vec<usize> = (0..ng).filter(|&g| gen_state[c][g].is_some_and(|s| !is_rooted(s))).collect();
        let mut p = Proto { letters: Vec::new(), blocks: Vec::new(), gen_letter: vec![None; ng] };
        let names: Vec<&str> = spec.generators.iter().map(|s| s.as_str()).collect();

        if !rooted.is_empty() {
            let gens: Vec<(usize, Perm)> =
                rooted.iter().map(|&g| (g, gen_state[c][g].unwrap().root_perm())).collect();
            let elems = closure_with_words(&gens, m, |a, b| a.compose(b), Perm::identity(m), ROOTED_BLOCK_CAP)
                .ok_or(GroupError::ResourceExceeded { what: "rooted group", cap: ROOTED_BLOCK_CAP })?;
            add_finite_block(&mut p.letters, &mut p.blocks, &elems, &names, |a, b| a.compose(b), |e| e.clone());
            let bi = p.blocks.len() as u16 - 1;
            for &(g, ref q) in &gens {
                let k = elems.iter().position(|(e, _)| e == q).unwrap();
                p.gen_letter[g] = Some(letter_index(&p.letters, bi, k as u16));
            }
        }
        if !other.is_empty() {
            let mut uniq: Vec<(usize, TreeAutomorphism)> = Vec::new();
            for &g in &other {
                let s = gen_state[c][g].unwrap();
                if !uniq.iter().any(|u| u.1 == s) {
                    uniq.push((g, s));
                }
            }
            let id = TreeAutomorphism::identity_on(shapes[c]);
            let mul = |a: &TreeAutomorphism, b: &TreeAutomorphism| a.compose(*b).unwrap();
            if let Some(elems) = closure_with_words(&uniq, m, mul, id, DIRECTED_BLOCK_CAP) {
                add_finite_block(&mut p.letters, &mut p.blocks, &elems, &names, mul, |e| e.root_perm());
                let bi = p.blocks.len() as u16 - 1;
                for &g in &other {
                    let s = gen_state[c][g].unwrap();
                    let k = elems.iter().position(|(e, _)| *e == s).unwrap();
                    p.gen_letter[g] = Some(letter_index(&p.letters, bi, k as u16));
                }
            } else {
                for &(g, s) in &uniq {
                    let cyc = closure_with_words(&[(g, s)], m, mul, id, DIRECTED_BLOCK_CAP);
                    if let Some(elems) = cyc {
                        add_finite_block(&mut p.letters, &mut p.blocks, &elems, &names, mul, |e| e.root_perm());
                        let bi = p.blocks.len() as u16 - 1;
                        p.gen_letter[g] = Some(letter_index(&p.letters, bi, 1));
                    } else {
                        let bi = p.blocks.len() as u16;
                        let pos = p.letters.len() as Letter;
                        p.letters.push((spec.generators[g].clone(), bi, 1, s.root_perm(), vec![sym(g, false)], pos + 1));
                        p.letters.push((
                            format!("{}^-1", spec.generators[g]),
                            bi,
                            2,
                            s.root_perm().inverse(),
                            vec![sym(g, true)],
                            pos,
                        ));
                        p.blocks.push(BlockData::Free);
                        p.gen_letter[g] = Some(pos);
                    }
                }
                for &g in &other {
                    if p.gen_letter[g].is_none() {
                        let s = gen_state[c][g].unwrap();
                        let twin = uniq.iter().find(|u| u.1 == s).unwrap().0;
                        p.gen_letter[g] = p.gen_letter[twin];
                    }
                }
            }
        }
        protos.push(p);
    }

    let mut drafts = Vec::with_capacity(nc);
    for c in 0..nc {
        let nx = next[c];
        let map_word = |w: &[u32]| -> Vec<Letter> {
            let mut out = Vec::new();
            for &s in w {
                let g = (s >> 1) as usize;
                if let Some(x) = protos[nx].gen_letter[g] {
                    let inv = protos[nx].letters[x as usize].5;
                    out.push(if s & 1 == 0 { x } else { inv });
                }
            }
            out
        };
        let letters = protos[c]
            .letters
            .iter()
            .map(|(name, block, elt, perm, raw, inv)| {
                let (_, secs) = expand_raw(c, raw);
                LetterDraft {
                    name: name.clone(),
                    block: *block,
                    elt: *elt,
                    perm: perm.clone(),
                    sections: secs.iter().map(|s| map_word(s)).collect(),
                    inverse: *inv,
                }
            })
            .collect();
        let names = (0..ng)
            .map(|g| (spec.generators[g].clone(), Word(protos[c].gen_letter[g].into_iter().collect())))
            .collect();
        drafts.push(ClassDraft {
            shape: shapes[c],
            arity: orbit[c].arity(0),
            next: nx,
            letters,
            blocks: protos[c].blocks.clone(),
            names,
        });
    }
    let generators =
        (0..ng).map(|g| (spec.generators[g].clone(), Word(protos[0].gen_letter[g].into_iter().collect()))).collect();
    let g = assemble(&spec.name, flavor, spec.shape.clone(), drafts, generators, extras)?;
    // the letter states must reproduce the generator states computed above
    for c in 0..nc {
        for (gi, st) in gen_state[c].iter().enumerate() {
            if let (Some(s), Some(x)) = (st, protos[c].gen_letter[gi]) {
                debug_assert_eq!(g.classes[c].letters[x as usize].state, *s);
                let _ = s;
                let _ = x;
            }
        }
    }
    Ok(g)
}

fn free_reduce_syms(w: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(w.len());
    for &s in w {
        if out.last() == Some(&(s ^ 1)) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

fn letter_index(letters: &[(String, u16, u16, Perm, Vec<u32>, Letter)], block: u16, elt: u16) -> Letter {
    letters.iter().position(|l| l.1 == block && l.2 == elt).unwrap() as Letter
}

/// BFS closure of generators (with positive words over generator indices);
/// element 0 is the identity. `None` when more than `cap` elements appear.
fn closure_with_words<E: Clone + Eq + Hash>(
    gens: &[(usize, E)],
    _degree: usize,
    mul: impl Fn(&E, &E) -> E,
    id: E,
    cap: usize,
) -> Option<Vec<(E, Vec<usize>)>> {
    let mut seen: HashMap<E, usize> = HashMap::new();
    seen.insert(id.clone(), 0);
    let mut out = vec![(id, Vec::new())];
    let mut k = 0;
    while k < out.len() {
        let (x, w) = out[k].clone();
        k += 1;
        for (g, e) in gens {
            let y = mul(&x, e);
            if !seen.contains_key(&y) {
                if out.len() >= cap {
                    return None;
                }
                seen.insert(y.clone(), out.len());
                let mut w2 = w.clone();
                w2.push(*g);
                out.push((y, w2));
            }
        }
    }
    Some(out)
}

#[allow(clippy::type_complexity)]
fn add_finite_block<E: Clone + Eq + Hash>(
    letters: &mut Vec<(String, u16, u16, Perm, Vec<u32>, Letter)>,
    blocks: &mut Vec<BlockData>,
    elems: &[(E, Vec<usize>)],
    names: &[&str],
    mul: impl Fn(&E, &E) -> E,
    perm_of: impl Fn(&E) -> Perm,
) {
    let n = elems.len();
    let index: HashMap<&E, usize> = elems.iter().enumerate().map(|(i, (e, _))| (e, i)).collect();
    let mut table = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            table[x * n + y] = index[&mul(&elems[x].0, &elems[y].0)] as u16;
        }
    }
    let bi = blocks.len() as u16;
    let base = letters.len() as Letter;
    let mut letter_of = vec![0 as Letter; n];
    for k in 1..n {
        letter_of[k] = base + (k as Letter - 1);
    }
    for (k, (e, w)) in elems.iter().enumerate().skip(1) {
        let syms: Vec<Sym> = w.iter().map(|&g| Sym::new(g as u32)).collect();
        let name = format_free(&syms, names);
        let inv = (0..n).find(|&y| table[k * n + y] == 0).unwrap();
        letters.push((name, bi, k as u16, perm_of(e), w.iter().map(|&g| sym(g, false)).collect(), letter_of[inv]));
    }
    blocks.push(BlockData::Finite { n, table, letter_of });
}

/// Builds a finite block directly from a multiplication table (used by the
/// spinal constructions); element 0 must be the identity.
pub(crate) fn finite_block_data(n: usize, table: Vec<u16>, first_letter: Letter) -> BlockData {
    let mut letter_of = vec![0 as Letter; n];
    for k in 1..n {
        letter_of[k] = first_letter + (k as Letter - 1);
    }
    BlockData::Finite { n, table, letter_of }
}

/// Closure of permutations with positive words, for rooted groups of
/// spinal constructions.
pub(crate) fn perm_closure_words(gens: &[Perm], m: usize) -> Result<Vec<(Perm, Vec<usize>)>, GroupError> {
    let gs: Vec<(usize, Perm)> = gens.iter().cloned().enumerate().collect();
    closure_with_words(&gs, m, |a, b| a.compose(b), Perm::identity(m), ROOTED_BLOCK_CAP)
        .ok_or(GroupError::ResourceExceeded { what: "rooted group", cap: ROOTED_BLOCK_CAP })
}

pub(crate) fn is_transitive(gens: &[Perm], m: usize) -> bool {
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}
