//! Global hash-consed store of automorphism states.
//!
//! The store is kept minimal: two distinct ids never denote the same
//! automorphism. New states arrive in batches (possibly cyclic); a batch is
//! first refined internally (Moore partition refinement), then every new
//! class is matched against existing states with the same depth-limited
//! signature, and only unmatched classes become new states.

use std::collections::HashMap;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use super::shape::TreeShape;
use crate::perm::Perm;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub(crate) u32);

impl StateId {
    pub fn raw(self) -> u32 {
        self.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ShapeId(pub(crate) u32);

const SIG_DEPTH: usize = 4;

pub(crate) struct StateData {
    pub shape: ShapeId,
    pub perm: Perm,
    pub children: Box<[StateId]>,
    sig: [u64; SIG_DEPTH + 1],
}

#[derive(Default)]
pub struct Store {
    shapes: Vec<TreeShape>,
    shape_index: HashMap<TreeShape, ShapeId>,
    shape_shift: Vec<ShapeId>,
    states: Vec<StateData>,
    structural: HashMap<(ShapeId, Perm, Box<[StateId]>), StateId>,
    by_sig: HashMap<u64, Vec<StateId>>,
    identities: HashMap<ShapeId, StateId>,
}

pub(crate) static STORE: Lazy<RwLock<Store>> = Lazy::new(|| RwLock::new(Store::default()));

/// A child reference inside a batch: either an already stored state or
/// another node of the same batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Child {
    State(StateId),
    Local(usize),
}

#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub shape: ShapeId,
    pub perm: Perm,
    pub children: Vec<Child>,
}

#[inline]
fn mix(mut h: u64, x: u64) -> u64 {
    h ^= x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    let mut z = h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn base_sig(shape: ShapeId, perm: &Perm) -> u64 {
    let mut h = mix(0x5eed, shape.0 as u64);
    for &x in perm.images() {
        h = mix(h, x as u64);
    }
    h
}

impl Store {
    pub fn shape_id(&mut self, shape: &TreeShape) -> ShapeId {
        if let Some(&id) = self.shape_index.get(shape) {
            return id;
        }
        // intern the whole shift orbit so that shift lookups never allocate later
        let mut orbit = vec![shape.clone()];
        loop {
            let next = orbit.last().unwrap().shift();
            if self.shape_index.contains_key(&next) || orbit.contains(&next) {
                break;
            }
            orbit.push(next);
        }
        let base = self.shapes.len() as u32;
        for (k, s) in orbit.iter().enumerate() {
            self.shapes.push(s.clone());
            self.shape_index.insert(s.clone(), ShapeId(base + k as u32));
            self.shape_shift.push(ShapeId(u32::MAX));
        }
        for k in 0..orbit.len() {
            let next = orbit[k].shift();
            let nid = self.shape_index[&next];
            self.shape_shift[(base + k as u32) as usize] = nid;
        }
        ShapeId(base)
    }

    pub fn shape_lookup(&self, shape: &TreeShape) -> Option<ShapeId> {
        self.shape_index.get(shape).copied()
    }

    pub fn shape(&self, id: ShapeId) -> &TreeShape {
        &self.shapes[id.0 as usize]
    }

    pub fn shift(&self, id: ShapeId) -> ShapeId {
        self.shape_shift[id.0 as usize]
    }

    pub fn arity(&self, id: ShapeId) -> usize {
        self.shapes[id.0 as usize].arity(0)
    }

    #[inline]
    pub(crate) fn data(&self, s: StateId) -> &StateData {
        &self.states[s.0 as usize]
    }

    #[inline]
    pub fn perm(&self, s: StateId) -> &Perm {
        &self.states[s.0 as usize].perm
    }

    #[inline]
    pub fn child(&self, s: StateId, i: usize) -> StateId {
        self.states[s.0 as usize].children[i]
    }

    #[inline]
    pub fn children(&self, s: StateId) -> &[StateId] {
        &self.states[s.0 as usize].children
    }

    #[inline]
    pub fn shape_of(&self, s: StateId) -> ShapeId {
        self.states[s.0 as usize].shape
    }

    pub fn identity_of(&self, shape: ShapeId) -> Option<StateId> {
        self.identities.get(&shape).copied()
    }

    pub fn is_identity(&self, s: StateId) -> bool {
        self.identities.get(&self.shape_of(s)) == Some(&s)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn identity(&mut self, shape: ShapeId) -> StateId {
        if let Some(id) = self.identities.get(&shape) {
            return *id;
        }
        // walk the shift orbit until it repeats or reaches a shape whose
        // identity already exists; the orbit may have a non-periodic prefix
        let mut orbit = vec![shape];
        let tail: Child = loop {
            let next = self.shift(*orbit.last().unwrap());
            if let Some(&id) = self.identities.get(&next) {
                break Child::State(id);
            }
            if let Some(k) = orbit.iter().position(|&s| s == next) {
                break Child::Local(k);
            }
            orbit.push(next);
        };
        let len = orbit.len();
        let nodes: Vec<NodeSpec> = orbit
            .iter()
            .enumerate()
            .map(|(k, &sh)| NodeSpec {
                shape: sh,
                perm: Perm::identity(self.arity(sh)),
                children: vec![if k + 1 < len { Child::Local(k + 1) } else { tail }; self.arity(sh)],
            })
            .collect();
        let ids = self.insert_batch(nodes);
        for (k, &sh) in orbit.iter().enumerate() {
            self.identities.insert(sh, ids[k]);
        }
        ids[0]
    }

    /// Inserts a batch of nodes and returns the canonical state of each.
    pub fn insert_batch(&mut self, nodes: Vec<NodeSpec>) -> Vec<StateId> {
        let n = nodes.len();
        if n == 0 {
            return vec![];
        }
        for node in &nodes {
            let m = self.arity(node.shape);
            assert_eq!(node.perm.degree(), m, "vertex permutation degree does not match arity");
            assert_eq!(node.children.len(), m, "child count does not match arity");
            let child_shape = self.shift(node.shape);
            for c in &node.children {
                let sh = match *c {
                    Child::State(s) => self.shape_of(s),
                    Child::Local(j) => nodes[j].shape,
                };
                assert_eq!(sh, child_shape, "child lives on the wrong shifted tree");
            }
        }

        // 1. Moore refinement inside the batch; stored children are atoms.
        let mut class = vec![0usize; n];
        {
            let mut keys: HashMap<(ShapeId, &Perm), usize> = HashMap::new();
            for (i, node) in nodes.iter().enumerate() {
                let k = keys.len();
                class[i] = *keys.entry((node.shape, &node.perm)).or_insert(k);
            }
        }
        let mut count = class.iter().copied().max().unwrap() + 1;
        loop {
            let mut keys: HashMap<(usize, Vec<(u8, u32)>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for (i, node) in nodes.iter().enumerate() {
                let ch: Vec<(u8, u32)> = node
                    .children
                    .iter()
                    .map(|c| match *c {
                        Child::State(s) => (0u8, s.0),
                        Child::Local(j) => (1u8, class[j] as u32),
                    })
                    .collect();
                let k = keys.len();
                next[i] = *keys.entry((class[i], ch)).or_insert(k);
            }
            let new_count = keys.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }

        // 2. Quotient graph.
        let mut rep = vec![usize::MAX; count];
        for i in 0..n {
            if rep[class[i]] == usize::MAX {
                rep[class[i]] = i;
            }
        }
        let q_children: Vec<Vec<Child>> = (0..count)
            .map(|c| {
                nodes[rep[c]]
                    .children
                    .iter()
                    .map(|ch| match *ch {
                        Child::State(s) => Child::State(s),
                        Child::Local(j) => Child::Local(class[j]),
                    })
                    .collect()
            })
            .collect();

        // 3. Depth-limited signatures.
        let mut sigs = vec![[0u64; SIG_DEPTH + 1]; count];
        for c in 0..count {
            sigs[c][0] = base_sig(nodes[rep[c]].shape, &nodes[rep[c]].perm);
        }
        for d in 1..=SIG_DEPTH {
            for c in 0..count {
                let mut h = sigs[c][0];
                for ch in &q_children[c] {
                    let x = match *ch {
                        Child::State(s) => self.data(s).sig[d - 1],
                        Child::Local(j) => sigs[j][d - 1],
                    };
                    h = mix(h, x);
                }
                sigs[c][d] = h;
            }
        }

        // 4. Match classes with stored states.
        let mut resolved: Vec<Option<StateId>> = vec![None; count];
        for c in 0..count {
            if resolved[c].is_some() {
                continue;
            }
            let cands = match self.by_sig.get(&sigs[c][SIG_DEPTH]) {
                Some(v) => v.clone(),
                None => continue,
            };
            for y in cands {
                if let Some(map) = self.try_match(c, y, &nodes, &rep, &q_children, &resolved) {
                    for (k, v) in map {
                        resolved[k] = Some(v);
                    }
                    break;
                }
            }
        }

        // 5. Stored children were atoms in step 1, so two unresolved classes
        // may still agree once their local children resolve. Refine again.
        let alias = merge_unresolved(nodes.as_slice(), &rep, &q_children, &resolved);

        // 6. Create the rest.
        let mut next_id = self.states.len() as u32;
        let mut fresh: Vec<usize> = Vec::new();
        for c in 0..count {
            if resolved[c].is_none() && alias[c] == c {
                resolved[c] = Some(StateId(next_id));
                next_id += 1;
                fresh.push(c);
            }
        }
        for c in 0..count {
            if resolved[c].is_none() {
                resolved[c] = resolved[alias[c]];
            }
        }
        for &c in &fresh {
            let children: Box<[StateId]> = q_children[c]
                .iter()
                .map(|ch| match *ch {
                    Child::State(s) => s,
                    Child::Local(j) => resolved[j].unwrap(),
                })
                .collect();
            let id = resolved[c].unwrap();
            debug_assert_eq!(id.0 as usize, self.states.len());
            let shape = nodes[rep[c]].shape;
            let perm = nodes[rep[c]].perm.clone();
            self.structural.insert((shape, perm.clone(), children.clone()), id);
            self.by_sig.entry(sigs[c][SIG_DEPTH]).or_default().push(id);
            self.states.push(StateData { shape, perm, children, sig: sigs[c] });
        }
        (0..n).map(|i| resolved[class[i]].unwrap()).collect()
    }

    /// Tries to extend `class c <-> state y` to a bisimulation between the
    /// unresolved part of the batch quotient and the store.
    fn try_match(
        &self,
        c: usize,
        y: StateId,
        nodes: &[NodeSpec],
        rep: &[usize],
        q_children: &[Vec<Child>],
        resolved: &[Option<StateId>],
    ) -> Option<HashMap<usize, StateId>> {
        let mut map: HashMap<usize, StateId> = HashMap::new();
        let mut stack = vec![(c, y)];
        map.insert(c, y);
        while let Some((x, y)) = stack.pop() {
            let node = &nodes[rep[x]];
            let yd = self.data(y);
            if node.shape != yd.shape || node.perm != yd.perm {
                return None;
            }
            for (k, ch) in q_children[x].iter().enumerate() {
                let target = yd.children[k];
                match *ch {
                    Child::State(s) => {
                        if s != target {
                            return None;
                        }
                    }
                    Child::Local(j) => {
                        if let Some(r) = resolved[j] {
                            if r != target {
                                return None;
                            }
                        } else if let Some(&m) = map.get(&j) {
                            if m != target {
                                return None;
                            }
                        } else {
                            map.insert(j, target);
                            stack.push((j, target));
                        }
                    }
                }
            }
        }
        Some(map)
    }

    /// Structural lookup: the state with this vertex permutation and
    /// these exact children, if present.
    pub fn lookup(&self, shape: ShapeId, perm: &Perm, children: &[StateId]) -> Option<StateId> {
        self.structural.get(&(shape, perm.clone(), children.to_vec().into_boxed_slice())).copied()
    }
}

/// For each unresolved class, the first unresolved class denoting the same
/// automorphism; resolved children count as their stored states.
fn merge_unresolved(
    nodes: &[NodeSpec],
    rep: &[usize],
    q_children: &[Vec<Child>],
    resolved: &[Option<StateId>],
) -> Vec<usize> {
    let count = rep.len();
    let mut block = vec![usize::MAX; count];
    let mut blocks = {
        let mut keys: HashMap<(ShapeId, &Perm), usize> = HashMap::new();
        for c in (0..count).filter(|&c| resolved[c].is_none()) {
            let k = keys.len();
            block[c] = *keys.entry((nodes[rep[c]].shape, &nodes[rep[c]].perm)).or_insert(k);
        }
        keys.len()
    };
    loop {
        let mut keys: HashMap<(usize, Vec<(u8, u32)>), usize> = HashMap::new();
        let mut next = vec![usize::MAX; count];
        for c in (0..count).filter(|&c| resolved[c].is_none()) {
            let ch: Vec<(u8, u32)> = q_children[c]
                .iter()
                .map(|ch| match *ch {
                    Child::State(s) => (0u8, s.0),
                    Child::Local(j) => match resolved[j] {
                        Some(s) => (0u8, s.0),
                        None => (1u8, block[j] as u32),
                    },
                })
                .collect();
            let k = keys.len();
            next[c] = *keys.entry((block[c], ch)).or_insert(k);
        }
        block = next;
        if keys.len() == blocks {
            break;
        }
        blocks = keys.len();
    }
    let mut first = vec![usize::MAX; blocks];
    (0..count)
        .map(|c| {
            if resolved[c].is_some() {
                return c;
            }
            if first[block[c]] == usize::MAX {
                first[block[c]] = c;
            }
            first[block[c]]
        })
        .collect()
}

/// Runs `f` with shared access to the store.
pub fn with_store<R>(f: impl FnOnce(&Store) -> R) -> R {
    f(&STORE.read())
}

/// Runs `f` with exclusive access to the store.
pub fn with_store_mut<R>(f: impl FnOnce(&mut Store) -> R) -> R {
    f(&mut STORE.write())
}
