//! Automorphisms of spherically homogeneous rooted trees, stored as states of
//! minimal letter-to-letter transducers.

mod shape;
mod store;

use std::collections::HashMap;
use std::fmt;

pub use shape::{ShapeError, TreeShape, Vertex};
pub use store::{with_store, with_store_mut, Child, NodeSpec, ShapeId, StateId, Store};

use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("letter {letter} at position {position} is outside the alphabet of size {arity}")]
    LetterOutOfRange { position: usize, letter: u32, arity: usize },
    #[error("automorphisms live on different trees ({0} vs {1})")]
    ShapeMismatch(TreeShape, TreeShape),
    #[error("resource bound exceeded: {what} (cap {cap})")]
    ResourceExceeded { what: &'static str, cap: usize },
}

/// Interns a shape and returns its id.
pub fn intern_shape(shape: &TreeShape) -> ShapeId {
    if let Some(id) = with_store(|s| s.shape_lookup(shape)) {
        return id;
    }
    with_store_mut(|s| s.shape_id(shape))
}

/// Shape of the subtree below a first-level vertex.
pub fn shift_shape(id: ShapeId) -> ShapeId {
    with_store(|s| s.shift(id))
}

pub fn shape_of_id(id: ShapeId) -> TreeShape {
    with_store(|s| s.shape(id).clone())
}

/// Inserts a batch of (possibly mutually recursive) states, returning the
/// canonical automorphism of every node.
pub fn define_states(nodes: Vec<NodeSpec>) -> Vec<TreeAutomorphism> {
    with_store_mut(|s| {
        for n in &nodes {
            s.identity(n.shape);
        }
        s.insert_batch(nodes).into_iter().map(TreeAutomorphism).collect()
    })
}

/// A tree automorphism: a handle to a state of the global minimal store.
/// Equal handles denote equal automorphisms and conversely.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAutomorphism(StateId);

impl fmt::Debug for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0 .0)
    }
}

impl TreeAutomorphism {
    pub fn from_state(s: StateId) -> Self {
        TreeAutomorphism(s)
    }

    pub fn state(self) -> StateId {
        self.0
    }

    pub fn identity(shape: &TreeShape) -> Self {
        let id = intern_shape(shape);
        Self::identity_on(id)
    }

    pub fn identity_on(shape: ShapeId) -> Self {
        if let Some(s) = with_store(|s| s.identity_of(shape)) {
            return TreeAutomorphism(s);
        }
        TreeAutomorphism(with_store_mut(|s| s.identity(shape)))
    }

    /// A rooted automorphism: vertex permutation `p` at the root, trivial below.
    pub fn rooted(shape: &TreeShape, p: &Perm) -> Self {
        let sid = intern_shape(shape);
        let id = Self::identity_on(with_store(|s| s.shift(sid)));
        let m = shape.arity(0);
        assert_eq!(p.degree(), m);
        define_states(vec![NodeSpec {
            shape: sid,
            perm: p.clone(),
            children: vec![Child::State(id.0); m],
        }])[0]
    }

    pub fn shape_id(self) -> ShapeId {
        with_store(|s| s.shape_of(self.0))
    }

    pub fn shape(self) -> TreeShape {
        with_store(|s| s.shape(s.shape_of(self.0)).clone())
    }

    pub fn is_identity(self) -> bool {
        let (shape, known) = with_store(|s| (s.shape_of(self.0), s.identity_of(s.shape_of(self.0))));
        match known {
            Some(i) => i == self.0,
            None => Self::identity_on(shape) == self,
        }
    }

    pub fn root_perm(self) -> Perm {
        with_store(|s| s.perm(self.0).clone())
    }

    pub fn arity(self) -> usize {
        with_store(|s| s.perm(self.0).degree())
    }

    /// Image of a vertex: `(y_1 ... y_n)^f`.
    pub fn act(self, u: &Vertex) -> Result<Vertex, TreeError> {
        with_store(|s| {
            let mut cur = self.0;
            let mut out = Vec::with_capacity(u.len());
            for (pos, &y) in u.0.iter().enumerate() {
                let p = s.perm(cur);
                if y as usize >= p.degree() {
                    return Err(TreeError::LetterOutOfRange { position: pos, letter: y, arity: p.degree() });
                }
                out.push(p.apply(y as usize) as u32);
                cur = s.child(cur, y as usize);
            }
            Ok(Vertex(out))
        })
    }

    /// Section `f_u`, defined by `(w)f_u = (uw)f` up to the prefix.
    pub fn section(self, u: &Vertex) -> Result<Self, TreeError> {
        with_store(|s| {
            let mut cur = self.0;
            for (pos, &y) in u.0.iter().enumerate() {
                let m = s.perm(cur).degree();
                if y as usize >= m {
                    return Err(TreeError::LetterOutOfRange { position: pos, letter: y, arity: m });
                }
                cur = s.child(cur, y as usize);
            }
            Ok(TreeAutomorphism(cur))
        })
    }

    pub fn child(self, i: usize) -> Self {
        TreeAutomorphism(with_store(|s| s.child(self.0, i)))
    }

    /// Root permutation and first-level sections.
    pub fn decompose(self) -> (Perm, Vec<TreeAutomorphism>) {
        with_store(|s| {
            (s.perm(self.0).clone(), s.children(self.0).iter().map(|&c| TreeAutomorphism(c)).collect())
        })
    }

    /// `self` followed by `other` (right action): `(fg)_u = f_u g_{u^f}`.
    pub fn compose(self, other: TreeAutomorphism) -> Result<Self, TreeError> {
        let (sa, sb) = with_store(|s| (s.shape_of(self.0), s.shape_of(other.0)));
        if sa != sb {
            return Err(TreeError::ShapeMismatch(self.shape(), other.shape()));
        }
        let id = Self::identity_on(sa);
        if self == id {
            return Ok(other);
        }
        if other == id {
            return Ok(self);
        }
        let nodes = with_store(|s| {
            let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
            let mut order: Vec<(StateId, StateId)> = vec![(self.0, other.0)];
            index.insert((self.0, other.0), 0);
            let mut nodes: Vec<NodeSpec> = Vec::new();
            let mut k = 0;
            while k < order.len() {
                let (x, y) = order[k];
                k += 1;
                let px = s.perm(x);
                let perm = px.compose(s.perm(y));
                let mut children = Vec::with_capacity(px.degree());
                for i in 0..px.degree() {
                    let cx = s.child(x, i);
                    let cy = s.child(y, px.apply(i));
                    let c = if s.is_identity(cx) {
                        Child::State(cy)
                    } else if s.is_identity(cy) {
                        Child::State(cx)
                    } else {
                        let next = order.len();
                        let j = *index.entry((cx, cy)).or_insert_with(|| {
                            order.push((cx, cy));
                            next
                        });
                        Child::Local(j)
                    };
                    children.push(c);
                }
                nodes.push(NodeSpec { shape: s.shape_of(x), perm, children });
            }
            nodes
        });
        Ok(with_store_mut(|s| TreeAutomorphism(s.insert_batch(nodes)[0])))
    }

    /// `(f^{-1})_u = (f_{u^{f^{-1}}})^{-1}`.
    pub fn invert(self) -> Self {
        if self.is_identity() {
            return self;
        }
        let nodes = with_store(|s| {
            let mut index: HashMap<StateId, usize> = HashMap::new();
            let mut order = vec![self.0];
            index.insert(self.0, 0);
            let mut nodes = Vec::new();
            let mut k = 0;
            while k < order.len() {
                let x = order[k];
                k += 1;
                let inv = s.perm(x).inverse();
                let mut children = Vec::with_capacity(inv.degree());
                for i in 0..inv.degree() {
                    let c = s.child(x, inv.apply(i));
                    if s.is_identity(c) {
                        children.push(Child::State(c));
                    } else {
                        let next = order.len();
                        let j = *index.entry(c).or_insert_with(|| {
                            order.push(c);
                            next
                        });
                        children.push(Child::Local(j));
                    }
                }
                nodes.push(NodeSpec { shape: s.shape_of(x), perm: inv, children });
            }
            nodes
        });
        with_store_mut(|s| TreeAutomorphism(s.insert_batch(nodes)[0]))
    }

    pub fn pow(self, e: i64) -> Self {
        let mut base = if e < 0 { self.invert() } else { self };
        let mut e = e.unsigned_abs();
        let mut acc = Self::identity_on(self.shape_id());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(base).expect("same shape");
            }
        }
        acc
    }

    /// Closure of `{f}` under first-level sections, or an overflow error
    /// when more than `cap` states are reachable.
    pub fn reachable_sections(self, cap: usize) -> Result<Vec<TreeAutomorphism>, TreeError> {
        with_store(|s| {
            let mut seen = std::collections::HashSet::new();
            let mut order = vec![self.0];
            seen.insert(self.0);
            let mut k = 0;
            while k < order.len() {
                let x = order[k];
                k += 1;
                for &c in s.children(x) {
                    if seen.insert(c) {
                        if order.len() >= cap {
                            return Err(TreeError::ResourceExceeded { what: "reachable sections", cap });
                        }
                        order.push(c);
                    }
                }
            }
            Ok(order.into_iter().map(TreeAutomorphism).collect())
        })
    }

    /// The permutation induced on level `n` (vertices in lexicographic order).
    pub fn level_perm(self, n: usize) -> Perm {
        with_store(|s| {
            let mut memo = HashMap::new();
            Perm::from_images_unchecked(level_images(s, self.0, n, &mut memo).as_ref().clone())
        })
    }

    /// Portrait to fixed depth: interior vertices carry vertex permutations,
    /// leaves carry sections. Trivial sections are cut early.
    pub fn portrait(self, depth: usize) -> Portrait {
        with_store(|s| portrait_rec(s, self.0, depth))
    }

    /// Portrait that stops wherever `stop(section, depth)` holds or the
    /// section is trivial. `stop` runs under the store's read lock and must
    /// not create states.
    pub fn portrait_with_profile(
        self,
        stop: &dyn Fn(TreeAutomorphism, usize) -> bool,
        node_cap: usize,
    ) -> Result<Portrait, TreeError> {
        with_store(|s| {
            let mut budget = node_cap;
            profile_rec(s, self.0, 0, stop, &mut budget)
                .map_err(|_| TreeError::ResourceExceeded { what: "portrait nodes", cap: node_cap })
        })
    }
}

fn level_images(
    s: &Store,
    x: StateId,
    n: usize,
    memo: &mut HashMap<(StateId, usize), std::rc::Rc<Vec<u32>>>,
) -> std::rc::Rc<Vec<u32>> {
    if n == 0 {
        return std::rc::Rc::new(vec![0]);
    }
    if let Some(v) = memo.get(&(x, n)) {
        return v.clone();
    }
    let shape = s.shape(s.shape_of(x));
    let m = shape.arity(0);
    let sub = shape.shift().level_size(n - 1);
    let mut out = vec![0u32; m * sub];
    let p = s.perm(x);
    for i in 0..m {
        let c = s.child(x, i);
        let pi = p.apply(i);
        if s.is_identity(c) {
            for r in 0..sub {
                out[i * sub + r] = (pi * sub + r) as u32;
            }
        } else {
            let ci = level_images(s, c, n - 1, memo);
            for r in 0..sub {
                out[i * sub + r] = (pi * sub) as u32 + ci[r];
            }
        }
    }
    let rc = std::rc::Rc::new(out);
    memo.insert((x, n), rc.clone());
    rc
}

/// Level permutations of several automorphisms sharing one memo table.
pub fn level_perms(fs: &[TreeAutomorphism], n: usize) -> Vec<Perm> {
    with_store(|s| {
        let mut memo = HashMap::new();
        fs.iter()
            .map(|f| Perm::from_images_unchecked(level_images(s, f.0, n, &mut memo).as_ref().clone()))
            .collect()
    })
}

/// A finite decorated tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Portrait {
    Leaf(TreeAutomorphism),
    Node { shape: ShapeId, perm: Perm, children: Vec<Portrait> },
}

impl Portrait {
    pub fn depth(&self) -> usize {
        match self {
            Portrait::Leaf(_) => 0,
            Portrait::Node { children, .. } => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Portrait::Leaf(_) => 1,
            Portrait::Node { children, .. } => 1 + children.iter().map(|c| c.node_count()).sum::<usize>(),
        }
    }

    /// Rebuilds the automorphism from vertex labels and leaf sections.
    pub fn recompose(&self) -> TreeAutomorphism {
        match self {
            Portrait::Leaf(f) => *f,
            Portrait::Node { shape, perm, children } => {
                let kids: Vec<TreeAutomorphism> = children.iter().map(|c| c.recompose()).collect();
                define_states(vec![NodeSpec {
                    shape: *shape,
                    perm: perm.clone(),
                    children: kids.iter().map(|k| Child::State(k.0)).collect(),
                }])[0]
            }
        }
    }
}

fn portrait_rec(s: &Store, x: StateId, depth: usize) -> Portrait {
    if depth == 0 || s.is_identity(x) {
        return Portrait::Leaf(TreeAutomorphism(x));
    }
    Portrait::Node {
        shape: s.shape_of(x),
        perm: s.perm(x).clone(),
        children: s.children(x).iter().map(|&c| portrait_rec(s, c, depth - 1)).collect(),
    }
}

fn profile_rec(
    s: &Store,
    x: StateId,
    depth: usize,
    stop: &dyn Fn(TreeAutomorphism, usize) -> bool,
    budget: &mut usize,
) -> Result<Portrait, TreeError> {
    if *budget == 0 {
        return Err(TreeError::ResourceExceeded { what: "portrait nodes", cap: 0 });
    }
    *budget -= 1;
    if s.is_identity(x) || stop(TreeAutomorphism(x), depth) {
        return Ok(Portrait::Leaf(TreeAutomorphism(x)));
    }
    let mut children = Vec::new();
    for &c in s.children(x) {
        children.push(profile_rec(s, c, depth + 1, stop, budget)?);
    }
    Ok(Portrait::Node { shape: s.shape_of(x), perm: s.perm(x).clone(), children })
}
