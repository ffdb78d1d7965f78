use std::fmt;

/// Eventually periodic branching sequence `m_1, m_2, ...`, kept in canonical form:
/// primitive cycle, shortest prefix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape {
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("branching index {0} at level {1} is below 2")]
    SmallIndex(u32, usize),
    #[error("the repeating cycle of a branching sequence must be nonempty")]
    EmptyCycle,
}

impl TreeShape {
    pub fn new(prefix: Vec<u32>, cycle: Vec<u32>) -> Result<Self, ShapeError> {
        if cycle.is_empty() {
            return Err(ShapeError::EmptyCycle);
        }
        for (i, &m) in prefix.iter().chain(cycle.iter()).enumerate() {
            if m < 2 {
                return Err(ShapeError::SmallIndex(m, i + 1));
            }
        }
        Ok(Self::canonical(prefix, cycle))
    }

    pub fn regular(m: u32) -> Self {
        assert!(m >= 2, "branching index must be at least 2");
        TreeShape { prefix: vec![], cycle: vec![m] }
    }

    fn canonical(mut prefix: Vec<u32>, mut cycle: Vec<u32>) -> Self {
        let n = cycle.len();
        for d in 1..=n {
            if n % d == 0 && (0..n).all(|i| cycle[i] == cycle[i % d]) {
                cycle.truncate(d);
                break;
            }
        }
        while let Some(&last) = prefix.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        TreeShape { prefix, cycle }
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    /// Branching index at depth `i` (0-based), i.e. `m_{i+1}`.
    pub fn arity(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i] as usize
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()] as usize
        }
    }

    /// The shape of the subtree hanging from a first-level vertex.
    pub fn shift(&self) -> TreeShape {
        if self.prefix.is_empty() {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            TreeShape { prefix: vec![], cycle: c }
        } else {
            Self::canonical(self.prefix[1..].to_vec(), self.cycle.clone())
        }
    }

    pub fn shift_by(&self, k: usize) -> TreeShape {
        let mut s = self.clone();
        for _ in 0..k {
            s = s.shift();
        }
        s
    }

    /// Number of vertices on level `n`.
    pub fn level_size(&self, n: usize) -> usize {
        (0..n).map(|i| self.arity(i)).product()
    }

    pub fn is_regular(&self) -> bool {
        self.prefix.is_empty() && self.cycle.len() == 1
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.prefix {
            write!(f, "{m} ")?;
        }
        write!(f, "(")?;
        for (k, m) in self.cycle.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")*")
    }
}

/// A vertex of the tree: a word `y_1 ... y_n` with `y_i < m_i` (0-based letters).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(pub Vec<u32>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses 1-based digit strings such as `"12"`; letters above 9 use
    /// comma separation (`"1,12,3"`).
    pub fn parse(s: &str) -> Option<Vertex> {
        let s = s.trim();
        if s.is_empty() {
            return Some(Vertex::root());
        }
        let parts: Vec<u32> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse::<u32>().ok()).collect::<Option<_>>()?
        } else {
            s.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?
        };
        if parts.iter().any(|&x| x == 0) {
            return None;
        }
        Some(Vertex(parts.into_iter().map(|x| x - 1).collect()))
    }

    pub fn prefix(&self, k: usize) -> Vertex {
        Vertex(self.0[..k.min(self.0.len())].to_vec())
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Vertex) -> usize {
        self.0.iter().zip(other.0.iter()).take_while(|(a, b)| a == b).count()
    }

    /// Index of this vertex among the level-|v| vertices in lexicographic order.
    pub fn index(&self, shape: &TreeShape) -> usize {
        let mut idx = 0;
        for (i, &y) in self.0.iter().enumerate() {
            idx = idx * shape.arity(i) + y as usize;
        }
        idx
    }

    pub fn from_index(shape: &TreeShape, level: usize, mut idx: usize) -> Vertex {
        let mut out = vec![0u32; level];
        for i in (0..level).rev() {
            let m = shape.arity(i);
            out[i] = (idx % m) as u32;
            idx /= m;
        }
        Vertex(out)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&y| y >= 9);
        for (k, y) in self.0.iter().enumerate() {
            if wide && k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", y + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_merges_equal_descriptions() {
        let a = TreeShape::new(vec![2, 3], vec![2, 3]).unwrap();
        let b = TreeShape::new(vec![], vec![2, 3, 2, 3]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shift(), TreeShape::new(vec![], vec![3, 2]).unwrap());
        assert_eq!(TreeShape::new(vec![2, 2], vec![2]).unwrap(), TreeShape::regular(2));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(TreeShape::new(vec![1], vec![2]).is_err());
        assert!(TreeShape::new(vec![2], vec![]).is_err());
    }

    #[test]
    fn arity_and_level_size() {
        let s = TreeShape::new(vec![4], vec![2, 3]).unwrap();
        assert_eq!((0..5).map(|i| s.arity(i)).collect::<Vec<_>>(), vec![4, 2, 3, 2, 3]);
        assert_eq!(s.level_size(3), 24);
        assert_eq!(s.shift().arity(0), 2);
    }

    #[test]
    fn vertex_index_roundtrip() {
        let s = TreeShape::new(vec![3], vec![2]).unwrap();
        for idx in 0..12 {
            let v = Vertex::from_index(&s, 3, idx);
            assert_eq!(v.index(&s), idx);
        }
        assert_eq!(Vertex::parse("12").unwrap(), Vertex(vec![0, 1]));
        assert_eq!(Vertex::parse("12").unwrap().to_string(), "12");
        assert!(Vertex::parse("10").is_none());
    }
}
