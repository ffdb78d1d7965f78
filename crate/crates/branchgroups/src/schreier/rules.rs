//! Substitutional rules. Each rule replaces the edges of one label; an
//! edge `v -> w` becomes edges between copies `i v` and `i w` of its
//! endpoints, where `i v` prepends the letter `i`.

use super::{SchreierError, SchreierGraph};
use crate::tree::TreeShape;

/// Edge between copies of the endpoints; `(i, false)` is `i v` and
/// `(i, true)` is `i w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmittedEdge {
    pub from: (usize, bool),
    pub label: usize,
    pub to: (usize, bool),
}

#[derive(Clone, Debug)]
pub struct SubstitutionRules {
    pub group: &'static str,
    pub arity: usize,
    pub labels: Vec<&'static str>,
    /// Edges emitted for an edge of each label.
    pub rules: Vec<Vec<EmittedEdge>>,
    /// Letter prepended by the vertex inclusion (0-based).
    pub inclusion: usize,
}

const fn e(from: usize, label: usize, to: usize, other: bool) -> EmittedEdge {
    EmittedEdge { from: (from, false), label, to: (to, other) }
}

/// Rules for `Gg`, `FGg`, `BGg` and `GSg`.
pub fn substitution_rules(name: &str) -> Option<SubstitutionRules> {
    let (s, o) = (false, true);
    let r = match name {
        // labels a, b, c, d; an a-edge sigma - tau becomes
        // 2sigma -a- 1sigma -b,c- 1tau -a- 2tau with d-loops at 1sigma, 1tau;
        // b, c, d edges become d, b, c edges between the 2-copies
        "Gg" => SubstitutionRules {
            group: "Gg",
            arity: 2,
            labels: vec!["a", "b", "c", "d"],
            rules: vec![
                vec![e(1, 0, 0, s), e(0, 0, 1, s), e(0, 1, 0, o), e(0, 2, 0, o), e(0, 3, 0, s)],
                vec![e(1, 3, 1, o)],
                vec![e(1, 1, 1, o)],
                vec![e(1, 2, 1, o)],
            ],
            inclusion: 1,
        },
        // an a-triangle on rho, sigma, tau becomes three a-triangles on the
        // copies, a t-triangle on the 1-copies and t-loops at the 2-copies
        "FGg" => SubstitutionRules {
            group: "FGg",
            arity: 3,
            labels: vec!["a", "t"],
            rules: vec![
                vec![e(0, 0, 1, s), e(1, 0, 2, s), e(2, 0, 0, s), e(0, 1, 0, o), e(1, 1, 1, s)],
                vec![e(2, 1, 2, o)],
            ],
            inclusion: 2,
        },
        "BGg" => SubstitutionRules {
            group: "BGg",
            arity: 3,
            labels: vec!["a", "t"],
            rules: vec![
                vec![e(0, 0, 1, s), e(1, 0, 2, s), e(2, 0, 0, s), e(0, 1, 0, o), e(1, 1, 1, o)],
                vec![e(2, 1, 2, o)],
            ],
            inclusion: 2,
        },
        // same undirected picture as BGg; the t-edges on the 2-copies run
        // against the a-triangle
        "GSg" => SubstitutionRules {
            group: "GSg",
            arity: 3,
            labels: vec!["a", "t"],
            rules: vec![
                vec![
                    e(0, 0, 1, s),
                    e(1, 0, 2, s),
                    e(2, 0, 0, s),
                    e(0, 1, 0, o),
                    EmittedEdge { from: (1, true), label: 1, to: (1, false) },
                ],
                vec![e(2, 1, 2, o)],
            ],
            inclusion: 2,
        },
        _ => return None,
    };
    Some(r)
}

/// The graph after `steps` substitutions, starting from the one-vertex
/// graph with a loop for every label.
pub fn substitutional_expand(rules: &SubstitutionRules, steps: usize) -> Result<SchreierGraph, SchreierError> {
    let m = rules.arity;
    let k = rules.labels.len();
    let mut targets: Vec<Vec<u32>> = vec![vec![0]; k];
    let mut size = 1usize;
    for _ in 0..steps {
        if size * m > super::GRAPH_CAP {
            return Err(SchreierError::ResourceExceeded { what: "Schreier graph vertices", cap: super::GRAPH_CAP });
        }
        let mut next = vec![vec![u32::MAX; size * m]; k];
        for (x, t) in targets.iter().enumerate() {
            for (v, &w) in t.iter().enumerate() {
                let end = |(i, other): (usize, bool)| i * size + if other { w as usize } else { v };
                for r in &rules.rules[x] {
                    next[r.label][end(r.from)] = end(r.to) as u32;
                }
            }
        }
        if next.iter().flatten().any(|&x| x == u32::MAX) {
            return Err(SchreierError::Invalid(format!("{} rules leave an edge undefined", rules.group)));
        }
        targets = next;
        size *= m;
    }
    Ok(SchreierGraph {
        group: rules.group.to_string(),
        level: steps,
        shape: TreeShape::regular(m as u32),
        labels: rules.labels.iter().map(|s| s.to_string()).collect(),
        basepoint: (0..steps).fold(0, |acc, _| acc * m + rules.inclusion),
        targets,
    })
}
