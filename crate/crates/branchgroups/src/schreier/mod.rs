//! Schreier graphs of the action on a level, their substitutional
//! construction, growth, and the spectra of the Hecke-Laplace operators
//! `Delta_n = sum over s in S of pi_n(s)`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::group::{GroupDefinition, GroupError};
use crate::tree::{TreeShape, Vertex};

mod eigen;
mod rules;
mod spectra;

pub use eigen::symmetric_eigenvalues;
pub use rules::{substitution_rules, substitutional_expand, EmittedEdge, SubstitutionRules};
pub use spectra::{
    closed_form, determinant_exact, julia_preimages, julia_set_approx, laplacian, phi_check, phi_values, q_matrix, spectra_csv,
    spectrum, ClosedForm, SpectralReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchreierError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("resource bound exceeded: {what} (cap {cap})")]
    ResourceExceeded { what: &'static str, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Vertex cap for graph construction.
pub const GRAPH_CAP: usize = 1 << 20;

/// Labelled Schreier graph on the vertices of one level. Every vertex has
/// exactly one outgoing edge per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierGraph {
    pub group: String,
    pub level: usize,
    pub shape: TreeShape,
    pub labels: Vec<String>,
    /// `targets[s][v]` is the image of vertex `v` under generator `s`.
    pub targets: Vec<Vec<u32>>,
    pub basepoint: usize,
}

pub fn schreier_graph(g: &GroupDefinition, n: usize) -> Result<SchreierGraph, SchreierError> {
    let size = g.shape().level_size(n);
    if size > GRAPH_CAP {
        return Err(SchreierError::ResourceExceeded { what: "Schreier graph vertices", cap: GRAPH_CAP });
    }
    let mut labels = Vec::new();
    let mut targets = Vec::new();
    for (name, s) in g.generator_states() {
        labels.push(name);
        targets.push(s.level_perm(n).images().to_vec());
    }
    Ok(SchreierGraph {
        group: g.name().to_string(),
        level: n,
        shape: g.shape().clone(),
        labels,
        targets,
        basepoint: size - 1,
    })
}

impl SchreierGraph {
    pub fn num_vertices(&self) -> usize {
        self.targets.first().map_or(1, |t| t.len())
    }

    /// The level word of a vertex, 1-based letters.
    pub fn vertex_name(&self, v: usize) -> String {
        if self.level == 0 {
            return "e".into();
        }
        Vertex::from_index(&self.shape, self.level, v).to_string()
    }

    /// Whether every edge of label `s` is paired with its reverse.
    pub fn is_involution(&self, s: usize) -> bool {
        let t = &self.targets[s];
        (0..t.len()).all(|v| t[t[v] as usize] as usize == v)
    }

    /// Neighbours along edges in both directions.
    pub fn neighbours(&self) -> Vec<Vec<u32>> {
        let n = self.num_vertices();
        let mut adj = vec![Vec::new(); n];
        for t in &self.targets {
            for (v, &w) in t.iter().enumerate() {
                adj[v].push(w);
                adj[w as usize].push(v as u32);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    pub fn distances_from(&self, start: usize) -> Vec<usize> {
        distances(&self.neighbours(), start)
    }

    /// Number of vertices at each distance from the basepoint.
    pub fn growth_series(&self) -> Vec<u64> {
        let d = self.distances_from(self.basepoint);
        let mut out = vec![0u64; d.iter().max().map_or(0, |m| m + 1)];
        for x in d {
            out[x] += 1;
        }
        out
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> usize {
        let adj = self.neighbours();
        (0..adj.len()).into_par_iter().map(|v| *distances(&adj, v).iter().max().unwrap()).max().unwrap_or(0)
    }

    /// DOT text; involutive labels are drawn once per pair without arrows.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}_{}\" {{", self.group, self.level);
        for v in 0..self.num_vertices() {
            let extra = if v == self.basepoint { " [shape=doublecircle]" } else { "" };
            let _ = writeln!(out, "  \"{}\"{};", self.vertex_name(v), extra);
        }
        for (s, t) in self.targets.iter().enumerate() {
            let inv = self.is_involution(s);
            for (v, &w) in t.iter().enumerate() {
                let w = w as usize;
                if inv && w < v {
                    continue;
                }
                let attrs = if inv { ", dir=none" } else { "" };
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label={}{}];",
                    self.vertex_name(v),
                    self.vertex_name(w),
                    self.labels[s],
                    attrs
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn distances(adj: &[Vec<u32>], start: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            let w = w as usize;
            if d[w] == usize::MAX {
                d[w] = d[v] + 1;
                queue.push_back(w);
            }
        }
    }
    d
}

/// Coefficients of `prod_{i<n} (1 + c X^(2^i))`.
pub fn product_series(n: usize, c: u64) -> Vec<u64> {
    let mut p = vec![1u64];
    for i in 0..n {
        let shift = 1usize << i;
        let mut q = vec![0u64; p.len() + shift];
        for (k, &x) in p.iter().enumerate() {
            q[k] += x;
            q[k + shift] += c * x;
        }
        p = q;
    }
    p
}
