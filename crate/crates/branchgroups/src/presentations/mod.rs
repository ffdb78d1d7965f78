//! Endomorphic presentations `<S | Q | Phi | R>`: the group is `F_S` modulo
//! `Q` and all images of `R` under the monoid generated by `Phi`.
//! Substitutions act on free words only; they need not induce
//! endomorphisms of the group.

use std::sync::Arc;

use rustc_hash::FxHashSet;

use crate::decision::{is_trivial, DecisionError};
use crate::group::{builtin, GroupDefinition, GroupError, Word};
use crate::words::{format_free, free_reduce, parse_over, substitute, FreeWord, Sym};

mod builtins;

pub use builtins::{builtin_presentation, hnn_presentation_relators, PRESENTATION_NAMES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("{0}")]
    Invalid(String),
}

/// A map `S -> F_S`, extended to free words letter by letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub name: String,
    pub images: Vec<FreeWord>,
}

impl Substitution {
    pub fn apply(&self, w: &[Sym]) -> FreeWord {
        free_reduce(&substitute(w, &|i| self.images[i as usize].clone()))
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        Substitution {
            name: format!("{}{}", self.name, other.name),
            images: self.images.iter().map(|w| other.apply(w)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndomorphicPresentation {
    pub name: String,
    pub alphabet: Vec<String>,
    pub fixed: Vec<FreeWord>,
    pub substitutions: Vec<Substitution>,
    pub iterated: Vec<FreeWord>,
    /// Builtin group the presentation describes.
    pub group: String,
    /// Each alphabet symbol as a word over the group's generators.
    pub images: Vec<String>,
}

impl EndomorphicPresentation {
    pub fn is_ascending(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.alphabet.iter().map(|s| s.as_str()).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<FreeWord, PresentationError> {
        parse_over(text, &self.names()).map_err(|e| PresentationError::Invalid(format!("'{text}': {e}")))
    }

    pub fn format(&self, w: &[Sym]) -> String {
        format_free(w, &self.names())
    }

    /// Builds a presentation from word texts; substitutions are given as
    /// `(name, [(symbol, image)])`, unlisted symbols are fixed.
    #[allow(clippy::too_many_arguments)]
    pub fn from_text(
        name: &str,
        group: &str,
        alphabet: &[&str],
        images: &[&str],
        fixed: &[&str],
        substitutions: &[(&str, &[(&str, &str)])],
        iterated: &[&str],
    ) -> Result<Self, PresentationError> {
        if images.len() != alphabet.len() {
            return Err(PresentationError::Alphabet(format!("{} symbols but {} images", alphabet.len(), images.len())));
        }
        let mut p = EndomorphicPresentation {
            name: name.to_string(),
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            fixed: Vec::new(),
            substitutions: Vec::new(),
            iterated: Vec::new(),
            group: group.to_string(),
            images: images.iter().map(|s| s.to_string()).collect(),
        };
        p.fixed = fixed.iter().map(|t| p.parse_word(t)).collect::<Result<_, _>>()?;
        p.iterated = iterated.iter().map(|t| p.parse_word(t)).collect::<Result<_, _>>()?;
        for (sname, rules) in substitutions {
            let mut imgs: Vec<FreeWord> = (0..alphabet.len()).map(|i| vec![Sym::new(i as u32)]).collect();
            for (sym, img) in rules.iter() {
                let i = alphabet
                    .iter()
                    .position(|a| a == sym)
                    .ok_or_else(|| PresentationError::Alphabet(format!("unknown symbol '{sym}'")))?;
                imgs[i] = p.parse_word(img)?;
            }
            p.substitutions.push(Substitution { name: sname.to_string(), images: imgs });
        }
        Ok(p)
    }

    /// Images of `R` under compositions of at most `depth` substitutions,
    /// breadth first, after `Q`. Words are freely reduced and deduplicated.
    pub fn expand(&self, depth: usize) -> Vec<FreeWord> {
        self.expand_layers(depth).into_iter().flatten().collect()
    }

    /// `Q` followed by the relators first reached at each depth.
    pub fn expand_layers(&self, depth: usize) -> Vec<Vec<FreeWord>> {
        let mut seen: FxHashSet<FreeWord> = FxHashSet::default();
        let mut layers = Vec::new();
        let mut first: Vec<FreeWord> = Vec::new();
        for w in self.fixed.iter().chain(&self.iterated) {
            let w = free_reduce(w);
            if seen.insert(w.clone()) {
                first.push(w);
            }
        }
        // images are taken of the iterated relators only
        let mut frontier: Vec<FreeWord> = self.iterated.iter().map(|w| free_reduce(w)).collect();
        layers.push(first);
        for _ in 0..depth {
            let mut next_frontier = Vec::new();
            let mut layer = Vec::new();
            for w in &frontier {
                for phi in &self.substitutions {
                    let v = phi.apply(w);
                    next_frontier.push(v.clone());
                    if seen.insert(v.clone()) {
                        layer.push(v);
                    }
                }
            }
            next_frontier.sort();
            next_frontier.dedup();
            frontier = next_frontier;
            layers.push(layer);
        }
        layers
    }

    /// The builtin group named by `group` and the image of each symbol in it.
    pub fn realise(&self) -> Result<(Arc<GroupDefinition>, Vec<Word>), PresentationError> {
        self.realise_in(builtin(&self.group)?)
    }

    pub fn realise_in(&self, g: Arc<GroupDefinition>) -> Result<(Arc<GroupDefinition>, Vec<Word>), PresentationError> {
        let imgs = self
            .images
            .iter()
            .map(|t| g.parse(t).map_err(|e| PresentationError::Alphabet(format!("'{t}': {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((g, imgs))
    }

    /// Verifies every relator up to `depth` in the builtin group.
    pub fn verify(&self, depth: usize) -> Result<VerifyReport, PresentationError> {
        self.verify_in(builtin(&self.group)?, depth)
    }

    pub fn verify_in(&self, g: Arc<GroupDefinition>, depth: usize) -> Result<VerifyReport, PresentationError> {
        let (g, imgs) = self.realise_in(g)?;
        let mut report = VerifyReport { checked: 0, first_failure: None, longest: 0 };
        for (d, layer) in self.expand_layers(depth).into_iter().enumerate() {
            let results: Vec<Result<bool, DecisionError>> = {
                use rayon::prelude::*;
                layer.par_iter().map(|w| is_trivial(&g, &to_group_word(&g, &imgs, w))).collect()
            };
            for (w, r) in layer.iter().zip(results) {
                report.checked += 1;
                report.longest = report.longest.max(w.len());
                if !r? && report.first_failure.is_none() {
                    report.first_failure = Some((d, self.format(w)));
                }
            }
            if report.first_failure.is_some() {
                break;
            }
        }
        Ok(report)
    }

    /// Fraction of single-letter substitutions in relators of depth at most
    /// `depth` that give nontrivial elements; at most `per_relator`
    /// positions, evenly spread, are mutated in each relator.
    pub fn mutation_control(&self, depth: usize, per_relator: usize) -> Result<MutationReport, PresentationError> {
        self.mutation_control_in(builtin(&self.group)?, depth, per_relator)
    }

    pub fn mutation_control_in(
        &self,
        g: Arc<GroupDefinition>,
        depth: usize,
        per_relator: usize,
    ) -> Result<MutationReport, PresentationError> {
        use rayon::prelude::*;
        let (g, imgs) = self.realise_in(g)?;
        let k = self.alphabet.len() as u32;
        let mut mutants = Vec::new();
        for w in self.expand(depth) {
            if w.is_empty() {
                continue;
            }
            let step = w.len().div_ceil(per_relator).max(1);
            for pos in (0..w.len()).step_by(step) {
                for id in (0..k).filter(|&id| id != w[pos].id) {
                    let mut m = w.clone();
                    m[pos] = Sym { id, inv: w[pos].inv };
                    mutants.push(m);
                }
            }
        }
        let results: Vec<Result<bool, DecisionError>> =
            mutants.par_iter().map(|m| is_trivial(&g, &to_group_word(&g, &imgs, m))).collect();
        let mut nontrivial = 0;
        for r in results {
            if !r? {
                nontrivial += 1;
            }
        }
        Ok(MutationReport { mutants: mutants.len(), nontrivial })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    /// Depth and text of the first nontrivial relator.
    pub first_failure: Option<(usize, String)>,
    pub longest: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutationReport {
    pub mutants: usize,
    pub nontrivial: usize,
}

impl MutationReport {
    pub fn rate(&self) -> f64 {
        if self.mutants == 0 {
            return 1.0;
        }
        self.nontrivial as f64 / self.mutants as f64
    }
}

pub fn to_group_word(g: &GroupDefinition, imgs: &[Word], w: &[Sym]) -> Word {
    let mut letters = Vec::new();
    for s in w {
        let x = &imgs[s.id as usize];
        if s.inv {
            letters.extend(g.inverse(x).0);
        } else {
            letters.extend(x.0.iter().copied());
        }
    }
    g.reduce(&Word(letters))
}

#[cfg(test)]
mod tests;
