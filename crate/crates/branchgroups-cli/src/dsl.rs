//! Line-oriented group definition files.
//!
//! ```text
//! # the first Grigorchuk group
//! group Gg
//! arity 2
//! rooted a = (1 2)
//! recursive b = (a, c)
//! recursive c = (a, d)
//! recursive d = (1, b)
//!
//! presentation GgL over Gg
//! symbols a c d
//! substitution phi: a -> aca, c -> cd, d -> c
//! relator a^2
//! relator [d,d^a]
//! ```
//!
//! `arity seq m1 m2 ... cycle k` declares a spherically homogeneous tree
//! whose last `k` indices repeat. A generator name may carry `@i` to give
//! its action on the `i`-th tree of the shift orbit; undeclared pairs act
//! trivially. A recursive line may end with the name of a rooted generator,
//! applied after the sections. Sections are products of `g`, `g^k`, `1`.

use std::fmt;
use std::sync::Arc;

use branchgroups::group::{builtin, GenSpec, GroupDefinition, GroupError, RecursiveSpec};
use branchgroups::perm::Perm;
use branchgroups::presentations::{EndomorphicPresentation, Substitution};
use branchgroups::tree::TreeShape;
use branchgroups::words::{format_free, parse_over, FreeWord, Sym};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown symbol '{name}'")]
    UnknownSymbol { line: usize, column: usize, name: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    ArityMismatch { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arity {
    Regular(u32),
    Sequence { seq: Vec<u32>, cycle: usize },
}

impl Arity {
    pub fn shape(&self) -> Result<TreeShape, String> {
        match self {
            Arity::Regular(m) => TreeShape::new(vec![], vec![*m]).map_err(|e| e.to_string()),
            Arity::Sequence { seq, cycle } => {
                let split = seq.len() - cycle;
                TreeShape::new(seq[..split].to_vec(), seq[split..].to_vec()).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// Cycles, 1-based.
    Rooted(Vec<Vec<u32>>),
    /// Sections as products of `(generator, exponent)`, then a rooted
    /// generator's permutation.
    Recursive { sections: Vec<Vec<(String, i64)>>, then: Option<String> },
}

#[derive(Clone, Debug, Eq)]
pub struct GenLine {
    pub name: String,
    pub class: usize,
    pub action: Action,
    /// Source line, ignored by equality.
    pub line: usize,
}

impl PartialEq for GenLine {
    fn eq(&self, other: &Self) -> bool {
        (&self.name, self.class, &self.action) == (&other.name, other.class, &other.action)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDecl {
    pub name: String,
    pub arity: Arity,
    pub lines: Vec<GenLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationDecl {
    pub name: String,
    pub over: String,
    pub symbols: Vec<String>,
    /// Symbol images as word texts over the group; missing ones map to the
    /// symbol itself.
    pub images: Vec<(String, String)>,
    pub fixed: Vec<FreeWord>,
    pub substitutions: Vec<(String, Vec<(String, FreeWord)>)>,
    pub relators: Vec<FreeWord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupFile {
    pub groups: Vec<GroupDecl>,
    pub presentations: Vec<PresentationDecl>,
}

fn is_name(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(x) if x.is_ascii_alphabetic()) && c.all(|x| x.is_ascii_digit())
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(x) if x.is_ascii_alphabetic()) && c.all(|x| x.is_ascii_alphanumeric() || x == '_')
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err<T>(&self, at: &str, message: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax { line: self.no, column: self.col(at), message: message.into() })
    }

    /// 1-based column of a subslice of the line.
    fn col(&self, at: &str) -> usize {
        let off = at.as_ptr() as usize - self.text.as_ptr() as usize;
        if off <= self.text.len() {
            self.text[..off].chars().count() + 1
        } else {
            1
        }
    }

    fn unknown<T>(&self, at: &str) -> Result<T, DslError> {
        Err(DslError::UnknownSymbol { line: self.no, column: self.col(at), name: at.to_string() })
    }
}

/// Splits a line into whitespace separated tokens.
fn tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn parse_uint(l: &Line, tok: &str) -> Result<u32, DslError> {
    tok.parse().or_else(|_| l.err(tok, format!("expected a positive integer, found '{tok}'")))
}

/// `name` or `name@k`.
fn parse_gen_name<'a>(l: &Line, tok: &'a str) -> Result<(&'a str, usize), DslError> {
    let (name, class) = match tok.split_once('@') {
        Some((n, k)) => (n, parse_uint(l, k)? as usize),
        None => (tok, 0),
    };
    if !is_name(name) {
        return l.err(tok, format!("'{name}' is not a generator name (a letter followed by digits)"));
    }
    Ok((name, class))
}

fn parse_cycles(l: &Line, s: &str) -> Result<Vec<Vec<u32>>, DslError> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    if rest.is_empty() {
        return l.err(s, "expected cycle notation");
    }
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return l.err(rest, "expected '('");
        }
        let Some(close) = rest.find(')') else { return l.err(rest, "unclosed '('") };
        let inner = &rest[1..close];
        let mut cyc = Vec::new();
        for t in inner.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let x = parse_uint(l, t)?;
            if x == 0 {
                return l.err(t, "points are numbered from 1");
            }
            cyc.push(x);
        }
        if !cyc.is_empty() {
            out.push(cyc);
        }
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

/// One section: `1`, or factors `g`, `g^k`, `g'` separated by spaces.
fn parse_section(l: &Line, s: &str) -> Result<Vec<(String, i64)>, DslError> {
    let s = s.trim();
    if s.is_empty() {
        return l.err(s, "empty section");
    }
    if s == "1" {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for f in s.split_whitespace() {
        let (name, e) = if let Some((n, e)) = f.split_once('^') {
            let exp: i64 = e.parse().or_else(|_| l.err(&f[n.len() + 1..], format!("bad exponent '{e}'")))?;
            (n, exp)
        } else if let Some(n) = f.strip_suffix('\'') {
            (n, -1)
        } else {
            (f, 1)
        };
        if !is_name(name) {
            return l.err(f, format!("bad section entry '{f}'"));
        }
        out.push((name.to_string(), e));
    }
    Ok(out)
}

fn parse_recursive(l: &Line, s: &str) -> Result<Action, DslError> {
    let t = s.trim_start();
    if !t.starts_with('(') {
        return l.err(t, "expected '(' after '='");
    }
    let Some(close) = t.rfind(')') else { return l.err(t, "unclosed '('") };
    let inner = &t[1..close];
    let mut sections = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices().chain([(inner.len(), ',')]) {
        if c == ',' {
            sections.push(parse_section(l, &inner[start..i])?);
            start = i + 1;
        }
    }
    let tail = t[close + 1..].trim();
    let then = match tail {
        "" => None,
        x if is_name(x) => Some(x.to_string()),
        x => return l.err(x, format!("expected a rooted generator name, found '{x}'")),
    };
    Ok(Action::Recursive { sections, then })
}

fn parse_word_at(l: &Line, text: &str, names: &[String]) -> Result<FreeWord, DslError> {
    let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    parse_over(text, &names).or_else(|e| l.err(text, e.to_string()))
}

pub fn parse_group_file(text: &str) -> Result<GroupFile, DslError> {
    let mut file = GroupFile::default();
    let mut section: Option<char> = None; // 'g' or 'p'
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        last_line = i + 1;
        let body = raw.split('#').next().unwrap();
        let l = Line { no: i + 1, text: raw };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first = body.trim_start();
        let (kw, rest) = first.split_once(char::is_whitespace).unwrap_or((first, ""));
        match kw {
            "group" => {
                let t = tokens(rest);
                if t.len() != 1 || !is_ident(t[0]) {
                    return l.err(rest, "expected 'group <name>'");
                }
                file.groups.push(GroupDecl { name: t[0].into(), arity: Arity::Regular(0), lines: vec![] });
                section = Some('g');
            }
            "arity" | "rooted" | "recursive" if section != Some('g') => {
                return l.err(first, format!("'{kw}' outside a group block"));
            }
            "arity" => {
                let g = file.groups.last_mut().unwrap();
                let t = tokens(rest);
                g.arity = match t.as_slice() {
                    [m] => Arity::Regular(parse_uint(&l, m)?),
                    ["seq", ms @ .., "cycle", k] => {
                        let seq = ms.iter().map(|m| parse_uint(&l, m)).collect::<Result<Vec<_>, _>>()?;
                        let cycle = parse_uint(&l, k)? as usize;
                        if cycle == 0 || cycle > seq.len() {
                            return l.err(k, "cycle length must be between 1 and the sequence length");
                        }
                        Arity::Sequence { seq, cycle }
                    }
                    _ => return l.err(rest, "expected 'arity <m>' or 'arity seq <m1> ... cycle <k>'"),
                };
                if let Err(e) = g.arity.shape() {
                    return l.err(rest, e);
                }
            }
            "rooted" | "recursive" => {
                let Some((lhs, rhs)) = rest.split_once('=') else { return l.err(rest, "expected '='") };
                let lhs_t = lhs.trim();
                let (name, class) = parse_gen_name(&l, lhs_t)?;
                let action = if kw == "rooted" { Action::Rooted(parse_cycles(&l, rhs)?) } else { parse_recursive(&l, rhs)? };
                let g = file.groups.last_mut().unwrap();
                if g.lines.iter().any(|x| x.name == name && x.class == class) {
                    return l.err(lhs_t, format!("generator '{name}' defined twice"));
                }
                g.lines.push(GenLine { name: name.into(), class, action, line: l.no });
            }
            "presentation" => {
                let t = tokens(rest);
                match t.as_slice() {
                    [name, "over", over] if is_ident(name) && is_ident(over) => {
                        file.presentations.push(PresentationDecl {
                            name: name.to_string(),
                            over: over.to_string(),
                            symbols: vec![],
                            images: vec![],
                            fixed: vec![],
                            substitutions: vec![],
                            relators: vec![],
                        });
                    }
                    _ => return l.err(rest, "expected 'presentation <name> over <group>'"),
                }
                section = Some('p');
            }
            "symbols" | "image" | "fixed" | "substitution" | "relator" if section != Some('p') => {
                return l.err(first, format!("'{kw}' outside a presentation block"));
            }
            "symbols" => {
                let p = file.presentations.last_mut().unwrap();
                for s in tokens(rest) {
                    if !is_name(s) || p.symbols.iter().any(|x| x == s) {
                        return l.err(s, format!("bad or repeated symbol '{s}'"));
                    }
                    p.symbols.push(s.into());
                }
            }
            "image" => {
                let p = file.presentations.last_mut().unwrap();
                let Some((s, w)) = rest.split_once('=') else { return l.err(rest, "expected 'image <symbol> = <word>'") };
                let s = s.trim();
                if !p.symbols.iter().any(|x| x == s) {
                    return l.unknown(s);
                }
                p.images.push((s.into(), w.trim().into()));
            }
            "fixed" | "relator" => {
                let p = file.presentations.last_mut().unwrap();
                let w = parse_word_at(&l, rest.trim(), &p.symbols)?;
                if kw == "fixed" { p.fixed.push(w) } else { p.relators.push(w) }
            }
            "substitution" => {
                let p = file.presentations.last_mut().unwrap();
                let Some((name, rules)) = rest.split_once(':') else {
                    return l.err(rest, "expected 'substitution <name>: <symbol> -> <word>, ...'");
                };
                let name = name.trim();
                if !is_ident(name) {
                    return l.err(name, "bad substitution name");
                }
                let mut images = Vec::new();
                for rule in rules.split(',') {
                    let Some((s, w)) = rule.split_once("->") else { return l.err(rule, "expected '<symbol> -> <word>'") };
                    let s = s.trim();
                    if !p.symbols.iter().any(|x| x == s) {
                        return l.unknown(s);
                    }
                    images.push((s.to_string(), parse_word_at(&l, w.trim(), &p.symbols)?));
                }
                p.substitutions.push((name.into(), images));
            }
            _ => return l.unknown(kw),
        }
    }
    if file.groups.is_empty() && file.presentations.is_empty() {
        return Err(DslError::Syntax { line: last_line.max(1), column: 1, message: "no group or presentation declared".into() });
    }
    for g in &file.groups {
        g.check()?;
    }
    Ok(file)
}

impl GroupDecl {
    fn shape(&self) -> Result<TreeShape, DslError> {
        self.arity.shape().map_err(|e| DslError::Syntax { line: 0, column: 0, message: e })
    }

    fn generators(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for l in &self.lines {
            if !out.contains(&l.name) {
                out.push(l.name.clone());
            }
        }
        out
    }

    /// Arities, unknown symbols and rooted references.
    fn check(&self) -> Result<(), DslError> {
        if self.arity == Arity::Regular(0) {
            return Err(DslError::Syntax { line: 0, column: 0, message: format!("group '{}' has no arity line", self.name) });
        }
        if self.lines.is_empty() {
            return Err(DslError::Syntax { line: 0, column: 0, message: format!("group '{}' has no generators", self.name) });
        }
        let shape = self.shape()?;
        let nclass = RecursiveSpec::class_count(&shape);
        let gens = self.generators();
        for l in &self.lines {
            let lerr = |message: String| DslError::Syntax { line: l.line, column: 1, message };
            if l.class >= nclass {
                return Err(lerr(format!("class {} out of range (the tree has {nclass})", l.class)));
            }
            let m = shape.arity(l.class);
            match &l.action {
                Action::Rooted(cycles) => {
                    if Perm::from_cycles(m, &to_zero_based(cycles)).is_none() {
                        return Err(lerr(format!("not a permutation of 1..{m}")));
                    }
                }
                Action::Recursive { sections, then } => {
                    if sections.len() != m {
                        return Err(DslError::ArityMismatch { line: l.line, expected: m, found: sections.len() });
                    }
                    for (name, _) in sections.iter().flatten() {
                        if !gens.contains(name) {
                            return Err(DslError::UnknownSymbol { line: l.line, column: 1, name: name.clone() });
                        }
                    }
                    if let Some(r) = then {
                        let ok = self
                            .lines
                            .iter()
                            .any(|x| &x.name == r && x.class == l.class && matches!(x.action, Action::Rooted(_)));
                        if !ok {
                            return Err(DslError::UnknownSymbol { line: l.line, column: 1, name: r.clone() });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<RecursiveSpec, DslError> {
        self.check()?;
        let shape = self.shape()?;
        let nclass = RecursiveSpec::class_count(&shape);
        let gens = self.generators();
        let mut classes: Vec<Vec<Option<GenSpec>>> = vec![vec![None; gens.len()]; nclass];
        let rooted_perm = |name: &str, class: usize| -> Perm {
            self.lines
                .iter()
                .find_map(|x| match &x.action {
                    Action::Rooted(c) if x.name == name && x.class == class => {
                        Perm::from_cycles(shape.arity(class), &to_zero_based(c))
                    }
                    _ => None,
                })
                .expect("checked")
        };
        for l in &self.lines {
            let gi = gens.iter().position(|g| g == &l.name).unwrap();
            let m = shape.arity(l.class);
            let spec = match &l.action {
                Action::Rooted(_) => GenSpec { perm: rooted_perm(&l.name, l.class), sections: vec![vec![]; m] },
                Action::Recursive { sections, then } => GenSpec {
                    perm: then.as_ref().map_or_else(|| Perm::identity(m), |r| rooted_perm(r, l.class)),
                    sections: sections
                        .iter()
                        .map(|s| s.iter().map(|(n, e)| (gens.iter().position(|g| g == n).unwrap(), *e)).collect())
                        .collect(),
                },
            };
            classes[l.class][gi] = Some(spec);
        }
        Ok(RecursiveSpec { name: self.name.clone(), shape, generators: gens, classes })
    }

    pub fn build(&self) -> Result<GroupDefinition, DslError> {
        Ok(self.spec()?.build()?)
    }
}

fn to_zero_based(cycles: &[Vec<u32>]) -> Vec<Vec<u32>> {
    cycles.iter().map(|c| c.iter().map(|x| x - 1).collect()).collect()
}

impl GroupFile {
    /// The group declared under `name`, or the builtin of that name.
    pub fn group(&self, name: &str) -> Result<Arc<GroupDefinition>, DslError> {
        match self.groups.iter().find(|g| g.name == name) {
            Some(g) => Ok(Arc::new(g.build()?)),
            None => Ok(builtin(name)?),
        }
    }

    pub fn presentation(&self, p: &PresentationDecl) -> EndomorphicPresentation {
        let n = p.symbols.len();
        let images = p
            .symbols
            .iter()
            .map(|s| p.images.iter().find(|(x, _)| x == s).map_or_else(|| s.clone(), |(_, w)| w.clone()))
            .collect();
        let substitutions = p
            .substitutions
            .iter()
            .map(|(name, rules)| {
                let mut imgs: Vec<FreeWord> = (0..n as u32).map(|i| vec![Sym::new(i)]).collect();
                for (s, w) in rules {
                    imgs[p.symbols.iter().position(|x| x == s).unwrap()] = w.clone();
                }
                Substitution { name: name.clone(), images: imgs }
            })
            .collect();
        EndomorphicPresentation {
            name: p.name.clone(),
            alphabet: p.symbols.clone(),
            fixed: p.fixed.clone(),
            substitutions,
            iterated: p.relators.clone(),
            group: p.over.clone(),
            images,
        }
    }
}

/// The first group of a definition file.
pub fn load_group(text: &str) -> Result<GroupDefinition, DslError> {
    let file = parse_group_file(text)?;
    let g = file.groups.first().ok_or(DslError::Syntax { line: 1, column: 1, message: "no group declared".into() })?;
    g.build()
}

fn fmt_cycles(cycles: &[Vec<u32>]) -> String {
    if cycles.is_empty() {
        return "()".into();
    }
    cycles.iter().map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))).collect()
}

impl fmt::Display for GroupFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.groups {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "group {}", g.name)?;
            match &g.arity {
                Arity::Regular(m) => writeln!(f, "arity {m}")?,
                Arity::Sequence { seq, cycle } => {
                    let s: Vec<String> = seq.iter().map(|m| m.to_string()).collect();
                    writeln!(f, "arity seq {} cycle {cycle}", s.join(" "))?
                }
            }
            for l in &g.lines {
                let name = if l.class == 0 { l.name.clone() } else { format!("{}@{}", l.name, l.class) };
                match &l.action {
                    Action::Rooted(c) => writeln!(f, "rooted {name} = {}", fmt_cycles(c))?,
                    Action::Recursive { sections, then } => {
                        let secs: Vec<String> = sections
                            .iter()
                            .map(|s| {
                                if s.is_empty() {
                                    return "1".to_string();
                                }
                                let fs: Vec<String> = s
                                    .iter()
                                    .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                                    .collect();
                                fs.join(" ")
                            })
                            .collect();
                        write!(f, "recursive {name} = ({})", secs.join(", "))?;
                        match then {
                            Some(r) => writeln!(f, " {r}")?,
                            None => writeln!(f)?,
                        }
                    }
                }
            }
        }
        for p in &self.presentations {
            if !first {
                writeln!(f)?;
            }
            first = false;
            let names: Vec<&str> = p.symbols.iter().map(|s| s.as_str()).collect();
            writeln!(f, "presentation {} over {}", p.name, p.over)?;
            writeln!(f, "symbols {}", p.symbols.join(" "))?;
            for (s, w) in &p.images {
                writeln!(f, "image {s} = {w}")?;
            }
            for w in &p.fixed {
                writeln!(f, "fixed {}", format_free(w, &names))?;
            }
            for (name, rules) in &p.substitutions {
                let r: Vec<String> = rules.iter().map(|(s, w)| format!("{s} -> {}", format_free(w, &names))).collect();
                writeln!(f, "substitution {name}: {}", r.join(", "))?;
            }
            for w in &p.relators {
                writeln!(f, "relator {}", format_free(w, &names))?;
            }
        }
        Ok(())
    }
}
