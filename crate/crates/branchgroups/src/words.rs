//! Free words over a symbolic alphabet and the ASCII word syntax.
//!
//! Syntax: juxtaposition multiplies; `x^n` and `x^-n` are powers; `x'` is the
//! inverse; `x^y` with a non-numeric exponent is the conjugate `y^-1 x y`;
//! `[x,y]` is the commutator `x^-1 y^-1 x y` (left-normed for more entries);
//! `1` is the empty word. Names are one ASCII letter optionally followed by
//! digits, so `ab` is two symbols and `a12` one.

use std::fmt;

/// A letter of a free word: symbol index and inversion flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Sym {
    pub id: u32,
    pub inv: bool,
}

impl Sym {
    pub fn new(id: u32) -> Sym {
        Sym { id, inv: false }
    }

    pub fn inverse(self) -> Sym {
        Sym { id: self.id, inv: !self.inv }
    }
}

pub type FreeWord = Vec<Sym>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{msg} at column {col}")]
pub struct WordParseError {
    /// 1-based column of the offending character.
    pub col: usize,
    pub msg: String,
}

pub fn invert(w: &[Sym]) -> FreeWord {
    w.iter().rev().map(|s| s.inverse()).collect()
}

pub fn free_reduce(w: &[Sym]) -> FreeWord {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &s in w {
        if out.last() == Some(&s.inverse()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

pub fn power(w: &[Sym], e: i64) -> FreeWord {
    let base = if e < 0 { invert(w) } else { w.to_vec() };
    let n = e.unsigned_abs() as usize;
    let mut out = Vec::with_capacity(base.len() * n);
    for _ in 0..n {
        out.extend_from_slice(&base);
    }
    out
}

/// `y^-1 x y`.
pub fn conjugate(x: &[Sym], y: &[Sym]) -> FreeWord {
    let mut out = invert(y);
    out.extend_from_slice(x);
    out.extend_from_slice(y);
    out
}

/// `x^-1 y^-1 x y`.
pub fn commutator(x: &[Sym], y: &[Sym]) -> FreeWord {
    let mut out = invert(x);
    out.extend(invert(y));
    out.extend_from_slice(x);
    out.extend_from_slice(y);
    out
}

/// Applies a substitution `id -> word` letter by letter; inverses map to
/// inverted images.
pub fn substitute(w: &[Sym], image: &dyn Fn(u32) -> FreeWord) -> FreeWord {
    let mut out = Vec::new();
    for s in w {
        let img = image(s.id);
        if s.inv {
            out.extend(invert(&img));
        } else {
            out.extend(img);
        }
    }
    out
}

/// Maximal-length cap on parsed words; powers beyond it are rejected rather
/// than allocated.
pub const MAX_PARSED_LEN: usize = 1 << 24;

struct Parser<'a, 'r> {
    chars: Vec<char>,
    pos: usize,
    resolve: &'r mut dyn FnMut(&str) -> Option<FreeWord>,
    _src: &'a str,
}

impl Parser<'_, '_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordParseError> {
        Err(WordParseError { col: self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<FreeWord, WordParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c == ')' || c == ']' || c == ',' {
                break;
            }
            let t = self.term()?;
            out.extend(t);
            if out.len() > MAX_PARSED_LEN {
                return self.err("word too long");
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<FreeWord, WordParseError> {
        let mut w = self.atom()?;
        loop {
            match self.peek() {
                Some('\'') => {
                    self.pos += 1;
                    w = invert(&w);
                }
                Some('^') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) if c == '-' || c.is_ascii_digit() => {
                            let e = self.int()?;
                            if (w.len() as u128) * (e.unsigned_abs() as u128) > MAX_PARSED_LEN as u128 {
                                return self.err("power too large");
                            }
                            w = power(&w, e);
                        }
                        Some(_) => {
                            let y = self.atom()?;
                            w = conjugate(&w, &y);
                        }
                        None => return self.err("missing exponent"),
                    }
                }
                _ => return Ok(w),
            }
        }
    }

    fn int(&mut self) -> Result<i64, WordParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err("expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn atom(&mut self) -> Result<FreeWord, WordParseError> {
        match self.peek() {
            None => self.err("unexpected end of word"),
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let mut acc = self.word()?;
                let mut parts = 1;
                while self.peek() == Some(',') {
                    self.pos += 1;
                    let y = self.word()?;
                    acc = commutator(&acc, &y);
                    parts += 1;
                }
                if self.peek() != Some(']') {
                    return self.err("expected ']'");
                }
                if parts < 2 {
                    return self.err("commutator needs at least two entries");
                }
                self.pos += 1;
                Ok(acc)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match (self.resolve)(&name) {
                    Some(w) => Ok(w),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown symbol '{name}'"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
        }
    }
}

/// Parses a word; `resolve` maps each name to its (possibly composite) value.
pub fn parse_word(text: &str, resolve: &mut dyn FnMut(&str) -> Option<FreeWord>) -> Result<FreeWord, WordParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, resolve, _src: text };
    let w = p.word()?;
    if p.peek().is_some() {
        return p.err(format!("unexpected '{}'", p.chars[p.pos]));
    }
    Ok(w)
}

/// Parses over a fixed list of single-symbol names.
pub fn parse_over(text: &str, names: &[&str]) -> Result<FreeWord, WordParseError> {
    parse_word(text, &mut |n| names.iter().position(|m| *m == n).map(|i| vec![Sym::new(i as u32)]))
}

/// Formats a free word with run-length powers, e.g. `a^2 b^-1`.
pub fn format_free(w: &[Sym], names: &[&str]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let run = (j - i) as i64;
        out.push_str(names[w[i].id as usize]);
        let e = if w[i].inv { -run } else { run };
        if e != 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
        i = j;
    }
    out
}

/// Display adaptor for free words over named symbols.
pub struct Named<'a>(pub &'a [Sym], pub &'a [&'a str]);

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_free(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: [&str; 4] = ["a", "b", "c", "d"];

    fn p(s: &str) -> FreeWord {
        parse_over(s, &N).unwrap()
    }

    #[test]
    fn powers_and_inverses() {
        assert_eq!(p("(ad)^2"), p("adad"));
        assert_eq!(p("a^-1"), p("a'"));
        assert_eq!(free_reduce(&p("ab b'a'")), vec![]);
        assert_eq!(p("1"), vec![]);
        assert_eq!(p(""), vec![]);
    }

    #[test]
    fn conjugates_and_commutators() {
        assert_eq!(p("d^a"), p("a'da"));
        assert_eq!(p("[d,d^a]"), p("d' (a'da)' d a'da"));
        assert_eq!(p("[a,b,c]"), p("[[a,b],c]"));
        assert_eq!(p("d^(ac)"), p("c'a' d ac"));
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_over("ab x", &N).unwrap_err();
        assert_eq!(e.col, 4);
        assert!(parse_over("(ab", &N).is_err());
        assert!(parse_over("a^", &N).is_err());
        assert!(parse_over("[a]", &N).is_err());
    }

    #[test]
    fn formatting_collapses_runs() {
        assert_eq!(format_free(&p("aab'b'c"), &N), "a^2b^-2c");
        assert_eq!(p(&format_free(&p("aab'b'c"), &N)), p("aab'b'c"));
        assert_eq!(format_free(&[], &N), "1");
    }
}
