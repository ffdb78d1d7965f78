use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SchreierError;
use crate::group::GroupDefinition;

/// Matrix size cap for the dense eigensolver.
pub const SPECTRUM_CAP: usize = 2187;

/// `Delta_n` as a row-major matrix: the sum of the level permutation
/// matrices of the generators, and of their inverses for generators that
/// are not involutions in the group.
pub fn laplacian(g: &GroupDefinition, n: usize) -> Result<(Vec<f64>, usize), SchreierError> {
    let size = g.shape().level_size(n);
    if size > SPECTRUM_CAP {
        return Err(SchreierError::ResourceExceeded { what: "spectrum matrix size", cap: SPECTRUM_CAP });
    }
    let mut m = vec![0.0; size * size];
    for (_, s) in g.generator_states() {
        let involution = s.compose(s).map_err(crate::group::GroupError::from)?.is_identity();
        let p = s.level_perm(n);
        for v in 0..size {
            let w = p.apply(v);
            m[v * size + w] += 1.0;
            if !involution {
                m[w * size + v] += 1.0;
            }
        }
    }
    Ok((m, size))
}

/// Reference description of the spectrum at a level.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// The complete list of eigenvalues, with multiplicity.
    Exact(Vec<f64>),
    /// A finite set every eigenvalue should be close to.
    Points(Vec<f64>),
    /// Closed intervals containing every eigenvalue.
    Intervals(Vec<(f64, f64)>),
}

impl ClosedForm {
    /// Largest distance from an eigenvalue to the reference; for `Exact`
    /// the sorted lists are compared entrywise.
    pub fn deviation(&self, eig: &[f64]) -> f64 {
        match self {
            ClosedForm::Exact(r) => {
                if r.len() != eig.len() {
                    return f64::INFINITY;
                }
                let mut r = r.clone();
                r.sort_by(|x, y| x.partial_cmp(y).unwrap());
                r.iter().zip(eig).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            _ => eig.iter().map(|&x| self.distance(x)).fold(0.0, f64::max),
        }
    }

    pub fn distance(&self, x: f64) -> f64 {
        match self {
            ClosedForm::Exact(r) | ClosedForm::Points(r) => r.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min),
            ClosedForm::Intervals(iv) => iv
                .iter()
                .map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// `+-sqrt(lambda +- sqrt(lambda +- ... sqrt(lambda)))` with `depth`
/// radicals; branches with a negative radicand are dropped.
pub fn julia_set_approx(lambda: f64, depth: usize) -> Vec<f64> {
    julia_preimages(lambda, 0.0, depth)
}

/// The same nested radicals with `seed` in the innermost position, i.e. the
/// real preimages of `seed` under `depth` iterations of `z^2 - lambda`.
pub fn julia_preimages(lambda: f64, seed: f64, depth: usize) -> Vec<f64> {
    let mut cur: Vec<f64> = vec![seed];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &z in &cur {
            let r = lambda + z;
            if r >= 0.0 {
                next.push(r.sqrt());
                next.push(-r.sqrt());
            }
        }
        cur = next;
    }
    if depth == 0 {
        return Vec::new();
    }
    cur.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cur.dedup();
    cur
}

fn union_of_depths(lambda: f64, seed: f64, n: usize) -> Vec<f64> {
    let mut out = vec![seed];
    for k in 1..=n {
        out.extend(julia_preimages(lambda, seed, k));
    }
    out
}

/// Closed forms known for `Gg` (exact), `FGg`, `BGg`, `GSg` (points near
/// which eigenvalues lie) and `Sg` (an interval).
pub fn closed_form(group: &str, n: usize) -> Option<ClosedForm> {
    match group {
        "Gg" => {
            let mut v = Vec::new();
            let q = 1usize << n;
            for j in 0..=q / 2 {
                let c = (2.0 * std::f64::consts::PI * j as f64 / q as f64).cos();
                let r = (5.0 - 4.0 * c).sqrt();
                for x in [1.0 + r, 1.0 - r] {
                    if (x - 0.0).abs() > 1e-12 && (x + 2.0).abs() > 1e-12 {
                        v.push(x);
                    }
                }
            }
            Some(ClosedForm::Exact(v))
        }
        "FGg" => {
            let mut v = vec![4.0, 1.0];
            v.extend(union_of_depths(6.0, 0.0, n).into_iter().map(|z| 1.0 + z));
            Some(ClosedForm::Points(v))
        }
        "BGg" | "GSg" => {
            let mut v = vec![4.0, -2.0, 1.0];
            // seeded at the fixed point 9/4 of z^2 - 45/16
            for z in union_of_depths(45.0 / 16.0, 9.0 / 4.0, n) {
                for y in [4.5 + 2.0 * z, 4.5 - 2.0 * z] {
                    if y >= 0.0 {
                        v.push(1.0 + y.sqrt());
                        v.push(1.0 - y.sqrt());
                    }
                }
            }
            Some(ClosedForm::Points(v))
        }
        "Sg" => Some(ClosedForm::Intervals(vec![(0.0, 4.0)])),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub group: String,
    pub level: usize,
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    pub reference: Option<ClosedForm>,
    pub max_deviation: Option<f64>,
}

impl SpectralReport {
    /// Eigenvalues grouped within `tol`, as `(value, multiplicity)`.
    pub fn with_multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &x in &self.eigenvalues {
            match out.last_mut() {
                Some((y, k)) if (x - *y).abs() <= tol => *k += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

pub fn spectrum(g: &GroupDefinition, n: usize) -> Result<SpectralReport, SchreierError> {
    let (m, size) = laplacian(g, n)?;
    let eigenvalues = super::symmetric_eigenvalues(m, size);
    let reference = closed_form(g.name(), n);
    let max_deviation = reference.as_ref().map(|r| r.deviation(&eigenvalues));
    Ok(SpectralReport { group: g.name().to_string(), level: n, eigenvalues, reference, max_deviation })
}

/// CSV with columns `level,index,eigenvalue,closed_form_match`; the match
/// column is empty when no closed form is known.
pub fn spectra_csv(reports: &[SpectralReport], tol: f64) -> String {
    let mut out = String::from("level,index,eigenvalue,closed_form_match\n");
    for r in reports {
        let exact = match &r.reference {
            Some(ClosedForm::Exact(v)) if v.len() == r.eigenvalues.len() => {
                let mut v = v.clone();
                v.sort_by(|x, y| x.partial_cmp(y).unwrap());
                Some(v)
            }
            _ => None,
        };
        for (i, &x) in r.eigenvalues.iter().enumerate() {
            let m = match (&exact, &r.reference) {
                (Some(v), _) => ((v[i] - x).abs() < tol).to_string(),
                (None, Some(c)) => (c.distance(x) < tol).to_string(),
                (None, None) => String::new(),
            };
            let x = if x.abs() < 5e-13 { 0.0 } else { x };
            let _ = writeln!(out, "{},{},{:.12},{}", r.level, i, x, m);
        }
    }
    out
}

/// `Phi_0, ..., Phi_n`.
pub fn phi_values(n: usize, lambda: f64, mu: f64) -> Vec<f64> {
    let l = BigRational::from_float(lambda).expect("finite");
    let m = BigRational::from_float(mu).expect("finite");
    phi_exact(n, &l, &m).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn phi_exact(n: usize, l: &BigRational, m: &BigRational) -> Vec<BigRational> {
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    let mut out = vec![&two - m - l];
    if n >= 1 {
        out.push(&two - m + l);
    }
    if n >= 2 {
        out.push(m * m - &four - l * l);
    }
    for k in 3..=n {
        let prev = out[k - 1].clone();
        let t = num_traits::pow(&two * l, 1usize << (k - 2));
        out.push(&prev * &prev - &two * t);
    }
    out
}

/// `Q_n(lambda, mu) = Delta_n - (lambda+1) a_n - (mu+1)` for `Gg`, with
/// `lambda, mu` taken exactly.
pub fn q_matrix(n: usize, lambda: &BigRational, mu: &BigRational) -> Result<Vec<Vec<BigRational>>, SchreierError> {
    let g = crate::group::builtin("Gg")?;
    let (delta, size) = laplacian(&g, n)?;
    let a = g.letter(0, 0).state.level_perm(n);
    let one = BigRational::one();
    let mut q = vec![vec![BigRational::zero(); size]; size];
    for i in 0..size {
        for j in 0..size {
            q[i][j] = BigRational::from_integer(BigInt::from(delta[i * size + j] as i64));
        }
        q[i][a.apply(i)] -= lambda + &one;
        q[i][i] -= mu + &one;
    }
    Ok(q)
}

/// Determinant by Gaussian elimination over the rationals.
pub fn determinant_exact(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// `|det Q_n(lambda, mu) - Phi_0 ... Phi_n|` for `Gg`, computed exactly
/// from the binary values of `lambda` and `mu`.
pub fn phi_check(n: usize, lambda: f64, mu: f64) -> Result<f64, SchreierError> {
    let l = BigRational::from_float(lambda).ok_or_else(|| SchreierError::Invalid("lambda not finite".into()))?;
    let m = BigRational::from_float(mu).ok_or_else(|| SchreierError::Invalid("mu not finite".into()))?;
    let det = determinant_exact(q_matrix(n, &l, &m)?);
    let prod = phi_exact(n, &l, &m).into_iter().fold(BigRational::one(), |a, b| a * b);
    Ok((det - prod).abs().to_f64().unwrap_or(f64::INFINITY))
}
