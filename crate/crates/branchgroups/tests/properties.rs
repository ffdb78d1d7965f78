use std::sync::Arc;

use branchgroups::decision::{eta_weights, is_trivial, level_sections, word_for_level_perm};
use branchgroups::group::{builtin, GroupDefinition, Letter, Word};
use branchgroups::tree::{TreeAutomorphism, Vertex};
use proptest::prelude::*;

const CASES: u32 = 1000;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

fn gg() -> Arc<GroupDefinition> {
    builtin("Gg").unwrap()
}

/// Reduced word built from indices into the class-0 letters.
fn word(g: &GroupDefinition, raw: &[usize]) -> Word {
    let k = g.letters().len();
    g.reduce(&Word(raw.iter().map(|&i| (i % k) as Letter).collect()))
}

fn raw_word(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..max)
}

fn vertex(depth: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..64, depth)
}

/// Fit a vertex to the tree of `g` by reducing each letter mod the arity.
fn fit(g: &GroupDefinition, v: &[u32]) -> Vertex {
    let shape = g.shape();
    Vertex(v.iter().enumerate().map(|(i, &y)| y % shape.arity(i) as u32).collect())
}

/// Element of `Stab(L_n)`: `w` followed by a word undoing its level-`n` action.
fn stabilised(g: &GroupDefinition, w: &Word, n: usize) -> Word {
    let p = g.element(w).level_perm(n);
    let u = word_for_level_perm(g, n, &p.inverse(), 32).expect("level quotient is small");
    g.reduce(&Word([w.0.clone(), u.0].concat()))
}

fn canonical_depth(g: &GroupDefinition, w: &Word) -> usize {
    // Gg is self-similar on a single class, so one profile set serves all levels
    let profile: Vec<TreeAutomorphism> = g.letters().iter().map(|l| l.state).collect();
    let stop = |f: TreeAutomorphism, _: usize| profile.contains(&f);
    g.element(w).portrait_with_profile(&stop, 1 << 20).unwrap().depth()
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn section_contraction(which in 0usize..5, raw in raw_word(80)) {
        let g = builtin(["Gg", "FGg", "BGg", "GSg", "Sg"][which]).unwrap();
        let f = word(&g, &raw);
        let (_, secs) = g.decompose(&f);
        for s in secs {
            prop_assert!(2 * s.len() <= f.len() + 1, "{}: |{}| vs |{}|", g.name(), s.len(), f.len());
        }
    }

    #[test]
    fn shortening_three_quarters(raw in raw_word(120)) {
        let g = gg();
        let f = stabilised(&g, &word(&g, &raw), 3);
        let total: usize = level_sections(&g, &f, 3).iter().map(|s| s.len()).sum();
        // |L_3(F)| <= 3/4 |F| + 2^3
        prop_assert!(4 * total <= 3 * f.len() + 32, "{} vs {}", total, f.len());
    }

    #[test]
    fn shortening_two_thirds(raw in raw_word(120)) {
        let g = gg();
        let f = stabilised(&g, &word(&g, &raw), 3);
        let total: usize = level_sections(&g, &f, 3).iter().map(|s| s.len()).sum();
        // |L_3(F)| < 2/3 |F| + 3 * 2^3
        prop_assert!(3 * total < 2 * f.len() + 72, "{} vs {}", total, f.len());
    }

    #[test]
    fn eta_shortening(raw in raw_word(100)) {
        let g = gg();
        let eta = eta_weights(3).unwrap();
        let weights = eta.letter_weights(&g).unwrap();
        let f = word(&g, &raw);
        let lhs: f64 = level_sections(&g, &f, 1).iter().map(|s| eta.weight(&weights, s)).sum();
        let rhs = eta.eta * (eta.weight(&weights, &f) + eta.tau[0]);
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }

    #[test]
    fn canonical_portrait_depth(raw in raw_word(64)) {
        let g = gg();
        let w = word(&g, &raw);
        prop_assume!(!w.is_empty());
        let d = canonical_depth(&g, &w);
        prop_assert!(d <= ceil_log2(w.len()) + 1, "depth {} for length {}", d, w.len());
    }

    #[test]
    fn right_action_and_section_laws(which in 0usize..5, x in raw_word(24), y in raw_word(24), v in vertex(6)) {
        let g = builtin(["Gg", "FGg", "GSg", "BSV", "Sg"][which]).unwrap();
        let (u, w) = (word(&g, &x), word(&g, &y));
        let (f, h) = (g.element(&u), g.element(&w));
        let fh = f.compose(h).unwrap();
        prop_assert_eq!(fh, g.element(&g.mul(&u, &w)));
        let v = fit(&g, &v);
        for k in 0..=v.len() {
            let p = v.prefix(k);
            // v^(fh) = (v^f)^h
            prop_assert_eq!(fh.act(&p).unwrap(), h.act(&f.act(&p).unwrap()).unwrap());
            // (fh)_p = f_p h_(p^f)
            let rhs = f.section(&p).unwrap().compose(h.section(&f.act(&p).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(fh.section(&p).unwrap(), rhs);
        }
        prop_assert_eq!(g.act_word(&u, &v.0), f.act(&v).unwrap().0);
    }

    #[test]
    fn reduce_confluence(which in 0usize..6, x in raw_word(40), y in raw_word(40)) {
        let g = builtin(["Gg", "FGg", "GSg", "BSV", "Sg", "Dinf"][which]).unwrap();
        let k = g.letters().len();
        let raw = |r: &[usize]| Word(r.iter().map(|&i| (i % k) as Letter).collect());
        let (a, b) = (raw(&x), raw(&y));
        let ab = Word([a.0.clone(), b.0.clone()].concat());
        let whole = g.reduce(&ab);
        prop_assert_eq!(&g.reduce(&whole), &whole);
        prop_assert_eq!(&g.reduce(&Word([g.reduce(&a).0, g.reduce(&b).0].concat())), &whole);
        prop_assert_eq!(g.element(&ab), g.element(&whole));
    }
}

#[test]
fn soundness_against_level_actions() {
    use rand::{Rng, SeedableRng};
    let g = gg();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(214);
    let k = g.letters().len();
    let (mut trivial, mut checked) = (0, 0);
    while checked < 1000 {
        let len = rng.gen_range(1..=12);
        let w = g.reduce(&Word((0..len).map(|_| rng.gen_range(0..k) as Letter).collect()));
        if w.is_empty() {
            continue;
        }
        checked += 1;
        let t = is_trivial(&g, &w).unwrap();
        let e = g.element(&w);
        if t {
            trivial += 1;
            for n in 0..=6 {
                assert!(e.level_perm(n).is_identity(), "{}", g.format(&w));
            }
        }
        // leaves of the canonical portrait are generators, each moving level 3 below it
        let depth = ceil_log2(w.len()) + 1 + 3;
        if e.level_perm(depth).is_identity() {
            assert!(t, "{} acts trivially on level {depth}", g.format(&w));
        }
    }
    assert!(trivial < checked);
}

#[test]
fn commensurate_with_documented_extremes() {
    // (abadac)^4k reaches two thirds on level 3
    let g = gg();
    for k in 1..=3 {
        let f = g.parse(&format!("(abadac)^{}", 4 * k)).unwrap();
        assert!(g.element(&f).level_perm(3).is_identity());
        let total: usize = level_sections(&g, &f, 3).iter().map(|s| s.len()).sum();
        assert_eq!((f.len(), total), (24 * k, 16 * k));
    }
}
