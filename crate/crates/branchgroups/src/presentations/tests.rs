use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::decision::equal;
use crate::words::{invert, parse_over};

fn words(p: &EndomorphicPresentation, texts: &[&str]) -> Vec<FreeWord> {
    texts.iter().map(|t| free_reduce(&p.parse_word(t).unwrap())).collect()
}

#[test]
fn gg_depth_zero() {
    let p = builtin_presentation("Gg").unwrap();
    assert!(p.is_ascending());
    assert_eq!(p.expand(0), words(&p, &["a^2", "[d,d^a]", "[d^(ac),(d^(ac))^a]"]));
}

#[test]
fn empty_iterated_gives_fixed_only() {
    let p = EndomorphicPresentation::from_text("q", "Gg", &["a", "d"], &["a", "d"], &["a^2", "d^2"], &[("phi", &[("a", "ad")])], &[])
        .unwrap();
    assert!(!p.is_ascending());
    for d in 0..3 {
        assert_eq!(p.expand(d), words(&p, &["a^2", "d^2"]));
    }
}

#[test]
fn lysionok_depth_two() {
    let p = builtin_presentation("Lysionok").unwrap();
    let phi = &p.substitutions[0];
    let mut want = Vec::new();
    let mut cur = words(&p, &["a^2", "(ad)^4", "(adacac)^4"]);
    for _ in 0..=2 {
        for w in &cur {
            if !want.contains(w) {
                want.push(w.clone());
            }
        }
        cur = cur.iter().map(|w| phi.apply(w)).collect();
    }
    assert_eq!(p.expand(2), want);
    assert_eq!(p.format(&phi.apply(&words(&p, &["a"])[0])), "aca");
}

#[test]
fn gg_presentations_verify_to_depth_six() {
    for name in ["Lysionok", "Gg"] {
        let r = builtin_presentation(name).unwrap().verify(6).unwrap();
        assert!(r.ok(), "{name}: {:?}", r.first_failure);
        assert_eq!(r.checked, 21);
    }
}

#[test]
fn sg_and_bsv_verify_to_depth_four() {
    for name in ["Sg", "BSV"] {
        let r = builtin_presentation(name).unwrap().verify(4).unwrap();
        assert!(r.ok(), "{name}: {:?}", r.first_failure);
    }
}

#[test]
fn fgg_single_substitutions() {
    // each substitution alone keeps the relators trivial
    let base = builtin_presentation("FGg").unwrap();
    for i in 0..3 {
        let mut p = base.clone();
        p.substitutions = vec![base.substitutions[i].clone()];
        assert!(p.verify(4).unwrap().ok(), "{}", base.substitutions[i].name);
    }
    assert!(base.verify(1).unwrap().ok());
}

#[test]
fn gupta_sidki_relators() {
    let p = builtin_presentation("GSg").unwrap();
    let (g, imgs) = p.realise().unwrap();
    for t in ["a^3", "t^3", "u' t^a", "v' t^(a')", "(tuv)^3", "[v,t][vt,u' t v' u]"] {
        let w = to_group_word(&g, &imgs, &p.parse_word(t).unwrap());
        assert!(is_trivial(&g, &w).unwrap(), "{t}");
    }
    // chi is induced by an automorphism
    let chi = &p.substitutions[1];
    for t in ["(tuv)^3", "[v,t][vt,u' t v' u]"] {
        let w = chi.apply(&p.parse_word(t).unwrap());
        assert!(is_trivial(&g, &to_group_word(&g, &imgs, &w)).unwrap(), "chi {t}");
    }
}

#[test]
fn expansion_is_monotone() {
    for name in PRESENTATION_NAMES {
        let p = builtin_presentation(name).unwrap();
        let mut prev = p.expand(0);
        for d in 1..=4 {
            let next = p.expand(d);
            assert_eq!(&next[..prev.len()], &prev[..], "{name} depth {d}");
            prev = next;
        }
    }
}

#[test]
fn composition_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in PRESENTATION_NAMES {
        let p = builtin_presentation(name).unwrap();
        let s = &p.substitutions;
        for _ in 0..10 {
            let (x, y, z) = (&s[rng.gen_range(0..s.len())], &s[rng.gen_range(0..s.len())], &s[rng.gen_range(0..s.len())]);
            let w: FreeWord = (0..8).map(|_| Sym { id: rng.gen_range(0..p.alphabet.len() as u32), inv: rng.gen() }).collect();
            let left = x.then(y).then(z);
            let right = x.then(&y.then(z));
            assert_eq!(left.images, right.images);
            assert_eq!(left.apply(&w), z.apply(&y.apply(&x.apply(&w))));
        }
    }
}

#[test]
fn mutations_are_detected() {
    for name in PRESENTATION_NAMES {
        let m = builtin_presentation(name).unwrap().mutation_control(2, 64).unwrap();
        assert!(m.mutants > 0);
        assert!(m.rate() >= 0.95, "{name}: {m:?}");
    }
}

#[test]
fn hnn_relators() {
    let r = hnn_presentation_relators();
    assert_eq!(r.len(), 6);
    let names = ["a", "c", "d", "t"];
    let p = builtin_presentation("Gg").unwrap();
    // t-free relators are the iterated relators of the ascending presentation
    for (w, v) in r[..3].iter().zip(p.expand(0)) {
        let w: FreeWord = free_reduce(w);
        assert_eq!(format_free(&w, &names), p.format(&v));
    }
    // x^t y with t-conjugation read as phi says phi(x) = y^-1 in Gg
    let (g, imgs) = p.realise().unwrap();
    let phi = &p.substitutions[0];
    for w in &r[3..] {
        assert_eq!((w[0], w[2]), (Sym { id: 3, inv: true }, Sym::new(3)));
        let x = phi.apply(&w[1..2]);
        let y: FreeWord = w[3..].to_vec();
        let lhs = to_group_word(&g, &imgs, &x);
        let rhs = to_group_word(&g, &imgs, &invert(&y));
        assert!(equal(&g, &lhs, &rhs).unwrap());
    }
    assert_eq!(r[5], parse_over("t'dtc", &names).unwrap());
}

#[test]
fn errors() {
    assert!(builtin_presentation("nope").is_err());
    let e = EndomorphicPresentation::from_text("x", "Gg", &["a"], &["a"], &[], &[("phi", &[("z", "a")])], &["a^2"]);
    assert!(matches!(e, Err(PresentationError::Alphabet(_))));
    let p = EndomorphicPresentation::from_text("x", "Gg", &["a", "e"], &["a", "e"], &[], &[], &["a^2"]).unwrap();
    assert!(matches!(p.verify(0), Err(PresentationError::Alphabet(_))));
}
