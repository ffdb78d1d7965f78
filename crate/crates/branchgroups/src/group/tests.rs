use super::*;
use crate::tree::Vertex;

fn w(g: &GroupDefinition, s: &str) -> Word {
    g.parse(s).unwrap()
}

fn state(g: &GroupDefinition, s: &str) -> TreeAutomorphism {
    g.element(&w(g, s))
}

#[test]
fn gg_letters_follow_the_recursion() {
    let g = builtin("Gg").unwrap();
    assert_eq!(g.letters().len(), 4);
    let (p, secs) = g.decompose(&w(&g, "b"));
    assert!(p.is_identity());
    assert_eq!(secs, vec![w(&g, "a"), w(&g, "c")]);
    let (_, secs) = g.decompose(&w(&g, "d"));
    assert_eq!(secs, vec![Word::empty(), w(&g, "b")]);
    let d = state(&g, "d");
    assert_eq!(d.section(&Vertex::parse("22").unwrap()).unwrap(), state(&g, "c"));
    let b = state(&g, "b");
    assert_eq!(b.act(&Vertex::parse("12").unwrap()).unwrap(), Vertex::parse("11").unwrap());
}

#[test]
fn ternary_builtins() {
    let f = builtin("FGg").unwrap();
    let t = state(&f, "t");
    assert_eq!(t.section(&Vertex::parse("3").unwrap()).unwrap(), t);
    assert_eq!(t.section(&Vertex::parse("1").unwrap()).unwrap(), state(&f, "a"));
    assert!(t.section(&Vertex::parse("2").unwrap()).unwrap().is_identity());
    let s = builtin("GSg").unwrap();
    assert_eq!(state(&s, "t").section(&Vertex::parse("2").unwrap()).unwrap(), state(&s, "a^2"));
}

#[test]
fn simple_reductions() {
    let g = builtin("Gg").unwrap();
    assert_eq!(w(&g, "bb"), Word::empty());
    assert_eq!(w(&g, "bc"), w(&g, "d"));
    assert_eq!(w(&g, ""), Word::empty());
    // bc -> d, aa -> 1, dd -> 1
    assert_eq!(g.format(&w(&g, "a b c a a d b")), "ab");
    assert_eq!(g.format(&w(&g, "a b c a d")), "adad");
}

#[test]
fn cyclic_reduction() {
    let g = builtin("Gg").unwrap();
    let (r, f) = g.cyclic_reduce(&w(&g, "aba"));
    assert_eq!(r, w(&g, "b"));
    assert_eq!(g.conj(&w(&g, "aba"), &f), r);
    assert_eq!(g.cyclic_reduce(&w(&g, "b")).0, w(&g, "b"));
    assert_eq!(g.cyclic_reduce(&w(&g, "ab")).0, w(&g, "ab"));
    let (r, f) = g.cyclic_reduce(&w(&g, "badacab"));
    assert_eq!(g.conj(&w(&g, "badacab"), &f), r);
    assert!(r.len() <= 7);
}

#[test]
fn grigorchuk_sequence_012_is_gg() {
    let g = builtin("Gg").unwrap();
    let h = grigorchuk_2group("", "012").unwrap();
    for name in ["a", "b", "c", "d"] {
        assert_eq!(state(&g, name), state(&h, name), "generator {name}");
    }
    assert_eq!(h.flavor(), Flavor::GgSequence);
    assert!(grigorchuk_2group("", "01").is_err());
    assert!(grigorchuk_2group("3", "012").is_err());
}

#[test]
fn ggs_vectors_match_ternary_builtins() {
    for (name, e) in [("FGg", vec![1, 0]), ("BGg", vec![1, 1]), ("GSg", vec![1, 2])] {
        let b = builtin(name).unwrap();
        let g = from_ggs(&GgsVector::new(3, e).unwrap()).unwrap();
        assert_eq!(state(&b, "t"), state(&g, "b"), "{name}");
        assert_eq!(state(&b, "a"), state(&g, "a"));
    }
    assert!(GgsVector::new(4, vec![2, 0, 2]).is_err());
    assert!(GgsVector::new(3, vec![1]).is_err());
}

#[test]
fn triple_validation_names_the_failure() {
    let mut t = GgsVector::new(3, vec![1, 0]).unwrap().triple();
    t.a = vec![Perm::identity(3)];
    let e = from_triple(&t).unwrap_err().to_string();
    assert!(e.contains("spherical transitivity"), "{e}");
    let mut t = GgsVector::new(3, vec![1, 0]).unwrap().triple();
    t.cycle[0].maps = vec![vec![Perm::identity(3); 3]; 2];
    let e = from_triple(&t).unwrap_err().to_string();
    assert!(e.contains("transitivity") || e.contains("kernel"), "{e}");
}

#[test]
fn shifted_triple_gives_level_one_class() {
    let g = grigorchuk_2group("0", "120").unwrap();
    let t = g.triple().unwrap().clone();
    let h = from_triple(&t.shift()).unwrap();
    let mut a: Vec<TreeAutomorphism> = h.letters().iter().map(|l| l.state).collect();
    let mut b: Vec<TreeAutomorphism> = g.class(1).letters.iter().map(|l| l.state).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn ggs_torsion_criterion() {
    assert!(!is_ggs_torsion(&GgsVector::new(3, vec![1, 0]).unwrap()).unwrap());
    assert!(!is_ggs_torsion(&GgsVector::new(3, vec![1, 1]).unwrap()).unwrap());
    assert!(is_ggs_torsion(&GgsVector::new(3, vec![1, 2]).unwrap()).unwrap());
    assert!(is_ggs_torsion(&GgsVector::new(5, vec![1, -1, 0, 0]).unwrap()).unwrap());
    assert!(is_ggs_torsion(&GgsVector::new(4, vec![1, 0, 1]).unwrap()).unwrap());
    assert!(is_ggs_torsion(&GgsVector::new(6, vec![1, 0, 0, 0, 0]).unwrap()).is_err());
}

#[test]
fn explicit_recursion_blocks() {
    let g = builtin("BSV").unwrap();
    assert_eq!(g.flavor(), Flavor::ExplicitRecursion);
    let m = w(&g, "m");
    assert_eq!(g.mul(&m, &g.inverse(&m)), Word::empty());
    assert_eq!(w(&g, "mmm'"), m);
    let mut r = state(&g, "t").reachable_sections(100).unwrap();
    r.sort();
    let mut want = vec![state(&g, "t"), state(&g, "1")];
    want.sort();
    assert_eq!(r, want);
    let s = builtin("Sg").unwrap();
    assert_eq!(s.block_of(0, w(&s, "b").0[0]).order(), Some(8));
    assert_eq!(w(&s, "bc"), w(&s, "cb"));
}

#[test]
fn section_words_agree_with_states() {
    for name in BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        for l in 0..g.letters().len() as Letter {
            let word = Word(vec![l, (l + 1) % g.letters().len() as Letter]);
            let word = g.reduce(&word);
            let (p, secs) = g.decompose(&word);
            let (q, ss) = g.element(&word).decompose();
            assert_eq!(p, q, "{name}");
            let nx = g.class(0).next;
            for (s, t) in secs.iter().zip(ss) {
                assert_eq!(g.element_at(nx, &s.0), t, "{name}");
            }
        }
    }
}

#[test]
fn parse_print_roundtrip() {
    let g = builtin("GSg").unwrap();
    for s in ["a^2 t a t^2", "(at)^3", "[t,a]", "t^a"] {
        let x = w(&g, s);
        assert_eq!(w(&g, &g.format(&x)), x, "{s}");
    }
}
