use super::*;
use crate::group::builtin;
use crate::tree::Vertex;

fn w(g: &GroupDefinition, s: &str) -> Word {
    g.parse(s).unwrap()
}

#[test]
fn word_problem_examples() {
    let g = builtin("Gg").unwrap();
    assert!(is_trivial(&g, &w(&g, "(ad)^4")).unwrap());
    assert!(!is_trivial(&g, &w(&g, "abab")).unwrap());
    assert!(is_trivial(&g, &Word::empty()).unwrap());
    assert!(equal(&g, &w(&g, "bc"), &w(&g, "d")).unwrap());
    assert!(!equal(&g, &w(&g, "a"), &w(&g, "b")).unwrap());
    assert!(is_trivial(&g, &w(&g, "(ab)^16")).unwrap());
    assert!(!is_trivial(&g, &w(&g, "(ab)^8")).unwrap());
    // a commutator relation of the Lysionok type
    assert!(is_trivial(&g, &w(&g, "(adacac)^4")).unwrap());
}

#[test]
fn orders_in_gg() {
    let g = builtin("Gg").unwrap();
    let mut s = OrderSolver::new(&g);
    for (x, k) in [("b", 2), ("ad", 4), ("ac", 8), ("ab", 16), ("1", 1), ("abac", 8)] {
        assert_eq!(s.order(&w(&g, x), 1 << 20).unwrap(), OrderResult::Finite(k), "{x}");
    }
    assert!(matches!(s.order(&w(&g, "ab"), 8).unwrap(), OrderResult::Unknown(_)));
}

#[test]
fn bgg_element_has_certified_infinite_order() {
    let g = builtin("BGg").unwrap();
    let x = w(&g, "t a'");
    match order(&g, &x, 1 << 20).unwrap() {
        OrderResult::InfiniteCertified(c) => {
            assert_eq!(c.power, 3);
            assert_eq!(c.vertex, Vertex::parse("3").unwrap());
            assert!(c.link.is_none());
            assert!(c.conjugator.is_empty());
            assert!(verify_certificate(&g, &x, &c).unwrap());
        }
        r => panic!("{r:?}"),
    }
}

#[test]
fn linked_certificates_verify() {
    let g = builtin("BGg").unwrap();
    let x = w(&g, "a t a' a'");
    let OrderResult::InfiniteCertified(c) = order(&g, &x, 1 << 20).unwrap() else { panic!() };
    assert!(c.link.is_some());
    assert!(verify_certificate(&g, &x, &c).unwrap());
    let mut bad = c.clone();
    bad.power = 1;
    assert!(!verify_certificate(&g, &x, &bad).unwrap());
    let d = builtin("Dinf").unwrap();
    let OrderResult::InfiniteCertified(c) = order(&d, &w(&d, "ab"), 1 << 20).unwrap() else { panic!() };
    assert!(verify_certificate(&d, &w(&d, "ab"), &c).unwrap());
}

#[test]
fn balls_and_torsion() {
    let g = builtin("Gg").unwrap();
    let b = ball(&g, 3, 1 << 20).unwrap();
    assert_eq!(b.growth(0), 1);
    assert_eq!(b.growth(1), 5);
    let d = builtin("Dinf").unwrap();
    let b = ball(&d, 6, 1 << 20).unwrap();
    for n in 0..=6 {
        assert_eq!(b.growth(n), 2 * n + 1);
    }
    assert_eq!(torsion_growth(&g, 0, 1 << 20).unwrap().max_order, 1);
    assert_eq!(torsion_growth(&g, 1, 1 << 20).unwrap().max_order, 2);
    let t = torsion_growth(&g, 4, 1 << 20).unwrap();
    assert_eq!((t.infinite, t.unknown), (0, 0));
    assert_eq!(t.max_order, 16);
}

#[test]
fn eta_weights_r3() {
    let e = eta_weights(3).unwrap();
    assert!((e.eta - 0.810536).abs() < 1e-6);
    let t = &e.tau;
    assert!((t[1] + t[2] - t[3]).abs() < 1e-12);
    assert!(t[0] > 0.0 && t[0] < 1.0);
    assert!(t[1] > 0.0 && t[1] < t[2] && t[2] < t[3] && t[3] < 1.0);
    assert!(eta_weights(2).is_err());
    let g = builtin("Gg").unwrap();
    let lw = e.letter_weights(&g).unwrap();
    let idx = |n: &str| w(&g, n).0[0] as usize;
    assert_eq!(lw[idx("a")], t[0]);
    assert_eq!(lw[idx("d")], t[1]);
    assert_eq!(lw[idx("c")], t[2]);
    assert_eq!(lw[idx("b")], t[3]);
}
