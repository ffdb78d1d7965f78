use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::perm::Perm;

fn w(s: &str) -> Word {
    crate::group::builtin("Gg").unwrap().parse(s).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, lens: std::ops::Range<usize>) -> Word {
    let len = rng.gen_range(lens);
    let names = ["a", "b", "c", "d"];
    let s: String = (0..len).map(|_| names[rng.gen_range(0..4)]).collect();
    w(&s)
}

#[test]
fn cosets_of_k() {
    let n = k_membership_level().unwrap();
    let s = solver().unwrap().lock();
    assert_eq!(s.cosets.level, n);
    assert_eq!(s.cosets.names.len(), 16);
    assert_eq!(s.cosets.of(&w("abab")), 0);
    assert_ne!(s.cosets.of(&w("a")), 0);
    // lift of the trivial pair is K
    assert_eq!(s.cosets.lift(0, 0), Some(0));
}

#[test]
fn base_pairs() {
    assert_eq!(q_set(&Word::empty(), &Word::empty()).unwrap(), CosetSet::ALL);
    assert!(q_set(&w("b"), &w("c")).unwrap().is_empty());
    assert!(q_set(&w("a"), &w("b")).unwrap().is_empty());
    assert!(q_set(&w("b"), &Word::empty()).unwrap().is_empty());
    assert!(q_set(&w("b"), &w("b")).unwrap().contains(0));
    assert!(are_conjugate(&w("a"), &w("bab")).unwrap());
    assert!(!are_conjugate(&w("ab"), &w("ac")).unwrap());
}

#[test]
fn conjugates_contain_the_conjugator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut s = solver().unwrap().lock();
    for _ in 0..60 {
        let g = random_word(&mut rng, 1..12);
        let f = random_word(&mut rng, 0..10);
        let gr = s.group().clone();
        let h = gr.conj(&g, &f);
        let q = s.q_set(&g, &h).unwrap();
        assert!(q.contains(s.cosets.of(&f)), "{} by {}", gr.format(&g), gr.format(&f));
    }
}

#[test]
fn symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = solver().unwrap().lock();
    for _ in 0..60 {
        let g = random_word(&mut rng, 1..10);
        let h = random_word(&mut rng, 1..10);
        let q = s.q_set(&g, &h).unwrap();
        let r = s.q_set(&h, &g).unwrap();
        let mut inv = CosetSet::EMPTY;
        for c in q.iter() {
            inv.insert(s.cosets.inv(c));
        }
        assert_eq!(inv, r);
    }
}

#[test]
fn distinguished_in_level_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut s = solver().unwrap().lock();
    let gr = s.group().clone();
    let mut checked = 0;
    while checked < 40 {
        let g = random_word(&mut rng, 1..14);
        let h = random_word(&mut rng, 1..14);
        let (pg, ph) = (gr.element(&g).level_perm(6), gr.element(&h).level_perm(6));
        if pg.cycle_type() == ph.cycle_type() {
            continue;
        }
        checked += 1;
        assert!(!s.are_conjugate(&g, &h).unwrap());
    }
}

#[test]
fn witnesses_for_small_conjugates() {
    let s = solver().unwrap().lock();
    let g = w("ab");
    let f = w("ac");
    let h = s.group().conj(&g, &f);
    let c = s.cosets.of(&f);
    let found = s.witness(&g, &h, c, 6).unwrap().expect("conjugator of length 2");
    assert!(found.len() <= 2);
}

/// Elements of `G_n` with a word for each, by breadth-first search.
fn quotient_elements(n: usize) -> Vec<(Perm, Word)> {
    let gr = crate::group::builtin("Gg").unwrap();
    let gens: Vec<(Word, Perm)> =
        ["a", "b", "c", "d"].iter().map(|s| (w(s), gr.element(&w(s)).level_perm(n))).collect();
    let id = Perm::identity(1 << n);
    let mut seen = std::collections::HashMap::new();
    seen.insert(id.clone(), Word::empty());
    let mut out = vec![(id, Word::empty())];
    let mut k = 0;
    while k < out.len() {
        let (p, u) = out[k].clone();
        k += 1;
        for (x, q) in &gens {
            let r = p.compose(q);
            if !seen.contains_key(&r) {
                let v = gr.mul(&u, x);
                seen.insert(r.clone(), v.clone());
                out.push((r, v));
            }
        }
    }
    out
}

#[test]
fn bounded_by_quotient_conjugators() {
    let elems = quotient_elements(4);
    assert_eq!(elems.len(), 1 << 12);
    let gr = crate::group::builtin("Gg").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = solver().unwrap().lock();
    let coset: Vec<usize> = elems.iter().map(|(_, u)| s.cosets.of(u)).collect();
    for i in 0..80 {
        let g = random_word(&mut rng, 1..10);
        let h = if i % 2 == 0 { gr.conj(&g, &random_word(&mut rng, 0..8)) } else { random_word(&mut rng, 1..10) };
        let (pg, ph) = (gr.element(&g).level_perm(4), gr.element(&h).level_perm(4));
        let mut bound = CosetSet::EMPTY;
        for (k, (f, _)) in elems.iter().enumerate() {
            if pg.conj(f) == ph {
                bound.insert(coset[k]);
            }
        }
        let q = s.q_set(&g, &h).unwrap();
        assert_eq!(q.0 & !bound.0, 0, "{} {}", gr.format(&g), gr.format(&h));
    }
}
