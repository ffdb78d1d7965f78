//! One PASS/FAIL line per acceptance criterion. Supporting measurements
//! are printed on indented INFO lines.

use std::time::Instant;

use branchgroups::conjugacy::{solver, CosetSet, NUM_COSETS};
use branchgroups::decision::{
    ball, eta_weights, level_sections, order, verify_certificate, word_for_level_perm, OrderResult, OrderSolver,
};
use branchgroups::group::{builtin, from_ggs, is_ggs_torsion, GgsVector, GroupDefinition, Letter, Word};
use branchgroups::presentations::{builtin_presentation, PRESENTATION_NAMES};
use branchgroups::quotients::{format_order, hausdorff_ratio, level_quotient, Normalisation};
use branchgroups::schreier::{
    phi_check, product_series, schreier_graph, spectrum, substitution_rules, substitutional_expand,
};
use branchgroups::tree::{TreeAutomorphism, Vertex};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    info: Vec<String>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn info(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }
}

fn run(n: usize, title: &str, f: impl FnOnce(&mut Criterion)) -> bool {
    let start = Instant::now();
    let mut c = Criterion::default();
    f(&mut c);
    let secs = start.elapsed().as_secs_f64();
    let ok = c.failures.is_empty();
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{status} {n:>2} {title} ({secs:.1}s)");
    for x in &c.failures {
        println!("       failed: {x}");
    }
    for x in &c.info {
        println!("       INFO {x}");
    }
    ok
}

fn pow(p: u32, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn gg_word(g: &GroupDefinition, rng: &mut ChaCha8Rng, lens: std::ops::Range<usize>) -> Word {
    let len = rng.gen_range(lens);
    let s: String = (0..len).map(|_| ["a", "b", "c", "d"][rng.gen_range(0..4)]).collect();
    g.parse(&s).unwrap()
}

fn quotient_orders(c: &mut Criterion) {
    let start = Instant::now();
    let g = builtin("Gg").unwrap();
    for n in 4..=7u32 {
        let o = level_quotient(&g, n as usize).unwrap().order();
        c.check(o == pow(2, 5 * (1 << (n - 3)) + 2), format!("|Gg_{n}| = {}", format_order(&o)));
    }
    let f = builtin("FGg").unwrap();
    for n in 2..=5u32 {
        let o = level_quotient(&f, n as usize).unwrap().order();
        c.check(o == pow(3, 3u32.pow(n - 1) + 1), format!("|FGg_{n}| = {}", format_order(&o)));
    }
    let b = builtin("BGg").unwrap();
    for n in 1..=5u32 {
        let o = level_quotient(&b, n as usize).unwrap().order();
        let want = if n <= 2 { pow(3, (3u32.pow(n) - 1) / 2) } else { pow(3, (3u32.pow(n) + 2 * n + 3) / 4) };
        c.check(o == want, format!("|BGg_{n}| = {}", format_order(&o)));
        if n == 2 {
            c.check(o == pow(3, (3u32.pow(n) + 2 * n + 3) / 4), "BGg_2 against the general formula");
        }
    }
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < 120.0, format!("runtime {secs:.1}s"));
}

fn hausdorff(c: &mut Criterion) {
    for (name, n, want) in [("Gg", 8, 5.0 / 8.0), ("FGg", 6, 1.0 / 3.0), ("BGg", 6, 0.5)] {
        let g = builtin(name).unwrap();
        let r = hausdorff_ratio(&g, n, Normalisation::LocalWreath).unwrap();
        c.check((r - want).abs() < 0.02, format!("{name} ratio {r:.4} at n = {n}, target {want:.4}"));
        c.info(format!("{name} n = {n}: ratio {r:.4}"));
    }
}

fn spectra(c: &mut Criterion) {
    let g = builtin("Gg").unwrap();
    for n in 1..=8 {
        let r = spectrum(&g, n).unwrap();
        let dev = r.max_deviation.unwrap();
        c.check(dev < 1e-9, format!("Gg level {n} deviation {dev:e}"));
        c.check(r.eigenvalues.len() == 1 << n, format!("Gg level {n} multiplicity {}", r.eigenvalues.len()));
        let inside = r.eigenvalues.iter().all(|&x| (-2.0 - 1e-9..=1e-9).contains(&x) || (2.0 - 1e-9..=4.0 + 1e-9).contains(&x));
        c.check(inside, format!("Gg level {n} eigenvalue outside [-2,0] u [2,4]"));
    }
    let f = builtin("FGg").unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let dev = spectrum(&f, n).unwrap().max_deviation.unwrap();
        worst = worst.max(dev);
        c.check(dev < 1e-6, format!("FGg level {n} deviation {dev:e}"));
    }
    c.info(format!("FGg worst distance to {{4,1}} u 1+J(6) approximants: {worst:e}"));
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut phi: f64 = 0.0;
    for _ in 0..20 {
        let (l, m) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        for n in 0..=5 {
            let d = phi_check(n, l, m).unwrap();
            phi = phi.max(d);
            c.check(d < 1e-6, format!("Phi product at n = {n}, ({l}, {m}): {d:e}"));
        }
    }
    c.info(format!("max |det Q_n - prod Phi_i| over 20 points, n <= 5: {phi:e}"));
}

fn schreier(c: &mut Criterion) {
    for name in ["Gg", "FGg"] {
        let g = builtin(name).unwrap();
        let rules = substitution_rules(name).unwrap();
        for n in 0..=8 {
            let direct = schreier_graph(&g, n).unwrap();
            let sub = substitutional_expand(&rules, n).unwrap();
            c.check(
                sub.targets == direct.targets && sub.basepoint == direct.basepoint,
                format!("{name} level {n}: substitution differs from direct construction"),
            );
        }
    }
    let g = builtin("Gg").unwrap();
    let mut literal = Vec::new();
    for n in 0..=10 {
        let s = schreier_graph(&g, n).unwrap();
        c.check(s.diameter() == (1 << n) - 1, format!("Gg level {n} diameter {}", s.diameter()));
        let growth = s.growth_series();
        if growth != product_series(n, 2) {
            literal.push(n);
        }
        if growth != product_series(n, 1) {
            c.info(format!("Gg level {n}: growth is not prod(1+X^(2^i)) either"));
        }
    }
    c.check(literal.is_empty(), format!("Gg growth differs from prod(1+2X^(2^i)) at levels {literal:?}"));
    c.info("Gg growth equals prod(1+X^(2^i)) at every level 0..10".to_string());
    let f = builtin("FGg").unwrap();
    let fgg_ok = (0..=7).all(|n| {
        let s = schreier_graph(&f, n).unwrap();
        s.diameter() == (1 << n) - 1 && s.growth_series() == product_series(n, 2)
    });
    c.info(format!("FGg diameter 2^n-1 and growth prod(1+2X^(2^i)) for n <= 7: {fgg_ok}"));
}

fn central_series(c: &mut Criterion) {
    let g = builtin("Gg").unwrap();
    let want = vec![3, 2, 2, 1, 2, 2, 1, 1, 2];
    let q5 = level_quotient(&g, 5).unwrap();
    let r5 = q5.lower_central_ranks(9).unwrap();
    c.check(r5 == want, format!("level 5 ranks {r5:?}"));
    let r6 = level_quotient(&g, 6).unwrap().lower_central_ranks(9).unwrap();
    c.check(r6 == want, format!("level 6 ranks {r6:?}"));
    c.info(format!("ranks k = 1..9: level 5 {r5:?}, level 6 {r6:?}"));
    for n in 3..=5 {
        let k = level_quotient(&g, n).unwrap().nilpotency_class();
        c.check(k == 1 << (n - 1), format!("nilpotency class of Gg_{n} is {k}"));
    }
    let nk = branchgroups::conjugacy::k_membership_level().unwrap();
    for n in nk..=6 {
        let q = level_quotient(&g, n).unwrap();
        let d = q.derived_series(2);
        let idx = d[1].index_in(&d[0]);
        c.check(idx == BigUint::from(8u32), format!("[Gg_{n} : Gg'] = {idx}"));
        let r = q.rigid_level_stabilizer(1).index_in(q.group());
        c.check(r == BigUint::from(16u32), format!("level {n}: rigid level-1 stabilizer index {r}"));
    }
    c.info(format!("n_K = {nk}"));
}

fn orders(c: &mut Criterion) {
    let g = builtin("Gg").unwrap();
    let mut s = OrderSolver::new(&g);
    for (x, k) in [("a", 2), ("b", 2), ("c", 2), ("d", 2), ("ad", 4), ("ab", 16)] {
        let w = g.parse(x).unwrap();
        let r = s.order(&w, 1 << 20).unwrap();
        c.check(r == OrderResult::Finite(k), format!("order({x}) = {r:?}"));
        let e = g.element(&w);
        let perm: Vec<u64> = (1..=10).map(|n| e.level_perm(n).order()).collect();
        c.check(perm[7..].iter().all(|&p| p == k), format!("permutation orders of {x} on levels 1..10: {perm:?}"));
    }
    let b = ball(&g, 8, 1 << 20).unwrap();
    let mut bad = 0;
    for (w, _) in &b.elements {
        match s.order(w, 1 << 20).unwrap() {
            OrderResult::Finite(k) if k.is_power_of_two() => {}
            _ => bad += 1,
        }
    }
    c.check(bad == 0, format!("{bad} elements of the radius-8 ball without finite 2-power order"));
    c.info(format!("Gg ball(8): {} elements", b.elements.len()));
    let bg = builtin("BGg").unwrap();
    let x = bg.parse("t a'").unwrap();
    match order(&bg, &x, 1 << 20).unwrap() {
        OrderResult::InfiniteCertified(cert) => {
            c.check(verify_certificate(&bg, &x, &cert).unwrap(), "certificate for ta^-1 does not verify");
        }
        r => c.check(false, format!("order(ta^-1) in BGg = {r:?}")),
    }
    for e in [vec![1, 0], vec![1, 1], vec![1, 2]] {
        let v = GgsVector::new(3, e.clone()).unwrap();
        let torsion = is_ggs_torsion(&v).unwrap();
        let h = from_ggs(&v).unwrap();
        let mut hs = OrderSolver::new(&h);
        let (mut infinite, mut unknown) = (0, 0);
        for (w, _) in &ball(&h, 4, 1 << 20).unwrap().elements {
            match hs.order(w, 1 << 20).unwrap() {
                OrderResult::Finite(_) => {}
                OrderResult::InfiniteCertified(_) => infinite += 1,
                OrderResult::Unknown(_) => unknown += 1,
            }
        }
        let search = if infinite > 0 { Some(false) } else if unknown == 0 { Some(true) } else { None };
        c.check(search == Some(torsion), format!("GGS {e:?}: criterion {torsion}, search {infinite} infinite, {unknown} unknown"));
        c.info(format!("GGS {e:?}: torsion {torsion}, {infinite} certified infinite in ball(4)"));
    }
}

fn presentations(c: &mut Criterion) {
    for name in PRESENTATION_NAMES {
        let p = builtin_presentation(name).unwrap();
        let depth = if matches!(name, "Lysionok" | "Gg") { 6 } else { 4 };
        let r = p.verify(depth).unwrap();
        match &r.first_failure {
            None => c.info(format!("{name}: {} relators trivial to depth {depth}", r.checked)),
            Some((d, w)) => c.check(false, format!("{name}: nontrivial relator at depth {d}: {w}")),
        }
        let m = p.mutation_control(2, 64).unwrap();
        c.check(m.rate() >= 0.95, format!("{name}: mutation detection {:.3}", m.rate()));
        c.info(format!("{name}: {} of {} mutants nontrivial", m.nontrivial, m.mutants));
    }
}

fn conjugacy(c: &mut Criterion) {
    let mut s = solver().unwrap().lock();
    let g = s.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = Vec::new();
    for _ in 0..200 {
        let x = gg_word(&g, &mut rng, 1..16);
        let f = gg_word(&g, &mut rng, 0..12);
        let h = g.conj(&x, &f);
        let q = s.q_set(&x, &h).unwrap();
        let kf = s.cosets.of(&f);
        c.check(!q.is_empty() && q.contains(kf), format!("{} ~ {} by {}", g.format(&x), g.format(&h), g.format(&f)));
        pairs.push((x, h, kf));
    }
    let mut distinguished = 0;
    while distinguished < 200 {
        let x = gg_word(&g, &mut rng, 1..16);
        let y = gg_word(&g, &mut rng, 1..16);
        if g.element(&x).level_perm(6).cycle_type() == g.element(&y).level_perm(6).cycle_type() {
            continue;
        }
        distinguished += 1;
        c.check(!s.are_conjugate(&x, &y).unwrap(), format!("{} ~ {} claimed", g.format(&x), g.format(&y)));
    }
    let all = s.q_set(&Word::empty(), &Word::empty()).unwrap();
    c.check(all == CosetSet::ALL && all.len() == NUM_COSETS, format!("q_set(1,1) has {} cosets", all.len()));
    let mut found = 0;
    for (x, h, kf) in pairs.iter().take(20) {
        if s.witness(x, h, *kf, 14).unwrap().is_some() {
            found += 1;
        }
    }
    c.info(format!("conjugator search up to length 14 found {found} of 20"));
    c.info(format!("{} pair nodes explored", s.pairs_explored()));
}

fn random_reduced(g: &GroupDefinition, rng: &mut ChaCha8Rng, max: usize) -> Word {
    let k = g.letters().len();
    let len = rng.gen_range(0..=max);
    g.reduce(&Word((0..len).map(|_| rng.gen_range(0..k) as Letter).collect()))
}

fn properties(c: &mut Criterion) {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gg = builtin("Gg").unwrap();
    let spinal: Vec<_> = ["Gg", "FGg", "BGg", "GSg", "Sg"].iter().map(|n| builtin(n).unwrap()).collect();
    let mut fails = [0usize; 7];
    let eta = eta_weights(3).unwrap();
    let weights = eta.letter_weights(&gg).unwrap();
    let profile: Vec<TreeAutomorphism> = gg.letters().iter().map(|l| l.state).collect();
    for _ in 0..CASES {
        // section contraction
        let g = &spinal[rng.gen_range(0..spinal.len())];
        let f = random_reduced(g, &mut rng, 80);
        if g.decompose(&f).1.iter().any(|s| 2 * s.len() > f.len() + 1) {
            fails[0] += 1;
        }
        // 3/4 and 2/3 shortening on Stab(L_3)
        let w = random_reduced(&gg, &mut rng, 120);
        let p = gg.element(&w).level_perm(3).inverse();
        let u = word_for_level_perm(&gg, 3, &p, 32).unwrap();
        let f = gg.reduce(&Word([w.0, u.0].concat()));
        let total: usize = level_sections(&gg, &f, 3).iter().map(|s| s.len()).sum();
        fails[1] += (4 * total > 3 * f.len() + 32) as usize;
        fails[2] += (3 * total >= 2 * f.len() + 72) as usize;
        // eta-shortening
        let f = random_reduced(&gg, &mut rng, 100);
        let lhs: f64 = level_sections(&gg, &f, 1).iter().map(|s| eta.weight(&weights, s)).sum();
        fails[3] += (lhs > eta.eta * (eta.weight(&weights, &f) + eta.tau[0]) + 1e-9) as usize;
        // canonical portrait depth
        let f = random_reduced(&gg, &mut rng, 64);
        if !f.is_empty() {
            let stop = |x: TreeAutomorphism, _: usize| profile.contains(&x);
            let d = gg.element(&f).portrait_with_profile(&stop, 1 << 20).unwrap().depth();
            let bound = (usize::BITS - (f.len() - 1).leading_zeros()) as usize + 1;
            fails[4] += (d > bound) as usize;
        }
        // right action and sections of a product
        let g = &spinal[rng.gen_range(0..spinal.len())];
        let (x, y) = (random_reduced(g, &mut rng, 24), random_reduced(g, &mut rng, 24));
        let (fx, fy) = (g.element(&x), g.element(&y));
        let fxy = fx.compose(fy).unwrap();
        let v = Vertex((0..6).map(|i| rng.gen_range(0..g.shape().arity(i) as u32)).collect());
        let vx = fx.act(&v).unwrap();
        let law = fxy == g.element(&g.mul(&x, &y))
            && fxy.act(&v).unwrap() == fy.act(&vx).unwrap()
            && fxy.section(&v).unwrap() == fx.section(&v).unwrap().compose(fy.section(&vx).unwrap()).unwrap();
        fails[5] += (!law) as usize;
        // reduce confluence
        let k = g.letters().len();
        let raw: Vec<Letter> = (0..rng.gen_range(0..60)).map(|_| rng.gen_range(0..k) as Letter).collect();
        let cut = rng.gen_range(0..=raw.len());
        let whole = g.reduce(&Word(raw.clone()));
        let halves = g.reduce(&Word([g.reduce(&Word(raw[..cut].to_vec())).0, g.reduce(&Word(raw[cut..].to_vec())).0].concat()));
        fails[6] += (whole != halves || g.reduce(&whole) != whole || g.element(&Word(raw)) != g.element(&whole)) as usize;
    }
    let names = ["section contraction", "3/4-shortening", "2/3-shortening", "eta-shortening", "canonical portrait depth", "action and section laws", "reduce confluence"];
    for (name, f) in names.iter().zip(fails) {
        c.check(f == 0, format!("{name}: {f} of {CASES} cases fail"));
    }
    c.info(format!("{CASES} cases per property; proptest suites in crates/branchgroups/tests/properties.rs"));
}

fn suborbits(c: &mut Criterion) {
    let g = builtin("Gg").unwrap();
    for n in 1..=8 {
        let p = level_quotient(&g, n).unwrap().suborbit_profile();
        c.check(p.len() == n + 1 && p.iter().sum::<usize>() == 1 << n, format!("Gg level {n}: {p:?}"));
    }
    let f = builtin("FGg").unwrap();
    for n in 1..=5 {
        let p = level_quotient(&f, n).unwrap().suborbit_profile();
        c.check(p.len() == 2 * n + 1 && p.iter().sum::<usize>() == 3usize.pow(n as u32), format!("FGg level {n}: {p:?}"));
    }
}

fn main() {
    let results = [
        run(1, "quotient orders", quotient_orders),
        run(2, "Hausdorff ratios", hausdorff),
        run(3, "spectra", spectra),
        run(4, "Schreier graphs", schreier),
        run(5, "lower central and derived series", central_series),
        run(6, "orders and torsion", orders),
        run(7, "presentations", presentations),
        run(8, "conjugacy", conjugacy),
        run(9, "property suites", properties),
        run(10, "suborbits", suborbits),
    ];
    let failed: Vec<usize> = (1..=10).filter(|&i| !results[i - 1]).collect();
    println!("{} of 10 criteria pass", 10 - failed.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
