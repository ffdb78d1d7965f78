use branchgroups::group::builtin;
use branchgroups_cli::dsl::{parse_group_file, DslError};
use branchgroups_cli::{execute, load_group, run, Cli, EXIT_FALSE, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GG: &str = "\
# first Grigorchuk group
group Gg
arity 2
rooted a = (1 2)
recursive b = (a, c)
recursive c = (a, d)
recursive d = (1, b)
";

const GSG: &str = "\
group GS
arity 3
rooted a = (1 2 3)
recursive t = (a, a^2, t)
";

fn call(args: &[&str]) -> (i32, String) {
    let cli = Cli::try_parse_from(std::iter::once("branchgroups").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let code = match execute(cli, &mut out) {
        Ok(c) => c,
        Err(e) => e.exit_code(),
    };
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn gg_file_matches_builtin() {
    let g = load_group(GG).unwrap();
    let b = builtin("Gg").unwrap();
    assert_eq!(g.generator_states(), b.generator_states());
    for w in ["(ad)^4", "abab", "[b,c]", "(ac)^4"] {
        let (x, y) = (g.parse(w).unwrap(), b.parse(w).unwrap());
        assert_eq!(g.element(&x), b.element(&y), "{w}");
    }
}

#[test]
fn gsg_and_bsv_files() {
    let g = load_group(GSG).unwrap();
    assert_eq!(g.generator_states(), builtin("GSg").unwrap().generator_states());
    let bsv = "group B\narity 2\nrooted a = (1 2)\nrecursive m = (1, m^-1) a\nrecursive t = (1, t) a\n";
    assert_eq!(load_group(bsv).unwrap().generator_states(), builtin("BSV").unwrap().generator_states());
}

#[test]
fn sequence_trees() {
    let text = "\
group Alt
arity seq 2 3 cycle 2
rooted a = (1 2)
rooted a@1 = (1 2 3)
recursive b = (a, 1)
recursive b@1 = (b, 1, 1)
";
    let g = load_group(text).unwrap();
    assert_eq!(g.shape().level_size(3), 12);
    assert_eq!(g.num_classes(), 2);
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_group_file(""), Err(DslError::Syntax { .. })));
    assert!(matches!(parse_group_file("# nothing\n\n"), Err(DslError::Syntax { .. })));
    match parse_group_file("group G\narity 2\nrooted a = (1 2\n") {
        Err(DslError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 12)),
        other => panic!("{other:?}"),
    }
    match parse_group_file("group G\narity 2\nrooted a = (1 2)\nfrobnicate\n") {
        Err(DslError::UnknownSymbol { line, column, name }) => assert_eq!((line, column, name.as_str()), (4, 1, "frobnicate")),
        other => panic!("{other:?}"),
    }
    match parse_group_file("group G\narity 2\nrooted a = (1 2)\nrecursive b = (a, x)\n") {
        Err(DslError::UnknownSymbol { line, name, .. }) => assert_eq!((line, name.as_str()), (4, "x")),
        other => panic!("{other:?}"),
    }
    match parse_group_file("group G\narity 3\nrooted a = (1 2 3)\nrecursive b = (a, b)\n") {
        Err(DslError::ArityMismatch { line, expected, found }) => assert_eq!((line, expected, found), (4, 3, 2)),
        other => panic!("{other:?}"),
    }
    assert!(parse_group_file("group G\narity 2\nrooted a = (1 3)\n").is_err());
    assert!(parse_group_file("rooted a = (1 2)\n").is_err());
    assert!(parse_group_file("group G\narity 2\nrecursive b = (1, b) z\n").is_err());
}

#[test]
fn file_round_trip() {
    let text = format!(
        "{GG}\n{GSG}\ngroup S\narity seq 2 3 cycle 1\nrooted a = (1 2)\nrooted a@1 = (1 2)(3)\nrecursive b@1 = (a b^-1, 1, b)\n\n\
         presentation P over Gg\nsymbols a c d\nimage a = a\nfixed a^2\nsubstitution phi: a -> aca, c -> cd, d -> c\nrelator [d,d^a]\nrelator (ad)^4\n"
    );
    let f = parse_group_file(&text).unwrap();
    let printed = f.to_string();
    let g = parse_group_file(&printed).unwrap();
    assert_eq!(f, g);
    assert_eq!(printed, g.to_string());
    assert_eq!(f.groups.len(), 3);
    assert_eq!(f.presentations[0].relators.len(), 2);
}

#[test]
fn presentation_files() {
    let text = "\
presentation L over Gg
symbols a c d
substitution phi: a -> aca, c -> cd, d -> c
relator a^2
relator (ad)^4
relator (adacac)^4
";
    let f = parse_group_file(text).unwrap();
    let p = f.presentation(&f.presentations[0]);
    assert!(p.verify_in(f.group("Gg").unwrap(), 4).unwrap().ok());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.bg");
    std::fs::write(&path, text).unwrap();
    let (code, out) = call(&["present", "--file", path.to_str().unwrap(), "--depth", "3", "--verify"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("verified: 12 relators trivial"), "{out}");
    let bad = text.replace("relator a^2", "relator a^2 c");
    std::fs::write(&path, bad).unwrap();
    let (code, out) = call(&["present", "--file", path.to_str().unwrap(), "--depth", "1", "--verify"]);
    assert_eq!(code, EXIT_FALSE);
    assert!(out.contains("FAILED at depth 0: a^2c"), "{out}");
}

#[test]
fn word_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for name in ["Gg", "FGg", "GSg", "Sg", "BSV"] {
        let g = builtin(name).unwrap();
        let gens: Vec<String> = g.generators().iter().map(|(n, _)| n.clone()).collect();
        for _ in 0..100 {
            let len = rng.gen_range(0..30);
            let mut text = String::new();
            for _ in 0..len {
                let x = &gens[rng.gen_range(0..gens.len())];
                match rng.gen_range(0..4) {
                    0 => text.push_str(&format!("{x}^{}", rng.gen_range(1..4))),
                    1 => text.push_str(&format!("{x}'")),
                    2 => text.push_str(&format!("({x}{x})")),
                    _ => text.push_str(x),
                }
                text.push(' ');
            }
            let w = g.parse(&text).unwrap();
            let printed = g.format(&w);
            assert_eq!(g.parse(&printed).unwrap(), w, "{name}: {text} -> {printed}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["trivial", "Gg", "(ad)^4"]).0, EXIT_OK);
    assert_eq!(call(&["trivial", "Gg", "ab"]).0, EXIT_FALSE);
    assert_eq!(call(&["equal", "Gg", "bc", "d"]).0, EXIT_OK);
    assert_eq!(call(&["trivial", "Gg", "a(("]).0, EXIT_USAGE);
    assert_eq!(call(&["trivial", "NoSuchGroup", "a"]).0, EXIT_USAGE);
    assert_eq!(call(&["quotient", "Gg", "--level", "20", "--order"]).0, EXIT_RESOURCE);
    assert_eq!(run(["branchgroups", "nonsense"]), EXIT_USAGE);
    assert_eq!(run(["branchgroups", "trivial", "Gg", "ab"]), EXIT_FALSE);
    assert_eq!(run(["branchgroups", "--threads", "2", "trivial", "Gg", "a^2"]), EXIT_OK);
}

#[test]
fn reports() {
    assert_eq!(call(&["quotient", "Gg", "--level", "4", "--order"]).1, "order: 2^12\n");
    let (code, out) = call(&["order", "Gg", "ab"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "16\n"));
    let (code, out) = call(&["conj", "b", "aba", "--witness", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("witness: a"), "{out}");
    assert_eq!(call(&["conj", "b", "c"]).0, EXIT_FALSE);
    let (_, out) = call(&["schreier", "Gg", "--level", "5", "--growth", "--diameter"]);
    assert!(out.contains("diameter: 31"), "{out}");
    let (_, out) = call(&["ball", "Gg", "--radius", "3"]);
    assert!(out.starts_with("spheres: 1 4 6 12\n"), "{out}");
    let (_, out) = call(&["present", "--name", "Lysionok", "--depth", "0"]);
    assert_eq!(out, "presentation Lysionok over Gg\n  0 a^2\n  0 adadadad\n  0 adacacadacacadacacadacac\n");
    assert_eq!(load_group(GG).unwrap().name(), "Gg");
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    for (a, b) in [("d1.dot", "d2.dot"), ("c1.csv", "c2.csv")] {
        for f in [a, b] {
            if f.ends_with("dot") {
                call(&["schreier", "FGg", "--level", "3", "--dot", &p(f)]);
            } else {
                call(&["spectrum", "Gg", "--level", "1..4", "--csv", &p(f)]);
            }
        }
        let (x, y) = (std::fs::read(p(a)).unwrap(), std::fs::read(p(b)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y);
    }
    let csv = std::fs::read_to_string(p("c1.csv")).unwrap();
    assert!(csv.starts_with("level,index,eigenvalue,closed_form_match\n1,0,2.000000000000,true\n"));
    assert_eq!(csv.lines().count(), 1 + 2 + 4 + 8 + 16);
    let (_, a) = call(&["schreier", "Gg", "--level", "4", "--dot", &p("s.dot"), "--substitution"]);
    let direct = std::fs::read(p("s.dot")).unwrap();
    call(&["schreier", "Gg", "--level", "4", "--dot", &p("s.dot")]);
    assert_eq!(direct, std::fs::read(p("s.dot")).unwrap(), "{a}");
}
