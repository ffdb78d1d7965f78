use super::{EndomorphicPresentation, PresentationError};
use crate::words::FreeWord;

pub const PRESENTATION_NAMES: [&str; 6] = ["Lysionok", "Gg", "Sg", "FGg", "GSg", "BSV"];

// group-ring exponents r^(x+y+...) are expanded as r^x r^y ...
const FGG_R2: &str = "[r r^(a') r' r^a r, a]";
const FGG_R3: &str = "[a', r r^a r^(a')][r^a r r^(a'), a]";

const GSG_R2: &str = "[v,t][vt,u' t v' u]";
const GSG_R3: &str = "[t,u]^3 [u,v]^3 [t,v]^3";

pub fn builtin_presentation(name: &str) -> Result<EndomorphicPresentation, PresentationError> {
    let key = PRESENTATION_NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| PresentationError::Invalid(format!("unknown presentation '{name}'")))?;
    let gg_phi: &[(&str, &str)] = &[("a", "aca"), ("c", "cd"), ("d", "c")];
    match *key {
        "Lysionok" => EndomorphicPresentation::from_text(
            "Lysionok",
            "Gg",
            &["a", "c", "d"],
            &["a", "c", "d"],
            &[],
            &[("phi", gg_phi)],
            &["a^2", "(ad)^4", "(adacac)^4"],
        ),
        "Gg" => EndomorphicPresentation::from_text(
            "Gg",
            "Gg",
            &["a", "c", "d"],
            &["a", "c", "d"],
            &[],
            &[("phi", gg_phi)],
            &["a^2", "[d,d^a]", "[d^(ac),(d^(ac))^a]"],
        ),
        "Sg" => EndomorphicPresentation::from_text(
            "Sg",
            "Sg",
            &["a", "b", "c", "d"],
            &["a", "b", "c", "d"],
            &[],
            &[("phi", &[("a", "aba"), ("b", "d"), ("c", "b"), ("d", "c")])],
            &[
                "a^2",
                "[b,c]",
                "[c,c^a]",
                "[c,d^a]",
                "[d,d^a]",
                "[c^(ab),(c^(ab))^a]",
                "[c^(ab),(d^(ab))^a]",
                "[d^(ab),(d^(ab))^a]",
            ],
        ),
        "FGg" => EndomorphicPresentation::from_text(
            "FGg",
            "FGg",
            &["a", "r"],
            &["a", "t"],
            &[],
            &[("phi", &[("a", "r^(a')")]), ("chi1", &[("r", "r'")]), ("chi2", &[("a", "a'")])],
            &["a^3", FGG_R2, FGG_R3],
        ),
        "GSg" => EndomorphicPresentation::from_text(
            "GSg",
            "GSg",
            &["a", "t", "u", "v"],
            &["a", "t", "t^a", "t^(a')"],
            &["a^3", "t^3", "u' t^a", "v' t^(a')"],
            &[
                ("phi", &[("u", "u' t v' t u v t'"), ("v", "t' v u t v' t u'")]),
                ("chi", &[("t", "t'"), ("u", "u'"), ("v", "v'")]),
            ],
            &["(tuv)^3", GSG_R2, GSG_R3],
        ),
        "BSV" => EndomorphicPresentation::from_text(
            "BSV",
            "BSV",
            &["l", "t"],
            &["t m'", "t"],
            &[],
            &[("phi", &[("t", "t^2"), ("l", "t^2 l' t^2")])],
            &["[l,l^t]", "[l,l^(t^3)]"],
        ),
        _ => unreachable!(),
    }
}

/// Relators of the finitely presented ascending HNN extension of `Gg`
/// along the substitution `a -> aca, c -> cd, d -> c`, over `a, c, d, t`.
pub fn hnn_presentation_relators() -> Vec<FreeWord> {
    let names = ["a", "c", "d", "t"];
    ["a^2", "[d,d^a]", "[d^(ac),d^(aca)]", "a^t aca", "c^t cd", "d^t c"]
        .iter()
        .map(|t| crate::words::parse_over(t, &names).expect("static relator"))
        .collect()
}
