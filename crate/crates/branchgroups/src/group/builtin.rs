use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;

use super::build::{from_recursive, Extras, GenSpec, RecursiveSpec};
use super::spinal::{from_ggs, GgsVector};
use super::{Flavor, GroupDefinition, GroupError};
use crate::perm::Perm;
use crate::tree::TreeShape;

pub const BUILTIN_NAMES: [&str; 9] = ["Gg", "FGg", "BGg", "GSg", "Grig2", "GuptaSidki", "Sg", "BSV", "Dinf"];

static CACHE: Lazy<Mutex<HashMap<String, Arc<GroupDefinition>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Built-in groups:
/// - `Gg`: first Grigorchuk group, `b = (a,c), c = (a,d), d = (1,b)`;
/// - `FGg`, `BGg`, `GSg`: `t = (a,1,t)`, `(a,a,t)`, `(a,a^2,t)` on the ternary tree;
/// - `Grig2`: second Grigorchuk group, `b = (a,1,a,b)` with `a = (1 2 3 4)`;
/// - `GuptaSidki`: `t = (a,a^-1,t)` for `p = 3` (see [`gupta_sidki`]);
/// - `Sg`: `b = (a,c), c = (1,d), d = (1,b)`;
/// - `BSV`: `m = (1,m^-1)a`, `t = (1,t)a` (Bellaterra-type torsion-free pair);
/// - `Dinf`: infinite dihedral group, GGS vector `(1)` over `m = 2`.
pub fn builtin(name: &str) -> Result<Arc<GroupDefinition>, GroupError> {
    let key = BUILTIN_NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| GroupError::UnknownGroup(name.to_string()))?;
    if let Some(g) = CACHE.lock().get(*key) {
        return Ok(g.clone());
    }
    let g = Arc::new(construct(key)?);
    Ok(CACHE.lock().entry(key.to_string()).or_insert(g).clone())
}

fn gen(perm: Perm, sections: Vec<Vec<(usize, i64)>>) -> Option<GenSpec> {
    Some(GenSpec { perm, sections })
}

fn rooted(m: usize, p: Perm) -> Option<GenSpec> {
    gen(p, vec![vec![]; m])
}

fn spec(name: &str, m: u32, gens: &[&str], data: Vec<Option<GenSpec>>) -> RecursiveSpec {
    RecursiveSpec {
        name: name.to_string(),
        shape: TreeShape::regular(m),
        generators: gens.iter().map(|s| s.to_string()).collect(),
        classes: vec![data],
    }
}

fn ggs_like(name: &str, m: u32, e: Vec<i64>) -> Result<GroupDefinition, GroupError> {
    let mm = m as usize;
    let v = GgsVector::new(m, e.clone())?;
    let mut secs: Vec<Vec<(usize, i64)>> =
        e.iter().map(|&k| if k.rem_euclid(m as i64) == 0 { vec![] } else { vec![(0, k)] }).collect();
    secs.push(vec![(1, 1)]);
    let s = spec(name, m, &["a", "t"], vec![rooted(mm, Perm::rotation(mm, 1)), gen(Perm::identity(mm), secs)]);
    from_recursive(&s, Flavor::GgsVector, Extras { triple: Some(v.triple()), ggs: Some(v) })
}

/// Gupta-Sidki group over the `p`-regular tree: `t = (a, a^-1, 1, ..., 1, t)`.
pub fn gupta_sidki(p: u32) -> Result<GroupDefinition, GroupError> {
    if p < 3 {
        return Err(GroupError::Validation("Gupta-Sidki groups need p >= 3".into()));
    }
    let mut e = vec![0i64; p as usize - 1];
    e[0] = 1;
    e[1] = -1;
    ggs_like(&format!("GuptaSidki({p})"), p, e)
}

fn construct(name: &str) -> Result<GroupDefinition, GroupError> {
    let swap = Perm::rotation(2, 1);
    let id2 = Perm::identity(2);
    match name {
        "Gg" => {
            let s = spec(
                "Gg",
                2,
                &["a", "b", "c", "d"],
                vec![
                    rooted(2, swap),
                    gen(id2.clone(), vec![vec![(0, 1)], vec![(2, 1)]]),
                    gen(id2.clone(), vec![vec![(0, 1)], vec![(3, 1)]]),
                    gen(id2, vec![vec![], vec![(1, 1)]]),
                ],
            );
            from_recursive(&s, Flavor::GgSequence, Extras { triple: None, ggs: None })
        }
        "FGg" => ggs_like("FGg", 3, vec![1, 0]),
        "BGg" => ggs_like("BGg", 3, vec![1, 1]),
        "GSg" => ggs_like("GSg", 3, vec![1, 2]),
        "Grig2" => ggs_like("Grig2", 4, vec![1, 0, 1]),
        "GuptaSidki" => {
            let mut g = gupta_sidki(3)?;
            g.name = "GuptaSidki".into();
            Ok(g)
        }
        "Sg" => {
            let s = spec(
                "Sg",
                2,
                &["a", "b", "c", "d"],
                vec![
                    rooted(2, swap),
                    gen(id2.clone(), vec![vec![(0, 1)], vec![(2, 1)]]),
                    gen(id2.clone(), vec![vec![], vec![(3, 1)]]),
                    gen(id2, vec![vec![], vec![(1, 1)]]),
                ],
            );
            from_recursive(&s, Flavor::SpinalTriple, Extras { triple: None, ggs: None })
        }
        "BSV" => {
            let s = spec(
                "BSV",
                2,
                &["a", "m", "t"],
                vec![
                    rooted(2, swap.clone()),
                    gen(swap.clone(), vec![vec![], vec![(1, -1)]]),
                    gen(swap, vec![vec![], vec![(2, 1)]]),
                ],
            );
            from_recursive(&s, Flavor::ExplicitRecursion, Extras { triple: None, ggs: None })
        }
        "Dinf" => {
            let mut g = from_ggs(&GgsVector::new(2, vec![1])?)?;
            g.name = "Dinf".into();
            Ok(g)
        }
        _ => Err(GroupError::UnknownGroup(name.to_string())),
    }
}
