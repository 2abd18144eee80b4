use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AmalgamationClass, EngineError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JepOutcome {
    pub holds: bool,
    pub pairs_checked: usize,
    /// Member indices `(i, j)` with no common extension among the members.
    pub counterexample: Option<(usize, usize)>,
}

/// Joint embedding for every pair of members up to `bound`, searching for a
/// common extension among members of size at most the sum of the sizes.
pub fn check_jep<C: AmalgamationClass>(class: &C, bound: usize) -> Result<JepOutcome, EngineError> {
    let small = class.members_up_to(bound)?;
    let big = class.members_up_to(2 * bound)?;
    let mut pairs_checked = 0;
    for i in 0..small.len() {
        for j in i..small.len() {
            pairs_checked += 1;
            let (a, b) = (&small[i], &small[j]);
            let cap = class.size(a) + class.size(b);
            let found = big.iter().filter(|d| class.size(d) <= cap).any(|d| {
                !class.embeddings(a, d).is_empty() && !class.embeddings(b, d).is_empty()
            });
            if !found {
                return Ok(JepOutcome {
                    holds: false,
                    pairs_checked,
                    counterexample: Some((i, j)),
                });
            }
        }
    }
    Ok(JepOutcome {
        holds: true,
        pairs_checked,
        counterexample: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApOutcome {
    pub holds: bool,
    pub triples_checked: usize,
    pub failures: Vec<String>,
}

/// Disjoint amalgamation over every `A < B` and `f: A → C` with `B`, `C`
/// members up to `bound`. Each amalgam returned by the class is verified.
pub fn check_disjoint_ap<C: AmalgamationClass>(class: &C, bound: usize) -> Result<ApOutcome, EngineError> {
    let members = class.members_up_to(bound)?;
    let mut out = ApOutcome {
        holds: true,
        triples_checked: 0,
        failures: Vec::new(),
    };
    for (bi, b) in members.iter().enumerate() {
        for (a, incl) in class.proper_substructures(b) {
            for (ci, c) in members.iter().enumerate() {
                for f in class.embeddings(&a, c) {
                    out.triples_checked += 1;
                    if let Err(why) = verify_amalgam(class, &a, b, c, &incl, &f) {
                        out.holds = false;
                        if out.failures.len() < 8 {
                            out.failures.push(format!(
                                "B=#{bi} (size {}), A size {}, C=#{ci}: {why}",
                                class.size(b),
                                class.size(&a)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Calls the class's amalgamation and checks commutation, membership and
/// disjointness of the result.
pub fn verify_amalgam<C: AmalgamationClass>(
    class: &C,
    a: &C::Structure,
    b: &C::Structure,
    c: &C::Structure,
    incl: &C::Embedding,
    f: &C::Embedding,
) -> Result<(), String> {
    let (d, e, g) = class.amalgamate(a, b, c, incl, f).map_err(|e| e.to_string())?;
    if !class.is_member(&d) {
        return Err("amalgam is not a member".into());
    }
    if !class.is_embedding(c, &d, &e) || !class.is_embedding(b, &d, &g) {
        return Err("amalgam maps are not embeddings".into());
    }
    let via_c = class.compose(f, &e);
    if via_c != class.compose(incl, &g) {
        return Err("square does not commute".into());
    }
    let shared: BTreeSet<_> = class.range_ids(&e).intersection(&class.range_ids(&g)).copied().collect();
    if shared != class.range_ids(&via_c) {
        return Err("ranges meet outside the image of A".into());
    }
    Ok(())
}
