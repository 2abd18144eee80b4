use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use finmodel::bitset::AtomSet;
use finmodel::boolean_algebra::{find_basis_containing, is_independent_mod_ideal, pushout, BAEmbedding, FiniteBooleanAlgebra, PrincipalIdeal};
use finmodel::fraisse::{richness_defect, AmalgamationClass};
use finmodel::k1::{
    amalgamate_free, assembled_witness, build_generic_k1, build_good_chain, check_free_extension, check_good_sequence, check_k1, check_kminus1, check_labeled_sequence, construct_free_witness, enumerate_corpus,
    find_witness, generated_substructure, good_seed, label_good_sequence, nonoise_check, CorpusBounds, FreeExtensionWitness, GoodChain, K1Class, K1Structure,
};
use finmodel::kdim::{check_kr0_membership, frugal_amalgamate, max_independent_size, survey_k_disjoint_ap, KConfiguration, KrStructure, SurveyConfig};

use crate::report::{Report, RunConfig};
use crate::{AmalgamClass, CheckClass, Cli, Command};

pub struct Output {
    pub report: Report,
    pub human: Option<String>,
    pub csv: Option<String>,
}

/// Relative paths that do not exist are also looked up under
/// `$FINMODEL_FIXTURES`.
fn resolve(path: &Path) -> std::path::PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os("FINMODEL_FIXTURES") {
            let p = Path::new(&dir).join(path);
            if p.exists() {
                return p;
            }
        }
    }
    path.to_path_buf()
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let path = &resolve(path);
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn save<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("value serializes") + "\n";
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("value serializes")
}

/// `M1 ⊇ N1 ⊆ N2`, with the inclusions given by ids.
#[derive(Serialize, Deserialize)]
pub struct TripleDoc {
    pub m1: K1Structure,
    pub n1: K1Structure,
    pub n2: K1Structure,
}

/// `small ⊆ big`; without a witness one is constructed.
#[derive(Serialize, Deserialize)]
pub struct FreeDoc {
    pub small: K1Structure,
    pub big: K1Structure,
    #[serde(default)]
    pub witness: Option<FreeExtensionWitness>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum BaDoc {
    /// Are `ys` independent over the subalgebra generated by `xs`, modulo
    /// the ideal below `ideal`?
    Independent {
        atoms: usize,
        ys: Vec<AtomSet>,
        #[serde(default)]
        xs: Vec<AtomSet>,
        #[serde(default)]
        ideal: Option<AtomSet>,
    },
    Pushout {
        a: FiniteBooleanAlgebra,
        b: FiniteBooleanAlgebra,
        c: FiniteBooleanAlgebra,
        e_a: BAEmbedding,
        e_b: BAEmbedding,
    },
    /// A basis of the free algebra on `free` generators through `element`.
    Basis { free: usize, element: AtomSet },
}

pub fn run(cli: &Cli, command: Vec<String>) -> Result<Output, String> {
    let o = &cli.opts;
    let mut cfg = RunConfig {
        seed: o.seed,
        ..Default::default()
    };
    let mut human = None;
    let mut csv = None;
    let report = match &cli.command {
        Command::Check { class, file } => {
            let mut rep = Report::new(command, cfg);
            match class {
                CheckClass::K1 => {
                    let m: K1Structure = load(file)?;
                    rep.clauses("", &check_k1(&m, find_witness(&m).as_ref()));
                }
                CheckClass::Kminus1 => {
                    let m: K1Structure = load(file)?;
                    rep.clauses("", &check_kminus1(&m));
                }
                CheckClass::Kr0 => {
                    let m: KrStructure = load(file)?;
                    rep.clauses("", &check_kr0_membership(&m));
                }
                CheckClass::Free => {
                    let d: FreeDoc = load(file)?;
                    let w = match d.witness {
                        Some(w) => w,
                        None => construct_free_witness(&d.small, &d.big, None).map_err(|e| e.to_string())?,
                    };
                    rep.clauses("", &check_free_extension(&d.small, &d.big, &w));
                    rep.data = json(&w);
                }
            }
            rep
        }
        Command::Generic { out } => {
            let n = o.trunc_n.unwrap_or(2);
            let bound = o.bound.unwrap_or(3);
            let steps = o.steps.unwrap_or(200);
            cfg.trunc_n = Some(n);
            cfg.bound = Some(bound);
            cfg.steps = Some(steps);
            let class = K1Class::new(n);
            // seed 0 starts from the minimal structure, seed s from the s-th member
            let start = if o.seed == 0 {
                None
            } else {
                let members = class.members_up_to(bound).map_err(|e| e.to_string())?;
                Some(members[(o.seed as usize - 1) % members.len()].clone())
            };
            let g = build_generic_k1(n, bound, steps, start).map_err(|e| e.to_string())?;
            let m = g.approx.last();
            let mut rep = Report::new(command, cfg);
            let d = richness_defect(&class, m, bound, None).map_err(|e| e.to_string())?;
            rep.item("rich", d.is_rich(), format!("{} problems, {} unsolved", d.checked, d.unsolved));
            rep.clauses("", &nonoise_check(&class, m, &m.ids(), bound, 1));
            let w = check_free_extension(&K1Structure::minimal(n), m, &g.witness);
            rep.clauses("over-minimal.", &w);
            rep.data = serde_json::json!({
                "chain_length": g.approx.chain.len(),
                "pending": g.approx.pending(),
                "atoms": m.atoms(),
                "p0": m.p0.len(),
                "p2": m.p2.len(),
            });
            if let Some(p) = out {
                save(p, m)?;
            }
            rep
        }
        Command::Amalgamate { class, file, out } => match class {
            AmalgamClass::K1 => {
                let t: TripleDoc = load(file)?;
                let am = amalgamate_free(&t.m1, &t.n1, &t.n2).map_err(|e| e.to_string())?;
                let mut rep = Report::new(command, cfg);
                rep.clauses("", &check_k1(&am.m2, Some(&assembled_witness(&am, &t.m1, &t.n2))));
                rep.clauses("", &check_free_extension(&t.m1, &am.m2, &am.witness));
                rep.data = json(&am.m2);
                if let Some(p) = out {
                    save(p, &am.m2)?;
                }
                rep
            }
            AmalgamClass::Kr0 => {
                let c: KConfiguration = load(file)?;
                let cap = o.cap.unwrap_or(1 << 20);
                cfg.cap = Some(cap);
                let mut rep = Report::new(command, cfg);
                match frugal_amalgamate(&c, cap) {
                    Ok(n) => {
                        rep.item("frugal", true, "");
                        rep.clauses("", &check_kr0_membership(&n));
                        rep.data = json(&n);
                        if let Some(p) = out {
                            save(p, &n)?;
                        }
                    }
                    Err(e) => rep.item("frugal", false, e.to_string()),
                }
                rep
            }
        },
        Command::Label { file, surplus, out } => {
            cfg.surplus = Some(*surplus);
            let chain: GoodChain = match file {
                Some(f) => load(f)?,
                None => {
                    let n = o.trunc_n.unwrap_or(3);
                    cfg.trunc_n = Some(n);
                    let seed = good_seed(n, 2);
                    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
                    let first: BTreeSet<u32> = seed.p0.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                    let traces: Vec<BTreeSet<u32>> = (0..n).map(|i| if i == 0 { first.clone() } else { BTreeSet::new() }).collect();
                    build_good_chain(&seed, &traces, *surplus).map_err(|e| e.to_string())?
                }
            };
            let mut rep = Report::new(command, cfg);
            rep.clauses("", &check_good_sequence(&chain, *surplus, 1));
            match label_good_sequence(&chain, *surplus, 1) {
                Ok(l) => {
                    rep.clauses("", &check_labeled_sequence(&chain, &l));
                    rep.data = serde_json::json!({ "c": l.c, "atoms": l.structure.atoms() });
                    if let Some(p) = out {
                        save(p, &l)?;
                    }
                }
                Err(e) => rep.item("label", false, e.to_string()),
            }
            rep
        }
        Command::Survey => {
            let s = survey_config(o, &mut cfg);
            let table = survey_k_disjoint_ap(&s);
            let mut rep = Report::new(command, cfg);
            let t = table.totals();
            rep.item("survey", t.budget_exceeded == 0, format!("{} configurations, {} amalgamated", t.configurations, t.success));
            human = Some(table.to_string());
            csv = Some(table.to_csv());
            rep.data = json(&table);
            rep
        }
        Command::Ba { file } => {
            let d: BaDoc = load(file)?;
            let mut rep = Report::new(command, cfg);
            match d {
                BaDoc::Independent { atoms, ys, xs, ideal } => {
                    let ideal = PrincipalIdeal::new(ideal.unwrap_or_else(|| AtomSet::empty(atoms)));
                    let ok = is_independent_mod_ideal(atoms, &ys, &xs, &ideal);
                    rep.item("independent", ok, "");
                }
                BaDoc::Pushout { a, b, c, e_a, e_b } => match pushout(&a, &b, &c, &e_a, &e_b) {
                    Ok(p) => {
                        let commutes = e_a.then(&p.i_a) == e_b.then(&p.i_b);
                        rep.item("pushout.commutes", commutes, "");
                        rep.data = json(&p);
                    }
                    Err(e) => rep.item("pushout", false, e.to_string()),
                },
                BaDoc::Basis { free, element } => {
                    let f = FiniteBooleanAlgebra::new(1 << free);
                    match find_basis_containing(&f, free, &element) {
                        Ok(j) => {
                            rep.item("basis", true, "");
                            rep.data = json(&j);
                        }
                        Err(e) => rep.item("basis", false, e.to_string()),
                    }
                }
            }
            rep
        }
        Command::Oracle => oracle(o, &mut cfg, command)?,
    };
    Ok(Output { report, human, csv })
}

fn survey_config(o: &crate::GlobalOpts, cfg: &mut RunConfig) -> SurveyConfig {
    let d = SurveyConfig::default();
    let s = SurveyConfig {
        r: o.r.unwrap_or(d.r),
        k: o.k.unwrap_or(d.k),
        bound: o.bound.unwrap_or(d.bound),
        trunc_n: o.trunc_n.unwrap_or(d.trunc_n),
        budget: o.cap.unwrap_or(d.budget),
        seed: o.seed,
        leaf_budget: d.leaf_budget,
    };
    cfg.r = Some(s.r);
    cfg.k = Some(s.k);
    cfg.bound = Some(s.bound);
    cfg.trunc_n = Some(s.trunc_n);
    cfg.cap = Some(s.budget);
    s
}

/// Re-checks results of the fast paths with checks that do not share their
/// code: every frugal amalgam of the survey against membership and the
/// parts, and every constructed free-extension witness on a small corpus.
fn oracle(o: &crate::GlobalOpts, cfg: &mut RunConfig, command: Vec<String>) -> Result<Report, String> {
    let s = survey_config(o, cfg);
    let mut bad = 0;
    let mut seen = 0;
    for (i, shape) in finmodel::kdim::shapes(s.k, s.bound).iter().enumerate() {
        let (_, configs) = finmodel::kdim::configurations(&s, i, shape);
        for c in &configs {
            if let Ok(n) = frugal_amalgamate(c, s.leaf_budget) {
                seen += 1;
                let union: BTreeSet<u32> = c.union();
                let ok = n.universe().iter().copied().collect::<BTreeSet<_>>() == union
                    && c.parts.iter().all(|m| m.len() < n.len() && n.induced(&m.universe().iter().copied().collect()) == *m)
                    && max_independent_size(&n, s.r + 2).is_ok_and(|x| x <= s.r + 1);
                bad += usize::from(!ok);
            }
        }
    }
    let mut rep = Report::new(command, cfg.clone());
    rep.item("kdim.frugal", bad == 0, format!("{seen} amalgams, {bad} wrong"));

    let b = CorpusBounds {
        trunc_n: 3,
        max_p0: 2,
        max_p2: 1,
        max_n_star: 1,
        max_pre_values: 1,
    };
    let (mut pairs, mut failed) = (0, 0);
    for spec in enumerate_corpus(b) {
        let m = spec.build();
        let ids: Vec<u32> = m.ids().into_iter().collect();
        for mask in 0u32..1 << ids.len() {
            let sub: BTreeSet<u32> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x).collect();
            let (n, _) = generated_substructure(&m, &sub, &sub);
            pairs += 1;
            let ok = construct_free_witness(&n, &m, None).is_ok_and(|w| check_free_extension(&n, &m, &w).passed());
            failed += usize::from(!ok);
        }
    }
    rep.item("k1.free-witness", failed == 0, format!("{pairs} pairs, {failed} without a passing witness"));
    Ok(rep)
}
