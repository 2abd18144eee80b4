//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are always printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::ba::{all_maps, basis_through_exists, eval_dnf, full, generated, hom_apply, independent_def, is_basis_def, mask, set};
use finmodel::boolean_algebra::{find_basis_containing, is_independent_mod_ideal, pushout, rebase_with_element, BAEmbedding, BAError, FiniteBooleanAlgebra, PrincipalIdeal, Subalgebra};
use finmodel::fraisse::{back_and_forth_check, richness_defect, AmalgamationClass};
use finmodel::k1::{
    amalgamate_free, assembled_witness, build_generic_k1, build_good_chain, check_free_extension, check_good_sequence, check_k1, check_kminus1, check_labeled_sequence, construct_free_witness, enumerate_corpus, find_witness,
    generated_substructure, good_seed, is_k1_isomorphic, is_k1_member, k0_mutants, kminus1_mutants, label_good_sequence, nonoise_check, ranges_meet_in, CorpusBounds, InstanceSpec, K1Class, K1Game, K1Structure,
};
use finmodel::kdim::{configurations, frugal_amalgamate, max_independent_size, shapes, survey_k_disjoint_ap, OutcomeCounts, SurveyConfig};
use finmodel::structure::ElemId;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Maps from `len` atoms onto `range` atoms.
fn surjections(len: usize, range: usize) -> Vec<Vec<usize>> {
    all_maps(len, range).into_iter().filter(|m| (0..range).all(|v| m.contains(&v))).collect()
}

fn embedding_from(map: &[usize], c_atoms: usize) -> BAEmbedding {
    let images = (0..c_atoms).map(|g| set(map.len(), map.iter().enumerate().filter(|(_, v)| **v == g).fold(0, |m, (i, _)| m | 1 << i))).collect();
    BAEmbedding::new(map.len(), images).unwrap()
}

fn image(imgs: &[u64], x: u64) -> u64 {
    imgs.iter().enumerate().filter(|(i, _)| x >> i & 1 == 1).fold(0, |m, (_, y)| m | y)
}

fn pushout_laws() -> Outcome {
    let mut triples = 0;
    let mut universal = 0u64;
    for c in 1..=3usize {
        for a in c..=4usize {
            for b in c..=4usize {
                for sa in surjections(a, c) {
                    for sb in surjections(b, c) {
                        triples += 1;
                        let (ea, eb) = (embedding_from(&sa, c), embedding_from(&sb, c));
                        let p = pushout(&FiniteBooleanAlgebra::new(a), &FiniteBooleanAlgebra::new(b), &FiniteBooleanAlgebra::new(c), &ea, &eb).map_err(|e| e.to_string())?;
                        let np = p.algebra.atom_count();
                        let ia: Vec<u64> = p.i_a.images.iter().map(mask).collect();
                        let ib: Vec<u64> = p.i_b.images.iter().map(mask).collect();
                        let ea_m: Vec<u64> = ea.images.iter().map(mask).collect();
                        let eb_m: Vec<u64> = eb.images.iter().map(mask).collect();
                        ensure(p.i_a.target_atoms == np && p.i_b.target_atoms == np, || "coprojection shape".into())?;
                        // (a) injective coprojections whose ranges meet in the image of C
                        let ra: BTreeSet<u64> = (0..1u64 << a).map(|x| image(&ia, x)).collect();
                        let rb: BTreeSet<u64> = (0..1u64 << b).map(|y| image(&ib, y)).collect();
                        let rc: BTreeSet<u64> = (0..1u64 << c).map(|z| image(&ia, image(&ea_m, z))).collect();
                        ensure(ra.len() == 1 << a && rb.len() == 1 << b, || format!("coprojection not injective over {sa:?} {sb:?}"))?;
                        ensure((0..1u64 << c).all(|z| image(&ia, image(&ea_m, z)) == image(&ib, image(&eb_m, z))), || "square does not commute".into())?;
                        ensure(ra.intersection(&rb).copied().collect::<BTreeSet<_>>() == rc, || format!("ranges meet outside C for {sa:?} {sb:?}"))?;
                        // (b) i_A(x) ≤ i_B(y) iff some z of C has x ≤ e_A(z), e_B(z) ≤ y
                        for x in 0..1u64 << a {
                            for y in 0..1u64 << b {
                                let lhs = image(&ia, x) & !image(&ib, y) == 0;
                                let rhs = (0..1u64 << c).any(|z| x & !image(&ea_m, z) == 0 && image(&eb_m, z) & !y == 0);
                                ensure(lhs == rhs, || format!("order fails at {x:b}, {y:b} for {sa:?} {sb:?}"))?;
                            }
                        }
                        // (c) every compatible pair of homomorphisms into D factors uniquely
                        for d in 1..=3usize {
                            let fa = all_maps(d, a);
                            let fb = all_maps(d, b);
                            for pa in &fa {
                                for pb in &fb {
                                    let agree = (0..c).all(|z| hom_apply(pa, ea_m[z]) == hom_apply(pb, eb_m[z]));
                                    if !agree {
                                        continue;
                                    }
                                    universal += 1;
                                    // h is a map atoms(D) → atoms(P); it factors both iff each
                                    // atom t goes into i_A(pa[t]) ∧ i_B(pb[t])
                                    let count: u64 = (0..d).map(|t| (ia[pa[t]] & ib[pb[t]]).count_ones() as u64).product();
                                    ensure(count == 1, || format!("{count} factorizations into {d} atoms"))?;
                                    let _ = np;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{triples} triples, {universal} homomorphism pairs"))
}

fn independence_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut yes, mut no) = (0, 0);
    for i in 0..1000 {
        let n = rng.gen_range(1..=16usize);
        let k = rng.gen_range(1..=3usize);
        let ys: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=full(n))).collect();
        let xs: Vec<u64> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..=full(n))).collect();
        let d: u64 = if rng.gen_bool(0.5) { 0 } else { (0..n).filter(|_| rng.gen_bool(0.2)).fold(0, |m, t| m | 1 << t) };
        let ys_s: Vec<_> = ys.iter().map(|y| set(n, *y)).collect();
        let xs_s: Vec<_> = xs.iter().map(|x| set(n, *x)).collect();
        let lib = is_independent_mod_ideal(n, &ys_s, &xs_s, &PrincipalIdeal::new(set(n, d)));
        let def = independent_def(n, &ys, &xs, d);
        ensure(lib == def, || format!("instance {i}: library {lib}, definition {def} (n {n}, ys {ys:?}, xs {xs:?}, d {d:b})"))?;
        if def {
            yes += 1;
        } else {
            no += 1;
        }
    }
    ensure(yes > 50 && no > 50, || format!("unbalanced sample: {yes} independent, {no} not"))?;
    Ok(format!("1000 instances, {yes} independent"))
}

/// A random partition of `n` atoms into at most `cells` labels, and a
/// coarsening of it, as cell masks.
fn partition(rng: &mut ChaCha8Rng, n: usize, cells: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..cells)).collect()
}

fn cells_of(labels: &[usize]) -> Vec<u64> {
    let mut by: BTreeMap<usize, u64> = BTreeMap::new();
    for (t, l) in labels.iter().enumerate() {
        *by.entry(*l).or_default() |= 1 << t;
    }
    by.into_values().collect()
}

fn union_of_random_cells(rng: &mut ChaCha8Rng, cells: &[u64]) -> u64 {
    cells.iter().filter(|_| rng.gen_bool(0.5)).fold(0, |m, c| m | c)
}

fn batrans_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut found = 0;
    let mut tries = 0;
    while found < 200 {
        tries += 1;
        ensure(tries < 200_000, || format!("only {found} instances after {tries} tries"))?;
        let n = rng.gen_range(8..=16usize);
        let cells = rng.gen_range(2..=6);
        let l1 = partition(&mut rng, n, cells);
        let c0 = rng.gen_range(1..=3);
        let coarse: Vec<usize> = (0..6).map(|_| rng.gen_range(0..c0)).collect();
        let l0: Vec<usize> = l1.iter().map(|l| coarse[*l]).collect();
        let (b0, b1) = (cells_of(&l0), cells_of(&l1));
        let d2: u64 = (0..n).filter(|_| rng.gen_bool(0.15)).fold(0, |m, t| m | 1 << t);
        let j0: Vec<u64> = (0..rng.gen_range(1..=2)).map(|_| union_of_random_cells(&mut rng, &b1)).collect();
        let j1: Vec<u64> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..=full(n))).collect();
        // I1 = I2 ∩ B1 and I0 = I2 ∩ B0 hold by taking all three ideals below d2
        if !independent_def(n, &j0, &b0, d2) || !independent_def(n, &j1, &b1, d2) {
            continue;
        }
        found += 1;
        let j: Vec<u64> = j0.iter().chain(&j1).copied().collect();
        ensure(independent_def(n, &j, &b0, d2), || format!("conclusion fails: n {n}, J {j:?}, d {d2:b}"))?;
        let js: Vec<_> = j.iter().map(|x| set(n, *x)).collect();
        let b0s: Vec<_> = b0.iter().map(|x| set(n, *x)).collect();
        ensure(is_independent_mod_ideal(n, &js, &b0s, &PrincipalIdeal::new(set(n, d2))), || "library disagrees on the conclusion".into())?;
    }
    Ok(format!("200 instances from {tries} draws"))
}

fn basis_suite() -> Outcome {
    let mut checked = 0;
    for g in 1..=3usize {
        let atoms = 1usize << g;
        let f = FiniteBooleanAlgebra::new(atoms);
        for b in 0..1u64 << atoms {
            let oracle = basis_through_exists(g, b);
            ensure(oracle == (b.count_ones() as usize * 2 == atoms), || format!("oracle: {b:b} in {g} generators"))?;
            match find_basis_containing(&f, g, &set(atoms, b)) {
                Ok(j) => {
                    let jm: Vec<u64> = j.iter().map(mask).collect();
                    ensure(oracle && jm.first() == Some(&b) && is_basis_def(atoms, &jm), || format!("bad basis through {b:b}"))?;
                }
                Err(_) => ensure(!oracle, || format!("no basis found through {b:b} but one exists"))?,
            }
            checked += 1;
        }
    }
    // rebasing
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ok, mut impossible, mut tries) = (0, 0, 0);
    while ok < 100 {
        tries += 1;
        ensure(tries < 100_000, || format!("only {ok} rebased instances"))?;
        let n = rng.gen_range(4..=10usize);
        let d: u64 = (0..n).filter(|_| rng.gen_bool(0.15)).fold(0, |m, t| m | 1 << t);
        let cells = rng.gen_range(1..=3);
        let b1 = cells_of(&partition(&mut rng, n, cells));
        let j1: Vec<u64> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..full(n))).collect();
        if !independent_def(n, &j1, &b1, d) {
            continue;
        }
        let span = generated(n, &j1, d);
        let pool: Vec<u64> = span.iter().copied().filter(|b| independent_def(n, &[*b], &b1, d)).collect();
        if pool.is_empty() {
            continue;
        }
        let b = pool[rng.gen_range(0..pool.len())];
        let sub = Subalgebra::generated_by(n, b1.iter().map(|c| set(n, *c)).collect::<Vec<_>>().iter());
        let j1s: Vec<_> = j1.iter().map(|x| set(n, *x)).collect();
        match rebase_with_element(&FiniteBooleanAlgebra::new(n), &sub, &PrincipalIdeal::new(set(n, d)), &j1s, &set(n, b)) {
            Ok(j) => {
                let jm: Vec<u64> = j.iter().map(mask).collect();
                ensure(jm.contains(&b), || "b is not in J1'".into())?;
                ensure(independent_def(n, &jm, &b1, d), || format!("J1' {jm:?} is not independent"))?;
                ensure(generated(n, &jm, d) == span, || "J1' generates a different algebra".into())?;
                ok += 1;
            }
            Err(BAError::NoBasisThrough { .. }) => {
                // no replacement of the same size through b may exist
                let others: Vec<u64> = span.iter().copied().filter(|x| *x != b).collect();
                let exists = if j1.len() == 1 {
                    generated(n, &[b], d) == span && independent_def(n, &[b], &b1, d)
                } else {
                    others.iter().any(|x| {
                        let cand = [b, *x];
                        generated(n, &cand, d) == span && independent_def(n, &cand, &b1, d)
                    })
                };
                ensure(!exists, || format!("rebase refused but a basis through {b:b} exists"))?;
                impossible += 1;
            }
            Err(e) => return Err(format!("unexpected error {e}")),
        }
    }
    let _ = eval_dnf;
    Ok(format!("{checked} elements; rebased {ok}, {impossible} correctly refused"))
}

fn k1_corpus(trunc_n: usize) -> Vec<K1Structure> {
    let b = CorpusBounds {
        trunc_n,
        max_p0: 2,
        max_p2: 1,
        max_n_star: 1,
        max_pre_values: 1,
    };
    enumerate_corpus(b).iter().map(InstanceSpec::build).collect()
}

fn k1_membership() -> Outcome {
    ensure(check_kminus1(&K1Structure::minimal(3)).passed() && is_k1_member(&K1Structure::minimal(3)), || "minimal structure rejected".into())?;
    let corpus: Vec<K1Structure> = enumerate_corpus(CorpusBounds::standard()).iter().map(InstanceSpec::build).collect();
    let mut pairs = 0;
    for (i, m) in corpus.iter().enumerate() {
        ensure(check_kminus1(m).passed(), || format!("corpus member {i} fails {:?}", check_kminus1(m).failing()))?;
        let w = find_witness(m).ok_or_else(|| format!("corpus member {i} has no witness chain"))?;
        ensure(check_k1(m, Some(&w)).passed(), || format!("corpus member {i} fails with its witness"))?;
    }
    for m in k1_corpus(3) {
        let ids: Vec<ElemId> = m.ids().into_iter().collect();
        for mask in 0..1u32 << ids.len() {
            let pick: BTreeSet<ElemId> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x).collect();
            let (s0, s2): (BTreeSet<ElemId>, BTreeSet<ElemId>) = pick.iter().partition(|x| m.p0.contains(x));
            let (sub, _) = generated_substructure(&m, &s0, &s2);
            let w = construct_free_witness(&sub, &m, None).map_err(|e| format!("no free witness over a substructure: {e}"))?;
            ensure(check_free_extension(&sub, &m, &w).passed(), || "constructed free witness fails".into())?;
            pairs += 1;
        }
    }
    let mutants: Vec<_> = kminus1_mutants(&corpus).into_iter().chain(k0_mutants(&corpus)).collect();
    let mut per_target: BTreeMap<String, usize> = BTreeMap::new();
    for m in &mutants {
        ensure(m.hits_exactly_target(), || format!("mutant for {} ({}) fails {:?}", m.target, m.note, m.failing()))?;
        *per_target.entry(m.target.clone()).or_default() += 1;
    }
    ensure(per_target.len() >= 15, || format!("only {} clauses mutated", per_target.len()))?;
    if let Some((t, n)) = per_target.iter().find(|(_, n)| **n < 10) {
        return Err(format!("clause {t} has only {n} mutants"));
    }
    Ok(format!("{} members, {pairs} substructure pairs, {} mutants over {} clauses", corpus.len(), mutants.len(), per_target.len()))
}

fn amalgam_oracle() -> Outcome {
    let (mut triples, mut compared) = (0, 0);
    for n in [2, 3] {
        let c = k1_corpus(n);
        for (m1, n1, n2) in common::k1_triples(&c, 10) {
            triples += 1;
            let am = amalgamate_free(&m1, &n1, &n2).map_err(|e| e.to_string())?;
            ensure(check_k1(&am.m2, Some(&assembled_witness(&am, &m1, &n2))).passed(), || "amalgam is not a member".into())?;
            ensure(check_free_extension(&m1, &am.m2, &am.witness).passed(), || "amalgam is not free over M1".into())?;
            ensure(ranges_meet_in(&am, &n1), || "ranges meet outside N1".into())?;
            let expected = m1.b_star().count() + n2.b_star().count() - n1.b_star().count();
            ensure(am.m2.b_star().count() == expected && am.e.apply(m1.b_star()).is_subset(am.m2.b_star()), || {
                format!("{} designated atoms, expected {expected}", am.m2.b_star().count())
            })?;
            if am.m2.atoms() > 12 {
                continue;
            }
            let Some(sols) = common::k1_completions(&m1, &n1, &n2, 16) else { continue };
            ensure(sols.iter().any(|s| is_k1_isomorphic(s, &am.m2)), || format!("none of {} completions matches", sols.len()))?;
            compared += 1;
        }
    }
    ensure(triples >= 50, || format!("only {triples} triples"))?;
    Ok(format!("{triples} triples, {compared} compared with all completions"))
}

fn generic_model() -> Outcome {
    let class = K1Class::new(2);
    let g = build_generic_k1(2, 3, 200, None).map_err(|e| e.to_string())?;
    let m = g.approx.last();
    let defect = richness_defect(&class, m, 3, None).map_err(|e| e.to_string())?;
    ensure(defect.is_rich(), || "approximation is not rich at bound 3".into())?;
    let nn = nonoise_check(&class, m, &m.ids(), 3, 1);
    ensure(nn.passed(), || format!("noise: {:?}", nn.failing()))?;
    ensure(check_free_extension(&K1Structure::minimal(2), m, &g.witness).passed(), || "not free over the minimal structure".into())?;
    let seeds = class.members_up_to(3).map_err(|e| e.to_string())?;
    let other = build_generic_k1(2, 3, 200, seeds.last().cloned()).map_err(|e| e.to_string())?;
    ensure(back_and_forth_check(&K1Game::new(m, other.approx.last()), 3), || "runs are not 3-equivalent".into())?;
    Ok(format!("{} atoms after 200 steps", m.atoms()))
}

fn good_sequences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let n = 2 + i % 3;
        let s = good_seed(n, 1 + i % 2);
        let p0: Vec<ElemId> = s.p0.to_vec();
        let first: BTreeSet<ElemId> = p0.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let traces: Vec<BTreeSet<ElemId>> = (0..n).map(|k| if k == 0 { first.clone() } else { BTreeSet::new() }).collect();
        let g = build_good_chain(&s, &traces, 2).map_err(|e| format!("chain {i}: {e}"))?;
        let rep = check_good_sequence(&g, 2, 1);
        ensure(rep.passed(), || format!("chain {i} is not good: {:?}", rep.failing()))?;
        let l = label_good_sequence(&g, 2, 1).map_err(|e| format!("chain {i}: {e}"))?;
        let rep = check_labeled_sequence(&g, &l);
        ensure(rep.passed(), || format!("chain {i} label fails {:?}", rep.failing()))?;
    }
    Ok("20 chains labelled".into())
}

fn survey_oracle() -> Outcome {
    let cfg = SurveyConfig::default();
    let table = survey_k_disjoint_ap(&cfg);
    for (i, (shape, row)) in shapes(cfg.k, cfg.bound).iter().zip(&table.rows).enumerate() {
        let (_, configs) = configurations(&cfg, i, shape);
        let mut counts = OutcomeCounts::default();
        for c in &configs {
            counts.configurations += 1;
            let union = c.union();
            if !c.parts.iter().all(common::kr_member_oracle) {
                counts.not_members += 1;
            } else if c.parts.iter().any(|m| m.len() == union.len()) {
                counts.frugal_impossible += 1;
            } else if common::kr_completions(c).is_empty() {
                counts.no_amalgam += 1;
            } else {
                counts.success += 1;
            }
            if let Ok(m) = frugal_amalgamate(c, cfg.leaf_budget) {
                ensure(common::kr_completions(c).contains(&m), || format!("shape {shape}: amalgam is not a completion"))?;
                ensure(max_independent_size(&m, cfg.r + 2).map_err(|e| e.to_string())? <= cfg.r + 1, || "amalgam has a large independent set".into())?;
            }
        }
        ensure(counts == row.counts, || format!("shape {shape}: survey {:?}, oracle {counts:?}", row.counts))?;
    }
    let t = table.totals();
    Ok(format!("{} configurations, {} amalgamated", t.configurations, t.success))
}

fn determinism() -> Outcome {
    let runs: Vec<Criterion> = vec![
        ("generic", || {
            let g = build_generic_k1(2, 3, 120, None).map_err(|e| e.to_string())?;
            serde_json::to_string(&(&g.approx, &g.witness)).map_err(|e| e.to_string())
        }),
        ("survey", || Ok(survey_k_disjoint_ap(&SurveyConfig { budget: 200, ..SurveyConfig::default() }).to_csv())),
        ("label", || {
            let s = good_seed(3, 2);
            let traces = vec![s.p0.iter().copied().take(1).collect(), BTreeSet::new(), BTreeSet::new()];
            let g = build_good_chain(&s, &traces, 2).map_err(|e| e.to_string())?;
            let l = label_good_sequence(&g, 2, 1).map_err(|e| e.to_string())?;
            serde_json::to_string(&(&g, &l)).map_err(|e| e.to_string())
        }),
        ("amalgamate", || {
            let c = k1_corpus(3);
            let out: Vec<_> = common::k1_triples(&c, 10).iter().take(20).map(|(m1, n1, n2)| amalgamate_free(m1, n1, n2).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
            serde_json::to_string(&out).map_err(|e| e.to_string())
        }),
        ("corpus", || serde_json::to_string(&enumerate_corpus(CorpusBounds::standard())).map_err(|e| e.to_string())),
    ];
    for (name, f) in &runs {
        let (a, b) = (f()?, f()?);
        ensure(a == b, || format!("{name} output differs between runs"))?;
    }
    Ok(format!("{} outputs reproduced byte for byte", runs.len()))
}

const LIMIT: Duration = Duration::from_secs(300);

fn main() {
    let criteria: [Criterion; 10] = [
        ("pushout laws", pushout_laws),
        ("independence matches the definition", independence_oracle),
        ("transitivity of independence", batrans_suite),
        ("bases and rebasing", basis_suite),
        ("K1 membership and mutants", k1_membership),
        ("free amalgams against completions", amalgam_oracle),
        ("generic model", generic_model),
        ("good sequences label", good_sequences),
        ("k-disjoint survey against completions", survey_oracle),
        ("deterministic outputs", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed();
        let outcome = match outcome {
            Ok(_) if secs > LIMIT => Err(format!("took longer than {}s", LIMIT.as_secs())),
            o => o,
        };
        match &outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}, {:.1}s)", i + 1, secs.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}, {:.1}s)", i + 1, secs.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
