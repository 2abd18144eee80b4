use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::checks::{canonical_witness, check_k1, find_witness};
use super::embed::{inclusion, K1Embedding};
use super::free::{check_free_extension, construct_free_witness, FreeExtensionWitness};
use super::model::K1Structure;
use super::K1Error;
use crate::bitset::AtomSet;
use crate::boolean_algebra::{pushout, quotient, BAEmbedding, FiniteBooleanAlgebra, PrincipalIdeal, Subalgebra};
use crate::structure::ElemId;

/// `M2` with `e : M1 → M2` (the identity on ids), `f : N2 → M2`, and the
/// witness that `M2` is free over `M1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeAmalgam {
    pub m2: K1Structure,
    pub e: K1Embedding,
    pub f: K1Embedding,
    pub witness: FreeExtensionWitness,
    /// The common start index used for every witness chain.
    pub n_star: usize,
}

/// Is `B^big_n ∩ e(P1^small) = e(B^small_n)`?
fn aligned_at(small: &K1Structure, big: &K1Structure, e: &BAEmbedding, n: usize) -> bool {
    let bs = canonical_witness(small, n).chain[0].clone();
    let bb = canonical_witness(big, n).chain[0].clone();
    let image = Subalgebra::from_cells(bs.cells().iter().map(|c| e.apply(c)).collect()).expect("image of a partition");
    bb.meet(&e.range()) == image
}

/// The least `n ≥ from` at which every pair is aligned and stays aligned
/// up to N, if any.
pub fn aligned_index(pairs: &[(&K1Structure, &K1Structure, &BAEmbedding)], from: usize) -> Option<usize> {
    let n = pairs.first()?.1.trunc_n;
    (from..=n).find(|ns| (*ns..=n).all(|k| pairs.iter().all(|(s, b, e)| aligned_at(s, b, e, k))))
}

fn least_n_star(m: &K1Structure, name: &str) -> Result<usize, K1Error> {
    find_witness(m)
        .map(|w| w.n_star)
        .ok_or_else(|| K1Error::NotMember(format!("{name} has no witness chain")))
}

/// Amalgamates `M1 ⊇ N1 ⊆ N2` so that the result is free over `M1`.
///
/// The new designated atoms of `N2` are attached to atoms of `M1` that lie
/// in the right cell of `N1` and avoid the part of `M1`'s basis outside
/// `N1`; the Boolean algebras are then pushed out over the subalgebra
/// generated by `N1` and those atoms, and each designated atom of `M1`
/// outside `N1` is cut back to the part missing every element of `I2`.
pub fn amalgamate_free(m1: &K1Structure, n1: &K1Structure, n2: &K1Structure) -> Result<FreeAmalgam, K1Error> {
    let e1 = inclusion(n1, m1).ok_or(K1Error::NotSubstructure)?;
    let e2 = inclusion(n1, n2).ok_or(K1Error::NotSubstructure)?;
    let from = least_n_star(m1, "M1")?.max(least_n_star(n1, "N1")?).max(least_n_star(n2, "N2")?);
    let ns = aligned_index(&[(n1, m1, &e1.p1), (n1, n2, &e2.p1)], from)
        .ok_or_else(|| K1Error::WitnessAlignmentFailed(format!("no n in {from}..={}", m1.trunc_n)))?;

    // The atoms chosen below must miss every element of I1 outside N1.
    // A witness over N1 itself keeps that set small; over the minimal
    // structure the splitting labels need not respect the cells of N1.
    let i1 = match construct_free_witness(n1, m1, Some(ns)) {
        Ok(w) => w,
        Err(_) => construct_free_witness(&K1Structure::minimal(m1.trunc_n), m1, Some(ns))?,
    };
    let n1_range = e1.p1.range();
    let avoid = i1.i.iter().filter(|y| !n1_range.contains(y)).fold(AtomSet::empty(m1.atoms()), |acc, y| acc.join(y));

    // For each new designated atom x of N2, the atoms of M1 it may attach
    // to: inside the cell of N1 under x, outside P4, and outside the meet
    // of all F_n(c) for every c of M1 not in N1 (otherwise x would lie
    // below F_n(c) for every n < N). Atoms missing I1 outside N1 come first.
    let n1_ids = n1.ids();
    let mut blocked = AtomSet::empty(m1.atoms());
    for (row, _) in m1.f.iter().zip(&m1.p2).filter(|(_, c)| !n1_ids.contains(c)) {
        if let Some(meet) = row.iter().flatten().cloned().reduce(|a, b| a.meet(&b)) {
            blocked.union_with(&meet);
        }
    }
    let mut new_atoms: Vec<usize> = Vec::new();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for x in n2.b_star().iter() {
        let gamma = e2.p1.atom_under(x);
        if n1.b_star().contains(gamma) {
            continue;
        }
        let pool = e1.p1.images[gamma].meet(&m1.free_part()).minus(&blocked);
        let mut list: Vec<usize> = pool.minus(&avoid).iter().collect();
        list.extend(pool.meet(&avoid).iter());
        if list.is_empty() {
            return Err(K1Error::UltrafilterChoiceFailed(format!("atom {x} of N2 over cell {gamma} of N1")));
        }
        new_atoms.push(x);
        candidates.push(list);
    }

    // Choices are tried in lexicographic order; each result is verified.
    let mut choice = vec![0usize; candidates.len()];
    let mut first_err = None;
    for _ in 0..MAX_ATTACHMENTS {
        let attach: Vec<(usize, usize)> = new_atoms.iter().zip(&choice).enumerate().map(|(l, (x, i))| (*x, candidates[l][*i])).collect();
        match attach_and_verify(m1, n1, n2, &e1, &e2, ns, &attach) {
            Ok(am) => return Ok(am),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
        let Some(l) = (0..choice.len()).rev().find(|l| choice[*l] + 1 < candidates[*l].len()) else { break };
        choice[l] += 1;
        for later in &mut choice[l + 1..] {
            *later = 0;
        }
    }
    Err(first_err.unwrap_or_else(|| K1Error::ConstructionFailed("no attachment".into())))
}

const MAX_ATTACHMENTS: usize = 256;

fn attach_and_verify(m1: &K1Structure, n1: &K1Structure, n2: &K1Structure, e1: &K1Embedding, e2: &K1Embedding, ns: usize, new_atoms: &[(usize, usize)]) -> Result<FreeAmalgam, K1Error> {
    // B1: the atoms of M1 followed by one atom per new designated atom.
    let a1 = m1.atoms();
    let b1_atoms = a1 + new_atoms.len();
    let mut g_images: Vec<AtomSet> = (0..a1).map(|t| AtomSet::singleton(b1_atoms, t)).collect();
    for (l, (_, delta)) in new_atoms.iter().enumerate() {
        g_images[*delta].insert(a1 + l);
    }
    let g = BAEmbedding::new(b1_atoms, g_images).map_err(|e| K1Error::ConstructionFailed(e.to_string()))?;
    let mut b1_designated = AtomSet::from_indices(b1_atoms, m1.b_star().iter());
    let added = AtomSet::from_indices(b1_atoms, a1..b1_atoms);
    b1_designated.union_with(&added);
    let b1 = FiniteBooleanAlgebra::with_designated(b1_atoms, b1_designated.clone());

    // B*: the cells of N1 with the new atoms split off, plus those atoms.
    let n2_new = AtomSet::from_indices(n2.atoms(), new_atoms.iter().map(|(x, _)| *x));
    let c_atoms = n1.atoms() + new_atoms.len();
    let mut to_b1: Vec<AtomSet> = e1.p1.images.iter().map(|c| g.apply(c).minus(&added)).collect();
    let mut to_n2: Vec<AtomSet> = e2.p1.images.iter().map(|c| c.minus(&n2_new)).collect();
    for (l, (x, _)) in new_atoms.iter().enumerate() {
        to_b1.push(AtomSet::singleton(b1_atoms, a1 + l));
        to_n2.push(AtomSet::singleton(n2.atoms(), *x));
    }
    let bad = |e: crate::boolean_algebra::BAError| K1Error::ConstructionFailed(e.to_string());
    let c_to_b1 = BAEmbedding::new(b1_atoms, to_b1).map_err(bad)?;
    let c_to_n2 = BAEmbedding::new(n2.atoms(), to_n2).map_err(bad)?;
    let po = pushout(&b1, &n2.algebra, &FiniteBooleanAlgebra::new(c_atoms), &c_to_b1, &c_to_n2).map_err(bad)?;

    // Cut each designated atom of M1 outside N1 down to where I2 is 0.
    let i2 = construct_free_witness(n1, n2, Some(ns))?;
    let mut kill = AtomSet::empty(po.algebra.atom_count());
    for a in m1.b_star().iter().filter(|a| !n1.b_star().contains(e1.p1.atom_under(*a))) {
        let ia = &po.i_a.images[a];
        for b in &i2.i {
            let cut = ia.meet(&po.i_b.apply(b));
            if !cut.is_empty() && &cut != ia {
                kill.union_with(&cut);
            }
        }
    }
    for (side, emb) in [("an atom of M1", &po.i_a), ("an atom of N2", &po.i_b)] {
        if let Some(t) = emb.images.iter().position(|img| img.is_subset(&kill)) {
            return Err(K1Error::CollapseDetected(format!("{side} ({t})")));
        }
    }
    let (_, proj) = quotient(&po.algebra, &PrincipalIdeal::new(kill)).map_err(bad)?;
    let atoms = proj.kept_atoms().len();
    let from_m1 = |x: &AtomSet| proj.apply(&po.i_a.apply(&g.apply(x)));
    let from_n2 = |x: &AtomSet| proj.apply(&po.i_b.apply(x));
    let designated = proj.apply(&po.i_a.apply(&b1_designated));

    // Ids: M1 keeps its own, the new ids of N2 are renamed past them.
    let n1_ids = n1.ids();
    let mut next = m1.next_fresh_id().max(n2.next_fresh_id());
    let mut rename: BTreeMap<ElemId, ElemId> = n1_ids.iter().map(|x| (*x, *x)).collect();
    for x in n2.p0.iter().chain(&n2.p2).filter(|x| !n1_ids.contains(x)) {
        rename.insert(*x, next);
        next += 1;
    }
    let singleton_index = |s: AtomSet| -> Result<usize, K1Error> {
        (s.count() == 1).then(|| s.first().unwrap()).ok_or_else(|| K1Error::ConstructionFailed("G1 value is not an atom".into()))
    };
    let mut m2 = K1Structure {
        trunc_n: m1.trunc_n,
        p0: m1.p0.clone(),
        p2: m1.p2.clone(),
        algebra: FiniteBooleanAlgebra::with_designated(atoms, designated),
        g1: Vec::new(),
        f: m1.f.iter().map(|row| row.iter().map(|v| v.as_ref().map(from_m1)).collect()).collect(),
        free_generators: m1.free_generators.iter().map(from_m1).collect(),
    };
    for i in 0..m1.p0.len() {
        m2.g1.push(singleton_index(from_m1(&m1.g1_element(i)))?);
    }
    for (i, x) in n2.p0.iter().enumerate().filter(|(_, x)| !n1_ids.contains(x)) {
        m2.p0.push(rename[x]);
        m2.g1.push(singleton_index(from_n2(&n2.g1_element(i)))?);
    }
    for (c, x) in n2.p2.iter().enumerate().filter(|(_, x)| !n1_ids.contains(x)) {
        m2.p2.push(rename[x]);
        m2.f.push(n2.f[c].iter().map(|v| v.as_ref().map(from_n2)).collect());
    }

    let e = K1Embedding {
        p0: m1.p0.iter().map(|x| (*x, *x)).collect(),
        p2: m1.p2.iter().map(|x| (*x, *x)).collect(),
        p1: BAEmbedding {
            target_atoms: atoms,
            images: (0..a1).map(|t| from_m1(&AtomSet::singleton(a1, t))).collect(),
        },
    };
    let f = K1Embedding {
        p0: n2.p0.iter().map(|x| (*x, rename[x])).collect(),
        p2: n2.p2.iter().map(|x| (*x, rename[x])).collect(),
        p1: BAEmbedding {
            target_atoms: atoms,
            images: (0..n2.atoms()).map(|t| from_n2(&AtomSet::singleton(n2.atoms(), t))).collect(),
        },
    };
    let witness = FreeExtensionWitness {
        i: i2.i.iter().map(from_n2).collect(),
        h: i2.h.iter().map(|(c, n)| (rename[c], *n)).collect(),
        declared_collisions: Vec::new(),
    };
    let report = check_free_extension(m1, &m2, &witness);
    if !report.passed() {
        return Err(K1Error::ConstructionFailed(format!("M2 over M1: {}", report.failing().join(", "))));
    }
    let am = FreeAmalgam {
        m2,
        e,
        f,
        witness,
        n_star: ns,
    };
    let report = check_k1(&am.m2, Some(&assembled_witness(&am, m1, n2)));
    if !report.passed() {
        return Err(K1Error::ConstructionFailed(format!("M2 is not a member: {}", report.failing().join(", "))));
    }
    Ok(am)
}

/// Disjoint amalgamation of `M1 ⊇ M0 ⊆ M2` inside the finitely generated
/// class, using the free construction.
pub fn disjoint_amalgamate_k1(m0: &K1Structure, m1: &K1Structure, m2: &K1Structure) -> Result<FreeAmalgam, K1Error> {
    amalgamate_free(m1, m0, m2)
}

/// The witness chain of the amalgam assembled from the two sides:
/// `B_n = ⟨e(B^1_n) ∪ f(B^2_n)⟩` for `n* ≤ n ≤ N`.
pub fn assembled_witness(am: &FreeAmalgam, m1: &K1Structure, n2: &K1Structure) -> super::model::K1Witness {
    let w1 = canonical_witness(m1, am.n_star);
    let w2 = canonical_witness(n2, am.n_star);
    let chain = w1
        .chain
        .iter()
        .zip(&w2.chain)
        .map(|(x, y)| {
            let gens: Vec<AtomSet> = x.cells().iter().map(|c| am.e.apply(c)).chain(y.cells().iter().map(|c| am.f.apply(c))).collect();
            Subalgebra::generated_by(am.m2.atoms(), gens.iter())
        })
        .collect();
    super::model::K1Witness {
        n_star: am.n_star,
        b_star: am.m2.b_star().clone(),
        chain,
    }
}

/// Ranges of `e` and `f` in the amalgam meet exactly in the image of `N1`.
pub fn ranges_meet_in(am: &FreeAmalgam, n1: &K1Structure) -> bool {
    let ids_e: BTreeSet<ElemId> = am.e.range_ids();
    let ids_f: BTreeSet<ElemId> = am.f.range_ids();
    let common: BTreeSet<ElemId> = ids_e.intersection(&ids_f).copied().collect();
    if common != n1.ids() {
        return false;
    }
    // The common elements form a subalgebra containing the image of N1;
    // equal atom counts make them equal.
    am.e.p1.range().meet(&am.f.p1.range()).cell_count() == n1.atoms()
}
