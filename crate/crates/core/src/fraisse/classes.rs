use std::collections::{BTreeMap, BTreeSet};

use super::{AmalgamationClass, EngineError, DEFAULT_ENUMERATION_CAP};
use crate::structure::{
    embeddings_extending, enumerate_embeddings, first_embedding, is_embedding, is_isomorphic, ElemId, Embedding,
    FiniteStructure, Vocabulary,
};

/// Proper substructures generated by subsets of the universe that satisfy
/// `member`, one per generated universe.
fn generated_proper_substructures(
    b: &FiniteStructure,
    member: impl Fn(&FiniteStructure) -> bool,
) -> Vec<(FiniteStructure, Embedding)> {
    let n = b.len();
    assert!(n <= 16, "substructure enumeration over {n} elements");
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        let gens: BTreeSet<ElemId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| b.universe()[i]).collect();
        let Ok(closed) = b.closure(&gens, n) else { continue };
        if closed.len() == n || !seen.insert(closed.clone()) {
            continue;
        }
        let a = b.induced(&closed);
        if member(&a) {
            let incl = Embedding::identity(&a);
            out.push((a, incl));
        }
    }
    out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.universe().cmp(y.0.universe())));
    out
}

/// Keeps the first representative of each isomorphism type.
fn dedupe_isomorphic(all: Vec<FiniteStructure>) -> Vec<FiniteStructure> {
    let mut reps: Vec<FiniteStructure> = Vec::new();
    for s in all {
        if !reps.iter().any(|r| is_isomorphic(r, &s).unwrap_or(false)) {
            reps.push(s);
        }
    }
    reps
}

/// Fresh ids for `b`'s elements outside `incl`'s range, starting above `m`.
fn fresh_names(
    b: &FiniteStructure,
    m: &FiniteStructure,
    incl: &Embedding,
    f: &Embedding,
) -> BTreeMap<ElemId, ElemId> {
    let inv: BTreeMap<ElemId, ElemId> = incl.map.iter().map(|(x, y)| (*y, *x)).collect();
    let mut next = m.next_fresh_id();
    let mut g = BTreeMap::new();
    for x in b.universe() {
        match inv.get(x) {
            Some(a) => {
                g.insert(*x, f.map[a]);
            }
            None => {
                g.insert(*x, next);
                next += 1;
            }
        }
    }
    g
}

macro_rules! structure_class_common {
    () => {
        type Structure = FiniteStructure;
        type Embedding = Embedding;

        fn size(&self, s: &FiniteStructure) -> usize {
            s.len()
        }

        fn ids(&self, s: &FiniteStructure) -> BTreeSet<ElemId> {
            s.universe().iter().copied().collect()
        }

        fn embeddings(&self, a: &FiniteStructure, b: &FiniteStructure) -> Vec<Embedding> {
            enumerate_embeddings(a, b).unwrap_or_default()
        }

        fn is_embedding(&self, a: &FiniteStructure, b: &FiniteStructure, e: &Embedding) -> bool {
            is_embedding(a, b, e)
        }

        fn compose(&self, first: &Embedding, second: &Embedding) -> Embedding {
            first.then(second)
        }

        fn identity(&self, s: &FiniteStructure) -> Embedding {
            Embedding::identity(s)
        }

        fn range_ids(&self, e: &Embedding) -> BTreeSet<ElemId> {
            e.range()
        }

        fn proper_substructures(&self, b: &FiniteStructure) -> Vec<(FiniteStructure, Embedding)> {
            generated_proper_substructures(b, |a| self.is_member(a))
        }

        fn extensions(
            &self,
            _a: &FiniteStructure,
            b: &FiniteStructure,
            m: &FiniteStructure,
            incl: &Embedding,
            f: &Embedding,
            limit: usize,
        ) -> Vec<Embedding> {
            let fixed: BTreeMap<ElemId, ElemId> = incl.map.iter().map(|(x, y)| (*y, f.map[x])).collect();
            embeddings_extending(b, m, &fixed, limit).unwrap_or_default()
        }
    };
}

/// Finite strict linear orders in the vocabulary `{<}`.
#[derive(Clone, Debug, Default)]
pub struct LinearOrders;

impl LinearOrders {
    pub fn vocabulary() -> Vocabulary {
        Vocabulary::new().relation("<", 2)
    }

    /// The chain `0 < 1 < .. < n-1`.
    pub fn chain(n: u32) -> FiniteStructure {
        let mut s = FiniteStructure::with_universe(Self::vocabulary(), 0..n);
        for i in 0..n {
            for j in i + 1..n {
                s.set_relation(0, vec![i, j], true);
            }
        }
        s
    }
}

impl AmalgamationClass for LinearOrders {
    structure_class_common!();

    fn name(&self) -> String {
        "linear-orders".into()
    }

    fn is_member(&self, s: &FiniteStructure) -> bool {
        if s.vocabulary() != &Self::vocabulary() {
            return false;
        }
        let u = s.universe();
        u.iter().all(|x| !s.holds(0, &[*x, *x]))
            && u.iter().all(|x| {
                u.iter()
                    .all(|y| x == y || (s.holds(0, &[*x, *y]) != s.holds(0, &[*y, *x])))
            })
            && u.iter().all(|x| {
                u.iter().all(|y| {
                    u.iter()
                        .all(|z| !(s.holds(0, &[*x, *y]) && s.holds(0, &[*y, *z])) || s.holds(0, &[*x, *z]))
                })
            })
    }

    fn members_up_to(&self, bound: usize) -> Result<Vec<FiniteStructure>, EngineError> {
        Ok((0..=bound as u32).map(Self::chain).collect())
    }

    fn amalgamate(
        &self,
        a: &FiniteStructure,
        b: &FiniteStructure,
        m: &FiniteStructure,
        incl: &Embedding,
        f: &Embedding,
    ) -> Result<(FiniteStructure, Embedding, Embedding), EngineError> {
        let rank_in = |s: &FiniteStructure, x: ElemId| s.universe().iter().filter(|y| s.holds(0, &[**y, x])).count();
        let g = fresh_names(b, m, incl, f);
        // Sort key: M elements at even slots; a new element of B goes just
        // below the image of the least element of A above it.
        let mut keyed: Vec<((usize, usize), ElemId)> = m.universe().iter().map(|x| ((2 * rank_in(m, *x) + 1, 0), *x)).collect();
        let img_a: Vec<ElemId> = a.universe().iter().map(|x| incl.map[x]).collect();
        for x in b.universe() {
            if img_a.contains(x) {
                continue;
            }
            let above = img_a
                .iter()
                .filter(|y| b.holds(0, &[*x, **y]))
                .min_by_key(|y| rank_in(b, **y));
            let slot = match above {
                Some(y) => {
                    let pre = incl.map.iter().find(|(_, v)| *v == y).map(|(k, _)| *k).unwrap();
                    2 * rank_in(m, f.map[&pre])
                }
                None => 2 * m.len(),
            };
            keyed.push(((slot, rank_in(b, *x)), g[x]));
        }
        keyed.sort();
        let order: Vec<ElemId> = keyed.iter().map(|(_, x)| *x).collect();
        let mut d = FiniteStructure::with_universe(Self::vocabulary(), order.iter().copied());
        for (i, x) in order.iter().enumerate() {
            for y in &order[i + 1..] {
                d.set_relation(0, vec![*x, *y], true);
            }
        }
        Ok((d, Embedding::identity(m), Embedding { map: g }))
    }
}

/// Finite simple graphs in the vocabulary `{E}`.
#[derive(Clone, Debug, Default)]
pub struct Graphs;

impl Graphs {
    pub fn vocabulary() -> Vocabulary {
        Vocabulary::new().relation("E", 2)
    }

    pub fn from_edges(n: u32, edges: &[(ElemId, ElemId)]) -> FiniteStructure {
        let mut g = FiniteStructure::with_universe(Self::vocabulary(), 0..n);
        for (x, y) in edges {
            g.set_relation(0, vec![*x, *y], true);
            g.set_relation(0, vec![*y, *x], true);
        }
        g
    }
}

impl AmalgamationClass for Graphs {
    structure_class_common!();

    fn name(&self) -> String {
        "graphs".into()
    }

    fn is_member(&self, s: &FiniteStructure) -> bool {
        s.vocabulary() == &Self::vocabulary()
            && s.relation_tuples(0)
                .iter()
                .all(|t| t[0] != t[1] && s.holds(0, &[t[1], t[0]]))
    }

    fn members_up_to(&self, bound: usize) -> Result<Vec<FiniteStructure>, EngineError> {
        let mut out = Vec::new();
        for n in 0..=bound as u32 {
            let pairs: Vec<(ElemId, ElemId)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            if pairs.len() > 20 {
                return Err(EngineError::EnumerationOverflow { cap: DEFAULT_ENUMERATION_CAP });
            }
            let all = (0u32..1 << pairs.len())
                .map(|mask| {
                    let edges: Vec<_> = pairs
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask >> k & 1 == 1)
                        .map(|(_, e)| *e)
                        .collect();
                    Self::from_edges(n, &edges)
                })
                .collect();
            out.extend(dedupe_isomorphic(all));
        }
        Ok(out)
    }

    fn amalgamate(
        &self,
        _a: &FiniteStructure,
        b: &FiniteStructure,
        m: &FiniteStructure,
        incl: &Embedding,
        f: &Embedding,
    ) -> Result<(FiniteStructure, Embedding, Embedding), EngineError> {
        let g = fresh_names(b, m, incl, f);
        let mut d = m.clone();
        for y in g.values() {
            d.add_element(*y);
        }
        for t in b.relation_tuples(0) {
            d.set_relation(0, vec![g[&t[0]], g[&t[1]]], true);
        }
        Ok((d, Embedding::identity(m), Embedding { map: g }))
    }
}

/// A class given by an explicit list of structures, closed under
/// isomorphism by fiat. Amalgamation searches the list.
#[derive(Clone, Debug)]
pub struct ListedClass {
    pub label: String,
    pub vocabulary: Vocabulary,
    pub members: Vec<FiniteStructure>,
}

impl ListedClass {
    pub fn new(label: &str, vocabulary: Vocabulary, members: Vec<FiniteStructure>) -> Self {
        Self {
            label: label.to_string(),
            vocabulary,
            members: dedupe_isomorphic(members),
        }
    }

    /// `{P(c)}` and `{Q(c)}` with a constant `c`: no listed member embeds both.
    pub fn constant_clash() -> Self {
        let v = Vocabulary::new().relation("P", 1).relation("Q", 1).constant("c");
        let mut p = FiniteStructure::with_universe(v.clone(), [0]);
        p.insert_by_name("P", &[0]).unwrap();
        p.set_constants(vec![0]);
        let mut q = FiniteStructure::with_universe(v.clone(), [0]);
        q.insert_by_name("Q", &[0]).unwrap();
        q.set_constants(vec![0]);
        Self::new("constant-clash", v, vec![p, q])
    }

    /// The class whose only member is the empty structure.
    pub fn empty_only() -> Self {
        let v = Vocabulary::new().relation("E", 2);
        Self::new("empty", v.clone(), vec![FiniteStructure::empty(v)])
    }

    /// GF(2) and GF(4) as structures in `{+, *, 0, 1}`.
    pub fn small_fields() -> Self {
        let v = Vocabulary::new().function("+", 2).function("*", 2).constant("0").constant("1");
        let field = |n: u32, add: &dyn Fn(u32, u32) -> u32, mul: &dyn Fn(u32, u32) -> u32| {
            let mut s = FiniteStructure::with_universe(v.clone(), 0..n);
            for x in 0..n {
                for y in 0..n {
                    s.define_by_name("+", &[x, y], add(x, y)).unwrap();
                    s.define_by_name("*", &[x, y], mul(x, y)).unwrap();
                }
            }
            s.set_constants(vec![0, 1]);
            s
        };
        // GF(4) = {0, 1, w, w+1} encoded as 2-bit polynomials over GF(2) mod w^2+w+1.
        let gf4_mul = |x: u32, y: u32| {
            let mut r = 0;
            for i in 0..2 {
                if y >> i & 1 == 1 {
                    r ^= x << i;
                }
            }
            if r & 4 != 0 {
                r ^= 0b111;
            }
            r
        };
        let gf2 = field(2, &|x, y| x ^ y, &|x, y| x & y);
        let gf4 = field(4, &|x, y| x ^ y, &gf4_mul);
        Self::new("fields-char-2", v, vec![gf2, gf4])
    }
}

impl AmalgamationClass for ListedClass {
    structure_class_common!();

    fn name(&self) -> String {
        self.label.clone()
    }

    fn is_member(&self, s: &FiniteStructure) -> bool {
        self.members.iter().any(|m| is_isomorphic(m, s).unwrap_or(false))
    }

    fn members_up_to(&self, bound: usize) -> Result<Vec<FiniteStructure>, EngineError> {
        Ok(self.members.iter().filter(|m| m.len() <= bound).cloned().collect())
    }

    fn amalgamate(
        &self,
        _a: &FiniteStructure,
        b: &FiniteStructure,
        m: &FiniteStructure,
        incl: &Embedding,
        f: &Embedding,
    ) -> Result<(FiniteStructure, Embedding, Embedding), EngineError> {
        for d in &self.members {
            for e in enumerate_embeddings(m, d).unwrap_or_default() {
                let fixed: BTreeMap<ElemId, ElemId> =
                    incl.map.iter().map(|(x, y)| (*y, e.map[&f.map[x]])).collect();
                for g in embeddings_extending(b, d, &fixed, usize::MAX).unwrap_or_default() {
                    let shared: BTreeSet<ElemId> = e.range().intersection(&g.range()).copied().collect();
                    let base: BTreeSet<ElemId> = fixed.values().copied().collect();
                    if shared != base {
                        continue;
                    }
                    // Rename d so that m keeps its ids.
                    let inv: BTreeMap<ElemId, ElemId> = e.map.iter().map(|(x, y)| (*y, *x)).collect();
                    let mut next = m.next_fresh_id().max(d.next_fresh_id());
                    let mut rename = BTreeMap::new();
                    for x in d.universe() {
                        let y = match inv.get(x) {
                            Some(v) => *v,
                            None => {
                                next += 1;
                                next - 1
                            }
                        };
                        rename.insert(*x, y);
                    }
                    let d2 = d.relabel(&rename);
                    let g2 = Embedding {
                        map: g.map.iter().map(|(x, y)| (*x, rename[y])).collect(),
                    };
                    return Ok((d2, Embedding::identity(m), g2));
                }
            }
        }
        let _ = first_embedding;
        Err(EngineError::AmalgamationFailed(format!(
            "no listed member of {} amalgamates {} and {} elements disjointly",
            self.label,
            b.len(),
            m.len()
        )))
    }
}
