use std::collections::{BTreeMap, BTreeSet};

use super::{StructureError, Vocabulary};

pub type ElemId = u32;

/// Default cap on the size of a generated substructure.
pub const DEFAULT_CLOSURE_CAP: usize = 512;

/// A finite structure over a [`Vocabulary`]. The universe is kept sorted so
/// every search over it is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    pub(crate) vocabulary: Vocabulary,
    pub(crate) universe: Vec<ElemId>,
    pub(crate) relations: Vec<BTreeSet<Vec<ElemId>>>,
    /// Keys are the defined domain of each (possibly partial) function.
    pub(crate) functions: Vec<BTreeMap<Vec<ElemId>, ElemId>>,
    pub(crate) constants: Vec<ElemId>,
}

impl FiniteStructure {
    /// An empty-universe structure; only valid if the vocabulary has no constants.
    pub fn empty(vocabulary: Vocabulary) -> Self {
        let nr = vocabulary.relations.len();
        let nf = vocabulary.functions.len();
        Self {
            vocabulary,
            universe: Vec::new(),
            relations: vec![BTreeSet::new(); nr],
            functions: vec![BTreeMap::new(); nf],
            constants: Vec::new(),
        }
    }

    pub fn with_universe<I: IntoIterator<Item = ElemId>>(vocabulary: Vocabulary, universe: I) -> Self {
        let mut s = Self::empty(vocabulary);
        let set: BTreeSet<ElemId> = universe.into_iter().collect();
        s.universe = set.into_iter().collect();
        s
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn universe(&self) -> &[ElemId] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, e: ElemId) -> bool {
        self.universe.binary_search(&e).is_ok()
    }

    pub fn position(&self, e: ElemId) -> Option<usize> {
        self.universe.binary_search(&e).ok()
    }

    pub fn next_fresh_id(&self) -> ElemId {
        self.universe.last().map_or(0, |m| m + 1)
    }

    pub fn add_element(&mut self, e: ElemId) {
        if let Err(pos) = self.universe.binary_search(&e) {
            self.universe.insert(pos, e);
        }
    }

    pub fn relation_tuples(&self, rel: usize) -> &BTreeSet<Vec<ElemId>> {
        &self.relations[rel]
    }

    pub fn holds(&self, rel: usize, tuple: &[ElemId]) -> bool {
        self.relations[rel].contains(tuple)
    }

    pub fn set_relation(&mut self, rel: usize, tuple: Vec<ElemId>, value: bool) {
        if value {
            self.relations[rel].insert(tuple);
        } else {
            self.relations[rel].remove(&tuple);
        }
    }

    pub fn insert_by_name(&mut self, rel: &str, tuple: &[ElemId]) -> Result<(), StructureError> {
        let idx = self
            .vocabulary
            .relation_index(rel)
            .ok_or_else(|| StructureError::UnknownSymbol(rel.to_string()))?;
        self.relations[idx].insert(tuple.to_vec());
        Ok(())
    }

    pub fn apply(&self, func: usize, args: &[ElemId]) -> Option<ElemId> {
        self.functions[func].get(args).copied()
    }

    pub fn function_table(&self, func: usize) -> &BTreeMap<Vec<ElemId>, ElemId> {
        &self.functions[func]
    }

    pub fn set_function(&mut self, func: usize, args: Vec<ElemId>, value: Option<ElemId>) {
        match value {
            Some(v) => {
                self.functions[func].insert(args, v);
            }
            None => {
                self.functions[func].remove(&args);
            }
        }
    }

    pub fn define_by_name(&mut self, func: &str, args: &[ElemId], value: ElemId) -> Result<(), StructureError> {
        let idx = self
            .vocabulary
            .function_index(func)
            .ok_or_else(|| StructureError::UnknownSymbol(func.to_string()))?;
        self.functions[idx].insert(args.to_vec(), value);
        Ok(())
    }

    pub fn constants(&self) -> &[ElemId] {
        &self.constants
    }

    pub fn set_constants(&mut self, constants: Vec<ElemId>) {
        self.constants = constants;
    }

    /// Checks the structural invariants: tuples drawn from the universe,
    /// total functions defined everywhere, constants present.
    pub fn validate(&self) -> Result<(), StructureError> {
        self.vocabulary.validate()?;
        let bad = |msg: String| Err(StructureError::InvalidStructure(msg));
        for (sym, tuples) in self.vocabulary.relations.iter().zip(&self.relations) {
            for t in tuples {
                if t.len() != sym.arity || t.iter().any(|e| !self.contains(*e)) {
                    return bad(format!("relation {} has bad tuple {t:?}", sym.name));
                }
            }
        }
        for (sym, table) in self.vocabulary.functions.iter().zip(&self.functions) {
            for (args, v) in table {
                if args.len() != sym.arity || args.iter().chain([v]).any(|e| !self.contains(*e)) {
                    return bad(format!("function {} has bad entry {args:?} -> {v}", sym.name));
                }
            }
            if !sym.partial {
                let expected = self.universe.len().pow(sym.arity as u32);
                if table.len() != expected {
                    return bad(format!(
                        "total function {} defined on {} of {expected} tuples",
                        sym.name,
                        table.len()
                    ));
                }
            }
        }
        if self.constants.len() != self.vocabulary.constants.len() {
            return bad("constant interpretation count mismatch".into());
        }
        if let Some(c) = self.constants.iter().find(|c| !self.contains(**c)) {
            return bad(format!("constant {c} outside universe"));
        }
        Ok(())
    }

    /// The substructure induced on `elems`, which must already be closed.
    pub fn induced(&self, elems: &BTreeSet<ElemId>) -> FiniteStructure {
        let inside = |t: &[ElemId]| t.iter().all(|e| elems.contains(e));
        FiniteStructure {
            vocabulary: self.vocabulary.clone(),
            universe: elems.iter().copied().collect(),
            relations: self
                .relations
                .iter()
                .map(|r| r.iter().filter(|t| inside(t)).cloned().collect())
                .collect(),
            functions: self
                .functions
                .iter()
                .map(|f| {
                    f.iter()
                        .filter(|(a, _)| inside(a))
                        .map(|(a, v)| (a.clone(), *v))
                        .collect()
                })
                .collect(),
            constants: self.constants.clone(),
        }
    }

    /// The least subset containing `generators` and the constants, closed
    /// under every function.
    pub fn closure(&self, generators: &BTreeSet<ElemId>, cap: usize) -> Result<BTreeSet<ElemId>, StructureError> {
        if let Some(e) = generators.iter().find(|e| !self.contains(**e)) {
            return Err(StructureError::NotInUniverse(*e));
        }
        let mut closed: BTreeSet<ElemId> = generators.clone();
        closed.extend(self.constants.iter().copied());
        loop {
            if closed.len() > cap {
                return Err(StructureError::ClosureDiverges { cap });
            }
            let mut added = Vec::new();
            for table in &self.functions {
                for (args, v) in table {
                    if !closed.contains(v) && args.iter().all(|a| closed.contains(a)) {
                        added.push(*v);
                    }
                }
            }
            if added.is_empty() {
                return Ok(closed);
            }
            closed.extend(added);
        }
    }

    /// Substructure generated by `generators`.
    pub fn generate_substructure(&self, generators: &BTreeSet<ElemId>) -> Result<FiniteStructure, StructureError> {
        self.generate_substructure_capped(generators, DEFAULT_CLOSURE_CAP)
    }

    pub fn generate_substructure_capped(
        &self,
        generators: &BTreeSet<ElemId>,
        cap: usize,
    ) -> Result<FiniteStructure, StructureError> {
        let closed = self.closure(generators, cap)?;
        Ok(self.induced(&closed))
    }

    /// Renames elements by `rename`; elements absent from the map keep their id.
    pub fn relabel(&self, rename: &BTreeMap<ElemId, ElemId>) -> FiniteStructure {
        let r = |e: &ElemId| *rename.get(e).unwrap_or(e);
        let mut out = FiniteStructure::with_universe(self.vocabulary.clone(), self.universe.iter().map(r));
        out.relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(r).collect()).collect())
            .collect();
        out.functions = self
            .functions
            .iter()
            .map(|f| f.iter().map(|(a, v)| (a.iter().map(r).collect(), r(v))).collect())
            .collect();
        out.constants = self.constants.iter().map(r).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binop_structure() -> FiniteStructure {
        // f0(a, b) = c on a 6-element universe, identity-ish elsewhere.
        let v = Vocabulary::new().partial_function("f0", 2);
        let mut m = FiniteStructure::with_universe(v, 0..6);
        m.define_by_name("f0", &[0, 1], 2).unwrap();
        m.define_by_name("f0", &[2, 2], 3).unwrap();
        m.define_by_name("f0", &[4, 5], 0).unwrap();
        m
    }

    /// Naive repeated-image iteration, independent of `closure`.
    fn naive_fixpoint(m: &FiniteStructure, x: &BTreeSet<ElemId>) -> BTreeSet<ElemId> {
        let mut cur = x.clone();
        loop {
            let mut next = cur.clone();
            for a in &cur {
                for b in &cur {
                    if let Some(v) = m.apply(0, &[*a, *b]) {
                        next.insert(v);
                    }
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    #[test]
    fn generated_without_functions_is_generators() {
        let v = Vocabulary::new().relation("E", 2);
        let m = FiniteStructure::with_universe(v, 0..4);
        let s = m.generate_substructure(&BTreeSet::from([2])).unwrap();
        assert_eq!(s.universe(), &[2]);
    }

    #[test]
    fn closure_matches_naive_iteration() {
        let m = binop_structure();
        let x = BTreeSet::from([0, 1]);
        let s = m.generate_substructure(&x).unwrap();
        assert_eq!(s.universe(), &[0, 1, 2, 3]);
        assert_eq!(s.universe().iter().copied().collect::<BTreeSet<_>>(), naive_fixpoint(&m, &x));
    }

    #[test]
    fn empty_generators_give_constants_closure() {
        let v = Vocabulary::new().function("s", 1).constant("z");
        let mut m = FiniteStructure::with_universe(v, 0..4);
        for i in 0..4u32 {
            m.define_by_name("s", &[i], (i + 1).min(2)).unwrap();
        }
        m.set_constants(vec![0]);
        let s = m.generate_substructure(&BTreeSet::new()).unwrap();
        assert_eq!(s.universe(), &[0, 1, 2]);
    }

    #[test]
    fn cap_reports_divergence() {
        let m = binop_structure();
        let err = m.generate_substructure_capped(&BTreeSet::from([0, 1]), 3).unwrap_err();
        assert!(matches!(err, StructureError::ClosureDiverges { cap: 3 }));
    }

    #[test]
    fn validate_catches_partiality_of_total_symbol() {
        let v = Vocabulary::new().function("g", 1);
        let mut m = FiniteStructure::with_universe(v, 0..2);
        m.define_by_name("g", &[0], 1).unwrap();
        assert!(m.validate().is_err());
        m.define_by_name("g", &[1], 1).unwrap();
        assert!(m.validate().is_ok());
    }
}
