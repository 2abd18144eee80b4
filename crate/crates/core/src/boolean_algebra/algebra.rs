use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::BAError;
use crate::bitset::AtomSet;

/// A finite Boolean algebra in atom form: the power set of `atoms`, with a
/// marked subset of designated atoms and optional element names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteBooleanAlgebra {
    atoms: usize,
    designated: AtomSet,
    #[serde(default)]
    names: BTreeMap<String, AtomSet>,
}

impl FiniteBooleanAlgebra {
    /// The algebra with `atoms` atoms; `atoms = 1` is the two-element algebra.
    pub fn new(atoms: usize) -> Self {
        assert!(atoms >= 1, "a Boolean algebra has at least one atom here");
        Self {
            atoms,
            designated: AtomSet::empty(atoms),
            names: BTreeMap::new(),
        }
    }

    pub fn with_designated(atoms: usize, designated: AtomSet) -> Self {
        assert_eq!(designated.len(), atoms);
        Self {
            atoms,
            designated,
            names: BTreeMap::new(),
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn designated(&self) -> &AtomSet {
        &self.designated
    }

    pub fn set_designated(&mut self, d: AtomSet) {
        assert_eq!(d.len(), self.atoms);
        self.designated = d;
    }

    pub fn zero(&self) -> AtomSet {
        AtomSet::empty(self.atoms)
    }

    pub fn one(&self) -> AtomSet {
        AtomSet::full(self.atoms)
    }

    pub fn atom(&self, i: usize) -> AtomSet {
        AtomSet::singleton(self.atoms, i)
    }

    pub fn element<I: IntoIterator<Item = usize>>(&self, atoms: I) -> AtomSet {
        AtomSet::from_indices(self.atoms, atoms)
    }

    pub fn is_atom(&self, x: &AtomSet) -> bool {
        x.count() == 1
    }

    pub fn is_trivial(&self, x: &AtomSet) -> bool {
        x.is_empty() || x.is_full()
    }

    pub fn name(&mut self, name: &str, x: AtomSet) {
        assert_eq!(x.len(), self.atoms);
        self.names.insert(name.to_string(), x);
    }

    pub fn named(&self, name: &str) -> Option<&AtomSet> {
        self.names.get(name)
    }

    pub fn names(&self) -> &BTreeMap<String, AtomSet> {
        &self.names
    }

    /// Every element, in increasing bitmask order. Only for small algebras.
    pub fn elements(&self) -> Vec<AtomSet> {
        assert!(self.atoms <= 20, "refusing to list 2^{} elements", self.atoms);
        (0..1u64 << self.atoms).map(|m| AtomSet::from_mask(self.atoms, m)).collect()
    }
}

/// A subalgebra of an ambient finite algebra, stored as its atoms (a
/// partition of the ambient atoms into nonempty cells).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subalgebra {
    cells: Vec<AtomSet>,
}

impl Subalgebra {
    /// `{0, 1}` inside an algebra with `atoms` atoms.
    pub fn trivial(atoms: usize) -> Self {
        Self {
            cells: vec![AtomSet::full(atoms)],
        }
    }

    /// The whole ambient algebra.
    pub fn full(atoms: usize) -> Self {
        Self {
            cells: (0..atoms).map(|i| AtomSet::singleton(atoms, i)).collect(),
        }
    }

    /// From a partition of the ambient atoms into nonempty cells.
    pub fn from_cells(mut cells: Vec<AtomSet>) -> Result<Self, BAError> {
        cells.sort_by_key(|c| c.first());
        BAEmbedding::new(cells.first().map_or(0, |c| c.len()), cells.clone())?;
        Ok(Self { cells })
    }

    /// Labels each atom by its sign pattern over `gens`, then collects one
    /// cell per label; cells come out ordered by their least atom.
    pub fn generated_by<'a, I: IntoIterator<Item = &'a AtomSet>>(atoms: usize, gens: I) -> Self {
        Self::trivial(atoms).refined_by(gens)
    }

    /// The subalgebra generated by this one together with `gens`.
    pub fn refined_by<'a, I: IntoIterator<Item = &'a AtomSet>>(&self, gens: I) -> Self {
        let atoms = self.ambient_atoms();
        let mut label = self.labels();
        let mut count = self.cells.len();
        for g in gens {
            let mut renumber: HashMap<(usize, bool), usize> = HashMap::with_capacity(count * 2);
            for (a, l) in label.iter_mut().enumerate() {
                let next = renumber.len();
                *l = *renumber.entry((*l, g.contains(a))).or_insert(next);
            }
            count = renumber.len();
        }
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut order: HashMap<usize, usize> = HashMap::with_capacity(count);
        for (a, l) in label.iter().enumerate() {
            let next = order.len();
            let k = *order.entry(*l).or_insert(next);
            if k == members.len() {
                members.push(Vec::new());
            }
            members[k].push(a);
        }
        Self {
            cells: members.into_iter().map(|m| AtomSet::from_indices(atoms, m)).collect(),
        }
    }

    /// Splits every cell along `g`.
    pub fn refine(&mut self, g: &AtomSet) {
        let mut next = Vec::with_capacity(self.cells.len() * 2);
        for c in &self.cells {
            let inside = c.meet(g);
            let outside = c.minus(g);
            if !inside.is_empty() {
                next.push(inside);
            }
            if !outside.is_empty() {
                next.push(outside);
            }
        }
        next.sort_by_key(|c| c.first());
        self.cells = next;
    }

    pub fn with(&self, g: &AtomSet) -> Self {
        let mut s = self.clone();
        s.refine(g);
        s
    }

    /// Join of two subalgebras: the common refinement.
    pub fn join(&self, other: &Subalgebra) -> Subalgebra {
        let mut s = self.clone();
        for c in &other.cells {
            s.refine(c);
        }
        s
    }

    /// Intersection of two subalgebras: the finest common coarsening,
    /// computed as connected components of "shares a cell" by union-find.
    pub fn meet(&self, other: &Subalgebra) -> Subalgebra {
        let n = self.ambient_atoms();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in self.cells.iter().chain(&other.cells) {
            let mut it = c.iter();
            if let Some(first) = it.next() {
                for a in it {
                    let (ra, rb) = (find(&mut parent, first), find(&mut parent, a));
                    if ra != rb {
                        parent[rb] = ra;
                    }
                }
            }
        }
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for a in 0..n {
            let r = find(&mut parent, a);
            let next = slot.len();
            let k = *slot.entry(r).or_insert(next);
            if k == members.len() {
                members.push(Vec::new());
            }
            members[k].push(a);
        }
        Subalgebra {
            cells: members.into_iter().map(|m| AtomSet::from_indices(n, m)).collect(),
        }
    }

    /// `labels()[a]` is the index of the cell containing atom `a`.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.ambient_atoms()];
        for (i, c) in self.cells.iter().enumerate() {
            for a in c.iter() {
                out[a] = i;
            }
        }
        out
    }

    pub fn cells(&self) -> &[AtomSet] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn ambient_atoms(&self) -> usize {
        self.cells.first().map_or(0, |c| c.len())
    }

    pub fn contains(&self, x: &AtomSet) -> bool {
        self.cells.iter().all(|c| c.is_subset(x) || !c.intersects(x))
    }

    pub fn is_subalgebra_of(&self, other: &Subalgebra) -> bool {
        let lab = other.labels();
        // Every cell of `other` meeting a cell of `self` must lie inside it.
        self.cells.iter().all(|c| {
            let inside: std::collections::BTreeSet<usize> = c.iter().map(|a| lab[a]).collect();
            inside.iter().map(|i| other.cells[*i].count()).sum::<usize>() == c.count()
        })
    }

    /// The cell indices whose union is `x`, if `x` belongs to the subalgebra.
    pub fn coordinates(&self, x: &AtomSet) -> Option<AtomSet> {
        let mut out = AtomSet::empty(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            if c.is_subset(x) {
                out.insert(i);
            } else if c.intersects(x) {
                return None;
            }
        }
        Some(out)
    }

    pub fn from_coordinates(&self, k: &AtomSet) -> AtomSet {
        let mut out = AtomSet::empty(self.ambient_atoms());
        for i in k.iter() {
            out = out.join(&self.cells[i]);
        }
        out
    }

    /// Abstract copy of the subalgebra together with its inclusion.
    pub fn as_algebra(&self) -> (FiniteBooleanAlgebra, BAEmbedding) {
        let n = self.ambient_atoms();
        (
            FiniteBooleanAlgebra::new(self.cells.len()),
            BAEmbedding {
                target_atoms: n,
                images: self.cells.clone(),
            },
        )
    }

    /// Every element; only for small subalgebras.
    pub fn elements(&self) -> Vec<AtomSet> {
        assert!(self.cells.len() <= 20);
        (0..1u64 << self.cells.len())
            .map(|m| self.from_coordinates(&AtomSet::from_mask(self.cells.len(), m)))
            .collect()
    }
}

/// A unital embedding: each source atom goes to a nonempty set of target
/// atoms, and these sets partition the target atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BAEmbedding {
    pub target_atoms: usize,
    pub images: Vec<AtomSet>,
}

impl BAEmbedding {
    pub fn new(target_atoms: usize, images: Vec<AtomSet>) -> Result<Self, BAError> {
        let e = Self { target_atoms, images };
        e.validate()?;
        Ok(e)
    }

    pub fn identity(atoms: usize) -> Self {
        Self {
            target_atoms: atoms,
            images: (0..atoms).map(|i| AtomSet::singleton(atoms, i)).collect(),
        }
    }

    pub fn source_atoms(&self) -> usize {
        self.images.len()
    }

    pub fn validate(&self) -> Result<(), BAError> {
        let mut seen = AtomSet::empty(self.target_atoms);
        for (i, img) in self.images.iter().enumerate() {
            if img.len() != self.target_atoms {
                return Err(BAError::InvalidEmbedding(format!("image of atom {i} has wrong width")));
            }
            if img.is_empty() {
                return Err(BAError::InvalidEmbedding(format!("atom {i} maps to 0")));
            }
            if img.intersects(&seen) {
                return Err(BAError::InvalidEmbedding(format!("image of atom {i} overlaps an earlier one")));
            }
            seen = seen.join(img);
        }
        if !seen.is_full() {
            return Err(BAError::InvalidEmbedding("images do not cover the target".into()));
        }
        Ok(())
    }

    pub fn apply(&self, x: &AtomSet) -> AtomSet {
        let mut out = AtomSet::empty(self.target_atoms);
        for i in x.iter() {
            out.union_with(&self.images[i]);
        }
        out
    }

    /// The source atom lying above target atom `t`.
    pub fn atom_under(&self, t: usize) -> usize {
        self.images.iter().position(|img| img.contains(t)).expect("valid embedding covers target")
    }

    /// Preimage of an element in the range; `None` if `y` is not in the range.
    pub fn preimage(&self, y: &AtomSet) -> Option<AtomSet> {
        let mut out = AtomSet::empty(self.images.len());
        for (i, img) in self.images.iter().enumerate() {
            if img.is_subset(y) {
                out.insert(i);
            } else if img.intersects(y) {
                return None;
            }
        }
        Some(out)
    }

    pub fn range(&self) -> Subalgebra {
        let mut cells = self.images.clone();
        cells.sort_by_key(|c| c.first());
        Subalgebra { cells }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &BAEmbedding) -> BAEmbedding {
        BAEmbedding {
            target_atoms: other.target_atoms,
            images: self.images.iter().map(|x| other.apply(x)).collect(),
        }
    }
}

/// `{x : x ≤ generator}`; every ideal of a finite algebra is of this form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrincipalIdeal {
    pub generator: AtomSet,
}

impl PrincipalIdeal {
    pub fn new(generator: AtomSet) -> Self {
        Self { generator }
    }

    pub fn zero(atoms: usize) -> Self {
        Self {
            generator: AtomSet::empty(atoms),
        }
    }

    pub fn contains(&self, x: &AtomSet) -> bool {
        x.is_subset(&self.generator)
    }

    pub fn is_proper(&self) -> bool {
        !self.generator.is_full()
    }
}

/// The quotient map `B → B/I`, `x ↦ x ∧ ¬d`, with atoms of the quotient
/// numbered in the order of the surviving atoms of `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    kept: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl Projection {
    pub fn apply(&self, x: &AtomSet) -> AtomSet {
        AtomSet::from_indices(self.kept.len(), x.iter().filter_map(|i| self.index[i]))
    }

    /// The preimage of `y` containing no atom of the ideal's generator.
    pub fn lift(&self, y: &AtomSet) -> AtomSet {
        AtomSet::from_indices(self.index.len(), y.iter().map(|j| self.kept[j]))
    }

    pub fn kept_atoms(&self) -> &[usize] {
        &self.kept
    }
}

pub fn quotient(b: &FiniteBooleanAlgebra, ideal: &PrincipalIdeal) -> Result<(FiniteBooleanAlgebra, Projection), BAError> {
    if !ideal.is_proper() {
        return Err(BAError::ImproperIdeal);
    }
    let kept: Vec<usize> = ideal.generator.complement().iter().collect();
    let mut index = vec![None; b.atom_count()];
    for (j, i) in kept.iter().enumerate() {
        index[*i] = Some(j);
    }
    let proj = Projection { kept, index };
    let q = FiniteBooleanAlgebra::with_designated(proj.kept.len(), proj.apply(b.designated()));
    Ok((q, proj))
}
