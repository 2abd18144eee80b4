use super::{is_independent_mod_ideal, BAEmbedding, BAError, FiniteBooleanAlgebra, PrincipalIdeal, Subalgebra};
use crate::bitset::AtomSet;

/// `A ⊗_C B` with its two coprojections. Atom `k` of the pushout is the
/// compatible pair `pairs[k] = (α, β)`: atoms of `A` and `B` lying under the
/// images of the same atom of `C`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Pushout {
    pub algebra: FiniteBooleanAlgebra,
    pub i_a: BAEmbedding,
    pub i_b: BAEmbedding,
    pub pairs: Vec<(usize, usize)>,
}

pub fn pushout(
    a: &FiniteBooleanAlgebra,
    b: &FiniteBooleanAlgebra,
    c: &FiniteBooleanAlgebra,
    e_a: &BAEmbedding,
    e_b: &BAEmbedding,
) -> Result<Pushout, BAError> {
    for (e, target, side) in [(e_a, a, "A"), (e_b, b, "B")] {
        e.validate()?;
        if e.source_atoms() != c.atom_count() || e.target_atoms != target.atom_count() {
            return Err(BAError::InvalidEmbedding(format!("C → {side} has the wrong shape")));
        }
    }
    let mut a_under = vec![0; a.atom_count()];
    for (gamma, img) in e_a.images.iter().enumerate() {
        for t in img.iter() {
            a_under[t] = gamma;
        }
    }
    let mut pairs = Vec::new();
    for (alpha, gamma) in a_under.iter().enumerate() {
        for beta in e_b.images[*gamma].iter() {
            pairs.push((alpha, beta));
        }
    }
    let n = pairs.len();
    let mut by_a = vec![Vec::new(); a.atom_count()];
    let mut by_b = vec![Vec::new(); b.atom_count()];
    for (k, (x, y)) in pairs.iter().enumerate() {
        by_a[*x].push(k);
        by_b[*y].push(k);
    }
    let i_a = BAEmbedding::new(n, by_a.into_iter().map(|ks| AtomSet::from_indices(n, ks)).collect())?;
    let i_b = BAEmbedding::new(n, by_b.into_iter().map(|ks| AtomSet::from_indices(n, ks)).collect())?;
    Ok(Pushout {
        algebra: FiniteBooleanAlgebra::new(n),
        i_a,
        i_b,
        pairs,
    })
}

impl Pushout {
    /// The least `c ∈ C` with `x ≤ e_A(c)`, returned as a `C` element.
    pub fn c_cover_of_a(e_a: &BAEmbedding, x: &AtomSet) -> AtomSet {
        AtomSet::from_indices(
            e_a.source_atoms(),
            (0..e_a.source_atoms()).filter(|g| e_a.images[*g].intersects(x)),
        )
    }

    /// Some `c ∈ C` with `x ≤ e_A(c)` and `e_B(c) ≤ y`, if one exists. By
    /// the pushout's order, this exists iff `i_A(x) ≤ i_B(y)`.
    pub fn separating_c(e_a: &BAEmbedding, e_b: &BAEmbedding, x: &AtomSet, y: &AtomSet) -> Option<AtomSet> {
        let c = Self::c_cover_of_a(e_a, x);
        e_b.apply(&c).is_subset(y).then_some(c)
    }

    pub fn range_a(&self) -> Subalgebra {
        self.i_a.range()
    }

    pub fn range_b(&self) -> Subalgebra {
        self.i_b.range()
    }
}

/// Evaluates the conclusion "`I₂` is independent from `B` modulo `J`" on a
/// pushout, after checking the hypotheses: every nonzero element of
/// `⟨i_A(I₂)⟩` lies outside `J`, and `J` does not contain all of `i_B(B)`.
/// The conclusion is returned as computed, not assumed.
pub fn pushout_independence(d: &Pushout, i2: &[AtomSet], j: &PrincipalIdeal) -> Result<bool, BAError> {
    let n = d.algebra.atom_count();
    if !j.is_proper() {
        return Err(BAError::PreconditionFailed("the ideal contains all of B".into()));
    }
    let ys: Vec<AtomSet> = i2.iter().map(|x| d.i_a.apply(x)).collect();
    let gen = Subalgebra::generated_by(n, &ys);
    if let Some(cell) = gen.cells().iter().find(|c| j.contains(c)) {
        return Err(BAError::PreconditionFailed(format!(
            "nonzero element {cell:?} of the algebra generated by I2 lies in the ideal"
        )));
    }
    Ok(is_independent_mod_ideal(n, &ys, &d.i_b.images, j))
}
