use super::{independent_over, quotient, BAError, FiniteBooleanAlgebra, PrincipalIdeal, Subalgebra};
use crate::bitset::AtomSet;

/// An `n`-element basis of the free algebra on `n` generators (`2^n` atoms)
/// with `b` as its first member.
///
/// Such a basis exists iff `b` lies above exactly half of the atoms: then
/// the atoms can be relabelled by `{0,1}^n` with `b` the first coordinate.
pub fn find_basis_containing(f: &FiniteBooleanAlgebra, n: usize, b: &AtomSet) -> Result<Vec<AtomSet>, BAError> {
    let atoms = f.atom_count();
    if n >= usize::BITS as usize - 1 || atoms != 1usize << n {
        return Err(BAError::NotFree { atoms });
    }
    if b.is_empty() || b.is_full() {
        return Err(BAError::TrivialElement);
    }
    let needed = atoms / 2;
    if b.count() != needed {
        return Err(BAError::NoBasisThrough {
            covered: b.count(),
            needed,
        });
    }
    // Atoms of b get odd labels, the rest even ones, each in increasing order.
    let mut label = vec![0usize; atoms];
    let (mut odd, mut even) = (1, 0);
    for (a, l) in label.iter_mut().enumerate() {
        if b.contains(a) {
            *l = odd;
            odd += 2;
        } else {
            *l = even;
            even += 2;
        }
    }
    Ok((0..n)
        .map(|i| AtomSet::from_indices(atoms, (0..atoms).filter(|a| label[*a] >> i & 1 == 1)))
        .collect())
}

/// Independent over `{0}` and generating the whole algebra.
pub fn is_basis(atoms: usize, j: &[AtomSet]) -> bool {
    independent_over(&Subalgebra::trivial(atoms), j, &PrincipalIdeal::zero(atoms))
        && Subalgebra::generated_by(atoms, j).cell_count() == atoms
}

/// `⟨J ∪ I⟩` for a principal ideal `I`: cells of `⟨J⟩` cut by `d`, plus the
/// atoms of `d` as singletons.
pub fn generated_with_ideal(atoms: usize, j: &[AtomSet], ideal: &PrincipalIdeal) -> Subalgebra {
    let mut s = Subalgebra::generated_by(atoms, j);
    for a in ideal.generator.iter() {
        s.refine(&AtomSet::singleton(atoms, a));
    }
    s
}

/// Replaces `J₁` by a `J₁'` containing `b` that is still independent from
/// `B₁` modulo `I₂` and generates, together with `I₂`, the same subalgebra.
///
/// Works in `B₂/I₂`: the image of `⟨J₁ ∪ I₂⟩` is free on the image of `J₁`;
/// a basis of it through the image of `b` is pulled back along the quotient
/// map, keeping `b` itself as the preimage of its own image.
pub fn rebase_with_element(
    b2: &FiniteBooleanAlgebra,
    b1: &Subalgebra,
    i2: &PrincipalIdeal,
    j1: &[AtomSet],
    b: &AtomSet,
) -> Result<Vec<AtomSet>, BAError> {
    let atoms = b2.atom_count();
    if !independent_over(b1, j1, i2) {
        return Err(BAError::PreconditionFailed("J1 is not independent from B1 modulo I2".into()));
    }
    if !independent_over(b1, std::slice::from_ref(b), i2) {
        return Err(BAError::PreconditionFailed("b is not independent from B1 modulo I2".into()));
    }
    if !generated_with_ideal(atoms, j1, i2).contains(b) {
        return Err(BAError::PreconditionFailed("b is not in the algebra generated by J1 and I2".into()));
    }
    if let Some(pos) = j1.iter().position(|x| x == b) {
        let mut out = j1.to_vec();
        out.swap(0, pos);
        return Ok(out);
    }
    let (q, proj) = quotient(b2, i2)?;
    let images: Vec<AtomSet> = j1.iter().map(|x| proj.apply(x)).collect();
    let span = Subalgebra::generated_by(q.atom_count(), &images);
    let k = j1.len();
    // Independence of J1 makes the image free on k generators.
    debug_assert_eq!(span.cell_count(), 1 << k);
    let (free, _) = span.as_algebra();
    let coords = span
        .coordinates(&proj.apply(b))
        .expect("b lies in the generated algebra modulo the ideal");
    let basis = find_basis_containing(&free, k, &coords)?;
    let mut out = vec![b.clone()];
    out.extend(basis[1..].iter().map(|c| proj.lift(&span.from_coordinates(c))));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_generator() {
        let f = FiniteBooleanAlgebra::new(2);
        let b = AtomSet::singleton(2, 1);
        assert_eq!(find_basis_containing(&f, 1, &b).unwrap(), vec![b]);
    }

    #[test]
    fn half_atom_element_in_four_atoms() {
        let f = FiniteBooleanAlgebra::new(4);
        let b = AtomSet::from_indices(4, [1, 2]);
        let j = find_basis_containing(&f, 2, &b).unwrap();
        assert_eq!(j[0], b);
        assert!(is_basis(4, &j));
    }

    #[test]
    fn errors() {
        let f = FiniteBooleanAlgebra::new(4);
        assert!(matches!(
            find_basis_containing(&f, 2, &AtomSet::singleton(4, 0)),
            Err(BAError::NoBasisThrough { covered: 1, needed: 2 })
        ));
        assert_eq!(find_basis_containing(&f, 2, &f.one()), Err(BAError::TrivialElement));
        let g = FiniteBooleanAlgebra::new(3);
        assert!(matches!(find_basis_containing(&g, 2, &g.atom(0)), Err(BAError::NotFree { atoms: 3 })));
    }

    #[test]
    fn rebase_keeps_member() {
        let b2 = FiniteBooleanAlgebra::new(4);
        let j1 = vec![b2.element([0, 1]), b2.element([0, 2])];
        let b1 = Subalgebra::trivial(4);
        let z = PrincipalIdeal::zero(4);
        let out = rebase_with_element(&b2, &b1, &z, &j1, &j1[1]).unwrap();
        assert_eq!(out[0], j1[1]);
    }

    #[test]
    fn rebase_through_symmetric_difference() {
        // Eight atoms, ideal on atoms 6 and 7.
        let b2 = FiniteBooleanAlgebra::new(8);
        let i2 = PrincipalIdeal::new(b2.element([6, 7]));
        let j1 = vec![b2.element([0, 1, 6]), b2.element([0, 2, 7])];
        let b1 = Subalgebra::trivial(8);
        let b = j1[0].sym_diff(&j1[1]).minus(&i2.generator);
        let out = rebase_with_element(&b2, &b1, &i2, &j1, &b).unwrap();
        assert_eq!(out[0], b);
        assert!(independent_over(&b1, &out, &i2));
        assert_eq!(generated_with_ideal(8, &out, &i2), generated_with_ideal(8, &j1, &i2));
    }

    #[test]
    fn rebase_outside_span_rejected() {
        let b2 = FiniteBooleanAlgebra::new(4);
        let j1 = vec![b2.element([0, 1])];
        let b = b2.element([0, 2]);
        let err = rebase_with_element(&b2, &Subalgebra::trivial(4), &PrincipalIdeal::zero(4), &j1, &b);
        assert!(matches!(err, Err(BAError::PreconditionFailed(_))));
    }
}
