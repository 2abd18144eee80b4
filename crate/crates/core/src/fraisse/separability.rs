use serde::{Deserialize, Serialize};

use super::{game::generated_iso, AmalgamationClass, EngineError};
use crate::structure::{tuples, ElemId, FiniteStructure, Vocabulary};

/// One literal of an atomic diagram over variables `x_0 .. x_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Literal {
    Distinct(usize, usize),
    Relation { symbol: String, args: Vec<usize>, holds: bool },
    /// `symbol(args) = x_value`, or undefined when `value` is `None`.
    Function { symbol: String, args: Vec<usize>, value: Option<usize> },
    Constant { symbol: String, var: usize },
}

/// A quantifier-free conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramFormula {
    pub arity: usize,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Separability {
    Certified(DiagramFormula),
    /// The formula is satisfied by a tuple that does not enumerate a copy.
    Unknown { formula: DiagramFormula, member: usize, tuple: Vec<ElemId> },
}

/// Trailing decimal index of a family symbol such as `R3`.
fn family_index(name: &str) -> Option<usize> {
    let digits = name.trim_start_matches(|c: char| !c.is_ascii_digit());
    (!digits.is_empty() && digits.len() < name.len()).then(|| digits.parse().ok()).flatten()
}

fn visible(name: &str, voc: &Vocabulary, below: Option<usize>) -> bool {
    match (below, voc.index_bound, family_index(name)) {
        (Some(n), Some(_), Some(i)) => i < n,
        _ => true,
    }
}

impl DiagramFormula {
    /// The atomic diagram of the enumeration `abar` of `a`, using only family
    /// symbols with index below `below` when given.
    pub fn of(a: &FiniteStructure, abar: &[ElemId], below: Option<usize>) -> Self {
        let voc = a.vocabulary();
        let var = |e: ElemId| abar.iter().position(|x| *x == e);
        let idx: Vec<ElemId> = (0..abar.len() as ElemId).collect();
        let positions = |t: Vec<ElemId>| -> Vec<usize> { t.into_iter().map(|i| i as usize).collect() };
        let mut literals = Vec::new();
        for i in 0..abar.len() {
            for j in i + 1..abar.len() {
                literals.push(Literal::Distinct(i, j));
            }
        }
        for (r, sym) in voc.relations.iter().enumerate() {
            if !visible(&sym.name, voc, below) {
                continue;
            }
            for t in tuples(&idx, sym.arity).into_iter().map(positions) {
                let args: Vec<ElemId> = t.iter().map(|i| abar[*i]).collect();
                literals.push(Literal::Relation {
                    symbol: sym.name.clone(),
                    args: t,
                    holds: a.holds(r, &args),
                });
            }
        }
        for (f, sym) in voc.functions.iter().enumerate() {
            if !visible(&sym.name, voc, below) {
                continue;
            }
            for t in tuples(&idx, sym.arity).into_iter().map(positions) {
                let args: Vec<ElemId> = t.iter().map(|i| abar[*i]).collect();
                literals.push(Literal::Function {
                    symbol: sym.name.clone(),
                    args: t,
                    value: a.apply(f, &args).and_then(var),
                });
            }
        }
        for (c, name) in voc.constants.iter().enumerate() {
            if let Some(v) = var(a.constants()[c]) {
                literals.push(Literal::Constant { symbol: name.clone(), var: v });
            }
        }
        DiagramFormula {
            arity: abar.len(),
            literals,
        }
    }

    pub fn satisfied_by(&self, s: &FiniteStructure, bbar: &[ElemId]) -> bool {
        if bbar.len() != self.arity {
            return false;
        }
        let voc = s.vocabulary();
        let args = |t: &[usize]| -> Vec<ElemId> { t.iter().map(|i| bbar[*i]).collect() };
        self.literals.iter().all(|lit| match lit {
            Literal::Distinct(i, j) => bbar[*i] != bbar[*j],
            Literal::Relation { symbol, args: t, holds } => {
                voc.relation_index(symbol).is_some_and(|r| s.holds(r, &args(t)) == *holds)
            }
            Literal::Function { symbol, args: t, value } => voc
                .function_index(symbol)
                .is_some_and(|f| s.apply(f, &args(t)) == value.map(|v| bbar[v])),
            Literal::Constant { symbol, var } => {
                voc.constant_index(symbol).is_some_and(|c| s.constants()[c] == bbar[*var])
            }
        })
    }
}

/// Certifies the diagram of `abar` against every member of the class of
/// cardinality `|A|` up to `bound`: each satisfying tuple must enumerate an
/// isomorphic copy under `abar ↦ bbar`.
pub fn separability_witness<C: AmalgamationClass<Structure = FiniteStructure>>(
    class: &C,
    a: &FiniteStructure,
    abar: &[ElemId],
    bound: usize,
    below: Option<usize>,
) -> Result<Separability, EngineError> {
    if !class.is_member(a) {
        return Err(EngineError::NotMember);
    }
    let formula = DiagramFormula::of(a, abar, below);
    for (mi, b) in class.members_up_to(bound)?.iter().enumerate() {
        if b.len() != a.len() {
            continue;
        }
        for bbar in tuples(b.universe(), abar.len()) {
            if !formula.satisfied_by(b, &bbar) {
                continue;
            }
            let pairs: Vec<_> = abar.iter().copied().zip(bbar.iter().copied()).collect();
            let copy = generated_iso(a, b, &pairs).is_some_and(|m| m.len() == a.len());
            if !copy {
                return Ok(Separability::Unknown {
                    formula,
                    member: mi,
                    tuple: bbar,
                });
            }
        }
    }
    Ok(Separability::Certified(formula))
}
