use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::structure::{tuples, ElemId, FiniteStructure};

/// Two structures seen as the boards of an Ehrenfeucht–Fraïssé game.
pub trait GameArena {
    type Move: Clone + Ord + Debug;

    fn left_moves(&self, played: &[Self::Move]) -> Vec<Self::Move>;

    fn right_moves(&self, played: &[Self::Move]) -> Vec<Self::Move>;

    /// Whether pairing `left[i]` with `right[i]` is a partial isomorphism.
    fn partial_iso(&self, left: &[Self::Move], right: &[Self::Move]) -> bool;
}

type Memo<M> = BTreeMap<(Vec<M>, Vec<M>, usize), bool>;

fn duplicator_wins<A: GameArena>(
    arena: &A,
    left: &mut Vec<A::Move>,
    right: &mut Vec<A::Move>,
    rounds: usize,
    memo: &mut Memo<A::Move>,
) -> bool {
    if !arena.partial_iso(left, right) {
        return false;
    }
    if rounds == 0 {
        return true;
    }
    let key = (left.clone(), right.clone(), rounds);
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let mut win = true;
    'spoiler_left: for x in arena.left_moves(left) {
        left.push(x);
        for y in arena.right_moves(right) {
            right.push(y);
            let ok = duplicator_wins(arena, left, right, rounds - 1, memo);
            right.pop();
            if ok {
                left.pop();
                continue 'spoiler_left;
            }
        }
        left.pop();
        win = false;
        break;
    }
    if win {
        'spoiler_right: for y in arena.right_moves(right) {
            right.push(y);
            for x in arena.left_moves(left) {
                left.push(x);
                let ok = duplicator_wins(arena, left, right, rounds - 1, memo);
                left.pop();
                if ok {
                    right.pop();
                    continue 'spoiler_right;
                }
            }
            right.pop();
            win = false;
            break;
        }
    }
    memo.insert(key, win);
    win
}

/// Whether the duplicator survives `rounds` rounds from the empty position.
pub fn back_and_forth_check<A: GameArena>(arena: &A, rounds: usize) -> bool {
    duplicator_survives(arena, &[], &[], rounds)
}

/// Whether the duplicator survives `rounds` further rounds from the given position.
pub fn duplicator_survives<A: GameArena>(arena: &A, left: &[A::Move], right: &[A::Move], rounds: usize) -> bool {
    duplicator_wins(arena, &mut left.to_vec(), &mut right.to_vec(), rounds, &mut BTreeMap::new())
}

/// Extends `pairs` (with the constants) to an isomorphism between the
/// generated substructures, if one exists.
pub fn generated_iso(
    left: &FiniteStructure,
    right: &FiniteStructure,
    pairs: &[(ElemId, ElemId)],
) -> Option<BTreeMap<ElemId, ElemId>> {
    if left.vocabulary() != right.vocabulary() {
        return None;
    }
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    let mut bind = |x: ElemId, y: ElemId, fwd: &mut BTreeMap<ElemId, ElemId>| -> Option<bool> {
        match (fwd.get(&x), back.get(&y)) {
            (None, None) => {
                fwd.insert(x, y);
                back.insert(y, x);
                Some(true)
            }
            (Some(y2), Some(x2)) if *y2 == y && *x2 == x => Some(false),
            _ => None,
        }
    };
    for (x, y) in left.constants().iter().zip(right.constants()).chain(pairs.iter().map(|(x, y)| (x, y))) {
        bind(*x, *y, &mut fwd)?;
    }
    loop {
        let dom: Vec<ElemId> = fwd.keys().copied().collect();
        let mut grew = false;
        for (f, sym) in left.vocabulary().functions.iter().enumerate() {
            for t in tuples(&dom, sym.arity) {
                let t2: Vec<ElemId> = t.iter().map(|x| fwd[x]).collect();
                match (left.apply(f, &t), right.apply(f, &t2)) {
                    (None, None) => {}
                    (Some(v), Some(w)) => grew |= bind(v, w, &mut fwd)?,
                    _ => return None,
                }
            }
        }
        if !grew {
            break;
        }
    }
    let dom: Vec<ElemId> = fwd.keys().copied().collect();
    for (r, sym) in left.vocabulary().relations.iter().enumerate() {
        for t in tuples(&dom, sym.arity) {
            let t2: Vec<ElemId> = t.iter().map(|x| fwd[x]).collect();
            if left.holds(r, &t) != right.holds(r, &t2) {
                return None;
            }
        }
    }
    Some(fwd)
}

/// The game on two finite structures, moves being elements.
pub struct StructureGame<'a> {
    pub left: &'a FiniteStructure,
    pub right: &'a FiniteStructure,
}

impl GameArena for StructureGame<'_> {
    type Move = ElemId;

    fn left_moves(&self, _played: &[ElemId]) -> Vec<ElemId> {
        self.left.universe().to_vec()
    }

    fn right_moves(&self, _played: &[ElemId]) -> Vec<ElemId> {
        self.right.universe().to_vec()
    }

    fn partial_iso(&self, left: &[ElemId], right: &[ElemId]) -> bool {
        let pairs: Vec<_> = left.iter().copied().zip(right.iter().copied()).collect();
        generated_iso(self.left, self.right, &pairs).is_some()
    }
}
