//! Boolean algebra oracles on bitmask elements of a power-set algebra.

use std::collections::BTreeSet;

use finmodel::bitset::AtomSet;

pub fn mask(s: &AtomSet) -> u64 {
    s.iter().fold(0, |m, i| m | 1 << i)
}

pub fn set(n: usize, m: u64) -> AtomSet {
    AtomSet::from_mask(n, m)
}

pub fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// Closure of `gens`, every element below `below`, 0 and 1 under meet and
/// complement.
pub fn generated(n: usize, gens: &[u64], below: u64) -> BTreeSet<u64> {
    let mut s: BTreeSet<u64> = [0, full(n)].into_iter().chain(gens.iter().copied()).collect();
    // subsets of `below`
    let mut sub = below;
    loop {
        s.insert(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & below;
    }
    loop {
        let before = s.len();
        let v: Vec<u64> = s.iter().copied().collect();
        for a in &v {
            s.insert(!a & full(n));
            for b in &v {
                s.insert(a & b);
            }
        }
        if s.len() == before {
            return s;
        }
    }
}

/// The value of the polynomial whose DNF is the set of sign vectors in
/// `poly` (bit `e` set: minterm `e` is a disjunct) at `ys`.
pub fn eval_dnf(n: usize, ys: &[u64], poly: u64) -> u64 {
    let mut out = 0;
    for e in 0..1u64 << ys.len() {
        if poly >> e & 1 == 1 {
            let mut m = full(n);
            for (i, y) in ys.iter().enumerate() {
                m &= if e >> i & 1 == 1 { *y } else { !y & full(n) };
            }
            out |= m;
        }
    }
    out
}

/// For every polynomial not identically 0 and every `a ∈ <xs>` outside the
/// ideal below `d`, `p(ys) ∧ a` is outside the ideal.
pub fn independent_def(n: usize, ys: &[u64], xs: &[u64], d: u64) -> bool {
    let base = generated(n, xs, 0);
    let distinct: Vec<u64> = ys.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if distinct.len() != ys.len() {
        // the same element twice: y ∧ ¬y = 0
        return base.iter().all(|a| *a & !d == 0);
    }
    for poly in 1..1u64 << (1u64 << ys.len()) {
        let p = eval_dnf(n, ys, poly);
        for a in &base {
            if a & !d != 0 && p & a & !d == 0 {
                return false;
            }
        }
    }
    true
}

/// `j` freely generates the power-set algebra on `n` atoms: every minterm
/// is a single atom.
pub fn is_basis_def(n: usize, j: &[u64]) -> bool {
    (0..1u64 << j.len()).all(|e| eval_dnf(n, j, 1 << e).count_ones() == 1) && 1usize << j.len() == n
}

/// Some basis of the free algebra on `gens` generators contains `b`:
/// searched over all sets of `gens - 1` further elements.
pub fn basis_through_exists(gens: usize, b: u64) -> bool {
    let n = 1usize << gens;
    let elems: Vec<u64> = (0..1u64 << n).filter(|x| *x != b).collect();
    fn pick(n: usize, elems: &[u64], from: usize, need: usize, chosen: &mut Vec<u64>) -> bool {
        if need == 0 {
            return is_basis_def(n, chosen);
        }
        for i in from..elems.len() {
            chosen.push(elems[i]);
            if pick(n, elems, i + 1, need - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    pick(n, &elems, 0, gens - 1, &mut vec![b])
}

/// The image of `x` under the homomorphism dual to `phi`: atom t of the
/// target lies in h(x) iff atom `phi[t]` of the source lies in x.
pub fn hom_apply(phi: &[usize], x: u64) -> u64 {
    phi.iter().enumerate().fold(0, |acc, (t, s)| acc | ((x >> s & 1) << t))
}

/// Every map `0..len → 0..range`.
pub fn all_maps(len: usize, range: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.iter().flat_map(|p| (0..range).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}
