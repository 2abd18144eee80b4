use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frugal::{frugal_amalgamate, option_at, option_count, KConfiguration};
use super::structure::KrStructure;
use super::KdimError;
use crate::structure::{tuples, ElemId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub r: usize,
    pub k: usize,
    /// Bound on the size of the union.
    pub bound: usize,
    pub trunc_n: usize,
    /// Configurations per shape; shapes with more are sampled.
    pub budget: usize,
    pub seed: u64,
    pub leaf_budget: usize,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        Self {
            r: 1,
            k: 2,
            bound: 3,
            trunc_n: 2,
            budget: 5000,
            seed: 0,
            leaf_budget: 1 << 20,
        }
    }
}

/// An overlap pattern: `counts[s - 1]` elements lie in exactly the parts
/// named by the nonzero bitmask `s`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub k: usize,
    pub counts: Vec<usize>,
}

impl Shape {
    /// Element ids `0..` in mask order, with their masks.
    pub fn elements(&self) -> Vec<(ElemId, usize)> {
        let mut out = Vec::new();
        for (s, c) in self.counts.iter().enumerate() {
            for _ in 0..*c {
                out.push((out.len() as ElemId, s + 1));
            }
        }
        out
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        (0..self.k).map(|i| self.counts.iter().enumerate().filter(|(s, _)| (s + 1) >> i & 1 == 1).map(|(_, c)| c).sum()).collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("/"))
    }
}

/// All shapes with union size at most `bound`, by total then counts.
pub fn shapes(k: usize, bound: usize) -> Vec<Shape> {
    let regions = (1usize << k) - 1;
    let mut out = Vec::new();
    for total in 0..=bound {
        let mut counts = vec![0; regions];
        compositions(total, 0, &mut counts, &mut |c| out.push(Shape { k, counts: c.to_vec() }));
    }
    out
}

fn compositions(left: usize, at: usize, counts: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        emit(counts);
        return;
    }
    if counts.is_empty() {
        if left == 0 {
            emit(counts);
        }
        return;
    }
    for c in (0..=left).rev() {
        counts[at] = c;
        compositions(left - c, at + 1, counts, emit);
    }
}

/// Configurations of the given shape: every tuple inside some part gets a
/// class and values from the elements of all parts containing it. All of
/// them if there are at most `budget`, otherwise `budget` seeded samples.
/// Parts need not be members.
pub fn configurations(cfg: &SurveyConfig, shape_index: usize, shape: &Shape) -> (bool, Vec<KConfiguration>) {
    let elems = shape.elements();
    let ids: Vec<ElemId> = elems.iter().map(|e| e.0).collect();
    let mask = |e: ElemId| elems[e as usize].1;
    let interior: Vec<(Vec<ElemId>, Vec<ElemId>)> = tuples(&ids, cfg.r + 1)
        .into_iter()
        .filter_map(|t| {
            let common = t.iter().fold(usize::MAX, |m, e| m & mask(*e));
            (common != 0).then(|| {
                let pool = ids.iter().copied().filter(|e| mask(*e) & common == common).collect();
                (t, pool)
            })
        })
        .collect();
    let radix: Vec<usize> = interior.iter().map(|(_, p)| option_count(p.len(), cfg.trunc_n)).collect();
    let total = radix.iter().try_fold(1usize, |acc, r| acc.checked_mul(*r));
    let build = |choice: &[usize]| {
        let mut all = KrStructure::with_universe(cfg.r, cfg.trunc_n, ids.iter().copied());
        for ((t, pool), o) in interior.iter().zip(choice) {
            let (c, v) = option_at(pool, cfg.trunc_n, *o);
            all.set_tuple(t, c, &v);
        }
        let parts = (0..shape.k).map(|i| all.induced(&ids.iter().copied().filter(|e| mask(*e) >> i & 1 == 1).collect())).collect();
        KConfiguration { parts }
    };
    match total {
        Some(t) if t <= cfg.budget => {
            let mut out = Vec::with_capacity(t);
            let mut choice = vec![0usize; radix.len()];
            for _ in 0..t {
                out.push(build(&choice));
                if let Some(p) = (0..choice.len()).rev().find(|p| choice[*p] + 1 < radix[*p]) {
                    choice[p] += 1;
                    for c in &mut choice[p + 1..] {
                        *c = 0;
                    }
                }
            }
            (true, out)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(shape_index as u64);
            let out = (0..cfg.budget)
                .map(|_| {
                    let choice: Vec<usize> = radix.iter().map(|r| rng.gen_range(0..*r)).collect();
                    build(&choice)
                })
                .collect();
            (false, out)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub configurations: usize,
    /// Some part is not a member; not a configuration of the class.
    pub not_members: usize,
    pub success: usize,
    pub no_amalgam: usize,
    pub frugal_impossible: usize,
    pub budget_exceeded: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub shape: Shape,
    pub part_sizes: Vec<usize>,
    pub exhaustive: bool,
    pub counts: OutcomeCounts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyTable {
    pub config: SurveyConfig,
    pub rows: Vec<SurveyRow>,
}

pub fn survey_k_disjoint_ap(cfg: &SurveyConfig) -> SurveyTable {
    let rows = shapes(cfg.k, cfg.bound)
        .into_iter()
        .enumerate()
        .map(|(i, shape)| {
            let (exhaustive, configs) = configurations(cfg, i, &shape);
            let mut counts = OutcomeCounts::default();
            for c in &configs {
                counts.configurations += 1;
                match frugal_amalgamate(c, cfg.leaf_budget) {
                    Ok(_) => counts.success += 1,
                    Err(KdimError::NoAmalgam) => counts.no_amalgam += 1,
                    Err(KdimError::FrugalImpossible(_)) => counts.frugal_impossible += 1,
                    Err(KdimError::SearchBudgetExceeded(_)) => counts.budget_exceeded += 1,
                    Err(_) => counts.not_members += 1,
                }
            }
            SurveyRow {
                part_sizes: shape.part_sizes(),
                shape,
                exhaustive,
                counts,
            }
        })
        .collect();
    SurveyTable { config: *cfg, rows }
}

impl SurveyTable {
    pub fn totals(&self) -> OutcomeCounts {
        self.rows.iter().fold(OutcomeCounts::default(), |a, r| OutcomeCounts {
            configurations: a.configurations + r.counts.configurations,
            not_members: a.not_members + r.counts.not_members,
            success: a.success + r.counts.success,
            no_amalgam: a.no_amalgam + r.counts.no_amalgam,
            frugal_impossible: a.frugal_impossible + r.counts.frugal_impossible,
            budget_exceeded: a.budget_exceeded + r.counts.budget_exceeded,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,k,shape,part_sizes,exhaustive,configurations,not_members,success,no_amalgam,frugal_impossible,budget_exceeded\n");
        for row in &self.rows {
            let c = &row.counts;
            let sizes: Vec<String> = row.part_sizes.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                self.config.r,
                self.config.k,
                row.shape,
                sizes.join("/"),
                row.exhaustive,
                c.configurations,
                c.not_members,
                c.success,
                c.no_amalgam,
                c.frugal_impossible,
                c.budget_exceeded
            ));
        }
        s
    }
}

impl fmt::Display for SurveyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r = {}, k = {}, union ≤ {}, N = {}", self.config.r, self.config.k, self.config.bound, self.config.trunc_n)?;
        writeln!(f, "{:<14} {:<8} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "shape", "sizes", "mode", "configs", "nonmem", "ok", "no-amal", "improper")?;
        for row in &self.rows {
            let c = &row.counts;
            let sizes: Vec<String> = row.part_sizes.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "{:<14} {:<8} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8}",
                row.shape.to_string(),
                sizes.join("/"),
                if row.exhaustive { "all" } else { "sample" },
                c.configurations,
                c.not_members,
                c.success,
                c.no_amalgam,
                c.frugal_impossible
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_for_two_parts() {
        let s = shapes(2, 2);
        assert_eq!(s.len(), 1 + 3 + 6);
        assert_eq!(s[0].counts, vec![0, 0, 0]);
        assert_eq!(Shape { k: 2, counts: vec![1, 0, 2] }.part_sizes(), vec![3, 2]);
    }

    #[test]
    fn bound_one_is_all_improper() {
        let t = survey_k_disjoint_ap(&SurveyConfig { bound: 1, ..Default::default() });
        let tot = t.totals();
        assert_eq!(tot.success + tot.no_amalgam, 0);
        assert!(tot.frugal_impossible > 0);
    }

    #[test]
    fn one_one_one_is_enumerated() {
        let cfg = SurveyConfig::default();
        let (all, configs) = configurations(&cfg, 0, &Shape { k: 2, counts: vec![1, 1, 1] });
        assert!(all);
        assert_eq!(configs.len(), 27 * 27 * 2);
    }
}
