use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{AmalgamationClass, EngineError};
use crate::structure::ElemId;

/// A member `b` with a proper member substructure `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionPair<S, E> {
    pub a: S,
    pub b: S,
    pub incl: E,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TaskStatus<E> {
    Pending,
    /// An extension already existed in the chain member current at `at_step`.
    Realized { at_step: usize, g: E },
    /// Solved by amalgamating, which produced chain member `new_index`.
    Amalgamated { at_step: usize, new_index: usize },
}

/// Extend `f: A → chain[chain_index]` along `pairs[pair]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task<E> {
    pub pair: usize,
    pub chain_index: usize,
    pub f: E,
    pub status: TaskStatus<E>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericApproximation<S, E> {
    pub class: String,
    pub bound: usize,
    pub steps: usize,
    pub chain: Vec<S>,
    /// `links[i]: chain[i] → chain[i+1]`.
    pub links: Vec<E>,
    pub pairs: Vec<ExtensionPair<S, E>>,
    pub tasks: Vec<Task<E>>,
    /// Largest `i` such that every task posed on `chain[..=i]` has been handled.
    pub saturated_index: Option<usize>,
}

impl<S, E> GenericApproximation<S, E> {
    pub fn last(&self) -> &S {
        self.chain.last().expect("chain is never empty")
    }

    pub fn pending(&self) -> usize {
        self.tasks.iter().filter(|t| matches!(t.status, TaskStatus::Pending)).count()
    }
}

pub fn extension_pairs<C: AmalgamationClass>(
    class: &C,
    bound: usize,
) -> Result<Vec<ExtensionPair<C::Structure, C::Embedding>>, EngineError> {
    let mut out = Vec::new();
    for b in class.members_up_to(bound)? {
        for (a, incl) in class.proper_substructures(&b) {
            out.push(ExtensionPair { a, b: b.clone(), incl });
        }
    }
    Ok(out)
}

fn enqueue<C: AmalgamationClass>(
    class: &C,
    approx: &mut GenericApproximation<C::Structure, C::Embedding>,
    queue: &mut VecDeque<usize>,
    index: usize,
) {
    let old: Option<BTreeSet<ElemId>> = index.checked_sub(1).map(|i| class.ids(&approx.chain[i]));
    let m = approx.chain[index].clone();
    for (p, pair) in approx.pairs.iter().enumerate() {
        for f in class.embeddings(&pair.a, &m) {
            if old.as_ref().is_some_and(|o| class.range_ids(&f).is_subset(o)) {
                continue;
            }
            queue.push_back(approx.tasks.len());
            approx.tasks.push(Task {
                pair: p,
                chain_index: index,
                f,
                status: TaskStatus::Pending,
            });
        }
    }
}

/// Builds a chain `M_0 ≤ M_1 ≤ ..` by handling extension tasks first in,
/// first out, for at most `steps` tasks. `seed` defaults to the smallest
/// member.
pub fn build_generic<C: AmalgamationClass>(
    class: &C,
    bound: usize,
    steps: usize,
    seed: Option<C::Structure>,
) -> Result<GenericApproximation<C::Structure, C::Embedding>, EngineError> {
    let m0 = match seed {
        Some(s) => {
            if !class.is_member(&s) {
                return Err(EngineError::NotMember);
            }
            s
        }
        None => class
            .members_up_to(bound)?
            .into_iter()
            .min_by_key(|s| class.size(s))
            .ok_or(EngineError::NotMember)?,
    };
    let mut approx = GenericApproximation {
        class: class.name(),
        bound,
        steps: 0,
        chain: vec![m0],
        links: Vec::new(),
        pairs: extension_pairs(class, bound)?,
        tasks: Vec::new(),
        saturated_index: None,
    };
    let mut queue = VecDeque::new();
    enqueue(class, &mut approx, &mut queue, 0);
    while approx.steps < steps {
        let Some(t) = queue.pop_front() else { break };
        let step = approx.steps;
        approx.steps += 1;
        let task = &approx.tasks[t];
        let pair = &approx.pairs[task.pair];
        let mut f = task.f.clone();
        for link in &approx.links[task.chain_index..] {
            f = class.compose(&f, link);
        }
        let last = approx.chain.len() - 1;
        let m = &approx.chain[last];
        if let Some(g) = class.extensions(&pair.a, &pair.b, m, &pair.incl, &f, 1).pop() {
            approx.tasks[t].status = TaskStatus::Realized { at_step: step, g };
            continue;
        }
        let (m2, e, _g) = class.amalgamate(&pair.a, &pair.b, m, &pair.incl, &f)?;
        if !class.is_member(&m2) || !class.is_embedding(m, &m2, &e) {
            return Err(EngineError::AmalgamationFailed(format!(
                "{} produced an invalid amalgam at step {step}",
                class.name()
            )));
        }
        approx.chain.push(m2);
        approx.links.push(e);
        approx.tasks[t].status = TaskStatus::Amalgamated {
            at_step: step,
            new_index: last + 1,
        };
        enqueue(class, &mut approx, &mut queue, last + 1);
    }
    let first_pending = approx
        .tasks
        .iter()
        .filter(|t| matches!(t.status, TaskStatus::Pending))
        .map(|t| t.chain_index)
        .min();
    approx.saturated_index = match first_pending {
        None => Some(approx.chain.len() - 1),
        Some(i) => i.checked_sub(1),
    };
    Ok(approx)
}

/// Extension problems `f: A → M` (with `A < B` up to `bound`) that have no
/// solution in `M`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defect {
    pub checked: usize,
    pub unsolved: usize,
    /// `(pair index, sorted range of f)` for the first few unsolved problems.
    pub examples: Vec<(usize, Vec<ElemId>)>,
}

impl Defect {
    pub fn is_rich(&self) -> bool {
        self.unsolved == 0
    }
}

/// Counts unsolved extension problems in `m`. With `core`, only embeddings
/// whose range lies inside `core` are posed.
pub fn richness_defect<C: AmalgamationClass>(
    class: &C,
    m: &C::Structure,
    bound: usize,
    core: Option<&BTreeSet<ElemId>>,
) -> Result<Defect, EngineError> {
    let mut d = Defect::default();
    for (p, pair) in extension_pairs(class, bound)?.iter().enumerate() {
        for f in class.embeddings(&pair.a, m) {
            let range = class.range_ids(&f);
            if core.is_some_and(|c| !range.is_subset(c)) {
                continue;
            }
            d.checked += 1;
            if class.extensions(&pair.a, &pair.b, m, &pair.incl, &f, 1).is_empty() {
                d.unsolved += 1;
                if d.examples.len() < 8 {
                    d.examples.push((p, range.into_iter().collect()));
                }
            }
        }
    }
    Ok(d)
}
