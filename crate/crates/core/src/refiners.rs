//! Relations between two posets acting as continuous maps between their
//! spectra: refiner checks, wedge preservation, application to threads,
//! stars of refiners, star-composition, strong refiners, bi-refinability,
//! back-and-forth stage verification, and level subsequences.
//!
//! A refiner relates target elements to source elements, `q ⊐ p`, and is a
//! refiner when every cap of the target is refined by a cap of the source
//! through the relation.  Since levels are coinitial among caps, scanning
//! target levels against source levels is the truncation-sized version of
//! that condition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::combinatorics::{is_cap, Oracle, ORACLE_DEFAULT_BOUND};
use crate::poset::{Elem, Flag, TruncatedPoset};
use crate::spectrum::{thread_prefix, SelectorPrefix, SpectrumError, Thread};
use crate::stars::StarEngine;
use crate::verdict::{aggregate, Outcome, Verdict, Witness};

/// A finite relation `⊐ ⊆ target × source`; the pair `(q, p)` reads `q ⊐ p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Refiner {
    pub pairs: BTreeSet<(Elem, Elem)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefinerError {
    #[error("pair ({0}, {1}) references elements outside the posets")]
    DeadElement(Elem, Elem),
    #[error("refiner endpoints do not match")]
    EndpointMismatch,
    #[error("stage {0} references elements outside its levels")]
    StageMismatch(usize),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

impl Refiner {
    pub fn new(
        target: &TruncatedPoset,
        source: &TruncatedPoset,
        pairs: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Refiner, RefinerError> {
        let pairs: BTreeSet<(Elem, Elem)> = pairs.into_iter().collect();
        for &(q, p) in &pairs {
            if q >= target.len() || p >= source.len() {
                return Err(RefinerError::DeadElement(q, p));
            }
        }
        Ok(Refiner { pairs })
    }

    /// The identity relation on one poset, as a refiner from it to itself.
    pub fn identity(p: &TruncatedPoset) -> Refiner {
        Refiner {
            pairs: p.elements().map(|e| (e, e)).collect(),
        }
    }

    /// The order `≥` of one poset as a refiner to itself: `q ⊐ p` iff `p ≤ q`.
    pub fn from_geq(p: &TruncatedPoset) -> Refiner {
        let mut pairs = BTreeSet::new();
        for e in p.elements() {
            for u in p.up_closure(&[e]) {
                pairs.insert((u, e));
            }
        }
        Refiner { pairs }
    }

    pub fn contains(&self, q: Elem, p: Elem) -> bool {
        self.pairs.contains(&(q, p))
    }

    /// Composition `(self ∘ other)(r, p) ⇔ ∃q: self(r, q) ∧ other(q, p)`.
    pub fn compose(&self, other: &Refiner) -> Refiner {
        let mut by_first: std::collections::BTreeMap<Elem, Vec<Elem>> =
            std::collections::BTreeMap::new();
        for &(q, p) in &other.pairs {
            by_first.entry(q).or_default().push(p);
        }
        let mut pairs = BTreeSet::new();
        for &(r, q) in &self.pairs {
            if let Some(ps) = by_first.get(&q) {
                for &p in ps {
                    pairs.insert((r, p));
                }
            }
        }
        Refiner { pairs }
    }
}

/// Is the relation a refiner on the visible part: is every target level
/// refined through `⊏` by some source level?
pub fn check_refiner(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r: &Refiner,
    depth: usize,
) -> Verdict {
    let t_depth = depth.min(target.depth());
    // every generated source level may serve as the refining cap
    let s_depth = source.depth();
    let mut verdicts = Vec::new();
    for n in 0..=t_depth {
        let t_level = target.level(n).unwrap();
        let mut refined = false;
        for m in 0..=s_depth {
            let s_level = source.level(m).unwrap();
            if s_level
                .iter()
                .all(|&p| t_level.iter().any(|&q| r.contains(q, p)))
            {
                refined = true;
                break;
            }
        }
        if refined {
            verdicts.push(Verdict::holds());
        } else if target.flags().finite_complete && source.flags().finite_complete {
            // exact: the coarsest source cap that could refine this level is
            // everything related into it
            let related: Vec<Elem> = source
                .elements()
                .filter(|&p| t_level.iter().any(|&q| r.contains(q, p)))
                .collect();
            let v = is_cap(source, &related, s_depth);
            if v.is_fails() {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Level(n))
                        .with_assumption(Flag::FiniteComplete)
                        .with_note("no source cap refines this target level"),
                );
            } else {
                verdicts.push(Verdict::holds().with_assumption(Flag::FiniteComplete));
            }
        } else {
            verdicts.push(Verdict::unknown(depth).with_note(format!(
                "no source level within depth refines target level {n}"
            )));
        }
    }
    aggregate(verdicts)
}

/// Wedge preservation: related pairs with wedging sources must have wedging
/// targets.
pub fn check_wedge_preserving(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r: &Refiner,
    depth: usize,
) -> Verdict {
    let se = StarEngine::new(source);
    let te = StarEngine::new(target);
    let same_poset = std::ptr::eq(target, source);
    let pairs: Vec<(Elem, Elem)> = r.pairs.iter().copied().collect();
    let mut verdicts = Vec::new();
    for (i, &(q, p)) in pairs.iter().enumerate() {
        for &(q2, p2) in &pairs[i..] {
            // on a single poset, pairs sitting above their sources pass
            // outright: a common lower bound propagates upward
            if same_poset && source.leq(p, q) && source.leq(p2, q2) {
                continue;
            }
            let vs = se.wedge(p, p2, depth);
            if vs.is_fails() {
                continue;
            }
            let vt = te.wedge(q, q2, depth);
            match (vs.outcome, vt.outcome) {
                (_, Outcome::Holds) => {}
                (Outcome::Holds, Outcome::Fails) => {
                    return Verdict::fails()
                        .with_witness(Witness::Edges(vec![(q, q2)]))
                        .with_note(format!(
                            "sources `{}`, `{}` wedge but targets do not",
                            source.name(p),
                            source.name(p2)
                        ));
                }
                _ => verdicts.push(Verdict::unknown(depth)),
            }
        }
    }
    aggregate(verdicts)
}

/// Apply the refiner to a thread: image of the thread's prefix, then
/// star-closure in the target.  This is the depth-bounded approximation of
/// the induced continuous map's value.
pub fn apply_refiner(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r: &Refiner,
    t: &Thread,
    depth: usize,
) -> Result<SelectorPrefix, RefinerError> {
    let prefix = thread_prefix(source, t);
    let image: BTreeSet<Elem> = r
        .pairs
        .iter()
        .filter(|(_, p)| prefix.contains(*p))
        .map(|&(q, _)| q)
        .collect();
    let te = StarEngine::new(target);
    let mut members = BTreeSet::new();
    let mut complete = true;
    for q2 in target.elements() {
        let mut found = false;
        for &q in &image {
            match te.star_below(q, q2, depth).outcome {
                Outcome::Holds => {
                    found = true;
                    break;
                }
                Outcome::Unknown => complete = false,
                Outcome::Fails => {}
            }
        }
        if found {
            members.insert(q2);
        }
    }
    Ok(SelectorPrefix::new(
        target,
        members.into_iter().collect(),
        depth.min(target.depth()),
        complete,
    )?)
}

/// The star `⊐*` of a refiner: `q ⊐* p` when an entire decided star of `p`
/// relates into `q`.  A sound under-approximation growing with depth; exact
/// on finite posets by scanning minimal caps.
pub fn star_of_refiner(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r: &Refiner,
    depth: usize,
) -> Refiner {
    let se = StarEngine::new(source);
    let s_depth = depth.min(source.depth());
    let mut pairs = BTreeSet::new();
    let oracle = if source.flags().finite_complete {
        Oracle::new(source, ORACLE_DEFAULT_BOUND).ok()
    } else {
        None
    };
    for p in source.elements() {
        let mut stars: Vec<Vec<Elem>> = Vec::new();
        for n in 0..=s_depth {
            let star = se.level_star(p, n, s_depth);
            if star.decided {
                stars.push(star.members);
            }
        }
        if let Some(oracle) = &oracle {
            for cap in oracle.minimal_caps() {
                let members: Vec<Elem> = cap
                    .iter()
                    .copied()
                    .filter(|&c| source.common_lower_bound(c, p).is_some())
                    .collect();
                stars.push(members);
            }
        }
        for q in target.elements() {
            if stars
                .iter()
                .any(|star| !star.is_empty() && star.iter().all(|&c| r.contains(q, c)))
            {
                pairs.insert((q, p));
            }
        }
    }
    Refiner { pairs }
}

/// Star-composition `r2 * r1 = (r2 ∘ r1)*`.
pub fn star_compose(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r2: &Refiner,
    r1: &Refiner,
    depth: usize,
) -> Refiner {
    star_of_refiner(target, source, &r2.compose(r1), depth)
}

/// Strong refiner: `⊐ = ▷ * ⊐`.  The star side is an under-approximation,
/// so extra pairs on the star side refute; equality is only certified when
/// the computation was exact (finite posets).
pub fn check_strong(
    target: &TruncatedPoset,
    source: &TruncatedPoset,
    r: &Refiner,
    depth: usize,
) -> Verdict {
    let star_above = star_of_refiner(target, target, &Refiner::from_geq(target), depth);
    let starred = star_compose(target, source, &star_above, r, depth);
    if let Some(&(q, p)) = starred.pairs.difference(&r.pairs).next() {
        return Verdict::fails()
            .with_witness(Witness::Edges(vec![(q, p)]))
            .with_note("the star-composition strictly extends the refiner");
    }
    if starred.pairs == r.pairs {
        if target.flags().finite_complete && source.flags().finite_complete {
            return Verdict::holds().with_assumption(Flag::FiniteComplete);
        }
        return Verdict::unknown(depth.min(source.depth()))
            .with_note("equal on all pairs decided at this depth");
    }
    Verdict::unknown(depth.min(source.depth()))
        .with_note("star-composition not yet settled at this depth")
}

/// Bi-refinability: both composites must land inside the respective
/// cap-orders.  The order itself is the sound sub-test; finite posets are
/// decided exactly.
pub fn check_birefinable(
    p_poset: &TruncatedPoset,
    q_poset: &TruncatedPoset,
    r: &Refiner,
    s: &Refiner,
    depth: usize,
) -> Verdict {
    let mut verdicts = Vec::new();
    let mut side = |poset: &TruncatedPoset, comp: &Refiner| {
        let oracle = if poset.flags().finite_complete {
            Oracle::new(poset, ORACLE_DEFAULT_BOUND).ok()
        } else {
            None
        };
        for &(x, y) in &comp.pairs {
            if poset.leq(y, x) {
                continue; // y ≤ x implies y ≾ x
            }
            match &oracle {
                Some(o) => {
                    if !o.cap_order(y, x) {
                        verdicts.push(
                            Verdict::fails()
                                .with_witness(Witness::Edges(vec![(x, y)]))
                                .with_assumption(Flag::FiniteComplete)
                                .with_note("composite pair outside the cap-order"),
                        );
                        return;
                    }
                }
                None => verdicts.push(Verdict::unknown(depth).with_note(
                    "composite pair not below in the order; cap-order undecidable here",
                )),
            }
        }
    };
    side(q_poset, &r.compose(s));
    side(p_poset, &s.compose(r));
    aggregate(verdicts).with_note("composites land in the cap-orders")
}

/// One stage of a back-and-forth system: `forward` relates level `n` of the
/// first poset to level `n` of the second, `back` relates level `n+1` of
/// the second back to level `n` of the first.
#[derive(Clone, Debug, Default)]
pub struct Stage {
    pub forward: Vec<(Elem, Elem)>,
    pub back: Vec<(Elem, Elem)>,
}

#[derive(Clone, Debug, Default)]
pub struct Stages {
    pub stages: Vec<Stage>,
}

/// Verify the back-and-forth hypotheses stage by stage: totality both ways,
/// wedge preservation both ways, and the two composition bounds.  Holding
/// stages certify the homeomorphism hypotheses at this depth.
pub fn verify_back_and_forth(
    pa: &TruncatedPoset,
    pb: &TruncatedPoset,
    stages: &Stages,
    depth: usize,
) -> Result<Verdict, RefinerError> {
    let ea = StarEngine::new(pa);
    let eb = StarEngine::new(pb);
    // stages bound the claim; wedge evidence may use every generated level
    let (da, db) = (pa.depth(), pb.depth());
    let n_stages = stages
        .stages
        .len()
        .min(depth)
        .min(pa.depth() + 1)
        .min(pb.depth());
    let mut verdicts = Vec::new();
    for n in 0..n_stages {
        let stage = &stages.stages[n];
        let level_a: BTreeSet<Elem> = pa.level(n).unwrap().iter().copied().collect();
        let level_b: BTreeSet<Elem> = pb.level(n).unwrap().iter().copied().collect();
        let level_b_next: BTreeSet<Elem> = pb.level(n + 1).unwrap().iter().copied().collect();
        for &(a, b) in &stage.forward {
            if !level_a.contains(&a) || !level_b.contains(&b) {
                return Err(RefinerError::StageMismatch(n));
            }
        }
        for &(b, a) in &stage.back {
            if !level_b_next.contains(&b) || !level_a.contains(&a) {
                return Err(RefinerError::StageMismatch(n));
            }
        }
        // totality: forward on the first poset's level, back on the second's
        // next level
        for &a in &level_a {
            if !stage.forward.iter().any(|&(x, _)| x == a) {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![a]))
                        .with_note(format!("stage {n}: forward relation misses an element")),
                );
            }
        }
        for &b in &level_b_next {
            if !stage.back.iter().any(|&(x, _)| x == b) {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![b]))
                        .with_note(format!("stage {n}: back relation misses an element")),
                );
            }
        }
        // wedge preservation, forward: wedging first-poset sides force
        // wedging second-poset sides
        for (i, &(a, b)) in stage.forward.iter().enumerate() {
            for &(a2, b2) in &stage.forward[i..] {
                let va = ea.wedge(a, a2, da);
                if va.is_fails() {
                    continue;
                }
                let vb = eb.wedge(b, b2, db);
                match (va.outcome, vb.outcome) {
                    (_, Outcome::Holds) => {}
                    (Outcome::Holds, Outcome::Fails) => verdicts.push(
                        Verdict::fails()
                            .with_witness(Witness::Edges(vec![(a, a2)]))
                            .with_note(format!("stage {n}: forward relation breaks a wedge")),
                    ),
                    _ => verdicts.push(Verdict::unknown(depth)),
                }
            }
        }
        // wedge preservation, back
        for (i, &(b, a)) in stage.back.iter().enumerate() {
            for &(b2, a2) in &stage.back[i..] {
                let vb = eb.wedge(b, b2, db);
                if vb.is_fails() {
                    continue;
                }
                let va = ea.wedge(a, a2, da);
                match (vb.outcome, va.outcome) {
                    (_, Outcome::Holds) => {}
                    (Outcome::Holds, Outcome::Fails) => verdicts.push(
                        Verdict::fails()
                            .with_witness(Witness::Edges(vec![(b, b2)]))
                            .with_note(format!("stage {n}: back relation breaks a wedge")),
                    ),
                    _ => verdicts.push(Verdict::unknown(depth)),
                }
            }
        }
        // back ∘ forward lands in the second poset's order
        for &(a, b) in &stage.forward {
            for &(b2, a2) in &stage.back {
                if a2 == a && !pb.leq(b2, b) {
                    verdicts.push(
                        Verdict::fails()
                            .with_witness(Witness::Edges(vec![(b2, b)]))
                            .with_note(format!("stage {n}: back∘forward escapes the order")),
                    );
                }
            }
        }
        // forward ∘ back lands in the first poset's order
        if n + 1 < stages.stages.len() {
            for &(b2, a2) in &stage.back {
                for &(a3, b3) in &stages.stages[n + 1].forward {
                    if b3 == b2 && !pa.leq(a3, a2) {
                        verdicts.push(
                            Verdict::fails()
                                .with_witness(Witness::Edges(vec![(a3, a2)]))
                                .with_note(format!("stage {n}: forward∘back escapes the order")),
                        );
                    }
                }
            }
        }
    }
    Ok(aggregate(verdicts))
}

/// The subposet on levels `0, step, 2·step, ...`, with the induced order.
/// Subsequences of levels keep a coinitial family of bands, so the spectrum
/// is unchanged; the two restriction refiners witness that.
pub fn level_subsequence(p: &TruncatedPoset, step: usize) -> TruncatedPoset {
    assert!(step >= 1);
    let picked: Vec<usize> = (0..=p.depth()).step_by(step).collect();
    let levels: Vec<Vec<String>> = picked
        .iter()
        .map(|&n| {
            p.level(n)
                .unwrap()
                .iter()
                .map(|&e| p.name(e).to_string())
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for w in picked.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        for &x in p.level(lo).unwrap() {
            for &y in p.level(hi).unwrap() {
                if x != y && p.leq(x, y) {
                    edges.push((p.name(x).to_string(), p.name(y).to_string()));
                }
            }
        }
    }
    let mut flags = crate::poset::Flags::default();
    if p.flags().graded {
        flags.graded = true;
    }
    if p.flags().atomless {
        flags.atomless = true;
    }
    // a graded atomless edge-witnessing poset keeps edge-witnessing on a
    // level subsequence: the next-level witness descends by corefinement
    if p.flags().graded && p.flags().atomless && p.flags().edge_witnessing {
        flags.edge_witnessing = true;
    }
    if p.flags().finite_complete {
        flags.finite_complete = true;
    }
    let atom_names: Vec<String> = p
        .atom_marks()
        .filter(|&a| picked.iter().any(|&n| p.level(n).unwrap().contains(&a)))
        .map(|a| p.name(a).to_string())
        .collect();
    TruncatedPoset::build(&levels, &edges, flags, &atom_names)
        .expect("a level subsequence satisfies the level laws")
}

/// The two restriction refiners of a level subsequence: `≥` restricted to
/// `sub × parent` and to `parent × sub`, written on the parent's elements.
pub fn inclusion_refiners(parent: &TruncatedPoset, sub: &TruncatedPoset) -> (Refiner, Refiner) {
    // identify sub elements inside the parent by name
    let map: Vec<Elem> = (0..sub.len())
        .map(|e| {
            parent
                .elem_by_name(sub.name(e))
                .expect("sub element in parent")
        })
        .collect();
    let mut sub_from_parent = BTreeSet::new(); // pairs (q ∈ sub, p ∈ parent): q ≥ p
    let mut parent_from_sub = BTreeSet::new(); // pairs (q ∈ parent, p ∈ sub): q ≥ p
    for q in 0..sub.len() {
        for p in parent.elements() {
            if parent.leq(p, map[q]) {
                sub_from_parent.insert((q, p));
            }
        }
    }
    for q in parent.elements() {
        for p in 0..sub.len() {
            if parent.leq(map[p], q) {
                parent_from_sub.insert((q, p));
            }
        }
    }
    (
        Refiner {
            pairs: sub_from_parent,
        },
        Refiner {
            pairs: parent_from_sub,
        },
    )
}
