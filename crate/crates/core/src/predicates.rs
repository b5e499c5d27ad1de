//! Structural property checkers: graded, weakly graded, predetermined,
//! level-injective, branching, prime elements, cap-determined.
//!
//! Each check scans the truncation and answers with a witness.  Two facts
//! make many answers exact on the visible part: the order between stored
//! elements is complete (principal filters are finite and fully present),
//! and any element added later has rank beyond the current depth.  So a
//! missing witness whose rank is forced to be `r(p)+1` can never appear
//! later, while properties of unmarked leaves stay `Unknown`.

use crate::combinatorics::{Oracle, ORACLE_DEFAULT_BOUND};
use crate::poset::{Elem, Flag, TruncatedPoset};
use crate::stars::StarEngine;
use crate::verdict::{aggregate, Verdict, Witness};

#[derive(Clone, Debug)]
pub struct PredicateReport {
    pub predicate: String,
    pub verdict: Verdict,
    pub details: Vec<String>,
}

impl PredicateReport {
    pub fn new(predicate: &str, verdict: Verdict) -> Self {
        PredicateReport {
            predicate: predicate.to_string(),
            verdict,
            details: Vec::new(),
        }
    }
}

/// Graded: every covering pair steps rank by exactly one.
///
/// A bad pair inside the truncation is final.  A clean scan certifies the
/// prefix; with the `graded` build flag it holds by construction.
pub fn check_graded(p: &TruncatedPoset) -> Verdict {
    for e in p.elements() {
        for &u in p.covers_above(e) {
            if p.rank(e) != p.rank(u) + 1 {
                return Verdict::fails().with_witness(Witness::Edges(vec![(e, u)]));
            }
        }
    }
    let v = Verdict::holds();
    if p.flags().graded {
        v.with_assumption(Flag::Graded)
    } else {
        v.with_note("no rank-skipping cover in the truncation")
    }
}

/// Weakly graded: every non-atomic element has a lower bound one rank down.
pub fn check_weakly_graded(p: &TruncatedPoset, depth: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let mut verdicts = Vec::new();
    for e in p.elements() {
        if p.is_atom(e) {
            continue;
        }
        let r = p.rank(e);
        let downs = p.strict_downs(e);
        if downs.is_empty() {
            if r >= depth {
                // leaf at the horizon: its lower bounds, if any, are beyond
                continue;
            }
            // minimal strictly inside the prefix: every candidate of rank
            // r+1 is already visible and none is below e
            if p.flags().atomless {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![e]))
                        .with_assumption(Flag::Atomless),
                );
            } else {
                verdicts.push(
                    Verdict::unknown(depth)
                        .with_note(format!("atomhood of `{}` undetermined", p.name(e))),
                );
            }
            continue;
        }
        if !downs.iter().any(|&q| p.rank(q) == r + 1) {
            verdicts.push(Verdict::fails().with_witness(Witness::Elements(vec![e])));
        }
    }
    let scan = aggregate(verdicts);
    if !scan.is_holds() {
        return scan;
    }
    // interior is clean; unmarked leaves decide the rest
    let horizon_leaves = p
        .elements()
        .any(|e| p.rank(e) == depth && p.atomhood_undecided(e) && !p.flags().atomless);
    let undecided_leaves = p.elements().any(|e| p.rank(e) == depth && !p.is_atom(e));
    if !undecided_leaves {
        return Verdict::holds().with_note("all leaves are atoms; the scan is complete");
    }
    if p.flags().graded {
        return Verdict::holds().with_assumption(Flag::Graded);
    }
    let _ = horizon_leaves;
    Verdict::unknown(depth).with_note("unmarked leaves would decide the remaining cases")
}

/// Predetermined: every non-atomic element `p` has `q < p` whose strict
/// up-set equals the up-set of `p`.  Such a witness is forced to have rank
/// `r(p)+1`, so for elements strictly inside the prefix the answer is exact.
pub fn check_predetermined(p: &TruncatedPoset, depth: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let mut verdicts = Vec::new();
    for e in p.elements() {
        if p.is_atom(e) {
            continue;
        }
        let r = p.rank(e);
        let downs = p.strict_downs(e);
        if downs.is_empty() {
            if r >= depth {
                continue;
            }
            if p.flags().atomless {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![e]))
                        .with_assumption(Flag::Atomless),
                );
            } else {
                verdicts.push(
                    Verdict::unknown(depth)
                        .with_note(format!("atomhood of `{}` undetermined", p.name(e))),
                );
            }
            continue;
        }
        let ups_e = p.up_closure(&[e]);
        let found = downs
            .iter()
            .filter(|&&q| p.rank(q) == r + 1)
            .any(|&q| p.strict_ups(q) == ups_e);
        if !found {
            verdicts.push(Verdict::fails().with_witness(Witness::Elements(vec![e])));
        }
    }
    aggregate(verdicts)
}

/// Relational injectivity of `≤` between levels `m ≤ n`: every element of
/// level `m` owns an element of level `n` related to it alone.
pub fn check_level_injective(p: &TruncatedPoset, m: usize, n: usize) -> Verdict {
    let (upper, lower) = match (p.level(m), p.level(n)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Verdict::unknown(p.depth()).with_note("level out of range"),
    };
    for &x in upper {
        let mut private = false;
        'q: for &q in lower {
            if !p.leq(q, x) {
                continue;
            }
            for &x2 in upper {
                if x2 != x && p.leq(q, x2) {
                    continue 'q;
                }
            }
            private = true;
            break;
        }
        if !private {
            return Verdict::fails().with_witness(Witness::Elements(vec![x]));
        }
    }
    Verdict::holds()
}

/// All level pairs `m ≤ n ≤ depth`.
pub fn check_level_injective_all(p: &TruncatedPoset, depth: usize) -> PredicateReport {
    let depth = depth.min(p.depth());
    let mut verdicts = Vec::new();
    let mut details = Vec::new();
    for m in 0..=depth {
        for n in m..=depth {
            let v = check_level_injective(p, m, n);
            if !v.is_holds() {
                details.push(format!("pair ({m},{n}): not injective"));
            }
            verdicts.push(v);
        }
    }
    let mut report = PredicateReport::new("level-injective", aggregate(verdicts));
    report.details = details;
    report
}

/// Branching: no element has a unique immediate predecessor.
///
/// Predecessor sets are complete for interior elements of graded posets
/// (new predecessors would need rank `r+1`, already generated); otherwise a
/// count of one stays provisional.
pub fn check_branching(p: &TruncatedPoset, depth: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let exact = p.flags().graded || p.flags().finite_complete;
    let mut verdicts = Vec::new();
    for e in p.elements() {
        if p.rank(e) >= depth && !p.flags().finite_complete {
            continue;
        }
        let preds = p.predecessors(e);
        match preds.len() {
            0 => {
                if !p.is_atom(e) && !p.flags().finite_complete {
                    verdicts.push(
                        Verdict::unknown(depth)
                            .with_note(format!("`{}` has no predecessor yet", p.name(e))),
                    );
                }
            }
            1 => {
                if exact {
                    let mut v = Verdict::fails().with_witness(Witness::Edges(vec![(preds[0], e)]));
                    if p.flags().graded {
                        v = v.with_assumption(Flag::Graded);
                    } else {
                        v = v.with_assumption(Flag::FiniteComplete);
                    }
                    verdicts.push(v);
                } else {
                    verdicts.push(Verdict::unknown(depth).with_note(format!(
                        "`{}` has one predecessor so far; deeper edges could add more",
                        p.name(e)
                    )));
                }
            }
            _ => {}
        }
    }
    aggregate(verdicts)
}

/// Prime element: does `e` belong to a point of the spectrum?
///
/// Positive evidence is an `s ≤ e` with `s` star-below `e`: the up-closure
/// of any thread through `s` then star-closes to a minimal selector
/// containing `e` (conditional on regularity).  Exact answers need the whole
/// poset.
pub fn check_prime_element(p: &TruncatedPoset, e: Elem, depth: usize, margin: usize) -> Verdict {
    let depth = depth.min(p.depth());
    if p.flags().finite_complete {
        if let Ok(oracle) = Oracle::new(p, ORACLE_DEFAULT_BOUND) {
            return if oracle.is_prime_element(e) {
                Verdict::holds().with_assumption(Flag::FiniteComplete)
            } else {
                Verdict::fails().with_assumption(Flag::FiniteComplete)
            };
        }
    }
    let engine = StarEngine::new(p);
    let horizon = depth.saturating_sub(margin);
    let mut candidates: Vec<Elem> = p.down_closure_in_truncation(&[e]);
    candidates.sort_unstable();
    for s in candidates {
        let v = engine.star_below(s, e, horizon);
        if v.is_holds() {
            return Verdict::holds()
                .with_witness(Witness::Elements(vec![s]))
                .with_assumptions(&v.assumptions)
                .with_note(
                    "a thread through the witness star-closes to a point containing the element (under regularity)",
                );
        }
    }
    Verdict::unknown(depth)
}

/// Sufficient condition for cap-determinedness: branching and predetermined
/// together imply it; failure of branching refutes it.
pub fn check_cap_determined_sufficient(p: &TruncatedPoset, depth: usize) -> Verdict {
    let branching = check_branching(p, depth);
    if branching.is_fails() {
        return branching.with_note("cap-determined posets are branching");
    }
    let predet = check_predetermined(p, depth);
    if branching.is_holds() && predet.is_holds() {
        let mut v = Verdict::holds().with_note("branching and predetermined together suffice");
        for f in branching
            .assumptions
            .iter()
            .chain(predet.assumptions.iter())
        {
            v = v.with_assumption(*f);
        }
        return v;
    }
    Verdict::unknown(depth.min(p.depth()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Flags;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn edges(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    /// Two-lane poset omega x {0,1} truncated at the given depth.
    /// Level n is {a_n, b_{n-1}} with a = (n,0), b = (n,1).
    pub(crate) fn f5(depth: usize) -> TruncatedPoset {
        let mut levels = vec![names(&["a0"])];
        let mut es: Vec<(String, String)> = Vec::new();
        for n in 1..=depth {
            levels.push(vec![format!("a{n}"), format!("b{}", n - 1)]);
            es.push((format!("a{n}"), format!("a{}", n - 1)));
            es.push((format!("b{}", n - 1), format!("a{}", n - 1)));
            if n >= 2 {
                es.push((format!("b{}", n - 1), format!("b{}", n - 2)));
            }
        }
        let flags = Flags {
            graded: true,
            atomless: true,
            edge_witnessing: true,
            ..Flags::default()
        };
        TruncatedPoset::build(&levels, &es, flags, &[]).unwrap()
    }

    #[test]
    fn f5_levels_and_ranks() {
        let p = f5(5);
        assert_eq!(p.level(3).unwrap().len(), 2);
        let b2 = p.elem_by_name("b2").unwrap();
        // rank (n,1) = n+1
        assert_eq!(p.rank(b2), 3);
    }

    #[test]
    fn single_level_graded() {
        let p = TruncatedPoset::build(&[names(&["X"])], &[], Flags::default(), &[]).unwrap();
        assert!(check_graded(&p).is_holds());
    }

    #[test]
    fn f5_not_predetermined_with_b_witness() {
        let p = f5(6);
        let v = check_predetermined(&p, 6);
        assert!(v.is_fails());
        // the failing elements are on the (n,1) lane: b_n has candidate
        // b_{n+1} whose strict up-set also contains a_{n+1}
        match v.witness {
            Some(Witness::Elements(ref w)) => {
                let name = p.name(w[0]);
                assert!(name.starts_with('b'), "witness {name}");
            }
            _ => panic!("expected element witness"),
        }
    }

    #[test]
    fn f5_not_level_injective() {
        let p = f5(6);
        let report = check_level_injective_all(&p, 6);
        assert!(report.verdict.is_fails());
    }

    #[test]
    fn chain_fails_branching() {
        let flags = Flags {
            graded: true,
            ..Flags::default()
        };
        let p = TruncatedPoset::build(
            &[names(&["x"]), names(&["y"]), names(&["z"])],
            &edges(&[("y", "x"), ("z", "y")]),
            flags,
            &[],
        )
        .unwrap();
        let v = check_branching(&p, 2);
        assert!(v.is_fails());
        // first offender in canonical order is x with unique predecessor y
        let x = p.elem_by_name("x").unwrap();
        let y = p.elem_by_name("y").unwrap();
        assert_eq!(v.witness, Some(Witness::Edges(vec![(y, x)])));
    }

    #[test]
    fn shared_non_atom_fails_weakly_graded() {
        // e sits in levels 1 and 2 unmarked, with a lower bound only at
        // rank 3: definitely non-atomic and no rank-2 lower bound exists.
        let p = TruncatedPoset::build_unchecked(
            &[
                names(&["X"]),
                names(&["e", "p"]),
                names(&["e", "q"]),
                names(&["r"]),
            ],
            &edges(&[("e", "X"), ("p", "X"), ("q", "p"), ("r", "q"), ("r", "e")]),
            Flags::default(),
            &[],
        )
        .unwrap();
        let v = check_weakly_graded(&p, 3);
        assert!(v.is_fails());
        let e = p.elem_by_name("e").unwrap();
        assert_eq!(v.witness, Some(Witness::Elements(vec![e])));
    }

    #[test]
    fn level_injectivity_violation_detected() {
        // level 2 = {c} refines both level-1 elements: neither owns a
        // private witness.
        let p = TruncatedPoset::build(
            &[names(&["X"]), names(&["a", "b"]), names(&["c"])],
            &edges(&[("a", "X"), ("b", "X"), ("c", "a"), ("c", "b")]),
            Flags::default(),
            &[],
        )
        .unwrap();
        assert!(check_level_injective(&p, 1, 2).is_fails());
        assert!(check_level_injective(&p, 1, 1).is_holds());
    }
}
