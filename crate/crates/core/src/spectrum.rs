//! Depth-`d` approximations of points of the spectrum, exact enumeration for
//! finite posets, clusters and connectivity, and tangled refinements.
//!
//! A point is approximated by a thread: one element per level, descending.
//! Its up-closure is the visible prefix of a selector, and the star-closure
//! adds every element verified to sit star-above it.  Point equality is only
//! semi-decided: two threads are provably distinct when some level slices of
//! their star-closures share no wedge (filters are linked), and provably
//! equal only on finite posets.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::combinatorics::{order_refines, Oracle, OracleError, ORACLE_DEFAULT_BOUND};
use crate::poset::{Elem, Flag, TruncatedPoset};
use crate::stars::StarEngine;
use crate::verdict::{aggregate, Outcome, Verdict, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("thread must pick one element from each level 0..=depth")]
    ThreadShape,
    #[error("thread entries must descend: `{0}` is not below `{1}`")]
    ThreadNotDescending(String, String),
    #[error("set is not up-closed (misses `{0}`)")]
    NotUpClosed(String),
    #[error("set is not wedge-verified linked")]
    NotLinked,
    #[error("first set does not refine the second")]
    NotARefinement,
    #[error("set is not a certified path")]
    NotAPath,
    #[error("instance size {len} exceeds bound {bound}")]
    SizeBound { len: usize, bound: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A descending chain hitting every level of the truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    elements: Vec<Elem>,
}

impl Thread {
    pub fn new(p: &TruncatedPoset, elements: Vec<Elem>) -> Result<Thread, SpectrumError> {
        if elements.len() != p.depth() + 1 {
            return Err(SpectrumError::ThreadShape);
        }
        for (n, &e) in elements.iter().enumerate() {
            if !p.level(n).map(|l| l.contains(&e)).unwrap_or(false) {
                return Err(SpectrumError::ThreadShape);
            }
            if n > 0 && !p.leq(e, elements[n - 1]) {
                return Err(SpectrumError::ThreadNotDescending(
                    p.name(e).to_string(),
                    p.name(elements[n - 1]).to_string(),
                ));
            }
        }
        Ok(Thread { elements })
    }

    /// Descend from the top by always taking the first available lower bound.
    pub fn leftmost(p: &TruncatedPoset) -> Thread {
        let mut elements = vec![p.level(0).unwrap()[0]];
        for n in 1..=p.depth() {
            let prev = *elements.last().unwrap();
            let next = p
                .level(n)
                .unwrap()
                .iter()
                .copied()
                .find(|&e| p.leq(e, prev))
                .expect("level laws guarantee a lower bound");
            elements.push(next);
        }
        Thread { elements }
    }

    /// A thread passing through the given element: upward level by level
    /// using the refinement law, then downward using corefinement.
    pub fn through(p: &TruncatedPoset, e: Elem) -> Thread {
        let r = p.rank(e);
        let mut elements = vec![e];
        // climb: each level element has an upper bound one level up
        for n in (0..r).rev() {
            let cur = elements[0];
            let up = p
                .level(n)
                .unwrap()
                .iter()
                .copied()
                .find(|&x| p.leq(cur, x))
                .expect("level laws guarantee an upper bound");
            elements.insert(0, up);
        }
        // descend: prefer staying under e
        for n in r + 1..=p.depth() {
            let prev = *elements.last().unwrap();
            let level = p.level(n).unwrap();
            let next = level
                .iter()
                .copied()
                .find(|&x| p.leq(x, prev) && p.leq(x, e))
                .or_else(|| level.iter().copied().find(|&x| p.leq(x, prev)))
                .expect("level laws guarantee a lower bound");
            elements.push(next);
        }
        Thread { elements }
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }
}

/// The visible part of a selector: an up-closed subset of the truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorPrefix {
    pub elements: Vec<Elem>,
    pub depth: usize,
    /// False when undecided star-below queries may have left members out.
    pub complete: bool,
}

impl SelectorPrefix {
    pub fn new(
        p: &TruncatedPoset,
        elements: Vec<Elem>,
        depth: usize,
        complete: bool,
    ) -> Result<SelectorPrefix, SpectrumError> {
        let set: BTreeSet<Elem> = elements.iter().copied().collect();
        for &e in &set {
            for u in p.up_closure(&[e]) {
                if !set.contains(&u) {
                    return Err(SpectrumError::NotUpClosed(p.name(u).to_string()));
                }
            }
        }
        Ok(SelectorPrefix {
            elements: set.into_iter().collect(),
            depth,
            complete,
        })
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// Does the prefix meet every level up to its depth?
    pub fn hits_all_levels(&self, p: &TruncatedPoset) -> bool {
        (0..=self.depth.min(p.depth())).all(|n| {
            p.level(n)
                .map(|l| l.iter().any(|e| self.contains(*e)))
                .unwrap_or(false)
        })
    }

    pub fn level_slice(&self, p: &TruncatedPoset, n: usize) -> Vec<Elem> {
        p.level(n)
            .map(|l| l.iter().copied().filter(|&e| self.contains(e)).collect())
            .unwrap_or_default()
    }
}

/// Up-closure of a thread: the prefix of the point it approximates.
pub fn thread_prefix(p: &TruncatedPoset, t: &Thread) -> SelectorPrefix {
    let elements = p.up_closure(t.elements());
    SelectorPrefix::new(p, elements, p.depth(), true).expect("up-closure is up-closed")
}

/// All elements verified star-above some member of the prefix.  Members the
/// depth could not decide are missing, so the result may be a proper subset
/// of the true star-closure; `complete` records that.
pub fn star_closure_prefix(
    p: &TruncatedPoset,
    s: &SelectorPrefix,
    depth: usize,
) -> Result<SelectorPrefix, SpectrumError> {
    let engine = StarEngine::new(p);
    // linked: every pair must have a common lower bound in the truncation
    for (i, &a) in s.elements.iter().enumerate() {
        for &b in &s.elements[i + 1..] {
            if !engine.wedge(a, b, depth).is_holds() {
                return Err(SpectrumError::NotLinked);
            }
        }
    }
    let mut members = BTreeSet::new();
    let mut complete = true;
    for q in p.elements() {
        let mut found = false;
        for &x in &s.elements {
            let v = engine.star_below(x, q, depth);
            match v.outcome {
                Outcome::Holds => {
                    found = true;
                    break;
                }
                Outcome::Unknown => complete = false,
                Outcome::Fails => {}
            }
        }
        if found {
            members.insert(q);
        }
    }
    SelectorPrefix::new(p, members.into_iter().collect(), depth, complete)
}

/// Are two threads approximations of the same point?
///
/// Identical threads trivially are.  Distinctness is certified by a level on
/// which the two star-closures have slices with no wedge between them: a
/// common minimal selector would be a filter containing both slices.  Finite
/// posets are decided exactly.
pub fn points_equal(
    p: &TruncatedPoset,
    t: &Thread,
    u: &Thread,
    depth: usize,
) -> Result<Verdict, SpectrumError> {
    let depth = depth.min(p.depth());
    if t == u {
        return Ok(Verdict::holds().with_note("identical threads"));
    }
    if p.flags().finite_complete {
        let oracle = Oracle::new(p, ORACLE_DEFAULT_BOUND)?;
        let point = |th: &Thread| -> BTreeSet<Elem> {
            let base = p.up_closure(th.elements());
            p.elements()
                .filter(|&q| base.iter().any(|&s| oracle.star_below(s, q)))
                .collect()
        };
        return Ok(if point(t) == point(u) {
            Verdict::holds().with_assumption(Flag::FiniteComplete)
        } else {
            Verdict::fails().with_assumption(Flag::FiniteComplete)
        });
    }
    let engine = StarEngine::new(p);
    let a = star_closure_prefix(p, &thread_prefix(p, t), depth)?;
    let b = star_closure_prefix(p, &thread_prefix(p, u), depth)?;
    for n in 0..=depth {
        let sa = a.level_slice(p, n);
        let sb = b.level_slice(p, n);
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        let all_fail = sa
            .iter()
            .all(|&x| sb.iter().all(|&y| engine.wedge(x, y, depth).is_fails()));
        if all_fail {
            return Ok(Verdict::fails()
                .with_witness(Witness::Level(n))
                .with_note("star-closure slices share no wedge; a common point would link them"));
        }
    }
    Ok(Verdict::unknown(depth))
}

/// Minimal selectors of a finite poset, as selector prefixes.  Verifies the
/// pairwise separation property along the way.
pub fn enumerate_minimal_selectors(
    p: &TruncatedPoset,
) -> Result<Vec<SelectorPrefix>, SpectrumError> {
    let oracle = Oracle::new(p, ORACLE_DEFAULT_BOUND)?;
    let sels = oracle.minimal_selectors();
    for (i, s) in sels.iter().enumerate() {
        for t in &sels[i + 1..] {
            let s_minus_t = s.iter().any(|e| !t.contains(e));
            let t_minus_s = t.iter().any(|e| !s.contains(e));
            assert!(
                s_minus_t && t_minus_s,
                "minimal selectors must be pairwise separated"
            );
        }
    }
    sels.into_iter()
        .map(|s| SelectorPrefix::new(p, s, p.depth(), true))
        .collect()
}

/// Is the up-set `q` prime (a union of points)?  Decided exactly on finite
/// posets; otherwise the sufficient criterion is positive evidence: a round
/// set that meets the star of each of its members in every generated level.
pub fn is_prime_subset(
    p: &TruncatedPoset,
    q: &[Elem],
    depth: usize,
) -> Result<Verdict, SpectrumError> {
    let depth = depth.min(p.depth());
    let set: BTreeSet<Elem> = q.iter().copied().collect();
    for &e in &set {
        for u in p.up_closure(&[e]) {
            if !set.contains(&u) {
                return Err(SpectrumError::NotUpClosed(p.name(u).to_string()));
            }
        }
    }
    if p.flags().finite_complete {
        let oracle = Oracle::new(p, ORACLE_DEFAULT_BOUND)?;
        let sels = oracle.minimal_selectors();
        for &x in &set {
            let covered = sels
                .iter()
                .any(|s| s.contains(&x) && s.iter().all(|e| set.contains(e)));
            if !covered {
                return Ok(Verdict::fails()
                    .with_assumption(Flag::FiniteComplete)
                    .with_witness(Witness::Elements(vec![x]))
                    .with_note("not inside any point contained in the set"));
            }
        }
        return Ok(Verdict::holds()
            .with_assumption(Flag::FiniteComplete)
            .with_note("a union of minimal selectors"));
    }
    let engine = StarEngine::new(p);
    let elements: Vec<Elem> = set.iter().copied().collect();
    let round = engine.is_round(&elements, depth);
    if !round.is_holds() {
        return Ok(Verdict::unknown(depth)
            .with_note("roundness not verified; the sufficient criterion needs it"));
    }
    // star-prime on generated levels: the proved part of each star must
    // already meet the set
    for &x in &elements {
        for n in 0..=depth {
            let star = engine.level_star(x, n, depth);
            let meets = star.members.iter().any(|m| set.contains(m));
            if !meets {
                return Ok(Verdict::unknown(depth).with_note(format!(
                    "star of `{}` in level {n} not verified to meet the set",
                    p.name(x)
                )));
            }
        }
    }
    Ok(Verdict::holds()
        .with_note("round and star-prime on the generated levels; prime under regularity"))
}

/// Cluster: connectivity of the wedge graph on `c`, with two-sided bounds.
/// Connected on proved wedges is final; disconnected even with every open
/// pair added is final the other way.
pub fn is_cluster(p: &TruncatedPoset, c: &[Elem], depth: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let k = c.len();
    if k <= 1 {
        return Verdict::holds();
    }
    let engine = StarEngine::new(p);
    let mut proved = vec![Vec::new(); k];
    let mut optimistic = vec![Vec::new(); k];
    let mut assumptions = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let v = engine.wedge(c[i], c[j], depth);
            match v.outcome {
                Outcome::Holds => {
                    proved[i].push(j);
                    proved[j].push(i);
                    optimistic[i].push(j);
                    optimistic[j].push(i);
                }
                Outcome::Unknown => {
                    optimistic[i].push(j);
                    optimistic[j].push(i);
                }
                Outcome::Fails => {
                    for a in v.assumptions {
                        if !assumptions.contains(&a) {
                            assumptions.push(a);
                        }
                    }
                }
            }
        }
    }
    if adj_connected(&proved) {
        return Verdict::holds();
    }
    if !adj_connected(&optimistic) {
        return Verdict::fails()
            .with_assumptions(&assumptions)
            .with_note("disconnected even with every undecided wedge granted");
    }
    Verdict::unknown(depth)
}

fn adj_connected(adj: &[Vec<usize>]) -> bool {
    let k = adj.len();
    if k == 0 {
        return true;
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Evidence for connectedness of the spectrum: every level in the decidable
/// window must be a cluster (for a regular prime poset this characterises
/// connectedness).
pub fn connectivity_report(p: &TruncatedPoset, depth: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let window_end = if depth == 0 { 0 } else { depth - 1 };
    let mut verdicts = Vec::new();
    for n in 0..=window_end {
        let level = p.level(n).unwrap().to_vec();
        let v = is_cluster(p, &level, depth);
        let v = match v.outcome {
            Outcome::Fails => v.with_witness(Witness::Level(n)),
            _ => v,
        };
        verdicts.push(v);
    }
    aggregate(verdicts).with_note(format!(
        "levels 0..={window_end} scanned; certifies connectedness for regular prime posets"
    ))
}

/// Tangled refinement, straight from the cluster definition: for every two
/// wedge-linked clusters of `a`, one must sit inside the other's
/// shared-upper-bound hull over `b`.  Exhaustive over cluster pairs, so `a`
/// is size-bounded.
pub fn is_tangled_refinement(
    p: &TruncatedPoset,
    a: &[Elem],
    b: &[Elem],
    depth: usize,
    size_bound: usize,
) -> Result<Verdict, SpectrumError> {
    let depth = depth.min(p.depth());
    if !order_refines(p, a, b) {
        return Err(SpectrumError::NotARefinement);
    }
    let k = a.len();
    if k > size_bound.min(20) {
        return Err(SpectrumError::SizeBound {
            len: k,
            bound: size_bound.min(20),
        });
    }
    let engine = StarEngine::new(p);
    let mut adj = vec![0u32; k];
    for i in 0..k {
        adj[i] |= 1 << i;
        for j in i + 1..k {
            match engine.wedge(a[i], a[j], depth).outcome {
                Outcome::Holds => {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
                Outcome::Fails => {}
                Outcome::Unknown => return Ok(Verdict::unknown(depth)),
            }
        }
    }
    // share[i]: members of `a` sharing an upper bound in `b` with a[i]
    let mut share = vec![0u32; k];
    for i in 0..k {
        for j in 0..k {
            if b.iter().any(|&q| p.leq(a[i], q) && p.leq(a[j], q)) {
                share[i] |= 1 << j;
            }
        }
    }
    let full: u32 = if k == 32 { !0 } else { (1 << k) - 1 };
    let mut clusters = Vec::new();
    for mask in 1..=full {
        if mask_connected(mask, &adj) {
            clusters.push(mask);
        }
    }
    let reach = |mask: u32| -> u32 {
        let mut r = 0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            r |= adj[i];
        }
        r
    };
    let hull = |mask: u32| -> u32 {
        let mut r = 0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            r |= share[i];
        }
        r
    };
    for &c in &clusters {
        let rc = reach(c);
        let hc = hull(c);
        for &d in &clusters {
            if rc & d == 0 {
                continue; // clusters do not wedge
            }
            let hd = hull(d);
            if c & !hd != 0 && d & !hc != 0 {
                let witness: Vec<Elem> = (0..k)
                    .filter(|&i| (c | d) >> i & 1 == 1)
                    .map(|i| a[i])
                    .collect();
                return Ok(Verdict::fails()
                    .with_witness(Witness::Elements(witness))
                    .with_note("wedge-linked clusters, neither inside the other's hull"));
            }
        }
    }
    Ok(Verdict::holds())
}

fn mask_connected(mask: u32, adj: &[u32]) -> bool {
    let start = mask.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    loop {
        let mut grown = seen;
        let mut m = seen;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            grown |= adj[i] & mask;
        }
        if grown == seen {
            break;
        }
        seen = grown;
    }
    seen == mask
}

/// Path crookedness: for every ordered pair `(a, d)` along the path there
/// are `b` in `[a,d]` and `c` in `[b,d]` with `a,c` under one element of `q`
/// and `b,d` under another.
pub fn is_path_crooked(
    p: &TruncatedPoset,
    path: &[Elem],
    q: &[Elem],
    depth: usize,
) -> Result<Verdict, SpectrumError> {
    let depth = depth.min(p.depth());
    if !order_refines(p, path, q) {
        return Err(SpectrumError::NotARefinement);
    }
    let engine = StarEngine::new(p);
    let order = match engine.snake_order(path, depth) {
        Ok(o) => o,
        Err(v) if v.is_unknown() => return Ok(v),
        Err(_) => return Err(SpectrumError::NotAPath),
    };
    match engine.snake_order(q, depth) {
        Ok(_) => {}
        Err(v) if v.is_unknown() => return Ok(v),
        Err(_) => return Err(SpectrumError::NotAPath),
    }
    let m = order.len();
    // share-an-upper-bound-in-q masks
    let words = q.len().div_ceil(64);
    let mut upmask = vec![vec![0u64; words]; m];
    for (i, &x) in order.iter().enumerate() {
        for (qi, &qe) in q.iter().enumerate() {
            if p.leq(x, qe) {
                upmask[i][qi / 64] |= 1 << (qi % 64);
            }
        }
    }
    let share = |i: usize, j: usize| -> bool {
        upmask[i]
            .iter()
            .zip(upmask[j].iter())
            .any(|(a, b)| a & b != 0)
    };
    for dir in 0..2 {
        let pos = |i: usize| if dir == 0 { i } else { m - 1 - i };
        // kmin[j] = least k >= i with share(k, j), maintained as i descends
        let mut kmin = vec![usize::MAX; m];
        for i in (0..m).rev() {
            for j in 0..m {
                if share(pos(i), pos(j)) {
                    kmin[j] = i;
                }
            }
            // lmax(j) = largest l <= j with share(i, l)
            let mut lmax = usize::MAX;
            for j in i..m {
                if share(pos(i), pos(j)) {
                    lmax = j;
                }
                if j == i {
                    continue;
                }
                let ok =
                    kmin[j] != usize::MAX && kmin[j] <= j && lmax != usize::MAX && kmin[j] <= lmax;
                if !ok {
                    return Ok(Verdict::fails()
                        .with_witness(Witness::Edges(vec![(order[pos(i)], order[pos(j)])]))
                        .with_note("no fold between the pair"));
                }
            }
        }
    }
    Ok(Verdict::holds().with_witness(Witness::Elements(order)))
}

/// Scan each level for a tangled refinement among the deeper generated
/// levels.  Path levels use the crookedness test; small levels fall back to
/// the exhaustive cluster check.  A level whose window produced only decided
/// failures is reported as failing within the window.
pub fn check_tangled_poset(p: &TruncatedPoset, depth: usize, size_bound: usize) -> Verdict {
    let depth = depth.min(p.depth());
    let mut verdicts = Vec::new();
    for n in 0..depth {
        let level_n = p.level(n).unwrap().to_vec();
        let mut holds = false;
        let mut decided_fail = false;
        for m in n + 1..=depth {
            let level_m = p.level(m).unwrap().to_vec();
            let v = is_path_crooked(p, &level_m, &level_n, depth)
                .or_else(|_| is_tangled_refinement(p, &level_m, &level_n, depth, size_bound));
            match v {
                Ok(v) if v.is_holds() => {
                    holds = true;
                    break;
                }
                Ok(v) if v.is_fails() => decided_fail = true,
                _ => {}
            }
        }
        if holds {
            verdicts.push(Verdict::holds());
        } else if decided_fail {
            verdicts.push(
                Verdict::fails()
                    .with_witness(Witness::Level(n))
                    .with_note(format!(
                        "no tangled refinement of level {n} among levels {}..={depth}",
                        n + 1
                    )),
            );
        }
        // nothing decidable for this level: outside the window
    }
    if verdicts.is_empty() {
        return Verdict::holds().with_note("no level within the decidable window");
    }
    aggregate(verdicts).with_note("weakly tangled plus regular implies tangled")
}
