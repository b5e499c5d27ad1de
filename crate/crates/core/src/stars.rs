//! The common-lower-bound (wedge) relation and everything built from stars:
//! star-below, star-refinement between levels, regularity, edge-witnessing,
//! star-refining, roundness, and snake detection.
//!
//! Wedges witnessed inside the truncation are final.  Refuting a wedge needs
//! help: a trusted atom mark, the `finite_complete` flag, or — the case the
//! declared flags are for — a graded edge-witnessing poset, where any wedge
//! between elements of ranks `≤ r` is already witnessed by a common lower
//! bound at rank `r+1`.  Everything else stays `Unknown`.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::combinatorics::order_refines;
use crate::poset::{Elem, Flag, TruncatedPoset};
use crate::verdict::{aggregate, Outcome, Verdict, Witness};

/// Outcome of a star computation: the members whose wedge with the centre
/// held, and whether every membership question was decided.  When
/// `decided` is false the member list is a lower bound for the true star.
#[derive(Clone, Debug)]
pub struct Star {
    pub members: Vec<Elem>,
    pub decided: bool,
    pub assumptions: Vec<Flag>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum WedgeState {
    Proved,
    Refuted,
    Open,
}

/// Symmetric per-level wedge matrix with provenance, built lazily.
struct LevelWedges {
    state: Vec<WedgeState>,
    width: usize,
    assumptions: Vec<Flag>,
}

impl LevelWedges {
    fn get(&self, i: usize, j: usize) -> WedgeState {
        self.state[i * self.width + j]
    }
}

pub struct StarEngine<'a> {
    p: &'a TruncatedPoset,
    level_cache: RefCell<HashMap<(usize, usize), std::rc::Rc<LevelWedges>>>,
}

impl<'a> StarEngine<'a> {
    pub fn new(p: &'a TruncatedPoset) -> Self {
        StarEngine {
            p,
            level_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn poset(&self) -> &TruncatedPoset {
        self.p
    }

    /// Do `x` and `y` have a common lower bound?
    ///
    /// A witness in the truncation settles it.  Otherwise: an atom only
    /// wedges its upper bounds; under `finite_complete` the search was
    /// exhaustive; in a graded edge-witnessing poset a wedge of elements of
    /// rank `≤ r` is witnessed at rank `r+1`, so absence at `r+1 ≤ depth`
    /// refutes.
    pub fn wedge(&self, x: Elem, y: Elem, depth: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        if let Some(r) = p.common_lower_bound(x, y) {
            return Verdict::holds().with_witness(Witness::Elements(vec![r]));
        }
        if p.is_atom_marked(x) || p.is_atom_marked(y) {
            return Verdict::fails().with_note("an atom wedges exactly its upper bounds");
        }
        if p.flags().finite_complete {
            return Verdict::fails().with_assumption(Flag::FiniteComplete);
        }
        let r = p.rank(x).max(p.rank(y));
        if p.flags().graded && p.flags().edge_witnessing && r + 1 <= depth {
            return Verdict::fails()
                .with_assumption(Flag::Graded)
                .with_assumption(Flag::EdgeWitnessing);
        }
        Verdict::unknown(depth)
    }

    fn level_wedges(&self, n: usize, depth: usize) -> std::rc::Rc<LevelWedges> {
        if let Some(lw) = self.level_cache.borrow().get(&(n, depth)) {
            return lw.clone();
        }
        let level = self.p.level(n).unwrap().to_vec();
        let w = level.len();
        let mut state = vec![WedgeState::Open; w * w];
        let mut assumptions = Vec::new();
        for i in 0..w {
            state[i * w + i] = WedgeState::Proved;
            for j in i + 1..w {
                let v = self.wedge(level[i], level[j], depth);
                let s = match v.outcome {
                    Outcome::Holds => WedgeState::Proved,
                    Outcome::Fails => WedgeState::Refuted,
                    Outcome::Unknown => WedgeState::Open,
                };
                for a in v.assumptions {
                    if !assumptions.contains(&a) {
                        assumptions.push(a);
                    }
                }
                state[i * w + j] = s;
                state[j * w + i] = s;
            }
        }
        let lw = std::rc::Rc::new(LevelWedges {
            state,
            width: w,
            assumptions,
        });
        self.level_cache.borrow_mut().insert((n, depth), lw.clone());
        lw
    }

    /// Star of `x` in the set `cap`: the members wedging `x`.
    pub fn star(&self, x: Elem, cap: &[Elem], depth: usize) -> Star {
        let mut members = Vec::new();
        let mut decided = true;
        let mut assumptions = Vec::new();
        for &c in cap {
            let v = self.wedge(c, x, depth);
            match v.outcome {
                Outcome::Holds => members.push(c),
                Outcome::Fails => {}
                Outcome::Unknown => decided = false,
            }
            for a in v.assumptions {
                if !assumptions.contains(&a) {
                    assumptions.push(a);
                }
            }
        }
        Star {
            members,
            decided,
            assumptions,
        }
    }

    /// Star of `x` in level `n`.
    pub fn level_star(&self, x: Elem, n: usize, depth: usize) -> Star {
        let level = match self.p.level(n) {
            Ok(l) => l.to_vec(),
            Err(_) => {
                return Star {
                    members: Vec::new(),
                    decided: false,
                    assumptions: Vec::new(),
                }
            }
        };
        self.star(x, &level, depth)
    }

    /// `x ◁ y`: the star of `x` in some cap lies below `y`.  Levels are
    /// coinitial among caps, so scanning generated levels is complete in the
    /// limit; a level whose star is fully decided and fits under `y`
    /// certifies the relation for good.
    pub fn star_below(&self, x: Elem, y: Elem, depth: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        for n in 0..=depth {
            let star = self.level_star(x, n, depth);
            if star.decided && star.members.iter().all(|&c| p.leq(c, y)) {
                return Verdict::holds()
                    .with_witness(Witness::Level(n))
                    .with_assumptions(&star.assumptions);
            }
        }
        if p.flags().finite_complete {
            // the minimal elements form the finest cap; its star of x is the
            // set of minimal elements below x
            let ok = p
                .elements()
                .filter(|&a| p.is_minimal_in_truncation(a) && p.leq(a, x))
                .all(|a| p.leq(a, y));
            return if ok {
                Verdict::holds().with_assumption(Flag::FiniteComplete)
            } else {
                Verdict::fails().with_assumption(Flag::FiniteComplete)
            };
        }
        Verdict::unknown(depth)
    }

    /// Does level `m` star-refine level `n`: does every `x ∈ P_m` have its
    /// star within `P_m` below a single element of `P_n`?
    ///
    /// A star that already sticks out of every candidate refutes outright
    /// (stars only grow as wedges get decided); certifying needs the level's
    /// wedges decided.
    pub fn star_refines(&self, m: usize, n: usize, depth: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        let (level_m, level_n) = match (p.level(m), p.level(n)) {
            (Ok(a), Ok(b)) => (a.to_vec(), b.to_vec()),
            _ => return Verdict::unknown(depth).with_note("level out of range"),
        };
        let lw = self.level_wedges(m, depth);
        let mut verdicts = Vec::new();
        for (i, &x) in level_m.iter().enumerate() {
            let mut members = Vec::new();
            let mut decided = true;
            for (j, &c) in level_m.iter().enumerate() {
                match lw.get(i, j) {
                    WedgeState::Proved => members.push(c),
                    WedgeState::Refuted => {}
                    WedgeState::Open => decided = false,
                }
            }
            let fits = level_n.iter().any(|&q| order_refines(p, &members, &[q]));
            if !fits {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![x]))
                        .with_note(format!(
                            "star of `{}` in level {m} fits under no element of level {n}",
                            p.name(x)
                        )),
                );
            } else if !decided {
                verdicts.push(Verdict::unknown(depth));
            } else {
                verdicts.push(Verdict::holds().with_assumptions(&lw.assumptions));
            }
        }
        let mut out = aggregate(verdicts);
        if out.is_holds() {
            out = out.with_witness(Witness::Level(m));
        }
        out
    }

    /// Regularity evidence: every level within reach is star-refined by a
    /// level at most `skip` below it.  Caps are coinitial with levels, so
    /// this is exactly level-wise regularity of the prefix.
    pub fn check_regular(&self, depth: usize, skip: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        if p.flags().finite_complete {
            // a finite poset is its own discrete compactum: the finest band
            // star-refines every cap
            return Verdict::holds().with_assumption(Flag::FiniteComplete);
        }
        if depth < skip + 1 {
            return Verdict::unknown(depth).with_note("truncation too shallow for the scan");
        }
        let mut verdicts = Vec::new();
        for n in 0..=depth - skip - 1 {
            let mut ok = false;
            let mut seen_unknown = false;
            for k in 1..=skip {
                let v = self.star_refines(n + k, n, depth);
                match v.outcome {
                    Outcome::Holds => {
                        ok = true;
                        break;
                    }
                    Outcome::Unknown => seen_unknown = true,
                    Outcome::Fails => {}
                }
            }
            if ok {
                verdicts.push(Verdict::holds());
            } else if seen_unknown {
                verdicts.push(Verdict::unknown(depth));
            } else {
                verdicts.push(Verdict::unknown(depth).with_note(format!(
                    "no level within {skip} of level {n} star-refines it; a deeper cap still might"
                )));
            }
        }
        aggregate(verdicts)
    }

    /// Is every same-level wedge observed in the truncation witnessed by a
    /// common lower bound already on the next level?
    pub fn check_edge_witnessing(&self, depth: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        for n in 0..depth {
            let level = p.level(n).unwrap();
            let next = p.level(n + 1).unwrap();
            for (i, &a) in level.iter().enumerate() {
                for &b in &level[i + 1..] {
                    if a == b || p.common_lower_bound(a, b).is_none() {
                        continue;
                    }
                    let witnessed = next.iter().any(|&w| p.leq(w, a) && p.leq(w, b));
                    if !witnessed {
                        return Verdict::fails().with_witness(Witness::Edges(vec![(a, b)]));
                    }
                }
            }
        }
        Verdict::holds().with_note("every observed same-level wedge is witnessed on the next level")
    }

    /// Is every level star-refined by the one right below it?
    pub fn check_star_refining(&self, depth: usize) -> Verdict {
        let depth = depth.min(self.p.depth());
        if depth < 2 {
            return Verdict::unknown(depth).with_note("truncation too shallow for the scan");
        }
        let mut verdicts = Vec::new();
        for n in 0..=depth - 2 {
            let v = self.star_refines(n + 1, n, depth);
            verdicts.push(v);
        }
        aggregate(verdicts)
    }

    /// Round set: every member is star-above some member.  Members too close
    /// to the horizon for any star certificate are skipped.
    pub fn is_round(&self, s: &[Elem], depth: usize) -> Verdict {
        let p = self.p;
        let depth = depth.min(p.depth());
        let mut verdicts = Vec::new();
        for &r in s {
            let mut found = false;
            for &q in s {
                if self.star_below(q, r, depth).is_holds() {
                    found = true;
                    break;
                }
            }
            if found {
                verdicts.push(Verdict::holds());
            } else if p.flags().finite_complete {
                verdicts.push(
                    Verdict::fails()
                        .with_witness(Witness::Elements(vec![r]))
                        .with_assumption(Flag::FiniteComplete),
                );
            } else if p.rank(r) + 2 > depth {
                // star evidence for r needs room below; skip at the horizon
                continue;
            } else {
                verdicts.push(Verdict::unknown(depth));
            }
        }
        aggregate(verdicts)
    }

    /// Wedge states among the members of `c`, as a (proved, refuted) pair of
    /// adjacency lookups; `None` entries are open.
    fn pair_states(&self, c: &[Elem], depth: usize) -> Vec<Vec<Option<bool>>> {
        let k = c.len();
        let mut m = vec![vec![Some(false); k]; k];
        for i in 0..k {
            m[i][i] = Some(true);
            for j in i + 1..k {
                let v = self.wedge(c[i], c[j], depth);
                let s = match v.outcome {
                    Outcome::Holds => Some(true),
                    Outcome::Fails => Some(false),
                    Outcome::Unknown => None,
                };
                m[i][j] = s;
                m[j][i] = s;
            }
        }
        m
    }

    /// Is the wedge graph of `c` a path graph?  Returns the enumeration as
    /// the witness when it is.
    pub fn is_snake(&self, c: &[Elem], depth: usize) -> Verdict {
        match self.snake_order(c, depth) {
            Ok(order) => Verdict::holds().with_witness(Witness::Elements(order)),
            Err(v) => v,
        }
    }

    /// Is `c` exactly the slot set of some level?
    fn full_level_of(&self, c: &[Elem]) -> Option<usize> {
        let set: std::collections::BTreeSet<Elem> = c.iter().copied().collect();
        for n in 0..=self.p.depth() {
            let level = self.p.level(n).unwrap();
            if level.len() == c.len() && level.iter().all(|e| set.contains(e)) {
                return Some(n);
            }
        }
        None
    }

    /// Decided wedge adjacency of a full level, read off the next level's
    /// parent sets.  Only valid when a graded edge-witnessing poset promises
    /// that every same-level wedge is witnessed one level down.
    fn level_adjacency(&self, n: usize, depth: usize) -> Option<Vec<(usize, usize)>> {
        let p = self.p;
        if !(p.flags().graded && p.flags().edge_witnessing) || n + 1 > depth.min(p.depth()) {
            return None;
        }
        let level = p.level(n).unwrap();
        let index: std::collections::HashMap<Elem, usize> =
            level.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut edges = std::collections::BTreeSet::new();
        for &w in p.level(n + 1).unwrap() {
            let parents: Vec<usize> = p
                .up_closure(&[w])
                .into_iter()
                .filter_map(|u| index.get(&u).copied())
                .collect();
            for (a, &i) in parents.iter().enumerate() {
                for &j in &parents[a + 1..] {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
        Some(edges.into_iter().collect())
    }

    /// The path enumeration of `c` under the wedge graph, or the verdict
    /// explaining why there is none (yet).
    pub fn snake_order(&self, c: &[Elem], depth: usize) -> Result<Vec<Elem>, Verdict> {
        let depth = depth.min(self.p.depth());
        let k = c.len();
        if k == 0 {
            return Err(Verdict::fails().with_note("empty set"));
        }
        if k == 1 {
            return Ok(vec![c[0]]);
        }
        // fast path: the wedge graph of a full level is decided by the next
        // level under the graded edge-witnessing flags
        if let Some(n) = self.full_level_of(c) {
            if self.p.flags().graded && self.p.flags().edge_witnessing {
                return match self.level_adjacency(n, depth) {
                    Some(edges) => {
                        let level = self.p.level(n).unwrap().to_vec();
                        let order = path_order_from_edges(k, &edges)
                            .map_err(|v| translate_witness(v, &level))?;
                        Ok(order.into_iter().map(|i| level[i]).collect())
                    }
                    None => {
                        Err(Verdict::unknown(depth)
                            .with_note("level wedges undecided at the horizon"))
                    }
                };
            }
        }
        let m = self.pair_states(c, depth);
        let mut undecided = false;
        let mut proved = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                match m[i][j] {
                    Some(true) => proved.push((i, j)),
                    Some(false) => {}
                    None => undecided = true,
                }
            }
        }
        match path_order_from_edges(k, &proved) {
            Ok(order) if !undecided => Ok(order.into_iter().map(|i| c[i]).collect()),
            Ok(_) => Err(Verdict::unknown(depth)),
            Err(v) => {
                // a vertex of proved degree three or a proved cycle is final
                // even with open pairs; a mere shortfall of edges is not
                if v.note.as_deref() == Some("wedge graph is not a path") && undecided {
                    Err(Verdict::unknown(depth))
                } else {
                    Err(translate_witness(v, c))
                }
            }
        }
    }
}

/// Replace index witnesses from the abstract path check with elements.
fn translate_witness(mut v: Verdict, c: &[Elem]) -> Verdict {
    if let Some(Witness::Elements(idx)) = &v.witness {
        v.witness = Some(Witness::Elements(idx.iter().map(|&i| c[i]).collect()));
    }
    v
}

/// Decide whether the graph on `0..k` with the given edges is a path and
/// return the endpoint-to-endpoint order.  Failure verdicts carry vertex
/// indices; callers translate them.
fn path_order_from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, Verdict> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    if let Some(i) = (0..k).find(|&i| adj[i].len() >= 3) {
        return Err(Verdict::fails()
            .with_witness(Witness::Elements(vec![i]))
            .with_note("three proved wedges at one element"));
    }
    if adj_has_cycle(&adj) {
        return Err(Verdict::fails().with_note("proved wedge cycle"));
    }
    if edges.len() != k - 1 || !adjacency_connected(&adj) {
        return Err(Verdict::fails().with_note("wedge graph is not a path"));
    }
    let start = (0..k).find(|&i| adj[i].len() == 1).unwrap();
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    for _ in 1..k {
        let next = adj[cur].iter().copied().find(|&j| j != prev).unwrap();
        order.push(next);
        prev = cur;
        cur = next;
    }
    Ok(order)
}

fn adjacency_connected(adj: &[Vec<usize>]) -> bool {
    let k = adj.len();
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
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

fn adj_has_cycle(adj: &[Vec<usize>]) -> bool {
    let k = adj.len();
    let mut seen = vec![false; k];
    for root in 0..k {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, usize::MAX)];
        while let Some((i, parent)) = stack.pop() {
            for &j in &adj[i] {
                if j == parent {
                    continue;
                }
                if seen[j] {
                    return true;
                }
                seen[j] = true;
                stack.push((j, i));
            }
        }
    }
    false
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

    /// Depth-2 binary tree with the flags the full tree genuinely has.
    fn tree2() -> TruncatedPoset {
        let flags = Flags {
            graded: true,
            atomless: true,
            edge_witnessing: true,
            star_refining: true,
            ..Flags::default()
        };
        TruncatedPoset::build(
            &[
                names(&["r"]),
                names(&["l", "s"]),
                names(&["ll", "lr", "sl", "sr"]),
            ],
            &edges(&[
                ("l", "r"),
                ("s", "r"),
                ("ll", "l"),
                ("lr", "l"),
                ("sl", "s"),
                ("sr", "s"),
            ]),
            flags,
            &[],
        )
        .unwrap()
    }

    #[test]
    fn wedge_reflexive_and_chain() {
        let p = tree2();
        let e = StarEngine::new(&p);
        let l = p.elem_by_name("l").unwrap();
        let ll = p.elem_by_name("ll").unwrap();
        assert!(e.wedge(l, l, 2).is_holds());
        assert!(e.wedge(l, ll, 2).is_holds());
    }

    #[test]
    fn tree_siblings_never_wedge() {
        let p = tree2();
        let e = StarEngine::new(&p);
        let l = p.elem_by_name("l").unwrap();
        let s = p.elem_by_name("s").unwrap();
        // decided via graded + edge_witnessing: rank 1 pair, level 2 present
        let v = e.wedge(l, s, 2);
        assert!(v.is_fails());
        assert!(v.assumptions.contains(&Flag::EdgeWitnessing));
        // at the horizon the same question is open
        let ll = p.elem_by_name("ll").unwrap();
        let sl = p.elem_by_name("sl").unwrap();
        assert!(e.wedge(ll, sl, 2).is_unknown());
    }

    #[test]
    fn tree_singleton_stars_and_star_below() {
        let p = tree2();
        let e = StarEngine::new(&p);
        let l = p.elem_by_name("l").unwrap();
        let star = e.level_star(l, 1, 2);
        assert!(star.decided);
        assert_eq!(star.members, vec![l]);
        assert!(e.star_below(l, l, 2).is_holds());
    }

    #[test]
    fn tree_star_refines_next_level() {
        let p = tree2();
        let e = StarEngine::new(&p);
        assert!(e.star_refines(1, 0, 2).is_holds());
        assert!(e.check_regular(2, 1).is_unknown() || e.check_regular(2, 1).is_holds());
    }

    #[test]
    fn tree_level_is_not_snake() {
        let p = tree2();
        let e = StarEngine::new(&p);
        let level1 = p.level(1).unwrap().to_vec();
        // two elements, no wedge: not a path
        assert!(e.is_snake(&level1, 2).is_fails());
        let r = p.elem_by_name("r").unwrap();
        assert!(e.is_snake(&[r], 2).is_holds());
    }

    #[test]
    fn edge_witnessing_check_detects_missing_witness() {
        // a and b wedge via w two levels down but share nothing at level 1
        let p = TruncatedPoset::build(
            &[
                names(&["X"]),
                names(&["a", "b"]),
                names(&["u", "v"]),
                names(&["w", "t"]),
            ],
            &edges(&[
                ("a", "X"),
                ("b", "X"),
                ("u", "a"),
                ("v", "b"),
                ("w", "u"),
                ("w", "v"),
                ("t", "u"),
            ]),
            Flags::default(),
            &[],
        )
        .unwrap();
        let e = StarEngine::new(&p);
        let v = e.check_edge_witnessing(3);
        assert!(v.is_fails());
        let a = p.elem_by_name("a").unwrap();
        let b = p.elem_by_name("b").unwrap();
        assert_eq!(v.witness, Some(Witness::Edges(vec![(a, b)])));
    }
}
