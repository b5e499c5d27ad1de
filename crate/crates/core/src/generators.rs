//! Built-in families: arc, circle, k-ary tree, cofinite-topology poset,
//! gradification, and checker-validated crooked towers.
//!
//! Every generator emits a validated truncation with the structural flags
//! the full family genuinely has.  The dyadic families carry interval
//! labels; they decorate output only and never enter order queries.

use thiserror::Error;

use crate::poset::{Elem, Flags, TruncatedPoset};
use crate::refiners::{Stage, Stages};
use crate::spectrum::is_path_crooked;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("generator output rejected by its checker: {0}")]
    GenerationFailed(String),
}

/// Dyadic covers of the unit interval: level `n` has `2^(n+1) - 1` links,
/// link `j` covering `(j/2^(n+1), (j+2)/2^(n+1))`, each link above the three
/// links `2j, 2j+1, 2j+2` below, consecutive links sharing exactly one.
pub fn gen_arc(depth: usize) -> TruncatedPoset {
    let mut levels = Vec::new();
    let mut edges = Vec::new();
    for n in 0..=depth {
        let width = (1usize << (n + 1)) - 1;
        levels.push((0..width).map(|j| format!("a{n}_{j}")).collect::<Vec<_>>());
        if n > 0 {
            let prev = (1usize << n) - 1;
            for j in 0..prev {
                for c in 2 * j..=2 * j + 2 {
                    edges.push((format!("a{n}_{c}"), format!("a{}_{j}", n - 1)));
                }
            }
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    let mut p = TruncatedPoset::build(&levels, &edges, flags, &[]).expect("arc levels are valid");
    for n in 0..=depth {
        let den = 1usize << (n + 1);
        for (j, &e) in p.level(n).unwrap().to_vec().iter().enumerate() {
            let label = format!("({j}/{den},{}/{den})", j + 2);
            p.set_label(e, label);
        }
    }
    p
}

/// Dyadic covers of the circle: a single top, then `2^(n+1)` arcs per level
/// with the same three-children pattern, cyclically.
pub fn gen_circle(depth: usize) -> TruncatedPoset {
    let mut levels = vec![vec!["c0_0".to_string()]];
    let mut edges = Vec::new();
    for n in 1..=depth {
        let width = 1usize << (n + 1);
        levels.push((0..width).map(|k| format!("c{n}_{k}")).collect::<Vec<_>>());
        if n == 1 {
            for k in 0..width {
                edges.push((format!("c1_{k}"), "c0_0".to_string()));
            }
        } else {
            let prev = 1usize << n;
            for k in 0..prev {
                for d in [2 * width + 2 * k - 1, 2 * k, 2 * k + 1] {
                    let c = d % width;
                    edges.push((format!("c{n}_{c}"), format!("c{}_{k}", n - 1)));
                }
            }
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    TruncatedPoset::build(&levels, &edges, flags, &[]).expect("circle levels are valid")
}

/// The full k-ary tree: level `n` has `k^n` nodes, each with its `k`
/// children below.  Siblings never share lower bounds, so the tree is
/// vacuously edge-witnessing and each level star-refines the previous one.
pub fn gen_tree(k: usize, depth: usize) -> Result<TruncatedPoset, GeneratorError> {
    if k < 2 {
        return Err(GeneratorError::BadParameter(format!("tree arity {k} < 2")));
    }
    let mut levels = Vec::new();
    let mut edges = Vec::new();
    for n in 0..=depth {
        let width = k.pow(n as u32);
        levels.push((0..width).map(|j| format!("t{n}_{j}")).collect::<Vec<_>>());
        if n > 0 {
            for j in 0..width {
                edges.push((format!("t{n}_{j}"), format!("t{}_{}", n - 1, j / k)));
            }
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        star_refining: true,
        ..Flags::default()
    };
    Ok(TruncatedPoset::build(&levels, &edges, flags, &[]).expect("tree levels are valid"))
}

/// The poset of the cofinite topology on a countable set: level `n` is
/// `{p_(n,i) : i <= n}`, with `p_(n+1,i)` and `p_(n+1,n+1)` the two
/// predecessors of `p_(n,i)`.
pub fn gen_cofinite(depth: usize) -> TruncatedPoset {
    let mut levels = Vec::new();
    let mut edges = Vec::new();
    for n in 0..=depth {
        levels.push((0..=n).map(|i| format!("p{n}_{i}")).collect::<Vec<_>>());
        if n > 0 {
            for i in 0..n {
                edges.push((format!("p{n}_{i}"), format!("p{}_{i}", n - 1)));
                edges.push((format!("p{n}_{n}"), format!("p{}_{i}", n - 1)));
            }
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    TruncatedPoset::build(&levels, &edges, flags, &[]).expect("cofinite levels are valid")
}

/// Gradification: the disjoint union of the levels, `(x, n+1)` covered by
/// `(y, n)` exactly when `x ≤ y`.  Produces an atomless graded poset with
/// level sizes equal to the input's, plus the staged back-and-forth
/// relations connecting the two.
pub fn gradify(p: &TruncatedPoset) -> (TruncatedPoset, Stages) {
    let mut levels = Vec::new();
    let mut edges = Vec::new();
    for n in 0..=p.depth() {
        let level = p.level(n).unwrap();
        levels.push(
            level
                .iter()
                .map(|&e| format!("{}@{n}", p.name(e)))
                .collect::<Vec<_>>(),
        );
        if n > 0 {
            for &x in level {
                for &y in p.level(n - 1).unwrap() {
                    if p.leq(x, y) {
                        edges.push((
                            format!("{}@{n}", p.name(x)),
                            format!("{}@{}", p.name(y), n - 1),
                        ));
                    }
                }
            }
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: p.flags().edge_witnessing,
        star_refining: p.flags().star_refining,
        ..Flags::default()
    };
    let g = TruncatedPoset::build(&levels, &edges, flags, &[]).expect("gradification is valid");
    let mut stages = Vec::new();
    for n in 0..p.depth() {
        let mut stage = Stage::default();
        for (i, &e) in p.level(n).unwrap().iter().enumerate() {
            let ge = g.level(n).unwrap()[i];
            stage.forward.push((ge, e));
        }
        for &x in p.level(n + 1).unwrap() {
            for (i, &y) in p.level(n).unwrap().iter().enumerate() {
                if p.leq(x, y) {
                    stage.back.push((x, g.level(n).unwrap()[i]));
                }
            }
        }
        stages.push(stage);
    }
    (g, Stages { stages })
}

/// One crooked step: a walk on the vertex/overlap scale of an `m`-link path.
/// Even positions `2j` are links, odd positions `2j+1` their overlaps; a
/// step always moves to an adjacent position.  The fold recursion
/// approaches the far end, retreats to the near end's zone, and approaches
/// again, which is exactly what the crookedness quantifier asks for.
fn fold(s: isize, t: isize, out: &mut Vec<isize>) {
    let d = (t - s).abs();
    let sign = if t >= s { 1 } else { -1 };
    if d <= 2 {
        let mut x = s;
        out.push(x);
        while x != t {
            x += sign;
            out.push(x);
        }
        return;
    }
    fold(s, t - 2 * sign, out);
    out.pop();
    fold(t - 2 * sign, s + 2 * sign, out);
    out.pop();
    fold(s + 2 * sign, t, out);
}

/// The crooked walk refining an `m`-link path, as positions on `0..2m-1`.
/// Endpoints sit on the outermost overlaps, which still cover the end links.
fn crooked_walk(m: usize) -> Vec<isize> {
    match m {
        0 => Vec::new(),
        1 => vec![0],
        2 => vec![0, 1, 2],
        _ => {
            let mut out = Vec::new();
            fold(1, 2 * m as isize - 3, &mut out);
            out
        }
    }
}

/// The straight doubling walk: every position once, in order.  Valid and
/// witness-complete, never crooked.
fn straight_walk(m: usize) -> Vec<isize> {
    (0..2 * m as isize - 1).collect()
}

/// Append one generated level below the current deepest path level.
fn push_walk_level(
    levels: &mut Vec<Vec<String>>,
    edges: &mut Vec<(String, String)>,
    walk: &[isize],
    n: usize,
) {
    let prev_names: Vec<String> = levels[n - 1].clone();
    let mut names = Vec::new();
    for (i, &pos) in walk.iter().enumerate() {
        let name = format!("s{n}_{i}");
        let j = (pos / 2) as usize;
        if pos % 2 == 0 {
            edges.push((name.clone(), prev_names[j].clone()));
        } else {
            edges.push((name.clone(), prev_names[j].clone()));
            edges.push((name.clone(), prev_names[j + 1].clone()));
        }
        names.push(name);
    }
    levels.push(names);
}

/// A tower of paths in which every level up to `depth` is a crooked
/// refinement of the previous one, validated by the crookedness checker at
/// build time.  One extra straight level is appended so the deepest crooked
/// level has its overlap structure witnessed.
pub fn gen_crooked(depth: usize, seed_len: usize) -> Result<TruncatedPoset, GeneratorError> {
    if depth < 1 {
        return Err(GeneratorError::BadParameter(format!(
            "crooked tower depth {depth} < 1"
        )));
    }
    if !(2..=6).contains(&seed_len) {
        return Err(GeneratorError::BadParameter(format!(
            "seed path length {seed_len} outside 2..=6"
        )));
    }
    let mut levels: Vec<Vec<String>> = vec![vec!["X".to_string()]];
    let mut edges: Vec<(String, String)> = Vec::new();
    // level 1: the seed path, trivially crooked below the single top link
    levels.push((0..seed_len).map(|i| format!("s1_{i}")).collect());
    for i in 0..seed_len {
        edges.push((format!("s1_{i}"), "X".to_string()));
    }
    for n in 2..=depth {
        let m = levels[n - 1].len();
        let walk = crooked_walk(m);
        push_walk_level(&mut levels, &mut edges, &walk, n);
    }
    // witness level: straight, so the deepest crooked level's wedges decide
    let m = levels[depth].len();
    push_walk_level(&mut levels, &mut edges, &straight_walk(m), depth + 1);
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    let p = TruncatedPoset::build(&levels, &edges, flags, &[])
        .map_err(|e| GeneratorError::GenerationFailed(e.to_string()))?;
    // checker validation: every consecutive pair up to `depth` is crooked
    for n in 1..=depth {
        let upper = p.level(n - 1).unwrap().to_vec();
        let lower = p.level(n).unwrap().to_vec();
        match is_path_crooked(&p, &lower, &upper, p.depth()) {
            Ok(v) if v.is_holds() => {}
            Ok(v) => {
                return Err(GeneratorError::GenerationFailed(format!(
                    "level {n} not certified crooked in level {}: {:?}",
                    n - 1,
                    v.outcome
                )))
            }
            Err(e) => return Err(GeneratorError::GenerationFailed(e.to_string())),
        }
    }
    Ok(p)
}

/// Element-wise label helper for the dyadic oracle in tests: the arc link
/// `(n, j)` as exact dyadic endpoints `(j, j+2) / 2^(n+1)`.
pub fn arc_interval(n: usize, j: usize) -> (u64, u64, u64) {
    (j as u64, j as u64 + 2, 1u64 << (n + 1))
}

pub fn arc_index(p: &TruncatedPoset, e: Elem) -> (usize, usize) {
    let id = p.home_id(e);
    (id.level, id.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::order_refines;

    #[test]
    fn arc_level_sizes_and_shape() {
        let p = gen_arc(2);
        assert_eq!(p.level(0).unwrap().len(), 1);
        assert_eq!(p.level(1).unwrap().len(), 3);
        assert_eq!(p.level(2).unwrap().len(), 7);
        // the top element is above all three level-1 links
        let top = p.level(0).unwrap()[0];
        for &e in p.level(1).unwrap() {
            assert!(p.leq(e, top));
        }
        // consecutive level-1 links share exactly one child
        let l1 = p.level(1).unwrap().to_vec();
        let shared: Vec<Elem> = p
            .level(2)
            .unwrap()
            .iter()
            .copied()
            .filter(|&c| p.leq(c, l1[0]) && p.leq(c, l1[1]))
            .collect();
        assert_eq!(shared.len(), 1);
        assert_eq!(p.home_id(shared[0]).index, 2);
    }

    #[test]
    fn circle_level_sizes_and_covers() {
        let p = gen_circle(3);
        assert_eq!(p.level(0).unwrap().len(), 1);
        assert_eq!(p.level(1).unwrap().len(), 4);
        assert_eq!(p.level(2).unwrap().len(), 8);
        assert_eq!(p.level(3).unwrap().len(), 16);
        // every element below the top has exactly 3 lower covers
        for n in 1..3 {
            for &e in p.level(n).unwrap() {
                assert_eq!(p.predecessors(e).len(), 3, "level {n}");
            }
        }
    }

    #[test]
    fn tree_shape() {
        let p = gen_tree(2, 3).unwrap();
        assert_eq!(p.level(3).unwrap().len(), 8);
        assert!(gen_tree(1, 2).is_err());
    }

    #[test]
    fn cofinite_shape_and_predecessors() {
        let p = gen_cofinite(6);
        for n in 0..=6 {
            assert_eq!(p.level(n).unwrap().len(), n + 1);
        }
        // exactly two immediate predecessors everywhere above the horizon
        for n in 0..6 {
            for &e in p.level(n).unwrap() {
                assert_eq!(p.predecessors(e).len(), 2);
            }
        }
        // p_(n,n) has all of level n-1 as immediate successors
        let e = p.elem_by_name("p3_3").unwrap();
        assert_eq!(p.covers_above(e).len(), 3);
    }

    #[test]
    fn gradify_keeps_level_sizes() {
        let p = gen_arc(3);
        let (g, stages) = gradify(&p);
        for n in 0..=3 {
            assert_eq!(g.level(n).unwrap().len(), p.level(n).unwrap().len());
        }
        assert_eq!(stages.stages.len(), 3);
    }

    #[test]
    fn crooked_tower_builds_and_validates() {
        let p = gen_crooked(3, 4).unwrap();
        assert_eq!(p.depth(), 4);
        // every level refines the one above
        for n in 1..=p.depth() {
            assert!(order_refines(
                &p,
                p.level(n).unwrap(),
                p.level(n - 1).unwrap()
            ));
        }
    }
}
