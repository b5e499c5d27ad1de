//! Shared fixtures and seeded random poset generators for the test suites.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use opct_core::{Flags, TruncatedPoset};

/// P = {a,b,c,d} with a<c, b<c, b<d (the band-but-not-cutset fixture).
pub fn f1() -> TruncatedPoset {
    let flags = Flags {
        finite_complete: true,
        ..Flags::default()
    };
    TruncatedPoset::build(
        &[vec!["c".into(), "d".into()], vec!["a".into(), "b".into()]],
        &[
            ("a".into(), "c".into()),
            ("b".into(), "c".into()),
            ("b".into(), "d".into()),
        ],
        flags,
        &[],
    )
    .unwrap()
}

/// The non-graded three-cover fixture on the unit interval.
pub fn f3() -> TruncatedPoset {
    let levels = vec![
        vec!["c1a".to_string(), "c1b".to_string()],
        vec!["c2a".to_string(), "c2b".to_string()],
        vec![
            "c3a".to_string(),
            "c3b".to_string(),
            "c3c".to_string(),
            "c3d".to_string(),
        ],
    ];
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    let edges = vec![
        e("c2a", "c1a"),
        e("c2b", "c1b"),
        e("c3a", "c2a"),
        e("c3a", "c1a"),
        e("c3b", "c2a"),
        e("c3b", "c1a"),
        e("c3b", "c1b"),
        e("c3c", "c2b"),
        e("c3c", "c1a"),
        e("c3c", "c1b"),
        e("c3d", "c2b"),
        e("c3d", "c1b"),
    ];
    TruncatedPoset::build(&levels, &edges, Flags::default(), &[]).unwrap()
}

/// The two-lane poset omega x {0,1}: level n is {a_n, b_(n-1)}.
pub fn f5(depth: usize) -> TruncatedPoset {
    let mut levels = vec![vec!["a0".to_string()]];
    let mut edges: Vec<(String, String)> = Vec::new();
    for n in 1..=depth {
        levels.push(vec![format!("a{n}"), format!("b{}", n - 1)]);
        edges.push((format!("a{n}"), format!("a{}", n - 1)));
        edges.push((format!("b{}", n - 1), format!("a{}", n - 1)));
        if n >= 2 {
            edges.push((format!("b{}", n - 1), format!("b{}", n - 2)));
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    TruncatedPoset::build(&levels, &edges, flags, &[]).unwrap()
}

/// A seeded random valid truncation with `finite_complete` set, at most
/// `max_elems` elements, and graded (consecutive-level) edges.
///
/// Every level-n element gets at least one child and every deeper element
/// at least one parent, so the level laws hold with no atom marks.
pub fn random_finite_poset(rng: &mut ChaCha8Rng, max_elems: usize) -> TruncatedPoset {
    loop {
        let n_levels = rng.gen_range(1..=3);
        let mut sizes = Vec::new();
        let mut total = 0usize;
        for i in 0..n_levels {
            let lo = if i == 0 { 1 } else { sizes[i - 1] };
            let hi = (lo + 3).min(max_elems.saturating_sub(total).max(lo));
            let s = rng.gen_range(lo..=hi);
            sizes.push(s);
            total += s;
        }
        if total > max_elems {
            continue;
        }
        let levels: Vec<Vec<String>> = sizes
            .iter()
            .enumerate()
            .map(|(n, &s)| (0..s).map(|j| format!("e{n}_{j}")).collect())
            .collect();
        let mut edges = Vec::new();
        for n in 1..sizes.len() {
            let (prev, cur) = (sizes[n - 1], sizes[n]);
            let mut covered = vec![false; prev];
            for j in 0..cur {
                let parent = rng.gen_range(0..prev);
                covered[parent] = true;
                edges.push((format!("e{n}_{j}"), format!("e{}_{parent}", n - 1)));
                // occasional extra parents
                for _ in 0..rng.gen_range(0..=2) {
                    let extra = rng.gen_range(0..prev);
                    covered[extra] = true;
                    edges.push((format!("e{n}_{j}"), format!("e{}_{extra}", n - 1)));
                }
            }
            // ensure corefinement: uncovered parents adopt a random child
            for (parent, c) in covered.iter().enumerate() {
                if !c {
                    let child = rng.gen_range(0..cur);
                    edges.push((format!("e{n}_{child}"), format!("e{}_{parent}", n - 1)));
                }
            }
        }
        let flags = Flags {
            graded: true,
            finite_complete: true,
            ..Flags::default()
        };
        match TruncatedPoset::build(&levels, &edges, flags, &[]) {
            Ok(p) => return p,
            Err(_) => continue,
        }
    }
}

/// A seeded random path-refinement pair inside a three-level tower: level 1
/// is a `q_len`-link path, level 2 a walk over it, level 3 a straight
/// witness level so every wedge is decided.  Returns the poset; levels 2
/// and 1 are the (P, Q) pair.
pub fn random_path_pair(rng: &mut ChaCha8Rng, q_len: usize, p_len: usize) -> TruncatedPoset {
    // random ±1 walk over positions 0..2*q_len-1 covering every link
    let span = 2 * q_len - 1;
    let walk = loop {
        let mut pos = rng.gen_range(0..span) as isize;
        let mut walk = vec![pos];
        for _ in 1..p_len {
            let up = pos + 1 < span as isize;
            let down = pos > 0;
            let step = match (down, up) {
                (true, true) => {
                    if rng.gen_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                }
                (false, true) => 1,
                (true, false) => -1,
                _ => break,
            };
            pos += step;
            walk.push(pos);
        }
        let mut covered = vec![false; q_len];
        for &w in &walk {
            covered[(w / 2) as usize] = true;
            if w % 2 == 1 {
                covered[(w / 2 + 1) as usize] = true;
            }
        }
        if walk.len() == p_len && covered.into_iter().all(|c| c) {
            break walk;
        }
    };
    let mut levels = vec![vec!["X".to_string()]];
    levels.push((0..q_len).map(|i| format!("q{i}")).collect());
    levels.push((0..p_len).map(|i| format!("p{i}")).collect());
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 0..q_len {
        edges.push((format!("q{i}"), "X".to_string()));
    }
    for (i, &w) in walk.iter().enumerate() {
        let j = (w / 2) as usize;
        edges.push((format!("p{i}"), format!("q{j}")));
        if w % 2 == 1 {
            edges.push((format!("p{i}"), format!("q{}", j + 1)));
        }
    }
    // straight witness level below the walk
    let w_len = 2 * p_len - 1;
    levels.push((0..w_len).map(|i| format!("w{i}")).collect());
    for i in 0..w_len {
        edges.push((format!("w{i}"), format!("p{}", i / 2)));
        if i % 2 == 1 {
            edges.push((format!("w{i}"), format!("p{}", i / 2 + 1)));
        }
    }
    let flags = Flags {
        graded: true,
        atomless: true,
        edge_witnessing: true,
        ..Flags::default()
    };
    TruncatedPoset::build(&levels, &edges, flags, &[]).unwrap()
}
