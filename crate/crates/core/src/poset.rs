//! Finite truncations of countable posets with finite levels.
//!
//! A [`TruncatedPoset`] stores levels `P_0 .. P_d` as finite antichains plus
//! downward order edges between them.  Construction validates the level laws:
//! each level is an antichain, every element of level `n+1` lies below some
//! element of level `n`, every non-atom of level `n` lies above some element
//! of level `n+1`, and consecutive levels share only declared atoms.  Under
//! those laws the stored levels coincide with the derived ones (the minimal
//! elements of each cone), so all rank and level queries are exact on the
//! truncation.
//!
//! Elements are addressed two ways: by [`ElementId`] (level, position), the
//! coordinates used in files and reports, and by [`Elem`], a dense canonical
//! index.  A declared atom keeps a single canonical index while appearing in
//! every level from its first one down to the deepest.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::bits::BitMatrix;

/// Canonical element index within one poset.
pub type Elem = usize;

/// (level, position-within-level) coordinates of an element slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId {
    pub level: usize,
    pub index: usize,
}

impl ElementId {
    pub fn new(level: usize, index: usize) -> Self {
        ElementId { level, index }
    }
}

/// Structural flags declared at build time.  They assert facts about the
/// full (untruncated) poset that no finite prefix can verify; verdicts that
/// use them record the assumption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flag {
    Graded,
    Atomless,
    EdgeWitnessing,
    StarRefining,
    FiniteComplete,
}

impl Flag {
    pub const ALL: [Flag; 5] = [
        Flag::Graded,
        Flag::Atomless,
        Flag::EdgeWitnessing,
        Flag::StarRefining,
        Flag::FiniteComplete,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::Graded => "graded",
            Flag::Atomless => "atomless",
            Flag::EdgeWitnessing => "edge_witnessing",
            Flag::StarRefining => "star_refining",
            Flag::FiniteComplete => "finite_complete",
        }
    }

    pub fn parse(s: &str) -> Option<Flag> {
        Flag::ALL.iter().copied().find(|f| f.name() == s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub graded: bool,
    pub atomless: bool,
    pub edge_witnessing: bool,
    pub star_refining: bool,
    pub finite_complete: bool,
}

impl Flags {
    pub fn has(&self, f: Flag) -> bool {
        match f {
            Flag::Graded => self.graded,
            Flag::Atomless => self.atomless,
            Flag::EdgeWitnessing => self.edge_witnessing,
            Flag::StarRefining => self.star_refining,
            Flag::FiniteComplete => self.finite_complete,
        }
    }

    pub fn set(&mut self, f: Flag) {
        match f {
            Flag::Graded => self.graded = true,
            Flag::Atomless => self.atomless = true,
            Flag::EdgeWitnessing => self.edge_witnessing = true,
            Flag::StarRefining => self.star_refining = true,
            Flag::FiniteComplete => self.finite_complete = true,
        }
    }

    pub fn list(&self) -> Vec<Flag> {
        Flag::ALL.iter().copied().filter(|&f| self.has(f)).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("poset must have at least one level")]
    EmptyLevels,
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("name `{0}` listed twice in level {1}")]
    DuplicateName(String, usize),
    #[error("edge references unknown element `{0}`")]
    UnknownElement(String),
    #[error("edge `{lower}` < `{upper}` does not go strictly downward in level index")]
    UpwardEdge { lower: String, upper: String },
    #[error("edge `{lower}` < `{upper}` joins two elements of level {level}")]
    LevelNotAntichain {
        lower: String,
        upper: String,
        level: usize,
    },
    #[error("graded poset stores only consecutive-level edges, got `{lower}` < `{upper}`")]
    NonConsecutiveEdge { lower: String, upper: String },
    #[error("element `{0}` of level {1} has no upper bound in level {2}")]
    RefinementGap(String, usize, usize),
    #[error("non-atom `{0}` of level {1} has no lower bound in level {2}")]
    CorefinementGap(String, usize, usize),
    #[error("element `{0}` reappears in level {1} but is not marked as an atom")]
    SharedNonAtom(String, usize),
    #[error("atom `{0}` appears in level {1} but is missing from level {2}")]
    AtomGap(String, usize, usize),
    #[error("atom `{0}` has a strict lower bound `{1}`")]
    AtomBelow(String, String),
    #[error("elements `{0}` and `{1}` of level {2} are comparable")]
    ComparableInLevel(String, String, usize),
    #[error("unknown atom mark `{0}`")]
    UnknownAtom(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("level {requested} exceeds truncation depth {depth}")]
pub struct DepthExceeded {
    pub requested: usize,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct TruncatedPoset {
    names: Vec<String>,
    name_index: HashMap<String, Elem>,
    home: Vec<ElementId>,
    levels: Vec<Vec<Elem>>,
    flags: Flags,
    atoms: BTreeSet<Elem>,
    /// Direct upper neighbours as given (deduplicated, no closure).
    edges_up: Vec<Vec<Elem>>,
    /// Upper covers in the derived order (Hasse reduction).
    covers_up: Vec<Vec<Elem>>,
    /// Lower covers (inverse of `covers_up`).
    covers_down: Vec<Vec<Elem>>,
    ups: BitMatrix,
    downs: BitMatrix,
    rank: Vec<usize>,
    labels: BTreeMap<Elem, String>,
}

impl TruncatedPoset {
    /// Validating constructor.  `levels` lists element names per level
    /// (level 0 first); a name repeated in a deeper level denotes the same
    /// element and must be atom-marked.  `edges` are `(lower, upper)` name
    /// pairs going strictly downward in level index.
    pub fn build(
        levels: &[Vec<String>],
        edges: &[(String, String)],
        flags: Flags,
        atom_marks: &[String],
    ) -> Result<TruncatedPoset, BuildError> {
        let p = Self::assemble(levels, edges, flags, atom_marks, true)?;
        p.validate()?;
        Ok(p)
    }

    /// Constructor that skips the level-law validation (edge sanity is still
    /// enforced).  Intended for exercising checkers on malformed data.
    pub fn build_unchecked(
        levels: &[Vec<String>],
        edges: &[(String, String)],
        flags: Flags,
        atom_marks: &[String],
    ) -> Result<TruncatedPoset, BuildError> {
        Self::assemble(levels, edges, flags, atom_marks, false)
    }

    fn assemble(
        levels: &[Vec<String>],
        edges: &[(String, String)],
        flags: Flags,
        atom_marks: &[String],
        strict: bool,
    ) -> Result<TruncatedPoset, BuildError> {
        if levels.is_empty() {
            return Err(BuildError::EmptyLevels);
        }
        let mut names: Vec<String> = Vec::new();
        let mut name_index: HashMap<String, Elem> = HashMap::new();
        let mut home: Vec<ElementId> = Vec::new();
        let mut level_elems: Vec<Vec<Elem>> = Vec::with_capacity(levels.len());

        for (n, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(BuildError::EmptyLevel(n));
            }
            let mut seen = BTreeSet::new();
            let mut elems = Vec::with_capacity(level.len());
            for (i, name) in level.iter().enumerate() {
                if let Some(&e) = name_index.get(name) {
                    if home[e].level == n || !seen.insert(e) {
                        return Err(BuildError::DuplicateName(name.clone(), n));
                    }
                    elems.push(e);
                } else {
                    let e = names.len();
                    names.push(name.clone());
                    name_index.insert(name.clone(), e);
                    home.push(ElementId::new(n, i));
                    seen.insert(e);
                    elems.push(e);
                }
            }
            level_elems.push(elems);
        }

        let mut atoms = BTreeSet::new();
        for mark in atom_marks {
            let &e = name_index
                .get(mark)
                .ok_or_else(|| BuildError::UnknownAtom(mark.clone()))?;
            atoms.insert(e);
        }

        let n_elems = names.len();
        let mut edges_up: Vec<BTreeSet<Elem>> = vec![BTreeSet::new(); n_elems];
        for (lo_name, up_name) in edges {
            let &lo = name_index
                .get(lo_name)
                .ok_or_else(|| BuildError::UnknownElement(lo_name.clone()))?;
            let &up = name_index
                .get(up_name)
                .ok_or_else(|| BuildError::UnknownElement(up_name.clone()))?;
            let (ll, ul) = (home[lo].level, home[up].level);
            if ll == ul {
                return Err(BuildError::LevelNotAntichain {
                    lower: lo_name.clone(),
                    upper: up_name.clone(),
                    level: ll,
                });
            }
            if ll < ul {
                return Err(BuildError::UpwardEdge {
                    lower: lo_name.clone(),
                    upper: up_name.clone(),
                });
            }
            if strict && flags.graded && ll != ul + 1 {
                return Err(BuildError::NonConsecutiveEdge {
                    lower: lo_name.clone(),
                    upper: up_name.clone(),
                });
            }
            if strict && atoms.contains(&up) {
                return Err(BuildError::AtomBelow(up_name.clone(), lo_name.clone()));
            }
            edges_up[lo].insert(up);
        }
        let edges_up: Vec<Vec<Elem>> = edges_up
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();

        // Reflexive-transitive closure; canonical indices ascend with home
        // level, so a single pass in index order settles every row.
        let mut ups = BitMatrix::new(n_elems, n_elems);
        for e in 0..n_elems {
            ups.set(e, e);
            for &u in &edges_up[e] {
                ups.or_row_into(u, e);
            }
        }
        let downs = ups.transpose(n_elems);

        let mut rank = vec![0usize; n_elems];
        for e in 0..n_elems {
            rank[e] = edges_up[e].iter().map(|&u| rank[u] + 1).max().unwrap_or(0);
        }

        // Hasse reduction: u covers e iff no other strict upper of e is
        // strictly below u.
        let mut covers_up: Vec<Vec<Elem>> = vec![Vec::new(); n_elems];
        let mut covers_down: Vec<Vec<Elem>> = vec![Vec::new(); n_elems];
        for e in 0..n_elems {
            let strict_ups: Vec<Elem> = ups.iter_row(e).filter(|&u| u != e).collect();
            for &u in &strict_ups {
                let between = strict_ups.iter().any(|&r| r != u && ups.get(r, u));
                if !between {
                    covers_up[e].push(u);
                }
            }
        }
        for e in 0..n_elems {
            for &u in &covers_up[e] {
                covers_down[u].push(e);
            }
        }
        for v in covers_down.iter_mut() {
            v.sort_unstable();
        }

        Ok(TruncatedPoset {
            names,
            name_index,
            home,
            levels: level_elems,
            flags,
            atoms,
            edges_up,
            covers_up,
            covers_down,
            ups,
            downs,
            rank,
            labels: BTreeMap::new(),
        })
    }

    fn validate(&self) -> Result<(), BuildError> {
        // Antichain per level (distinct canonical elements must be incomparable).
        for (n, level) in self.levels.iter().enumerate() {
            for (i, &p) in level.iter().enumerate() {
                for &q in &level[i + 1..] {
                    if p != q && (self.leq(p, q) || self.leq(q, p)) {
                        return Err(BuildError::ComparableInLevel(
                            self.names[p].clone(),
                            self.names[q].clone(),
                            n,
                        ));
                    }
                }
            }
        }
        // Refinement, corefinement, atom persistence.
        for n in 0..self.levels.len() {
            if n > 0 {
                let above: BTreeSet<Elem> = self.levels[n - 1].iter().copied().collect();
                for &p in &self.levels[n] {
                    let ok = above.iter().any(|&q| self.leq(p, q));
                    if !ok {
                        return Err(BuildError::RefinementGap(self.names[p].clone(), n, n - 1));
                    }
                }
            }
            if n + 1 < self.levels.len() {
                let below: BTreeSet<Elem> = self.levels[n + 1].iter().copied().collect();
                for &p in &self.levels[n] {
                    if self.atoms.contains(&p) {
                        if !below.contains(&p) {
                            return Err(BuildError::AtomGap(self.names[p].clone(), n, n + 1));
                        }
                        continue;
                    }
                    if below.contains(&p) {
                        return Err(BuildError::SharedNonAtom(self.names[p].clone(), n + 1));
                    }
                    let ok = below.iter().any(|&q| q != p && self.leq(q, p));
                    if !ok {
                        return Err(BuildError::CorefinementGap(self.names[p].clone(), n, n + 1));
                    }
                }
            }
        }
        // An element may only appear in a contiguous run of levels.
        let mut last_seen: BTreeMap<Elem, usize> = BTreeMap::new();
        for (n, level) in self.levels.iter().enumerate() {
            for &p in level {
                if let Some(&m) = last_seen.get(&p) {
                    if m + 1 != n {
                        return Err(BuildError::AtomGap(self.names[p].clone(), m, n));
                    }
                }
                last_seen.insert(p, n);
            }
        }
        Ok(())
    }

    /// Append one level, returning the extended poset.  The original value is
    /// untouched; all order facts about existing elements carry over.
    pub fn extend(
        &self,
        new_level: &[String],
        new_edges: &[(String, String)],
    ) -> Result<TruncatedPoset, BuildError> {
        let mut levels: Vec<Vec<String>> = self
            .levels
            .iter()
            .map(|l| l.iter().map(|&e| self.names[e].clone()).collect())
            .collect();
        levels.push(new_level.to_vec());
        let mut edges: Vec<(String, String)> = self.stored_edges();
        edges.extend_from_slice(new_edges);
        let atom_marks: Vec<String> = self.atoms.iter().map(|&e| self.names[e].clone()).collect();
        let mut p = TruncatedPoset::build(&levels, &edges, self.flags, &atom_marks)?;
        p.labels = self.labels.clone();
        Ok(p)
    }

    /// The stored (non-closed) edge list as name pairs.
    pub fn stored_edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in 0..self.names.len() {
            for &u in &self.edges_up[e] {
                out.push((self.names[e].clone(), self.names[u].clone()));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// Override flags, e.g. to apply `--assume` assertions.
    pub fn assume(&mut self, f: Flag) {
        self.flags.set(f);
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn names_of(&self, es: &[Elem]) -> Vec<String> {
        es.iter().map(|&e| self.names[e].clone()).collect()
    }

    pub fn elem_by_name(&self, name: &str) -> Option<Elem> {
        self.name_index.get(name).copied()
    }

    /// Canonical element sitting at the given coordinates.
    pub fn element_at(&self, id: ElementId) -> Option<Elem> {
        self.levels.get(id.level)?.get(id.index).copied()
    }

    /// Coordinates of the element's first appearance.
    pub fn home_id(&self, e: Elem) -> ElementId {
        self.home[e]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.names.len()
    }

    /// Slots of level `n` (canonical elements in position order).
    pub fn level(&self, n: usize) -> Result<&[Elem], DepthExceeded> {
        self.levels
            .get(n)
            .map(|v| v.as_slice())
            .ok_or(DepthExceeded {
                requested: n,
                depth: self.depth(),
            })
    }

    /// All elements of rank <= n: the union of levels 0..=n.
    pub fn cone(&self, n: usize) -> Result<Vec<Elem>, DepthExceeded> {
        if n > self.depth() {
            return Err(DepthExceeded {
                requested: n,
                depth: self.depth(),
            });
        }
        let mut seen = BTreeSet::new();
        for level in &self.levels[..=n] {
            seen.extend(level.iter().copied());
        }
        Ok(seen.into_iter().collect())
    }

    /// p <= q in the reflexive-transitive closure of the stored edges.
    pub fn leq(&self, p: Elem, q: Elem) -> bool {
        self.ups.get(p, q)
    }

    pub fn lt(&self, p: Elem, q: Elem) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn comparable(&self, p: Elem, q: Elem) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    /// Ordinal rank within the truncation: 0 for maximal elements, otherwise
    /// one more than the largest rank strictly above.
    pub fn rank(&self, e: Elem) -> usize {
        self.rank[e]
    }

    /// Complete: principal filters live entirely inside the truncation.
    pub fn up_closure(&self, s: &[Elem]) -> Vec<Elem> {
        let mut out = BTreeSet::new();
        for &e in s {
            out.extend(self.ups.iter_row(e));
        }
        out.into_iter().collect()
    }

    /// Partial by nature: only the part of the down-set the truncation has
    /// generated so far.
    pub fn down_closure_in_truncation(&self, s: &[Elem]) -> Vec<Elem> {
        let mut out = BTreeSet::new();
        for &e in s {
            out.extend(self.downs.iter_row(e));
        }
        out.into_iter().collect()
    }

    pub fn strict_ups(&self, e: Elem) -> Vec<Elem> {
        self.ups.iter_row(e).filter(|&u| u != e).collect()
    }

    pub fn strict_downs(&self, e: Elem) -> Vec<Elem> {
        self.downs.iter_row(e).filter(|&d| d != e).collect()
    }

    /// Upper covers (immediate successors).
    pub fn covers_above(&self, e: Elem) -> &[Elem] {
        &self.covers_up[e]
    }

    /// Lower covers (immediate predecessors).
    pub fn predecessors(&self, e: Elem) -> &[Elem] {
        &self.covers_down[e]
    }

    /// Smallest common lower bound (by canonical index) inside the truncation.
    pub fn common_lower_bound(&self, p: Elem, q: Elem) -> Option<Elem> {
        self.downs.first_common(p, q)
    }

    pub fn is_minimal_in_truncation(&self, e: Elem) -> bool {
        self.covers_down[e].is_empty()
    }

    /// Atomhood as far as the declaration goes: marked atoms are atoms; under
    /// `finite_complete` every minimal element is one.  Other leaves have
    /// undetermined atomhood.
    pub fn is_atom(&self, e: Elem) -> bool {
        self.atoms.contains(&e) || (self.flags.finite_complete && self.is_minimal_in_truncation(e))
    }

    pub fn is_atom_marked(&self, e: Elem) -> bool {
        self.atoms.contains(&e)
    }

    pub fn atom_marks(&self) -> impl Iterator<Item = Elem> + '_ {
        self.atoms.iter().copied()
    }

    /// True when the element's atomhood cannot be read off the truncation:
    /// it is minimal so far, unmarked, and the poset is not finite-complete.
    /// With the `atomless` flag the element is known to be a non-atom, but
    /// its lower bounds still lie beyond the horizon.
    pub fn atomhood_undecided(&self, e: Elem) -> bool {
        !self.is_atom(e) && self.is_minimal_in_truncation(e) && !self.flags.atomless
    }

    pub fn set_label(&mut self, e: Elem, label: impl Into<String>) {
        self.labels.insert(e, label.into());
    }

    pub fn label(&self, e: Elem) -> Option<&str> {
        self.labels.get(&e).map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn edges(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    /// P = {a,b,c,d} with a<c, b<c, b<d.
    pub(crate) fn f1() -> TruncatedPoset {
        let mut flags = Flags::default();
        flags.finite_complete = true;
        TruncatedPoset::build(
            &[names(&["c", "d"]), names(&["a", "b"])],
            &edges(&[("a", "c"), ("b", "c"), ("b", "d")]),
            flags,
            &[],
        )
        .unwrap()
    }

    #[test]
    fn single_cover_accepted() {
        let p = TruncatedPoset::build(
            &[names(&["X"]), names(&["a", "b", "c"])],
            &edges(&[("a", "X"), ("b", "X"), ("c", "X")]),
            Flags::default(),
            &[],
        )
        .unwrap();
        assert_eq!(p.depth(), 1);
        assert_eq!(p.level(1).unwrap().len(), 3);
    }

    #[test]
    fn refinement_gap_rejected() {
        // q has no upper bound in level 0.
        let err = TruncatedPoset::build(
            &[names(&["X"]), names(&["p", "q"])],
            &edges(&[("p", "X")]),
            Flags::default(),
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::RefinementGap(n, 1, 0) if n == "q"));
    }

    #[test]
    fn corefinement_gap_rejected() {
        // Y has no lower bound in level 1
        let err = TruncatedPoset::build(
            &[names(&["X", "Y"]), names(&["p"])],
            &edges(&[("p", "X")]),
            Flags::default(),
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::CorefinementGap(..)));
    }

    #[test]
    fn shared_non_atom_rejected() {
        // X reappears in level 1 without an atom mark
        let err = TruncatedPoset::build(
            &[names(&["X", "Y"]), names(&["X", "p"])],
            &edges(&[("p", "Y")]),
            Flags::default(),
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::SharedNonAtom(..)));
    }

    #[test]
    fn atom_alias_keeps_identity() {
        let p = TruncatedPoset::build(
            &[names(&["X"]), names(&["a", "p"]), names(&["a", "q", "r"])],
            &edges(&[("a", "X"), ("p", "X"), ("q", "p"), ("r", "p")]),
            Flags::default(),
            &["a".to_string()],
        )
        .unwrap();
        let a1 = p.element_at(ElementId::new(1, 0)).unwrap();
        let a2 = p.element_at(ElementId::new(2, 0)).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(p.rank(a1), 1);
    }

    #[test]
    fn atom_must_persist() {
        let err = TruncatedPoset::build(
            &[names(&["X"]), names(&["a", "p"]), names(&["q", "r"])],
            &edges(&[("a", "X"), ("p", "X"), ("q", "p"), ("r", "p")]),
            Flags::default(),
            &["a".to_string()],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::AtomGap(..)));
    }

    #[test]
    fn leq_reflexive_and_via_closure() {
        let p = f1();
        let a = p.elem_by_name("a").unwrap();
        let c = p.elem_by_name("c").unwrap();
        let d = p.elem_by_name("d").unwrap();
        assert!(p.leq(a, a));
        assert!(p.leq(a, c));
        assert!(!p.leq(a, d));
    }

    #[test]
    fn f1_ranks_and_closures() {
        let p = f1();
        let b = p.elem_by_name("b").unwrap();
        let c = p.elem_by_name("c").unwrap();
        let d = p.elem_by_name("d").unwrap();
        assert_eq!(p.rank(c), 0);
        assert_eq!(p.rank(b), 1);
        let up_b = p.up_closure(&[b]);
        let mut up_names = p.names_of(&up_b);
        up_names.sort();
        assert_eq!(up_names, ["b", "c", "d"].map(String::from).to_vec());
        let down_c = p.down_closure_in_truncation(&[c]);
        assert_eq!(down_c.len(), 3);
        assert!(down_c.contains(&b) && down_c.contains(&c));
        let _ = d;
    }

    #[test]
    fn extend_appends_level() {
        let p = TruncatedPoset::build(
            &[names(&["X"]), names(&["a", "b"])],
            &edges(&[("a", "X"), ("b", "X")]),
            Flags::default(),
            &[],
        )
        .unwrap();
        let q = p
            .extend(
                &names(&["u", "v", "w"]),
                &edges(&[("u", "a"), ("v", "a"), ("v", "b"), ("w", "b")]),
            )
            .unwrap();
        assert_eq!(q.depth(), 2);
        // old order facts preserved
        let a = q.elem_by_name("a").unwrap();
        let x = q.elem_by_name("X").unwrap();
        assert!(q.leq(a, x));
        // empty level rejected
        assert!(p.extend(&[], &[]).is_err());
    }

    #[test]
    fn covers_are_reduced() {
        // chain u < a < X given with the redundant long edge u < X
        let p = TruncatedPoset::build(
            &[names(&["X"]), names(&["a"]), names(&["u"])],
            &edges(&[("a", "X"), ("u", "a"), ("u", "X")]),
            Flags::default(),
            &[],
        )
        .unwrap();
        let u = p.elem_by_name("u").unwrap();
        let a = p.elem_by_name("a").unwrap();
        assert_eq!(p.covers_above(u), &[a]);
        assert_eq!(p.predecessors(a), &[u]);
    }

    #[test]
    fn upward_edge_rejected() {
        let err = TruncatedPoset::build(
            &[names(&["X"]), names(&["a"])],
            &edges(&[("X", "a")]),
            Flags::default(),
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::UpwardEdge { .. }));
    }
}
