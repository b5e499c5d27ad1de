//! Three-valued answers for properties that are only semi-decidable from a
//! finite truncation.
//!
//! `Holds` and `Fails` always carry evidence that can be re-checked with
//! order queries alone; `Unknown` records the depth that was exhausted.
//! A verdict that relied on declared structural flags lists them in
//! `assumptions`, so a report never claims more than the input did.

use crate::poset::{Elem, Flag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

/// Evidence attached to a decided verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Elements demonstrating the answer (a counterexample element, a band, ...).
    Elements(Vec<Elem>),
    /// Pairs demonstrating the answer (a covering pair, a relation pair, ...).
    Edges(Vec<(Elem, Elem)>),
    /// A level index certifying the answer (e.g. the level refining a cap).
    Level(usize),
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Depth the search exhausted; meaningful when the outcome is `Unknown`.
    pub exhausted_depth: Option<usize>,
    /// Declared flags this verdict leaned on.
    pub assumptions: Vec<Flag>,
    /// Free-form qualifier, e.g. the hypothesis under which a certificate holds.
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds() -> Self {
        Verdict {
            outcome: Outcome::Holds,
            witness: None,
            exhausted_depth: None,
            assumptions: Vec::new(),
            note: None,
        }
    }

    pub fn fails() -> Self {
        Verdict {
            outcome: Outcome::Fails,
            ..Verdict::holds()
        }
    }

    pub fn unknown(exhausted_depth: usize) -> Self {
        Verdict {
            outcome: Outcome::Unknown,
            exhausted_depth: Some(exhausted_depth),
            ..Verdict::holds()
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_assumption(mut self, f: Flag) -> Self {
        if !self.assumptions.contains(&f) {
            self.assumptions.push(f);
        }
        self
    }

    pub fn with_assumptions(mut self, fs: &[Flag]) -> Self {
        for &f in fs {
            self = self.with_assumption(f);
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }

    pub fn is_unknown(&self) -> bool {
        self.outcome == Outcome::Unknown
    }
}

/// Fold a sequence of per-item verdicts into an aggregate: any failure wins,
/// otherwise any unknown, otherwise the whole scan holds.
pub fn aggregate<I: IntoIterator<Item = Verdict>>(items: I) -> Verdict {
    let mut pending: Option<Verdict> = None;
    for v in items {
        match v.outcome {
            Outcome::Fails => return v,
            Outcome::Unknown => {
                if pending.is_none() {
                    pending = Some(v);
                }
            }
            Outcome::Holds => {}
        }
    }
    pending.unwrap_or_else(Verdict::holds)
}
