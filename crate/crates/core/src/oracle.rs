//! Ground sets, the objective interface and the counted oracle that solvers query.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Dense index of an element of a [`GroundSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub usize);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for ElementId {
    fn from(i: usize) -> Self {
        ElementId(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(size: usize) -> Self {
        GroundSet { size, labels: None }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        GroundSet {
            size: labels.len(),
            labels: Some(labels),
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, e: ElementId) -> bool {
        e.0 < self.size
    }

    pub fn label(&self, e: ElementId) -> Option<&str> {
        self.labels
            .as_ref()
            .and_then(|l| l.get(e.0))
            .map(String::as_str)
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.size).map(ElementId)
    }
}

/// A monotone submodular set function with optional incremental state.
///
/// Methods on this trait are *uncounted*: solvers never call them directly and go through
/// [`Oracle`] instead, which validates inputs and does the accounting. `State` caches whatever
/// the objective needs to answer marginal queries for the current selection quickly; it must
/// be safe to share across threads for read-only `gain` calls.
pub trait Objective: Send + Sync {
    type State: Clone + Send + Sync;

    fn ground(&self) -> &GroundSet;

    /// State for the empty selection.
    fn initial_state(&self) -> Self::State;

    /// `f(set)`. Callers guarantee `set` is in range and duplicate free.
    fn value(&self, set: &[ElementId]) -> Result<f64>;

    /// `f(A ∪ {e}) − f(A)` where `A` is the selection `state` was built from.
    fn gain(&self, state: &Self::State, e: ElementId) -> Result<f64>;

    /// Fold `e` into `state`.
    fn insert(&self, state: &mut Self::State, e: ElementId) -> Result<()>;
}

/// Number of objective queries issued through an [`Oracle`].
#[derive(Debug, Default)]
pub struct OracleCounter(AtomicU64);

impl OracleCounter {
    pub fn new() -> Self {
        OracleCounter(AtomicU64::new(0))
    }

    #[inline]
    pub fn increment(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// The current selection `A` plus the objective's cached state for it.
#[derive(Clone, Debug)]
pub struct SelectionContext<S> {
    selected: Vec<ElementId>,
    member: Vec<bool>,
    capacity: usize,
    state: S,
}

impl<S> SelectionContext<S> {
    pub fn selected(&self) -> &[ElementId] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.member.get(e.0).copied().unwrap_or(false)
    }

    /// Maximum number of elements this context accepts (the run's `k`).
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn into_selected(self) -> Vec<ElementId> {
        self.selected
    }
}

/// Counted, validating front end to an [`Objective`].
///
/// `eval` and `marginal` each count exactly one evaluation, `commit` counts none. Queries made
/// only to report results (utility traces, final values) go through the `report_*` methods and
/// are tallied separately so they never inflate the algorithmic cost.
pub struct Oracle<'o, O: Objective + ?Sized> {
    objective: &'o O,
    counter: OracleCounter,
    reporting: OracleCounter,
}

impl<'o, O: Objective + ?Sized> Oracle<'o, O> {
    pub fn new(objective: &'o O) -> Self {
        Oracle {
            objective,
            counter: OracleCounter::new(),
            reporting: OracleCounter::new(),
        }
    }

    pub fn objective(&self) -> &'o O {
        self.objective
    }

    pub fn ground(&self) -> &GroundSet {
        self.objective.ground()
    }

    /// Evaluations charged so far.
    pub fn evaluations(&self) -> u64 {
        self.counter.get()
    }

    pub fn reporting_evaluations(&self) -> u64 {
        self.reporting.get()
    }

    /// Fresh context for the empty selection, accepting at most `capacity` commits.
    pub fn context(&self, capacity: usize) -> SelectionContext<O::State> {
        SelectionContext {
            selected: Vec::with_capacity(capacity.min(self.ground().size())),
            member: vec![false; self.ground().size()],
            capacity,
            state: self.objective.initial_state(),
        }
    }

    pub fn eval(&self, set: &[ElementId]) -> Result<f64> {
        self.check_set(set)?;
        self.counter.increment();
        self.objective.value(set)
    }

    pub fn marginal(&self, e: ElementId, ctx: &SelectionContext<O::State>) -> Result<f64> {
        self.check_candidate(e, ctx)?;
        self.counter.increment();
        self.objective.gain(&ctx.state, e)
    }

    pub fn commit(&self, e: ElementId, ctx: &mut SelectionContext<O::State>) -> Result<()> {
        self.check_candidate(e, ctx)?;
        if ctx.selected.len() >= ctx.capacity {
            return Err(Error::invalid(format!(
                "cannot commit element {e}: selection already holds {} elements",
                ctx.capacity
            )));
        }
        self.objective.insert(&mut ctx.state, e)?;
        ctx.member[e.0] = true;
        ctx.selected.push(e);
        Ok(())
    }

    /// Uncounted `f(set)` for reporting.
    pub fn report_value(&self, set: &[ElementId]) -> Result<f64> {
        self.check_set(set)?;
        self.reporting.increment();
        self.objective.value(set)
    }

    /// Uncounted marginal for reporting.
    pub fn report_marginal(&self, e: ElementId, ctx: &SelectionContext<O::State>) -> Result<f64> {
        self.check_candidate(e, ctx)?;
        self.reporting.increment();
        self.objective.gain(&ctx.state, e)
    }

    fn check_set(&self, set: &[ElementId]) -> Result<()> {
        let n = self.ground().size();
        let mut seen = vec![false; n];
        for &e in set {
            if e.0 >= n {
                return Err(Error::invalid(format!(
                    "element {e} outside ground set of size {n}"
                )));
            }
            if std::mem::replace(&mut seen[e.0], true) {
                return Err(Error::invalid(format!("element {e} appears twice")));
            }
        }
        Ok(())
    }

    fn check_candidate(&self, e: ElementId, ctx: &SelectionContext<O::State>) -> Result<()> {
        let n = self.ground().size();
        if e.0 >= n {
            return Err(Error::invalid(format!(
                "element {e} outside ground set of size {n}"
            )));
        }
        if ctx.contains(e) {
            return Err(Error::invalid(format!("element {e} is already selected")));
        }
        Ok(())
    }
}
