use crate::error::Result;
use crate::oracle::{ElementId, Objective, Oracle};

/// Output of a solver run.
///
/// `utility_trace[i]` is the utility of the first `i + 1` picks and `cost_trace[i]` the number of
/// evaluations charged once pick `i` was made. `reporting_evals` counts the uncounted queries
/// used to fill in the traces and `final_utility`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub selected: Vec<ElementId>,
    pub utility_trace: Vec<f64>,
    pub cost_trace: Vec<u64>,
    pub total_cost: u64,
    pub final_utility: f64,
    pub reporting_evals: u64,
    pub warning: Option<String>,
}

impl Solution {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.selected.iter().map(|e| e.0).collect()
    }
}

/// Accumulates picks for a greedy-style run.
///
/// The utility trace is `f(∅)` plus the running sum of the gains of the picks, which the solvers
/// already know exactly when they commit.
pub(crate) struct TraceBuilder {
    base: f64,
    utility: f64,
    selected: Vec<ElementId>,
    utility_trace: Vec<f64>,
    cost_trace: Vec<u64>,
    warning: Option<String>,
}

impl TraceBuilder {
    pub(crate) fn start<O: Objective + ?Sized>(oracle: &Oracle<'_, O>) -> Result<Self> {
        let base = oracle.report_value(&[])?;
        Ok(TraceBuilder {
            base,
            utility: base,
            selected: Vec::new(),
            utility_trace: Vec::new(),
            cost_trace: Vec::new(),
            warning: None,
        })
    }

    pub(crate) fn push(&mut self, e: ElementId, gain: f64, cost_so_far: u64) {
        self.utility += gain;
        self.selected.push(e);
        self.utility_trace.push(self.utility);
        self.cost_trace.push(cost_so_far);
    }

    pub(crate) fn warn(&mut self, msg: impl Into<String>) {
        self.warning = Some(msg.into());
    }

    /// Closes the run; `final_utility` is a reporting evaluation of the selected set.
    pub(crate) fn finish<O: Objective + ?Sized>(self, oracle: &Oracle<'_, O>) -> Result<Solution> {
        let final_utility = if self.selected.is_empty() {
            self.base
        } else {
            oracle.report_value(&self.selected)?
        };
        Ok(Solution {
            selected: self.selected,
            utility_trace: self.utility_trace,
            cost_trace: self.cost_trace,
            total_cost: oracle.evaluations(),
            final_utility,
            reporting_evals: oracle.reporting_evaluations(),
            warning: self.warning,
        })
    }
}
