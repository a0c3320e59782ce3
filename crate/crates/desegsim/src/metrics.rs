//! Global indices and per-tick recording.

use crate::error::{Error, Result};
use crate::lattice::World;
use crate::segregation::{evaluate_happiness, iid, Agent, AgentState, HappinessRule};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub tick: u64,
    pub desegregation_index: f64,
    pub happiness_index: f64,
    pub moves: usize,
    pub leaders_cooperative: usize,
    pub leaders_fierce: usize,
    pub nests: usize,
}

pub const CSV_HEADER: &str =
    "tick,desegregation_index,happiness_index,moves,leaders_cooperative,leaders_fierce,nests";

impl MetricsRow {
    /// Fixed CSV formatting: indices at 6 decimal places, LF endings.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.6},{:.6},{},{},{},{}",
            self.tick,
            self.desegregation_index,
            self.happiness_index,
            self.moves,
            self.leaders_cooperative,
            self.leaders_fierce,
            self.nests
        )
    }
}

/// Mean IID over all agents; 0 with no agents.
pub fn desegregation_index(world: &World, agents: &[Agent]) -> f64 {
    if agents.is_empty() {
        return 0.0;
    }
    agents.iter().map(|a| iid(world, agents, a)).sum::<f64>() / agents.len() as f64
}

/// Fraction of agents Happy under the given rule; 0 with no agents.
pub fn happiness_index(world: &World, agents: &[Agent], rule: HappinessRule, pdtu: f64) -> f64 {
    if agents.is_empty() {
        return 0.0;
    }
    let happy = agents
        .iter()
        .filter(|a| evaluate_happiness(world, agents, a, rule, pdtu) == AgentState::Happy)
        .count();
    happy as f64 / agents.len() as f64
}

/// Means of both indices over the ticks after `warmup`.
pub fn aggregate_run(series: &[MetricsRow], warmup: usize) -> Result<(f64, f64)> {
    if warmup >= series.len() {
        return Err(Error::Usage(format!(
            "warmup {warmup} leaves no rows out of {}",
            series.len()
        )));
    }
    let window = &series[warmup..];
    let n = window.len() as f64;
    let d = window.iter().map(|r| r.desegregation_index).sum::<f64>() / n;
    let h = window.iter().map(|r| r.happiness_index).sum::<f64>() / n;
    Ok((d, h))
}
