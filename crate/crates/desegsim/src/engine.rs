//! The tick scheduler binding both layers.
//!
//! Per tick `t` (1-based): a leader cycle fires when `nol > 0` and
//! `t % ir == 0`, stale influence expires, regions are reclassified,
//! households relocate, and a metrics row is recorded. A run stops at
//! `max_ticks` or when movement has been at a fixpoint for the configured
//! window with no leader cycle able to break it.

use std::fs;

use rand_chacha::ChaCha8Rng;

use crate::config::{MapSource, SimConfig};
use crate::error::{Error, Result};
use crate::foundress::{run_cycle, FoundressState, LeaderType};
use crate::lattice::World;
use crate::mapgen::{self, classify_regions, seed_population};
use crate::metrics::{desegregation_index, happiness_index, MetricsRow};
use crate::rng::substream;
use crate::segregation::{movement_phase, Agent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxTicks,
    Equilibrium,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<MetricsRow>,
    pub stop_reason: StopReason,
    pub final_summary: FinalSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalSummary {
    pub ticks_run: u64,
    pub agents: usize,
    pub expats: usize,
    pub natives: usize,
    pub desegregation_index: f64,
    pub happiness_index: f64,
}

pub struct SimState {
    pub cfg: SimConfig,
    pub world: World,
    pub agents: Vec<Agent>,
    pub foundress: FoundressState,
    tick: u64,
    zero_move_streak: u64,
    stopped: Option<StopReason>,
    agent_rng: ChaCha8Rng,
    leader_rng: ChaCha8Rng,
    tie_rng: ChaCha8Rng,
}

impl SimState {
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn stopped(&self) -> Option<StopReason> {
        self.stopped
    }
}

/// Build the world, seed the population and classify regions. No leader
/// generation has run yet and all influence is Null.
pub fn initialize(cfg: &SimConfig) -> Result<SimState> {
    cfg.validate()?;
    let raster = match &cfg.map {
        MapSource::Raster(path) => {
            let text = fs::read_to_string(path)?;
            mapgen::parse_region_raster(&text)?
        }
        MapSource::Voronoi { width, height, regions } => {
            mapgen::generate_voronoi_map(*width, *height, *regions, cfg.seed)?
        }
    };
    let mut world = World::from_raster(&raster);
    if cfg.population > world.num_cells() {
        return Err(Error::Usage(format!(
            "population {} exceeds map capacity {}",
            cfg.population,
            world.num_cells()
        )));
    }
    let mut placement_rng = substream(cfg.seed, "placement");
    let agents = seed_population(&mut world, cfg.population, cfg.expat_bias, &mut placement_rng)?;
    classify_regions(&mut world, &agents, cfg.segregation_threshold);

    Ok(SimState {
        cfg: cfg.clone(),
        world,
        agents,
        foundress: FoundressState::default(),
        tick: 0,
        zero_move_streak: 0,
        stopped: None,
        agent_rng: substream(cfg.seed, "agents"),
        leader_rng: substream(cfg.seed, "leaders"),
        tie_rng: substream(cfg.seed, "ties"),
    })
}

/// Advance one tick and record its metrics row.
pub fn step(state: &mut SimState) -> Result<MetricsRow> {
    if state.stopped.is_some() {
        return Err(Error::Usage("cannot step a stopped run".into()));
    }
    state.tick += 1;
    let t = state.tick;
    let cfg = &state.cfg;

    if cfg.nol > 0 && t.is_multiple_of(cfg.ir) {
        run_cycle(
            &mut state.foundress,
            &cfg.foundress(),
            &mut state.world,
            t,
            cfg.influence_duration,
            &mut state.leader_rng,
            &mut state.tie_rng,
        )?;
    }
    state.world.expire_influence(t);
    classify_regions(&mut state.world, &state.agents, cfg.segregation_threshold);
    let moves = movement_phase(
        &mut state.world,
        &mut state.agents,
        cfg.rule,
        cfg.pdtu,
        &mut state.agent_rng,
    );

    let cooperative = state
        .foundress
        .survivor_types
        .iter()
        .filter(|&&l| l == LeaderType::Cooperative)
        .count();
    let row = MetricsRow {
        tick: t,
        desegregation_index: desegregation_index(&state.world, &state.agents),
        happiness_index: happiness_index(&state.world, &state.agents, cfg.rule, cfg.pdtu),
        moves,
        leaders_cooperative: cooperative,
        leaders_fierce: state.foundress.survivor_types.len() - cooperative,
        nests: state.foundress.nests.len(),
    };

    if moves == 0 {
        state.zero_move_streak += 1;
    } else {
        state.zero_move_streak = 0;
    }
    let window = state.cfg.equilibrium_window;
    if state.zero_move_streak >= window && window > 0 {
        // equilibrium cannot be declared while a scheduled leader cycle could
        // still break it inside the next window
        let next_cycle = (t / state.cfg.ir + 1) * state.cfg.ir;
        if state.cfg.nol == 0 || next_cycle > t + window {
            state.stopped = Some(StopReason::Equilibrium);
        }
    }
    if state.stopped.is_none() && t >= state.cfg.max_ticks {
        state.stopped = Some(StopReason::MaxTicks);
    }
    Ok(row)
}

/// Run to completion; the result is a pure function of the configuration.
pub fn run(cfg: &SimConfig) -> Result<RunResult> {
    let mut state = initialize(cfg)?;
    let mut rows = Vec::new();
    while state.stopped.is_none() {
        rows.push(step(&mut state)?);
    }
    let expats = state
        .agents
        .iter()
        .filter(|a| a.agent_type == crate::segregation::AgentType::Expat)
        .count();
    let final_summary = FinalSummary {
        ticks_run: state.tick,
        agents: state.agents.len(),
        expats,
        natives: state.agents.len() - expats,
        desegregation_index: rows.last().map(|r| r.desegregation_index).unwrap_or(0.0),
        happiness_index: rows.last().map(|r| r.happiness_index).unwrap_or(0.0),
    };
    Ok(RunResult {
        rows,
        stop_reason: state.stopped.unwrap(),
        final_summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segregation::HappinessRule;

    fn small_cfg() -> SimConfig {
        SimConfig {
            map: MapSource::Voronoi { width: 30, height: 30, regions: 6 },
            population: 400,
            rule: HappinessRule::Base,
            max_ticks: 50,
            seed: 11,
            ..SimConfig::default()
        }
    }

    #[test]
    fn initialize_zero_population() {
        let cfg = SimConfig { population: 0, ..small_cfg() };
        let state = initialize(&cfg).unwrap();
        assert!(state.agents.is_empty());
        assert_eq!(desegregation_index(&state.world, &state.agents), 0.0);
    }

    #[test]
    fn initialize_is_deterministic() {
        let cfg = small_cfg();
        let a = initialize(&cfg).unwrap();
        let b = initialize(&cfg).unwrap();
        let pa: Vec<_> = a.agents.iter().map(|x| (x.position, x.agent_type)).collect();
        let pb: Vec<_> = b.agents.iter().map(|x| (x.position, x.agent_type)).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn initialize_rejects_overflow() {
        let cfg = SimConfig { population: 10_000, ..small_cfg() };
        assert!(initialize(&cfg).is_err());
    }

    #[test]
    fn leader_cycles_fire_on_ir_multiples() {
        let cfg = SimConfig {
            nol: 10,
            ir: 5,
            rule: HappinessRule::Reconciled,
            radius_competition: 3.0,
            max_ticks: 12,
            equilibrium_window: 0,
            ..small_cfg()
        };
        let mut state = initialize(&cfg).unwrap();
        for t in 1..=12u64 {
            let row = step(&mut state).unwrap();
            let leaders = row.leaders_cooperative + row.leaders_fierce;
            if t < 5 {
                assert_eq!(leaders, 0, "no cycle before tick ir");
            }
            if t == 5 {
                assert!(leaders > 0, "first cycle at tick ir");
            }
        }
    }

    #[test]
    fn influence_is_a_pulse() {
        let cfg = SimConfig {
            nol: 5,
            ir: 5,
            influence_duration: 1,
            rule: HappinessRule::Reconciled,
            radius_competition: 4.0,
            max_ticks: 6,
            equilibrium_window: 0,
            ..small_cfg()
        };
        let mut state = initialize(&cfg).unwrap();
        for _ in 1..=5 {
            step(&mut state).unwrap();
        }
        // stamped at tick 5 with expiry 6; cleared during tick 6
        let stamped = (0..state.world.num_cells())
            .filter(|&i| state.world.cell(state.world.coord(i)).influence_expires_at.is_some())
            .count();
        assert!(stamped > 0);
        step(&mut state).unwrap();
        let remaining = (0..state.world.num_cells())
            .filter(|&i| state.world.cell(state.world.coord(i)).influence_expires_at.is_some())
            .count();
        assert_eq!(remaining, 0);
    }

    #[test]
    fn run_respects_max_ticks_and_row_numbering() {
        let cfg = SimConfig { max_ticks: 10, equilibrium_window: 0, ..small_cfg() };
        let result = run(&cfg).unwrap();
        assert!(result.rows.len() <= 10);
        for (i, row) in result.rows.iter().enumerate() {
            assert_eq!(row.tick, i as u64 + 1);
        }
        if result.rows.len() == 10 {
            assert_eq!(result.stop_reason, StopReason::MaxTicks);
        }
    }

    #[test]
    fn base_model_reaches_equilibrium() {
        let cfg = SimConfig { max_ticks: 200, ..small_cfg() };
        let result = run(&cfg).unwrap();
        assert_eq!(result.stop_reason, StopReason::Equilibrium);
        assert_eq!(result.rows.last().unwrap().moves, 0);
    }

    #[test]
    fn identical_config_identical_result() {
        let cfg = SimConfig {
            nol: 8,
            ir: 5,
            rule: HappinessRule::Reconciled,
            radius_competition: 5.0,
            ..small_cfg()
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.final_summary, b.final_summary);
    }

    #[test]
    fn stepping_a_stopped_run_is_an_error() {
        let cfg = SimConfig { max_ticks: 1, equilibrium_window: 0, ..small_cfg() };
        let mut state = initialize(&cfg).unwrap();
        step(&mut state).unwrap();
        assert!(step(&mut state).is_err());
    }

    #[test]
    fn conservation_across_run() {
        let cfg = SimConfig { nol: 10, rule: HappinessRule::Reconciled, radius_competition: 5.0, max_ticks: 30, ..small_cfg() };
        let mut state = initialize(&cfg).unwrap();
        let expats = state.agents.iter().filter(|a| a.agent_type == crate::segregation::AgentType::Expat).count();
        while state.stopped.is_none() {
            step(&mut state).unwrap();
            assert_eq!(state.agents.len(), 400);
            assert_eq!(
                state.agents.iter().filter(|a| a.agent_type == crate::segregation::AgentType::Expat).count(),
                expats
            );
            let positions: Vec<_> = state.agents.iter().map(|a| a.position).collect();
            assert!(state.world.check_occupancy(&positions));
        }
    }
}
