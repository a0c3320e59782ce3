//! The virtual layer: group leaders founding nests, the queen-style survival
//! dynamics resolving their conflicts, and the influence discs they emit.
//!
//! One cycle runs five steps in order: reproduce, cluster, individual fights
//! within each nest, group competition between nearby nests, and influence
//! emission. Survivor types carry over into the next cycle's reproduction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::lattice::{Coord, InfluenceTag, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaderType {
    Cooperative,
    Fierce,
}

#[derive(Debug, Clone)]
pub struct Leader {
    pub id: usize,
    pub leader_type: LeaderType,
    pub position: Coord,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nest {
    pub site: Coord,
    pub members: Vec<usize>,
    pub alive: bool,
}

#[derive(Debug, Clone)]
pub struct FoundressConfig {
    /// Leaders per generation (NOL).
    pub nol: usize,
    /// Cooperative fraction at (re)initialization (FC).
    pub fc: f64,
    /// Per-offspring type-flip probability.
    pub pmutation: f64,
    pub cluster_radius: f64,
    pub radius_competition: f64,
    /// Fight-initiation probability of a fierce leader (PIF).
    pub pif: f64,
}

impl Default for FoundressConfig {
    fn default() -> Self {
        FoundressConfig {
            nol: 0,
            fc: 0.1,
            pmutation: 0.01,
            cluster_radius: 10.0,
            radius_competition: 50.0,
            pif: 0.1,
        }
    }
}

/// Persistent state between cycles: the survivors the next generation is
/// sampled from, plus the living leaders and nests for reporting.
#[derive(Debug, Clone, Default)]
pub struct FoundressState {
    pub survivor_types: Vec<LeaderType>,
    pub leaders: Vec<Leader>,
    pub nests: Vec<Nest>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycleSummary {
    pub reproduced: usize,
    pub cooperative: usize,
    pub fierce: usize,
    pub nests_formed: usize,
    pub nests_destroyed: usize,
}

/// Quadratic nest-survival score of Bartz and Hoelldobler. Peaks near a
/// population of 5.7, so mid-sized nests beat both loners and mobs.
///
/// ```
/// use desegsim::foundress::surv;
///
/// assert!(surv(4) > surv(8));
/// assert!(surv(3) > surv(2));
/// ```
pub fn surv(nest_pop: usize) -> f64 {
    let n = nest_pop as f64;
    -2.88 + 4.28 * n - 0.377 * n * n
}

/// Exactly `cfg.nol` offspring. Types are sampled with replacement from the
/// survivor multiset and flipped with probability `pmutation`; with no
/// survivors the initial FC split is used instead. Positions are uniform over
/// the whole map, independent of previous generations.
pub fn reproduce(
    survivor_types: &[LeaderType],
    cfg: &FoundressConfig,
    world: &World,
    rng: &mut impl Rng,
) -> Vec<Leader> {
    let mut leaders = Vec::with_capacity(cfg.nol);
    let initial_cooperative = (cfg.fc * cfg.nol as f64).floor() as usize;
    for id in 0..cfg.nol {
        let base = if survivor_types.is_empty() {
            if id < initial_cooperative {
                LeaderType::Cooperative
            } else {
                LeaderType::Fierce
            }
        } else {
            survivor_types[rng.gen_range(0..survivor_types.len())]
        };
        let leader_type = if cfg.pmutation > 0.0 && rng.gen_bool(cfg.pmutation) {
            match base {
                LeaderType::Cooperative => LeaderType::Fierce,
                LeaderType::Fierce => LeaderType::Cooperative,
            }
        } else {
            base
        };
        let position = Coord::new(rng.gen_range(0..world.width()), rng.gen_range(0..world.height()));
        leaders.push(Leader { id, leader_type, position, alive: true });
    }
    leaders
}

/// Sequential clustering: leaders act in a seeded random permutation; each
/// moves to the cell within `cluster_radius` holding the most other leaders.
/// A leader already sharing a maximal cell stays; remaining ties are broken
/// uniformly. Leaders with no other leader in range stay in isolation. Every
/// occupied cell then becomes one nest.
pub fn cluster(
    leaders: &mut [Leader],
    world: &World,
    cluster_radius: f64,
    order_rng: &mut impl Rng,
    tie_rng: &mut impl Rng,
) -> Result<Vec<Nest>> {
    let mut counts = vec![0u32; world.num_cells()];
    for l in leaders.iter().filter(|l| l.alive) {
        counts[world.index(l.position)] += 1;
    }

    let mut order: Vec<usize> = leaders.iter().filter(|l| l.alive).map(|l| l.id).collect();
    order.shuffle(order_rng);

    for id in order {
        let here = leaders[id].position;
        let here_idx = world.index(here);
        let mut best = 0u32;
        let mut targets: Vec<usize> = Vec::new();
        for c in world.cells_within(here, cluster_radius)? {
            let i = world.index(c);
            let n = if i == here_idx { counts[i] - 1 } else { counts[i] };
            if n > best {
                best = n;
                targets.clear();
                targets.push(i);
            } else if n == best && n > 0 {
                targets.push(i);
            }
        }
        if best == 0 {
            continue; // isolation
        }
        let dest = if targets.contains(&here_idx) {
            here_idx
        } else {
            targets[tie_rng.gen_range(0..targets.len())]
        };
        if dest != here_idx {
            counts[here_idx] -= 1;
            counts[dest] += 1;
            leaders[id].position = world.coord(dest);
        }
    }

    let mut nests = Vec::new();
    for (i, &n) in counts.iter().enumerate() {
        if n > 0 {
            let site = world.coord(i);
            let members = leaders
                .iter()
                .filter(|l| l.alive && l.position == site)
                .map(|l| l.id)
                .collect();
            nests.push(Nest { site, members, alive: true });
        }
    }
    Ok(nests)
}

/// One round of turns inside a nest. Fierce members still alive fight when
/// `pif` beats a fresh uniform draw and at least two members remain; the
/// opponent is uniform among the other living members. Fierce vs fierce kills
/// exactly one of the two with even odds; a fierce initiator facing a
/// cooperative dies with probability 0.6, otherwise the cooperative dies.
pub fn nest_fights(nest: &mut Nest, leaders: &mut [Leader], pif: f64, rng: &mut impl Rng) {
    let mut turn_order = nest.members.clone();
    turn_order.shuffle(rng);

    for &actor in &turn_order {
        let living: Vec<usize> = nest.members.iter().copied().filter(|&m| leaders[m].alive).collect();
        if living.len() < 2 || living.iter().all(|&m| leaders[m].leader_type == LeaderType::Cooperative) {
            break;
        }
        if !leaders[actor].alive || leaders[actor].leader_type == LeaderType::Cooperative {
            continue;
        }
        if pif <= rng.gen_range(0.0..1.0) {
            continue;
        }
        let others: Vec<usize> = living.into_iter().filter(|&m| m != actor).collect();
        let opponent = others[rng.gen_range(0..others.len())];
        let victim = match leaders[opponent].leader_type {
            LeaderType::Fierce => {
                if rng.gen_bool(0.5) {
                    actor
                } else {
                    opponent
                }
            }
            LeaderType::Cooperative => {
                if rng.gen_bool(0.6) {
                    actor
                } else {
                    opponent
                }
            }
        };
        leaders[victim].alive = false;
    }
    nest.members.retain(|&m| leaders[m].alive);
}

/// One greedy pass over nest pairs in row-major site order: of two living
/// nests within `radius_competition` of each other, the one with the smaller
/// survival score is destroyed with all members (ties: fair coin).
pub fn group_competition(
    nests: &mut [Nest],
    leaders: &mut [Leader],
    radius_competition: f64,
    tie_rng: &mut impl Rng,
) -> usize {
    let mut order: Vec<usize> = (0..nests.len()).collect();
    order.sort_by_key(|&i| (nests[i].site.y, nests[i].site.x));

    let r2 = radius_competition * radius_competition;
    let mut destroyed = 0;
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if !nests[i].alive || !nests[j].alive {
                continue;
            }
            if nests[i].site.dist2(nests[j].site) > r2 {
                continue;
            }
            let si = surv(nests[i].members.len());
            let sj = surv(nests[j].members.len());
            // the tie coin is only drawn on an exact surv tie
            let loser = if si > sj { j } else if sj > si || tie_rng.gen_bool(0.5) { i } else { j };
            nests[loser].alive = false;
            for &m in &nests[loser].members {
                leaders[m].alive = false;
            }
            destroyed += 1;
        }
    }
    destroyed
}

/// Every living nest stamps a disc of radius `nest_pop * radius_competition`
/// around its site, tagged by the type of one uniformly drawn living member.
/// Nests stamp in row-major order, so overlaps are last-write-wins.
pub fn emit_influence(
    nests: &[Nest],
    leaders: &[Leader],
    world: &mut World,
    radius_competition: f64,
    now: u64,
    duration: u64,
    rng: &mut impl Rng,
) -> Result<()> {
    let mut order: Vec<usize> = (0..nests.len()).filter(|&i| nests[i].alive).collect();
    order.sort_by_key(|&i| (nests[i].site.y, nests[i].site.x));
    for i in order {
        let nest = &nests[i];
        let speaker = nest.members[rng.gen_range(0..nest.members.len())];
        let tag = match leaders[speaker].leader_type {
            LeaderType::Cooperative => InfluenceTag::Cooperation,
            LeaderType::Fierce => InfluenceTag::NonCooperation,
        };
        let radius = nest.members.len() as f64 * radius_competition;
        world.stamp_influence(nest.site, radius, tag, now + duration)?;
    }
    Ok(())
}

/// The full five-step generation cycle.
pub fn run_cycle(
    state: &mut FoundressState,
    cfg: &FoundressConfig,
    world: &mut World,
    now: u64,
    duration: u64,
    leader_rng: &mut impl Rng,
    tie_rng: &mut impl Rng,
) -> Result<CycleSummary> {
    let mut summary = CycleSummary::default();
    if cfg.nol == 0 {
        state.leaders.clear();
        state.nests.clear();
        return Ok(summary);
    }

    let mut leaders = reproduce(&state.survivor_types, cfg, world, leader_rng);
    summary.reproduced = leaders.len();

    let mut nests = cluster(&mut leaders, world, cfg.cluster_radius, leader_rng, tie_rng)?;
    summary.nests_formed = nests.len();

    // nests fight in row-major site order
    let mut fight_order: Vec<usize> = (0..nests.len()).collect();
    fight_order.sort_by_key(|&i| (nests[i].site.y, nests[i].site.x));
    for i in fight_order {
        nest_fights(&mut nests[i], &mut leaders, cfg.pif, leader_rng);
    }
    nests.retain(|n| !n.members.is_empty());

    summary.nests_destroyed = group_competition(&mut nests, &mut leaders, cfg.radius_competition, tie_rng);
    nests.retain(|n| n.alive);

    emit_influence(&nests, &leaders, world, cfg.radius_competition, now, duration, leader_rng)?;

    state.survivor_types = leaders
        .iter()
        .filter(|l| l.alive)
        .map(|l| l.leader_type)
        .collect();
    summary.cooperative = state
        .survivor_types
        .iter()
        .filter(|&&t| t == LeaderType::Cooperative)
        .count();
    summary.fierce = state.survivor_types.len() - summary.cooperative;
    state.leaders = leaders;
    state.nests = nests;
    Ok(summary)
}
