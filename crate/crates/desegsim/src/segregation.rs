//! The physical layer: household happiness and relocation.
//!
//! Each household computes its individual index of desegregation (IID), the
//! fraction of its occupied Moore neighbors holding the other type. The
//! happiness rule turns IID, the PDTU threshold and the cell's influence tag
//! into a Happy/Unhappy state; unhappy households relocate to a region of
//! matching or neutral type.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lattice::{Coord, InfluenceTag, World};
use crate::mapgen::RegionType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentType {
    Expat,
    Native,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentState {
    Happy,
    Unhappy,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub id: usize,
    pub agent_type: AgentType,
    pub position: Coord,
    pub state: AgentState,
}

/// How influence combines with the unlike-neighbor ratio.
///
/// `Base` is the plain threshold rule with influence ignored. `LiteralEq2`
/// takes the integrated condition exactly as published: happy iff
/// IID >= PDTU under Cooperation or Null influence. `Reconciled` keeps the
/// classic rule outside cooperative discs and flips to diversity-seeking
/// inside them; it is the default for integrated runs because it preserves
/// the segregated baseline between influence pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HappinessRule {
    Base,
    LiteralEq2,
    Reconciled,
}

/// Fraction of occupied Moore neighbors not of the agent's type; 0 when no
/// neighbor cell is occupied.
pub fn iid(world: &World, agents: &[Agent], a: &Agent) -> f64 {
    let mut occupied = 0u32;
    let mut unlike = 0u32;
    for n in world.moore_neighbors(a.position).expect("agent in bounds") {
        if let Some(id) = world.occupant(n) {
            occupied += 1;
            if agents[id].agent_type != a.agent_type {
                unlike += 1;
            }
        }
    }
    if occupied == 0 {
        0.0
    } else {
        unlike as f64 / occupied as f64
    }
}

pub fn evaluate_happiness(
    world: &World,
    agents: &[Agent],
    a: &Agent,
    rule: HappinessRule,
    pdtu: f64,
) -> AgentState {
    let iid = iid(world, agents, a);
    let tag = world.cell(a.position).infected_with;
    let happy = match rule {
        HappinessRule::Base => iid <= pdtu,
        HappinessRule::LiteralEq2 => {
            iid >= pdtu && matches!(tag, InfluenceTag::Cooperation | InfluenceTag::Null)
        }
        HappinessRule::Reconciled => match tag {
            InfluenceTag::Cooperation => iid >= pdtu,
            InfluenceTag::NonCooperation | InfluenceTag::Null => iid <= pdtu,
        },
    };
    if happy {
        AgentState::Happy
    } else {
        AgentState::Unhappy
    }
}

/// A free cell in a uniformly drawn region of the agent's type or Neutral,
/// or `None` when no such region has space (the agent stays put).
pub fn select_destination(world: &World, a: &Agent, rng: &mut impl Rng) -> Option<Coord> {
    let own = match a.agent_type {
        AgentType::Expat => RegionType::Expat,
        AgentType::Native => RegionType::Native,
    };
    let candidates: Vec<usize> = world
        .regions
        .iter()
        .filter(|r| {
            (r.region_type == own || r.region_type == RegionType::Neutral)
                && world.free_in_region(r.id) > 0
        })
        .map(|r| r.id)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let region = candidates[rng.gen_range(0..candidates.len())];
    let free: Vec<usize> = world
        .region_cells(region)
        .iter()
        .copied()
        .filter(|&i| world.occupant(world.coord(i)).is_none())
        .collect();
    debug_assert!(!free.is_empty());
    Some(world.coord(free[rng.gen_range(0..free.len())]))
}

/// One relocation pass: happiness of every agent is evaluated against the
/// occupancy and influence as they stand on entry, then unhappy agents move
/// in a seeded random permutation, each at most once, occupancy updated as
/// they go. Returns the number of successful moves.
pub fn movement_phase(
    world: &mut World,
    agents: &mut [Agent],
    rule: HappinessRule,
    pdtu: f64,
    rng: &mut impl Rng,
) -> usize {
    let states: Vec<AgentState> = agents
        .iter()
        .map(|a| evaluate_happiness(world, agents, a, rule, pdtu))
        .collect();
    let mut unhappy: Vec<usize> = Vec::new();
    for (a, s) in agents.iter_mut().zip(states) {
        a.state = s;
        if s == AgentState::Unhappy {
            unhappy.push(a.id);
        }
    }
    unhappy.shuffle(rng);

    let mut moves = 0;
    for id in unhappy {
        if let Some(dest) = select_destination(world, &agents[id], rng) {
            world.remove_agent(agents[id].position);
            world.place_agent(dest, id);
            agents[id].position = dest;
            moves += 1;
        }
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapgen::{classify_regions, parse_region_raster, RegionRaster};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world_with(width: usize, height: usize, placements: &[(usize, usize, AgentType)]) -> (World, Vec<Agent>) {
        let raster = RegionRaster {
            width,
            height,
            num_regions: 1,
            grid: vec![0; width * height],
        };
        let mut world = World::from_raster(&raster);
        let mut agents = Vec::new();
        for &(x, y, t) in placements {
            let id = agents.len();
            let pos = Coord::new(x, y);
            world.place_agent(pos, id);
            agents.push(Agent { id, agent_type: t, position: pos, state: AgentState::Happy });
        }
        (world, agents)
    }

    use AgentType::{Expat, Native};

    /// Center expat at (1,1) with 5 occupied neighbors, `like` of them expat.
    fn iid_fixture(like: usize) -> (World, Vec<Agent>) {
        let spots = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)];
        let mut placements = vec![(1, 1, Expat)];
        for (i, &(x, y)) in spots.iter().enumerate() {
            placements.push((x, y, if i < like { Expat } else { Native }));
        }
        world_with(3, 3, &placements)
    }

    #[test]
    fn iid_three_of_five_like_is_point_four() {
        let (world, agents) = iid_fixture(3);
        assert!((iid(&world, &agents, &agents[0]) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn iid_two_of_five_like_is_point_six() {
        let (world, agents) = iid_fixture(2);
        assert!((iid(&world, &agents, &agents[0]) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn iid_homogeneous_neighborhood_is_zero() {
        let mut placements = vec![(1, 1, Expat)];
        for y in 0..3 {
            for x in 0..3 {
                if (x, y) != (1, 1) {
                    placements.push((x, y, Expat));
                }
            }
        }
        let (world, agents) = world_with(3, 3, &placements);
        assert_eq!(iid(&world, &agents, &agents[0]), 0.0);
    }

    #[test]
    fn iid_isolated_agent_is_zero() {
        let (world, agents) = world_with(5, 5, &[(2, 2, Expat)]);
        assert_eq!(iid(&world, &agents, &agents[0]), 0.0);
    }

    #[test]
    fn literal_rule_happy_at_high_iid_under_cooperation() {
        let (mut world, agents) = iid_fixture(2); // iid 0.6
        world.stamp_influence(Coord::new(1, 1), 0.0, InfluenceTag::Cooperation, 9).unwrap();
        let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::LiteralEq2, 0.5);
        assert_eq!(s, AgentState::Happy);
    }

    #[test]
    fn base_rule_unhappy_above_pdtu() {
        let (world, agents) = iid_fixture(2); // iid 0.6
        let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::Base, 0.5);
        assert_eq!(s, AgentState::Unhappy);
    }

    #[test]
    fn reconciled_rule_classic_under_noncooperation() {
        let (mut world, agents) = iid_fixture(4); // iid 0.2 < pdtu 0.4
        world.stamp_influence(Coord::new(1, 1), 0.0, InfluenceTag::NonCooperation, 9).unwrap();
        let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::Reconciled, 0.4);
        assert_eq!(s, AgentState::Happy);
    }

    #[test]
    fn literal_rule_noncooperation_always_unhappy() {
        for like in 0..=5 {
            let (mut world, agents) = iid_fixture(like);
            world.stamp_influence(Coord::new(1, 1), 0.0, InfluenceTag::NonCooperation, 9).unwrap();
            let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::LiteralEq2, 0.0);
            assert_eq!(s, AgentState::Unhappy, "like={like}");
        }
    }

    #[test]
    fn base_rule_pdtu_one_never_unhappy() {
        for like in 0..=5 {
            let (world, agents) = iid_fixture(like);
            let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::Base, 1.0);
            assert_eq!(s, AgentState::Happy);
        }
    }

    #[test]
    fn base_rule_pdtu_zero_unhappy_iff_any_unlike_neighbor() {
        for like in 0..=5 {
            let (world, agents) = iid_fixture(like);
            let s = evaluate_happiness(&world, &agents, &agents[0], HappinessRule::Base, 0.0);
            let expected = if like == 5 { AgentState::Happy } else { AgentState::Unhappy };
            assert_eq!(s, expected, "like={like}");
        }
    }

    #[test]
    fn destination_none_when_no_region_fits() {
        // two regions: agent's own is full, the other is Native-typed
        let raster = parse_region_raster("2 1 2\n0 1\n").unwrap();
        let mut world = World::from_raster(&raster);
        world.place_agent(Coord::new(0, 0), 0);
        let agent = Agent {
            id: 0,
            agent_type: Expat,
            position: Coord::new(0, 0),
            state: AgentState::Unhappy,
        };
        world.regions[0].region_type = RegionType::Expat;
        world.regions[1].region_type = RegionType::Native;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_destination(&world, &agent, &mut rng), None);
    }

    #[test]
    fn destination_unique_candidate_cell() {
        let raster = parse_region_raster("2 1 2\n0 1\n").unwrap();
        let mut world = World::from_raster(&raster);
        world.place_agent(Coord::new(0, 0), 0);
        world.regions[0].region_type = RegionType::Native;
        world.regions[1].region_type = RegionType::Neutral;
        let agent = Agent {
            id: 0,
            agent_type: Expat,
            position: Coord::new(0, 0),
            state: AgentState::Unhappy,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_destination(&world, &agent, &mut rng), Some(Coord::new(1, 0)));
    }

    #[test]
    fn destination_is_deterministic_per_seed() {
        let raster = generate_map();
        let mut world = World::from_raster(&raster);
        world.place_agent(Coord::new(0, 0), 0);
        let agent = Agent {
            id: 0,
            agent_type: Expat,
            position: Coord::new(0, 0),
            state: AgentState::Unhappy,
        };
        let a = select_destination(&world, &agent, &mut ChaCha8Rng::seed_from_u64(11));
        let b = select_destination(&world, &agent, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    fn generate_map() -> RegionRaster {
        crate::mapgen::generate_voronoi_map(8, 8, 3, 2).unwrap()
    }

    #[test]
    fn all_happy_means_no_moves() {
        let (mut world, mut agents) = world_with(6, 6, &[(0, 0, Expat), (5, 5, Native)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let moves = movement_phase(&mut world, &mut agents, HappinessRule::Base, 0.4, &mut rng);
        assert_eq!(moves, 0);
        assert_eq!(agents[0].position, Coord::new(0, 0));
    }

    #[test]
    fn single_unhappy_agent_moves_and_frees_cell() {
        // expat at (0,0) has only a native neighbor (iid 1 > 0.6); both
        // natives are happy. The only free cell is in region 1.
        let raster = parse_region_raster("4 1 2\n0 0 0 1\n").unwrap();
        let mut world = World::from_raster(&raster);
        let placements = [(0, Expat), (1, Native), (2, Native)];
        let mut agents: Vec<Agent> = placements
            .iter()
            .enumerate()
            .map(|(id, &(x, t))| {
                let pos = Coord::new(x, 0);
                world.place_agent(pos, id);
                Agent { id, agent_type: t, position: pos, state: AgentState::Happy }
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let moves = movement_phase(&mut world, &mut agents, HappinessRule::Base, 0.6, &mut rng);
        assert_eq!(moves, 1);
        assert_eq!(agents[0].position, Coord::new(3, 0));
        assert_eq!(world.occupant(Coord::new(0, 0)), None);
        assert_eq!(world.occupant(Coord::new(3, 0)), Some(0));
    }

    #[test]
    fn two_agents_one_free_cell_exactly_one_succeeds() {
        // Both permutation orders appear over seeds; in every case exactly one
        // agent takes the last free cell and the other stays.
        let raster = parse_region_raster("3 1 2\n0 0 1\n").unwrap();
        let mut seen_first = [false, false];
        for seed in 0..50u64 {
            let mut world = World::from_raster(&raster);
            world.place_agent(Coord::new(0, 0), 0);
            world.place_agent(Coord::new(1, 0), 1);
            let mut agents = vec![
                Agent { id: 0, agent_type: Expat, position: Coord::new(0, 0), state: AgentState::Happy },
                Agent { id: 1, agent_type: Native, position: Coord::new(1, 0), state: AgentState::Happy },
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let moves = movement_phase(&mut world, &mut agents, HappinessRule::Base, 0.0, &mut rng);
            let winners: Vec<usize> = agents
                .iter()
                .filter(|a| a.position == Coord::new(2, 0))
                .map(|a| a.id)
                .collect();
            assert_eq!(winners.len(), 1, "seed {seed}");
            // the loser keeps its original cell (its own region has a free
            // cell only after the winner left, but each agent moves at most
            // once and the loser was evaluated against the frozen snapshot)
            assert!(moves >= 1);
            seen_first[winners[0]] = true;
        }
        assert!(seen_first[0] && seen_first[1], "both orders should occur across seeds");
    }

    proptest! {
        #[test]
        fn type_relabeling_preserves_iid(seed in 0u64..40) {
            let raster = generate_map();
            let mut world = World::from_raster(&raster);
            let mut rng = crate::rng::substream(seed, "placement");
            let agents = crate::mapgen::seed_population(&mut world, 30, 0.5, &mut rng).unwrap();
            let flipped: Vec<Agent> = agents.iter().map(|a| Agent {
                agent_type: match a.agent_type {
                    Expat => Native,
                    Native => Expat,
                },
                ..a.clone()
            }).collect();
            for (a, f) in agents.iter().zip(&flipped) {
                prop_assert_eq!(iid(&world, &agents, a), iid(&world, &flipped, f));
            }
        }

        #[test]
        fn movement_conserves_agents(seed in 0u64..40, pdtu in 0.0f64..1.0) {
            let raster = generate_map();
            let mut world = World::from_raster(&raster);
            let mut rng = crate::rng::substream(seed, "placement");
            let mut agents = crate::mapgen::seed_population(&mut world, 30, 0.5, &mut rng).unwrap();
            classify_regions(&mut world, &agents, 0.4);
            let expats_before = agents.iter().filter(|a| a.agent_type == Expat).count();
            let mut mrng = crate::rng::substream(seed, "agents");
            movement_phase(&mut world, &mut agents, HappinessRule::Base, pdtu, &mut mrng);
            prop_assert_eq!(agents.len(), 30);
            prop_assert_eq!(agents.iter().filter(|a| a.agent_type == Expat).count(), expats_before);
            let positions: Vec<Coord> = agents.iter().map(|a| a.position).collect();
            prop_assert!(world.check_occupancy(&positions));
        }

        #[test]
        fn iid_stays_in_unit_interval(seed in 0u64..40) {
            let raster = generate_map();
            let mut world = World::from_raster(&raster);
            let mut rng = crate::rng::substream(seed, "placement");
            let agents = crate::mapgen::seed_population(&mut world, 40, 0.5, &mut rng).unwrap();
            for a in &agents {
                let v = iid(&world, &agents, a);
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
