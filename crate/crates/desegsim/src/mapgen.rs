//! Region maps: the raster text format, a seeded Voronoi generator standing
//! in for real city GIS data, area-proportional population seeding, and
//! region-type classification.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Coord, World};
use crate::segregation::{Agent, AgentState, AgentType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionType {
    Expat,
    Native,
    Neutral,
}

#[derive(Debug, Clone)]
pub struct Region {
    pub id: usize,
    pub area: usize,
    pub region_type: RegionType,
    pub quota: usize,
}

/// Row-major grid of region ids, the on-disk map representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionRaster {
    pub width: usize,
    pub height: usize,
    pub num_regions: usize,
    pub grid: Vec<usize>,
}

/// Parse the raster text format: `width height num_regions` on line 1, then
/// `height` rows of `width` space-separated region ids.
pub fn parse_region_raster(text: &str) -> Result<RegionRaster> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty input".into() })?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 3 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected 'width height num_regions', got {header:?}"),
        });
    }
    let parse_dim = |s: &str, name: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: 1,
            message: format!("invalid {name}: {s:?}"),
        })
    };
    let width = parse_dim(fields[0], "width")?;
    let height = parse_dim(fields[1], "height")?;
    let num_regions = parse_dim(fields[2], "num_regions")?;
    if width == 0 || height == 0 || num_regions == 0 {
        return Err(Error::Validation("dimensions and region count must be positive".into()));
    }

    let mut grid = Vec::with_capacity(width * height);
    for row in 0..height {
        let (lineno, line) = lines.next().ok_or_else(|| Error::Parse {
            line: row + 2,
            message: "unexpected end of input".into(),
        })?;
        let ids: Vec<&str> = line.split(' ').collect();
        if ids.len() != width {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected {width} region ids, got {}", ids.len()),
            });
        }
        for id in ids {
            let rid = id.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid region id: {id:?}"),
            })?;
            if rid >= num_regions {
                return Err(Error::Validation(format!(
                    "region id {rid} out of range (num_regions = {num_regions})"
                )));
            }
            grid.push(rid);
        }
    }
    if let Some((lineno, line)) = lines.next() {
        if !line.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "trailing content after grid".into(),
            });
        }
    }

    let mut seen = vec![false; num_regions];
    for &rid in &grid {
        seen[rid] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Validation(format!("region id {missing} never appears")));
    }

    Ok(RegionRaster { width, height, num_regions, grid })
}

/// Canonical emitter: single spaces, LF endings, no trailing whitespace.
pub fn emit_region_raster(raster: &RegionRaster) -> String {
    let mut out = format!("{} {} {}\n", raster.width, raster.height, raster.num_regions);
    for row in raster.grid.chunks(raster.width) {
        let line: Vec<String> = row.iter().map(|r| r.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Synthetic city map: `k` seed cells drawn uniformly without replacement,
/// every cell assigned to its nearest seed (ties to the lowest seed index).
///
/// ```
/// use desegsim::mapgen::{emit_region_raster, generate_voronoi_map, parse_region_raster};
///
/// let raster = generate_voronoi_map(30, 20, 7, 42).unwrap();
/// assert_eq!(raster.num_regions, 7);
/// // text round trip is exact
/// let text = emit_region_raster(&raster);
/// assert_eq!(parse_region_raster(&text).unwrap(), raster);
/// // same seed, same map
/// assert_eq!(generate_voronoi_map(30, 20, 7, 42).unwrap(), raster);
/// ```
pub fn generate_voronoi_map(width: usize, height: usize, k: usize, seed: u64) -> Result<RegionRaster> {
    if width == 0 || height == 0 {
        return Err(Error::Usage("map dimensions must be positive".into()));
    }
    if k == 0 || k > width * height {
        return Err(Error::Usage(format!(
            "region count must be in 1..={}, got {k}",
            width * height
        )));
    }
    let mut rng = crate::rng::substream(seed, "voronoi");
    let mut sites: Vec<usize> = sample(&mut rng, width * height, k).into_vec();
    sites.sort_unstable();
    let site_coords: Vec<Coord> = sites
        .iter()
        .map(|&i| Coord::new(i % width, i / width))
        .collect();

    let grid = (0..width * height)
        .map(|i| {
            let c = Coord::new(i % width, i / width);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (s, &sc) in site_coords.iter().enumerate() {
                let d = c.dist2(sc);
                if d < best_d {
                    best_d = d;
                    best = s;
                }
            }
            best
        })
        .collect();
    Ok(RegionRaster { width, height, num_regions: k, grid })
}

/// Largest-remainder apportionment of `total` by region area. Quotas sum to
/// `total` exactly and each stays within one unit of the exact share.
pub fn apportion_quotas(areas: &[usize], total: usize) -> Vec<usize> {
    let area_total: usize = areas.iter().sum();
    if area_total == 0 || total == 0 {
        return vec![0; areas.len()];
    }
    let mut quotas: Vec<usize> = Vec::with_capacity(areas.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(areas.len());
    let mut assigned = 0usize;
    for (i, &a) in areas.iter().enumerate() {
        let exact = total as f64 * a as f64 / area_total as f64;
        let floor = exact.floor() as usize;
        quotas.push(floor);
        assigned += floor;
        remainders.push((i, exact - floor as f64));
    }
    // larger remainder first, region id breaks ties
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for &(i, _) in remainders.iter().take(total - assigned) {
        quotas[i] += 1;
    }
    quotas
}

/// Seed `total` households over the map: quotas by largest remainder, cells
/// drawn uniformly within each region, types independently drawn Expat with
/// probability `expat_bias`.
pub fn seed_population(
    world: &mut World,
    total: usize,
    expat_bias: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Agent>> {
    let areas: Vec<usize> = world.regions.iter().map(|r| r.area).collect();
    let quotas = apportion_quotas(&areas, total);
    for (rid, &q) in quotas.iter().enumerate() {
        world.regions[rid].quota = q;
        let free = world.free_in_region(rid);
        if q > free {
            return Err(Error::Capacity { region: rid, free, needed: q });
        }
    }

    let mut agents = Vec::with_capacity(total);
    for (rid, &q) in quotas.iter().enumerate() {
        if q == 0 {
            continue;
        }
        let free_cells: Vec<usize> = world
            .region_cells(rid)
            .iter()
            .copied()
            .filter(|&i| world.occupant(world.coord(i)).is_none())
            .collect();
        let picks = sample(rng, free_cells.len(), q);
        for p in picks.iter() {
            let pos = world.coord(free_cells[p]);
            let id = agents.len();
            let agent_type = if rng.gen_bool(expat_bias) {
                AgentType::Expat
            } else {
                AgentType::Native
            };
            world.place_agent(pos, id);
            agents.push(Agent {
                id,
                agent_type,
                position: pos,
                state: AgentState::Happy,
            });
        }
    }
    Ok(agents)
}

/// Recompute every region's type from its current occupants: a region is
/// typed when the majority margin |n_native - n_expat| / n_total reaches the
/// threshold, otherwise (and when empty) it is Neutral.
pub fn classify_regions(world: &mut World, agents: &[Agent], threshold: f64) {
    let mut expats = vec![0usize; world.regions.len()];
    let mut natives = vec![0usize; world.regions.len()];
    for a in agents {
        let rid = world.cell(a.position).region_id;
        match a.agent_type {
            AgentType::Expat => expats[rid] += 1,
            AgentType::Native => natives[rid] += 1,
        }
    }
    for region in &mut world.regions {
        let (ne, nn) = (expats[region.id] as f64, natives[region.id] as f64);
        let n = ne + nn;
        region.region_type = if n == 0.0 {
            RegionType::Neutral
        } else if (nn - ne) / n >= threshold {
            RegionType::Native
        } else if (ne - nn) / n >= threshold {
            RegionType::Expat
        } else {
            RegionType::Neutral
        };
    }
}
