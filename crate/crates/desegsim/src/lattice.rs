//! The cellular world: a bounded rectangular grid of cells, each belonging to
//! one region, holding at most one household and an influence tag.
//!
//! All radius queries use Euclidean distance between cell centers and return
//! cells in row-major order. There is no wrap-around.

use crate::error::{Error, Result};
use crate::mapgen::{Region, RegionRaster, RegionType};

pub type AgentId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub fn new(x: usize, y: usize) -> Self {
        Coord { x, y }
    }

    /// Squared Euclidean distance between cell centers.
    pub fn dist2(self, other: Coord) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        dx * dx + dy * dy
    }
}

/// Influence carried by a cell, refreshed by leader nests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceTag {
    Cooperation,
    NonCooperation,
    Null,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub region_id: usize,
    pub occupant: Option<AgentId>,
    pub infected_with: InfluenceTag,
    pub influence_expires_at: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct World {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    pub regions: Vec<Region>,
    region_cells: Vec<Vec<usize>>,
    region_free: Vec<usize>,
}

impl World {
    pub fn from_raster(raster: &RegionRaster) -> World {
        let mut region_cells = vec![Vec::new(); raster.num_regions];
        let cells: Vec<Cell> = raster
            .grid
            .iter()
            .enumerate()
            .map(|(i, &rid)| {
                region_cells[rid].push(i);
                Cell {
                    region_id: rid,
                    occupant: None,
                    infected_with: InfluenceTag::Null,
                    influence_expires_at: None,
                }
            })
            .collect();
        let regions = region_cells
            .iter()
            .enumerate()
            .map(|(id, cs)| Region {
                id,
                area: cs.len(),
                region_type: RegionType::Neutral,
                quota: 0,
            })
            .collect();
        let region_free = region_cells.iter().map(Vec::len).collect();
        World {
            width: raster.width,
            height: raster.height,
            cells,
            regions,
            region_cells,
            region_free,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn index(&self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        c.y * self.width + c.x
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index % self.width, index / self.width)
    }

    pub fn cell(&self, c: Coord) -> &Cell {
        &self.cells[self.index(c)]
    }

    pub fn occupant(&self, c: Coord) -> Option<AgentId> {
        self.cell(c).occupant
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Cells of one region, in row-major order.
    pub fn region_cells(&self, region: usize) -> &[usize] {
        &self.region_cells[region]
    }

    pub fn free_in_region(&self, region: usize) -> usize {
        self.region_free[region]
    }

    pub fn place_agent(&mut self, c: Coord, id: AgentId) {
        let i = self.index(c);
        assert!(self.cells[i].occupant.is_none(), "cell already occupied");
        self.cells[i].occupant = Some(id);
        self.region_free[self.cells[i].region_id] -= 1;
    }

    pub fn remove_agent(&mut self, c: Coord) -> Option<AgentId> {
        let i = self.index(c);
        let prev = self.cells[i].occupant.take();
        if prev.is_some() {
            self.region_free[self.cells[i].region_id] += 1;
        }
        prev
    }

    /// The in-bounds subset of the 8 adjacent cells, row-major order.
    ///
    /// ```
    /// use desegsim::lattice::{Coord, World};
    /// use desegsim::mapgen::RegionRaster;
    ///
    /// let world = World::from_raster(&RegionRaster {
    ///     width: 5, height: 4, num_regions: 1, grid: vec![0; 20],
    /// });
    /// assert_eq!(world.moore_neighbors(Coord::new(2, 1)).unwrap().len(), 8);
    /// assert_eq!(world.moore_neighbors(Coord::new(0, 0)).unwrap().len(), 3);
    /// // r = 1 reaches only the four orthogonal neighbors plus the center
    /// assert_eq!(world.cells_within(Coord::new(2, 1), 1.0).unwrap().len(), 5);
    /// ```
    pub fn moore_neighbors(&self, c: Coord) -> Result<Vec<Coord>> {
        if !self.contains(c) {
            return Err(Error::Usage(format!(
                "coordinate ({}, {}) out of bounds for {}x{} world",
                c.x, c.y, self.width, self.height
            )));
        }
        let mut out = Vec::with_capacity(8);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = c.x as i64 + dx;
                let ny = c.y as i64 + dy;
                if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                    out.push(Coord::new(nx as usize, ny as usize));
                }
            }
        }
        Ok(out)
    }

    /// All in-bounds cells whose center lies within Euclidean distance `r` of
    /// `c`'s center, including `c` itself. Row-major order.
    pub fn cells_within(&self, c: Coord, r: f64) -> Result<Vec<Coord>> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::Usage(format!("radius must be finite and >= 0, got {r}")));
        }
        let ri = r.floor() as i64;
        let y0 = (c.y as i64 - ri).max(0) as usize;
        let y1 = ((c.y as i64 + ri) as usize).min(self.height - 1);
        let x0 = (c.x as i64 - ri).max(0) as usize;
        let x1 = ((c.x as i64 + ri) as usize).min(self.width - 1);
        let r2 = r * r;
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = Coord::new(x, y);
                if c.dist2(p) <= r2 {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Tag every cell within `r` of `center`; later stamps overwrite earlier
    /// ones.
    pub fn stamp_influence(
        &mut self,
        center: Coord,
        r: f64,
        tag: InfluenceTag,
        expires_at: u64,
    ) -> Result<()> {
        if tag == InfluenceTag::Null {
            return Err(Error::Usage("cannot stamp a Null influence".into()));
        }
        for c in self.cells_within(center, r)? {
            let i = self.index(c);
            self.cells[i].infected_with = tag;
            self.cells[i].influence_expires_at = Some(expires_at);
        }
        Ok(())
    }

    /// Clear every influence whose expiry tick has been reached; returns the
    /// number of cells cleared.
    pub fn expire_influence(&mut self, now: u64) -> usize {
        let mut cleared = 0;
        for cell in &mut self.cells {
            if matches!(cell.influence_expires_at, Some(t) if t <= now) {
                cell.infected_with = InfluenceTag::Null;
                cell.influence_expires_at = None;
                cleared += 1;
            }
        }
        cleared
    }

    /// Occupancy must be a bijection between `positions` and occupied cells.
    pub fn check_occupancy(&self, positions: &[Coord]) -> bool {
        let occupied = self.cells.iter().filter(|c| c.occupant.is_some()).count();
        if occupied != positions.len() {
            return false;
        }
        positions
            .iter()
            .enumerate()
            .all(|(id, &p)| self.occupant(p) == Some(id))
    }
}
