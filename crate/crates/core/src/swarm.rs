//! Fixed-population swarm engine: directional-biased, pheromone-weighted
//! movement, deposition/evaporation, exclusive cell occupancy and the
//! per-generation step loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::habitat::{self, CellCoord, GrayImage, MOORE_OFFSETS};

/// How the per-generation evaporation interprets the constant K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvapMode {
    /// sigma <- sigma * (1 - K/100). K is a percentage per step.
    #[default]
    MultiplicativePercent,
    /// sigma <- max(0, sigma - K).
    Subtractive,
}

impl EvapMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvapMode::MultiplicativePercent => "multiplicative_percent",
            EvapMode::Subtractive => "subtractive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "multiplicative_percent" | "multiplicative-percent" => {
                Ok(EvapMode::MultiplicativePercent)
            }
            "subtractive" => Ok(EvapMode::Subtractive),
            other => Err(Error::InvalidParam {
                name: "evap_mode",
                reason: format!("'{other}' is not multiplicative_percent or subtractive"),
            }),
        }
    }
}

/// Movement and pheromone parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmParams {
    /// Osmotropotaxic sensitivity: exponent of the pheromone response.
    pub beta: f64,
    /// Sensory-capacity parameter; perceived pheromone saturates at 1/delta.
    pub delta: f64,
    /// Base pheromone deposit per move.
    pub eta: f64,
    /// Gain on the normalized contrast term of the deposit.
    pub p: f64,
    /// Evaporation constant K.
    pub evap: f64,
    pub evap_mode: EvapMode,
    /// Initial population as a fraction of the cell count.
    pub s_frac: f64,
    pub seed: u64,
}

impl Default for SwarmParams {
    fn default() -> Self {
        SwarmParams {
            beta: 3.5,
            delta: 0.2,
            eta: 0.07,
            p: 1.5,
            evap: 1.0,
            evap_mode: EvapMode::MultiplicativePercent,
            s_frac: 0.30,
            seed: 1,
        }
    }
}

impl SwarmParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, ok: bool| -> Result<()> {
            if v.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParam { name, reason: format!("value {v} out of range") })
            }
        };
        check("beta", self.beta, self.beta > 0.0)?;
        check("delta", self.delta, self.delta >= 0.0)?;
        check("eta", self.eta, self.eta >= 0.0)?;
        check("p", self.p, self.p >= 0.0)?;
        check("evap", self.evap, self.evap >= 0.0)?;
        if self.evap_mode == EvapMode::MultiplicativePercent && self.evap > 100.0 {
            return Err(Error::InvalidParam {
                name: "evap",
                reason: format!("{} exceeds 100 percent per step", self.evap),
            });
        }
        check("s_frac", self.s_frac, self.s_frac > 0.0 && self.s_frac <= 1.0)?;
        Ok(())
    }
}

/// Pheromone response of Eq.-style saturating power law:
/// `W(sigma) = (1 + sigma/(1 + delta*sigma))^beta`.
#[inline]
pub fn response(sigma: f64, params: &SwarmParams) -> f64 {
    (1.0 + sigma / (1.0 + params.delta * sigma)).powf(params.beta)
}

/// One of the 8 compass directions; also the unit move offsets on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Heading {
    North = 0,
    NorthEast = 1,
    East = 2,
    SouthEast = 3,
    South = 4,
    SouthWest = 5,
    West = 6,
    NorthWest = 7,
}

pub const HEADINGS: [Heading; 8] = [
    Heading::North,
    Heading::NorthEast,
    Heading::East,
    Heading::SouthEast,
    Heading::South,
    Heading::SouthWest,
    Heading::West,
    Heading::NorthWest,
];

impl Heading {
    #[inline]
    pub fn offset(&self) -> (i64, i64) {
        MOORE_OFFSETS[*self as usize]
    }

    pub fn from_index(i: usize) -> Heading {
        HEADINGS[i % 8]
    }

    /// Magnitude of the turn from `self` to `to`, in 45-degree steps (0..=4).
    #[inline]
    pub fn turn_steps(&self, to: Heading) -> usize {
        let d = (to as i8 - *self as i8).rem_euclid(8) as usize;
        d.min(8 - d)
    }
}

/// Directional bias w(turn): inertial weighting of the relative turn angle,
/// indexed by 45-degree steps 0, 1 (+-45), 2 (+-90), 3 (+-135), 4 (180).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalBias {
    pub w: [f64; 5],
}

impl Default for DirectionalBias {
    fn default() -> Self {
        DirectionalBias { w: [1.0, 0.5, 0.25, 1.0 / 12.0, 0.05] }
    }
}

/// Non-negative pheromone lattice co-located with the habitat.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    width: usize,
    height: usize,
    sigma: Vec<f64>,
}

impl PheromoneField {
    pub fn zeros(width: usize, height: usize) -> Self {
        PheromoneField { width, height, sigma: vec![0.0; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    #[inline]
    pub fn get(&self, c: CellCoord) -> f64 {
        self.sigma[c.y * self.width + c.x]
    }

    #[inline]
    pub fn add(&mut self, c: CellCoord, amount: f64) {
        self.sigma[c.y * self.width + c.x] += amount;
    }

    pub fn total(&self) -> f64 {
        self.sigma.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.sigma.iter().cloned().fold(0.0, f64::max)
    }

    /// Per-generation decay; the field stays non-negative in both modes.
    pub fn evaporate(&mut self, params: &SwarmParams) {
        match params.evap_mode {
            EvapMode::MultiplicativePercent => {
                let keep = 1.0 - params.evap / 100.0;
                for s in &mut self.sigma {
                    *s *= keep;
                }
            }
            EvapMode::Subtractive => {
                for s in &mut self.sigma {
                    *s = (*s - params.evap).max(0.0);
                }
            }
        }
    }
}

/// A single foraging agent. Energy is only consulted by the varying-size
/// engine; the fixed-size engine carries it at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Ant {
    pub id: u64,
    pub pos: CellCoord,
    pub heading: Heading,
    pub age: u64,
    pub energy: f64,
}

/// A candidate destination with its transition probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveCandidate {
    pub dir: Heading,
    pub dest: CellCoord,
    pub prob: f64,
}

/// Per-generation summary of the fixed-population step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub t: u64,
    pub population: usize,
    pub moved: usize,
    pub total_deposit: f64,
    pub max_delta_gl: f64,
}

/// The swarm: ants, exclusive occupancy grid, pheromone field and the
/// deterministic random streams. Single writer; distinct colonies may run
/// in parallel.
#[derive(Debug, Clone)]
pub struct Colony {
    habitat: GrayImage,
    median_map: Vec<u8>,
    field: PheromoneField,
    ants: Vec<Ant>,
    /// Per-cell index into `ants`, or NO_ANT.
    occupancy: Vec<u32>,
    bias: DirectionalBias,
    params: SwarmParams,
    max_delta_gl: f64,
    t: u64,
    next_id: u64,
    /// Drives placement, per-step permutations and roulette draws.
    pub(crate) move_rng: ChaCha8Rng,
    /// Drives death, reproduction and offspring placement. Kept separate so
    /// the varying-size engine consumes the movement stream exactly as the
    /// fixed-size engine does.
    pub(crate) life_rng: ChaCha8Rng,
}

const NO_ANT: u32 = u32::MAX;

impl Colony {
    /// Places `count_override` ants (default: floor(s_frac * cells)) on
    /// distinct uniformly-random cells with uniform-random headings.
    /// `initial_energy` is 1 for the fixed-size engine and 1 + alpha for the
    /// varying-size engine.
    pub fn init(
        habitat: GrayImage,
        params: SwarmParams,
        count_override: Option<usize>,
        initial_energy: f64,
    ) -> Result<Colony> {
        params.validate()?;
        if habitat.width() < 3 || habitat.height() < 3 {
            return Err(Error::InvalidParam {
                name: "habitat",
                reason: format!(
                    "{}x{} lattice too small for Moore neighborhoods",
                    habitat.width(),
                    habitat.height()
                ),
            });
        }
        let cells = habitat.width() * habitat.height();
        let count = count_override.unwrap_or((params.s_frac * cells as f64).floor() as usize);
        if count > cells {
            return Err(Error::PopulationExceedsCells { requested: count, cells });
        }
        if count == 0 {
            return Err(Error::InvalidParam {
                name: "s_frac",
                reason: "initial population is zero".into(),
            });
        }

        let mut move_rng = ChaCha8Rng::seed_from_u64(params.seed);
        move_rng.set_stream(0);
        let mut life_rng = ChaCha8Rng::seed_from_u64(params.seed);
        life_rng.set_stream(1);

        // Partial Fisher-Yates over all cell ids: distinct uniform placements.
        let mut cell_ids: Vec<u32> = (0..cells as u32).collect();
        for i in 0..count {
            let j = move_rng.gen_range(i..cells);
            cell_ids.swap(i, j);
        }
        let width = habitat.width();
        let mut ants = Vec::with_capacity(count);
        let mut occupancy = vec![NO_ANT; cells];
        for (idx, &cell) in cell_ids[..count].iter().enumerate() {
            let heading = Heading::from_index(move_rng.gen_range(0..8usize));
            let pos = CellCoord::new(cell as usize % width, cell as usize / width);
            occupancy[cell as usize] = idx as u32;
            ants.push(Ant {
                id: idx as u64,
                pos,
                heading,
                age: 0,
                energy: initial_energy,
            });
        }

        let median_map = habitat::median_map(&habitat);
        let field = PheromoneField::zeros(habitat.width(), habitat.height());
        Ok(Colony {
            habitat,
            median_map,
            field,
            ants,
            occupancy,
            bias: DirectionalBias::default(),
            params,
            max_delta_gl: 0.0,
            t: 0,
            next_id: count as u64,
            move_rng,
            life_rng,
        })
    }

    /// Builds a colony with explicit ant placements, for controlled
    /// experiments and embedding. Placements must be distinct cells.
    pub fn with_placed_ants(
        habitat: GrayImage,
        params: SwarmParams,
        placements: &[(CellCoord, Heading)],
        initial_energy: f64,
    ) -> Result<Colony> {
        let mut colony = Colony::init(habitat, params, Some(placements.len().max(1)), initial_energy)?;
        // Re-seat the randomly placed ants onto the requested cells.
        colony.occupancy.fill(NO_ANT);
        colony.ants.clear();
        for (idx, &(pos, heading)) in placements.iter().enumerate() {
            if pos.x >= colony.habitat.width() || pos.y >= colony.habitat.height() {
                return Err(Error::InvalidParam {
                    name: "placements",
                    reason: format!("({}, {}) outside the lattice", pos.x, pos.y),
                });
            }
            let cell = pos.y * colony.habitat.width() + pos.x;
            if colony.occupancy[cell] != NO_ANT {
                return Err(Error::InvalidParam {
                    name: "placements",
                    reason: format!("cell ({}, {}) used twice", pos.x, pos.y),
                });
            }
            colony.occupancy[cell] = idx as u32;
            colony.ants.push(Ant {
                id: idx as u64,
                pos,
                heading,
                age: 0,
                energy: initial_energy,
            });
        }
        colony.next_id = placements.len() as u64;
        Ok(colony)
    }

    pub fn habitat(&self) -> &GrayImage {
        &self.habitat
    }

    pub fn field(&self) -> &PheromoneField {
        &self.field
    }

    pub fn ants(&self) -> &[Ant] {
        &self.ants
    }

    pub fn population(&self) -> usize {
        self.ants.len()
    }

    pub fn params(&self) -> &SwarmParams {
        &self.params
    }

    pub fn max_delta_gl(&self) -> f64 {
        self.max_delta_gl
    }

    pub fn generation(&self) -> u64 {
        self.t
    }

    #[inline]
    fn cell_index(&self, c: CellCoord) -> usize {
        c.y * self.habitat.width() + c.x
    }

    pub fn is_occupied(&self, c: CellCoord) -> bool {
        self.occupancy[self.cell_index(c)] != NO_ANT
    }

    /// Cached 3x3 median contrast between two cells, in gray-level units.
    #[inline]
    pub fn cached_delta_gl(&self, from: CellCoord, to: CellCoord) -> f64 {
        let a = self.median_map[self.cell_index(from)] as f64;
        let b = self.median_map[self.cell_index(to)] as f64;
        (a - b).abs()
    }

    /// Replaces the habitat in place; pheromone, ants, energies and the
    /// running contrast maximum all persist. Dimensions must match.
    pub fn swap_habitat(&mut self, habitat: GrayImage) -> Result<()> {
        if habitat.width() != self.habitat.width() || habitat.height() != self.habitat.height() {
            return Err(Error::DimensionMismatch {
                expected_w: self.habitat.width(),
                expected_h: self.habitat.height(),
                got_w: habitat.width(),
                got_h: habitat.height(),
            });
        }
        self.median_map = habitat::median_map(&habitat);
        self.habitat = habitat;
        Ok(())
    }

    /// Unnormalized roulette weights over the free Moore neighbors.
    fn candidate_weights(&self, ant: &Ant) -> Vec<(Heading, CellCoord, f64)> {
        let mut out = Vec::with_capacity(8);
        let x = ant.pos.x as i64;
        let y = ant.pos.y as i64;
        for dir in HEADINGS {
            let (dx, dy) = dir.offset();
            let dest = self.habitat.wrap(x + dx, y + dy);
            if self.occupancy[self.cell_index(dest)] != NO_ANT {
                continue;
            }
            let w_turn = self.bias.w[ant.heading.turn_steps(dir)];
            let w_sigma = response(self.field.get(dest), &self.params);
            out.push((dir, dest, w_sigma * w_turn));
        }
        out
    }

    /// Normalized transition distribution over the ant's free Moore
    /// neighbors. Empty when the ant is totally surrounded.
    pub fn transition_probabilities(&self, ant: &Ant) -> Vec<MoveCandidate> {
        let weights = self.candidate_weights(ant);
        let total: f64 = weights.iter().map(|(_, _, w)| w).sum();
        weights
            .into_iter()
            .map(|(dir, dest, w)| MoveCandidate { dir, dest, prob: w / total })
            .collect()
    }

    /// Roulette-wheel draw over the candidate cells. Consumes exactly one
    /// random draw when candidates exist; none otherwise.
    pub fn choose_move(&mut self, ant_index: usize) -> Option<MoveCandidate> {
        let weights = self.candidate_weights(&self.ants[ant_index]);
        if weights.is_empty() {
            return None;
        }
        let total: f64 = weights.iter().map(|(_, _, w)| w).sum();
        let target = self.move_rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = weights.len() - 1;
        for (i, (_, _, w)) in weights.iter().enumerate() {
            acc += w;
            if target < acc {
                chosen = i;
                break;
            }
        }
        let (dir, dest, w) = weights[chosen];
        Some(MoveCandidate { dir, dest, prob: w / total })
    }

    /// Applies a chosen move: occupancy update, heading update, pheromone
    /// deposit at the destination, running-maximum update. Returns
    /// (delta_gl, deposit).
    fn apply_move(&mut self, ant_index: usize, mv: MoveCandidate) -> (f64, f64) {
        let from = self.ants[ant_index].pos;
        let to = mv.dest;
        let from_cell = self.cell_index(from);
        let to_cell = self.cell_index(to);
        self.occupancy[from_cell] = NO_ANT;
        self.occupancy[to_cell] = ant_index as u32;
        let ant = &mut self.ants[ant_index];
        ant.pos = to;
        ant.heading = mv.dir;

        let dgl = self.cached_delta_gl(from, to);
        let deposit = self.params.eta + self.params.p * dgl / 255.0;
        self.field.add(to, deposit);
        if dgl > self.max_delta_gl {
            self.max_delta_gl = dgl;
        }
        (dgl, deposit)
    }

    /// Movement phase shared by both engines: a fresh random permutation of
    /// the ants, one optional move each, deposits on actual moves. Fills
    /// `deltas[i]` with ant i's transition contrast (0 when blocked) and
    /// increments ages.
    fn movement_phase(&mut self, deltas: &mut [f64]) -> (usize, f64) {
        let n = self.ants.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        // Fisher-Yates from the movement stream.
        for i in (1..n).rev() {
            let j = self.move_rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut moved = 0;
        let mut total_deposit = 0.0;
        for &idx in &order {
            let idx = idx as usize;
            if let Some(mv) = self.choose_move(idx) {
                let (dgl, dep) = self.apply_move(idx, mv);
                deltas[idx] = dgl;
                moved += 1;
                total_deposit += dep;
            } else {
                deltas[idx] = 0.0;
            }
            self.ants[idx].age += 1;
        }
        (moved, total_deposit)
    }

    /// One generation of the fixed-population engine: randomized sequential
    /// moves with deposition, then one evaporation pass.
    pub fn step_sfps(&mut self) -> StepReport {
        let mut deltas = vec![0.0; self.ants.len()];
        let (moved, total_deposit) = self.movement_phase(&mut deltas);
        self.field.evaporate(&self.params);
        self.t += 1;
        StepReport {
            t: self.t,
            population: self.ants.len(),
            moved,
            total_deposit,
            max_delta_gl: self.max_delta_gl,
        }
    }

    // ---- internals shared with the varying-population engine ----

    pub(crate) fn movement_phase_internal(&mut self, deltas: &mut [f64]) -> (usize, f64) {
        self.movement_phase(deltas)
    }

    pub(crate) fn evaporate_internal(&mut self) {
        self.field.evaporate(&self.params);
    }

    pub(crate) fn advance_generation(&mut self) {
        self.t += 1;
    }

    pub(crate) fn ants_mut(&mut self) -> &mut Vec<Ant> {
        &mut self.ants
    }

    /// Removes the ants flagged dead, preserving storage order, and reindexes
    /// the occupancy grid. `keep` must align with the current ants vector.
    pub(crate) fn retain_ants(&mut self, keep: &[bool]) {
        debug_assert_eq!(keep.len(), self.ants.len());
        let mut kept = Vec::with_capacity(self.ants.len());
        for (i, ant) in self.ants.drain(..).enumerate() {
            if keep[i] {
                kept.push(ant);
            } else {
                let cell = ant.pos.y * self.habitat.width() + ant.pos.x;
                self.occupancy[cell] = NO_ANT;
            }
        }
        self.ants = kept;
        for (idx, ant) in self.ants.iter().enumerate() {
            let cell = ant.pos.y * self.habitat.width() + ant.pos.x;
            self.occupancy[cell] = idx as u32;
        }
    }

    /// Number of occupied Moore neighbors of a cell (0..=8).
    pub fn occupied_neighbors(&self, c: CellCoord) -> usize {
        let x = c.x as i64;
        let y = c.y as i64;
        MOORE_OFFSETS
            .iter()
            .filter(|&&(dx, dy)| {
                let n = self.habitat.wrap(x + dx, y + dy);
                self.occupancy[self.cell_index(n)] != NO_ANT
            })
            .count()
    }

    /// Free Moore neighbor cells in fixed heading order.
    pub(crate) fn free_neighbors(&self, c: CellCoord) -> Vec<CellCoord> {
        let x = c.x as i64;
        let y = c.y as i64;
        MOORE_OFFSETS
            .iter()
            .map(|&(dx, dy)| self.habitat.wrap(x + dx, y + dy))
            .filter(|&n| self.occupancy[self.cell_index(n)] == NO_ANT)
            .collect()
    }

    pub(crate) fn spawn_ant(&mut self, pos: CellCoord, heading: Heading, energy: f64) {
        let idx = self.ants.len() as u32;
        let cell = self.cell_index(pos);
        debug_assert_eq!(self.occupancy[cell], NO_ANT);
        self.occupancy[cell] = idx;
        let id = self.next_id;
        self.next_id += 1;
        self.ants.push(Ant { id, pos, heading, age: 0, energy });
    }

    /// Checks the ants/occupancy bijection; used by tests and the fuzz gate.
    pub fn occupancy_consistent(&self) -> bool {
        let mut count = 0;
        for (cell, &idx) in self.occupancy.iter().enumerate() {
            if idx == NO_ANT {
                continue;
            }
            count += 1;
            let Some(ant) = self.ants.get(idx as usize) else {
                return false;
            };
            if self.cell_index(ant.pos) != cell {
                return false;
            }
        }
        count == self.ants.len()
    }
}
