//! Self-regulated population-size mechanism layered on the swarm engine:
//! per-ant energy that tracks transition contrast, probabilistic death, and
//! occupancy-and-contrast-gated reproduction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::habitat::ContrastStat;
use crate::swarm::{Ant, Colony, Heading};

/// Parameters of the varying-population engine.
#[derive(Debug, Clone, PartialEq)]
pub struct VpsParams {
    /// Per-generation energy decay.
    pub alpha: f64,
    /// Reproduction floor: chance retained even on zero contrast.
    pub mu: f64,
    /// Occupancy weight table indexed by the number of occupied Moore
    /// neighbors, 0..=8. Peaks at moderate crowding.
    pub w_n: [f64; 9],
}

impl Default for VpsParams {
    fn default() -> Self {
        VpsParams {
            alpha: 0.025,
            mu: 0.1,
            w_n: [0.0, 0.25, 0.5, 0.75, 1.0, 0.75, 0.5, 0.25, 0.0],
        }
    }
}

impl VpsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && (0.0..1.0).contains(&self.alpha)) {
            return Err(Error::InvalidParam {
                name: "alpha",
                reason: format!("{} not in [0, 1)", self.alpha),
            });
        }
        if !(self.mu.is_finite() && (0.0..=1.0).contains(&self.mu)) {
            return Err(Error::InvalidParam {
                name: "mu",
                reason: format!("{} not in [0, 1]", self.mu),
            });
        }
        for (n, &w) in self.w_n.iter().enumerate() {
            if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                return Err(Error::InvalidParam {
                    name: "w_n",
                    reason: format!("W({n}) = {w} not in [0, 1]"),
                });
            }
        }
        Ok(())
    }
}

/// Per-generation summary of the varying-population step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpsStepReport {
    pub t: u64,
    pub births: usize,
    pub deaths: usize,
    pub population: usize,
    pub mean_energy: f64,
}

/// Birth energy e(0) = 1 + alpha, so every ant survives at least one move.
#[inline]
pub fn initial_energy(params: &VpsParams) -> f64 {
    1.0 + params.alpha
}

/// Energy recurrence: e <- e - alpha + alpha * (delta_gl / max_delta_gl).
/// The ratio is 0 while no contrast has been seen; at full contrast the
/// energy is returned unchanged, bit-exactly.
pub fn update_energy(
    e_prev: f64,
    delta_gl: ContrastStat,
    max_delta_gl: f64,
    params: &VpsParams,
) -> f64 {
    if max_delta_gl > 0.0 && delta_gl.delta_gl == max_delta_gl {
        return e_prev;
    }
    let ratio = if max_delta_gl > 0.0 { delta_gl.delta_gl / max_delta_gl } else { 0.0 };
    e_prev - params.alpha + params.alpha * ratio
}

/// One Bernoulli trial: dies with probability clamp(1 - energy, 0, 1).
/// Always consumes exactly one draw.
pub fn death_trial<R: Rng>(ant: &Ant, rng: &mut R) -> bool {
    let p = (1.0 - ant.energy).clamp(0.0, 1.0);
    rng.gen::<f64>() < p
}

/// Offspring probability: W(n) * (mu + (1 - mu) * delta_gl / max_delta_gl),
/// with the ratio defined as 0 when no contrast has been seen.
pub fn reproduction_probability(
    n_occupied: usize,
    delta_gl: ContrastStat,
    max_delta_gl: f64,
    params: &VpsParams,
) -> f64 {
    debug_assert!(n_occupied <= 8);
    let ratio = if max_delta_gl > 0.0 {
        delta_gl.delta_gl / max_delta_gl
    } else {
        0.0
    };
    params.w_n[n_occupied] * (params.mu + (1.0 - params.mu) * ratio)
}

impl Colony {
    /// One generation of the varying-population engine:
    /// movement/deposition as in the fixed-size step, energy update from each
    /// ant's own transition contrast (blocked ants are charged zero), death
    /// trials, a randomized reproduction sweep over survivors, evaporation.
    pub fn step_svps(&mut self, params: &VpsParams) -> VpsStepReport {
        let pop_before = self.population();
        let mut deltas = vec![0.0; pop_before];
        self.movement_phase_internal(&mut deltas);

        // Energy update against the post-movement running maximum.
        let max_dgl = self.max_delta_gl();
        for (i, ant) in self.ants_mut().iter_mut().enumerate() {
            ant.energy = update_energy(
                ant.energy,
                ContrastStat { delta_gl: deltas[i] },
                max_dgl,
                params,
            );
        }

        // Death trials in storage order; one draw per ant.
        let mut keep = vec![true; pop_before];
        let mut deaths = 0;
        for i in 0..pop_before {
            let ant = self.ants()[i].clone();
            if death_trial(&ant, &mut self.life_rng) {
                keep[i] = false;
                deaths += 1;
            }
        }
        if deaths > 0 {
            self.retain_ants(&keep);
            let mut kept_deltas = Vec::with_capacity(pop_before - deaths);
            for (i, d) in deltas.into_iter().enumerate() {
                if keep[i] {
                    kept_deltas.push(d);
                }
            }
            deltas = kept_deltas;
        }
        let survivors = self.population();

        // Reproduction sweep in randomized order over survivors. Births take
        // effect immediately, so later parents observe earlier offspring.
        let mut order: Vec<u32> = (0..survivors as u32).collect();
        for i in (1..survivors).rev() {
            let j = self.life_rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut births = 0;
        for &idx in &order {
            let idx = idx as usize;
            let pos = self.ants()[idx].pos;
            let n_occ = self.occupied_neighbors(pos);
            if n_occ == 0 {
                continue;
            }
            let pr = reproduction_probability(
                n_occ,
                ContrastStat { delta_gl: deltas[idx] },
                self.max_delta_gl(),
                params,
            );
            if self.life_rng.gen::<f64>() < pr {
                let free = self.free_neighbors(pos);
                if free.is_empty() {
                    continue;
                }
                let cell = free[self.life_rng.gen_range(0..free.len())];
                let heading = Heading::from_index(self.life_rng.gen_range(0..8usize));
                self.spawn_ant(cell, heading, initial_energy(params));
                births += 1;
            }
        }

        self.evaporate_internal();
        self.advance_generation();

        let population = self.population();
        let mean_energy = if population == 0 {
            0.0
        } else {
            self.ants().iter().map(|a| a.energy).sum::<f64>() / population as f64
        };
        VpsStepReport {
            t: self.generation(),
            births,
            deaths,
            population,
            mean_energy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::habitat::{make_synthetic, CellCoord, GrayImage, SyntheticKind};
    use crate::swarm::SwarmParams;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_contrast(d: f64) -> ContrastStat {
        ContrastStat { delta_gl: d }
    }

    #[test]
    fn initial_energy_values() {
        assert_eq!(initial_energy(&VpsParams::default()), 1.025);
        assert_eq!(initial_energy(&VpsParams { alpha: 0.0, ..VpsParams::default() }), 1.0);
        assert_eq!(initial_energy(&VpsParams { alpha: 0.5, ..VpsParams::default() }), 1.5);
    }

    #[test]
    fn energy_unchanged_at_max_contrast() {
        let p = VpsParams::default();
        let e = 0.87654321;
        let out = update_energy(e, zero_contrast(123.0), 123.0, &p);
        assert_eq!(out.to_bits(), e.to_bits());
    }

    #[test]
    fn energy_decays_without_contrast() {
        let p = VpsParams::default();
        let out = update_energy(1.025, zero_contrast(0.0), 100.0, &p);
        assert!((out - 1.0).abs() < 1e-15);
        // Unseen contrast: ratio defined as zero.
        let out = update_energy(1.025, zero_contrast(0.0), 0.0, &p);
        assert!((out - 1.0).abs() < 1e-15);
    }

    #[test]
    fn energy_arithmetic_case() {
        let p = VpsParams::default();
        let out = update_energy(1.025, zero_contrast(50.0), 100.0, &p);
        assert!((out - 1.0125).abs() / 1.0125 < 1e-12, "got {out}");
    }

    #[test]
    fn energy_fixed_point_at_max_contrast() {
        let p = VpsParams::default();
        let e0 = initial_energy(&p);
        let mut e = e0;
        for _ in 0..100 {
            e = update_energy(e, zero_contrast(255.0), 255.0, &p);
        }
        assert_eq!(e.to_bits(), e0.to_bits());
    }

    #[test]
    fn death_certainties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ant = |energy: f64| Ant {
            id: 0,
            pos: CellCoord::new(0, 0),
            heading: Heading::North,
            age: 0,
            energy,
        };
        for _ in 0..1000 {
            assert!(!death_trial(&ant(1.0), &mut rng));
            assert!(!death_trial(&ant(1.5), &mut rng));
            assert!(death_trial(&ant(0.0), &mut rng));
            assert!(death_trial(&ant(-0.3), &mut rng));
        }
    }

    #[test]
    fn death_frequency_matches_bernoulli() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let ant = Ant {
            id: 0,
            pos: CellCoord::new(0, 0),
            heading: Heading::North,
            age: 0,
            energy: 0.75,
        };
        let n = 1_000_000;
        let deaths = (0..n).filter(|_| death_trial(&ant, &mut rng)).count();
        let freq = deaths as f64 / n as f64;
        assert!((freq - 0.25).abs() < 0.002, "death frequency {freq}");
    }

    #[test]
    fn reproduction_probability_table() {
        let p = VpsParams::default();
        assert_eq!(reproduction_probability(0, zero_contrast(200.0), 200.0, &p), 0.0);
        assert_eq!(reproduction_probability(8, zero_contrast(200.0), 200.0, &p), 0.0);
        let full = reproduction_probability(4, zero_contrast(150.0), 150.0, &p);
        assert!((full - 1.0).abs() < 1e-15);
        let floor = reproduction_probability(2, zero_contrast(0.0), 255.0, &p);
        assert!((floor - 0.05).abs() / 0.05 < 1e-12);
    }

    fn svps_colony(img: GrayImage, seed: u64, count: usize, vps: &VpsParams) -> Colony {
        let params = SwarmParams { seed, ..SwarmParams::default() };
        Colony::init(img, params, Some(count), initial_energy(vps)).unwrap()
    }

    #[test]
    fn zero_energy_colony_goes_extinct() {
        let img = GrayImage::constant(12, 12, 90).unwrap();
        let params = SwarmParams { seed: 3, ..SwarmParams::default() };
        let mut colony = Colony::init(img, params, Some(30), 0.0).unwrap();
        let vps = VpsParams::default();
        let report = colony.step_svps(&vps);
        assert_eq!(report.deaths, 30);
        assert_eq!(report.births, 0);
        assert_eq!(report.population, 0);
        assert_eq!(report.mean_energy, 0.0);
        // Stepping an extinct colony stays a no-op.
        let next = colony.step_svps(&vps);
        assert_eq!(next.population, 0);
        assert!(colony.occupancy_consistent());
    }

    #[test]
    fn isolated_ant_never_reproduces() {
        let img = make_synthetic(&SyntheticKind::Checkerboard { tile: 4 }, 16, 16).unwrap();
        let vps = VpsParams::default();
        let params = SwarmParams { seed: 8, ..SwarmParams::default() };
        let mut colony = Colony::with_placed_ants(
            img,
            params,
            &[(CellCoord::new(8, 8), Heading::North)],
            initial_energy(&vps),
        )
        .unwrap();
        for _ in 0..200 {
            let report = colony.step_svps(&vps);
            assert_eq!(report.births, 0);
            if report.population == 0 {
                return; // energy drifted down and the lone ant died
            }
        }
        panic!("a lone ant on a checkerboard should eventually die");
    }

    #[test]
    fn bookkeeping_identity_holds() {
        let img = make_synthetic(
            &SyntheticKind::Cross { arm_width: 6, arm_len: None, center: None },
            32,
            32,
        )
        .unwrap();
        let vps = VpsParams::default();
        let mut colony = svps_colony(img, 17, 300, &vps);
        let mut pop = colony.population();
        for _ in 0..120 {
            let report = colony.step_svps(&vps);
            assert_eq!(report.population, pop + report.births - report.deaths);
            pop = report.population;
            assert!(colony.occupancy_consistent());
            assert!(colony.field().sigma().iter().all(|&s| s >= 0.0));
        }
    }

    #[test]
    fn degenerate_vps_equals_sfps() {
        // alpha = 0 and an all-zero W(n) table: no deaths, no births, and the
        // movement stream is untouched by the lifecycle phases.
        let img = make_synthetic(
            &SyntheticKind::Cross { arm_width: 5, arm_len: None, center: None },
            24,
            24,
        )
        .unwrap();
        let vps = VpsParams { alpha: 0.0, mu: 0.1, w_n: [0.0; 9] };
        let params = SwarmParams { seed: 123, ..SwarmParams::default() };
        let mut fixed = Colony::init(img.clone(), params.clone(), Some(120), 1.0).unwrap();
        let mut varying = Colony::init(img, params, Some(120), initial_energy(&vps)).unwrap();
        for _ in 0..50 {
            fixed.step_sfps();
            let report = varying.step_svps(&vps);
            assert_eq!(report.births, 0);
            assert_eq!(report.deaths, 0);
            assert_eq!(fixed.ants(), varying.ants());
            let fa: Vec<u64> = fixed.field().sigma().iter().map(|s| s.to_bits()).collect();
            let va: Vec<u64> = varying.field().sigma().iter().map(|s| s.to_bits()).collect();
            assert_eq!(fa, va);
        }
    }

    #[test]
    fn births_require_contrasted_crowding_to_sustain() {
        // On a contrasted habitat with a mid-size seed population the swarm
        // must produce births within the first generations.
        let img = make_synthetic(
            &SyntheticKind::Cross { arm_width: 8, arm_len: None, center: None },
            48,
            48,
        )
        .unwrap();
        let vps = VpsParams::default();
        let mut colony = svps_colony(img, 21, 700, &vps);
        let mut total_births = 0;
        for _ in 0..10 {
            total_births += colony.step_svps(&vps).births;
        }
        assert!(total_births > 0);
    }

    #[test]
    fn params_validation() {
        assert!(VpsParams::default().validate().is_ok());
        assert!(VpsParams { alpha: 0.0, ..VpsParams::default() }.validate().is_ok());
        assert!(VpsParams { alpha: 1.0, ..VpsParams::default() }.validate().is_err());
        assert!(VpsParams { mu: 1.1, ..VpsParams::default() }.validate().is_err());
        let mut bad = VpsParams::default();
        bad.w_n[3] = 1.5;
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn reproduction_probability_in_unit_interval(
            n in 0usize..=8,
            dgl in 0.0f64..=255.0,
            max_scale in 0.0f64..=1.0,
            mu in 0.0f64..=1.0,
        ) {
            // The running maximum guarantees dgl <= max in the engine.
            let max = dgl + (255.0 - dgl) * max_scale;
            let params = VpsParams { mu, ..VpsParams::default() };
            let pr = reproduction_probability(n, zero_contrast(dgl), max, &params);
            prop_assert!((0.0..=1.0).contains(&pr), "Pr = {pr}");
            // Floor: W(n) > 0 and mu > 0 keep a strictly positive chance.
            if params.w_n[n] > 0.0 && mu > 0.0 {
                prop_assert!(pr >= params.w_n[n] * mu - 1e-15);
                prop_assert!(pr > 0.0);
            }
        }

        #[test]
        fn energy_never_rises_above_birth_level(
            steps in 1usize..60,
            seed in any::<u64>(),
        ) {
            let p = VpsParams::default();
            let mut e = initial_energy(&p);
            let mut max: f64 = 0.0;
            let mut state = seed | 1;
            for _ in 0..steps {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(7);
                let d = ((state >> 40) % 256) as f64;
                max = max.max(d);
                e = update_energy(e, zero_contrast(d), max, &p);
                prop_assert!(e <= initial_energy(&p) + 1e-12);
            }
        }
    }
}
