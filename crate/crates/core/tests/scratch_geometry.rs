// Scratch study (to be deleted): glyph geometry scan for the rotation-swap
// experiments.

use pherogrid::experiment::{dilate_mask, edge_mask};
use pherogrid::habitat::{make_synthetic, SyntheticKind};
use pherogrid::swarm::{Colony, SwarmParams};
use pherogrid::vps::{initial_energy, VpsParams};

fn glyph(arm: usize, len: usize, c: (usize, usize)) -> pherogrid::GrayImage {
    make_synthetic(
        &SyntheticKind::Cross { arm_width: arm, arm_len: Some(len), center: Some(c) },
        100,
        100,
    )
    .unwrap()
}

#[test]
fn scan_geometries() {
    let candidates = [
        ("Q42 arm8 len20 c42 (moat 9)", 8usize, 20usize, (42usize, 42usize)),
        ("Q43 arm8 len22 c43 (moat 7)", 8, 22, (43, 43)),
        ("Q44 arm8 len24 c44 (moat 5)", 8, 24, (44, 44)),
        ("Q45 arm8 len26 c45 (moat 3)", 8, 26, (45, 45)),
    ];
    let vps = VpsParams::default();
    for (name, arm, len, c) in candidates {
        let img_a = glyph(arm, len, c);
        let img_b = img_a.rotate180();
        let new_band = dilate_mask(&edge_mask(&img_b), 100, 100, 2);
        let occupancy = |colony: &Colony| {
            let total = colony.population();
            if total == 0 {
                return 0.0;
            }
            colony
                .ants()
                .iter()
                .filter(|a| new_band[a.pos.y * 100 + a.pos.x])
                .count() as f64
                / total as f64
        };

        let mut svps_wins = 0;
        let mut svps_alive_350 = 0;
        for seed in 0..10u64 {
            let params = SwarmParams { seed, ..SwarmParams::default() };
            let mut svps =
                Colony::init(img_a.clone(), params.clone(), None, initial_energy(&vps)).unwrap();
            for t in 1..=350u64 {
                svps.step_svps(&vps);
                if t == 250 {
                    svps.swap_habitat(img_b.clone()).unwrap();
                }
            }
            let mut sfps = Colony::init(img_a.clone(), params, None, 1.0).unwrap();
            for t in 1..=350u64 {
                sfps.step_sfps();
                if t == 250 {
                    sfps.swap_habitat(img_b.clone()).unwrap();
                }
            }
            if svps.population() > 0 {
                svps_alive_350 += 1;
            }
            if occupancy(&svps) > occupancy(&sfps) {
                svps_wins += 1;
            }
        }

        // Extinction contrast by t = 750.
        let mut extinct = [0u32; 2];
        for (bi, beta) in [7.0f64, 3.5].into_iter().enumerate() {
            for seed in 0..10u64 {
                let params = SwarmParams { beta, seed, ..SwarmParams::default() };
                let mut colony =
                    Colony::init(img_a.clone(), params, None, initial_energy(&vps)).unwrap();
                for t in 1..=750u64 {
                    let r = colony.step_svps(&vps);
                    if t == 250 {
                        colony.swap_habitat(img_b.clone()).unwrap();
                    }
                    if r.population == 0 {
                        extinct[bi] += 1;
                        break;
                    }
                }
            }
        }
        eprintln!(
            "{name}: occ wins {svps_wins}/10, alive@350 {svps_alive_350}/10, extinct b7 {}/10, extinct b3.5 {}/10",
            extinct[0], extinct[1]
        );
    }
}
