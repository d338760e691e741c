// Scratch (to be deleted): population/location traces around the swap.

use pherogrid::experiment::{dilate_mask, edge_mask};
use pherogrid::habitat::{make_synthetic, SyntheticKind};
use pherogrid::swarm::{Colony, EvapMode, SwarmParams};
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
fn trace_swap() {
    for (mode_name, evap_mode) in [
        ("mult", EvapMode::MultiplicativePercent),
        ("sub", EvapMode::Subtractive),
    ] {
        for (geo, arm, len, c) in [
            ("touch c33", 8usize, 54usize, (33usize, 33usize)),
            ("overlapG c35a10l60", 10, 60, (35, 35)),
        ] {
            let img_a = glyph(arm, len, c);
            let img_b = img_a.rotate180();
            let new_band = dilate_mask(&edge_mask(&img_b), 100, 100, 2);
            let vps = VpsParams::default();
            let params = SwarmParams {
                seed: 4,
                evap_mode,
                ..SwarmParams::default()
            };
            let mut colony =
                Colony::init(img_a.clone(), params, None, initial_energy(&vps)).unwrap();
            let mut log = String::new();
            for t in 1..=400u64 {
                let r = colony.step_svps(&vps);
                if t == 250 {
                    colony.swap_habitat(img_b.clone()).unwrap();
                }
                if [100, 249, 252, 256, 260, 265, 270, 280, 300, 350, 400].contains(&t) {
                    let on_new = colony
                        .ants()
                        .iter()
                        .filter(|a| new_band[a.pos.y * 100 + a.pos.x])
                        .count();
                    let me = if r.population > 0 { r.mean_energy } else { 0.0 };
                    log.push_str(&format!(
                        " t{t}:pop{} new{} b{} d{} e{me:.2} |",
                        r.population, on_new, r.births, r.deaths
                    ));
                }
                if r.population == 0 {
                    log.push_str(&format!(" EXTINCT t{t}"));
                    break;
                }
            }
            eprintln!("[{mode_name} {geo}]{log}");
            eprintln!(
                "   field max at end {:.3}, total {:.1}",
                colony.field().max(),
                colony.field().total()
            );
        }
    }
}
