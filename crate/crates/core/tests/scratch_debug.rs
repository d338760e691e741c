// Scratch (to be deleted): side-by-side dump of immersion vs steepest descent.

use pherogrid::watershed::{watershed_immersion, Connectivity, ReliefImage, WSHED};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn steepest(relief: &ReliefImage) -> Vec<u32> {
    let (w, h) = (relief.width(), relief.height());
    let offsets: &[(i64, i64)] = &[
        (0, -1),
        (1, -1),
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
    ];
    let lowest_nbr = |i: usize| -> Option<usize> {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        let mut best: Option<(u8, usize)> = None;
        for &(dx, dy) in offsets {
            let nx = x + dx;
            let ny = y + dy;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            let v = relief.levels()[j];
            if v < relief.levels()[i] && best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, j));
            }
        }
        best.map(|(_, j)| j)
    };
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    for start in 0..w * h {
        if labels[start] != 0 {
            continue;
        }
        let mut path = vec![start];
        let mut cur = start;
        let label;
        loop {
            match lowest_nbr(cur) {
                Some(j) => {
                    if labels[j] != 0 {
                        label = labels[j];
                        break;
                    }
                    path.push(j);
                    cur = j;
                }
                None => {
                    next += 1;
                    label = next;
                    break;
                }
            }
        }
        for i in path {
            labels[i] = label;
        }
    }
    labels
}

#[test]
fn dump_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut values: Vec<u8> = (0..36u8).collect();
    values.shuffle(&mut rng);
    let relief = ReliefImage::from_levels(6, 6, values.clone()).unwrap();
    let map = watershed_immersion(&relief, Connectivity::Eight);
    let oracle = steepest(&relief);
    eprintln!("levels:");
    for y in 0..6 {
        let row: Vec<String> =
            (0..6).map(|x| format!("{:3}", relief.levels()[y * 6 + x])).collect();
        eprintln!("  {}", row.join(" "));
    }
    eprintln!("immersion (w = WSHED), basins {}:", map.basin_count());
    for y in 0..6 {
        let row: Vec<String> = (0..6)
            .map(|x| {
                let l = map.labels()[y * 6 + x];
                if l == WSHED { "  w".into() } else { format!("{l:3}") }
            })
            .collect();
        eprintln!("  {}", row.join(" "));
    }
    eprintln!("steepest descent:");
    for y in 0..6 {
        let row: Vec<String> = (0..6).map(|x| format!("{:3}", oracle[y * 6 + x])).collect();
        eprintln!("  {}", row.join(" "));
    }
}
