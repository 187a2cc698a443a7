//! Deterministic synthetic image sets for the association experiment.

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::vision::grid::{ImageGrid, GRID_SIDE};
use crate::vision::io::to_pgm;

/// Stylized cat face: bright head with ears; dark eyes, nose and mouth.
pub fn cat_prototype() -> ImageGrid {
    ImageGrid::from_fn(GRID_SIDE, GRID_SIDE, |r, c| {
        let (y, x) = (r as f64 - 10.5, c as f64 - 9.5);
        let head = (y / 10.0).powi(2) + (x / 10.5).powi(2) <= 1.0;
        let ear = r < 5
            && ((c as f64 - 3.0).abs() <= r as f64 * 0.6 + 0.5 || (c as f64 - 16.0).abs() <= r as f64 * 0.6 + 0.5);
        let eye = (7..=8).contains(&r) && ((5..=6).contains(&c) || (13..=14).contains(&c));
        let nose = r == 11 && (9..=10).contains(&c);
        let mouth = r == 14 && (7..=12).contains(&c) && c != 9 && c != 10;
        let bright = (head || ear) && !(eye || nose || mouth);
        if bright {
            1.0
        } else {
            0.0
        }
    })
    .expect("prototype is a valid grid")
}

/// A second class unlike the prototype: vertical bars, two pixels wide.
pub fn bar_prototype() -> ImageGrid {
    ImageGrid::from_fn(GRID_SIDE, GRID_SIDE, |_, c| if c % 4 < 2 { 1.0 } else { 0.0 })
        .expect("prototype is a valid grid")
}

/// Invert exactly `round(fraction * len)` binary pixels chosen by `seed`.
pub fn flip_noise(img: &ImageGrid, fraction: f64, seed: u64) -> ImageGrid {
    let n = img.len();
    let k = ((fraction * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = img.values().to_vec();
    for i in sample(&mut rng, n, k) {
        data[i] = 1.0 - data[i];
    }
    ImageGrid::new(img.rows(), img.cols(), data).expect("flipping keeps values in [0, 1]")
}

#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub name: String,
    pub image: ImageGrid,
    pub positive: bool,
}

/// Training pairs, a calibration split for the threshold, and a held-out test split.
#[derive(Debug, Clone)]
pub struct SyntheticSuite {
    pub prototype: ImageGrid,
    pub other: ImageGrid,
    /// (noisy input, clean teacher)
    pub train: Vec<(ImageGrid, ImageGrid)>,
    pub calibration: Vec<LabeledImage>,
    pub test: Vec<LabeledImage>,
}

impl SyntheticSuite {
    pub const TRAIN_PAIRS: usize = 10;
    pub const PER_CLASS: usize = 5;

    pub fn generate(seed: u64, noise: f64) -> Self {
        let prototype = cat_prototype();
        let other = bar_prototype();
        let train = (0..Self::TRAIN_PAIRS)
            .map(|i| (flip_noise(&prototype, noise, seed + i as u64), prototype.clone()))
            .collect();
        let split = |base: u64, tag: &str| -> Vec<LabeledImage> {
            let mut v = Vec::new();
            for i in 0..Self::PER_CLASS {
                v.push(LabeledImage {
                    name: format!("cat_{tag}{:02}", i + 1),
                    image: flip_noise(&prototype, noise, seed + base + i as u64),
                    positive: true,
                });
            }
            for i in 0..Self::PER_CLASS {
                v.push(LabeledImage {
                    name: format!("other_{tag}{:02}", i + 1),
                    image: flip_noise(&other, noise, seed + base + 100 + i as u64),
                    positive: false,
                });
            }
            v
        };
        SyntheticSuite { train, calibration: split(1_000, "cal"), test: split(2_000, ""), prototype, other }
    }

    /// Write `train/pairNN_{input,teacher}.csv`, `calibration/*.pgm` and `test/*.pgm`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let train = dir.join("train");
        std::fs::create_dir_all(&train)?;
        for (i, (input, teacher)) in self.train.iter().enumerate() {
            let as_bytes = |g: &ImageGrid| g.map(|v| (v * 255.0).round()).to_csv();
            std::fs::write(train.join(format!("pair{:02}_input.csv", i + 1)), as_bytes(input))?;
            std::fs::write(train.join(format!("pair{:02}_teacher.csv", i + 1)), as_bytes(teacher))?;
        }
        for (sub, set) in [("calibration", &self.calibration), ("test", &self.test)] {
            let d = dir.join(sub);
            std::fs::create_dir_all(&d)?;
            for img in set {
                std::fs::write(d.join(format!("{}.pgm", img.name)), to_pgm(&img.image))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prototype_is_mostly_bright() {
        let p = cat_prototype();
        let frac = p.values().iter().sum::<f64>() / p.len() as f64;
        assert!((0.7..0.85).contains(&frac), "{frac}");
    }

    #[test]
    fn flip_noise_flips_exact_count_deterministically() {
        let p = cat_prototype();
        let a = flip_noise(&p, 0.1, 7);
        let b = flip_noise(&p, 0.1, 7);
        assert_eq!(a, b);
        let diff = a.values().iter().zip(p.values()).filter(|(x, y)| x != y).count();
        assert_eq!(diff, 40);
        assert_ne!(flip_noise(&p, 0.1, 8), a);
    }
}
