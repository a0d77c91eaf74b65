//! Synthetic stained-cell images for tests and smoke runs.
//!
//! Each image is a filled ellipse on a plain background. In the `stain` task
//! lymphoblasts carry a large violet nucleus filling most of the cell and
//! healthy cells a small dark-purple one. In the `hue` task the ellipse is a
//! single hue band per class, with value fixed at 0.8 over the whole image,
//! so the classes differ only in hue.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use qvcnn_core::encoding::{hsv_pixel_to_rgb, Label, LabeledSample, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{io_err, Result};
use crate::imageio::write_ppm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthTask {
    Stain,
    Hue,
}

struct Ellipse {
    cy: f64,
    cx: f64,
    ry: f64,
    rx: f64,
    angle: f64,
}

impl Ellipse {
    fn random(rng: &mut ChaCha8Rng, size: f64) -> Self {
        let r = size * rng.random_range(0.28..0.38);
        Self {
            cy: size * (0.5 + rng.random_range(-0.06..0.06)),
            cx: size * (0.5 + rng.random_range(-0.06..0.06)),
            ry: r,
            rx: r * rng.random_range(0.8..1.0),
            angle: rng.random_range(0.0..PI),
        }
    }

    /// Squared normalized radius of the pixel center, scaled by `shrink`.
    fn radius2(&self, y: usize, x: usize, shrink: f64) -> f64 {
        let (s, c) = self.angle.sin_cos();
        let dy = y as f64 + 0.5 - self.cy;
        let dx = x as f64 + 0.5 - self.cx;
        let u = (c * dx + s * dy) / (self.rx * shrink);
        let v = (-s * dx + c * dy) / (self.ry * shrink);
        u * u + v * v
    }
}

fn jitter(rng: &mut ChaCha8Rng, rgb: [f64; 3], amount: f64) -> [f64; 3] {
    rgb.map(|c| (c + rng.random_range(-amount..amount)).clamp(0.0, 1.0))
}

pub fn synth_image(task: SynthTask, label: Label, size: usize, rng: &mut ChaCha8Rng) -> RgbImage {
    let cell = Ellipse::random(rng, size as f64);
    let mut pixels = Vec::with_capacity(size * size);
    match task {
        SynthTask::Stain => {
            let background = [0.93, 0.84, 0.87];
            let cytoplasm = [0.78, 0.74, 0.9];
            let (nucleus, shrink) = match label {
                Label::Healthy => ([0.42, 0.18, 0.5], rng.random_range(0.4..0.5)),
                Label::Lymphoblast => ([0.36, 0.28, 0.72], rng.random_range(0.75..0.85)),
            };
            for y in 0..size {
                for x in 0..size {
                    let base = if cell.radius2(y, x, shrink) <= 1.0 {
                        nucleus
                    } else if cell.radius2(y, x, 1.0) <= 1.0 {
                        cytoplasm
                    } else {
                        background
                    };
                    pixels.push(jitter(rng, base, 0.04));
                }
            }
        }
        SynthTask::Hue => {
            let (lo, hi) = match label {
                Label::Healthy => (200.0, 245.0),
                Label::Lymphoblast => (255.0, 300.0),
            };
            let hue: f64 = rng.random_range(lo..hi);
            let sat: f64 = rng.random_range(0.4..0.9);
            for y in 0..size {
                for x in 0..size {
                    let hsv = if cell.radius2(y, x, 1.0) <= 1.0 {
                        let h = (hue + rng.random_range(-4.0..4.0f64)).to_radians();
                        [
                            h,
                            (sat + rng.random_range(-0.05..0.05f64)).clamp(0.0, 1.0),
                            0.8,
                        ]
                    } else {
                        [0.0, 0.0, 0.8]
                    };
                    pixels.push(hsv_pixel_to_rgb(hsv));
                }
            }
        }
    }
    RgbImage::new(size, size, pixels).expect("synthetic pixels lie in [0, 1]")
}

/// `n` images with alternating labels, ids `Im001_0`, `Im002_1`, ...
pub fn synth_samples(
    task: SynthTask,
    n: usize,
    size: usize,
    seed: u64,
) -> Vec<LabeledSample<RgbImage>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 {
                Label::Healthy
            } else {
                Label::Lymphoblast
            };
            LabeledSample {
                image: synth_image(task, label, size, &mut rng),
                label,
                id: format!("Im{:03}_{}", i + 1, label.index()),
            }
        })
        .collect()
}

/// Writes `<id>.ppm` per sample, following the file-name label convention.
pub fn write_dataset(dir: &Path, samples: &[LabeledSample<RgbImage>]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    samples
        .iter()
        .map(|s| {
            let path = dir.join(format!("{}.ppm", s.id));
            write_ppm(&path, &s.image)?;
            Ok(path)
        })
        .collect()
}
