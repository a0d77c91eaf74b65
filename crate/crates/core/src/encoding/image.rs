use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major `H × W` grid of three-component pixels.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Raster {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<[f64; 3]>,
}

impl Raster {
    fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::LengthMismatch {
                what: "image pixels",
                expected: height * width,
                found: pixels.len(),
            });
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    fn flip_horizontal(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for row in self.pixels.chunks(self.width) {
            pixels.extend(row.iter().rev());
        }
        Self { pixels, ..*self }
    }

    fn flip_vertical(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for row in self.pixels.chunks(self.width).rev() {
            pixels.extend_from_slice(row);
        }
        Self { pixels, ..*self }
    }
}

fn check_range(what: &'static str, v: f64, min: f64, max: f64, max_inclusive: bool) -> Result<()> {
    let ok = v >= min && if max_inclusive { v <= max } else { v < max };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: v,
            min,
            max,
        })
    }
}

/// RGB image with channels in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage(pub(crate) Raster);

impl RgbImage {
    pub fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        for p in &pixels {
            for &c in p {
                check_range("rgb channel", c, 0.0, 1.0, true)?;
            }
        }
        Raster::new(height, width, pixels).map(Self)
    }

    /// Interleaved 8-bit RGB, normalized by 255.
    pub fn from_rgb8(height: usize, width: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 3 * height * width {
            return Err(Error::LengthMismatch {
                what: "rgb8 bytes",
                expected: 3 * height * width,
                found: bytes.len(),
            });
        }
        let pixels = bytes
            .chunks_exact(3)
            .map(|p| {
                [
                    p[0] as f64 / 255.0,
                    p[1] as f64 / 255.0,
                    p[2] as f64 / 255.0,
                ]
            })
            .collect();
        Raster::new(height, width, pixels).map(Self)
    }

    /// Interleaved 8-bit RGB, rounded to nearest.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.0
            .pixels
            .iter()
            .flat_map(|p| p.map(|c| Float::round(c * 255.0) as u8))
            .collect()
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn pixel(&self, y: usize, x: usize) -> [f64; 3] {
        self.0.pixel(y, x)
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.0.pixels
    }
}

/// HSV image with hue in radians `[0, 2π)` and saturation, value in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HsvImage(pub(crate) Raster);

impl HsvImage {
    pub fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        for p in &pixels {
            check_range("hue", p[0], 0.0, core::f64::consts::TAU, false)?;
            check_range("saturation", p[1], 0.0, 1.0, true)?;
            check_range("value", p[2], 0.0, 1.0, true)?;
        }
        Raster::new(height, width, pixels).map(Self)
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    /// `[H, S, V]` at row `y`, column `x`.
    pub fn pixel(&self, y: usize, x: usize) -> [f64; 3] {
        self.0.pixel(y, x)
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.0.pixels
    }
}

/// Read access shared by RGB and HSV images.
pub trait PixelGrid {
    fn height(&self) -> usize;
    fn width(&self) -> usize;
    fn pixels(&self) -> &[[f64; 3]];
}

impl PixelGrid for RgbImage {
    fn height(&self) -> usize {
        self.0.height
    }
    fn width(&self) -> usize {
        self.0.width
    }
    fn pixels(&self) -> &[[f64; 3]] {
        &self.0.pixels
    }
}

impl PixelGrid for HsvImage {
    fn height(&self) -> usize {
        self.0.height
    }
    fn width(&self) -> usize {
        self.0.width
    }
    fn pixels(&self) -> &[[f64; 3]] {
        &self.0.pixels
    }
}

/// Mirror operations used for augmentation.
pub trait Flip: Sized {
    /// Mirror left-right.
    fn flip_horizontal(&self) -> Self;
    /// Mirror top-bottom.
    fn flip_vertical(&self) -> Self;
}

impl Flip for RgbImage {
    fn flip_horizontal(&self) -> Self {
        Self(self.0.flip_horizontal())
    }
    fn flip_vertical(&self) -> Self {
        Self(self.0.flip_vertical())
    }
}

impl Flip for HsvImage {
    fn flip_horizontal(&self) -> Self {
        Self(self.0.flip_horizontal())
    }
    fn flip_vertical(&self) -> Self {
        Self(self.0.flip_vertical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn range_checks() {
        assert!(RgbImage::new(1, 1, vec![[1.0, 0.0, 1.01]]).is_err());
        assert!(RgbImage::new(1, 2, vec![[1.0, 0.0, 1.0]]).is_err());
        assert!(HsvImage::new(1, 1, vec![[core::f64::consts::TAU, 0.5, 0.5]]).is_err());
        assert!(HsvImage::new(1, 1, vec![[3.0, 0.5, 0.5]]).is_ok());
    }

    #[test]
    fn rgb8_normalizes_by_255() {
        let img = RgbImage::from_rgb8(1, 1, &[255, 0, 51]).unwrap();
        assert_eq!(img.pixel(0, 0), [1.0, 0.0, 0.2]);
        assert_eq!(img.to_rgb8(), vec![255, 0, 51]);
    }

    #[test]
    fn flips_are_involutions() {
        let px: Vec<[f64; 3]> = (0..6).map(|i| [i as f64 / 6.0, 0.0, 0.0]).collect();
        let img = RgbImage::new(2, 3, px).unwrap();
        assert_eq!(img.flip_horizontal().pixel(0, 0), img.pixel(0, 2));
        assert_eq!(img.flip_vertical().pixel(0, 1), img.pixel(1, 1));
        assert_eq!(img.flip_horizontal().flip_horizontal(), img);
        assert_eq!(img.flip_vertical().flip_vertical(), img);
    }
}
