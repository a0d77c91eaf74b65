use alloc::string::String;
use core::fmt;

use super::image::Flip;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Healthy = 0,
    Lymphoblast = 1,
}

impl Label {
    pub fn from_index(v: i64) -> Result<Self, Error> {
        match v {
            0 => Ok(Label::Healthy),
            1 => Ok(Label::Lymphoblast),
            other => Err(Error::InvalidLabel(other)),
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn is_positive(self) -> bool {
        matches!(self, Label::Lymphoblast)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// An image with its binary label and the id of the source image it came
/// from. Augmented variants keep the source id.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample<I> {
    pub image: I,
    pub label: Label,
    pub id: String,
}

/// `[original, horizontal flip, vertical flip, both]`, all with the source
/// label and id.
pub fn augment_flips<I: Flip + Clone>(sample: &LabeledSample<I>) -> [LabeledSample<I>; 4] {
    let h = sample.image.flip_horizontal();
    let v = sample.image.flip_vertical();
    let hv = h.flip_vertical();
    [sample.image.clone(), h, v, hv].map(|image| LabeledSample {
        image,
        label: sample.label,
        id: sample.id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::RgbImage;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn four_variants_same_label() {
        let px: Vec<[f64; 3]> = (0..6).map(|i| [i as f64 / 5.0, 0.0, 0.0]).collect();
        let s = LabeledSample {
            image: RgbImage::new(2, 3, px).unwrap(),
            label: Label::Lymphoblast,
            id: "Im001".into(),
        };
        let out = augment_flips(&s);
        assert!(out
            .iter()
            .all(|o| o.label == Label::Lymphoblast && o.id == "Im001"));
        assert_eq!(out[0], s);
        assert_eq!(out[3].image.pixel(0, 0), s.image.pixel(1, 2));
        assert_ne!(out[1].image, out[2].image);
    }

    #[test]
    fn symmetric_image_gives_equal_variants() {
        let s = LabeledSample {
            image: RgbImage::new(2, 2, vec![[0.5, 0.1, 0.2]; 4]).unwrap(),
            label: Label::Healthy,
            id: "x".into(),
        };
        let out = augment_flips(&s);
        assert!(out.iter().all(|o| o.image == s.image));
    }

    #[test]
    fn labels_parse() {
        assert_eq!(Label::from_index(1).unwrap(), Label::Lymphoblast);
        assert_eq!(Label::from_index(2).unwrap_err(), Error::InvalidLabel(2));
    }
}
