//! Random train/test partitions.

use qvcnn_core::encoding::Label;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Indices into the sample list, each side in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits `labels` so that about `test_fraction` of the samples land in the
/// test side. Stratified splitting rounds `test_fraction * n_c` separately
/// for each class `c`; otherwise the whole list is shuffled and
/// `test_fraction * n` samples are taken.
pub fn split(labels: &[Label], test_fraction: f64, seed: u64, stratify: bool) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Invalid(format!(
            "test fraction must lie in (0, 1), found {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let groups: Vec<Vec<usize>> = if stratify {
        [Label::Healthy, Label::Lymphoblast]
            .iter()
            .map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    let mut test = Vec::new();
    let mut train = Vec::new();
    for mut group in groups {
        group.shuffle(&mut rng);
        let k = (test_fraction * group.len() as f64).round() as usize;
        test.extend_from_slice(&group[..k]);
        train.extend_from_slice(&group[k..]);
    }
    if test.is_empty() || train.is_empty() {
        return Err(Error::Invalid(format!(
            "test fraction {test_fraction} leaves an empty {} side for {} samples",
            if test.is_empty() { "test" } else { "training" },
            labels.len()
        )));
    }
    test.sort_unstable();
    train.sort_unstable();
    Ok(Split { train, test })
}
