use sha2::{Digest, Sha256};

/// Seed of one run, from a SHA-256 of the `(base, config, fraction, run)`
/// key. Each key maps to its own seed regardless of which other keys the
/// plan contains.
pub fn derive_seed(base: u64, config: &str, test_fraction: f64, run: usize) -> u64 {
    let digest =
        Sha256::digest(format!("qvcnn-run|{base}|{config}|{test_fraction}|{run}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn lattice_is_injective_on_a_grid() {
        let mut seen = HashSet::new();
        for config in ["rvcnn-rgb", "rvcnn-hsv", "qvcnn-rgb", "qvcnn-hsv"] {
            for f in [0.1, 0.2, 0.3, 0.4, 0.5] {
                for run in 0..100 {
                    assert!(seen.insert(derive_seed(0, config, f, run)));
                }
            }
        }
        assert_ne!(
            derive_seed(0, "qvcnn-hsv", 0.1, 0),
            derive_seed(1, "qvcnn-hsv", 0.1, 0)
        );
    }
}
