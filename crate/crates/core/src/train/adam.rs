use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layers::Model;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
        }
    }
}

/// First and second moment estimates, one buffer per parameter buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    /// Number of updates applied so far.
    pub t: u64,
    pub m: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(config: AdamConfig, buffer_lens: impl IntoIterator<Item = usize>) -> Self {
        let (m, v) = buffer_lens
            .into_iter()
            .map(|n| (vec![T::zero(); n], vec![T::zero(); n]))
            .unzip();
        Self { config, t: 0, m, v }
    }

    pub fn for_model(config: AdamConfig, model: &Model<T>) -> Self {
        Self::new(config, model.parameters().iter().map(|p| p.len()))
    }

    /// One bias-corrected Adam update:
    /// `θ ← θ − lr · m̂ / (√v̂ + ε)`.
    pub fn step(&mut self, params: Vec<&mut [T]>, grads: Vec<&[T]>) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                what: "adam parameter buffers",
                expected: self.m.len(),
                found: params.len().min(grads.len()),
            });
        }
        for (i, (p, g)) in params.iter().zip(&grads).enumerate() {
            if p.len() != self.m[i].len() || g.len() != self.m[i].len() {
                return Err(Error::LengthMismatch {
                    what: "adam parameter buffer",
                    expected: self.m[i].len(),
                    found: if p.len() != self.m[i].len() {
                        p.len()
                    } else {
                        g.len()
                    },
                });
            }
        }
        self.t += 1;
        let c = self.config;
        let t = self.t as i32;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one_m_b1 = T::of(1.0 - c.beta1);
        let one_m_b2 = T::of(1.0 - c.beta2);
        let corr1 = T::of(1.0 - num_traits::Float::powi(c.beta1, t));
        let corr2 = T::of(1.0 - num_traits::Float::powi(c.beta2, t));
        let lr = T::of(c.lr);
        let eps = T::of(c.epsilon);
        for ((p, g), (m, v)) in params
            .into_iter()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + one_m_b1 * gi;
                v[i] = b2 * v[i] + one_m_b2 * gi * gi;
                let m_hat = m[i] / corr1;
                let v_hat = v[i] / corr2;
                p[i] = p[i] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

/// Applies one Adam update of `grads` to the parameters of `model`.
pub fn adam_step<T: Scalar>(
    model: &mut Model<T>,
    grads: &Model<T>,
    state: &mut AdamState<T>,
) -> Result<()> {
    state.step(model.parameters_mut(), grads.parameters())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![0.5f64, -1.0];
        let mut s = AdamState::new(AdamConfig::default(), [2]);
        s.step(vec![&mut p[..]], vec![&[0.0, 0.0][..]]).unwrap();
        assert_eq!(p, vec![0.5, -1.0]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let g = [3.0f64, -0.02, 1e3];
        let mut p = [0.0; 3];
        let mut s = AdamState::new(AdamConfig::default(), [3]);
        s.step(vec![&mut p[..]], vec![&g[..]]).unwrap();
        for (pi, gi) in p.iter().zip(g) {
            // m̂ = g, v̂ = g², so the step is lr·g/(|g| + ε).
            let expected = -1e-3 * gi / (gi.abs() + 1e-7);
            assert!((pi - expected).abs() < 1e-15, "{pi} vs {expected}");
        }
    }

    #[test]
    fn mismatched_buffers_rejected() {
        let mut p = [0.0f32; 3];
        let mut s = AdamState::new(AdamConfig::default(), [2]);
        assert!(s
            .step(vec![&mut p[..]], vec![&[1.0, 1.0, 1.0][..]])
            .is_err());
        assert_eq!(s.t, 0);
    }
}
