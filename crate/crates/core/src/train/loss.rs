use crate::encoding::Label;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossValue<T> {
    pub loss: T,
    /// `∂loss/∂logit`.
    pub grad: T,
}

/// Binary cross-entropy on a raw logit, `softplus(x) − y·x`, evaluated as
/// `max(x, 0) − y·x + ln(1 + e^{−|x|})`. The gradient is `σ(x) − y`.
pub fn bce_with_logits<T: Scalar>(logit: T, label: Label) -> LossValue<T> {
    let y = if label.is_positive() {
        T::one()
    } else {
        T::zero()
    };
    let x = logit;
    let loss = x.max(T::zero()) - y * x + (-x.abs()).exp().ln_1p();
    let sigmoid = if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    };
    LossValue {
        loss,
        grad: sigmoid - y,
    }
}
