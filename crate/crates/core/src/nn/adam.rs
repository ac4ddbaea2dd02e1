//! Adam optimizer over an ordered set of flat parameter tensors.

use super::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First/second-moment accumulators, one pair per registered tensor,
/// plus the shared step counter.
#[derive(Clone, Debug)]
pub struct AdamState<S> {
    pub hyper: AdamHyper,
    step: u64,
    m: Vec<Vec<S>>,
    v: Vec<Vec<S>>,
}

impl<S: Scalar> AdamState<S> {
    pub fn new(hyper: AdamHyper, sizes: &[usize]) -> Self {
        AdamState {
            hyper,
            step: 0,
            m: sizes.iter().map(|&n| vec![S::zero(); n]).collect(),
            v: sizes.iter().map(|&n| vec![S::zero(); n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update with bias correction.  `params` and `grads` must
    /// match the registered tensor count and sizes, in order.
    pub fn update(&mut self, params: &mut [&mut [S]], grads: &[&[S]]) {
        assert_eq!(params.len(), self.m.len(), "tensor count");
        assert_eq!(grads.len(), self.m.len(), "gradient count");
        self.step += 1;
        let b1 = S::from_f64(self.hyper.beta1);
        let b2 = S::from_f64(self.hyper.beta2);
        let lr = S::from_f64(self.hyper.lr);
        let eps = S::from_f64(self.hyper.eps);
        let bc1 = S::one() - S::from_f64(self.hyper.beta1.powi(self.step as i32));
        let bc2 = S::one() - S::from_f64(self.hyper.beta2.powi(self.step as i32));
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            assert_eq!(p.len(), self.m[k].len(), "tensor {k} size");
            assert_eq!(g.len(), self.m[k].len(), "gradient {k} size");
            let m = &mut self.m[k];
            let v = &mut self.v[k];
            for j in 0..p.len() {
                m[j] = b1 * m[j] + (S::one() - b1) * g[j];
                v[j] = b2 * v[j] + (S::one() - b2) * g[j] * g[j];
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                p[j] = p[j] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}
