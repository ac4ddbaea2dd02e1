//! Fully connected layer with a fixed activation.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use super::{debug_assert_finite, init_uniform, logistic, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Logistic,
    Identity,
}

/// Dense layer: activation(x W + b), batched over rows of x.
#[derive(Clone, Debug)]
pub struct Dense<S> {
    pub w: Array2<S>,
    pub b: Array1<S>,
    pub act: Activation,
}

/// Parameter gradients from one backward pass.
#[derive(Clone, Debug)]
pub struct DenseGrads<S> {
    pub dw: Array2<S>,
    pub db: Array1<S>,
}

impl<S: Scalar> Dense<S> {
    pub fn new(rng: &mut impl Rng, n_in: usize, n_out: usize, act: Activation) -> Self {
        Dense {
            w: init_uniform(rng, n_in, n_out, n_in),
            b: Array1::zeros(n_out),
            act,
        }
    }

    pub fn n_in(&self) -> usize {
        self.w.nrows()
    }

    pub fn n_out(&self) -> usize {
        self.w.ncols()
    }

    /// Forward pass; the returned activations are also the backward
    /// cache.
    pub fn forward(&self, x: &Array2<S>) -> Array2<S> {
        assert_eq!(x.ncols(), self.n_in(), "dense input width");
        let mut z = x.dot(&self.w);
        z += &self.b;
        match self.act {
            Activation::Relu => z.mapv_inplace(|v| v.max(S::zero())),
            Activation::Logistic => z.mapv_inplace(logistic),
            Activation::Identity => {}
        }
        debug_assert_finite("dense forward", &z);
        z
    }

    /// Backward pass from d loss / d output.  `out` must be the
    /// forward result for this same `x`.
    pub fn backward(
        &self,
        x: &Array2<S>,
        out: &Array2<S>,
        dout: &Array2<S>,
    ) -> (DenseGrads<S>, Array2<S>) {
        let mut dz = dout.clone();
        match self.act {
            Activation::Relu => {
                ndarray::Zip::from(&mut dz).and(out).for_each(|d: &mut S, &o| {
                    if o <= S::zero() {
                        *d = S::zero();
                    }
                });
            }
            Activation::Logistic => {
                ndarray::Zip::from(&mut dz).and(out).for_each(|d: &mut S, &o| {
                    *d = *d * o * (S::one() - o);
                });
            }
            Activation::Identity => {}
        }
        let mut dw = Array2::zeros(self.w.raw_dim());
        general_mat_mul(S::one(), &x.t(), &dz, S::zero(), &mut dw);
        let db = dz.sum_axis(Axis(0));
        let mut dx = Array2::zeros(x.raw_dim());
        general_mat_mul(S::one(), &dz, &self.w.t(), S::zero(), &mut dx);
        debug_assert_finite("dense backward", &dx);
        (DenseGrads { dw, db }, dx)
    }
}
