//! Minimal neural-network substrate: dense and LSTM layers, binary
//! cross-entropy with an L2 penalty on declared weights, inverted
//! dropout, and Adam, all with exact analytic gradients.
//!
//! Everything is generic over the scalar: f64 for gradient checks and
//! reference runs, f32 for the fast training path.  Matrix products go
//! through ndarray, which dispatches f32/f64 to its blocked matmul
//! kernels.  There is no autodiff; each layer carries its own backward
//! pass, checked against central finite differences.
//!
//! Parameters serialize to a versioned flat container of named tensors.
//! Serialization uses shortest-round-trip decimal floats, so a save and
//! reload reproduces every bit.

mod adam;
mod dense;
mod lstm;

pub use adam::{AdamHyper, AdamState};
pub use dense::{Activation, Dense, DenseGrads};
pub use lstm::{Lstm, LstmGrads, LstmState};

use ndarray::{ArrayBase, Data, Dimension};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar abstraction over f32/f64.
pub trait Scalar:
    ndarray::LinalgScalar
    + num_traits::Float
    + std::ops::AddAssign
    + std::fmt::Debug
    + std::fmt::Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    const PRECISION: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    const PRECISION: &'static str = "f32";

    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const PRECISION: &'static str = "f64";

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// Cross-entropy clamp: probabilities this close to 0 or 1 saturate.
pub const PROB_CLAMP: f64 = 1e-7;

/// Debug-mode guard: no forward or backward pass may produce NaN/Inf.
pub(crate) fn debug_assert_finite<S, D, R>(tag: &str, a: &ArrayBase<R, D>)
where
    S: Scalar,
    D: Dimension,
    R: Data<Elem = S>,
{
    if cfg!(debug_assertions) {
        for &v in a.iter() {
            assert!(v.is_finite(), "non-finite value in {tag}");
        }
    }
}

/// Numerically stable logistic function.
pub fn logistic<S: Scalar>(x: S) -> S {
    if x >= S::zero() {
        S::one() / (S::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (S::one() + e)
    }
}

pub fn clamp_prob<S: Scalar>(p: S) -> S {
    let lo = S::from_f64(PROB_CLAMP);
    p.max(lo).min(S::one() - lo)
}

/// Binary cross-entropy of a clamped probability against a bit label.
pub fn cross_entropy<S: Scalar>(p: S, label: u8) -> S {
    let p = clamp_prob(p);
    if label == 0 {
        -(S::one() - p).ln()
    } else {
        -p.ln()
    }
}

/// d cross_entropy / d p, with the same clamp as the forward value.
pub fn cross_entropy_grad<S: Scalar>(p: S, label: u8) -> S {
    let p = clamp_prob(p);
    let y = S::from_f64(label as f64);
    (p - y) / (p * (S::one() - p))
}

/// Full training loss for one prediction: cross-entropy plus
/// decay * sum of squares over the declared weight matrices.
pub fn loss<S: Scalar>(p: S, label: u8, decayed: &[&ndarray::Array2<S>], decay: S) -> S {
    cross_entropy(p, label) + decay * sum_squares(decayed)
}

pub fn sum_squares<S: Scalar>(weights: &[&ndarray::Array2<S>]) -> S {
    let mut acc = S::zero();
    for w in weights {
        for &v in w.iter() {
            acc = acc + v * v;
        }
    }
    acc
}

/// Inverted dropout mask: each entry is 0 with probability
/// 1 - keep_prob, else 1/keep_prob, so the expectation is identity.
/// Inference skips the mask entirely.
pub fn dropout_mask<S: Scalar>(
    rng: &mut impl Rng,
    shape: (usize, usize),
    keep_prob: f64,
) -> ndarray::Array2<S> {
    debug_assert!(keep_prob > 0.0 && keep_prob <= 1.0);
    let inv = S::from_f64(1.0 / keep_prob);
    ndarray::Array2::from_shape_fn(shape, |_| {
        if rng.random::<f64>() < keep_prob {
            inv
        } else {
            S::zero()
        }
    })
}

/// Uniform(-k, k) with k = 1/sqrt(fan_in); biases start at zero except
/// where a layer overrides them.
pub fn init_uniform<S: Scalar>(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
    fan_in: usize,
) -> ndarray::Array2<S> {
    let k = 1.0 / (fan_in as f64).sqrt();
    ndarray::Array2::from_shape_fn((rows, cols), |_| S::from_f64(rng.random_range(-k..k)))
}

/// One named tensor in the flat parameter container.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorRecord<S> {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<S>,
}

/// Versioned flat parameter container; the on-disk model format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamFile<S> {
    pub format_version: u32,
    pub precision: String,
    pub tensors: Vec<TensorRecord<S>>,
}

pub const PARAM_FORMAT_VERSION: u32 = 1;

impl<S: Scalar> ParamFile<S> {
    pub fn new() -> Self {
        ParamFile {
            format_version: PARAM_FORMAT_VERSION,
            precision: S::PRECISION.to_string(),
            tensors: vec![],
        }
    }

    pub fn push2(&mut self, name: &str, a: &ndarray::Array2<S>) {
        self.tensors.push(TensorRecord {
            name: name.to_string(),
            shape: a.shape().to_vec(),
            values: a.iter().copied().collect(),
        });
    }

    pub fn push1(&mut self, name: &str, a: &ndarray::Array1<S>) {
        self.tensors.push(TensorRecord {
            name: name.to_string(),
            shape: a.shape().to_vec(),
            values: a.to_vec(),
        });
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != PARAM_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: self.format_version,
                expected: PARAM_FORMAT_VERSION,
            });
        }
        if self.precision != S::PRECISION {
            return Err(Error::Shape(format!(
                "parameter file is {} but {} was requested",
                self.precision,
                S::PRECISION
            )));
        }
        for t in &self.tensors {
            if t.shape.iter().product::<usize>() != t.values.len() {
                return Err(Error::Shape(format!(
                    "tensor {} has {} values for shape {:?}",
                    t.name,
                    t.values.len(),
                    t.shape
                )));
            }
        }
        Ok(())
    }

    fn find(&self, name: &str) -> Result<&TensorRecord<S>> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::Shape(format!("missing tensor {name}")))
    }

    pub fn take2(&self, name: &str) -> Result<ndarray::Array2<S>> {
        let t = self.find(name)?;
        if t.shape.len() != 2 {
            return Err(Error::Shape(format!("tensor {name} is not rank 2")));
        }
        ndarray::Array2::from_shape_vec((t.shape[0], t.shape[1]), t.values.clone())
            .map_err(|e| Error::Shape(format!("tensor {name}: {e}")))
    }

    pub fn take1(&self, name: &str) -> Result<ndarray::Array1<S>> {
        let t = self.find(name)?;
        if t.shape.len() != 1 {
            return Err(Error::Shape(format!("tensor {name} is not rank 1")));
        }
        Ok(ndarray::Array1::from_vec(t.values.clone()))
    }
}

impl<S: Scalar> Default for ParamFile<S> {
    fn default() -> Self {
        Self::new()
    }
}
