//! LSTM layer: batched single step, full-sequence forward, and exact
//! backpropagation through time over the whole unroll.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2};
use rand::Rng;

use super::{debug_assert_finite, init_uniform, logistic, Scalar};

/// LSTM parameters.  Gate blocks are packed along the columns of the
/// weight matrices in the order [i | f | g | o], each n_h wide.
#[derive(Clone, Debug)]
pub struct Lstm<S> {
    pub w_x: Array2<S>,
    pub w_h: Array2<S>,
    pub b: Array1<S>,
}

/// Recurrent state, one row per batch element.
#[derive(Clone, Debug)]
pub struct LstmState<S> {
    pub h: Array2<S>,
    pub c: Array2<S>,
}

/// Parameter gradients accumulated over a sequence.
#[derive(Clone, Debug)]
pub struct LstmGrads<S> {
    pub dw_x: Array2<S>,
    pub dw_h: Array2<S>,
    pub db: Array1<S>,
}

struct StepCache<S> {
    c_prev: Array2<S>,
    gates: Array2<S>,
    tanh_c: Array2<S>,
}

/// Per-step activations kept for the backward pass.
pub struct LstmCache<S> {
    steps: Vec<StepCache<S>>,
}

impl<S: Scalar> LstmState<S> {
    pub fn zeros(batch: usize, n_h: usize) -> Self {
        LstmState { h: Array2::zeros((batch, n_h)), c: Array2::zeros((batch, n_h)) }
    }
}

impl<S: Scalar> Lstm<S> {
    /// Fresh layer: uniform(-1/sqrt(fan_in)) weights, zero biases
    /// except the forget gate block at 1.
    pub fn new(rng: &mut impl Rng, n_in: usize, n_h: usize) -> Self {
        let w_x = init_uniform(rng, n_in, 4 * n_h, n_in);
        let w_h = init_uniform(rng, n_h, 4 * n_h, n_h);
        let mut b = Array1::zeros(4 * n_h);
        b.slice_mut(s![n_h..2 * n_h]).fill(S::one());
        Lstm { w_x, w_h, b }
    }

    pub fn n_in(&self) -> usize {
        self.w_x.nrows()
    }

    pub fn n_h(&self) -> usize {
        self.w_h.nrows()
    }

    /// Affine gate block followed by per-gate activations.
    fn gates(&self, x: &Array2<S>, h: &Array2<S>) -> Array2<S> {
        assert_eq!(x.ncols(), self.n_in(), "lstm input width");
        let nh = self.n_h();
        let mut z = x.dot(&self.w_x);
        general_mat_mul(S::one(), h, &self.w_h, S::one(), &mut z);
        z += &self.b;
        z.slice_mut(s![.., 0..2 * nh]).mapv_inplace(logistic);
        z.slice_mut(s![.., 2 * nh..3 * nh]).mapv_inplace(|v| v.tanh());
        z.slice_mut(s![.., 3 * nh..4 * nh]).mapv_inplace(logistic);
        z
    }

    /// One step: c' = f*c + i*g, h' = o*tanh(c'), updated in place.
    pub fn step(&self, x: &Array2<S>, state: &mut LstmState<S>) {
        let gates = self.gates(x, &state.h);
        let nh = self.n_h();
        let i = gates.slice(s![.., 0..nh]);
        let f = gates.slice(s![.., nh..2 * nh]);
        let g = gates.slice(s![.., 2 * nh..3 * nh]);
        let o = gates.slice(s![.., 3 * nh..4 * nh]);
        ndarray::Zip::from(&mut state.c).and(&i).and(&f).and(&g).for_each(
            |c: &mut S, &i, &f, &g| {
                *c = f * *c + i * g;
            },
        );
        ndarray::Zip::from(&mut state.h).and(&o).and(&state.c).for_each(|h: &mut S, &o, &c| {
            *h = o * c.tanh();
        });
        debug_assert_finite("lstm step", &state.h);
    }

    /// Forward over a whole sequence from zero state.  Returns every
    /// h_t plus the cache for backward_seq.
    pub fn forward_seq(&self, xs: &[Array2<S>]) -> (Vec<Array2<S>>, LstmCache<S>) {
        let nh = self.n_h();
        let batch = xs.first().map_or(0, |x| x.nrows());
        let mut state = LstmState::zeros(batch, nh);
        let mut hs = Vec::with_capacity(xs.len());
        let mut steps = Vec::with_capacity(xs.len());
        for x in xs {
            let gates = self.gates(x, &state.h);
            let c_prev = state.c.clone();
            let i = gates.slice(s![.., 0..nh]);
            let f = gates.slice(s![.., nh..2 * nh]);
            let g = gates.slice(s![.., 2 * nh..3 * nh]);
            let o = gates.slice(s![.., 3 * nh..4 * nh]);
            ndarray::Zip::from(&mut state.c).and(&i).and(&f).and(&g).for_each(
                |c: &mut S, &i, &f, &g| {
                    *c = f * *c + i * g;
                },
            );
            let tanh_c = state.c.mapv(|v| v.tanh());
            ndarray::Zip::from(&mut state.h).and(&o).and(&tanh_c).for_each(
                |h: &mut S, &o, &tc| {
                    *h = o * tc;
                },
            );
            hs.push(state.h.clone());
            steps.push(StepCache { c_prev, gates, tanh_c });
        }
        (hs, LstmCache { steps })
    }

    /// Exact BPTT over the full unroll.  `dhs[t]` is the external
    /// gradient flowing into h_t; returns parameter gradients and the
    /// per-step input gradients.
    pub fn backward_seq(
        &self,
        xs: &[Array2<S>],
        hs: &[Array2<S>],
        cache: &LstmCache<S>,
        dhs: &[Array2<S>],
    ) -> (LstmGrads<S>, Vec<Array2<S>>) {
        let t_len = xs.len();
        assert_eq!(hs.len(), t_len);
        assert_eq!(dhs.len(), t_len);
        let nh = self.n_h();
        let batch = xs.first().map_or(0, |x| x.nrows());
        let mut grads = LstmGrads {
            dw_x: Array2::zeros(self.w_x.raw_dim()),
            dw_h: Array2::zeros(self.w_h.raw_dim()),
            db: Array1::zeros(self.b.len()),
        };
        let mut dxs: Vec<Array2<S>> =
            xs.iter().map(|x| Array2::zeros(x.raw_dim())).collect();
        let mut dh_rec = Array2::zeros((batch, nh));
        let mut dc = Array2::zeros((batch, nh));
        for t in (0..t_len).rev() {
            let st = &cache.steps[t];
            let i = st.gates.slice(s![.., 0..nh]);
            let f = st.gates.slice(s![.., nh..2 * nh]);
            let g = st.gates.slice(s![.., 2 * nh..3 * nh]);
            let o = st.gates.slice(s![.., 3 * nh..4 * nh]);
            let mut dh = dhs[t].clone();
            dh += &dh_rec;
            ndarray::Zip::from(&mut dc).and(&dh).and(&o).and(&st.tanh_c).for_each(
                |dc: &mut S, &dh, &o, &tc| {
                    *dc = *dc + dh * o * (S::one() - tc * tc);
                },
            );
            let mut dz = Array2::zeros((batch, 4 * nh));
            {
                let (mut dzi, mut dzf, mut dzg, mut dzo) = dz.multi_slice_mut((
                    s![.., 0..nh],
                    s![.., nh..2 * nh],
                    s![.., 2 * nh..3 * nh],
                    s![.., 3 * nh..4 * nh],
                ));
                ndarray::Zip::from(&mut dzi).and(&dc).and(&g).and(&i).for_each(
                    |d: &mut S, &dc, &g, &i| *d = dc * g * i * (S::one() - i),
                );
                ndarray::Zip::from(&mut dzf).and(&dc).and(&st.c_prev).and(&f).for_each(
                    |d: &mut S, &dc, &cp, &f| *d = dc * cp * f * (S::one() - f),
                );
                ndarray::Zip::from(&mut dzg).and(&dc).and(&i).and(&g).for_each(
                    |d: &mut S, &dc, &i, &g| *d = dc * i * (S::one() - g * g),
                );
                ndarray::Zip::from(&mut dzo).and(&dh).and(&st.tanh_c).and(&o).for_each(
                    |d: &mut S, &dh, &tc, &o| *d = dh * tc * o * (S::one() - o),
                );
            }
            general_mat_mul(S::one(), &xs[t].t(), &dz, S::one(), &mut grads.dw_x);
            if t > 0 {
                general_mat_mul(S::one(), &hs[t - 1].t(), &dz, S::one(), &mut grads.dw_h);
                general_mat_mul(S::one(), &dz, &self.w_h.t(), S::zero(), &mut dh_rec);
            }
            grads.db += &dz.sum_axis(ndarray::Axis(0));
            general_mat_mul(S::one(), &dz, &self.w_x.t(), S::zero(), &mut dxs[t]);
            ndarray::Zip::from(&mut dc).and(&f).for_each(|dc: &mut S, &f| *dc = *dc * f);
        }
        debug_assert_finite("lstm backward", &grads.dw_x);
        (grads, dxs)
    }
}
