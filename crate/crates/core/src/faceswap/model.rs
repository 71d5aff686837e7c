use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::synth::FaceParams;

pub const IMAGE_SIDE: usize = 16;
pub const PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;
pub const HIDDEN: usize = 64;
pub const LATENT: usize = 16;
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Identity {
    X,
    Y,
}

impl Identity {
    pub fn other(self) -> Self {
        match self {
            Identity::X => Identity::Y,
            Identity::Y => Identity::X,
        }
    }
}

/// One 16×16 grayscale face with pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyFaceSample<T> {
    pub pixels: Vec<T>,
    pub identity: Identity,
    /// Generator parameters the face was rendered from.
    pub params: FaceParams,
}

/// Fully connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            bias: vec![T::zero(); outputs],
        }
    }

    /// Uniform weights in `[-a, a]`, `a = sqrt(6 / (fan_in + fan_out))`; zero bias.
    fn glorot(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| T::lit(rng.random_range(-a..=a)))
            .collect();
        Dense {
            inputs,
            outputs,
            weights,
            bias: vec![T::zero(); outputs],
        }
    }

    pub fn init_bound(&self) -> f64 {
        (6.0 / (self.inputs + self.outputs) as f64).sqrt()
    }

    pub(crate) fn forward(&self, x: &[T], out: &mut [T]) {
        for (o, (row, &b)) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.inputs).zip(&self.bias))
        {
            *o = row.iter().zip(x).fold(b, |acc, (&w, &v)| acc + w * v);
        }
    }

    /// Accumulates `∂L/∂W += g xᵀ`, `∂L/∂b += g` into `grad` and writes `Wᵀ g` into `back`.
    pub(crate) fn backward(&self, x: &[T], g: &[T], grad: &mut Dense<T>, back: Option<&mut [T]>) {
        for ((grow, gb), &gi) in grad
            .weights
            .chunks_exact_mut(self.inputs)
            .zip(grad.bias.iter_mut())
            .zip(g)
        {
            *gb = *gb + gi;
            if gi != T::zero() {
                for (gw, &xv) in grow.iter_mut().zip(x) {
                    *gw = *gw + gi * xv;
                }
            }
        }
        if let Some(back) = back {
            back.fill(T::zero());
            for (row, &gi) in self.weights.chunks_exact(self.inputs).zip(g) {
                if gi != T::zero() {
                    for (b, &w) in back.iter_mut().zip(row) {
                        *b = *b + w * gi;
                    }
                }
            }
        }
    }
}

/// Two dense layers with a leaky-ReLU between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack<T> {
    pub hidden: Dense<T>,
    pub output: Dense<T>,
}

impl<T: Scalar> Stack<T> {
    fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Self {
        Stack {
            hidden: Dense::zeros(inputs, hidden),
            output: Dense::zeros(hidden, outputs),
        }
    }

    fn zeros_like(&self) -> Self {
        Stack {
            hidden: Dense::zeros(self.hidden.inputs, self.hidden.outputs),
            output: Dense::zeros(self.output.inputs, self.output.outputs),
        }
    }

    pub fn tensors(&self) -> [&Vec<T>; 4] {
        [
            &self.hidden.weights,
            &self.hidden.bias,
            &self.output.weights,
            &self.output.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<T>; 4] {
        [
            &mut self.hidden.weights,
            &mut self.hidden.bias,
            &mut self.output.weights,
            &mut self.output.bias,
        ]
    }

    /// Hidden pre-activation, hidden activation and output pre-activation.
    pub(crate) fn forward(&self, x: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let mut pre = vec![T::zero(); self.hidden.outputs];
        self.hidden.forward(x, &mut pre);
        let act: Vec<T> = pre.iter().map(|&z| leaky(z)).collect();
        let mut out = vec![T::zero(); self.output.outputs];
        self.output.forward(&act, &mut out);
        (pre, act, out)
    }
}

pub(crate) fn leaky<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        z
    } else {
        T::lit(LEAKY_SLOPE) * z
    }
}

pub(crate) fn leaky_slope<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        T::one()
    } else {
        T::lit(LEAKY_SLOPE)
    }
}

pub(crate) fn logistic<T: Scalar>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

/// Shared encoder `256 → 64 → 16` and decoders `16 → 64 → 256` for X and Y.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapModel<T> {
    pub encoder: Stack<T>,
    pub decoder_x: Stack<T>,
    pub decoder_y: Stack<T>,
    /// Seed the parameters were initialised from.
    pub seed: u64,
}

/// Gradient (or optimiser state) with the same layout as [`SwapModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct SwapGradients<T> {
    pub encoder: Stack<T>,
    pub decoder_x: Stack<T>,
    pub decoder_y: Stack<T>,
}

pub(crate) const TENSOR_NAMES: [&str; 12] = [
    "encoder.hidden.weights",
    "encoder.hidden.bias",
    "encoder.output.weights",
    "encoder.output.bias",
    "decoder_x.hidden.weights",
    "decoder_x.hidden.bias",
    "decoder_x.output.weights",
    "decoder_x.output.bias",
    "decoder_y.hidden.weights",
    "decoder_y.hidden.bias",
    "decoder_y.output.weights",
    "decoder_y.output.bias",
];

impl<T: Scalar> SwapModel<T> {
    /// Glorot-uniform weights and zero biases, deterministic in `seed`.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let encoder = Stack {
            hidden: Dense::glorot(PIXELS, HIDDEN, &mut rng),
            output: Dense::glorot(HIDDEN, LATENT, &mut rng),
        };
        let mut decoder = || Stack {
            hidden: Dense::glorot(LATENT, HIDDEN, &mut rng),
            output: Dense::glorot(HIDDEN, PIXELS, &mut rng),
        };
        let decoder_x = decoder();
        let decoder_y = decoder();
        SwapModel {
            encoder,
            decoder_x,
            decoder_y,
            seed,
        }
    }

    /// Model with every parameter zero.
    pub fn zeros(seed: u64) -> Self {
        SwapModel {
            encoder: Stack::zeros(PIXELS, HIDDEN, LATENT),
            decoder_x: Stack::zeros(LATENT, HIDDEN, PIXELS),
            decoder_y: Stack::zeros(LATENT, HIDDEN, PIXELS),
            seed,
        }
    }

    pub fn decoder(&self, identity: Identity) -> &Stack<T> {
        match identity {
            Identity::X => &self.decoder_x,
            Identity::Y => &self.decoder_y,
        }
    }

    pub fn encode(&self, pixels: &[T]) -> Vec<T> {
        assert_eq!(pixels.len(), PIXELS, "encoder expects {PIXELS} pixels");
        self.encoder.forward(pixels).2
    }

    /// Reconstructs a face from a latent code; outputs lie in `(0, 1)`.
    pub fn decode(&self, latent: &[T], identity: Identity) -> Vec<T> {
        assert_eq!(latent.len(), LATENT, "decoder expects {LATENT} latent values");
        self.decoder(identity)
            .forward(latent)
            .2
            .into_iter()
            .map(logistic)
            .collect()
    }

    pub fn reconstruct(&self, pixels: &[T], identity: Identity) -> Vec<T> {
        self.decode(&self.encode(pixels), identity)
    }

    pub fn tensors(&self) -> Vec<&Vec<T>> {
        let mut out = Vec::with_capacity(12);
        out.extend(self.encoder.tensors());
        out.extend(self.decoder_x.tensors());
        out.extend(self.decoder_y.tensors());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<T>> {
        let mut out = Vec::with_capacity(12);
        out.extend(self.encoder.tensors_mut());
        out.extend(self.decoder_x.tensors_mut());
        out.extend(self.decoder_y.tensors_mut());
        out
    }

    pub fn tensor_shapes(&self) -> Vec<Vec<usize>> {
        [&self.encoder, &self.decoder_x, &self.decoder_y]
            .iter()
            .flat_map(|s| {
                [
                    vec![s.hidden.outputs, s.hidden.inputs],
                    vec![s.hidden.outputs],
                    vec![s.output.outputs, s.output.inputs],
                    vec![s.output.outputs],
                ]
            })
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn zero_gradients(&self) -> SwapGradients<T> {
        SwapGradients {
            encoder: self.encoder.zeros_like(),
            decoder_x: self.decoder_x.zeros_like(),
            decoder_y: self.decoder_y.zeros_like(),
        }
    }

    /// Mean squared reconstruction error over the batch and its gradient.
    pub fn loss_and_gradients(&self, batch: &[&[T]], identity: Identity) -> (T, SwapGradients<T>) {
        let mut grads = self.zero_gradients();
        let scale = T::lit(2.0) / T::from_count(batch.len() * PIXELS);
        let mut total = T::zero();
        let decoder = self.decoder(identity);
        let mut g_latent = vec![T::zero(); LATENT];
        let mut g_dec_hidden = vec![T::zero(); HIDDEN];
        let mut g_enc_hidden = vec![T::zero(); HIDDEN];
        let mut g_out = vec![T::zero(); PIXELS];
        for &x in batch {
            let (enc_pre, enc_act, latent) = self.encoder.forward(x);
            let (dec_pre, dec_act, logits) = decoder.forward(&latent);
            for ((g, &z), &target) in g_out.iter_mut().zip(&logits).zip(x) {
                let o = logistic(z);
                let diff = o - target;
                total = total + diff * diff;
                *g = scale * diff * o * (T::one() - o);
            }
            let dec_grads = match identity {
                Identity::X => &mut grads.decoder_x,
                Identity::Y => &mut grads.decoder_y,
            };
            decoder
                .output
                .backward(&dec_act, &g_out, &mut dec_grads.output, Some(&mut g_dec_hidden));
            for (g, &z) in g_dec_hidden.iter_mut().zip(&dec_pre) {
                *g = *g * leaky_slope(z);
            }
            decoder
                .hidden
                .backward(&latent, &g_dec_hidden, &mut dec_grads.hidden, Some(&mut g_latent));
            self.encoder
                .output
                .backward(&enc_act, &g_latent, &mut grads.encoder.output, Some(&mut g_enc_hidden));
            for (g, &z) in g_enc_hidden.iter_mut().zip(&enc_pre) {
                *g = *g * leaky_slope(z);
            }
            self.encoder
                .hidden
                .backward(x, &g_enc_hidden, &mut grads.encoder.hidden, None);
        }
        (total / T::from_count(batch.len() * PIXELS), grads)
    }
}

impl<T: Scalar> SwapGradients<T> {
    pub fn tensors(&self) -> Vec<&Vec<T>> {
        let mut out = Vec::with_capacity(12);
        out.extend(self.encoder.tensors());
        out.extend(self.decoder_x.tensors());
        out.extend(self.decoder_y.tensors());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<T>> {
        let mut out = Vec::with_capacity(12);
        out.extend(self.encoder.tensors_mut());
        out.extend(self.decoder_x.tensors_mut());
        out.extend(self.decoder_y.tensors_mut());
        out
    }

    /// Elementwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x = *x + y;
            }
        }
        out
    }
}
