use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Identity, SwapGradients, SwapModel, TinyFaceSample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig<T> {
    pub batch_size: usize,
    pub learning_rate: T,
    pub momentum: T,
    pub steps: usize,
    /// Seed for batch shuffling.
    pub seed: u64,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            batch_size: 64,
            learning_rate: T::lit(2.0),
            momentum: T::lit(0.9),
            steps: 500,
            seed: 0,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate >= T::zero() && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be non-negative".into()));
        }
        if !(self.momentum >= T::zero() && self.momentum < T::one()) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLosses<T> {
    pub loss_x: T,
    pub loss_y: T,
}

impl<T: Scalar> StepLosses<T> {
    pub fn combined(&self) -> T {
        self.loss_x + self.loss_y
    }
}

/// Mean squared error between a batch of faces and their reconstructions
/// through the decoder of `identity`.
pub fn reconstruction_loss<T: Scalar>(model: &SwapModel<T>, batch: &[&[T]], identity: Identity) -> Result<T> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("reconstruction batch"));
    }
    let mut total = T::zero();
    let mut count = 0usize;
    for &x in batch {
        let out = model.reconstruct(x, identity);
        total = total + out.iter().zip(x).map(|(&o, &t)| (o - t) * (o - t)).sum::<T>();
        count += x.len();
    }
    Ok(total / T::from_count(count))
}

/// Gradient descent with momentum over a [`SwapModel`].
#[derive(Debug, Clone)]
pub struct Trainer<T> {
    model: SwapModel<T>,
    velocity: SwapGradients<T>,
    cfg: TrainConfig<T>,
    step: usize,
}

impl<T: Scalar> Trainer<T> {
    pub fn new(model: SwapModel<T>, cfg: TrainConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let velocity = model.zero_gradients();
        Ok(Trainer {
            model,
            velocity,
            cfg,
            step: 0,
        })
    }

    pub fn model(&self) -> &SwapModel<T> {
        &self.model
    }

    pub fn into_model(self) -> SwapModel<T> {
        self.model
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    /// One update on `loss_x + loss_y`. The encoder receives both gradients,
    /// each decoder only its own. Returns the losses before the update.
    pub fn train_step(&mut self, batch_x: &[&[T]], batch_y: &[&[T]]) -> Result<StepLosses<T>> {
        if batch_x.is_empty() || batch_y.is_empty() {
            return Err(Error::EmptyInput("training batch"));
        }
        let (loss_x, grad_x) = self.model.loss_and_gradients(batch_x, Identity::X);
        let (loss_y, grad_y) = self.model.loss_and_gradients(batch_y, Identity::Y);
        if !(loss_x.is_finite() && loss_y.is_finite()) {
            return Err(Error::Diverged { step: self.step });
        }
        let grads = grad_x.add(&grad_y);
        let (lr, mu) = (self.cfg.learning_rate, self.cfg.momentum);
        for ((param, vel), grad) in self
            .model
            .tensors_mut()
            .into_iter()
            .zip(self.velocity.tensors_mut())
            .zip(grads.tensors())
        {
            for ((p, v), &g) in param.iter_mut().zip(vel.iter_mut()).zip(grad) {
                *v = mu * *v - lr * g;
                *p = *p + *v;
            }
        }
        self.step += 1;
        Ok(StepLosses { loss_x, loss_y })
    }
}

/// Cycles through shuffled epochs of one identity's samples.
struct BatchSampler<'a, T> {
    pool: Vec<&'a [T]>,
    order: Vec<usize>,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl<'a, T> BatchSampler<'a, T> {
    fn new(pool: Vec<&'a [T]>, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let order = (0..pool.len()).collect();
        let mut s = BatchSampler {
            pool,
            order,
            cursor: 0,
            rng,
        };
        s.order.shuffle(&mut s.rng);
        s
    }

    fn next_batch(&mut self, size: usize) -> Vec<&'a [T]> {
        let size = size.min(self.pool.len());
        if self.cursor + size > self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let batch = self.order[self.cursor..self.cursor + size]
            .iter()
            .map(|&i| self.pool[i])
            .collect();
        self.cursor += size;
        batch
    }
}

/// Runs `cfg.steps` updates over seeded shuffled batches of each identity
/// and returns the per-step losses. `model` is updated in place.
pub fn train<T: Scalar>(
    model: &mut SwapModel<T>,
    dataset: &[TinyFaceSample<T>],
    cfg: &TrainConfig<T>,
) -> Result<Vec<StepLosses<T>>> {
    cfg.validate()?;
    let pool = |id: Identity| -> Vec<&[T]> {
        dataset
            .iter()
            .filter(|s| s.identity == id)
            .map(|s| s.pixels.as_slice())
            .collect()
    };
    let (xs, ys) = (pool(Identity::X), pool(Identity::Y));
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidArgument(
            "training data must contain both identities".into(),
        ));
    }
    if cfg.steps == 0 {
        return Ok(Vec::new());
    }
    let mut sampler_x = BatchSampler::new(xs, cfg.seed, 0);
    let mut sampler_y = BatchSampler::new(ys, cfg.seed, 1);
    let mut trainer = Trainer::new(model.clone(), cfg.clone())?;
    let mut history = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        let bx = sampler_x.next_batch(cfg.batch_size);
        let by = sampler_y.next_batch(cfg.batch_size);
        history.push(trainer.train_step(&bx, &by)?);
    }
    *model = trainer.into_model();
    Ok(history)
}

/// Encodes a face of X and renders it with Y's decoder.
pub fn swap<T: Scalar>(model: &SwapModel<T>, face_of_x: &[T]) -> Vec<T> {
    model.decode(&model.encode(face_of_x), Identity::Y)
}
