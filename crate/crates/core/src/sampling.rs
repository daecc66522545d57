//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), a
//! counter-based generator whose output is fixed by its 64-bit seed and
//! 64-bit stream id on every platform. Gaussians use the Box–Muller
//! transform on that stream, so results do not depend on `rand_distr`
//! internals or on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` of generator `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Box–Muller normal sampler; keeps the second variate of each pair.
#[derive(Debug, Default)]
pub struct Gaussian {
    spare: Option<f64>,
}

impl Gaussian {
    pub fn sample<R: Rng>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping the log finite
        let u1 = 1.0 - rng.gen::<f64>();
        let u2 = rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Uniform point in the closed ball of radius `radius` in `R^dim`.
pub fn uniform_in_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let mut g = Gaussian::default();
    let mut dir: Vec<f64> = (0..dim).map(|_| g.sample(rng)).collect();
    let len = crate::numerics::norm(&dir);
    let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
    if len > 0.0 {
        dir.iter_mut().for_each(|v| *v *= r / len);
    }
    dir
}
