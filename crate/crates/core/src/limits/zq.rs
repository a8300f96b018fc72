use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;
use crate::special::{ln_gamma, ln_gamma_q};

/// Symmetric law with density `q 2^{−1/(2q)} Γ(1/(2q))^{−1} e^{−|x|^{2q}/2}`, `q ∈ (1/2, 1)`.
///
/// `|Z|^{2q}/2` is Gamma-distributed with shape `1/(2q)`, which gives both the
/// sampler and the cdf.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZqLaw {
    q: f64,
    #[serde(skip)]
    gamma: Gamma<f64>,
}

impl ZqLaw {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.5 && q < 1.0) {
            return Err(invalid(format!("Z_q needs q in (1/2, 1), got {q}")));
        }
        let gamma = Gamma::new(0.5 / q, 1.0).map_err(|e| invalid(e.to_string()))?;
        Ok(Self { q, gamma })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let q = self.q;
        (q.ln() - 0.5 / q * std::f64::consts::LN_2 - ln_gamma(0.5 / q) - 0.5 * x.abs().powf(2.0 * q)).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        let tail = 0.5 * ln_gamma_q(0.5 / self.q, 0.5 * x.abs().powf(2.0 * self.q)).exp();
        if x > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let y = self.gamma.sample(rng);
        let z = (2.0 * y).powf(0.5 / self.q);
        if rng.random::<bool>() {
            z
        } else {
            -z
        }
    }
}

/// One draw of `Z_q`.
pub fn sample_zq(law: &ZqLaw, seed: u64) -> f64 {
    law.sample(&mut rng_from_seed(seed))
}
