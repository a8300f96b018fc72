use rand::Rng;
use rand_distr::StandardNormal;

use super::PointSet;
use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Writes a uniform draw on the unit sphere `S^{d-1}` into `out`.
pub fn fill_unit_vector<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for c in out.iter_mut() {
            *c = rng.sample(StandardNormal);
            s += *c * *c;
        }
        if s > 0.0 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|c| *c *= inv);
            return;
        }
    }
}

/// `count` points uniform on the unit sphere of `R^d` (normalized Gaussian vectors).
pub fn sample_sphere_uniform<S: Scalar>(d: usize, count: usize, seed: u64) -> Result<PointSet<S>> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut w = vec![0.0; d];
    let mut coords = Vec::with_capacity(d * count);
    for _ in 0..count {
        fill_unit_vector(&mut rng, &mut w);
        coords.extend(w.iter().map(|&c| S::of(c)));
    }
    Ok(PointSet::new(d, coords)?.with_origin(format!("sphere:d={d}"), seed))
}
