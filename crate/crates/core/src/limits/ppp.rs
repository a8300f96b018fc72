use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, SimRng};

fn next_arrival<R: Rng + ?Sized>(rng: &mut R, arrival: f64) -> f64 {
    loop {
        let e: f64 = rng.sample(Exp1);
        if e > 0.0 {
            return arrival + e;
        }
    }
}

/// Points `Γ₁ > Γ₂ > …` of a Poisson process with mean measure `c e^{−x} dx`,
/// generated as `Γ_i = −log(S_i/c)` from unit-rate arrivals `S_i`.
#[derive(Clone, Debug)]
pub struct PoissonGumbelStream {
    ln_intensity: f64,
    arrival: f64,
    rng: SimRng,
}

impl PoissonGumbelStream {
    pub fn new(intensity: f64, seed: u64) -> Result<Self> {
        if !(intensity > 0.0) || !intensity.is_finite() {
            return Err(invalid(format!("intensity must be positive, got {intensity}")));
        }
        Ok(Self { ln_intensity: intensity.ln(), arrival: 0.0, rng: rng_from_seed(seed) })
    }
}

impl Iterator for PoissonGumbelStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.arrival = next_arrival(&mut self.rng, self.arrival);
        Some(self.ln_intensity - self.arrival.ln())
    }
}

/// Lazily generated stream.
pub fn ppp_points(intensity: f64, seed: u64) -> Result<PoissonGumbelStream> {
    PoissonGumbelStream::new(intensity, seed)
}

/// A Poisson–Gumbel stream scaled by `weight`, whose points carry marks of
/// fixed length drawn once, when the point is generated.
pub(crate) struct MarkedStream<F> {
    ln_intensity: f64,
    weight: f64,
    arrival: f64,
    rng: SimRng,
    values: Vec<f64>,
    marks: Vec<f64>,
    mark_len: usize,
    draw_mark: F,
}

impl<F: FnMut(&mut SimRng, &mut [f64])> MarkedStream<F> {
    pub(crate) fn new(intensity: f64, weight: f64, seed: u64, mark_len: usize, draw_mark: F) -> Self {
        Self {
            ln_intensity: intensity.ln(),
            weight,
            arrival: 0.0,
            rng: rng_from_seed(seed),
            values: Vec::new(),
            marks: Vec::new(),
            mark_len,
            draw_mark,
        }
    }

    fn ensure(&mut self, i: usize) {
        while self.values.len() <= i {
            self.arrival = next_arrival(&mut self.rng, self.arrival);
            self.values.push(self.weight * (self.ln_intensity - self.arrival.ln()));
            let start = self.marks.len();
            self.marks.resize(start + self.mark_len, 0.0);
            (self.draw_mark)(&mut self.rng, &mut self.marks[start..]);
        }
    }

    pub(crate) fn value(&mut self, i: usize) -> f64 {
        self.ensure(i);
        self.values[i]
    }

    pub(crate) fn mark(&self, i: usize) -> &[f64] {
        &self.marks[i * self.mark_len..(i + 1) * self.mark_len]
    }

    #[cfg(test)]
    pub(crate) fn generated(&self) -> usize {
        self.values.len()
    }
}

/// Result of `max_{i,j} {Γ⁺_i + Γ⁻_j − pen(i, j)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleMax {
    pub value: f64,
    /// `Γ⁺₁ + Γ⁻₁ − pen(1, 1)`.
    pub lower: f64,
    /// `Γ⁺₁ + Γ⁻₁`.
    pub upper: f64,
}

/// Exact maximum over all pairs for a nonnegative penalty.
///
/// A pair with `Γ⁺_i + Γ⁻_j ≤ best` cannot improve on `best`, and the streams
/// decrease, so each scan stops at the first such index. `floor` is a value
/// already achieved elsewhere (or `−∞`); the result is the larger of it and this
/// pair maximum. At least `forced` points of each stream are always visited.
pub(crate) fn double_max<F, G, P>(
    plus: &mut MarkedStream<F>,
    minus: &mut MarkedStream<G>,
    penalty: P,
    floor: f64,
    forced: usize,
) -> DoubleMax
where
    F: FnMut(&mut SimRng, &mut [f64]),
    G: FnMut(&mut SimRng, &mut [f64]),
    P: Fn(&[f64], &[f64]) -> f64,
{
    let upper = plus.value(0) + minus.value(0);
    let lower = upper - penalty(plus.mark(0), minus.mark(0));
    let mut best = floor.max(lower);
    let mut i = 0;
    loop {
        let gp = plus.value(i);
        if i >= forced && gp + minus.value(0) <= best {
            break;
        }
        let mut j = 0;
        loop {
            let gm = minus.value(j);
            if j >= forced && gp + gm <= best {
                break;
            }
            let v = gp + gm - penalty(plus.mark(i), minus.mark(j));
            if v > best {
                best = v;
            }
            j += 1;
        }
        i += 1;
    }
    DoubleMax { value: best, lower, upper }
}
