use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::sphere::fill_unit_vector;
use super::PointSet;
use crate::error::{invalid, Result};
use crate::radial::RadialLaw;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Eigenvalues closer than this (relative to the largest) count as equal.
pub const MULTIPLICITY_REL_TOL: f64 = 1e-9;

/// `T · A · W` described through the spectrum `λ₁ ≥ … ≥ λ_d` of `A′A`.
///
/// Sampling uses the diagonal form `T(√λ₁W₁, …, √λ_dW_d)`, which has the same
/// norm and diameter law as the rotated vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticalModel {
    eigenvalues: Vec<f64>,
    multiplicity: usize,
    pub radial: RadialLaw,
    #[serde(skip)]
    matrix: Option<DMatrix<f64>>,
}

impl EllipticalModel {
    pub fn from_eigenvalues(eigenvalues: &[f64], radial: RadialLaw) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(invalid("elliptical models need dimension d >= 2"));
        }
        if eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(invalid(format!("eigenvalues must be positive and finite: {eigenvalues:?}")));
        }
        let mut eigs = eigenvalues.to_vec();
        eigs.sort_by(|a, b| b.total_cmp(a));
        let top = eigs[0];
        let multiplicity = eigs.iter().take_while(|&&l| (top - l) <= MULTIPLICITY_REL_TOL * top).count();
        Ok(Self { eigenvalues: eigs, multiplicity, radial, matrix: None })
    }

    /// Reduces a general invertible `d × d` matrix `A` to the eigenvalues of `A′A`.
    pub fn from_matrix(a: DMatrix<f64>, radial: RadialLaw) -> Result<Self> {
        if !a.is_square() {
            return Err(invalid("matrix A must be square"));
        }
        let ata = a.transpose() * &a;
        let eig = ata.symmetric_eigen();
        let mut model = Self::from_eigenvalues(eig.eigenvalues.as_slice(), radial)?;
        model.matrix = Some(a);
        Ok(model)
    }

    /// `λ = (1, …, 1)`.
    pub fn spherical(d: usize, radial: RadialLaw) -> Result<Self> {
        Self::from_eigenvalues(&vec![1.0; d], radial)
    }

    /// Correlation matrix `[[1, ρ], [ρ, 1]]`, spectrum `(1 + ρ, 1 − ρ)`.
    pub fn bivariate(rho: f64, radial: RadialLaw) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid(format!("correlation must lie in (0, 1), got {rho}")));
        }
        Self::from_eigenvalues(&[1.0 + rho, 1.0 - rho], radial)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn top_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Number of eigenvalues equal to the largest one.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn is_spherical(&self) -> bool {
        self.multiplicity == self.dim()
    }

    /// Eigenvalues strictly below `λ₁`.
    pub fn lower_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[self.multiplicity..]
    }

    /// `λ₁/(λ₁ − λ_q)` for each lower eigenvalue.
    pub fn gamma_sq(&self) -> Vec<f64> {
        let l1 = self.top_eigenvalue();
        self.lower_eigenvalues().iter().map(|&l| l1 / (l1 - l)).collect()
    }

    /// `λ_q/(λ₁ − λ_q)` for each lower eigenvalue.
    pub fn tau_sq(&self) -> Vec<f64> {
        let l1 = self.top_eigenvalue();
        self.lower_eigenvalues().iter().map(|&l| l / (l1 - l)).collect()
    }

    /// `λ_q/(2λ₁ − λ_q)` for each lower eigenvalue.
    pub fn pair_correlations(&self) -> Vec<f64> {
        let l1 = self.top_eigenvalue();
        self.lower_eigenvalues().iter().map(|&l| l / (2.0 * l1 - l)).collect()
    }

    /// `(2λ₁ − λ_q)/(2λ₁ − 2λ_q)` for each lower eigenvalue.
    pub fn pair_variances(&self) -> Vec<f64> {
        let l1 = self.top_eigenvalue();
        self.lower_eigenvalues().iter().map(|&l| (2.0 * l1 - l) / (2.0 * l1 - 2.0 * l)).collect()
    }

    /// One draw of `Y` in eigen-coordinates, together with the direction `W`.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, w: &mut [f64], y: &mut [f64]) -> f64 {
        fill_unit_vector(rng, w);
        let t = self.radial.sample(rng);
        for ((yq, wq), l) in y.iter_mut().zip(w.iter()).zip(&self.eigenvalues) {
            *yq = t * l.sqrt() * wq;
        }
        t
    }

    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let d = self.dim();
        let mut rng = rng_from_seed(seed);
        let (mut w, mut y) = (vec![0.0; d], vec![0.0; d]);
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n {
            self.draw_into(&mut rng, &mut w, &mut y);
            coords.extend(y.iter().map(|&c| S::of(c)));
        }
        PointSet::new(d, coords)
    }

    /// Samples `T · A · W` with the original matrix; requires [`Self::from_matrix`].
    pub fn sample_cloud_rotated<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        let a = self.matrix.as_ref().ok_or_else(|| invalid("model was not built from a matrix"))?;
        let d = self.dim();
        let mut rng = rng_from_seed(seed);
        let mut w = vec![0.0; d];
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n {
            fill_unit_vector(&mut rng, &mut w);
            let t = self.radial.sample(&mut rng);
            for r in 0..d {
                let s: f64 = (0..d).map(|c| a[(r, c)] * w[c]).sum();
                coords.push(S::of(t * s));
            }
        }
        PointSet::new(d, coords)
    }
}

/// `T(cos U, ρ cos U + √(1−ρ²) sin U)` with `U` uniform on `[0, 2π)`.
pub fn bivariate_elliptical_angle_form<S: Scalar>(
    rho: f64,
    n: usize,
    radial: RadialLaw,
    seed: u64,
) -> Result<PointSet<S>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid(format!("correlation must lie in (0, 1), got {rho}")));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let c = (1.0 - rho * rho).sqrt();
    let mut coords = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let u = rng.random::<f64>() * std::f64::consts::TAU;
        let t = radial.sample(&mut rng);
        let (x, y) = angle_form_point(rho, c, t, u);
        coords.push(S::of(x));
        coords.push(S::of(y));
    }
    Ok(PointSet::new(2, coords)?.with_origin(format!("bivariate:rho={rho},radial={radial}"), seed))
}

fn angle_form_point(rho: f64, c: f64, t: f64, u: f64) -> (f64, f64) {
    let (s, co) = u.sin_cos();
    (t * co, t * (rho * co + c * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi2() -> RadialLaw {
        RadialLaw::chi(2.0).unwrap()
    }

    #[test]
    fn multiplicity_grouping() {
        let m = EllipticalModel::from_eigenvalues(&[4.0, 1.0, 0.5], chi2()).unwrap();
        assert_eq!(m.multiplicity(), 1);
        let m = EllipticalModel::from_eigenvalues(&[4.0, 4.0 * (1.0 - 1e-12), 0.5], chi2()).unwrap();
        assert_eq!(m.multiplicity(), 2);
        let m = EllipticalModel::spherical(3, chi2()).unwrap();
        assert!(m.is_spherical());
        assert!(EllipticalModel::from_eigenvalues(&[1.0, 0.0], chi2()).is_err());
        assert!(EllipticalModel::from_eigenvalues(&[1.0], chi2()).is_err());
    }

    #[test]
    fn derived_parameters() {
        let m = EllipticalModel::from_eigenvalues(&[4.0, 1.0, 0.5], chi2()).unwrap();
        let g = m.gamma_sq();
        assert!((g[0] - 4.0 / 3.0).abs() < 1e-15 && (g[1] - 8.0 / 7.0).abs() < 1e-15);
        let m = EllipticalModel::from_eigenvalues(&[4.0, 4.0, 0.5], chi2()).unwrap();
        assert!((m.pair_correlations()[0] - 1.0 / 15.0).abs() < 1e-16);
        let m = EllipticalModel::bivariate(0.2, chi2()).unwrap();
        assert!((m.tau_sq()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_reduces_to_spectrum() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.2, (1.0f64 - 0.04).sqrt()]);
        let m = EllipticalModel::from_matrix(a, chi2()).unwrap();
        assert!((m.eigenvalues()[0] - 1.2).abs() < 1e-12);
        assert!((m.eigenvalues()[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn coordinate_variances() {
        let m = EllipticalModel::bivariate(0.2, chi2()).unwrap();
        let n = 1000;
        let ps = m.sample_cloud::<f64>(n, 3).unwrap();
        for q in 0..2 {
            let var: f64 = ps.rows().map(|r| r[q] * r[q]).sum::<f64>() / n as f64;
            let target = m.eigenvalues()[q] * m.radial.second_moment() / 2.0;
            assert!((var / target - 1.0).abs() < 0.1, "axis {q}: {var} vs {target}");
        }
    }

    #[test]
    fn angle_form_correlation_and_zero_angle() {
        let n = 1_000_000;
        let ps = bivariate_elliptical_angle_form::<f64>(0.5, n, chi2(), 4).unwrap();
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for r in ps.rows() {
            sxx += r[0] * r[0];
            syy += r[1] * r[1];
            sxy += r[0] * r[1];
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!((corr - 0.5).abs() < 0.01);
        let (x, y) = angle_form_point(0.3, (1.0f64 - 0.09).sqrt(), 2.0, 0.0);
        assert_eq!((x, y), (2.0, 0.6));
        assert!(bivariate_elliptical_angle_form::<f64>(1.0, 5, chi2(), 0).is_err());
    }
}
