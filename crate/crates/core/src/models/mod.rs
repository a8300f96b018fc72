//! Generative point-cloud models.

mod aniso;
mod cone;
mod curve;
mod elliptical;
mod parse;
mod pointset;
mod sphere;
mod spherical_lq;

pub use aniso::AnisotropicRateModel;
pub use cone::{ConeDensity, ConeModel};
pub use curve::{CurveMaximum, CurveModel};
pub use elliptical::{bivariate_elliptical_angle_form, EllipticalModel, MULTIPLICITY_REL_TOL};
pub use pointset::PointSet;
pub use sphere::{fill_unit_vector, sample_sphere_uniform};
pub use spherical_lq::SphericalLqModel;

use crate::error::Result;
use crate::radial::RadialLaw;
use crate::scalar::Scalar;

/// Any of the supported cloud models.
#[derive(Clone, Debug, PartialEq)]
pub enum CloudModel {
    Elliptical(EllipticalModel),
    SphericalLq(SphericalLqModel),
    Cone(ConeModel),
    Curve(CurveModel),
    Aniso(AnisotropicRateModel),
}

impl CloudModel {
    pub fn dim(&self) -> usize {
        match self {
            Self::Elliptical(m) => m.dim(),
            Self::SphericalLq(m) => m.dim(),
            Self::Cone(_) | Self::Curve(_) | Self::Aniso(_) => 2,
        }
    }

    pub fn radial(&self) -> RadialLaw {
        match self {
            Self::Elliptical(m) => m.radial,
            Self::SphericalLq(m) => m.radial,
            Self::Cone(m) => m.radial,
            Self::Curve(m) => m.radial,
            Self::Aniso(m) => m.radial,
        }
    }

    /// The exponent of the norm in which the model's statistics are taken.
    pub fn norm_exponent(&self) -> f64 {
        match self {
            Self::SphericalLq(m) => m.q(),
            _ => 2.0,
        }
    }

    /// `n` i.i.d. points; deterministic in `(model, n, seed)`.
    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        let ps = match self {
            Self::Elliptical(m) => m.sample_cloud(n, seed),
            Self::SphericalLq(m) => m.sample_cloud(n, seed),
            Self::Cone(m) => m.sample_cloud(n, seed),
            Self::Curve(m) => m.sample_cloud(n, seed),
            Self::Aniso(m) => m.sample_cloud(n, seed),
        }?;
        Ok(ps.with_origin(self.describe(), seed))
    }

    /// Model string in the CLI grammar.
    pub fn describe(&self) -> String {
        match self {
            Self::Elliptical(m) => {
                let eigs: Vec<String> = m.eigenvalues().iter().map(|l| l.to_string()).collect();
                format!("elliptical:d={},eigs={},radial={}", m.dim(), eigs.join(";"), m.radial)
            }
            Self::SphericalLq(m) => {
                let q = if m.q().is_infinite() { "inf".to_string() } else { m.q().to_string() };
                format!("sphericalq:d={},q={q},radial={}", m.dim(), m.radial)
            }
            Self::Cone(m) => format!("cone:theta0={},density={},radial={}", m.theta0(), m.density(), m.radial),
            Self::Curve(m) => format!("curve:{},radial={}", m.label(), m.radial),
            Self::Aniso(m) => format!("aniso:a={},q={},radial={}", m.amplitude(), m.exponent(), m.radial),
        }
    }
}

impl From<EllipticalModel> for CloudModel {
    fn from(m: EllipticalModel) -> Self {
        Self::Elliptical(m)
    }
}

impl From<SphericalLqModel> for CloudModel {
    fn from(m: SphericalLqModel) -> Self {
        Self::SphericalLq(m)
    }
}

impl From<ConeModel> for CloudModel {
    fn from(m: ConeModel) -> Self {
        Self::Cone(m)
    }
}

impl From<CurveModel> for CloudModel {
    fn from(m: CurveModel) -> Self {
        Self::Curve(m)
    }
}

impl From<AnisotropicRateModel> for CloudModel {
    fn from(m: AnisotropicRateModel) -> Self {
        Self::Aniso(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ks_two_sample;

    #[test]
    fn sampling_is_deterministic() {
        let r = RadialLaw::exponential(1.0).unwrap();
        let models: Vec<CloudModel> = vec![
            EllipticalModel::from_eigenvalues(&[4.0, 1.0, 0.5], r).unwrap().into(),
            SphericalLqModel::new(2, 3.0, r).unwrap().into(),
            ConeModel::new(3.0, ConeDensity::PolyQuad, r).unwrap().into(),
            CurveModel::ellipse(0.2, r).unwrap().into(),
            AnisotropicRateModel::new(2.0, 0.75, r).unwrap().into(),
        ];
        for m in models {
            let a = m.sample_cloud::<f64>(50, 9).unwrap();
            let b = m.sample_cloud::<f64>(50, 9).unwrap();
            assert_eq!(a, b, "{}", m.describe());
            assert_eq!(a.dim(), m.dim());
            assert_ne!(a, m.sample_cloud::<f64>(50, 10).unwrap());
        }
    }

    #[test]
    fn rotated_and_diagonal_forms_agree_in_norm() {
        use nalgebra::DMatrix;
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.1, 0.5, 1.0, 0.2, 0.0, -0.4, 0.7]);
        let m = EllipticalModel::from_matrix(a, RadialLaw::weibull(1.5).unwrap()).unwrap();
        let n = 100_000;
        let rot = m.sample_cloud_rotated::<f64>(n, 1).unwrap();
        let diag = m.sample_cloud::<f64>(n, 2).unwrap();
        let norms = |ps: &PointSet<f64>| ps.rows().map(|r| r.iter().map(|c| c * c).sum::<f64>().sqrt()).collect::<Vec<_>>();
        let ks = ks_two_sample(&norms(&rot), &norms(&diag)).unwrap();
        assert!(ks < 1.628 * (2.0 / n as f64).sqrt(), "ks = {ks}");
    }
}
