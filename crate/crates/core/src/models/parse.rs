use std::f64::consts::PI;
use std::str::FromStr;

use super::{AnisotropicRateModel, CloudModel, ConeModel, CurveModel, EllipticalModel, SphericalLqModel};
use crate::error::{invalid, Error, Result};
use crate::params::Params;
use crate::radial::RadialLaw;

/// Splits off `radial=…`, which runs to the end of the string.
fn split_radial(rest: &str) -> Result<(&str, RadialLaw)> {
    let at = if rest.starts_with("radial=") {
        Some(0)
    } else {
        rest.find(",radial=").map(|i| i + 1)
    };
    let at = at.ok_or_else(|| Error::Parse("missing parameter 'radial'".into()))?;
    let radial = rest[at + "radial=".len()..].parse()?;
    Ok((rest[..at].trim_end_matches(','), radial))
}

/// An angle: a number, or `pi`, `k*pi`, `pi/m`, `k*pi/m`.
fn parse_angle(s: &str) -> Result<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("cannot parse angle '{s}' (a number or k*pi/m)"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let k = match num.trim() {
        "pi" => 1.0,
        t => t
            .strip_suffix("pi")
            .map(|p| p.trim_end_matches('*').trim())
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    Ok(k * PI / den)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(';')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad list entry '{t}'"))))
        .collect()
}

impl FromStr for CloudModel {
    type Err = Error;

    /// `elliptical:d=D[,eigs=L1;…;Ld]`, `elliptical:rho=R`, `sphericalq:d=D,q=Q`,
    /// `cone:theta0=T,density=uniform|polyquad`, `curve:preset=ellipse,rho=R`,
    /// `aniso:a=A,q=Q`; each followed by `,radial=LAW` as the last parameter.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("model '{s}' must look like family:params")))?;
        let (params, radial) = split_radial(rest)?;
        let p = Params::parse(params)?;
        match family {
            "elliptical" => {
                if p.get("rho").is_some() {
                    p.only(&["rho", "d"])?;
                    if p.get("d").is_some_and(|d| d != "2") {
                        return Err(invalid("rho= describes a bivariate model; d must be 2"));
                    }
                    return Ok(EllipticalModel::bivariate(p.num("rho")?, radial)?.into());
                }
                p.only(&["d", "eigs"])?;
                let model = match p.get("eigs") {
                    Some(list) => {
                        let eigs = parse_list(list)?;
                        if p.get("d").is_some() && p.int("d")? != eigs.len() {
                            return Err(invalid(format!("d = {} but {} eigenvalues given", p.int("d")?, eigs.len())));
                        }
                        EllipticalModel::from_eigenvalues(&eigs, radial)?
                    }
                    None => EllipticalModel::spherical(p.int("d")?, radial)?,
                };
                Ok(model.into())
            }
            "sphericalq" => {
                p.only(&["d", "q"])?;
                let q = match p.get("q") {
                    Some("inf") => f64::INFINITY,
                    _ => p.num("q")?,
                };
                Ok(SphericalLqModel::new(p.int("d")?, q, radial)?.into())
            }
            "cone" => {
                p.only(&["theta0", "density"])?;
                let theta0 = parse_angle(p.get("theta0").ok_or_else(|| Error::Parse("missing parameter 'theta0'".into()))?)?;
                let density = p.get("density").unwrap_or("uniform").parse()?;
                Ok(ConeModel::new(theta0, density, radial)?.into())
            }
            "curve" => {
                p.only(&["preset", "rho"])?;
                match p.get("preset") {
                    Some("ellipse") => Ok(CurveModel::ellipse(p.num("rho")?, radial)?.into()),
                    Some(other) => Err(Error::Parse(format!("unknown curve preset '{other}' (ellipse)"))),
                    None => Err(Error::Parse("missing parameter 'preset'".into())),
                }
            }
            "aniso" => {
                p.only(&["a", "q"])?;
                Ok(AnisotropicRateModel::new(p.num("a")?, p.num("q")?, radial)?.into())
            }
            other => Err(Error::Parse(format!(
                "unknown model family '{other}' (elliptical|sphericalq|cone|curve|aniso)"
            ))),
        }
    }
}
