use crate::error::{Error, Result};

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_n(x) − F(x)|` for a continuous or discrete reference cdf.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    let xs = sorted(sample)?;
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x).clamp(0.0, 1.0);
        // Just below x the ecdf is i/n; at x it is j/n. Left limits of the
        // reference are approximated by the value at the previous point.
        d = d.max((j as f64 / n - f).abs()).max(f - i as f64 / n);
        i = j;
    }
    Ok(d.min(1.0))
}

/// Two-sample statistic `sup_x |F_n(x) − G_m(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (xs, ys) = (sorted(a)?, sorted(b)?);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Reference law for [`ks_statistic`].
pub enum KsReference<'a> {
    Sample(&'a [f64]),
    Cdf(&'a dyn Fn(f64) -> f64),
}

pub fn ks_statistic(sample: &[f64], reference: KsReference<'_>) -> Result<f64> {
    match reference {
        KsReference::Sample(b) => ks_two_sample(sample, b),
        KsReference::Cdf(f) => ks_one_sample(sample, f),
    }
}

/// Asymptotic Kolmogorov critical value `c(α) √((n+m)/(nm))` at level `alpha`.
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
