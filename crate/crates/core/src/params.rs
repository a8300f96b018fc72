use crate::error::{Error, Result};

/// `key=value` pairs separated by commas.
pub(crate) struct Params<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    pub(crate) fn parse(s: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            let k = k.trim();
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(Error::Parse(format!("parameter '{k}' given twice")));
            }
            pairs.push((k, v.trim()));
        }
        Ok(Self { pairs })
    }

    pub(crate) fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub(crate) fn num(&self, key: &str) -> Result<f64> {
        let v = self.get(key).ok_or_else(|| Error::Parse(format!("missing parameter '{key}'")))?;
        v.parse().map_err(|_| Error::Parse(format!("parameter '{key}' is not a number: '{v}'")))
    }

    pub(crate) fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.get(key).is_some() {
            self.num(key)
        } else {
            Ok(default)
        }
    }

    pub(crate) fn int(&self, key: &str) -> Result<usize> {
        let v = self.get(key).ok_or_else(|| Error::Parse(format!("missing parameter '{key}'")))?;
        v.parse().map_err(|_| Error::Parse(format!("parameter '{key}' is not an integer: '{v}'")))
    }

    pub(crate) fn only(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(Error::Parse(format!("unknown parameter '{k}' (expected one of {allowed:?})")));
            }
        }
        Ok(())
    }
}
