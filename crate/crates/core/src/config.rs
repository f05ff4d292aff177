//! Flat `key=value` parameter strings, e.g.
//! `mu0=1.0 mu1=1.0 sigma0=1.0 sigma1=1.0 rho=0.5 p1=0.5`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type KeyValues = BTreeMap<String, String>;

/// Split on whitespace or commas into `key=value` pairs. Later keys win.
pub fn parse_kv(text: &str) -> Result<KeyValues> {
    let mut out = KeyValues::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
        if tok.is_empty() {
            continue;
        }
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::input(format!("expected key=value, got `{tok}`")))?;
        if k.is_empty() {
            return Err(Error::input(format!("empty key in `{tok}`")));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

pub fn format_kv(kv: &KeyValues) -> String {
    kv.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn get_f64(kv: &KeyValues, key: &str, default: Option<f64>) -> Result<f64> {
    match kv.get(key) {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| Error::input(format!("`{key}` is not a number: `{v}`"))),
        None => default.ok_or_else(|| Error::input(format!("missing `{key}`"))),
    }
}

/// Reject keys outside `allowed`.
pub(crate) fn check_keys(kv: &KeyValues, allowed: &[&str]) -> Result<()> {
    match kv.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::input(format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}
