use std::collections::HashMap;
use std::path::PathBuf;

use super::schema::{Kind, KeySpec, Subcommand};
use super::CliError;

/// Parses a `key = value` file. `#` starts a comment line; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "config line {}: expected key=value, got {line:?}",
                no + 1
            )));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Every schema key with its final textual value, in schema order.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub subcommand: Subcommand,
    entries: Vec<(KeySpec, Option<String>)>,
}

impl ResolvedConfig {
    /// Merges defaults, file values and flag values (in increasing precedence),
    /// then checks required keys and value syntax.
    pub fn resolve(
        subcommand: Subcommand,
        file: &[(String, String)],
        flags: &HashMap<String, String>,
    ) -> Result<Self, CliError> {
        let keys = subcommand.keys();
        let mut entries: Vec<(KeySpec, Option<String>)> =
            keys.iter().map(|k| (*k, k.default.map(str::to_string))).collect();
        for (k, v) in file {
            if k == "config" {
                return Err(CliError::Validation("config files cannot include other configs".into()));
            }
            match entries.iter_mut().find(|(spec, _)| spec.name == k) {
                Some(e) => e.1 = Some(v.clone()),
                None => return Err(CliError::Validation(format!("unknown key: {k}"))),
            }
        }
        for (k, v) in flags {
            match entries.iter_mut().find(|(spec, _)| spec.name == k) {
                Some(e) => e.1 = Some(v.clone()),
                None => return Err(CliError::Validation(format!("unknown key: {k}"))),
            }
        }
        for (spec, value) in &entries {
            match value {
                None if spec.required => {
                    return Err(CliError::Validation(format!("missing key: {}", spec.name)))
                }
                Some(v) => check_syntax(spec, v)?,
                None => {}
            }
        }
        Ok(Self { subcommand, entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(s, _)| s.name == key)
            .and_then(|(_, v)| v.as_deref())
    }

    fn spec(&self, key: &str) -> KeySpec {
        self.entries
            .iter()
            .find(|(s, _)| s.name == key)
            .map(|(s, _)| *s)
            .unwrap_or_else(|| panic!("key {key} is not in the {} schema", self.subcommand.name()))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_float(key, v)).transpose()
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?
            .ok_or_else(|| CliError::Validation(format!("missing key: {key}")))
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.raw(key).map(|v| parse_int(key, v)).transpose()
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.opt_u64(key)?
            .ok_or_else(|| CliError::Validation(format!("missing key: {key}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self.u64(key)?;
        usize::try_from(v).map_err(|_| CliError::Validation(format!("invalid value for {key}: {v}")))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.opt_u64(key)? {
            None => Ok(None),
            Some(_) => self.usize(key).map(Some),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self
            .raw(key)
            .ok_or_else(|| CliError::Validation(format!("missing key: {key}")))?;
        parse_list(key, raw)
    }

    pub fn flag(&self, key: &str) -> bool {
        debug_assert_eq!(self.spec(key).kind, Kind::Flag);
        matches!(self.raw(key), Some("true"))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    /// `(key, value)` for every key that has a value, in schema order,
    /// excluding `config` (its content is already merged).
    pub fn resolved_pairs(&self) -> Vec<(&'static str, String)> {
        self.entries
            .iter()
            .filter(|(s, _)| s.name != "config")
            .filter_map(|(s, v)| v.as_ref().map(|v| (s.name, v.clone())))
            .collect()
    }
}

fn check_syntax(spec: &KeySpec, v: &str) -> Result<(), CliError> {
    match spec.kind {
        Kind::Int => parse_int(spec.name, v).map(|_| ()),
        Kind::Float => parse_float(spec.name, v).map(|_| ()),
        Kind::FloatList => parse_list(spec.name, v).map(|_| ()),
        Kind::Flag => match v {
            "true" | "false" => Ok(()),
            _ => Err(CliError::Validation(format!(
                "invalid value for {}: expected true or false, got {v:?}",
                spec.name
            ))),
        },
        Kind::Path => {
            if v.is_empty() {
                Err(CliError::Validation(format!("invalid value for {}: empty path", spec.name)))
            } else {
                Ok(())
            }
        }
    }
}

fn parse_float(key: &str, v: &str) -> Result<f64, CliError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::Validation(format!(
            "invalid value for {key}: expected a finite number, got {v:?}"
        ))),
    }
}

fn parse_int(key: &str, v: &str) -> Result<u64, CliError> {
    v.trim().parse::<u64>().map_err(|_| {
        CliError::Validation(format!(
            "invalid value for {key}: expected a non-negative integer, got {v:?}"
        ))
    })
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(CliError::Validation(format!(
            "invalid value for {key}: expected a comma-separated list, got {v:?}"
        )));
    }
    items.iter().map(|s| parse_float(key, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn config_text_parsing() {
        let got = parse_config_text("# run\n n = 2\n\nm=4, 8\n").unwrap();
        assert_eq!(got, vec![("n".into(), "2".into()), ("m".into(), "4, 8".into())]);
        assert!(parse_config_text("n 2").is_err());
    }

    #[test]
    fn flags_override_file_and_defaults_fill_in() {
        let file = parse_config_text("n=1\ns=0.2\nt=0.1\nalpha=0.5\nquad-points=64").unwrap();
        let cfg = ResolvedConfig::resolve(Subcommand::Growth, &file, &flags(&[("n", "2")])).unwrap();
        assert_eq!(cfg.usize("n").unwrap(), 2);
        assert_eq!(cfg.usize("quad-points").unwrap(), 64);
        assert_eq!(cfg.f64_list("m").unwrap(), vec![4.0, 8.0, 16.0, 32.0, 64.0]);
    }

    #[test]
    fn validation_messages() {
        let err = ResolvedConfig::resolve(Subcommand::Growth, &[], &flags(&[("s", "0.1")])).unwrap_err();
        assert_eq!(err.to_string(), "missing key: n");
        let file = vec![("bogus".to_string(), "1".to_string())];
        let err = ResolvedConfig::resolve(Subcommand::Growth, &file, &HashMap::new()).unwrap_err();
        assert_eq!(err.to_string(), "unknown key: bogus");
        let err = ResolvedConfig::resolve(
            Subcommand::Growth,
            &[],
            &flags(&[("n", "x"), ("s", "0"), ("t", "0"), ("alpha", "1")]),
        )
        .unwrap_err();
        assert!(err.to_string().starts_with("invalid value for n"));
        let err = ResolvedConfig::resolve(Subcommand::Opnorm, &[], &flags(&[("n", "1"), ("s", "0"), ("t", "0")]))
            .unwrap_err();
        assert_eq!(err.to_string(), "missing key: seed");
    }
}
