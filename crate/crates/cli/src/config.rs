//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Settings read from a config file; each lookup lets a flag win over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got `{}`", i + 1, raw.trim());
            };
            let key = key.trim().replace('-', "_");
            if key.is_empty() {
                bail!("config line {}: empty key", i + 1);
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("config line {}: duplicate key `{key}`", i + 1);
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag` if given, else the config value under `key`, else `default`.
    pub fn pick<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s.parse().map_err(|e| anyhow::anyhow!("config key `{key}` = `{s}`: {e}")),
            None => Ok(default),
        }
    }

    /// Like [`Settings::pick`] with no default.
    pub fn pick_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| s.parse().map_err(|e| anyhow::anyhow!("config key `{key}` = `{s}`: {e}")))
            .transpose()
    }

    /// Comma-separated list under `key`, unless a flag list was given.
    pub fn pick_list(&self, key: &str, flag: Option<Vec<f64>>, default: &[f64]) -> Result<Vec<f64>> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| anyhow::anyhow!("config key `{key}`: `{x}`: {e}")))
                .collect(),
            None => Ok(default.to_vec()),
        }
    }
}

/// Numbers with an optional `pi` factor: `2`, `pi`, `pi/2`, `0.5pi`, `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if t.is_empty() {
        bail!("empty angle");
    }
    let pi = std::f64::consts::PI;
    let num = |x: &str| -> Result<f64> {
        if x.is_empty() {
            Ok(1.0)
        } else {
            x.parse::<f64>().with_context(|| format!("bad number `{x}` in `{s}`"))
        }
    };
    if let Some(idx) = t.find("pi") {
        let before = t[..idx].trim_end_matches('*');
        let after = &t[idx + 2..];
        let mut v = num(before)? * pi;
        if let Some(den) = after.strip_prefix('/') {
            v /= num(den)?;
        } else if !after.is_empty() {
            bail!("cannot parse angle `{s}`");
        }
        Ok(v)
    } else {
        num(&t)
    }
}

/// An angle value accepted from flags and config (`pi/2` etc.).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse_angle(s).map(Angle).map_err(|e| e.to_string())
    }
}

/// Inclusive integer range written `a..b` or `a..=b` or a single `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for CutRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a, b.trim_start_matches('=')),
            None => (s, s),
        };
        let lo: usize = lo.trim().parse().map_err(|e| format!("range `{s}`: {e}"))?;
        let hi: usize = hi.trim().parse().map_err(|e| format!("range `{s}`: {e}"))?;
        if hi < lo {
            return Err(format!("range `{s}` is empty"));
        }
        Ok(CutRange { lo, hi })
    }
}

/// Unit of a Rabi-rate value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateUnit {
    RadPerSecond,
    Hertz,
}

impl RateUnit {
    pub fn to_rad_per_s(self, value: f64) -> f64 {
        match self {
            RateUnit::RadPerSecond => value,
            RateUnit::Hertz => std::f64::consts::TAU * value,
        }
    }
}

impl FromStr for RateUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rad/s" | "rad_s" | "rads" => Ok(RateUnit::RadPerSecond),
            "hz" => Ok(RateUnit::Hertz),
            other => Err(format!("unknown rate unit `{other}` (use rad/s or hz)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_flat_file() {
        let s = Settings::parse("# trap\nalpha = 2.5\n\neta=0.03 # inline\nout-dir = /tmp/x\n").unwrap();
        assert_eq!(s.raw("alpha"), Some("2.5"));
        assert_eq!(s.raw("out_dir"), Some("/tmp/x"));
        assert_eq!(s.pick("eta", None, 0.02).unwrap(), 0.03);
        assert_eq!(s.pick("eta", Some(0.1), 0.02).unwrap(), 0.1);
        assert_eq!(s.pick("step", None, 0.04).unwrap(), 0.04);
        assert!(s.pick::<f64>("out_dir", None, 0.0).is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Settings::parse("alpha 2").is_err());
        assert!(Settings::parse("= 2").is_err());
        assert!(Settings::parse("a = 1\na = 2").is_err());
    }

    #[test]
    fn lists() {
        let s = Settings::parse("etas = 0.1, 0.3,0.02").unwrap();
        assert_eq!(s.pick_list("etas", None, &[]).unwrap(), vec![0.1, 0.3, 0.02]);
        assert_eq!(s.pick_list("other", None, &[1.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("2").unwrap(), 2.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("0.5 pi").unwrap(), 0.5 * PI);
        assert!(parse_angle("pix").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!("9..16".parse::<CutRange>().unwrap(), CutRange { lo: 9, hi: 16 });
        assert_eq!("9..=16".parse::<CutRange>().unwrap(), CutRange { lo: 9, hi: 16 });
        assert_eq!("14".parse::<CutRange>().unwrap(), CutRange { lo: 14, hi: 14 });
        assert!("5..2".parse::<CutRange>().is_err());
    }

    #[test]
    fn rate_units() {
        assert_eq!("hz".parse::<RateUnit>().unwrap().to_rad_per_s(1.0), 2.0 * PI);
        assert_eq!("rad/s".parse::<RateUnit>().unwrap().to_rad_per_s(3.0), 3.0);
        assert!("khz".parse::<RateUnit>().is_err());
    }
}
