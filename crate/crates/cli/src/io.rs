//! Output formatting and all-or-nothing file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kerr_core::wigner::{WignerField, WIGNER_BOUND};

/// Six significant digits, `%g` style: fixed notation for exponents in
/// `[-4, 6)`, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Comma-separated table built row by row.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self::default();
        c.push_raw(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn push_raw(&mut self, cells: impl IntoIterator<Item = String>) {
        let line: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// `re,im,w` for every grid node, real part varying fastest.
pub fn field_csv(field: &WignerField) -> Vec<u8> {
    let mut csv = Csv::new(&["re", "im", "w"]);
    for (g, w) in field.nodes() {
        csv.push_raw([fmt_sig(g.re), fmt_sig(g.im), fmt_sig(w)]);
    }
    csv.into_bytes()
}

/// Binary PGM with `[−2/π, 2/π]` mapped onto `0..=255`; top row is the largest `Im γ`.
pub fn field_pgm(field: &WignerField) -> Vec<u8> {
    let (n_re, n_im) = field.shape();
    let mut out = format!("P5\n{n_re} {n_im}\n255\n").into_bytes();
    for j in (0..n_im).rev() {
        for i in 0..n_re {
            let w = field.value(i, j);
            let level = ((w + WIGNER_BOUND) / (2.0 * WIGNER_BOUND)).clamp(0.0, 1.0) * 255.0;
            out.push(level.round() as u8);
        }
    }
    out
}

/// Files produced by one command, written together or not at all.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Stages every file next to its destination, then renames them all into
    /// place. On failure staged files are removed and nothing new is visible.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
        let result = (|| -> Result<()> {
            for (name, bytes) in &self.files {
                let dest = dir.join(name);
                let tmp = dir.join(format!(".{name}.{}.partial", std::process::id()));
                staged.push((tmp.clone(), dest));
                let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
                f.write_all(bytes).with_context(|| format!("writing {}", tmp.display()))?;
                f.sync_all().with_context(|| format!("syncing {}", tmp.display()))?;
            }
            Ok(())
        })();
        if let Err(e) = result {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        let mut placed = Vec::new();
        for (i, (tmp, dest)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, dest) {
                for (t, _) in &staged[i..] {
                    let _ = fs::remove_file(t);
                }
                for d in &placed {
                    let _ = fs::remove_file(d);
                }
                return Err(e).with_context(|| format!("moving output into {}", dest.display()));
            }
            placed.push(dest.clone());
        }
        Ok(placed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kerr_core::wigner::Region;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159");
        assert_eq!(fmt_sig(123456.7), "123457");
        assert_eq!(fmt_sig(1234567.0), "1.23457e6");
        assert_eq!(fmt_sig(5.171e-5), "5.171e-5");
        assert_eq!(fmt_sig(0.000123456789), "0.000123457");
        assert_eq!(fmt_sig(999999.7), "1e6");
        assert_eq!(fmt_sig(0.04), "0.04");
    }

    #[test]
    fn pgm_layout() {
        let region = Region::new(0.0, 1.0, 0.0, 0.5);
        let field = WignerField::from_values(region, 0.5, vec![-1.0, 0.0, 1.0, 0.1, 0.2, 0.3]).unwrap();
        let bytes = field_pgm(&field);
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let px = &bytes[header.len()..];
        assert_eq!(px.len(), 6);
        // bottom row (im = 0) comes last; values clip at ±2/π
        assert_eq!(&px[3..], &[0, 128, 255]);
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::default();
        out.add("a.csv", b"x\n".to_vec());
        out.add("b.csv", b"y\n".to_vec());
        let paths = out.commit(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(fs::read(dir.path().join("b.csv")).unwrap(), b"y\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::default();
        out.add("good.csv", b"x\n".to_vec());
        out.add("missing/bad.csv", b"y\n".to_vec());
        assert!(out.commit(dir.path()).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
