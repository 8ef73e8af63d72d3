//! Plain-text dump of a [`BogoliubovMap`] for regression fixtures.
//!
//! ```text
//! # relclock bogoliubov map
//! convention <tag>
//! n_max <N>
//! h <h>
//! alpha
//! <re> <im> <re> <im> ...   (N rows, N complex pairs each, row-major)
//! beta
//! ...
//! ```
//! Numbers use the shortest decimal that round-trips to the same `f64`.

use std::io::{self, BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BogoliubovMap, ModeError};

/// Sign and ordering convention of the stored coefficients.
pub const CONVENTION_TAG: &str = "b=conj(alpha)a-conj(beta)adag;free=exp(-i*w*t)";

#[derive(Debug, Clone, PartialEq)]
pub struct DumpHeader {
    pub n_max: usize,
    pub h: f64,
    pub convention: String,
}

pub fn write_dump<W: Write>(map: &BogoliubovMap, h: f64, out: &mut W) -> io::Result<()> {
    writeln!(out, "# relclock bogoliubov map")?;
    writeln!(out, "convention {CONVENTION_TAG}")?;
    writeln!(out, "n_max {}", map.n_max())?;
    writeln!(out, "h {h}")?;
    for (name, m) in [("alpha", map.alpha()), ("beta", map.beta())] {
        writeln!(out, "{name}")?;
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols())
                .map(|j| format!("{} {}", m[(i, j)].re, m[(i, j)].im))
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

pub fn read_dump<R: BufRead>(input: R) -> Result<(DumpHeader, BogoliubovMap), ModeError> {
    let bad = |msg: &str| ModeError::MalformedDump(msg.to_string());
    let mut lines = input
        .lines()
        .map(|l| l.map_err(|e| ModeError::MalformedDump(e.to_string())))
        .filter(|l| !matches!(l, Ok(s) if s.starts_with('#') || s.trim().is_empty()));

    let mut field = |key: &str| -> Result<String, ModeError> {
        let line = lines
            .next()
            .ok_or_else(|| bad("unexpected end of dump"))??;
        line.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| bad(&format!("expected `{key}`, found `{line}`")))
    };
    let convention = field("convention")?;
    let n_max: usize = field("n_max")?.parse().map_err(|_| bad("n_max"))?;
    let h: f64 = field("h")?.parse().map_err(|_| bad("h"))?;

    let mut read_matrix = |name: &str| -> Result<DMatrix<Complex64>, ModeError> {
        if !field(name)?.is_empty() {
            return Err(bad(name));
        }
        let mut m = DMatrix::zeros(n_max, n_max);
        for i in 0..n_max {
            let row = field("")?;
            let values: Vec<f64> = row
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("number `{t}`"))))
                .collect::<Result<_, _>>()?;
            if values.len() != 2 * n_max {
                return Err(bad(&format!(
                    "row {i} of {name} has {} numbers",
                    values.len()
                )));
            }
            for j in 0..n_max {
                m[(i, j)] = Complex64::new(values[2 * j], values[2 * j + 1]);
            }
        }
        Ok(m)
    };
    let alpha = read_matrix("alpha")?;
    let beta = read_matrix("beta")?;
    Ok((
        DumpHeader {
            n_max,
            h,
            convention,
        },
        BogoliubovMap::new(alpha, beta)?,
    ))
}
