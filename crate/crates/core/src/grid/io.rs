//! On-disk form of a [`GridFunction`]: a JSON header plus either a CSV of
//! `(index, re, im)` rows or a flat little-endian `f64` pair stream.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Domain, GridFunction, GridSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    Csv,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub n: usize,
    #[serde(rename = "N_grid")]
    pub n_grid: usize,
    #[serde(rename = "L")]
    pub half_extent: f64,
    pub domain_tag: Domain,
    pub format: SampleFormat,
}

impl Header {
    pub fn of(f: &GridFunction, format: SampleFormat) -> Self {
        Self {
            n: f.spec().dim(),
            n_grid: f.spec().points(),
            half_extent: f.spec().half_extent(),
            domain_tag: f.domain(),
            format,
        }
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.n_grid, self.half_extent)
    }
}

/// Path of the sample file belonging to a header path.
pub fn samples_path(header: &Path, format: SampleFormat) -> PathBuf {
    header.with_extension(match format {
        SampleFormat::Csv => "csv",
        SampleFormat::Binary => "bin",
    })
}

/// Write `<stem>.json` and `<stem>.csv` or `<stem>.bin`. Returns both paths.
pub fn write(f: &GridFunction, header_path: &Path, format: SampleFormat) -> Result<(PathBuf, PathBuf)> {
    let header = Header::of(f, format);
    fs::write(header_path, serde_json::to_string_pretty(&header)? + "\n")?;
    let data_path = samples_path(header_path, format);
    let mut w = BufWriter::new(fs::File::create(&data_path)?);
    match format {
        SampleFormat::Csv => {
            writeln!(w, "index,re,im")?;
            for (i, v) in f.values().iter().enumerate() {
                writeln!(w, "{i},{:e},{:e}", v.re, v.im)?;
            }
        }
        SampleFormat::Binary => {
            for v in f.values() {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok((header_path.to_path_buf(), data_path))
}

pub fn read(header_path: &Path) -> Result<GridFunction> {
    let header: Header = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    let spec = header.spec()?;
    let data_path = samples_path(header_path, header.format);
    let values = match header.format {
        SampleFormat::Csv => read_csv(&data_path, spec.len())?,
        SampleFormat::Binary => read_binary(&data_path)?,
    };
    GridFunction::new(spec, header.domain_tag, values)
}

fn read_csv(path: &Path, len: usize) -> Result<Vec<Complex64>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut values = vec![Complex64::new(0.0, 0.0); len];
    let mut seen = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let bad = |what: &str| Error::Config(format!("{}:{}: {what}", path.display(), lineno + 1));
        let mut parts = line.split(',').map(str::trim);
        let idx: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad index"))?;
        let re: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad real part"))?;
        let im: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad imaginary part"))?;
        if idx >= len {
            return Err(bad("index out of range"));
        }
        values[idx] = Complex64::new(re, im);
        seen += 1;
    }
    if seen != len {
        return Err(Error::SampleCount {
            expected: len,
            got: seen,
        });
    }
    Ok(values)
}

fn read_binary(path: &Path) -> Result<Vec<Complex64>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Config(format!(
            "{}: length {} is not a whole number of complex samples",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}
