//! Optical depth versus detuning on a uniform frequency axis.
//!
//! The grid is the shared substrate for hole burning, comb building and
//! propagation. Optical depth follows the natural-log convention: intensity
//! transmission through the medium is `exp(-od)`.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone)]
pub struct SpectralGrid {
    start_mhz: f64,
    step_mhz: f64,
    od: Vec<f64>,
}

impl SpectralGrid {
    /// Build from an explicit axis origin and spacing.
    pub fn new(start_mhz: f64, step_mhz: f64, od: Vec<f64>) -> Result<Self> {
        if !(step_mhz > 0.0) {
            return Err(CoreError::invalid("grid step must be > 0"));
        }
        if od.len() < 2 {
            return Err(CoreError::invalid("grid needs at least 2 samples"));
        }
        if od.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return Err(CoreError::invalid("optical depth must be finite and >= 0"));
        }
        Ok(SpectralGrid { start_mhz, step_mhz, od })
    }

    /// Uniform absorber of depth `od` spanning `[-half_span, half_span]`.
    pub fn flat(half_span_mhz: f64, step_mhz: f64, od: f64) -> Result<Self> {
        let n = (2.0 * half_span_mhz / step_mhz).round() as usize + 1;
        SpectralGrid::new(-half_span_mhz, step_mhz, vec![od; n])
    }

    pub fn len(&self) -> usize {
        self.od.len()
    }

    pub fn is_empty(&self) -> bool {
        self.od.is_empty()
    }

    pub fn step_mhz(&self) -> f64 {
        self.step_mhz
    }

    pub fn start_mhz(&self) -> f64 {
        self.start_mhz
    }

    pub fn end_mhz(&self) -> f64 {
        self.start_mhz + self.step_mhz * (self.od.len() - 1) as f64
    }

    pub fn detuning(&self, i: usize) -> f64 {
        self.start_mhz + self.step_mhz * i as f64
    }

    pub fn detunings(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.od.len()).map(move |i| self.detuning(i))
    }

    pub fn od(&self) -> &[f64] {
        &self.od
    }

    pub fn od_mut(&mut self) -> &mut [f64] {
        &mut self.od
    }

    pub fn contains(&self, f_mhz: f64) -> bool {
        f_mhz >= self.start_mhz && f_mhz <= self.end_mhz()
    }

    /// Nearest sample index for a detuning inside the axis.
    pub fn index_of(&self, f_mhz: f64) -> Result<usize> {
        if !self.contains(f_mhz) {
            return Err(CoreError::invalid(format!(
                "detuning {f_mhz} MHz outside grid [{}, {}]",
                self.start_mhz,
                self.end_mhz()
            )));
        }
        Ok(((f_mhz - self.start_mhz) / self.step_mhz).round() as usize)
    }

    /// Linear interpolation of the optical depth; clamps to the edge values
    /// outside the axis.
    pub fn od_at(&self, f_mhz: f64) -> f64 {
        let x = (f_mhz - self.start_mhz) / self.step_mhz;
        if x <= 0.0 {
            return self.od[0];
        }
        let last = self.od.len() - 1;
        if x >= last as f64 {
            return self.od[last];
        }
        let i = x.floor() as usize;
        let frac = x - i as f64;
        self.od[i] * (1.0 - frac) + self.od[i + 1] * frac
    }

    /// Trapezoidal integral of the optical depth over the axis (MHz units).
    pub fn integral(&self) -> f64 {
        let inner: f64 = self.od[1..self.od.len() - 1].iter().sum();
        (inner + 0.5 * (self.od[0] + self.od[self.od.len() - 1])) * self.step_mhz
    }

    pub fn same_axis(&self, other: &SpectralGrid) -> bool {
        self.od.len() == other.od.len()
            && (self.start_mhz - other.start_mhz).abs() < 1e-9 * self.step_mhz
            && (self.step_mhz - other.step_mhz).abs() < 1e-12 * self.step_mhz
    }

    /// Two-column CSV with header `detuning_MHz,od`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "detuning_MHz,od")?;
        for i in 0..self.od.len() {
            writeln!(f, "{},{}", self.detuning(i), self.od[i])?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty grid file".into()))??;
        if header.trim() != "detuning_MHz,od" {
            return Err(CoreError::Parse(format!(
                "expected header 'detuning_MHz,od', got '{header}'"
            )));
        }
        let mut axis = Vec::new();
        let mut od = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.splitn(2, ',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| CoreError::Parse(format!("line {}: missing field", ln + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CoreError::Parse(format!("line {}: {e}", ln + 2)))
            };
            axis.push(parse(it.next())?);
            od.push(parse(it.next())?);
        }
        if axis.len() < 2 {
            return Err(CoreError::Parse("grid file needs at least 2 rows".into()));
        }
        let step = axis[1] - axis[0];
        for w in axis.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-6 * step.abs() {
                return Err(CoreError::Parse("detuning axis is not uniform".into()));
            }
        }
        if step <= 0.0 {
            return Err(CoreError::Parse("detuning axis must be increasing".into()));
        }
        SpectralGrid::new(axis[0], step, od)
    }
}
