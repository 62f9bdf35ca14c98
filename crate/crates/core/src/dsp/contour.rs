use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ContourRow {
    frame_index: usize,
    value: f64,
}

fn write_rows<W: Write>(values: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (frame_index, &value) in values.iter().enumerate() {
        w.serialize(ContourRow { frame_index, value })?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

fn read_rows<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::new();
    for (i, row) in r.deserialize::<ContourRow>().enumerate() {
        let row = row?;
        if row.frame_index != i {
            return Err(Error::invalid(format!(
                "contour row {i} has frame_index {}",
                row.frame_index
            )));
        }
        values.push(row.value);
    }
    Ok(values)
}

/// Per-frame fundamental frequency in Hz; `0.0` marks an unvoiced frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchContour(pub Vec<f64>);

impl PitchContour {
    pub fn new(f0: Vec<f64>) -> Result<Self> {
        if f0.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("pitch values must be finite and >= 0"));
        }
        Ok(Self(f0))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }

    /// Truncates or pads with unvoiced frames to exactly `len` frames.
    pub fn fit_to_len(&self, len: usize) -> Self {
        let mut f0 = self.0.clone();
        f0.resize(len, 0.0);
        Self(f0)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.0, out)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        Self::new(read_rows(input)?)
    }
}

/// Per-frame RMS energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyContour(pub Vec<f64>);

impl EnergyContour {
    pub fn new(energy: Vec<f64>) -> Result<Self> {
        if energy.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("energy values must be finite and >= 0"));
        }
        Ok(Self(energy))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.0, out)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        Self::new(read_rows(input)?)
    }
}
