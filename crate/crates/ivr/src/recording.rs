//! Baseband recordings and their interchange formats.
//!
//! Text format: one header line
//!
//! ```text
//! #ivr1,rate=<Sps>,mode=<complex|real>,channels=3,t0=<s>
//! ```
//!
//! followed by CSV rows `t,ch1_re[,ch1_im],ch2_re[,ch2_im],ch3_re[,ch3_im]`.
//! Floats are written in Rust's shortest round-trip form, so a read-back
//! recording is bit-identical to the one written.
//!
//! Binary twin, little-endian, identical field order:
//!
//! ```text
//! u32  header length in bytes
//! [u8] header string (the same #ivr1 line, no newline)
//! u64  sample count
//! f64  t, ch1_re[, ch1_im], ch2_re[, ch2_im], ch3_re[, ch3_im]   (per sample)
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::synthesis::BasebandMode;

/// Three equal-length sampled baseband channels plus provenance.
#[derive(Debug, Clone)]
pub struct BasebandRecording {
    pub sample_rate: f64,
    pub t0: f64,
    pub mode: BasebandMode,
    pub channels: [Vec<Complex64>; 3],
    /// RNG seed the recording was synthesized with.
    pub seed: u64,
    /// One-line synthesis config summary.
    pub config_summary: String,
}

impl BasebandRecording {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample time of index `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.sample_rate
    }

    fn header_line(&self) -> String {
        format!(
            "#ivr1,rate={},mode={},channels=3,t0={}",
            self.sample_rate,
            self.mode.as_str(),
            self.t0
        )
    }

    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{}", self.header_line())?;
        let complex = self.mode == BasebandMode::ComplexIq;
        for k in 0..self.len() {
            write!(w, "{}", self.time_at(k))?;
            for ch in 0..3 {
                let s = self.channels[ch][k];
                if complex {
                    write!(w, ",{},{}", s.re, s.im)?;
                } else {
                    write!(w, ",{}", s.re)?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let (sample_rate, mode, t0) = parse_header(header.trim_end())?;
        let complex = mode == BasebandMode::ComplexIq;
        let per_row = if complex { 7 } else { 4 };
        let mut channels: [Vec<Complex64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != per_row {
                return Err(Error::Format(format!(
                    "row {}: expected {per_row} fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let vals: Vec<f64> = fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Format(format!("row {}: {e}", i + 2)))
                })
                .collect::<Result<_>>()?;
            for ch in 0..3 {
                let s = if complex {
                    Complex64::new(vals[1 + 2 * ch], vals[2 + 2 * ch])
                } else {
                    Complex64::new(vals[1 + ch], 0.0)
                };
                channels[ch].push(s);
            }
        }
        if channels[0].is_empty() {
            return Err(Error::Format("recording has no samples".into()));
        }
        Ok(BasebandRecording {
            sample_rate,
            t0,
            mode,
            channels,
            seed: 0,
            config_summary: String::new(),
        })
    }

    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        let header = self.header_line();
        w.write_all(&(header.len() as u32).to_le_bytes())?;
        w.write_all(header.as_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        let complex = self.mode == BasebandMode::ComplexIq;
        for k in 0..self.len() {
            w.write_all(&self.time_at(k).to_le_bytes())?;
            for ch in 0..3 {
                let s = self.channels[ch][k];
                w.write_all(&s.re.to_le_bytes())?;
                if complex {
                    w.write_all(&s.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut u32b = [0u8; 4];
        r.read_exact(&mut u32b)?;
        let hlen = u32::from_le_bytes(u32b) as usize;
        if hlen > 4096 {
            return Err(Error::Format("implausible header length".into()));
        }
        let mut hbuf = vec![0u8; hlen];
        r.read_exact(&mut hbuf)?;
        let header = String::from_utf8(hbuf).map_err(|e| Error::Format(e.to_string()))?;
        let (sample_rate, mode, t0) = parse_header(&header)?;
        let mut u64b = [0u8; 8];
        r.read_exact(&mut u64b)?;
        let n = u64::from_le_bytes(u64b) as usize;
        let complex = mode == BasebandMode::ComplexIq;
        let mut channels: [Vec<Complex64>; 3] =
            [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        let mut f64b = [0u8; 8];
        let mut read_f64 = |r: &mut R| -> Result<f64> {
            r.read_exact(&mut f64b)?;
            Ok(f64::from_le_bytes(f64b))
        };
        for _ in 0..n {
            let _t = read_f64(r)?;
            for ch in channels.iter_mut() {
                let re = read_f64(r)?;
                let im = if complex { read_f64(r)? } else { 0.0 };
                ch.push(Complex64::new(re, im));
            }
        }
        if channels[0].is_empty() {
            return Err(Error::Format("recording has no samples".into()));
        }
        Ok(BasebandRecording {
            sample_rate,
            t0,
            mode,
            channels,
            seed: 0,
            config_summary: String::new(),
        })
    }

    /// Save as text (default) or binary when `binary` is set.
    pub fn save(&self, path: &Path, binary: bool) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        if binary {
            self.write_binary(&mut w)
        } else {
            self.write_text(&mut w)
        }
    }

    /// Load either format, sniffing the `#ivr1` text magic.
    pub fn load(path: &Path) -> Result<Self> {
        let mut f = File::open(path)?;
        let mut magic = [0u8; 5];
        let got = f.read(&mut magic)?;
        drop(f);
        let f = File::open(path)?;
        if got == 5 && &magic == b"#ivr1" {
            Self::read_text(&mut BufReader::new(f))
        } else {
            Self::read_binary(&mut BufReader::new(f))
        }
    }
}

fn parse_header(line: &str) -> Result<(f64, BasebandMode, f64)> {
    let body = line
        .strip_prefix("#ivr1,")
        .ok_or_else(|| Error::Format("missing #ivr1 magic".into()))?;
    let mut rate = None;
    let mut mode = None;
    let mut t0 = None;
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field {part:?}")))?;
        match k {
            "rate" => rate = Some(v.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?),
            "mode" => {
                mode = Some(match v {
                    "complex" => BasebandMode::ComplexIq,
                    "real" => BasebandMode::Real,
                    other => return Err(Error::Format(format!("unknown mode {other:?}"))),
                })
            }
            "channels" => {
                if v != "3" {
                    return Err(Error::Format(format!("expected 3 channels, got {v}")));
                }
            }
            "t0" => t0 = Some(v.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?),
            other => return Err(Error::Format(format!("unknown header key {other:?}"))),
        }
    }
    match (rate, mode, t0) {
        (Some(r), Some(m), Some(t)) => Ok((r, m, t)),
        _ => Err(Error::Format("incomplete header".into())),
    }
}
