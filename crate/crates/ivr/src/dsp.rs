//! The processing chain: channel-pair correlation, short-time spectrograms,
//! closest-approach detection, peak-frequency estimation, and the
//! direct-downconversion null calibration.
//!
//! Real-mode recordings are analytic-extended per channel before conjugate
//! multiplication; this is the reference correlation path. The raw
//! real-by-real product is kept as [`correlate_channels_raw`] for artifact
//! studies.
//!
//! PSD normalization: `psd_k = |X_k|^2 / nfft`, with negative-frequency bins
//! folded onto positive ones for one-sided (real-input) spectrograms, so the
//! bins of one frame sum to the windowed frame energy.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::recording::BasebandRecording;
use crate::synthesis::BasebandMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Boxcar,
    Hann,
}

impl WindowKind {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            WindowKind::Boxcar => vec![1.0; n],
            WindowKind::Hann => (0..n)
                .map(|i| {
                    0.5 * (1.0
                        - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos())
                })
                .collect(),
        }
    }
}

/// How the measurement time of a pass is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaMethod {
    /// Real mode: Doppler PSD peak of channel 1; complex: envelope peak.
    Auto,
    DopplerPeak,
    EnvelopePeak,
}

/// Spectral-estimation parameters. Defaults follow the processing used for
/// the reference experiments: 250 ms boxcar window, 60% overlap, FFT size
/// 2^14, no sub-bin interpolation.
#[derive(Debug, Clone)]
pub struct EstimatorParams {
    pub window_len: f64,
    pub overlap: f64,
    pub nfft: usize,
    pub window_kind: WindowKind,
    pub interpolate: bool,
    /// Channel (Doppler) spectra below this frequency are ignored in peak
    /// searches. In real mode this is the blind zone of the
    /// direct-downconversion null: within one window the folded Doppler
    /// cannot be told from DC below about `2 / window_len`, so the
    /// measurement time must sit where the shift exceeds it. Correlation
    /// spectra are not subject to it.
    pub min_freq: f64,
    pub ca_method: CaMethod,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            window_len: 0.25,
            overlap: 0.6,
            nfft: 1 << 14,
            window_kind: WindowKind::Boxcar,
            interpolate: false,
            min_freq: 8.0,
            ca_method: CaMethod::Auto,
        }
    }
}

/// Time-frequency power distribution of one series.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub frame_times: Vec<f64>,
    pub freqs: Vec<f64>,
    /// `psd[frame][freq_bin]`, nonnegative.
    pub psd: Vec<Vec<f64>>,
    pub window_len: f64,
    pub overlap: f64,
    pub nfft: usize,
    pub window_kind: WindowKind,
    pub one_sided: bool,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.frame_times.len()
    }

    /// Frequency bin spacing, Hz.
    pub fn bin_width(&self) -> f64 {
        if self.freqs.len() > 1 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }

    /// Index of the frame whose center time is nearest `t`.
    pub fn frame_index_nearest(&self, t: f64) -> Result<usize> {
        if self.frame_times.is_empty() {
            return Err(Error::InvalidArgument("spectrogram has no frames".into()));
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &ft) in self.frame_times.iter().enumerate() {
            let d = (ft - t).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }

    /// Export as `t,f,psd` CSV rows.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,f,psd")?;
        for (fi, &ft) in self.frame_times.iter().enumerate() {
            for (bi, &f) in self.freqs.iter().enumerate() {
                writeln!(w, "{},{},{}", ft, f, self.psd[fi][bi])?;
            }
        }
        Ok(())
    }

    /// Gridded little-endian binary dump: u64 frame count, u64 bin count,
    /// frame times, frequencies, then the PSD matrix row-major.
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.n_frames() as u64).to_le_bytes())?;
        w.write_all(&(self.freqs.len() as u64).to_le_bytes())?;
        for &t in &self.frame_times {
            w.write_all(&t.to_le_bytes())?;
        }
        for &f in &self.freqs {
            w.write_all(&f.to_le_bytes())?;
        }
        for row in &self.psd {
            for &p in row {
                w.write_all(&p.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Interpolated (or raw-bin) spectral peak of one frame.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPeak {
    pub t: f64,
    pub f: f64,
    pub psd_peak: f64,
    pub interpolated: bool,
}

/// FFT-based analytic signal of a real series. The input is zero-padded to
/// the next power of two internally and truncated back.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let m = n.next_power_of_two().max(2);
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(m, Complex64::ZERO);
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    for s in buf.iter_mut().take(half).skip(1) {
        *s *= 2.0;
    }
    for s in buf.iter_mut().skip(half + 1) {
        *s = Complex64::ZERO;
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.truncate(n);
    for s in buf.iter_mut() {
        *s *= scale;
    }
    buf
}

fn channel_series(rec: &BasebandRecording, ch: usize) -> Result<Vec<Complex64>> {
    if ch >= 3 {
        return Err(Error::InvalidArgument(format!("channel index {ch} out of range")));
    }
    match rec.mode {
        BasebandMode::ComplexIq => Ok(rec.channels[ch].clone()),
        BasebandMode::Real => {
            let re: Vec<f64> = rec.channels[ch].iter().map(|s| s.re).collect();
            Ok(analytic_signal(&re))
        }
    }
}

/// Elementwise `r_a * conj(r_b)`. Real-mode channels are analytic-extended
/// first so the beat phase is single-sided and well defined.
pub fn correlate_channels(
    rec: &BasebandRecording,
    a: usize,
    b: usize,
) -> Result<Vec<Complex64>> {
    let sa = channel_series(rec, a)?;
    let sb = channel_series(rec, b)?;
    Ok(sa.iter().zip(&sb).map(|(x, y)| x * y.conj()).collect())
}

/// Raw correlation without the analytic extension (real-by-real product in
/// real mode). Kept for studying the direct-downconversion artifacts.
pub fn correlate_channels_raw(
    rec: &BasebandRecording,
    a: usize,
    b: usize,
) -> Result<Vec<Complex64>> {
    if a >= 3 || b >= 3 {
        return Err(Error::InvalidArgument(format!("channel index ({a},{b}) out of range")));
    }
    Ok(rec.channels[a]
        .iter()
        .zip(&rec.channels[b])
        .map(|(x, y)| x * y.conj())
        .collect())
}

struct StftPlan {
    win: Vec<f64>,
    hop: usize,
}

fn stft_plan(
    len: usize,
    sample_rate: f64,
    window_len: f64,
    overlap: f64,
    nfft: usize,
    kind: WindowKind,
) -> Result<StftPlan> {
    let win_samples = (window_len * sample_rate).round() as usize;
    if win_samples < 8 {
        return Err(Error::InvalidArgument(format!(
            "window of {win_samples} samples is below the 8-sample minimum"
        )));
    }
    if nfft < win_samples {
        return Err(Error::InvalidArgument(format!(
            "nfft {nfft} smaller than window ({win_samples} samples)"
        )));
    }
    if !(0.0..=0.95).contains(&overlap) {
        return Err(Error::InvalidArgument(format!("overlap {overlap} outside [0, 0.95]")));
    }
    if len < win_samples {
        return Err(Error::InvalidArgument(format!(
            "series of {len} samples shorter than the {win_samples}-sample window"
        )));
    }
    let hop = ((win_samples as f64) * (1.0 - overlap)).round().max(1.0) as usize;
    Ok(StftPlan { win: kind.coefficients(win_samples), hop })
}

/// Two-sided spectrogram of a complex series; frequency axis ascending from
/// `-fs/2` to `+fs/2`.
pub fn spectrogram_complex(
    series: &[Complex64],
    sample_rate: f64,
    t0: f64,
    window_len: f64,
    overlap: f64,
    nfft: usize,
    kind: WindowKind,
) -> Result<Spectrogram> {
    let plan = stft_plan(series.len(), sample_rate, window_len, overlap, nfft, kind)?;
    let w = plan.win.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nfft);
    let half = nfft / 2;
    let df = sample_rate / nfft as f64;
    let freqs: Vec<f64> = (0..nfft).map(|m| (m as f64 - half as f64) * df).collect();

    let mut frame_times = Vec::new();
    let mut psd = Vec::new();
    let mut start = 0;
    let mut buf = vec![Complex64::ZERO; nfft];
    while start + w <= series.len() {
        for (i, s) in buf.iter_mut().enumerate() {
            *s = if i < w { series[start + i] * plan.win[i] } else { Complex64::ZERO };
        }
        fft.process(&mut buf);
        let mut row = vec![0.0; nfft];
        for (m, r) in row.iter_mut().enumerate() {
            let k = (m + half) % nfft;
            *r = buf[k].norm_sqr() / nfft as f64;
        }
        frame_times.push(t0 + (start as f64 + (w as f64 - 1.0) / 2.0) / sample_rate);
        psd.push(row);
        start += plan.hop;
    }
    Ok(Spectrogram {
        frame_times,
        freqs,
        psd,
        window_len,
        overlap,
        nfft,
        window_kind: kind,
        one_sided: false,
    })
}

/// One-sided spectrogram of a real series (negative-frequency power folded
/// onto the positive bins).
pub fn spectrogram_real(
    series: &[f64],
    sample_rate: f64,
    t0: f64,
    window_len: f64,
    overlap: f64,
    nfft: usize,
    kind: WindowKind,
) -> Result<Spectrogram> {
    let plan = stft_plan(series.len(), sample_rate, window_len, overlap, nfft, kind)?;
    let w = plan.win.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nfft);
    let half = nfft / 2;
    let df = sample_rate / nfft as f64;
    let freqs: Vec<f64> = (0..=half).map(|m| m as f64 * df).collect();

    let mut frame_times = Vec::new();
    let mut psd = Vec::new();
    let mut start = 0;
    let mut buf = vec![Complex64::ZERO; nfft];
    while start + w <= series.len() {
        for (i, s) in buf.iter_mut().enumerate() {
            *s = if i < w {
                Complex64::new(series[start + i] * plan.win[i], 0.0)
            } else {
                Complex64::ZERO
            };
        }
        fft.process(&mut buf);
        let mut row = vec![0.0; half + 1];
        row[0] = buf[0].norm_sqr() / nfft as f64;
        for (k, r) in row.iter_mut().enumerate().take(half).skip(1) {
            *r = (buf[k].norm_sqr() + buf[nfft - k].norm_sqr()) / nfft as f64;
        }
        row[half] = buf[half].norm_sqr() / nfft as f64;
        frame_times.push(t0 + (start as f64 + (w as f64 - 1.0) / 2.0) / sample_rate);
        psd.push(row);
        start += plan.hop;
    }
    Ok(Spectrogram {
        frame_times,
        freqs,
        psd,
        window_len,
        overlap,
        nfft,
        window_kind: kind,
        one_sided: true,
    })
}

/// Spectrogram of one raw channel: one-sided for real recordings, two-sided
/// for complex ones.
pub fn channel_spectrogram(
    rec: &BasebandRecording,
    ch: usize,
    params: &EstimatorParams,
) -> Result<Spectrogram> {
    if ch >= 3 {
        return Err(Error::InvalidArgument(format!("channel index {ch} out of range")));
    }
    match rec.mode {
        BasebandMode::Real => {
            let re: Vec<f64> = rec.channels[ch].iter().map(|s| s.re).collect();
            spectrogram_real(
                &re,
                rec.sample_rate,
                rec.t0,
                params.window_len,
                params.overlap,
                params.nfft,
                params.window_kind,
            )
        }
        BasebandMode::ComplexIq => spectrogram_complex(
            &rec.channels[ch],
            rec.sample_rate,
            rec.t0,
            params.window_len,
            params.overlap,
            params.nfft,
            params.window_kind,
        ),
    }
}

/// Spectrogram of the pair correlation `a * conj(b)`; always two-sided since
/// the correlation series is complex in either mode.
pub fn correlation_spectrogram(
    rec: &BasebandRecording,
    a: usize,
    b: usize,
    params: &EstimatorParams,
) -> Result<Spectrogram> {
    let corr = correlate_channels(rec, a, b)?;
    spectrogram_complex(
        &corr,
        rec.sample_rate,
        rec.t0,
        params.window_len,
        params.overlap,
        params.nfft,
        params.window_kind,
    )
}

/// Single-frame periodogram of a whole complex series (boxcar or Hann over
/// everything, zero-padded to `nfft`).
pub fn periodogram_complex(
    series: &[Complex64],
    sample_rate: f64,
    t0: f64,
    nfft: usize,
    kind: WindowKind,
) -> Result<Spectrogram> {
    let window_len = series.len() as f64 / sample_rate;
    spectrogram_complex(series, sample_rate, t0, window_len, 0.0, nfft, kind)
}

/// Estimate the measurement time of a pass.
///
/// `DopplerPeak` returns the frame time of the global PSD maximum of channel
/// 1's spectrogram, ignoring bins below `min_freq`; `EnvelopePeak` returns
/// the sample time of the maximum smoothed envelope of channel 1. `Auto`
/// resolves to `DopplerPeak` for real recordings and `EnvelopePeak` for
/// complex ones.
pub fn estimate_closest_approach(
    rec: &BasebandRecording,
    params: &EstimatorParams,
    method: CaMethod,
) -> Result<f64> {
    let method = match method {
        CaMethod::Auto => match rec.mode {
            BasebandMode::Real => CaMethod::DopplerPeak,
            BasebandMode::ComplexIq => CaMethod::EnvelopePeak,
        },
        m => m,
    };
    match method {
        CaMethod::EnvelopePeak => {
            let env: Vec<f64> = match rec.mode {
                BasebandMode::ComplexIq => rec.channels[0].iter().map(|s| s.norm()).collect(),
                BasebandMode::Real => {
                    let re: Vec<f64> = rec.channels[0].iter().map(|s| s.re).collect();
                    analytic_signal(&re).iter().map(|s| s.norm()).collect()
                }
            };
            let smooth_win = ((0.05 * rec.sample_rate).round() as usize).max(3) | 1;
            let sm = moving_average(&env, smooth_win);
            let (idx, peak) = argmax(&sm);
            if peak <= 0.0 {
                return Err(Error::DetectionFailure("envelope is identically zero".into()));
            }
            Ok(rec.time_at(idx))
        }
        CaMethod::DopplerPeak => {
            let spec = channel_spectrogram(rec, 0, params)?;
            let mut best = (0usize, 0usize, f64::NEG_INFINITY);
            let mut included = Vec::new();
            for (fi, row) in spec.psd.iter().enumerate() {
                for (bi, &p) in row.iter().enumerate() {
                    if spec.freqs[bi].abs() < params.min_freq {
                        continue;
                    }
                    included.push(p);
                    if p > best.2 {
                        best = (fi, bi, p);
                    }
                }
            }
            if included.is_empty() {
                return Err(Error::DetectionFailure("no bins above min_freq".into()));
            }
            let med = median(&mut included);
            // a real tone sits orders of magnitude above the cell median
            if !(best.2 > 0.0) || best.2 < 50.0 * med {
                return Err(Error::DetectionFailure(format!(
                    "peak PSD {:.3e} not above the noise floor (median {:.3e})",
                    best.2, med
                )));
            }
            Ok(spec.frame_times[best.0])
        }
        CaMethod::Auto => unreachable!(),
    }
}

/// Peak PSD of the frame nearest `t`, optionally refined by 3-point
/// parabolic interpolation on the log PSD. Ties break toward the lowest
/// frequency.
pub fn peak_frequency(spec: &Spectrogram, t: f64, interpolate: bool) -> Result<SpectralPeak> {
    peak_frequency_in_band(spec, t, interpolate, f64::NEG_INFINITY, f64::INFINITY)
}

/// [`peak_frequency`] restricted to bins with `f_lo <= f <= f_hi`.
pub fn peak_frequency_in_band(
    spec: &Spectrogram,
    t: f64,
    interpolate: bool,
    f_lo: f64,
    f_hi: f64,
) -> Result<SpectralPeak> {
    let fi = spec.frame_index_nearest(t)?;
    let row = &spec.psd[fi];
    if row.is_empty() {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    let mut best: Option<usize> = None;
    for (bi, &p) in row.iter().enumerate() {
        let f = spec.freqs[bi];
        if f < f_lo || f > f_hi {
            continue;
        }
        if best.is_none_or(|b| p > row[b]) {
            best = Some(bi);
        }
    }
    let bi = best.ok_or_else(|| {
        Error::InvalidArgument(format!("no bins inside band [{f_lo}, {f_hi}]"))
    })?;
    if row[bi] <= 0.0 {
        return Err(Error::DetectionFailure("frame PSD is identically zero".into()));
    }

    let mut f = spec.freqs[bi];
    let mut interpolated = false;
    if interpolate && bi > 0 && bi + 1 < row.len() {
        let (l, c, r) = (row[bi - 1], row[bi], row[bi + 1]);
        if l > 0.0 && r > 0.0 {
            let (yl, yc, yr) = (l.ln(), c.ln(), r.ln());
            let denom = yl - 2.0 * yc + yr;
            if denom.abs() > 1e-300 {
                let delta = (0.5 * (yl - yr) / denom).clamp(-0.5, 0.5);
                f += delta * spec.bin_width();
                interpolated = true;
            }
        }
    }
    Ok(SpectralPeak { t: spec.frame_times[fi], f, psd_peak: row[bi], interpolated })
}

/// Power-weighted centroid frequency of the contiguous region around the
/// frame's peak bin that stays above `rel_floor_db` of the peak, restricted
/// to `[f_lo, f_hi]`.
///
/// Near the zenith crossing the Doppler tone sweeps across a window, so the
/// raw peak bin lands on a ripple of the swept band; the band centroid reads
/// the mid-window frequency instead.
pub fn centroid_frequency_in_band(
    spec: &Spectrogram,
    t: f64,
    f_lo: f64,
    f_hi: f64,
    rel_floor_db: f64,
) -> Result<SpectralPeak> {
    let pk = peak_frequency_in_band(spec, t, false, f_lo, f_hi)?;
    let fi = spec.frame_index_nearest(t)?;
    let row = &spec.psd[fi];
    let pk_bin = spec.freqs.iter().position(|&f| f == pk.f).unwrap_or(0);
    let floor = pk.psd_peak * 10f64.powf(rel_floor_db / 10.0);
    let in_band = |i: usize| spec.freqs[i] >= f_lo && spec.freqs[i] <= f_hi;

    let mut lo = pk_bin;
    while lo > 0 && row[lo - 1] >= floor && in_band(lo - 1) {
        lo -= 1;
    }
    let mut hi = pk_bin;
    while hi + 1 < row.len() && row[hi + 1] >= floor && in_band(hi + 1) {
        hi += 1;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in lo..=hi {
        num += spec.freqs[i] * row[i];
        den += row[i];
    }
    Ok(SpectralPeak { t: pk.t, f: num / den, psd_peak: pk.psd_peak, interpolated: true })
}

/// Convert a measurement taken `t_peak - t_zenith` off the nominal zenith
/// crossing into the corrected range and off-axis angle of a linear pass:
/// `alpha = atan(direction * speed * dt / r)`, `R = r / cos(alpha)`.
/// Identity when the offset is zero.
pub fn dc_null_calibration(
    assumed_speed: f64,
    direction: f64,
    t_peak: f64,
    t_zenith: f64,
    r_nominal: f64,
) -> Result<(f64, f64)> {
    if !(r_nominal > 0.0) {
        return Err(Error::InvalidArgument("nominal range must be positive".into()));
    }
    let alpha = (direction * assumed_speed * (t_peak - t_zenith) / r_nominal).atan();
    Ok((r_nominal / alpha.cos(), alpha))
}

/// Count distinct spectral lobes: local maxima above `rel_threshold_db` of
/// the global maximum, separated by at least `min_separation_hz` (greedy,
/// strongest first).
pub fn count_spectral_peaks(
    freqs: &[f64],
    psd: &[f64],
    rel_threshold_db: f64,
    min_separation_hz: f64,
) -> usize {
    let peak = psd.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0;
    }
    let thresh = peak * 10f64.powf(rel_threshold_db / 10.0);
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for i in 1..psd.len().saturating_sub(1) {
        if psd[i] >= thresh && psd[i] > psd[i - 1] && psd[i] >= psd[i + 1] {
            maxima.push((freqs[i], psd[i]));
        }
    }
    maxima.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut accepted: Vec<f64> = Vec::new();
    for (f, _) in maxima {
        if accepted.iter().all(|&a| (a - f).abs() >= min_separation_hz) {
            accepted.push(f);
        }
    }
    accepted.len()
}

/// Centered moving average; window is truncated at the edges.
pub fn moving_average(x: &[f64], win: usize) -> Vec<f64> {
    let half = win / 2;
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    // prefix sums for O(n)
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        out.push((prefix[hi] - prefix[lo]) / (hi - lo) as f64);
    }
    out
}

fn argmax(x: &[f64]) -> (usize, f64) {
    let mut bi = 0;
    let mut bv = f64::NEG_INFINITY;
    for (i, &v) in x.iter().enumerate() {
        if v > bv {
            bv = v;
            bi = i;
        }
    }
    (bi, bv)
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}
