//! Short-time Fourier transform on local frames and the STFT-based norms.
//!
//! Windows decay fast, so `f conj(phi(. - x))` is computed on a frame of `M`
//! samples around each shift `x` rather than on the full grid. The frame
//! frequencies are `xi_k = (k - M/2) / (M h)`; sums over them are exact
//! Plancherel sums for the frame. Shifts advance by a fixed hop.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{japanese_bracket, SpaceKind, SpaceParams};
use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};

/// Positions per reduction chunk. Fixed so results do not depend on the
/// number of worker threads.
const CHUNK: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StftConfig {
    /// Target spacing of window shifts (rounded to a whole number of samples).
    pub x_step: f64,
    /// Window samples below `threshold * max|phi|` are treated as outside
    /// its support when sizing frames.
    pub threshold: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            x_step: 0.125,
            threshold: 1e-16,
        }
    }
}

#[derive(Clone, Debug)]
struct Layout {
    dim: usize,
    n: usize,
    frame: usize,
    /// Axis indices of window centres.
    centres: Vec<usize>,
    h: f64,
    x_cell: f64,
    xi_cell: f64,
    /// `conj(phi)` restricted to the frame, with the `(-1)^i` centring factor.
    window: Vec<Complex64>,
    /// `<xi_k>^s` is built per request from these frame frequencies.
    xi: Vec<f64>,
}

impl Layout {
    fn new(f: &GridFunction, window: &GridFunction, cfg: &StftConfig) -> Result<Self> {
        f.require_domain(Domain::Space)?;
        window.check_compatible(f)?;
        let peak = window.max_abs();
        if peak == 0.0 {
            return Err(Error::ZeroWindow);
        }
        if !(cfg.x_step > 0.0 && cfg.threshold >= 0.0) {
            return Err(Error::InvalidParameter("STFT step must be positive".into()));
        }
        let spec = *f.spec();
        let (dim, n, h) = (spec.dim(), spec.points(), spec.step());
        let c = n / 2;

        let mut radius = 0usize;
        for (idx, v) in window.values().iter().enumerate() {
            if v.norm() > cfg.threshold * peak {
                let ix = spec.unravel(idx);
                for &i in &ix[..dim] {
                    radius = radius.max(i.abs_diff(c));
                }
            }
        }
        let frame = (4 * radius.max(1)).next_power_of_two().clamp(16, n);
        let hop = ((cfg.x_step / h).round() as usize).max(1);

        let first = c % hop;
        let centres: Vec<usize> = (first..n).step_by(hop).collect();

        let off = c - frame / 2;
        let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        let window_frame: Vec<Complex64> = if dim == 1 {
            (0..frame)
                .map(|i| window.values()[off + i].conj() * sign(i))
                .collect()
        } else {
            let mut w = Vec::with_capacity(frame * frame);
            for i in 0..frame {
                for j in 0..frame {
                    w.push(window.values()[(off + i) * n + off + j].conj() * sign(i + j));
                }
            }
            w
        };
        let xi_step = 1.0 / (frame as f64 * h);
        let xi = (0..frame)
            .map(|k| (k as f64 - (frame / 2) as f64) * xi_step)
            .collect();

        Ok(Self {
            dim,
            n,
            frame,
            centres,
            h,
            x_cell: (hop as f64 * h).powi(dim as i32),
            xi_cell: xi_step.powi(dim as i32),
            window: window_frame,
            xi,
        })
    }

    fn positions(&self) -> usize {
        self.centres.len().pow(self.dim as u32)
    }

    fn frame_len(&self) -> usize {
        self.frame.pow(self.dim as u32)
    }

    /// Flattened frame frequencies as points.
    fn xi_point(&self, k: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.xi[k], 0.0]
        } else {
            [self.xi[k / self.frame], self.xi[k % self.frame]]
        }
    }

    fn centre_point(&self, pos: usize, spec_coord: impl Fn(usize) -> f64) -> [f64; 2] {
        if self.dim == 1 {
            [spec_coord(self.centres[pos]), 0.0]
        } else {
            let m = self.centres.len();
            [
                spec_coord(self.centres[pos / m]),
                spec_coord(self.centres[pos % m]),
            ]
        }
    }
}

/// Per-thread FFT state.
struct FrameEngine {
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    buf: Vec<Complex64>,
    column: Vec<Complex64>,
}

impl FrameEngine {
    fn new(layout: &Layout) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(layout.frame);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Self {
            fft,
            scratch,
            buf: vec![Complex64::new(0.0, 0.0); layout.frame_len()],
            column: vec![Complex64::new(0.0, 0.0); layout.frame],
        }
    }

    /// Fill `buf` with the unphased frame spectrum at position `pos`.
    /// Returns false when the windowed frame is identically zero.
    fn compute(&mut self, layout: &Layout, f: &[Complex64], pos: usize) -> bool {
        let (n, m) = (layout.n as i64, layout.frame);
        let half = (m / 2) as i64;
        let mut any = false;
        if layout.dim == 1 {
            let start = layout.centres[pos] as i64 - half;
            for i in 0..m {
                let j = start + i as i64;
                let v = if j >= 0 && j < n { f[j as usize] * layout.window[i] } else { Complex64::new(0.0, 0.0) };
                any |= v.re != 0.0 || v.im != 0.0;
                self.buf[i] = v;
            }
            if !any {
                return false;
            }
            self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        } else {
            let cn = layout.centres.len();
            let r0 = layout.centres[pos / cn] as i64 - half;
            let c0 = layout.centres[pos % cn] as i64 - half;
            for i in 0..m {
                let r = r0 + i as i64;
                for j in 0..m {
                    let c = c0 + j as i64;
                    let v = if r >= 0 && r < n && c >= 0 && c < n {
                        f[(r * n + c) as usize] * layout.window[i * m + j]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    any |= v.re != 0.0 || v.im != 0.0;
                    self.buf[i * m + j] = v;
                }
            }
            if !any {
                return false;
            }
            for row in self.buf.chunks_exact_mut(m) {
                self.fft.process_with_scratch(row, &mut self.scratch);
            }
            for c in 0..m {
                for r in 0..m {
                    self.column[r] = self.buf[r * m + c];
                }
                self.fft.process_with_scratch(&mut self.column, &mut self.scratch);
                for r in 0..m {
                    self.buf[r * m + c] = self.column[r];
                }
            }
        }
        true
    }
}

/// Full STFT samples, positions by frame frequencies (row-major).
#[derive(Clone, Debug)]
pub struct Stft {
    pub dim: usize,
    /// Window shifts.
    pub x: Vec<[f64; 2]>,
    /// Frame frequencies.
    pub xi: Vec<[f64; 2]>,
    pub values: Vec<Complex64>,
    pub x_cell: f64,
    pub xi_cell: f64,
}

impl Stft {
    pub fn at(&self, pos: usize, k: usize) -> Complex64 {
        self.values[pos * self.xi.len() + k]
    }

    /// `L^2` norm over `(x, xi)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.x_cell * self.xi_cell).sqrt()
    }
}

/// `V_phi f(x, xi) = \int f(y) conj(phi(y - x)) e^{-2 pi i y . xi} dy`.
pub fn stft(f: &GridFunction, window: &GridFunction) -> Result<Stft> {
    stft_with(f, window, &StftConfig::default())
}

pub fn stft_with(f: &GridFunction, window: &GridFunction, cfg: &StftConfig) -> Result<Stft> {
    let layout = Layout::new(f, window, cfg)?;
    let spec = *f.spec();
    let fl = layout.frame_len();
    let x: Vec<[f64; 2]> = (0..layout.positions())
        .map(|pos| layout.centre_point(pos, |i| spec.coordinate(Domain::Space, i)))
        .collect();
    let xi: Vec<[f64; 2]> = (0..fl).map(|k| layout.xi_point(k)).collect();
    let scale = layout.h.powi(layout.dim as i32);

    let mut values = vec![Complex64::new(0.0, 0.0); x.len() * fl];
    values
        .par_chunks_mut(fl * CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut engine = FrameEngine::new(&layout);
            for (local, row) in out.chunks_exact_mut(fl).enumerate() {
                let pos = chunk * CHUNK + local;
                if !engine.compute(&layout, f.values(), pos) {
                    continue;
                }
                let xp = x[pos];
                for (k, slot) in row.iter_mut().enumerate() {
                    let xk = xi[k];
                    // Undo the frame centring: (-1)^k per axis and the phase
                    // of the frame origin.
                    let parity = if layout.dim == 1 {
                        k
                    } else {
                        k / layout.frame + k % layout.frame
                    };
                    let sign = if parity % 2 == 0 { scale } else { -scale };
                    let phase = -2.0 * std::f64::consts::PI * (xp[0] * xk[0] + xp[1] * xk[1]);
                    *slot = engine.buf[k] * Complex64::from_polar(sign, phase);
                }
            }
        });

    Ok(Stft {
        dim: layout.dim,
        x,
        xi,
        values,
        x_cell: layout.x_cell,
        xi_cell: layout.xi_cell,
    })
}

#[inline]
fn pow_abs(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// Accumulator for one norm request over a chunk of positions.
#[derive(Clone)]
enum Acc {
    /// Per-frequency `sum_x |V|^p` (or max).
    Modulation(Vec<f64>),
    /// `sum_x J(x)^p` (or max) with `J(x)` the inner frequency norm.
    Wiener(f64),
}

/// Evaluate several STFT norms with one pass over the frames.
/// Requests must be of modulation or Wiener kind.
pub fn stft_norms(
    f: &GridFunction,
    window: &GridFunction,
    cfg: &StftConfig,
    requests: &[SpaceParams],
) -> Result<Vec<f64>> {
    for r in requests {
        if r.kind == SpaceKind::Lebesgue {
            return Err(Error::InvalidParameter(
                "STFT norms are defined for modulation and Wiener spaces only".into(),
            ));
        }
    }
    let layout = Layout::new(f, window, cfg)?;
    let fl = layout.frame_len();
    let scale = layout.h.powi(layout.dim as i32);
    let weights: Vec<Vec<f64>> = requests
        .iter()
        .map(|r| {
            (0..fl)
                .map(|k| japanese_bracket(&layout.xi_point(k)[..layout.dim], r.s))
                .collect()
        })
        .collect();
    let fresh = || -> Vec<Acc> {
        requests
            .iter()
            .map(|r| match r.kind {
                SpaceKind::Modulation => Acc::Modulation(vec![0.0; fl]),
                _ => Acc::Wiener(0.0),
            })
            .collect()
    };

    let positions = layout.positions();
    let chunks = positions.div_ceil(CHUNK);
    let partials: Vec<Vec<Acc>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut engine = FrameEngine::new(&layout);
            let mut accs = fresh();
            let mut mag = vec![0.0; fl];
            for pos in chunk * CHUNK..((chunk + 1) * CHUNK).min(positions) {
                if !engine.compute(&layout, f.values(), pos) {
                    continue;
                }
                for (m, v) in mag.iter_mut().zip(&engine.buf) {
                    *m = v.norm() * scale;
                }
                for ((acc, r), w) in accs.iter_mut().zip(requests).zip(&weights) {
                    match acc {
                        Acc::Modulation(rows) => {
                            if r.p.is_infinite() {
                                for (s, m) in rows.iter_mut().zip(&mag) {
                                    *s = s.max(*m);
                                }
                            } else {
                                for (s, m) in rows.iter_mut().zip(&mag) {
                                    *s += pow_abs(*m, r.p);
                                }
                            }
                        }
                        Acc::Wiener(total) => {
                            let inner = if r.q.is_infinite() {
                                mag.iter().zip(w).map(|(m, w)| m * w).fold(0.0, f64::max)
                            } else {
                                let sum: f64 =
                                    mag.iter().zip(w).map(|(m, w)| pow_abs(m * w, r.q)).sum();
                                (sum * layout.xi_cell).powf(1.0 / r.q)
                            };
                            if r.p.is_infinite() {
                                *total = total.max(inner);
                            } else {
                                *total += pow_abs(inner, r.p);
                            }
                        }
                    }
                }
            }
            accs
        })
        .collect();

    let mut totals = fresh();
    for part in partials {
        for ((t, p), r) in totals.iter_mut().zip(part).zip(requests) {
            match (t, p) {
                (Acc::Modulation(a), Acc::Modulation(b)) => {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x = if r.p.is_infinite() { x.max(y) } else { *x + y };
                    }
                }
                (Acc::Wiener(a), Acc::Wiener(b)) => {
                    *a = if r.p.is_infinite() { a.max(b) } else { *a + b };
                }
                _ => unreachable!("accumulators share request order"),
            }
        }
    }

    Ok(totals
        .into_iter()
        .zip(requests)
        .zip(&weights)
        .map(|((acc, r), w)| match acc {
            Acc::Modulation(rows) => {
                let row_norm = |s: f64| {
                    if r.p.is_infinite() {
                        s
                    } else {
                        (s * layout.x_cell).powf(1.0 / r.p)
                    }
                };
                if r.q.is_infinite() {
                    rows.iter().zip(w).map(|(s, w)| w * row_norm(*s)).fold(0.0, f64::max)
                } else {
                    let sum: f64 = rows.iter().zip(w).map(|(s, w)| pow_abs(w * row_norm(*s), r.q)).sum();
                    (sum * layout.xi_cell).powf(1.0 / r.q)
                }
            }
            Acc::Wiener(total) => {
                if r.p.is_infinite() {
                    total
                } else {
                    (total * layout.x_cell).powf(1.0 / r.p)
                }
            }
        })
        .collect())
}

/// Continuous modulation norm: `L^p` in `x`, then weighted `L^q` in `xi`.
pub fn modulation_norm_continuous(
    f: &GridFunction,
    params: &SpaceParams,
    window: &GridFunction,
) -> Result<f64> {
    if params.kind != SpaceKind::Modulation {
        return Err(Error::InvalidParameter(format!(
            "expected modulation parameters, got {}",
            params.kind
        )));
    }
    Ok(stft_norms(f, window, &StftConfig::default(), std::slice::from_ref(params))?[0])
}

/// Wiener amalgam norm: weighted `L^q` in `xi`, then `L^p` in `x`.
pub fn wiener_norm(f: &GridFunction, params: &SpaceParams, window: &GridFunction) -> Result<f64> {
    if params.kind != SpaceKind::Wiener {
        return Err(Error::InvalidParameter(format!(
            "expected Wiener parameters, got {}",
            params.kind
        )));
    }
    Ok(stft_norms(f, window, &StftConfig::default(), std::slice::from_ref(params))?[0])
}
