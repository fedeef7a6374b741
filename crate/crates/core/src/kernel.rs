//! Radial kernels as piecewise power laws, with exact moment integrals.
//!
//! A kernel is `Phi(y) = c_i |y|^{alpha_i}` on `r_lo_i <= |y| < r_hi_i`. Every
//! integral `\int |y|^beta Phi(y) dy` reduces to one-dimensional power
//! integrals with closed-form antiderivatives, so divergence is decided by
//! exponent arithmetic alone.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timefreq::SpaceParams;

/// Exponents within this distance of `-1` integrate to a logarithm.
pub const LOG_BRANCH_TOL: f64 = 1e-12;

/// Surface measure of the unit sphere in `R^n`.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => unreachable!("dimension validated on construction"),
    }
}

/// Extended nonnegative real produced by a moment integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn is_finite(&self) -> bool {
        matches!(self, Moment::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(*v),
            Moment::Divergent => None,
        }
    }

    /// `+inf` for divergent moments.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl Add for Moment {
    type Output = Moment;
    fn add(self, rhs: Moment) -> Moment {
        match (self, rhs) {
            (Moment::Finite(a), Moment::Finite(b)) => Moment::Finite(a + b),
            _ => Moment::Divergent,
        }
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Divergent => write!(f, "+inf"),
        }
    }
}

impl Serialize for Moment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Moment::Finite(v) => s.serialize_f64(*v),
            Moment::Divergent => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Moment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Moment::Finite(v)),
            Raw::Text(t) if parse_infinity(&t) => Ok(Moment::Divergent),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("not a moment value: {t}"))),
        }
    }
}

fn parse_infinity(t: &str) -> bool {
    matches!(
        t.trim().to_ascii_lowercase().as_str(),
        "inf" | "+inf" | "infinity" | "+infinity"
    )
}

/// `\int_a^b r^e dr` for `0 <= a < b <= inf`.
pub fn power_integral(e: f64, a: f64, b: f64) -> Moment {
    debug_assert!(a >= 0.0 && a < b);
    let k = e + 1.0;
    if k.abs() <= LOG_BRANCH_TOL {
        if a == 0.0 || b.is_infinite() {
            return Moment::Divergent;
        }
        return Moment::Finite((b / a).ln());
    }
    if a == 0.0 && k < 0.0 {
        return Moment::Divergent;
    }
    if b.is_infinite() && k > 0.0 {
        return Moment::Divergent;
    }
    let upper = if b.is_infinite() { 0.0 } else { b.powf(k) };
    let lower = if a == 0.0 { 0.0 } else { a.powf(k) };
    Moment::Finite((upper - lower) / k)
}

/// One power-law piece `c r^alpha` on `[r_lo, r_hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub r_lo: f64,
    pub r_hi: f64,
    pub c: f64,
    pub alpha: f64,
}

impl Segment {
    pub fn new(r_lo: f64, r_hi: f64, c: f64, alpha: f64) -> Self {
        Self { r_lo, r_hi, c, alpha }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= self.r_lo && r < self.r_hi && self.c != 0.0 {
            self.c * r.powf(self.alpha)
        } else {
            0.0
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |what: String| Err(Error::Kernel(format!("segment {index}: {what}")));
        if !(self.r_lo.is_finite() && self.r_lo >= 0.0) {
            return bad(format!("r_lo must be finite and >= 0, got {}", self.r_lo));
        }
        if self.r_hi.is_nan() || self.r_hi <= self.r_lo {
            return bad(format!("need r_lo < r_hi, got [{}, {}]", self.r_lo, self.r_hi));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return bad(format!("coefficient must be finite and >= 0, got {}", self.c));
        }
        if !self.alpha.is_finite() {
            return bad(format!("power must be finite, got {}", self.alpha));
        }
        Ok(())
    }
}

/// Nonnegative radial kernel on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialKernel {
    dim: usize,
    segments: Vec<Segment>,
}

impl RadialKernel {
    /// Validate and sort segments; overlapping radii are rejected.
    pub fn new(dim: usize, mut segments: Vec<Segment>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Kernel(format!("dimension must be 1 or 2, got {dim}")));
        }
        for (i, s) in segments.iter().enumerate() {
            s.validate(i)?;
        }
        segments.sort_by(|a, b| a.r_lo.total_cmp(&b.r_lo));
        for w in segments.windows(2) {
            if w[0].r_hi > w[1].r_lo {
                return Err(Error::Kernel(format!(
                    "segments [{}, {}) and [{}, {}) overlap",
                    w[0].r_lo, w[0].r_hi, w[1].r_lo, w[1].r_hi
                )));
            }
        }
        Ok(Self { dim, segments })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    /// `c` times the indicator of `a <= |y| < b`.
    pub fn indicator(dim: usize, c: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(dim, vec![Segment::new(a, b, c, 0.0)])
    }

    pub fn power(dim: usize, c: f64, alpha: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(dim, vec![Segment::new(a, b, c, alpha)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Segments that actually carry mass.
    pub fn active_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.c > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.active_segments().next().is_none()
    }

    /// `Phi` at radius `r`.
    pub fn value(&self, r: f64) -> f64 {
        self.segments.iter().map(|s| s.value(r)).sum()
    }

    /// Concatenate the segments of two kernels with disjoint supports.
    pub fn concat(&self, other: &RadialKernel) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Kernel("cannot combine kernels of different dimension".into()));
        }
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        Self::new(self.dim, segs)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.dim,
            self.segments
                .iter()
                .map(|s| Segment { c: s.c * factor, ..*s })
                .collect(),
        )
    }

    /// `\int_{R^n} |y|^beta Phi(y) dy`.
    pub fn moment(&self, beta: f64) -> Moment {
        self.moment_over(beta, 0.0, f64::INFINITY)
    }

    /// `\int_{a <= |y| <= b} |y|^beta Phi(y) dy`.
    pub fn moment_over(&self, beta: f64, a: f64, b: f64) -> Moment {
        let omega = sphere_measure(self.dim);
        let mut total = Moment::Finite(0.0);
        for s in self.active_segments() {
            let lo = s.r_lo.max(a);
            let hi = s.r_hi.min(b);
            if lo >= hi {
                continue;
            }
            let e = s.alpha + beta + self.dim as f64 - 1.0;
            total = total
                + match power_integral(e, lo, hi) {
                    Moment::Finite(v) => Moment::Finite(omega * s.c * v),
                    Moment::Divergent => Moment::Divergent,
                };
        }
        total
    }

    /// `\int_{B(0,1)} |y|^n Phi`.
    pub fn basic_local(&self) -> Moment {
        self.moment_over(self.dim as f64, 0.0, 1.0)
    }

    /// `\int_{B(0,1)^c} Phi`.
    pub fn basic_global(&self) -> Moment {
        self.moment_over(0.0, 1.0, f64::INFINITY)
    }

    /// `\int Phi(y) min{1, |y|^n} dy`.
    pub fn min_moment(&self) -> Moment {
        self.basic_local() + self.basic_global()
    }

    pub fn is_admissible(&self) -> bool {
        self.basic_local().is_finite() && self.basic_global().is_finite()
    }

    /// `K_{p,q}(Phi) = \int (|y|^{n/p} + |y|^{n/q'}) Phi(y) dy`.
    pub fn sharp_value(&self, params: &SpaceParams) -> Moment {
        let n = self.dim as f64;
        self.moment(n / params.p) + self.moment(n / params.q_conj())
    }

    /// Radii where the kernel may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .active_segments()
            .flat_map(|s| [s.r_lo, s.r_hi])
            .filter(|r| r.is_finite() && *r > 0.0)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Shorthand form, one token per segment.
    pub fn to_shorthand(&self) -> String {
        self.segments
            .iter()
            .map(|s| {
                let hi = if s.r_hi.is_infinite() { "inf".to_string() } else { s.r_hi.to_string() };
                format!("{}*r^{}@[{},{}]", s.c, s.alpha, s.r_lo, hi)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse the inline shorthand `c*r^alpha@[r_lo,r_hi]`, tokens separated
    /// by whitespace or `;`. `c@[a,b]` abbreviates a constant piece.
    pub fn parse_shorthand(dim: usize, text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        let mut col = 0usize;
        for raw in text.split_inclusive(|ch: char| ch.is_whitespace() || ch == ';') {
            let token = raw.trim_end_matches(|ch: char| ch.is_whitespace() || ch == ';');
            if !token.is_empty() {
                segments.push(parse_token(token).map_err(|msg| {
                    Error::Kernel(format!("column {}: `{token}`: {msg}", col + 1))
                })?);
            }
            col += raw.chars().count();
        }
        Self::new(dim, segments)
    }

    /// Parse a JSON kernel file: either a list of segments or
    /// `{"dim": n, "segments": [...]}`. `default_dim` applies to bare lists.
    pub fn from_json(text: &str, default_dim: usize) -> Result<Self> {
        let file: KernelFile = serde_json::from_str(text)
            .map_err(|e| Error::Kernel(e.to_string()))?;
        let (dim, raw) = match file {
            KernelFile::List(segs) => (default_dim, segs),
            KernelFile::Object { dim, segments } => (dim.unwrap_or(default_dim), segments),
        };
        let segments = raw
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.into_segment().map_err(|m| Error::Kernel(format!("segment {i}: {m}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, segments)
    }

    pub fn to_json(&self) -> String {
        let segs: Vec<RawSegment> = self
            .segments
            .iter()
            .map(|s| RawSegment {
                r_lo: s.r_lo,
                r_hi: if s.r_hi.is_infinite() { Bound::Text("inf".into()) } else { Bound::Num(s.r_hi) },
                c: s.c,
                alpha: s.alpha,
            })
            .collect();
        serde_json::to_string_pretty(&KernelFile::Object {
            dim: Some(self.dim),
            segments: segs,
        })
        .expect("kernel serialization cannot fail")
    }
}

impl fmt::Display for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", self.to_shorthand())
        }
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if parse_infinity(s) {
        return Ok(f64::INFINITY);
    }
    f64::from_str(s).map_err(|_| format!("`{s}` is not a number"))
}

fn parse_token(token: &str) -> std::result::Result<Segment, String> {
    let (law, range) = token
        .split_once('@')
        .ok_or_else(|| "missing `@[r_lo,r_hi]`".to_string())?;
    let range = range
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']').or_else(|| r.strip_suffix(')')))
        .ok_or_else(|| "range must look like [r_lo,r_hi]".to_string())?;
    let (lo, hi) = range
        .split_once(',')
        .ok_or_else(|| "range needs two comma-separated bounds".to_string())?;
    let (c, alpha) = match law.split_once('*') {
        Some((c, pow)) => {
            let alpha = pow
                .trim()
                .strip_prefix("r^")
                .ok_or_else(|| "power must look like r^alpha".to_string())?;
            (parse_number(c)?, parse_number(alpha)?)
        }
        None => (parse_number(law)?, 0.0),
    };
    Ok(Segment::new(parse_number(lo)?, parse_number(hi)?, c, alpha))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KernelFile {
    List(Vec<RawSegment>),
    Object {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        segments: Vec<RawSegment>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    r_lo: f64,
    #[serde(default = "Bound::infinite")]
    r_hi: Bound,
    c: f64,
    #[serde(default)]
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Text(String),
    Null(()),
}

impl Bound {
    fn infinite() -> Self {
        Bound::Null(())
    }
}

impl RawSegment {
    fn into_segment(self) -> std::result::Result<Segment, String> {
        let r_hi = match self.r_hi {
            Bound::Num(v) => v,
            Bound::Null(()) => f64::INFINITY,
            Bound::Text(t) if parse_infinity(&t) => f64::INFINITY,
            Bound::Text(t) => return Err(format!("r_hi `{t}` is not a number or \"inf\"")),
        };
        Ok(Segment::new(self.r_lo, r_hi, self.c, self.alpha))
    }
}

/// Outcome of evaluating the basic and sharp conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionVerdict {
    SharpFinite,
    DivergentSharp,
    Inadmissible,
}

impl ConditionVerdict {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            ConditionVerdict::SharpFinite => 0,
            ConditionVerdict::DivergentSharp => 2,
            ConditionVerdict::Inadmissible => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub dim: usize,
    #[serde(with = "crate::timefreq::exponent")]
    pub p: f64,
    #[serde(with = "crate::timefreq::exponent")]
    pub q: f64,
    pub basic_local: Moment,
    pub basic_global: Moment,
    /// `\int |y|^{n/p} Phi`.
    pub sharp_p_term: Moment,
    /// `\int |y|^{n/q'} Phi`.
    pub sharp_q_term: Moment,
    pub sharp_value: Moment,
    pub admissible: bool,
    pub sharp_finite: bool,
    pub verdict: ConditionVerdict,
}

pub fn check_conditions(kernel: &RadialKernel, params: &SpaceParams) -> ConditionReport {
    let n = kernel.dim() as f64;
    let basic_local = kernel.basic_local();
    let basic_global = kernel.basic_global();
    let sharp_p_term = kernel.moment(n / params.p);
    let sharp_q_term = kernel.moment(n / params.q_conj());
    let sharp_value = sharp_p_term + sharp_q_term;
    let admissible = basic_local.is_finite() && basic_global.is_finite();
    let sharp_finite = sharp_value.is_finite();
    let verdict = if !admissible {
        ConditionVerdict::Inadmissible
    } else if sharp_finite {
        ConditionVerdict::SharpFinite
    } else {
        ConditionVerdict::DivergentSharp
    };
    ConditionReport {
        dim: kernel.dim(),
        p: params.p,
        q: params.q,
        basic_local,
        basic_global,
        sharp_p_term,
        sharp_q_term,
        sharp_value,
        admissible,
        sharp_finite,
        verdict,
    }
}
