//! Time-frequency analysis: short-time Fourier transform, the
//! frequency-uniform decomposition and the modulation / Wiener amalgam norms.

mod decomp;
mod stft;

pub use decomp::{
    box_operator, build_decomposition, eta_1d, modulation_norm_discrete,
    modulation_norm_discrete_report, smooth_step, DecompositionFamily,
    DiscreteNormReport, RESOLUTION_SAMPLES, SPECTRAL_TAIL_LIMIT,
};
pub use stft::{
    modulation_norm_continuous, stft, stft_norms, stft_with, wiener_norm, Stft, StftConfig,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_exponent, Domain, GridFunction, GridSpec};

/// Which mixed norm a parameter triple refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Modulation,
    Wiener,
    Lebesgue,
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpaceKind::Modulation => "modulation",
            SpaceKind::Wiener => "wiener",
            SpaceKind::Lebesgue => "lebesgue",
        })
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "modulation" | "m" => Ok(SpaceKind::Modulation),
            "wiener" | "w" => Ok(SpaceKind::Wiener),
            "lebesgue" | "l" | "lp" => Ok(SpaceKind::Lebesgue),
            other => Err(Error::InvalidParameter(format!("unknown space `{other}`"))),
        }
    }
}

/// Exponent triple `(p, q, s)` with its space tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub kind: SpaceKind,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
    #[serde(default)]
    pub s: f64,
}

/// Hoelder conjugate, `1 <-> inf`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

impl SpaceParams {
    pub fn new(kind: SpaceKind, p: f64, q: f64, s: f64) -> Result<Self> {
        check_exponent(p)?;
        check_exponent(q)?;
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("weight exponent must be finite, got {s}")));
        }
        Ok(Self { kind, p, q, s })
    }

    pub fn modulation(p: f64, q: f64, s: f64) -> Result<Self> {
        Self::new(SpaceKind::Modulation, p, q, s)
    }

    pub fn wiener(p: f64, q: f64, s: f64) -> Result<Self> {
        Self::new(SpaceKind::Wiener, p, q, s)
    }

    pub fn lebesgue(p: f64) -> Result<Self> {
        Self::new(SpaceKind::Lebesgue, p, p, 0.0)
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_conj(&self) -> f64 {
        conjugate(self.q)
    }

    /// The dual triple `(p', q', -s)` of the same kind.
    pub fn dual(&self) -> Self {
        Self {
            p: self.p_conj(),
            q: self.q_conj(),
            s: -self.s,
            ..*self
        }
    }

    /// Same exponents, different space.
    pub fn with_kind(&self, kind: SpaceKind) -> Self {
        Self { kind, ..*self }
    }

    /// Swap `p` and `q`.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            ..*self
        }
    }

    /// `(1/p - 1/2)(1/q - 1/p) >= 0`: boundedness on `M_{p,q}` is governed by
    /// the sharp condition.
    pub fn in_modulation_regime(&self) -> bool {
        (1.0 / self.p - 0.5) * (1.0 / self.q - 1.0 / self.p) >= 0.0
    }

    /// `(1/q - 1/2)(1/q - 1/p) <= 0`: the Wiener amalgam counterpart.
    pub fn in_wiener_regime(&self) -> bool {
        (1.0 / self.q - 0.5) * (1.0 / self.q - 1.0 / self.p) <= 0.0
    }

    pub fn label(&self) -> String {
        let e = |x: f64| if x.is_infinite() { "inf".to_string() } else { format!("{x}") };
        match self.kind {
            SpaceKind::Lebesgue => format!("L^{}", e(self.p)),
            SpaceKind::Modulation => format!("M^{}_{{{},{}}}", self.s, e(self.p), e(self.q)),
            SpaceKind::Wiener => format!("W^{}_{{{},{}}}", self.s, e(self.p), e(self.q)),
        }
    }
}

/// Parse an exponent, accepting `inf`.
pub fn parse_exponent(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let v = if matches!(t.as_str(), "inf" | "infinity" | "+inf") {
        f64::INFINITY
    } else {
        t.parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("`{text}` is not an exponent")))?
    };
    check_exponent(v)?;
    Ok(v)
}

/// Serde adapter writing `inf` as a string, since JSON has no infinity.
pub mod exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => super::parse_exponent(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// `<xi>^s = (1 + |xi|^2)^{s/2}`.
pub fn japanese_bracket(xi: &[f64], s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    (1.0 + xi.iter().map(|t| t * t).sum::<f64>()).powf(0.5 * s)
}

/// The Gaussian window `e^{-pi |x|^2}` on the space grid.
pub fn gaussian_window(spec: GridSpec) -> GridFunction {
    GridFunction::from_real_fn(spec, Domain::Space, |x| {
        (-std::f64::consts::PI * x.iter().map(|t| t * t).sum::<f64>()).exp()
    })
    .expect("Gaussian samples are finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(4.0), 4.0 / 3.0);
        let p = SpaceParams::modulation(4.0, 1.0, 0.5).unwrap();
        let d = p.dual();
        assert_eq!((d.p, d.q, d.s), (4.0 / 3.0, f64::INFINITY, -0.5));
    }

    #[test]
    fn regimes() {
        let m = |p, q| SpaceParams::modulation(p, q, 0.0).unwrap();
        assert!(m(2.0, 2.0).in_modulation_regime());
        assert!(m(2.0, 1.0).in_modulation_regime());
        assert!(m(1.0, 1.0).in_modulation_regime());
        assert!(!m(4.0, 2.0).in_modulation_regime());
        assert!(!m(f64::INFINITY, 1.0).in_modulation_regime());
        assert!(m(1.0, 2.0).in_wiener_regime());
        assert!(!m(2.0, 1.0).in_wiener_regime());
    }

    #[test]
    fn exponent_serde() {
        let p = SpaceParams::wiener(f64::INFINITY, 2.0, 0.0).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"p\":\"inf\""), "{text}");
        let back: SpaceParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(SpaceParams::modulation(0.5, 1.0, 0.0).is_err());
        assert!(parse_exponent("Infinity").unwrap().is_infinite());
    }
}
