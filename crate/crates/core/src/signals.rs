//! Forcing signals applied to the left mass.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::eigenvalues;
use crate::model::StateSpaceSystem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// `0.1 sin(0.2π t)`
    Sine1,
    /// `0.02 cos(a t) + 0.03 cos(b t)`
    EigCos2,
    /// `c₁ sin(m t) + c₂ cos(n t)`
    SinCos3,
    /// `0.1 square(0.2π t)`
    Square4,
    Zero,
}

/// How the two frequencies of [`InputKind::EigCos2`] are read off the
/// spectrum of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Input2Mode {
    /// Imaginary parts of the two eigenvalues with largest real part
    /// (forcing at the least damped modes).
    #[default]
    Imag,
    /// Magnitudes of the two largest real parts (cosine is even, so the
    /// sign is immaterial).
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSpec {
    pub kind: InputKind,
    pub c1: f64,
    pub c2: f64,
    pub m: f64,
    pub nfreq: f64,
    pub a: f64,
    pub b: f64,
    /// Global multiplier on the whole signal.
    pub scale: f64,
}

impl InputSpec {
    fn base(kind: InputKind) -> Self {
        Self {
            kind,
            c1: 0.05,
            c2: 0.05,
            m: 1.0,
            nfreq: 2.0,
            a: 0.0,
            b: 0.0,
            scale: 1.0,
        }
    }

    pub fn input1() -> Self {
        Self::base(InputKind::Sine1)
    }

    pub fn input2(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            ..Self::base(InputKind::EigCos2)
        }
    }

    pub fn input3(c1: f64, c2: f64, m: f64, nfreq: f64) -> Self {
        Self {
            c1,
            c2,
            m,
            nfreq,
            ..Self::base(InputKind::SinCos3)
        }
    }

    pub fn input4() -> Self {
        Self::base(InputKind::Square4)
    }

    pub fn zero() -> Self {
        Self::base(InputKind::Zero)
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let freqs = [
            ("m", self.m),
            ("nfreq", self.nfreq),
            ("a", self.a),
            ("b", self.b),
        ];
        for (field, v) in freqs {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams {
                    field,
                    reason: "frequencies must be finite and nonnegative",
                });
            }
        }
        for (field, v) in [("c1", self.c1), ("c2", self.c2), ("scale", self.scale)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = 0.2 * PI;
        let u = match self.kind {
            InputKind::Sine1 => 0.1 * (w * t).sin(),
            InputKind::EigCos2 => 0.02 * (self.a * t).cos() + 0.03 * (self.b * t).cos(),
            InputKind::SinCos3 => self.c1 * (self.m * t).sin() + self.c2 * (self.nfreq * t).cos(),
            InputKind::Square4 => 0.1 * square(w * t),
            InputKind::Zero => 0.0,
        };
        self.scale * u
    }

    /// `du/dt`; zero almost everywhere for the square wave.
    pub fn derivative(&self, t: f64) -> f64 {
        let w = 0.2 * PI;
        let du = match self.kind {
            InputKind::Sine1 => 0.1 * w * (w * t).cos(),
            InputKind::EigCos2 => {
                -0.02 * self.a * (self.a * t).sin() - 0.03 * self.b * (self.b * t).sin()
            }
            InputKind::SinCos3 => {
                self.c1 * self.m * (self.m * t).cos()
                    - self.c2 * self.nfreq * (self.nfreq * t).sin()
            }
            InputKind::Square4 | InputKind::Zero => 0.0,
        };
        self.scale * du
    }

    pub fn is_zero(&self) -> bool {
        self.kind == InputKind::Zero || self.scale == 0.0
    }
}

/// `+1` where `sin(s) > 0`, `−1` where `sin(s) < 0`, `0` on the zeros.
pub fn square(s: f64) -> f64 {
    let v = s.sin();
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The two eigenvalues with the largest real parts, one per conjugate pair
/// (the representative with nonnegative imaginary part).
pub fn dominant_pair(eigs: &[Complex64]) -> Result<(Complex64, Complex64)> {
    let mut reps: Vec<Complex64> = eigs.iter().copied().filter(|l| l.im >= 0.0).collect();
    reps.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    match reps.as_slice() {
        [first, second, ..] => Ok((*first, *second)),
        _ => Err(Error::InvalidArgument(
            "need at least two distinct eigenvalue representatives",
        )),
    }
}

/// Frequencies `(a, b)` of the second input for a given system matrix.
pub fn input2_frequencies(sys: &StateSpaceSystem, mode: Input2Mode) -> Result<(f64, f64)> {
    let eigs = eigenvalues(&sys.a)?;
    frequencies_from_spectrum(&eigs, mode)
}

pub fn frequencies_from_spectrum(eigs: &[Complex64], mode: Input2Mode) -> Result<(f64, f64)> {
    let (l1, l2) = dominant_pair(eigs)?;
    Ok(match mode {
        Input2Mode::Imag => (l1.im.abs(), l2.im.abs()),
        Input2Mode::Literal => (l1.re.abs(), l2.re.abs()),
    })
}
