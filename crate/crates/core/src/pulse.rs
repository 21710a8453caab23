use crate::error::{Error, Result};

const FOUR_LN2: f64 = 4.0 * std::f64::consts::LN_2;

/// Supported pulse shapes.
///
/// Two Gaussian width conventions coexist in the literature, so both are
/// spelled out explicitly and scenario files must name the one they mean:
///
/// * `Gaussian` uses the full-width-at-half-maximum convention,
///   `peak * exp(-4 ln2 (t - center)^2 / width^2)`.
/// * `GaussianRaw` uses the bare exponent `peak * exp(-(t - center)^2 / width^2)`,
///   i.e. `width` is the 1/e half-width of the *field* envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Gaussian,
    GaussianRaw,
    Sech,
    Constant,
}

/// Smooth scalar envelope with an analytic time derivative.
///
/// Values are Rabi frequencies (angular frequency units, hbar = 1), so the
/// envelope composes directly into Hamiltonian matrix elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    shape: PulseShape,
    peak: f64,
    center: f64,
    width: f64,
}

impl PulseEnvelope {
    /// Builds an envelope, checking `peak >= 0` and (for localized shapes)
    /// `width > 0`.  A constant envelope ignores `center` and `width`.
    pub fn new(shape: PulseShape, peak: f64, center: f64, width: f64) -> Result<Self> {
        if !peak.is_finite() || peak < 0.0 {
            return Err(Error::InvalidParameter {
                name: "peak",
                message: format!("peak amplitude must be finite and >= 0, got {peak}"),
            });
        }
        if shape == PulseShape::Constant {
            return Ok(Self {
                shape,
                peak,
                center: 0.0,
                width: 1.0,
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                message: format!("pulse center must be finite, got {center}"),
            });
        }
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "width",
                message: format!("pulse width must be finite and > 0, got {width}"),
            });
        }
        Ok(Self {
            shape,
            peak,
            center,
            width,
        })
    }

    /// FWHM-convention Gaussian.
    pub fn gaussian(peak: f64, center: f64, fwhm: f64) -> Result<Self> {
        Self::new(PulseShape::Gaussian, peak, center, fwhm)
    }

    /// Bare-exponent Gaussian, `peak * exp(-(t - center)^2 / width^2)`.
    pub fn gaussian_raw(peak: f64, center: f64, width: f64) -> Result<Self> {
        Self::new(PulseShape::GaussianRaw, peak, center, width)
    }

    pub fn sech(peak: f64, center: f64, width: f64) -> Result<Self> {
        Self::new(PulseShape::Sech, peak, center, width)
    }

    pub fn constant(peak: f64) -> Result<Self> {
        Self::new(PulseShape::Constant, peak, 0.0, 1.0)
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Envelope value at time `t`.
    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.center;
        match self.shape {
            PulseShape::Gaussian => {
                self.peak * (-FOUR_LN2 * s * s / (self.width * self.width)).exp()
            }
            PulseShape::GaussianRaw => self.peak * (-s * s / (self.width * self.width)).exp(),
            PulseShape::Sech => {
                let x = s / self.width;
                // sech via 1/cosh; cosh overflows around |x| ~ 710, where the
                // envelope is zero to double precision anyway
                if x.abs() > 700.0 {
                    0.0
                } else {
                    self.peak / x.cosh()
                }
            }
            PulseShape::Constant => self.peak,
        }
    }

    /// Analytic derivative `d/dt value(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let s = t - self.center;
        let w2 = self.width * self.width;
        match self.shape {
            PulseShape::Gaussian => -2.0 * FOUR_LN2 * s / w2 * self.value(t),
            PulseShape::GaussianRaw => -2.0 * s / w2 * self.value(t),
            PulseShape::Sech => {
                let x = s / self.width;
                -self.value(t) * x.tanh() / self.width
            }
            PulseShape::Constant => 0.0,
        }
    }
}

/// Convenience constructor mirroring `PulseEnvelope::new`.
pub fn make_envelope(
    shape: PulseShape,
    peak: f64,
    center: f64,
    width: f64,
) -> Result<PulseEnvelope> {
    PulseEnvelope::new(shape, peak, center, width)
}
