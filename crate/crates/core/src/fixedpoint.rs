//! Fixed-point number formats and codes.
//!
//! A format has `r` magnitude bits, `p` of them after the binary point, and
//! an optional sign bit (two's complement). A value `b` is stored as the code
//! `round(2^p b) mod 2^width`, which quantises with error at most `2^-(p+1)`.
//! Rounding is round-to-nearest with ties rounded up.

use num::rational::Ratio;
use num::{BigInt, BigRational, FromPrimitive, One, ToPrimitive, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FixedPointError {
    #[error("binary point p={p} must not exceed magnitude width r={r}")]
    PointOutOfRange { r: u32, p: u32 },
    #[error("magnitude width r={0} out of supported range 1..=62")]
    WidthUnsupported(u32),
    #[error("value {0} not representable in the format")]
    OutOfRange(String),
    #[error("operand formats do not match")]
    FormatMismatch,
    #[error("operation needs a signed format")]
    NotSigned,
}

/// Fixed-point format: `r` magnitude bits, `p` fraction bits, optional sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    r: u32,
    p: u32,
    signed: bool,
}

impl FixedPointFormat {
    pub fn new(r: u32, p: u32, signed: bool) -> Result<Self, FixedPointError> {
        if r == 0 || r > 62 {
            return Err(FixedPointError::WidthUnsupported(r));
        }
        if p > r {
            return Err(FixedPointError::PointOutOfRange { r, p });
        }
        Ok(FixedPointFormat { r, p, signed })
    }

    pub fn signed(r: u32, p: u32) -> Result<Self, FixedPointError> {
        Self::new(r, p, true)
    }

    pub fn unsigned(r: u32, p: u32) -> Result<Self, FixedPointError> {
        Self::new(r, p, false)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Register width in qubits: `r + 1` when signed, else `r`.
    pub fn width(&self) -> u32 {
        self.r + self.signed as u32
    }

    pub fn code_mask(&self) -> u64 {
        mask(self.width())
    }

    /// Smallest representable value.
    pub fn min_value(&self) -> BigRational {
        if self.signed {
            -pow2_rational(self.r as i64 - self.p as i64)
        } else {
            BigRational::zero()
        }
    }

    /// Largest representable value: `2^(r-p) - 2^-p`.
    pub fn max_value(&self) -> BigRational {
        pow2_rational(self.r as i64 - self.p as i64) - pow2_rational(-(self.p as i64))
    }

    /// Quantisation step `2^-p`.
    pub fn ulp(&self) -> f64 {
        2f64.powi(-(self.p as i32))
    }

    /// Encode a real value. Round-to-nearest, ties up; errors when the
    /// rounded value falls outside the representable range.
    pub fn encode(&self, x: &BigRational) -> Result<FixedPointValue, FixedPointError> {
        // round(2^p x) with ties up = floor(2^p x + 1/2)
        let scaled = x * pow2_rational(self.p as i64) + BigRational::new(1.into(), 2.into());
        let m = scaled.floor().to_integer();
        let lo = if self.signed {
            -(BigInt::one() << self.r)
        } else {
            BigInt::zero()
        };
        let hi = (BigInt::one() << self.r) - 1;
        if m < lo || m > hi {
            return Err(FixedPointError::OutOfRange(x.to_string()));
        }
        let width_mod = BigInt::one() << self.width();
        let code = ((m % &width_mod) + &width_mod) % &width_mod;
        Ok(FixedPointValue {
            code: code.to_u64().unwrap(),
            format: *self,
        })
    }

    pub fn encode_f64(&self, x: f64) -> Result<FixedPointValue, FixedPointError> {
        let r = BigRational::from_f64(x)
            .ok_or_else(|| FixedPointError::OutOfRange(x.to_string()))?;
        self.encode(&r)
    }

    /// Wrap a raw code (mod `2^width`) in this format.
    pub fn value_from_code(&self, code: u64) -> FixedPointValue {
        FixedPointValue {
            code: code & self.code_mask(),
            format: *self,
        }
    }
}

/// A code together with its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointValue {
    code: u64,
    format: FixedPointFormat,
}

impl FixedPointValue {
    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn format(&self) -> FixedPointFormat {
        self.format
    }

    /// Exact rational value of the code.
    pub fn decode(&self) -> BigRational {
        let w = self.format.width();
        let signed_int: i128 = if self.format.signed && (self.code >> (w - 1)) & 1 == 1 {
            self.code as i128 - (1i128 << w)
        } else {
            self.code as i128
        };
        Ratio::from_i128(signed_int).unwrap() / pow2_rational(self.format.p as i64)
    }

    pub fn decode_f64(&self) -> f64 {
        self.decode().to_f64().unwrap()
    }

    /// Split a signed code into (sign bit, magnitude code), the in-place
    /// transform a conditional decrement followed by a conditional bit flip
    /// performs: positive codes pass through, negative ones map to their
    /// magnitude. A permutation of all `2^(r+1)` codes.
    pub fn to_sign_magnitude(&self) -> Result<(bool, u64), FixedPointError> {
        if !self.format.signed {
            return Err(FixedPointError::NotSigned);
        }
        let r = self.format.r;
        let low = self.code & mask(r);
        let sign = (self.code >> r) & 1 == 1;
        if sign {
            let dec = low.wrapping_sub(1) & mask(r);
            Ok((true, dec ^ mask(r)))
        } else {
            Ok((false, low))
        }
    }

    /// Inverse of [`to_sign_magnitude`](Self::to_sign_magnitude).
    pub fn from_sign_magnitude(
        sign: bool,
        magnitude: u64,
        format: FixedPointFormat,
    ) -> Result<FixedPointValue, FixedPointError> {
        if !format.signed {
            return Err(FixedPointError::NotSigned);
        }
        let r = format.r;
        let code = if sign {
            let low = (magnitude ^ mask(r)).wrapping_add(1) & mask(r);
            (1 << r) | low
        } else {
            magnitude & mask(r)
        };
        Ok(FixedPointValue { code, format })
    }
}

pub(crate) fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn pow2_rational(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}
