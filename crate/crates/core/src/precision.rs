//! Working-precision configuration shared by every module that performs
//! inexact arithmetic.

use rug::Float;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const MIN_PRECISION_BITS: u32 = 64;

/// Precision, in bits, used for all floating-point work.
///
/// Exact (rational) arithmetic ignores this; everything downstream of
/// `to_reals` reads its precision from a single `PrecisionConfig` so that a
/// whole analysis runs at one consistent precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    precision_bits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl PrecisionConfig {
    /// Clamps below `MIN_PRECISION_BITS` up to the minimum.
    pub fn new(precision_bits: u32) -> Self {
        Self {
            precision_bits: precision_bits.max(MIN_PRECISION_BITS),
        }
    }

    pub fn bits(&self) -> u32 {
        self.precision_bits
    }

    /// Decimal digits carried at this precision.
    pub fn digits(&self) -> u32 {
        (self.precision_bits as f64 * std::f64::consts::LOG10_2) as u32
    }

    pub fn float_from_f64(&self, x: f64) -> Float {
        Float::with_val(self.precision_bits, x)
    }

    pub fn float_from_u64(&self, x: u64) -> Float {
        Float::with_val(self.precision_bits, x)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.precision_bits)
    }

    /// `n` as a Float at working precision.
    pub fn index(&self, n: i64) -> Float {
        Float::with_val(self.precision_bits, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_to_minimum() {
        assert_eq!(PrecisionConfig::new(8).bits(), MIN_PRECISION_BITS);
        assert_eq!(PrecisionConfig::new(512).bits(), 512);
    }

    #[test]
    fn default_is_256() {
        assert_eq!(PrecisionConfig::default().bits(), 256);
    }
}
