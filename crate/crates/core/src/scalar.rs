use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type used for sketch estimates, thresholds and the real-valued
/// hyperparameters.
///
/// Besides the arithmetic, a scalar knows its little-endian wire encoding so
/// that the flat tree layout can be written for either width.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Debug + Display + Default + Send + Sync + 'static
{
    /// Encoded width in bytes.
    const BYTES: usize;
    /// Format version tag used for trees stored with this scalar.
    const FORMAT_VERSION: u16;

    fn write_le(self, out: &mut Vec<u8>);
    /// Reads `Self::BYTES` bytes. Caller guarantees the slice length.
    fn read_le(bytes: &[u8]) -> Self;

    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {
    const BYTES: usize = 4;
    const FORMAT_VERSION: u16 = 1;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Scalar for f64 {
    const BYTES: usize = 8;
    const FORMAT_VERSION: u16 = 2;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}
