use super::Polynomial;
use crate::bqm::BinaryState;
use crate::{Error, Result, Scalar};

/// Standard binary encoding `x = s * sum_{j=0}^{J} 2^j b_j` of a real
/// parameter on the bits `var_base .. var_base + bit_count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryEncoding<F> {
    var_base: usize,
    bit_count: usize,
    scale: F,
}

/// Result of projecting a real value onto an encoding grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub bits: BinaryState,
    /// True when the value lay outside the representable range.
    pub clamped: bool,
}

impl<F: Scalar> BinaryEncoding<F> {
    pub fn new(var_base: usize, bit_count: usize, scale: F) -> Result<Self> {
        if bit_count == 0 || bit_count > 52 {
            return Err(Error::invalid(format!(
                "encoding needs between 1 and 52 bits, got {bit_count}"
            )));
        }
        if scale == F::zero() || !scale.is_finite() {
            return Err(Error::invalid("encoding scale must be finite and nonzero"));
        }
        Ok(Self {
            var_base,
            bit_count,
            scale,
        })
    }

    /// Encoding with `J + 1` bits where `J = top_bit`.
    pub fn with_top_bit(var_base: usize, top_bit: usize, scale: F) -> Result<Self> {
        Self::new(var_base, top_bit + 1, scale)
    }

    pub fn var_base(&self) -> usize {
        self.var_base
    }

    pub fn bit_count(&self) -> usize {
        self.bit_count
    }

    pub fn scale(&self) -> F {
        self.scale
    }

    /// Global variable id of bit `j`.
    pub fn var(&self, j: usize) -> usize {
        self.var_base + j
    }

    pub fn vars(&self) -> std::ops::Range<usize> {
        self.var_base..self.var_base + self.bit_count
    }

    pub fn max_integer(&self) -> u64 {
        (1u64 << self.bit_count) - 1
    }

    /// Closed interval of decodable values.
    pub fn range(&self) -> (F, F) {
        let top = self.scale * F::from_u64(self.max_integer()).unwrap();
        if self.scale > F::zero() {
            (F::zero(), top)
        } else {
            (top, F::zero())
        }
    }

    /// Grid spacing `|s|`.
    pub fn step(&self) -> F {
        self.scale.abs()
    }

    pub fn weight(&self, j: usize) -> F {
        self.scale * F::from_u64(1u64 << j).unwrap()
    }

    /// Value of the integer `sum 2^j b_j`.
    pub fn decode_integer(&self, k: u64) -> F {
        self.scale * F::from_u64(k).unwrap()
    }

    /// Decodes bits given in encoding order (`bits[j]` is bit `j`).
    pub fn encode_value(&self, bits: &BinaryState) -> Result<F> {
        if bits.len() != self.bit_count {
            return Err(Error::Dimension {
                expected: self.bit_count,
                got: bits.len(),
            });
        }
        Ok(self.decode_integer(bits.index()))
    }

    /// Decodes this encoding's bits out of a full problem state.
    pub fn decode(&self, state: &[u8]) -> F {
        self.decode_integer(self.integer_of(state))
    }

    pub fn integer_of(&self, state: &[u8]) -> u64 {
        self.vars()
            .enumerate()
            .fold(0u64, |acc, (j, v)| acc | ((state[v] as u64) << j))
    }

    /// Bits whose decoded value is nearest to `value`, ties toward the
    /// smaller integer; out-of-range values are clamped and flagged.
    pub fn nearest_bits(&self, value: F) -> Projection {
        let (k, clamped) = self.nearest_integer(value);
        Projection {
            bits: BinaryState::from_index(k, self.bit_count),
            clamped,
        }
    }

    pub fn nearest_integer(&self, value: F) -> (u64, bool) {
        let q = (value / self.scale).as_f64();
        let max = self.max_integer() as f64;
        if q.is_nan() {
            return (0, true);
        }
        let k = (q - 0.5).ceil();
        if k < 0.0 {
            (0, true)
        } else if k > max {
            (self.max_integer(), true)
        } else {
            // A value a hair outside the range still rounds inside it.
            (k as u64, q < -0.5 || q > max + 0.5)
        }
    }

    /// Writes `integer` into this encoding's bits of `state`.
    pub fn write_integer(&self, state: &mut [u8], integer: u64) {
        for (j, v) in self.vars().enumerate() {
            state[v] = ((integer >> j) & 1) as u8;
        }
    }

    /// The linear polynomial `s * sum 2^j x_{base+j}`.
    pub fn linear_poly(&self) -> Polynomial<F> {
        Polynomial::from_terms((0..self.bit_count).map(|j| ([self.var(j)], self.weight(j))))
    }
}

pub fn encode_value<F: Scalar>(enc: &BinaryEncoding<F>, bits: &BinaryState) -> Result<F> {
    enc.encode_value(bits)
}

pub fn nearest_bits<F: Scalar>(enc: &BinaryEncoding<F>, value: F) -> Projection {
    enc.nearest_bits(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_example() {
        let enc = BinaryEncoding::with_top_bit(0, 2, 1.0).unwrap();
        let bits = BinaryState::new(vec![1, 0, 1]).unwrap();
        assert_eq!(enc.encode_value(&bits).unwrap(), 5.0);
        assert_eq!(enc.encode_value(&BinaryState::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn negative_scale_range() {
        let enc = BinaryEncoding::<f64>::with_top_bit(0, 9, -0.035).unwrap();
        let all = BinaryState::new(vec![1; 10]).unwrap();
        let v: f64 = enc.encode_value(&all).unwrap();
        assert!((v + 35.805).abs() < 1e-10);
        assert_eq!(enc.range().1, 0.0);
    }

    #[test]
    fn ties_go_to_smaller_integer() {
        let enc = BinaryEncoding::new(0, 3, 1.0).unwrap();
        assert_eq!(enc.nearest_integer(2.5), (2, false));
        assert_eq!(enc.nearest_integer(2.51), (3, false));
        assert_eq!(enc.nearest_integer(-3.0), (0, true));
        assert_eq!(enc.nearest_integer(9.0), (7, true));
        let neg = BinaryEncoding::new(0, 3, -1.0).unwrap();
        assert_eq!(neg.nearest_integer(-2.5), (2, false));
    }

    #[test]
    fn state_decoding_uses_offsets() {
        let enc = BinaryEncoding::new(2, 2, 0.5).unwrap();
        let mut state = vec![1, 1, 0, 0];
        enc.write_integer(&mut state, 3);
        assert_eq!(state, vec![1, 1, 1, 1]);
        assert_eq!(enc.decode(&state), 1.5);
        assert_eq!(enc.linear_poly().evaluate_unchecked(&state), 1.5);
    }
}
