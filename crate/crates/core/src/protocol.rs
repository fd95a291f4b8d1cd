//! Fixed-width bit encoding of protocol messages.
//!
//! A message is a tuple of unsigned fields, each with a declared width.
//! Its size on the wire is the sum of the widths.

use crate::error::{Error, Result};
use crate::sim::{bits_for, Message};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub width: usize,
}

impl Field {
    /// Wide enough for every value in `0..=max`.
    pub fn for_max(max: u64) -> Self {
        Field { width: bits_for(max) }
    }
}

/// A packed message: field values plus their declared layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    bits: Vec<bool>,
}

impl Packet {
    pub fn encode(layout: &[Field], values: &[u64]) -> Result<Packet> {
        if layout.len() != values.len() {
            return Err(Error::Protocol(format!(
                "{} values for a {}-field layout",
                values.len(),
                layout.len()
            )));
        }
        let mut bits = Vec::with_capacity(layout.iter().map(|f| f.width).sum());
        for (f, &v) in layout.iter().zip(values) {
            if f.width < 64 && v >> f.width != 0 {
                return Err(Error::Protocol(format!(
                    "value {v} does not fit a {}-bit field",
                    f.width
                )));
            }
            bits.extend((0..f.width).rev().map(|i| i < 64 && (v >> i) & 1 == 1));
        }
        Ok(Packet { bits })
    }

    pub fn decode(&self, layout: &[Field]) -> Result<Vec<u64>> {
        let total: usize = layout.iter().map(|f| f.width).sum();
        if total != self.bits.len() {
            return Err(Error::Protocol(format!(
                "packet has {} bits, layout expects {total}",
                self.bits.len()
            )));
        }
        let mut out = Vec::with_capacity(layout.len());
        let mut pos = 0;
        for f in layout {
            let v = self.bits[pos..pos + f.width]
                .iter()
                .fold(0u64, |acc, &b| (acc << 1) | b as u64);
            out.push(v);
            pos += f.width;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl Message for Packet {
    fn bit_len(&self) -> usize {
        self.bits.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_all_zero_bits() {
        let f = [Field::for_max(15)];
        let p = Packet::encode(&f, &[0]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.bits.iter().all(|b| !b));
    }

    #[test]
    fn color_field_width_for_delta_64() {
        let f = [Field::for_max(2 * 64)];
        assert_eq!(f[0].width, 8);
        let p = Packet::encode(&f, &[2 * 64 - 1]).unwrap();
        assert_eq!(p.decode(&f).unwrap(), vec![127]);
    }

    #[test]
    fn overflow_is_rejected() {
        let f = [Field { width: 3 }];
        assert!(matches!(Packet::encode(&f, &[8]), Err(Error::Protocol(_))));
    }

    #[test]
    fn multi_field_round_trip() {
        let f = [Field::for_max(1), Field::for_max(1000), Field::for_max(7)];
        let p = Packet::encode(&f, &[1, 999, 5]).unwrap();
        assert_eq!(p.bit_len(), 1 + 10 + 3);
        assert_eq!(p.decode(&f).unwrap(), vec![1, 999, 5]);
    }
}
