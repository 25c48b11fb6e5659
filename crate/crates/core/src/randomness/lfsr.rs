//! Fibonacci linear-feedback shift registers.

use crate::error::{Error, Result};

/// Maximal-length feedback polynomials, one per width, as tap lists
/// (exponents of the polynomial's non-constant terms).
const TAPS: &[(u32, &[u32])] = &[
    (2, &[2, 1]),
    (3, &[3, 2]),
    (4, &[4, 3]),
    (5, &[5, 3]),
    (6, &[6, 5]),
    (7, &[7, 6]),
    (8, &[8, 6, 5, 4]),
    (9, &[9, 5]),
    (10, &[10, 7]),
    (11, &[11, 9]),
    (12, &[12, 6, 4, 1]),
    (13, &[13, 4, 3, 1]),
    (14, &[14, 5, 3, 1]),
    (15, &[15, 14]),
    (16, &[16, 15, 13, 4]),
    (17, &[17, 14]),
    (18, &[18, 11]),
    (19, &[19, 6, 2, 1]),
    (20, &[20, 17]),
    (21, &[21, 19]),
    (22, &[22, 21]),
    (23, &[23, 18]),
    (24, &[24, 23, 22, 17]),
    (25, &[25, 22]),
    (26, &[26, 6, 2, 1]),
    (27, &[27, 5, 2, 1]),
    (28, &[28, 25]),
    (29, &[29, 27]),
    (30, &[30, 6, 4, 1]),
    (31, &[31, 28]),
    (32, &[32, 22, 2, 1]),
];

/// Tap list of the tabulated maximal-length polynomial for `width`.
pub fn taps_for_width(width: u32) -> Option<&'static [u32]> {
    TAPS.iter().find(|(w, _)| *w == width).map(|(_, t)| *t)
}

/// Shift register state. Bit 0 is the output stage; feedback enters at the
/// top (`width - 1`). A tap at exponent `t` reads stage `width - t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrState {
    width: u32,
    state: u64,
    tap_mask: u64,
}

impl LfsrState {
    /// Register of `width` bits using the tabulated maximal polynomial.
    pub fn new(width: u32, seed: u64) -> Result<Self> {
        let taps = taps_for_width(width).ok_or_else(|| {
            Error::InvalidArgument(format!("no tabulated LFSR polynomial for width {width}"))
        })?;
        Self::with_taps(width, taps, seed)
    }

    pub fn with_taps(width: u32, taps: &[u32], seed: u64) -> Result<Self> {
        if !(2..=64).contains(&width) {
            return Err(Error::InvalidArgument(format!(
                "LFSR width {width} not in 2..=64"
            )));
        }
        let full = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let state = seed & full;
        if state == 0 {
            return Err(Error::DegenerateState("LFSR seed is all-zero".into()));
        }
        let mut tap_mask = 0u64;
        for &t in taps {
            if t == 0 || t > width {
                return Err(Error::InvalidArgument(format!(
                    "tap {t} outside 1..={width}"
                )));
            }
            tap_mask |= 1 << (width - t);
        }
        Ok(Self {
            width,
            state,
            tap_mask,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Emits the output bit and advances one clock.
    pub fn next_bit(&mut self) -> bool {
        let out = self.state & 1 == 1;
        let fb = (self.state & self.tap_mask).count_ones() as u64 & 1;
        self.state = (self.state >> 1) | (fb << (self.width - 1));
        out
    }

    /// Packs the next `n` (≤ 64) output bits, first bit least significant.
    pub fn next_bits(&mut self, n: u32) -> u64 {
        (0..n).fold(0u64, |acc, i| acc | ((self.next_bit() as u64) << i))
    }
}

impl Iterator for LfsrState {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.next_bit())
    }
}

/// SplitMix64 finalizer, used to spread user seeds over the register state.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform reals in (0, 1) built from 32 fresh bits of a 32-bit LFSR each.
#[derive(Debug, Clone)]
pub struct LfsrUniform {
    lfsr: LfsrState,
}

impl LfsrUniform {
    pub fn new(seed: u64) -> Self {
        let mut s = mix64(seed) & 0xffff_ffff;
        if s == 0 {
            s = 1;
        }
        Self {
            lfsr: LfsrState::new(32, s).expect("width 32 is tabulated and seed is nonzero"),
        }
    }

    pub fn next_unit(&mut self) -> f64 {
        (self.lfsr.next_bits(32) as f64 + 0.5) / 4_294_967_296.0
    }

    pub fn next_bit(&mut self) -> bool {
        self.lfsr.next_bit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn width3_hand_trace() {
        // x^3 + x^2 + 1, seed 001: states 001 100 010 101 110 111 011, outputs
        // are the low bit of each state.
        let mut l = LfsrState::with_taps(3, &[3, 2], 0b001).unwrap();
        let mut states = vec![];
        let mut bits = vec![];
        for _ in 0..7 {
            states.push(l.state());
            bits.push(l.next_bit() as u8);
        }
        assert_eq!(
            states,
            vec![0b001, 0b100, 0b010, 0b101, 0b110, 0b111, 0b011]
        );
        assert_eq!(bits, vec![1, 0, 0, 1, 0, 1, 1]);
        assert_eq!(l.state(), 0b001);
    }

    #[test]
    fn deterministic_and_rejects_zero() {
        let a: Vec<bool> = LfsrState::new(16, 0xace1).unwrap().take(200).collect();
        let b: Vec<bool> = LfsrState::new(16, 0xace1).unwrap().take(200).collect();
        assert_eq!(a, b);
        assert!(matches!(
            LfsrState::new(3, 0),
            Err(Error::DegenerateState(_))
        ));
        assert!(LfsrState::new(3, 0b1000).is_err(), "seed masked to zero");
        assert!(LfsrState::new(1, 1).is_err());
    }

    #[test]
    fn full_period_up_to_width_16() {
        for width in 2..=16u32 {
            let mut l = LfsrState::new(width, 1).unwrap();
            let period = (1u64 << width) - 1;
            let mut seen = HashSet::new();
            for _ in 0..period {
                assert!(seen.insert(l.state()), "width {width} repeats early");
                l.next_bit();
            }
            assert_eq!(l.state(), 1, "width {width} did not return to seed");
            assert_eq!(seen.len() as u64, period);
        }
    }

    // Independent check of every tabulated polynomial: x has multiplicative
    // order exactly 2^w - 1 modulo p(x) = 1 + sum of x^t over the taps.
    fn mulmod(a: u64, b: u64, p: u64, w: u32) -> u64 {
        let mut r = 0u64;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if (a >> w) & 1 == 1 {
                a ^= p;
            }
        }
        r
    }

    fn powmod(mut e: u64, p: u64, w: u32) -> u64 {
        let mut base = 0b10u64;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base, p, w);
            }
            base = mulmod(base, base, p, w);
            e >>= 1;
        }
        acc
    }

    fn prime_factors(mut n: u64) -> Vec<u64> {
        let mut out = vec![];
        let mut f = 2;
        while f * f <= n {
            if n % f == 0 {
                out.push(f);
                while n % f == 0 {
                    n /= f;
                }
            }
            f += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    #[test]
    fn tabulated_polynomials_are_primitive() {
        for &(w, taps) in TAPS {
            let p = taps.iter().fold(1u64, |acc, &t| acc | (1 << t));
            let order = (1u64 << w) - 1;
            assert_eq!(powmod(order, p, w), 1, "width {w}");
            for q in prime_factors(order) {
                assert_ne!(powmod(order / q, p, w), 1, "width {w}, factor {q}");
            }
        }
    }

    #[test]
    fn uniform_values_in_open_interval() {
        let mut u = LfsrUniform::new(42);
        let vals: Vec<f64> = (0..4000).map(|_| u.next_unit()).collect();
        assert!(vals.iter().all(|&v| v > 0.0 && v < 1.0));
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!((mean - 0.5).abs() < 0.03, "mean {mean}");
    }
}
