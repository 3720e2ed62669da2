//! Finite fields `F_q` for `q ∈ {2, 3, 4, 5}` with table arithmetic.

use crate::error::{Error, Result};

/// Elements are `0..q`; for `q = 4` the element `b1 b0` is `b1 x + b0` with `x² = x + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub q: u8,
    pub p: u8,
    add: [[u8; 5]; 5],
    mul: [[u8; 5]; 5],
    neg: [u8; 5],
    inv: [u8; 5],
}

impl Field {
    pub fn new(q: u8) -> Result<Self> {
        let (p, add, mul): (u8, Box<dyn Fn(u8, u8) -> u8>, Box<dyn Fn(u8, u8) -> u8>) = match q {
            2 | 3 | 5 => (q, Box::new(move |a, b| (a + b) % q), Box::new(move |a, b| (a * b) % q)),
            4 => (
                2,
                Box::new(|a, b| a ^ b),
                Box::new(|a, b| {
                    // carry-less product reduced by x² + x + 1
                    let mut r = 0u8;
                    for i in 0..2 {
                        if b >> i & 1 == 1 {
                            r ^= a << i;
                        }
                    }
                    if r & 4 != 0 {
                        r ^= 0b111;
                    }
                    r
                }),
            ),
            _ => return Err(Error::InvalidParams(format!("field size {q} is not supported (use 2, 3, 4 or 5)"))),
        };
        let mut f = Field { q, p, add: [[0; 5]; 5], mul: [[0; 5]; 5], neg: [0; 5], inv: [0; 5] };
        for a in 0..q {
            for b in 0..q {
                f.add[a as usize][b as usize] = add(a, b);
                f.mul[a as usize][b as usize] = mul(a, b);
            }
        }
        for a in 0..q {
            f.neg[a as usize] = (0..q).find(|&b| add(a, b) == 0).unwrap();
            if a != 0 {
                f.inv[a as usize] = (1..q).find(|&b| mul(a, b) == 1).unwrap();
            }
        }
        Ok(f)
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize][b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize][self.neg[b as usize] as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q
    }
}
