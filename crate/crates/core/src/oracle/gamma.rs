//! Explicit representatives of `γ` as matrices over `F_q((ε))`.

use super::field::Field;
use super::lattice::{zero_mat, Mat, MAX_N};
use super::series::Laurent;
use crate::element::RegularElementSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct GammaMatrix {
    pub spec: RegularElementSpec,
    pub n: usize,
    pub m: Mat,
    /// Unit constants `b0, c0` used in the construction.
    pub units: (u8, u8),
}

fn mono(c: u8, e: u32) -> Result<Laurent> {
    Laurent::monomial(c, e as i32)
}

impl GammaMatrix {
    /// Builds `γ` with `b0 = 1` and the first admissible `c0`.
    ///
    /// The split `n1 = n2` element needs three distinct eigenvalue residues, impossible over `F_2`.
    pub fn new(spec: &RegularElementSpec, f: &Field) -> Result<Self> {
        Self::with_units(spec, f, 1, None)
    }

    /// Builds `γ` with the given nonzero `b0` and, if provided, `c0`.
    pub fn with_units(spec: &RegularElementSpec, f: &Field, b0: u8, c0: Option<u8>) -> Result<Self> {
        spec.validate()?;
        if b0 == 0 || b0 >= f.q || c0.is_some_and(|c| c == 0 || c >= f.q) {
            return Err(Error::InvalidParams("unit constants must be nonzero elements of F_q".into()));
        }
        let mut m = zero_mat();
        let c0_given = c0.is_some();
        let mut c0 = c0.unwrap_or(1);
        match *spec {
            RegularElementSpec::Gl2Split { n } => {
                m[1][1] = mono(b0, n)?;
            }
            RegularElementSpec::Gl2Aniso { n } => {
                m[0][1] = mono(b0, n)?;
                m[1][0] = mono(b0, n + 1)?;
            }
            RegularElementSpec::Gl3Split { n1, n2 } => {
                m[1][1] = mono(b0, n1)?;
                if n1 == n2 && f.add(b0, c0) == 0 {
                    let explicit = c0_given;
                    c0 = (1..f.q).find(|&c| !explicit && f.add(b0, c) != 0).ok_or_else(|| {
                        Error::InvalidParams(format!(
                            "split n1 = n2 = {n1} needs b0 + c0 != 0; impossible over F_{} with these units",
                            f.q
                        ))
                    })?;
                }
                m[2][2] = mono(b0, n1)?.add(&mono(c0, n2)?, f);
            }
            RegularElementSpec::Gl3Mixed { m: mm, n } => {
                m[0][0] = mono(1, mm)?;
                m[1][2] = mono(b0, n)?;
                m[2][1] = mono(b0, n + 1)?;
            }
            RegularElementSpec::Gl3Aniso { n1, n2 } => {
                m[0][1] = mono(b0, n1)?;
                m[0][2] = mono(c0, n2)?;
                m[1][0] = mono(c0, n2 + 1)?;
                m[1][2] = mono(b0, n1)?;
                m[2][0] = mono(b0, n1 + 1)?;
                m[2][1] = mono(c0, n2 + 1)?;
            }
        }
        Ok(GammaMatrix { spec: *spec, n: spec.n(), m, units: (b0, c0) })
    }

    /// `γ` preserves the coordinate flag from `k` on: `γ[k..][..k] = 0`.
    pub fn preserves_tail(&self, k: usize) -> bool {
        (k..self.n).all(|r| (0..k).all(|c| self.m[r][c].is_zero()))
    }

    /// Column `k` vanishes below the diagonal.
    pub fn column_upper(&self, k: usize) -> bool {
        (k + 1..self.n).all(|r| self.m[r][k].is_zero())
    }

    pub fn entry(&self, r: usize, c: usize) -> &Laurent {
        assert!(r < MAX_N && c < MAX_N);
        &self.m[r][c]
    }
}
