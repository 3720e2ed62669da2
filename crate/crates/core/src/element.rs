//! Regular semisimple elements by case and root valuations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root_data::{rat, LambdaElement, LeviSpec, ParabolicSpec, Rat, Root};

/// The element `γ` through the data the counts depend on: group, splitting type and valuations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum RegularElementSpec {
    /// `diag(t1, t2)` with `val(t1 - t2) = n`.
    Gl2Split { n: u32 },
    /// Ramified anisotropic, equivalued of valuation `n + 1/2`.
    Gl2Aniso { n: u32 },
    /// Minimal form: `val α12 = val α13 = n1 <= val α23 = n2`.
    Gl3Split { n1: u32, n2: u32 },
    /// `diag(a, b)` with `val a = m` and `b` ramified of valuation `n + 1/2`.
    Gl3Mixed { m: u32, n: u32 },
    /// Totally ramified, `ε^{n1} σ + ε^{n2} σ^2`.
    Gl3Aniso { n1: u32, n2: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Gl2,
    Gl3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Split,
    Mixed,
    Aniso,
}

impl RegularElementSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RegularElementSpec::Gl3Split { n1, n2 } if n1 > n2 => {
                Err(Error::InvalidParams(format!("split GL3 must be in minimal form n1 <= n2, got ({n1}, {n2})")))
            }
            _ => Ok(()),
        }
    }

    pub fn group(&self) -> Group {
        match self {
            RegularElementSpec::Gl2Split { .. } | RegularElementSpec::Gl2Aniso { .. } => Group::Gl2,
            _ => Group::Gl3,
        }
    }

    pub fn kind(&self) -> CaseKind {
        match self {
            RegularElementSpec::Gl2Split { .. } | RegularElementSpec::Gl3Split { .. } => CaseKind::Split,
            RegularElementSpec::Gl3Mixed { .. } => CaseKind::Mixed,
            _ => CaseKind::Aniso,
        }
    }

    pub fn n(&self) -> usize {
        match self.group() {
            Group::Gl2 => 2,
            Group::Gl3 => 3,
        }
    }

    /// Minimal Levi containing the centralizer.
    pub fn m0(&self) -> LeviSpec {
        match self {
            RegularElementSpec::Gl2Split { .. } => LeviSpec::torus(2),
            RegularElementSpec::Gl3Split { .. } => LeviSpec::torus(3),
            RegularElementSpec::Gl3Mixed { .. } => LeviSpec::new(vec![vec![0], vec![1, 2]]).unwrap(),
            RegularElementSpec::Gl2Aniso { .. } => LeviSpec::whole(2),
            RegularElementSpec::Gl3Aniso { .. } => LeviSpec::whole(3),
        }
    }

    /// Whether the anisotropic GL3 element falls under the `n1 <= n2` theorem.
    pub fn aniso_case1(&self) -> Option<bool> {
        match *self {
            RegularElementSpec::Gl3Aniso { n1, n2 } => Some(n1 <= n2),
            _ => None,
        }
    }

    /// `val α(γ)` over a splitting field.
    pub fn root_valuation(&self, r: Root) -> Rat {
        let (a, b) = if r.i < r.j { (r.i, r.j) } else { (r.j, r.i) };
        let half = Rat::new(1, 2);
        match *self {
            RegularElementSpec::Gl2Split { n } => rat(n as i64),
            RegularElementSpec::Gl2Aniso { n } => rat(n as i64) + half,
            RegularElementSpec::Gl3Split { n1, n2 } => {
                if (a, b) == (1, 2) {
                    rat(n2 as i64)
                } else {
                    rat(n1 as i64)
                }
            }
            RegularElementSpec::Gl3Mixed { m, n } => {
                let nb = rat(n as i64) + half;
                if (a, b) == (1, 2) {
                    nb
                } else {
                    rat(m as i64).min(nb)
                }
            }
            RegularElementSpec::Gl3Aniso { n1, n2 } => {
                if n1 <= n2 {
                    rat(n1 as i64) + Rat::new(1, 3)
                } else {
                    rat(n2 as i64) + Rat::new(2, 3)
                }
            }
        }
    }

    /// `val det(ad γ | n_P) = Σ_{α ∈ Φ(N_P)} val α(γ)`.
    pub fn val_det_unipotent(&self, p: &ParabolicSpec) -> Result<i64> {
        let s: Rat = p.unipotent_roots().into_iter().map(|r| self.root_valuation(r)).sum();
        integral(s, "val det(ad γ | n)")
    }

    /// `½ val det(ad γ | g/m)`.
    pub fn half_val_det(&self, m: &LeviSpec) -> Result<i64> {
        let s: Rat = crate::root_data::RootDatum::gl(self.n())
            .positive_roots()
            .into_iter()
            .filter(|&r| !m.contains_root(r))
            .map(|r| self.root_valuation(r))
            .sum();
        integral(s, "half val det(ad γ | g/m)")
    }

    /// Default connected component: the one carrying the fundamental domain in the mixed case.
    pub fn default_nu0(&self) -> i64 {
        match *self {
            RegularElementSpec::Gl3Mixed { n, .. } => n as i64 + 1,
            _ => 0,
        }
    }

    /// Point of `Λ_{M0}^{ν0}` placed at the origin of `a_{M0}^G`.
    pub fn base_lambda(&self, nu0: i64) -> LambdaElement {
        let m0 = self.m0();
        let mut values = vec![0; m0.num_blocks()];
        match self.kind() {
            CaseKind::Mixed => *values.last_mut().unwrap() = nu0,
            _ => values[0] = nu0,
        }
        LambdaElement::new(m0, values).unwrap()
    }

    /// The spec of `γ` viewed in a Levi `M ⊇ M0` with one non-trivial block of size 2.
    pub fn levi_restriction(&self, m: &LeviSpec) -> Result<RegularElementSpec> {
        let big: Vec<&Vec<usize>> = m.blocks.iter().filter(|b| b.len() > 1).collect();
        if big.len() != 1 || big[0].len() != 2 || !self.m0().is_contained_in(m) {
            return Err(Error::UnsupportedGroup(format!("Levi {m} of {self}")));
        }
        let r = Root::new(big[0][0], big[0][1]);
        let v = self.root_valuation(r);
        match self.kind() {
            CaseKind::Split => Ok(RegularElementSpec::Gl2Split { n: v.to_integer() as u32 }),
            CaseKind::Mixed => Ok(RegularElementSpec::Gl2Aniso { n: (v - Rat::new(1, 2)).to_integer() as u32 }),
            CaseKind::Aniso => Err(Error::UnsupportedGroup("anisotropic elements have no proper Levi".into())),
        }
    }

    pub fn params_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

fn integral(s: Rat, what: &str) -> Result<i64> {
    if s.is_integer() {
        Ok(s.to_integer())
    } else {
        Err(Error::InvalidParams(format!("{what} = {s} is not an integer")))
    }
}

impl fmt::Display for RegularElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RegularElementSpec::Gl2Split { n } => write!(f, "gl2 split n={n}"),
            RegularElementSpec::Gl2Aniso { n } => write!(f, "gl2 aniso n={n}"),
            RegularElementSpec::Gl3Split { n1, n2 } => write!(f, "gl3 split n1={n1} n2={n2}"),
            RegularElementSpec::Gl3Mixed { m, n } => write!(f, "gl3 mixed m={m} n={n}"),
            RegularElementSpec::Gl3Aniso { n1, n2 } => write!(f, "gl3 aniso n1={n1} n2={n2}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::RootDatum;

    #[test]
    fn valuations_and_dimensions() {
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        assert_eq!(s.half_val_det(&LeviSpec::torus(3)).unwrap(), 4);
        let m = RegularElementSpec::Gl3Mixed { m: 1, n: 1 };
        let p = m.m0().standard_parabolic();
        assert_eq!(m.val_det_unipotent(&p).unwrap(), 2);
        assert_eq!(RegularElementSpec::Gl3Mixed { m: 2, n: 1 }.val_det_unipotent(&p).unwrap(), 3);
        assert_eq!(m.half_val_det(&m.m0()).unwrap(), 2);
        let a = RegularElementSpec::Gl3Aniso { n1: 1, n2: 1 };
        assert_eq!(a.half_val_det(&LeviSpec::torus(3)).unwrap(), 4);
        assert!(RegularElementSpec::Gl3Split { n1: 2, n2: 1 }.validate().is_err());
        for r in RootDatum::gl(3).roots() {
            assert_eq!(s.root_valuation(r), s.root_valuation(r.negate()));
        }
    }

    #[test]
    fn levi_restrictions() {
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let m23 = LeviSpec::new(vec![vec![0], vec![1, 2]]).unwrap();
        assert_eq!(s.levi_restriction(&m23).unwrap(), RegularElementSpec::Gl2Split { n: 2 });
        let m = RegularElementSpec::Gl3Mixed { m: 3, n: 1 };
        assert_eq!(m.levi_restriction(&m23).unwrap(), RegularElementSpec::Gl2Aniso { n: 1 });
    }
}
