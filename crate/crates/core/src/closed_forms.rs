//! Closed-form point counts for `GL2` and `GL3`, evaluated literally.
//!
//! Sums follow the empty-sum convention: `Σ_{i=lo}^{hi}` is zero when `lo > hi`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::{QPoly, TPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    Gl2SplitJ,
    Gl2SplitQ,
    Gl2SplitF,
    Gl2Aniso,
    Gl3SplitPoincare,
    Gl3SplitQAk,
    Gl3SplitMain,
    Gl3SplitTail,
    Gl3SplitJ,
    Gl3MixedDelta,
    Gl3MixedF,
    Gl3MixedJ,
    Gl3AnisoJCase1,
    Gl3AnisoJCase2,
    Gl3MixedI,
    Gl3SplitI,
    Gl2SplitI,
}

impl FormulaId {
    pub const ALL: [FormulaId; 17] = [
        FormulaId::Gl2SplitJ,
        FormulaId::Gl2SplitQ,
        FormulaId::Gl2SplitF,
        FormulaId::Gl2Aniso,
        FormulaId::Gl3SplitPoincare,
        FormulaId::Gl3SplitQAk,
        FormulaId::Gl3SplitMain,
        FormulaId::Gl3SplitTail,
        FormulaId::Gl3SplitJ,
        FormulaId::Gl3MixedDelta,
        FormulaId::Gl3MixedF,
        FormulaId::Gl3MixedJ,
        FormulaId::Gl3AnisoJCase1,
        FormulaId::Gl3AnisoJCase2,
        FormulaId::Gl3MixedI,
        FormulaId::Gl3SplitI,
        FormulaId::Gl2SplitI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::Gl2SplitJ => "GL2_SPLIT_J",
            FormulaId::Gl2SplitQ => "GL2_SPLIT_Q",
            FormulaId::Gl2SplitF => "GL2_SPLIT_F",
            FormulaId::Gl2Aniso => "GL2_ANISO",
            FormulaId::Gl3SplitPoincare => "GL3_SPLIT_POINCARE",
            FormulaId::Gl3SplitQAk => "GL3_SPLIT_Q_AK",
            FormulaId::Gl3SplitMain => "GL3_SPLIT_MAIN",
            FormulaId::Gl3SplitTail => "GL3_SPLIT_TAIL",
            FormulaId::Gl3SplitJ => "GL3_SPLIT_J",
            FormulaId::Gl3MixedDelta => "GL3_MIXED_DELTA",
            FormulaId::Gl3MixedF => "GL3_MIXED_F",
            FormulaId::Gl3MixedJ => "GL3_MIXED_J",
            FormulaId::Gl3AnisoJCase1 => "GL3_ANISO_J_CASE1",
            FormulaId::Gl3AnisoJCase2 => "GL3_ANISO_J_CASE2",
            FormulaId::Gl3MixedI => "GL3_MIXED_I",
            FormulaId::Gl3SplitI => "GL3_SPLIT_I",
            FormulaId::Gl2SplitI => "GL2_SPLIT_I",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown formula id {s}")))
    }
}

/// Parameters of a formula; unused fields are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: Option<i64>,
    pub m: Option<i64>,
    pub n1: Option<i64>,
    pub n2: Option<i64>,
    pub a1: Option<i64>,
    pub a2: Option<i64>,
}

impl Params {
    pub fn gl2(n: i64) -> Self {
        Params { n: Some(n), ..Default::default() }
    }

    pub fn gl3(n1: i64, n2: i64) -> Self {
        Params { n1: Some(n1), n2: Some(n2), ..Default::default() }
    }

    pub fn mixed(m: i64, n: i64) -> Self {
        Params { m: Some(m), n: Some(n), ..Default::default() }
    }

    pub fn with_a(mut self, a: &[i64]) -> Self {
        self.a1 = a.first().copied();
        self.a2 = a.get(1).copied();
        self
    }

    fn get(&self, v: Option<i64>, name: &str) -> Result<i64> {
        match v {
            Some(x) if x >= 0 || name.starts_with('a') => Ok(x),
            Some(x) => Err(Error::InvalidParams(format!("{name} = {x} must be nonnegative"))),
            None => Err(Error::InvalidParams(format!("missing parameter {name}"))),
        }
    }
}

fn q(e: i64) -> QPoly {
    QPoly::var_pow(e as i32)
}

/// `Σ_{i=lo}^{hi} f(i)`, zero when `lo > hi`.
fn sum(lo: i64, hi: i64, f: impl Fn(i64) -> QPoly) -> QPoly {
    (lo..=hi).map(f).sum()
}

/// `Σ_{i=lo}^{hi} q^i`.
fn geo(lo: i64, hi: i64) -> QPoly {
    sum(lo, hi, q)
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

fn sign_pow(a: i64) -> i64 {
    if a.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `nq^n - Σ_{i<n} q^i`.
pub fn gl2_split_j(n: i64) -> QPoly {
    q(n).scale(n) - geo(0, n - 1)
}

/// The Poincaré polynomial of the split `GL3` fundamental domain, in `t`.
pub fn gl3_split_poincare(n1: i64, n2: i64) -> TPoly {
    let t = |e: i64| TPoly::var_pow(e as i32);
    let mut p = TPoly::zero();
    for i in 1..=n1 {
        p += (t(4 * i - 2) + t(4 * i - 4)).scale(i);
    }
    for i in 2 * n1..=n1 + n2 - 1 {
        p += t(2 * i).scale(2 * n1 + 1);
    }
    for i in n1 + n2..=2 * n1 + n2 - 1 {
        p += t(2 * i).scale(4 * (2 * n1 + n2 - i));
    }
    p + t(4 * n1 + 2 * n2)
}

fn poincare_q(n1: i64, n2: i64) -> QPoly {
    sum(1, n1, |i| (q(2 * i - 1) + q(2 * i - 2)).scale(i))
        + sum(2 * n1, n1 + n2 - 1, |i| q(i).scale(2 * n1 + 1))
        + sum(n1 + n2, 2 * n1 + n2 - 1, |i| q(i).scale(4 * (2 * n1 + n2 - i)))
        + q(2 * n1 + n2)
}

fn gl3_split_q_ak(n1: i64, n2: i64, a1: i64, a2: i64) -> QPoly {
    let s = 2 * a1 - a2;
    let f = floor_div(s - 1, 2);
    let quarter1 = Ratio::new((1 - sign_pow(a1)) * (3 * a1 - 1), 4);
    let quarter2 = Ratio::new((1 + sign_pow(s)) * s, 4);
    let bracket = Ratio::from_integer(3 * floor_div(a1, 2).pow(2) - f * (f + 1)) + quarter1 - quarter2;
    debug_assert!(bracket.is_integer());
    let x = q(2 * n1) * geo(0, n2) + (q(n1 + n2) * geo(0, n1)).scale(2);
    let y = q(2 * n1) * geo(0, n2 - 1) + (q(n1 + n2) * geo(0, n1 - 1)).scale(2);
    poincare_q(n1, n2)
        + q(2 * n1 + n2).scale(6 * bracket.to_integer())
        + x.scale(floor_div(a1, 2) + floor_div(a2, 2))
        + y.scale(floor_div(a1 + 1, 2) + floor_div(a2 + 1, 2))
}

fn gl3_split_j(n1: i64, n2: i64) -> QPoly {
    sum(1, n1, |i| (q(2 * i - 1) + q(2 * i - 2)).scale(i))
        + sum(n1 + n2, 2 * n1 + n2 - 1, |i| q(i).scale(4 * n1 + 2 * n2 - 4 * i - 3))
        + q(2 * n1 + n2).scale(n1 * n1 + 2 * n1 * n2)
}

fn gl3_split_main(n1: i64, n2: i64, a1: i64, a2: i64) -> QPoly {
    let t0 = (3 * a2 - 2 - 2 * n1 - n2) * (3 * a2 - 1 - 2 * n1 - n2);
    let t3 = (2 * a2 - a1 - n2 - 1) * (2 * a2 - a1 - n2);
    let hex = t0 / 2 - (2 * a2 - a1 - n1 - 1) * (2 * a2 - a1 - n1) - t3 / 2;
    gl3_split_j(n1, n2)
        + q(2 * n1 + n2).scale(hex)
        + (q(2 * n1) * gl2_split_j(n2)).scale(a1 + a2 - 2 * n1 - 1)
        + (q(n1 + n2) * gl2_split_j(n1)).scale(2 * (a1 + a2 - n1 - n2 - 1))
}

fn gl3_split_tail(n1: i64, n2: i64, a1: i64, a2: i64) -> QPoly {
    ((q(2 * n1) * geo(0, n2 - 1)).scale(2) + (q(n1 + n2) * geo(0, n1 - 1)).scale(4) + q(2 * n1 + n2).scale(3))
        .scale(a1 + a2)
}

/// `Σ_{j=lo}^{hi} (⌊j/2⌋ + 1) q^j`.
fn half_ramp(lo: i64, hi: i64) -> QPoly {
    sum(lo, hi, |j| q(j).scale(floor_div(j, 2) + 1))
}

fn gl3_mixed_delta(m: i64, n: i64) -> QPoly {
    if m <= n {
        half_ramp(0, 2 * m - 1)
            + q(2 * m).scale(2 * m + n + 1)
            + sum(2 * m + 1, m + n, |j| q(j).scale(4 * m + n + 1 - j))
            + sum(m + n + 1, 2 * m + n, |j| q(j).scale(3 * (2 * m + n - j) + 1))
            + q(2 * m) * geo(0, n)
    } else {
        half_ramp(0, 2 * n)
            + sum(2 * n + 1, 3 * n + 1, |j| q(j).scale(3 * (3 * n - j + 1) + 1))
            + q(2 * n + 1) * geo(0, n)
    }
}

fn gl3_mixed_f(m: i64, n: i64) -> QPoly {
    if m <= n {
        half_ramp(0, 2 * m - 1)
            + geo(2 * m, m + n).scale(2 * m + 1)
            + sum(m + n + 1, 2 * m + n - 1, |j| q(j).scale(2 * (2 * m + n - j) + 1))
            + q(2 * m + n)
    } else {
        half_ramp(0, 2 * n) + sum(2 * n + 1, 3 * n, |j| q(j).scale(2 * (3 * n + 1 - j) + 1)) + q(3 * n + 1)
    }
}

fn gl3_mixed_j(m: i64, n: i64) -> QPoly {
    if m <= n {
        q(2 * m + n).scale(2 * m) + sum(m + n + 1, 2 * m + n - 1, |j| q(j).scale(2 * (j - m - n)))
            - half_ramp(0, 2 * m - 1)
    } else {
        q(3 * n + 1).scale(2 * n + 1) + sum(2 * n + 1, 3 * n, |j| q(j).scale(2 * j - 4 * n - 1)) - half_ramp(0, 2 * n)
    }
}

fn gl3_aniso_case1(n1: i64) -> QPoly {
    QPoly::one()
        + sum(1, floor_div(n1, 3), |i| q(2 * (3 * i - 1)) * geo(0, 2)).scale(2)
        + sum(1, n1, |i| {
            (q(2 * i - 3) * QPoly::from_terms([(3, 1), (2, 2), (1, 2), (0, 1)])).scale(i - 2 * floor_div(i, 3) - 1)
        })
        + sum(n1 + 1, 2 * n1, |i| {
            (q(i + n1 - 1) * QPoly::from_terms([(1, 1), (0, 2)])).scale(2 * n1 - i - 2 * ceil_div(2 * n1 - i, 3) + 1)
        })
        + q(2 * n1 - 1).scale(ceil_div(2 * n1 - 1, 3) - floor_div(n1 - 2, 3) - 1)
        + sum(ceil_div(2 * n1 - 1, 3), n1 - 1, |i| q(3 * i + 1)).scale(2)
}

fn gl3_aniso_case2(n2: i64) -> QPoly {
    QPoly::one()
        + sum(1, floor_div(n2, 3), |i| q(2 * (3 * i - 1)) * geo(0, 2)).scale(2)
        + sum(1, n2, |i| {
            (q(2 * i - 3) * QPoly::from_terms([(3, 1), (2, 2), (1, 2), (0, 1)])).scale(i - 2 * floor_div(i, 3) - 1)
        })
        + (q(2 * n2 - 1) * QPoly::from_terms([(0, 1), (2, 2)])).scale(n2 - 2 * ceil_div(n2 - 1, 3))
        + sum(n2 + 2, 2 * n2, |i| {
            (q(i + n2 - 1) * QPoly::from_terms([(0, 1), (1, 2)])).scale(2 * n2 - i - 2 * ceil_div(2 * n2 - i, 3) + 1)
        })
        + sum(0, floor_div(n2 - 2, 3), |i| q(3 * (n2 - i) - 2) * geo(0, 1)).scale(2)
        + q(2 * n2).scale(2 * (ceil_div(2 * n2 - 1, 3) - floor_div(n2 - 2, 3) - 1))
        + q(3 * n2 + 1)
}

/// Evaluates a closed form. Results are validated to have no negative exponents.
pub fn eval_formula(id: FormulaId, p: &Params) -> Result<QPoly> {
    use FormulaId::*;
    let out = match id {
        Gl2SplitJ => gl2_split_j(p.get(p.n, "n")?),
        Gl2SplitQ => {
            let n = p.get(p.n, "n")?;
            geo(0, n) + q(n).scale(2 * p.get(p.a1, "a1")?)
        }
        Gl2SplitF | Gl2Aniso => geo(0, p.get(p.n, "n")?),
        Gl2SplitI => q(p.get(p.n, "n")?),
        Gl3SplitPoincare => {
            let (n1, n2) = gl3_split_params(p)?;
            QPoly::from_tpoly_even(&gl3_split_poincare(n1, n2))?
        }
        Gl3SplitQAk | Gl3SplitMain | Gl3SplitTail => {
            let (n1, n2) = gl3_split_params(p)?;
            let (a1, a2) = (p.get(p.a1, "a1")?, p.get(p.a2, "a2")?);
            match id {
                Gl3SplitQAk => gl3_split_q_ak(n1, n2, a1, a2),
                Gl3SplitMain => gl3_split_main(n1, n2, a1, a2),
                _ => gl3_split_tail(n1, n2, a1, a2),
            }
        }
        Gl3SplitJ => {
            let (n1, n2) = gl3_split_params(p)?;
            gl3_split_j(n1, n2)
        }
        Gl3SplitI => {
            let (n1, n2) = gl3_split_params(p)?;
            q(2 * n1 + n2)
        }
        Gl3MixedDelta | Gl3MixedF | Gl3MixedJ | Gl3MixedI => {
            let (m, n) = (p.get(p.m, "m")?, p.get(p.n, "n")?);
            if m == 0 {
                return Err(Error::InvalidParams("mixed case needs m >= 1".into()));
            }
            match id {
                Gl3MixedDelta => gl3_mixed_delta(m, n),
                Gl3MixedF => gl3_mixed_f(m, n),
                Gl3MixedJ => gl3_mixed_j(m, n),
                _ => q(2 * m.min(n) + if m > n { 1 } else { 0 }) * geo(0, n),
            }
        }
        Gl3AnisoJCase1 | Gl3AnisoJCase2 => {
            let (n1, n2) = (p.get(p.n1, "n1")?, p.get(p.n2, "n2")?);
            match (id, n1 <= n2) {
                (Gl3AnisoJCase1, true) => gl3_aniso_case1(n1),
                (Gl3AnisoJCase2, false) => gl3_aniso_case2(n2),
                _ => return Err(Error::BranchMismatch(format!("{id} does not apply to (n1, n2) = ({n1}, {n2})"))),
            }
        }
    };
    out.ensure_polynomial()?;
    Ok(out)
}

fn gl3_split_params(p: &Params) -> Result<(i64, i64)> {
    let (n1, n2) = (p.get(p.n1, "n1")?, p.get(p.n2, "n2")?);
    if n1 > n2 {
        return Err(Error::BranchMismatch(format!("split formulas need n1 <= n2, got ({n1}, {n2})")));
    }
    Ok((n1, n2))
}

/// The anisotropic `J^ξ = |X_γ^0|` formula matching `(n1, n2)`.
pub fn gl3_aniso_j(n1: i64, n2: i64) -> Result<QPoly> {
    let id = if n1 <= n2 { FormulaId::Gl3AnisoJCase1 } else { FormulaId::Gl3AnisoJCase2 };
    eval_formula(id, &Params::gl3(n1, n2))
}

/// Iwahori-cell data for equivalued elements: a point `x` of the apartment and a depth `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessenbergCase {
    /// `GL2`, `x = (1, 1/2)`, `t = n + 1/2`.
    Gl2 { n: i64 },
    /// `GL3` with `n1 <= n2`, `x = (1, 2/3, 1/3)`, `t = n1 + 1/3`.
    Gl3Case1 { n1: i64 },
    /// `GL3` with `n1 > n2`, `t = n2 + 2/3`.
    Gl3Case2 { n2: i64 },
}

impl HessenbergCase {
    pub fn for_gl3(n1: i64, n2: i64) -> Self {
        if n1 <= n2 {
            HessenbergCase::Gl3Case1 { n1 }
        } else {
            HessenbergCase::Gl3Case2 { n2 }
        }
    }

    fn rank(self) -> usize {
        match self {
            HessenbergCase::Gl2 { .. } => 2,
            _ => 3,
        }
    }

    /// `x` and `t` scaled by the common denominator `d`: `(x·d, t·d, d)`.
    fn datum(self) -> (Vec<i64>, i64, i64) {
        match self {
            HessenbergCase::Gl2 { n } => (vec![2, 1], 2 * n + 1, 2),
            HessenbergCase::Gl3Case1 { n1 } => (vec![3, 2, 1], 3 * n1 + 1, 3),
            HessenbergCase::Gl3Case2 { n2 } => (vec![3, 2, 1], 3 * n2 + 2, 3),
        }
    }

    /// Whether the cell of `ε^a` meets the fiber.
    pub fn admissible(self, a: &[i64]) -> bool {
        match self {
            HessenbergCase::Gl2 { n } => -(n + 1) <= a[0] - a[1] && a[0] - a[1] <= n,
            HessenbergCase::Gl3Case1 { n1 } => a[0] - a[1] <= n1 && a[1] - a[2] <= n1 && a[2] - a[0] <= n1 + 1,
            HessenbergCase::Gl3Case2 { n2 } => a[0] - a[2] <= n2 && a[1] - a[0] <= n2 + 1 && a[2] - a[1] <= n2 + 1,
        }
    }
}

/// Number of affine roots `(m, α)` with `0 <= m + α(x) < t` and `m + α(y) < 0`.
pub fn hessenberg_cell_dimension(case: HessenbergCase, y: &[i64]) -> u32 {
    let (x, t, d) = case.datum();
    let r = case.rank();
    assert_eq!(y.len(), r, "cell label has the wrong rank");
    let mut c = 0;
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let ax = x[i] - x[j];
            let ay = y[i] - y[j];
            // 0 <= m d + ax < t, m + ay < 0
            let lo = ceil_div(-ax, d);
            let hi = floor_div(t - 1 - ax, d).min(-ay - 1);
            if hi >= lo {
                c += (hi - lo + 1) as u32;
            }
        }
    }
    c
}

/// `Σ q^{dim}` over the admissible cells `ε^a` with `Σ a = ν0`.
pub fn hessenberg_sum_with(case: HessenbergCase, nu0: i64, admissible: impl Fn(&[i64]) -> bool) -> QPoly {
    let (_, t, d) = case.datum();
    let r = ceil_div(t, d) + 2;
    let mut out = QPoly::zero();
    match case.rank() {
        2 => {
            for a1 in -2 * r + nu0.min(0)..=2 * r + nu0.max(0) {
                let a = [a1, nu0 - a1];
                if (a[0] - a[1]).abs() <= 2 * r && admissible(&a) {
                    let y: Vec<i64> = a.iter().map(|v| -v).collect();
                    out.add_term(hessenberg_cell_dimension(case, &y) as i32, 1);
                }
            }
        }
        _ => {
            let b = 3 * r + nu0.abs();
            for a1 in -b..=b {
                for a2 in -b..=b {
                    let a = [a1, a2, nu0 - a1 - a2];
                    if admissible(&a) {
                        let y: Vec<i64> = a.iter().map(|v| -v).collect();
                        out.add_term(hessenberg_cell_dimension(case, &y) as i32, 1);
                    }
                }
            }
        }
    }
    out
}

/// `|X_γ^{ν0}(F_q)|` for an equivalued anisotropic element, cell by cell.
pub fn hessenberg_sum(case: HessenbergCase, nu0: i64) -> QPoly {
    hessenberg_sum_with(case, nu0, |a| case.admissible(a))
}

/// `#{a1 >= a2 >= a3, Σ a = 0, a1 - a3 = n}`.
pub fn shell_count(n: i64) -> i64 {
    let k = n.div_euclid(3);
    match n.rem_euclid(3) {
        0 => k + 1,
        1 => k,
        _ => k + 1,
    }
}
