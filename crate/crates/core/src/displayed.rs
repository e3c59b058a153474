//! Closed-form Chern character formulas for specific kernels, transcribed
//! literally, and a comparison harness against the pushforward engine.
//!
//! Several of these closed forms disagree with the engine by sign or by a
//! whole term. The harness reports differences; it never adjusts either side.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, serde_rat_vec, to_rat, Rat};
use crate::error::{Error, Result};
use crate::lattice::{intersect, DivisorClass};
use crate::matrix::RatMatrix;
use crate::mukai::{ChernCharacter, ChernJson};
use crate::transform::CohTransform;

/// Names of the displayed formula blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormulaId {
    #[serde(rename = "prop1.1")]
    GeneralKernel,
    #[serde(rename = "thm2.5")]
    NoCohomology,
    #[serde(rename = "thm5.1")]
    ReflexiveNondegenerate,
    #[serde(rename = "thm6.2-i")]
    ReflexiveTypeI,
    #[serde(rename = "thm6.2-ii")]
    ReflexiveTypeII,
    #[serde(rename = "prop3.9")]
    PicardRankOne,
}

impl FormulaId {
    pub const ALL: [FormulaId; 6] = [
        FormulaId::GeneralKernel,
        FormulaId::NoCohomology,
        FormulaId::ReflexiveNondegenerate,
        FormulaId::ReflexiveTypeI,
        FormulaId::ReflexiveTypeII,
        FormulaId::PicardRankOne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::GeneralKernel => "prop1.1",
            FormulaId::NoCohomology => "thm2.5",
            FormulaId::ReflexiveNondegenerate => "thm5.1",
            FormulaId::ReflexiveTypeI => "thm6.2-i",
            FormulaId::ReflexiveTypeII => "thm6.2-ii",
            FormulaId::PicardRankOne => "prop3.9",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown formula id `{s}` (expected one of {})",
                    FormulaId::ALL.map(FormulaId::as_str).join(", ")
                ))
            })
    }
}

/// A displayed formula block together with the classes it is written in.
#[derive(Clone, Debug)]
pub enum DisplayedFormula {
    /// General `(A, B, C, D)` kernel.
    GeneralKernel {
        a: DivisorClass,
        b: DivisorClass,
        c: DivisorClass,
        d: DivisorClass,
    },
    /// `A = O = B`, `C = L`, `D = L*`; the unbound symbol in ch₁ is read as `f`.
    NoCohomology { l: DivisorClass },
    ReflexiveNondegenerate { h: DivisorClass, l: DivisorClass },
    ReflexiveTypeI {
        h: DivisorClass,
        l: DivisorClass,
        d1: DivisorClass,
        d2: DivisorClass,
    },
    ReflexiveTypeII {
        h: DivisorClass,
        l: DivisorClass,
        d1: DivisorClass,
        d2: DivisorClass,
    },
    /// Picard rank one; input `(r, cℓ, t)`, output `ch₁` a multiple of `ℓ̂`.
    PicardRankOne {
        n: i64,
        l: DivisorClass,
        l_hat: DivisorClass,
    },
}

/// A class with rational coefficients, used for intermediate sums.
#[derive(Clone, Debug, PartialEq)]
struct RatClass(Vec<Rat>);

impl RatClass {
    fn zero(n: usize) -> Self {
        RatClass(vec![Rat::zero(); n])
    }

    fn plus(mut self, k: Rat, x: &DivisorClass) -> Self {
        for (acc, c) in self.0.iter_mut().zip(x.coords()) {
            *acc += &k * to_rat(c);
        }
        self
    }
}

fn dot(x: &DivisorClass, y: &DivisorClass) -> Rat {
    to_rat(&intersect(x, y).expect("formula classes share the lattice"))
}

fn sq(x: &DivisorClass) -> Rat {
    to_rat(&x.square())
}

fn half() -> Rat {
    crate::arith::ratio(1, 2)
}

fn quarter() -> Rat {
    crate::arith::ratio(1, 4)
}

impl DisplayedFormula {
    pub fn id(&self) -> FormulaId {
        match self {
            DisplayedFormula::GeneralKernel { .. } => FormulaId::GeneralKernel,
            DisplayedFormula::NoCohomology { .. } => FormulaId::NoCohomology,
            DisplayedFormula::ReflexiveNondegenerate { .. } => FormulaId::ReflexiveNondegenerate,
            DisplayedFormula::ReflexiveTypeI { .. } => FormulaId::ReflexiveTypeI,
            DisplayedFormula::ReflexiveTypeII { .. } => FormulaId::ReflexiveTypeII,
            DisplayedFormula::PicardRankOne { .. } => FormulaId::PicardRankOne,
        }
    }

    fn anchor(&self) -> &DivisorClass {
        match self {
            DisplayedFormula::GeneralKernel { a, .. } => a,
            DisplayedFormula::NoCohomology { l } => l,
            DisplayedFormula::ReflexiveNondegenerate { h, .. }
            | DisplayedFormula::ReflexiveTypeI { h, .. }
            | DisplayedFormula::ReflexiveTypeII { h, .. } => h,
            DisplayedFormula::PicardRankOne { l, .. } => l,
        }
    }

    /// The basis in which differences are reported, with display names.
    pub fn natural_basis(&self) -> Vec<(&'static str, DivisorClass)> {
        match self {
            DisplayedFormula::ReflexiveNondegenerate { h, l } => vec![
                ("h_hat", &(2 * l) + &(5 * h)),
                ("l_hat", &(5 * l) + &(12 * h)),
            ],
            DisplayedFormula::ReflexiveTypeI { h, d1, d2, .. }
            | DisplayedFormula::ReflexiveTypeII { h, d1, d2, .. } => {
                vec![("h", h.clone()), ("d1", d1.clone()), ("d2", d2.clone())]
            }
            DisplayedFormula::NoCohomology { l } => vec![("l", l.clone())],
            DisplayedFormula::PicardRankOne { l_hat, .. } => vec![("l_hat", l_hat.clone())],
            DisplayedFormula::GeneralKernel { a, .. } => {
                let lat = a.lattice();
                (0..lat.rank())
                    .map(|i| ("e", DivisorClass::basis(lat, i)))
                    .collect()
            }
        }
    }

    /// Evaluates the displayed block on `(r, f, t)`; returns flattened
    /// `(ch₀, ch₁, ch₂)` coordinates.
    pub fn evaluate(&self, input: &ChernCharacter) -> Result<Vec<Rat>> {
        input.f.check_same(self.anchor())?;
        let r = to_rat(&input.r);
        let f = &input.f;
        let t = input.t.clone();
        let n = f.coords().len();
        let (ch0, ch1, ch2) = match self {
            DisplayedFormula::GeneralKernel { a, b, c, d } => {
                let ch0 = &r * (sq(a) + sq(c) + rat(6)) * half() + dot(f, &(a + c)) + rat(2) * &t;
                let ch1 = RatClass::zero(n)
                    .plus(&r * half() * (sq(a) + rat(4)), b)
                    .plus(&r * half() * (sq(c) + rat(2)), d)
                    .plus(-(&r), c)
                    .plus(dot(f, a), b)
                    .plus(dot(f, c), d)
                    .plus(rat(-1), f)
                    .plus(t.clone(), &(b + d));
                let ch2 = &r
                    * quarter()
                    * (sq(a) * sq(b) + rat(4) * sq(b) + sq(c) * sq(d) - rat(2) * sq(c)
                        + rat(2) * sq(d)
                        - rat(4) * dot(c, d))
                    + half()
                        * ((sq(d) - rat(2)) * dot(f, c) + sq(b) * dot(f, a) - rat(2) * dot(f, d))
                    + half() * &t * (sq(b) + sq(d) - rat(2));
                (ch0, ch1, ch2)
            }
            DisplayedFormula::NoCohomology { l } => {
                let fl = dot(f, l);
                let ch0 = &r + &fl + rat(2) * &t;
                let ch1 = RatClass::zero(n).plus(-(&fl + &t), l).plus(rat(-1), f);
                let ch2 = rat(-2) * &fl - rat(3) * &t;
                (ch0, ch1, ch2)
            }
            DisplayedFormula::ReflexiveNondegenerate { h, l } => {
                let h_hat = &(2 * l) + &(5 * h);
                let l_hat = &(5 * l) + &(12 * h);
                let l2h = l + &(2 * h);
                let ch0 = -(&r) + dot(f, l) + rat(2) * &t;
                let ch1 = RatClass::zero(n)
                    .plus(rat(-1), f)
                    .plus(dot(f, &l2h), &h_hat)
                    .plus(dot(f, h) - &t, &l_hat);
                let ch2 = rat(-2) * dot(f, l) - rat(5) * &t;
                (ch0, ch1, ch2)
            }
            DisplayedFormula::ReflexiveTypeI { h, l, d1, d2 } => {
                let ch0 = -(&r) + dot(f, l) + rat(2) * &t;
                let ch1 = RatClass::zero(n)
                    .plus(rat(-1), f)
                    .plus(-t.clone(), l)
                    .plus(-dot(f, h), &(l + &(2 * h)))
                    .plus(dot(f, l), l)
                    .plus(-dot(f, d1), d1)
                    .plus(-dot(f, d2), d2);
                let ch2 = rat(-2) * dot(f, l) - rat(5) * &t;
                (ch0, ch1, ch2)
            }
            DisplayedFormula::ReflexiveTypeII { h, l, d1, d2 } => {
                let ch0 = -(&r) + dot(f, l) + rat(2) * &t;
                let ch1 = RatClass::zero(n)
                    .plus(rat(-1), f)
                    .plus(dot(f, l), h)
                    .plus(dot(f, d1), d2)
                    .plus(-dot(f, &(&(2 * d1) + d2)), d1)
                    .plus(t.clone(), &(&(d2 - &(3 * d1)) + &(2 * h)));
                let ch2 = rat(-2) * dot(f, l) - rat(5) * &t;
                (ch0, ch1, ch2)
            }
            DisplayedFormula::PicardRankOne { n: m, l, l_hat } => {
                let c = coefficient_along(f, l)?;
                let m = rat(*m);
                let lsq = sq(l);
                let ch0 = (rat(2) * &m + rat(3)) * &r + &c * &lsq + rat(2) * &t;
                let coeff = (&m + rat(1)) * &r + &c * (rat(4) * &m + rat(1)) + &t;
                let ch1 = RatClass::zero(l_hat.coords().len()).plus(coeff, l_hat);
                let ch2 = rat(2) * (&m * &m - rat(1)) * &r
                    + (&m - rat(1)) * &c * &lsq
                    + (rat(2) * &m - rat(1)) * &t;
                (ch0, ch1, ch2)
            }
        };
        let mut out = vec![ch0];
        out.extend(ch1.0);
        out.push(ch2);
        Ok(out)
    }
}

/// `c` with `f = c·ℓ`, or an error when `f` is not a multiple of `ℓ`.
fn coefficient_along(f: &DivisorClass, l: &DivisorClass) -> Result<Rat> {
    let basis = RatMatrix::from_columns(vec![l.coords().iter().map(to_rat).collect()])?;
    let rhs: Vec<Rat> = f.coords().iter().map(to_rat).collect();
    basis
        .solve_unique(&rhs)?
        .map(|mut v| v.remove(0))
        .ok_or_else(|| Error::InvalidArgument("input class is not a multiple of the generator".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub input: ChernJson,
    pub engine: ChernJson,
    pub displayed: ChernJson,
    pub difference: ChernJson,
    /// ch₁ of the difference in the formula's natural basis, when it spans.
    #[serde(
        with = "serde_rat_vec_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub difference_c1_in_basis: Option<Vec<Rat>>,
}

mod serde_rat_vec_opt {
    use super::{serde_rat_vec, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_rat_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rat>>, D::Error> {
        let v: Option<Vec<String>> = Option::deserialize(d)?;
        v.map(|v| {
            v.iter()
                .map(|s| crate::arith::parse_rat(s).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub formula: FormulaId,
    pub basis: Vec<String>,
    pub points_checked: usize,
    pub mismatches: usize,
    pub entries: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The exhaustive grid `|r| ≤ 3`, `f ∈ [−3, 3]^ρ`, `|t| ≤ 5`.
pub fn default_grid(lattice: &std::sync::Arc<crate::lattice::NsLattice>) -> Vec<ChernCharacter> {
    let rank = lattice.rank();
    let mut fs: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        fs = fs
            .into_iter()
            .flat_map(|v| {
                (-3..=3).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    let mut out = Vec::with_capacity(7 * fs.len() * 11);
    for r in -3..=3 {
        for f in &fs {
            for t in -5..=5 {
                out.push(ChernCharacter::from_i64(lattice, r, f, t).expect("grid dimensions"));
            }
        }
    }
    out
}

/// Compares the engine `transform` with the displayed block on `inputs`;
/// only inputs with a nonzero difference are listed.
pub fn crosscheck_on(
    transform: &CohTransform,
    formula: &DisplayedFormula,
    inputs: &[ChernCharacter],
) -> Result<DiffReport> {
    let basis = formula.natural_basis();
    let basis_matrix = RatMatrix::from_columns(
        basis
            .iter()
            .map(|(_, b)| b.coords().iter().map(to_rat).collect())
            .collect(),
    )?;
    let target = transform.target();
    let mut entries = Vec::new();
    for input in inputs {
        let engine = transform.apply_vector(&input.to_vector())?;
        let displayed = formula.evaluate(input)?;
        if engine.len() != displayed.len() {
            return Err(Error::Dimension {
                expected: engine.len(),
                got: displayed.len(),
            });
        }
        if engine == displayed {
            continue;
        }
        let diff: Vec<Rat> = displayed.iter().zip(&engine).map(|(a, b)| a - b).collect();
        let c1 = &diff[1..diff.len() - 1];
        let in_basis = basis_matrix.solve_unique(c1)?;
        entries.push(DiffEntry {
            input: input.into(),
            engine: (&ChernCharacter::from_vector(target, &engine)?).into(),
            displayed: (&ChernCharacter::from_vector(target, &displayed)?).into(),
            difference: (&ChernCharacter::from_vector(target, &diff)?).into(),
            difference_c1_in_basis: in_basis,
        });
    }
    Ok(DiffReport {
        formula: formula.id(),
        basis: basis.iter().map(|(n, _)| n.to_string()).collect(),
        points_checked: inputs.len(),
        mismatches: entries.len(),
        entries,
    })
}

/// [`crosscheck_on`] over the default exhaustive grid of the source lattice.
pub fn crosscheck_specialized(
    transform: &CohTransform,
    formula: &DisplayedFormula,
) -> Result<DiffReport> {
    crosscheck_on(transform, formula, &default_grid(transform.source()))
}

/// `Dᵀ M D` with `D = diag(1, −1, 1)`: the rank-one matrix with the
/// orientation of both generators reversed.
pub fn reverse_rank_one_orientation(m: &RatMatrix) -> RatMatrix {
    let mut d = RatMatrix::identity(3);
    d[(1, 1)] = rat(-1);
    d.mul(m).and_then(|x| x.mul(&d)).expect("3x3")
}
