//! Numeric consequences for the stratification by special line bundles, the
//! primitivity of the polarization, and Mukai vectors of transformed ideal
//! sheaves of points.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, ratio, serde_int, serde_int_vec, serde_rat, serde_rat_vec, to_rat, Int, Rat};
use crate::error::{Error, Result};
use crate::lattice::{degree, intersect, proportional, DivisorClass};
use crate::mukai::{ch_to_mukai, mukai_pairing, ChernCharacter, MukaiJson, MukaiVector};
use crate::surface::{AssumptionKind, SurfaceSpec};
use crate::transform::CohTransform;

/// `c₁(L)² = 4|Z(s)| − 8`, solved for the length `|Z(s)|`.
pub fn es_relation(lsq: &Int) -> Result<Int> {
    if lsq < &int(-8) || !(lsq % int(4)).is_zero() {
        return Err(Error::InvalidArgument(format!(
            "ℓ² = {lsq} is incompatible with ℓ² = 4z − 8 for a length z ≥ 0"
        )));
    }
    Ok((lsq + int(8)) / int(4))
}

fn require_ample(spec: &SurfaceSpec, h: &DivisorClass) -> Result<()> {
    if spec.is_declared(AssumptionKind::Ample, h) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "slopes need a polarization: declare h as ample in the surface spec".into(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub relation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumBound {
    #[serde(with = "crate::moduli::serde_opt_rat", default)]
    pub a: Option<Rat>,
    /// `a < μ(M) < μ(L) − a`, when `a` is given.
    pub hypothesis: Option<bool>,
    #[serde(with = "serde_int")]
    pub l_dot_m_minus_m_square: Int,
    /// `ℓ·m − m² > z`.
    pub conclusion: bool,
    /// `hypothesis ⟹ conclusion`, when `a` is given.
    pub implication_holds: Option<bool>,
    /// No nonzero `(α, β)` with `α·m = β·ℓ`.
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataReport {
    #[serde(with = "serde_int_vec")]
    pub m: Vec<Int>,
    #[serde(with = "serde_int")]
    pub z: Int,
    /// `μ(M), ½μ(L), μ(LM*), μ(L), h²`.
    #[serde(with = "serde_rat_vec")]
    pub slopes: Vec<Rat>,
    pub links: Vec<ChainLink>,
    pub chain_holds: bool,
    pub stratum_bound: StratumBound,
}

pub(crate) mod serde_opt_rat {
    use crate::arith::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Evaluates `0 < μ(M) < ½μ(L) < μ(LM*) < μ(L) ≤ h²` and the predicate
/// "`a < μ(M) < μ(L) − a` implies `ℓ·m − m² > z`".
pub fn strata_chain(
    spec: &SurfaceSpec,
    l: &DivisorClass,
    m: &DivisorClass,
    h: &DivisorClass,
    z: &Int,
    a: Option<&Rat>,
) -> Result<StrataReport> {
    require_ample(spec, h)?;
    l.check_same(m)?;
    l.check_same(h)?;
    let mu_m = to_rat(&degree(m, h)?);
    let mu_l = to_rat(&degree(l, h)?);
    let half_l = &mu_l * ratio(1, 2);
    let mu_lm = to_rat(&degree(&(l - m), h)?);
    let hsq = to_rat(&h.square());
    let links = vec![
        ChainLink { relation: "0<μ(M)".into(), holds: mu_m > rat(0) },
        ChainLink { relation: "μ(M)<½μ(L)".into(), holds: mu_m < half_l },
        ChainLink { relation: "½μ(L)<μ(LM*)".into(), holds: half_l < mu_lm },
        ChainLink { relation: "μ(LM*)<μ(L)".into(), holds: mu_lm < mu_l },
        ChainLink { relation: "μ(L)≤h²".into(), holds: mu_l <= hsq },
    ];
    let gap = intersect(l, m)? - m.square();
    let conclusion = &gap > z;
    let hypothesis = a.map(|a| a < &mu_m && mu_m < &mu_l - a);
    let stratum_bound = StratumBound {
        a: a.cloned(),
        hypothesis,
        l_dot_m_minus_m_square: gap,
        conclusion,
        implication_holds: hypothesis.map(|hyp| !hyp || conclusion),
        independent: !proportional(l, m)?,
    };
    Ok(StrataReport {
        m: m.coords().to_vec(),
        z: z.clone(),
        chain_holds: links.iter().all(|c| c.holds),
        slopes: vec![mu_m, half_l, mu_lm, mu_l, hsq],
        links,
        stratum_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityReport {
    pub n: i64,
    #[serde(with = "serde_int")]
    pub l_square: Int,
    /// `(ℓ² + 8)/4`, kept rational when `4 ∤ ℓ²`.
    #[serde(with = "serde_rat")]
    pub z: Rat,
    /// `ℓ·m − m²` with `m = h`, i.e. `(n−1)h²`.
    #[serde(with = "serde_int")]
    pub l_dot_m_minus_m_square: Int,
    /// `ℓ·m − m² > z`.
    pub inequality_holds: bool,
    pub independent: bool,
    /// `8β² < −(α−2β)²m²` for `(α, β) = (n, 1)`.
    pub proportional_bound_holds: bool,
    /// The stratum bound's conclusions cannot both hold, so `ℓ = n·h` admits no transform.
    pub excluded: bool,
}

/// Replays the substitution `ℓ = n·h`, `m = h` into the stratum bound.
pub fn check_ample_primitive(
    spec: &SurfaceSpec,
    l: &DivisorClass,
    n: i64,
    h: &DivisorClass,
) -> Result<PrimitivityReport> {
    require_ample(spec, h)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "n = {n}: ℓ must be a proper multiple n·h with n ≥ 2"
        )));
    }
    if l != &(n * h) {
        return Err(Error::InvalidArgument(format!(
            "ℓ is not {n}·h"
        )));
    }
    let l_square = l.square();
    let z = (to_rat(&l_square) + rat(8)) * ratio(1, 4);
    let gap = intersect(l, h)? - h.square();
    let inequality_holds = to_rat(&gap) > z;
    let independent = !proportional(l, h)?;
    let (alpha, beta) = (int(n), int(1));
    let lhs = int(8) * &beta * &beta;
    let d = &alpha - int(2) * &beta;
    let rhs = -(&d * &d) * h.square();
    let proportional_bound_holds = lhs < rhs;
    Ok(PrimitivityReport {
        n,
        l_square,
        z,
        l_dot_m_minus_m_square: gap,
        inequality_holds,
        independent,
        proportional_bound_holds,
        excluded: !(inequality_holds && independent),
    })
}

/// How the transform treats `O`, which fixes the expected vector shape.
#[derive(Clone, Debug)]
pub enum HilbFlavor {
    /// `Φ(O) = O`; expected `±(2n−1, ±n·m, −n−1)`.
    NoCohomology { m: DivisorClass },
    /// `Φ(O) = O[−1]`; expected `±(1+2n, ±n·ℓ̂, 1−3n)`.
    Reflexive { l_hat: DivisorClass },
}

impl HilbFlavor {
    pub fn name(&self) -> &'static str {
        match self {
            HilbFlavor::NoCohomology { .. } => "no-cohomology",
            HilbFlavor::Reflexive { .. } => "reflexive",
        }
    }

    fn expected(&self, n: i64) -> (i64, &DivisorClass, i64) {
        match self {
            HilbFlavor::NoCohomology { m } => (2 * n - 1, m, -n - 1),
            HilbFlavor::Reflexive { l_hat } => (1 + 2 * n, l_hat, 1 - 3 * n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbReport {
    pub n: i64,
    pub flavor: String,
    pub vector: MukaiJson,
    pub matches_expected: bool,
    /// `⟨v, v⟩`, equal to `2n − 2`.
    #[serde(with = "serde_rat")]
    pub self_pairing: Rat,
}

/// The Mukai vector of `Φ(I_W)` for a length-`n` subscheme `W`, up to sign.
pub fn hilb_moduli_vector(t: &CohTransform, n: i64, flavor: &HilbFlavor) -> Result<(MukaiVector, HilbReport)> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("n must be non-negative, got {n}")));
    }
    let src = t.source();
    let o = ChernCharacter::structure_sheaf(src);
    let image = t.apply(&o)?;
    let target_o = ChernCharacter::structure_sheaf(t.target());
    let sign_ok = match flavor {
        HilbFlavor::NoCohomology { .. } => image == target_o,
        HilbFlavor::Reflexive { .. } => image == target_o.neg(),
    };
    if !sign_ok {
        return Err(Error::InvalidArgument(format!(
            "transform does not match the {} flavor: Φ(O) has ch ({}, {:?}, {})",
            flavor.name(),
            image.r,
            image.f.coords(),
            crate::arith::format_rat(&image.t)
        )));
    }
    let ideal = ChernCharacter::new(int(1), crate::lattice::DivisorClass::zero(src), rat(-n));
    let v = ch_to_mukai(&t.apply(&ideal)?).normalized_sign();
    let (r, cls, s) = flavor.expected(n);
    cls.check_same(&v.f)?;
    let matches_expected = [1, -1].into_iter().any(|e| {
        let w = MukaiVector {
            r: int(r),
            f: (e * n) * cls,
            s: rat(s),
        };
        w.normalized_sign() == v
    });
    let self_pairing = mukai_pairing(&v, &v)?;
    let report = HilbReport {
        n,
        flavor: flavor.name().into(),
        vector: (&v).into(),
        matches_expected,
        self_pairing,
    };
    Ok((v, report))
}

/// `2n − 2`: the Mukai self-pairing of both families of vectors.
pub fn expected_self_pairing(n: i64) -> Rat {
    rat(2 * n - 2)
}
