//! Rank-2 kernel data `(A, B, C, D)` for extensions
//! `0 → A⊠B → E → (C⊠D)·I_Δ → 0` and the numeric conditions under which
//! such an extension induces an equivalence.

use serde::{Deserialize, Serialize};

use crate::arith::{int, serde_int, serde_int_vec, Int};
use crate::error::Result;
use crate::lattice::{chi_line, DivisorClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSpec {
    pub a: DivisorClass,
    pub b: DivisorClass,
    pub c: DivisorClass,
    pub d: DivisorClass,
    /// Classes asserted to have no cohomology. Duals are covered implicitly
    /// (Serre duality exchanges `H^j(L)` and `H^{2-j}(L*)`).
    pub declared_vanishing: Vec<DivisorClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `AB = CD`, `(a−c)² = −4`, and `AC*` is declared to have no cohomology.
    Sufficient,
    /// The lattice conditions hold but the vanishing is not declared.
    NumericallyConsistent,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub ab_equals_cd: bool,
    #[serde(with = "serde_int_vec")]
    pub a_minus_c: Vec<Int>,
    #[serde(with = "serde_int")]
    pub a_minus_c_square: Int,
    pub a_minus_c_square_is_minus_4: bool,
    pub a_minus_c_declared_no_cohomology: bool,
    #[serde(with = "serde_int")]
    pub chi_ac_dual: Int,
    #[serde(with = "serde_int")]
    pub chi_bd_dual: Int,
    pub b_minus_d_declared_no_cohomology: bool,
    pub verdict: Verdict,
}

impl ValidityReport {
    /// Parts (1) and (2): `AB = CD` and `(a−c)² = −4`.
    pub fn lattice_conditions(&self) -> bool {
        self.ab_equals_cd && self.a_minus_c_square_is_minus_4
    }
}

impl KernelSpec {
    pub fn new(
        a: DivisorClass,
        b: DivisorClass,
        c: DivisorClass,
        d: DivisorClass,
        declared_vanishing: Vec<DivisorClass>,
    ) -> Result<Self> {
        a.check_same(&b)?;
        a.check_same(&c)?;
        a.check_same(&d)?;
        for v in &declared_vanishing {
            a.check_same(v)?;
        }
        Ok(KernelSpec {
            a,
            b,
            c,
            d,
            declared_vanishing,
        })
    }

    pub fn lattice(&self) -> &std::sync::Arc<crate::lattice::NsLattice> {
        self.a.lattice()
    }

    /// Whether `x` or its dual is declared to have no cohomology.
    pub fn vanishing_declared(&self, x: &DivisorClass) -> bool {
        let dual = -x;
        self.declared_vanishing
            .iter()
            .any(|v| v == x || *v == dual)
    }
}

pub fn check_sufficient(k: &KernelSpec) -> ValidityReport {
    let ab_equals_cd = &k.a + &k.b == &k.c + &k.d;
    let ac = &k.a - &k.c;
    let bd = &k.b - &k.d;
    let sq = ac.square();
    let square_ok = sq == int(-4);
    let declared = k.vanishing_declared(&ac);
    let verdict = match (ab_equals_cd && square_ok, declared) {
        (true, true) => Verdict::Sufficient,
        (true, false) => Verdict::NumericallyConsistent,
        (false, _) => Verdict::Fails,
    };
    ValidityReport {
        ab_equals_cd,
        a_minus_c: ac.coords().to_vec(),
        a_minus_c_square: sq,
        a_minus_c_square_is_minus_4: square_ok,
        a_minus_c_declared_no_cohomology: declared,
        chi_ac_dual: chi_line(&ac),
        chi_bd_dual: chi_line(&bd),
        b_minus_d_declared_no_cohomology: k.vanishing_declared(&bd),
        verdict,
    }
}

/// The normalization `det Φ(O) = O`: `(χ(C) − 1)·d = c − χ(A)·b`.
pub fn check_necessary_det(k: &KernelSpec) -> bool {
    let lhs = &(chi_line(&k.c) - int(1)) * &k.d;
    let rhs = &k.c - &(&chi_line(&k.a) * &k.b);
    lhs == rhs
}

/// Twists by `A*⊠B*`, giving `(0, 0, c−a, d−b)`.
pub fn normalize_twist(k: &KernelSpec) -> KernelSpec {
    let zero = DivisorClass::zero(k.lattice());
    KernelSpec {
        a: zero.clone(),
        b: zero,
        c: &k.c - &k.a,
        d: &k.d - &k.b,
        declared_vanishing: k.declared_vanishing.clone(),
    }
}

/// The exact shape forced by `Φ(O) = O`: `A = O = B`, `C = D*`, and `C`
/// without cohomology (numerically `c² = −4`, plus the declaration).
pub fn check_phio_identity(k: &KernelSpec) -> bool {
    k.a.is_zero()
        && k.b.is_zero()
        && (&k.c + &k.d).is_zero()
        && k.c.square() == int(-4)
        && k.vanishing_declared(&k.c)
}
