//! Reflexive K3 surfaces: `h² = 2`, `ℓ² = −12`, `h·ℓ = 0`.
//!
//! A reflexive surface is degenerate when `ℓ+2h` is effective. Its rational
//! components `c₁..c_n` (2 ≤ n ≤ 4) then regroup into `ℓ+2h = d₁ + d₂` with
//! `d₁² = d₂² = −2` and `d₁·d₂ = 0`. The degree pattern of `(d₁, d₂)`
//! separates type I `(2,2)` from type II `(1,3)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{int, serde_int, serde_int_vec, Int};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::lattice::{chi_line, degree, in_positive_cone, intersect, sum_classes, DivisorClass, NsLattice};
use crate::surface::{AssumptionKind, SurfaceSpec};

#[derive(Clone, Debug)]
pub struct ReflexiveSurface {
    pub spec: SurfaceSpec,
    pub h: DivisorClass,
    pub l: DivisorClass,
    pub degenerate: bool,
    pub curves: Option<Vec<DivisorClass>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexiveReport {
    #[serde(with = "serde_int")]
    pub h_square: Int,
    #[serde(with = "serde_int")]
    pub l_square: Int,
    #[serde(with = "serde_int")]
    pub h_dot_l: Int,
    #[serde(with = "serde_int")]
    pub chi_l_plus_2h: Int,
    #[serde(with = "serde_int")]
    pub deg_l_plus_2h: Int,
    pub degenerate: bool,
    pub curve_count: usize,
}

fn violation(identity: &str, detail: impl fmt::Display) -> Error {
    Error::violation(format!("{identity} fails: {detail}"))
}

pub fn validate_reflexive(spec: &SurfaceSpec, h_name: &str, l_name: &str) -> Result<ReflexiveSurface> {
    let h = spec.class(h_name)?.clone();
    let l = spec.class(l_name)?.clone();
    let h2 = h.square();
    if h2 != int(2) {
        return Err(violation("H^2=2", format!("h^2 = {h2}")));
    }
    let l2 = l.square();
    if l2 != int(-12) {
        return Err(violation("L^2=-12", format!("l^2 = {l2}")));
    }
    let hl = intersect(&h, &l)?;
    if hl != int(0) {
        return Err(violation("H·L=0", format!("h·l = {hl}")));
    }
    let total = &l + &(2 * &h);
    let curves = spec.curves();
    if let Some(cs) = &curves {
        if !(2..=4).contains(&cs.len()) {
            return Err(Error::InvalidArgument(format!(
                "ℓ+2h must have between 2 and 4 rational components, got {}",
                cs.len()
            )));
        }
        for (i, c) in cs.iter().enumerate() {
            let sq = c.square();
            if sq != int(-2) {
                return Err(violation("c^2=-2", format!("curve {} has square {sq}", i + 1)));
            }
            let d = degree(c, &h)?;
            if d < int(1) {
                return Err(violation("deg(c)≥1", format!("curve {} has degree {d}", i + 1)));
            }
        }
        if sum_classes(spec.lattice(), cs.iter()) != total {
            return Err(violation("Σc_i=ℓ+2h", "declared curves do not sum to ℓ+2h"));
        }
    }
    let degenerate = curves.is_some() || spec.is_declared(AssumptionKind::Effective, &total);
    Ok(ReflexiveSurface {
        spec: spec.clone(),
        h,
        l,
        degenerate,
        curves,
    })
}

impl ReflexiveSurface {
    pub fn lattice(&self) -> &Arc<NsLattice> {
        self.spec.lattice()
    }

    pub fn l_plus_2h(&self) -> DivisorClass {
        &self.l + &(2 * &self.h)
    }

    pub fn report(&self) -> ReflexiveReport {
        let x = self.l_plus_2h();
        ReflexiveReport {
            h_square: self.h.square(),
            l_square: self.l.square(),
            h_dot_l: intersect(&self.h, &self.l).expect("same lattice"),
            chi_l_plus_2h: chi_line(&x),
            deg_l_plus_2h: degree(&x, &self.h).expect("same lattice"),
            degenerate: self.degenerate,
            curve_count: self.curves.as_ref().map_or(0, Vec::len),
        }
    }

    pub fn curve_config(&self) -> Result<CurveConfig> {
        let curves = self.curves.clone().ok_or_else(|| {
            Error::InvalidArgument("surface declares no rational components of ℓ+2h".into())
        })?;
        CurveConfig::new(curves)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatClasses {
    pub h_hat: DivisorClass,
    pub l_hat: DivisorClass,
}

/// `ĥ = 2ℓ+5h` and `ℓ̂ = 5ℓ+12h`, checked against the reflexive relations.
pub fn hat_classes(rs: &ReflexiveSurface) -> Result<HatClasses> {
    let (h, l) = (&rs.h, &rs.l);
    let h_hat = &(2 * l) + &(5 * h);
    let l_hat = &(5 * l) + &(12 * h);
    let ok = h_hat.square() == int(2)
        && l_hat.square() == int(-12)
        && intersect(&h_hat, &l_hat)? == int(0);
    if !ok {
        return Err(violation("Ĥ^2=2, L̂^2=-12, Ĥ·L̂=0", "hat classes"));
    }
    Ok(HatClasses { h_hat, l_hat })
}

/// Rational curves `c₁..c_n` with multiplicity; equal classes are repeats.
#[derive(Clone, Debug)]
pub struct CurveConfig {
    curves: Vec<DivisorClass>,
    products: Vec<Vec<i64>>,
}

impl CurveConfig {
    pub fn new(curves: Vec<DivisorClass>) -> Result<Self> {
        let first = curves
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty curve list".into()))?;
        let mut products = vec![vec![0; curves.len()]; curves.len()];
        for (i, a) in curves.iter().enumerate() {
            a.check_same(first)?;
            for (j, b) in curves.iter().enumerate() {
                products[i][j] = intersect(a, b)?.to_i64().ok_or_else(|| {
                    Error::InvalidArgument("curve intersection number out of range".into())
                })?;
            }
        }
        Ok(CurveConfig { curves, products })
    }

    /// Builds a configuration from intersection data alone. `labels[i]` names
    /// the class of curve `i`; `products` is the full `n×n` matrix. The curves
    /// are realized as basis vectors of a lattice on the distinct labels.
    pub fn from_products(labels: &[usize], products: &[Vec<i64>]) -> Result<Self> {
        let n = labels.len();
        if products.len() != n || products.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: products.len(),
            });
        }
        let mut distinct: BTreeMap<usize, usize> = BTreeMap::new();
        let mut reps = Vec::new();
        for (i, &lab) in labels.iter().enumerate() {
            if let std::collections::btree_map::Entry::Vacant(e) = distinct.entry(lab) {
                e.insert(reps.len());
                reps.push(i);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if products[i][j] != products[j][i] {
                    return Err(violation("symmetric intersection data", format!("({i},{j})")));
                }
                let ri = reps[distinct[&labels[i]]];
                let rj = reps[distinct[&labels[j]]];
                if products[i][j] != products[ri][rj] {
                    return Err(violation(
                        "repeated curves have equal intersections",
                        format!("curve {} and curve {}", i + 1, j + 1),
                    ));
                }
            }
        }
        let gram: Vec<Vec<Int>> = reps
            .iter()
            .map(|&i| reps.iter().map(|&j| int(products[i][j])).collect())
            .collect();
        let lattice = NsLattice::new(gram)?;
        let curves = labels
            .iter()
            .map(|lab| DivisorClass::basis(&lattice, distinct[lab]))
            .collect();
        CurveConfig::new(curves)
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[DivisorClass] {
        &self.curves
    }

    pub fn products(&self) -> &[Vec<i64>] {
        &self.products
    }

    pub fn lattice(&self) -> &Arc<NsLattice> {
        self.curves[0].lattice()
    }

    pub fn total(&self) -> DivisorClass {
        sum_classes(self.lattice(), self.curves.iter())
    }

    fn same(&self, i: usize, j: usize) -> bool {
        self.curves[i] == self.curves[j]
    }

    fn pair_sum(&self) -> i64 {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.products[i][j])
            .sum()
    }

    fn sum_of(&self, idx: &[usize]) -> DivisorClass {
        sum_classes(self.lattice(), idx.iter().map(|&i| &self.curves[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub d1: DivisorClass,
    pub d2: DivisorClass,
}

impl Decomposition {
    /// `d₁² = −2 = d₂²` and `d₁·d₂ = 0`.
    pub fn is_valid(&self) -> bool {
        self.d1.square() == int(-2)
            && self.d2.square() == int(-2)
            && intersect(&self.d1, &self.d2).is_ok_and(|p| p == int(0))
    }

    /// The unordered pair with the lexicographically smaller class first.
    pub fn canonical(&self) -> Decomposition {
        if self.d1.coords() <= self.d2.coords() {
            self.clone()
        } else {
            Decomposition {
                d1: self.d2.clone(),
                d2: self.d1.clone(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    #[serde(with = "serde_int_vec")]
    pub d1: Vec<Int>,
    #[serde(with = "serde_int_vec")]
    pub d2: Vec<Int>,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        DecompositionJson {
            d1: d.d1.coords().to_vec(),
            d2: d.d2.coords().to_vec(),
        }
    }
}

/// Which branch of the case analysis produced a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCase {
    TwoCurves,
    ThreeCurves,
    FourWithRepeat,
    FourDisjointPairs,
    FourIsolatedCurve,
}

/// The case analysis on `n = 2, 3, 4` components, literally.
pub fn decompose_curves(cfg: &CurveConfig) -> Result<(Decomposition, SplitCase)> {
    let n = cfg.len();
    let p = |i: usize, j: usize| cfg.products[i][j];
    for i in 0..n {
        if p(i, i) != -2 {
            return Err(violation("c_i^2=-2", format!("curve {} has square {}", i + 1, p(i, i))));
        }
    }
    let dec = |a: &[usize], b: &[usize]| Decomposition {
        d1: cfg.sum_of(a),
        d2: cfg.sum_of(b),
    };
    let check_distinct = |bound: bool| -> Result<()> {
        for i in 0..n {
            for j in i + 1..n {
                if cfg.same(i, j) {
                    continue;
                }
                if p(i, j) < 0 {
                    return Err(violation(
                        "c_i·c_j≥0",
                        format!("c_{}·c_{} = {}", i + 1, j + 1, p(i, j)),
                    ));
                }
                if bound && p(i, j) > 1 {
                    return Err(violation(
                        "(c_i+c_j)^2≤-2",
                        format!("(c_{}+c_{})^2 = {}", i + 1, j + 1, -4 + 2 * p(i, j)),
                    ));
                }
            }
        }
        Ok(())
    };
    let s = cfg.pair_sum();
    match n {
        2 => {
            if s != 0 {
                return Err(violation("c_1·c_2=0", format!("c_1·c_2 = {s}")));
            }
            Ok((dec(&[0], &[1]), SplitCase::TwoCurves))
        }
        3 => {
            for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
                if cfg.same(i, j) {
                    return Err(violation(
                        "c_1·c_3=3/2",
                        format!(
                            "c_{} = c_{} forces c_{}·c_{} = 3/2, but it is {}",
                            i + 1,
                            j + 1,
                            i + 1,
                            k + 1,
                            p(i, k)
                        ),
                    ));
                }
            }
            check_distinct(false)?;
            if s != 1 {
                return Err(violation("c_1·c_2+c_2·c_3+c_3·c_1=1", format!("the sum is {s}")));
            }
            let (i, j, k) = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
                .into_iter()
                .find(|&(i, j, _)| p(i, j) == 1)
                .expect("nonnegative products summing to 1");
            Ok((dec(&[k], &[i, j]), SplitCase::ThreeCurves))
        }
        4 => {
            let mut groups: BTreeMap<Vec<Int>, Vec<usize>> = BTreeMap::new();
            for i in 0..n {
                groups.entry(cfg.curves[i].coords().to_vec()).or_default().push(i);
            }
            if let Some(triple) = groups.values().find(|g| g.len() == 3) {
                let other = (0..n).find(|i| !triple.contains(i)).expect("four curves");
                return Err(violation(
                    "3c_1·c_4=8",
                    format!(
                        "a triple component forces 3c_1·c_4 = 8, but c_1·c_4 = {}",
                        p(triple[0], other)
                    ),
                ));
            }
            check_distinct(true)?;
            if s != 2 {
                return Err(violation("Σ_{i<j}c_i·c_j=2", format!("the sum is {s}")));
            }
            let repeated: Vec<&Vec<usize>> = groups.values().filter(|g| g.len() == 2).collect();
            match repeated.as_slice() {
                [pair] => {
                    let i = pair[0];
                    let rest: Vec<usize> = (0..n).filter(|x| !pair.contains(x)).collect();
                    let (k, m) = (rest[0], rest[1]);
                    if p(i, k) != 1 || p(i, m) != 1 || p(k, m) != 0 {
                        return Err(violation(
                            "c_1·c_3=c_1·c_4=1, c_3·c_4=0",
                            format!("got {}, {}, {}", p(i, k), p(i, m), p(k, m)),
                        ));
                    }
                    Ok((dec(&[i, k], &[i, m]), SplitCase::FourWithRepeat))
                }
                [] => {
                    let edges: Vec<(usize, usize)> = (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .filter(|&(i, j)| p(i, j) == 1)
                        .collect();
                    let (e, f) = (edges[0], edges[1]);
                    let shared = [e.0, e.1].iter().any(|v| *v == f.0 || *v == f.1);
                    if shared {
                        let iso = (0..n)
                            .find(|v| ![e.0, e.1, f.0, f.1].contains(v))
                            .expect("a path on three curves leaves one isolated");
                        let rest: Vec<usize> = (0..n).filter(|&v| v != iso).collect();
                        Ok((dec(&[iso], &rest), SplitCase::FourIsolatedCurve))
                    } else {
                        Ok((dec(&[e.0, e.1], &[f.0, f.1]), SplitCase::FourDisjointPairs))
                    }
                }
                _ => Err(violation("Σ_{i<j}c_i·c_j=2", "two repeated pairs")),
            }
        }
        _ => Err(Error::InvalidArgument(format!(
            "expected 2 to 4 components, got {n}"
        ))),
    }
}

/// Every split of the curve multiset into two parts meeting the
/// decomposition invariants, deduplicated and sorted.
pub fn decompose_brute_force(cfg: &CurveConfig) -> Vec<Decomposition> {
    let n = cfg.len();
    let mut out: Vec<Decomposition> = Vec::new();
    for mask in 0u32..(1 << n) {
        let a: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let b: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let d = Decomposition {
            d1: cfg.sum_of(&a),
            d2: cfg.sum_of(&b),
        };
        if d.is_valid() {
            let c = d.canonical();
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by(|x, y| {
        (x.d1.coords(), x.d2.coords()).cmp(&(y.d1.coords(), y.d2.coords()))
    });
    out
}

/// [`decompose_curves`] on the declared components of `ℓ+2h`.
pub fn decompose_l2h(rs: &ReflexiveSurface) -> Result<(Decomposition, SplitCase)> {
    if !rs.degenerate {
        return Err(Error::InvalidArgument(
            "surface is not declared degenerate (ℓ+2h not effective)".into(),
        ));
    }
    let (d, case) = decompose_curves(&rs.curve_config()?)?;
    if &d.d1 + &d.d2 != rs.l_plus_2h() || !d.is_valid() {
        return Err(violation("d_1+d_2=ℓ+2h, d_1·d_2=0, d_1^2=-2=d_2^2", "decomposition"));
    }
    Ok((d, case))
}

/// Neither `d₁−d₂` nor `d₂−d₁` lies in the declared effective cone.
pub fn difference_not_effective(rs: &ReflexiveSurface, dec: &Decomposition) -> Result<bool> {
    let gens = rs.spec.effective_generators();
    let diff = &dec.d1 - &dec.d2;
    Ok(!in_positive_cone(&diff, &gens, &rs.h)? && !in_positive_cone(&-&diff, &gens, &rs.h)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceType {
    #[serde(rename = "type-I")]
    TypeI,
    #[serde(rename = "type-II")]
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIIClass {
    /// `e = h − d₁`.
    pub e: DivisorClass,
    pub e_square: Int,
    pub h_dot_e: Int,
    pub d1_dot_e: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: SurfaceType,
    /// Ordered so that `deg d₁ ≤ deg d₂`.
    pub decomposition: Decomposition,
    pub degrees: (Int, Int),
    pub type_ii: Option<TypeIIClass>,
}

pub fn classify_type(rs: &ReflexiveSurface, dec: &Decomposition) -> Result<Classification> {
    let h = &rs.h;
    let (mut d1, mut d2) = (dec.d1.clone(), dec.d2.clone());
    let (mut g1, mut g2) = (degree(&d1, h)?, degree(&d2, h)?);
    if g1 > g2 {
        std::mem::swap(&mut d1, &mut d2);
        std::mem::swap(&mut g1, &mut g2);
    }
    let kind = match (g1.to_i64(), g2.to_i64()) {
        (Some(1), Some(3)) => SurfaceType::TypeII,
        (Some(2), Some(2)) => SurfaceType::TypeI,
        _ => {
            return Err(violation(
                "deg(ℓ+2h)=4 with positive degrees",
                format!("degree pattern ({g1},{g2})"),
            ))
        }
    };
    let type_ii = if kind == SurfaceType::TypeII {
        let e = h - &d1;
        let c = TypeIIClass {
            e_square: e.square(),
            h_dot_e: intersect(h, &e)?,
            d1_dot_e: intersect(&d1, &e)?,
            e,
        };
        if c.e_square != int(-2) || c.h_dot_e != int(1) || c.d1_dot_e != int(3) {
            return Err(violation("e^2=-2, h·e=1, d_1·e=3", format!("{c:?}")));
        }
        Some(c)
    } else {
        None
    };
    Ok(Classification {
        kind,
        decomposition: Decomposition { d1, d2 },
        degrees: (g1, g2),
        type_ii,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVariant {
    Nondegenerate,
    TypeI,
    TypeII,
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nondegenerate" => Ok(KernelVariant::Nondegenerate),
            "typei" | "type-i" => Ok(KernelVariant::TypeI),
            "typeii" | "type-ii" => Ok(KernelVariant::TypeII),
            _ => Err(Error::InvalidArgument(format!(
                "unknown kernel variant `{s}` (expected nondegenerate, typeI, typeII)"
            ))),
        }
    }
}

/// The kernel `(A, B, C, D)` for each surface kind:
/// nondegenerate `(−h, 3ℓ+7h, ℓ+h, 2ℓ+5h)`,
/// type I `(d₁−h, h−d₁, d₂−h, h−d₂)`,
/// type II `(d₁−h, d₂−2d₁+h, d₂−h, h−d₁)`.
pub fn build_kernel(rs: &ReflexiveSurface, variant: KernelVariant) -> Result<KernelSpec> {
    let (h, l) = (&rs.h, &rs.l);
    if variant == KernelVariant::Nondegenerate {
        if rs.degenerate {
            return Err(Error::violation(
                "the nondegenerate kernel needs ℓ+2h without cohomology, but ℓ+2h is declared effective",
            ));
        }
        return KernelSpec::new(
            -h,
            &(3 * l) + &(7 * h),
            l + h,
            &(2 * l) + &(5 * h),
            vec![rs.l_plus_2h()],
        );
    }
    let (dec, _) = decompose_l2h(rs)?;
    let cls = classify_type(rs, &dec)?;
    let wanted = match variant {
        KernelVariant::TypeI => SurfaceType::TypeI,
        _ => SurfaceType::TypeII,
    };
    if cls.kind != wanted {
        return Err(Error::violation(format!(
            "{variant:?} kernel requested on a {:?} surface (degrees {}, {})",
            cls.kind, cls.degrees.0, cls.degrees.1
        )));
    }
    let Decomposition { d1, d2 } = &cls.decomposition;
    let (a, b, c, d) = match variant {
        KernelVariant::TypeI => (d1 - h, h - d1, d2 - h, h - d2),
        _ => (d1 - h, &(d2 - &(2 * d1)) + h, d2 - h, h - d1),
    };
    let diff = &a - &c;
    let vanishing = if difference_not_effective(rs, &cls.decomposition)? {
        vec![diff]
    } else {
        vec![]
    };
    KernelSpec::new(a, b, c, d, vanishing)
}
