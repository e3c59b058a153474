//! The cohomological action of a Fourier–Mukai transform.
//!
//! A [`CohTransform`] is an exact linear map on `(r, f, t)` triples, stored as
//! a rational matrix in the basis `{rank, NS basis, ch₂}`. Transforms built
//! from kernel data use the pushforward
//! `ch(ΦF) = χ(F⊗A)·ch(B) + χ(F⊗C)·ch(D) − ch(F⊗C⊗D)`
//! evaluated on basis triples.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::arith::{int, rat, to_rat, Int, Rat};
use crate::error::{Error, Result};
use crate::kernel::{check_sufficient, KernelSpec};
use crate::lattice::{same_lattice, DivisorClass, NsLattice};
use crate::matrix::RatMatrix;
use crate::mukai::ChernCharacter;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohTransform {
    source: Arc<NsLattice>,
    target: Arc<NsLattice>,
    matrix: RatMatrix,
    /// Parity of the number of `[1]` shifts applied after construction.
    shift_parity: u8,
    /// False when built from a kernel failing `AB = CD` or `(a−c)² = −4`.
    equivalence: bool,
}

/// `ch(Φ F)` for a single class, straight from the pushforward formula.
pub fn pushforward(k: &KernelSpec, f: &ChernCharacter) -> Result<ChernCharacter> {
    f.f.check_same(&k.a)?;
    let line = |x: &DivisorClass| ChernCharacter::new(int(1), x.clone(), to_rat(&x.square()) / rat(2));
    let chi_fa = f.twist(&k.a)?.euler_characteristic();
    let chi_fc = f.twist(&k.c)?.euler_characteristic();
    let fcd = f.twist(&(&k.c + &k.d))?;
    line(&k.b)
        .scale(&chi_fa)?
        .add(&line(&k.d).scale(&chi_fc)?)?
        .add(&fcd.neg())
}

fn check_dim(lattice: &NsLattice, m: &RatMatrix, rows: bool) -> Result<()> {
    let want = lattice.rank() + 2;
    let got = if rows { m.rows() } else { m.cols() };
    if want == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: want,
            got,
        })
    }
}

/// The Euler form `χ(a, b) = r t' + r' t + 2 r r' − f·f'` as a matrix in
/// triple coordinates.
pub fn euler_form(lattice: &NsLattice) -> RatMatrix {
    let n = lattice.rank() + 2;
    let mut q = RatMatrix::zeros(n, n);
    q[(0, 0)] = rat(2);
    q[(0, n - 1)] = rat(1);
    q[(n - 1, 0)] = rat(1);
    for i in 0..lattice.rank() {
        for j in 0..lattice.rank() {
            q[(i + 1, j + 1)] = -to_rat(lattice.entry(i, j));
        }
    }
    q
}

impl CohTransform {
    pub fn from_matrix(
        source: Arc<NsLattice>,
        target: Arc<NsLattice>,
        matrix: RatMatrix,
    ) -> Result<Self> {
        check_dim(&source, &matrix, false)?;
        check_dim(&target, &matrix, true)?;
        Ok(CohTransform {
            source,
            target,
            matrix,
            shift_parity: 0,
            equivalence: true,
        })
    }

    pub fn identity(lattice: &Arc<NsLattice>) -> Self {
        CohTransform {
            source: Arc::clone(lattice),
            target: Arc::clone(lattice),
            matrix: RatMatrix::identity(lattice.rank() + 2),
            shift_parity: 0,
            equivalence: true,
        }
    }

    /// The map induced by an identification of lattices `φ`, given as an
    /// integer matrix sending source coordinates to target coordinates.
    pub fn from_isometry(
        source: &Arc<NsLattice>,
        target: &Arc<NsLattice>,
        phi: &[Vec<Int>],
    ) -> Result<Self> {
        let (rs, rt) = (source.rank(), target.rank());
        if phi.len() != rt || phi.iter().any(|r| r.len() != rs) {
            return Err(Error::Dimension {
                expected: rt * rs,
                got: phi.iter().map(Vec::len).sum(),
            });
        }
        let mut m = RatMatrix::zeros(rt + 2, rs + 2);
        m[(0, 0)] = Rat::one();
        m[(rt + 1, rs + 1)] = Rat::one();
        for i in 0..rt {
            for j in 0..rs {
                m[(i + 1, j + 1)] = to_rat(&phi[i][j]);
            }
        }
        let t = Self::from_matrix(Arc::clone(source), Arc::clone(target), m)?;
        if !t.is_mukai_isometry() {
            return Err(Error::InvalidArgument(
                "identification does not preserve the intersection form".into(),
            ));
        }
        Ok(t)
    }

    /// Builds the transform of a kernel. The result is flagged as a
    /// non-equivalence when the kernel fails the lattice conditions.
    pub fn from_kernel(k: &KernelSpec) -> Result<Self> {
        let lattice = k.lattice();
        let rank = lattice.rank();
        let mut basis = Vec::with_capacity(rank + 2);
        basis.push(ChernCharacter::structure_sheaf(lattice));
        for i in 0..rank {
            basis.push(ChernCharacter::new(
                Int::zero(),
                DivisorClass::basis(lattice, i),
                Rat::zero(),
            ));
        }
        basis.push(ChernCharacter::point(lattice));
        let columns = basis
            .iter()
            .map(|e| pushforward(k, e).map(|c| c.to_vector()))
            .collect::<Result<Vec<_>>>()?;
        Ok(CohTransform {
            source: Arc::clone(lattice),
            target: Arc::clone(lattice),
            matrix: RatMatrix::from_columns(columns)?,
            shift_parity: 0,
            equivalence: check_sufficient(k).lattice_conditions(),
        })
    }

    pub fn source(&self) -> &Arc<NsLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<NsLattice> {
        &self.target
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn shift_parity(&self) -> u8 {
        self.shift_parity
    }

    pub fn is_equivalence_candidate(&self) -> bool {
        self.equivalence
    }

    /// Composition with `[1]`: negates every Chern character.
    pub fn shifted(&self) -> Self {
        CohTransform {
            matrix: self.matrix.scale(&rat(-1)),
            shift_parity: self.shift_parity ^ 1,
            ..self.clone()
        }
    }

    pub fn apply_vector(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        self.matrix.mul_vec(v)
    }

    pub fn apply(&self, c: &ChernCharacter) -> Result<ChernCharacter> {
        if !same_lattice(c.lattice(), &self.source) {
            return Err(Error::LatticeMismatch(
                "class does not live on the transform's source".into(),
            ));
        }
        let out = self.matrix.mul_vec(&c.to_vector())?;
        ChernCharacter::from_vector(&self.target, &out)
    }

    /// `S ∘ T`: first `T` (self), then `S`.
    pub fn then(&self, s: &CohTransform) -> Result<CohTransform> {
        compose(s, self)
    }

    pub fn det(&self) -> Result<Rat> {
        self.matrix.det()
    }

    pub fn inverse(&self) -> Result<Option<CohTransform>> {
        Ok(self.matrix.inverse()?.map(|m| CohTransform {
            source: Arc::clone(&self.target),
            target: Arc::clone(&self.source),
            matrix: m,
            shift_parity: self.shift_parity,
            equivalence: self.equivalence,
        }))
    }

    /// Whether `χ(Ta, Tb) = χ(a, b)` for all triples: `Mᵀ Q_target M = Q_source`.
    pub fn is_mukai_isometry(&self) -> bool {
        let lhs = self
            .matrix
            .transpose()
            .mul(&euler_form(&self.target))
            .and_then(|x| x.mul(&self.matrix));
        matches!(lhs, Ok(m) if m == euler_form(&self.source))
    }
}

/// `S ∘ T` (apply `T` first).
pub fn compose(s: &CohTransform, t: &CohTransform) -> Result<CohTransform> {
    if !same_lattice(&t.target, &s.source) {
        return Err(Error::LatticeMismatch(
            "composition: target of the first map is not the source of the second".into(),
        ));
    }
    Ok(CohTransform {
        source: Arc::clone(&t.source),
        target: Arc::clone(&s.target),
        matrix: s.matrix.mul(&t.matrix)?,
        shift_parity: s.shift_parity ^ t.shift_parity,
        equivalence: s.equivalence && t.equivalence,
    })
}
