//! Chern characters and Mukai vectors on a K3 surface.
//!
//! Conventions: `v(E) = (r, c₁, ch₂ + r)` and
//! `⟨v, w⟩ = c₁(v)·c₁(w) − r_v s_w − r_w s_v`, with `χ(E, F) = −⟨v(E), v(F)⟩`.
//! These are pinned by `χ(O, O) = 2` and by `ch = (2, ℓ, −5)` having Mukai
//! vector `(2, ℓ, −3)`.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{as_int, int, rat, require_int, serde_int, serde_int_vec, serde_rat, to_rat, Int, Rat};
use crate::error::{Error, Result};
use crate::lattice::{intersect, DivisorClass, NsLattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernCharacter {
    pub r: Int,
    pub f: DivisorClass,
    pub t: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: Int,
    pub f: DivisorClass,
    pub s: Rat,
}

impl ChernCharacter {
    pub fn new(r: Int, f: DivisorClass, t: Rat) -> Self {
        ChernCharacter { r, f, t }
    }

    pub fn from_i64(lattice: &Arc<NsLattice>, r: i64, f: &[i64], t: i64) -> Result<Self> {
        Ok(ChernCharacter {
            r: int(r),
            f: DivisorClass::from_i64(lattice, f)?,
            t: rat(t),
        })
    }

    pub fn zero(lattice: &Arc<NsLattice>) -> Self {
        ChernCharacter {
            r: Int::zero(),
            f: DivisorClass::zero(lattice),
            t: Rat::zero(),
        }
    }

    pub fn structure_sheaf(lattice: &Arc<NsLattice>) -> Self {
        ChernCharacter {
            r: int(1),
            f: DivisorClass::zero(lattice),
            t: Rat::zero(),
        }
    }

    pub fn point(lattice: &Arc<NsLattice>) -> Self {
        ChernCharacter {
            r: Int::zero(),
            f: DivisorClass::zero(lattice),
            t: rat(1),
        }
    }

    pub fn lattice(&self) -> &Arc<NsLattice> {
        self.f.lattice()
    }

    /// Flattened `(r, f₁, …, f_ρ, t)` coordinates.
    pub fn to_vector(&self) -> Vec<Rat> {
        let mut v = Vec::with_capacity(self.f.coords().len() + 2);
        v.push(to_rat(&self.r));
        v.extend(self.f.coords().iter().map(to_rat));
        v.push(self.t.clone());
        v
    }

    /// Inverse of [`to_vector`](Self::to_vector); rank and c₁ must be integral.
    pub fn from_vector(lattice: &Arc<NsLattice>, v: &[Rat]) -> Result<Self> {
        let rank = lattice.rank();
        if v.len() != rank + 2 {
            return Err(Error::Dimension {
                expected: rank + 2,
                got: v.len(),
            });
        }
        let r = require_int(&v[0], "rank")?;
        let coords = v[1..=rank]
            .iter()
            .enumerate()
            .map(|(i, x)| require_int(x, &format!("c1 coordinate {i}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChernCharacter {
            r,
            f: DivisorClass::new(lattice, coords)?,
            t: v[rank + 1].clone(),
        })
    }

    pub fn is_integral(&self) -> bool {
        self.t.is_integer()
    }

    pub fn add(&self, other: &ChernCharacter) -> Result<ChernCharacter> {
        self.f.check_same(&other.f)?;
        Ok(ChernCharacter {
            r: &self.r + &other.r,
            f: &self.f + &other.f,
            t: &self.t + &other.t,
        })
    }

    pub fn scale(&self, k: &Rat) -> Result<ChernCharacter> {
        let r = require_int(&(to_rat(&self.r) * k), "scaled rank")?;
        let f = self
            .f
            .coords()
            .iter()
            .map(|c| require_int(&(to_rat(c) * k), "scaled c1"))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChernCharacter {
            r,
            f: DivisorClass::new(self.lattice(), f)?,
            t: &self.t * k,
        })
    }

    pub fn neg(&self) -> ChernCharacter {
        ChernCharacter {
            r: -&self.r,
            f: -&self.f,
            t: -&self.t,
        }
    }

    /// `ch(F ⊗ L)` for the line bundle with first Chern class `l`.
    pub fn twist(&self, l: &DivisorClass) -> Result<ChernCharacter> {
        let fl = intersect(&self.f, l)?;
        let l2 = l.square();
        Ok(ChernCharacter {
            r: self.r.clone(),
            f: &self.f + &(&self.r * l),
            t: &self.t + to_rat(&fl) + to_rat(&(&self.r * l2)) / rat(2),
        })
    }

    /// Euler characteristic `χ(F) = ch₂ + 2·rk` (Hirzebruch–Riemann–Roch, td = (1, 0, 2)).
    pub fn euler_characteristic(&self) -> Rat {
        &self.t + to_rat(&(&self.r * int(2)))
    }
}

impl MukaiVector {
    pub fn to_vector(&self) -> Vec<Rat> {
        let mut v = vec![to_rat(&self.r)];
        v.extend(self.f.coords().iter().map(to_rat));
        v.push(self.s.clone());
        v
    }

    pub fn neg(&self) -> MukaiVector {
        MukaiVector {
            r: -&self.r,
            f: -&self.f,
            s: -&self.s,
        }
    }

    /// Representative with positive leading entry (rank, then c₁, then s).
    pub fn normalized_sign(&self) -> MukaiVector {
        if crate::arith::leading_sign(&self.to_vector()) < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn equal_up_to_sign(&self, other: &MukaiVector) -> bool {
        self == other || self == &other.neg()
    }
}

pub fn ch_to_mukai(c: &ChernCharacter) -> MukaiVector {
    MukaiVector {
        r: c.r.clone(),
        f: c.f.clone(),
        s: &c.t + to_rat(&c.r),
    }
}

pub fn mukai_to_ch(v: &MukaiVector) -> ChernCharacter {
    ChernCharacter {
        r: v.r.clone(),
        f: v.f.clone(),
        t: &v.s - to_rat(&v.r),
    }
}

pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector) -> Result<Rat> {
    let ff = intersect(&v.f, &w.f)?;
    Ok(to_rat(&ff) - to_rat(&v.r) * &w.s - to_rat(&w.r) * &v.s)
}

/// `χ(a, b) = −⟨v(a), v(b)⟩`.
pub fn euler_chi(a: &ChernCharacter, b: &ChernCharacter) -> Result<Rat> {
    Ok(-mukai_pairing(&ch_to_mukai(a), &ch_to_mukai(b))?)
}

/// Constructors for the sheaf classes that appear in the transforms.
#[derive(Clone, Debug)]
pub enum SheafKind {
    /// A line bundle with first Chern class `l`.
    LineBundle { l: DivisorClass },
    /// `L ⊗ I_Z` with `|Z| = n`.
    TwistedIdeal { l: DivisorClass, n: i64 },
    /// The skyscraper sheaf of a point.
    Point,
    /// `I_W` with `|W| = n`.
    Ideal { n: i64 },
    /// A rank-2 extension `0 → M → E → L ⊗ I_Z → 0` with `|Z| = n`.
    Extension {
        m: DivisorClass,
        l: DivisorClass,
        n: i64,
    },
}

pub fn standard_ch(lattice: &Arc<NsLattice>, kind: &SheafKind) -> Result<ChernCharacter> {
    let check_len = |n: i64| {
        if n < 0 {
            Err(Error::InvalidArgument(format!("negative length {n}")))
        } else {
            Ok(())
        }
    };
    let half_square = |l: &DivisorClass| to_rat(&l.square()) / rat(2);
    let ch = match kind {
        SheafKind::LineBundle { l } => ChernCharacter::new(int(1), l.clone(), half_square(l)),
        SheafKind::TwistedIdeal { l, n } => {
            check_len(*n)?;
            ChernCharacter::new(int(1), l.clone(), half_square(l) - rat(*n))
        }
        SheafKind::Point => ChernCharacter::point(lattice),
        SheafKind::Ideal { n } => {
            check_len(*n)?;
            ChernCharacter::new(int(1), DivisorClass::zero(lattice), rat(-n))
        }
        SheafKind::Extension { m, l, n } => {
            check_len(*n)?;
            m.check_same(l)?;
            ChernCharacter::new(int(2), m + l, half_square(m) + half_square(l) - rat(*n))
        }
    };
    ch.f.check_same(&DivisorClass::zero(lattice))?;
    if as_int(&ch.t).is_none() {
        return Err(Error::NonIntegral(format!("ch2 of a sheaf class: {:?}", ch.t)));
    }
    Ok(ch)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ChernJson {
    #[serde(with = "serde_int")]
    pub r: Int,
    #[serde(with = "serde_int_vec")]
    pub f: Vec<Int>,
    #[serde(with = "serde_rat")]
    pub t: Rat,
}

impl From<&ChernCharacter> for ChernJson {
    fn from(c: &ChernCharacter) -> Self {
        ChernJson {
            r: c.r.clone(),
            f: c.f.coords().to_vec(),
            t: c.t.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MukaiJson {
    #[serde(with = "serde_int")]
    pub r: Int,
    #[serde(with = "serde_int_vec")]
    pub f: Vec<Int>,
    #[serde(with = "serde_rat")]
    pub s: Rat,
}

impl From<&MukaiVector> for MukaiJson {
    fn from(v: &MukaiVector) -> Self {
        MukaiJson {
            r: v.r.clone(),
            f: v.f.coords().to_vec(),
            s: v.s.clone(),
        }
    }
}
