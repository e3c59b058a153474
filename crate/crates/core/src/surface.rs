//! Surface specifications: a lattice, named classes and declared geometric
//! assumptions, loaded from JSON.
//!
//! ```json
//! {"rank":2,"gram":[[2,0],[0,-12]],
//!  "classes":{"h":[1,0],"l":[0,1]},
//!  "assumptions":[{"kind":"ample","class":"h"}]}
//! ```
//!
//! An optional `"curves"` list names the irreducible rational components of
//! an effective class, with repetition for multiplicity.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{int, serde_int_map, serde_int_matrix, Int};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, NsLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionKind {
    Ample,
    Effective,
    IrreducibleRational,
    NoCohomology,
}

impl fmt::Display for AssumptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AssumptionKind::Ample => "ample",
            AssumptionKind::Effective => "effective",
            AssumptionKind::IrreducibleRational => "irreducible_rational",
            AssumptionKind::NoCohomology => "no_cohomology",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assumption {
    pub kind: AssumptionKind,
    pub class: String,
}

/// On-disk layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub rank: usize,
    #[serde(with = "serde_int_matrix")]
    pub gram: Vec<Vec<Int>>,
    #[serde(with = "serde_int_map")]
    pub classes: BTreeMap<String, Vec<Int>>,
    #[serde(default)]
    pub assumptions: Vec<Assumption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct SurfaceSpec {
    lattice: Arc<NsLattice>,
    classes: BTreeMap<String, DivisorClass>,
    assumptions: Vec<Assumption>,
    curves: Option<Vec<String>>,
}

impl SurfaceSpec {
    pub fn builder(lattice: Arc<NsLattice>) -> SurfaceBuilder {
        SurfaceBuilder {
            lattice,
            classes: BTreeMap::new(),
            assumptions: Vec::new(),
            curves: None,
        }
    }

    pub fn lattice(&self) -> &Arc<NsLattice> {
        &self.lattice
    }

    pub fn classes(&self) -> &BTreeMap<String, DivisorClass> {
        &self.classes
    }

    pub fn assumptions(&self) -> &[Assumption] {
        &self.assumptions
    }

    pub fn curve_names(&self) -> Option<&[String]> {
        self.curves.as_deref()
    }

    pub fn class(&self, name: &str) -> Result<&DivisorClass> {
        self.classes
            .get(name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    /// Classes declared with `kind`, in declaration order.
    pub fn declared(&self, kind: AssumptionKind) -> Vec<&DivisorClass> {
        self.assumptions
            .iter()
            .filter(|a| a.kind == kind)
            .map(|a| &self.classes[&a.class])
            .collect()
    }

    /// Whether `x` (by value, not by name) carries the declaration `kind`.
    pub fn is_declared(&self, kind: AssumptionKind, x: &DivisorClass) -> bool {
        self.declared(kind).into_iter().any(|c| c == x)
    }

    /// Declared curve classes with multiplicity.
    pub fn curves(&self) -> Option<Vec<DivisorClass>> {
        self.curves
            .as_ref()
            .map(|names| names.iter().map(|n| self.classes[n].clone()).collect())
    }

    /// Generators of the declared effective cone: effective and
    /// irreducible-rational classes.
    pub fn effective_generators(&self) -> Vec<DivisorClass> {
        let mut gens: Vec<DivisorClass> = Vec::new();
        for a in &self.assumptions {
            if matches!(
                a.kind,
                AssumptionKind::Effective | AssumptionKind::IrreducibleRational
            ) {
                let c = &self.classes[&a.class];
                if !gens.contains(c) {
                    gens.push(c.clone());
                }
            }
        }
        gens
    }

    /// Evaluates a class expression such as `l+2h`, `3l+7h`, `d1-h`, `2*h`,
    /// `0`, or a literal coordinate vector `[1,0]`.
    pub fn parse_class(&self, expr: &str) -> Result<DivisorClass> {
        parse_class_expr(expr, &self.lattice, |name| self.class(name).cloned())
    }

    pub fn to_file(&self) -> SurfaceFile {
        SurfaceFile {
            rank: self.lattice.rank(),
            gram: self.lattice.gram().to_vec(),
            classes: self
                .classes
                .iter()
                .map(|(k, v)| (k.clone(), v.coords().to_vec()))
                .collect(),
            assumptions: self.assumptions.clone(),
            curves: self.curves.clone(),
        }
    }

    pub fn from_file(file: SurfaceFile) -> Result<Self> {
        validate_file(&file, None)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SurfaceFile = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        validate_file(&file, Some(text))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            Error::InvalidLattice(m) => Error::InvalidLattice(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

pub struct SurfaceBuilder {
    lattice: Arc<NsLattice>,
    classes: BTreeMap<String, DivisorClass>,
    assumptions: Vec<Assumption>,
    curves: Option<Vec<String>>,
}

impl SurfaceBuilder {
    pub fn class(mut self, name: &str, coords: &[i64]) -> Self {
        let c = DivisorClass::from_i64(&self.lattice, coords).expect("class length");
        self.classes.insert(name.to_string(), c);
        self
    }

    pub fn assume(mut self, kind: AssumptionKind, name: &str) -> Self {
        self.assumptions.push(Assumption {
            kind,
            class: name.to_string(),
        });
        self
    }

    pub fn curves(mut self, names: &[&str]) -> Self {
        self.curves = Some(names.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn build(self) -> Result<SurfaceSpec> {
        let spec = SurfaceSpec {
            lattice: self.lattice,
            classes: self.classes,
            assumptions: self.assumptions,
            curves: self.curves,
        };
        validate_file(&spec.to_file(), None)
    }
}

/// 1-based line of the first occurrence of `needle` in `text`.
fn line_of(text: Option<&str>, needle: &str) -> String {
    text.and_then(|t| {
        t.lines()
            .position(|l| l.contains(needle))
            .map(|i| format!("line {}: ", i + 1))
    })
    .unwrap_or_default()
}

fn validate_file(file: &SurfaceFile, text: Option<&str>) -> Result<SurfaceSpec> {
    if file.gram.len() != file.rank {
        return Err(Error::InvalidLattice(format!(
            "{}rank is {} but gram has {} rows",
            line_of(text, "\"gram\""),
            file.rank,
            file.gram.len()
        )));
    }
    let lattice = NsLattice::new(file.gram.clone())
        .map_err(|e| match e {
            Error::InvalidLattice(m) => Error::InvalidLattice(format!("{}{m}", line_of(text, "\"gram\""))),
            other => other,
        })?;
    let mut classes = BTreeMap::new();
    for (name, coords) in &file.classes {
        check_name(name)?;
        let c = DivisorClass::new(&lattice, coords.clone()).map_err(|_| {
            Error::InvalidLattice(format!(
                "{}class `{name}` has {} coordinates, lattice rank is {}",
                line_of(text, &format!("\"{name}\"")),
                coords.len(),
                file.rank
            ))
        })?;
        classes.insert(name.clone(), c);
    }
    for a in &file.assumptions {
        if !classes.contains_key(&a.class) {
            return Err(Error::UnknownTarget(format!(
                "{}{} (target of a `{}` assumption)",
                line_of(text, &format!("\"{}\"", a.class)),
                a.class,
                a.kind
            )));
        }
    }
    if let Some(curves) = &file.curves {
        for name in curves {
            if !classes.contains_key(name) {
                return Err(Error::UnknownTarget(format!(
                    "{}{name} (listed in curves)",
                    line_of(text, "\"curves\"")
                )));
            }
            let declared = file
                .assumptions
                .iter()
                .any(|a| a.kind == AssumptionKind::IrreducibleRational && &a.class == name);
            if !declared {
                return Err(Error::InvalidArgument(format!(
                    "{}curve `{name}` is not declared irreducible_rational",
                    line_of(text, "\"curves\"")
                )));
            }
        }
    }
    Ok(SurfaceSpec {
        lattice,
        classes,
        assumptions: file.assumptions.clone(),
        curves: file.curves.clone(),
    })
}

fn check_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "class name `{name}` must be an identifier (letter or _, then letters, digits, _)"
        )))
    }
}

/// Parses an integer linear combination of named classes. Whitespace is ignored.
pub fn parse_class_expr(
    expr: &str,
    lattice: &Arc<NsLattice>,
    lookup: impl Fn(&str) -> Result<DivisorClass>,
) -> Result<DivisorClass> {
    let src: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse("empty class expression".into()));
    }
    if let Some(inner) = src.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let coords = inner
            .split(',')
            .map(|p| {
                p.parse::<Int>()
                    .map_err(|_| Error::Parse(format!("bad coordinate `{p}` in `{expr}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        return DivisorClass::new(lattice, coords);
    }
    let bytes = src.as_bytes();
    let mut pos = 0;
    let mut acc = DivisorClass::zero(lattice);
    let mut first = true;
    while pos < bytes.len() {
        let mut sign = int(1);
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = int(-1);
                pos += 1;
            }
            _ if !first => {
                return Err(Error::Parse(format!(
                    "expected `+` or `-` at offset {pos} in `{expr}`"
                )))
            }
            _ => {}
        }
        first = false;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let coeff: Option<Int> = if pos > start {
            Some(src[start..pos].parse().expect("digits"))
        } else {
            None
        };
        if pos < bytes.len() && bytes[pos] == b'*' {
            if coeff.is_none() {
                return Err(Error::Parse(format!("`*` without coefficient in `{expr}`")));
            }
            pos += 1;
        }
        let name_start = pos;
        if pos < bytes.len() && (bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_') {
            pos += 1;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
            {
                pos += 1;
            }
        }
        let term = if pos > name_start {
            let class = lookup(&src[name_start..pos])?;
            let k = coeff.unwrap_or_else(|| int(1));
            &(&sign * &k) * &class
        } else {
            match coeff {
                Some(k) if k.is_zero() => DivisorClass::zero(lattice),
                _ => {
                    return Err(Error::Parse(format!(
                        "expected a class name at offset {name_start} in `{expr}`"
                    )))
                }
            }
        };
        acc = &acc + &term;
    }
    Ok(acc)
}
