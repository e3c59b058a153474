//! Command-line front end for the `k3fm` binary.
//!
//! Every command prints one report. Exit status is 0 on success, 1 when the
//! input is well formed but mathematically rejected, and 2 on input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{parse_rat, serde_int, serde_int_matrix, serde_int_vec, Int, Rat};
use crate::displayed::{crosscheck_specialized, DiffReport, DisplayedFormula, FormulaId};
use crate::error::{Error, Result};
use crate::kernel::{
    check_necessary_det, check_phio_identity, check_sufficient, normalize_twist, KernelSpec,
    ValidityReport, Verdict,
};
use crate::lattice::{chi_line, intersect, DivisorClass};
use crate::moduli::{check_ample_primitive, es_relation, hilb_moduli_vector, strata_chain, HilbFlavor};
use crate::mukai::{ch_to_mukai, ChernCharacter, ChernJson, MukaiJson};
use crate::pic1::{self, Pic1Solution};
use crate::reflexive::{
    build_kernel, classify_type, decompose_brute_force, decompose_l2h, difference_not_effective,
    hat_classes, validate_reflexive, SplitCase, DecompositionJson, KernelVariant, SurfaceType,
};
use crate::surface::{AssumptionKind, SurfaceFile, SurfaceSpec};
use crate::transform::CohTransform;

pub const REFLEXIVE_SPEC: &str = include_str!("../data/reflexive.json");
pub const NO_COHOMOLOGY_SPEC: &str = include_str!("../data/no_cohomology.json");
pub const TYPE_I_SPEC: &str = include_str!("../data/type_i.json");
pub const TYPE_II_SPEC: &str = include_str!("../data/type_ii.json");

#[derive(Parser, Debug)]
#[command(name = "k3fm", version, about = "Rank-2 Fourier–Mukai transforms on K3 lattices, in exact arithmetic")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "K3FM_FORMAT", default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SurfaceArgs {
    /// Surface specification (JSON). Each command has a built-in default.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct KernelArgs {
    /// Named kernel: thm2.5 (no-cohomology), thm5.1 (nondegenerate),
    /// thm6.2-i (type-i), thm6.2-ii (type-ii).
    #[arg(long)]
    pub builder: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Name of the polarization class.
    #[arg(long = "h-name", default_value = "h")]
    pub h_name: String,
    /// Name of the class `ℓ`.
    #[arg(long = "l-name", default_value = "l")]
    pub l_name: String,
}

#[derive(Args, Debug, Clone)]
pub struct ReflexiveArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long = "h-name", default_value = "h")]
    pub h_name: String,
    #[arg(long = "l-name", default_value = "l")]
    pub l_name: String,
}

#[derive(Subcommand, Debug)]
pub enum ReflexiveAction {
    Validate(ReflexiveArgs),
    Hats(ReflexiveArgs),
    Decompose(ReflexiveArgs),
    Classify(ReflexiveArgs),
    Kernel {
        #[command(flatten)]
        args: ReflexiveArgs,
        /// nondegenerate, typeI or typeII.
        #[arg(long)]
        variant: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load and validate a surface specification.
    SurfaceValidate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Euler characteristic of a line bundle, `2 + x²/2`.
    Chi {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Numeric equivalence conditions for a kernel `(A, B, C, D)`.
    KernelCheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Apply a kernel's transform to a Chern character `r,f₁,…,f_ρ,t`.
    TransformApply {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, allow_hyphen_values = true)]
        ch: String,
    },
    /// Compare the transform with a closed-form formula over a grid.
    TransformCrosscheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        /// prop1.1, thm2.5, thm5.1, thm6.2-i, thm6.2-ii or prop3.9.
        #[arg(long)]
        formula: Option<String>,
        /// `ℓ²` for the Picard-rank-one formula.
        #[arg(long, allow_hyphen_values = true)]
        lsq: Option<i64>,
        /// Maximum number of differing points listed.
        #[arg(long)]
        max_entries: Option<usize>,
    },
    /// Picard rank one: existence, constraint solutions and selected matrix.
    Pic1 {
        #[arg(long, allow_hyphen_values = true)]
        lsq: i64,
        /// Cross-check against the exhaustive search.
        #[arg(long)]
        oracle: bool,
        /// Search box for the oracle (default 4n+20).
        #[arg(long, requires = "oracle")]
        bound: Option<i64>,
    },
    ReflexiveValidate(ReflexiveArgs),
    ReflexiveHats(ReflexiveArgs),
    ReflexiveDecompose(ReflexiveArgs),
    ReflexiveClassify(ReflexiveArgs),
    ReflexiveKernel {
        #[command(flatten)]
        args: ReflexiveArgs,
        #[arg(long)]
        variant: String,
    },
    /// Reflexive-surface commands in subcommand form.
    Reflexive {
        #[command(subcommand)]
        action: ReflexiveAction,
    },
    /// Mukai vector of the transform of `I_W`, `|W| = n`.
    HilbModuli {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        n: i64,
        /// no-cohomology or reflexive.
        #[arg(long)]
        flavor: String,
    },
    /// Slope chain and stratum bound for a sub-line-bundle `M` of `L`.
    Strata {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, allow_hyphen_values = true, default_value = "h")]
        h: String,
        /// Stratum length; defaults to `(ℓ²+8)/4`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<i64>,
        /// Stratification bound `a`, rational.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Whether `ℓ = n·h` is excluded by the stratum bound.
    PrimitiveCheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true, default_value = "h")]
        h: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Rejected,
}

/// Envelope of every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Rejected => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelJson {
    #[serde(with = "serde_int_vec")]
    pub a: Vec<Int>,
    #[serde(with = "serde_int_vec")]
    pub b: Vec<Int>,
    #[serde(with = "serde_int_vec")]
    pub c: Vec<Int>,
    #[serde(with = "serde_int_vec")]
    pub d: Vec<Int>,
    #[serde(with = "serde_int_matrix")]
    pub declared_vanishing: Vec<Vec<Int>>,
}

impl From<&KernelSpec> for KernelJson {
    fn from(k: &KernelSpec) -> Self {
        KernelJson {
            a: k.a.coords().to_vec(),
            b: k.b.coords().to_vec(),
            c: k.c.coords().to_vec(),
            d: k.d.coords().to_vec(),
            declared_vanishing: k.declared_vanishing.iter().map(|x| x.coords().to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiResult {
    pub expression: String,
    #[serde(with = "serde_int_vec")]
    pub class: Vec<Int>,
    #[serde(with = "serde_int")]
    pub square: Int,
    #[serde(with = "serde_int")]
    pub chi: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCheckResult {
    pub kernel: KernelJson,
    pub normalized: KernelJson,
    pub validity: ValidityReport,
    pub det_normalization: bool,
    pub phio_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformApplyResult {
    pub kernel: KernelJson,
    pub input: ChernJson,
    pub output: ChernJson,
    pub input_mukai: MukaiJson,
    pub output_mukai: MukaiJson,
    pub equivalence_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub bound: i64,
    pub found: Vec<Pic1Solution>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pic1Result {
    pub lsq: i64,
    pub exists: bool,
    pub n: Option<i64>,
    pub solutions: Vec<Pic1Solution>,
    pub selected: Option<Pic1Solution>,
    pub matrix: Option<[[i64; 3]; 3]>,
    pub det: Option<i64>,
    pub isometry: Option<bool>,
    #[serde(with = "crate::moduli::serde_opt_rat", default)]
    pub excluded_slope_ratio: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatsResult {
    #[serde(with = "serde_int_vec")]
    pub h_hat: Vec<Int>,
    #[serde(with = "serde_int_vec")]
    pub l_hat: Vec<Int>,
    #[serde(with = "serde_int")]
    pub h_hat_square: Int,
    #[serde(with = "serde_int")]
    pub l_hat_square: Int,
    #[serde(with = "serde_int")]
    pub h_hat_dot_l_hat: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeResult {
    pub case: SplitCase,
    pub decomposition: DecompositionJson,
    pub alternatives: Vec<DecompositionJson>,
    pub found_by_exhaustive_search: bool,
    pub difference_not_effective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeIIJson {
    #[serde(with = "serde_int_vec")]
    pub e: Vec<Int>,
    #[serde(with = "serde_int")]
    pub e_square: Int,
    #[serde(with = "serde_int")]
    pub h_dot_e: Int,
    #[serde(with = "serde_int")]
    pub d1_dot_e: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub kind: SurfaceType,
    pub decomposition: DecompositionJson,
    #[serde(with = "serde_int_vec")]
    pub degrees: Vec<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_ii: Option<TypeIIJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexiveKernelResult {
    pub variant: KernelVariant,
    pub kernel: KernelJson,
    pub validity: ValidityReport,
}

/// A named kernel with the closed forms and vector family that go with it.
pub struct Built {
    pub spec: SurfaceSpec,
    pub kernel: KernelSpec,
    pub formula: DisplayedFormula,
    pub flavor: Option<HilbFlavor>,
}

fn load_or(surface: &SurfaceArgs, default: &str) -> Result<SurfaceSpec> {
    match &surface.spec {
        Some(p) => SurfaceSpec::load(p),
        None => SurfaceSpec::from_json(default),
    }
}

/// Builds the named kernel on `spec` (or on the builder's built-in surface).
pub fn build_named(builder: &str, spec: Option<SurfaceSpec>, h_name: &str, l_name: &str) -> Result<Built> {
    match builder {
        "thm2.5" | "no-cohomology" => {
            let spec = match spec {
                Some(s) => s,
                None => SurfaceSpec::from_json(NO_COHOMOLOGY_SPEC)?,
            };
            let l = spec.class(l_name)?.clone();
            let z = DivisorClass::zero(spec.lattice());
            let vanishing = spec
                .declared(AssumptionKind::NoCohomology)
                .into_iter()
                .cloned()
                .collect();
            let kernel = KernelSpec::new(z.clone(), z, l.clone(), -&l, vanishing)?;
            Ok(Built {
                formula: DisplayedFormula::NoCohomology { l: l.clone() },
                flavor: Some(HilbFlavor::NoCohomology { m: l }),
                spec,
                kernel,
            })
        }
        "thm5.1" | "nondegenerate" | "thm6.2-i" | "type-i" | "thm6.2-ii" | "type-ii" => {
            let (variant, default) = match builder {
                "thm5.1" | "nondegenerate" => (KernelVariant::Nondegenerate, REFLEXIVE_SPEC),
                "thm6.2-i" | "type-i" => (KernelVariant::TypeI, TYPE_I_SPEC),
                _ => (KernelVariant::TypeII, TYPE_II_SPEC),
            };
            let spec = match spec {
                Some(s) => s,
                None => SurfaceSpec::from_json(default)?,
            };
            let rs = validate_reflexive(&spec, h_name, l_name)?;
            let kernel = build_kernel(&rs, variant)?;
            let (h, l) = (rs.h.clone(), rs.l.clone());
            let formula = match variant {
                KernelVariant::Nondegenerate => DisplayedFormula::ReflexiveNondegenerate { h, l },
                _ => {
                    let (dec, _) = decompose_l2h(&rs)?;
                    let cls = classify_type(&rs, &dec)?;
                    let (d1, d2) = (cls.decomposition.d1, cls.decomposition.d2);
                    if variant == KernelVariant::TypeI {
                        DisplayedFormula::ReflexiveTypeI { h, l, d1, d2 }
                    } else {
                        DisplayedFormula::ReflexiveTypeII { h, l, d1, d2 }
                    }
                }
            };
            let flavor = (variant != KernelVariant::TypeII).then(|| HilbFlavor::Reflexive {
                l_hat: &kernel.b + &kernel.d,
            });
            Ok(Built {
                spec,
                kernel,
                formula,
                flavor,
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown builder `{other}` (expected thm2.5, thm5.1, thm6.2-i, thm6.2-ii)"
        ))),
    }
}

fn resolve_kernel(surface: &SurfaceArgs, args: &KernelArgs) -> Result<Built> {
    let spec = surface.spec.as_ref().map(|p| SurfaceSpec::load(p)).transpose()?;
    if let Some(b) = &args.builder {
        if args.a.is_some() || args.b.is_some() || args.c.is_some() || args.d.is_some() {
            return Err(Error::InvalidArgument(
                "--builder and explicit --a/--b/--c/--d are mutually exclusive".into(),
            ));
        }
        return build_named(b, spec, &args.h_name, &args.l_name);
    }
    let spec = match spec {
        Some(s) => s,
        None => SurfaceSpec::from_json(REFLEXIVE_SPEC)?,
    };
    let get = |v: &Option<String>, n: &str| -> Result<DivisorClass> {
        let expr = v
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument(format!("missing --{n} (or use --builder)")))?;
        spec.parse_class(expr)
    };
    let (a, b, c, d) = (get(&args.a, "a")?, get(&args.b, "b")?, get(&args.c, "c")?, get(&args.d, "d")?);
    let vanishing = spec
        .declared(AssumptionKind::NoCohomology)
        .into_iter()
        .cloned()
        .collect();
    let kernel = KernelSpec::new(a.clone(), b.clone(), c.clone(), d.clone(), vanishing)?;
    Ok(Built {
        spec,
        kernel,
        formula: DisplayedFormula::GeneralKernel { a, b, c, d },
        flavor: None,
    })
}

fn parse_ch(text: &str, spec: &SurfaceSpec) -> Result<ChernCharacter> {
    let parts: Vec<Rat> = text
        .split(',')
        .map(|s| parse_rat(s.trim()))
        .collect::<Result<_>>()?;
    let expected = spec.lattice().rank() + 2;
    if parts.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "--ch needs {expected} comma-separated entries (r, {} coordinates of f, t), got {}",
            expected - 2,
            parts.len()
        )));
    }
    ChernCharacter::from_vector(spec.lattice(), &parts)
}

/// Result of one command before rendering.
struct Outcome {
    result: Value,
    rejection: Option<String>,
}

fn ok<T: Serialize>(v: &T) -> Result<Outcome> {
    Ok(Outcome {
        result: serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?,
        rejection: None,
    })
}

fn rejected_if<T: Serialize>(v: &T, reason: Option<String>) -> Result<Outcome> {
    let mut o = ok(v)?;
    o.rejection = reason;
    Ok(o)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::SurfaceValidate { .. } => "surface-validate".into(),
        Command::Chi { .. } => "chi".into(),
        Command::KernelCheck { .. } => "kernel-check".into(),
        Command::TransformApply { .. } => "transform-apply".into(),
        Command::TransformCrosscheck { .. } => "transform-crosscheck".into(),
        Command::Pic1 { .. } => "pic1".into(),
        Command::ReflexiveValidate(_) | Command::Reflexive { action: ReflexiveAction::Validate(_) } => {
            "reflexive-validate".into()
        }
        Command::ReflexiveHats(_) | Command::Reflexive { action: ReflexiveAction::Hats(_) } => {
            "reflexive-hats".into()
        }
        Command::ReflexiveDecompose(_) | Command::Reflexive { action: ReflexiveAction::Decompose(_) } => {
            "reflexive-decompose".into()
        }
        Command::ReflexiveClassify(_) | Command::Reflexive { action: ReflexiveAction::Classify(_) } => {
            "reflexive-classify".into()
        }
        Command::ReflexiveKernel { .. } | Command::Reflexive { action: ReflexiveAction::Kernel { .. } } => {
            "reflexive-kernel".into()
        }
        Command::HilbModuli { .. } => "hilb-moduli".into(),
        Command::Strata { .. } => "strata".into(),
        Command::PrimitiveCheck { .. } => "primitive-check".into(),
    }
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::SurfaceValidate { spec } => {
            let s = SurfaceSpec::load(spec)?;
            let file: SurfaceFile = s.to_file();
            ok(&file)
        }
        Command::Chi { surface, class } => {
            let spec = load_or(surface, REFLEXIVE_SPEC)?;
            let x = spec.parse_class(class)?;
            ok(&ChiResult {
                expression: class.clone(),
                class: x.coords().to_vec(),
                square: x.square(),
                chi: chi_line(&x),
            })
        }
        Command::KernelCheck { surface, kernel } => {
            let built = resolve_kernel(surface, kernel)?;
            let k = &built.kernel;
            let validity = check_sufficient(k);
            let reason = (validity.verdict == Verdict::Fails).then(|| {
                "kernel fails AB = CD or (a−c)² = −4".to_string()
            });
            rejected_if(
                &KernelCheckResult {
                    kernel: k.into(),
                    normalized: (&normalize_twist(k)).into(),
                    validity,
                    det_normalization: check_necessary_det(k),
                    phio_identity: check_phio_identity(k),
                },
                reason,
            )
        }
        Command::TransformApply { surface, kernel, ch } => {
            let built = resolve_kernel(surface, kernel)?;
            let t = CohTransform::from_kernel(&built.kernel)?;
            let input = parse_ch(ch, &built.spec)?;
            let output = t.apply(&input)?;
            ok(&TransformApplyResult {
                kernel: (&built.kernel).into(),
                input: (&input).into(),
                output: (&output).into(),
                input_mukai: (&ch_to_mukai(&input)).into(),
                output_mukai: (&ch_to_mukai(&output)).into(),
                equivalence_candidate: t.is_equivalence_candidate(),
            })
        }
        Command::TransformCrosscheck {
            surface,
            kernel,
            formula,
            lsq,
            max_entries,
        } => {
            let id: Option<FormulaId> = formula.as_deref().map(str::parse).transpose()?;
            let (t, f) = if id == Some(FormulaId::PicardRankOne) {
                let lsq = lsq.ok_or_else(|| {
                    Error::InvalidArgument("prop3.9 needs --lsq".into())
                })?;
                let n = pic1::existence_test(lsq)?.ok_or_else(|| {
                    Error::violation(format!("ℓ² = {lsq} is not ≡ 4 (mod 8): no transform"))
                })?;
                let sel = pic1::select_physical(&pic1::solve_constraints(n)?)?;
                let t = sel.selected.to_transform()?;
                let l = DivisorClass::basis(t.source(), 0);
                let l_hat = DivisorClass::basis(t.target(), 0);
                (t, DisplayedFormula::PicardRankOne { n, l, l_hat })
            } else {
                let built = resolve_kernel(surface, kernel)?;
                let t = CohTransform::from_kernel(&built.kernel)?;
                let f = match id {
                    None => built.formula,
                    Some(FormulaId::GeneralKernel) => {
                        let k = &built.kernel;
                        DisplayedFormula::GeneralKernel {
                            a: k.a.clone(),
                            b: k.b.clone(),
                            c: k.c.clone(),
                            d: k.d.clone(),
                        }
                    }
                    Some(id) if id == built.formula.id() => built.formula,
                    Some(id) => {
                        return Err(Error::InvalidArgument(format!(
                            "formula {id} does not apply to this kernel (its closed form is {})",
                            built.formula.id()
                        )))
                    }
                };
                (t, f)
            };
            let mut report: DiffReport = crosscheck_specialized(&t, &f)?;
            if let Some(m) = max_entries {
                report.entries.truncate(*m);
            }
            ok(&report)
        }
        Command::Pic1 { lsq, oracle, bound } => pic1_command(*lsq, *oracle, *bound),
        Command::ReflexiveValidate(a) | Command::Reflexive { action: ReflexiveAction::Validate(a) } => {
            let rs = reflexive_surface(a)?;
            ok(&rs.report())
        }
        Command::ReflexiveHats(a) | Command::Reflexive { action: ReflexiveAction::Hats(a) } => {
            let rs = reflexive_surface(a)?;
            let hats = hat_classes(&rs)?;
            ok(&HatsResult {
                h_hat: hats.h_hat.coords().to_vec(),
                l_hat: hats.l_hat.coords().to_vec(),
                h_hat_square: hats.h_hat.square(),
                l_hat_square: hats.l_hat.square(),
                h_hat_dot_l_hat: intersect(&hats.h_hat, &hats.l_hat)?,
            })
        }
        Command::ReflexiveDecompose(a) | Command::Reflexive { action: ReflexiveAction::Decompose(a) } => {
            let rs = reflexive_surface_or(a, TYPE_I_SPEC)?;
            let (dec, case) = decompose_l2h(&rs)?;
            let all = decompose_brute_force(&rs.curve_config()?);
            let canon = dec.canonical();
            ok(&DecomposeResult {
                case,
                decomposition: (&dec).into(),
                alternatives: all.iter().filter(|d| **d != canon).map(Into::into).collect(),
                found_by_exhaustive_search: all.contains(&canon),
                difference_not_effective: difference_not_effective(&rs, &dec)?,
            })
        }
        Command::ReflexiveClassify(a) | Command::Reflexive { action: ReflexiveAction::Classify(a) } => {
            let rs = reflexive_surface_or(a, TYPE_I_SPEC)?;
            let (dec, _) = decompose_l2h(&rs)?;
            let c = classify_type(&rs, &dec)?;
            ok(&ClassifyResult {
                kind: c.kind,
                decomposition: (&c.decomposition).into(),
                degrees: vec![c.degrees.0, c.degrees.1],
                type_ii: c.type_ii.map(|t| TypeIIJson {
                    e: t.e.coords().to_vec(),
                    e_square: t.e_square,
                    h_dot_e: t.h_dot_e,
                    d1_dot_e: t.d1_dot_e,
                }),
            })
        }
        Command::ReflexiveKernel { args, variant }
        | Command::Reflexive {
            action: ReflexiveAction::Kernel { args, variant },
        } => {
            let variant: KernelVariant = variant.parse()?;
            let default = match variant {
                KernelVariant::Nondegenerate => REFLEXIVE_SPEC,
                KernelVariant::TypeI => TYPE_I_SPEC,
                KernelVariant::TypeII => TYPE_II_SPEC,
            };
            let rs = reflexive_surface_or(args, default)?;
            let k = build_kernel(&rs, variant)?;
            let validity = check_sufficient(&k);
            let reason = (!validity.lattice_conditions())
                .then(|| "kernel fails AB = CD or (a−c)² = −4".to_string());
            rejected_if(
                &ReflexiveKernelResult {
                    variant,
                    kernel: (&k).into(),
                    validity,
                },
                reason,
            )
        }
        Command::HilbModuli {
            surface,
            kernel,
            n,
            flavor,
        } => {
            let built = resolve_kernel(surface, kernel)?;
            let fl = built.flavor.ok_or_else(|| {
                Error::InvalidArgument("this kernel has no ideal-sheaf vector family".into())
            })?;
            if fl.name() != flavor {
                return Err(Error::InvalidArgument(format!(
                    "flavor `{flavor}` does not match the kernel (expected `{}`)",
                    fl.name()
                )));
            }
            let t = CohTransform::from_kernel(&built.kernel)?;
            let (_, report) = hilb_moduli_vector(&t, *n, &fl)?;
            let reason = (!report.matches_expected)
                .then(|| "vector differs from the expected family".to_string());
            rejected_if(&report, reason)
        }
        Command::Strata {
            surface,
            l,
            m,
            h,
            z,
            a,
        } => {
            let spec = load_or(surface, REFLEXIVE_SPEC)?;
            let (l, m, h) = (spec.parse_class(l)?, spec.parse_class(m)?, spec.parse_class(h)?);
            let z = match z {
                Some(z) => Int::from(*z),
                None => es_relation(&l.square())?,
            };
            let a = a.as_deref().map(parse_rat).transpose()?;
            let report = strata_chain(&spec, &l, &m, &h, &z, a.as_ref())?;
            let reason = (report.stratum_bound.implication_holds == Some(false))
                .then(|| "a < μ(M) < μ(L) − a holds but ℓ·m − m² ≤ z".to_string());
            rejected_if(&report, reason)
        }
        Command::PrimitiveCheck { surface, l, n, h } => {
            let spec = load_or(surface, REFLEXIVE_SPEC)?;
            let (l, h) = (spec.parse_class(l)?, spec.parse_class(h)?);
            ok(&check_ample_primitive(&spec, &l, *n, &h)?)
        }
    }
}

fn reflexive_surface(a: &ReflexiveArgs) -> Result<crate::reflexive::ReflexiveSurface> {
    reflexive_surface_or(a, REFLEXIVE_SPEC)
}

fn reflexive_surface_or(a: &ReflexiveArgs, default: &str) -> Result<crate::reflexive::ReflexiveSurface> {
    let spec = load_or(&a.surface, default)?;
    validate_reflexive(&spec, &a.h_name, &a.l_name)
}

fn pic1_command(lsq: i64, oracle: bool, bound: Option<i64>) -> Result<Outcome> {
    let n = pic1::existence_test(lsq)?;
    let Some(n) = n else {
        let result = Pic1Result {
            lsq,
            exists: false,
            n: None,
            solutions: vec![],
            selected: None,
            matrix: None,
            det: None,
            isometry: None,
            excluded_slope_ratio: None,
            oracle: None,
        };
        return rejected_if(&result, Some(format!("ℓ² = {lsq} is not ≡ 4 (mod 8)")));
    };
    let pair = pic1::solve_constraints(n)?;
    let sel = pic1::select_physical(&pair)?;
    let isometry = sel.selected.to_transform()?.is_mukai_isometry();
    let mut reason = None;
    let oracle = if oracle {
        let bound = bound.unwrap_or(4 * n + 20);
        let found = pic1::brute_force_oracle(n, bound)?;
        let agrees = found == vec![pair.0.clone(), pair.1.clone()];
        if !agrees {
            reason = Some("exhaustive search disagrees with the closed-form solutions".into());
        }
        Some(OracleResult { bound, found, agrees })
    } else {
        None
    };
    if !isometry {
        reason = Some("selected matrix is not a Mukai isometry".into());
    }
    rejected_if(
        &Pic1Result {
            lsq,
            exists: true,
            n: Some(n),
            solutions: vec![pair.0, pair.1],
            matrix: Some(sel.selected.matrix),
            det: Some(sel.selected.det),
            selected: Some(sel.selected),
            isometry: Some(isometry),
            excluded_slope_ratio: Some(sel.excluded_slope_ratio),
            oracle,
        },
        reason,
    )
}

/// Runs a parsed command and wraps the outcome in a [`Report`].
pub fn execute(command: &Command) -> Result<Report> {
    let name = command_name(command);
    match dispatch(command) {
        Ok(o) => Ok(Report {
            command: name,
            status: if o.rejection.is_some() { Status::Rejected } else { Status::Ok },
            reason: o.rejection,
            result: Some(o.result),
        }),
        Err(e) if e.is_rejection() => Ok(Report {
            command: name,
            status: Status::Rejected,
            reason: Some(e.to_string()),
            result: None,
        }),
        Err(e) => Err(e),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(report: &Report) -> String {
    let v = serde_json::to_value(report).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// One `key  value` line per leaf, keys aligned.
pub fn render_text(report: &Report) -> String {
    let v = serde_json::to_value(report).expect("reports serialize");
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        s.push_str(&k);
        s.push_str(&" ".repeat(pad + 2));
        s.push_str(&v);
        s.push('\n');
    }
    s
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name), runs, and renders.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok(report) => Invocation {
            code: report.exit_code(),
            stdout: match cli.format {
                Format::Json => render_json(&report),
                Format::Text => render_text(&report),
            },
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Convenience for tests: the typed result of a report.
pub fn result_as<T: for<'de> Deserialize<'de>>(report: &Report) -> Result<T> {
    let v = report
        .result
        .clone()
        .ok_or_else(|| Error::Parse("report has no result".into()))?;
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

#[doc(hidden)]
pub fn builtin_specs() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("no-cohomology", NO_COHOMOLOGY_SPEC),
        ("reflexive", REFLEXIVE_SPEC),
        ("type-i", TYPE_I_SPEC),
        ("type-ii", TYPE_II_SPEC),
    ])
}
