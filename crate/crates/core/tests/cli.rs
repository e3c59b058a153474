use std::process::Command;

use k3fm::cli::{
    invoke, result_as, ChiResult, ClassifyResult, DecomposeResult, HatsResult, KernelCheckResult,
    Pic1Result, Report, ReflexiveKernelResult, Status, TransformApplyResult,
};
use k3fm::displayed::DiffReport;
use k3fm::moduli::{HilbReport, PrimitivityReport, StrataReport};
use k3fm::reflexive::ReflexiveReport;
use k3fm::surface::SurfaceFile;

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_k3fm"))
        .args(args)
        .env_remove("K3FM_FORMAT")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, Report) {
    let out = invoke(std::iter::once("k3fm").chain(args.iter().copied()));
    assert!(out.code != 2, "input error for {args:?}: {}", out.stderr);
    (out.code, serde_json::from_str(&out.stdout).expect("report parses"))
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn golden_pic1_lsq4() {
    let (code, out, _) = bin(&["pic1", "--lsq", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/pic1_lsq4.json"));
    let report: Report = serde_json::from_str(&out).unwrap();
    let r: Pic1Result = result_as(&report).unwrap();
    assert_eq!(r.n, Some(0));
    assert_eq!(r.det, Some(1));
    assert_eq!(r.matrix, Some([[3, -4, 2], [-1, 1, -1], [-2, 4, -1]]));
}

#[test]
fn golden_chi() {
    let spec = data("reflexive.json");
    let (code, out, _) = bin(&["chi", "--spec", &spec, "--class", "l+2h"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/chi_l2h.json"));
    let r: ChiResult = result_as(&serde_json::from_str(&out).unwrap()).unwrap();
    assert_eq!(r.chi, 0.into());
}

#[test]
fn golden_transform_apply() {
    let (code, out, _) = bin(&["transform-apply", "--builder", "thm2.5", "--ch", "1,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/transform_apply_no_cohomology.json"));
    let r: TransformApplyResult = result_as(&serde_json::from_str(&out).unwrap()).unwrap();
    assert_eq!(r.output, r.input);
}

#[test]
fn descriptive_builder_aliases_match() {
    let (_, a, _) = bin(&["transform-apply", "--builder", "thm2.5", "--ch", "2,1,-3/1"]);
    let (_, b, _) = bin(&["transform-apply", "--builder", "no-cohomology", "--ch", "2,1,-3"]);
    assert_eq!(a, b);
}

#[test]
fn output_is_deterministic() {
    let args = ["transform-crosscheck", "--builder", "thm5.1", "--max-entries", "3"];
    assert_eq!(bin(&args).1, bin(&args).1);
}

#[test]
fn exit_status_contract() {
    assert_eq!(bin(&["pic1", "--lsq", "8"]).0, 1);
    assert_eq!(bin(&["pic1", "--lsq", "-4"]).0, 2);
    assert_eq!(bin(&["frobnicate"]).0, 2);
    assert_eq!(bin(&["chi", "--class", "q"]).0, 2);
    assert_eq!(bin(&["hilb-moduli", "--builder", "thm6.2-ii", "--n", "1", "--flavor", "reflexive"]).0, 2);
    // A kernel violating (a−c)² = −4.
    let (code, out, _) = bin(&["kernel-check", "--a", "0", "--b", "0", "--c", "0", "--d", "0"]);
    assert_eq!(code, 1);
    let rep: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(rep.status, Status::Rejected);
    // Non-reflexive data handed to a reflexive command.
    let (code, out, _) = bin(&["reflexive-validate", "--spec", &data("no_cohomology.json")]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn violation_exits_one() {
    let dir = std::env::temp_dir().join(format!("k3fm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad_l.json");
    std::fs::write(
        &p,
        r#"{"rank":2,"gram":[[2,0],[0,-10]],"classes":{"h":[1,0],"l":[0,1]},"assumptions":[{"kind":"ample","class":"h"}]}"#,
    )
    .unwrap();
    let (code, out, _) = bin(&["reflexive-validate", "--spec", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("L^2=-12"), "{out}");
}

#[test]
fn text_format_via_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_k3fm"))
        .args(["chi", "--class", "l"])
        .env("K3FM_FORMAT", "text")
        .output()
        .unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("result.chi"), "{s}");
    assert!(!s.trim_start().starts_with('{'));
}

#[test]
fn reports_round_trip_into_typed_results() {
    let (_, r) = run(&["surface-validate", "--spec", &data("type_i.json")]);
    let f: SurfaceFile = result_as(&r).unwrap();
    assert_eq!(f.rank, 3);

    let (_, r) = run(&["kernel-check", "--builder", "thm2.5"]);
    let k: KernelCheckResult = result_as(&r).unwrap();
    assert!(k.phio_identity && k.det_normalization);
    // Sends O to O[−1], so not of the Φ(O) = O shape.
    let (_, r) = run(&["kernel-check", "--builder", "thm5.1"]);
    let k: KernelCheckResult = result_as(&r).unwrap();
    assert!(!k.phio_identity);

    let (code, r) = run(&["transform-crosscheck", "--builder", "thm2.5"]);
    assert_eq!(code, 0);
    let d: DiffReport = result_as(&r).unwrap();
    assert_eq!(d.mismatches, 0);

    let (_, r) = run(&["transform-crosscheck", "--formula", "prop3.9", "--lsq", "12"]);
    let d: DiffReport = result_as(&r).unwrap();
    assert!(d.points_checked > 0);

    let (_, r) = run(&["reflexive-validate"]);
    let v: ReflexiveReport = result_as(&r).unwrap();
    assert_eq!(v.l_square, (-12).into());

    let (_, r) = run(&["reflexive", "hats"]);
    let h: HatsResult = result_as(&r).unwrap();
    assert_eq!((h.h_hat_square, h.l_hat_square), (2.into(), (-12).into()));

    let (_, r) = run(&["reflexive-decompose", "--spec", &data("three_curves.json")]);
    let d: DecomposeResult = result_as(&r).unwrap();
    assert!(d.found_by_exhaustive_search && d.difference_not_effective);

    let (_, r) = run(&["reflexive-classify", "--spec", &data("type_ii.json")]);
    let c: ClassifyResult = result_as(&r).unwrap();
    assert!(c.type_ii.is_some());

    let (_, r) = run(&["reflexive-kernel", "--variant", "typeII"]);
    let k: ReflexiveKernelResult = result_as(&r).unwrap();
    assert!(k.validity.lattice_conditions());

    let (_, r) = run(&["hilb-moduli", "--builder", "thm2.5", "--n", "3", "--flavor", "no-cohomology"]);
    let h: HilbReport = result_as(&r).unwrap();
    assert!(h.matches_expected);

    let (_, r) = run(&["strata", "--l", "l+2h", "--m", "h", "--a", "1/2"]);
    let _: StrataReport = result_as(&r).unwrap();

    let (code, r) = run(&["primitive-check", "--l", "2h", "--n", "2"]);
    assert_eq!(code, 0);
    let p: PrimitivityReport = result_as(&r).unwrap();
    assert!(p.excluded);

    let (code, r) = run(&["pic1", "--lsq", "20", "--oracle"]);
    assert_eq!(code, 0);
    let p: Pic1Result = result_as(&r).unwrap();
    assert!(p.oracle.unwrap().agrees);
}

#[test]
fn rationals_are_canonical() {
    let (_, out, _) = bin(&["transform-apply", "--builder", "thm5.1", "--ch", "0,0,0,4/2"]);
    assert!(out.contains("\"t\": \"2/1\""), "{out}");
    assert!(!out.contains("4/2"));
}

#[test]
fn every_command_matches_the_report_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/report-schema.json")).unwrap();
    let validator = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let three = data("three_curves.json");
    let type_ii = data("type_ii.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["surface-validate", "--spec", &three],
        vec!["chi", "--class", "3l+7h"],
        vec!["kernel-check", "--builder", "thm6.2-i"],
        vec!["kernel-check", "--a", "0", "--b", "0", "--c", "0", "--d", "0"],
        vec!["transform-apply", "--builder", "thm5.1", "--ch", "2,1,-1,7/2"],
        vec!["transform-crosscheck", "--builder", "thm6.2-ii", "--max-entries", "2"],
        vec!["transform-crosscheck", "--formula", "prop3.9", "--lsq", "4", "--max-entries", "2"],
        vec!["pic1", "--lsq", "28", "--oracle"],
        vec!["pic1", "--lsq", "16"],
        vec!["reflexive-validate"],
        vec!["reflexive-hats"],
        vec!["reflexive-decompose", "--spec", &three],
        vec!["reflexive-classify", "--spec", &type_ii],
        vec!["reflexive-kernel", "--variant", "typeI"],
        vec!["hilb-moduli", "--builder", "thm5.1", "--n", "4", "--flavor", "reflexive"],
        vec!["strata", "--l", "l+2h", "--m", "h", "--a", "1/3"],
        vec!["primitive-check", "--l", "3h", "--n", "3"],
    ];
    for args in runs {
        let out = invoke(std::iter::once("k3fm").chain(args.iter().copied()));
        assert!(out.code != 2, "{args:?}: {}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let msgs: Vec<String> = match validator.validate(&v) {
            Ok(()) => vec![],
            Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
}
