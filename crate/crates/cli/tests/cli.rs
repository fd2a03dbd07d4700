use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hcr_core::data;

fn hcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcr"))
        .args(args)
        .output()
        .expect("run hcr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn t_report_has_mathematics_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let totals = write(dir.path(), "totals.csv", data::FIELD_TOTALS_CSV);
    let o = hcr(&["ratios", "--totals", &totals]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("\nMathematics,1.0000,,\n"));
}

#[test]
fn h_report_rounds_to_published_column() {
    let o = hcr(&["hratios", "--bundled"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for (field, h) in data::REFERENCE_H {
        let line = out
            .lines()
            .find(|l| l.starts_with(&format!("{field},")))
            .unwrap();
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(ratio.round() as u64, *h, "{line}");
    }
}

#[test]
fn missing_file_is_an_io_error_naming_the_path() {
    let o = hcr(&["ratios", "--totals", "/no/such/totals.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/totals.csv"));
}

#[test]
fn malformed_input_is_a_validation_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let totals = write(
        dir.path(),
        "t.csv",
        "year,nsf_field,total_citations\n1992,Mathematics,-5\n",
    );
    let o = hcr(&["ratios", "--totals", &totals]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hcr(&["rank", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(hcr(&["nope"]).status.code(), Some(1));
    assert_eq!(
        hcr(&["rank", "--bundled", "--epsilon", "-1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        hcr(&["indicators", "--bundled", "--cpmp-mode", "threshold"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hcr(&["--help"]).status.code(), Some(0));
}

#[test]
fn rank_summary_on_published_list() {
    let o = hcr(&["rank", "--bundled", "--preset", "appendix"]);
    assert!(o.status.success());
    assert!(stderr(&o).starts_with("5 / 7 / 10 field leaders in top 10 / 50 / 100\n"));
    let first = stdout(&o).lines().nth(1).unwrap().to_string();
    assert_eq!(
        first,
        "1,\"INOUE, A\",2495,Materials science,1,655,8315,12.69"
    );
}

#[test]
fn single_field_with_unit_divisor_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(
        dir.path(),
        "f.csv",
        "rank,name,normalized,field,field_rank,papers,citations,cpp\n\
         1,\"B, X\",30,Chemistry,1,10,30,3.00\n\
         2,\"A, Y\",20,Chemistry,2,10,20,2.00\n\
         3,\"C, Z\",10,Chemistry,3,5,10,2.00\n",
    );
    let divisors = write(
        dir.path(),
        "d.csv",
        "esi_field,divisor_num,divisor_den\nChemistry,1,1\n",
    );
    let o = hcr(&["rank", "--fixture", &fixture, "--divisors", &divisors]);
    assert!(o.status.success(), "{}", stderr(&o));
    let names: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split('"').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(names, ["B, X", "A, Y", "C, Z"]);
}

#[test]
fn unknown_preset_exits_one() {
    let o = hcr(&["rank", "--bundled", "--preset", "median"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("median"));
}

#[test]
fn divisors_and_preset_conflict() {
    let o = hcr(&[
        "rank",
        "--bundled",
        "--preset",
        "table2",
        "--divisors",
        "x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fit_footer_shows_two_digit_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = write(dir.path(), "pairs.csv", data::PUBLISHED_PAIRS_CSV);
    let o = hcr(&["fit", "--pairs", &pairs]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("alpha,0.82\n"));
}

#[test]
fn fit_from_computed_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let totals = write(dir.path(), "t.csv", data::FIELD_TOTALS_CSV);
    let snaps = write(dir.path(), "s.csv", data::HRATIO_SNAPSHOTS_CSV);
    let o = hcr(&["fit", "--totals", &totals, "--snapshots", &snaps]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 9 + 1);
    assert_eq!(hcr(&["fit", "--totals", &totals]).status.code(), Some(1));
}

#[test]
fn indicators_reproduce_cpp_column() {
    let o = hcr(&["indicators", "--bundled"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let fixture = data::appendix_rows();
    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(lines.len(), fixture.len());
    for (line, row) in lines.iter().zip(&fixture) {
        let cells: Vec<&str> = line.rsplitn(6, ',').collect();
        let cpp: f64 = cells[4].parse().unwrap();
        assert!((cpp - row.cpp.to_f64()).abs() <= 0.01 + 1e-9, "{line}");
    }
}

#[test]
fn indicators_use_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(
        dir.path(),
        "f.csv",
        "rank,name,normalized,field,field_rank,papers,citations,cpp\n1,\"WANG, J\",100,Physics,1,5,22,4.40\n",
    );
    let profiles = write(
        dir.path(),
        "p.csv",
        "name,paper_id,citations\nWANG J,a,10\nWANG J,b,8\nWANG J,c,2\nWANG J,d,1\nWANG J,e,1\n",
    );
    let o = hcr(&["indicators", "--fixture", &fixture, "--profiles", &profiles]);
    assert!(o.status.success(), "{}", stderr(&o));
    // `WANG J` and `WANG, J` are different names; no profile attaches.
    assert!(stdout(&o).contains("\"WANG, J\",Physics,4.40,,,0.49,false"));

    let profiles = write(
        dir.path(),
        "p2.csv",
        "name,paper_id,citations\n\"WANG, J\",a,10\n\"WANG, J\",b,8\n\"WANG, J\",c,2\n\"WANG, J\",d,1\n\"WANG, J\",e,1\n",
    );
    let o = hcr(&[
        "indicators",
        "--fixture",
        &fixture,
        "--profiles",
        &profiles,
        "--cpmp-mode",
        "threshold",
        "--cpmp-threshold",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("\"WANG, J\",Physics,4.40,2,9.00,0.49,false"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn report_without_inputs_lists_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hcr(&["report", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for flag in ["--fixture", "--snapshots", "--totals"] {
        assert!(err.contains(flag), "{err}");
    }
    assert!(!out.exists());
    assert_eq!(hcr(&["report", "--bundled"]).status.code(), Some(1));
}

#[test]
fn failed_report_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "f.csv", "rank,name,normalized,field,field_rank,papers,citations,cpp\n2,\"A, B\",1,Chemistry,1,1,1,1.00\n");
    let out = dir.path().join("out");
    let o = hcr(&[
        "report",
        "--bundled",
        "--fixture",
        &bad,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn report_manifest_hashes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hcr(&[
        "report",
        "--bundled",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_object().unwrap();
    assert_eq!(outputs.len() + 1, fs::read_dir(&out).unwrap().count());
    for (name, hash) in outputs {
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(hash.as_str().unwrap(), hcr_sha256(&bytes), "{name}");
    }
    assert_eq!(manifest["parameters"]["divisor_preset"], "appendix");
    assert_eq!(manifest["inputs"]["fixture"]["origin"], "<bundled>");
    // No leftover temporary files.
    assert!(fs::read_dir(&out).unwrap().all(|e| !e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .starts_with('.')));

    let merged: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("merged.json")).unwrap()).unwrap();
    assert_eq!(
        merged["entries"][0]["normalized_exact"],
        serde_json::json!({"num": 4989, "den": 2})
    );
}

fn hcr_sha256(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn data_preset_derives_divisors_from_snapshots() {
    let o = hcr(&["ratios", "--bundled", "--preset", "data"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        hcr(&["rank", "--fixture", "/dev/null", "--preset", "data"])
            .status
            .code(),
        Some(1)
    );
}
