use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use symcartan::commands::{EvalOutput, HolonomyOutput};
use symcartan::report::Report;
use symcartan_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    symcartan_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = symcartan_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn eval_through_handles() {
    unsafe {
        let path = cs(data("sample_so31.json").to_str().unwrap());
        let mut fields = ptr::null_mut();
        assert_eq!(symcartan_fields_load(path.as_ptr(), &mut fields), SymcartanStatus::Ok);
        assert!(symcartan_last_error().is_null());

        let mut json = ptr::null_mut();
        let null = ptr::null();
        let st = symcartan_eval_action(fields, cs("palatini").as_ptr(), null, null, null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::Ok);
        let out: EvalOutput = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(out.value.exact_value.unwrap().to_string(), "-47/3");

        let (c0, c1) = (cs("1/3"), cs("-1"));
        let st = symcartan_eval_action(fields, cs("cs").as_ptr(), c0.as_ptr(), c1.as_ptr(), null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::Ok);
        let out: EvalOutput = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(out.value.exact_value.unwrap().to_string(), "3371/216");

        let st = symcartan_eval_action(fields, cs("tmg").as_ptr(), null, null, null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::Precondition);
        assert!(last_error().contains("μ"));
        let st = symcartan_eval_action(fields, cs("nope").as_ptr(), null, null, null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::Parse);
        let bad = cs("1/0");
        let st = symcartan_eval_action(fields, cs("cs").as_ptr(), bad.as_ptr(), null, null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::Parse);
        symcartan_fields_free(fields);
    }
}

#[test]
fn numeric_eval_and_coframe_errors() {
    unsafe {
        let text = std::fs::read_to_string(data("tmg_coframe_so22.json")).unwrap();
        let mut fields = ptr::null_mut();
        assert_eq!(symcartan_fields_from_json(cs(&text).as_ptr(), &mut fields), SymcartanStatus::Ok);
        let mu = cs("5");
        let mut json = ptr::null_mut();
        let null = ptr::null();
        let st = symcartan_eval_action(fields, cs("tmg").as_ptr(), null, null, mu.as_ptr(), null, 8, &mut json);
        assert_eq!(st, SymcartanStatus::Ok);
        let out: EvalOutput = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(out.refinement.unwrap().fine.quadrature_grid, Some(16));
        symcartan_fields_free(fields);

        assert_eq!(symcartan_fields_from_json(cs("{").as_ptr(), &mut fields), SymcartanStatus::Parse);
        let missing = cs("/nonexistent/fields.json");
        assert_eq!(symcartan_fields_load(missing.as_ptr(), &mut fields), SymcartanStatus::Io);
    }
}

#[test]
fn verify_reports() {
    unsafe {
        let mut report = ptr::null_mut();
        let cfg = cs(r#"{"suites": ["CS_NULL", "INVARIANT_FORMS"], "algebras": ["so31"], "seeds": "0..2"}"#);
        assert_eq!(symcartan_verify(cfg.as_ptr(), &mut report), SymcartanStatus::Ok);
        assert_eq!(symcartan_report_passed(report), 1);
        let mut json = ptr::null_mut();
        assert_eq!(symcartan_report_json(report, &mut json), SymcartanStatus::Ok);
        let r = Report::from_json(&take(json)).unwrap();
        assert_eq!(r.summary.total, 7);
        symcartan_report_free(report);

        let faulty = cs(r#"{"suites": ["ALGEBRA_STRUCTURE"], "algebras": ["so22"], "seeds": "0..1",
                "fault": {"algebra": "so22", "alpha": 0, "beta": 1, "gamma": 2, "delta": "1"}}"#);
        assert_eq!(symcartan_verify(faulty.as_ptr(), &mut report), SymcartanStatus::ChecksFailed);
        assert_eq!(symcartan_report_passed(report), 0);
        assert_eq!(symcartan_report_failed_count(report), 1);
        assert!(last_error().contains("ALGEBRA_STRUCTURE:so22"));
        symcartan_report_free(report);

        let bad = cs(r#"{"suites": ["CS_NULL"], "algebras": ["so41"]}"#);
        let mut none = ptr::null_mut();
        assert_eq!(symcartan_verify(bad.as_ptr(), &mut none), SymcartanStatus::Precondition);
        assert!(none.is_null());
        assert!(last_error().contains("so41"));
    }
}

#[test]
fn holonomy_json() {
    unsafe {
        let path = cs(&std::fs::read_to_string(data("square_path.json")).unwrap());
        let mut json = ptr::null_mut();
        assert_eq!(symcartan_holonomy(cs("sphere").as_ptr(), path.as_ptr(), 10_000, &mut json), SymcartanStatus::Ok);
        let h: HolonomyOutput = serde_json::from_str(&take(json)).unwrap();
        assert!((h.rotation_angle.unwrap() - 0.04).abs() < 1e-4);
        assert_eq!(h.matrix.len(), 2);

        assert_eq!(
            symcartan_holonomy(cs("sphere").as_ptr(), path.as_ptr(), 0, &mut json),
            SymcartanStatus::Precondition
        );
        assert_eq!(symcartan_holonomy(cs("cone").as_ptr(), path.as_ptr(), 10, &mut json), SymcartanStatus::Parse);
        let broken = cs(r#"{"segments": [{"type": "line", "from": [0], "to": [1]}]}"#);
        assert_eq!(symcartan_holonomy(cs("sphere").as_ptr(), broken.as_ptr(), 10, &mut json), SymcartanStatus::Parse);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut fields = ptr::null_mut();
        assert_eq!(symcartan_fields_from_json(ptr::null(), &mut fields), SymcartanStatus::NullPointer);
        assert_eq!(symcartan_fields_from_json(cs("{}").as_ptr(), ptr::null_mut()), SymcartanStatus::NullPointer);
        let null = ptr::null();
        let mut json = ptr::null_mut();
        let st = symcartan_eval_action(ptr::null(), cs("cs").as_ptr(), null, null, null, null, 0, &mut json);
        assert_eq!(st, SymcartanStatus::NullPointer);
        assert_eq!(symcartan_report_json(ptr::null(), &mut json), SymcartanStatus::NullPointer);
        assert_eq!(symcartan_report_passed(ptr::null()), 0);
        let bad_utf8 = [0xffu8, 0];
        let st = symcartan_holonomy(bad_utf8.as_ptr().cast(), cs("{}").as_ptr(), 1, &mut json);
        assert_eq!(st, SymcartanStatus::InvalidUtf8);
        symcartan_fields_free(ptr::null_mut());
        symcartan_report_free(ptr::null_mut());
        symcartan_string_free(ptr::null_mut());
        let v = CStr::from_ptr(symcartan_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/symcartan.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["symcartan_eval_action", "symcartan_verify", "symcartan_holonomy", "symcartan_last_error"] {
        assert!(text.contains(f), "{f}");
    }
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"symcartan.h\"\nint main(void) { SymcartanStatus s = SYMCARTAN_STATUS_OK; return (int)s; }\n",
    )
    .unwrap();
    let inc = header.parent().unwrap();
    let o = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(inc)
        .arg(&src)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
