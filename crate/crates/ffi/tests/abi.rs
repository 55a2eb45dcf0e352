use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use selfsim_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let text = CStr::from_ptr(s).to_string_lossy().into_owned();
    selfsim_string_free(s);
    text
}

unsafe fn last_error() -> String {
    let p = selfsim_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn handle_lifecycle_and_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        let json = cstr(r#"{"maps":[{"ratio":"1/3","sign":-1,"translation":"1/3"},{"ratio":"1/3","translation":"2/3"}]}"#);
        assert_eq!(selfsim_ifs_from_json(json.as_ptr(), &mut h), SELFSIM_OK);
        assert_eq!(selfsim_ifs_len(h), 2);
        let mut out = ptr::null_mut();
        assert_eq!(selfsim_ifs_to_json(h, &mut out), SELFSIM_OK);
        let text = take(out);
        let mut again = ptr::null_mut();
        let text_c = cstr(&text);
        assert_eq!(selfsim_ifs_from_json(text_c.as_ptr(), &mut again), SELFSIM_OK);
        let mut out2 = ptr::null_mut();
        assert_eq!(selfsim_ifs_to_json(again, &mut out2), SELFSIM_OK);
        assert_eq!(take(out2), text);
        selfsim_ifs_free(h);
        selfsim_ifs_free(again);
        selfsim_ifs_free(ptr::null_mut());
        assert_eq!(selfsim_ifs_len(ptr::null()), 0);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        let bad = cstr(r#"{"maps":[{"ratio":"5/4","translation":"0"},{"ratio":"1/2","translation":"1"}]}"#);
        assert_eq!(selfsim_ifs_from_json(bad.as_ptr(), &mut h), SELFSIM_INVALID_INPUT);
        assert!(h.is_null());
        assert!(last_error().contains("maps[0].ratio"));
        assert_eq!(selfsim_ifs_from_json(ptr::null(), &mut h), SELFSIM_NULL_POINTER);
        let ok = cstr(r#"{"digits":{"A":3,"d":[0,2]}}"#);
        assert_eq!(selfsim_ifs_from_json(ok.as_ptr(), ptr::null_mut()), SELFSIM_NULL_POINTER);
        let invalid_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(selfsim_ifs_from_json(invalid_utf8.as_ptr().cast(), &mut h), SELFSIM_INVALID_UTF8);
        // a successful call clears the message
        assert_eq!(selfsim_ifs_from_json(ok.as_ptr(), &mut h), SELFSIM_OK);
        assert!(selfsim_last_error().is_null());
        let mut lo = 0.0;
        assert_eq!(selfsim_dimension(h, 2, &mut lo, &mut lo.clone()), SELFSIM_INVALID_INPUT);
        selfsim_ifs_free(h);
    }
}

#[test]
fn dimension_is_outward() {
    unsafe {
        let mut h = ptr::null_mut();
        let json = cstr(r#"{"digits":{"A":4,"d":[0,1,6]}}"#);
        assert_eq!(selfsim_ifs_from_json(json.as_ptr(), &mut h), SELFSIM_OK);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(selfsim_dimension(h, 80, &mut lo, &mut hi), SELFSIM_OK);
        let exact = 3f64.ln() / 4f64.ln();
        assert!(lo <= hi && hi - lo <= 4.0 * f64::EPSILON);
        assert!((lo - exact).abs() < 1e-15 && (hi - exact).abs() < 1e-15);
        selfsim_ifs_free(h);
    }
}

#[test]
fn run_commands() {
    unsafe {
        let mut h = ptr::null_mut();
        let json = cstr(r#"{"digits":{"A":4,"d":[0,1,6]}}"#);
        assert_eq!(selfsim_ifs_from_json(json.as_ptr(), &mut h), SELFSIM_OK);
        let mut out = ptr::null_mut();

        let args = cstr(r#"["feasible", "--m", "0"]"#);
        assert_eq!(selfsim_run(h, args.as_ptr(), &mut out), SELFSIM_NO_RESULT);
        let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(doc["result"]["overlaps"][0]["intersection"][0]["lo"], "1/4");
        assert_eq!(doc["result"]["overlaps"][0]["intersection"][0]["hi"], "1/2");

        let args = cstr(r#"["osc-check", "--mode", "mod"]"#);
        assert_eq!(selfsim_run(h, args.as_ptr(), &mut out), SELFSIM_OK);
        let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(doc["result"]["holds"], true);

        let args = cstr(r#"["overlap-example", "--k", "2"]"#);
        assert_eq!(selfsim_run(ptr::null(), args.as_ptr(), &mut out), SELFSIM_OK);
        let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(doc["result"]["overlap_length"], "1/4096");

        let args = cstr(r#"["no-such-command"]"#);
        assert_eq!(selfsim_run(h, args.as_ptr(), &mut out), SELFSIM_INVALID_INPUT);
        selfsim_string_free(out);
        let args = cstr(r#"{"not":"an array"}"#);
        assert_eq!(selfsim_run(h, args.as_ptr(), &mut out), SELFSIM_INVALID_INPUT);
        assert!(out.is_null());
        let args = cstr(r#"["dim"]"#);
        assert_eq!(selfsim_run(ptr::null(), args.as_ptr(), &mut out), SELFSIM_INVALID_INPUT);
        assert!(take(out).contains("system"));
        selfsim_ifs_free(h);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(selfsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/selfsim.h")).unwrap();
    for name in [
        "typedef struct selfsim_ifs_t selfsim_ifs_t;",
        "selfsim_ifs_from_json",
        "selfsim_ifs_free",
        "selfsim_ifs_to_json",
        "selfsim_dimension",
        "selfsim_run",
        "selfsim_last_error",
        "selfsim_string_free",
        "#define SELFSIM_INVALID_INPUT 2",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

/// Compiles `smoke.c` against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libselfsim_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("selfsim_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let bounds: Vec<f64> = text.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert!(bounds[0] <= bounds[1]);
}
