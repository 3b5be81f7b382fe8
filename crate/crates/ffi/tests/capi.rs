use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use elicit_ffi::*;

fn last_error() -> String {
    let p = elicit_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { elicit_string_free(p) };
    s
}

fn mechanism(kind: ElicitMechanismKind, family: ElicitFamily, param: f64, nu: &[f64], n: f64) -> *mut ElicitMechanism {
    let mut m = ptr::null_mut();
    let st = unsafe { elicit_mechanism_new(kind, family, param, nu.as_ptr(), nu.len(), n, &mut m) };
    assert_eq!(st, ElicitStatus::Ok);
    m
}

#[test]
fn dirichlet_elicit_decode_aggregate() {
    let m = mechanism(ElicitMechanismKind::TwoSampleDirichlet, ElicitFamily::Categorical, 3.0, &[1.0, 1.0, 1.0], 0.0);
    let mut report = [0.0; 4];
    let mut len = 0;
    let st = unsafe { elicit_mechanism_elicit(m, [5.0, 3.0, 2.0].as_ptr(), 3, 0.0, report.as_mut_ptr(), 4, &mut len) };
    assert_eq!((st, len), (ElicitStatus::Ok, 4));
    assert_eq!(&report[..3], &[0.5, 0.3, 0.2]);

    let (mut nu, mut nu_len, mut n) = ([0.0; 3], 0, 0.0);
    let st = unsafe { elicit_mechanism_decode(m, report.as_ptr(), 4, nu.as_mut_ptr(), 3, &mut nu_len, &mut n) };
    assert_eq!(st, ElicitStatus::Ok);
    assert!(nu.iter().zip([5.0, 3.0, 2.0]).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!((n - 10.0).abs() < 1e-12);

    // Agents at (5,3,2) and (1,4,1): pooled = (5,3,2) + (1,4,1) - (1,1,1).
    let mut both = [0.0; 8];
    unsafe {
        elicit_mechanism_elicit(m, [5.0, 3.0, 2.0].as_ptr(), 3, 0.0, both.as_mut_ptr(), 4, &mut len);
        elicit_mechanism_elicit(m, [1.0, 4.0, 1.0].as_ptr(), 3, 0.0, both.as_mut_ptr().add(4), 4, &mut len);
    }
    let st = unsafe { elicit_mechanism_aggregate(m, both.as_ptr(), 4, 2, nu.as_mut_ptr(), 3, &mut nu_len, &mut n) };
    assert_eq!(st, ElicitStatus::Ok);
    assert_eq!(nu, [5.0, 6.0, 2.0]);
    assert_eq!(n, 13.0);
    unsafe { elicit_mechanism_free(m) };
}

#[test]
fn moments_round_trip_for_poisson() {
    let m = mechanism(ElicitMechanismKind::SingleSampleMoments, ElicitFamily::Poisson, 0.0, &[1.0], 1.0);
    let (mut r, mut len) = ([0.0; 2], 0);
    assert_eq!(unsafe { elicit_mechanism_elicit(m, [7.0].as_ptr(), 1, 4.0, r.as_mut_ptr(), 2, &mut len) }, ElicitStatus::Ok);
    assert!((r[0] - 1.75).abs() < 1e-15);
    let (mut nu, mut n) = ([0.0], 0.0);
    assert_eq!(unsafe { elicit_mechanism_decode(m, r.as_ptr(), 2, nu.as_mut_ptr(), 1, &mut len, &mut n) }, ElicitStatus::Ok);
    assert!((nu[0] - 7.0).abs() < 1e-12 && (n - 4.0).abs() < 1e-12);
    unsafe { elicit_mechanism_free(m) };
}

#[test]
fn buffer_protocol_reports_required_length() {
    let m = mechanism(ElicitMechanismKind::TwoSampleDirichlet, ElicitFamily::Categorical, 3.0, &[1.0, 1.0, 1.0], 0.0);
    let mut len = 0;
    let st = unsafe { elicit_mechanism_elicit(m, [2.0, 2.0, 2.0].as_ptr(), 3, 0.0, ptr::null_mut(), 0, &mut len) };
    assert_eq!((st, len), (ElicitStatus::BufferTooSmall, 4));
    assert!(last_error().contains("need 4"));
    unsafe { elicit_mechanism_free(m) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut m = ptr::null_mut();
    let st = unsafe {
        elicit_mechanism_new(ElicitMechanismKind::SingleSampleMoments, ElicitFamily::Categorical, 3.0, [1.0; 3].as_ptr(), 3, 0.0, &mut m)
    };
    assert_eq!(st, ElicitStatus::Config);
    assert!(m.is_null());
    assert!(last_error().contains("unidentifiable"));

    let st = unsafe {
        elicit_mechanism_new(ElicitMechanismKind::TwoSampleDirichlet, ElicitFamily::Categorical, 2.5, [1.0; 3].as_ptr(), 3, 0.0, &mut m)
    };
    assert_eq!(st, ElicitStatus::InvalidArgument);

    let (mut a, mut len) = ([0.0; 3], 0);
    // b below |p|^2 is outside the reachable region.
    let st = unsafe { elicit_invert_two_sample([0.4, 0.4, 0.2].as_ptr(), 3, 0.3, a.as_mut_ptr(), 3, &mut len) };
    assert_eq!(st, ElicitStatus::InversionDomain);

    let mut b = 0.0;
    assert_eq!(unsafe { elicit_match_probability(ptr::null(), 2, &mut b) }, ElicitStatus::NullPointer);
    assert_eq!(unsafe { elicit_mechanism_elicit(ptr::null(), ptr::null(), 0, 1.0, ptr::null_mut(), 0, &mut len) }, ElicitStatus::NullPointer);

    assert_eq!(unsafe { elicit_match_probability([1.0, 1.0].as_ptr(), 2, &mut b) }, ElicitStatus::Ok);
    assert_eq!(b, 2.0 / 3.0);
    assert!(elicit_last_error_message().is_null());
}

#[test]
fn anchor_inversion() {
    let (mut a, mut len) = ([0.0; 3], 0);
    let st = unsafe { elicit_invert_two_sample([0.4, 0.4, 0.2].as_ptr(), 3, 0.36 + 0.64 / 21.0, a.as_mut_ptr(), 3, &mut len) };
    assert_eq!(st, ElicitStatus::Ok);
    assert!(a.iter().zip([8.0, 8.0, 4.0]).all(|(x, y)| (x - y).abs() < 1e-10));
}

const SCENARIO: &str = "[family]\nname = BernoulliBeta\n[prior]\nalpha = 1, 1\n[agents]\ncount = 2\nmin = 0\nmax = 6\n[mechanism]\nkind = TwoSampleDirichlet\n[run]\ntrials = 20\nseed = 3\n";

#[test]
fn scenario_runs_and_is_deterministic() {
    let text = CString::new(SCENARIO).unwrap();
    let run_once = |seed: u64| {
        let mut run = ptr::null_mut();
        assert_eq!(unsafe { elicit_run_scenario(text.as_ptr(), true, seed, &mut run) }, ElicitStatus::Ok);
        let (mut t, mut p, mut e) = (0, 0, 1.0);
        assert_eq!(unsafe { elicit_run_summary(run, &mut t, &mut p, &mut e) }, ElicitStatus::Ok);
        assert_eq!((t, p, e), (20, 20, 0.0));
        let recs = unsafe { CStr::from_ptr(elicit_run_records(run)) }.to_str().unwrap().to_owned();
        unsafe { elicit_run_free(run) };
        recs
    };
    let a = run_once(11);
    assert_eq!(a.lines().count(), 22);
    assert_eq!(a, run_once(11));
    assert_ne!(a, run_once(12));

    let bad = CString::new("[family]\nname = Nope\n").unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { elicit_run_scenario(bad.as_ptr(), false, 0, &mut run) }, ElicitStatus::Config);
    assert!(run.is_null());
}

/// The generated header compiles as C and C++.
#[test]
fn header_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let probe = tempfile_path("probe.c");
    std::fs::write(
        &probe,
        "#include \"elicit.h\"\nint main(void) { ElicitStatus s = ELICIT_STATUS_OK; ElicitMechanism *m = 0; (void)m; return (int)s; }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", &["-x", "c", "-std=c99"][..]), ("c++", &["-x", "c++"][..])] {
        let out = Command::new(compiler)
            .args(extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(format!("{dir}/include"))
            .arg(&probe)
            .output();
        match out {
            Ok(o) => assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr)),
            Err(e) => panic!("{compiler} not runnable: {e}"),
        }
    }
}

fn tempfile_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("elicit-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}
