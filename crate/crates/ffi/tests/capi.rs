use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use optfprl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { optfprl_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|c| *c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn new_learner(kind: OptfprlSetKind, dim: usize, extent: &[f64], strategy: OptfprlStrategy) -> *mut OptfprlLearner {
    let pred = vec![0.0; dim];
    let mut h = ptr::null_mut();
    let st = unsafe {
        optfprl_learner_new(kind, dim, extent.as_ptr(), strategy, 0.0, 1, pred.as_ptr(), &mut h)
    };
    assert_eq!(st, OptfprlStatus::Ok, "{}", last_error());
    assert!(!h.is_null());
    h
}

#[test]
fn trap_instance_through_the_c_interface() {
    // interval [-2, 2], zero predictions, three slots of -1 then +1
    let h = new_learner(OptfprlSetKind::Ball, 1, &[2.0], OptfprlStrategy::Agnostic);
    let mut x = [f64::NAN];
    unsafe {
        assert_eq!(optfprl_learner_iterate(h, 1, x.as_mut_ptr()), OptfprlStatus::Ok);
    }
    assert_eq!(x, [0.0]);
    let mut info = OptfprlStepInfo::default();
    let mut sigma_prev = 0.0;
    for t in 1..=12 {
        let c = [if t <= 3 { -1.0 } else { 1.0 }];
        let st = unsafe {
            optfprl_learner_step(h, 1, c.as_ptr(), [0.0].as_ptr(), ptr::null(), x.as_mut_ptr(), &mut info)
        };
        assert_eq!(st, OptfprlStatus::Ok);
        assert_eq!(info.slot, t);
        assert!(info.state_norm <= 2.0 * sigma_prev + info.epsilon + 1e-9);
        assert!(x[0].abs() <= 2.0);
        assert!(info.delta < 0.0);
        sigma_prev = info.sigma_cum;
    }
    unsafe { optfprl_learner_free(h) };
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    let mut h = ptr::null_mut();
    let pred = [0.0; 2];
    let st = unsafe {
        optfprl_learner_new(OptfprlSetKind::Ball, 2, [-1.0].as_ptr(), OptfprlStrategy::Agnostic, 0.0, 1, pred.as_ptr(), &mut h)
    };
    assert_eq!(st, OptfprlStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("radius"));

    let st = unsafe {
        optfprl_learner_new(OptfprlSetKind::Box, 2, ptr::null(), OptfprlStrategy::Recursive, 0.0, 1, pred.as_ptr(), &mut h)
    };
    assert_eq!(st, OptfprlStatus::NullPointer);

    let st = unsafe {
        optfprl_learner_new(OptfprlSetKind::Box, 2, [1.0, 1.0].as_ptr(), OptfprlStrategy::Agnostic, 0.0, 0, pred.as_ptr(), &mut h)
    };
    assert_eq!(st, OptfprlStatus::InvalidArgument);

    let h = new_learner(OptfprlSetKind::Box, 2, &[1.0, 0.5], OptfprlStrategy::ObservedPath);
    let c = [1.0, -1.0];
    let st = unsafe { optfprl_learner_step(h, 3, c.as_ptr(), c.as_ptr(), ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, OptfprlStatus::DimensionMismatch);
    let st = unsafe { optfprl_learner_step(h, 2, c.as_ptr(), c.as_ptr(), ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, OptfprlStatus::InvalidArgument);
    assert!(last_error().contains("comparator"));
    let u = [-1.0, 0.5];
    let st = unsafe { optfprl_learner_step(h, 2, c.as_ptr(), c.as_ptr(), u.as_ptr(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, OptfprlStatus::Ok);
    unsafe { optfprl_learner_free(h) };
    unsafe { optfprl_learner_free(ptr::null_mut()) };

    let n = unsafe { optfprl_last_error_message(ptr::null_mut(), 0) };
    assert!(n > 0);
}

#[test]
fn run_to_csv_matches_for_identical_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CString::new("scenario=2\nalgo=optfprl\nstrategy=known-path\nhorizon=300\ndim=3\n").unwrap();
    let write = |name: &str| {
        let path = dir.path().join(name);
        let p = CString::new(path.to_str().unwrap()).unwrap();
        let st = unsafe { optfprl_run_to_csv(cfg.as_ptr(), p.as_ptr()) };
        assert_eq!(st, OptfprlStatus::Ok, "{}", last_error());
        std::fs::read(path).unwrap()
    };
    let a = write("a.csv");
    assert_eq!(a, write("b.csv"));
    assert!(String::from_utf8(a).unwrap().contains("# strategy=known-path"));

    let bad = CString::new("scenario=2\ncolour=red\n").unwrap();
    let out = CString::new(dir.path().join("c.csv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { optfprl_run_to_csv(bad.as_ptr(), out.as_ptr()) }, OptfprlStatus::InvalidArgument);
    assert_eq!(unsafe { optfprl_run_to_csv(ptr::null(), out.as_ptr()) }, OptfprlStatus::NullPointer);
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"optfprl.h\"\n\
         int main(void) {\n\
           OptfprlLearner *h = 0; double r = 1.0, p[2] = {0, 0};\n\
           OptfprlStatus s = optfprl_learner_new(OPTFPRL_SET_KIND_BALL, 2, &r, OPTFPRL_STRATEGY_AGNOSTIC, 0.0, 1, p, &h);\n\
           OptfprlStepInfo info; (void)info; optfprl_learner_free(h);\n\
           return s == OPTFPRL_STATUS_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let out = Command::new(compiler)
            .args(&extra)
            .args(["-Wall", "-Werror", "-fsyntax-only", "-I"])
            .arg(&include)
            .arg(&src)
            .output()
            .expect("system compiler available");
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
