//! Exercises the C ABI through its Rust symbols: status codes, out-pointer
//! contracts, handle lifetimes and error messages.

use std::ffi::{CStr, CString};
use std::ptr;

use qvakit_ffi::*;

fn last_error() -> String {
    let p = qva_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(qva_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn hamming_coefficient_values_and_errors() {
    let (mut re, mut im) = (0.0, 0.0);
    let s = unsafe { qva_hamming_coefficient(3, 5, 0, 0.0, &mut re, &mut im) };
    assert_eq!(s, QvaStatus::Ok);
    assert!((re - 1.0).abs() < 1e-15 && im.abs() < 1e-15);
    let direct = qvakit::metrics::hamming_coefficient(3, 5, 2, 0.7);
    unsafe { qva_hamming_coefficient(3, 5, 2, 0.7, &mut re, &mut im) };
    assert_eq!((re, im), (direct.re, direct.im));

    let s = unsafe { qva_hamming_coefficient(3, 5, 4, 0.7, &mut re, &mut im) };
    assert_eq!(s, QvaStatus::InvalidArgument);
    assert!(last_error().contains("d <= n"));
    let s = unsafe { qva_hamming_coefficient(3, 5, 1, 0.7, ptr::null_mut(), &mut im) };
    assert_eq!(s, QvaStatus::NullPointer);
}

#[test]
fn rank_unrank_round_trip() {
    let s = [2usize, 0, 1, 1, 0];
    let mut r = 0u64;
    assert_eq!(unsafe { qva_rank_in_multiset(s.as_ptr(), s.len(), &mut r) }, QvaStatus::Ok);
    let counts = [2usize, 2, 1];
    let mut out = [0usize; 5];
    let st = unsafe { qva_unrank_in_multiset(r, counts.as_ptr(), 3, out.as_mut_ptr(), 5) };
    assert_eq!(st, QvaStatus::Ok);
    assert_eq!(out, s);
    let mut short = [0usize; 2];
    let st = unsafe { qva_unrank_in_multiset(r, counts.as_ptr(), 3, short.as_mut_ptr(), 2) };
    assert_eq!(st, QvaStatus::BufferTooSmall);
    let st = unsafe { qva_unrank_in_multiset(30, counts.as_ptr(), 3, out.as_mut_ptr(), 5) };
    assert_eq!(st, QvaStatus::InvalidArgument);
}

#[test]
fn graph_handle_lifecycle() {
    let mut g: *mut QvaGraph = ptr::null_mut();
    assert_eq!(unsafe { qva_graph_complete(128, &mut g) }, QvaStatus::Ok);
    let (mut v, mut d, mut diam) = (0, 0, 0);
    assert_eq!(unsafe { qva_graph_stats(g, &mut v, &mut d, &mut diam) }, QvaStatus::Ok);
    assert_eq!((v, d, diam), (128, 127, 1));
    let (mut t, mut p, mut k) = (0.0, 0.0, 0);
    let st = unsafe { qva_graph_convergence_potential(g, 0, &mut t, &mut p, &mut k) };
    assert_eq!(st, QvaStatus::Ok);
    assert_eq!(k, 2);
    assert!((p - 0.069).abs() < 1e-3);
    unsafe { qva_graph_free(g) };
    unsafe { qva_graph_free(ptr::null_mut()) };

    let counts = [1usize, 5, 2];
    assert_eq!(
        unsafe { qva_graph_constrained_permutation(counts.as_ptr(), 3, &mut g) },
        QvaStatus::Ok
    );
    unsafe { qva_graph_stats(g, &mut v, &mut d, &mut diam) };
    assert_eq!((v, d, diam), (168, 17, 3));
    unsafe { qva_graph_free(g) };

    let sizes = [2usize, 3];
    assert_eq!(unsafe { qva_graph_kpartite(sizes.as_ptr(), 2, &mut g) }, QvaStatus::Ok);
    unsafe { qva_graph_stats(g, &mut v, &mut d, &mut diam) };
    assert_eq!((v, d), (5, 3));
    unsafe { qva_graph_free(g) };

    assert_eq!(unsafe { qva_graph_hamming(0, 3, &mut g) }, QvaStatus::InvalidArgument);
    assert!(!last_error().is_empty());
}

#[test]
fn ansatz_evaluate_matches_core() {
    let inst = CString::new("schedule_b").unwrap();
    let alg = CString::new("qmoa").unwrap();
    let mut a: *mut QvaAnsatz = ptr::null_mut();
    assert_eq!(unsafe { qva_ansatz_new(inst.as_ptr(), alg.as_ptr(), 2, &mut a) }, QvaStatus::Ok);
    let (mut dim, mut np) = (0, 0);
    unsafe { qva_ansatz_shape(a, &mut dim, &mut np) };
    assert_eq!((dim, np), (16384, 4));
    let theta = [0.3, 0.2, 0.5, 0.1];
    let (mut e, mut r) = (0.0, 0.0);
    let st = unsafe { qva_ansatz_evaluate(a, theta.as_ptr(), 4, &mut e, &mut r) };
    assert_eq!(st, QvaStatus::Ok);
    let core = qvakit::qva::Ansatz::pms(&qvakit::problems::schedule_b(), qvakit::qva::Algorithm::Qmoa, 2, false)
        .unwrap();
    assert_eq!(e, core.objective(&theta).unwrap());
    assert!((0.0..=1.0).contains(&r));

    let mut re = vec![0.0; dim];
    let mut im = vec![0.0; dim];
    let st = unsafe { qva_ansatz_evolve(a, theta.as_ptr(), 4, re.as_mut_ptr(), im.as_mut_ptr(), dim) };
    assert_eq!(st, QvaStatus::Ok);
    let n2: f64 = re.iter().zip(&im).map(|(x, y)| x * x + y * y).sum();
    assert!((n2 - 1.0).abs() < 1e-10);
    let st = unsafe { qva_ansatz_evolve(a, theta.as_ptr(), 4, re.as_mut_ptr(), im.as_mut_ptr(), 3) };
    assert_eq!(st, QvaStatus::BufferTooSmall);
    let st = unsafe { qva_ansatz_evaluate(a, theta.as_ptr(), 3, &mut e, &mut r) };
    assert_eq!(st, QvaStatus::InvalidArgument);
    unsafe { qva_ansatz_free(a) };

    let bad = CString::new("qwoa").unwrap();
    let st = unsafe { qva_ansatz_new(inst.as_ptr(), bad.as_ptr(), 1, &mut a) };
    assert_eq!(st, QvaStatus::InvalidArgument);
    assert!(last_error().contains("scheduling"));
}

#[test]
fn header_declares_every_symbol() {
    let header = include_str!("../include/qvakit.h");
    for sym in [
        "qva_last_error_message",
        "qva_version",
        "qva_hamming_coefficient",
        "qva_rank_in_multiset",
        "qva_unrank_in_multiset",
        "qva_graph_hamming",
        "qva_graph_complete",
        "qva_graph_constrained_permutation",
        "qva_graph_kpartite",
        "qva_graph_free",
        "qva_graph_stats",
        "qva_graph_convergence_potential",
        "qva_ansatz_new",
        "qva_ansatz_free",
        "qva_ansatz_shape",
        "qva_ansatz_evaluate",
        "qva_ansatz_evolve",
        "typedef struct QvaGraph QvaGraph",
        "QVA_STATUS_BUFFER_TOO_SMALL = 4",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    use std::path::PathBuf;
    use std::process::Command;

    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test-binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libqvakit_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = std::env::temp_dir().join(format!("qvakit_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(format!("-I{}", root.join("include").display()))
        .arg(root.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler named cc on PATH");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "smoke program exited with {:?}", run.status);
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "125 12 3");
}
