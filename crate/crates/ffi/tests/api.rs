use std::ffi::{c_char, CStr, CString};
use std::ptr;

use permint_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let mut len = 0;
    unsafe {
        assert_eq!(pmi_last_error(buf.as_mut_ptr(), buf.len(), &mut len), PmiStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn parse(text: &str) -> *mut PmiFamily {
    let c = CString::new(text).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { pmi_family_parse(c.as_ptr(), &mut f) }, PmiStatus::Ok);
    f
}

#[test]
fn family_lifecycle() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pmi_family_empty(4, &mut f), PmiStatus::Ok);
        let id = [1u32, 2, 3, 4];
        let sw = [2u32, 1, 3, 4];
        assert_eq!(pmi_family_insert(f, id.as_ptr(), 4), PmiStatus::Ok);
        assert_eq!(pmi_family_insert(f, sw.as_ptr(), 4), PmiStatus::Ok);
        assert_eq!(pmi_family_insert(f, id.as_ptr(), 4), PmiStatus::Ok);
        let mut len = 0;
        assert_eq!(pmi_family_len(f, &mut len), PmiStatus::Ok);
        assert_eq!(len, 2);
        let mut got = [0u32; 4];
        assert_eq!(pmi_family_member(f, 1, got.as_mut_ptr(), 4), PmiStatus::Ok);
        assert_eq!(got, sw);
        assert_eq!(pmi_family_member(f, 2, got.as_mut_ptr(), 4), PmiStatus::InvalidArgument);
        assert_eq!(pmi_family_member(f, 0, got.as_mut_ptr(), 3), PmiStatus::BufferTooSmall);

        let mut text_len = 0;
        assert_eq!(pmi_family_emit(f, ptr::null_mut(), 0, &mut text_len), PmiStatus::BufferTooSmall);
        let mut buf = vec![0 as c_char; text_len + 1];
        assert_eq!(pmi_family_emit(f, buf.as_mut_ptr(), buf.len(), &mut text_len), PmiStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert_eq!(text, "n=4\n1 2 3 4\n2 1 3 4\n");

        let g = parse(text);
        let mut n = 0;
        assert_eq!(pmi_family_n(g, &mut n), PmiStatus::Ok);
        assert_eq!(n, 4);
        pmi_family_free(g);
        pmi_family_free(f);
        pmi_family_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pmi_family_full(9, &mut f), PmiStatus::Capacity);
        assert!(last_error().contains("n <= 8"));
        let bad = CString::new("n=3\n1 1 3\n").unwrap();
        assert_eq!(pmi_family_parse(bad.as_ptr(), &mut f), PmiStatus::Parse);
        assert!(last_error().contains("line 2"), "{}", last_error());
        assert_eq!(pmi_family_full(3, ptr::null_mut()), PmiStatus::NullPointer);
        let mut len = 0;
        assert_eq!(pmi_family_len(ptr::null(), &mut len), PmiStatus::NullPointer);
        assert_eq!(pmi_family_full(3, &mut f), PmiStatus::Ok);
        assert_eq!(last_error(), "");
        pmi_family_free(f);
    }
}

#[test]
fn predicates_and_search() {
    unsafe {
        let a = [1u32, 2, 3, 4];
        let b = [2u32, 1, 3, 4];
        let mut k = 0;
        assert_eq!(pmi_intersection_size(a.as_ptr(), b.as_ptr(), 4, &mut k), PmiStatus::Ok);
        assert_eq!(k, 2);

        let (ins, outs) = ([1u32, 2], [1u32, 2]);
        let mut u = ptr::null_mut();
        assert_eq!(pmi_family_umvirate(5, ins.as_ptr(), outs.as_ptr(), 2, &mut u), PmiStatus::Ok);
        let mut free = false;
        assert_eq!(pmi_is_cross_free(u, u, 2, &mut free), PmiStatus::Ok);
        assert!(free);
        assert_eq!(pmi_is_cross_free(u, u, 3, &mut free), PmiStatus::Ok);
        assert!(!free);
        pmi_family_free(u);

        let mut s = ptr::null_mut();
        assert_eq!(pmi_search(3, 3, true, 0, &mut s), PmiStatus::Ok);
        let (mut product, mut optimal) = (0u64, false);
        assert_eq!(pmi_search_product(s, &mut product, &mut optimal), PmiStatus::Ok);
        assert_eq!((product, optimal), (36, true));
        let (mut f, mut g) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(pmi_search_family(s, 0, &mut f), PmiStatus::Ok);
        assert_eq!(pmi_search_family(s, 1, &mut g), PmiStatus::Ok);
        assert_eq!(pmi_search_family(s, 2, &mut g), PmiStatus::InvalidArgument);
        assert_eq!(pmi_is_cross_free(f, g, 3, &mut free), PmiStatus::Ok);
        assert!(free);
        pmi_family_free(f);
        pmi_family_free(g);
        pmi_search_free(s);

        assert_eq!(pmi_search(5, 2, false, 1, &mut s), PmiStatus::Ok);
        assert_eq!(pmi_search_product(s, &mut product, &mut optimal), PmiStatus::Ok);
        assert!(product >= 36 && !optimal);
        pmi_search_free(s);
        assert_eq!(pmi_search(5, 2, true, 0, &mut s), PmiStatus::Capacity);
    }
}

#[test]
fn bounds_decomposition_coverage() {
    unsafe {
        let mut len = 0;
        assert_eq!(pmi_bounds_table(PmiTable::Main, 6, 2, 0, ptr::null_mut(), 0, &mut len), PmiStatus::BufferTooSmall);
        let mut buf = vec![0 as c_char; len + 1];
        assert_eq!(pmi_bounds_table(PmiTable::Main, 6, 2, 0, buf.as_mut_ptr(), buf.len(), &mut len), PmiStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("main_bound\tn=6 t=2 m=1\t144\t"));
        assert_eq!(pmi_bounds_table(PmiTable::Tightness, 5, 0, 0, buf.as_mut_ptr(), buf.len(), &mut len), PmiStatus::Domain);

        let (ins, outs) = ([1u32], [1u32]);
        let mut d = ptr::null_mut();
        assert_eq!(pmi_family_umvirate(3, ins.as_ptr(), outs.as_ptr(), 1, &mut d), PmiStatus::Ok);
        let mut w = [0.0f64; 3];
        assert_eq!(pmi_decompose_weights(d, w.as_mut_ptr(), 3, &mut len), PmiStatus::Ok);
        assert_eq!(len, 3);
        assert!((w[0] - 1.0 / 9.0).abs() < 1e-12 && (w[1] - 2.0 / 9.0).abs() < 1e-12 && w[2].abs() < 1e-12);
        pmi_family_free(d);

        let mut full = ptr::null_mut();
        assert_eq!(pmi_family_full(4, &mut full), PmiStatus::Ok);
        let mut c = PmiCoverage::default();
        assert_eq!(pmi_coverage(full, 4, 0.25, 100, 1, &mut c), PmiStatus::Ok);
        assert_eq!((c.hits, c.estimate), (100, 1.0));
        assert!(c.vacuous);
        assert_eq!(pmi_coverage(full, 4, 0.5, 100, 1, &mut c), PmiStatus::Domain);
        pmi_family_free(full);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(pmi_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
