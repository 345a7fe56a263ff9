//! C ABI over `permint`.
//!
//! Every entry point returns a [`PmiStatus`]; results come back through
//! out-pointers. Families and search results are opaque heap handles that
//! the caller releases with the matching `*_free`. The message for the most
//! recent failure on the calling thread is available from
//! [`pmi_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use permint::bounds;
use permint::cli::{emit_family, parse_family};
use permint::extremal::{self, SearchResult, SearchStatus};
use permint::perm_core::{intersection_size, is_cross_free, umvirate, PermFamily, Permutation};
use permint::spectral::{decompose, SnFunction};
use permint::spread;
use permint::Error;

/// Outcome of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Capacity = 4,
    Parse = 5,
    EmptyFamily = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

/// Which table [`pmi_bounds_table`] renders.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmiTable {
    Main = 0,
    Tightness = 1,
    Stability = 2,
    Agreement = 3,
    FixedPoints = 4,
    Constructions = 5,
}

/// A family of permutations of `S_n`, `n ≤ 8`.
pub struct PmiFamily(PermFamily);

/// The pair and value found by [`pmi_search`].
pub struct PmiSearch(SearchResult);

/// Monte Carlo coverage of an embedded family.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PmiCoverage {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub r: f64,
    /// Meaningful only when `bound_defined`.
    pub theorem_bound: f64,
    pub bound_defined: bool,
    pub vacuous: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> PmiStatus {
    match e {
        Error::Dimension { .. } | Error::Pattern(_) | Error::Numeric(_) => PmiStatus::InvalidArgument,
        Error::Domain(_) => PmiStatus::Domain,
        Error::Capacity { .. } => PmiStatus::Capacity,
        Error::Parse { .. } => PmiStatus::Parse,
        Error::EmptyFamily(_) => PmiStatus::EmptyFamily,
        Error::Io(_) | Error::Invariant(_) => PmiStatus::Internal,
    }
}

struct Fail(PmiStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

fn null(what: &str) -> Fail {
    Fail(PmiStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> FfiResult) -> PmiStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PmiStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PmiStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> FfiResult {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn family<'a>(f: *const PmiFamily, what: &str) -> Result<&'a PermFamily, Fail> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| null(what))
}

unsafe fn ints<'a>(p: *const u32, len: usize, what: &str) -> Result<&'a [u32], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn to_usize(v: &[u32]) -> Vec<usize> {
    v.iter().map(|&x| x as usize).collect()
}

fn new_handle(out: *mut *mut PmiFamily, f: PermFamily) -> FfiResult {
    unsafe { write_out(out, Box::into_raw(Box::new(PmiFamily(f))), "out") }
}

/// Copies `text` plus a NUL into `buf`. `*len` receives the text length
/// even when `buf` is too small (or null with `cap == 0`), so callers can
/// size a second attempt.
unsafe fn write_text(text: &str, buf: *mut c_char, cap: usize, len: *mut usize) -> FfiResult {
    write_out(len, text.len(), "len")?;
    if cap < text.len() + 1 {
        return Err(Fail(PmiStatus::BufferTooSmall, format!("need {} bytes", text.len() + 1)));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    buf.add(text.len()).write(0);
    Ok(())
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pmi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf`
/// (see the buffer convention on [`pmi_bounds_table`]).
///
/// # Safety
/// `buf` must be writable for `cap` bytes; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_last_error(buf: *mut c_char, cap: usize, len: *mut usize) -> PmiStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match catch_unwind(AssertUnwindSafe(|| write_text(&msg, buf, cap, len))) {
        Ok(Ok(())) => PmiStatus::Ok,
        Ok(Err(Fail(s, _))) => s,
        Err(_) => PmiStatus::Panic,
    }
}

/// The empty family on `S_n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_empty(n: usize, out: *mut *mut PmiFamily) -> PmiStatus {
    guard(|| new_handle(out, PermFamily::empty(n)?))
}

/// All of `S_n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_full(n: usize, out: *mut *mut PmiFamily) -> PmiStatus {
    guard(|| new_handle(out, PermFamily::full(n)?))
}

/// The umvirate sending `inputs[k]` to `outputs[k]` for `k < len`.
///
/// # Safety
/// `inputs` and `outputs` must be readable for `len` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_umvirate(
    n: usize,
    inputs: *const u32,
    outputs: *const u32,
    len: usize,
    out: *mut *mut PmiFamily,
) -> PmiStatus {
    guard(|| {
        let i = to_usize(ints(inputs, len, "inputs")?);
        let o = to_usize(ints(outputs, len, "outputs")?);
        new_handle(out, umvirate(n, &i, &o)?)
    })
}

/// Parses the text or JSON family format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_parse(text: *const c_char, out: *mut *mut PmiFamily) -> PmiStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(PmiStatus::InvalidArgument, format!("text is not UTF-8: {e}")))?;
        new_handle(out, parse_family(s)?)
    })
}

/// Renders a family in the text format.
///
/// # Safety
/// `f` must be a live handle; `buf` writable for `cap` bytes; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_emit(f: *const PmiFamily, buf: *mut c_char, cap: usize, len: *mut usize) -> PmiStatus {
    guard(|| write_text(&emit_family(family(f, "family")?), buf, cap, len))
}

/// Adds the permutation with one-based `images[0..n]`.
///
/// # Safety
/// `f` must be a live handle; `images` readable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_insert(f: *mut PmiFamily, images: *const u32, n: usize) -> PmiStatus {
    guard(|| {
        let fam = f.as_mut().ok_or_else(|| null("family"))?;
        let p = Permutation::new(to_usize(ints(images, n, "images")?))?;
        fam.0 = fam.0.union(&PermFamily::from_perms(fam.0.n(), [&p])?)?;
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_len(f: *const PmiFamily, out: *mut usize) -> PmiStatus {
    guard(|| write_out(out, family(f, "family")?.len(), "out"))
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_n(f: *const PmiFamily, out: *mut usize) -> PmiStatus {
    guard(|| write_out(out, family(f, "family")?.n(), "out"))
}

/// Writes the `index`-th member (rank order) into `images[0..n]`.
///
/// # Safety
/// `f` must be a live handle; `images` writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_member(f: *const PmiFamily, index: usize, images: *mut u32, cap: usize) -> PmiStatus {
    guard(|| {
        let fam = family(f, "family")?;
        let p = fam
            .iter()
            .nth(index)
            .ok_or_else(|| Fail(PmiStatus::InvalidArgument, format!("index {index} >= {}", fam.len())))?;
        if cap < p.n() {
            return Err(Fail(PmiStatus::BufferTooSmall, format!("need {} slots", p.n())));
        }
        if images.is_null() {
            return Err(null("images"));
        }
        for (k, &v) in p.images().iter().enumerate() {
            images.add(k).write(v as u32);
        }
        Ok(())
    })
}

/// Releases a family; null is ignored.
///
/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pmi_family_free(f: *mut PmiFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of positions where two permutations of `S_n` agree.
///
/// # Safety
/// `a` and `b` readable for `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_intersection_size(a: *const u32, b: *const u32, n: usize, out: *mut usize) -> PmiStatus {
    guard(|| {
        let pa = Permutation::new(to_usize(ints(a, n, "a")?))?;
        let pb = Permutation::new(to_usize(ints(b, n, "b")?))?;
        write_out(out, intersection_size(&pa, &pb)?, "out")
    })
}

/// Whether no `σ ∈ F`, `τ ∈ G` agree on exactly `t − 1` positions.
///
/// # Safety
/// `f`, `g` live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_is_cross_free(f: *const PmiFamily, g: *const PmiFamily, t: usize, out: *mut bool) -> PmiStatus {
    guard(|| write_out(out, is_cross_free(family(f, "f")?, family(g, "g")?, t)?, "out"))
}

/// Maximizes `|F||G|` over cross-free pairs: exhaustively when `exact`
/// (`n ≤ 4`), otherwise by branch and bound within `budget` nodes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_search(n: usize, t: usize, exact: bool, budget: u64, out: *mut *mut PmiSearch) -> PmiStatus {
    guard(|| {
        let r = if exact { extremal::exact_max_product(n, t)? } else { extremal::bb_max_product(n, t, budget)? };
        write_out(out, Box::into_raw(Box::new(PmiSearch(r))), "out")
    })
}

/// `|F||G|`, and whether it is certified optimal.
///
/// # Safety
/// `s` a live handle; `product` and `optimal` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_search_product(s: *const PmiSearch, product: *mut u64, optimal: *mut bool) -> PmiStatus {
    guard(|| {
        let r = &s.as_ref().ok_or_else(|| null("search"))?.0;
        write_out(product, r.product, "product")?;
        write_out(optimal, r.status == SearchStatus::ExactOptimal, "optimal")
    })
}

/// A new handle holding `F` (`which == 0`) or `G` (`which == 1`).
///
/// # Safety
/// `s` a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_search_family(s: *const PmiSearch, which: u32, out: *mut *mut PmiFamily) -> PmiStatus {
    guard(|| {
        let r = &s.as_ref().ok_or_else(|| null("search"))?.0;
        let f = match which {
            0 => r.f.clone(),
            1 => r.g.clone(),
            _ => return Err(Fail(PmiStatus::InvalidArgument, format!("which = {which} is not 0 or 1"))),
        };
        new_handle(out, f)
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pmi_search_free(s: *mut PmiSearch) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Renders a bound table as TSV (`label, params, value, log2`) with exact
/// values. `t` and `r` are read only by the tables that need them.
///
/// Buffer convention: `*len` always receives the text length; the text is
/// written with a trailing NUL only when `cap > len`, otherwise the status
/// is `BufferTooSmall`.
///
/// # Safety
/// `buf` writable for `cap` bytes; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_bounds_table(
    table: PmiTable,
    n: usize,
    t: usize,
    r: usize,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> PmiStatus {
    guard(|| {
        let tab = match table {
            PmiTable::Main => bounds::main_table(n, t)?,
            PmiTable::Tightness => bounds::tightness_table(n)?,
            PmiTable::Stability => bounds::stability_table(n, t)?,
            PmiTable::Agreement => bounds::agreement_table(n, r)?,
            PmiTable::FixedPoints => bounds::fixed_points_table(n)?,
            PmiTable::Constructions => bounds::constructions_table(n)?,
        };
        let text: String =
            tab.rows.iter().map(|row| format!("{}\t{}\t{}\t{:.6}\n", row.label, row.params, row.value, row.log2)).collect();
        write_text(&text, buf, cap, len)
    })
}

/// Level weights `‖f^{=d}‖²` of the family's indicator, `d = 0..n−1`.
/// `*len` receives `n`; weights are written when `cap ≥ n`.
///
/// # Safety
/// `f` a live handle; `weights` writable for `cap` values; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_decompose_weights(f: *const PmiFamily, weights: *mut f64, cap: usize, len: *mut usize) -> PmiStatus {
    guard(|| {
        let dec = decompose(&SnFunction::indicator(family(f, "family")?))?;
        write_out(len, dec.weights.len(), "len")?;
        if cap < dec.weights.len() {
            return Err(Fail(PmiStatus::BufferTooSmall, format!("need {} slots", dec.weights.len())));
        }
        if weights.is_null() {
            return Err(null("weights"));
        }
        ptr::copy_nonoverlapping(dec.weights.as_ptr(), weights, dec.weights.len());
        Ok(())
    })
}

/// Coverage of the embedded family by `(m·delta)`-random subsets, with
/// depth-3 spreadness feeding the bound.
///
/// # Safety
/// `f` a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmi_coverage(
    f: *const PmiFamily,
    m: usize,
    delta: f64,
    samples: u64,
    seed: u64,
    out: *mut PmiCoverage,
) -> PmiStatus {
    guard(|| {
        let c = spread::embed(family(f, "family")?)?;
        let e = spread::coverage_mc(&c, m, delta, samples, seed)?;
        let cov = PmiCoverage {
            samples: e.samples,
            hits: e.hits,
            estimate: e.estimate,
            std_error: e.std_error,
            r: e.r,
            theorem_bound: e.theorem_bound.unwrap_or(f64::NAN),
            bound_defined: e.theorem_bound.is_some(),
            vacuous: e.vacuous,
        };
        write_out(out, cov, "out")
    })
}
