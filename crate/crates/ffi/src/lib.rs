//! C ABI over the `tesalocs` crate.
//!
//! Conventions:
//!
//! - Every function returns a [`TesalocsStatus`]; results go through out
//!   pointers. On failure a message is available from
//!   [`tesalocs_last_error_message`] on the same thread.
//! - Models and search spaces are opaque handles created by `*_new*` and
//!   released by the matching `*_free`. Freeing NULL is a no-op.
//! - Strings returned to the caller are released with [`tesalocs_string_free`].
//! - Panics never cross the boundary; they surface as `TESALOCS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::OnceLock;

use tesalocs::benchmarks::{self, Benchmark};
use tesalocs::driver::{self, TesalocsConfig};
use tesalocs::learner::{self, LearnerConfig, OptimizerKind};
use tesalocs::local::LocalMethod;
use tesalocs::{Error, SearchSpace, TtDistribution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TesalocsStatus {
    Ok = 0,
    InvalidArgument = 1,
    IndexOutOfRange = 2,
    DimensionMismatch = 3,
    DegenerateModel = 4,
    ModelCorruption = 5,
    BudgetExhausted = 6,
    EmptyElites = 7,
    UnknownFunction = 8,
    Io = 9,
    Serialization = 10,
    NullPointer = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TesalocsLocalMethod {
    Bfgs = 0,
    Cg = 1,
    Pso = 2,
    Spsa = 3,
    None = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TesalocsOptimizer {
    PlainSgd = 0,
    AdaptiveMoment = 1,
}

/// Opaque tensor-train model.
pub struct TesalocsModel(TtDistribution);

/// Opaque search box with its grid.
pub struct TesalocsSpace(SearchSpace);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TesalocsLearnerConfig {
    pub learning_rate: f64,
    pub steps_per_iteration: usize,
    pub clamp_floor: f64,
    pub optimizer: TesalocsOptimizer,
}

/// Settings for [`tesalocs_minimize`]. `max_evals_per_candidate == 0`
/// selects the budget-derived default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TesalocsRunConfig {
    pub budget: usize,
    pub rank: usize,
    pub batch: usize,
    pub elite: usize,
    pub learner: TesalocsLearnerConfig,
    pub method: TesalocsLocalMethod,
    pub max_evals_per_candidate: usize,
    pub seed: u64,
}

/// Best point of a finished run. `x` must hold `dim` values.
#[repr(C)]
#[derive(Debug)]
pub struct TesalocsRunResult {
    pub x: *mut f64,
    pub dim: usize,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

/// Objective callback: `f(x, dim, user_data)`.
pub type TesalocsObjective = Option<unsafe extern "C" fn(*const f64, usize, *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TesalocsStatus {
    match e {
        Error::InvalidArgument(_) => TesalocsStatus::InvalidArgument,
        Error::IndexOutOfRange { .. } => TesalocsStatus::IndexOutOfRange,
        Error::DimensionMismatch { .. } => TesalocsStatus::DimensionMismatch,
        Error::DegenerateModel(_) => TesalocsStatus::DegenerateModel,
        Error::ModelCorruption(_) => TesalocsStatus::ModelCorruption,
        Error::BudgetExhausted => TesalocsStatus::BudgetExhausted,
        Error::EmptyElites => TesalocsStatus::EmptyElites,
        Error::UnknownFunction(_) => TesalocsStatus::UnknownFunction,
        Error::Io(_) => TesalocsStatus::Io,
        Error::Serialization(_) => TesalocsStatus::Serialization,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TesalocsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            TesalocsStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            TesalocsStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            TesalocsStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &'static str) -> Result<*const T, Failure> {
    if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(p)
    }
}

fn non_null_mut<T>(p: *mut T, what: &'static str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(p)
    }
}

/// Borrow `len` elements; a zero length accepts any pointer.
unsafe fn view<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    Ok(slice::from_raw_parts(non_null(p, what)?, len))
}

unsafe fn view_mut<'a, T>(
    p: *mut T,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    Ok(slice::from_raw_parts_mut(non_null_mut(p, what)?, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    let s = CStr::from_ptr(non_null(p, what)?);
    s.to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("{what} is not valid UTF-8"))))
}

fn check_dim(expected: usize, actual: usize) -> Result<(), Failure> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual }.into());
    }
    Ok(())
}

impl From<TesalocsLocalMethod> for LocalMethod {
    fn from(m: TesalocsLocalMethod) -> Self {
        match m {
            TesalocsLocalMethod::Bfgs => LocalMethod::Bfgs,
            TesalocsLocalMethod::Cg => LocalMethod::Cg,
            TesalocsLocalMethod::Pso => LocalMethod::Pso,
            TesalocsLocalMethod::Spsa => LocalMethod::Spsa,
            TesalocsLocalMethod::None => LocalMethod::None,
        }
    }
}

impl From<TesalocsLearnerConfig> for LearnerConfig {
    fn from(c: TesalocsLearnerConfig) -> Self {
        LearnerConfig {
            learning_rate: c.learning_rate,
            steps_per_iteration: c.steps_per_iteration,
            clamp_floor: c.clamp_floor,
            optimizer: match c.optimizer {
                TesalocsOptimizer::PlainSgd => OptimizerKind::PlainSgd,
                TesalocsOptimizer::AdaptiveMoment => OptimizerKind::AdaptiveMoment,
            },
        }
    }
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the full message length in
/// bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be writable for `len` bytes, or NULL with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn tesalocs_learner_config_default() -> TesalocsLearnerConfig {
    let c = LearnerConfig::default();
    TesalocsLearnerConfig {
        learning_rate: c.learning_rate,
        steps_per_iteration: c.steps_per_iteration,
        clamp_floor: c.clamp_floor,
        optimizer: match c.optimizer {
            OptimizerKind::PlainSgd => TesalocsOptimizer::PlainSgd,
            OptimizerKind::AdaptiveMoment => TesalocsOptimizer::AdaptiveMoment,
        },
    }
}

#[no_mangle]
pub extern "C" fn tesalocs_run_config_default() -> TesalocsRunConfig {
    let c = TesalocsConfig::default();
    TesalocsRunConfig {
        budget: c.budget,
        rank: c.rank,
        batch: c.batch,
        elite: c.elite,
        learner: tesalocs_learner_config_default(),
        method: TesalocsLocalMethod::Bfgs,
        max_evals_per_candidate: 0,
        seed: c.seed,
    }
}

// ---- models ----

/// Random non-negative model with `d` modes of size `n` and inner ranks `r`.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_new_random(
    d: usize,
    n: usize,
    r: usize,
    seed: u64,
    out: *mut *mut TesalocsModel,
) -> TesalocsStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        let t = TtDistribution::init_random(d, n, r, seed)?;
        *out = Box::into_raw(Box::new(TesalocsModel(t)));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_free(model: *mut TesalocsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_ndim(
    model: *const TesalocsModel,
    out: *mut usize,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        *non_null_mut(out, "out")? = m.0.ndim();
        Ok(())
    })
}

/// Unnormalized value at a multi-index of length `d`.
///
/// # Safety
/// `idx` must hold `d` values; `model` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_eval(
    model: *const TesalocsModel,
    idx: *const usize,
    d: usize,
    out: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        let idx = view(idx, d, "idx")?;
        *non_null_mut(out, "out")? = m.0.eval(idx)?;
        Ok(())
    })
}

/// Normalized log-probability of a multi-index.
///
/// # Safety
/// As [`tesalocs_model_eval`].
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_log_prob(
    model: *const TesalocsModel,
    idx: *const usize,
    d: usize,
    out: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        let idx = view(idx, d, "idx")?;
        *non_null_mut(out, "out")? = learner::log_prob(&m.0, idx)?;
        Ok(())
    })
}

/// # Safety
/// `model` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_log_mass(
    model: *const TesalocsModel,
    out: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        *non_null_mut(out, "out")? = m.0.log_mass()?;
        Ok(())
    })
}

/// Draws `k` multi-indices into `out`, row-major `k x d`.
///
/// # Safety
/// `out` must be writable for `k * d` values.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_sample(
    model: *const TesalocsModel,
    k: usize,
    seed: u64,
    out: *mut usize,
    out_len: usize,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        let d = m.0.ndim();
        check_dim(k * d, out_len)?;
        let out = view_mut(out, out_len, "out")?;
        let batch = tesalocs::sample(&m.0, k, seed)?;
        for (dst, idx) in out.chunks_exact_mut(d).zip(&batch.indices) {
            dst.copy_from_slice(idx);
        }
        Ok(())
    })
}

/// One learner update toward `count` elite multi-indices, row-major
/// `count x d`. Optimizer state does not persist between calls.
///
/// # Safety
/// `elites` must hold `count * d` values; `cfg` must be readable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_update(
    model: *mut TesalocsModel,
    elites: *const usize,
    count: usize,
    d: usize,
    cfg: *const TesalocsLearnerConfig,
) -> TesalocsStatus {
    guard(|| {
        let m = &mut *non_null_mut(model, "model")?;
        let cfg: LearnerConfig = (*non_null(cfg, "cfg")?).into();
        check_dim(m.0.ndim(), d)?;
        let flat = view(elites, count * d, "elites")?;
        let elites: Vec<Vec<usize>> = flat.chunks_exact(d.max(1)).map(<[usize]>::to_vec).collect();
        let mut learner = tesalocs::Learner::new(cfg)?;
        learner.update(&mut m.0, &elites)?;
        Ok(())
    })
}

/// Serializes the model; free the result with [`tesalocs_string_free`].
///
/// # Safety
/// `model` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_to_json(
    model: *const TesalocsModel,
    out: *mut *mut c_char,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        let out = non_null_mut(out, "out")?;
        let json = m.0.to_json()?;
        *out = CString::new(json)
            .map_err(|_| Error::InvalidArgument("interior NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_from_json(
    json: *const c_char,
    out: *mut *mut TesalocsModel,
) -> TesalocsStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        let out = non_null_mut(out, "out")?;
        *out = Box::into_raw(Box::new(TesalocsModel(TtDistribution::from_json(text)?)));
        Ok(())
    })
}

/// # Safety
/// `model` live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_save(
    model: *const TesalocsModel,
    path: *const c_char,
) -> TesalocsStatus {
    guard(|| {
        let m = &*non_null(model, "model")?;
        m.0.save(c_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_model_load(
    path: *const c_char,
    out: *mut *mut TesalocsModel,
) -> TesalocsStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let out = non_null_mut(out, "out")?;
        *out = Box::into_raw(Box::new(TesalocsModel(TtDistribution::load(path)?)));
        Ok(())
    })
}

// ---- search spaces ----

/// Box `[lower_i, upper_i]` with `nodes_i` grid nodes per dimension.
///
/// # Safety
/// The three arrays must hold `d` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_space_new(
    d: usize,
    lower: *const f64,
    upper: *const f64,
    nodes: *const usize,
    out: *mut *mut TesalocsSpace,
) -> TesalocsStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        let s = SearchSpace::new(
            view(lower, d, "lower")?.to_vec(),
            view(upper, d, "upper")?.to_vec(),
            view(nodes, d, "nodes")?.to_vec(),
        )?;
        *out = Box::into_raw(Box::new(TesalocsSpace(s)));
        Ok(())
    })
}

/// Same box and node count in every dimension.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_space_uniform(
    d: usize,
    lower: f64,
    upper: f64,
    nodes: usize,
    out: *mut *mut TesalocsSpace,
) -> TesalocsStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        *out = Box::into_raw(Box::new(TesalocsSpace(SearchSpace::uniform(
            d, lower, upper, nodes,
        )?)));
        Ok(())
    })
}

/// # Safety
/// `space` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_space_free(space: *mut TesalocsSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Multi-index to point.
///
/// # Safety
/// `idx` and `x` must hold `d` values.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_space_to_point(
    space: *const TesalocsSpace,
    idx: *const usize,
    d: usize,
    x: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let s = &*non_null(space, "space")?;
        check_dim(s.0.dim(), d)?;
        let p = s.0.to_point(view(idx, d, "idx")?)?;
        view_mut(x, d, "x")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Point to nearest multi-index (clamped into the grid).
///
/// # Safety
/// `x` and `idx` must hold `d` values.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_space_to_index(
    space: *const TesalocsSpace,
    x: *const f64,
    d: usize,
    idx: *mut usize,
) -> TesalocsStatus {
    guard(|| {
        let s = &*non_null(space, "space")?;
        check_dim(s.0.dim(), d)?;
        let n = s.0.to_index(view(x, d, "x")?)?;
        view_mut(idx, d, "idx")?.copy_from_slice(&n);
        Ok(())
    })
}

// ---- benchmarks ----

fn catalog_names() -> &'static [(Benchmark, CString)] {
    static NAMES: OnceLock<Vec<(Benchmark, CString)>> = OnceLock::new();
    NAMES.get_or_init(|| {
        benchmarks::catalog()
            .into_iter()
            .map(|b| {
                let c = CString::new(b.name()).expect("names have no NUL");
                (b, c)
            })
            .collect()
    })
}

#[no_mangle]
pub extern "C" fn tesalocs_benchmark_count() -> usize {
    catalog_names().len()
}

/// Static name of benchmark `i`, or NULL when out of range. Do not free.
#[no_mangle]
pub extern "C" fn tesalocs_benchmark_name(i: usize) -> *const c_char {
    catalog_names()
        .get(i)
        .map_or(ptr::null(), |(_, c)| c.as_ptr())
}

unsafe fn find_benchmark(name: *const c_char) -> Result<Benchmark, Failure> {
    Ok(benchmarks::lookup(c_str(name, "name")?)?)
}

/// # Safety
/// `name` NUL-terminated; `x` holds `d` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_benchmark_eval(
    name: *const c_char,
    x: *const f64,
    d: usize,
    out: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let b = find_benchmark(name)?;
        let x = view(x, d, "x")?;
        *non_null_mut(out, "out")? = b.evaluate(x, d)?;
        Ok(())
    })
}

/// Default box and known minimum at dimension `d`.
///
/// # Safety
/// `name` NUL-terminated; the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_benchmark_info(
    name: *const c_char,
    d: usize,
    lower: *mut f64,
    upper: *mut f64,
    min_value: *mut f64,
) -> TesalocsStatus {
    guard(|| {
        let b = find_benchmark(name)?;
        let (a, hi) = b.bounds(d);
        *non_null_mut(lower, "lower")? = a;
        *non_null_mut(upper, "upper")? = hi;
        *non_null_mut(min_value, "min_value")? = b.min_value(d);
        Ok(())
    })
}

// ---- optimization ----

fn to_config(c: &TesalocsRunConfig, space: &SearchSpace) -> Result<TesalocsConfig, Failure> {
    let nodes = space.nodes();
    let n = nodes.first().copied().unwrap_or(0);
    if nodes.iter().any(|&m| m != n) {
        return Err(Error::InvalidArgument(
            "the optimizer needs the same node count in every dimension".into(),
        )
        .into());
    }
    let mut cfg = TesalocsConfig {
        budget: c.budget,
        grid_nodes: n,
        rank: c.rank,
        batch: c.batch,
        elite: c.elite,
        learner: c.learner.into(),
        seed: c.seed,
        ..Default::default()
    };
    cfg.local.method = c.method.into();
    cfg.local.max_evals_per_candidate =
        (c.max_evals_per_candidate > 0).then_some(c.max_evals_per_candidate);
    Ok(cfg)
}

unsafe fn minimize_with(
    baseline: bool,
    f: TesalocsObjective,
    user_data: *mut c_void,
    space: *const TesalocsSpace,
    cfg: *const TesalocsRunConfig,
    result: *mut TesalocsRunResult,
) -> TesalocsStatus {
    guard(|| {
        let f = f.ok_or(Failure::Null("objective"))?;
        let s = &(*non_null(space, "space")?).0;
        let cfg = to_config(&*non_null(cfg, "cfg")?, s)?;
        let result = &mut *non_null_mut(result, "result")?;
        check_dim(s.dim(), result.dim)?;
        let x = view_mut(result.x, result.dim, "result.x")?;
        // SAFETY: the caller promises `f` is callable with any `dim`-long
        // buffer and its own `user_data`.
        let objective = |p: &[f64]| unsafe { f(p.as_ptr(), p.len(), user_data) };
        let trace = if baseline {
            driver::run_baseline(&objective, s, &cfg)?
        } else {
            driver::run(&objective, s, &cfg)?
        };
        x.copy_from_slice(&trace.best_point);
        result.value = trace.best_value;
        result.evaluations = trace.evaluations;
        result.iterations = trace.records.len();
        Ok(())
    })
}

/// Minimizes `f` over `space` with learned starting points.
///
/// # Safety
/// `f` must be a valid function pointer that does not unwind; `space`, `cfg`
/// and `result` valid, with `result->x` writable for `result->dim` values.
#[no_mangle]
pub unsafe extern "C" fn tesalocs_minimize(
    f: TesalocsObjective,
    user_data: *mut c_void,
    space: *const TesalocsSpace,
    cfg: *const TesalocsRunConfig,
    result: *mut TesalocsRunResult,
) -> TesalocsStatus {
    minimize_with(false, f, user_data, space, cfg, result)
}

/// Same protocol with uniform random starting points.
///
/// # Safety
/// As [`tesalocs_minimize`].
#[no_mangle]
pub unsafe extern "C" fn tesalocs_minimize_baseline(
    f: TesalocsObjective,
    user_data: *mut c_void,
    space: *const TesalocsSpace,
    cfg: *const TesalocsRunConfig,
    result: *mut TesalocsRunResult,
) -> TesalocsStatus {
    minimize_with(true, f, user_data, space, cfg, result)
}
