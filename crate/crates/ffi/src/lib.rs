//! C ABI over `elicit-core`.
//!
//! Every function returns an [`ElicitStatus`]. On failure the message is
//! kept per thread and read with [`elicit_last_error_message`]. Vectors go
//! out through caller buffers: `*out_len` always receives the required
//! length, and a short buffer yields `ELICIT_STATUS_BUFFER_TOO_SMALL`
//! without writing (pass `cap = 0` to query the size).
//!
//! Flat report layouts by mechanism:
//! - moments: `[m1, m2]`
//! - full predictive: `[nu..., n]`
//! - two-sample: `[p_1, ..., p_K, b]`

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use elicit_core::aggregation::pool;
use elicit_core::config::parse_config;
use elicit_core::families::{Belief, DirichletHyper, Family, Hyper};
use elicit_core::mechanisms::{invert_dirichlet_two_sample, match_probability, Mechanism, MechanismKind};
use elicit_core::records::{family_label, to_jsonl, Record};
use elicit_core::scoring::Report;
use elicit_core::simharness::{run_scenario, RunSummary};
use elicit_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElicitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    InversionDomain = 4,
    Precondition = 5,
    Aggregation = 6,
    Config = 7,
    Io = 8,
    BufferTooSmall = 9,
    Arity = 10,
    Numeric = 11,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElicitFamily {
    /// `param` is the known observation variance.
    Normal = 0,
    Poisson = 1,
    Uniform = 2,
    /// `param` is the number of labels `K`.
    Categorical = 3,
    Bernoulli = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElicitMechanismKind {
    SingleSampleMoments = 0,
    SingleSampleFullPpd = 1,
    TwoSampleDirichlet = 2,
}

/// Opaque mechanism handle.
pub struct ElicitMechanism(Mechanism);

/// Opaque handle to a completed scenario run.
pub struct ElicitRun {
    summary: RunSummary,
    records: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(ElicitStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) => ElicitStatus::Domain,
            Error::InversionDomain(_) => ElicitStatus::InversionDomain,
            Error::Precondition(_) => ElicitStatus::Precondition,
            Error::Aggregation(_) => ElicitStatus::Aggregation,
            Error::Arity(_) => ElicitStatus::Arity,
            Error::Config(_) => ElicitStatus::Config,
            Error::Io(_) => ElicitStatus::Io,
            Error::EmptyGrid
            | Error::NonNormalizable(_)
            | Error::Unrealizable(_)
            | Error::InconsistentReport(_) => ElicitStatus::Numeric,
        };
        Fail(status, e.to_string())
    }
}

fn fail<T>(status: ElicitStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(status, msg.into()))
}

/// Runs `body`, converting errors and panics into a status and message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ElicitStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ElicitStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ElicitStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return fail(ElicitStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `out` must be null or point to `cap` writable doubles; `out_len` must be
/// non-null.
unsafe fn emit(values: &[f64], out: *mut f64, cap: usize, out_len: *mut usize) -> Result<(), Fail> {
    if out_len.is_null() {
        return fail(ElicitStatus::NullPointer, "out_len is null");
    }
    *out_len = values.len();
    if cap < values.len() {
        return fail(
            ElicitStatus::BufferTooSmall,
            format!("buffer holds {cap} values, need {}", values.len()),
        );
    }
    if out.is_null() {
        return fail(ElicitStatus::NullPointer, "output buffer is null");
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn family_of(family: ElicitFamily, param: f64) -> Result<Family, Fail> {
    Ok(match family {
        ElicitFamily::Normal => Family::NormalKnownVar { variance: param },
        ElicitFamily::Poisson => Family::PoissonGamma,
        ElicitFamily::Uniform => Family::UniformPareto,
        ElicitFamily::Categorical => {
            if !(param >= 2.0 && param.fract() == 0.0 && param < 1e6) {
                return fail(ElicitStatus::InvalidArgument, format!("K must be an integer >= 2, got {param}"));
            }
            Family::categorical(param as usize)
        }
        ElicitFamily::Bernoulli => Family::BernoulliBeta,
    })
}

/// Categorical hypers take `n = sum(alpha)`; `n` is ignored for them.
fn hyper_of(family: Family, nu: &[f64], n: f64) -> Hyper {
    if family.is_categorical() {
        Hyper::new(nu.to_vec(), nu.iter().sum())
    } else {
        Hyper::new(nu.to_vec(), n)
    }
}

fn flatten(report: &Report) -> Vec<f64> {
    match report {
        Report::Moments(r) | Report::Categorical(r) => r.clone(),
        Report::Parametric(b) => b.hyper.nu.iter().copied().chain([b.hyper.n]).collect(),
        Report::Composite { p, b } => p.iter().copied().chain([*b]).collect(),
    }
}

fn unflatten(mech: &Mechanism, flat: &[f64]) -> Result<Report, Fail> {
    let k = mech.family.categories().unwrap_or(1);
    let want = match mech.kind {
        MechanismKind::SingleSampleMoments => 2,
        MechanismKind::SingleSampleFullPpd => mech.family.dim() + 1,
        MechanismKind::TwoSampleDirichlet => k + 1,
    };
    if flat.len() != want {
        return fail(ElicitStatus::Arity, format!("report has {} values, expected {want}", flat.len()));
    }
    let (head, last) = flat.split_at(want - 1);
    Ok(match mech.kind {
        MechanismKind::SingleSampleMoments => Report::Moments(flat.to_vec()),
        MechanismKind::SingleSampleFullPpd => {
            Report::Parametric(Belief::new(mech.family, Hyper::new(head.to_vec(), last[0]))?)
        }
        MechanismKind::TwoSampleDirichlet => Report::Composite { p: head.to_vec(), b: last[0] },
    })
}

/// Builds a mechanism for `family` with prior `(prior_nu, prior_n)`.
///
/// # Safety
/// `prior_nu` must point to `nu_len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_mechanism_new(
    kind: ElicitMechanismKind,
    family: ElicitFamily,
    family_param: f64,
    prior_nu: *const f64,
    nu_len: usize,
    prior_n: f64,
    out: *mut *mut ElicitMechanism,
) -> ElicitStatus {
    guard(|| {
        if out.is_null() {
            return fail(ElicitStatus::NullPointer, "out is null");
        }
        *out = std::ptr::null_mut();
        let fam = family_of(family, family_param)?;
        let nu = slice(prior_nu, nu_len, "prior_nu")?;
        let kind = match kind {
            ElicitMechanismKind::SingleSampleMoments => MechanismKind::SingleSampleMoments,
            ElicitMechanismKind::SingleSampleFullPpd => MechanismKind::SingleSampleFullPpd,
            ElicitMechanismKind::TwoSampleDirichlet => MechanismKind::TwoSampleDirichlet,
        };
        let mech = Mechanism::new(kind, fam, hyper_of(fam, nu, prior_n))?;
        *out = Box::into_raw(Box::new(ElicitMechanism(mech)));
        Ok(())
    })
}

/// # Safety
/// `mech` must be null or a handle from [`elicit_mechanism_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elicit_mechanism_free(mech: *mut ElicitMechanism) {
    if !mech.is_null() {
        drop(Box::from_raw(mech));
    }
}

/// Truthful report of an agent whose posterior is `(agent_nu, agent_n)`.
///
/// # Safety
/// `mech` must be a live handle, `agent_nu` must point to `nu_len` doubles,
/// `report` to `cap` writable doubles, and `report_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_mechanism_elicit(
    mech: *const ElicitMechanism,
    agent_nu: *const f64,
    nu_len: usize,
    agent_n: f64,
    report: *mut f64,
    cap: usize,
    report_len: *mut usize,
) -> ElicitStatus {
    guard(|| {
        let Some(m) = mech.as_ref() else {
            return fail(ElicitStatus::NullPointer, "mechanism is null");
        };
        let nu = slice(agent_nu, nu_len, "agent_nu")?;
        let r = m.0.elicit(&hyper_of(m.0.family, nu, agent_n))?;
        emit(&flatten(&r), report, cap, report_len)
    })
}

/// Recovers the agent's hyper from a flat report.
///
/// # Safety
/// `mech` must be a live handle, `report` must point to `report_len`
/// doubles, `nu_out` to `cap` writable doubles, and `nu_len` and `n_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_mechanism_decode(
    mech: *const ElicitMechanism,
    report: *const f64,
    report_len: usize,
    nu_out: *mut f64,
    cap: usize,
    nu_len: *mut usize,
    n_out: *mut f64,
) -> ElicitStatus {
    guard(|| {
        let Some(m) = mech.as_ref() else {
            return fail(ElicitStatus::NullPointer, "mechanism is null");
        };
        if n_out.is_null() {
            return fail(ElicitStatus::NullPointer, "n_out is null");
        }
        let flat = slice(report, report_len, "report")?;
        let h = m.0.decode(&unflatten(&m.0, flat)?)?;
        emit(&h.nu, nu_out, cap, nu_len)?;
        *n_out = h.n;
        Ok(())
    })
}

/// Decodes `count` reports of `stride` values each, laid end to end, and
/// pools them into the global posterior hyper.
///
/// # Safety
/// `reports` must point to `count * stride` doubles; output pointers as in
/// [`elicit_mechanism_decode`].
#[no_mangle]
pub unsafe extern "C" fn elicit_mechanism_aggregate(
    mech: *const ElicitMechanism,
    reports: *const f64,
    stride: usize,
    count: usize,
    nu_out: *mut f64,
    cap: usize,
    nu_len: *mut usize,
    n_out: *mut f64,
) -> ElicitStatus {
    guard(|| {
        let Some(m) = mech.as_ref() else {
            return fail(ElicitStatus::NullPointer, "mechanism is null");
        };
        if n_out.is_null() {
            return fail(ElicitStatus::NullPointer, "n_out is null");
        }
        let total = stride
            .checked_mul(count)
            .ok_or_else(|| Fail(ElicitStatus::InvalidArgument, "stride * count overflows".into()))?;
        let flat = slice(reports, total, "reports")?;
        let decoded = if stride == 0 {
            Vec::new()
        } else {
            flat.chunks(stride)
                .map(|r| Ok(m.0.decode(&unflatten(&m.0, r)?)?))
                .collect::<Result<Vec<_>, Fail>>()?
        };
        let h = pool(m.0.family, &m.0.prior, &decoded)?;
        emit(&h.nu, nu_out, cap, nu_len)?;
        *n_out = h.n;
        Ok(())
    })
}

/// `P(x1 = x2)` for two draws from one Dirichlet(`alpha`) categorical.
///
/// # Safety
/// `alpha` must point to `k` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_match_probability(alpha: *const f64, k: usize, out: *mut f64) -> ElicitStatus {
    guard(|| {
        if out.is_null() {
            return fail(ElicitStatus::NullPointer, "out is null");
        }
        let a = DirichletHyper::new(slice(alpha, k, "alpha")?.to_vec())?;
        *out = match_probability(&a);
        Ok(())
    })
}

/// Dirichlet pseudo-counts from a first-sample distribution `p` and a match
/// probability `b`.
///
/// # Safety
/// `p` must point to `k` doubles, `alpha_out` to `cap` writable doubles,
/// and `alpha_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_invert_two_sample(
    p: *const f64,
    k: usize,
    b: f64,
    alpha_out: *mut f64,
    cap: usize,
    alpha_len: *mut usize,
) -> ElicitStatus {
    guard(|| {
        let a = invert_dirichlet_two_sample(slice(p, k, "p")?, b)?;
        emit(&a.alpha, alpha_out, cap, alpha_len)
    })
}

/// Parses a scenario (same text format as the CLI's config files) and runs
/// it. `seed` overrides the configured seed unless `use_seed` is false.
///
/// # Safety
/// `config_text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_run_scenario(
    config_text: *const c_char,
    use_seed: bool,
    seed: u64,
    out: *mut *mut ElicitRun,
) -> ElicitStatus {
    guard(|| {
        if config_text.is_null() || out.is_null() {
            return fail(ElicitStatus::NullPointer, "config_text or out is null");
        }
        *out = std::ptr::null_mut();
        let text = CStr::from_ptr(config_text)
            .to_str()
            .map_err(|_| Fail(ElicitStatus::InvalidArgument, "config is not UTF-8".into()))?;
        let mut cfg = parse_config(text)?;
        if use_seed {
            cfg.seed = seed;
        }
        cfg.output = None;
        let results = run_scenario(&cfg)?;
        let summary = RunSummary::from_results(&results);
        let family = family_label(cfg.family);
        let mut recs = vec![Record::header("run", &cfg)];
        recs.extend(results.into_iter().map(|result| Record::Trial { family: family.clone(), result }));
        recs.push(Record::Summary { family, summary: summary.clone() });
        let records = CString::new(to_jsonl(&recs)?)
            .map_err(|_| Fail(ElicitStatus::Io, "records contain NUL".into()))?;
        *out = Box::into_raw(Box::new(ElicitRun { summary, records }));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle from [`elicit_run_scenario`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elicit_run_free(run: *mut ElicitRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Trial count, pass count, and largest relative hyper error of a run.
///
/// # Safety
/// `run` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn elicit_run_summary(
    run: *const ElicitRun,
    trials: *mut usize,
    passed: *mut usize,
    max_rel_error: *mut f64,
) -> ElicitStatus {
    guard(|| {
        let Some(r) = run.as_ref() else {
            return fail(ElicitStatus::NullPointer, "run is null");
        };
        if trials.is_null() || passed.is_null() || max_rel_error.is_null() {
            return fail(ElicitStatus::NullPointer, "output pointer is null");
        }
        *trials = r.summary.trials;
        *passed = r.summary.passed;
        *max_rel_error = r.summary.max_rel_error;
        Ok(())
    })
}

/// Line-delimited JSON records of the run. Borrowed: valid until
/// [`elicit_run_free`].
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn elicit_run_records(run: *const ElicitRun) -> *const c_char {
    run.as_ref().map_or(std::ptr::null(), |r| r.records.as_ptr())
}

/// Message of the last failed call on this thread, or null. The caller owns
/// the string and releases it with [`elicit_string_free`].
#[no_mangle]
pub extern "C" fn elicit_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(std::ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elicit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
