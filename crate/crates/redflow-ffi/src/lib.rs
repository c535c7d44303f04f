//! C ABI for redflow.
//!
//! Everything crosses the boundary as an opaque handle plus an `RfStatus`
//! error code; strings returned by the library are owned by the caller and
//! must be released with `rf_string_free`. The generated header lands in
//! `include/redflow.h`.

use std::ffi::{c_char, CStr, CString};
use std::net::Ipv4Addr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use redflow::agents::brute::brute_force_default;
use redflow::agents::expert::{expert_flow, ExpertPlaybook};
use redflow::agents::{train_and_evaluate, TrainingConfig};
use redflow::graph::AttackGraph;
use redflow::{
    EnvError, Environment, Exploit, ExploitCategory, FlowError, FlowExpr, LoadError, Scenario,
    SeededExpr, StateError,
};

/// Result codes for every `rf_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument,
    /// A string argument was not valid UTF-8.
    Utf8,
    /// Scenario or option JSON failed to parse or validate.
    Parse,
    /// Name is neither a bundled scenario nor a readable file.
    UnknownScenario,
    /// An action aimed at an IP outside the scenario universe.
    TargetNotInScenario,
    /// An offensive action is missing its required options.
    MissingOptions,
    /// State merge/encoding shape violation.
    EncodingShape,
    /// Invalid composition: a seeded expression can only lead a flow.
    Compose,
    Io,
    /// The library panicked; the handle may be poisoned.
    Panic,
}

impl From<LoadError> for RfStatus {
    fn from(err: LoadError) -> Self {
        match err {
            LoadError::Io(_) => RfStatus::Io,
            LoadError::UnknownBundled(_) => RfStatus::UnknownScenario,
            _ => RfStatus::Parse,
        }
    }
}

impl From<FlowError> for RfStatus {
    fn from(err: FlowError) -> Self {
        match err {
            FlowError::MissingOptions(_) => RfStatus::MissingOptions,
            FlowError::Env(EnvError::TargetNotInScenario(_)) => RfStatus::TargetNotInScenario,
            FlowError::Env(EnvError::MissingOptions(_)) => RfStatus::MissingOptions,
            FlowError::State(_) => RfStatus::EncodingShape,
        }
    }
}

impl From<StateError> for RfStatus {
    fn from(_: StateError) -> Self {
        RfStatus::EncodingShape
    }
}

/// Loaded scenario plus reward scheme; immutable, shareable.
pub struct RfEnv(Environment);

/// A single-owner flow bound to one environment's universe.
pub struct RfFlow(redflow::Flow);

/// One composable action.
pub struct RfExploit(Exploit);

/// A composition in progress; seeded once a state is placed in front.
pub struct RfExpr(ExprInner);

enum ExprInner {
    Plain(FlowExpr),
    Seeded(SeededExpr),
}

fn guard(body: impl FnOnce() -> RfStatus) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => RfStatus::Panic,
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, RfStatus> {
    if ptr.is_null() {
        return Err(RfStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| RfStatus::Utf8)
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> RfStatus {
    if out.is_null() {
        return RfStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(value));
    RfStatus::Ok
}

/// Short static name for a status code, for logs.
#[no_mangle]
pub extern "C" fn rf_status_name(status: RfStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        RfStatus::Ok => b"ok\0",
        RfStatus::NullArgument => b"null-argument\0",
        RfStatus::Utf8 => b"utf8\0",
        RfStatus::Parse => b"parse\0",
        RfStatus::UnknownScenario => b"unknown-scenario\0",
        RfStatus::TargetNotInScenario => b"target-not-in-scenario\0",
        RfStatus::MissingOptions => b"missing-options\0",
        RfStatus::EncodingShape => b"encoding-shape\0",
        RfStatus::Compose => b"compose\0",
        RfStatus::Io => b"io\0",
        RfStatus::Panic => b"panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned by an `rf_*` function and not freed already.
#[no_mangle]
pub unsafe extern "C" fn rf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a bundled scenario by name (`ur3_ctf`, `toy2`) or a scenario file by
/// path.
///
/// # Safety
/// `name_or_path` must be a valid NUL-terminated string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_env_load(
    name_or_path: *const c_char,
    out: *mut *mut RfEnv,
) -> RfStatus {
    guard(|| {
        let name = match cstr(name_or_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match Scenario::resolve(name) {
            Ok(scenario) => write_out(out, RfEnv(Environment::new(scenario))),
            Err(err) => err.into(),
        }
    })
}

/// # Safety
/// `env` must come from `rf_env_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rf_env_free(env: *mut RfEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Total one-hot encoding width of the environment's state space.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rf_env_encoding_size(env: *const RfEnv, out: *mut u64) -> RfStatus {
    guard(|| {
        if env.is_null() || out.is_null() {
            return RfStatus::NullArgument;
        }
        *out = redflow::encoding_size(&(*env).0.encoding_params());
        RfStatus::Ok
    })
}

/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_new(env: *const RfEnv, out: *mut *mut RfFlow) -> RfStatus {
    guard(|| {
        if env.is_null() {
            return RfStatus::NullArgument;
        }
        write_out(out, RfFlow(redflow::Flow::new(&(*env).0)))
    })
}

/// # Safety
/// `flow` must come from `rf_flow_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_free(flow: *mut RfFlow) {
    if !flow.is_null() {
        drop(Box::from_raw(flow));
    }
}

/// # Safety
/// `flow` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_reset(flow: *mut RfFlow) -> RfStatus {
    guard(|| {
        if flow.is_null() {
            return RfStatus::NullArgument;
        }
        (*flow).0.reset();
        RfStatus::Ok
    })
}

/// # Safety
/// `flow` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_cumulative_reward(flow: *const RfFlow, out: *mut i64) -> RfStatus {
    guard(|| {
        if flow.is_null() || out.is_null() {
            return RfStatus::NullArgument;
        }
        *out = (*flow).0.cumulative_reward();
        RfStatus::Ok
    })
}

/// Current network state as a JSON document.
///
/// # Safety
/// `flow` and `out` must be valid pointers; free the result with
/// `rf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_state_json(
    flow: *const RfFlow,
    out: *mut *mut c_char,
) -> RfStatus {
    guard(|| {
        if flow.is_null() || out.is_null() {
            return RfStatus::NullArgument;
        }
        match serde_json::to_string_pretty((*flow).0.state()) {
            Ok(json) => {
                *out = to_c_string(json);
                RfStatus::Ok
            }
            Err(_) => RfStatus::Parse,
        }
    })
}

/// Current state's one-hot encoding, packed, as a hex string.
///
/// # Safety
/// All pointers must be valid; free the result with `rf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_encode_hex(
    flow: *const RfFlow,
    env: *const RfEnv,
    out: *mut *mut c_char,
) -> RfStatus {
    guard(|| {
        if flow.is_null() || env.is_null() || out.is_null() {
            return RfStatus::NullArgument;
        }
        match (*flow)
            .0
            .state()
            .one_hot_encode(&(*env).0.encoding_params())
        {
            Ok(bits) => {
                *out = to_c_string(bits.to_hex());
                RfStatus::Ok
            }
            Err(err) => err.into(),
        }
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_init(out: *mut *mut RfExploit) -> RfStatus {
    guard(|| write_out(out, RfExploit(Exploit::init())))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_idle(out: *mut *mut RfExploit) -> RfStatus {
    guard(|| write_out(out, RfExploit(Exploit::idle())))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_targets(out: *mut *mut RfExploit) -> RfStatus {
    guard(|| write_out(out, RfExploit(Exploit::recon_targets())))
}

/// Footprinting action over `port_count` ports (may be zero).
///
/// # Safety
/// `ports` must point to `port_count` readable u16s (or be null when the
/// count is zero); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_versions(
    ports: *const u16,
    port_count: usize,
    out: *mut *mut RfExploit,
) -> RfStatus {
    guard(|| {
        let list: Vec<u16> = if port_count == 0 {
            Vec::new()
        } else {
            if ports.is_null() {
                return RfStatus::NullArgument;
            }
            std::slice::from_raw_parts(ports, port_count).to_vec()
        };
        write_out(out, RfExploit(Exploit::recon_versions(&list)))
    })
}

/// Configured offensive exploit. `options_json` is an optional flat JSON
/// object of string options (RHOSTS, USERNAME, ...).
///
/// # Safety
/// `module` must be a valid string; `options_json` may be null; `out` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_offensive(
    module: *const c_char,
    options_json: *const c_char,
    out: *mut *mut RfExploit,
) -> RfStatus {
    guard(|| {
        let module = match cstr(module) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut exploit = Exploit::offensive(module, ExploitCategory::Exploitation);
        if !options_json.is_null() {
            let json = match cstr(options_json) {
                Ok(s) => s,
                Err(status) => return status,
            };
            let options: std::collections::BTreeMap<String, String> =
                match serde_json::from_str(json) {
                    Ok(map) => map,
                    Err(_) => return RfStatus::Parse,
                };
            exploit.set_options(options);
        }
        write_out(out, RfExploit(exploit))
    })
}

/// # Safety
/// `exploit` must come from an `rf_exploit_*` constructor, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn rf_exploit_free(exploit: *mut RfExploit) {
    if !exploit.is_null() {
        drop(Box::from_raw(exploit));
    }
}

/// Fresh empty (unseeded) expression.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_expr_new(out: *mut *mut RfExpr) -> RfStatus {
    guard(|| write_out(out, RfExpr(ExprInner::Plain(FlowExpr::empty()))))
}

/// Expression seeded with the flow's current state: execution will start
/// there rather than from the flow's own state at run time.
///
/// # Safety
/// `flow` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rf_expr_seeded_from_flow(
    flow: *const RfFlow,
    out: *mut *mut RfExpr,
) -> RfStatus {
    guard(|| {
        if flow.is_null() {
            return RfStatus::NullArgument;
        }
        let seeded = (*flow).0.state().clone() * FlowExpr::empty();
        write_out(out, RfExpr(ExprInner::Seeded(seeded)))
    })
}

/// Append one action: the composition `expr * exploit`.
///
/// # Safety
/// Both pointers must be valid; the exploit is copied, the caller keeps
/// ownership.
#[no_mangle]
pub unsafe extern "C" fn rf_expr_push(expr: *mut RfExpr, exploit: *const RfExploit) -> RfStatus {
    guard(|| {
        if expr.is_null() || exploit.is_null() {
            return RfStatus::NullArgument;
        }
        let action = (*exploit).0.clone();
        let inner = std::mem::replace(&mut (*expr).0, ExprInner::Plain(FlowExpr::empty()));
        (*expr).0 = match inner {
            ExprInner::Plain(e) => ExprInner::Plain(e * action),
            ExprInner::Seeded(e) => ExprInner::Seeded(e * action),
        };
        RfStatus::Ok
    })
}

/// Concatenate: the composition `lhs * rhs`. Fails with `Compose` when `rhs`
/// carries a seed — a state has no meaning anywhere but the front.
///
/// # Safety
/// Both pointers must be valid; `rhs` is copied, the caller keeps ownership.
#[no_mangle]
pub unsafe extern "C" fn rf_expr_append(lhs: *mut RfExpr, rhs: *const RfExpr) -> RfStatus {
    guard(|| {
        if lhs.is_null() || rhs.is_null() {
            return RfStatus::NullArgument;
        }
        let tail = match &(*rhs).0 {
            ExprInner::Plain(e) => e.clone(),
            ExprInner::Seeded(_) => return RfStatus::Compose,
        };
        let inner = std::mem::replace(&mut (*lhs).0, ExprInner::Plain(FlowExpr::empty()));
        (*lhs).0 = match inner {
            ExprInner::Plain(e) => ExprInner::Plain(e * tail),
            ExprInner::Seeded(e) => ExprInner::Seeded(e * tail),
        };
        RfStatus::Ok
    })
}

/// # Safety
/// `expr` must come from an `rf_expr_*` constructor, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn rf_expr_free(expr: *mut RfExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Execute an expression. `target` is an optional dotted-quad applied to
/// actions that aim at a host but carry none themselves.
///
/// # Safety
/// `flow`, `env`, `expr` must be valid pointers; `target` may be null.
#[no_mangle]
pub unsafe extern "C" fn rf_flow_run(
    flow: *mut RfFlow,
    env: *const RfEnv,
    expr: *const RfExpr,
    target: *const c_char,
) -> RfStatus {
    guard(|| {
        if flow.is_null() || env.is_null() || expr.is_null() {
            return RfStatus::NullArgument;
        }
        let target_ip: Option<Ipv4Addr> = if target.is_null() {
            None
        } else {
            match cstr(target).map(str::parse) {
                Ok(Ok(ip)) => Some(ip),
                Ok(Err(_)) => return RfStatus::Parse,
                Err(status) => return status,
            }
        };
        let result = match &(*expr).0 {
            ExprInner::Plain(e) => (*flow).0.run(e.clone(), target_ip, &(*env).0),
            ExprInner::Seeded(e) => (*flow).0.run(e.clone(), target_ip, &(*env).0),
        };
        match result {
            Ok(_) => RfStatus::Ok,
            Err(err) => err.into(),
        }
    })
}

/// Run the scripted expert actor. `dot_out`, when non-null, receives the
/// attack graph in DOT form.
///
/// # Safety
/// `env` and `reward_out` must be valid; `dot_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn rf_run_expert(
    env: *const RfEnv,
    reward_out: *mut i64,
    dot_out: *mut *mut c_char,
) -> RfStatus {
    guard(|| {
        if env.is_null() || reward_out.is_null() {
            return RfStatus::NullArgument;
        }
        let run = match expert_flow(&(*env).0, &ExpertPlaybook::default()) {
            Ok(run) => run,
            Err(err) => return err.into(),
        };
        *reward_out = run.cumulative_reward;
        if !dot_out.is_null() {
            match AttackGraph::from_history(&run.history, &(*env).0.encoding_params()) {
                Ok(graph) => *dot_out = to_c_string(graph.export_dot()),
                Err(err) => return err.into(),
            }
        }
        RfStatus::Ok
    })
}

/// Run the brute-force actor over the scenario's default action subset.
///
/// # Safety
/// `env` and `reward_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rf_run_brute(env: *const RfEnv, reward_out: *mut i64) -> RfStatus {
    guard(|| {
        if env.is_null() || reward_out.is_null() {
            return RfStatus::NullArgument;
        }
        match brute_force_default(&(*env).0) {
            Ok(run) => {
                *reward_out = run.cumulative_reward;
                RfStatus::Ok
            }
            Err(err) => err.into(),
        }
    })
}

/// Train a Q-Learning agent and evaluate its greedy rollout of one episode.
/// `qtable_out`, when non-null, receives the learned table as JSON.
///
/// # Safety
/// `env` and `greedy_reward_out` must be valid; `qtable_out` may be null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn rf_train_agent(
    env: *const RfEnv,
    seed: u64,
    rollouts: u32,
    episode: u32,
    alpha: f64,
    gamma: f64,
    epsilon: f64,
    greedy_reward_out: *mut i64,
    qtable_out: *mut *mut c_char,
) -> RfStatus {
    guard(|| {
        if env.is_null() || greedy_reward_out.is_null() {
            return RfStatus::NullArgument;
        }
        let config = TrainingConfig {
            rollouts,
            episode,
            eval: false,
        };
        match train_and_evaluate(&(*env).0, seed, alpha, gamma, epsilon, &config) {
            Ok((run, model)) => {
                *greedy_reward_out = run.cumulative_reward;
                if !qtable_out.is_null() {
                    match model.to_json() {
                        Ok(json) => *qtable_out = to_c_string(json),
                        Err(_) => return RfStatus::Parse,
                    }
                }
                RfStatus::Ok
            }
            Err(err) => err.into(),
        }
    })
}
