/*
 * redflow C API: exploit-flow composition, a deterministic network
 * simulator, and the three benchmark actors behind opaque handles.
 */

#pragma once

/* Generated by cbindgen from the redflow-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for every `rf_*` call.
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  // A required pointer argument was null.
  RF_STATUS_NULL_ARGUMENT,
  // A string argument was not valid UTF-8.
  RF_STATUS_UTF8,
  // Scenario or option JSON failed to parse or validate.
  RF_STATUS_PARSE,
  // Name is neither a bundled scenario nor a readable file.
  RF_STATUS_UNKNOWN_SCENARIO,
  // An action aimed at an IP outside the scenario universe.
  RF_STATUS_TARGET_NOT_IN_SCENARIO,
  // An offensive action is missing its required options.
  RF_STATUS_MISSING_OPTIONS,
  // State merge/encoding shape violation.
  RF_STATUS_ENCODING_SHAPE,
  // Invalid composition: a seeded expression can only lead a flow.
  RF_STATUS_COMPOSE,
  RF_STATUS_IO,
  // The library panicked; the handle may be poisoned.
  RF_STATUS_PANIC,
} RfStatus;

// Loaded scenario plus reward scheme; immutable, shareable.
typedef struct RfEnv RfEnv;

// One composable action.
typedef struct RfExploit RfExploit;

// A composition in progress; seeded once a state is placed in front.
typedef struct RfExpr RfExpr;

// A single-owner flow bound to one environment's universe.
typedef struct RfFlow RfFlow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Short static name for a status code, for logs.
const char *rf_status_name(enum RfStatus status);

// Release a string returned by this library.
//
// # Safety
// `s` must have been returned by an `rf_*` function and not freed already.
void rf_string_free(char *s);

// Load a bundled scenario by name (`ur3_ctf`, `toy2`) or a scenario file by
// path.
//
// # Safety
// `name_or_path` must be a valid NUL-terminated string; `out` must be a
// valid pointer.
enum RfStatus rf_env_load(const char *name_or_path, struct RfEnv **out);

// # Safety
// `env` must come from `rf_env_load` and not be freed twice.
void rf_env_free(struct RfEnv *env);

// Total one-hot encoding width of the environment's state space.
//
// # Safety
// `env` and `out` must be valid pointers.
enum RfStatus rf_env_encoding_size(const struct RfEnv *env, uint64_t *out);

// # Safety
// `env` and `out` must be valid pointers.
enum RfStatus rf_flow_new(const struct RfEnv *env, struct RfFlow **out);

// # Safety
// `flow` must come from `rf_flow_new` and not be freed twice.
void rf_flow_free(struct RfFlow *flow);

// # Safety
// `flow` must be a valid pointer.
enum RfStatus rf_flow_reset(struct RfFlow *flow);

// # Safety
// `flow` and `out` must be valid pointers.
enum RfStatus rf_flow_cumulative_reward(const struct RfFlow *flow, int64_t *out);

// Current network state as a JSON document.
//
// # Safety
// `flow` and `out` must be valid pointers; free the result with
// `rf_string_free`.
enum RfStatus rf_flow_state_json(const struct RfFlow *flow, char **out);

// Current state's one-hot encoding, packed, as a hex string.
//
// # Safety
// All pointers must be valid; free the result with `rf_string_free`.
enum RfStatus rf_flow_encode_hex(const struct RfFlow *flow, const struct RfEnv *env, char **out);

// # Safety
// `out` must be a valid pointer.
enum RfStatus rf_exploit_init(struct RfExploit **out);

// # Safety
// `out` must be a valid pointer.
enum RfStatus rf_exploit_idle(struct RfExploit **out);

// # Safety
// `out` must be a valid pointer.
enum RfStatus rf_exploit_targets(struct RfExploit **out);

// Footprinting action over `port_count` ports (may be zero).
//
// # Safety
// `ports` must point to `port_count` readable u16s (or be null when the
// count is zero); `out` must be valid.
enum RfStatus rf_exploit_versions(const uint16_t *ports, size_t port_count, struct RfExploit **out);

// Configured offensive exploit. `options_json` is an optional flat JSON
// object of string options (RHOSTS, USERNAME, ...).
//
// # Safety
// `module` must be a valid string; `options_json` may be null; `out` must
// be valid.
enum RfStatus rf_exploit_offensive(const char *module,
                                   const char *options_json,
                                   struct RfExploit **out);

// # Safety
// `exploit` must come from an `rf_exploit_*` constructor, not freed twice.
void rf_exploit_free(struct RfExploit *exploit);

// Fresh empty (unseeded) expression.
//
// # Safety
// `out` must be a valid pointer.
enum RfStatus rf_expr_new(struct RfExpr **out);

// Expression seeded with the flow's current state: execution will start
// there rather than from the flow's own state at run time.
//
// # Safety
// `flow` and `out` must be valid pointers.
enum RfStatus rf_expr_seeded_from_flow(const struct RfFlow *flow, struct RfExpr **out);

// Append one action: the composition `expr * exploit`.
//
// # Safety
// Both pointers must be valid; the exploit is copied, the caller keeps
// ownership.
enum RfStatus rf_expr_push(struct RfExpr *expr, const struct RfExploit *exploit);

// Concatenate: the composition `lhs * rhs`. Fails with `Compose` when `rhs`
// carries a seed — a state has no meaning anywhere but the front.
//
// # Safety
// Both pointers must be valid; `rhs` is copied, the caller keeps ownership.
enum RfStatus rf_expr_append(struct RfExpr *lhs, const struct RfExpr *rhs);

// # Safety
// `expr` must come from an `rf_expr_*` constructor, not freed twice.
void rf_expr_free(struct RfExpr *expr);

// Execute an expression. `target` is an optional dotted-quad applied to
// actions that aim at a host but carry none themselves.
//
// # Safety
// `flow`, `env`, `expr` must be valid pointers; `target` may be null.
enum RfStatus rf_flow_run(struct RfFlow *flow,
                          const struct RfEnv *env,
                          const struct RfExpr *expr,
                          const char *target);

// Run the scripted expert actor. `dot_out`, when non-null, receives the
// attack graph in DOT form.
//
// # Safety
// `env` and `reward_out` must be valid; `dot_out` may be null.
enum RfStatus rf_run_expert(const struct RfEnv *env, int64_t *reward_out, char **dot_out);

// Run the brute-force actor over the scenario's default action subset.
//
// # Safety
// `env` and `reward_out` must be valid pointers.
enum RfStatus rf_run_brute(const struct RfEnv *env, int64_t *reward_out);

// Train a Q-Learning agent and evaluate its greedy rollout of one episode.
// `qtable_out`, when non-null, receives the learned table as JSON.
//
// # Safety
// `env` and `greedy_reward_out` must be valid; `qtable_out` may be null.
enum RfStatus rf_train_agent(const struct RfEnv *env,
                             uint64_t seed,
                             uint32_t rollouts,
                             uint32_t episode,
                             double alpha,
                             double gamma,
                             double epsilon,
                             int64_t *greedy_reward_out,
                             char **qtable_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
