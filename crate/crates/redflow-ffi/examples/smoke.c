/* Minimal consumer of the redflow C API: load the bundled scenario, run the
 * scripted actors, and print their cumulative rewards.
 *
 * Build (from the workspace root, after `cargo build -p redflow-ffi`):
 *   cc -Icrates/redflow-ffi/include crates/redflow-ffi/examples/smoke.c \
 *      target/debug/libredflow_ffi.a -lpthread -ldl -lm -o smoke
 */
#include <assert.h>
#include <inttypes.h>
#include <stdio.h>

#include "redflow.h"

int main(void) {
    RfEnv *env = NULL;
    assert(rf_env_load("ur3_ctf", &env) == RF_STATUS_OK);

    uint64_t width = 0;
    assert(rf_env_encoding_size(env, &width) == RF_STATUS_OK);
    printf("encoding width: %" PRIu64 "\n", width);

    int64_t reward = 0;
    assert(rf_run_expert(env, &reward, NULL) == RF_STATUS_OK);
    printf("expert: %" PRId64 "\n", reward);

    assert(rf_run_brute(env, &reward) == RF_STATUS_OK);
    printf("brute: %" PRId64 "\n", reward);

    char *qtable = NULL;
    assert(rf_train_agent(env, 7, 1000, 10, 0.1, 0.9, 0.1, &reward, &qtable) == RF_STATUS_OK);
    printf("agent: %" PRId64 "\n", reward);
    rf_string_free(qtable);

    rf_env_free(env);
    return 0;
}
