//! The brute-force actor: init once, then every permutation of the action
//! subset back to back, never resetting in between.

use itertools::Itertools;

use crate::env::Environment;
use crate::exploit::Exploit;
use crate::flow::{Flow, FlowError};

use super::{action_set, ActorRun};

/// Run all k! permutations of `subset` in lexicographic order over one
/// never-resetting flow. State (and launched exploits in particular) carries
/// across permutations, which is exactly what makes repeated offensive
/// attempts so expensive.
pub fn brute_force(env: &Environment, subset: &[Exploit]) -> Result<ActorRun, FlowError> {
    let mut flow = Flow::new(env);
    flow.run(Exploit::init(), None, env)?;

    for permutation in subset.iter().cloned().permutations(subset.len()) {
        for exploit in permutation {
            let seeded = flow.state().clone() * exploit;
            flow.run(seeded, None, env)?;
        }
    }

    Ok(ActorRun {
        actor: "brute".to_string(),
        cumulative_reward: flow.cumulative_reward(),
        history: flow.history().to_vec(),
    })
}

/// The default subset: the scenario's reduced relevant action set.
pub fn brute_force_default(env: &Environment) -> Result<ActorRun, FlowError> {
    brute_force(env, &action_set(env.scenario()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bundled, Scenario};

    fn env(name: &str) -> Environment {
        Environment::new(Scenario::from_json(bundled(name).unwrap()).unwrap())
    }

    #[test]
    fn permutations_enumerate_lexicographically() {
        let perms: Vec<Vec<u8>> = [0u8, 1, 2].iter().copied().permutations(3).collect();
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], vec![0, 1, 2]);
        assert_eq!(perms[1], vec![0, 2, 1]);
        assert_eq!(perms[5], vec![2, 1, 0]);
    }

    #[test]
    fn four_actions_run_ninety_six_steps_plus_init() {
        let env = env("ur3_ctf");
        let run = brute_force_default(&env).unwrap();
        // 4! = 24 permutations of 4 actions, plus the single init
        assert_eq!(run.history.len(), 24 * 4 + 1);
    }

    #[test]
    fn ur3_brute_force_hits_the_calibrated_total() {
        // idle: 24 * 0; targets: 24 * -10; bare versions: 24 * -10;
        // ssh_login: +100 once, then -100 for the 23 re-attempts
        let env = env("ur3_ctf");
        let run = brute_force_default(&env).unwrap();
        assert_eq!(run.cumulative_reward, -2680);
    }

    #[test]
    fn singleton_subset_scores_that_action_alone() {
        let env = env("ur3_ctf");
        let run = brute_force(&env, &[Exploit::recon_targets()]).unwrap();
        assert_eq!(run.cumulative_reward, -10);
        assert_eq!(run.history.len(), 2); // init + the action
    }

    #[test]
    fn toy2_brute_force_total_is_hand_enumerable() {
        // 3 actions (idle, versions, targets), 3! = 6 permutations:
        // 6 idle * 0 + 6 bare versions * -10 + 6 targets * -10 = -120
        let env = env("toy2");
        let run = brute_force_default(&env).unwrap();
        assert_eq!(run.cumulative_reward, -120);
        assert_eq!(run.history.len(), 6 * 3 + 1);
    }
}
