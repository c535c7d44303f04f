//! The three actors evaluated against a scenario: a tabular Q-Learning
//! agent, a scripted human-expert flow, and a brute-force permutation runner.

pub mod brute;
pub mod expert;
pub mod qlearn;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::exploit::{Exploit, ExploitCategory, OPT_RHOSTS};
use crate::flow::{Flow, FlowError, HistoryEntry};
use crate::scenario::Scenario;
use qlearn::{QLearn, StateKey};

/// Outcome of one actor's full run against a scenario.
#[derive(Debug, Clone)]
pub struct ActorRun {
    pub actor: String,
    pub cumulative_reward: i64,
    pub history: Vec<HistoryEntry>,
}

/// Training loop parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainingConfig {
    /// Total environment steps.
    pub rollouts: u32,
    /// Steps per episode; the flow resets after each.
    pub episode: u32,
    /// Evaluation mode: epsilon forced to 0 and no table updates.
    pub eval: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            rollouts: 1000,
            episode: 10,
            eval: false,
        }
    }
}

/// Result of a training run.
#[derive(Debug)]
pub struct TrainReport {
    /// Cumulative reward of each completed episode, in order.
    pub episode_rewards: Vec<i64>,
    pub model: QLearn,
}

/// The reduced "relevant" action set for a scenario: idle, one configured
/// instance per declared vulnerability (options pre-filled from the scenario
/// truth, the way the experiments were set up), a bare footprinting action,
/// and fingerprinting. Instance names carry an `@ip` suffix only when one
/// module targets several hosts.
pub fn action_set(scenario: &Scenario) -> Vec<Exploit> {
    let mut actions = vec![Exploit::idle()];
    for ip in scenario.universe() {
        let host = scenario.host(ip).expect("universe ip");
        for vuln in &host.vulnerable_to {
            let shared = scenario
                .hosts
                .iter()
                .flat_map(|h| &h.vulnerable_to)
                .filter(|v| v.exploit == vuln.exploit)
                .count()
                > 1;
            let mut exploit =
                Exploit::offensive(&vuln.exploit, ExploitCategory::Exploitation).with_target(ip);
            if shared {
                exploit = exploit.with_name(&format!("{}@{ip}", vuln.exploit));
            }
            exploit.set_options(vuln.requires.clone());
            exploit.set_options([(OPT_RHOSTS, ip.to_string())]);
            actions.push(exploit);
        }
    }
    actions.push(Exploit::recon_versions(&[]));
    actions.push(Exploit::recon_targets());
    actions
}

/// Run the training loop: learn one step behind, pick an action, execute it
/// seeded from the current state, and reset the flow every `episode` steps.
/// The final transition of each episode window is dropped with the reset.
pub fn train(
    env: &Environment,
    actions: &[Exploit],
    model: QLearn,
    config: &TrainingConfig,
) -> Result<TrainReport, FlowError> {
    let params = env.encoding_params();
    let mut flow = Flow::new(env);
    flow.set_learning_model(model);
    let mut episode_rewards = Vec::new();

    let mut age: u32 = 1;
    while age <= config.rollouts {
        let pending = match flow.last_state() {
            Some(state) => Some((
                StateKey::from(&state.one_hot_encode(&params)?),
                flow.last_action().expect("entry has action").name.clone(),
                flow.last_reward().expect("entry has reward") as f64,
            )),
            None => None,
        };
        let current_key = StateKey::from(&flow.state().one_hot_encode(&params)?);
        let model = flow
            .learning_model_mut()
            .expect("training flow has a model");
        if let Some((prev_key, prev_action, prev_reward)) = pending {
            if !config.eval {
                model.learn(prev_key, &prev_action, prev_reward, &current_key);
            }
        }
        let name = if config.eval {
            model.choose_greedy(&current_key)
        } else {
            model.choose_action(&current_key)
        };
        let action = actions
            .iter()
            .find(|a| a.name == name)
            .unwrap_or_else(|| panic!("model chose {name}, which is not in the action set"))
            .clone();
        let seeded = flow.state().clone() * action;
        flow.run(seeded, None, env)?;

        if age.is_multiple_of(config.episode) {
            episode_rewards.push(flow.cumulative_reward());
            flow.reset();
        }
        age += 1;
    }

    Ok(TrainReport {
        episode_rewards,
        model: flow
            .take_learning_model()
            .expect("model retained across resets"),
    })
}

/// Roll the greedy policy for `steps` steps from a fresh flow.
pub fn greedy_rollout(
    env: &Environment,
    actions: &[Exploit],
    model: &mut QLearn,
    steps: u32,
) -> Result<ActorRun, FlowError> {
    let params = env.encoding_params();
    let mut flow = Flow::new(env);
    for _ in 0..steps {
        let key = StateKey::from(&flow.state().one_hot_encode(&params)?);
        let name = model.choose_greedy(&key);
        let action = actions
            .iter()
            .find(|a| a.name == name)
            .unwrap_or_else(|| panic!("model chose {name}, which is not in the action set"))
            .clone();
        let seeded = flow.state().clone() * action;
        flow.run(seeded, None, env)?;
    }
    Ok(ActorRun {
        actor: "agent".to_string(),
        cumulative_reward: flow.cumulative_reward(),
        history: flow.history().to_vec(),
    })
}

/// Train with the given hyperparameters and seed, then report the greedy
/// rollout of one episode length.
pub fn train_and_evaluate(
    env: &Environment,
    seed: u64,
    alpha: f64,
    gamma: f64,
    epsilon: f64,
    config: &TrainingConfig,
) -> Result<(ActorRun, QLearn), FlowError> {
    let actions = action_set(env.scenario());
    let names = actions.iter().map(|a| a.name.clone()).collect();
    let model = QLearn::new(names, alpha, gamma, epsilon, seed);
    let report = train(env, &actions, model, config)?;
    let mut model = report.model;
    let run = greedy_rollout(env, &actions, &mut model, config.episode)?;
    Ok((run, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::bundled;

    fn env(name: &str) -> Environment {
        Environment::new(Scenario::from_json(bundled(name).unwrap()).unwrap())
    }

    #[test]
    fn ur3_action_set_matches_reduced_relevant_set() {
        let env = env("ur3_ctf");
        let names: Vec<String> = action_set(env.scenario())
            .iter()
            .map(|a| a.name.clone())
            .collect();
        assert_eq!(names, ["idle", "ssh_login", "versions", "targets"]);
    }

    #[test]
    fn toy2_action_set_has_no_offensive() {
        let env = env("toy2");
        let names: Vec<String> = action_set(env.scenario())
            .iter()
            .map(|a| a.name.clone())
            .collect();
        assert_eq!(names, ["idle", "versions", "targets"]);
    }

    #[test]
    fn shared_modules_get_instance_suffixes() {
        // one module against several hosts: names must stay unique
        let scenario = Scenario::from_json(
            r#"{"version":1,
                "hosts":[
                  {"ip":"10.0.0.1","vulnerable_to":[{"exploit":"ssh_login","requires":{}}]},
                  {"ip":"10.0.0.2","vulnerable_to":[{"exploit":"ssh_login","requires":{}}]}],
                "monitored_ports":[22],"exploits":["ssh_login"]}"#,
        )
        .unwrap();
        let names: Vec<String> = action_set(&scenario)
            .iter()
            .map(|a| a.name.clone())
            .collect();
        assert_eq!(
            names,
            [
                "idle",
                "ssh_login@10.0.0.1",
                "ssh_login@10.0.0.2",
                "versions",
                "targets"
            ]
        );
        let set: std::collections::BTreeSet<&String> = names.iter().collect();
        assert_eq!(set.len(), names.len());
        // the suffixed instances still resolve to the catalog module
        for action in action_set(&scenario) {
            if action.is_offensive() {
                assert_eq!(action.module(), "ssh_login");
            }
        }
    }

    #[test]
    fn zero_rollouts_leave_table_untouched() {
        let env = env("ur3_ctf");
        let actions = action_set(env.scenario());
        let names = actions.iter().map(|a| a.name.clone()).collect();
        let model = QLearn::new(names, 0.1, 0.9, 0.1, 3);
        let before = model.to_json().unwrap();
        let config = TrainingConfig {
            rollouts: 0,
            ..Default::default()
        };
        let report = train(&env, &actions, model, &config).unwrap();
        assert_eq!(report.model.to_json().unwrap(), before);
        assert!(report.episode_rewards.is_empty());
    }

    #[test]
    fn training_is_deterministic_for_a_fixed_seed() {
        let env = env("ur3_ctf");
        let config = TrainingConfig {
            rollouts: 200,
            ..Default::default()
        };
        let (run_a, model_a) = train_and_evaluate(&env, 11, 0.1, 0.9, 0.1, &config).unwrap();
        let (run_b, model_b) = train_and_evaluate(&env, 11, 0.1, 0.9, 0.1, &config).unwrap();
        assert_eq!(model_a.to_json().unwrap(), model_b.to_json().unwrap());
        assert_eq!(run_a.cumulative_reward, run_b.cumulative_reward);
    }

    #[test]
    fn trained_agent_reaches_the_analytic_maximum() {
        let env = env("ur3_ctf");
        let (run, _) =
            train_and_evaluate(&env, 7, 0.1, 0.9, 0.1, &TrainingConfig::default()).unwrap();
        assert_eq!(run.cumulative_reward, 100);
        assert_eq!(run.history.len(), 10);
    }

    #[test]
    fn q_values_stay_within_the_discount_bound() {
        // rewards in [-100, 100] and gamma 0.9 bound every entry by 1000
        let env = env("ur3_ctf");
        let (_, model) =
            train_and_evaluate(&env, 5, 0.1, 0.9, 0.1, &TrainingConfig::default()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&model.to_json().unwrap()).unwrap();
        let mut checked = 0;
        for (_, by_action) in json["q"].as_object().unwrap() {
            for (_, value) in by_action.as_object().unwrap() {
                assert!(value.as_f64().unwrap().abs() <= 100.0 / (1.0 - 0.9) + 1e-9);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
