//! Deterministic simulator: answers recon and offensive actions with
//! observations, rewards, and success flags.

use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exploit::{Exploit, ExploitKind};
use crate::scenario::Scenario;
use crate::state::{EncodingParams, NetState, PortStatus, StateDelta};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnvError {
    #[error("target-not-in-scenario: {0}")]
    TargetNotInScenario(Ipv4Addr),
    #[error("missing-options: {0} has no target host")]
    MissingOptions(String),
}

/// Per-action rewards. Defaults: idle costs nothing, recon costs its base,
/// footprinting additionally pays for every probe it sends (one per target
/// IP and port, the traffic an IDS would see), offensive attempts win or
/// lose 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardScheme {
    pub idle_reward: i64,
    pub recon_base: i64,
    pub footprint_per_ip: i64,
    pub exploit_success: i64,
    pub exploit_failure: i64,
}

impl Default for RewardScheme {
    fn default() -> Self {
        RewardScheme {
            idle_reward: 0,
            recon_base: -10,
            footprint_per_ip: -1,
            exploit_success: 100,
            exploit_failure: -100,
        }
    }
}

/// Result of executing one action: the observation to merge, the reward, and
/// whether the action achieved anything (recon always does; an offensive
/// action only when the target actually falls).
#[derive(Debug, Clone, PartialEq)]
pub struct ExecOutcome {
    pub delta: StateDelta,
    pub reward: i64,
    pub success: bool,
}

/// Immutable simulation of a loaded scenario. Execution is a pure function
/// of (scenario, action, current state); distinct flows may share one
/// environment freely.
#[derive(Debug, Clone)]
pub struct Environment {
    scenario: Scenario,
    scheme: RewardScheme,
}

impl Environment {
    pub fn new(scenario: Scenario) -> Self {
        Environment {
            scenario,
            scheme: RewardScheme::default(),
        }
    }

    pub fn with_scheme(scenario: Scenario, scheme: RewardScheme) -> Self {
        Environment { scenario, scheme }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn scheme(&self) -> &RewardScheme {
        &self.scheme
    }

    pub fn encoding_params(&self) -> EncodingParams {
        self.scenario.encoding_params()
    }

    /// Empty state over this scenario's universe and canonical orderings.
    pub fn empty_state(&self) -> NetState {
        NetState::empty(
            &self.scenario.universe(),
            &self.scenario.monitored_ports,
            &self.scenario.exploits,
        )
    }

    /// Execute one action against the current state. The action's target must
    /// already be resolved (see `Flow::run`).
    pub fn execute(&self, action: &Exploit, current: &NetState) -> Result<ExecOutcome, EnvError> {
        match action.kind {
            ExploitKind::Init | ExploitKind::Idle => Ok(ExecOutcome {
                delta: StateDelta::default(),
                reward: self.scheme.idle_reward,
                success: true,
            }),
            ExploitKind::ReconTargets => Ok(self.fingerprint()),
            ExploitKind::ReconVersions => self.footprint(action, current),
            ExploitKind::Offensive => self.attempt_exploit(action, current),
        }
    }

    /// Fingerprinting: every scenario host answers, flat cost.
    fn fingerprint(&self) -> ExecOutcome {
        let mut delta = StateDelta::default();
        for host in &self.scenario.hosts {
            delta.host(host.ip).live = Some(true);
        }
        ExecOutcome {
            delta,
            reward: self.scheme.recon_base,
            success: true,
        }
    }

    /// Footprinting: probe the action's port list against its target, or
    /// against every known-live host when untargeted. Each (ip, port) probe
    /// costs `footprint_per_ip` on top of the base. Only monitored ports can
    /// be recorded in the state; the rest still cost their traffic.
    fn footprint(&self, action: &Exploit, current: &NetState) -> Result<ExecOutcome, EnvError> {
        let ports = action.ports();
        let scope: Vec<Ipv4Addr> = match action.own_target() {
            Some(ip) => {
                if self.scenario.host(ip).is_none() {
                    return Err(EnvError::TargetNotInScenario(ip));
                }
                vec![ip]
            }
            None => current
                .hosts
                .values()
                .filter(|h| h.live == Some(true))
                .map(|h| h.ip)
                .collect(),
        };

        let mut delta = StateDelta::default();
        for &ip in &scope {
            if ports.is_empty() {
                continue;
            }
            let spec = self
                .scenario
                .host(ip)
                .expect("scope only holds scenario hosts");
            let host_delta = delta.host(ip);
            host_delta.live = Some(true);
            for &port in &ports {
                if !self.scenario.monitored_ports.contains(&port) {
                    continue;
                }
                let status = match spec.port(port) {
                    Some(p) => PortStatus {
                        port,
                        open: true,
                        version: Some(p.version.clone()),
                        cpe: None,
                    },
                    None => PortStatus::closed(port),
                };
                host_delta.ports.push(status);
            }
        }

        let probes = (scope.len() * ports.len()) as i64;
        Ok(ExecOutcome {
            delta,
            reward: self.scheme.recon_base + self.scheme.footprint_per_ip * probes,
            success: true,
        })
    }

    /// An offensive attempt. The vulnerability predicate itself is stateless:
    /// the target falls iff it lists the module and every required option
    /// matches. Re-attempting a module already launched against the same
    /// host fails outright; the noisy first attempt already tripped it.
    fn attempt_exploit(
        &self,
        action: &Exploit,
        current: &NetState,
    ) -> Result<ExecOutcome, EnvError> {
        let target = action
            .own_target()
            .ok_or_else(|| EnvError::MissingOptions(action.name.clone()))?;
        let spec = self
            .scenario
            .host(target)
            .ok_or(EnvError::TargetNotInScenario(target))?;

        let module = action.module();
        let already_launched = current
            .host(target)
            .map(|h| h.exploits.iter().any(|e| e.name == module && e.launched))
            .unwrap_or(false);

        let success = !already_launched
            && spec.vulnerable_to.iter().any(|vuln| {
                vuln.exploit == module
                    && vuln
                        .requires
                        .iter()
                        .all(|(k, v)| action.option(k) == Some(v.as_str()))
            });

        let mut delta = StateDelta::default();
        if self.scenario.exploits.iter().any(|e| e == module) {
            delta.host(target).launched.push(module.to_string());
        }

        let reward = if success {
            self.scheme.exploit_success
        } else {
            self.scheme.exploit_failure
        };
        Ok(ExecOutcome {
            delta,
            reward,
            success,
        })
    }
}
