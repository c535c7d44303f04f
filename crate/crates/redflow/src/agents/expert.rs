//! The scripted human-expert actor: recon the network, then log into every
//! host found with its SSH port open using the known lab credentials.

use std::net::Ipv4Addr;

use crate::env::Environment;
use crate::exploit::{Exploit, ExploitCategory, OPT_RHOSTS, PORTS_COMPLETE};
use crate::flow::{Flow, FlowError};

use super::ActorRun;

/// What the expert knows going in. The default is the UR3 lab playbook:
/// footprint 192.168.2.10 over the complete port list, then try
/// root/easybot wherever port 22 answers.
#[derive(Debug, Clone)]
pub struct ExpertPlaybook {
    /// Preferred footprinting target; skipped when not part of the scenario,
    /// in which case the scan covers every live host instead.
    pub scan_target: Option<Ipv4Addr>,
    pub scan_ports: Vec<u16>,
    pub ssh_port: u16,
    pub username: String,
    pub password: String,
}

impl Default for ExpertPlaybook {
    fn default() -> Self {
        ExpertPlaybook {
            scan_target: Some(Ipv4Addr::new(192, 168, 2, 10)),
            scan_ports: PORTS_COMPLETE.to_vec(),
            ssh_port: 22,
            username: "root".to_string(),
            password: "easybot".to_string(),
        }
    }
}

/// Execute the expert flow: init, fingerprint, footprint, then one ssh_login
/// per host observed with the SSH port open.
pub fn expert_flow(env: &Environment, playbook: &ExpertPlaybook) -> Result<ActorRun, FlowError> {
    let mut flow = Flow::new(env);

    let init = Exploit::init();
    let recon = Exploit::recon_targets();
    let versions = Exploit::recon_versions(&playbook.scan_ports);
    let target = playbook
        .scan_target
        .filter(|ip| env.scenario().host(*ip).is_some());
    let state = flow.run(init * recon * versions, target, env)?;

    let candidates: Vec<Ipv4Addr> = state
        .hosts
        .values()
        .filter(|h| {
            h.ports
                .iter()
                .any(|p| p.port == playbook.ssh_port && p.open)
        })
        .map(|h| h.ip)
        .collect();

    for ip in candidates {
        let mut exploit = Exploit::offensive("ssh_login", ExploitCategory::Exploitation);
        exploit.set_options([
            (OPT_RHOSTS, ip.to_string()),
            ("USERNAME", playbook.username.clone()),
            ("PASSWORD", playbook.password.clone()),
        ]);
        if !exploit.missing() {
            let seeded = flow.state().clone() * exploit;
            flow.run(seeded, Some(ip), env)?;
        }
    }

    Ok(ActorRun {
        actor: "expert".to_string(),
        cumulative_reward: flow.cumulative_reward(),
        history: flow.history().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bundled, Scenario};

    #[test]
    fn expert_reaches_the_calibrated_reward_on_ur3() {
        let env = Environment::new(Scenario::from_json(bundled("ur3_ctf").unwrap()).unwrap());
        let run = expert_flow(&env, &ExpertPlaybook::default()).unwrap();
        // init 0, fingerprint -10, 72-port targeted footprint -82, ssh +100
        assert_eq!(run.cumulative_reward, 8);
        assert_eq!(run.history.len(), 4);
        assert_eq!(run.history.last().unwrap().reward, 100);
    }

    #[test]
    fn expert_without_open_ssh_stops_after_recon() {
        let env = Environment::new(Scenario::from_json(bundled("toy2").unwrap()).unwrap());
        // toy2 has no 192.168.2.10, so the footprint covers both live hosts;
        // port 4222 is never open, so the guard never fires
        let playbook = ExpertPlaybook {
            ssh_port: 4222,
            ..Default::default()
        };
        let run = expert_flow(&env, &playbook).unwrap();
        assert_eq!(run.history.len(), 3);
        assert!(run.history.iter().all(|e| !e.action.is_offensive()));
        // recon cost only: -10 fingerprint, -10 - 2*72 footprint over 2 live hosts
        assert_eq!(run.cumulative_reward, -10 - 10 - 144);
    }
}
