//! Property tests: reward bookkeeping against an independent oracle,
//! monotone launched flags, encoding round-trips, and flow determinism.

use std::collections::BTreeSet;
use std::net::Ipv4Addr;

use proptest::prelude::*;

use redflow::{Environment, Exploit, ExploitCategory, Flow, NetState, Scenario, PORTS_COMPLETE};

fn ur3() -> Environment {
    Environment::new(Scenario::resolve("ur3_ctf").unwrap())
}

/// Recompute one action's reward from the scenario truth, independently of
/// the environment's execution path.
fn oracle_reward(env: &Environment, action: &Exploit, state: &NetState) -> i64 {
    let scheme = env.scheme();
    let scenario = env.scenario();
    match action.kind {
        redflow::ExploitKind::Init | redflow::ExploitKind::Idle => scheme.idle_reward,
        redflow::ExploitKind::ReconTargets => scheme.recon_base,
        redflow::ExploitKind::ReconVersions => {
            let ips = match action.own_target() {
                Some(_) => 1usize,
                None => state
                    .hosts
                    .values()
                    .filter(|h| h.live == Some(true))
                    .count(),
            };
            scheme.recon_base + scheme.footprint_per_ip * (ips * action.ports().len()) as i64
        }
        redflow::ExploitKind::Offensive => {
            let target = action.own_target().unwrap();
            let launched = state
                .host(target)
                .map(|h| {
                    h.exploits
                        .iter()
                        .any(|e| e.name == action.module() && e.launched)
                })
                .unwrap_or(false);
            let vulnerable = scenario
                .host(target)
                .map(|spec| {
                    spec.vulnerable_to.iter().any(|v| {
                        v.exploit == action.module()
                            && v.requires
                                .iter()
                                .all(|(k, val)| action.option(k) == Some(val.as_str()))
                    })
                })
                .unwrap_or(false);
            if vulnerable && !launched {
                scheme.exploit_success
            } else {
                scheme.exploit_failure
            }
        }
    }
}

fn ssh(target: &str, password: &str) -> Exploit {
    let mut e = Exploit::offensive("ssh_login", ExploitCategory::Exploitation);
    e.set_options([
        ("RHOSTS", target),
        ("USERNAME", "root"),
        ("PASSWORD", password),
    ]);
    e
}

/// Generator over the valid ur3 action pool.
fn arb_action() -> impl Strategy<Value = Exploit> {
    prop_oneof![
        Just(Exploit::init()),
        Just(Exploit::idle()),
        Just(Exploit::recon_targets()),
        Just(Exploit::recon_versions(&[])),
        Just(Exploit::recon_versions(&[22])),
        Just(Exploit::recon_versions(&[22, 80, 443])),
        Just(Exploit::recon_versions(&PORTS_COMPLETE).with_target(Ipv4Addr::new(192, 168, 2, 10))),
        Just(ssh("192.168.2.10", "easybot")),
        Just(ssh("192.168.2.10", "wrong")),
        Just(ssh("192.168.2.4", "easybot")),
    ]
}

proptest! {
    /// Cumulative reward always equals the oracle's step-by-step total.
    #[test]
    fn reward_bookkeeping_matches_oracle(actions in prop::collection::vec(arb_action(), 0..20)) {
        let env = ur3();
        let mut flow = Flow::new(&env);
        let mut expected = 0i64;
        for action in actions {
            expected += oracle_reward(&env, &action, flow.state());
            let seeded = flow.state().clone() * action;
            flow.run(seeded, None, &env).unwrap();
        }
        prop_assert_eq!(flow.cumulative_reward(), expected);
        let history_sum: i64 = flow.history().iter().map(|e| e.reward).sum();
        prop_assert_eq!(flow.cumulative_reward(), history_sum);
    }

    /// Launched flags never revert anywhere along a recorded history.
    #[test]
    fn launched_flags_are_monotone(actions in prop::collection::vec(arb_action(), 0..20)) {
        let env = ur3();
        let mut flow = Flow::new(&env);
        for action in actions {
            let seeded = flow.state().clone() * action;
            flow.run(seeded, None, &env).unwrap();
        }
        for entry in flow.history() {
            for (ip, before_host) in &entry.before.hosts {
                let after_host = &entry.after.hosts[ip];
                for (b, a) in before_host.exploits.iter().zip(&after_host.exploits) {
                    prop_assert!(!b.launched || a.launched, "launched bit reverted on {ip}");
                }
            }
        }
    }

    /// Two flows running the same sequence see identical histories.
    #[test]
    fn equal_runs_are_deterministic(actions in prop::collection::vec(arb_action(), 0..12)) {
        let env = ur3();
        let mut a = Flow::new(&env);
        let mut b = Flow::new(&env);
        for action in actions {
            let sa = a.state().clone() * action.clone();
            let sb = b.state().clone() * action;
            a.run(sa, None, &env).unwrap();
            b.run(sb, None, &env).unwrap();
        }
        prop_assert_eq!(a.history(), b.history());
    }

    /// The encoding decodes back to the state's encoded projection.
    #[test]
    fn encoding_roundtrips_through_decoder(actions in prop::collection::vec(arb_action(), 0..12)) {
        let env = ur3();
        let params = env.encoding_params();
        let mut flow = Flow::new(&env);
        for action in actions {
            let seeded = flow.state().clone() * action;
            flow.run(seeded, None, &env).unwrap();
        }
        let encoded = flow.state().one_hot_encode(&params).unwrap();
        let decoded = decode(&encoded, &params);
        let expected: Vec<Vec<bool>> = flow
            .state()
            .hosts
            .values()
            .map(|h| {
                h.ports
                    .iter()
                    .map(|p| p.open)
                    .chain(h.exploits.iter().map(|e| e.launched))
                    .collect()
            })
            .collect();
        prop_assert_eq!(decoded, expected);
    }
}

/// Test-only decoder: reads each host's open/launched bits back out of the
/// flat vector and checks the fixed identity prefixes while at it.
fn decode(bits: &redflow::Bits, params: &redflow::EncodingParams) -> Vec<Vec<bool>> {
    let mut hosts = Vec::new();
    let mut at = 0;
    let mut next = || {
        let b = bits.get(at);
        at += 1;
        b
    };
    for _ in 0..params.hosts {
        let mut host = Vec::new();
        for slot in 0..params.ports {
            for j in 0..params.ports {
                assert_eq!(next(), j == slot, "port identity prefix broken");
            }
            for _ in 0..params.port_bits {
                host.push(next());
            }
        }
        for slot in 0..params.exploits {
            for j in 0..params.exploits {
                assert_eq!(next(), j == slot, "exploit identity prefix broken");
            }
            for _ in 0..params.exploit_bits {
                host.push(next());
            }
        }
        for _ in 0..params.system_bits {
            next();
        }
        hosts.push(host);
    }
    assert_eq!(at, bits.len());
    hosts
}

/// Exhaustive injectivity over toy2's full encoded space: 2 hosts x (2 port
/// bits + 1 launched bit) = 64 states, no two sharing an encoding.
#[test]
fn toy2_encodings_are_injective() {
    let env = Environment::new(Scenario::resolve("toy2").unwrap());
    let params = env.encoding_params();
    let base = env.empty_state();
    let ips: Vec<Ipv4Addr> = base.hosts.keys().copied().collect();

    let mut seen = BTreeSet::new();
    let mut count = 0;
    for mask in 0u32..64 {
        let mut state = base.clone();
        let mut bit = 0;
        for ip in &ips {
            let host = state.hosts.get_mut(ip).unwrap();
            for p in 0..2 {
                host.ports[p].open = mask & (1 << bit) != 0;
                bit += 1;
            }
            host.exploits[0].launched = mask & (1 << bit) != 0;
            bit += 1;
        }
        let encoded = state.one_hot_encode(&params).unwrap();
        assert!(seen.insert(encoded.to_hex()), "collision at mask {mask}");
        count += 1;
    }
    assert_eq!(count, 64);
}
