//! Discrete actions: recon and offensive exploits grouped under one type so
//! flows compose uniformly, categorized along the security kill chain.

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

/// Kill-chain stage of an action. `None` covers non-exploits such as init
/// and idle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploitCategory {
    Reconnaissance,
    Weaponization,
    Delivery,
    Exploitation,
    Installation,
    CommandAndControl,
    None,
}

impl fmt::Display for ExploitCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExploitCategory::Reconnaissance => "reconnaissance",
            ExploitCategory::Weaponization => "weaponization",
            ExploitCategory::Delivery => "delivery",
            ExploitCategory::Exploitation => "exploitation",
            ExploitCategory::Installation => "installation",
            ExploitCategory::CommandAndControl => "command-and-control",
            ExploitCategory::None => "none",
        };
        f.write_str(s)
    }
}

/// Execution semantics of an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExploitKind {
    /// Anchors a flow; produces no traffic and no observations.
    Init,
    /// No action. Worth nothing, costs nothing.
    Idle,
    /// Fingerprinting: discover which universe IPs are live.
    ReconTargets,
    /// Footprinting: probe ports on a target (or on all known-live hosts)
    /// for open/closed status and service versions.
    ReconVersions,
    /// A real exploit attempt against one host.
    Offensive,
}

/// The option key carrying an offensive action's target host.
pub const OPT_RHOSTS: &str = "RHOSTS";
/// The option key carrying a footprinting action's port list (comma-separated).
pub const OPT_PORTS: &str = "PORTS";

/// The complete port list for thorough footprinting scans: commonly probed
/// TCP/UDP ports plus robotics-specific ones (ROS master, DDS discovery,
/// MAVLink).
pub const PORTS_COMPLETE: [u16; 72] = [
    20, 21, 22, 23, 25, 53, 67, 69, 80, 110, 111, 123, 135, 137, 139, 143, 161, 179, 194, 389, 443,
    445, 465, 512, 513, 514, 515, 554, 587, 631, 636, 873, 902, 990, 993, 995, 1080, 1433, 1521,
    1723, 1883, 2049, 2375, 3128, 3306, 3389, 5060, 5222, 5353, 5432, 5672, 5900, 6379, 7400, 7401,
    8000, 8080, 8443, 8883, 9000, 9090, 9200, 10000, 11211, 11311, 14550, 14580, 27017, 30001,
    47808, 50051, 55555,
];

/// A discrete action in an exploit flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exploit {
    /// Unique identifier within a flow's action set. Configured instances may
    /// carry an `@<ip>` suffix; the part before it names the catalog module.
    pub name: String,
    pub category: ExploitCategory,
    pub kind: ExploitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Ipv4Addr>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, String>,
    pub base_reward: i64,
}

impl Exploit {
    pub fn init() -> Self {
        Exploit {
            name: "init".to_string(),
            category: ExploitCategory::None,
            kind: ExploitKind::Init,
            target: None,
            options: BTreeMap::new(),
            base_reward: 0,
        }
    }

    pub fn idle() -> Self {
        Exploit {
            name: "idle".to_string(),
            category: ExploitCategory::None,
            kind: ExploitKind::Idle,
            target: None,
            options: BTreeMap::new(),
            base_reward: 0,
        }
    }

    /// Fingerprinting sweep over the scenario universe.
    pub fn recon_targets() -> Self {
        Exploit {
            name: "targets".to_string(),
            category: ExploitCategory::Reconnaissance,
            kind: ExploitKind::ReconTargets,
            target: None,
            options: BTreeMap::new(),
            base_reward: -10,
        }
    }

    /// Footprinting scan over the given ports. With an empty list the action
    /// still costs its base reward but sends no probes.
    pub fn recon_versions(ports: &[u16]) -> Self {
        let mut options = BTreeMap::new();
        if !ports.is_empty() {
            options.insert(
                OPT_PORTS.to_string(),
                ports
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        Exploit {
            name: "versions".to_string(),
            category: ExploitCategory::Reconnaissance,
            kind: ExploitKind::ReconVersions,
            target: None,
            options,
            base_reward: -10,
        }
    }

    /// A configured offensive exploit. `module` names the catalog entry;
    /// options typically carry RHOSTS plus whatever the predicate needs
    /// (USERNAME, PASSWORD, ...).
    pub fn offensive(module: &str, category: ExploitCategory) -> Self {
        Exploit {
            name: module.to_string(),
            category,
            kind: ExploitKind::Offensive,
            target: None,
            options: BTreeMap::new(),
            base_reward: -100,
        }
    }

    pub fn with_target(mut self, target: Ipv4Addr) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn set_options<I, K, V>(&mut self, options: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        for (k, v) in options {
            self.options.insert(k.into(), v.into());
        }
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.get(key).map(String::as_str)
    }

    /// Catalog module this instance maps to: the name up to any `@` suffix.
    pub fn module(&self) -> &str {
        self.name.split('@').next().unwrap_or(&self.name).trim()
    }

    /// Target resolved from the instance itself: explicit target first, then
    /// the RHOSTS option.
    pub fn own_target(&self) -> Option<Ipv4Addr> {
        self.target
            .or_else(|| self.option(OPT_RHOSTS).and_then(|s| s.parse().ok()))
    }

    /// Ports this action probes, parsed from its PORTS option.
    pub fn ports(&self) -> Vec<u16> {
        self.option(OPT_PORTS)
            .map(|s| s.split(',').filter_map(|p| p.trim().parse().ok()).collect())
            .unwrap_or_default()
    }

    /// True iff a required option is unset. Offensive actions require a
    /// target host; recon and non-actions have no required options.
    pub fn missing(&self) -> bool {
        self.kind == ExploitKind::Offensive && self.own_target().is_none()
    }

    pub fn is_offensive(&self) -> bool {
        self.kind == ExploitKind::Offensive
    }
}

impl fmt::Display for Exploit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_port_list_is_calibrated() {
        assert_eq!(PORTS_COMPLETE.len(), 72);
        let mut sorted = PORTS_COMPLETE.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 72, "port list must not contain duplicates");
    }

    #[test]
    fn offensive_base_reward_is_minus_100() {
        let e = Exploit::offensive("ssh_login", ExploitCategory::Exploitation);
        assert_eq!(e.base_reward, -100);
    }

    #[test]
    fn missing_reflects_unset_target() {
        let mut e = Exploit::offensive("ssh_login", ExploitCategory::Exploitation);
        assert!(e.missing());
        e.set_options([(OPT_RHOSTS, "192.168.2.10")]);
        assert!(!e.missing());
        assert_eq!(e.own_target(), Some("192.168.2.10".parse().unwrap()));
    }

    #[test]
    fn recon_actions_are_never_missing() {
        assert!(!Exploit::recon_targets().missing());
        assert!(!Exploit::recon_versions(&[]).missing());
        assert!(!Exploit::idle().missing());
    }

    #[test]
    fn module_strips_instance_suffix() {
        let e = Exploit::offensive("ssh_login", ExploitCategory::Exploitation)
            .with_name("ssh_login@10.0.0.2");
        assert_eq!(e.module(), "ssh_login");
        assert_eq!(Exploit::idle().module(), "idle");
    }

    #[test]
    fn versions_roundtrips_port_list() {
        let e = Exploit::recon_versions(&[22, 80, 443]);
        assert_eq!(e.ports(), vec![22, 80, 443]);
        assert!(Exploit::recon_versions(&[]).ports().is_empty());
    }
}
