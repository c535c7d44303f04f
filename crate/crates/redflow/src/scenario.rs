//! Declarative description of the simulated network and its loader.

use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::EncodingParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("duplicate host ip {0}")]
    DuplicateIp(Ipv4Addr),
    #[error("host {host} is vulnerable to {exploit}, which is not in the exploit catalog")]
    UnknownExploit { host: Ipv4Addr, exploit: String },
    #[error("unknown bundled scenario {0:?} (bundled: ur3_ctf, toy2)")]
    UnknownBundled(String),
}

/// An open port on a scenario host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortSpec {
    pub port: u16,
    pub service: String,
    pub version: String,
}

/// Service credentials valid on a host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CredentialSpec {
    pub user: String,
    pub pass: String,
}

/// Declares that a host falls to a catalog exploit when the attempt carries
/// the required option values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VulnerabilitySpec {
    pub exploit: String,
    #[serde(default)]
    pub requires: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostSpec {
    pub ip: Ipv4Addr,
    #[serde(default)]
    pub ports: Vec<PortSpec>,
    #[serde(default)]
    pub credentials: BTreeMap<String, CredentialSpec>,
    #[serde(default)]
    pub vulnerable_to: Vec<VulnerabilitySpec>,
}

impl HostSpec {
    pub fn port(&self, port: u16) -> Option<&PortSpec> {
        self.ports.iter().find(|p| p.port == port)
    }
}

/// The simulated network. `monitored_ports` and `exploits` fix the canonical
/// orderings that the state model and encoding rely on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub hosts: Vec<HostSpec>,
    pub monitored_ports: Vec<u16>,
    pub exploits: Vec<String>,
    /// Reserved for stochastic extensions; the bundled scenarios are fully
    /// deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_json(json: &str) -> Result<Self, LoadError> {
        let scenario: Scenario = serde_json::from_str(json)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolve a bundled scenario name, or fall back to a file path.
    pub fn resolve(name_or_path: &str) -> Result<Self, LoadError> {
        match bundled(name_or_path) {
            Some(json) => Self::from_json(json),
            None if Path::new(name_or_path).exists() => Self::load(name_or_path),
            None => Err(LoadError::UnknownBundled(name_or_path.to_string())),
        }
    }

    fn validate(&self) -> Result<(), LoadError> {
        if self.version != SCHEMA_VERSION {
            return Err(LoadError::Version(self.version));
        }
        let mut seen = BTreeSet::new();
        for host in &self.hosts {
            if !seen.insert(host.ip) {
                return Err(LoadError::DuplicateIp(host.ip));
            }
            for vuln in &host.vulnerable_to {
                if !self.exploits.contains(&vuln.exploit) {
                    return Err(LoadError::UnknownExploit {
                        host: host.ip,
                        exploit: vuln.exploit.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The IP universe in canonical ascending order.
    pub fn universe(&self) -> Vec<Ipv4Addr> {
        let mut ips: Vec<Ipv4Addr> = self.hosts.iter().map(|h| h.ip).collect();
        ips.sort_unstable();
        ips
    }

    pub fn host(&self, ip: Ipv4Addr) -> Option<&HostSpec> {
        self.hosts.iter().find(|h| h.ip == ip)
    }

    pub fn encoding_params(&self) -> EncodingParams {
        EncodingParams::new(
            self.hosts.len(),
            self.monitored_ports.len(),
            self.exploits.len(),
        )
    }
}

/// JSON text of a bundled scenario, if the name matches one.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "ur3_ctf" => Some(include_str!("../scenarios/ur3_ctf.json")),
        "toy2" => Some(include_str!("../scenarios/toy2.json")),
        _ => None,
    }
}

pub fn bundled_names() -> Vec<&'static str> {
    vec!["ur3_ctf", "toy2"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_ur3_has_seven_hosts_with_ssh_target() {
        let s = Scenario::from_json(bundled("ur3_ctf").unwrap()).unwrap();
        assert_eq!(s.hosts.len(), 7);
        assert_eq!(s.monitored_ports.len(), 9);
        assert_eq!(s.exploits.len(), 12);
        let ur3 = s.host("192.168.2.10".parse().unwrap()).expect("UR3 host");
        let ssh = ur3.port(22).expect("port 22 open");
        assert_eq!(ssh.service, "ssh");
        assert_eq!(ur3.credentials["ssh"].user, "root");
        assert_eq!(ur3.credentials["ssh"].pass, "easybot");
    }

    #[test]
    fn bundled_toy2_matches_exhaustive_test_dimensions() {
        let s = Scenario::from_json(bundled("toy2").unwrap()).unwrap();
        assert_eq!(s.hosts.len(), 2);
        assert_eq!(s.monitored_ports.len(), 2);
        assert_eq!(s.exploits.len(), 1);
    }

    #[test]
    fn empty_host_list_is_valid() {
        let s = Scenario::from_json(
            r#"{"version":1,"hosts":[],"monitored_ports":[22],"exploits":["ssh_login"]}"#,
        )
        .unwrap();
        assert_eq!(s.universe().len(), 0);
        assert_eq!(crate::state::encoding_size(&s.encoding_params()), 0);
    }

    #[test]
    fn undeclared_exploit_reference_is_rejected() {
        let err = Scenario::from_json(
            r#"{"version":1,"hosts":[{"ip":"10.0.0.1","vulnerable_to":[{"exploit":"nope"}]}],
                "monitored_ports":[22],"exploits":["ssh_login"]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, LoadError::UnknownExploit { .. }));
    }

    #[test]
    fn duplicate_ip_is_rejected() {
        let err = Scenario::from_json(
            r#"{"version":1,"hosts":[{"ip":"10.0.0.1"},{"ip":"10.0.0.1"}],
                "monitored_ports":[],"exploits":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, LoadError::DuplicateIp(_)));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let err =
            Scenario::from_json(r#"{"version":9,"hosts":[],"monitored_ports":[],"exploits":[]}"#)
                .unwrap_err();
        assert!(matches!(err, LoadError::Version(9)));
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(matches!(Scenario::from_json("{"), Err(LoadError::Parse(_))));
    }

    #[test]
    fn unknown_bundled_name_without_file_errors() {
        assert!(matches!(
            Scenario::resolve("no_such_scenario"),
            Err(LoadError::UnknownBundled(_))
        ));
    }
}
