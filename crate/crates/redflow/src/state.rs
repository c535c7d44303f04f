//! Host-keyed network state: per-host port status and exploit-launch records,
//! merge semantics, and the one-hot encoding used as the learning observation.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("host-exists: {0} is already tracked")]
    HostExists(Ipv4Addr),
    #[error("unknown-state-type: cannot merge this value into a network state")]
    UnknownStateType,
    #[error("encoding-shape: state does not match encoding parameters ({0})")]
    EncodingShape(String),
    #[error("unknown-host: {0} is not part of the tracked universe")]
    UnknownHost(Ipv4Addr),
}

/// Observed status of one monitored port on one host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortStatus {
    pub port: u16,
    pub open: bool,
    /// Service banner, only present once the port has been seen open.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpe: Option<String>,
}

impl PortStatus {
    pub fn closed(port: u16) -> Self {
        PortStatus {
            port,
            open: false,
            version: None,
            cpe: None,
        }
    }
}

/// Whether a catalog exploit has been launched against a host. Launch is
/// recorded regardless of outcome; success/failure is deliberately not kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploitRecord {
    pub name: String,
    pub launched: bool,
}

/// Per-host slice of the network state. Port and exploit slots follow the
/// scenario's canonical orderings so every host encodes identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostState {
    pub ip: Ipv4Addr,
    /// None until fingerprinting has confirmed the host either way.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub live: Option<bool>,
    pub ports: Vec<PortStatus>,
    pub exploits: Vec<ExploitRecord>,
}

impl HostState {
    pub fn empty(ip: Ipv4Addr, port_order: &[u16], exploit_order: &[String]) -> Self {
        HostState {
            ip,
            live: None,
            ports: port_order.iter().map(|&p| PortStatus::closed(p)).collect(),
            exploits: exploit_order
                .iter()
                .map(|n| ExploitRecord {
                    name: n.clone(),
                    launched: false,
                })
                .collect(),
        }
    }

    pub fn open_ports(&self) -> impl Iterator<Item = &PortStatus> {
        self.ports.iter().filter(|p| p.open)
    }

    fn port_mut(&mut self, port: u16) -> Option<&mut PortStatus> {
        self.ports.iter_mut().find(|p| p.port == port)
    }

    fn exploit_mut(&mut self, name: &str) -> Option<&mut ExploitRecord> {
        self.exploits.iter_mut().find(|e| e.name == name)
    }

    /// True when the entry carries any observation beyond its empty shape.
    pub fn is_populated(&self) -> bool {
        self.live.is_some()
            || self
                .ports
                .iter()
                .any(|p| p.open || p.version.is_some() || p.cpe.is_some())
            || self.exploits.iter().any(|e| e.launched)
    }
}

/// The network state: one entry per IP in the scenario universe, all sharing
/// the same port/exploit slot orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetState {
    pub hosts: BTreeMap<Ipv4Addr, HostState>,
    port_order: Vec<u16>,
    exploit_order: Vec<String>,
}

/// One host's worth of new observations produced by executing an action.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HostDelta {
    pub live: Option<bool>,
    pub ports: Vec<PortStatus>,
    pub launched: Vec<String>,
}

/// Sparse observation emitted by the environment; applied monotonically so
/// launched flags never revert within an episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateDelta {
    pub hosts: BTreeMap<Ipv4Addr, HostDelta>,
}

impl StateDelta {
    pub fn is_empty(&self) -> bool {
        self.hosts.is_empty()
    }

    pub fn host(&mut self, ip: Ipv4Addr) -> &mut HostDelta {
        self.hosts.entry(ip).or_default()
    }
}

impl NetState {
    /// Empty state over the given universe: every host tracked, all ports
    /// closed, nothing launched.
    pub fn empty(universe: &[Ipv4Addr], port_order: &[u16], exploit_order: &[String]) -> Self {
        let mut state = NetState {
            hosts: BTreeMap::new(),
            port_order: port_order.to_vec(),
            exploit_order: exploit_order.to_vec(),
        };
        for &ip in universe {
            // universe construction is validated upstream; duplicates cannot occur here
            let _ = state.add_new(ip);
        }
        state
    }

    pub fn port_order(&self) -> &[u16] {
        &self.port_order
    }

    pub fn exploit_order(&self) -> &[String] {
        &self.exploit_order
    }

    /// Track a new host with all ports closed and all exploits un-launched.
    pub fn add_new(&mut self, ip: Ipv4Addr) -> Result<(), StateError> {
        if self.hosts.contains_key(&ip) {
            return Err(StateError::HostExists(ip));
        }
        self.hosts.insert(
            ip,
            HostState::empty(ip, &self.port_order, &self.exploit_order),
        );
        Ok(())
    }

    pub fn host(&self, ip: Ipv4Addr) -> Option<&HostState> {
        self.hosts.get(&ip)
    }

    /// Replace the entry at `target` with the given host snapshot, whether it
    /// exists or not, as long as the target belongs to the universe.
    pub fn merge_host(&mut self, new: HostState, target: Ipv4Addr) -> Result<(), StateError> {
        if !self.hosts.contains_key(&target) {
            return Err(StateError::UnknownHost(target));
        }
        let mut entry = new;
        entry.ip = target;
        self.hosts.insert(target, entry);
        Ok(())
    }

    /// Overwrite this state with the populated entries of `new`. Entries that
    /// carry no observations leave the current ones untouched.
    pub fn merge_net(&mut self, new: &NetState) {
        for (ip, host) in &new.hosts {
            if host.is_populated() {
                self.hosts.insert(*ip, host.clone());
            }
        }
    }

    /// Apply an observation delta. Port observations overwrite, launched
    /// flags only ever go from false to true.
    pub fn apply_delta(&mut self, delta: &StateDelta) -> Result<(), StateError> {
        for (ip, hd) in &delta.hosts {
            let host = self.hosts.get_mut(ip).ok_or(StateError::UnknownHost(*ip))?;
            if let Some(live) = hd.live {
                host.live = Some(live);
            }
            for obs in &hd.ports {
                let slot = host.port_mut(obs.port).ok_or_else(|| {
                    StateError::EncodingShape(format!("port {} not monitored", obs.port))
                })?;
                *slot = obs.clone();
            }
            for name in &hd.launched {
                let rec = host.exploit_mut(name).ok_or_else(|| {
                    StateError::EncodingShape(format!("exploit {name} not in catalog"))
                })?;
                rec.launched = true;
            }
        }
        Ok(())
    }

    /// One-hot encode into a flat bit vector, hosts in ascending IP order.
    ///
    /// Layout per host: for each port slot, the slot's one-hot identity over
    /// the monitored set followed by its state bit; then for each exploit
    /// slot, its one-hot identity over the catalog followed by its launched
    /// bit. Identity bits are fixed by the scenario; only state and launched
    /// bits vary.
    pub fn one_hot_encode(&self, params: &EncodingParams) -> Result<Bits, StateError> {
        if self.hosts.len() != params.hosts {
            return Err(StateError::EncodingShape(format!(
                "expected {} hosts, state has {}",
                params.hosts,
                self.hosts.len()
            )));
        }
        let mut bits = Bits::with_capacity(encoding_size(params) as usize);
        for host in self.hosts.values() {
            if host.ports.len() != params.ports || host.exploits.len() != params.exploits {
                return Err(StateError::EncodingShape(format!(
                    "host {} has {} port / {} exploit slots, expected {} / {}",
                    host.ip,
                    host.ports.len(),
                    host.exploits.len(),
                    params.ports,
                    params.exploits
                )));
            }
            for (i, port) in host.ports.iter().enumerate() {
                for j in 0..params.ports {
                    bits.push(j == i);
                }
                for _ in 0..params.port_bits {
                    bits.push(port.open);
                }
            }
            for (i, rec) in host.exploits.iter().enumerate() {
                for j in 0..params.exploits {
                    bits.push(j == i);
                }
                for _ in 0..params.exploit_bits {
                    bits.push(rec.launched);
                }
            }
            for _ in 0..params.system_bits {
                bits.push(false);
            }
        }
        Ok(bits)
    }
}

/// Dimensions of the one-hot encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingParams {
    /// y: number of IPs in the universe.
    pub hosts: usize,
    /// n: number of monitored ports.
    pub ports: usize,
    /// l: state bits per port.
    pub port_bits: usize,
    /// m: number of catalog exploits.
    pub exploits: usize,
    /// b: state bits per exploit.
    pub exploit_bits: usize,
    /// s: system metadata bits per host.
    pub system_bits: usize,
}

impl EncodingParams {
    pub fn new(hosts: usize, ports: usize, exploits: usize) -> Self {
        EncodingParams {
            hosts,
            ports,
            port_bits: 1,
            exploits,
            exploit_bits: 1,
            system_bits: 0,
        }
    }

    pub fn per_host_width(&self) -> u64 {
        let n = self.ports as u64;
        let m = self.exploits as u64;
        n * (n + self.port_bits as u64)
            + m * (m + self.exploit_bits as u64)
            + self.system_bits as u64
    }
}

/// Total encoded width: y * [n*(n+l) + m*(m+b) + s].
pub fn encoding_size(params: &EncodingParams) -> u64 {
    params.hosts as u64 * params.per_host_width()
}

/// Packed bit vector; the canonical encoded form of a state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

impl Bits {
    pub fn with_capacity(bits: usize) -> Self {
        Bits {
            len: 0,
            bytes: Vec::with_capacity(bits / 8 + 1),
        }
    }

    pub fn push(&mut self, bit: bool) {
        let byte = self.len / 8;
        if byte == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[byte] |= 1 << (self.len % 8);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, idx: usize) -> bool {
        assert!(
            idx < self.len,
            "bit index {idx} out of range (len {})",
            self.len
        );
        self.bytes[idx / 8] & (1 << (idx % 8)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Hex form used for Q-table keys and reports.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.bytes.len() * 2);
        for b in &self.bytes {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    /// Stable 64-bit fingerprint (FNV-1a over length and packed bytes).
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut step = |byte: u8| {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        };
        for byte in (self.len as u64).to_le_bytes() {
            step(byte);
        }
        for &byte in &self.bytes {
            step(byte);
        }
        hash
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        let mut bits = Bits::default();
        for b in iter {
            bits.push(b);
        }
        bits
    }
}
