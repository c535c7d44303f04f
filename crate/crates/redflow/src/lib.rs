//! redflow: composable recon/exploit action flows over a deterministic
//! network simulator.
//!
//! Actions (recon and offensive alike) compose with `*` into expressions; a
//! [`Flow`] executes them against an [`Environment`], capturing the network
//! state after every discrete step. On top of that sit three actors — a
//! tabular Q-Learning agent, a scripted expert, and a brute-force
//! permutation runner — plus attack-graph export and a comparison report.
//!
//! ```
//! use redflow::{Environment, Exploit, Flow, Scenario};
//!
//! let scenario = Scenario::resolve("ur3_ctf").unwrap();
//! let env = Environment::new(scenario);
//! let mut flow = Flow::new(&env);
//! let expr = Exploit::init() * Exploit::recon_targets();
//! let state = flow.run(expr, None, &env).unwrap();
//! assert!(state.hosts.values().all(|h| h.live == Some(true)));
//! ```

pub mod agents;
pub mod env;
pub mod exploit;
pub mod flow;
pub mod graph;
pub mod scenario;
pub mod state;

pub use agents::brute::{brute_force, brute_force_default};
pub use agents::expert::{expert_flow, ExpertPlaybook};
pub use agents::qlearn::{QLearn, StateKey};
pub use agents::{
    action_set, greedy_rollout, train, train_and_evaluate, ActorRun, TrainReport, TrainingConfig,
};
pub use env::{EnvError, Environment, ExecOutcome, RewardScheme};
pub use exploit::{Exploit, ExploitCategory, ExploitKind, PORTS_COMPLETE};
pub use flow::{Flow, FlowError, FlowExpr, HistoryEntry, RunExpr, SeededExpr};
pub use graph::{AttackGraph, BenchReport, GraphEdge, GraphNode, ReportRow};
pub use scenario::{bundled, bundled_names, HostSpec, LoadError, Scenario};
pub use state::{
    encoding_size, Bits, EncodingParams, HostState, NetState, PortStatus, StateDelta, StateError,
};
