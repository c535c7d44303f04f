//! The composable flow algebra: expressions built with `*`, executed against
//! an environment with full history tracking.
//!
//! Composition is total over the combinations that mean something: exploits
//! and expressions compose freely, and a state composed in front of an
//! expression seeds where execution starts. Combinations with no meaning
//! (two states, a state appearing mid-expression) simply do not exist at the
//! type level.

use std::net::Ipv4Addr;
use std::ops::Mul;

use thiserror::Error;

use crate::agents::qlearn::QLearn;
use crate::env::{EnvError, Environment};
use crate::exploit::{Exploit, ExploitKind};
use crate::state::{NetState, StateError};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("missing-options: {0} cannot run without its required options")]
    MissingOptions(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// An ordered sequence of actions, not yet bound to a starting state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowExpr {
    actions: Vec<Exploit>,
}

impl FlowExpr {
    pub fn empty() -> Self {
        FlowExpr::default()
    }

    pub fn actions(&self) -> &[Exploit] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn push(&mut self, action: Exploit) {
        self.actions.push(action);
    }
}

impl From<Exploit> for FlowExpr {
    fn from(action: Exploit) -> Self {
        FlowExpr {
            actions: vec![action],
        }
    }
}

/// An action sequence that starts execution from a captured state instead of
/// the flow's current one.
#[derive(Debug, Clone, PartialEq)]
pub struct SeededExpr {
    seed: NetState,
    expr: FlowExpr,
}

impl SeededExpr {
    pub fn seed(&self) -> &NetState {
        &self.seed
    }

    pub fn actions(&self) -> &[Exploit] {
        self.expr.actions()
    }
}

impl Mul<Exploit> for Exploit {
    type Output = FlowExpr;
    fn mul(self, rhs: Exploit) -> FlowExpr {
        FlowExpr {
            actions: vec![self, rhs],
        }
    }
}

impl Mul<FlowExpr> for Exploit {
    type Output = FlowExpr;
    fn mul(self, rhs: FlowExpr) -> FlowExpr {
        let mut actions = vec![self];
        actions.extend(rhs.actions);
        FlowExpr { actions }
    }
}

impl Mul<Exploit> for FlowExpr {
    type Output = FlowExpr;
    fn mul(mut self, rhs: Exploit) -> FlowExpr {
        self.actions.push(rhs);
        self
    }
}

impl Mul<FlowExpr> for FlowExpr {
    type Output = FlowExpr;
    fn mul(mut self, rhs: FlowExpr) -> FlowExpr {
        self.actions.extend(rhs.actions);
        self
    }
}

impl Mul<Exploit> for NetState {
    type Output = SeededExpr;
    fn mul(self, rhs: Exploit) -> SeededExpr {
        SeededExpr {
            seed: self,
            expr: rhs.into(),
        }
    }
}

impl Mul<FlowExpr> for NetState {
    type Output = SeededExpr;
    fn mul(self, rhs: FlowExpr) -> SeededExpr {
        SeededExpr {
            seed: self,
            expr: rhs,
        }
    }
}

impl Mul<Exploit> for SeededExpr {
    type Output = SeededExpr;
    fn mul(mut self, rhs: Exploit) -> SeededExpr {
        self.expr.actions.push(rhs);
        self
    }
}

impl Mul<FlowExpr> for SeededExpr {
    type Output = SeededExpr;
    fn mul(mut self, rhs: FlowExpr) -> SeededExpr {
        self.expr.actions.extend(rhs.actions);
        self
    }
}

/// Anything `Flow::run` accepts.
#[derive(Debug, Clone)]
pub enum RunExpr {
    Plain(FlowExpr),
    Seeded(SeededExpr),
}

impl From<FlowExpr> for RunExpr {
    fn from(expr: FlowExpr) -> Self {
        RunExpr::Plain(expr)
    }
}

impl From<SeededExpr> for RunExpr {
    fn from(expr: SeededExpr) -> Self {
        RunExpr::Seeded(expr)
    }
}

impl From<Exploit> for RunExpr {
    fn from(action: Exploit) -> Self {
        RunExpr::Plain(action.into())
    }
}

/// One executed step: full state snapshots on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub before: NetState,
    pub action: Exploit,
    pub reward: i64,
    pub after: NetState,
}

/// A flow: current network state, execution history since the last reset,
/// running reward total, and an optional learning model that survives resets.
#[derive(Debug)]
pub struct Flow {
    state: NetState,
    initial: NetState,
    history: Vec<HistoryEntry>,
    cumulative: i64,
    learning: Option<QLearn>,
}

impl Flow {
    pub fn new(env: &Environment) -> Self {
        let initial = env.empty_state();
        Flow {
            state: initial.clone(),
            initial,
            history: Vec::new(),
            cumulative: 0,
            learning: None,
        }
    }

    pub fn state(&self) -> &NetState {
        &self.state
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn cumulative_reward(&self) -> i64 {
        self.cumulative
    }

    /// State before the most recent action, if any action has run.
    pub fn last_state(&self) -> Option<&NetState> {
        self.history.last().map(|e| &e.before)
    }

    pub fn last_action(&self) -> Option<&Exploit> {
        self.history.last().map(|e| &e.action)
    }

    pub fn last_reward(&self) -> Option<i64> {
        self.history.last().map(|e| e.reward)
    }

    pub fn set_learning_model(&mut self, model: QLearn) {
        self.learning = Some(model);
    }

    pub fn learning_model(&self) -> Option<&QLearn> {
        self.learning.as_ref()
    }

    pub fn learning_model_mut(&mut self) -> Option<&mut QLearn> {
        self.learning.as_mut()
    }

    pub fn take_learning_model(&mut self) -> Option<QLearn> {
        self.learning.take()
    }

    /// Back to the empty scenario-universe state. History and reward are
    /// cleared; the learning model is retained.
    pub fn reset(&mut self) {
        self.state = self.initial.clone();
        self.history.clear();
        self.cumulative = 0;
    }

    /// Execute an expression in order against `env`, merging each action's
    /// observations into the flow state and appending to history. A run-level
    /// `target` applies to actions that take one but carry none themselves.
    ///
    /// Halts at the first erroring action: prior steps stay applied, the
    /// faulty one is never executed, so histories contain no phantom steps.
    pub fn run(
        &mut self,
        expr: impl Into<RunExpr>,
        target: Option<Ipv4Addr>,
        env: &Environment,
    ) -> Result<NetState, FlowError> {
        let (seed, actions) = match expr.into() {
            RunExpr::Plain(e) => (None, e.actions),
            RunExpr::Seeded(e) => (Some(e.seed), e.expr.actions),
        };
        if let Some(seed) = seed {
            self.state = seed;
        }
        for action in actions {
            let resolved = Self::resolve_target(action, target);
            if resolved.is_offensive() && resolved.missing() {
                return Err(FlowError::MissingOptions(resolved.name.clone()));
            }
            let outcome = env.execute(&resolved, &self.state)?;
            let before = self.state.clone();
            self.state.apply_delta(&outcome.delta)?;
            self.cumulative += outcome.reward;
            self.history.push(HistoryEntry {
                before,
                action: resolved,
                reward: outcome.reward,
                after: self.state.clone(),
            });
        }
        Ok(self.state.clone())
    }

    /// Fill in the run-level target for actions that aim at a host but carry
    /// no target of their own. Actions that ignore targets are left alone.
    fn resolve_target(action: Exploit, run_target: Option<Ipv4Addr>) -> Exploit {
        match action.kind {
            ExploitKind::Offensive | ExploitKind::ReconVersions => match run_target {
                Some(ip) if action.own_target().is_none() => action.with_target(ip),
                _ => action,
            },
            _ => action,
        }
    }
}
