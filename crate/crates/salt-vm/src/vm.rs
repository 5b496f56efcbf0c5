use salt::catalog::{TIMEOUT_WORD, TIMER_WORD};
use salt::{Input, Message, MessageKind, Transducer, Transition};
use serde::Serialize;

use crate::store::VariableStore;
use crate::VmError;

/// Maximum number of settle firings per stimulus.
pub const CHAIN_BUDGET: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Destination {
    /// External message, fanned out to subscribers.
    ToSubscribers,
    /// Hardware actuation.
    ToHardware,
    /// Logical operation or timer start, already applied inside the VM.
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Emitted {
    pub destination: Destination,
    pub message: Message,
}

/// Messages produced by one delivery, in execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Emission(Vec<Emitted>);

impl Emission {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Emitted> {
        self.0.iter()
    }

    /// External messages bound for subscribers.
    pub fn external(&self) -> impl Iterator<Item = &Message> {
        self.by(Destination::ToSubscribers)
    }

    /// Hardware actuations.
    pub fn hardware(&self) -> impl Iterator<Item = &Message> {
        self.by(Destination::ToHardware)
    }

    /// External and hardware messages, in emission order.
    pub fn visible(&self) -> impl Iterator<Item = &Message> {
        self.0
            .iter()
            .filter(|e| e.destination != Destination::Internal)
            .map(|e| &e.message)
    }

    fn by(&self, dest: Destination) -> impl Iterator<Item = &Message> {
        self.0
            .iter()
            .filter(move |e| e.destination == dest)
            .map(|e| &e.message)
    }

    pub fn extend(&mut self, other: Emission) {
        self.0.extend(other.0);
    }

    fn push(&mut self, destination: Destination, message: Message) {
        self.0.push(Emitted { destination, message });
    }
}

impl IntoIterator for Emission {
    type Item = Emitted;
    type IntoIter = std::vec::IntoIter<Emitted>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Timer {
    id: u64,
    remaining: u64,
}

/// Mutable part of the VM, split from the program so transitions can be
/// borrowed while executing.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Runtime {
    current: String,
    vars: VariableStore,
    timers: Vec<Timer>,
    next_timer: u64,
}

/// A running transducer.
///
/// Each stimulus is applied atomically: if it raises an error the VM is
/// left exactly as it was before the call.
#[derive(Debug, Clone)]
pub struct Vm {
    program: Transducer,
    rt: Runtime,
    chain_budget: u32,
}

impl Vm {
    /// Starts at the initial state with an empty store and settles once.
    pub fn new(program: Transducer) -> Result<(Vm, Emission), VmError> {
        let mut vm = Vm {
            rt: Runtime {
                current: program.initial().to_string(),
                vars: VariableStore::new(),
                timers: Vec::new(),
                next_timer: 0,
            },
            program,
            chain_budget: CHAIN_BUDGET,
        };
        let mut emission = Emission::default();
        vm.settle(&mut emission)?;
        Ok((vm, emission))
    }

    pub fn program(&self) -> &Transducer {
        &self.program
    }

    pub fn current(&self) -> &str {
        &self.rt.current
    }

    pub fn vars(&self) -> &VariableStore {
        &self.rt.vars
    }

    /// Settle firings left for the stimulus being processed.
    pub fn chain_budget(&self) -> u32 {
        self.chain_budget
    }

    /// Pending timers as `(id, remaining ticks)`, in creation order.
    pub fn pending_timers(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.rt.timers.iter().map(|t| (t.id, t.remaining))
    }

    /// Delivers an external or hardware stimulus.
    ///
    /// The first transition (in declaration order) leaving the current
    /// state whose input has the same kind and word fires. Unmatched
    /// stimuli are dropped and yield an empty emission.
    pub fn step(&mut self, stimulus: &Message) -> Result<Emission, VmError> {
        if stimulus.kind == MessageKind::Logical {
            return Err(VmError::InvalidStimulus("logical messages are internal".into()));
        }
        stimulus
            .check()
            .map_err(|e| VmError::InvalidStimulus(e.to_string()))?;

        let snapshot = self.rt.clone();
        let result = self.step_inner(stimulus);
        if result.is_err() {
            self.rt = snapshot;
        }
        result
    }

    fn step_inner(&mut self, stimulus: &Message) -> Result<Emission, VmError> {
        self.chain_budget = CHAIN_BUDGET;
        let mut emission = Emission::default();
        let matched = self
            .program
            .transitions()
            .iter()
            .find(|t| t.from == self.rt.current && matches_stimulus(t, stimulus));
        let Some(transition) = matched else {
            return Ok(emission);
        };
        self.rt.execute(transition, &stimulus.args, &mut emission)?;
        self.settle(&mut emission)?;
        Ok(emission)
    }

    /// Fires epsilon transitions and true logical tests until none applies.
    fn settle(&mut self, emission: &mut Emission) -> Result<(), VmError> {
        self.chain_budget = CHAIN_BUDGET;
        loop {
            let rt = &self.rt;
            let next = self.program.transitions().iter().find(|t| {
                t.from == rt.current
                    && match &t.input {
                        Input::Epsilon => true,
                        Input::Message(m) => match m.logical_op() {
                            Some(op) => rt.vars.test(op, &m.args[0], &m.args[1]),
                            None => false,
                        },
                    }
            });
            let Some(transition) = next else {
                return Ok(());
            };
            if self.chain_budget == 0 {
                return Err(VmError::ChainLimitExceeded {
                    state: self.rt.current.clone(),
                });
            }
            self.chain_budget -= 1;
            self.rt.execute(transition, &[], emission)?;
        }
    }

    /// Advances every pending timer by `elapsed` ticks. Each timer reaching
    /// zero injects a hardware `timeout` stimulus, in timer creation order.
    pub fn tick(&mut self, elapsed: u64) -> Result<Emission, VmError> {
        let mut emission = Emission::default();
        if elapsed == 0 || self.rt.timers.is_empty() {
            return Ok(emission);
        }
        for t in &mut self.rt.timers {
            t.remaining = t.remaining.saturating_sub(elapsed);
        }
        let expired = self.rt.timers.iter().filter(|t| t.remaining == 0).count();
        self.rt.timers.retain(|t| t.remaining > 0);

        let timeout = Message {
            kind: MessageKind::Hardware,
            word: TIMEOUT_WORD.to_string(),
            args: Vec::new(),
        };
        for _ in 0..expired {
            emission.extend(self.step(&timeout)?);
        }
        Ok(emission)
    }
}

fn matches_stimulus(t: &Transition, stimulus: &Message) -> bool {
    let Input::Message(pattern) = &t.input else {
        return false;
    };
    if pattern.kind != stimulus.kind || pattern.word != stimulus.word {
        return false;
    }
    // hardware inputs match on the word; external patterns with
    // arguments require the same arguments
    match pattern.kind {
        MessageKind::External if !pattern.args.is_empty() => pattern.args == stimulus.args,
        _ => true,
    }
}

impl Runtime {
    fn execute(&mut self, t: &Transition, bound: &[String], emission: &mut Emission) -> Result<(), VmError> {
        // stimulus arguments are visible as $1, $2, ... while outputs run
        let names: Vec<String> = (1..=bound.len()).map(|i| format!("${i}")).collect();
        for (name, value) in names.iter().zip(bound) {
            self.vars.insert(name, value.clone());
        }
        let result = self.run_outputs(t, emission);
        for name in &names {
            self.vars.remove(name);
        }
        result?;
        self.current.clone_from(&t.to);
        Ok(())
    }

    fn run_outputs(&mut self, t: &Transition, emission: &mut Emission) -> Result<(), VmError> {
        for out in &t.outputs {
            match out.kind {
                MessageKind::Logical => {
                    let op = out
                        .logical_op()
                        .ok_or_else(|| VmError::Arithmetic(format!("unknown operator `{}`", out.word)))?;
                    self.vars.apply(op, &out.args[0], &out.args[1])?;
                    emission.push(Destination::Internal, out.clone());
                }
                MessageKind::Hardware if out.word == TIMER_WORD => {
                    let arg = out.args.first().map(|a| self.vars.resolve(a)).unwrap_or("");
                    let ticks = arg
                        .parse::<u64>()
                        .ok()
                        .filter(|&n| n > 0)
                        .ok_or_else(|| VmError::InvalidTimer(arg.to_string()))?;
                    self.timers.push(Timer {
                        id: self.next_timer,
                        remaining: ticks,
                    });
                    self.next_timer += 1;
                    emission.push(Destination::Internal, out.clone());
                }
                kind => {
                    let message = Message {
                        kind,
                        word: out.word.clone(),
                        args: out.args.iter().map(|a| self.bound_arg(a)).collect(),
                    };
                    let dest = if kind == MessageKind::External {
                        Destination::ToSubscribers
                    } else {
                        Destination::ToHardware
                    };
                    emission.push(dest, message);
                }
            }
        }
        Ok(())
    }

    /// `$k` arguments of external and hardware outputs are replaced by the
    /// bound stimulus argument; other arguments are literal.
    fn bound_arg(&self, arg: &str) -> String {
        match arg.starts_with('$') {
            true => self.vars.resolve(arg).to_string(),
            false => arg.to_string(),
        }
    }
}
