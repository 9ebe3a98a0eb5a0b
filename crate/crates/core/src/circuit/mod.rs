//! Reversible-gate intermediate representation.
//!
//! The gate set is the classical-reversible family (X, controlled-X up to
//! arbitrary control counts, SWAP, controlled SWAP). Every circuit built in
//! this crate compiles down to these gates, which keeps simulation a pure
//! permutation of computational basis states.

mod resources;
mod sim;
mod textfmt;
mod transform;

pub use resources::ResourceReport;
pub use sim::BitString;
pub use textfmt::{parse_circuit, write_circuit};

use indexmap::IndexMap;

use crate::fixedpoint::FixedPointFormat;

/// Qubit index inside a circuit.
pub type Qubit = u32;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("register name `{0}` already in use")]
    DuplicateRegister(String),
    #[error("gate touches qubit {qubit} but the circuit has only {num_qubits} qubits")]
    QubitOutOfRange { qubit: Qubit, num_qubits: u32 },
    #[error("gate uses qubit {0} more than once")]
    RepeatedQubit(Qubit),
    #[error("input has {got} bits, circuit has {want} qubits")]
    InputLength { got: usize, want: usize },
    #[error("control qubits must lie outside the circuit (qubit {0} is inside)")]
    ControlOverlap(Qubit),
    #[error("ancilla pool too small: need {need} clean qubits, have {have}")]
    InsufficientAncillas { need: usize, have: usize },
    #[error("ancilla pool qubit {0} collides with a gate it should lower")]
    PoolCollision(Qubit),
    #[error("register `{name}` has width {width} but format needs {expect}")]
    FormatWidth { name: String, width: u32, expect: u32 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Gate kinds, used for resource accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    X,
    Cx,
    Ccx,
    Mcx,
    Swap,
    Cswap,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Cx => "cx",
            GateKind::Ccx => "ccx",
            GateKind::Mcx => "mcx",
            GateKind::Swap => "swap",
            GateKind::Cswap => "cswap",
        }
    }
}

/// A single reversible gate. All gates in this set are self-inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    X { target: Qubit },
    Cx { control: Qubit, target: Qubit },
    Ccx { controls: [Qubit; 2], target: Qubit },
    Mcx { controls: Vec<Qubit>, target: Qubit },
    Swap { a: Qubit, b: Qubit },
    Cswap { control: Qubit, a: Qubit, b: Qubit },
}

impl Gate {
    /// Build an X with `controls` control qubits, normalising the kind.
    pub fn mcx(mut controls: Vec<Qubit>, target: Qubit) -> Gate {
        match controls.len() {
            0 => Gate::X { target },
            1 => Gate::Cx {
                control: controls[0],
                target,
            },
            2 => Gate::Ccx {
                controls: [controls[0], controls[1]],
                target,
            },
            _ => {
                controls.sort_unstable();
                Gate::Mcx { controls, target }
            }
        }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X { .. } => GateKind::X,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Ccx { .. } => GateKind::Ccx,
            Gate::Mcx { .. } => GateKind::Mcx,
            Gate::Swap { .. } => GateKind::Swap,
            Gate::Cswap { .. } => GateKind::Cswap,
        }
    }

    pub fn controls(&self) -> &[Qubit] {
        match self {
            Gate::X { .. } | Gate::Swap { .. } => &[],
            Gate::Cx { control, .. } => std::slice::from_ref(control),
            Gate::Ccx { controls, .. } => controls,
            Gate::Mcx { controls, .. } => controls,
            Gate::Cswap { control, .. } => std::slice::from_ref(control),
        }
    }

    pub fn targets(&self) -> Vec<Qubit> {
        match self {
            Gate::X { target }
            | Gate::Cx { target, .. }
            | Gate::Ccx { target, .. }
            | Gate::Mcx { target, .. } => vec![*target],
            Gate::Swap { a, b } | Gate::Cswap { a, b, .. } => vec![*a, *b],
        }
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> Vec<Qubit> {
        let mut q: Vec<Qubit> = self.controls().to_vec();
        q.extend(self.targets());
        q
    }

    fn validate(&self, num_qubits: u32) -> Result<(), CircuitError> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
        }
        let mut seen = qs.clone();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(CircuitError::RepeatedQubit(w[0]));
            }
        }
        if let Gate::Mcx { controls, .. } = self {
            debug_assert!(!controls.is_empty());
        }
        Ok(())
    }
}

/// Named, contiguous qubit slice with an optional fixed-point format.
///
/// Qubit 0 of a register is its least significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterHandle {
    name: String,
    start: Qubit,
    width: u32,
    format: Option<FixedPointFormat>,
    ancilla: bool,
}

impl RegisterHandle {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_ancilla(&self) -> bool {
        self.ancilla
    }

    pub fn format(&self) -> Option<&FixedPointFormat> {
        self.format.as_ref()
    }

    /// Index of bit `i` (least significant first).
    pub fn bit(&self, i: u32) -> Qubit {
        assert!(i < self.width, "bit {i} out of register `{}`", self.name);
        self.start + i
    }

    /// All qubit indices, least significant first.
    pub fn bits(&self) -> Vec<Qubit> {
        (self.start..self.start + self.width).collect()
    }

    pub fn start(&self) -> Qubit {
        self.start
    }

    /// Sub-slice `[lo, hi)` of the register, as raw qubit indices.
    pub fn slice(&self, lo: u32, hi: u32) -> Vec<Qubit> {
        assert!(lo <= hi && hi <= self.width);
        (self.start + lo..self.start + hi).collect()
    }
}

/// Immutable gate-level circuit with a register table.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: u32,
    gates: Vec<Gate>,
    registers: IndexMap<String, RegisterHandle>,
}

impl Circuit {
    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn register(&self, name: &str) -> Option<&RegisterHandle> {
        self.registers.get(name)
    }

    pub fn registers(&self) -> impl Iterator<Item = &RegisterHandle> {
        self.registers.values()
    }
}

/// Mutable builder; circuits are immutable once built.
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    num_qubits: u32,
    gates: Vec<Gate>,
    registers: IndexMap<String, RegisterHandle>,
    control_stack: Vec<Qubit>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    /// Number of gates emitted so far. Used to mark ranges for later
    /// adjoint replay.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Allocate a fresh contiguous register at the top of the circuit.
    pub fn allocate_register(
        &mut self,
        name: &str,
        width: u32,
        format: Option<FixedPointFormat>,
        ancilla: bool,
    ) -> Result<RegisterHandle, CircuitError> {
        if self.registers.contains_key(name) {
            return Err(CircuitError::DuplicateRegister(name.to_string()));
        }
        if let Some(fmt) = &format {
            if fmt.width() != width {
                return Err(CircuitError::FormatWidth {
                    name: name.to_string(),
                    width,
                    expect: fmt.width(),
                });
            }
        }
        let handle = RegisterHandle {
            name: name.to_string(),
            start: self.num_qubits,
            width,
            format,
            ancilla,
        };
        self.num_qubits += width;
        self.registers.insert(name.to_string(), handle.clone());
        Ok(handle)
    }

    /// Push a gate, folding in any controls from the active control scope.
    pub fn push(&mut self, gate: Gate) {
        let gate = if self.control_stack.is_empty() {
            gate
        } else {
            self.apply_controls(gate)
        };
        if let Some(g) = self.finish_gate(gate) {
            self.gates.push(g);
        }
    }

    fn finish_gate(&mut self, gate: Gate) -> Option<Gate> {
        gate.validate(self.num_qubits)
            .unwrap_or_else(|e| panic!("invalid gate {gate:?}: {e}"));
        Some(gate)
    }

    fn push_validated(&mut self, gate: Gate) {
        if let Some(g) = self.finish_gate(gate) {
            self.gates.push(g);
        }
    }

    fn apply_controls(&mut self, gate: Gate) -> Gate {
        let extra = self.control_stack.clone();
        match gate {
            Gate::X { target } => Gate::mcx(extra, target),
            Gate::Cx { control, target } => {
                let mut c = extra;
                c.push(control);
                Gate::mcx(c, target)
            }
            Gate::Ccx { controls, target } => {
                let mut c = extra;
                c.extend_from_slice(&controls);
                Gate::mcx(c, target)
            }
            Gate::Mcx { controls, target } => {
                let mut c = extra;
                c.extend_from_slice(&controls);
                Gate::mcx(c, target)
            }
            Gate::Swap { a, b } => {
                if extra.len() == 1 {
                    Gate::Cswap {
                        control: extra[0],
                        a,
                        b,
                    }
                } else {
                    // Fredkin identity: wrap the middle MCX only.
                    self.push_validated(Gate::Cx { control: b, target: a });
                    let mut c = extra;
                    c.push(a);
                    self.push_validated(Gate::mcx(c, b));
                    return Gate::Cx { control: b, target: a };
                }
            }
            Gate::Cswap { control, a, b } => {
                self.push_validated(Gate::Cx { control: b, target: a });
                let mut c = extra;
                c.push(control);
                c.push(a);
                self.push_validated(Gate::mcx(c, b));
                return Gate::Cx { control: b, target: a };
            }
        }
    }

    pub fn x(&mut self, target: Qubit) {
        self.push(Gate::X { target });
    }

    pub fn cx(&mut self, control: Qubit, target: Qubit) {
        self.push(Gate::Cx { control, target });
    }

    pub fn ccx(&mut self, c0: Qubit, c1: Qubit, target: Qubit) {
        self.push(Gate::Ccx {
            controls: [c0, c1],
            target,
        });
    }

    pub fn mcx(&mut self, controls: Vec<Qubit>, target: Qubit) {
        self.push(Gate::mcx(controls, target));
    }

    pub fn swap(&mut self, a: Qubit, b: Qubit) {
        self.push(Gate::Swap { a, b });
    }

    /// Run `body` with `controls` added to every emitted gate.
    pub fn with_controls<F: FnOnce(&mut Self)>(&mut self, controls: &[Qubit], body: F) {
        self.control_stack.extend_from_slice(controls);
        body(self);
        for _ in controls {
            self.control_stack.pop();
        }
    }

    /// Run `body`, then reverse what it emitted in place. Since every gate in
    /// the set is self-inverse this turns the block into its adjoint.
    pub fn adjoint<F: FnOnce(&mut Self)>(&mut self, body: F) {
        let start = self.gates.len();
        body(self);
        self.gates[start..].reverse();
    }

    /// Append the adjoint of the already-emitted gate range `[start, end)`.
    pub fn append_adjoint_of_range(&mut self, start: usize, end: usize) {
        assert!(start <= end && end <= self.gates.len());
        let rev: Vec<Gate> = self.gates[start..end].iter().rev().cloned().collect();
        self.gates.extend(rev);
    }

    pub fn build(self) -> Circuit {
        assert!(
            self.control_stack.is_empty(),
            "unbalanced control scope at build()"
        );
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates,
            registers: self.registers,
        }
    }
}
