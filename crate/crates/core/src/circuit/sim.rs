//! Bit-exact simulation of circuits on computational basis states.
//!
//! Every gate in the set permutes basis states, so a circuit acts on a plain
//! bit vector. Simulation keeps all mutable state in a per-call workspace; a
//! shared immutable [`Circuit`] can be simulated from many threads at once.

use std::fmt;
use std::str::FromStr;

use super::{Circuit, CircuitError, Gate, Qubit, RegisterHandle};

/// Assignment of one classical bit per qubit.
///
/// Qubit 0 is the least significant position: the textual form `"001"` sets
/// qubit 0 and clears qubits 1 and 2 (rightmost character first, as in a
/// binary number).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, q: Qubit) -> bool {
        self.bits[q as usize]
    }

    pub fn set(&mut self, q: Qubit, v: bool) {
        self.bits[q as usize] = v;
    }

    fn flip(&mut self, q: Qubit) {
        self.bits[q as usize] = !self.bits[q as usize];
    }

    /// Read a register as an unsigned code, bit 0 least significant.
    pub fn register_code(&self, reg: &RegisterHandle) -> u64 {
        let mut v = 0u64;
        for i in (0..reg.width()).rev() {
            v = (v << 1) | self.get(reg.bit(i)) as u64;
        }
        v
    }

    /// Write an unsigned code into a register.
    pub fn set_register_code(&mut self, reg: &RegisterHandle, code: u64) {
        for i in 0..reg.width() {
            self.set(reg.bit(i), (code >> i) & 1 == 1);
        }
    }

    /// True iff every qubit outside the given registers is zero.
    pub fn zero_outside(&self, regs: &[&RegisterHandle]) -> bool {
        let mut keep = vec![false; self.len()];
        for r in regs {
            for q in r.bits() {
                keep[q as usize] = true;
            }
        }
        self.bits
            .iter()
            .enumerate()
            .all(|(q, &b)| keep[q] || !b)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pack the low bits of `value` into a fresh all-zero string.
    pub fn from_code(n: usize, value: u64) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n.min(64) {
            if (value >> i) & 1 == 1 {
                s.set(i as Qubit, true);
            }
        }
        s
    }

    pub fn to_code(&self) -> u64 {
        assert!(self.len() <= 64);
        let mut v = 0u64;
        for i in (0..self.len()).rev() {
            v = (v << 1) | self.bits[i] as u64;
        }
        v
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars().rev() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(format!("invalid bit character `{c}`")),
            }
        }
        Ok(BitString { bits })
    }
}

impl Circuit {
    /// Apply the circuit to a basis state. Pure function of the input.
    pub fn simulate(&self, input: &BitString) -> Result<BitString, CircuitError> {
        if input.len() != self.num_qubits() as usize {
            return Err(CircuitError::InputLength {
                got: input.len(),
                want: self.num_qubits() as usize,
            });
        }
        let mut state = input.clone();
        for gate in self.gates() {
            apply_gate(gate, &mut state);
        }
        Ok(state)
    }
}

fn apply_gate(gate: &Gate, state: &mut BitString) {
    match gate {
        Gate::X { target } => state.flip(*target),
        Gate::Cx { control, target } => {
            if state.get(*control) {
                state.flip(*target);
            }
        }
        Gate::Ccx { controls, target } => {
            if state.get(controls[0]) && state.get(controls[1]) {
                state.flip(*target);
            }
        }
        Gate::Mcx { controls, target } => {
            if controls.iter().all(|&c| state.get(c)) {
                state.flip(*target);
            }
        }
        Gate::Swap { a, b } => {
            let (va, vb) = (state.get(*a), state.get(*b));
            state.set(*a, vb);
            state.set(*b, va);
        }
        Gate::Cswap { control, a, b } => {
            if state.get(*control) {
                let (va, vb) = (state.get(*a), state.get(*b));
                state.set(*a, vb);
                state.set(*b, va);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::CircuitBuilder;
    use super::*;

    #[test]
    fn empty_circuit_is_identity() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        let c = cb.build();
        let input: BitString = "101".parse().unwrap();
        assert_eq!(c.simulate(&input).unwrap(), input);
    }

    #[test]
    fn x_on_qubit_zero() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.x(0);
        let c = cb.build();
        let out = c.simulate(&"000".parse().unwrap()).unwrap();
        assert_eq!(out.to_string(), "001");
    }

    #[test]
    fn toffoli_truth_table_entry() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.ccx(0, 1, 2);
        let c = cb.build();
        let out = c.simulate(&"011".parse().unwrap()).unwrap();
        assert_eq!(out.to_string(), "111");
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        let c = cb.build();
        assert!(c.simulate(&"01".parse().unwrap()).is_err());
    }

    #[test]
    fn bitstring_round_trip() {
        let s: BitString = "10010".parse().unwrap();
        assert_eq!(s.to_string(), "10010");
        assert!(s.get(1));
        assert!(s.get(4));
        assert!(!s.get(0));
    }
}
