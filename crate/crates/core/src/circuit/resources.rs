//! Qubit, gate-count and depth accounting.

use std::collections::BTreeMap;

use super::{Circuit, GateKind};

/// Static resource summary of a circuit.
///
/// Depth is a greedy as-soon-as-possible layering on qubit disjointness:
/// a gate sits one layer after the latest layer touching any of its qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceReport {
    pub qubits: u32,
    pub ancillas: u32,
    pub gate_counts: BTreeMap<GateKind, u64>,
    pub depth: u64,
}

impl ResourceReport {
    pub fn total_gates(&self) -> u64 {
        self.gate_counts.values().sum()
    }

    pub fn count(&self, kind: GateKind) -> u64 {
        self.gate_counts.get(&kind).copied().unwrap_or(0)
    }
}

impl Circuit {
    pub fn resources(&self) -> ResourceReport {
        let mut gate_counts = BTreeMap::new();
        let mut frontier = vec![0u64; self.num_qubits() as usize];
        let mut depth = 0u64;
        for gate in self.gates() {
            *gate_counts.entry(gate.kind()).or_insert(0) += 1;
            let layer = gate
                .qubits()
                .iter()
                .map(|&q| frontier[q as usize])
                .max()
                .unwrap_or(0)
                + 1;
            for q in gate.qubits() {
                frontier[q as usize] = layer;
            }
            depth = depth.max(layer);
        }
        let ancillas = self
            .registers()
            .filter(|r| r.is_ancilla())
            .map(|r| r.width())
            .sum();
        ResourceReport {
            qubits: self.num_qubits(),
            ancillas,
            gate_counts,
            depth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::CircuitBuilder;
    use super::*;

    #[test]
    fn empty_circuit_all_zero() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 4, None, false).unwrap();
        let rep = cb.build().resources();
        assert_eq!(rep.qubits, 4);
        assert_eq!(rep.total_gates(), 0);
        assert_eq!(rep.depth, 0);
    }

    #[test]
    fn parallel_x_gates_share_a_layer() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 2, None, false).unwrap();
        cb.x(0);
        cb.x(1);
        let rep = cb.build().resources();
        assert_eq!(rep.depth, 1);
        assert_eq!(rep.count(GateKind::X), 2);
    }

    #[test]
    fn depth_respects_qubit_conflicts() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.cx(0, 1);
        cb.cx(1, 2);
        cb.x(0);
        let rep = cb.build().resources();
        // cx(0,1) layer 1; cx(1,2) layer 2; x(0) layer 2
        assert_eq!(rep.depth, 2);
        assert!(rep.depth <= rep.total_gates());
    }

    #[test]
    fn adjoint_preserves_gate_counts() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.x(0);
        cb.cx(0, 1);
        cb.ccx(0, 1, 2);
        let c = cb.build();
        assert_eq!(c.resources().gate_counts, c.adjoint().resources().gate_counts);
    }

    #[test]
    fn ancillas_counted_from_tagged_registers() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("a", 4, None, false).unwrap();
        cb.allocate_register("work", 3, None, true).unwrap();
        cb.allocate_register("carry", 1, None, true).unwrap();
        assert_eq!(cb.build().resources().ancillas, 4);
    }
}
