//! Whole-circuit transformers: adjoint, control wrapping, MCX lowering.

use super::{Circuit, CircuitError, Gate, Qubit};

impl Circuit {
    /// Reverse the gate list. Every gate in the set is self-inverse, so the
    /// reversed list is the inverse circuit (SUB is ADD run backwards).
    pub fn adjoint(&self) -> Circuit {
        let mut c = self.clone();
        c.gates.reverse();
        c
    }

    /// Add `controls` to every gate. The control qubits must lie outside the
    /// circuit's existing qubit range; the wrapped circuit is widened to
    /// include them.
    pub fn control_wrap(&self, controls: &[Qubit]) -> Result<Circuit, CircuitError> {
        for &c in controls {
            if c < self.num_qubits {
                return Err(CircuitError::ControlOverlap(c));
            }
        }
        let num_qubits = controls
            .iter()
            .map(|&c| c + 1)
            .chain([self.num_qubits])
            .max()
            .unwrap();
        let mut gates = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            wrap_gate(gate, controls, &mut gates);
        }
        Ok(Circuit {
            num_qubits,
            gates,
            registers: self.registers.clone(),
        })
    }

    /// Rewrite every MCX with more than two controls into a Toffoli network
    /// using clean ancillas from `pool` (the V-chain construction; an
    /// n-controlled X costs n-2 ancillas and 2n-3 Toffolis). Pool qubits are
    /// returned to zero by each expansion.
    pub fn lower_mcx(&self, pool: &[Qubit]) -> Result<Circuit, CircuitError> {
        for &q in pool {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        let mut gates = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            match gate {
                Gate::Mcx { controls, target } if controls.len() > 2 => {
                    let need = controls.len() - 2;
                    if pool.len() < need {
                        return Err(CircuitError::InsufficientAncillas {
                            need,
                            have: pool.len(),
                        });
                    }
                    for &p in &pool[..need] {
                        if controls.contains(&p) || p == *target {
                            return Err(CircuitError::PoolCollision(p));
                        }
                    }
                    expand_mcx(controls, *target, &pool[..need], &mut gates);
                }
                g => gates.push(g.clone()),
            }
        }
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
            registers: self.registers.clone(),
        })
    }
}

fn wrap_gate(gate: &Gate, extra: &[Qubit], out: &mut Vec<Gate>) {
    let with = |more: &[Qubit]| {
        let mut c = extra.to_vec();
        c.extend_from_slice(more);
        c
    };
    match gate {
        Gate::X { target } => out.push(Gate::mcx(with(&[]), *target)),
        Gate::Cx { control, target } => out.push(Gate::mcx(with(&[*control]), *target)),
        Gate::Ccx { controls, target } => out.push(Gate::mcx(with(controls), *target)),
        Gate::Mcx { controls, target } => out.push(Gate::mcx(with(controls), *target)),
        Gate::Swap { a, b } => {
            if extra.len() == 1 {
                out.push(Gate::Cswap {
                    control: extra[0],
                    a: *a,
                    b: *b,
                });
            } else {
                out.push(Gate::Cx {
                    control: *b,
                    target: *a,
                });
                out.push(Gate::mcx(with(&[*a]), *b));
                out.push(Gate::Cx {
                    control: *b,
                    target: *a,
                });
            }
        }
        Gate::Cswap { control, a, b } => {
            out.push(Gate::Cx {
                control: *b,
                target: *a,
            });
            out.push(Gate::mcx(with(&[*control, *a]), *b));
            out.push(Gate::Cx {
                control: *b,
                target: *a,
            });
        }
    }
}

fn expand_mcx(controls: &[Qubit], target: Qubit, anc: &[Qubit], out: &mut Vec<Gate>) {
    // V-chain: fold controls pairwise into ancillas, fire, then unfold.
    debug_assert_eq!(anc.len(), controls.len() - 2);
    let mut ups = Vec::new();
    out.push(Gate::Ccx {
        controls: [controls[0], controls[1]],
        target: anc[0],
    });
    ups.push(out.last().unwrap().clone());
    for i in 0..anc.len() - 1 {
        out.push(Gate::Ccx {
            controls: [controls[i + 2], anc[i]],
            target: anc[i + 1],
        });
        ups.push(out.last().unwrap().clone());
    }
    out.push(Gate::Ccx {
        controls: [*controls.last().unwrap(), *anc.last().unwrap()],
        target,
    });
    for g in ups.into_iter().rev() {
        out.push(g);
    }
}

#[cfg(test)]
mod tests {
    use super::super::{BitString, CircuitBuilder};
    use super::*;

    fn exhaustive_equal(a: &Circuit, b: &Circuit, nq: u32) {
        assert!(nq <= 16);
        for v in 0..(1u64 << nq) {
            let input = BitString::from_code(nq as usize, v);
            assert_eq!(
                a.simulate(&input).unwrap(),
                b.simulate(&input).unwrap(),
                "mismatch at input {v:b}"
            );
        }
    }

    #[test]
    fn adjoint_of_adjoint_is_original() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.x(0);
        cb.cx(0, 1);
        cb.ccx(0, 1, 2);
        let c = cb.build();
        assert_eq!(c.adjoint().adjoint(), c);
    }

    #[test]
    fn adjoint_reverses_gate_order() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 2, None, false).unwrap();
        cb.x(0);
        cb.cx(0, 1);
        let c = cb.build().adjoint();
        assert_eq!(c.gates()[0], Gate::Cx { control: 0, target: 1 });
        assert_eq!(c.gates()[1], Gate::X { target: 0 });
    }

    #[test]
    fn adjoint_inverts_exhaustively() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 4, None, false).unwrap();
        cb.ccx(0, 1, 2);
        cb.cx(2, 3);
        cb.swap(0, 3);
        cb.x(1);
        let c = cb.build();
        let adj = c.adjoint();
        for v in 0..16u64 {
            let input = BitString::from_code(4, v);
            let there = c.simulate(&input).unwrap();
            let back = adj.simulate(&there).unwrap();
            assert_eq!(back, input);
        }
    }

    #[test]
    fn control_wrap_single_x() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 1, None, false).unwrap();
        cb.x(0);
        let c = cb.build().control_wrap(&[5]).unwrap();
        assert_eq!(c.num_qubits(), 6);
        assert_eq!(c.gates()[0], Gate::Cx { control: 5, target: 0 });
    }

    #[test]
    fn control_wrap_gates_on_control_value() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.x(0);
        cb.cx(0, 1);
        cb.swap(1, 2);
        let base = cb.build();
        let wrapped = base.control_wrap(&[3]).unwrap();
        for v in 0..8u64 {
            // control clear: identity on the original qubits
            let input = BitString::from_code(4, v);
            assert_eq!(wrapped.simulate(&input).unwrap(), input);
            // control set: same action as the unwrapped circuit
            let mut input = BitString::from_code(4, v);
            input.set(3, true);
            let got = wrapped.simulate(&input).unwrap();
            let want = base.simulate(&BitString::from_code(3, v)).unwrap();
            for q in 0..3 {
                assert_eq!(got.get(q), want.get(q));
            }
            assert!(got.get(3));
        }
    }

    #[test]
    fn control_overlap_rejected() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 2, None, false).unwrap();
        cb.x(0);
        let c = cb.build();
        assert_eq!(
            c.control_wrap(&[1]).unwrap_err(),
            CircuitError::ControlOverlap(1)
        );
    }

    #[test]
    fn lower_mcx_leaves_ccx_alone() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 3, None, false).unwrap();
        cb.ccx(0, 1, 2);
        let c = cb.build();
        let lowered = c.lower_mcx(&[]).unwrap();
        assert_eq!(lowered.gates(), c.gates());
    }

    #[test]
    fn lower_mcx_four_controls_matches_and_oracle() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("c", 4, None, false).unwrap();
        cb.allocate_register("t", 1, None, false).unwrap();
        cb.allocate_register("anc", 2, None, true).unwrap();
        cb.mcx(vec![0, 1, 2, 3], 4);
        let c = cb.build();
        let lowered = c.lower_mcx(&[5, 6]).unwrap();
        assert!(lowered
            .gates()
            .iter()
            .all(|g| !matches!(g, Gate::Mcx { .. })));
        for v in 0..16u64 {
            let mut input = BitString::from_code(7, v);
            let out = lowered.simulate(&input).unwrap();
            // AND-of-controls oracle on the target; ancillas restored.
            let want_flip = v == 0b1111;
            assert_eq!(out.get(4), want_flip, "controls {v:04b}");
            assert!(!out.get(5) && !out.get(6));
            input.set(4, true);
            let out = lowered.simulate(&input).unwrap();
            assert_eq!(out.get(4), !want_flip);
        }
    }

    #[test]
    fn lower_mcx_insufficient_pool() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 6, None, false).unwrap();
        cb.mcx(vec![0, 1, 2, 3], 4);
        let c = cb.build();
        assert_eq!(
            c.lower_mcx(&[5]).unwrap_err(),
            CircuitError::InsufficientAncillas { need: 2, have: 1 }
        );
    }

    #[test]
    fn wrapped_swap_with_two_controls_expands() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register("q", 2, None, false).unwrap();
        cb.swap(0, 1);
        let base = cb.build();
        let wrapped = base.control_wrap(&[2, 3]).unwrap();
        let mut direct = CircuitBuilder::new();
        direct.allocate_register("q", 4, None, false).unwrap();
        direct.with_controls(&[2, 3], |cb| cb.swap(0, 1));
        exhaustive_equal(&wrapped, &direct.build(), 4);
        // and both act as controlled swap
        for v in 0..4u64 {
            let mut input = BitString::from_code(4, v);
            input.set(2, true);
            input.set(3, true);
            let out = wrapped.simulate(&input).unwrap();
            assert_eq!(out.get(0), input.get(1));
            assert_eq!(out.get(1), input.get(0));
        }
    }
}
