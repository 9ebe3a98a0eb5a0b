//! In-place quantum adders.
//!
//! The quantum-quantum adder is the one-ancilla MAJ/UMA ripple. Summands may
//! be narrower than the target: the carry left in the top summand qubit
//! after the MAJ ladder then drives a controlled increment of the remaining
//! target bits before the ladder unwinds. That covers the power-of-two
//! shifted adders, whose fractional variant drops low summand bits into a
//! full-width target.
//!
//! Quantum-classical adds resolve the classical operand at build time into
//! plain increment ladders, one per set bit, with no ancilla at all.

use crate::circuit::{Circuit, CircuitBuilder, Qubit};
use crate::fixedpoint::{FixedPointFormat, FixedPointValue};

/// Ripple-add `target += summand` mod `2^len(target)`.
///
/// `summand` must not be wider than `target`; both are least-significant
/// first. `carry` is one clean ancilla, returned to zero.
pub fn emit_add_into(cb: &mut CircuitBuilder, summand: &[Qubit], target: &[Qubit], carry: Qubit) {
    let ws = summand.len();
    let wt = target.len();
    assert!(ws <= wt, "summand wider than target");
    if ws == 0 {
        return;
    }
    // MAJ ladder; after step i the carry into position i+1 sits in summand[i]
    for i in 0..ws {
        let c = if i == 0 { carry } else { summand[i - 1] };
        cb.cx(summand[i], target[i]);
        cb.cx(summand[i], c);
        cb.ccx(c, target[i], summand[i]);
    }
    // ripple the final carry through the uncovered top of the target
    if ws < wt {
        let c = summand[ws - 1];
        for j in (ws..wt).rev() {
            let mut controls = vec![c];
            controls.extend_from_slice(&target[ws..j]);
            cb.mcx(controls, target[j]);
        }
    }
    // UMA ladder restores the summand and the carry ancilla
    for i in (0..ws).rev() {
        let c = if i == 0 { carry } else { summand[i - 1] };
        cb.ccx(c, target[i], summand[i]);
        cb.cx(summand[i], c);
        cb.cx(c, target[i]);
    }
}

/// `target -= summand`, the adder run backwards.
pub fn emit_sub_into(cb: &mut CircuitBuilder, summand: &[Qubit], target: &[Qubit], carry: Qubit) {
    cb.adjoint(|cb| emit_add_into(cb, summand, target, carry));
}

/// Shifted add `target += floor(summand * 2^shift)` mod `2^len(target)`,
/// truncating the summand at both ends exactly as the wiring does: positive
/// shifts ignore the top `shift` summand bits, negative shifts drop the low
/// ones.
pub fn emit_shift_add_into(
    cb: &mut CircuitBuilder,
    summand: &[Qubit],
    shift: i32,
    target: &[Qubit],
    carry: Qubit,
) {
    let ws = summand.len() as i32;
    let wt = target.len() as i32;
    if shift >= 0 {
        if shift >= wt {
            return;
        }
        let len = ws.min(wt - shift) as usize;
        emit_add_into(
            cb,
            &summand[..len],
            &target[shift as usize..],
            carry,
        );
    } else {
        let drop = (-shift).min(ws) as usize;
        emit_add_into(cb, &summand[drop..], target, carry);
    }
}

pub fn emit_shift_sub_into(
    cb: &mut CircuitBuilder,
    summand: &[Qubit],
    shift: i32,
    target: &[Qubit],
    carry: Qubit,
) {
    cb.adjoint(|cb| emit_shift_add_into(cb, summand, shift, target, carry));
}

/// Classical-constant add `target += code` mod `2^len(target)`, as one
/// increment ladder per set bit. No ancillas; gates are multi-controlled X
/// of growing arity.
pub fn emit_qc_add_into(cb: &mut CircuitBuilder, code: u64, target: &[Qubit]) {
    let w = target.len();
    for k in 0..w {
        if (code >> k) & 1 == 0 {
            continue;
        }
        for j in ((k + 1)..w).rev() {
            let controls = target[k..j].to_vec();
            cb.mcx(controls, target[j]);
        }
        cb.x(target[k]);
    }
}

pub fn emit_qc_sub_into(cb: &mut CircuitBuilder, code: u64, target: &[Qubit]) {
    cb.adjoint(|cb| emit_qc_add_into(cb, code, target));
}

/// In-place adder `|a>|b> -> |a>|(a+b) mod 2^w>` over registers
/// `a`, `carry`, `b`. Total qubits `2w + 1`.
pub fn build_add(fmt: FixedPointFormat) -> Circuit {
    let w = fmt.width();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    emit_add_into(&mut cb, &a.bits(), &b.bits(), carry.bit(0));
    cb.build()
}

/// Subtractor `|a>|b> -> |a>|(b-a) mod 2^w>`: the adder run backwards.
pub fn build_sub(fmt: FixedPointFormat) -> Circuit {
    build_add(fmt).adjoint()
}

/// Quantum-classical adder `|b> -> |(b + l) mod 2^w>`.
pub fn build_qc_add(l: FixedPointValue) -> Circuit {
    let fmt = l.format();
    let mut cb = CircuitBuilder::new();
    let b = cb
        .allocate_register("b", fmt.width(), Some(fmt), false)
        .unwrap();
    emit_qc_add_into(&mut cb, l.code(), &b.bits());
    cb.build()
}

/// Quantum-classical subtractor `|b> -> |(b - l) mod 2^w>`.
pub fn build_qc_sub(l: FixedPointValue) -> Circuit {
    build_qc_add(l).adjoint()
}

/// Power-of-two shifted adder `|a>|b> -> |a>|(2^k a + b) mod 2^w>`.
///
/// For `k > 0` the top `k` qubits of `a` are ignored; the caller promises
/// they are zero. For `k < 0` the low `|k|` bits of `a` are dropped
/// (fractional add with truncation). `a` must be non-negative.
pub fn build_add_shift(k: i32, fmt: FixedPointFormat) -> Circuit {
    let w = fmt.width();
    assert!((k.unsigned_abs()) < w, "|shift| must be below the width");
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    emit_shift_add_into(&mut cb, &a.bits(), k, &b.bits(), carry.bit(0));
    cb.build()
}
