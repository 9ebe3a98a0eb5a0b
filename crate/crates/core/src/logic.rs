//! Comparators and boolean combining circuits.
//!
//! Equality is the Kronecker-delta pattern: a CNOT fan folds one register
//! onto the other, an X fan turns "all zero" into "all one", a single
//! multi-controlled X fires the flag, and the fans unwind. Greater-than
//! subtracts into a register widened by one qubit and reads the sign bit,
//! then restores the low bits with a plain add. Comparisons against
//! classical thresholds use the same pattern with constant adders, needing
//! only the one extension qubit.

use crate::adders::{emit_add_into, emit_qc_add_into, emit_qc_sub_into};
use crate::circuit::{Circuit, CircuitBuilder, Qubit};
use crate::fixedpoint::FixedPointFormat;

/// Flip `flag` iff the two equal-width registers hold the same code;
/// both registers are restored.
pub fn emit_eq_flip(cb: &mut CircuitBuilder, a: &[Qubit], b: &[Qubit], flag: Qubit) {
    assert_eq!(a.len(), b.len());
    let fan = |cb: &mut CircuitBuilder| {
        for (&x, &y) in a.iter().zip(b) {
            cb.cx(x, y);
        }
        for &y in b {
            cb.x(y);
        }
    };
    fan(cb);
    cb.mcx(b.to_vec(), flag);
    cb.adjoint(fan);
}

/// Flip `flag` iff register `a` (plus the extra `pad` qubits, which must all
/// be zero for a match) equals register `b` zero-extended.
pub fn emit_eq_flip_padded(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    pad: &[Qubit],
    b: &[Qubit],
    flag: Qubit,
) {
    assert_eq!(a.len(), b.len());
    let fan = |cb: &mut CircuitBuilder| {
        for (&x, &y) in a.iter().zip(b) {
            cb.cx(x, y);
        }
        for &y in b {
            cb.x(y);
        }
        for &q in pad {
            cb.x(q);
        }
    };
    fan(cb);
    let mut controls = b.to_vec();
    controls.extend_from_slice(pad);
    cb.mcx(controls, flag);
    cb.adjoint(fan);
}

/// Flip `flag` iff register `a` holds exactly the classical `code`.
pub fn emit_qc_eq_flip(cb: &mut CircuitBuilder, a: &[Qubit], code: u64, flag: Qubit) {
    let fan = |cb: &mut CircuitBuilder| {
        for (i, &q) in a.iter().enumerate() {
            if (code >> i) & 1 == 0 {
                cb.x(q);
            }
        }
    };
    fan(cb);
    cb.mcx(a.to_vec(), flag);
    cb.adjoint(fan);
}

/// Kronecker-delta circuit over registers `a`, `b`, `flag`:
/// `flag ^= [a = b]`. Lowering its multi-controlled X against a pool of
/// `r-2` clean ancillas gives the `3r-1`-qubit form.
pub fn build_eq(fmt: FixedPointFormat) -> Circuit {
    let w = fmt.width();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", w, Some(fmt), false).unwrap();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    let flag = cb.allocate_register("flag", 1, None, false).unwrap();
    emit_eq_flip(&mut cb, &a.bits(), &b.bits(), flag.bit(0));
    cb.build()
}

/// Strict greater-than over registers `a`, `carry`, `b`, `flag`:
/// `flag = [a > b]`, read off the sign of `b - a` in the extension qubit.
/// Total qubits `2r + 2`.
pub fn build_gt(fmt: FixedPointFormat) -> Circuit {
    let w = fmt.width();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    let flag = cb.allocate_register("flag", 1, None, false).unwrap();
    let mut b_ext = b.bits();
    b_ext.push(flag.bit(0));
    // b_ext -= a: sign lands in the extension qubit
    cb.adjoint(|cb| emit_add_into(cb, &a.bits(), &b_ext, carry.bit(0)));
    // restore the low bits only; the sign qubit keeps the comparison
    emit_add_into(&mut cb, &a.bits(), &b.bits(), carry.bit(0));
    cb.build()
}

/// Comparison direction against a classical threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    /// `x > t`
    Gt,
    /// `x >= t`
    Geq,
    /// `x <= t`
    Leq,
}

/// Flip `flag` by the comparison of register `x` (unsigned code) against the
/// classical threshold `t_code`. `ext` is one clean qubit extending `x`;
/// both are restored.
pub fn emit_qc_cmp_flip(
    cb: &mut CircuitBuilder,
    x: &[Qubit],
    ext: Qubit,
    t_code: u64,
    op: CmpOp,
    flag: Qubit,
) {
    let w = x.len() as u32;
    debug_assert!(t_code < (1 << w));
    // [x <= t] = sign of x - (t+1); [x >= t] = ![x <= t-1]; [x > t] = ![x <= t]
    let (sub_code, negate) = match op {
        CmpOp::Leq => (t_code + 1, false),
        CmpOp::Gt => (t_code + 1, true),
        CmpOp::Geq => {
            if t_code == 0 {
                cb.x(flag);
                return;
            }
            (t_code, true)
        }
    };
    let mut x_ext = x.to_vec();
    x_ext.push(ext);
    emit_qc_sub_into(cb, sub_code, &x_ext);
    cb.cx(ext, flag);
    if negate {
        cb.x(flag);
    }
    emit_qc_add_into(cb, sub_code, &x_ext);
}

/// Threshold comparator circuit over registers `x`, `ext`, `flag`.
pub fn build_qc_cmp(threshold: u64, op: CmpOp, fmt: FixedPointFormat) -> Circuit {
    let w = fmt.width();
    assert!(threshold < (1 << w), "threshold out of range");
    let mut cb = CircuitBuilder::new();
    let x = cb.allocate_register("x", w, Some(fmt), false).unwrap();
    let ext = cb.allocate_register("ext", 1, None, true).unwrap();
    let flag = cb.allocate_register("flag", 1, None, false).unwrap();
    emit_qc_cmp_flip(&mut cb, &x.bits(), ext.bit(0), threshold, op, flag.bit(0));
    cb.build()
}

pub fn build_qc_gt(threshold: u64, fmt: FixedPointFormat) -> Circuit {
    build_qc_cmp(threshold, CmpOp::Gt, fmt)
}

pub fn build_qc_geq(threshold: u64, fmt: FixedPointFormat) -> Circuit {
    build_qc_cmp(threshold, CmpOp::Geq, fmt)
}

pub fn build_qc_leq(threshold: u64, fmt: FixedPointFormat) -> Circuit {
    build_qc_cmp(threshold, CmpOp::Leq, fmt)
}

/// How multi-input conjunction and disjunction combine their inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombineMode {
    /// One multi-controlled X.
    #[default]
    Flat,
    /// Binary tree of Toffolis over node ancillas, combined log-depth and
    /// uncomputed after the result is copied out.
    Cascade,
}

/// `target ^= AND(inputs)`; inputs restored, tree ancillas (if any) cleaned.
pub fn emit_and(
    cb: &mut CircuitBuilder,
    inputs: &[Qubit],
    nodes: &[Qubit],
    target: Qubit,
    mode: CombineMode,
) {
    emit_combine(cb, inputs, nodes, target, mode, false);
}

/// `target ^= OR(inputs)`, via De Morgan on the conjunction.
pub fn emit_or(
    cb: &mut CircuitBuilder,
    inputs: &[Qubit],
    nodes: &[Qubit],
    target: Qubit,
    mode: CombineMode,
) {
    emit_combine(cb, inputs, nodes, target, mode, true);
}

fn emit_combine(
    cb: &mut CircuitBuilder,
    inputs: &[Qubit],
    nodes: &[Qubit],
    target: Qubit,
    mode: CombineMode,
    or: bool,
) {
    assert!(!inputs.is_empty());
    let conj = |cb: &mut CircuitBuilder| {
        for &q in inputs {
            cb.x(q);
        }
    };
    if or {
        conj(cb);
    }
    match mode {
        CombineMode::Flat => {
            cb.mcx(inputs.to_vec(), target);
        }
        CombineMode::Cascade => {
            if inputs.len() == 1 {
                cb.cx(inputs[0], target);
            } else {
                // pairwise tree; each level halves the live wire count
                let tree_from = cb.len();
                let mut level: Vec<Qubit> = inputs.to_vec();
                let mut next_node = 0;
                while level.len() > 1 {
                    let mut up = Vec::new();
                    let mut it = level.chunks_exact(2);
                    for pair in &mut it {
                        let node = nodes[next_node];
                        next_node += 1;
                        cb.ccx(pair[0], pair[1], node);
                        up.push(node);
                    }
                    if let [odd] = it.remainder() {
                        up.push(*odd);
                    }
                    level = up;
                }
                let root = level[0];
                let tree_to = cb.len();
                cb.cx(root, target);
                cb.append_adjoint_of_range(tree_from, tree_to);
            }
        }
    }
    if or {
        conj(cb);
        cb.x(target);
    }
}

/// Number of tree ancillas the cascade combine needs for `m` inputs.
pub fn cascade_nodes(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        m - 1
    }
}

/// Conjunction circuit over registers `flags`, `nodes` (cascade mode only),
/// `target`.
pub fn build_and(m: usize, mode: CombineMode) -> Circuit {
    build_combine(m, mode, false)
}

/// Disjunction circuit.
pub fn build_or(m: usize, mode: CombineMode) -> Circuit {
    build_combine(m, mode, true)
}

fn build_combine(m: usize, mode: CombineMode, or: bool) -> Circuit {
    assert!(m >= 1);
    let mut cb = CircuitBuilder::new();
    let flags = cb.allocate_register("flags", m as u32, None, false).unwrap();
    let nodes = match mode {
        CombineMode::Cascade if cascade_nodes(m) > 0 => Some(
            cb.allocate_register("nodes", cascade_nodes(m) as u32, None, true)
                .unwrap(),
        ),
        _ => None,
    };
    let target = cb.allocate_register("target", 1, None, false).unwrap();
    let node_bits = nodes.map(|n| n.bits()).unwrap_or_default();
    emit_combine(&mut cb, &flags.bits(), &node_bits, target.bit(0), mode, or);
    cb.build()
}
