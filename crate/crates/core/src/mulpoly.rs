//! Signed out-of-place multiplier and Horner-scheme polynomial evaluation.
//!
//! Multiplication splits into a relative sign and a magnitude sum: both
//! operands go to sign-magnitude form, the relative sign is folded into the
//! target by a conditional two's-complement negation, and the magnitude
//! product accumulates as shifted adds selected by the first operand's bits.
//! Conjugating the accumulation with the conditional negation realises the
//! additive contract `|a,b>|z> -> |a,b>|z+ab>` for any preloaded target,
//! which the polynomial circuit relies on.
//!
//! The relative sign lives in the second operand's sign qubit for the
//! duration of the product (a CNOT from the other sign folds it in and out),
//! so the multiplier needs no qubits beyond the three registers and the
//! adder carry.

use crate::adders::{emit_qc_add_into, emit_qc_sub_into, emit_shift_add_into};
use crate::circuit::{Circuit, CircuitBuilder, Qubit};
use crate::fixedpoint::{FixedPointError, FixedPointFormat, FixedPointValue};

/// Two's complement to sign-magnitude, in place on an `r+1`-bit register
/// whose top qubit is the sign: a conditional decrement of the low bits
/// followed by a conditional bit flip.
pub fn emit_csm(cb: &mut CircuitBuilder, reg: &[Qubit]) {
    let (low, sign) = split_sign(reg);
    cb.with_controls(&[sign], |cb| emit_qc_sub_into(cb, 1, low));
    for &q in low {
        cb.cx(sign, q);
    }
}

pub fn emit_csm_adjoint(cb: &mut CircuitBuilder, reg: &[Qubit]) {
    cb.adjoint(|cb| emit_csm(cb, reg));
}

fn split_sign(reg: &[Qubit]) -> (&[Qubit], Qubit) {
    let (sign, low) = reg.split_last().expect("register must be non-empty");
    (low, *sign)
}

/// Conditional two's-complement negation of `reg`, controlled on `ctrl`:
/// flip every bit, then increment, both under the control.
fn emit_cond_negate(cb: &mut CircuitBuilder, ctrl: Qubit, reg: &[Qubit]) {
    for &q in reg {
        cb.cx(ctrl, q);
    }
    cb.with_controls(&[ctrl], |cb| emit_qc_add_into(cb, 1, reg));
}

/// Magnitude accumulation `target += |ctrl_mag| * |summand_mag|` as the
/// cascade of shifted adds, one per controlling bit.
fn emit_mag_acc(
    cb: &mut CircuitBuilder,
    ctrl_mag: &[Qubit],
    summand_mag: &[Qubit],
    target: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    for (k, &c) in ctrl_mag.iter().enumerate() {
        cb.with_controls(&[c], |cb| {
            emit_shift_add_into(cb, summand_mag, k as i32 - p as i32, target, carry);
        });
    }
}

/// Unsigned multiplier `|a>|b>|z> -> |a>|b>|z + ab>` on `r`-bit registers.
pub fn emit_mul_unsigned(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    b: &[Qubit],
    z: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    emit_mag_acc(cb, a, b, z, p, carry);
}

/// Signed multiplier over `r+1`-bit two's-complement registers.
pub fn emit_mul_signed(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    b: &[Qubit],
    z: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    let (a_mag, a_sign) = split_sign(a);
    let (b_mag, b_sign) = split_sign(b);
    emit_csm(cb, a);
    emit_csm(cb, b);
    cb.cx(a_sign, b_sign); // b's sign qubit now carries the relative sign
    emit_cond_negate(cb, b_sign, z);
    emit_mag_acc(cb, a_mag, b_mag, z, p, carry);
    emit_cond_negate(cb, b_sign, z);
    cb.cx(a_sign, b_sign);
    emit_csm_adjoint(cb, b);
    emit_csm_adjoint(cb, a);
}

/// Quantum-classical multiplier `|b>|z> -> |b>|z + c b>` with the classical
/// factor's magnitude bits resolved at build time.
pub fn emit_qc_mul_signed(
    cb: &mut CircuitBuilder,
    c: FixedPointValue,
    b: &[Qubit],
    z: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    let (c_sign, c_mag) = c.to_sign_magnitude().expect("classical factor must be signed");
    if c_mag == 0 {
        // every partial term vanishes and the sign conjugation cancels
        return;
    }
    let (b_mag, b_sign) = split_sign(b);
    emit_csm(cb, b);
    if c_sign {
        cb.x(b_sign);
    }
    emit_cond_negate(cb, b_sign, z);
    for k in 0..c.format().r() {
        if (c_mag >> k) & 1 == 1 {
            emit_shift_add_into(cb, b_mag, k as i32 - p as i32, z, carry);
        }
    }
    emit_cond_negate(cb, b_sign, z);
    if c_sign {
        cb.x(b_sign);
    }
    emit_csm_adjoint(cb, b);
}

/// Polynomial coefficients `c_0..c_K` in one fixed-point format.
#[derive(Debug, Clone)]
pub struct PolynomialSpec {
    coefficients: Vec<FixedPointValue>,
}

impl PolynomialSpec {
    pub fn new(coefficients: Vec<FixedPointValue>) -> Result<Self, FixedPointError> {
        if coefficients.is_empty() {
            return Err(FixedPointError::OutOfRange("empty coefficient list".into()));
        }
        let fmt = coefficients[0].format();
        if !fmt.is_signed() || coefficients.iter().any(|c| c.format() != fmt) {
            return Err(FixedPointError::FormatMismatch);
        }
        Ok(PolynomialSpec { coefficients })
    }

    pub fn from_f64(coeffs: &[f64], fmt: FixedPointFormat) -> Result<Self, FixedPointError> {
        let encoded = coeffs
            .iter()
            .map(|&c| fmt.encode_f64(c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(encoded)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[FixedPointValue] {
        &self.coefficients
    }

    pub fn format(&self) -> FixedPointFormat {
        self.coefficients[0].format()
    }
}

fn emit_load_code(cb: &mut CircuitBuilder, code: u64, reg: &[Qubit]) {
    for (i, &q) in reg.iter().enumerate() {
        if (code >> i) & 1 == 1 {
            cb.x(q);
        }
    }
}

/// Horner evaluation. `works` are the `K-1` coefficient registers, restored
/// to zero by the closing uncompute; `target` ends with `poly(b)`.
pub fn emit_poly(
    cb: &mut CircuitBuilder,
    spec: &PolynomialSpec,
    y: &[Qubit],
    works: &[Vec<Qubit>],
    target: &[Qubit],
    carry: Qubit,
) {
    let coeffs = spec.coefficients();
    let d = spec.degree();
    let p = spec.format().p();
    emit_load_code(cb, coeffs[0].code(), target);
    if d == 0 {
        return;
    }
    if d == 1 {
        emit_qc_mul_signed(cb, coeffs[1], y, target, p, carry);
        return;
    }
    assert_eq!(works.len(), d - 1);
    let uncompute_from = cb.len();
    for (j, work) in works.iter().enumerate() {
        emit_load_code(cb, coeffs[d - 1 - j].code(), work);
    }
    emit_qc_mul_signed(cb, coeffs[d], y, &works[0], p, carry);
    for j in 1..d - 1 {
        let (head, tail) = works.split_at(j);
        emit_mul_signed(cb, y, &head[j - 1], &tail[0], p, carry);
    }
    let uncompute_to = cb.len();
    emit_mul_signed(cb, y, &works[d - 2], target, p, carry);
    cb.append_adjoint_of_range(uncompute_from, uncompute_to);
}

/// Standalone two's-complement to sign-magnitude converter.
pub fn build_csm(fmt: FixedPointFormat) -> Circuit {
    assert!(fmt.is_signed());
    let mut cb = CircuitBuilder::new();
    let b = cb
        .allocate_register("b", fmt.width(), Some(fmt), false)
        .unwrap();
    emit_csm(&mut cb, &b.bits());
    cb.build()
}

/// Signed multiplier over registers `a`, `b`, `carry`, `z`.
/// Total qubits `3(r+1) + 1`.
pub fn build_mul(fmt: FixedPointFormat) -> Circuit {
    assert!(fmt.is_signed());
    let w = fmt.width();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", w, Some(fmt), false).unwrap();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let z = cb.allocate_register("z", w, Some(fmt), false).unwrap();
    emit_mul_signed(&mut cb, &a.bits(), &b.bits(), &z.bits(), fmt.p(), carry.bit(0));
    cb.build()
}

/// Quantum-classical multiplier over registers `b`, `carry`, `z`.
pub fn build_qc_mul(c: FixedPointValue) -> Circuit {
    let fmt = c.format();
    assert!(fmt.is_signed());
    let w = fmt.width();
    let mut cb = CircuitBuilder::new();
    let b = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let z = cb.allocate_register("z", w, Some(fmt), false).unwrap();
    emit_qc_mul_signed(&mut cb, c, &b.bits(), &z.bits(), fmt.p(), carry.bit(0));
    cb.build()
}

/// Horner polynomial circuit over registers `b`, `work0..`, `target`,
/// `carry`. Total qubits `(K+1)(r+1) + 1` for degree `K >= 1`.
pub fn build_poly(spec: &PolynomialSpec) -> Circuit {
    let fmt = spec.format();
    let w = fmt.width();
    let d = spec.degree();
    let mut cb = CircuitBuilder::new();
    let y = cb.allocate_register("b", w, Some(fmt), false).unwrap();
    let mut works = Vec::new();
    for j in 0..d.saturating_sub(1) {
        let reg = cb
            .allocate_register(&format!("work{j}"), w, Some(fmt), true)
            .unwrap();
        works.push(reg.bits());
    }
    let target = cb.allocate_register("target", w, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    emit_poly(&mut cb, spec, &y.bits(), &works, &target.bits(), carry.bit(0));
    cb.build()
}
