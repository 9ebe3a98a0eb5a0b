//! Newton-Raphson iteration circuits: reciprocal square root, square root,
//! reciprocal, the in-place square and multiply built from them, and the
//! exponentiation/signomial routines on top.
//!
//! All registers here are `r`-bit unsigned. One iteration toward `S^(-1/2)`
//! computes `x' = x(1.5 - S x^2 / 2)` out of place; the chain reuses the
//! initial-estimate register for the second iterate (the estimate is
//! unloaded once consumed) and uncomputes retained intermediates with one
//! closing adjoint block.

use crate::adders::{emit_qc_add_into, emit_shift_add_into, emit_shift_sub_into};
use crate::circuit::{Circuit, CircuitBuilder, Qubit};
use crate::classical::{exponent_code, ExpWindow, SigTerm};
use crate::fixedpoint::FixedPointFormat;
use crate::mulpoly::emit_mul_unsigned;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NewtonError {
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("initial estimate {x0} leaves the convergence window over inputs [{lo}, {hi}]")]
    OutsideWindow { x0: f64, lo: f64, hi: f64 },
    #[error("initial estimate or input range not representable: {0}")]
    BadValue(String),
    #[error("exponent {k}/{kappa} has no finite binary expansion with p={p}")]
    ExponentNotDyadic { k: u32, kappa: u32, p: u32 },
    #[error("format must be unsigned with p >= {0}")]
    BadFormat(u32),
}

/// Where the first iterate comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialEstimate {
    /// A fixed classical value, valid for inputs in `range` (inclusive).
    Classical { value: f64, range: (f64, f64) },
    /// Coherent leading-one scan: the input's top set bit is reflected
    /// across the binary point, which pins `R x0` (or `sqrt(S) x0` for the
    /// square root) into `[1/2, 1)`.
    LeadingOne,
}

/// Iteration count and initial-estimate policy.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub iterations: u32,
    pub x0: InitialEstimate,
}

/// Upper edge of the reciprocal-square-root convergence window,
/// `(sqrt(17) - 1) / 2 ~ 1.56`.
pub fn rsqrt_window_edge() -> f64 {
    (17f64.sqrt() - 1.0) / 2.0
}

impl NewtonConfig {
    pub fn classical(iterations: u32, x0: f64, range: (f64, f64)) -> Self {
        NewtonConfig {
            iterations,
            x0: InitialEstimate::Classical { value: x0, range },
        }
    }

    pub fn leading_one(iterations: u32) -> Self {
        NewtonConfig {
            iterations,
            x0: InitialEstimate::LeadingOne,
        }
    }

    fn validate_common(&self, fmt: FixedPointFormat) -> Result<(), NewtonError> {
        if self.iterations == 0 {
            return Err(NewtonError::NoIterations);
        }
        if fmt.is_signed() || fmt.p() < 1 {
            return Err(NewtonError::BadFormat(1));
        }
        if let InitialEstimate::Classical { value, range } = &self.x0 {
            if *value <= 0.0 || range.0 <= 0.0 || range.1 < range.0 {
                return Err(NewtonError::BadValue(format!(
                    "x0={value}, range=[{}, {}]",
                    range.0, range.1
                )));
            }
            fmt.encode_f64(*value)
                .map_err(|e| NewtonError::BadValue(e.to_string()))?;
        }
        Ok(())
    }

    /// Convergence window for `S^(-1/2)`: `sqrt(S) x0 in (0, (sqrt(17)-1)/2)`.
    pub fn validate_rsqrt(&self, fmt: FixedPointFormat) -> Result<(), NewtonError> {
        self.validate_common(fmt)?;
        if let InitialEstimate::Classical { value, range } = &self.x0 {
            if range.1.sqrt() * value >= rsqrt_window_edge() {
                return Err(NewtonError::OutsideWindow {
                    x0: *value,
                    lo: range.0,
                    hi: range.1,
                });
            }
        }
        Ok(())
    }

    /// Convergence window for `R^(-1)`: `R x0 in (0, 2)`.
    pub fn validate_rec(&self, fmt: FixedPointFormat) -> Result<(), NewtonError> {
        self.validate_common(fmt)?;
        if let InitialEstimate::Classical { value, range } = &self.x0 {
            if range.1 * value >= 2.0 {
                return Err(NewtonError::OutsideWindow {
                    x0: *value,
                    lo: range.0,
                    hi: range.1,
                });
            }
        }
        Ok(())
    }
}

/// Physical register count for the iterate chain. A classical initial
/// estimate never occupies a register (the first step resolves it at build
/// time, the quantum-classical simplification applied to a whole step), so
/// iterates `x_1..x_L` take `L` slots. The coherent leading-one estimate
/// needs one more for `x_0` itself.
pub fn chain_slot_count(cfg: &NewtonConfig) -> u32 {
    match cfg.x0 {
        InitialEstimate::Classical { .. } => cfg.iterations,
        InitialEstimate::LeadingOne => cfg.iterations + 1,
    }
}

/// Qubit slices the Newton emitters work on. `cns` is the constant register
/// (1.5 for the square-root step, 2 for the reciprocal step); `scan` holds
/// the leading-one flags when that policy is active.
#[derive(Debug, Clone)]
pub struct NewtonScratch {
    pub chain: Vec<Vec<Qubit>>,
    pub m1: Vec<Qubit>,
    pub m2: Option<Vec<Qubit>>,
    pub cns: Vec<Qubit>,
    pub scan: Option<Vec<Qubit>>,
    pub carry: Qubit,
}

/// Allocate the scratch registers a Newton block needs. The chain register
/// holding the final iterate can be promoted to a named non-ancilla output
/// via `result_name`.
pub fn alloc_newton_scratch(
    cb: &mut CircuitBuilder,
    prefix: &str,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    with_m2: bool,
    carry: Qubit,
    result_name: Option<&str>,
) -> NewtonScratch {
    let r = fmt.width();
    let result_slot = result_name.map(|_| chain_slot_count(cfg) as usize - 1);
    let mut chain = Vec::new();
    for i in 0..chain_slot_count(cfg) as usize {
        let reg = if result_slot == Some(i) {
            cb.allocate_register(result_name.unwrap(), r, Some(fmt), false)
                .unwrap()
        } else {
            cb.allocate_register(&format!("{prefix}x{i}"), r, None, true)
                .unwrap()
        };
        chain.push(reg.bits());
    }
    let m1 = cb
        .allocate_register(&format!("{prefix}m1"), r, None, true)
        .unwrap()
        .bits();
    let m2 = with_m2.then(|| {
        cb.allocate_register(&format!("{prefix}m2"), r, None, true)
            .unwrap()
            .bits()
    });
    let cns = cb
        .allocate_register(&format!("{prefix}cns"), r, None, true)
        .unwrap()
        .bits();
    let scan = matches!(cfg.x0, InitialEstimate::LeadingOne).then(|| {
        cb.allocate_register(&format!("{prefix}scan"), (r - 1).max(1), None, true)
            .unwrap()
            .bits()
    });
    NewtonScratch {
        chain,
        m1,
        m2,
        cns,
        scan,
        carry,
    }
}

/// One square-root Newton step `x_out = x_in (1.5 - S x_in^2 / 2)`.
#[allow(clippy::too_many_arguments)]
pub fn emit_rsqrt_step(
    cb: &mut CircuitBuilder,
    s: &[Qubit],
    x_in: &[Qubit],
    x_out: &[Qubit],
    m1: &[Qubit],
    m2: &[Qubit],
    cns: &[Qubit],
    carry: Qubit,
    p: u32,
) {
    emit_mul_unsigned(cb, s, x_in, m1, p, carry);
    emit_mul_unsigned(cb, m1, x_in, m2, p, carry);
    cb.x(cns[(p - 1) as usize]);
    cb.x(cns[p as usize]);
    emit_shift_sub_into(cb, m2, -1, cns, carry);
    emit_mul_unsigned(cb, x_in, cns, x_out, p, carry);
    emit_shift_add_into(cb, m2, -1, cns, carry);
    cb.x(cns[(p - 1) as usize]);
    cb.x(cns[p as usize]);
    cb.adjoint(|cb| emit_mul_unsigned(cb, m1, x_in, m2, p, carry));
    cb.adjoint(|cb| emit_mul_unsigned(cb, s, x_in, m1, p, carry));
}

/// One reciprocal Newton step `x_out = x_in (2 - R x_in)`.
#[allow(clippy::too_many_arguments)]
pub fn emit_rec_step(
    cb: &mut CircuitBuilder,
    rr: &[Qubit],
    x_in: &[Qubit],
    x_out: &[Qubit],
    m1: &[Qubit],
    cns: &[Qubit],
    carry: Qubit,
    p: u32,
) {
    emit_mul_unsigned(cb, rr, x_in, m1, p, carry);
    cb.x(cns[(p + 1) as usize]);
    emit_shift_sub_into(cb, m1, 0, cns, carry);
    emit_mul_unsigned(cb, x_in, cns, x_out, p, carry);
    emit_shift_add_into(cb, m1, 0, cns, carry);
    cb.x(cns[(p + 1) as usize]);
    cb.adjoint(|cb| emit_mul_unsigned(cb, rr, x_in, m1, p, carry));
}

fn x0_classical_code(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Option<u64> {
    match &cfg.x0 {
        InitialEstimate::Classical { value, .. } => {
            Some(fmt.encode_f64(*value).expect("validated").code())
        }
        InitialEstimate::LeadingOne => None,
    }
}

fn shift_code(code: u64, sh: i32, width: u32) -> u64 {
    use crate::fixedpoint::mask;
    if sh >= 0 {
        (code << sh) & mask(width)
    } else {
        code >> (-sh) as u32
    }
}

/// Magnitude accumulation with a classical summand: the quantum-classical
/// resolution of one multiplier half, a controlled constant add per
/// controlling bit.
fn emit_acc_qc_summand(
    cb: &mut CircuitBuilder,
    ctrl: &[Qubit],
    summand_code: u64,
    target: &[Qubit],
    p: u32,
) {
    let w = target.len() as u32;
    for (k, &c) in ctrl.iter().enumerate() {
        let term = shift_code(summand_code, k as i32 - p as i32, w);
        cb.with_controls(&[c], |cb| emit_qc_add_into(cb, term, target));
    }
}

/// Magnitude accumulation with classical controlling bits: only the set
/// bits contribute a shifted add.
fn emit_acc_qc_ctrl(
    cb: &mut CircuitBuilder,
    ctrl_code: u64,
    summand: &[Qubit],
    target: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    for k in 0..target.len() as u32 {
        if (ctrl_code >> k) & 1 == 1 {
            emit_shift_add_into(cb, summand, k as i32 - p as i32, target, carry);
        }
    }
}

/// First square-root step with the classical estimate folded in at build
/// time: bit for bit the same arithmetic as the quantum step at
/// `x_in = x0`, with no register holding the estimate.
#[allow(clippy::too_many_arguments)]
fn emit_rsqrt_step_seeded(
    cb: &mut CircuitBuilder,
    s: &[Qubit],
    x0_code: u64,
    x_out: &[Qubit],
    m1: &[Qubit],
    m2: &[Qubit],
    cns: &[Qubit],
    carry: Qubit,
    p: u32,
) {
    emit_acc_qc_summand(cb, s, x0_code, m1, p);
    emit_acc_qc_summand(cb, m1, x0_code, m2, p);
    cb.x(cns[(p - 1) as usize]);
    cb.x(cns[p as usize]);
    emit_shift_sub_into(cb, m2, -1, cns, carry);
    emit_acc_qc_ctrl(cb, x0_code, cns, x_out, p, carry);
    emit_shift_add_into(cb, m2, -1, cns, carry);
    cb.x(cns[(p - 1) as usize]);
    cb.x(cns[p as usize]);
    cb.adjoint(|cb| emit_acc_qc_summand(cb, m1, x0_code, m2, p));
    cb.adjoint(|cb| emit_acc_qc_summand(cb, s, x0_code, m1, p));
}

/// First reciprocal step with the classical estimate folded in.
#[allow(clippy::too_many_arguments)]
fn emit_rec_step_seeded(
    cb: &mut CircuitBuilder,
    rr: &[Qubit],
    x0_code: u64,
    x_out: &[Qubit],
    m1: &[Qubit],
    cns: &[Qubit],
    carry: Qubit,
    p: u32,
) {
    emit_acc_qc_summand(cb, rr, x0_code, m1, p);
    cb.x(cns[(p + 1) as usize]);
    emit_shift_sub_into(cb, m1, 0, cns, carry);
    emit_acc_qc_ctrl(cb, x0_code, cns, x_out, p, carry);
    emit_shift_add_into(cb, m1, 0, cns, carry);
    cb.x(cns[(p + 1) as usize]);
    cb.adjoint(|cb| emit_acc_qc_summand(cb, rr, x0_code, m1, p));
}

/// Coherent leading-one initial estimate. `scan[q-1]` flags "no set bit at
/// position q or above"; one write per possible leading-bit position maps it
/// to the matching estimate bit, then the scan is uncomputed.
pub fn emit_leading_one(
    cb: &mut CircuitBuilder,
    src: &[Qubit],
    dst: &[Qubit],
    scan: &[Qubit],
    fmt: FixedPointFormat,
    rsqrt: bool,
) {
    let r = fmt.r();
    let p = fmt.p();
    assert!(src.len() == r as usize && dst.len() == r as usize);
    if r == 1 {
        if let Some(j) = x0_bit_for(0, p, r, rsqrt) {
            cb.cx(src[0], dst[j as usize]);
        }
        return;
    }
    assert!(scan.len() >= (r - 1) as usize);
    let sc = |q: u32| scan[(q - 1) as usize];
    let scan_from = cb.len();
    cb.x(sc(r - 1));
    cb.cx(src[(r - 1) as usize], sc(r - 1));
    for q in (1..r - 1).rev() {
        cb.x(src[q as usize]);
        cb.ccx(sc(q + 1), src[q as usize], sc(q));
        cb.x(src[q as usize]);
    }
    let scan_to = cb.len();
    for q in 0..r {
        let Some(j) = x0_bit_for(q, p, r, rsqrt) else {
            continue;
        };
        if q == r - 1 {
            cb.cx(src[q as usize], dst[j as usize]);
        } else {
            cb.ccx(sc(q + 1), src[q as usize], dst[j as usize]);
        }
    }
    cb.append_adjoint_of_range(scan_from, scan_to);
}

fn x0_bit_for(q: u32, p: u32, r: u32, rsqrt: bool) -> Option<u32> {
    let j = if rsqrt {
        let m = q as i64 - p as i64;
        p as i64 - m.div_euclid(2) - 1
    } else {
        2 * p as i64 - q as i64 - 1
    };
    (0..r as i64).contains(&j).then_some(j as u32)
}

struct ChainOutcome {
    start: usize,
    before_last_step: usize,
    end: usize,
    xl_slot: usize,
}

fn emit_chain(
    cb: &mut CircuitBuilder,
    input: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    rsqrt: bool,
) -> ChainOutcome {
    let p = fmt.p();
    let l = cfg.iterations;
    let start = cb.len();
    let mut before_last_step = cb.len();
    let quantum_step = |cb: &mut CircuitBuilder, x_in: &[Qubit], x_out: &[Qubit]| {
        if rsqrt {
            emit_rsqrt_step(
                cb,
                input,
                x_in,
                x_out,
                &scratch.m1,
                scratch.m2.as_ref().expect("m2 allocated for rsqrt"),
                &scratch.cns,
                scratch.carry,
                p,
            );
        } else {
            emit_rec_step(
                cb,
                input,
                x_in,
                x_out,
                &scratch.m1,
                &scratch.cns,
                scratch.carry,
                p,
            );
        }
    };
    let xl_slot;
    match x0_classical_code(fmt, cfg) {
        Some(x0_code) => {
            // x_k lives in chain slot k-1; no estimate register at all
            if l == 1 {
                before_last_step = cb.len();
            }
            if rsqrt {
                emit_rsqrt_step_seeded(
                    cb,
                    input,
                    x0_code,
                    &scratch.chain[0],
                    &scratch.m1,
                    scratch.m2.as_ref().expect("m2 allocated for rsqrt"),
                    &scratch.cns,
                    scratch.carry,
                    p,
                );
            } else {
                emit_rec_step_seeded(
                    cb,
                    input,
                    x0_code,
                    &scratch.chain[0],
                    &scratch.m1,
                    &scratch.cns,
                    scratch.carry,
                    p,
                );
            }
            for k in 2..=l {
                if k == l {
                    before_last_step = cb.len();
                }
                let x_in = scratch.chain[k as usize - 2].clone();
                let x_out = scratch.chain[k as usize - 1].clone();
                quantum_step(cb, &x_in, &x_out);
            }
            xl_slot = l as usize - 1;
        }
        None => {
            // coherent estimate: x_k lives in chain slot k
            let scan = scratch.scan.as_ref().expect("scan register allocated");
            emit_leading_one(cb, input, &scratch.chain[0], scan, fmt, rsqrt);
            for k in 1..=l {
                if k == l {
                    before_last_step = cb.len();
                }
                let x_in = scratch.chain[k as usize - 1].clone();
                let x_out = scratch.chain[k as usize].clone();
                quantum_step(cb, &x_in, &x_out);
            }
            xl_slot = l as usize;
        }
    }
    let end = cb.len();
    ChainOutcome {
        start,
        before_last_step,
        end,
        xl_slot,
    }
}

/// Reciprocal-square-root block: iterate chain plus the adjoint of all but
/// the last step. Leaves `x_L` in the returned slice; every other chain
/// register is zero again.
pub fn emit_rsqrt_block(
    cb: &mut CircuitBuilder,
    s: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> Vec<Qubit> {
    let outcome = emit_chain(cb, s, scratch, fmt, cfg, true);
    cb.append_adjoint_of_range(outcome.start, outcome.before_last_step);
    scratch.chain[outcome.xl_slot].clone()
}

/// Square-root block `|S>|0> -> |S>|x_L S>` with the whole chain uncomputed
/// afterwards, so the block's adjoint works as a clean uncompute path.
pub fn emit_sqrt_block(
    cb: &mut CircuitBuilder,
    s: &[Qubit],
    out: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) {
    let outcome = emit_chain(cb, s, scratch, fmt, cfg, true);
    let xl = scratch.chain[outcome.xl_slot].clone();
    emit_mul_unsigned(cb, &xl, s, out, fmt.p(), scratch.carry);
    cb.append_adjoint_of_range(outcome.start, outcome.end);
}

/// Reciprocal block; the result stays in the returned slice. Also returns
/// the emitted gate range so callers can replay its adjoint after using the
/// result.
pub fn emit_rec_block(
    cb: &mut CircuitBuilder,
    rr: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> (Vec<Qubit>, usize, usize) {
    let from = cb.len();
    let outcome = emit_chain(cb, rr, scratch, fmt, cfg, false);
    cb.append_adjoint_of_range(outcome.start, outcome.before_last_step);
    (scratch.chain[outcome.xl_slot].clone(), from, cb.len())
}

/// One Newton-Raphson square-root step as a standalone circuit over
/// registers `s`, `m1`, `x`, `m2`, `cns`, `out`, `carry` (6r + 1 qubits).
pub fn build_rsqrt_step(fmt: FixedPointFormat) -> Circuit {
    let r = fmt.width();
    let mut cb = CircuitBuilder::new();
    let s = cb.allocate_register("s", r, Some(fmt), false).unwrap();
    let m1 = cb.allocate_register("m1", r, None, true).unwrap();
    let x = cb.allocate_register("x", r, Some(fmt), false).unwrap();
    let m2 = cb.allocate_register("m2", r, None, true).unwrap();
    let cns = cb.allocate_register("cns", r, None, true).unwrap();
    let out = cb.allocate_register("out", r, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    emit_rsqrt_step(
        &mut cb,
        &s.bits(),
        &x.bits(),
        &out.bits(),
        &m1.bits(),
        &m2.bits(),
        &cns.bits(),
        carry.bit(0),
        fmt.p(),
    );
    cb.build()
}

/// One reciprocal step as a standalone circuit (5r + 1 qubits).
pub fn build_rec_step(fmt: FixedPointFormat) -> Circuit {
    let r = fmt.width();
    let mut cb = CircuitBuilder::new();
    let rr = cb.allocate_register("s", r, Some(fmt), false).unwrap();
    let x = cb.allocate_register("x", r, Some(fmt), false).unwrap();
    let m1 = cb.allocate_register("m1", r, None, true).unwrap();
    let cns = cb.allocate_register("cns", r, None, true).unwrap();
    let out = cb.allocate_register("out", r, Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    emit_rec_step(
        &mut cb,
        &rr.bits(),
        &x.bits(),
        &out.bits(),
        &m1.bits(),
        &cns.bits(),
        carry.bit(0),
        fmt.p(),
    );
    cb.build()
}

/// Full reciprocal-square-root chain; result register `out` holds `x_L`.
/// Total qubits `(L+4)r + 1`.
pub fn build_rsqrt(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Circuit {
    cfg.validate_rsqrt(fmt).unwrap();
    let mut cb = CircuitBuilder::new();
    let s = cb.allocate_register("s", fmt.width(), Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "", fmt, cfg, true, carry.bit(0), Some("out"));
    emit_rsqrt_block(&mut cb, &s.bits(), &scratch, fmt, cfg);
    cb.build()
}

/// Square root `|S>|0> -> |S>|x_L S>`; result register `out`.
/// Total qubits `(L+4)r + 1 + r`.
pub fn build_sqrt(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Circuit {
    cfg.validate_rsqrt(fmt).unwrap();
    let mut cb = CircuitBuilder::new();
    let s = cb.allocate_register("s", fmt.width(), Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "", fmt, cfg, true, carry.bit(0), None);
    let out = cb
        .allocate_register("out", fmt.width(), Some(fmt), false)
        .unwrap();
    emit_sqrt_block(&mut cb, &s.bits(), &out.bits(), &scratch, fmt, cfg);
    cb.build()
}

/// Reciprocal `|R>|0> -> |R>|x_L ~ 1/R>`; result register `out`.
/// Total qubits `(L+3)r + 1`.
pub fn build_rec(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Circuit {
    cfg.validate_rec(fmt).unwrap();
    let mut cb = CircuitBuilder::new();
    let rr = cb.allocate_register("s", fmt.width(), Some(fmt), false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "", fmt, cfg, false, carry.bit(0), Some("out"));
    emit_rec_block(&mut cb, &rr.bits(), &scratch, fmt, cfg);
    cb.build()
}

/// Standalone coherent initial-estimate circuit.
pub fn build_leading_one_init(fmt: FixedPointFormat, rsqrt: bool) -> Circuit {
    let r = fmt.width();
    let mut cb = CircuitBuilder::new();
    let src = cb.allocate_register("s", r, Some(fmt), false).unwrap();
    let dst = cb.allocate_register("x0", r, Some(fmt), false).unwrap();
    let scan = cb
        .allocate_register("scan", (r - 1).max(1), None, true)
        .unwrap();
    emit_leading_one(&mut cb, &src.bits(), &dst.bits(), &scan.bits(), fmt, rsqrt);
    cb.build()
}

fn emit_square_acc(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    target: &[Qubit],
    bit_copy: Qubit,
    carry: Qubit,
    p: u32,
) {
    for (k, &ak) in a.iter().enumerate() {
        cb.cx(ak, bit_copy);
        cb.with_controls(&[bit_copy], |cb| {
            emit_shift_add_into(cb, a, k as i32 - p as i32, target, carry);
        });
        cb.cx(ak, bit_copy);
    }
}

/// In-place square `|a> -> |a^2>`: square into the work register (one
/// borrowed qubit copies each controlling bit out of the summand), swap,
/// and uncompute the old value with the adjoint square-root block. The work
/// register keeps the root-approximation residue.
pub fn emit_insq(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    work: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) {
    // the chain is idle during the square; borrow a qubit for the bit copy
    let bit_copy = scratch.chain[0][0];
    emit_square_acc(cb, a, work, bit_copy, scratch.carry, fmt.p());
    for (&x, &y) in a.iter().zip(work) {
        cb.swap(x, y);
    }
    cb.adjoint(|cb| emit_sqrt_block(cb, a, work, scratch, fmt, cfg));
}

pub fn emit_insq_adjoint(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    work: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) {
    cb.adjoint(|cb| emit_insq(cb, a, work, scratch, fmt, cfg));
}

/// In-place multiply `|a>|b> -> |a>|ab>`: out-of-place product, swap, then
/// divide the stale input away through the reciprocal of `a`.
pub fn emit_inmul(
    cb: &mut CircuitBuilder,
    a: &[Qubit],
    b: &[Qubit],
    work: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) {
    let p = fmt.p();
    emit_mul_unsigned(cb, a, b, work, p, scratch.carry);
    let (rec, rec_from, rec_to) = emit_rec_block(cb, a, scratch, fmt, cfg);
    for (&x, &y) in b.iter().zip(work) {
        cb.swap(x, y);
    }
    cb.adjoint(|cb| emit_mul_unsigned(cb, &rec, b, work, p, scratch.carry));
    cb.append_adjoint_of_range(rec_from, rec_to);
}

/// In-place square as a standalone circuit over `a`, `work`, chain scratch
/// and carry. Total qubits `(L+5)r + 1`.
pub fn build_insq(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Circuit {
    cfg.validate_rsqrt(fmt).unwrap();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", fmt.width(), Some(fmt), false).unwrap();
    let work = cb.allocate_register("work", fmt.width(), None, true).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt, cfg, true, carry.bit(0), None);
    emit_insq(&mut cb, &a.bits(), &work.bits(), &scratch, fmt, cfg);
    cb.build()
}

/// In-place multiplier as a standalone circuit over `a`, `b`, `work`, chain
/// scratch and carry. Total qubits `(L+5)r + 1`.
pub fn build_inmul(fmt: FixedPointFormat, cfg: &NewtonConfig) -> Circuit {
    cfg.validate_rec(fmt).unwrap();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", fmt.width(), Some(fmt), false).unwrap();
    let b = cb.allocate_register("b", fmt.width(), Some(fmt), false).unwrap();
    let work = cb.allocate_register("work", fmt.width(), None, true).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt, cfg, false, carry.bit(0), None);
    emit_inmul(&mut cb, &a.bits(), &b.bits(), &work.bits(), &scratch, fmt, cfg);
    cb.build()
}

/// How one exponent-ladder rung fires.
enum Rung {
    Skip,
    Apply,
    Controlled(Qubit),
}

#[allow(clippy::too_many_arguments)]
fn emit_exp_ladder(
    cb: &mut CircuitBuilder,
    rung: impl Fn(u32) -> Rung,
    b: &[Qubit],
    out: &[Qubit],
    work: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    window: ExpWindow,
) {
    let p = fmt.p() as i64;
    fn shift(
        cb: &mut CircuitBuilder,
        from: i64,
        to: i64,
        b: &[Qubit],
        work: &[Qubit],
        scratch: &NewtonScratch,
        fmt: FixedPointFormat,
        cfg: &NewtonConfig,
    ) {
        let mut cur = from;
        while cur < to {
            emit_insq(cb, b, work, scratch, fmt, cfg);
            cur += 1;
        }
        while cur > to {
            emit_insq_adjoint(cb, b, work, scratch, fmt, cfg);
            cur -= 1;
        }
    }
    shift(cb, 0, window.lo as i64 - p, b, work, scratch, fmt, cfg);
    cb.x(out[fmt.p() as usize]);
    for k in window.lo..=window.hi {
        match rung(k) {
            Rung::Skip => {}
            Rung::Apply => emit_inmul(cb, b, out, work, scratch, fmt, cfg),
            Rung::Controlled(ctrl) => cb.with_controls(&[ctrl], |cb| {
                emit_inmul(cb, b, out, work, scratch, fmt, cfg);
            }),
        }
        if k < window.hi {
            emit_insq(cb, b, work, scratch, fmt, cfg);
        }
    }
    shift(cb, window.hi as i64 - p, 0, b, work, scratch, fmt, cfg);
}

/// Exponentiation `|a,b>|0> -> |a,b>|b^a>` walking the exponent bits inside
/// `window`; bits outside it are promised zero, the same zero-top-bits
/// contract the shifted adders use. `None` walks the full register.
/// Total qubits `(L+7)r + 1`.
pub fn build_exp(
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    window: Option<ExpWindow>,
) -> Circuit {
    cfg.validate_rec(fmt).unwrap();
    cfg.validate_rsqrt(fmt).unwrap();
    let window = window.unwrap_or_else(|| ExpWindow::full(fmt));
    let r = fmt.width();
    let mut cb = CircuitBuilder::new();
    let a = cb.allocate_register("a", r, Some(fmt), false).unwrap();
    let b = cb.allocate_register("b", r, Some(fmt), false).unwrap();
    let out = cb.allocate_register("out", r, Some(fmt), false).unwrap();
    let work = cb.allocate_register("work", r, None, true).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt, cfg, true, carry.bit(0), None);
    let a_bits = a.bits();
    emit_exp_ladder(
        &mut cb,
        |k| Rung::Controlled(a_bits[k as usize]),
        &b.bits(),
        &out.bits(),
        &work.bits(),
        &scratch,
        fmt,
        cfg,
        window,
    );
    cb.build()
}

fn emit_qc_exp(
    cb: &mut CircuitBuilder,
    e_code: u64,
    b: &[Qubit],
    out: &[Qubit],
    work: &[Qubit],
    scratch: &NewtonScratch,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) {
    let lo = e_code.trailing_zeros();
    let hi = 63 - e_code.leading_zeros();
    emit_exp_ladder(
        cb,
        |k| {
            if (e_code >> k) & 1 == 1 {
                Rung::Apply
            } else {
                Rung::Skip
            }
        },
        b,
        out,
        work,
        scratch,
        fmt,
        cfg,
        ExpWindow { lo, hi },
    );
}

/// Quantum-classical exponentiation `|b>|0> -> |b>|b^(k/kappa)>`.
pub fn build_qc_exp(
    k: u32,
    kappa: u32,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> Result<Circuit, NewtonError> {
    cfg.validate_rec(fmt)?;
    cfg.validate_rsqrt(fmt)?;
    let e_code = exponent_code(k, kappa, fmt.p()).ok_or(NewtonError::ExponentNotDyadic {
        k,
        kappa,
        p: fmt.p(),
    })?;
    let r = fmt.width();
    let mut cb = CircuitBuilder::new();
    let b = cb.allocate_register("b", r, Some(fmt), false).unwrap();
    let out = cb.allocate_register("out", r, Some(fmt), false).unwrap();
    let work = cb.allocate_register("work", r, None, true).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt, cfg, true, carry.bit(0), None);
    emit_qc_exp(
        &mut cb,
        e_code,
        &b.bits(),
        &out.bits(),
        &work.bits(),
        &scratch,
        fmt,
        cfg,
    );
    Ok(cb.build())
}

/// Signomial `sum_k c_k b^(k/kappa)` over registers `b`, `aux`, `out`,
/// `work`, chain scratch and carry. Terms with exponent exactly one multiply
/// straight in; the rest go through the exponentiation ladder and its
/// adjoint. Total qubits `(L+7)r + 1`.
pub fn build_sig(
    c0: f64,
    terms: &[(u32, f64)],
    kappa: u32,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> Result<Circuit, NewtonError> {
    cfg.validate_rec(fmt)?;
    cfg.validate_rsqrt(fmt)?;
    let r = fmt.width();
    let p = fmt.p();
    let mut cb = CircuitBuilder::new();
    let b = cb.allocate_register("b", r, Some(fmt), false).unwrap();
    let aux = cb.allocate_register("aux", r, None, true).unwrap();
    let out = cb.allocate_register("out", r, Some(fmt), false).unwrap();
    let work = cb.allocate_register("work", r, None, true).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt, cfg, true, carry.bit(0), None);

    let c0_code = signed_code(c0, fmt).ok_or_else(|| NewtonError::BadValue(c0.to_string()))?;
    for (i, &q) in out.bits().iter().enumerate() {
        if ((c0_code as u64) >> i) & 1 == 1 {
            cb.x(q);
        }
    }
    for &(k, ck) in terms {
        if ck == 0.0 {
            continue;
        }
        let e_code = exponent_code(k, kappa, p).ok_or(NewtonError::ExponentNotDyadic {
            k,
            kappa,
            p,
        })?;
        let c_code = signed_code(ck, fmt).ok_or_else(|| NewtonError::BadValue(ck.to_string()))?;
        if e_code == 1 << p {
            emit_qc_acc_signed(&mut cb, c_code, &b.bits(), &out.bits(), p, carry.bit(0));
        } else {
            let from = cb.len();
            emit_qc_exp(
                &mut cb,
                e_code,
                &b.bits(),
                &aux.bits(),
                &work.bits(),
                &scratch,
                fmt,
                cfg,
            );
            let to = cb.len();
            emit_qc_acc_signed(&mut cb, c_code, &aux.bits(), &out.bits(), p, carry.bit(0));
            cb.append_adjoint_of_range(from, to);
        }
    }
    Ok(cb.build())
}

/// `out += c * b` for a signed classical coefficient on unsigned registers;
/// negative weights run the term accumulation backwards.
fn emit_qc_acc_signed(
    cb: &mut CircuitBuilder,
    c_code: i64,
    b: &[Qubit],
    out: &[Qubit],
    p: u32,
    carry: Qubit,
) {
    let mag = c_code.unsigned_abs();
    let body = |cb: &mut CircuitBuilder| {
        for k in 0..b.len() as u32 {
            if (mag >> k) & 1 == 1 {
                emit_shift_add_into(cb, b, k as i32 - p as i32, out, carry);
            }
        }
    };
    if c_code >= 0 {
        body(cb);
    } else {
        cb.adjoint(body);
    }
}

/// Scale a real coefficient to a signed code, rejecting overflow.
pub fn signed_code(c: f64, fmt: FixedPointFormat) -> Option<i64> {
    let scaled = (c * 2f64.powi(fmt.p() as i32)).round();
    let limit = (1i64 << fmt.r()) as f64;
    if !scaled.is_finite() || scaled.abs() >= limit {
        return None;
    }
    Some(scaled as i64)
}

/// Convert `(k, c_k)` pairs to the reference form used by `ref_sig`.
pub fn sig_terms(terms: &[(u32, f64)], fmt: FixedPointFormat) -> Option<Vec<SigTerm>> {
    terms
        .iter()
        .map(|&(k, c)| signed_code(c, fmt).map(|c_code| SigTerm { c_code, k }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BitString, Circuit};
    use crate::classical::{
        ref_exp, ref_inmul, ref_insq, ref_leading_one_rec, ref_leading_one_rsqrt, ref_qc_exp,
        ref_rec, ref_rec_step, ref_rsqrt_step, ref_sig, ref_sqrt,
    };

    fn fmt_u(r: u32, p: u32) -> FixedPointFormat {
        FixedPointFormat::unsigned(r, p).unwrap()
    }

    fn run(c: &Circuit, sets: &[(&str, u64)]) -> BitString {
        let mut input = BitString::zeros(c.num_qubits() as usize);
        for (name, v) in sets {
            input.set_register_code(c.register(name).unwrap(), *v);
        }
        c.simulate(&input).unwrap()
    }

    fn code(c: &Circuit, out: &BitString, name: &str) -> u64 {
        out.register_code(c.register(name).unwrap())
    }

    #[test]
    fn rsqrt_step_matches_mirror_exhaustively() {
        let fmt = fmt_u(4, 2);
        let c = build_rsqrt_step(fmt);
        assert_eq!(c.num_qubits(), 6 * 4 + 1);
        for s in 0..16u64 {
            for x in 0..16u64 {
                let out = run(&c, &[("s", s), ("x", x)]);
                assert_eq!(code(&c, &out, "out"), ref_rsqrt_step(s, x, 4, 2), "s={s} x={x}");
                assert_eq!(code(&c, &out, "s"), s);
                assert_eq!(code(&c, &out, "x"), x);
                for anc in ["m1", "m2", "cns", "carry"] {
                    assert_eq!(code(&c, &out, anc), 0, "{anc} dirty at s={s} x={x}");
                }
            }
        }
    }

    #[test]
    fn rsqrt_step_examples() {
        // S=1, x=1 is a fixed point; S=0 scales by 1.5
        let fmt = fmt_u(8, 4);
        let c = build_rsqrt_step(fmt);
        let one = fmt.encode_f64(1.0).unwrap().code();
        let out = run(&c, &[("s", one), ("x", one)]);
        assert_eq!(code(&c, &out, "out"), one);
        let x = fmt.encode_f64(0.5).unwrap().code();
        let out = run(&c, &[("s", 0), ("x", x)]);
        assert_eq!(
            fmt.value_from_code(code(&c, &out, "out")).decode_f64(),
            0.75
        );
        // S=0.25, x=1: 1.375 up to truncation
        let quarter = fmt.encode_f64(0.25).unwrap().code();
        let out = run(&c, &[("s", quarter), ("x", one)]);
        let got = fmt.value_from_code(code(&c, &out, "out")).decode_f64();
        assert!((got - 1.375).abs() <= 4.0 * fmt.ulp(), "got {got}");
    }

    #[test]
    fn rec_step_matches_mirror_exhaustively() {
        let fmt = fmt_u(4, 1);
        let c = build_rec_step(fmt);
        assert_eq!(c.num_qubits(), 5 * 4 + 1);
        for s in 0..16u64 {
            for x in 0..16u64 {
                let out = run(&c, &[("s", s), ("x", x)]);
                assert_eq!(code(&c, &out, "out"), ref_rec_step(s, x, 4, 1), "s={s} x={x}");
                for anc in ["m1", "cns", "carry"] {
                    assert_eq!(code(&c, &out, anc), 0);
                }
            }
        }
    }

    fn assert_only(c: &Circuit, out: &BitString, keep: &[&str]) {
        let regs: Vec<&crate::circuit::RegisterHandle> =
            keep.iter().map(|n| c.register(n).unwrap()).collect();
        assert!(out.zero_outside(&regs), "workspace dirty");
    }

    #[test]
    fn rsqrt_chain_matches_mirror() {
        // exhaustive over inputs at a small format, both iteration counts
        for l in [1u32, 2] {
            let fmt = fmt_u(6, 4);
            let cfg = NewtonConfig::classical(l, 0.9, (0.25, 2.0));
            let c = build_rsqrt(fmt, &cfg);
            assert_eq!(c.num_qubits(), (l + 4) * 6 + 1);
            for s in 0..64u64 {
                let out = run(&c, &[("s", s)]);
                assert_eq!(
                    code(&c, &out, "out"),
                    crate::classical::ref_rsqrt(s, fmt, &cfg),
                    "l={l} s={s}"
                );
                assert_eq!(code(&c, &out, "s"), s);
                assert_only(&c, &out, &["s", "out"]);
            }
        }
    }

    #[test]
    fn sqrt_chain_matches_mirror_and_count() {
        let fmt = fmt_u(6, 4);
        let cfg = NewtonConfig::classical(2, 0.9, (0.25, 2.0));
        let c = build_sqrt(fmt, &cfg);
        assert_eq!(c.num_qubits(), (2 + 4) * 6 + 1 + 6);
        for s in 0..64u64 {
            let out = run(&c, &[("s", s)]);
            assert_eq!(code(&c, &out, "out"), ref_sqrt(s, fmt, &cfg), "s={s}");
            assert_only(&c, &out, &["s", "out"]);
        }
    }

    #[test]
    fn sqrt_qubit_formula_l3_r8() {
        let fmt = fmt_u(8, 6);
        let cfg = NewtonConfig::classical(3, 0.9, (0.25, 1.0));
        let c = build_sqrt(fmt, &cfg);
        assert_eq!(c.num_qubits(), (3 + 4) * 8 + 1 + 8);
    }

    #[test]
    fn rec_chain_matches_mirror() {
        for l in [1u32, 2] {
            let fmt = fmt_u(6, 3);
            let cfg = NewtonConfig::classical(l, 0.4, (0.5, 4.0));
            let c = build_rec(fmt, &cfg);
            assert_eq!(c.num_qubits(), (l + 3) * 6 + 1);
            for s in 0..64u64 {
                let out = run(&c, &[("s", s)]);
                assert_eq!(code(&c, &out, "out"), ref_rec(s, fmt, &cfg), "l={l} s={s}");
                assert_only(&c, &out, &["s", "out"]);
            }
        }
    }

    #[test]
    fn rec_chain_with_leading_one_matches_mirror() {
        let fmt = fmt_u(6, 3);
        let cfg = NewtonConfig::leading_one(2);
        let c = build_rec(fmt, &cfg);
        for s in 0..64u64 {
            let out = run(&c, &[("s", s)]);
            assert_eq!(code(&c, &out, "out"), ref_rec(s, fmt, &cfg), "s={s}");
            assert_only(&c, &out, &["s", "out"]);
        }
    }

    #[test]
    fn leading_one_circuit_matches_rules() {
        for rsqrt in [false, true] {
            let fmt = fmt_u(6, 3);
            let c = build_leading_one_init(fmt, rsqrt);
            for s in 0..64u64 {
                let out = run(&c, &[("s", s)]);
                let want = if rsqrt {
                    ref_leading_one_rsqrt(s, 6, 3)
                } else {
                    ref_leading_one_rec(s, 6, 3)
                };
                assert_eq!(code(&c, &out, "x0"), want, "rsqrt={rsqrt} s={s}");
                assert_eq!(code(&c, &out, "scan"), 0);
                assert_eq!(code(&c, &out, "s"), s);
            }
        }
    }

    #[test]
    fn leading_one_window_guarantee() {
        // R x0 lands in [1/2, 1) whenever x0 is representable
        let fmt = fmt_u(8, 4);
        for s in 1..256u64 {
            let x0 = ref_leading_one_rec(s, 8, 4);
            if x0 == 0 {
                continue;
            }
            let rv = fmt.value_from_code(s).decode_f64();
            let xv = fmt.value_from_code(x0).decode_f64();
            let prod = rv * xv;
            assert!((0.5..1.0).contains(&prod), "R={rv} x0={xv}");
        }
        // example: R=6 -> x0=0.125
        let r6 = fmt.encode_f64(6.0).unwrap().code();
        assert_eq!(
            fmt.value_from_code(ref_leading_one_rec(r6, 8, 4)).decode_f64(),
            0.125
        );
    }

    #[test]
    fn insq_matches_mirror() {
        let fmt = fmt_u(6, 4);
        let cfg = NewtonConfig::classical(2, 0.9, (0.25, 2.0));
        let c = build_insq(fmt, &cfg);
        assert_eq!(c.num_qubits(), (2 + 5) * 6 + 1);
        for a in 0..64u64 {
            let out = run(&c, &[("a", a)]);
            let (sq, residue) = ref_insq(a, 0, fmt, &cfg);
            assert_eq!(code(&c, &out, "a"), sq, "a={a}");
            assert_eq!(code(&c, &out, "work"), residue, "a={a}");
            assert_only(&c, &out, &["a", "work"]);
        }
    }

    #[test]
    fn insq_reversibility_is_exact() {
        let fmt = fmt_u(6, 4);
        let cfg = NewtonConfig::classical(2, 0.9, (0.25, 2.0));
        let c = build_insq(fmt, &cfg);
        let adj = c.adjoint();
        for a in 0..64u64 {
            let input = {
                let mut s = BitString::zeros(c.num_qubits() as usize);
                s.set_register_code(c.register("a").unwrap(), a);
                s
            };
            let fwd = c.simulate(&input).unwrap();
            assert_eq!(adj.simulate(&fwd).unwrap(), input, "a={a}");
        }
    }

    #[test]
    fn inmul_matches_mirror() {
        let fmt = fmt_u(5, 3);
        let cfg = NewtonConfig::classical(2, 0.6, (0.25, 3.0));
        let c = build_inmul(fmt, &cfg);
        assert_eq!(c.num_qubits(), (2 + 5) * 5 + 1);
        for a in 0..32u64 {
            for b in [0u64, 3, 8, 13, 21, 31] {
                let out = run(&c, &[("a", a), ("b", b)]);
                let (prod, residue) = ref_inmul(a, b, 0, fmt, &cfg);
                assert_eq!(code(&c, &out, "b"), prod, "a={a} b={b}");
                assert_eq!(code(&c, &out, "work"), residue, "a={a} b={b}");
                assert_eq!(code(&c, &out, "a"), a);
                assert_only(&c, &out, &["a", "b", "work"]);
            }
        }
    }

    #[test]
    fn inmul_reversibility_is_exact() {
        let fmt = fmt_u(5, 3);
        let cfg = NewtonConfig::classical(2, 0.6, (0.25, 3.0));
        let c = build_inmul(fmt, &cfg);
        let adj = c.adjoint();
        for (a, b) in [(9u64, 11u64), (16, 5), (3, 30)] {
            let mut input = BitString::zeros(c.num_qubits() as usize);
            input.set_register_code(c.register("a").unwrap(), a);
            input.set_register_code(c.register("b").unwrap(), b);
            let fwd = c.simulate(&input).unwrap();
            assert_eq!(adj.simulate(&fwd).unwrap(), input);
        }
    }

    #[test]
    fn exp_matches_mirror_on_window() {
        let fmt = fmt_u(6, 3);
        let cfg = NewtonConfig::classical(2, 0.5, (0.25, 3.5));
        let window = ExpWindow { lo: 3, hi: 4 }; // exponents 1 and 2
        let c = build_exp(fmt, &cfg, Some(window));
        assert_eq!(c.num_qubits(), (2 + 7) * 6 + 1);
        for a in [1u64 << 3, 1 << 4] {
            for b in [10u64, 12, 16] {
                let out = run(&c, &[("a", a), ("b", b)]);
                let (target, base, work) = ref_exp(a, b, fmt, &cfg, window);
                assert_eq!(code(&c, &out, "out"), target, "a={a} b={b}");
                assert_eq!(code(&c, &out, "b"), base);
                assert_eq!(code(&c, &out, "work"), work);
                assert_eq!(code(&c, &out, "a"), a);
                assert_only(&c, &out, &["a", "b", "out", "work"]);
            }
        }
    }

    #[test]
    fn qc_exp_matches_mirror() {
        let fmt = fmt_u(6, 3);
        let cfg = NewtonConfig::classical(2, 0.5, (0.25, 3.5));
        // exponent 1/2
        let c = build_qc_exp(1, 2, fmt, &cfg).unwrap();
        let e_code = exponent_code(1, 2, 3).unwrap();
        for b in [9u64, 16, 25, 36] {
            let out = run(&c, &[("b", b)]);
            let (target, base, work) = ref_qc_exp(e_code, b, fmt, &cfg);
            assert_eq!(code(&c, &out, "out"), target, "b={b}");
            assert_eq!(code(&c, &out, "b"), base);
            assert_eq!(code(&c, &out, "work"), work);
        }
        assert_eq!(
            build_qc_exp(1, 3, fmt, &cfg).unwrap_err(),
            NewtonError::ExponentNotDyadic { k: 1, kappa: 3, p: 3 }
        );
    }

    #[test]
    fn sig_matches_mirror() {
        let fmt = fmt_u(6, 3);
        let cfg = NewtonConfig::classical(2, 0.5, (0.25, 3.5));
        let terms = [(1u32, 1.0f64), (2, -0.25)];
        let kappa = 2;
        let c = build_sig(0.5, &terms, kappa, fmt, &cfg).unwrap();
        assert_eq!(c.num_qubits(), (2 + 7) * 6 + 1);
        let ref_terms = sig_terms(&terms, fmt).unwrap();
        let c0_code = signed_code(0.5, fmt).unwrap();
        for b in [9u64, 16, 25] {
            let out = run(&c, &[("b", b)]);
            let (target, base, aux, work) = ref_sig(b, c0_code, &ref_terms, kappa, fmt, &cfg);
            assert_eq!(code(&c, &out, "out"), target, "b={b}");
            assert_eq!(code(&c, &out, "b"), base);
            assert_eq!(code(&c, &out, "aux"), aux);
            assert_eq!(code(&c, &out, "work"), work);
        }
    }

    #[test]
    fn sig_gate_count_grows_linearly_in_terms() {
        let fmt = fmt_u(6, 3);
        let cfg = NewtonConfig::classical(2, 0.5, (0.25, 3.5));
        let counts: Vec<usize> = (1..=3)
            .map(|j| {
                let terms: Vec<(u32, f64)> =
                    (0..j).map(|t| (2 + 2 * t as u32, 0.25)).collect();
                build_sig(0.0, &terms, 2, fmt, &cfg).unwrap().gates().len()
            })
            .collect();
        let d1 = counts[1] - counts[0];
        let d2 = counts[2] - counts[1];
        // each extra nonzero weight adds about one ladder's worth of gates
        assert!(d1 > 0 && d2 > 0);
        let ratio = d2 as f64 / d1 as f64;
        assert!((0.5..2.0).contains(&ratio), "increments {d1} vs {d2}");
    }

    #[test]
    fn rec_error_squares_exactly_in_exact_arithmetic() {
        use num::BigRational;
        use num::{FromPrimitive, Signed};
        for (r0, x0) in [(0.5f64, 1.0f64), (1.5, 0.8), (0.75, 0.3)] {
            let rr = BigRational::from_f64(r0).unwrap();
            let mut x = BigRational::from_f64(x0).unwrap();
            let one = BigRational::from_f64(1.0).unwrap();
            let two = BigRational::from_f64(2.0).unwrap();
            for _ in 0..4 {
                let eps = (&one - &rr * &x).abs();
                x = &x * (&two - &rr * &x);
                let eps_next = (&one - &rr * &x).abs();
                assert_eq!(eps_next, &eps * &eps);
            }
        }
    }

    #[test]
    fn rsqrt_error_recursion_factor() {
        // eps_{k+1} = |1 + sqrt(S) x_k / 2| eps_k^2 along the float iteration
        let mut state = 0x5eedu64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 40) as f64 / (1u64 << 24) as f64
        };
        for _ in 0..100 {
            let s = 0.05 + 2.0 * next();
            let edge = rsqrt_window_edge();
            let mut x = (0.05 + 0.9 * next()) * edge / s.sqrt();
            for _ in 0..6 {
                let eps = (1.0 - s.sqrt() * x).abs();
                let factor = (1.0 + 0.5 * s.sqrt() * x).abs();
                let x_next = 0.5 * x * (3.0 - s * x * x);
                let eps_next = (1.0 - s.sqrt() * x_next).abs();
                assert!(
                    eps_next <= factor * eps * eps + 1e-12,
                    "S={s} x={x}: {eps_next} vs {}",
                    factor * eps * eps
                );
                x = x_next;
            }
        }
    }

    #[test]
    fn accuracy_monotone_in_iterations() {
        // max decoded square-root error over an S grid never grows with L
        let fmt = fmt_u(12, 10);
        let mut prev = f64::INFINITY;
        for l in 1..=5 {
            let cfg = NewtonConfig::classical(l, 1.0, (0.2, 1.0));
            let mut worst: f64 = 0.0;
            for s_num in [205u64, 410, 512, 768, 1024] {
                let sv = fmt.value_from_code(s_num).decode_f64();
                let got = fmt
                    .value_from_code(ref_sqrt(s_num, fmt, &cfg))
                    .decode_f64();
                worst = worst.max((got - sv.sqrt()).abs());
            }
            assert!(worst <= prev + fmt.ulp(), "L={l}: {worst} vs {prev}");
            prev = worst;
        }
    }

    #[test]
    fn window_validation() {
        let fmt = fmt_u(8, 6);
        assert!(NewtonConfig::classical(3, 1.0, (0.25, 2.0))
            .validate_rsqrt(fmt)
            .is_ok());
        assert!(matches!(
            NewtonConfig::classical(3, 2.0, (0.25, 2.0)).validate_rsqrt(fmt),
            Err(NewtonError::OutsideWindow { .. })
        ));
        assert!(matches!(
            NewtonConfig::classical(0, 1.0, (0.25, 1.0)).validate_rsqrt(fmt),
            Err(NewtonError::NoIterations)
        ));
        assert!(matches!(
            NewtonConfig::classical(3, 1.5, (0.5, 2.0)).validate_rec(fmt),
            Err(NewtonError::OutsideWindow { .. })
        ));
    }
}
