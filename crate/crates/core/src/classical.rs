//! Classical bit-level reference semantics.
//!
//! Every arithmetic circuit in this crate has a mirror here that reproduces
//! its register-level behaviour code for code, including the exact truncation
//! each shifted adder performs and the residues the approximate uncompute
//! paths leave behind. Circuit correctness is defined as bit equality with
//! these functions; they share no code with the circuit builders.
//!
//! All functions work on raw codes. Magnitude products accumulate partial
//! terms `floor(b * 2^(k-p))`, one per set bit `k` of the controlling
//! operand, each truncated toward zero before the modular add.

use crate::fixedpoint::{mask, FixedPointFormat, FixedPointValue};
use crate::newton::{InitialEstimate, NewtonConfig};

/// `(a + b) mod 2^w`.
pub fn ref_add(a: u64, b: u64, w: u32) -> u64 {
    a.wrapping_add(b) & mask(w)
}

/// `(b - a) mod 2^w`.
pub fn ref_sub(a: u64, b: u64, w: u32) -> u64 {
    b.wrapping_sub(a) & mask(w)
}

/// Two's-complement negation mod `2^w`.
pub fn ref_neg(a: u64, w: u32) -> u64 {
    a.wrapping_neg() & mask(w)
}

/// Power-of-two shifted add: `b += 2^k a` (k >= 0, top k bits of a ignored)
/// or `b += floor(a / 2^|k|)` (k < 0), mod `2^w`.
pub fn ref_add_shift(a: u64, b: u64, k: i32, w: u32) -> u64 {
    let contrib = if k >= 0 {
        (a & mask(w - k as u32)) << k
    } else {
        a >> (-k) as u32
    };
    b.wrapping_add(contrib) & mask(w)
}

/// One partial term of a shifted-add accumulation.
fn shift_trunc(b: u64, k: i32, w_target: u32) -> u64 {
    if k >= 0 {
        (b << k) & mask(w_target)
    } else {
        b >> (-k) as u32
    }
}

/// Magnitude accumulate: `z += sum_{k: ctrl_k = 1} floor(b 2^(k-p))`
/// mod `2^w_target`. This is the semantics of the controlled shifted-adder
/// cascade inside every multiplier.
pub fn mag_mul_acc(ctrl: u64, b: u64, z: u64, w_ctrl: u32, p: u32, w_target: u32) -> u64 {
    let mut z = z & mask(w_target);
    for k in 0..w_ctrl {
        if (ctrl >> k) & 1 == 1 {
            z = z.wrapping_add(shift_trunc(b, k as i32 - p as i32, w_target)) & mask(w_target);
        }
    }
    z
}

/// Unsigned multiplier: `z += a * b` under the shifted-add truncation, with
/// the partial terms selected by `a`'s bits.
pub fn ref_mul_unsigned(a: u64, b: u64, z: u64, fmt: FixedPointFormat) -> u64 {
    debug_assert!(!fmt.is_signed());
    mag_mul_acc(a, b, z, fmt.r(), fmt.p(), fmt.r())
}

fn sign_mag(code: u64, fmt: FixedPointFormat) -> (bool, u64) {
    fmt.value_from_code(code).to_sign_magnitude().unwrap()
}

/// Signed multiplier: `z += a * b` over `r+1`-bit two's-complement codes.
///
/// Mirrors the circuit: both operands are taken to sign-magnitude form, the
/// target is conditionally negated by the product sign, the magnitude
/// product accumulates with per-term truncation, and the target is negated
/// back.
pub fn ref_mul(a: u64, b: u64, z: u64, fmt: FixedPointFormat) -> u64 {
    debug_assert!(fmt.is_signed());
    let w = fmt.width();
    let (sa, ma) = sign_mag(a, fmt);
    let (sb, mb) = sign_mag(b, fmt);
    let s = sa ^ sb;
    let z1 = if s { ref_neg(z, w) } else { z };
    let z2 = mag_mul_acc(ma, mb, z1, fmt.r(), fmt.p(), w);
    if s {
        ref_neg(z2, w)
    } else {
        z2
    }
}

/// Quantum-classical multiplier: `z += c * b` with the classical factor's
/// bits selecting the partial terms.
pub fn ref_qc_mul(c: FixedPointValue, b: u64, z: u64, fmt: FixedPointFormat) -> u64 {
    debug_assert!(fmt.is_signed());
    let w = fmt.width();
    let (sc, mc) = c.to_sign_magnitude().unwrap();
    let (sb, mb) = sign_mag(b, fmt);
    let s = sc ^ sb;
    let z1 = if s { ref_neg(z, w) } else { z };
    let z2 = mag_mul_acc(mc, mb, z1, fmt.r(), fmt.p(), w);
    if s {
        ref_neg(z2, w)
    } else {
        z2
    }
}

/// Horner evaluation matching the polynomial circuit: the innermost step is
/// a quantum-classical multiply by the leading coefficient, every following
/// step multiplies by `b` into a register preloaded with the next
/// coefficient.
pub fn ref_poly(b: u64, coeffs: &[FixedPointValue], fmt: FixedPointFormat) -> u64 {
    debug_assert!(fmt.is_signed());
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return coeffs[0].code();
    }
    let mut acc = ref_qc_mul(coeffs[degree], b, coeffs[degree - 1].code(), fmt);
    for k in (0..degree - 1).rev() {
        acc = ref_mul(b, acc, coeffs[k].code(), fmt);
    }
    acc
}

fn code_three_halves(p: u32) -> u64 {
    // bits p-1 and p: value 1.5
    assert!(p >= 1, "the 1.5 constant needs p >= 1");
    (1 << p) | (1 << (p - 1))
}

fn code_two(p: u32) -> u64 {
    1 << (p + 1)
}

/// One Newton-Raphson step toward `S^(-1/2)`:
/// `x' = x * (1.5 - floor(S x^2 / 2))` under the multiplier truncation.
pub fn ref_rsqrt_step(s: u64, x: u64, r: u32, p: u32) -> u64 {
    let m1 = mag_mul_acc(s, x, 0, r, p, r);
    let m2 = mag_mul_acc(m1, x, 0, r, p, r);
    let c = code_three_halves(p).wrapping_sub(m2 >> 1) & mask(r);
    mag_mul_acc(x, c, 0, r, p, r)
}

/// One Newton-Raphson step toward `R^(-1)`: `x' = x * (2 - R x)`.
pub fn ref_rec_step(rr: u64, x: u64, r: u32, p: u32) -> u64 {
    let m1 = mag_mul_acc(rr, x, 0, r, p, r);
    let c = code_two(p).wrapping_sub(m1) & mask(r);
    mag_mul_acc(x, c, 0, r, p, r)
}

/// Initial-estimate code for the reciprocal iteration: the leading one of
/// `R` at bit q maps to `x0 = 2^(-m-1)` with `m = q - p`, guaranteeing
/// `R x0` lands in `[1/2, 1)`. Zero input yields zero.
pub fn ref_leading_one_rec(rr: u64, r: u32, p: u32) -> u64 {
    match leading_bit(rr) {
        None => 0,
        Some(q) => {
            let j = 2 * p as i64 - q as i64 - 1;
            if (0..r as i64).contains(&j) {
                1 << j
            } else {
                0
            }
        }
    }
}

/// Initial-estimate code for the inverse-square-root iteration:
/// `x0 = 2^(-floor(m/2)-1)` with `m = q - p`, so `sqrt(S) x0` lands in
/// `[1/2, 1)`.
pub fn ref_leading_one_rsqrt(s: u64, r: u32, p: u32) -> u64 {
    match leading_bit(s) {
        None => 0,
        Some(q) => {
            let m = q as i64 - p as i64;
            let j = p as i64 - m.div_euclid(2) - 1;
            if (0..r as i64).contains(&j) {
                1 << j
            } else {
                0
            }
        }
    }
}

fn leading_bit(v: u64) -> Option<u32> {
    if v == 0 {
        None
    } else {
        Some(63 - v.leading_zeros())
    }
}

fn x0_code(input: u64, fmt: FixedPointFormat, cfg: &NewtonConfig, rsqrt: bool) -> u64 {
    match &cfg.x0 {
        InitialEstimate::Classical { value, .. } => {
            fmt.encode_f64(*value).expect("x0 representable").code()
        }
        InitialEstimate::LeadingOne => {
            if rsqrt {
                ref_leading_one_rsqrt(input, fmt.r(), fmt.p())
            } else {
                ref_leading_one_rec(input, fmt.r(), fmt.p())
            }
        }
    }
}

/// Final iterate `x_L` of the inverse-square-root chain.
pub fn ref_rsqrt(s: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> u64 {
    let mut x = x0_code(s, fmt, cfg, true);
    for _ in 0..cfg.iterations {
        x = ref_rsqrt_step(s, x, fmt.r(), fmt.p());
    }
    x
}

/// Square root: the final iterate multiplied back by `S`.
pub fn ref_sqrt(s: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> u64 {
    let xl = ref_rsqrt(s, fmt, cfg);
    mag_mul_acc(xl, s, 0, fmt.r(), fmt.p(), fmt.r())
}

/// Reciprocal `R^(-1)` after `L` iterations.
pub fn ref_rec(rr: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> u64 {
    let mut x = x0_code(rr, fmt, cfg, false);
    for _ in 0..cfg.iterations {
        x = ref_rec_step(rr, x, fmt.r(), fmt.p());
    }
    x
}

/// In-place square. Returns `(a_out, residue)`: the register that held `a`
/// ends with the truncated square, and the work register keeps
/// `a - sqrt(a^2)`, the approximation error of the uncompute path.
pub fn ref_insq(a: u64, t2_in: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> (u64, u64) {
    let r = fmt.r();
    let sq = mag_mul_acc(a, a, t2_in, r, fmt.p(), r);
    // after the swap the data register holds the square; the uncompute
    // subtracts the recomputed root from the register now holding `a`
    let root = ref_sqrt(sq, fmt, cfg);
    let residue = a.wrapping_sub(root) & mask(r);
    (sq, residue)
}

/// Adjoint of the in-place square applied to a register holding `y`: the
/// data register ends near `sqrt(y)` (offset by whatever the work register
/// held) and the work register keeps `y - square(...)`.
pub fn ref_insq_adjoint(y: u64, t2_in: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> (u64, u64) {
    let r = fmt.r();
    let root = ref_sqrt(y, fmt, cfg);
    let base_out = t2_in.wrapping_add(root) & mask(r);
    let sq_back = mag_mul_acc(base_out, base_out, 0, r, fmt.p(), r);
    let residue = y.wrapping_sub(sq_back) & mask(r);
    (base_out, residue)
}

/// In-place multiply `|a>|b> -> |a>|ab>`. Returns `(product, residue)` where
/// the residue is what remains of `b` after the reciprocal-based uncompute.
pub fn ref_inmul(a: u64, b: u64, t4_in: u64, fmt: FixedPointFormat, cfg: &NewtonConfig) -> (u64, u64) {
    let r = fmt.r();
    let p = fmt.p();
    let t4 = mag_mul_acc(a, b, t4_in, r, p, r);
    let rec = ref_rec(a, fmt, cfg);
    // swap puts the product in the data register and b in the work register,
    // then the adjoint multiplier subtracts rec * product from it
    let residue = b.wrapping_sub(mag_mul_acc(rec, t4, 0, r, p, r)) & mask(r);
    (t4, residue)
}

/// Exponent window: the ladder walks exponent bits `lo..=hi` of the fixed
/// point format; bits outside the window are required to be zero, the same
/// zero-top-bits contract the power-of-two shifted adders use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpWindow {
    pub lo: u32,
    pub hi: u32,
}

impl ExpWindow {
    pub fn full(fmt: FixedPointFormat) -> Self {
        ExpWindow {
            lo: 0,
            hi: fmt.r() - 1,
        }
    }
}

/// State threaded through the exponentiation ladder: the base register, the
/// shared square/multiply work register (residues accumulate there), and the
/// product target.
struct LadderState {
    base: u64,
    work: u64,
    target: u64,
}

fn ladder_insq(st: &mut LadderState, fmt: FixedPointFormat, cfg: &NewtonConfig) {
    let (sq, res) = ref_insq(st.base, st.work, fmt, cfg);
    st.base = sq;
    st.work = res;
}

fn ladder_insq_adjoint(st: &mut LadderState, fmt: FixedPointFormat, cfg: &NewtonConfig) {
    let (root, res) = ref_insq_adjoint(st.base, st.work, fmt, cfg);
    st.base = root;
    st.work = res;
}

fn ladder_inmul(st: &mut LadderState, fmt: FixedPointFormat, cfg: &NewtonConfig) {
    let (prod, res) = ref_inmul(st.base, st.target, st.work, fmt, cfg);
    st.target = prod;
    st.work = res;
}

fn ladder_shift(st: &mut LadderState, from: i64, to: i64, fmt: FixedPointFormat, cfg: &NewtonConfig) {
    let mut cur = from;
    while cur < to {
        ladder_insq(st, fmt, cfg);
        cur += 1;
    }
    while cur > to {
        ladder_insq_adjoint(st, fmt, cfg);
        cur -= 1;
    }
}

fn ref_exp_ladder(
    exponent_bits: impl Fn(u32) -> bool,
    mut st: LadderState,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    window: ExpWindow,
) -> LadderState {
    let p = fmt.p() as i64;
    ladder_shift(&mut st, 0, window.lo as i64 - p, fmt, cfg);
    st.target ^= 1 << fmt.p(); // X seed writes the constant 1
    for k in window.lo..=window.hi {
        if exponent_bits(k) {
            ladder_inmul(&mut st, fmt, cfg);
        }
        if k < window.hi {
            ladder_insq(&mut st, fmt, cfg);
        }
    }
    ladder_shift(&mut st, window.hi as i64 - p, 0, fmt, cfg);
    st
}

/// Exponentiation `b^a` with the exponent read from a quantum register.
/// Returns `(target, base_out, work_residue)`.
pub fn ref_exp(
    a: u64,
    b: u64,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
    window: ExpWindow,
) -> (u64, u64, u64) {
    let st = LadderState {
        base: b,
        work: 0,
        target: 0,
    };
    let out = ref_exp_ladder(|k| (a >> k) & 1 == 1, st, fmt, cfg, window);
    (out.target, out.base, out.work)
}

/// Quantum-classical exponentiation: the exponent code is classical, so the
/// ladder only walks its set bits.
pub fn ref_qc_exp(
    e_code: u64,
    b: u64,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> (u64, u64, u64) {
    assert!(e_code != 0);
    let lo = e_code.trailing_zeros();
    let hi = 63 - e_code.leading_zeros();
    let st = LadderState {
        base: b,
        work: 0,
        target: 0,
    };
    let out = ref_exp_ladder(
        |k| (e_code >> k) & 1 == 1,
        st,
        fmt,
        cfg,
        ExpWindow { lo, hi },
    );
    (out.target, out.base, out.work)
}

/// Signed coefficient for the unsigned signomial accumulator: magnitudes add
/// forward, negative weights run the accumulation backwards.
fn qc_mul_acc_signed(c_code: i64, b: u64, z: u64, fmt: FixedPointFormat) -> u64 {
    let r = fmt.r();
    let m = c_code.unsigned_abs() & mask(r);
    let term = mag_mul_acc(m, b, 0, r, fmt.p(), r);
    if c_code >= 0 {
        z.wrapping_add(term) & mask(r)
    } else {
        z.wrapping_sub(term) & mask(r)
    }
}

/// Signomial coefficients, already scaled to codes.
#[derive(Debug, Clone)]
pub struct SigTerm {
    /// Signed coefficient code (value times 2^p).
    pub c_code: i64,
    /// Exponent numerator k; the exponent is k/kappa.
    pub k: u32,
}

/// Signomial `sum_k c_k b^(k/kappa)`. Mirrors the circuit: the constant term
/// seeds the target, exponent-one terms multiply `b` straight in, all others
/// go through the exponentiation ladder and its adjoint. Returns
/// `(target, base_out, aux_residue, work_residue)`.
pub fn ref_sig(
    b: u64,
    c0_code: i64,
    terms: &[SigTerm],
    kappa: u32,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> (u64, u64, u64, u64) {
    let r = fmt.r();
    let p = fmt.p();
    let mut target = (c0_code as u64) & mask(r);
    let mut base = b;
    let mut aux = 0u64;
    let mut work = 0u64;
    for term in terms {
        if term.c_code == 0 {
            continue;
        }
        let e_code = exponent_code(term.k, kappa, p).expect("exponent representable");
        if e_code == 1 << p {
            target = qc_mul_acc_signed(term.c_code, base, target, fmt);
        } else {
            // forward ladder writes b^(k/kappa) into the aux register
            let lo = e_code.trailing_zeros();
            let hi = 63 - e_code.leading_zeros();
            let st = LadderState {
                base,
                work,
                target: aux,
            };
            let out = ref_exp_ladder(
                |k| (e_code >> k) & 1 == 1,
                st,
                fmt,
                cfg,
                ExpWindow { lo, hi },
            );
            target = qc_mul_acc_signed(term.c_code, out.target, target, fmt);
            // adjoint ladder uncomputes the aux register (up to residues)
            let (aux_out, b_back, w_back) =
                ref_qc_exp_adjoint(e_code, out.target, out.base, out.work, fmt, cfg);
            aux = aux_out;
            base = b_back;
            work = w_back;
        }
    }
    (target, base, aux, work)
}

fn ref_qc_exp_adjoint(
    e_code: u64,
    aux: u64,
    b: u64,
    work: u64,
    fmt: FixedPointFormat,
    cfg: &NewtonConfig,
) -> (u64, u64, u64) {
    // exact adjoint of the forward ladder as a permutation: replay the
    // inverse operations in reverse order
    let p = fmt.p() as i64;
    let lo = e_code.trailing_zeros();
    let hi = 63 - e_code.leading_zeros();
    let mut st = LadderState {
        base: b,
        work,
        target: aux,
    };
    // inverse of the final shift back to p
    ladder_shift(&mut st, 0, hi as i64 - p, fmt, cfg);
    for k in (lo..=hi).rev() {
        if k < hi {
            ladder_insq_adjoint(&mut st, fmt, cfg);
        }
        if (e_code >> k) & 1 == 1 {
            ladder_inmul_adjoint(&mut st, fmt, cfg);
        }
    }
    st.target ^= 1 << fmt.p(); // X unseed
    ladder_shift(&mut st, lo as i64 - p, 0, fmt, cfg);
    (st.target, st.base, st.work)
}

fn ladder_inmul_adjoint(st: &mut LadderState, fmt: FixedPointFormat, cfg: &NewtonConfig) {
    // inverse permutation of ladder_inmul on (target, work) given base
    let r = fmt.r();
    let p = fmt.p();
    let rec = ref_rec(st.base, fmt, cfg);
    let b_prev = st.work.wrapping_add(mag_mul_acc(rec, st.target, 0, r, p, r)) & mask(r);
    let t4_prev = st.target.wrapping_sub(mag_mul_acc(st.base, b_prev, 0, r, p, r)) & mask(r);
    st.target = b_prev;
    st.work = t4_prev;
}

/// Exponent `k/kappa` as a code with `p` fraction bits; `None` when it has
/// no finite binary expansion in that budget.
pub fn exponent_code(k: u32, kappa: u32, p: u32) -> Option<u64> {
    let num = (k as u128) << p;
    if num % kappa as u128 != 0 {
        return None;
    }
    let code = num / kappa as u128;
    u64::try_from(code).ok()
}
