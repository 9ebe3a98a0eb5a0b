//! End-to-end matrix-element oracle for the 1D problem.
//!
//! Maps `|i,j>|0...> -> |i,j>|sign, theta>` with
//! `theta = arccos(sqrt(|H'_ij|))` through the pipeline: condition flags
//! (Dirichlet membership, edge, Kronecker deltas), flag-selected constant
//! loads of the normalised entry, two's-complement to sign-magnitude
//! conversion, the Newton-Raphson square root, and the truncated-series
//! polynomial. Every working register is uncomputed; only the sign qubit
//! and the angle register stay.
//!
//! Index registers hold zero-based node indices; the neighbour tests extend
//! them by one qubit so the `i+-1` comparisons cannot wrap around.

use rayon::prelude::*;

use crate::circuit::{Circuit, CircuitBuilder, Qubit, RegisterHandle};
use crate::classical::{ref_poly, ref_sqrt};
use crate::adders::{emit_qc_add_into, emit_qc_sub_into};
use crate::fem::FemProblem1D;
use crate::fixedpoint::FixedPointFormat;
use crate::geometry::Layout;
use crate::logic::{
    emit_eq_flip, emit_eq_flip_padded, emit_or, emit_qc_cmp_flip, emit_qc_eq_flip, CmpOp,
    CombineMode,
};
use crate::mulpoly::{emit_csm, emit_poly, PolynomialSpec};
use crate::newton::{alloc_newton_scratch, emit_sqrt_block, NewtonConfig};
use crate::series::{arccos_series_spec, SeriesVariant};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("binary point must satisfy 2 <= p <= r (got r={r}, p={p})")]
    BadFormat { r: u32, p: u32 },
    #[error("matrix constant {0} not representable")]
    ConstantOverflow(String),
    #[error(transparent)]
    Newton(#[from] crate::newton::NewtonError),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}

/// Formats and truncation orders for the angle pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub r: u32,
    pub p: u32,
    /// Series truncation order: terms `m = 0..=K` of the arccosine series.
    pub k_order: u32,
    pub newton: NewtonConfig,
    pub layout: Layout,
    pub series: SeriesVariant,
}

impl OracleConfig {
    pub fn new(r: u32, p: u32, k_order: u32, l_iterations: u32) -> Self {
        OracleConfig {
            r,
            p,
            k_order,
            // the magnitudes the pipeline roots are at most 1
            newton: NewtonConfig::classical(l_iterations, 1.0, (0.25, 1.0)),
            layout: Layout::Serial,
            series: SeriesVariant::Standard,
        }
    }

    pub fn fmt_signed(&self) -> FixedPointFormat {
        FixedPointFormat::signed(self.r, self.p).unwrap()
    }

    pub fn fmt_unsigned(&self) -> FixedPointFormat {
        FixedPointFormat::unsigned(self.r, self.p).unwrap()
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.p < 2 || self.p > self.r || self.r > 60 {
            return Err(OracleError::BadFormat { r: self.r, p: self.p });
        }
        self.newton.validate_rsqrt(self.fmt_unsigned())?;
        Ok(())
    }

    /// Polynomial the angle register is computed with.
    pub fn series_spec(&self) -> Result<PolynomialSpec, OracleError> {
        Ok(arccos_series_spec(
            self.k_order,
            self.series,
            self.fmt_signed(),
        )?)
    }
}

/// The normalised matrix constants the oracle loads, as signed codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadCodes {
    pub one: u64,
    pub bulk_diag: u64,
    pub edge_diag: u64,
    pub off_diag: u64,
}

pub fn load_codes(problem: &FemProblem1D, fmt: FixedPointFormat) -> Result<LoadCodes, OracleError> {
    let encode = |v: num::BigRational| -> Result<u64, OracleError> {
        fmt.encode(&v)
            .map(|v| v.code())
            .map_err(|e| OracleError::ConstantOverflow(e.to_string()))
    };
    let norm = problem.h_max_norm();
    let flag = num::BigRational::from_float(problem.flag()).unwrap() / norm.clone();
    let bulk = problem.bulk_diag_value() / norm.clone();
    let edge = problem.coupling_value() / norm;
    Ok(LoadCodes {
        one: encode(flag)?,
        bulk_diag: encode(bulk.clone())?,
        edge_diag: encode(edge.clone())?,
        off_diag: encode(-edge)?,
    })
}

/// Built oracle plus the handles the verification sweep needs.
pub struct OracleCircuit {
    pub circuit: Circuit,
    pub problem: FemProblem1D,
    pub config: OracleConfig,
}

impl OracleCircuit {
    pub fn reg(&self, name: &str) -> &RegisterHandle {
        self.circuit
            .register(name)
            .unwrap_or_else(|| panic!("missing register {name}"))
    }
}

/// Assemble the oracle circuit.
pub fn build_oracle_theta(
    problem: &FemProblem1D,
    config: &OracleConfig,
) -> Result<OracleCircuit, OracleError> {
    config.validate()?;
    let fmt_s = config.fmt_signed();
    let fmt_u = config.fmt_unsigned();
    let spec = config.series_spec()?;
    let codes = load_codes(problem, fmt_s)?;
    let n = problem.index_bits();
    let nn = problem.n_nodes();
    let r = config.r;
    let degree = spec.degree();

    let mut cb = CircuitBuilder::new();
    let i_reg = cb.allocate_register("i", n, None, false).unwrap();
    let j_reg = cb.allocate_register("j", n, None, false).unwrap();
    let ext = cb.allocate_register("ext", 1, None, true).unwrap().bit(0);

    // zero-based Dirichlet intervals
    let intervals: Vec<(u64, u64)> = problem
        .dirichlet()
        .iter()
        .map(|&(lo, hi)| (lo as u64 - 1, hi as u64 - 1))
        .collect();
    let dirichlet_scratch = if intervals.is_empty() {
        DirichletScratch::None
    } else {
        match config.layout {
            Layout::Serial => DirichletScratch::Serial {
                f_ge: cb.allocate_register("cmp_ge", 1, None, true).unwrap().bit(0),
                f_le: cb.allocate_register("cmp_le", 1, None, true).unwrap().bit(0),
                mem: cb.allocate_register("cmp_in", 1, None, true).unwrap().bit(0),
            },
            Layout::Parallel => {
                let mut trios = Vec::new();
                for t in 0..2 {
                    for k in 0..intervals.len() {
                        trios.push((
                            cb.allocate_register(&format!("cmp_ge{t}_{k}"), 1, None, true)
                                .unwrap()
                                .bit(0),
                            cb.allocate_register(&format!("cmp_le{t}_{k}"), 1, None, true)
                                .unwrap()
                                .bit(0),
                            cb.allocate_register(&format!("cmp_in{t}_{k}"), 1, None, true)
                                .unwrap()
                                .bit(0),
                        ));
                    }
                }
                DirichletScratch::Parallel(trios)
            }
        }
    };
    let d_i = cb.allocate_register("d_i", 1, None, true).unwrap().bit(0);
    let d_j = cb.allocate_register("d_j", 1, None, true).unwrap().bit(0);
    let f_flag = cb.allocate_register("f_flag", 1, None, true).unwrap().bit(0);
    let e_lo = cb.allocate_register("e_lo", 1, None, true).unwrap().bit(0);
    let e_hi = cb.allocate_register("e_hi", 1, None, true).unwrap().bit(0);
    let f_edge = cb.allocate_register("f_edge", 1, None, true).unwrap().bit(0);
    let f_eq = cb.allocate_register("f_eq", 1, None, true).unwrap().bit(0);
    let f_jp = cb.allocate_register("f_jp", 1, None, true).unwrap().bit(0);
    let f_jm = cb.allocate_register("f_jm", 1, None, true).unwrap().bit(0);
    let s_one = cb.allocate_register("s_one", 1, None, true).unwrap().bit(0);
    let s_half = cb.allocate_register("s_half", 1, None, true).unwrap().bit(0);
    let s_quarter = cb.allocate_register("s_quarter", 1, None, true).unwrap().bit(0);
    let s_moff = cb.allocate_register("s_moff", 1, None, true).unwrap().bit(0);
    let hp = cb
        .allocate_register("hp", r + 1, Some(fmt_s), false)
        .unwrap();
    let sign = cb.allocate_register("sign", 1, None, false).unwrap();
    let carry = cb.allocate_register("carry", 1, None, true).unwrap();
    let scratch = alloc_newton_scratch(&mut cb, "nr_", fmt_u, &config.newton, true, carry.bit(0), None);
    let y = cb.allocate_register("y", r + 1, Some(fmt_s), false).unwrap();
    let mut works = Vec::new();
    for k in 0..degree.saturating_sub(1) {
        works.push(
            cb.allocate_register(&format!("work{k}"), r + 1, Some(fmt_s), true)
                .unwrap()
                .bits(),
        );
    }
    let theta = cb
        .allocate_register("theta", r + 1, Some(fmt_s), false)
        .unwrap();

    let ib = i_reg.bits();
    let jb = j_reg.bits();

    // ---- condition flags ----
    let flags_from = cb.len();
    let mut trio_cursor = 0usize;
    for (target_bits, d_flag) in [(&ib, d_i), (&jb, d_j)] {
        for &(lo, hi) in &intervals {
            match &dirichlet_scratch {
                DirichletScratch::None => unreachable!(),
                DirichletScratch::Serial { f_ge, f_le, mem } => {
                    let local_from = cb.len();
                    emit_qc_cmp_flip(&mut cb, target_bits, ext, lo, CmpOp::Geq, *f_ge);
                    emit_qc_cmp_flip(&mut cb, target_bits, ext, hi, CmpOp::Leq, *f_le);
                    cb.ccx(*f_ge, *f_le, *mem);
                    let local_to = cb.len();
                    cb.cx(*mem, d_flag);
                    cb.append_adjoint_of_range(local_from, local_to);
                }
                DirichletScratch::Parallel(trios) => {
                    let (f_ge, f_le, mem) = trios[trio_cursor];
                    trio_cursor += 1;
                    emit_qc_cmp_flip(&mut cb, target_bits, ext, lo, CmpOp::Geq, f_ge);
                    emit_qc_cmp_flip(&mut cb, target_bits, ext, hi, CmpOp::Leq, f_le);
                    cb.ccx(f_ge, f_le, mem);
                    cb.cx(mem, d_flag);
                }
            }
        }
    }
    emit_or(&mut cb, &[d_i, d_j], &[], f_flag, CombineMode::Flat);
    emit_qc_eq_flip(&mut cb, &ib, 0, e_lo);
    emit_qc_eq_flip(&mut cb, &ib, (nn - 1) as u64, e_hi);
    emit_or(&mut cb, &[e_lo, e_hi], &[], f_edge, CombineMode::Flat);
    emit_eq_flip(&mut cb, &ib, &jb, f_eq);
    // neighbour tests on the extended index so decrements cannot wrap
    let mut iext = ib.clone();
    iext.push(ext);
    emit_qc_add_into(&mut cb, 1, &iext);
    emit_eq_flip_padded(&mut cb, &ib, &[ext], &jb, f_jp);
    emit_qc_sub_into(&mut cb, 2, &iext);
    emit_eq_flip_padded(&mut cb, &ib, &[ext], &jb, f_jm);
    emit_qc_add_into(&mut cb, 1, &iext);
    // selectors
    cb.ccx(f_flag, f_eq, s_one);
    cb.x(f_flag);
    cb.x(f_edge);
    cb.mcx(vec![f_flag, f_edge, f_eq], s_half);
    cb.x(f_edge);
    cb.mcx(vec![f_flag, f_edge, f_eq], s_quarter);
    cb.mcx(vec![f_flag, f_jp], s_moff);
    cb.mcx(vec![f_flag, f_jm], s_moff);
    cb.x(f_flag);
    let flags_to = cb.len();

    // ---- constant loads ----
    let hp_bits = hp.bits();
    for (sel, code) in [
        (s_one, codes.one),
        (s_half, codes.bulk_diag),
        (s_quarter, codes.edge_diag),
        (s_moff, codes.off_diag),
    ] {
        for (b, &q) in hp_bits.iter().enumerate() {
            if (code >> b) & 1 == 1 {
                cb.cx(sel, q);
            }
        }
    }
    let loads_to = cb.len();

    // ---- the angle pipeline ----
    emit_csm(&mut cb, &hp_bits);
    let csm_to = cb.len();
    cb.cx(hp_bits[r as usize], sign.bit(0));
    let sqrt_from = cb.len();
    let y_bits = y.bits();
    emit_sqrt_block(
        &mut cb,
        &hp_bits[..r as usize],
        &y_bits[..r as usize],
        &scratch,
        fmt_u,
        &config.newton,
    );
    let sqrt_to = cb.len();
    emit_poly(&mut cb, &spec, &y_bits, &works, &theta.bits(), carry.bit(0));

    // ---- uncompute everything but sign and theta ----
    cb.append_adjoint_of_range(sqrt_from, sqrt_to);
    cb.append_adjoint_of_range(loads_to, csm_to);
    cb.append_adjoint_of_range(flags_to, loads_to);
    cb.append_adjoint_of_range(flags_from, flags_to);

    Ok(OracleCircuit {
        circuit: cb.build(),
        problem: problem.clone(),
        config: config.clone(),
    })
}

enum DirichletScratch {
    None,
    Serial { f_ge: Qubit, f_le: Qubit, mem: Qubit },
    Parallel(Vec<(Qubit, Qubit, Qubit)>),
}

/// Classical mirror of the full pipeline: the load code the flags select,
/// its sign/magnitude split, the Newton square root, and the Horner series,
/// all at the circuit's bit semantics.
pub fn ref_oracle_theta(
    i: u32,
    j: u32,
    problem: &FemProblem1D,
    config: &OracleConfig,
) -> Result<(bool, u64), OracleError> {
    let fmt_s = config.fmt_signed();
    let fmt_u = config.fmt_unsigned();
    let codes = load_codes(problem, fmt_s)?;
    let flagged = !(problem.is_free(i) && problem.is_free(j));
    let code = if flagged {
        if i == j {
            codes.one
        } else {
            0
        }
    } else if i == j {
        if problem.is_edge(i) {
            codes.edge_diag
        } else {
            codes.bulk_diag
        }
    } else if j == i + 1 || j + 1 == i {
        codes.off_diag
    } else {
        0
    };
    let (sign, mag) = fmt_s.value_from_code(code).to_sign_magnitude().unwrap();
    let y = ref_sqrt(mag, fmt_u, &config.newton);
    let spec = config.series_spec()?;
    let theta = ref_poly(y, spec.coefficients(), fmt_s);
    Ok((sign, theta))
}

/// One verified matrix-element access.
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub i: u32,
    pub j: u32,
    pub sign: bool,
    pub theta_code: u64,
    pub theta: f64,
    pub matches_reference: bool,
    pub workspace_clean: bool,
    /// `|theta - arccos(sqrt(|H'|))|` for rows that carry physics.
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub pairs: Vec<PairCheck>,
    pub max_deviation: f64,
    pub all_match: bool,
    pub all_clean: bool,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.all_match && self.all_clean
    }
}

/// Sweep the banded pairs (plus a seeded sample of far pairs) through the
/// simulator and compare bit-for-bit with the classical mirror.
pub fn verify_oracle(
    oracle: &OracleCircuit,
    far_samples: usize,
    seed: u64,
) -> Result<VerifyReport, OracleError> {
    let problem = &oracle.problem;
    let nn = problem.n_nodes();
    let mut pairs = Vec::new();
    for i in 1..=nn {
        for j in 1..=nn {
            if i.abs_diff(j) <= 1 {
                pairs.push((i, j));
            }
        }
    }
    // deterministic linear-congruential sample of far pairs
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut added = 0usize;
    while added < far_samples && nn > 4 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let i = (state >> 33) % nn as u64 + 1;
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let j = (state >> 33) % nn as u64 + 1;
        if (i as u32).abs_diff(j as u32) > 1 {
            pairs.push((i as u32, j as u32));
            added += 1;
        }
    }

    let checks: Result<Vec<PairCheck>, OracleError> = pairs
        .par_iter()
        .map(|&(i, j)| check_pair(oracle, i, j))
        .collect();
    let mut pairs = checks?;
    pairs.sort_by_key(|c| (c.i, c.j));
    let max_deviation = pairs
        .iter()
        .filter_map(|c| c.deviation)
        .fold(0.0f64, f64::max);
    let all_match = pairs.iter().all(|c| c.matches_reference);
    let all_clean = pairs.iter().all(|c| c.workspace_clean);
    Ok(VerifyReport {
        pairs,
        max_deviation,
        all_match,
        all_clean,
    })
}

fn check_pair(oracle: &OracleCircuit, i: u32, j: u32) -> Result<PairCheck, OracleError> {
    use crate::circuit::BitString;
    let problem = &oracle.problem;
    let config = &oracle.config;
    let circuit = &oracle.circuit;
    let i_reg = oracle.reg("i");
    let j_reg = oracle.reg("j");
    let sign_reg = oracle.reg("sign");
    let theta_reg = oracle.reg("theta");

    let mut input = BitString::zeros(circuit.num_qubits() as usize);
    input.set_register_code(i_reg, (i - 1) as u64);
    input.set_register_code(j_reg, (j - 1) as u64);
    let out = circuit.simulate(&input).expect("input sized to circuit");

    let sign = out.register_code(sign_reg) == 1;
    let theta_code = out.register_code(theta_reg);
    let clean = out.zero_outside(&[i_reg, j_reg, sign_reg, theta_reg])
        && out.register_code(i_reg) == (i - 1) as u64
        && out.register_code(j_reg) == (j - 1) as u64;

    let (ref_sign, ref_theta) = ref_oracle_theta(i, j, problem, config)?;
    let matches = sign == ref_sign && theta_code == ref_theta;

    let theta = config
        .fmt_signed()
        .value_from_code(theta_code)
        .decode_f64();
    let flagged_row = !(problem.is_free(i) && problem.is_free(j));
    let deviation = if flagged_row {
        None
    } else {
        let hp = num::ToPrimitive::to_f64(&problem.h_prime_entry(i, j)).unwrap();
        Some((theta - hp.abs().sqrt().acos()).abs())
    };
    Ok(PairCheck {
        i,
        j,
        sign,
        theta_code,
        theta,
        matches_reference: matches,
        workspace_clean: clean,
        deviation,
    })
}
