//! Geometry containment tests over node-index registers.
//!
//! A hypercuboid is two threshold comparisons per axis ANDed together;
//! unions OR the per-primitive flags. A hyperellipsoid evaluates its
//! quadratic form with classically preprocessed coefficients and compares
//! against one.
//!
//! Comparisons either run in place on the index register, one after another
//! through a single shared extension qubit (serial layout), or against
//! per-condition copies so they can run in parallel layers at the cost of
//! one copy register per comparison (parallel layout).

use crate::adders::emit_qc_add_into;
use crate::circuit::{Circuit, CircuitBuilder, Qubit};
use crate::fixedpoint::{mask, FixedPointFormat};
use crate::logic::{emit_and, emit_or, emit_qc_cmp_flip, CmpOp, CombineMode};
use crate::mulpoly::{emit_csm, emit_csm_adjoint};
use crate::newton::signed_code;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("geometry specification is empty")]
    Empty,
    #[error("bound {0} not representable in the index register")]
    BoundOutOfRange(u64),
    #[error("interval bounds inverted: {0} > {1}")]
    InvertedBounds(u64, u64),
    #[error("axis count mismatch")]
    DimensionMismatch,
    #[error("semi-axis must be positive")]
    BadSemiAxis,
    #[error("coefficient not representable: {0}")]
    CoefficientOverflow(String),
}

/// Evaluation layout for multi-condition tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// One shared comparator extension; comparisons run back to back.
    #[default]
    Serial,
    /// One index copy per comparison, so comparisons can share layers.
    Parallel,
}

/// Axis-aligned hypercuboid, inclusive index-code bounds per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuboidSpec {
    pub bounds: Vec<(u64, u64)>,
}

/// Hyperellipsoid with centre and semi-axes in physical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    pub center: Vec<f64>,
    pub semi_axes: Vec<f64>,
}

/// Union of primitive geometries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeometrySpec {
    pub cuboids: Vec<CuboidSpec>,
    pub ellipsoids: Vec<EllipsoidSpec>,
}

impl GeometrySpec {
    pub fn validate(&self, index_width: u32) -> Result<(), GeometryError> {
        if self.cuboids.is_empty() && self.ellipsoids.is_empty() {
            return Err(GeometryError::Empty);
        }
        let limit = mask(index_width);
        for c in &self.cuboids {
            if c.bounds.is_empty() {
                return Err(GeometryError::Empty);
            }
            for &(lo, hi) in &c.bounds {
                if lo > hi {
                    return Err(GeometryError::InvertedBounds(lo, hi));
                }
                if hi > limit {
                    return Err(GeometryError::BoundOutOfRange(hi));
                }
            }
        }
        for e in &self.ellipsoids {
            if e.center.len() != e.semi_axes.len() || e.center.is_empty() {
                return Err(GeometryError::DimensionMismatch);
            }
            if e.semi_axes.iter().any(|&h| h <= 0.0) {
                return Err(GeometryError::BadSemiAxis);
            }
        }
        Ok(())
    }

    /// Classical membership predicate over index codes (one per axis), used
    /// as the oracle in tests and the verification sweep. `delta` maps
    /// indices to coordinates for the ellipsoid members.
    pub fn contains(&self, idx: &[u64], delta: f64) -> bool {
        let in_cuboid = |c: &CuboidSpec| {
            c.bounds
                .iter()
                .zip(idx)
                .all(|(&(lo, hi), &i)| lo <= i && i <= hi)
        };
        let in_ellipsoid = |e: &EllipsoidSpec| {
            let sum: f64 = e
                .center
                .iter()
                .zip(&e.semi_axes)
                .zip(idx)
                .map(|((&c, &h), &i)| {
                    let t = (delta * i as f64 - c) / h;
                    t * t
                })
                .sum();
            sum <= 1.0
        };
        self.cuboids.iter().any(in_cuboid) || self.ellipsoids.iter().any(in_ellipsoid)
    }
}

/// Emit both interval comparisons for one axis, serial layout: in place on
/// the index register through the shared extension qubit.
pub fn emit_interval_flags(
    cb: &mut CircuitBuilder,
    idx: &[Qubit],
    ext: Qubit,
    lo: u64,
    hi: u64,
    f_ge: Qubit,
    f_le: Qubit,
) {
    emit_qc_cmp_flip(cb, idx, ext, lo, CmpOp::Geq, f_ge);
    emit_qc_cmp_flip(cb, idx, ext, hi, CmpOp::Leq, f_le);
}

/// Parallel-layout variant: copy the index into a fresh `n+1`-qubit work
/// register, compare there, uncopy.
fn emit_cmp_copied(
    cb: &mut CircuitBuilder,
    idx: &[Qubit],
    copy: &[Qubit],
    code: u64,
    op: CmpOp,
    flag: Qubit,
) {
    debug_assert_eq!(copy.len(), idx.len() + 1);
    for (&src, &dst) in idx.iter().zip(copy) {
        cb.cx(src, dst);
    }
    let (low, ext) = copy.split_at(idx.len());
    emit_qc_cmp_flip(cb, low, ext[0], code, op, flag);
    for (&src, &dst) in idx.iter().zip(copy) {
        cb.cx(src, dst);
    }
}

struct CmpPlan {
    serial_ext: Option<Qubit>,
    copies: Vec<Vec<Qubit>>,
    next_copy: usize,
}

impl CmpPlan {
    fn alloc(cb: &mut CircuitBuilder, layout: Layout, n: u32, comparisons: usize) -> CmpPlan {
        match layout {
            Layout::Serial => CmpPlan {
                serial_ext: Some(cb.allocate_register("ext", 1, None, true).unwrap().bit(0)),
                copies: Vec::new(),
                next_copy: 0,
            },
            Layout::Parallel => CmpPlan {
                serial_ext: None,
                copies: (0..comparisons)
                    .map(|i| {
                        cb.allocate_register(&format!("cmp{i}"), n + 1, None, true)
                            .unwrap()
                            .bits()
                    })
                    .collect(),
                next_copy: 0,
            },
        }
    }

    fn emit(
        &mut self,
        cb: &mut CircuitBuilder,
        idx: &[Qubit],
        code: u64,
        op: CmpOp,
        flag: Qubit,
    ) {
        match self.serial_ext {
            Some(ext) => emit_qc_cmp_flip(cb, idx, ext, code, op, flag),
            None => {
                let copy = self.copies[self.next_copy].clone();
                self.next_copy += 1;
                emit_cmp_copied(cb, idx, &copy, code, op, flag);
            }
        }
    }
}

/// Membership test for a single hypercuboid over one index register per
/// axis. Registers: `idx0..`, comparator scratch, `ge{a}`/`le{a}` result
/// qubits, `flag`. Comparison ancillas are restored; the 2d result qubits
/// are uncomputed after combining.
pub fn build_cuboid_test(cuboid: &CuboidSpec, index_width: u32, layout: Layout) -> Circuit {
    let spec = GeometrySpec {
        cuboids: vec![cuboid.clone()],
        ellipsoids: Vec::new(),
    };
    build_union_test_inner(&spec, index_width, layout, None)
}

/// Membership test for a union of hypercuboids (and ellipsoids when the
/// arithmetic parameters are supplied via [`build_union_test_with`]).
pub fn build_union_test(spec: &GeometrySpec, index_width: u32, layout: Layout) -> Circuit {
    build_union_test_inner(spec, index_width, layout, None)
}

/// Union test including ellipsoid members; `fmt`/`delta` drive their
/// fixed-point quadratic forms.
pub fn build_union_test_with(
    spec: &GeometrySpec,
    index_width: u32,
    layout: Layout,
    fmt: FixedPointFormat,
    delta: f64,
) -> Circuit {
    build_union_test_inner(spec, index_width, layout, Some((fmt, delta)))
}

fn build_union_test_inner(
    spec: &GeometrySpec,
    index_width: u32,
    layout: Layout,
    ellipsoid_params: Option<(FixedPointFormat, f64)>,
) -> Circuit {
    spec.validate(index_width).unwrap();
    let d = spec
        .cuboids
        .first()
        .map(|c| c.bounds.len())
        .or_else(|| spec.ellipsoids.first().map(|e| e.center.len()))
        .unwrap();
    assert!(
        spec.cuboids.iter().all(|c| c.bounds.len() == d)
            && spec.ellipsoids.iter().all(|e| e.center.len() == d),
        "mixed dimensionality"
    );
    if !spec.ellipsoids.is_empty() {
        assert!(
            ellipsoid_params.is_some(),
            "ellipsoid members need arithmetic parameters"
        );
    }

    let mut cb = CircuitBuilder::new();
    let idx: Vec<Vec<Qubit>> = (0..d)
        .map(|a| {
            cb.allocate_register(&format!("idx{a}"), index_width, None, false)
                .unwrap()
                .bits()
        })
        .collect();
    let comparisons = 2 * d * spec.cuboids.len();
    let mut plan = CmpPlan::alloc(&mut cb, layout, index_width, comparisons);
    let mut member_flags = Vec::new();
    for (ci, _) in spec.cuboids.iter().enumerate() {
        member_flags.push(
            cb.allocate_register(&format!("in_c{ci}"), 1, None, true)
                .unwrap()
                .bit(0),
        );
    }
    for (ei, _) in spec.ellipsoids.iter().enumerate() {
        member_flags.push(
            cb.allocate_register(&format!("in_e{ei}"), 1, None, true)
                .unwrap()
                .bit(0),
        );
    }
    let cmp_flags: Vec<Qubit> = (0..2 * d)
        .map(|i| {
            cb.allocate_register(&format!("cmp_f{i}"), 1, None, true)
                .unwrap()
                .bit(0)
        })
        .collect();
    let ell_scratch = ellipsoid_params.map(|(fmt, _)| EllScratch::alloc(&mut cb, fmt));
    let flag = cb.allocate_register("flag", 1, None, false).unwrap().bit(0);

    let members_from = cb.len();
    for (ci, cuboid) in spec.cuboids.iter().enumerate() {
        let from = cb.len();
        for (a, &(lo, hi)) in cuboid.bounds.iter().enumerate() {
            plan.emit(&mut cb, &idx[a], lo, CmpOp::Geq, cmp_flags[2 * a]);
            plan.emit(&mut cb, &idx[a], hi, CmpOp::Leq, cmp_flags[2 * a + 1]);
        }
        let to = cb.len();
        emit_and(
            &mut cb,
            &cmp_flags,
            &[],
            member_flags[ci],
            CombineMode::Flat,
        );
        cb.append_adjoint_of_range(from, to);
    }
    for (ei, ell) in spec.ellipsoids.iter().enumerate() {
        let (fmt, delta) = ellipsoid_params.unwrap();
        emit_ellipsoid_flag(
            &mut cb,
            ell,
            &idx,
            ell_scratch.as_ref().unwrap(),
            fmt,
            delta,
            member_flags[spec.cuboids.len() + ei],
        );
    }
    let members_to = cb.len();
    emit_or(&mut cb, &member_flags, &[], flag, CombineMode::Flat);
    cb.append_adjoint_of_range(members_from, members_to);
    cb.build()
}

struct EllScratch {
    t: Vec<Qubit>,
    acc: Vec<Qubit>,
    bit_copy: Qubit,
    ext: Qubit,
    carry: Qubit,
}

impl EllScratch {
    fn alloc(cb: &mut CircuitBuilder, fmt: FixedPointFormat) -> EllScratch {
        EllScratch {
            t: cb
                .allocate_register("ell_t", fmt.r() + 1, None, true)
                .unwrap()
                .bits(),
            acc: cb
                .allocate_register("ell_acc", fmt.r(), None, true)
                .unwrap()
                .bits(),
            bit_copy: cb.allocate_register("ell_bc", 1, None, true).unwrap().bit(0),
            ext: cb.allocate_register("ell_ext", 1, None, true).unwrap().bit(0),
            carry: cb.allocate_register("ell_carry", 1, None, true).unwrap().bit(0),
        }
    }
}

/// One hyperellipsoid test: accumulate the quadratic form
/// `sum ((delta i - c) / h)^2` into the scratch accumulator, compare with 1,
/// and uncompute. Flips `flag` on membership (sum <= 1).
fn emit_ellipsoid_flag(
    cb: &mut CircuitBuilder,
    ell: &EllipsoidSpec,
    idx: &[Vec<Qubit>],
    scr: &EllScratch,
    fmt: FixedPointFormat,
    delta: f64,
    flag: Qubit,
) {
    let p = fmt.p();
    let r = fmt.r();
    let w = r + 1;
    let acc_from = cb.len();
    for (a, axis_idx) in idx.iter().enumerate() {
        let u = signed_code(delta / ell.semi_axes[a], fmt)
            .unwrap_or_else(|| panic!("axis coefficient overflow"));
        let v = signed_code(-ell.center[a] / ell.semi_axes[a], fmt)
            .unwrap_or_else(|| panic!("axis offset overflow"));
        // t = u * i + v, an affine map driven by the index bits
        let affine_from = cb.len();
        for (k, &ik) in axis_idx.iter().enumerate() {
            let shifted = ((u as u64) << k) & mask(w);
            cb.with_controls(&[ik], |cb| emit_qc_add_into(cb, shifted, &scr.t));
        }
        emit_qc_add_into(cb, (v as u64) & mask(w), &scr.t);
        let affine_to = cb.len();
        emit_csm(cb, &scr.t);
        // acc += |t|^2
        let t_mag = scr.t[..r as usize].to_vec();
        for k in 0..r as usize {
            cb.cx(t_mag[k], scr.bit_copy);
            cb.with_controls(&[scr.bit_copy], |cb| {
                crate::adders::emit_shift_add_into(
                    cb,
                    &t_mag,
                    k as i32 - p as i32,
                    &scr.acc,
                    scr.carry,
                );
            });
            cb.cx(t_mag[k], scr.bit_copy);
        }
        emit_csm_adjoint(cb, &scr.t);
        cb.append_adjoint_of_range(affine_from, affine_to); // t -> 0
    }
    let acc_to = cb.len();
    emit_qc_cmp_flip(cb, &scr.acc, scr.ext, 1 << p, CmpOp::Leq, flag);
    cb.append_adjoint_of_range(acc_from, acc_to); // acc -> 0, axis work repeats in reverse
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BitString, Circuit};

    fn run_point(c: &Circuit, point: &[u64]) -> (u64, bool) {
        let mut input = BitString::zeros(c.num_qubits() as usize);
        for (a, &v) in point.iter().enumerate() {
            input.set_register_code(c.register(&format!("idx{a}")).unwrap(), v);
        }
        let out = c.simulate(&input).unwrap();
        let flag = out.register_code(c.register("flag").unwrap());
        let regs: Vec<&crate::circuit::RegisterHandle> = point
            .iter()
            .enumerate()
            .map(|(a, _)| c.register(&format!("idx{a}")).unwrap())
            .chain([c.register("flag").unwrap()])
            .collect();
        let clean = out.zero_outside(&regs)
            && point
                .iter()
                .enumerate()
                .all(|(a, &v)| out.register_code(c.register(&format!("idx{a}")).unwrap()) == v);
        (flag, clean)
    }

    #[test]
    fn interval_boundaries_inclusive() {
        let cuboid = CuboidSpec { bounds: vec![(1, 6)] };
        for layout in [Layout::Serial, Layout::Parallel] {
            let c = build_cuboid_test(&cuboid, 3, layout);
            for i in 0..8u64 {
                let (flag, clean) = run_point(&c, &[i]);
                assert_eq!(flag, (1..=6).contains(&i) as u64, "i={i} {layout:?}");
                assert!(clean, "dirty at i={i} {layout:?}");
            }
        }
    }

    #[test]
    fn full_range_interval_always_inside() {
        let cuboid = CuboidSpec { bounds: vec![(0, 7)] };
        let c = build_cuboid_test(&cuboid, 3, Layout::Serial);
        for i in 0..8u64 {
            assert_eq!(run_point(&c, &[i]).0, 1);
        }
    }

    #[test]
    fn two_dimensional_cuboid() {
        let cuboid = CuboidSpec {
            bounds: vec![(2, 5), (1, 3)],
        };
        let c = build_cuboid_test(&cuboid, 3, Layout::Serial);
        for x in 0..8u64 {
            for y in 0..8u64 {
                let want = (2..=5).contains(&x) && (1..=3).contains(&y);
                let (flag, clean) = run_point(&c, &[x, y]);
                assert_eq!(flag, want as u64, "({x},{y})");
                assert!(clean);
            }
        }
    }

    #[test]
    fn union_of_disjoint_intervals() {
        let spec = GeometrySpec {
            cuboids: vec![
                CuboidSpec { bounds: vec![(0, 1)] },
                CuboidSpec { bounds: vec![(5, 6)] },
            ],
            ellipsoids: vec![],
        };
        for layout in [Layout::Serial, Layout::Parallel] {
            let c = build_union_test(&spec, 3, layout);
            for i in 0..8u64 {
                let (flag, clean) = run_point(&c, &[i]);
                assert_eq!(flag, spec.contains(&[i], 1.0) as u64, "i={i}");
                assert!(clean);
            }
        }
    }

    #[test]
    fn union_matches_predicate_on_random_specs() {
        let mut state = 0xfeedu64;
        let mut next = |m: u64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) % m
        };
        for trial in 0..50 {
            let n_geo = 1 + next(3);
            let mut cuboids = Vec::new();
            for _ in 0..n_geo {
                let lo = next(64);
                let hi = (lo + next(20)).min(63);
                cuboids.push(CuboidSpec { bounds: vec![(lo, hi)] });
            }
            let spec = GeometrySpec { cuboids, ellipsoids: vec![] };
            let c = build_union_test(&spec, 6, Layout::Serial);
            for i in 0..64u64 {
                let (flag, clean) = run_point(&c, &[i]);
                assert_eq!(
                    flag,
                    spec.contains(&[i], 1.0) as u64,
                    "trial {trial} i={i} spec {spec:?}"
                );
                assert!(clean);
            }
        }
    }

    #[test]
    fn one_dimensional_ellipsoid_agrees_with_interval() {
        // |i - 4| <= 2 both as an interval and as a quadratic form; all
        // coefficients dyadic so the arithmetic is exact
        let fmt = FixedPointFormat::signed(10, 4).unwrap();
        let ell = EllipsoidSpec {
            center: vec![4.0],
            semi_axes: vec![2.0],
        };
        let spec = GeometrySpec {
            cuboids: vec![],
            ellipsoids: vec![ell],
        };
        let c = build_union_test_with(&spec, 3, Layout::Serial, fmt, 1.0);
        let interval = build_cuboid_test(&CuboidSpec { bounds: vec![(2, 6)] }, 3, Layout::Serial);
        for i in 0..8u64 {
            let (flag, clean) = run_point(&c, &[i]);
            let (want, _) = run_point(&interval, &[i]);
            assert_eq!(flag, want, "i={i}");
            assert_eq!(flag, spec.contains(&[i], 1.0) as u64);
            assert!(clean, "dirty at i={i}");
        }
    }

    #[test]
    fn ellipsoid_center_inside_and_two_semi_axes_outside() {
        let fmt = FixedPointFormat::signed(12, 6).unwrap();
        let ell = EllipsoidSpec {
            center: vec![8.0, 8.0],
            semi_axes: vec![2.0, 4.0],
        };
        let spec = GeometrySpec {
            cuboids: vec![],
            ellipsoids: vec![ell],
        };
        let c = build_union_test_with(&spec, 4, Layout::Serial, fmt, 1.0);
        assert_eq!(run_point(&c, &[8, 8]).0, 1);
        assert_eq!(run_point(&c, &[12, 8]).0, 0); // 2 h away on axis 0
        assert_eq!(run_point(&c, &[8, 12]).0, 1); // exactly h away: on the boundary
        assert_eq!(run_point(&c, &[11, 8]).0, 0);
        assert_eq!(run_point(&c, &[9, 10]).0, 1);
    }

    #[test]
    fn validation_errors() {
        let empty = GeometrySpec::default();
        assert_eq!(empty.validate(3), Err(GeometryError::Empty));
        let bad = GeometrySpec {
            cuboids: vec![CuboidSpec { bounds: vec![(5, 2)] }],
            ellipsoids: vec![],
        };
        assert_eq!(bad.validate(3), Err(GeometryError::InvertedBounds(5, 2)));
        let oob = GeometrySpec {
            cuboids: vec![CuboidSpec { bounds: vec![(0, 9)] }],
            ellipsoids: vec![],
        };
        assert_eq!(oob.validate(3), Err(GeometryError::BoundOutOfRange(9)));
        let flat = GeometrySpec {
            cuboids: vec![],
            ellipsoids: vec![EllipsoidSpec {
                center: vec![1.0],
                semi_axes: vec![0.0],
            }],
        };
        assert_eq!(flat.validate(3), Err(GeometryError::BadSemiAxis));
    }
}
