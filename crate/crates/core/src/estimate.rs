//! Closed-form resource estimates.
//!
//! Formulas marked exact are checked against built circuits; the adder and
//! exponentiation tables are static estimator data for alternatives this
//! crate does not implement (only the carry-ripple family is built).

use crate::geometry::Layout;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EstimateError {
    #[error("unknown adder `{0}`")]
    UnknownAdder(String),
}

/// Adder families with their runtime class and memory footprint for
/// `r`-digit summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdderKind {
    CarryRipple,
    CarrySelect,
    ConditionalSum,
    CarryLookahead,
    FourierTransform,
}

impl AdderKind {
    pub fn parse(name: &str) -> Result<Self, EstimateError> {
        match name {
            "carry-ripple" => Ok(AdderKind::CarryRipple),
            "carry-select" => Ok(AdderKind::CarrySelect),
            "conditional-sum" => Ok(AdderKind::ConditionalSum),
            "carry-lookahead" => Ok(AdderKind::CarryLookahead),
            "fourier-transform" | "qft" => Ok(AdderKind::FourierTransform),
            other => Err(EstimateError::UnknownAdder(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AdderKind::CarryRipple => "carry-ripple",
            AdderKind::CarrySelect => "carry-select",
            AdderKind::ConditionalSum => "conditional-sum",
            AdderKind::CarryLookahead => "carry-lookahead",
            AdderKind::FourierTransform => "fourier-transform",
        }
    }

    pub fn runtime_class(&self) -> &'static str {
        match self {
            AdderKind::CarryRipple => "O(r)",
            AdderKind::CarrySelect => "O(sqrt(r))",
            AdderKind::ConditionalSum => "O(log2 r)",
            AdderKind::CarryLookahead => "O(log2 r)",
            AdderKind::FourierTransform => "O(r^2)",
        }
    }

    /// Memory in qubits for `r`-digit summands. Exact for the rows quoted
    /// with closed forms, the conditional-sum row is the usual approximation.
    pub fn memory(&self, r: u64) -> u64 {
        match self {
            AdderKind::CarryRipple => 2 * r + 1,
            AdderKind::CarrySelect => 2 * r + (r as f64).sqrt().round() as u64,
            AdderKind::ConditionalSum => 7 * r - 6,
            AdderKind::CarryLookahead => 4 * r - (r as f64).log2().floor() as u64 - 1,
            AdderKind::FourierTransform => 2 * r,
        }
    }

    /// Only the carry-ripple adder is built in this crate; its memory row is
    /// exact against the circuit.
    pub fn exact(&self) -> bool {
        matches!(self, AdderKind::CarryRipple)
    }
}

/// Static rows for quantum-classical exponentiation alternatives
/// (`r`-digit exponents).
pub fn exponentiation_table(r: u64) -> Vec<FormulaRow> {
    let approx = |v: f64| v.round() as u64;
    vec![
        FormulaRow::data("exp carry-ripple", 5 * r + 3, "O(r^3)"),
        FormulaRow::data("exp conditional-sum", approx(1.9 * (r * r) as f64), "O(r log2^2 r)"),
        FormulaRow::data("exp carry-lookahead", approx(1.9 * (r * r) as f64), "O(r log2^2 r)"),
        FormulaRow::data("exp fourier", 2 * r + 3, "O(r^3)"),
        FormulaRow::data("exp fourier-parallel", 9 * r + 2, "O(r^2)"),
    ]
}

/// One estimator row: a qubit formula with its runtime class. `exact` rows
/// are asserted against built circuits in the test suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaRow {
    pub name: String,
    pub qubits: u64,
    pub runtime: String,
    pub exact: bool,
}

impl FormulaRow {
    fn exact(name: &str, qubits: u64, runtime: &str) -> Self {
        FormulaRow {
            name: name.to_string(),
            qubits,
            runtime: runtime.to_string(),
            exact: true,
        }
    }

    fn data(name: &str, qubits: u64, runtime: &str) -> Self {
        FormulaRow {
            name: name.to_string(),
            qubits,
            runtime: runtime.to_string(),
            exact: false,
        }
    }
}

/// Parameters the closed forms depend on.
#[derive(Debug, Clone, Copy)]
pub struct EstimateParams {
    pub r: u64,
    pub p: u64,
    /// Series truncation order (terms `m = 0..=K`).
    pub k_order: u64,
    pub l_iterations: u64,
    pub n_geo: u64,
    pub n_dirichlet: u64,
    pub index_bits: u64,
    pub layout: Layout,
    pub adder: AdderKind,
}

/// Adder ancilla count for the built carry-ripple adder.
pub const ADDER_ANCILLAS: u64 = 1;

/// Polynomial degree of the truncated arccosine series.
pub fn series_degree(k_order: u64) -> u64 {
    2 * k_order + 1
}

/// Closed-form qubit count of the assembled oracle, mirroring its
/// allocation: index registers, comparator scratch, flag and selector
/// qubits, the entry register, the Newton block, and the Horner block.
pub fn oracle_qubit_formula(params: &EstimateParams) -> u64 {
    let EstimateParams {
        r,
        k_order,
        l_iterations: l,
        n_dirichlet: nd,
        index_bits: n,
        layout,
        ..
    } = *params;
    let dirichlet = if nd == 0 {
        2
    } else {
        match layout {
            Layout::Serial => 5,
            Layout::Parallel => 6 * nd + 2,
        }
    };
    let flags = 1 + 3 + 3 + 4; // f_flag, edge trio, delta trio, selectors
    let newton = (l.max(1) + 3) * r;
    let horner = (2 * k_order + 2) * (r + 1); // input, 2K works, target
    2 * n + 1 + dirichlet + flags + (r + 1) + 1 + newton + horner + 1
}

/// All formula rows for one parameter set.
pub fn estimate_resources(params: &EstimateParams) -> Vec<FormulaRow> {
    let EstimateParams {
        r,
        k_order,
        l_iterations: l,
        n_geo,
        n_dirichlet: nd,
        adder,
        ..
    } = *params;
    let na = ADDER_ANCILLAS;
    let l2 = l.max(1);
    let deg = series_degree(k_order);
    let mut rows = vec![
        FormulaRow {
            name: format!("add ({})", adder.name()),
            qubits: adder.memory(r),
            runtime: adder.runtime_class().to_string(),
            exact: adder.exact(),
        },
        FormulaRow::exact("mul", 3 * (r + 1) + na, "O(r t_add)"),
        FormulaRow::exact(
            "poly",
            (deg + 1) * (r + 1) + na,
            "O(K t_mul)",
        ),
        FormulaRow::exact("rsqrt", (l2 + 4) * r + na, "O(L t_mul)"),
        FormulaRow::exact("sqrt", (l2 + 4) * r + na + r, "O(L t_mul)"),
        FormulaRow::exact("rec", (l2 + 3) * r + na, "O(L t_mul)"),
        FormulaRow::exact("inmul", (l2 + 5) * r + na, "O(L t_mul)"),
        // built in-place square: one register more than the printed form,
        // the work register the copy-square-swap structure needs
        FormulaRow::data("insq (printed)", (l2 + 3) * r + na, "O(L t_mul)"),
        FormulaRow::exact("insq (built)", (l2 + 5) * r + na, "O(L t_mul)"),
        FormulaRow::exact("exp", (l2 + 7) * r + na, "O(L r t_mul)"),
        FormulaRow::exact("sig", (l2 + 7) * r + na, "O(J L log2(K kappa) t_mul)"),
        FormulaRow::exact("eq (lowered)", 3 * r - 1, "O(log2 r)"),
        FormulaRow::exact("gt", 2 * r + 1 + na, "O(t_add)"),
        FormulaRow::data(
            "geo ancillas",
            8 * nd + 4 * n_geo - 1,
            "O((N_geo + N_D) t_add) serial, O(log2(N_geo + N_D) + t_add) parallel",
        ),
        FormulaRow::data("entry ancillas", r - 1, "O(r)"),
        FormulaRow::exact(
            "oracle total",
            oracle_qubit_formula(params),
            "O((K + L) r^2 + log2(N_geo + N_D))",
        ),
    ];
    rows.extend(exponentiation_table(r));
    rows
}
