//! Classical model of the 1D elastic problem: lumped mass, tridiagonal
//! stiffness, flagged rows, and the normalised matrix the oracle encodes.
//!
//! All entries are exact rationals built from the problem parameters, so the
//! normalised values cancel symbolically; with the default flag choice
//! `F = 4Y/(rho Delta^2)` they are exactly the dyadic constants 1, 1/2, 1/4.

use nalgebra::DMatrix;
use num::{BigRational, FromPrimitive, ToPrimitive, Zero};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FemError {
    #[error("node count {0} must be a power of two")]
    NodeCountNotPow2(u32),
    #[error("domain must have positive length")]
    EmptyDomain,
    #[error("material parameters must be positive")]
    BadMaterial,
    #[error("flag {flag} must exceed the 1-norm bound {bound}")]
    FlagTooSmall { flag: f64, bound: f64 },
    #[error("dirichlet interval [{0}, {1}] outside the node range")]
    DirichletOutOfRange(u32, u32),
}

/// One-dimensional homogeneous elastic problem on `N = 2^n` equidistant
/// nodes. Dirichlet intervals are 1-based inclusive node ranges; their rows
/// carry the flag value on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FemProblem1D {
    n_nodes: u32,
    elasticity: f64,
    density: f64,
    domain: (f64, f64),
    dirichlet: Vec<(u32, u32)>,
    flag: f64,
}

impl FemProblem1D {
    pub fn new(
        n_nodes: u32,
        elasticity: f64,
        density: f64,
        domain: (f64, f64),
        mut dirichlet: Vec<(u32, u32)>,
        flag: Option<f64>,
    ) -> Result<Self, FemError> {
        if n_nodes < 2 || !n_nodes.is_power_of_two() {
            return Err(FemError::NodeCountNotPow2(n_nodes));
        }
        if domain.1 <= domain.0 {
            return Err(FemError::EmptyDomain);
        }
        if elasticity <= 0.0 || density <= 0.0 {
            return Err(FemError::BadMaterial);
        }
        for &(lo, hi) in &dirichlet {
            if lo < 1 || hi > n_nodes || lo > hi {
                return Err(FemError::DirichletOutOfRange(lo, hi));
            }
        }
        dirichlet.sort_unstable();
        // merge overlapping or touching intervals
        let mut merged: Vec<(u32, u32)> = Vec::new();
        for (lo, hi) in dirichlet {
            match merged.last_mut() {
                Some((_, mhi)) if lo <= *mhi + 1 => *mhi = (*mhi).max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        let delta = (domain.1 - domain.0) / n_nodes as f64;
        let flag = flag.unwrap_or(4.0 * elasticity / (density * delta * delta));
        let bound = 3.0 * elasticity / (density * delta * delta);
        if flag <= bound {
            return Err(FemError::FlagTooSmall { flag, bound });
        }
        Ok(FemProblem1D {
            n_nodes,
            elasticity,
            density,
            domain,
            dirichlet: merged,
            flag,
        })
    }

    pub fn n_nodes(&self) -> u32 {
        self.n_nodes
    }

    pub fn index_bits(&self) -> u32 {
        self.n_nodes.trailing_zeros()
    }

    pub fn elasticity(&self) -> f64 {
        self.elasticity
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn flag(&self) -> f64 {
        self.flag
    }

    pub fn dirichlet(&self) -> &[(u32, u32)] {
        &self.dirichlet
    }

    /// Grid step `(b - a) / N`.
    pub fn delta(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.n_nodes as f64
    }

    fn delta_rational(&self) -> BigRational {
        (rat(self.domain.1) - rat(self.domain.0)) / BigRational::from_u32(self.n_nodes).unwrap()
    }

    /// True when node `i` (1-based) is held fixed.
    pub fn is_dirichlet(&self, i: u32) -> bool {
        self.dirichlet.iter().any(|&(lo, hi)| lo <= i && i <= hi)
    }

    /// A row participates in the physics only when its node is free.
    pub fn is_free(&self, i: u32) -> bool {
        !self.is_dirichlet(i)
    }

    pub fn is_edge(&self, i: u32) -> bool {
        i == 1 || i == self.n_nodes
    }

    pub fn flagged_rows(&self) -> usize {
        (1..=self.n_nodes).filter(|&i| !self.is_free(i)).count()
    }

    /// Lumped mass entry: `rho Delta` for every node in the domain.
    pub fn mass_entry(&self, i: u32) -> BigRational {
        assert!((1..=self.n_nodes).contains(&i));
        rat(self.density) * self.delta_rational()
    }

    /// Stiffness entry of the free chain: tridiagonal `Y/Delta` pattern with
    /// halved diagonal on the two boundary nodes.
    pub fn stiffness_entry(&self, i: u32, j: u32) -> BigRational {
        assert!((1..=self.n_nodes).contains(&i) && (1..=self.n_nodes).contains(&j));
        let y_over_delta = rat(self.elasticity) / self.delta_rational();
        let diag = if self.is_edge(i) { 1 } else { 2 };
        if i == j {
            BigRational::from_i32(diag).unwrap() * y_over_delta
        } else if i.abs_diff(j) == 1 {
            -y_over_delta
        } else {
            BigRational::zero()
        }
    }

    /// Entry of `H = M^(-1/2) K M^(-1/2)` with flagged rows replaced by
    /// `delta_ij F`.
    pub fn h_entry(&self, i: u32, j: u32) -> BigRational {
        if self.is_free(i) && self.is_free(j) {
            // homogeneous case: sqrt(M_ii M_jj) = rho Delta exactly
            self.stiffness_entry(i, j) / (rat(self.density) * self.delta_rational())
        } else if i == j {
            rat(self.flag)
        } else {
            BigRational::zero()
        }
    }

    /// Free bulk diagonal value `2Y/(rho Delta^2)`.
    pub fn bulk_diag_value(&self) -> BigRational {
        BigRational::from_i32(2).unwrap() * self.coupling_value()
    }

    /// Magnitude of the free couplings and the edge diagonal,
    /// `Y/(rho Delta^2)`.
    pub fn coupling_value(&self) -> BigRational {
        rat(self.elasticity) / (rat(self.density) * self.delta_rational() * self.delta_rational())
    }

    /// `max(2Y/(rho Delta^2), F)`.
    pub fn h_max_norm(&self) -> BigRational {
        let bulk = BigRational::from_i32(2).unwrap() * rat(self.elasticity)
            / (rat(self.density) * self.delta_rational() * self.delta_rational());
        let f = rat(self.flag);
        if f > bulk {
            f
        } else {
            bulk
        }
    }

    /// Normalised entry `H_ij / ||H||_max`, in `[-1, 1]`.
    pub fn h_prime_entry(&self, i: u32, j: u32) -> BigRational {
        self.h_entry(i, j) / self.h_max_norm()
    }

    /// Dense assembly of `H` in floating point.
    pub fn assemble_h(&self) -> DMatrix<f64> {
        let n = self.n_nodes as usize;
        DMatrix::from_fn(n, n, |i, j| {
            self.h_entry(i as u32 + 1, j as u32 + 1).to_f64().unwrap()
        })
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite parameter")
}

/// Spectral sanity report: the flag eigenvalue must appear exactly once per
/// flagged row and strictly dominate the physical spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub flag: f64,
    pub flagged_rows: usize,
    pub flag_multiplicity: usize,
    pub max_physical: f64,
    pub symmetric: bool,
    pub ok: bool,
}

/// Dense symmetric eigendecomposition of the assembled `H`.
pub fn spectrum_check(problem: &FemProblem1D) -> SpectrumReport {
    let h = problem.assemble_h();
    let n = problem.n_nodes as usize;
    let mut symmetric = true;
    for i in 0..n {
        for j in 0..i {
            if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 * h[(i, j)].abs().max(1.0) {
                symmetric = false;
            }
        }
    }
    let eigen = nalgebra::SymmetricEigen::new(h);
    let flag = problem.flag;
    let tol = 1e-9 * flag.abs().max(1.0);
    let mut flag_multiplicity = 0;
    let mut max_physical = f64::NEG_INFINITY;
    for &lambda in eigen.eigenvalues.iter() {
        if (lambda - flag).abs() <= tol {
            flag_multiplicity += 1;
        } else {
            max_physical = max_physical.max(lambda);
        }
    }
    let flagged_rows = problem.flagged_rows();
    let all_flagged = flagged_rows == n;
    let ok = symmetric
        && flag_multiplicity == flagged_rows
        && (all_flagged || max_physical < flag - tol);
    SpectrumReport {
        flag,
        flagged_rows,
        flag_multiplicity,
        max_physical: if all_flagged { f64::NAN } else { max_physical },
        symmetric,
        ok,
    }
}
