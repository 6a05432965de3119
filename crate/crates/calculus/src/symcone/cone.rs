use core::fmt;

use libm::pow;

use super::eigen::jacobi;
use super::matrix::{Matrix, SymMatrix};
use super::poly::{binomial, elementary};
use crate::error::{input, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Every cone the estimates are stated over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeId {
    /// Gårding cone `Γ_k`.
    Gamma(usize),
    /// Its dual `Γ_k*` under the trace pairing.
    GammaStar(usize),
    /// `Q_n^±(K) = {‖A‖^n ≤ ±K det A}`.
    QuasiConformal { dim: usize, distortion: f64, sign: Sign },
    /// The eight sign-pattern cones of 2×2 matrices, `index ∈ 1..=4`.
    Entrywise { index: u8, sign: Sign },
    TraceHalfSpace,
    SymPos,
    SymNeg,
    /// Singular matrices.
    WaveConeDiv,
    /// Matrices of rank at most one.
    WaveConeCurl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    /// Inside or on the boundary.
    pub fn is_member(self) -> bool {
        self != Membership::Outside
    }
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pm = |s: &Sign| if *s == Sign::Plus { "+" } else { "-" };
        match self {
            ConeId::Gamma(k) => write!(f, "Gamma_{k}"),
            ConeId::GammaStar(k) => write!(f, "Gamma_{k}*"),
            ConeId::QuasiConformal { dim, distortion, sign } => {
                write!(f, "Q_{dim}{}({distortion})", pm(sign))
            }
            ConeId::Entrywise { index, sign } => write!(f, "K_{index}{}", pm(sign)),
            ConeId::TraceHalfSpace => f.write_str("{Tr >= 0}"),
            ConeId::SymPos => f.write_str("Sym+"),
            ConeId::SymNeg => f.write_str("Sym-"),
            ConeId::WaveConeDiv => f.write_str("Lambda_Div"),
            ConeId::WaveConeCurl => f.write_str("Lambda_Curl"),
        }
    }
}

impl ConeId {
    /// Parameter check against the ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            ConeId::Gamma(k) | ConeId::GammaStar(k) if k == 0 || k > n => {
                input(alloc::format!("cone order {k} not in 1..={n}"))
            }
            ConeId::QuasiConformal { dim, distortion, .. } => {
                if dim != n {
                    input(alloc::format!("cone dimension {dim} does not match matrix dimension {n}"))
                } else if !(distortion >= 1.0) {
                    input("distortion K must be >= 1")
                } else {
                    Ok(())
                }
            }
            ConeId::Entrywise { index, .. } => {
                if n != 2 {
                    input("entrywise cones are 2x2")
                } else if !(1..=4).contains(&index) {
                    input("entrywise cone index must be 1..=4")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Cones defined on symmetric matrices only.
    pub fn symmetric_only(&self) -> bool {
        matches!(
            self,
            ConeId::Gamma(_) | ConeId::GammaStar(_) | ConeId::SymPos | ConeId::SymNeg
        )
    }
}

fn classify(margin: f64, band: f64) -> Membership {
    if margin > band {
        Membership::Inside
    } else if margin >= -band {
        Membership::Boundary
    } else {
        Membership::Outside
    }
}

/// Sign constraints `±a_ij ≥ 0` of the entrywise cones.
pub(crate) fn entrywise_constraints(index: u8, sign: Sign) -> [(usize, usize, f64); 2] {
    match (index, sign) {
        (1, Sign::Plus) => [(0, 0, 1.0), (1, 1, 1.0)],
        (2, Sign::Plus) => [(0, 1, 1.0), (1, 0, -1.0)],
        (3, Sign::Plus) => [(0, 0, -1.0), (1, 1, -1.0)],
        (4, Sign::Plus) => [(1, 0, 1.0), (0, 1, -1.0)],
        (1, Sign::Minus) => [(0, 0, 1.0), (1, 1, -1.0)],
        (2, Sign::Minus) => [(0, 1, -1.0), (1, 0, -1.0)],
        (3, Sign::Minus) => [(0, 1, 1.0), (1, 0, 1.0)],
        _ => [(1, 1, 1.0), (0, 0, -1.0)],
    }
}

/// Three-way membership with band `tol` relative to the size of `a`.
/// Symmetric-only cones report `Outside` for a non-symmetric input.
pub fn cone_contains(a: &Matrix, cone: &ConeId, tol: f64) -> Result<Membership> {
    let n = a.dim();
    cone.validate(n)?;
    if !a.is_finite() {
        return input("non-finite matrix entry");
    }
    let size = a.frobenius();
    if cone.symmetric_only() {
        if a.asymmetry() > tol * size.max(f64::MIN_POSITIVE) {
            return Ok(Membership::Outside);
        }
        return cone_contains_sym(&a.symmetric_part(), cone, tol);
    }
    let band = tol * size;
    Ok(match *cone {
        ConeId::QuasiConformal { distortion, sign, .. } => {
            let norm_n = pow(a.op_norm(), n as f64);
            let margin = sign.factor() * distortion * a.det() - norm_n;
            classify(margin, tol * norm_n)
        }
        ConeId::Entrywise { index, sign } => {
            let mut worst = f64::INFINITY;
            for (i, j, s) in entrywise_constraints(index, sign) {
                worst = worst.min(s * a.get(i, j));
            }
            classify(worst, band)
        }
        ConeId::TraceHalfSpace => classify(a.trace(), band),
        ConeId::WaveConeDiv => {
            let (sv, _) = a.singular_values();
            if sv[n - 1] <= band {
                Membership::Inside
            } else {
                Membership::Outside
            }
        }
        ConeId::WaveConeCurl => {
            let (sv, _) = a.singular_values();
            if n < 2 || sv[1] <= band {
                Membership::Inside
            } else {
                Membership::Outside
            }
        }
        _ => unreachable!("symmetric cones handled above"),
    })
}

pub fn cone_contains_sym(a: &SymMatrix, cone: &ConeId, tol: f64) -> Result<Membership> {
    let n = a.dim();
    cone.validate(n)?;
    if !a.is_finite() {
        return input("non-finite matrix entry");
    }
    let size = a.frobenius();
    match *cone {
        ConeId::Gamma(k) => {
            if size == 0.0 {
                return Ok(Membership::Boundary);
            }
            let sp = jacobi(a);
            let e = elementary(sp.values());
            let mut worst = f64::INFINITY;
            for (j, ej) in e.iter().enumerate().take(k + 1).skip(1) {
                worst = worst.min(ej / binomial(n, j) / pow(size, j as f64));
            }
            Ok(classify(worst, tol))
        }
        ConeId::GammaStar(k) => super::dual::gamma_star_membership(a, k, tol),
        ConeId::SymPos => Ok(classify(jacobi(a).values()[n - 1], tol * size)),
        ConeId::SymNeg => Ok(classify(-jacobi(a).values()[0], tol * size)),
        _ => cone_contains(a.as_matrix(), cone, tol),
    }
}
