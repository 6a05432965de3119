use alloc::format;

use super::families::{CounterexampleFamily, PhiSpec};
use crate::error::{input, Result};
use crate::symcone::SymMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Integer,
    Bool,
    Matrix,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Real => "real",
            ParamKind::Integer => "integer",
            ParamKind::Bool => "bool",
            ParamKind::Matrix => "matrix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamSchema {
    pub name: &'static str,
    pub kind: ParamKind,
    pub range: &'static str,
    pub default: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyInfo {
    pub id: &'static str,
    /// Grid the family is built on.
    pub domain: &'static str,
    pub target: &'static str,
    pub claim: &'static str,
    pub params: &'static [ParamSchema],
}

const fn real(name: &'static str, range: &'static str, default: &'static str) -> ParamSchema {
    ParamSchema { name, kind: ParamKind::Real, range, default }
}

const fn int(name: &'static str, range: &'static str, default: &'static str) -> ParamSchema {
    ParamSchema { name, kind: ParamKind::Integer, range, default }
}

static FAMILIES: &[FamilyInfo] = &[
    FamilyInfo {
        id: "ornstein",
        domain: "2-torus of side 2pi",
        target: "Sym+",
        claim: "no L1 bound between Div and Curl on Sym+",
        params: &[
            real("eps", "1/m, m = 1, 2, ...", "0.25"),
            ParamSchema { name: "mirrored", kind: ParamKind::Bool, range: "0 or 1", default: "0" },
        ],
    },
    FamilyInfo {
        id: "green_conformal",
        domain: "2-box",
        target: "Q_2+(1)",
        claim: "det >= 0 without entrywise signs: integral of det unbounded, Div mass bounded",
        params: &[real("eps", "(0, 0.5)", "0.1")],
    },
    FamilyInfo {
        id: "radial_power_map",
        domain: "2-box",
        target: "Q_2+(p/(p-2))",
        claim: "W^{1,q} for q < p but not W^{1,p}",
        params: &[real("p", "(2, inf)", "4")],
    },
    FamilyInfo {
        id: "step",
        domain: "2-box",
        target: "Sym+ u Sym-",
        claim: "Div mass 2|(A2-A1)e1| below the separated mass",
        params: &[
            ParamSchema { name: "a1", kind: ParamKind::Matrix, range: "positive definite 2x2", default: "[[2,1],[1,1]]" },
            ParamSchema { name: "a2", kind: ParamKind::Matrix, range: "negative definite 2x2", default: "[[-1,1],[1,-2]]" },
        ],
    },
    FamilyInfo {
        id: "optimal_div",
        domain: "n-box",
        target: "Gamma_k*",
        claim: "Div-free, in L^{k/(k-1)} but not L^{k/(k-1)+eps}",
        params: &[int("k", "2..=n", "2"), real("eps", "(0, 4]", "0.5")],
    },
    FamilyInfo {
        id: "loglog_div",
        domain: "n-box, n = 3",
        target: "Gamma_k*",
        claim: "endpoint k < n fails: lhs grows like loglog(1+1/delta), Div in L^p bounded",
        params: &[int("k", "2..n", "2"), real("delta", "(0, 0.5)", "0.1"), real("eps", "(0, delta)", "delta^2")],
    },
    FamilyInfo {
        id: "quasiconformal_radial",
        domain: "n-box",
        target: "Sym+ n Q_n+(1+n/eps)",
        claim: "Hessian in L^n but not L^{n+eps}",
        params: &[real("eps", "(0, 4]", "1")],
    },
    FamilyInfo {
        id: "curl_optimal",
        domain: "n-box",
        target: "Gamma_k",
        claim: "Curl-free, in L^k but not L^{k+eps}",
        params: &[int("k", "2..=n", "2"), real("eps", "(0, 4]", "0.5")],
    },
    FamilyInfo {
        id: "equality_case",
        domain: "n-torus",
        target: "Gamma_k*",
        claim: "equality in the quasiconcavity inequality",
        params: &[
            int("k", "1..=n", "2"),
            real("amplitude", "S + D2phi in Gamma_k", "0.01"),
            ParamSchema { name: "base", kind: ParamKind::Matrix, range: "Gamma_k", default: "identity" },
        ],
    },
    FamilyInfo {
        id: "divfree_combo",
        domain: "n-torus",
        target: "Gamma_k*",
        claim: "Div-free nonnegative combination",
        params: &[
            int("k", "1..=n", "2"),
            ParamSchema { name: "weights", kind: ParamKind::Real, range: ">= 0, one per component", default: "none" },
        ],
    },
];

pub fn registry() -> &'static [FamilyInfo] {
    FAMILIES
}

pub fn family_info(id: &str) -> Option<&'static FamilyInfo> {
    FAMILIES.iter().find(|f| f.id == id)
}

impl CounterexampleFamily {
    /// Builds a family from numeric parameters, with schema defaults for the
    /// rest. `dim` is the grid dimension (needed for defaults only).
    pub fn from_params(id: &str, params: &[(&str, f64)], dim: usize) -> Result<Self> {
        let Some(info) = family_info(id) else {
            let ids: alloc::vec::Vec<&str> = FAMILIES.iter().map(|f| f.id).collect();
            return input(format!("unknown family '{id}'; known: {}", ids.join(", ")));
        };
        for (name, _) in params {
            if !info.params.iter().any(|p| p.name == *name) {
                return input(format!("family '{id}' has no parameter '{name}'"));
            }
        }
        let get = |name: &str| params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let real = |name: &str, default: f64| get(name).unwrap_or(default);
        let int = |name: &str, default: usize| -> Result<usize> {
            match get(name) {
                None => Ok(default),
                Some(v) if v >= 0.0 && libm::trunc(v) == v => Ok(v as usize),
                Some(v) => input(format!("parameter '{name}' must be a nonnegative integer, got {v}")),
            }
        };
        Ok(match id {
            "ornstein" => CounterexampleFamily::Ornstein { eps: real("eps", 0.25), mirrored: real("mirrored", 0.0) != 0.0 },
            "green_conformal" => CounterexampleFamily::GreenConformal { eps: real("eps", 0.1) },
            "radial_power_map" => CounterexampleFamily::RadialPowerMap { p: real("p", 4.0) },
            "step" => CounterexampleFamily::default_step(),
            "optimal_div" => CounterexampleFamily::OptimalDiv { k: int("k", 2)?, eps: real("eps", 0.5) },
            "loglog_div" => CounterexampleFamily::LoglogDiv { k: int("k", 2)?, delta: real("delta", 0.1), eps: get("eps") },
            "quasiconformal_radial" => CounterexampleFamily::QuasiconformalRadial { eps: real("eps", 1.0) },
            "curl_optimal" => CounterexampleFamily::CurlOptimal { k: int("k", 2)?, eps: real("eps", 0.5) },
            "equality_case" => CounterexampleFamily::EqualityCase {
                k: int("k", 2)?,
                base: SymMatrix::identity(dim),
                phi: PhiSpec::product(real("amplitude", 0.01)),
            },
            _ => return input(format!("family '{id}' is assembled programmatically, not from parameters")),
        })
    }
}
