//! Experiment registry and runners.

mod blowup;
mod calculus;
mod config;
mod identity;
mod khessian;
mod nulllag;
mod planar;
mod ratio;
pub mod report;
pub mod stats;
mod torus;

pub use blowup::{loglog_sides, LoglogSides};
pub use config::ExperimentConfig;
pub use khessian::{bump_residual, paraboloid_error};
pub use nulllag::{grad_fk_field, null_lagrangian_sides};
pub use ratio::{ineq_ratio, lower_star, Functional};
pub use report::{guarded_ratio, ExperimentReport, Row, Verdict};
pub use torus::{quasiconcavity_check, reverse_holder_check};

use crate::{usage, LabResult};

type Runner = fn(&ExperimentConfig) -> LabResult<ExperimentReport>;

pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
    run: Runner,
}

static EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo { id: "cone_calculus", summary: "dual of the identity, duality pairing, attainment, gradient round trip", run: calculus::cone_calculus },
    ExperimentInfo { id: "maclaurin", summary: "nesting of rho_k and of rho_k* in k", run: calculus::maclaurin },
    ExperimentInfo { id: "closed_forms", summary: "closed forms of rho_2* and rho_n* against the optimizer", run: calculus::closed_forms },
    ExperimentInfo { id: "identity_suite", summary: "conformal determinant, trace identity, F_2 on the wave cone, block slicing", run: identity::identity_suite },
    ExperimentInfo { id: "slicing", summary: "integral of det against the row Div masses on K_1+ fields", run: planar::slicing },
    ExperimentInfo { id: "ornstein", summary: "Div/Curl L1 ratio grows like 1/eps", run: planar::ornstein },
    ExperimentInfo { id: "quasiconcavity", summary: "torus mean of rho_k*^(k/(k-1)) on Div-free fields", run: torus::quasiconcavity },
    ExperimentInfo { id: "sharpness", summary: "concavity of rho_k*^alpha exactly up to alpha = k/(k-1)", run: calculus::sharpness },
    ExperimentInfo { id: "null_lagrangian", summary: "Div grad F_k against |Curl A||A|^(k-2)", run: nulllag::null_lagrangian },
    ExperimentInfo { id: "optimal_div", summary: "Div-free Gamma_k* field at the critical exponent", run: blowup::optimal_div },
    ExperimentInfo { id: "curl_optimal", summary: "Curl-free Gamma_k field at the critical exponent", run: blowup::curl_optimal },
    ExperimentInfo { id: "quasiconformal_radial", summary: "quasiconformal Hessian in L^n but not beyond", run: blowup::quasiconformal_radial },
    ExperimentInfo { id: "radial_power_map", summary: "power map at the endpoint of the Q_2+ estimate", run: blowup::radial_power_map },
    ExperimentInfo { id: "loglog_div", summary: "endpoint counterexample for k < n by radial quadrature", run: blowup::loglog_div },
    ExperimentInfo { id: "radial_fixed_point", summary: "distortion of the radial quasiconformal Hessian", run: blowup::radial_fixed_point },
    ExperimentInfo { id: "green_conformal", summary: "log growth of the integral of det with bounded Div mass", run: blowup::green_conformal },
    ExperimentInfo { id: "step", summary: "Div mass of the step field", run: blowup::step },
    ExperimentInfo { id: "reverse_holder_div", summary: "reverse Hoelder constant on Div-free Gamma_k* fields", run: torus::reverse_holder_div },
    ExperimentInfo { id: "reverse_holder_curl", summary: "reverse Hoelder constant on Curl-free Gamma_k fields", run: torus::reverse_holder_curl },
    ExperimentInfo { id: "khessian_radial", summary: "radial k-Hessian solver: paraboloid and residual order", run: khessian::khessian_radial },
    ExperimentInfo { id: "div_estimate", summary: "empirical constant of the Div estimate on Gamma_k*", run: ratio::div_estimate },
    ExperimentInfo { id: "exploratory", summary: "full-range (p, q) ratios without pass/fail", run: ratio::exploratory },
];

pub fn experiments() -> &'static [ExperimentInfo] {
    EXPERIMENTS
}

pub fn experiment_ids() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.id).collect()
}

pub fn run_experiment(id: &str, cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    match EXPERIMENTS.iter().find(|e| e.id == id) {
        Some(e) => (e.run)(cfg),
        None => usage(format!("unknown experiment '{id}'; known: {}", experiment_ids().join(", "))),
    }
}

/// One row of the maximal-gain table: operator, wave cone, constraint cone,
/// gauge and the largest exponent.
pub struct QMax {
    pub operator: &'static str,
    pub wave_cone: &'static str,
    pub cone: &'static str,
    pub gauge: &'static str,
    pub q_max: &'static str,
}

static Q_MAX: &[QMax] = &[
    QMax { operator: "Div", wave_cone: "2×2, rank ≤ 1", cone: "Q₂⁺(K)", gauge: "B_K", q_max: "2K/(K−1)" },
    QMax { operator: "Div", wave_cone: "Sym_n, rank ≤ n−1", cone: "Γ_k*", gauge: "ρ_k*", q_max: "k/(k−1)" },
    QMax { operator: "Curl", wave_cone: "Sym_n, rank ≤ 1", cone: "Γ_k", gauge: "ρ_k", q_max: "k" },
    QMax { operator: "Div²", wave_cone: "Sym_n ∖ int(Sym⁺ ∪ Sym⁻)", cone: "Γ_k*", gauge: "ρ_k*", q_max: "k/(k−1)" },
    QMax { operator: "(Div, Curl∘ᵀ)", wave_cone: "rank ≤ 1, Tr = 0", cone: "{Tr ≥ 0}", gauge: "Tr", q_max: "∞" },
];

pub fn q_max_table() -> &'static [QMax] {
    Q_MAX
}
