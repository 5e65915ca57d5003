use super::LqProblem;
use crate::error::Result;
use crate::numerics::{min_symmetric_eigenvalue, rank, rk4_integrate, symmetrize, Matrix};
use serde::Serialize;

const SYMMETRY_TOL: f64 = 1e-9;
const R_EIG_TOL: f64 = -1e-9;
const C_EIG_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-10;
const GRAMIAN_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub findings: Vec<Finding>,
    /// Smallest eigenvalue of the controllability Gramian over `[t0, τ]`.
    pub gramian_min_eig: Option<f64>,
    pub bc_rank: usize,
    pub bc_rank_augmented: usize,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    /// One line per finding.
    pub fn summary(&self) -> String {
        self.findings
            .iter()
            .map(|f| format!("{:?} [{}]: {}", f.severity, f.code, f.message))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

struct Findings(Vec<Finding>);

impl Findings {
    fn error(&mut self, code: &'static str, message: String) {
        if !self.0.iter().any(|f| f.code == code) {
            self.0.push(Finding {
                severity: Severity::Error,
                code,
                message,
            });
        }
    }

    fn warning(&mut self, code: &'static str, message: String) {
        if !self.0.iter().any(|f| f.code == code) {
            self.0.push(Finding {
                severity: Severity::Warning,
                code,
                message,
            });
        }
    }
}

/// Check the standing assumptions of the problem: shapes, symmetry and
/// definiteness of the weights at `samples` equispaced times, and solvability
/// (coefficient rank = augmented rank) of the boundary condition.
pub fn validate(p: &LqProblem, samples: usize) -> ValidationReport {
    let mut out = Findings(Vec::new());
    let mut report = ValidationReport {
        ok: false,
        findings: Vec::new(),
        gramian_min_eig: None,
        bc_rank: 0,
        bc_rank_augmented: 0,
    };

    let shape_errors = p.shape_errors();
    if !shape_errors.is_empty() {
        for e in shape_errors {
            out.0.push(Finding {
                severity: Severity::Error,
                code: "shape",
                message: e.to_string(),
            });
        }
        report.findings = out.0;
        return report;
    }

    if !(p.t0.is_finite() && p.tau.is_finite() && p.t0 < p.tau) {
        out.error("horizon", format!("need t0 < tau, got [{}, {}]", p.t0, p.tau));
    }

    for (name, tm) in [("F", &p.f), ("G", &p.g), ("R", &p.r), ("C", &p.c)] {
        if let Some((start, end)) = tm.coverage() {
            if start > p.t0 || end < p.tau {
                out.error(
                    "coverage",
                    format!("{name} samples cover [{start}, {end}], problem needs [{}, {}]", p.t0, p.tau),
                );
            }
        }
        if tm.sample_values().iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            out.error("non_finite", format!("{name} has non-finite entries"));
        }
    }
    for (name, mat) in [("Phi1", &p.phi1), ("Phi2", &p.phi2), ("q", &p.q)] {
        if mat.iter().any(|x| !x.is_finite()) {
            out.error("non_finite", format!("{name} has non-finite entries"));
        }
    }

    if out.0.is_empty() {
        check_weights(p, samples.max(2), &mut out);
    }

    let coef = Matrix::from_fn(p.k, 2 * p.n, |i, j| {
        if j < p.n {
            p.phi1[(i, j)]
        } else {
            -p.phi2[(i, j - p.n)]
        }
    });
    let mut aug = coef.clone().insert_column(2 * p.n, 0.0);
    aug.set_column(2 * p.n, &p.q.column(0));
    report.bc_rank = rank(&coef, RANK_TOL);
    report.bc_rank_augmented = rank(&aug, RANK_TOL);
    if report.bc_rank_augmented > report.bc_rank {
        out.error(
            "bc_inconsistent",
            format!(
                "boundary condition is inconsistent: augmented rank {} > coefficient rank {}",
                report.bc_rank_augmented, report.bc_rank
            ),
        );
    }
    if p.k > 2 * p.n {
        out.warning(
            "k_exceeds_2n",
            format!("k = {} boundary rows exceed 2n = {}", p.k, 2 * p.n),
        );
    }

    if out.0.iter().all(|f| f.severity != Severity::Error) {
        match controllability_gramian(p, GRAMIAN_STEPS) {
            Ok(w) => {
                let margin = min_symmetric_eigenvalue(&w);
                report.gramian_min_eig = Some(margin);
                if margin <= 1e-10 * (1.0 + w.norm()) {
                    out.warning(
                        "uncontrollable",
                        format!("controllability Gramian is singular (min eigenvalue {margin:.3e})"),
                    );
                }
            }
            Err(e) => out.warning("gramian_failed", format!("controllability Gramian: {e}")),
        }
    }

    report.ok = out.0.iter().all(|f| f.severity != Severity::Error);
    report.findings = out.0;
    report
}

fn check_weights(p: &LqProblem, samples: usize, out: &mut Findings) {
    for i in 0..samples {
        let t = p.t0 + (p.tau - p.t0) * i as f64 / (samples - 1) as f64;
        let (r, c) = match (p.r.eval(t), p.c.eval(t)) {
            (Ok(r), Ok(c)) => (r, c),
            (Err(e), _) | (_, Err(e)) => {
                out.error("coverage", e.to_string());
                return;
            }
        };
        if (&r - r.transpose()).amax() > SYMMETRY_TOL * (1.0 + r.amax()) {
            out.error("r_not_symmetric", format!("R not symmetric at t = {t}"));
        } else {
            let e = min_symmetric_eigenvalue(&r);
            if e < R_EIG_TOL {
                out.error(
                    "r_not_psd",
                    format!("R not positive semidefinite at t = {t} (min eigenvalue {e:.3e})"),
                );
            }
        }
        if (&c - c.transpose()).amax() > SYMMETRY_TOL * (1.0 + c.amax()) {
            out.error("c_not_symmetric", format!("C not symmetric at t = {t}"));
        } else {
            let e = min_symmetric_eigenvalue(&c);
            if e < C_EIG_TOL {
                out.error(
                    "c_not_pd",
                    format!("C not positive definite at t = {t} (min eigenvalue {e:.3e})"),
                );
            }
        }
    }
}

/// `W_c = ∫ Ψ(τ,s)·G(s)·G'(s)·Ψ'(τ,s) ds` over `[t0, τ]`, where `Ψ` is the
/// transition matrix of `F`.
///
/// Integrated as the differential Lyapunov equation `Ẇ = F W + W F' + G G'`,
/// `W(t0) = 0`, on the RK4 grid.
pub fn controllability_gramian(p: &LqProblem, steps: usize) -> Result<Matrix> {
    let grid = p.grid(steps)?;
    let n = p.n;
    let ws = rk4_integrate(
        |t, w| {
            let f = p.f.eval(t)?;
            let g = p.g.eval(t)?;
            let fw = &f * w;
            Ok(&fw + fw.transpose() + &g * g.transpose())
        },
        &Matrix::zeros(n, n),
        &grid,
    )?;
    Ok(symmetrize(ws.last().expect("grid has nodes")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::from_rows;

    fn m(v: f64) -> Matrix {
        from_rows(&[&[v]])
    }

    fn p1() -> LqProblem {
        LqProblem::new(m(0.0), m(1.0), m(1.0), m(1.0), m(1.0), m(1.0), m(1.0), 0.0, 1.0).unwrap()
    }

    #[test]
    fn p1_is_valid() {
        let r = validate(&p1(), 11);
        assert!(r.ok, "{}", r.summary());
        assert_eq!((r.bc_rank, r.bc_rank_augmented), (1, 1));
        assert!(r.gramian_min_eig.unwrap() > 0.99);
    }

    #[test]
    fn singular_control_weight() {
        let mut p = p1();
        p.c = m(0.0).into();
        let r = validate(&p, 11);
        assert!(!r.ok);
        assert!(r.errors().any(|f| f.message.contains("C not positive definite")));
    }

    #[test]
    fn indefinite_state_weight() {
        let mut p = p1();
        p.r = m(-1.0).into();
        let r = validate(&p, 5);
        assert!(r.has_code("r_not_psd") && !r.ok);
    }

    #[test]
    fn asymmetric_weight() {
        let mut p = LqProblem::new(
            Matrix::zeros(2, 2),
            Matrix::identity(2, 2),
            from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]),
            Matrix::identity(2, 2),
            Matrix::identity(2, 2),
            Matrix::identity(2, 2),
            Matrix::zeros(2, 1),
            0.0,
            1.0,
        )
        .unwrap();
        assert!(validate(&p, 3).has_code("r_not_symmetric"));
        p.r = Matrix::identity(2, 2).into();
        assert!(validate(&p, 3).ok);
    }

    #[test]
    fn contradictory_boundary_rows() {
        let p = LqProblem::new(
            m(0.0),
            m(1.0),
            m(1.0),
            m(1.0),
            from_rows(&[&[1.0], &[1.0]]),
            from_rows(&[&[0.0], &[0.0]]),
            from_rows(&[&[0.0], &[1.0]]),
            0.0,
            1.0,
        )
        .unwrap();
        let r = validate(&p, 5);
        assert!(!r.ok);
        assert_eq!((r.bc_rank, r.bc_rank_augmented), (1, 2));
        assert!(r.has_code("bc_inconsistent"));
    }

    #[test]
    fn too_many_rows_is_warning_only() {
        let rows = |v: f64| from_rows(&[&[v], &[v], &[v]]);
        let p = LqProblem::new(m(0.0), m(1.0), m(1.0), m(1.0), rows(1.0), rows(0.0), rows(1.0), 0.0, 1.0)
            .unwrap();
        let r = validate(&p, 5);
        assert!(r.ok, "{}", r.summary());
        assert!(r.has_code("k_exceeds_2n"));
    }

    #[test]
    fn shape_mismatch_reported() {
        let mut p = p1();
        p.n = 2;
        let r = validate(&p, 5);
        assert!(!r.ok && r.has_code("shape"));
    }

    #[test]
    fn gramian_examples() {
        let mut p = p1();
        p.f = m(-1.0).into();
        let w = controllability_gramian(&p, 2000).unwrap();
        assert!((w[(0, 0)] - (1.0 - (-2f64).exp()) / 2.0).abs() < 1e-8);
        assert!((w[(0, 0)] - 0.4323323584).abs() < 1e-8);

        p.f = m(0.0).into();
        let w = controllability_gramian(&p, 2000).unwrap();
        assert!((w[(0, 0)] - 1.0).abs() < 1e-12);

        p.g = m(0.0).into();
        assert_eq!(controllability_gramian(&p, 100).unwrap(), m(0.0));
        assert!(validate(&p, 5).has_code("uncontrollable"));
    }
}
