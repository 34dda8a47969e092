//! Deciding whether a shared state supports perfect teleportation.
//!
//! Four independent views are offered: proportional-unitarity of every
//! branch operator, the row sum rule on branch-operator entries, the
//! entanglement entropy of Bob's reduced state, and local disentanglers on
//! Alice's two qubits. A Haar scan over random bases supplies Monte-Carlo
//! evidence for negative results.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::decomp::complete_columns;
use crate::algebra::haar::{derive_seed, haar_random_unitary};
use crate::algebra::matrix::{Amplitude, Matrix, ONE, ZERO};
use crate::algebra::schmidt::schmidt_decompose;
use crate::error::{Error, Result};
use crate::protocol::{branch_operators, matrix_to_json, MatrixJson, MeasurementBasis};
use crate::states::{entanglement_entropy, entropy_of_spectrum, DensityMatrix, PureState};

/// Tolerance on `|S - 1|` for the entropy criterion.
pub const ENTROPY_TOL: f64 = 1e-9;

/// Verdict tolerance for Haar scans.
pub const SCAN_TOL: f64 = 1e-8;

/// Amplitudes at or below this are treated as absent by the componentwise
/// disentangler.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnitarityVerdict {
    pub is_proportional_unitary: bool,
    /// `tr(T^dag T) / 2`
    pub scale: f64,
    /// Larger of `max|T^dag T - scale I|` and `max|T T^dag - scale I|`.
    pub deviation: f64,
}

/// Tests `T^dag T = T T^dag = scale * I`. A vanishing `T` passes with scale 0:
/// such a branch never occurs and constrains nothing.
pub fn unitarity_verdict(t: &Matrix, tol: f64) -> UnitarityVerdict {
    let tdt = &t.adjoint() * t;
    let ttd = t * &t.adjoint();
    let scale = (tdt.trace().re / 2.0).max(0.0);
    let target = Matrix::identity(t.rows()).scale(Amplitude::new(scale, 0.0));
    let deviation = tdt.max_abs_diff(&target).max(ttd.max_abs_diff(&target));
    UnitarityVerdict {
        is_proportional_unitary: deviation <= tol,
        scale,
        deviation,
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub verdicts: Vec<UnitarityVerdict>,
}

impl FeasibilityVerdict {
    pub fn passing_branches(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_proportional_unitary).count()
    }
}

/// True iff every branch operator induced by `basis` over `shared` is
/// proportional to a unitary.
pub fn protocol_feasible(basis: &MeasurementBasis, shared: &PureState, tol: f64) -> Result<FeasibilityVerdict> {
    let family = branch_operators(basis, shared)?;
    let verdicts: Vec<_> = family.ops.iter().map(|t| unitarity_verdict(t, tol)).collect();
    Ok(FeasibilityVerdict {
        feasible: verdicts.iter().all(|v| v.is_proportional_unitary),
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRule {
    /// `sum_i |<0|T_i|0>|^2 + |<0|T_i|1>|^2`
    pub row0: f64,
    /// `sum_i |<1|T_i|0>|^2 + |<1|T_i|1>|^2`
    pub row1: f64,
}

impl SumRule {
    pub fn balanced(&self, tol: f64) -> bool {
        (self.row0 - self.row1).abs() <= tol
    }
}

/// Row sums of squared branch-operator entries. Proportional unitarity of
/// every branch forces `row0 == row1`; for any basis the rows equal twice the
/// diagonal of Bob's reduced state.
pub fn sum_rule(shared: &PureState, basis: &MeasurementBasis) -> Result<SumRule> {
    let family = branch_operators(basis, shared)?;
    let row = |r: usize| -> f64 {
        family
            .ops
            .iter()
            .map(|t| t[(r, 0)].norm_sqr() + t[(r, 1)].norm_sqr())
            .sum()
    };
    Ok(SumRule {
        row0: row(0),
        row1: row(1),
    })
}

#[derive(Debug, Clone)]
pub struct EntropyCriterion {
    pub bob_reduced: DensityMatrix,
    pub entropy_bits: f64,
    pub feasible: bool,
}

/// Entropy of Bob's (last-qubit) reduced state; feasible iff it is one full
/// bit.
pub fn entropy_criterion(shared: &PureState) -> Result<EntropyCriterion> {
    let n = shared.n_qubits();
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 3, found: n });
    }
    let bob_reduced = shared.reduced(&[n - 1])?;
    let entropy_bits = entanglement_entropy(&bob_reduced);
    Ok(EntropyCriterion {
        bob_reduced,
        entropy_bits,
        feasible: (entropy_bits - 1.0).abs() <= ENTROPY_TOL,
    })
}

#[derive(Debug, Clone)]
pub struct DisentanglerResult {
    pub exists: bool,
    /// Acts on Alice's qubits (2, 3).
    pub unitary23: Option<Matrix>,
    /// `|alpha>` on qubits (3, 4) with `(U23 (x) I)|shared> = |0> (x) |alpha>`.
    pub residual: Option<PureState>,
}

impl DisentanglerResult {
    fn absent() -> Self {
        Self {
            exists: false,
            unitary23: None,
            residual: None,
        }
    }
}

fn require_three_qubits(shared: &PureState) -> Result<()> {
    if shared.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: shared.n_qubits(),
        });
    }
    Ok(())
}

/// Applies `u23 (x) I` and splits off qubit 2, which must end up in `|0>`.
fn residual_after(shared: &PureState, u23: &Matrix) -> Result<PureState> {
    let out = shared.evolve(&u23.kron(&Matrix::identity(2)))?;
    let leak: f64 = out.amplitudes()[4..].iter().map(|z| z.norm_sqr()).sum();
    if leak > 1e-10 {
        return Err(Error::InvalidProtocol(format!(
            "qubit 2 not disentangled (weight {leak:e} on |1>)"
        )));
    }
    PureState::normalized(out.amplitudes()[..4].to_vec())
}

/// Searches for a permutation `U23` of Alice's computational kets that maps
/// the state to `|0>_2 (x) |alpha>_34`. Possible only when at most two distinct
/// `(2,3)` kets carry amplitude: three orthonormal preimages cannot fit in the
/// two-dimensional image `|0> (x) C^2`.
pub fn componentwise_disentangler(shared: &PureState) -> Result<DisentanglerResult> {
    componentwise_disentangler_with(shared, SUPPORT_THRESHOLD)
}

/// [`componentwise_disentangler`] with an explicit support threshold.
pub fn componentwise_disentangler_with(shared: &PureState, threshold: f64) -> Result<DisentanglerResult> {
    require_three_qubits(shared)?;
    let mut support: Vec<usize> = shared
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > threshold)
        .map(|(s, _)| s >> 1)
        .collect();
    support.dedup();
    if support.len() > 2 {
        return Ok(DisentanglerResult::absent());
    }
    // Sources in order: the supported kets, then the rest by index.
    let sources: Vec<usize> = support
        .iter()
        .copied()
        .chain((0..4).filter(|k| !support.contains(k)))
        .collect();
    let mut u = Matrix::zeros(4, 4);
    for (target, &source) in sources.iter().enumerate() {
        u[(target, source)] = ONE;
    }
    let out = shared.evolve(&u.kron(&Matrix::identity(2)))?;
    let residual = PureState::normalized(out.amplitudes()[..4].to_vec())?;
    Ok(DisentanglerResult {
        exists: true,
        unitary23: Some(u),
        residual: Some(residual),
    })
}

#[derive(Debug, Clone)]
pub struct SchmidtDisentangler {
    pub result: DisentanglerResult,
    /// Schmidt coefficients of the shared state across `(2,3) | 4`, which are
    /// also those of the residual across `3 | 4`.
    pub coefficients: Vec<f64>,
    pub residual_entropy: f64,
}

/// Always succeeds: maps the two left Schmidt vectors of the `(2,3) | 4` cut
/// onto `|00>` and `|01>`, completing the unitary by Gram-Schmidt over
/// computational kets in index order.
pub fn schmidt_disentangler(shared: &PureState) -> Result<SchmidtDisentangler> {
    require_three_qubits(shared)?;
    let form = schmidt_decompose(shared, &[0, 1])?;
    let mut rows: Vec<Option<Vec<Amplitude>>> = form.left.iter().map(|l| Some(l.amplitudes().to_vec())).collect();
    rows.resize(4, None);
    let vs = complete_columns(4, rows);
    // U = sum_k |k><v_k|
    let mut u = Matrix::zeros(4, 4);
    for (k, v) in vs.iter().enumerate() {
        for (j, z) in v.iter().enumerate() {
            u[(k, j)] = z.conj();
        }
    }
    let residual = residual_after(shared, &u)?;
    let spectrum: Vec<f64> = form.coefficients.iter().map(|c| c * c).collect();
    Ok(SchmidtDisentangler {
        result: DisentanglerResult {
            exists: true,
            unitary23: Some(u),
            residual: Some(residual),
        },
        residual_entropy: entropy_of_spectrum(&spectrum),
        coefficients: form.coefficients,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanSummary {
    pub trials: u64,
    pub feasible_count: u64,
    pub max_passing_branches: usize,
}

/// Runs [`protocol_feasible`] on `trials` Haar-random bases (trial `i` seeded
/// by `derive_seed(seed, i)`). An injected basis replaces trial 0.
pub fn haar_scan(
    shared: &PureState,
    trials: u64,
    seed: u64,
    injected: Option<&MeasurementBasis>,
    tol: f64,
) -> Result<ScanSummary> {
    if trials == 0 {
        return Err(Error::Parse("trials must be at least 1".into()));
    }
    let dim = 1 << shared.n_qubits();
    let results: Vec<(bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(bool, usize)> {
            let basis = match (i, injected) {
                (0, Some(b)) => b.clone(),
                _ => MeasurementBasis::from_unitary(&haar_random_unitary(dim, derive_seed(seed, i)))?,
            };
            let v = protocol_feasible(&basis, shared, tol)?;
            Ok((v.feasible, v.passing_branches()))
        })
        .collect::<Result<_>>()?;
    Ok(ScanSummary {
        trials,
        feasible_count: results.iter().filter(|r| r.0).count() as u64,
        max_passing_branches: results.iter().map(|r| r.1).max().unwrap_or(0),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentwiseSection {
    pub exists: bool,
    pub support_threshold: f64,
    pub residual: Option<PureState>,
    pub unitary: Option<MatrixJson>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SchmidtSection {
    pub alpha_entropy: f64,
    pub alpha_schmidt: Vec<f64>,
    pub residual: PureState,
    pub unitary: MatrixJson,
}

/// Everything the toolkit can say about one shared state.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityReport {
    pub bob_reduced_state: MatrixJson,
    /// Permutation disentangler on Alice's computational kets.
    pub componentwise_disentangler: ComponentwiseSection,
    pub entropy_bits: f64,
    pub entropy_verdict: bool,
    /// Overall verdict; follows the entropy criterion.
    pub feasible: bool,
    pub input_hash: String,
    pub max_passing_branches: usize,
    pub scan_feasible_count: u64,
    pub scan_seed: u64,
    pub scan_trials: u64,
    /// Schmidt-based disentangler; always exists.
    pub schmidt_disentangler: SchmidtSection,
    pub shared_state: PureState,
    pub state_label: String,
    pub sum_rule_balanced: bool,
    pub sum_rule_row0: f64,
    pub sum_rule_row1: f64,
    pub toolkit_version: String,
}

/// Builds the full report. The sum rule is evaluated in the computational
/// basis (its value does not depend on the basis).
pub fn analyze(
    label: &str,
    shared: &PureState,
    trials: u64,
    seed: u64,
    injected: Option<&MeasurementBasis>,
    support_threshold: f64,
) -> Result<FeasibilityReport> {
    require_three_qubits(shared)?;
    let entropy = entropy_criterion(shared)?;
    let computational = MeasurementBasis::from_unitary(&Matrix::identity(8))?;
    let rule = sum_rule(shared, &computational)?;
    let scan = haar_scan(shared, trials, seed, injected, SCAN_TOL)?;
    let comp = componentwise_disentangler_with(shared, support_threshold)?;
    let schmidt = schmidt_disentangler(shared)?;

    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(shared).expect("state serializes"));
    hasher.update(format!("|{label}|{trials}|{seed}|{}|{support_threshold:e}", injected.is_some()).as_bytes());
    let input_hash = hex::encode(hasher.finalize());

    Ok(FeasibilityReport {
        bob_reduced_state: matrix_to_json(entropy.bob_reduced.matrix()),
        componentwise_disentangler: ComponentwiseSection {
            exists: comp.exists,
            support_threshold,
            residual: comp.residual,
            unitary: comp.unitary23.as_ref().map(matrix_to_json),
        },
        entropy_bits: entropy.entropy_bits,
        entropy_verdict: entropy.feasible,
        feasible: entropy.feasible,
        input_hash,
        max_passing_branches: scan.max_passing_branches,
        scan_feasible_count: scan.feasible_count,
        scan_seed: seed,
        scan_trials: scan.trials,
        schmidt_disentangler: SchmidtSection {
            alpha_entropy: schmidt.residual_entropy,
            alpha_schmidt: schmidt.coefficients,
            residual: schmidt
                .result
                .residual
                .expect("Schmidt disentangler always yields a residual"),
            unitary: matrix_to_json(schmidt.result.unitary23.as_ref().expect("unitary present")),
        },
        shared_state: shared.clone(),
        state_label: label.to_string(),
        sum_rule_balanced: rule.balanced(ENTROPY_TOL),
        sum_rule_row0: rule.row0,
        sum_rule_row1: rule.row1,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Qubit-2 reduced state of `(U23 (x) I)|shared>` equals `|0><0|`.
pub fn qubit2_is_zero(shared: &PureState, u23: &Matrix) -> Result<bool> {
    let out = shared.evolve(&u23.kron(&Matrix::identity(2)))?;
    let rho = out.reduced(&[0])?;
    let target = Matrix::diag(&[ONE, ZERO]);
    Ok(rho.matrix().max_abs_diff(&target) <= 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::{is_unitary, pauli};
    use crate::protocol::{ghz_protocol, w_like_protocol};
    use crate::states::{make_named_state, w_like_from_params, NamedState, WLikeParams};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn verdict_examples() {
        let v = unitarity_verdict(&pauli::x().scale(Amplitude::new(0.5, 0.0)), 1e-10);
        assert!(v.is_proportional_unitary);
        assert!((v.scale - 0.25).abs() < 1e-15);

        let v = unitarity_verdict(&Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-10);
        assert!(!v.is_proportional_unitary);

        let v = unitarity_verdict(&Matrix::zeros(2, 2), 1e-10);
        assert!(v.is_proportional_unitary);
        assert_eq!(v.scale, 0.0);
    }

    #[test]
    fn ghz_live_branches_have_scale_quarter() {
        let p = ghz_protocol();
        let fv = protocol_feasible(p.basis(), p.shared(), 1e-10).unwrap();
        assert!(fv.feasible);
        for i in p.live_branches() {
            assert!((fv.verdicts[i].scale - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn w_like_protocol_feasible() {
        let p = w_like_protocol(WLikeParams::new(0.4, 1.0, -0.3));
        assert!(protocol_feasible(p.basis(), p.shared(), 1e-10).unwrap().feasible);
    }

    #[test]
    fn sum_rule_examples() {
        let basis = MeasurementBasis::from_unitary(&haar_random_unitary(8, 3)).unwrap();
        let w = sum_rule(&make_named_state(NamedState::W), &basis).unwrap();
        assert!((w.row0 - 4.0 / 3.0).abs() < 1e-9 && (w.row1 - 2.0 / 3.0).abs() < 1e-9);
        assert!(!w.balanced(1e-9));
        let g = sum_rule(&make_named_state(NamedState::Ghz), &basis).unwrap();
        assert!((g.row0 - 1.0).abs() < 1e-9 && g.balanced(1e-9));
    }

    #[test]
    fn componentwise_examples() {
        let ghz = componentwise_disentangler(&make_named_state(NamedState::Ghz)).unwrap();
        assert!(ghz.exists);
        let u = ghz.unitary23.unwrap();
        // |00><00| + |01><11| + |10><01| + |11><10|
        let want = Matrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert_eq!(u, want);
        let bell = make_named_state(NamedState::Bell { m: 0, n: 0 });
        assert!((ghz.residual.unwrap().fidelity(&bell) - 1.0).abs() < 1e-12);

        assert!(
            !componentwise_disentangler(&make_named_state(NamedState::W))
                .unwrap()
                .exists
        );
        let quarter = w_like_from_params(WLikeParams::new(FRAC_PI_4, 0.0, 0.0));
        assert!(!componentwise_disentangler(&quarter).unwrap().exists);

        let omega = 0.6;
        let half = componentwise_disentangler(&w_like_from_params(WLikeParams::new(FRAC_PI_2, 0.0, omega))).unwrap();
        assert!(half.exists);
        let h = FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 4];
        amps[0b01] = Amplitude::new(h, 0.0);
        amps[0b10] = Amplitude::from_polar(h, omega);
        let want = PureState::new(amps).unwrap();
        assert!((half.residual.unwrap().fidelity(&want) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_disentangler_examples() {
        let g = schmidt_disentangler(&make_named_state(NamedState::Ghz)).unwrap();
        assert!((g.residual_entropy - 1.0).abs() < 1e-12);
        let w = schmidt_disentangler(&make_named_state(NamedState::W)).unwrap();
        assert!((w.residual_entropy - 0.918_295_834_054_489_6).abs() < 1e-10);
        let u = w.result.unitary23.as_ref().unwrap();
        assert!(is_unitary(u, 1e-10));
        assert!(qubit2_is_zero(&make_named_state(NamedState::W), u).unwrap());

        let plus = crate::states::bloch_qubit(FRAC_PI_2, 0.0);
        let prod = PureState::basis(2, 0).tensor(&plus).unwrap();
        let p = schmidt_disentangler(&prod).unwrap();
        assert!(p.residual_entropy.abs() < 1e-12);
    }

    #[test]
    fn scan_with_injected_basis() {
        let p = ghz_protocol();
        let s = haar_scan(p.shared(), 1, 0, Some(p.basis()), SCAN_TOL).unwrap();
        assert_eq!(s.feasible_count, 1);
        let w = haar_scan(&make_named_state(NamedState::W), 50, 1, None, SCAN_TOL).unwrap();
        assert_eq!(w.feasible_count, 0);
    }

    #[test]
    fn analyze_requires_three_qubits() {
        let bell = make_named_state(NamedState::Bell { m: 0, n: 0 });
        assert!(analyze("bell", &bell, 1, 0, None, SUPPORT_THRESHOLD).is_err());
    }
}
