//! Measurement bases, teleportation protocols, branch operators, and exact and
//! sampled protocol execution.
//!
//! A protocol teleports a one-qubit message (qubit 1) through a shared state
//! whose last qubit belongs to Bob. Alice measures the message together with
//! her share of the state in a [`MeasurementBasis`]; outcome `i` leaves Bob's
//! qubit in `T_i|psi>` (unnormalized), where `T_i` is the branch operator,
//! and Bob undoes the stored correction `U_i` by applying `U_i^dag`.
//!
//! Outcome indices are big-endian bit strings: for three measured qubits the
//! outcome `(l, m, n)` is index `4l + 2m + n`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::decomp::{complete_columns, unitary_polar_factor};
use crate::algebra::matrix::{inner, pauli, unitarity_deviation, Amplitude, Matrix, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::states::{w_like_from_params, PureState, WLikeParams};

/// Tolerance for basis orthonormality and protocol invariants.
pub const CONSTRUCTION_TOL: f64 = 1e-10;

/// Branches whose probability falls below this are unreachable.
pub const DEAD_BRANCH_PROB: f64 = 1e-20;

/// Formats an outcome index as its bit string, e.g. `5 -> "101"`.
pub fn branch_label(index: usize, bits: usize) -> String {
    format!("{index:0bits$b}")
}

/// A complete orthonormal basis of `2^n` states on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    n_qubits: usize,
    elements: Vec<PureState>,
}

impl MeasurementBasis {
    pub fn new(elements: Vec<PureState>) -> Result<Self> {
        let n_qubits = elements
            .first()
            .map(PureState::n_qubits)
            .ok_or_else(|| Error::InvalidBasis("empty basis".into()))?;
        if elements.len() != 1 << n_qubits {
            return Err(Error::InvalidBasis(format!(
                "{} elements for a {n_qubits}-qubit space",
                elements.len()
            )));
        }
        if let Some(e) = elements.iter().find(|e| e.n_qubits() != n_qubits) {
            return Err(Error::InvalidBasis(format!(
                "mixed register sizes ({} and {n_qubits} qubits)",
                e.n_qubits()
            )));
        }
        let basis = Self { n_qubits, elements };
        let dev = basis.orthonormality_deviation();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::InvalidBasis(format!("not orthonormal (Gram deviation {dev:e})")));
        }
        Ok(basis)
    }

    /// Places the given elements at their indices and fills every other slot
    /// by Gram-Schmidt over computational kets taken in index order.
    pub fn complete(n_qubits: usize, live: Vec<(usize, PureState)>) -> Result<Self> {
        let dim = 1 << n_qubits;
        let mut slots: Vec<Option<Vec<Amplitude>>> = vec![None; dim];
        for (idx, state) in live {
            if idx >= dim || state.n_qubits() != n_qubits {
                return Err(Error::InvalidBasis(format!(
                    "element {idx} does not fit a {n_qubits}-qubit basis"
                )));
            }
            if slots[idx].is_some() {
                return Err(Error::InvalidBasis(format!("slot {idx} given twice")));
            }
            slots[idx] = Some(state.into_amplitudes());
        }
        let given: Vec<&Vec<Amplitude>> = slots.iter().flatten().collect();
        for (a, x) in given.iter().enumerate() {
            for (b, y) in given.iter().enumerate() {
                let want = if a == b { ONE } else { ZERO };
                let dev = (inner(x, y) - want).norm();
                if dev > CONSTRUCTION_TOL {
                    return Err(Error::InvalidBasis(format!(
                        "given elements not orthonormal (deviation {dev:e})"
                    )));
                }
            }
        }
        let filled = complete_columns(dim, slots);
        Self::new(filled.into_iter().map(PureState::normalized).collect::<Result<_>>()?)
    }

    /// Takes the columns of a unitary as the basis elements.
    pub fn from_unitary(u: &Matrix) -> Result<Self> {
        let dev = unitarity_deviation(u);
        if dev > CONSTRUCTION_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Self::new(
            (0..u.cols())
                .map(|j| PureState::normalized(u.column(j)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PureState] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PureState {
        &self.elements[i]
    }

    pub fn gram(&self) -> Matrix {
        gram_matrix(&self.elements)
    }

    pub fn orthonormality_deviation(&self) -> f64 {
        self.gram().max_abs_diff(&Matrix::identity(self.len()))
    }

    /// `max |sum_i |b_i><b_i| - I|`
    pub fn completeness_deviation(&self) -> f64 {
        let d = 1 << self.n_qubits;
        let sum = self.elements.iter().fold(Matrix::zeros(d, d), |acc, e| {
            &acc + &Matrix::outer(e.amplitudes(), e.amplitudes())
        });
        sum.max_abs_diff(&Matrix::identity(d))
    }
}

/// `G[a][b] = <v_a|v_b>`
pub fn gram_matrix(states: &[PureState]) -> Matrix {
    let k = states.len();
    let mut g = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            g[(a, b)] = states[a].inner(&states[b]);
        }
    }
    g
}

/// A shared state, Alice's basis, Bob's per-outcome corrections `U_i` and the
/// expected branch amplitudes `c_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProtocolJson", into = "ProtocolJson")]
pub struct TeleportProtocol {
    shared: PureState,
    basis: MeasurementBasis,
    corrections: Vec<Matrix>,
    coefficients: Vec<f64>,
}

impl TeleportProtocol {
    pub fn new(
        shared: PureState,
        basis: MeasurementBasis,
        corrections: Vec<Matrix>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        if shared.n_qubits() < 2 || shared.n_qubits() > 3 {
            return Err(Error::InvalidProtocol(format!(
                "shared state must have 2 or 3 qubits, got {}",
                shared.n_qubits()
            )));
        }
        if basis.n_qubits() != shared.n_qubits() {
            return Err(Error::InvalidProtocol(format!(
                "basis acts on {} qubits; expected {}",
                basis.n_qubits(),
                shared.n_qubits()
            )));
        }
        let k = basis.len();
        if corrections.len() != k || coefficients.len() != k {
            return Err(Error::InvalidProtocol(format!(
                "need {k} corrections and coefficients, got {} and {}",
                corrections.len(),
                coefficients.len()
            )));
        }
        for (i, u) in corrections.iter().enumerate() {
            if u.rows() != 2 || u.cols() != 2 {
                return Err(Error::InvalidProtocol(format!("correction {i} is not 2x2")));
            }
            let dev = unitarity_deviation(u);
            if dev > CONSTRUCTION_TOL {
                return Err(Error::InvalidProtocol(format!(
                    "correction {i} is not unitary (deviation {dev:e})"
                )));
            }
        }
        if coefficients.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidProtocol(
                "coefficients must be finite and non-negative".into(),
            ));
        }
        let total: f64 = coefficients.iter().map(|c| c * c).sum();
        if (total - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidProtocol(format!(
                "sum of squared coefficients is {total}"
            )));
        }
        Ok(Self {
            shared,
            basis,
            corrections,
            coefficients,
        })
    }

    pub fn shared(&self) -> &PureState {
        &self.shared
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    pub fn corrections(&self) -> &[Matrix] {
        &self.corrections
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn n_branches(&self) -> usize {
        self.basis.len()
    }

    /// Bits per outcome label.
    pub fn outcome_bits(&self) -> usize {
        self.basis.n_qubits()
    }

    /// Indices with a nonzero expected coefficient.
    pub fn live_branches(&self) -> Vec<usize> {
        (0..self.n_branches()).filter(|&i| self.coefficients[i] > 0.0).collect()
    }
}

/// Wire format of a protocol. Corrections are row-major `[re, im]` grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolJson {
    pub basis_elements: Vec<PureState>,
    pub coefficients: Vec<f64>,
    pub corrections: Vec<MatrixJson>,
    pub shared_state: PureState,
}

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<Matrix> {
    let rows: Vec<Vec<Amplitude>> = j
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Amplitude::new(re, im)).collect())
        .collect();
    let c = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("matrix rows are empty or ragged".into()));
    }
    let m = Matrix::from_rows(&rows);
    if !m.is_finite() {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    Ok(m)
}

impl TryFrom<ProtocolJson> for TeleportProtocol {
    type Error = Error;

    fn try_from(j: ProtocolJson) -> Result<Self> {
        let corrections = j.corrections.iter().map(matrix_from_json).collect::<Result<_>>()?;
        TeleportProtocol::new(
            j.shared_state,
            MeasurementBasis::new(j.basis_elements)?,
            corrections,
            j.coefficients,
        )
    }
}

impl From<TeleportProtocol> for ProtocolJson {
    fn from(p: TeleportProtocol) -> Self {
        ProtocolJson {
            basis_elements: p.basis.elements,
            coefficients: p.coefficients,
            corrections: p.corrections.iter().map(matrix_to_json).collect(),
            shared_state: p.shared,
        }
    }
}

fn ket(n_qubits: usize, terms: &[(usize, Amplitude)]) -> PureState {
    let mut amps = vec![ZERO; 1 << n_qubits];
    for &(i, a) in terms {
        amps[i] += a;
    }
    PureState::new(amps).expect("hand-built ket is normalized")
}

fn real(x: f64) -> Amplitude {
    Amplitude::new(x, 0.0)
}

/// Assembles a protocol from its live branches; every other slot gets a
/// completed basis element, the identity correction and coefficient 0.
fn assemble(shared: PureState, live: Vec<(usize, PureState, Matrix, f64)>) -> Result<TeleportProtocol> {
    let n = shared.n_qubits();
    let k = 1 << n;
    let mut corrections = vec![pauli::identity(); k];
    let mut coefficients = vec![0.0; k];
    let mut elements = Vec::with_capacity(live.len());
    for (idx, state, u, c) in live {
        corrections[idx] = u;
        coefficients[idx] = c;
        elements.push((idx, state));
    }
    let basis = MeasurementBasis::complete(n, elements)?;
    TeleportProtocol::new(shared, basis, corrections, coefficients)
}

/// Standard teleportation through the Bell state `beta_00`, measured in the
/// Bell basis; outcome `(m, n)` is index `2m + n`.
pub fn bell_protocol() -> TeleportProtocol {
    use crate::states::{make_named_state, NamedState};
    let shared = make_named_state(NamedState::Bell { m: 0, n: 0 });
    let corr = [pauli::identity(), pauli::x(), pauli::z(), pauli::y().scale(-I)];
    let live = (0..4)
        .map(|i| {
            let state = make_named_state(NamedState::Bell {
                m: (i >> 1) as u8,
                n: (i & 1) as u8,
            });
            (i, state, corr[i].clone(), 0.5)
        })
        .collect();
    assemble(shared, live).expect("Bell protocol is valid")
}

/// Teleportation through the GHZ state. Live outcomes 000, 001, 100, 101 use
/// `(|000> +- |111>)/sqrt2` and `(|100> +- |011>)/sqrt2` with corrections
/// `I`, `Z`, `X`, `-iY`; the other four outcomes never occur.
pub fn ghz_protocol() -> TeleportProtocol {
    use crate::states::{make_named_state, NamedState};
    let h = real(FRAC_1_SQRT_2);
    let live = vec![
        (0b000, ket(3, &[(0b000, h), (0b111, h)]), pauli::identity(), 0.5),
        (0b001, ket(3, &[(0b000, h), (0b111, -h)]), pauli::z(), 0.5),
        (0b100, ket(3, &[(0b100, h), (0b011, h)]), pauli::x(), 0.5),
        (0b101, ket(3, &[(0b100, h), (0b011, -h)]), pauli::y().scale(-I), 0.5),
    ];
    assemble(make_named_state(NamedState::Ghz), live).expect("GHZ protocol is valid")
}

/// Teleportation through a W-like state with its four-element basis
/// (outcomes 000..011) and corrections `I`, `Z`, `X`, `Y`.
pub fn w_like_protocol(p: WLikeParams) -> TeleportProtocol {
    let h = FRAC_1_SQRT_2;
    let (y, z) = p.weights();
    let (y, z) = (y * h, z * h);
    let live = vec![
        (
            0b000,
            ket(3, &[(0b001, y), (0b010, z), (0b100, real(h))]),
            pauli::identity(),
            0.5,
        ),
        (
            0b001,
            ket(3, &[(0b001, y), (0b010, z), (0b100, real(-h))]),
            pauli::z(),
            0.5,
        ),
        (
            0b010,
            ket(3, &[(0b101, y), (0b110, z), (0b000, real(h))]),
            pauli::x(),
            0.5,
        ),
        (
            0b011,
            ket(3, &[(0b101, y), (0b110, z), (0b000, real(-h))]),
            pauli::y(),
            0.5,
        ),
    ];
    assemble(w_like_from_params(p), live).expect("W-like protocol is valid")
}

/// Applies `op` to the last qubit of `state`.
fn apply_to_last(state: &PureState, op: &Matrix) -> PureState {
    let rest = Matrix::identity(state.dim() / 2);
    state.evolve(&rest.kron(op)).expect("unitary on the last qubit")
}

/// The states `sigma(mn)^dag |shared>` (sigma acting on the last qubit) and
/// their Gram matrix, in the order `mn = 00, 01, 10, 11`.
#[derive(Debug, Clone)]
pub struct SigmaTwirl {
    pub states: Vec<PureState>,
    pub gram: Matrix,
}

pub fn sigma_twirl_states(shared: &PureState) -> SigmaTwirl {
    let states: Vec<PureState> = (0..4)
        .map(|mn| apply_to_last(shared, &pauli::sigma(mn).adjoint()))
        .collect();
    let gram = gram_matrix(&states);
    SigmaTwirl { states, gram }
}

/// Builds the W-like basis determined by Bob's free unitary `s`: for each
/// `mn`, the element `sum_psi |psi>_1 (x) <psi|_4 s^dag sigma(mn) |W-like>`
/// at outcome index `2m + n` (with the leading bit 0), correction
/// `sigma(mn) s`, coefficient 1/2.
pub fn basis_from_s(p: WLikeParams, s: &Matrix) -> Result<TeleportProtocol> {
    if s.rows() != 2 || s.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.rows().max(s.cols()),
        });
    }
    let dev = unitarity_deviation(s);
    if dev > CONSTRUCTION_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let shared = w_like_from_params(p);
    let live = (0..4)
        .map(|mn| {
            let sigma = pauli::sigma(mn);
            let phi = apply_to_last(&shared, &(&s.adjoint() * &sigma));
            // Bob's index psi moves to the front as Alice's message slot.
            let mut amps = vec![ZERO; 8];
            for (idx, &a) in phi.amplitudes().iter().enumerate() {
                let (alice, bob) = (idx >> 1, idx & 1);
                amps[(bob << 2) | alice] = a;
            }
            let state = PureState::new(amps)?;
            Ok((mn, state, &sigma * s, 0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(shared, live)
}

/// Generic protocol for an arbitrary basis: each correction is the unitary
/// polar factor of the branch operator (identity for a vanishing branch) and
/// each coefficient is `sqrt(tr(T^dag T)/2)`.
pub fn protocol_from_basis(shared: PureState, basis: MeasurementBasis) -> Result<TeleportProtocol> {
    let family = branch_operators(&basis, &shared)?;
    let mut corrections = Vec::with_capacity(basis.len());
    let mut coefficients = Vec::with_capacity(basis.len());
    for t in &family.ops {
        let scale = (&t.adjoint() * t).trace().re / 2.0;
        coefficients.push(scale.max(0.0).sqrt());
        corrections.push(if t.max_abs() < 1e-14 {
            pauli::identity()
        } else {
            unitary_polar_factor(t)
        });
    }
    // Renormalize away rounding in the coefficients.
    let total: f64 = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in coefficients.iter_mut() {
        *c /= total;
    }
    TeleportProtocol::new(shared, basis, corrections, coefficients)
}

/// For each live element of `ours`, the index of the best-matching element of
/// `reference` together with its fidelity.
pub fn label_correspondence(
    ours: &MeasurementBasis,
    live: &[usize],
    reference: &MeasurementBasis,
) -> Vec<(usize, usize, f64)> {
    live.iter()
        .map(|&i| {
            let (j, f) = reference
                .elements()
                .iter()
                .enumerate()
                .map(|(j, r)| (j, ours.element(i).fidelity(r)))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            (i, j, f)
        })
        .collect()
}

/// The 2x2 branch operators `T_i`, one per basis element.
#[derive(Debug, Clone)]
pub struct BranchOperatorFamily {
    pub ops: Vec<Matrix>,
}

impl BranchOperatorFamily {
    /// `sum_i T_i^dag T_i`
    pub fn gram_sum(&self) -> Matrix {
        self.ops
            .iter()
            .fold(Matrix::zeros(2, 2), |acc, t| &acc + &(&t.adjoint() * t))
    }

    pub fn completeness_deviation(&self) -> f64 {
        self.gram_sum().max_abs_diff(&Matrix::identity(2))
    }

    /// `sum_i T_i |psi><psi| T_i^dag`, Bob's unconditioned state.
    pub fn averaged_output(&self, psi: &PureState) -> Matrix {
        let rho = Matrix::outer(psi.amplitudes(), psi.amplitudes());
        self.ops
            .iter()
            .fold(Matrix::zeros(2, 2), |acc, t| &acc + &(&(t * &rho) * &t.adjoint()))
    }
}

/// Column `j` of `T_i` is `<b_i|_{1..n} (|j>_1 (x) |shared>)`, which leaves a
/// vector on Bob's qubit. Independent of any message.
pub fn branch_operators(basis: &MeasurementBasis, shared: &PureState) -> Result<BranchOperatorFamily> {
    let n = shared.n_qubits();
    if basis.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.n_qubits(),
        });
    }
    let amps = shared.amplitudes();
    let ops = basis
        .elements()
        .iter()
        .map(|b| {
            let b = b.amplitudes();
            let mut t = Matrix::zeros(2, 2);
            for (s, &a) in amps.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let (alice, bob) = (s >> 1, s & 1);
                for j in 0..2 {
                    t[(bob, j)] += b[(j << (n - 1)) | alice].conj() * a;
                }
            }
            t
        })
        .collect();
    Ok(BranchOperatorFamily { ops })
}

/// One measurement outcome of an exact protocol run.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub index: usize,
    pub probability: f64,
    /// Bob's qubit after his correction; `None` for an unreachable branch.
    pub bob_state: Option<PureState>,
    /// `|<psi|bob>|^2`; `None` for an unreachable branch.
    pub branch_fidelity: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TeleportRun {
    pub outcomes: Vec<BranchOutcome>,
    pub total_fidelity: f64,
}

impl TeleportRun {
    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.probability).collect()
    }
}

fn check_message(psi: &PureState) -> Result<()> {
    if psi.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: psi.n_qubits(),
        });
    }
    Ok(())
}

/// Exact execution: branch `i` occurs with probability `|T_i psi|^2` and
/// leaves Bob with `U_i^dag T_i psi / |T_i psi|`.
pub fn run_teleport(psi: &PureState, protocol: &TeleportProtocol) -> Result<TeleportRun> {
    check_message(psi)?;
    let family = branch_operators(&protocol.basis, &protocol.shared)?;
    let mut total = 0.0;
    let outcomes = family
        .ops
        .iter()
        .zip(&protocol.corrections)
        .enumerate()
        .map(|(index, (t, u))| {
            let raw = t.apply(psi.amplitudes());
            let probability: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
            if probability < DEAD_BRANCH_PROB {
                return Ok(BranchOutcome {
                    index,
                    probability,
                    bob_state: None,
                    branch_fidelity: None,
                });
            }
            let bob = PureState::normalized(u.adjoint().apply(&raw))?;
            let f = psi.fidelity(&bob);
            total += probability * f;
            Ok(BranchOutcome {
                index,
                probability,
                bob_state: Some(bob),
                branch_fidelity: Some(f),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TeleportRun {
        outcomes,
        total_fidelity: total,
    })
}

/// The three classical bits (or two, for a Bell resource) Alice sends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalMessage(pub usize);

/// Alice's side: samples a measurement outcome from the branch distribution.
struct Alice {
    cumulative: Vec<f64>,
}

impl Alice {
    fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn measure<R: Rng>(&self, rng: &mut R) -> ClassicalMessage {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let x = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .iter()
            .position(|&c| x < c)
            .unwrap_or(self.cumulative.len() - 1);
        ClassicalMessage(idx)
    }
}

/// Bob's side: holds the post-measurement qubit until the classical message
/// arrives, then applies the inverse of the announced correction.
enum Bob<'a> {
    Waiting { qubit: &'a [Amplitude] },
    Corrected(PureState),
}

impl<'a> Bob<'a> {
    fn receive(self, msg: ClassicalMessage, corrections: &[Matrix]) -> Self {
        match self {
            Bob::Waiting { qubit } => {
                let out = corrections[msg.0].adjoint().apply(qubit);
                Bob::Corrected(PureState::normalized(out).expect("live branch state"))
            }
            done => done,
        }
    }

    fn state(&self) -> Option<&PureState> {
        match self {
            Bob::Corrected(s) => Some(s),
            Bob::Waiting { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledRun {
    pub trials: u64,
    pub seed: u64,
    pub histogram: Vec<u64>,
    pub mean_fidelity: f64,
}

impl SampledRun {
    pub fn frequencies(&self) -> Vec<f64> {
        self.histogram.iter().map(|&h| h as f64 / self.trials as f64).collect()
    }
}

const SAMPLE_CHUNK: u64 = 8192;

/// Monte-Carlo execution of the protocol over a classical channel.
///
/// Trials are split into fixed chunks; chunk `k` draws from ChaCha8 stream
/// `k` keyed by `seed`, so the aggregate does not depend on thread count.
pub fn sample_teleport(psi: &PureState, protocol: &TeleportProtocol, trials: u64, seed: u64) -> Result<SampledRun> {
    if trials == 0 {
        return Err(Error::Parse("trials must be at least 1".into()));
    }
    check_message(psi)?;
    let family = branch_operators(&protocol.basis, &protocol.shared)?;
    let collapsed: Vec<Vec<Amplitude>> = family.ops.iter().map(|t| t.apply(psi.amplitudes())).collect();
    let probabilities: Vec<f64> = collapsed.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
    let alice = Alice::new(&probabilities);
    let k = protocol.n_branches();
    let chunks = trials.div_ceil(SAMPLE_CHUNK);

    let partials: Vec<(Vec<u64>, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = SAMPLE_CHUNK.min(trials - c * SAMPLE_CHUNK);
            let mut hist = vec![0u64; k];
            let mut fid = 0.0;
            for _ in 0..n {
                let msg = alice.measure(&mut rng);
                hist[msg.0] += 1;
                let bob = Bob::Waiting {
                    qubit: &collapsed[msg.0],
                }
                .receive(msg, &protocol.corrections);
                fid += bob.state().map_or(0.0, |s| psi.fidelity(s));
            }
            (hist, fid)
        })
        .collect();

    let mut histogram = vec![0u64; k];
    let mut fid_sum = 0.0;
    for (h, f) in partials {
        for (acc, x) in histogram.iter_mut().zip(h) {
            *acc += x;
        }
        fid_sum += f;
    }
    Ok(SampledRun {
        trials,
        seed,
        histogram,
        mean_fidelity: fid_sum / trials as f64,
    })
}
