//! Pure states, density matrices, the named states of the toolkit (Bell, GHZ,
//! W, W-like), partial traces and the von Neumann entanglement entropy.
//!
//! Qubits are addressed by 0-based position within a register, big-endian.
//! For a shared state held as qubits (2,3,4) of a teleportation setup,
//! positions 0 and 1 are Alice's and position 2 is Bob's.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::decomp::hermitian_eigenvalues;
use crate::algebra::haar::haar_random_unitary_with;
use crate::algebra::matrix::{inner, kron_vec, norm_sqr, Amplitude, Matrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Normalization tolerance applied when a state is constructed.
pub const NORM_TOL: f64 = 1e-10;

/// A unit-norm state on 1 to 4 qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl PureState {
    pub const MAX_QUBITS: usize = 4;

    /// Validates length, finiteness and normalization.
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        let n_qubits = qubit_count(amps.len(), Self::MAX_QUBITS)?;
        if let Some(index) = amps.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        let deviation = (norm_sqr(&amps) - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amps: Vec<Amplitude>) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        for z in amps.iter_mut() {
            *z /= n;
        }
        Self::new(amps)
    }

    /// Computational basis ket `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self::new(amps).expect("basis ket is valid")
    }

    /// Haar-random state, deterministic in `seed`.
    pub fn random(n_qubits: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let u = haar_random_unitary_with(1 << n_qubits, &mut rng);
        Self::normalized(u.column(0)).expect("unitary column is normalized")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Amplitude {
        inner(&self.amps, &other.amps)
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Tensor product; the qubits of `self` come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(kron_vec(&self.amps, &other.amps))
    }

    /// Applies an operator of matching dimension and renormalization-checks
    /// the result, so `op` should be unitary.
    pub fn evolve(&self, op: &Matrix) -> Result<Self> {
        if op.cols() != self.dim() || op.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.cols(),
            });
        }
        Self::new(op.apply(&self.amps))
    }

    /// `|self><self|`
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: Matrix::outer(&self.amps, &self.amps),
        }
    }

    /// Reduced state on the kept qubit positions.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(&self.density(), keep)
    }
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PureState[{}q](", self.n_qubits)?;
        for (k, z) in self.amps.iter().enumerate() {
            if z.norm() > 1e-14 {
                write!(f, " {:+.6}{:+.6}i|{:0w$b}>", z.re, z.im, k, w = self.n_qubits)?;
            }
        }
        write!(f, " )")
    }
}

fn qubit_count(len: usize, max_qubits: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() || len > (1 << max_qubits) {
        return Err(Error::BadLength { len, max_qubits });
    }
    Ok(len.trailing_zeros() as usize)
}

/// Wire format of a pure state: big-endian amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateJson {
    pub amplitudes: Vec<[f64; 2]>,
    pub n_qubits: usize,
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        if j.amplitudes.len() != 1usize.checked_shl(j.n_qubits as u32).unwrap_or(0) {
            return Err(Error::Parse(format!(
                "nQubits = {} does not match {} amplitudes",
                j.n_qubits,
                j.amplitudes.len()
            )));
        }
        PureState::new(j.amplitudes.iter().map(|&[re, im]| Amplitude::new(re, im)).collect())
    }
}

impl From<PureState> for StateJson {
    fn from(s: PureState) -> Self {
        StateJson {
            n_qubits: s.n_qubits,
            amplitudes: s.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix on 1 to 4 qubits.
/// Invariants are checked once, at construction.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: Matrix,
}

impl DensityMatrix {
    pub const TOL: f64 = 1e-10;

    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensityMatrix("not square".into()));
        }
        let n_qubits =
            qubit_count(matrix.dim(), PureState::MAX_QUBITS).map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
        if !matrix.is_finite() {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > Self::TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > Self::TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -Self::TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// The maximally mixed state on `n_qubits`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: Matrix::identity(d).scale(Amplitude::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(self.matrix.kron(&other.matrix))
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix[{}q] {:?}", self.n_qubits, self.matrix)
    }
}

fn validate_subset(keep: &[usize], n_qubits: usize) -> Result<Vec<usize>> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let bad = sorted.len() != keep.len()
        || sorted.is_empty()
        || sorted.len() >= n_qubits
        || sorted.iter().any(|&q| q >= n_qubits);
    if bad {
        return Err(Error::InvalidSubset {
            subset: keep.to_vec(),
            n_qubits,
        });
    }
    Ok(sorted)
}

/// Scatters the bits of `value` (most significant first) into `positions`
/// of an `n`-qubit big-endian index.
pub(crate) fn scatter_bits(value: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (i, &q)| {
        let bit = (value >> (k - 1 - i)) & 1;
        acc | (bit << (n - 1 - q))
    })
}

/// Traces out every qubit not in `keep`; kept qubits retain their relative
/// order. `keep` must be a nonempty proper subset of the positions.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    let keep = validate_subset(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let mut out = Matrix::zeros(dk, dk);
    for i in 0..dk {
        let fi = scatter_bits(i, &keep, n);
        for j in 0..dk {
            let fj = scatter_bits(j, &keep, n);
            let mut acc = ZERO;
            for e in 0..dt {
                let fe = scatter_bits(e, &traced, n);
                acc += rho.matrix[(fi | fe, fj | fe)];
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::new(out)
}

/// Von Neumann entropy `-sum lambda log2 lambda` in bits, `0 log 0 := 0`.
pub fn entanglement_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Entropy of a probability spectrum; entries within 1e-12 of 0 or 1 are
/// clamped onto the boundary first.
pub fn entropy_of_spectrum(lambdas: &[f64]) -> f64 {
    let h: f64 = lambdas
        .iter()
        .map(|&l| {
            let l = if l < 1e-12 {
                0.0
            } else if l > 1.0 - 1e-12 {
                1.0
            } else {
                l
            };
            if l == 0.0 || l == 1.0 {
                0.0
            } else {
                -l * l.log2()
            }
        })
        .sum();
    h.max(0.0)
}

/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`
pub fn bloch_qubit(theta: f64, phi: f64) -> PureState {
    let (s, c) = (theta / 2.0).sin_cos();
    PureState::new(vec![Amplitude::new(c, 0.0), Amplitude::from_polar(s, phi)]).expect("Bloch qubit is normalized")
}

/// The fixed states the toolkit knows by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// Bell state `beta_mn`.
    Bell {
        m: u8,
        n: u8,
    },
    Ghz,
    W,
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "ghz" => return Ok(Self::Ghz),
            "w" => return Ok(Self::W),
            "bell" => return Ok(Self::Bell { m: 0, n: 0 }),
            _ => {}
        }
        let args = lower
            .strip_prefix("bell:")
            .or_else(|| lower.strip_prefix("bell(").and_then(|r| r.strip_suffix(')')));
        if let Some(args) = args {
            let bits: Vec<u8> = args
                .split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::UnknownState(s.to_string()))?;
            if let [m, n] = bits[..] {
                if m <= 1 && n <= 1 {
                    return Ok(Self::Bell { m, n });
                }
            }
        }
        Err(Error::UnknownState(s.to_string()))
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bell { m, n } => write!(f, "bell({m},{n})"),
            Self::Ghz => write!(f, "ghz"),
            Self::W => write!(f, "w"),
        }
    }
}

pub fn make_named_state(name: NamedState) -> PureState {
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    let mut amps;
    match name {
        NamedState::Bell { m, n } => {
            amps = vec![ZERO; 4];
            let sign = if m == 0 { h } else { -h };
            if n == 0 {
                amps[0b00] = h;
                amps[0b11] = sign;
            } else {
                amps[0b01] = h;
                amps[0b10] = sign;
            }
        }
        NamedState::Ghz => {
            amps = vec![ZERO; 8];
            amps[0b000] = h;
            amps[0b111] = h;
        }
        NamedState::W => {
            amps = vec![ZERO; 8];
            let t = Amplitude::new(1.0 / 3f64.sqrt(), 0.0);
            amps[0b001] = t;
            amps[0b010] = t;
            amps[0b100] = t;
        }
    }
    PureState::new(amps).expect("named states are normalized")
}

/// `x|001> + y|010> + z|100>`, rejected unless `|x|^2+|y|^2+|z|^2 = 1`.
pub fn make_w_like(x: Amplitude, y: Amplitude, z: Amplitude) -> Result<PureState> {
    let mut amps = vec![ZERO; 8];
    amps[0b001] = x;
    amps[0b010] = y;
    amps[0b100] = z;
    PureState::new(amps)
}

/// Angles of the W-like family. Not range-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WLikeParams {
    pub gamma: f64,
    pub phi: f64,
    pub omega: f64,
}

impl WLikeParams {
    pub fn new(gamma: f64, phi: f64, omega: f64) -> Self {
        Self { gamma, phi, omega }
    }

    /// `e^{i phi} cos(gamma)` and `e^{i omega} sin(gamma)`.
    pub(crate) fn weights(&self) -> (Amplitude, Amplitude) {
        (
            Amplitude::from_polar(self.gamma.cos(), self.phi),
            Amplitude::from_polar(self.gamma.sin(), self.omega),
        )
    }
}

impl FromStr for WLikeParams {
    type Err = Error;

    /// Parses `gamma,phi,omega` in radians.
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_triple(s)?;
        Ok(Self::new(v[0], v[1], v[2]))
    }
}

pub(crate) fn parse_triple(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
    match parts[..] {
        [a, b, c] if a.is_finite() && b.is_finite() && c.is_finite() => Ok([a, b, c]),
        _ => Err(Error::Parse(format!("`{s}`: expected three finite reals"))),
    }
}

/// `(|001> + e^{i phi} cos(gamma)|010> + e^{i omega} sin(gamma)|100>) / sqrt 2`
pub fn w_like_from_params(p: WLikeParams) -> PureState {
    let h = FRAC_1_SQRT_2;
    let (y, z) = p.weights();
    make_w_like(Amplitude::new(h, 0.0), y * h, z * h).expect("W-like family is normalized")
}

/// Parameters `(n, p, delta)` of the W-class family
/// `(sqrt(n+1) e^{i delta}|001> + sqrt(n) e^{ip}|010> + |100>) / sqrt(2+2n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WClassParams {
    pub n: f64,
    pub p: f64,
    pub delta: f64,
}

impl WClassParams {
    pub fn new(n: f64, p: f64, delta: f64) -> Result<Self> {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::Parse(format!(
                "W-class n must be a finite non-negative real, got {n}"
            )));
        }
        Ok(Self { n, p, delta })
    }
}

/// Maps W-class parameters onto the W-like family:
/// `cos(gamma) = sqrt(n/(n+1))`, `phi = p - delta`, `omega = -delta`.
/// The resulting state equals `e^{-i delta}|W_n>`.
pub fn w_class_to_w_like(q: WClassParams) -> WLikeParams {
    let gamma = (q.n / (q.n + 1.0)).sqrt().clamp(0.0, 1.0).acos();
    WLikeParams::new(gamma, q.p - q.delta, -q.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    fn assert_amps(s: &PureState, expected: &[(usize, Amplitude)], tol: f64) {
        for k in 0..s.dim() {
            let want = expected.iter().find(|(i, _)| *i == k).map_or(ZERO, |&(_, v)| v);
            assert!(
                (s.amplitudes()[k] - want).norm() <= tol,
                "index {k}: {:?} vs {want}",
                s.amplitudes()[k]
            );
        }
    }

    #[test]
    fn bloch_poles_and_equator() {
        assert_amps(&bloch_qubit(0.0, 1.234), &[(0, ONE)], 1e-15);
        assert_amps(&bloch_qubit(PI, 0.0), &[(1, ONE)], 1e-15);
        let h = FRAC_1_SQRT_2;
        assert_amps(
            &bloch_qubit(FRAC_PI_2, FRAC_PI_2),
            &[(0, c(h, 0.0)), (1, c(0.0, h))],
            1e-15,
        );
    }

    #[test]
    fn named_states() {
        let h = FRAC_1_SQRT_2;
        let t = 1.0 / 3f64.sqrt();
        assert_amps(
            &make_named_state(NamedState::Ghz),
            &[(0, c(h, 0.0)), (7, c(h, 0.0))],
            0.0,
        );
        assert_amps(
            &make_named_state(NamedState::W),
            &[(1, c(t, 0.0)), (2, c(t, 0.0)), (4, c(t, 0.0))],
            0.0,
        );
        assert_amps(
            &make_named_state(NamedState::Bell { m: 1, n: 1 }),
            &[(1, c(h, 0.0)), (2, c(-h, 0.0))],
            0.0,
        );
    }

    #[test]
    fn named_state_parsing() {
        assert_eq!("GHZ".parse::<NamedState>().unwrap(), NamedState::Ghz);
        assert_eq!(
            "bell(1,0)".parse::<NamedState>().unwrap(),
            NamedState::Bell { m: 1, n: 0 }
        );
        assert_eq!(
            "bell:0,1".parse::<NamedState>().unwrap(),
            NamedState::Bell { m: 0, n: 1 }
        );
        assert!(matches!("bell:2,0".parse::<NamedState>(), Err(Error::UnknownState(_))));
        assert!(matches!("cluster".parse::<NamedState>(), Err(Error::UnknownState(_))));
    }

    #[test]
    fn tensor_of_basis_kets() {
        let s = PureState::basis(1, 0).tensor(&PureState::basis(1, 1)).unwrap();
        assert_amps(&s, &[(1, ONE)], 0.0);
        let g = PureState::basis(1, 0)
            .tensor(&make_named_state(NamedState::Ghz))
            .unwrap();
        assert_eq!(g.n_qubits(), 4);
        let h = FRAC_1_SQRT_2;
        assert_amps(&g, &[(0, c(h, 0.0)), (7, c(h, 0.0))], 0.0);
        // five qubits exceed the register limit
        assert!(g.tensor(&PureState::basis(1, 0)).is_err());
    }

    #[test]
    fn w_like_construction() {
        let t = 1.0 / 3f64.sqrt();
        let w = make_w_like(c(t, 0.0), c(t, 0.0), c(t, 0.0)).unwrap();
        assert!((w.fidelity(&make_named_state(NamedState::W)) - 1.0).abs() < 1e-15);

        let p = make_w_like(ONE, ZERO, ZERO).unwrap();
        assert_amps(&p, &[(1, ONE)], 0.0);

        match make_w_like(ONE, ONE, ZERO) {
            Err(Error::NotNormalized { deviation }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("expected normalization error, got {other:?}"),
        }
    }

    #[test]
    fn w_like_params_examples() {
        let h = FRAC_1_SQRT_2;
        let s = w_like_from_params(WLikeParams::new(FRAC_PI_4, 0.0, 0.0));
        assert_amps(&s, &[(1, c(h, 0.0)), (2, c(0.5, 0.0)), (4, c(0.5, 0.0))], 1e-15);

        let omega = 0.77;
        let s = w_like_from_params(WLikeParams::new(FRAC_PI_2, 0.3, omega));
        assert_amps(&s, &[(1, c(h, 0.0)), (4, Amplitude::from_polar(h, omega))], 1e-15);

        let phi = -1.1;
        let s = w_like_from_params(WLikeParams::new(0.0, phi, 2.0));
        assert_amps(&s, &[(1, c(h, 0.0)), (2, Amplitude::from_polar(h, phi))], 1e-15);
    }

    #[test]
    fn w_class_mapping_examples() {
        let g0 = w_class_to_w_like(WClassParams::new(0.0, 0.4, 0.2).unwrap());
        assert!((g0.gamma - FRAC_PI_2).abs() < 1e-15);
        assert!(g0.gamma.cos().abs() < 1e-15);

        let g1 = w_class_to_w_like(WClassParams::new(1.0, 0.0, 0.0).unwrap());
        assert!((g1.gamma - FRAC_PI_4).abs() < 1e-15);
        assert_eq!((g1.phi, g1.omega), (0.0, 0.0));

        // n -> infinity approaches the gamma = 0 member.
        let (p, d) = (0.9, 0.3);
        let big = w_like_from_params(w_class_to_w_like(WClassParams::new(1e6, p, d).unwrap()));
        let limit = w_like_from_params(WLikeParams::new(0.0, p - d, 0.0));
        assert!(big.fidelity(&limit) > 1.0 - 1e-3);

        assert!(WClassParams::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn reduced_state_of_w_on_last_qubit() {
        let rho = make_named_state(NamedState::W).reduced(&[2]).unwrap();
        let want = Matrix::diag(&[c(2.0 / 3.0, 0.0), c(1.0 / 3.0, 0.0)]);
        assert!(rho.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn reduced_state_of_w_like_is_maximally_mixed() {
        for &(g, p, o) in &[
            (0.0, 0.0, 0.0),
            (0.3, 1.0, -2.0),
            (FRAC_PI_2, 0.5, 0.5),
            (7.0, -3.0, 11.0),
        ] {
            let rho = w_like_from_params(WLikeParams::new(g, p, o)).reduced(&[2]).unwrap();
            assert!(rho.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12);
        }
    }

    #[test]
    fn trace_out_product_factor() {
        let psi = bloch_qubit(0.7, 0.2).density();
        let rho = make_named_state(NamedState::W).reduced(&[0, 2]).unwrap();
        let joint = psi.tensor(&rho).unwrap();
        let back = partial_trace(&joint, &[1, 2]).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_subsets() {
        let rho = make_named_state(NamedState::Ghz).density();
        for keep in [&[][..], &[0, 1, 2], &[3], &[1, 1]] {
            assert!(
                matches!(partial_trace(&rho, keep), Err(Error::InvalidSubset { .. })),
                "{keep:?}"
            );
        }
    }

    #[test]
    fn entropy_examples() {
        let ghz = make_named_state(NamedState::Ghz).reduced(&[2]).unwrap();
        assert!((entanglement_entropy(&ghz) - 1.0).abs() < 1e-10);
        let w = make_named_state(NamedState::W).reduced(&[2]).unwrap();
        assert!((entanglement_entropy(&w) - 0.918_295_834_054_489_6).abs() < 1e-6);
        assert_eq!(entanglement_entropy(&PureState::basis(1, 0).density()), 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 1.0])).is_err());
        assert!(DensityMatrix::new(Matrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5])).is_err());
        assert!(DensityMatrix::new(Matrix::from_vec(
            2,
            2,
            vec![c(0.5, 0.0), c(0.1, 0.1), c(0.1, 0.1), c(0.5, 0.0)]
        ))
        .is_err());
        assert!(DensityMatrix::new(Matrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])).is_ok());
    }

    #[test]
    fn state_json_round_trip_and_validation() {
        let s = w_like_from_params(WLikeParams::new(0.5, 0.2, 0.9));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"amplitudes\":"));
        let back: PureState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        let bad = r#"{"amplitudes": [[1.0, 0.0], [1.0, 0.0]], "nQubits": 1}"#;
        assert!(serde_json::from_str::<PureState>(bad).is_err());
        let mismatch = r#"{"amplitudes": [[1.0, 0.0], [0.0, 0.0]], "nQubits": 2}"#;
        assert!(serde_json::from_str::<PureState>(mismatch).is_err());
    }
}
