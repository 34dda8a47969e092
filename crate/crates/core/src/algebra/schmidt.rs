use crate::algebra::decomp::svd;
use crate::algebra::matrix::{Amplitude, Matrix, ZERO};
use crate::error::{Error, Result};
use crate::states::{scatter_bits, PureState};

/// Schmidt form of a pure state across a bipartition `(cut | rest)`.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// Non-increasing, `min(dim cut, dim rest)` entries (zeros included).
    pub coefficients: Vec<f64>,
    /// Orthonormal states on the cut qubits, in their original relative order.
    pub left: Vec<PureState>,
    /// Orthonormal states on the remaining qubits.
    pub right: Vec<PureState>,
    cut: Vec<usize>,
    rest: Vec<usize>,
}

impl SchmidtForm {
    pub fn cut(&self) -> &[usize] {
        &self.cut
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// `sum_k lambda_k |left_k> (x) |right_k>`, scattered back into the
    /// original qubit order.
    pub fn reconstruct(&self) -> Vec<Amplitude> {
        let n = self.cut.len() + self.rest.len();
        let mut out = vec![ZERO; 1 << n];
        for ((&lambda, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (a, &la) in l.amplitudes().iter().enumerate() {
                let fa = scatter_bits(a, &self.cut, n);
                for (b, &rb) in r.amplitudes().iter().enumerate() {
                    out[fa | scatter_bits(b, &self.rest, n)] += la * rb * lambda;
                }
            }
        }
        out
    }
}

/// Singular value decomposition of `state` reshaped across
/// `(cut | complement)`. `cut` must be a nonempty proper subset of positions.
pub fn schmidt_decompose(state: &PureState, cut: &[usize]) -> Result<SchmidtForm> {
    let n = state.n_qubits();
    let mut sorted = cut.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() >= n || sorted.len() != cut.len() || sorted.iter().any(|&q| q >= n) {
        return Err(Error::InvalidSubset {
            subset: cut.to_vec(),
            n_qubits: n,
        });
    }
    let rest: Vec<usize> = (0..n).filter(|q| !sorted.contains(q)).collect();
    let da = 1 << sorted.len();
    let db = 1 << rest.len();
    let amps = state.amplitudes();
    let mut m = Matrix::zeros(da, db);
    for a in 0..da {
        let fa = scatter_bits(a, &sorted, n);
        for b in 0..db {
            m[(a, b)] = amps[fa | scatter_bits(b, &rest, n)];
        }
    }
    let d = svd(&m);
    let k = d.s.len();
    let left = (0..k)
        .map(|j| PureState::normalized(d.u.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let right = (0..k)
        .map(|j| PureState::normalized(d.v.column(j).iter().map(|z| z.conj()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchmidtForm {
        coefficients: d.s,
        left,
        right,
        cut: sorted,
        rest,
    })
}
