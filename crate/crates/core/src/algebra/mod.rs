//! Dense complex linear algebra for dimensions up to 16.

pub mod decomp;
pub mod haar;
pub mod matrix;
pub mod schmidt;

pub use haar::haar_random_unitary;
pub use matrix::{inner, is_unitary, kron_vec, pauli, unitarity_deviation, Amplitude, Matrix};
pub use schmidt::{schmidt_decompose, SchmidtForm};

use crate::error::Result;
use crate::states::PureState;

/// Kronecker product of operators or of states; the left operand's qubits
/// come first.
pub trait TensorProduct<Rhs = Self> {
    type Output;

    fn tensor_product(&self, rhs: &Rhs) -> Self::Output;
}

impl TensorProduct for Matrix {
    type Output = Matrix;

    fn tensor_product(&self, rhs: &Matrix) -> Matrix {
        self.kron(rhs)
    }
}

impl TensorProduct for PureState {
    /// Fails only if the product would exceed the 4-qubit register limit.
    type Output = Result<PureState>;

    fn tensor_product(&self, rhs: &PureState) -> Result<PureState> {
        self.tensor(rhs)
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> T::Output {
    a.tensor_product(b)
}
