//! Dense tensors, the primitive operations the model needs, a portable
//! RNG, and a finite-difference gradient checker.

mod gradcheck;
mod rng;
mod tensor;

pub use gradcheck::{finite_difference_check, GradCheck};
pub use rng::{stable_hash64, Rng};
pub use tensor::{dot, masked_softmax, matmul, matmul_a_bt, matmul_at_b, tanh, Tensor};

/// A fixed, ordered collection of learnable tensors.
///
/// The order returned by `tensors` and `tensors_mut` must agree; gradient
/// containers use the same type so they line up scalar for scalar.
pub trait Parameters {
    fn tensors(&self) -> Vec<&Tensor>;
    fn tensors_mut(&mut self) -> Vec<&mut Tensor>;

    fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

impl Parameters for Tensor {
    fn tensors(&self) -> Vec<&Tensor> {
        vec![self]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![self]
    }
}

/// Element-wise `into += from` over two parameter sets of the same layout.
pub fn accumulate<P: Parameters>(into: &mut P, from: &P) {
    for (a, b) in into.tensors_mut().into_iter().zip(from.tensors()) {
        for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
            *x += y;
        }
    }
}
