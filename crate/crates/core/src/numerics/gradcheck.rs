use super::Parameters;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    /// Flat index of the worst scalar across all parameter tensors.
    pub worst_index: usize,
    pub checked: usize,
}

/// Compares analytic gradients against central differences for every scalar.
///
/// Relative error per scalar is `|a - f| / max(|a|, |f|, 1e-8)`.
pub fn finite_difference_check<P, F>(
    loss_fn: F,
    params: &P,
    analytic: &P,
    epsilon: f64,
) -> Result<GradCheck>
where
    P: Parameters + Clone,
    F: Fn(&P) -> Result<f64>,
{
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let grads: Vec<f64> = analytic
        .tensors()
        .into_iter()
        .flat_map(|t| t.data().to_vec())
        .collect();
    let mut probe = params.clone();
    let total = probe.num_scalars();
    if grads.len() != total {
        return Err(Error::Dimension {
            op: "finite_difference_check",
            left: vec![total],
            right: vec![grads.len()],
        });
    }

    let mut report = GradCheck {
        max_relative_error: 0.0,
        worst_index: 0,
        checked: total,
    };
    let mut flat = 0;
    let shapes: Vec<usize> = probe.tensors().iter().map(|t| t.len()).collect();
    for (tensor_idx, &len) in shapes.iter().enumerate() {
        for j in 0..len {
            let original = probe.tensors()[tensor_idx].data()[j];
            probe.tensors_mut()[tensor_idx].data_mut()[j] = original + epsilon;
            let plus = loss_fn(&probe)?;
            probe.tensors_mut()[tensor_idx].data_mut()[j] = original - epsilon;
            let minus = loss_fn(&probe)?;
            probe.tensors_mut()[tensor_idx].data_mut()[j] = original;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NumericInstability { index: flat });
            }
            let numeric = (plus - minus) / (2.0 * epsilon);
            let a = grads[flat];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            if rel > report.max_relative_error {
                report.max_relative_error = rel;
                report.worst_index = flat;
            }
            flat += 1;
        }
    }
    Ok(report)
}
