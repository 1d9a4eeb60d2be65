//! Compares the hand-derived gradient of the full click loss with central
//! differences on a small random instance.
//!
//!     cargo run --example gradient_check -- [seed]

use nram::model::{instance_backward, instance_loss, ModelConfig, ModelParams, TrainingInstance};
use nram::numerics::{finite_difference_check, Parameters, Rng};

fn main() -> nram::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = ModelConfig {
        d_model: 6,
        heads: 2,
        d_attn: 4,
        max_title: 3,
        max_history: 2,
        neg_k: 1,
        seed,
    };
    let mut rng = Rng::seed(seed);
    let mut params = ModelParams::random(&config, 8, &mut rng)?;
    // wider weights than the default init keep the scores away from a tie
    for t in params.tensors_mut() {
        let bound = (3.0 / t.shape()[0] as f64).sqrt();
        t.data_mut().iter_mut().for_each(|v| *v = rng.uniform(-bound, bound));
    }
    params.embedding.zero_pad_row();

    let inst = TrainingInstance {
        history: vec![vec![1, 2, 0], vec![3, 4, 5]],
        history_mask: vec![true, true],
        candidates: vec![vec![2, 6, 0], vec![7, 0, 0]],
    };
    let analytic = instance_backward(&inst, &params)?;
    println!("loss {:.6}  scores {:?}", analytic.loss, analytic.scores);

    let check = finite_difference_check(
        |p: &ModelParams| Ok(instance_loss(&inst, p)?.0),
        &params,
        &analytic.grads,
        1e-5,
    )?;
    println!(
        "{} scalars, max relative error {:.3e} at scalar {}",
        check.checked, check.max_relative_error, check.worst_index
    );

    // Relative error blows up on components near zero, where the difference
    // quotient is dominated by rounding in the loss; look at absolute error too.
    let eps = 1e-5;
    let mut probe = params.clone();
    let mut worst_abs: f64 = 0.0;
    for ti in 0..params.tensors().len() {
        for j in 0..params.tensors()[ti].len() {
            let orig = params.tensors()[ti].data()[j];
            probe.tensors_mut()[ti].data_mut()[j] = orig + eps;
            let up = instance_loss(&inst, &probe)?.0;
            probe.tensors_mut()[ti].data_mut()[j] = orig - eps;
            let down = instance_loss(&inst, &probe)?.0;
            probe.tensors_mut()[ti].data_mut()[j] = orig;
            let fd = (up - down) / (2.0 * eps);
            worst_abs = worst_abs.max((fd - analytic.grads.tensors()[ti].data()[j]).abs());
        }
    }
    println!("max absolute error {worst_abs:.3e}");
    Ok(())
}
