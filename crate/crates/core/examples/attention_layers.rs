//! Runs the two attention layers on a toy sequence and prints the attention
//! weights, showing that padded positions receive none.

use nram::layers::{additive_attention_pool, multi_head_self_attention, AdditiveAttentionParams, MultiHeadParams};
use nram::numerics::{Rng, Tensor};

fn main() -> nram::Result<()> {
    let mut rng = Rng::seed(1);
    let (d_model, heads) = (4, 2);
    let x = Tensor::from_rows(&[
        vec![1.0, 0.0, 0.5, -0.5],
        vec![0.0, 1.0, -0.5, 0.5],
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ])?;
    let mask = [true, true, true, false];

    let mha = MultiHeadParams::random(d_model, heads, &mut rng)?;
    let (h, cache) = multi_head_self_attention(&x, &mask, &mha)?;
    for (i, a) in cache.attention_weights().iter().enumerate() {
        println!("head {i}:");
        for r in 0..a.rows() {
            println!("  {:?}", a.row(r).iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
        }
    }

    let pool = AdditiveAttentionParams::random(d_model, 3, &mut rng)?;
    let (r, pc) = additive_attention_pool(&h, &mask, &pool)?;
    println!("pooling weights {:?}", pc.weights());
    println!("pooled vector   {:?}", r.data());
    Ok(())
}
