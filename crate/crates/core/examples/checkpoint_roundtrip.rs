//! Saves a model, reloads it bit-exactly and shows that a flipped byte is
//! caught by the checksum.

use nram::model::{checkpoint_bytes, parse_checkpoint, ModelConfig, ModelParams};
use nram::numerics::Rng;

fn main() -> nram::Result<()> {
    let config = ModelConfig {
        d_model: 8,
        heads: 2,
        d_attn: 4,
        max_title: 5,
        max_history: 3,
        neg_k: 2,
        seed: 9,
    };
    let params = ModelParams::random(&config, 20, &mut Rng::seed(config.seed))?;
    let bytes = checkpoint_bytes(&params, &config);
    println!("checkpoint is {} bytes", bytes.len());

    let (loaded, loaded_config) = parse_checkpoint(&bytes)?;
    println!("bit-exact: {}", loaded == params && loaded_config == config);

    let mut corrupted = bytes.clone();
    corrupted[100] ^= 1;
    match parse_checkpoint(&corrupted) {
        Ok(_) => println!("corruption went unnoticed"),
        Err(e) => println!("corrupted copy: {e}"),
    }
    Ok(())
}
