//! Mini-batch training with Adam, seeded shuffling, validation-driven early
//! stopping and model evaluation.

mod adam;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

pub use adam::Adam;

use crate::data::EvalImpression;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_dataset, ImpressionEval, MetricsReport};
use crate::model::{instance_backward, score_candidates, ModelParams, TrainingInstance};
use crate::numerics::{accumulate, Parameters, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    /// Rescale the batch gradient to this global L2 norm when exceeded.
    pub clip_norm: Option<f64>,
    /// Worker threads for per-instance gradients and scoring; 1 runs serially.
    /// Results are identical for any value.
    pub threads: usize,
    /// Return the best-validation-AUC parameters; otherwise the last epoch's.
    pub restore_best: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 64,
            max_epochs: 10,
            patience: 2,
            seed: 42,
            clip_norm: None,
            threads: 1,
            restore_best: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let probabilities = [("beta1", self.beta1), ("beta2", self.beta2)];
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        for (name, b) in probabilities {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Config(format!("{name} must lie in [0, 1), got {b}")));
            }
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config("eps must be positive".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 || self.threads == 0
        {
            return Err(Error::Config(
                "batch_size, epochs, patience and threads must be at least 1".into(),
            ));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(Error::Config("clip_norm must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "lr={}\nbeta1={}\nbeta2={}\neps={}\nbatch_size={}\nepochs={}\npatience={}\ntrain_seed={}\nclip_norm={}\nthreads={}\nrestore_best={}\n",
            self.learning_rate,
            self.beta1,
            self.beta2,
            self.eps,
            self.batch_size,
            self.max_epochs,
            self.patience,
            self.seed,
            self.clip_norm.map_or("none".to_string(), |c| c.to_string()),
            self.threads,
            self.restore_best
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub validation: MetricsReport,
    pub seconds: f64,
}

impl fmt::Display for EpochRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.validation;
        write!(
            f,
            "epoch={}\tloss={}\tauc={}\tmrr={}\tndcg@5={}\tndcg@10={}\tseconds={:.3}",
            self.epoch, self.mean_loss, v.auc, v.mrr, v.ndcg5, v.ndcg10, self.seconds
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch with the highest validation AUC.
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn best(&self) -> Option<&EpochRecord> {
        self.epochs.get(self.best_epoch.checked_sub(1)?)
    }
}

impl fmt::Display for TrainHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.epochs {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads <= 1 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Summed loss and summed gradient over `batch`, reduced in input order.
pub fn batch_gradient(
    params: &ModelParams,
    batch: &[&TrainingInstance],
    parallel: bool,
) -> Result<(f64, ModelParams)> {
    let per_instance: Vec<_> = if parallel {
        batch
            .par_iter()
            .map(|inst| instance_backward(inst, params))
            .collect::<Result<_>>()?
    } else {
        batch
            .iter()
            .map(|inst| instance_backward(inst, params))
            .collect::<Result<_>>()?
    };
    let mut total = params.zeros_like();
    let mut loss = 0.0;
    for g in &per_instance {
        loss += g.loss;
        accumulate(&mut total, &g.grads);
    }
    Ok((loss, total))
}

fn clip(grads: &mut ModelParams, max_norm: f64) {
    let norm = grads
        .tensors()
        .iter()
        .flat_map(|t| t.data())
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let factor = max_norm / norm;
        for t in grads.tensors_mut() {
            t.scale(factor);
        }
    }
}

fn score_all(
    params: &ModelParams,
    impressions: &[EvalImpression],
    parallel: bool,
) -> Result<Vec<ImpressionEval>> {
    let score = |imp: &EvalImpression| -> Result<ImpressionEval> {
        let scores = score_candidates(&imp.history, &imp.history_mask, &imp.candidates, params)?;
        Ok(ImpressionEval::new(imp.labels.clone(), scores))
    };
    if parallel {
        impressions.par_iter().map(score).collect()
    } else {
        impressions.iter().map(score).collect()
    }
}

/// Scores every impression's candidates.
pub fn score_impressions(
    params: &ModelParams,
    impressions: &[EvalImpression],
    threads: usize,
) -> Result<Vec<ImpressionEval>> {
    with_threads(threads, || score_all(params, impressions, threads > 1))?
}

pub fn evaluate_model(
    params: &ModelParams,
    impressions: &[EvalImpression],
    threads: usize,
) -> Result<MetricsReport> {
    evaluate_dataset(&score_impressions(params, impressions, threads)?)
}

/// Trains until validation AUC stops improving for `patience` epochs or
/// `max_epochs` is reached; returns the parameters of the best-AUC epoch
/// (or of the last epoch when `restore_best` is off).
pub fn train(
    initial: &ModelParams,
    instances: &[TrainingInstance],
    validation: &[EvalImpression],
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    cfg.validate()?;
    if instances.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    with_threads(cfg.threads, || train_inner(initial, instances, validation, cfg))?
}

fn train_inner(
    initial: &ModelParams,
    instances: &[TrainingInstance],
    validation: &[EvalImpression],
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    let parallel = cfg.threads > 1;
    let mut params = initial.clone();
    params.embedding.zero_pad_row();
    let mut adam = Adam::new(&params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);
    let mut rng = Rng::seed(cfg.seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();

    let mut history = TrainHistory::default();
    let mut best: Option<(f64, ModelParams)> = None;
    let mut stale = 0;

    for epoch in 1..=cfg.max_epochs {
        let started = Instant::now();
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&TrainingInstance> = chunk.iter().map(|&i| &instances[i]).collect();
            let (loss, mut grads) = batch_gradient(&params, &batch, parallel)?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch: batch_idx + 1,
                });
            }
            loss_sum += loss;
            for t in grads.tensors_mut() {
                t.scale(1.0 / batch.len() as f64);
            }
            if let Some(max_norm) = cfg.clip_norm {
                clip(&mut grads, max_norm);
            }
            adam.step(&mut params, &grads);
        }

        let report = evaluate_dataset(&score_all(&params, validation, parallel)?)?;
        history.epochs.push(EpochRecord {
            epoch,
            mean_loss: loss_sum / instances.len() as f64,
            validation: report,
            seconds: started.elapsed().as_secs_f64(),
        });

        let improved = best.as_ref().is_none_or(|(auc, _)| report.auc > *auc);
        if improved {
            best = Some((report.auc, params.clone()));
            history.best_epoch = epoch;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    if !cfg.restore_best {
        return Ok((params, history));
    }
    let (_, best_params) = best.expect("at least one epoch ran");
    Ok((best_params, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{instance_loss, ModelConfig};

    fn tiny() -> (ModelParams, TrainingInstance) {
        let c = ModelConfig {
            d_model: 6,
            heads: 2,
            d_attn: 4,
            max_title: 3,
            max_history: 2,
            neg_k: 2,
            seed: 0,
        };
        let p = ModelParams::random(&c, 10, &mut Rng::seed(3)).unwrap();
        let inst = TrainingInstance {
            history: vec![vec![2, 3, 0], vec![4, 0, 0]],
            history_mask: vec![true, true],
            candidates: vec![vec![5, 6, 0], vec![7, 0, 0], vec![8, 9, 0]],
        };
        (p, inst)
    }

    #[test]
    fn memorizes_a_single_instance() {
        let (mut p, inst) = tiny();
        let mut adam = Adam::new(&p, 0.005, 0.9, 0.999, 1e-8);
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let (loss, g) = batch_gradient(&p, &[&inst], false).unwrap();
            assert!(loss < last, "loss went from {last} to {loss}");
            last = loss;
            adam.step(&mut p, &g);
        }
        let (final_loss, _) = instance_loss(&inst, &p).unwrap();
        assert!(final_loss < 0.01, "{final_loss}");
        assert!(p.embedding.matrix.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parallel_batch_gradient_matches_serial() {
        let (p, inst) = tiny();
        let mut other = inst.clone();
        other.candidates.swap(0, 2);
        let batch = [&inst, &other, &inst];
        let (l1, g1) = batch_gradient(&p, &batch, false).unwrap();
        let (l2, g2) = with_threads(3, || batch_gradient(&p, &batch, true))
            .unwrap()
            .unwrap();
        assert_eq!(l1, l2);
        assert_eq!(g1, g2);
    }

    #[test]
    fn clipping_bounds_the_norm() {
        let (p, inst) = tiny();
        let (_, mut g) = batch_gradient(&p, &[&inst], false).unwrap();
        clip(&mut g, 1e-3);
        let norm: f64 = g.tensors().iter().flat_map(|t| t.data()).map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm <= 1e-3 * (1.0 + 1e-12));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { patience: 0, ..Default::default() },
            TrainConfig { beta1: 1.0, ..Default::default() },
            TrainConfig { learning_rate: f64::NAN, ..Default::default() },
            TrainConfig { clip_norm: Some(0.0), ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn empty_training_set() {
        let (p, _) = tiny();
        assert!(matches!(
            train(&p, &[], &[], &TrainConfig::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }
}
