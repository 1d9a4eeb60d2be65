//! Per-impression AUC, MRR and nDCG, and their macro average.

use nram::metrics::{auc, evaluate_dataset, mrr, ndcg_at_k, ImpressionEval};

fn main() -> nram::Result<()> {
    let impressions = vec![
        ImpressionEval::new(vec![true, false, false], vec![0.9, 0.1, 0.2]),
        ImpressionEval::new(vec![false, true, false], vec![0.9, 0.5, 0.2]),
        // tie between a click and a skip counts half in AUC
        ImpressionEval::new(vec![true, false, false], vec![0.5, 0.5, 0.2]),
        // no click: skipped in the average
        ImpressionEval::new(vec![false, false], vec![0.3, 0.4]),
    ];
    for (i, e) in impressions.iter().enumerate() {
        println!(
            "impression {i}: auc {:?} mrr {:?} ndcg@5 {:?}",
            auc(e),
            mrr(e),
            ndcg_at_k(e, 5)
        );
    }
    print!("{}", evaluate_dataset(&impressions)?);
    Ok(())
}
