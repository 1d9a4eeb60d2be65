//! Category and subcategory histogram of a news file as plot-ready TSV.
//!
//!     cargo run --example category_stats -- news.tsv

use nram::data::{category_stats, parse_news_tsv};
use nram::numerics::Rng;
use nram::synthetic::{two_topic_news, CorpusSpec};

fn main() -> nram::Result<()> {
    let news = match std::env::args().nth(1) {
        Some(path) => parse_news_tsv(path)?,
        None => two_topic_news(&CorpusSpec::default(), &mut Rng::seed(0)),
    };
    println!("category\tcount\tsubcategories");
    for row in category_stats(&news) {
        println!("{}", row.to_tsv_row());
    }
    Ok(())
}
