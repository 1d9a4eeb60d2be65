//! Parses MIND `news.tsv` and `behaviors.tsv` files and summarizes them.
//!
//!     cargo run --example parse_mind -- news.tsv behaviors.tsv
//!
//! Without arguments the bundled golden fixtures are used.

use std::path::PathBuf;

use nram::data::{build_vocabulary, parse_behaviors_tsv, parse_news_tsv};

fn main() -> nram::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut args = std::env::args().skip(1);
    let news_path = args.next().map_or(fixtures.join("news_golden.tsv"), PathBuf::from);
    let behaviors_path = args.next().map_or(fixtures.join("behaviors_golden.tsv"), PathBuf::from);

    let news = parse_news_tsv(&news_path)?;
    let behaviors = parse_behaviors_tsv(&behaviors_path)?;
    let vocab = build_vocabulary(&news, 1)?;
    let shown: usize = behaviors.iter().map(|b| b.impressions.len()).sum();
    let clicks: usize = behaviors.iter().map(|b| b.clicked().count()).sum();

    println!("articles     {}", news.len());
    println!("vocabulary   {}", vocab.len());
    println!("impressions  {}", behaviors.len());
    println!("shown        {shown}");
    println!("clicked      {clicks}");
    if let Some(first) = behaviors.first() {
        println!("first impression of {}:", first.user_id);
        for (id, clicked) in &first.impressions {
            println!("  {id}\t{}", if *clicked { "click" } else { "skip" });
        }
    }
    Ok(())
}
