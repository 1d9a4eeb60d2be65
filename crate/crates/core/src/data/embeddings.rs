use std::fs;
use std::path::Path;

use super::Vocabulary;
use crate::error::{Error, Result};
use crate::layers::{EmbeddingTable, PAD_ID};
use crate::numerics::{Rng, Tensor};

/// Bound of the uniform init for rows the pretrained file does not cover.
pub const UNCOVERED_INIT_BOUND: f64 = 0.1;

/// Builds an embedding table from a text-format word-vector file
/// (`token v1 v2 … v_d` per line, space separated).
///
/// Every non-pad row is first drawn uniformly from `±0.1`, then overwritten
/// by the file vector when the token is in the vocabulary. Returns the table
/// and the number of vocabulary tokens the file covered.
pub fn load_pretrained_embeddings(
    path: impl AsRef<Path>,
    vocab: &Vocabulary,
    d_model: usize,
    rng: &mut Rng,
) -> Result<(EmbeddingTable, usize)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pretrained_embeddings(&text, path, vocab, d_model, rng)
}

pub fn parse_pretrained_embeddings(
    text: &str,
    path: &Path,
    vocab: &Vocabulary,
    d_model: usize,
    rng: &mut Rng,
) -> Result<(EmbeddingTable, usize)> {
    let mut matrix = Tensor::zeros(&[vocab.len(), d_model]);
    for row in 0..vocab.len() {
        if row == PAD_ID {
            continue;
        }
        for v in matrix.row_mut(row) {
            *v = rng.uniform(-UNCOVERED_INIT_BOUND, UNCOVERED_INIT_BOUND);
        }
    }
    let mut covered = vec![false; vocab.len()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let token = parts.next().unwrap_or_default();
        let values = parts
            .map(|p| {
                p.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("invalid float {p:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != d_model {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected {d_model} values, found {}", values.len()),
            });
        }
        if let Some(id) = vocab.get(token) {
            matrix.row_mut(id).copy_from_slice(&values);
            covered[id] = true;
        }
    }
    let coverage = covered.iter().filter(|&&c| c).count();
    Ok((EmbeddingTable::from_matrix(matrix)?, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{PAD_TOKEN, UNK_TOKEN};

    fn vocab() -> Vocabulary {
        Vocabulary::from_tokens(
            [PAD_TOKEN, UNK_TOKEN, "cat", "dog"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap()
    }

    fn parse(text: &str) -> Result<(EmbeddingTable, usize)> {
        parse_pretrained_embeddings(text, Path::new("vec.txt"), &vocab(), 3, &mut Rng::seed(0))
    }

    #[test]
    fn full_coverage() {
        let (t, cov) = parse("cat 1 2 3\ndog 4 5 6\nextra 0 0 0\n").unwrap();
        assert_eq!(cov, 2);
        assert_eq!(t.matrix.row(2), &[1.0, 2.0, 3.0]);
        assert_eq!(t.matrix.row(3), &[4.0, 5.0, 6.0]);
        assert_eq!(t.matrix.row(0), &[0.0; 3]);
    }

    #[test]
    fn empty_file_is_random_init() {
        let (t, cov) = parse("").unwrap();
        assert_eq!(cov, 0);
        assert_eq!(t.matrix.row(0), &[0.0; 3]);
        for row in 1..4 {
            assert!(t.matrix.row(row).iter().all(|v| v.abs() <= 0.1 && *v != 0.0));
        }
    }

    #[test]
    fn short_line_is_a_format_error() {
        let err = parse("cat 1 2 3\ndog 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
