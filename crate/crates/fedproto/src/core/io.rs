//! On-disk format for sparse ratings: a `row,col,value` CSV plus a key=value
//! metadata sidecar carrying n_rows, n_cols, lambda_bound, sparsity and
//! mask_semantics.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::core::{MaskSemantics, SparseRatings};
use crate::error::{Error, Result};

pub fn write_ratings(x: &SparseRatings, csv_path: &Path, meta_path: &Path) -> Result<()> {
    let mut csv = String::from("row,col,value\n");
    for &(r, c, v) in x.entries() {
        // `{}` prints the shortest representation that round-trips exactly.
        csv.push_str(&format!("{r},{c},{v}\n"));
    }
    let mut f = fs::File::create(csv_path)?;
    f.write_all(csv.as_bytes())?;

    let meta = format!(
        "n_rows={}\nn_cols={}\nlambda_bound={}\nsparsity={}\nmask_semantics={}\n",
        x.n_rows(),
        x.n_cols(),
        x.lambda_bound(),
        x.sparsity(),
        x.mask().as_str()
    );
    let mut f = fs::File::create(meta_path)?;
    f.write_all(meta.as_bytes())?;
    Ok(())
}

pub fn read_ratings(csv_path: &Path, meta_path: &Path) -> Result<SparseRatings> {
    let meta = parse_metadata(meta_path)?;
    let text = fs::read_to_string(csv_path)?;
    let path_str = csv_path.display().to_string();
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if idx == 0 {
            if line.trim() != "row,col,value" {
                return Err(Error::Parse {
                    path: path_str,
                    line: lineno,
                    message: format!("expected header 'row,col,value', got '{line}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse_err = |message: String| Error::Parse {
            path: csv_path.display().to_string(),
            line: lineno,
            message,
        };
        let row: usize = parts
            .next()
            .ok_or_else(|| parse_err("missing row field".into()))?
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad row index: {e}")))?;
        let col: usize = parts
            .next()
            .ok_or_else(|| parse_err("missing col field".into()))?
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad col index: {e}")))?;
        let value: f64 = parts
            .next()
            .ok_or_else(|| parse_err("missing value field".into()))?
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad value: {e}")))?;
        if parts.next().is_some() {
            return Err(parse_err("too many fields".into()));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(parse_err(format!("value {value} is negative or non-finite")));
        }
        entries.push((row, col, value));
    }
    SparseRatings::with_bounds(
        meta.n_rows,
        meta.n_cols,
        entries,
        meta.lambda_bound,
        meta.sparsity,
        meta.mask,
    )
}

struct Metadata {
    n_rows: usize,
    n_cols: usize,
    lambda_bound: f64,
    sparsity: usize,
    mask: MaskSemantics,
}

fn parse_metadata(path: &Path) -> Result<Metadata> {
    let text = fs::read_to_string(path)?;
    let mut n_rows = None;
    let mut n_cols = None;
    let mut lambda_bound = None;
    let mut sparsity = None;
    let mut mask = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let bad = |e: String| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message: e,
        };
        match key.trim() {
            "n_rows" => n_rows = Some(value.trim().parse().map_err(|e| bad(format!("{e}")))?),
            "n_cols" => n_cols = Some(value.trim().parse().map_err(|e| bad(format!("{e}")))?),
            "lambda_bound" => {
                lambda_bound = Some(value.trim().parse().map_err(|e| bad(format!("{e}")))?)
            }
            "sparsity" => sparsity = Some(value.trim().parse().map_err(|e| bad(format!("{e}")))?),
            "mask_semantics" => mask = Some(MaskSemantics::parse(value.trim())?),
            other => return Err(bad(format!("unknown metadata key '{other}'"))),
        }
    }
    let missing = |k: &str| Error::data(format!("metadata file {} missing {k}", path.display()));
    Ok(Metadata {
        n_rows: n_rows.ok_or_else(|| missing("n_rows"))?,
        n_cols: n_cols.ok_or_else(|| missing("n_cols"))?,
        lambda_bound: lambda_bound.ok_or_else(|| missing("lambda_bound"))?,
        sparsity: sparsity.ok_or_else(|| missing("sparsity"))?,
        mask: mask.ok_or_else(|| missing("mask_semantics"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_everything() {
        let x = SparseRatings::with_bounds(
            3,
            4,
            vec![(0, 1, 0.1 + 0.2), (2, 3, 5.0), (1, 0, 1e-17)],
            7.5,
            2,
            MaskSemantics::ExplicitMissing,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("x.csv");
        let meta = dir.path().join("x.meta");
        write_ratings(&x, &csv, &meta).unwrap();
        let y = read_ratings(&csv, &meta).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn negative_value_rejected_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("x.csv");
        let meta = dir.path().join("x.meta");
        std::fs::write(&csv, "row,col,value\n0,0,-3\n").unwrap();
        std::fs::write(
            &meta,
            "n_rows=1\nn_cols=1\nlambda_bound=5\nsparsity=1\nmask_semantics=implicit-zeros\n",
        )
        .unwrap();
        match read_ratings(&csv, &meta) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_empty_matrix_with_declared_shape() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("x.csv");
        let meta = dir.path().join("x.meta");
        std::fs::write(&csv, "row,col,value\n").unwrap();
        std::fs::write(
            &meta,
            "n_rows=4\nn_cols=7\nlambda_bound=0\nsparsity=0\nmask_semantics=implicit-zeros\n",
        )
        .unwrap();
        let x = read_ratings(&csv, &meta).unwrap();
        assert_eq!(x.n_rows(), 4);
        assert_eq!(x.n_cols(), 7);
        assert!(x.entries().is_empty());
    }
}
