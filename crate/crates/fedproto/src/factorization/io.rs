//! On-disk format for factor models: a U.csv / V.csv pair of plain numeric
//! matrices plus a key=value sidecar (rank, lambda, iterations, objective).

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::core::FactorModel;
use crate::error::{Error, Result};

fn write_matrix(m: &Array2<f64>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message: format!("{e}"),
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    message: format!("expected {} fields, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let nrows = if ncols == 0 { 0 } else { flat.len() / ncols };
    Array2::from_shape_vec((nrows, ncols), flat)
        .map_err(|e| Error::data(format!("bad matrix shape in {}: {e}", path.display())))
}

/// Write U.csv, V.csv and the metadata sidecar.
pub fn save_model(
    model: &FactorModel,
    iterations: usize,
    objective: f64,
    u_path: &Path,
    v_path: &Path,
    meta_path: &Path,
) -> Result<()> {
    write_matrix(model.user_factors(), u_path)?;
    write_matrix(model.item_factors(), v_path)?;
    let meta = format!(
        "rank={}\nlambda={}\niterations={}\nobjective={}\n",
        model.rank(),
        model.lambda(),
        iterations,
        objective
    );
    fs::File::create(meta_path)?.write_all(meta.as_bytes())?;
    Ok(())
}

/// Read a model back from a U.csv / V.csv pair and its sidecar.
pub fn load_model(u_path: &Path, v_path: &Path, meta_path: &Path) -> Result<FactorModel> {
    let u = read_matrix(u_path)?;
    let v = read_matrix(v_path)?;
    let mut lambda = None;
    let mut rank = None;
    let text = fs::read_to_string(meta_path)?;
    for line in text.lines() {
        if let Some((k, val)) = line.split_once('=') {
            match k.trim() {
                "lambda" => {
                    lambda = Some(val.trim().parse::<f64>().map_err(|e| {
                        Error::data(format!("bad lambda in {}: {e}", meta_path.display()))
                    })?)
                }
                "rank" => {
                    rank = Some(val.trim().parse::<usize>().map_err(|e| {
                        Error::data(format!("bad rank in {}: {e}", meta_path.display()))
                    })?)
                }
                _ => {}
            }
        }
    }
    let lambda =
        lambda.ok_or_else(|| Error::data(format!("{} missing lambda", meta_path.display())))?;
    let model = FactorModel::new(u, v, lambda)?;
    if let Some(r) = rank {
        if r != model.rank() {
            return Err(Error::data(format!(
                "sidecar rank {r} disagrees with matrix rank {}",
                model.rank()
            )));
        }
    }
    Ok(model)
}
