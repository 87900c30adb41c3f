//! Seeded generators and dataset loading: random projection inputs,
//! synthetic regression instances, and CSV ingestion through the encoder.

use crate::{BenchError, Result};
use caprsoc::encode::{encode_dataset, ColumnKind, EncodingReport, RawColumn, RawTable};
use caprsoc::model::SparseRegressionProblem;
use caprsoc::RsocVector;
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::path::Path;

/// Splitmix-style seed derivation so nested loops get independent,
/// reproducible streams from one top-level seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed;
    for &p in parts {
        h = h.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

/// `n` random scalar-block points `(x, y, z)` with every coordinate i.i.d.
/// uniform on `[-2, 2]`, deterministic in the seed.
pub fn gen_random_points(n: usize, seed: u64) -> Vec<RsocVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = rng.gen_range(-2.0..2.0);
            let y = rng.gen_range(-2.0..2.0);
            let z = rng.gen_range(-2.0..2.0);
            RsocVector::new(vec![x], y, z)
        })
        .collect()
}

/// Synthetic regression instance: `A` i.i.d. standard normal, ground truth
/// with `sparsity` nonzeros at random positions and signs in {-1, +1},
/// `b = A x + noise * g`.
pub fn synth_instance(
    t: usize,
    n: usize,
    sparsity: usize,
    noise: f64,
    seed: u64,
    gamma1: f64,
    gamma2: f64,
) -> Result<SparseRegressionProblem> {
    if sparsity > n {
        return Err(BenchError::Config(format!("sparsity {sparsity} exceeds n {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Array2::from_shape_fn((t, n), |_| rng.sample::<f64, _>(StandardNormal));
    let mut support: Vec<usize> = (0..n).collect();
    support.shuffle(&mut rng);
    let mut x_true = Array1::<f64>::zeros(n);
    for &j in support.iter().take(sparsity) {
        x_true[j] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    let noise_vec =
        Array1::from_iter((0..t).map(|_| noise * rng.sample::<f64, _>(StandardNormal)));
    let b = a.dot(&x_true) + &noise_vec;
    Ok(SparseRegressionProblem::new(a, b, gamma1, gamma2)?)
}

/// Column kinds accepted in a schema declaration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SchemaKind {
    Numeric,
    Categorical,
    Id,
    Target,
}

fn parse_schema(schema: &str) -> Result<Vec<(String, SchemaKind)>> {
    let mut decls = Vec::new();
    for part in schema.split(',') {
        let part = part.trim();
        let (name, kind) = part.split_once(':').ok_or_else(|| {
            BenchError::Config(format!("schema entry {part:?} is not name:kind"))
        })?;
        let kind = match kind.trim() {
            "numeric" => SchemaKind::Numeric,
            "categorical" => SchemaKind::Categorical,
            "id" => SchemaKind::Id,
            "target" => SchemaKind::Target,
            other => {
                return Err(BenchError::Config(format!(
                    "unknown column kind {other:?}; expected numeric, categorical, id, or target"
                )))
            }
        };
        decls.push((name.trim().to_string(), kind));
    }
    let targets = decls.iter().filter(|(_, k)| *k == SchemaKind::Target).count();
    if targets != 1 {
        return Err(BenchError::Config(format!(
            "schema must declare exactly one target column, found {targets}"
        )));
    }
    Ok(decls)
}

/// A CSV dataset turned into a regression problem, with the encoding
/// provenance kept for the output directory.
pub struct LoadedDataset {
    pub problem: SparseRegressionProblem,
    pub report: EncodingReport,
    pub column_names: Vec<String>,
    pub target: String,
}

/// Loads a headered CSV and a schema declaration into a regression problem:
/// the target column becomes the response, everything else goes through the
/// dummy/interaction encoder in file column order.
pub fn load_dataset(
    path: &Path,
    schema: &str,
    gamma1: f64,
    gamma2: f64,
) -> Result<LoadedDataset> {
    let decls = parse_schema(schema)?;
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    for (name, _) in &decls {
        if !headers.iter().any(|h| h == name) {
            return Err(BenchError::Config(format!(
                "schema column {name:?} is missing from the file"
            )));
        }
    }
    let kind_of = |h: &str| -> Result<SchemaKind> {
        decls
            .iter()
            .find(|(name, _)| name == h)
            .map(|(_, k)| *k)
            .ok_or_else(|| BenchError::Config(format!("file column {h:?} is not in the schema")))
    };
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(BenchError::Config(format!(
                "row has {} fields, header has {}",
                record.len(),
                headers.len()
            )));
        }
        for (col, field) in cells.iter_mut().zip(record.iter()) {
            col.push(field.trim().to_string());
        }
    }
    let mut columns = Vec::new();
    let mut target: Option<(String, Vec<f64>)> = None;
    for (header, values) in headers.iter().zip(cells) {
        match kind_of(header)? {
            SchemaKind::Target => {
                let parsed = values
                    .iter()
                    .map(|v| {
                        v.parse::<f64>().map_err(|_| {
                            BenchError::Config(format!(
                                "target column {header:?} holds non-numeric cell {v:?}"
                            ))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                target = Some((header.clone(), parsed));
            }
            SchemaKind::Numeric => {
                columns.push(RawColumn { name: header.clone(), kind: ColumnKind::Numeric, values })
            }
            SchemaKind::Categorical => columns.push(RawColumn {
                name: header.clone(),
                kind: ColumnKind::Categorical,
                values,
            }),
            SchemaKind::Id => {
                columns.push(RawColumn { name: header.clone(), kind: ColumnKind::Id, values })
            }
        }
    }
    let (target_name, b) = target.expect("schema guarantees one target");
    let encoded = encode_dataset(&RawTable { columns })?;
    let problem =
        SparseRegressionProblem::new(encoded.matrix, Array1::from_vec(b), gamma1, gamma2)?;
    Ok(LoadedDataset {
        problem,
        report: encoded.report,
        column_names: encoded.column_names,
        target: target_name,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn random_points_are_deterministic_and_in_range() {
        let a = gen_random_points(500, 42);
        let b = gen_random_points(500, 42);
        assert_eq!(a, b);
        for p in &a {
            assert!(p.x[0].abs() <= 2.0 && p.y.abs() <= 2.0 && p.z.abs() <= 2.0);
        }
        assert_ne!(a, gen_random_points(500, 43));
    }

    #[test]
    fn coordinate_mean_is_centered() {
        // 10^5 coordinates, mean within 0.02 of zero
        let pts = gen_random_points(34_000, 7);
        let sum: f64 = pts.iter().map(|p| p.x[0] + p.y + p.z).sum();
        let mean = sum / (3.0 * pts.len() as f64);
        assert!(mean.abs() <= 0.02, "mean {mean}");
    }

    #[test]
    fn synthetic_instance_is_reproducible() {
        let p1 = synth_instance(30, 20, 3, 0.1, 11, 0.5, 0.5).unwrap();
        let p2 = synth_instance(30, 20, 3, 0.1, 11, 0.5, 0.5).unwrap();
        assert_eq!(p1.a, p2.a);
        assert_eq!(p1.b, p2.b);
        assert_eq!(p1.t(), 30);
        assert_eq!(p1.n(), 20);
    }

    #[test]
    fn zero_sparsity_leaves_pure_noise() {
        let quiet = synth_instance(25, 10, 0, 0.0, 3, 0.5, 0.5).unwrap();
        assert!(quiet.b.iter().all(|&v| v == 0.0));
        let noisy = synth_instance(25, 10, 0, 0.5, 3, 0.5, 0.5).unwrap();
        assert!(noisy.b.iter().any(|&v| v != 0.0));
        assert!(synth_instance(10, 5, 6, 0.0, 0, 0.5, 0.5).is_err(), "sparsity > n");
    }

    #[test]
    fn derive_seed_separates_streams() {
        let a = derive_seed(0, &[1, 2, 3]);
        let b = derive_seed(0, &[1, 2, 4]);
        let c = derive_seed(1, &[1, 2, 3]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(0, &[1, 2, 3]));
    }

    #[test]
    fn loads_the_bundled_toy_dataset() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy.csv");
        let schema = "segment:categorical,x1:numeric,x2:numeric,y:target";
        let ds = load_dataset(&path, schema, 0.5, 0.5).unwrap();
        // 2 numerics + 3 dummy levels + 6 interactions
        assert_eq!(ds.problem.n(), 11);
        assert_eq!(ds.column_names.len(), 11);
        assert_eq!(ds.target, "y");
        assert_eq!(ds.report.levels.len(), 1);
    }

    #[test]
    fn rejects_bad_schemas_and_mismatched_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "a,b\n1,2\n3,4").unwrap();
        drop(f);
        assert!(parse_schema("a:numeric,b:numeric").is_err(), "no target");
        assert!(parse_schema("a:target,b:target").is_err(), "two targets");
        assert!(parse_schema("a;numeric").is_err(), "bad separator");
        let err = load_dataset(&path, "a:numeric,b:target,c:numeric", 0.5, 0.5);
        assert!(err.is_err(), "schema names a column the file lacks");
        let err = load_dataset(&path, "a:target", 0.5, 0.5);
        assert!(err.is_err(), "file column b is undeclared");
    }
}
