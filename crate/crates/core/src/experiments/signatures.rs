use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::coverage::log_grid;
use super::write_csv;
use crate::distributions::{cosine_error_slices, taylor_mean_cosine_error, DirichletParams, SimplexPoint};
use crate::error::{domain, Result};
use crate::fmt::num;
use crate::seed::{derive_seed, hash_label};
use crate::solver::{mean_method, solve_max_density, ScaleConstraint, SolverConfig};

pub const SBS_TYPES: usize = 96;
pub const ENTRY_FLOOR: f64 = 1e-10;
pub const DEFAULT_MC_SAMPLES: usize = 10_000;

/// The 96 single-base-substitution contexts, e.g. `A[C>A]G`, grouped by
/// substitution, then 5′ base, then 3′ base.
pub fn sbs96_labels() -> Vec<String> {
    const BASES: [char; 4] = ['A', 'C', 'G', 'T'];
    const SUBS: [(char, char); 6] = [('C', 'A'), ('C', 'G'), ('C', 'T'), ('T', 'A'), ('T', 'C'), ('T', 'G')];
    let mut out = Vec::with_capacity(SBS_TYPES);
    for (r, a) in SUBS {
        for five in BASES {
            for three in BASES {
                out.push(format!("{five}[{r}>{a}]{three}"));
            }
        }
    }
    out
}

/// Named 96-entry probability vectors, each strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureCatalog {
    pub names: Vec<String>,
    pub mutation_types: Vec<String>,
    pub vectors: Vec<SimplexPoint>,
}

impl SignatureCatalog {
    /// Floors entries below 1e-10 at 1e-10 and renormalizes each column.
    pub fn from_columns(names: Vec<String>, mutation_types: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(domain("catalog has no signatures"));
        }
        if names.len() != columns.len() {
            return Err(domain(format!("{} names for {} signatures", names.len(), columns.len())));
        }
        let vectors = columns
            .into_iter()
            .zip(&names)
            .map(|(col, name)| {
                if col.len() != mutation_types.len() {
                    return Err(domain(format!("signature {name} has {} entries", col.len())));
                }
                if let Some(bad) = col.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                    return Err(domain(format!("signature {name} has invalid entry {bad}")));
                }
                SimplexPoint::new(col.into_iter().map(|x| x.max(ENTRY_FLOOR)).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { names, mutation_types, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Reads a tab-separated catalog: a header of `Type` then signature names,
/// then 96 rows of a mutation-type label followed by one value per signature.
pub fn load_cosmic<R: Read>(reader: R) -> Result<SignatureCatalog> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(b'\t').has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| domain(format!("reading catalog header: {e}")))?.clone();
    if headers.len() < 2 {
        return Err(domain("catalog header needs a type column and at least one signature"));
    }
    let names: Vec<String> = headers.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let mut columns = vec![Vec::with_capacity(SBS_TYPES); names.len()];
    let mut types = Vec::with_capacity(SBS_TYPES);
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| domain(format!("catalog row {}: {e}", line + 2)))?;
        if record.len() != headers.len() {
            return Err(domain(format!(
                "catalog row {} has {} fields, expected {}",
                line + 2,
                record.len(),
                headers.len()
            )));
        }
        types.push(record[0].trim().to_string());
        for (col, cell) in columns.iter_mut().zip(record.iter().skip(1)) {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| domain(format!("catalog row {}: non-numeric cell {cell:?}", line + 2)))?;
            col.push(v);
        }
    }
    if types.len() != SBS_TYPES {
        return Err(domain(format!("catalog has {} rows, expected {SBS_TYPES}", types.len())));
    }
    SignatureCatalog::from_columns(names, types, columns)
}

pub fn load_cosmic_path(path: &std::path::Path) -> Result<SignatureCatalog> {
    let file = std::fs::File::open(path).map_err(|e| domain(format!("opening {}: {e}", path.display())))?;
    load_cosmic(std::io::BufReader::new(file))
}

/// Writes the catalog in the layout [`load_cosmic`] reads.
pub fn write_catalog<W: Write>(catalog: &SignatureCatalog, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    let res: std::result::Result<(), csv::Error> = (|| {
        let mut header = vec!["Type".to_string()];
        header.extend(catalog.names.iter().cloned());
        wtr.write_record(&header)?;
        for (i, t) in catalog.mutation_types.iter().enumerate() {
            let mut row = vec![t.clone()];
            row.extend(catalog.vectors.iter().map(|v| num(v.as_slice()[i])));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    })();
    res.map_err(|e| domain(format!("writing catalog: {e}")))
}

/// A deterministic stand-in catalog: signature j is a Dirichlet(β_j, …, β_j)
/// draw with β_j log-spaced from 0.02 (a few dominant contexts, COSMIC-like
/// sparsity) to 2 (flat), then floored and renormalized.
pub fn synthetic_catalog(n: usize, seed: u64) -> Result<SignatureCatalog> {
    if n == 0 {
        return Err(domain("need at least one signature"));
    }
    let betas = log_grid(0.02, 2.0, n);
    let columns = betas
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[j as u64]));
            let mut col = vec![0.0; SBS_TYPES];
            DirichletParams::new(vec![beta; SBS_TYPES])?.sample_into(&mut rng, &mut col);
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let names = (1..=n).map(|j| format!("SYN{j}")).collect();
    SignatureCatalog::from_columns(names, sbs96_labels(), columns)
}

/// Which family of Dirichlets to sweep and over what scale grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScaleSweep {
    /// Mean method, a = α c, over concentrations α.
    Mean(Vec<f64>),
    /// Maximum density under E CosErr(X, E X) ≈ κ, over κ.
    MaxDensity(Vec<f64>),
}

impl ScaleSweep {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Mean(_) => "mean",
            Self::MaxDensity(_) => "max-density",
        }
    }

    pub fn grid(&self) -> &[f64] {
        match self {
            Self::Mean(g) | Self::MaxDensity(g) => g,
        }
    }

    /// α from 10^1.5 to 10^5 (8 points).
    pub fn default_mean() -> Self {
        Self::Mean(log_grid(10f64.powf(1.5), 1e5, 8))
    }

    /// κ from 1e-4 to 0.1 (7 points).
    pub fn default_max_density() -> Self {
        Self::MaxDensity(log_grid(1e-4, 0.1, 7))
    }

    fn params(&self, c: &SimplexPoint, value: f64) -> Result<DirichletParams> {
        match self {
            Self::Mean(_) => mean_method(c, value),
            Self::MaxDensity(_) => {
                Ok(solve_max_density(c, ScaleConstraint::MeanCosineError(value), &SolverConfig::default())?.params)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub signature: String,
    pub method: &'static str,
    pub grid_value: f64,
    /// Taylor approximation of the mean cosine error.
    pub taylor: f64,
    /// Monte Carlo estimate of E CosErr(X, E X) and its standard error.
    pub mc_mean: f64,
    pub mc_se: f64,
    /// Solver error for this cell; the numeric fields are NaN when set.
    pub error: Option<String>,
}

fn mc_cosine_error(p: &DirichletParams, samples: usize, seed: u64) -> (f64, f64) {
    let mean = p.mean();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; p.len()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        p.sample_into(&mut rng, &mut x);
        let e = cosine_error_slices(&x, &mean);
        sum += e;
        sum_sq += e * e;
    }
    let n = samples as f64;
    let m = sum / n;
    let var = if samples > 1 { ((sum_sq - n * m * m) / (n - 1.0)).max(0.0) } else { 0.0 };
    (m, (var / n).sqrt())
}

/// Builds the Dirichlet for every (signature, grid value) and estimates its
/// mean cosine error by Monte Carlo. Cells run in parallel with seeds derived
/// from (seed, method, signature index, grid index).
pub fn signature_scale_sweep(
    catalog: &SignatureCatalog,
    sweep: &ScaleSweep,
    mc_samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if catalog.is_empty() {
        return Err(domain("catalog has no signatures"));
    }
    if mc_samples == 0 {
        return Err(domain("mc_samples must be positive"));
    }
    let cells: Vec<(usize, usize)> =
        (0..catalog.len()).flat_map(|s| (0..sweep.grid().len()).map(move |g| (s, g))).collect();
    Ok(cells
        .par_iter()
        .map(|&(s, g)| {
            let value = sweep.grid()[g];
            let signature = catalog.names[s].clone();
            match sweep.params(&catalog.vectors[s], value) {
                Ok(p) => {
                    let cell_seed = derive_seed(seed, &[hash_label(sweep.label()), s as u64, g as u64]);
                    let (mc_mean, mc_se) = mc_cosine_error(&p, mc_samples, cell_seed);
                    SweepRow {
                        signature,
                        method: sweep.label(),
                        grid_value: value,
                        taylor: taylor_mean_cosine_error(&p),
                        mc_mean,
                        mc_se,
                        error: None,
                    }
                }
                Err(e) => SweepRow {
                    signature,
                    method: sweep.label(),
                    grid_value: value,
                    taylor: f64::NAN,
                    mc_mean: f64::NAN,
                    mc_se: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Columns: signature, method, grid_value, taylor, mc_mean, mc_se, error.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    write_csv(
        w,
        &["signature", "method", "grid_value", "taylor", "mc_mean", "mc_se", "error"],
        rows.iter().map(|r| {
            vec![
                r.signature.clone(),
                r.method.to_string(),
                num(r.grid_value),
                num(r.taylor),
                num(r.mc_mean),
                num(r.mc_se),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

/// Cross-signature spread of Monte Carlo mean cosine errors at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub method: &'static str,
    pub grid_value: f64,
    pub average: f64,
    pub q25: f64,
    pub q75: f64,
    pub iqr: f64,
    pub signatures: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let h = (xs.len() - 1) as f64 * p;
    let (i, frac) = (h.floor() as usize, h - h.floor());
    if i + 1 < xs.len() {
        xs[i] + frac * (xs[i + 1] - xs[i])
    } else {
        xs[i]
    }
}

/// One summary per grid value, sorted by the cross-signature average.
/// Failed cells are left out.
pub fn summarize_sweep(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut grid: Vec<(&'static str, f64)> = Vec::new();
    for r in rows {
        if !grid.contains(&(r.method, r.grid_value)) {
            grid.push((r.method, r.grid_value));
        }
    }
    let mut out: Vec<SweepSummary> = grid
        .into_iter()
        .filter_map(|(method, g)| {
            let mut xs: Vec<f64> = rows
                .iter()
                .filter(|r| r.method == method && r.grid_value == g && r.error.is_none())
                .map(|r| r.mc_mean)
                .collect();
            if xs.is_empty() {
                return None;
            }
            xs.sort_by(f64::total_cmp);
            let (q25, q75) = (quantile_sorted(&xs, 0.25), quantile_sorted(&xs, 0.75));
            Some(SweepSummary {
                method,
                grid_value: g,
                average: xs.iter().sum::<f64>() / xs.len() as f64,
                q25,
                q75,
                iqr: q75 - q25,
                signatures: xs.len(),
            })
        })
        .collect();
    out.sort_by(|a, b| a.method.cmp(b.method).then(a.average.total_cmp(&b.average)));
    out
}

/// Columns: method, grid_value, average, q25, q75, iqr, signatures.
pub fn write_summary_csv<W: Write>(rows: &[SweepSummary], w: W) -> Result<()> {
    write_csv(
        w,
        &["method", "grid_value", "average", "q25", "q75", "iqr", "signatures"],
        rows.iter().map(|r| {
            vec![
                r.method.to_string(),
                num(r.grid_value),
                num(r.average),
                num(r.q25),
                num(r.q75),
                num(r.iqr),
                r.signatures.to_string(),
            ]
        }),
    )
}

/// IQRs of two sweeps at a common average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedIqr {
    pub average: f64,
    pub iqr_candidate: f64,
    pub iqr_reference: f64,
}

/// For each candidate grid point whose average lies inside the reference
/// sweep's range, the reference IQR interpolated linearly in ln(average).
pub fn iqr_at_matched_average(candidate: &[SweepSummary], reference: &[SweepSummary]) -> Vec<MatchedIqr> {
    let mut reference = reference.to_vec();
    reference.sort_by(|a, b| a.average.total_cmp(&b.average));
    candidate
        .iter()
        .filter_map(|c| {
            let k = reference.windows(2).position(|w| w[0].average <= c.average && c.average <= w[1].average)?;
            let (lo, hi) = (&reference[k], &reference[k + 1]);
            let t = if hi.average > lo.average {
                (c.average.ln() - lo.average.ln()) / (hi.average.ln() - lo.average.ln())
            } else {
                0.0
            };
            Some(MatchedIqr { average: c.average, iqr_candidate: c.iqr, iqr_reference: lo.iqr + t * (hi.iqr - lo.iqr) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_tsv() -> String {
        let mut s = String::from("Type\tS1\tS2\tS3\n");
        for (i, t) in sbs96_labels().iter().enumerate() {
            let zero = if i == 0 { "0" } else { "0.0104" };
            s.push_str(&format!("{t}\t{zero}\t{}\t0.5e-2\n", 1.0 / 96.0));
        }
        s
    }

    #[test]
    fn labels_are_distinct() {
        let l = sbs96_labels();
        assert_eq!(l.len(), 96);
        assert_eq!(l[0], "A[C>A]A");
        assert_eq!(l[95], "T[T>G]T");
        let mut d = l.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 96);
    }

    #[test]
    fn loads_floors_and_normalizes() {
        let cat = load_cosmic(tiny_tsv().as_bytes()).unwrap();
        assert_eq!(cat.names, ["S1", "S2", "S3"]);
        assert_eq!(cat.mutation_types, sbs96_labels());
        for v in &cat.vectors {
            assert!((v.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.as_slice().iter().all(|&x| x > 0.0));
        }
        assert!(cat.vectors[0].as_slice()[0] < 1e-9);
    }

    #[test]
    fn round_trip() {
        let cat = load_cosmic(tiny_tsv().as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_catalog(&cat, &mut buf).unwrap();
        let again = load_cosmic(buf.as_slice()).unwrap();
        assert_eq!(again.names, cat.names);
        for (a, b) in again.vectors.iter().zip(&cat.vectors) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() <= 1e-14 * y);
            }
        }
    }

    #[test]
    fn malformed_files() {
        assert!(load_cosmic("Type\n".as_bytes()).is_err());
        let short: String = tiny_tsv().lines().take(50).collect::<Vec<_>>().join("\n");
        assert!(load_cosmic(short.as_bytes()).is_err());
        let bad = tiny_tsv().replacen("0.0104", "abc", 1);
        assert!(load_cosmic(bad.as_bytes()).is_err());
        let ragged = tiny_tsv().replacen("\t0.5e-2\n", "\n", 1);
        assert!(load_cosmic(ragged.as_bytes()).is_err());
        let negative = tiny_tsv().replacen("0.0104", "-0.1", 1);
        assert!(load_cosmic(negative.as_bytes()).is_err());
    }

    #[test]
    fn synthetic_catalog_is_deterministic_and_mixed() {
        let a = synthetic_catalog(10, 0).unwrap();
        assert_eq!(a, synthetic_catalog(10, 0).unwrap());
        assert_eq!(a.len(), 10);
        let sq = |v: &SimplexPoint| v.as_slice().iter().map(|x| x * x).sum::<f64>();
        // Sparse signatures carry most mass in few entries; flat ones don't.
        assert!(sq(&a.vectors[0]) > 0.2);
        assert!(sq(&a.vectors[9]) < 0.03);
    }

    #[test]
    fn mean_method_errors_vanish_with_concentration() {
        let cat = synthetic_catalog(3, 1).unwrap();
        let rows = signature_scale_sweep(&cat, &ScaleSweep::Mean(vec![1e2, 1e6]), 200, 0).unwrap();
        for pair in rows.chunks(2) {
            assert!(pair[1].mc_mean < pair[0].mc_mean);
            assert!(pair[1].mc_mean < 1e-4);
        }
    }

    #[test]
    fn max_density_rows_hit_kappa() {
        let cat = synthetic_catalog(3, 2).unwrap();
        let rows = signature_scale_sweep(&cat, &ScaleSweep::MaxDensity(vec![1e-3, 0.03]), 200, 0).unwrap();
        for r in &rows {
            assert!(r.error.is_none(), "{:?}", r.error);
            assert!((r.taylor / r.grid_value - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn quantiles_and_matching() {
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0], 0.75), 1.75);
        let s = |avg: f64, iqr: f64| SweepSummary {
            method: "m",
            grid_value: 0.0,
            average: avg,
            q25: 0.0,
            q75: iqr,
            iqr,
            signatures: 1,
        };
        let reference = [s(1e-3, 1.0), s(1e-1, 3.0)];
        let m = iqr_at_matched_average(&[s(1e-2, 0.5), s(1.0, 0.1)], &reference);
        assert_eq!(m.len(), 1);
        assert!((m[0].iqr_reference - 2.0).abs() < 1e-12);
    }
}
