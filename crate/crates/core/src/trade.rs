//! Export volumes, revealed comparative advantage and binarisation.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{csv_err, BinaryMatrix};

/// Delimiter flavour of a `country,product,value` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Tsv,
}

impl TableFormat {
    /// Picks TSV for `.tsv`/`.tab` extensions, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("tab") => TableFormat::Tsv,
            _ => TableFormat::Csv,
        }
    }

    fn delimiter(self) -> u8 {
        match self {
            TableFormat::Csv => b',',
            TableFormat::Tsv => b'\t',
        }
    }
}

/// Label registry preserving first-appearance order.
#[derive(Debug, Clone, Default)]
struct Registry {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Registry {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }
}

/// Sparse country×product export volumes `s_cp`. Only strictly positive
/// volumes are stored; labels seen with zero volume stay in the registries.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportTable {
    countries: Vec<String>,
    products: Vec<String>,
    volumes: BTreeMap<(usize, usize), f64>,
}

impl ExportTable {
    /// Builds a table from `(country, product, volume)` records. Duplicate
    /// pairs are summed.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = (&'a str, &'a str, f64)>,
    ) -> Result<Self> {
        let mut b = TableBuilder::default();
        for (c, p, v) in records {
            b.push(c, p, v).map_err(Error::Validation)?;
        }
        Ok(b.finish())
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn products(&self) -> &[String] {
        &self.products
    }

    pub fn volume(&self, c: usize, p: usize) -> f64 {
        self.volumes.get(&(c, p)).copied().unwrap_or(0.0)
    }

    /// Stored `((c, p), s_cp)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.volumes.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }

    /// Multiplies every volume by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            countries: self.countries.clone(),
            products: self.products.clone(),
            volumes: self.volumes.iter().map(|(&key, &v)| (key, v * k)).collect(),
        }
    }

    pub fn row_totals(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.countries.len()];
        for (&(c, _), &v) in &self.volumes {
            t[c] += v;
        }
        t
    }

    pub fn column_totals(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.products.len()];
        for (&(_, p), &v) in &self.volumes {
            t[p] += v;
        }
        t
    }

    pub fn total(&self) -> f64 {
        self.volumes.values().sum()
    }
}

#[derive(Default)]
struct TableBuilder {
    countries: Registry,
    products: Registry,
    volumes: BTreeMap<(usize, usize), f64>,
}

impl TableBuilder {
    fn push(
        &mut self,
        country: &str,
        product: &str,
        value: f64,
    ) -> std::result::Result<(), String> {
        if !value.is_finite() {
            return Err(format!(
                "non-finite value {value} for ({country}, {product})"
            ));
        }
        if value < 0.0 {
            return Err(format!("negative value {value} for ({country}, {product})"));
        }
        let c = self.countries.intern(country);
        let p = self.products.intern(product);
        if value > 0.0 {
            *self.volumes.entry((c, p)).or_insert(0.0) += value;
        }
        Ok(())
    }

    fn finish(self) -> ExportTable {
        ExportTable {
            countries: self.countries.labels,
            products: self.products.labels,
            volumes: self.volumes,
        }
    }
}

/// Reads a `country,product,<value_column>` table. Lines starting with `#`
/// are skipped.
fn read_triples(path: &Path, format: TableFormat, value_column: &str) -> Result<TableBuilder> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let expected = ["country", "product", value_column];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        let line = headers.position().map_or(1, |p| p.line());
        return Err(Error::parse(
            line,
            format!("expected header `country,product,{value_column}`"),
        ));
    }
    let mut b = TableBuilder::default();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected 3 fields, found {}", rec.len()),
            ));
        }
        let value: f64 = rec[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid number `{}`", &rec[2])))?;
        b.push(&rec[0], &rec[1], value)
            .map_err(|m| Error::Validation(format!("line {line}: {m}")))?;
    }
    Ok(b)
}

/// Loads an export-volume table from disk.
pub fn load_export_table(path: &Path, format: TableFormat) -> Result<ExportTable> {
    let table = read_triples(path, format, "value")?.finish();
    if table.is_empty() {
        return Err(Error::Validation("no volumes".into()));
    }
    Ok(table)
}

/// Revealed comparative advantage per `(country, product)`; zero wherever
/// the source volume is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaTable {
    countries: Vec<String>,
    products: Vec<String>,
    values: BTreeMap<(usize, usize), f64>,
}

impl RcaTable {
    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn products(&self) -> &[String] {
        &self.products
    }

    pub fn get(&self, c: usize, p: usize) -> f64 {
        self.values.get(&(c, p)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    /// Builds a table directly from dense values. Zeros are not stored.
    pub fn from_dense(values: &[Vec<f64>]) -> Self {
        let c_count = values.len();
        let p_count = values.first().map_or(0, Vec::len);
        let values = values
            .iter()
            .enumerate()
            .flat_map(|(c, row)| row.iter().enumerate().map(move |(p, &v)| ((c, p), v)))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        Self {
            countries: (0..c_count).map(|i| format!("c{i}")).collect(),
            products: (0..p_count).map(|i| format!("p{i}")).collect(),
            values,
        }
    }

    /// Writes `country,product,rca` rows. Labels without any nonzero entry
    /// get a single zero row so the registries survive a round trip.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["country", "product", "rca"])
            .map_err(csv_err)?;
        let mut seen_c = vec![false; self.countries.len()];
        let mut seen_p = vec![false; self.products.len()];
        for (&(c, p), v) in &self.values {
            seen_c[c] = true;
            seen_p[p] = true;
            w.write_record([&self.countries[c], &self.products[p], &v.to_string()])
                .map_err(csv_err)?;
        }
        // placeholder zero rows keep otherwise-empty labels registered
        if !self.products.is_empty() {
            for c in (0..self.countries.len()).filter(|&c| !seen_c[c]) {
                w.write_record([&self.countries[c], &self.products[0], "0"])
                    .map_err(csv_err)?;
            }
        }
        if !self.countries.is_empty() {
            for p in (0..self.products.len()).filter(|&p| !seen_p[p]) {
                w.write_record([&self.countries[0], &self.products[p], "0"])
                    .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv).
    pub fn read_csv(path: &Path, format: TableFormat) -> Result<Self> {
        let t = read_triples(path, format, "rca")?.finish();
        if t.countries.is_empty() {
            return Err(Error::Validation("no rows".into()));
        }
        Ok(Self {
            countries: t.countries,
            products: t.products,
            values: t.volumes,
        })
    }
}

/// Revealed comparative advantage
/// `RCA_cp = (s_cp / Σ_c' s_c'p) / (Σ_p' s_cp' / Σ_c'p' s_c'p')`.
pub fn compute_rca(table: &ExportTable) -> Result<RcaTable> {
    let total = table.total();
    if table.is_empty() || total <= 0.0 {
        return Err(Error::Domain("no volumes".into()));
    }
    let rows = table.row_totals();
    let cols = table.column_totals();
    let values = table
        .entries()
        .map(|((c, p), s)| ((c, p), (s / cols[p]) / (rows[c] / total)))
        .collect();
    Ok(RcaTable {
        countries: table.countries.clone(),
        products: table.products.clone(),
        values,
    })
}

/// `M_cp = 1` iff `RCA_cp >= threshold`.
pub fn binarize(rca: &RcaTable, threshold: f64) -> Result<BinaryMatrix> {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::Config(format!(
            "threshold must be positive and finite, got {threshold}"
        )));
    }
    let pairs = rca
        .values
        .iter()
        .filter(|&(_, &v)| v >= threshold)
        .map(|(&k, _)| k);
    BinaryMatrix::from_pairs(rca.countries.clone(), rca.products.clone(), pairs)
}
