//! Binary country×product matrix with cached degrees and its text format.
//!
//! The on-disk format is a header line `C P nnz` followed by one 0-based
//! `c p` pair per line. Labels live in two sidecar files, `<path>.countries.csv`
//! and `<path>.products.csv`, each holding `index,label` rows.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Binary export matrix `M` stored both row-major and column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    countries: Vec<String>,
    products: Vec<String>,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl BinaryMatrix {
    /// Builds a matrix from `(country, product)` pairs. Duplicate pairs
    /// collapse to a single entry.
    pub fn from_pairs(
        countries: Vec<String>,
        products: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let (c_count, p_count) = (countries.len(), products.len());
        let mut rows = vec![Vec::new(); c_count];
        let mut cols = vec![Vec::new(); p_count];
        for (c, p) in pairs {
            if c >= c_count || p >= p_count {
                return Err(Error::Validation(format!(
                    "entry ({c}, {p}) outside a {c_count}×{p_count} matrix"
                )));
            }
            rows[c].push(p);
            cols[p].push(c);
        }
        for v in rows.iter_mut().chain(cols.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        Ok(Self {
            countries,
            products,
            rows,
            cols,
        })
    }

    /// Same as [`from_pairs`](Self::from_pairs) with generated labels `c0..`, `p0..`.
    pub fn from_index_pairs(
        c_count: usize,
        p_count: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::from_pairs(
            default_labels("c", c_count),
            default_labels("p", p_count),
            pairs,
        )
    }

    /// Builds a matrix from dense rows; any nonzero cell is an entry.
    ///
    /// Panics if the rows are ragged.
    pub fn from_dense<T: Copy + Default + PartialEq>(dense: &[Vec<T>]) -> Self {
        let c_count = dense.len();
        let p_count = dense.first().map_or(0, Vec::len);
        assert!(
            dense.iter().all(|r| r.len() == p_count),
            "ragged dense matrix"
        );
        let zero = T::default();
        let pairs = dense.iter().enumerate().flat_map(|(c, row)| {
            row.iter()
                .enumerate()
                .filter(move |(_, &v)| v != zero)
                .map(move |(p, _)| (c, p))
        });
        Self::from_index_pairs(c_count, p_count, pairs).expect("indices are in range")
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.countries.len(), self.products.len())
    }

    pub fn n_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn n_products(&self) -> usize {
        self.products.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn products(&self) -> &[String] {
        &self.products
    }

    /// Sorted product indices exported by country `c`.
    pub fn row(&self, c: usize) -> &[usize] {
        &self.rows[c]
    }

    /// Sorted country indices exporting product `p`.
    pub fn col(&self, p: usize) -> &[usize] {
        &self.cols[p]
    }

    pub fn get(&self, c: usize, p: usize) -> bool {
        self.rows[c].binary_search(&p).is_ok()
    }

    /// Diversification `D_c`, the row sum.
    pub fn diversification(&self, c: usize) -> usize {
        self.rows[c].len()
    }

    /// Ubiquity `U_p`, the column sum.
    pub fn ubiquity(&self, p: usize) -> usize {
        self.cols[p].len()
    }

    pub fn diversifications(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn ubiquities(&self) -> Vec<usize> {
        self.cols.iter().map(Vec::len).collect()
    }

    /// Iterates entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(c, r)| r.iter().map(move |&p| (c, p)))
    }

    /// Mean entry `⟨M⟩ = nnz / (C·P)`.
    pub fn density(&self) -> f64 {
        let (c, p) = self.shape();
        if c == 0 || p == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (c as f64 * p as f64)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n_products()]; self.n_countries()];
        for (c, p) in self.entries() {
            out[c][p] = 1;
        }
        out
    }

    /// Element-wise complement `1 - M`.
    pub fn complement(&self) -> Self {
        let pairs: Vec<_> = (0..self.n_countries())
            .flat_map(|c| {
                let row = &self.rows[c];
                (0..self.n_products())
                    .filter(move |p| row.binary_search(p).is_err())
                    .map(move |p| (c, p))
            })
            .collect();
        Self::from_pairs(self.countries.clone(), self.products.clone(), pairs)
            .expect("complement stays in range")
    }

    /// Drops empty rows and columns. Returns the pruned matrix together with
    /// the original indices of the kept countries and products.
    pub fn prune_empty(&self) -> (Self, Vec<usize>, Vec<usize>) {
        let kept_c: Vec<usize> = (0..self.n_countries())
            .filter(|&c| !self.rows[c].is_empty())
            .collect();
        let kept_p: Vec<usize> = (0..self.n_products())
            .filter(|&p| !self.cols[p].is_empty())
            .collect();
        let mut new_p = vec![usize::MAX; self.n_products()];
        for (i, &p) in kept_p.iter().enumerate() {
            new_p[p] = i;
        }
        let pairs = kept_c
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| self.rows[c].iter().map(move |&p| (i, p)))
            .map(|(i, p)| (i, new_p[p]))
            .collect::<Vec<_>>();
        let m = Self::from_pairs(
            kept_c.iter().map(|&c| self.countries[c].clone()).collect(),
            kept_p.iter().map(|&p| self.products[p].clone()).collect(),
            pairs,
        )
        .expect("pruned indices stay in range");
        (m, kept_c, kept_p)
    }

    /// Drops products nobody exports, keeping every country. Returns the
    /// original indices of the kept products.
    pub fn drop_empty_products(&self) -> (Self, Vec<usize>) {
        let kept_p: Vec<usize> = (0..self.n_products())
            .filter(|&p| !self.cols[p].is_empty())
            .collect();
        let mut new_p = vec![usize::MAX; self.n_products()];
        for (i, &p) in kept_p.iter().enumerate() {
            new_p[p] = i;
        }
        let pairs: Vec<_> = self.entries().map(|(c, p)| (c, new_p[p])).collect();
        let m = Self::from_pairs(
            self.countries.clone(),
            kept_p.iter().map(|&p| self.products[p].clone()).collect(),
            pairs,
        )
        .expect("kept indices stay in range");
        (m, kept_p)
    }

    /// Writes the matrix file plus the two label sidecars.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut body = String::new();
        let (c, p) = self.shape();
        writeln!(body, "{c} {p} {}", self.nnz()).unwrap();
        for (c, p) in self.entries() {
            writeln!(body, "{c} {p}").unwrap();
        }
        fs::write(path, body)?;
        write_labels(&label_path(path, "countries"), &self.countries)?;
        write_labels(&label_path(path, "products"), &self.products)?;
        Ok(())
    }

    /// Reads a matrix file. Missing sidecars fall back to generated labels.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i as u64 + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `C P nnz` header"))?;
        let dims = parse_ints(hline, header, 3)?;
        let (c_count, p_count, nnz) = (dims[0], dims[1], dims[2]);
        let mut pairs = Vec::with_capacity(nnz);
        for (line, l) in lines {
            let v = parse_ints(line, l, 2)?;
            if v[0] >= c_count || v[1] >= p_count {
                return Err(Error::parse(
                    line,
                    format!("entry ({}, {}) outside declared shape", v[0], v[1]),
                ));
            }
            pairs.push((v[0], v[1]));
        }
        if pairs.len() != nnz {
            return Err(Error::Validation(format!(
                "header declares {nnz} entries, found {}",
                pairs.len()
            )));
        }
        let countries = read_labels(&label_path(path, "countries"), c_count, "c")?;
        let products = read_labels(&label_path(path, "products"), p_count, "p")?;
        Self::from_pairs(countries, products, pairs)
    }
}

fn parse_ints(line: u64, text: &str, n: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = text
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(line, format!("expected integers: {e}")))?;
    if v.len() != n {
        return Err(Error::parse(
            line,
            format!("expected {n} fields, found {}", v.len()),
        ));
    }
    Ok(v)
}

/// Sidecar label path for `axis` ("countries" or "products").
pub fn label_path(path: &Path, axis: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(format!(".{axis}.csv"));
    PathBuf::from(s)
}

fn write_labels(path: &Path, labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "label"]).map_err(csv_err)?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([i.to_string().as_str(), l])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_labels(path: &Path, n: usize, prefix: &str) -> Result<Vec<String>> {
    if !path.exists() {
        return Ok(default_labels(prefix, n));
    }
    let mut labels = vec![None; n];
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let idx: usize = rec
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(line, "bad label index"))?;
        let label = rec
            .get(1)
            .ok_or_else(|| Error::parse(line, "missing label"))?;
        if idx >= n {
            return Err(Error::parse(
                line,
                format!("label index {idx} out of range"),
            ));
        }
        labels[idx] = Some(label.to_string());
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| {
                Error::Validation(format!("{}: no label for index {i}", path.display()))
            })
        })
        .collect()
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_are_consistent() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1, 1], vec![1, 0, 0]]);
        assert_eq!(m.diversifications(), vec![3, 1]);
        assert_eq!(m.ubiquities(), vec![2, 1, 1]);
        assert_eq!(m.nnz(), 4);
        assert!(m.get(0, 2) && !m.get(1, 2));
    }

    #[test]
    fn out_of_range_pair_rejected() {
        assert!(BinaryMatrix::from_index_pairs(2, 2, [(2, 0)]).is_err());
    }

    #[test]
    fn complement_is_exact() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0, 1], vec![0, 0, 1]]);
        let k = m.complement();
        assert_eq!(k.to_dense(), vec![vec![0, 1, 0], vec![1, 1, 0]]);
        assert_eq!(k.complement(), m);
    }

    #[test]
    fn prune_drops_empty_axes() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0, 1], vec![0, 0, 0], vec![0, 0, 1]]);
        let (pm, kc, kp) = m.prune_empty();
        assert_eq!(kc, vec![0, 2]);
        assert_eq!(kp, vec![0, 2]);
        assert_eq!(pm.to_dense(), vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(pm.countries(), &["c0".to_string(), "c2".to_string()]);
    }

    #[test]
    fn file_round_trip_with_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mtx");
        let m = BinaryMatrix::from_pairs(
            vec!["AFG".into(), "ITA".into()],
            vec!["010110".into(), "0202, x".into(), "0303".into()],
            [(0, 0), (1, 1), (1, 2)],
        )
        .unwrap();
        m.write(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 3 3\n0 0\n1 1\n1 2\n"));
        assert_eq!(BinaryMatrix::read(&path).unwrap(), m);
    }

    #[test]
    fn nnz_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mtx");
        fs::write(&path, "2 2 3\n0 0\n1 1\n").unwrap();
        assert!(matches!(
            BinaryMatrix::read(&path),
            Err(Error::Validation(_))
        ));
        fs::write(&path, "2 2 1\n0 x\n").unwrap();
        assert!(matches!(
            BinaryMatrix::read(&path),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
