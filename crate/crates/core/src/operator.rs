//! The graph Laplacian as an operator and as a banded matrix, with its
//! quadratic energy form.
//!
//! On a window `w` the Laplacian can be closed off in two ways.  The
//! *induced* mode is the Laplacian of the induced subgraph: its diagonal
//! counts only in-window edges, every row sums to zero, and the matrix is the
//! generator of the window's own network.  The *compressed* mode keeps the
//! full-graph weighted degree on the diagonal, i.e. it is `P Delta P` for the
//! coordinate projection `P` onto the window; boundary rows then carry a
//! positive surplus equal to the crossing conductance.  The two matrices
//! differ exactly by that diagonal surplus on boundary vertices.

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{LapnetError, Result};
use crate::graph::WindowedGraph;
use crate::util::float17;

/// How to close a windowed Laplacian at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Laplacian of the induced subgraph (in-window degrees).
    Induced,
    /// Compression `P Delta P` (full-graph degrees).
    Compressed,
}

impl BoundaryMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryMode::Induced => "induced",
            BoundaryMode::Compressed => "compressed",
        }
    }
}

/// A function on the vertices of a materialized window, stored densely in the
/// window's vertex order.  Values are complex; most construction paths fill
/// in real data.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexField {
    values: Vec<Complex64>,
}

impl VertexField {
    pub fn zeros(n: usize) -> Self {
        VertexField {
            values: vec![Complex64::default(); n],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        VertexField {
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_complex(values: Vec<Complex64>) -> Self {
        VertexField { values }
    }

    /// Indicator of a single vertex index.
    pub fn dirac(n: usize, i: usize) -> Self {
        let mut f = VertexField::zeros(n);
        f.values[i] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, z: Complex64) {
        self.values[i] = z;
    }

    /// Indices carrying a nonzero value.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::default())
            .map(|(i, _)| i)
            .collect()
    }

    /// l2 norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &VertexField) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// True when every value has exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(LapnetError::Domain(
                "field has nonzero imaginary part".into(),
            ));
        }
        Ok(self.values.iter().map(|z| z.re).collect())
    }

    pub fn add_scaled(&mut self, c: Complex64, other: &VertexField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.values {
            *a *= c;
        }
    }
}

/// A sparse square matrix stored by rows, with its bandwidth (the largest
/// `|row - col|` over stored entries) tracked for dump headers and cost
/// estimates.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
    bandwidth: usize,
}

impl BandedMatrix {
    /// Builds from per-row `(col, value)` lists; entries are sorted and
    /// exact zeros dropped.
    pub fn from_rows(n: usize, mut rows: Vec<Vec<(usize, Complex64)>>) -> Result<Self> {
        if rows.len() != n {
            return Err(LapnetError::Internal(format!(
                "{} rows for size {n}",
                rows.len()
            )));
        }
        let mut bandwidth = 0usize;
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|&(_, z)| z != Complex64::default());
            row.sort_by_key(|&(j, _)| j);
            for &(j, _) in row.iter() {
                if j >= n {
                    return Err(LapnetError::Internal(format!(
                        "entry ({i},{j}) outside size {n}"
                    )));
                }
                bandwidth = bandwidth.max(i.abs_diff(j));
            }
        }
        Ok(BandedMatrix { n, rows, bandwidth })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .iter()
            .find(|&&(c, _)| c == j)
            .map(|&(_, z)| z)
            .unwrap_or_default()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "vector length mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    pub fn apply_field(&self, v: &VertexField) -> VertexField {
        VertexField::from_complex(self.apply(v.values()))
    }

    /// True when every entry has exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().all(|&(_, z)| z.im == 0.0))
    }

    /// Maximum deviation from Hermitian symmetry, `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for &(j, a) in &self.rows[i] {
                d = d.max((a - self.entry(j, i).conj()).norm());
            }
        }
        d
    }

    /// Dense real form; errors when entries are complex.
    pub fn to_dense_real(&self) -> Result<Array2<f64>> {
        if !self.is_real() {
            return Err(LapnetError::NotSymmetric(
                "matrix has complex entries".into(),
            ));
        }
        let mut a = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for &(j, z) in &self.rows[i] {
                a[[i, j]] = z.re;
            }
        }
        Ok(a)
    }

    /// `self - z I`.
    pub fn shifted(&self, z: Complex64) -> BandedMatrix {
        let mut rows = self.rows.clone();
        for (i, row) in rows.iter_mut().enumerate() {
            match row.iter_mut().find(|(j, _)| *j == i) {
                Some((_, v)) => *v -= z,
                None => {
                    row.push((i, -z));
                    row.sort_by_key(|&(j, _)| j);
                }
            }
        }
        BandedMatrix {
            n: self.n,
            rows,
            bandwidth: self.bandwidth,
        }
    }

    /// Gershgorin bracket of the spectrum: `(min_i, max_i)` of
    /// `diag_i -+ sum |offdiag_i|`.  Requires real entries.
    pub fn gershgorin_bounds(&self) -> Result<(f64, f64)> {
        if !self.is_real() {
            return Err(LapnetError::NotSymmetric(
                "matrix has complex entries".into(),
            ));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut d = 0.0;
            let mut r = 0.0;
            for &(j, z) in &self.rows[i] {
                if j == i {
                    d = z.re;
                } else {
                    r += z.norm();
                }
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        Ok((lo, hi))
    }
}

/// Result of applying the windowed Laplacian.
#[derive(Clone, Debug)]
pub struct ApplyOutcome {
    pub field: VertexField,
    /// Set when the input has support on a vertex with a crossing edge.  The
    /// zero-extension of the input then has nonzero image *outside* the
    /// window, which this windowed result cannot represent.
    pub boundary_contact: bool,
}

/// Weighted degree of a vertex in the ambient graph: the sum of the
/// conductances of its incident edges.
pub fn weighted_degree(
    graph: &crate::graph::GraphSystem,
    x: &crate::graph::Vertex,
) -> Result<f64> {
    Ok(graph.neighbors(x)?.into_iter().map(|(_, c)| c).sum())
}

/// Applies the windowed Laplacian to a field in the given boundary mode.
pub fn apply_laplacian(
    w: &WindowedGraph,
    v: &VertexField,
    mode: BoundaryMode,
) -> Result<ApplyOutcome> {
    if v.len() != w.len() {
        return Err(LapnetError::Domain(format!(
            "field length {} does not match window size {}",
            v.len(),
            w.len()
        )));
    }
    let n = w.len();
    let mut out = VertexField::zeros(n);
    for i in 0..n {
        let deg = match mode {
            BoundaryMode::Induced => w.degree_induced(i),
            BoundaryMode::Compressed => w.degree_full(i),
        };
        let mut acc = v.get(i) * deg;
        for &(j, c) in w.adj(i) {
            acc -= v.get(j) * c;
        }
        out.set(i, acc);
    }
    let boundary_contact = w
        .crossing()
        .iter()
        .any(|&(i, _, _)| v.get(i) != Complex64::default());
    Ok(ApplyOutcome {
        field: out,
        boundary_contact,
    })
}

/// Assembles the windowed Laplacian as a banded matrix.
pub fn assemble_matrix(w: &WindowedGraph, mode: BoundaryMode) -> Result<BandedMatrix> {
    let n = w.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let deg = match mode {
            BoundaryMode::Induced => w.degree_induced(i),
            BoundaryMode::Compressed => w.degree_full(i),
        };
        let mut row: Vec<(usize, Complex64)> = vec![(i, Complex64::new(deg, 0.0))];
        for &(j, c) in w.adj(i) {
            row.push((j, Complex64::new(-c, 0.0)));
        }
        rows.push(row);
    }
    BandedMatrix::from_rows(n, rows)
}

/// Energy of a field over the window's internal edges.
#[derive(Clone, Debug)]
pub struct EnergyOutcome {
    /// `sum over ordered adjacent in-window pairs of c(xy) |v(x)-v(y)|^2`;
    /// each unordered edge therefore contributes twice.
    pub value: f64,
    /// Crossing edges touching the support of `v`, whose contribution is not
    /// included in `value`.
    pub crossing_excluded: usize,
}

/// Quadratic energy form of a field on a window.
///
/// Satisfies `energy = 2 * Re <v, L_ind v>` for the induced-mode Laplacian.
pub fn energy(w: &WindowedGraph, v: &VertexField) -> Result<EnergyOutcome> {
    if v.len() != w.len() {
        return Err(LapnetError::Domain(format!(
            "field length {} does not match window size {}",
            v.len(),
            w.len()
        )));
    }
    let mut value = 0.0;
    for (i, j, c) in w.edges() {
        let d = v.get(i) - v.get(j);
        value += 2.0 * c * d.norm_sqr();
    }
    let crossing_excluded = w
        .crossing()
        .iter()
        .filter(|&&(i, _, _)| v.get(i) != Complex64::default())
        .count();
    Ok(EnergyOutcome {
        value,
        crossing_excluded,
    })
}

/// Polarized energy form, conjugate-linear in `u`:
/// `sum over ordered pairs of c(xy) conj(u(x)-u(y)) (v(x)-v(y))`.
pub fn energy_bilinear(w: &WindowedGraph, u: &VertexField, v: &VertexField) -> Result<Complex64> {
    if u.len() != w.len() || v.len() != w.len() {
        return Err(LapnetError::Domain(
            "field length does not match window size".into(),
        ));
    }
    let mut acc = Complex64::default();
    for (i, j, c) in w.edges() {
        let du = u.get(i) - u.get(j);
        let dv = v.get(i) - v.get(j);
        acc += 2.0 * c * du.conj() * dv;
    }
    Ok(acc)
}

/// Maximum absolute row sum of the windowed Laplacian over the rows that
/// must vanish: all rows in induced mode, interior rows in compressed mode
/// (compressed boundary rows structurally carry the crossing conductance).
/// A nonzero result is pure floating-point round-off.
pub fn row_sum_check(w: &WindowedGraph, mode: BoundaryMode) -> Result<f64> {
    let m = assemble_matrix(w, mode)?;
    let mut worst = 0.0f64;
    for i in 0..m.n() {
        if mode == BoundaryMode::Compressed && w.is_boundary(i) {
            continue;
        }
        let s: Complex64 = m.row(i).iter().map(|&(_, z)| z).sum();
        worst = worst.max(s.norm());
    }
    Ok(worst)
}

/// Writes a matrix as `row,col,value` CSV, sorted by `(row, col)`, preceded
/// by a `#` header recording the provenance and a column-name line.  Only
/// real matrices are dumped; values carry 17 significant digits.
pub fn dump_matrix_csv<W: Write>(
    m: &BandedMatrix,
    graph_desc: &str,
    window_desc: &str,
    mode: BoundaryMode,
    out: &mut W,
) -> Result<()> {
    if !m.is_real() {
        return Err(LapnetError::NotSymmetric(
            "matrix dump supports real matrices only".into(),
        ));
    }
    writeln!(
        out,
        "# lapnet-matrix-v1 graph={} window={} boundary={} n={} bandwidth={}",
        graph_desc,
        window_desc,
        mode.as_str(),
        m.n(),
        m.bandwidth()
    )?;
    writeln!(out, "row,col,value")?;
    for i in 0..m.n() {
        for &(j, z) in m.row(i) {
            writeln!(out, "{i},{j},{}", float17(z.re))?;
        }
    }
    Ok(())
}
