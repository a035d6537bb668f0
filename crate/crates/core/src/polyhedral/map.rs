//! Affine maps and maps that are affine on each maximal cell of a complex.

use num_traits::Zero;

use super::cell::Cell;
use super::complex::WeightedComplex;
use crate::arith::linalg::{coordinate_chart, mat_vec, rank};
use crate::arith::rat::{add, fmt_vec, is_integral, sub, unit_vec, zero_vec, QVec, Rat};
use crate::error::{Error, Result};

/// `x -> matrix * x + translation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: Vec<QVec>,
    pub translation: QVec,
    source_dim: usize,
}

impl AffineMap {
    pub fn new(source_dim: usize, matrix: Vec<QVec>, translation: QVec) -> Result<Self> {
        if matrix.len() != translation.len() || matrix.iter().any(|r| r.len() != source_dim) {
            return Err(Error::Dimension("affine map matrix and translation do not fit".into()));
        }
        Ok(AffineMap { matrix, translation, source_dim })
    }

    pub fn linear(source_dim: usize, matrix: Vec<QVec>) -> Result<Self> {
        let t = zero_vec(matrix.len());
        AffineMap::new(source_dim, matrix, t)
    }

    pub fn from_ints(source_dim: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.iter().map(|r| crate::arith::rat::int_vec(r)).collect();
        AffineMap::linear(source_dim, m)
    }

    pub fn identity(n: usize) -> Self {
        AffineMap { matrix: (0..n).map(|i| unit_vec(n, i)).collect(), translation: zero_vec(n), source_dim: n }
    }

    /// Keeps the listed coordinates, in order.
    pub fn projection(n: usize, coords: &[usize]) -> Self {
        AffineMap { matrix: coords.iter().map(|&c| unit_vec(n, c)).collect(), translation: zero_vec(coords.len()), source_dim: n }
    }

    pub fn constant(source_dim: usize, value: QVec) -> Self {
        AffineMap { matrix: vec![zero_vec(source_dim); value.len()], translation: value, source_dim }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[Rat]) -> QVec {
        add(&mat_vec(&self.matrix, x), &self.translation)
    }

    pub fn apply_linear(&self, v: &[Rat]) -> QVec {
        mat_vec(&self.matrix, v)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let n = inner.source_dim;
        let cols: Vec<QVec> =
            (0..n).map(|j| self.apply_linear(&inner.matrix.iter().map(|r| r[j].clone()).collect::<QVec>())).collect();
        let matrix = (0..self.target_dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        AffineMap { matrix, translation: self.apply(&inner.translation), source_dim: n }
    }

    /// Product map `(x, y) -> (self(x), other(y))`.
    pub fn product(&self, other: &AffineMap) -> AffineMap {
        let n = self.source_dim + other.source_dim;
        let mut matrix = Vec::new();
        for r in &self.matrix {
            let mut row = r.clone();
            row.extend(zero_vec(other.source_dim));
            matrix.push(row);
        }
        for r in &other.matrix {
            let mut row = zero_vec(self.source_dim);
            row.extend(r.iter().cloned());
            matrix.push(row);
        }
        let mut t = self.translation.clone();
        t.extend(other.translation.iter().cloned());
        AffineMap { matrix, translation: t, source_dim: n }
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.iter().all(|r| is_integral(r)) && is_integral(&self.translation)
    }

    /// Whether the linear part maps the lattice with the given basis into integer points.
    pub fn is_integral_on(&self, lattice: &[QVec]) -> bool {
        lattice.iter().all(|v| is_integral(&self.apply_linear(v)))
    }

    pub fn rank_on(&self, dirs: &[QVec]) -> usize {
        let imgs: Vec<QVec> = dirs.iter().map(|d| self.apply_linear(d)).collect();
        rank(&imgs, self.target_dim())
    }

    /// Agreement on a cell (checked at its vertices and along its direction space).
    pub fn agrees_on(&self, other: &AffineMap, cell: &Cell) -> bool {
        cell.vertices().iter().all(|v| self.apply(v) == other.apply(v))
            && cell.direction_basis().iter().all(|d| self.apply_linear(d) == other.apply_linear(d))
    }

    /// The affine map defined on `span(dirs)` through `base` by prescribed images of a basis
    /// of directions, extended by zero on a complementary set of coordinates.
    pub fn from_values(n: usize, base: &[Rat], base_image: &[Rat], dirs: &[QVec], images: &[QVec]) -> AffineMap {
        let m = base_image.len();
        let (idx, inv) = coordinate_chart(dirs, n);
        let mut matrix = vec![zero_vec(n); m];
        // For x in span(dirs): coefficients y = inv * x[idx], image = sum y_k images_k.
        for i in 0..m {
            for (c, &j) in idx.iter().enumerate() {
                // Coefficient of x_j in (image)_i = sum_k images_k[i] * inv[k][c].
                let mut s = Rat::zero();
                for (k, img) in images.iter().enumerate() {
                    s += &img[i] * &inv[k][c];
                }
                matrix[i][j] = s;
            }
        }
        let lin_base = mat_vec(&matrix, base);
        let translation = sub(base_image, &lin_base);
        AffineMap { matrix, translation, source_dim: n }
    }

    pub fn describe(&self) -> String {
        let rows: Vec<String> = self.matrix.iter().map(|r| fmt_vec(r)).collect();
        format!("[{}] + {}", rows.join(", "), fmt_vec(&self.translation))
    }
}

/// A map whose restriction to each maximal cell of `source` is affine.
#[derive(Clone, Debug)]
pub struct PLMap {
    pub source: WeightedComplex,
    pub target_dim: usize,
    pub pieces: Vec<AffineMap>,
}

impl PLMap {
    pub fn new(source: WeightedComplex, target_dim: usize, pieces: Vec<AffineMap>) -> Result<Self> {
        if pieces.len() != source.num_cells() {
            return Err(Error::Invalid(format!("{} affine pieces for {} maximal cells", pieces.len(), source.num_cells())));
        }
        if pieces.iter().any(|p| p.source_dim() != source.ambient_dim() || p.target_dim() != target_dim) {
            return Err(Error::Dimension("affine piece does not match the source or target".into()));
        }
        Ok(PLMap { source, target_dim, pieces })
    }

    /// The same affine map on every cell.
    pub fn global(source: WeightedComplex, map: AffineMap) -> Result<Self> {
        let t = map.target_dim();
        let pieces = vec![map; source.num_cells()];
        PLMap::new(source, t, pieces)
    }

    pub fn eval(&self, x: &[Rat]) -> Result<QVec> {
        let cell = self.source.cells().iter().position(|c| c.contains(x)).ok_or_else(|| Error::NotInSupport(fmt_vec(x)))?;
        Ok(self.pieces[cell].apply(x))
    }

    pub fn is_global(&self) -> Option<&AffineMap> {
        let first = self.pieces.first()?;
        if self.pieces.iter().all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Adjacent pieces agree on shared codimension-one faces.
    pub fn is_continuous(&self) -> bool {
        let co = self.source.codim_one();
        co.faces
            .iter()
            .zip(&co.adjacent)
            .all(|(f, adj)| adj.windows(2).all(|w| self.pieces[w[0]].agrees_on(&self.pieces[w[1]], f)))
    }

    /// Same cells, and the pieces agree on each cell.
    pub fn agrees_with(&self, other: &PLMap) -> bool {
        self.target_dim == other.target_dim
            && self.source.cells() == other.source.cells()
            && self.source.cells().iter().zip(self.pieces.iter().zip(&other.pieces)).all(|(c, (a, b))| a.agrees_on(b, c))
    }

    /// Integral on every cell lattice.
    pub fn is_integral(&self) -> bool {
        self.source.cells().iter().zip(&self.pieces).all(|(c, p)| p.is_integral_on(c.lattice()))
    }

    /// Restricts the map to the cells of a refinement of its source.
    pub fn on_refinement(&self, refined: &WeightedComplex) -> Result<PLMap> {
        let pieces = refined
            .cells()
            .iter()
            .map(|c| {
                let i = self
                    .source
                    .cells()
                    .iter()
                    .position(|s| s.contains_cell(c))
                    .ok_or_else(|| Error::Invalid("the complex is not a refinement of the source".into()))?;
                Ok(self.pieces[i].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        PLMap::new(refined.clone(), self.target_dim, pieces)
    }
}
