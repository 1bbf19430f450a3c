use crate::scalar::{FieldCtx, Scalar};
use std::fmt;
use std::sync::Arc;

/// Dense row-major matrix over a shared field context.  All elimination
/// routines pivot on the leftmost nonzero column and scan rows top down, so
/// equal inputs produce bit-identical outputs.
#[derive(Clone)]
pub struct Matrix {
    ctx: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Matrix {}

impl Matrix {
    pub fn zero(ctx: &Arc<FieldCtx>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ctx: ctx.clone(),
            rows,
            cols,
            data: vec![Scalar::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> Matrix {
        let mut m = Matrix::zero(ctx, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(ctx));
        }
        m
    }

    pub fn from_rows(ctx: &Arc<FieldCtx>, rows: Vec<Vec<Scalar>>) -> Matrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        Matrix {
            ctx: ctx.clone(),
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_fn(
        ctx: &Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut m = Matrix::zero(ctx, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        Matrix::from_fn(&self.ctx, self.rows, self.cols, |i, j| {
            self.at(i, j) + rhs.at(i, j)
        })
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        Matrix::from_fn(&self.ctx, self.rows, self.cols, |i, j| {
            self.at(i, j) - rhs.at(i, j)
        })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(&self.ctx, self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zero(&self.ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(&self.ctx);
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.at(i, j).is_zero() {
                        acc = &acc + &(self.at(i, j) * x);
                    }
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for c in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            let pivot_row = (next_row..m.rows).find(|&i| !m.at(i, c).is_zero());
            let Some(pr) = pivot_row else { continue };
            m.swap_rows(next_row, pr);
            let inv = m.at(next_row, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.at(next_row, j) * &inv;
                m.set(next_row, j, v);
            }
            for i in 0..m.rows {
                if i == next_row || m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c).clone();
                for j in c..m.cols {
                    let v = m.at(i, j) - &(&f * m.at(next_row, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            next_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical kernel basis: one vector per free column in ascending column
    /// order, with a 1 in the free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![Scalar::zero(&self.ctx); self.cols];
            v[f] = Scalar::one(&self.ctx);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(row, f);
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(&self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(&self.ctx));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(&self.ctx, n, n, |i, j| {
            r.at(i, n + j).clone()
        }))
    }

    /// Kernel of (self - mu I): the vectors fixed up to the factor mu.
    pub fn eigenspace(&self, mu: &Scalar) -> Vec<Vec<Scalar>> {
        assert_eq!(self.rows, self.cols);
        let mut shifted = self.clone();
        for i in 0..self.rows {
            let v = shifted.at(i, i) - mu;
            shifted.set(i, i, v);
        }
        shifted.nullspace()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Incrementally maintained reduced row space.  Rows are kept in reduced
/// echelon form with strictly increasing pivot columns, so the basis is
/// canonical for the set of inserted vectors regardless of insertion order
/// of a spanning set.
pub struct SpanBuilder {
    ctx: Arc<FieldCtx>,
    cols: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new(ctx: &Arc<FieldCtx>, cols: usize) -> SpanBuilder {
        SpanBuilder {
            ctx: ctx.clone(),
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for j in p..self.cols {
                if !row[j].is_zero() {
                    v[j] = &v[j] - &(&c * &row[j]);
                }
            }
        }
    }

    /// Adds the vector to the span; returns whether the dimension grew.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.cols);
        self.reduce(&mut v);
        let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[lead].inv().unwrap();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if row[lead].is_zero() {
                continue;
            }
            let c = row[lead].clone();
            for j in 0..self.cols {
                if !v[j].is_zero() {
                    row[j] = &row[j] - &(&c * &v[j]);
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(pos, lead);
        self.rows.insert(pos, v);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut copy = v.to_vec();
        self.reduce(&mut copy);
        copy.iter().all(|x| x.is_zero())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn into_basis(self) -> Vec<Vec<Scalar>> {
        self.rows
    }
}

/// Rank of the set of vectors restricted to the listed coordinates.
pub fn restricted_rank(ctx: &Arc<FieldCtx>, vecs: &[Vec<Scalar>], keep: &[usize]) -> usize {
    let mut span = SpanBuilder::new(ctx, keep.len());
    for v in vecs {
        span.insert(keep.iter().map(|&k| v[k].clone()).collect());
    }
    span.dim()
}

pub fn span_dim(ctx: &Arc<FieldCtx>, cols: usize, vecs: &[Vec<Scalar>]) -> usize {
    let mut span = SpanBuilder::new(ctx, cols);
    for v in vecs {
        span.insert(v.clone());
    }
    span.dim()
}

pub fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn add_assign_scaled(target: &mut [Scalar], coeff: &Scalar, v: &[Scalar]) {
    if coeff.is_zero() {
        return;
    }
    for (t, x) in target.iter_mut().zip(v) {
        if !x.is_zero() {
            *t = &*t + &(coeff * x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, rat};

    fn ctx() -> Arc<FieldCtx> {
        FieldCtx::get(1)
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        let c = ctx();
        Matrix::from_rows(
            &c,
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_i64(&c, x)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_nullspace_is_trivial() {
        assert!(Matrix::identity(&ctx(), 3).nullspace().is_empty());
    }

    #[test]
    fn rank_one_nullspace() {
        // [[1,2],[2,4]] has kernel spanned by (-2, 1)
        let n = m(&[&[1, 2], &[2, 4]]).nullspace();
        assert_eq!(n.len(), 1);
        assert_eq!(n[0][0], Scalar::from_i64(&ctx(), -2));
        assert_eq!(n[0][1], Scalar::from_i64(&ctx(), 1));
    }

    #[test]
    fn rank_plus_nullity() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(a.rank() + a.nullspace().len(), a.cols());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn eigenspace_examples() {
        let c = ctx();
        // diag(1,2) at mu=2 -> span{e2}
        let d = m(&[&[1, 0], &[0, 2]]);
        let e = d.eigenspace(&Scalar::from_i64(&c, 2));
        assert_eq!(e.len(), 1);
        assert!(e[0][0].is_zero() && e[0][1].is_one());
        // Jordan block at mu=0: strict kernel excludes the generalized vector
        let j = m(&[&[0, 1], &[0, 0]]);
        let k = j.eigenspace(&Scalar::zero(&c));
        assert_eq!(k.len(), 1);
        assert!(k[0][0].is_one() && k[0][1].is_zero());
        // identity fixes everything
        assert_eq!(
            Matrix::identity(&c, 4).eigenspace(&Scalar::one(&c)).len(),
            4
        );
    }

    #[test]
    fn inverse_round_trip() {
        let c = FieldCtx::get(3);
        let w = parse_scalar(&c, "w").unwrap();
        let a = Matrix::from_rows(
            &c,
            vec![
                vec![Scalar::one(&c), w.clone()],
                vec![Scalar::from_rat(&c, rat(1, 2)), Scalar::from_i64(&c, 3)],
            ],
        );
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(&c, 2));
        let singular = m(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn span_builder_tracks_dimension() {
        let c = ctx();
        let mut s = SpanBuilder::new(&c, 3);
        let v = |a: i64, b: i64, d: i64| {
            vec![
                Scalar::from_i64(&c, a),
                Scalar::from_i64(&c, b),
                Scalar::from_i64(&c, d),
            ]
        };
        assert!(s.insert(v(1, 1, 0)));
        assert!(s.insert(v(0, 1, 1)));
        assert!(!s.insert(v(1, 2, 1)));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(2, 3, 1)));
        assert!(!s.contains(&v(0, 0, 1)));
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let a = m(&[&[2, -1, 3, 0], &[1, 0, -1, 4]]);
        for v in a.nullspace() {
            assert!(vec_is_zero(&a.apply(&v)));
        }
    }
}
