//! Dense matrices over [`Scalar`] with tensor-leg bookkeeping.

use crate::scalar::gcd;
use crate::scalar::{MultiPoly, Scalar, ScalarError, Var};
use rayon::prelude::*;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("tensor legs absent or leg {0} out of range")]
    LegMismatch(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Row-major dense matrix. `legs`, when present, lists tensor-factor
/// dimensions whose product is `rows` (and `cols`).
#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
    legs: Option<Vec<usize>>,
}

/// Products with at least this many output entries run on the thread pool.
const PAR_THRESHOLD: usize = 64;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
            legs: None,
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m.legs = Some(vec![n]);
        m
    }

    /// Identity on a tensor product with the given leg dimensions.
    pub fn identity_legs(legs: &[usize]) -> Matrix {
        let n = legs.iter().product();
        let mut m = Matrix::identity(n);
        m.legs = Some(legs.to_vec());
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            legs: if rows == cols { Some(vec![rows]) } else { None },
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        Matrix {
            rows: r,
            cols: c,
            data,
            legs: if r == c { Some(vec![r]) } else { None },
        }
    }

    /// Integer matrix, convenient in tests.
    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn diag(entries: Vec<Scalar>) -> Matrix {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m.legs = Some(vec![n]);
        m
    }

    pub fn column(entries: Vec<Scalar>) -> Matrix {
        let n = entries.len();
        Matrix {
            rows: n,
            cols: 1,
            data: entries,
            legs: None,
        }
    }

    /// Single 1 at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        m[(i, j)] = Scalar::one();
        if rows == cols {
            m.legs = Some(vec![rows]);
        }
        m
    }

    pub fn with_legs(mut self, legs: &[usize]) -> Result<Matrix, LinalgError> {
        let n: usize = legs.iter().product();
        if n != self.rows || n != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "legs {legs:?} on a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.legs = Some(legs.to_vec());
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn legs(&self) -> Option<&[usize]> {
        self.legs.as_deref()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// `Some(c)` when the matrix is `c` times the identity.
    pub fn scalar_value(&self) -> Option<Scalar> {
        if !self.is_square() || !self.is_diagonal() {
            return None;
        }
        if self.rows == 0 {
            return Some(Scalar::zero());
        }
        let c = self[(0, 0)].clone();
        (1..self.rows).all(|i| self[(i, i)] == c).then_some(c)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|e| !e.is_zero()).count()
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar + Sync) -> Matrix {
        let data = if self.data.len() >= PAR_THRESHOLD {
            self.data.par_iter().map(&f).collect()
        } else {
            self.data.iter().map(&f).collect()
        };
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
            legs: self.legs.clone(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&Scalar) -> Result<Scalar, ScalarError> + Sync,
    ) -> Result<Matrix, ScalarError> {
        let data: Result<Vec<Scalar>, ScalarError> = if self.data.len() >= PAR_THRESHOLD {
            self.data.par_iter().map(&f).collect()
        } else {
            self.data.iter().map(&f).collect()
        };
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: data?,
            legs: self.legs.clone(),
        })
    }

    pub fn substitute(&self, bindings: &[(Var, Scalar)]) -> Result<Matrix, ScalarError> {
        self.try_map(|e| e.substitute(bindings))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map(|e| e * c)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone());
        out.legs = self.legs.clone();
        out
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .sum()
    }

    pub fn try_mul(&self, o: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let (n, m, k) = (self.rows, o.cols, self.cols);
        let entry = |idx: usize| -> Scalar {
            let (i, j) = (idx / m, idx % m);
            let terms: Vec<Scalar> = (0..k)
                .filter_map(|t| {
                    let a = &self.data[i * k + t];
                    let b = &o.data[t * m + j];
                    if a.is_zero() || b.is_zero() {
                        None
                    } else {
                        Some(a * b)
                    }
                })
                .collect();
            sum_scalars(terms)
        };
        let data: Vec<Scalar> = if n * m >= PAR_THRESHOLD {
            (0..n * m).into_par_iter().map(entry).collect()
        } else {
            (0..n * m).map(entry).collect()
        };
        let legs = match (&self.legs, &o.legs) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            (Some(a), _) if n == m => Some(a.clone()),
            (_, Some(b)) if n == m => Some(b.clone()),
            _ => None,
        };
        Ok(Matrix {
            rows: n,
            cols: m,
            data,
            legs,
        })
    }

    fn zip_with(&self, o: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar + Sync) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        let data = if self.data.len() >= PAR_THRESHOLD {
            self.data
                .par_iter()
                .zip(o.data.par_iter())
                .map(|(a, b)| f(a, b))
                .collect()
        } else {
            self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect()
        };
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
            legs: self.legs.clone().or_else(|| o.legs.clone()),
        }
    }

    /// `self * o - o * self`.
    pub fn commutator(&self, o: &Matrix) -> Matrix {
        &(self * o) - &(o * self)
    }

    /// Kronecker product; legs concatenate.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        let mut data = Vec::with_capacity(r * c);
        for i in 0..self.rows {
            for k in 0..o.rows {
                for j in 0..self.cols {
                    let a = &self.data[i * self.cols + j];
                    for l in 0..o.cols {
                        let b = &o.data[k * o.cols + l];
                        data.push(if a.is_zero() || b.is_zero() {
                            Scalar::zero()
                        } else {
                            a * b
                        });
                    }
                }
            }
        }
        let legs = if self.is_square() && o.is_square() {
            let mut l = self.leg_list();
            l.extend(o.leg_list());
            Some(l)
        } else {
            None
        };
        Matrix {
            rows: r,
            cols: c,
            data,
            legs,
        }
    }

    fn leg_list(&self) -> Vec<usize> {
        self.legs.clone().unwrap_or_else(|| vec![self.rows])
    }

    fn checked_legs(&self, leg: usize) -> Result<Vec<usize>, LinalgError> {
        match &self.legs {
            Some(l) if leg < l.len() && self.is_square() => Ok(l.clone()),
            _ => Err(LinalgError::LegMismatch(leg)),
        }
    }

    /// Transpose of a single tensor leg (0-based).
    pub fn partial_transpose(&self, leg: usize) -> Result<Matrix, LinalgError> {
        let legs = self.checked_legs(leg)?;
        let stride: usize = legs[leg + 1..].iter().product();
        let d = legs[leg];
        let n = self.rows;
        let digit = |x: usize| (x / stride) % d;
        let mut out = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let (dr, dc) = (digit(r), digit(c));
                let r2 = r - dr * stride + dc * stride;
                let c2 = c - dc * stride + dr * stride;
                out[(r, c)] = self[(r2, c2)].clone();
            }
        }
        out.legs = Some(legs);
        Ok(out)
    }

    /// Trace over a single tensor leg (0-based); the leg is removed.
    pub fn partial_trace(&self, leg: usize) -> Result<Matrix, LinalgError> {
        let legs = self.checked_legs(leg)?;
        let stride: usize = legs[leg + 1..].iter().product();
        let d = legs[leg];
        let outer: usize = legs[..leg].iter().product();
        let m = outer * stride;
        let full = |x: usize, t: usize| (x / stride) * stride * d + t * stride + x % stride;
        let mut out = Matrix::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                out[(r, c)] = sum_scalars(
                    (0..d)
                        .map(|t| self[(full(r, t), full(c, t))].clone())
                        .filter(|e| !e.is_zero())
                        .collect(),
                );
            }
        }
        let mut rest = legs;
        rest.remove(leg);
        if rest.is_empty() {
            rest.push(1);
        }
        out.legs = Some(rest);
        Ok(out)
    }

    /// Operator `op` acting on the tensor legs `positions` (in `op`'s own leg
    /// order) of a space with leg dimensions `legs`, identity elsewhere.
    pub fn embed(op: &Matrix, positions: &[usize], legs: &[usize]) -> Result<Matrix, LinalgError> {
        let sub: Vec<usize> = positions.iter().map(|&p| legs[p]).collect();
        let n_sub: usize = sub.iter().product();
        if op.rows != n_sub || op.cols != n_sub {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} operator on legs {positions:?} of {legs:?}",
                op.rows, op.cols
            )));
        }
        let n: usize = legs.iter().product();
        let strides: Vec<usize> = (0..legs.len())
            .map(|i| legs[i + 1..].iter().product())
            .collect();
        let digits = |x: usize| -> Vec<usize> {
            (0..legs.len()).map(|i| (x / strides[i]) % legs[i]).collect()
        };
        let sub_index = |ds: &[usize]| -> usize {
            positions
                .iter()
                .zip(&sub)
                .fold(0, |acc, (&p, &d)| acc * d + ds[p])
        };
        let mut rest_mask = vec![true; legs.len()];
        for &p in positions {
            rest_mask[p] = false;
        }
        let mut out = Matrix::zeros(n, n);
        for r in 0..n {
            let dr = digits(r);
            let ir = sub_index(&dr);
            // Columns agree with r off the acted legs.
            let base: usize = (0..legs.len())
                .filter(|&i| rest_mask[i])
                .map(|i| dr[i] * strides[i])
                .sum();
            for ic in 0..n_sub {
                let e = &op[(ir, ic)];
                if e.is_zero() {
                    continue;
                }
                let mut c = base;
                let mut x = ic;
                for (&p, &d) in positions.iter().zip(&sub).rev() {
                    c += (x % d) * strides[p];
                    x /= d;
                }
                out[(r, c)] = e.clone();
            }
        }
        out.legs = Some(legs.to_vec());
        Ok(out)
    }

    /// Permutation operator sending leg `i` of the input to position
    /// `perm[i]` of the output.
    pub fn leg_permutation(legs: &[usize], perm: &[usize]) -> Matrix {
        let k = legs.len();
        assert_eq!(perm.len(), k);
        let mut out_legs = vec![0; k];
        for i in 0..k {
            out_legs[perm[i]] = legs[i];
        }
        let n: usize = legs.iter().product();
        let in_strides: Vec<usize> = (0..k).map(|i| legs[i + 1..].iter().product()).collect();
        let out_strides: Vec<usize> = (0..k).map(|i| out_legs[i + 1..].iter().product()).collect();
        let mut m = Matrix::zeros(n, n);
        for x in 0..n {
            let y: usize = (0..k)
                .map(|i| ((x / in_strides[i]) % legs[i]) * out_strides[perm[i]])
                .sum();
            m[(y, x)] = Scalar::one();
        }
        m.legs = None;
        m
    }

    /// The flip `V ⊗ W -> W ⊗ V`.
    pub fn flip(dv: usize, dw: usize) -> Matrix {
        Matrix::leg_permutation(&[dv, dw], &[1, 0])
    }

    /// Conjugate a two-leg operator on `V ⊗ W` to act on `W ⊗ V`.
    pub fn swap_legs(&self) -> Result<Matrix, LinalgError> {
        let legs = self.checked_legs(1)?;
        if legs.len() != 2 {
            return Err(LinalgError::LegMismatch(2));
        }
        let p = Matrix::flip(legs[0], legs[1]);
        let pi = Matrix::flip(legs[1], legs[0]);
        (&p * self)
            .try_mul(&pi)?
            .with_legs(&[legs[1], legs[0]])
    }

    /// Clear the denominators of each row, giving polynomial rows.
    fn polynomial_rows(&self) -> Vec<Vec<MultiPoly>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row_scale(row);
                row.iter()
                    .map(|e| {
                        if e.is_zero() {
                            MultiPoly::zero()
                        } else {
                            e.num().mul(&l.div_exact(e.den()).unwrap())
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse via fraction-free Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        // Augment each polynomial row with the same row scale applied to the
        // identity: row i of [A | I] scaled by l_i.
        let mut rows = Vec::with_capacity(n);
        for (i, mut r) in self.polynomial_rows().into_iter().enumerate() {
            let l = row_scale(self.row(i));
            r.extend((0..n).map(|j| if i == j { l.clone() } else { MultiPoly::zero() }));
            rows.push(r);
        }
        let (pivots, d, _) = fraction_free_gauss_jordan(&mut rows, n);
        if pivots.len() < n {
            return Err(LinalgError::Singular);
        }
        let mut out = Matrix::zeros(n, n);
        let dinv = Scalar::new(MultiPoly::one(), d).map_err(LinalgError::from)?;
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..n {
                let e = &rows[r][n + j];
                if !e.is_zero() {
                    out[(c, j)] = Scalar::from_poly(e.clone()) * &dinv;
                }
            }
        }
        out.legs = self.legs.clone();
        Ok(out)
    }

    /// Basis of the right kernel, one column matrix per free column.
    pub fn nullspace(&self) -> Vec<Matrix> {
        let mut rows = self.polynomial_rows();
        let (pivots, d, _) = fraction_free_gauss_jordan(&mut rows, self.cols);
        let pivot_cols: Vec<usize> = pivots.clone();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let dscal = Scalar::from_poly(d);
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = dscal.clone();
                for (r, &c) in pivots.iter().enumerate() {
                    let e = &rows[r][f];
                    if !e.is_zero() {
                        v[c] = -Scalar::from_poly(e.clone());
                    }
                }
                Matrix::column(normalize_vector(v))
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.polynomial_rows();
        fraction_free_gauss_jordan(&mut rows, self.cols).0.len()
    }

    pub fn determinant(&self) -> Result<Scalar, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch("determinant of non-square".into()));
        }
        let n = self.rows;
        let mut rows = self.polynomial_rows();
        let scale: Scalar = (0..n)
            .map(|i| Scalar::from_poly(row_scale(self.row(i))))
            .product();
        let (pivots, d, odd) = fraction_free_gauss_jordan(&mut rows, n);
        if pivots.len() < n {
            return Ok(Scalar::zero());
        }
        let d = Scalar::from_poly(d) / scale;
        Ok(if odd { -d } else { d })
    }
}

/// Least common denominator of a row.
fn row_scale(row: &[Scalar]) -> MultiPoly {
    let mut l = MultiPoly::one();
    for e in row {
        if e.den().is_one() || *e.den() == l {
            continue;
        }
        let g = gcd::gcd(&l, e.den());
        l = l.mul(&e.den().div_exact(&g).unwrap());
    }
    l
}

/// Scale a kernel vector so its first nonzero entry is 1.
fn normalize_vector(v: Vec<Scalar>) -> Vec<Scalar> {
    let Some(first) = v.iter().find(|e| !e.is_zero()).cloned() else {
        return v;
    };
    let inv = first.recip().unwrap();
    v.into_iter().map(|e| e * &inv).collect()
}

/// Sum many scalars. Terms sharing a denominator are added as polynomials
/// first, which avoids most gcd work.
pub fn sum_scalars(terms: Vec<Scalar>) -> Scalar {
    match terms.len() {
        0 => return Scalar::zero(),
        1 => return terms.into_iter().next().unwrap(),
        _ => {}
    }
    let mut groups: Vec<(MultiPoly, MultiPoly)> = Vec::new();
    for t in terms {
        match groups.iter_mut().find(|(d, _)| d == t.den()) {
            Some(g) => g.1 = g.1.add(t.num()),
            None => groups.push((t.den().clone(), t.num().clone())),
        }
    }
    groups
        .into_iter()
        .map(|(d, n)| Scalar::new(n, d).unwrap())
        .fold(Scalar::zero(), |a, b| a + b)
}

/// In-place fraction-free Gauss-Jordan on polynomial rows, eliminating only
/// in the first `ncols` columns. Returns the pivot column of each leading
/// row (rows are reordered so pivots come first), the final pivot value,
/// which every pivot entry equals on exit, and the parity of row swaps.
fn fraction_free_gauss_jordan(
    rows: &mut [Vec<MultiPoly>],
    ncols: usize,
) -> (Vec<usize>, MultiPoly, bool) {
    let m = rows.len();
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = MultiPoly::one();
    let mut pivots = Vec::new();
    let mut odd = false;
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        // Pivot: smallest entry (by term count) among remaining rows.
        let Some(p) = (r..m)
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].len())
        else {
            continue;
        };
        if p != r {
            rows.swap(r, p);
            odd = !odd;
        }
        let pivot_row = rows[r].clone();
        let pv = pivot_row[col].clone();
        let update = |row: &mut Vec<MultiPoly>| {
            let f = row[col].clone();
            for j in 0..width {
                if j == col {
                    continue;
                }
                let a = &row[j];
                let b = &pivot_row[j];
                if a.is_zero() && (b.is_zero() || f.is_zero()) {
                    continue;
                }
                let t = pv.mul(a).sub(&f.mul(b));
                row[j] = if prev.is_one() {
                    t
                } else {
                    t.div_exact(&prev).expect("fraction-free division is exact")
                };
            }
            row[col] = MultiPoly::zero();
        };
        let (head, tail) = rows.split_at_mut(r);
        let (_, below) = tail.split_at_mut(1);
        head.par_iter_mut().for_each(update);
        below.par_iter_mut().for_each(update);
        pivots.push(col);
        prev = pv;
        r += 1;
    }
    (pivots, prev, odd)
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl PartialEq for Matrix {
    fn eq(&self, o: &Matrix) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

impl Eq for Matrix {}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        self.try_mul(o).expect("matrix shape mismatch")
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, o: Matrix) -> Matrix {
        &self * &o
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        self.zip_with(o, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        self.zip_with(o, |a, b| a - b)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, o: Matrix) -> Matrix {
        &self + &o
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, o: Matrix) -> Matrix {
        &self - &o
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|e| -e)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} legs {:?}\n{}", self.rows, self.cols, self.legs, self)
    }
}

/// Solve for all `X` (of shape `rows x cols`) with `X * a_k = b_k * X` for
/// every pair, optionally restricted to entries where `mask` is true.
/// Returns a basis of the solution space.
pub fn intertwiner_space(
    pairs: &[(Matrix, Matrix)],
    rows: usize,
    cols: usize,
    mask: Option<&dyn Fn(usize, usize) -> bool>,
) -> Vec<Matrix> {
    let unknowns: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|&(i, j)| mask.map(|m| m(i, j)).unwrap_or(true))
        .collect();
    let index: std::collections::HashMap<(usize, usize), usize> =
        unknowns.iter().enumerate().map(|(k, &ij)| (ij, k)).collect();
    let nu = unknowns.len();
    let mut eqs: Vec<Vec<Scalar>> = Vec::new();
    for (a, b) in pairs {
        assert_eq!((a.rows, a.cols), (cols, cols));
        assert_eq!((b.rows, b.cols), (rows, rows));
        for i in 0..rows {
            for j in 0..cols {
                // (X a)_{ij} - (b X)_{ij}
                let mut row = vec![Scalar::zero(); nu];
                let mut any = false;
                for t in 0..cols {
                    if let Some(&k) = index.get(&(i, t)) {
                        let c = &a[(t, j)];
                        if !c.is_zero() {
                            row[k] = &row[k] + c;
                            any = true;
                        }
                    }
                }
                for t in 0..rows {
                    if let Some(&k) = index.get(&(t, j)) {
                        let c = &b[(i, t)];
                        if !c.is_zero() {
                            row[k] = &row[k] - c;
                            any = true;
                        }
                    }
                }
                if any && row.iter().any(|e| !e.is_zero()) {
                    eqs.push(row);
                }
            }
        }
    }
    let basis = if eqs.is_empty() {
        (0..nu)
            .map(|k| {
                let mut v = vec![Scalar::zero(); nu];
                v[k] = Scalar::one();
                Matrix::column(v)
            })
            .collect()
    } else {
        Matrix::from_rows(eqs).nullspace()
    };
    basis
        .into_iter()
        .map(|v| {
            let mut x = Matrix::zeros(rows, cols);
            for (k, &(i, j)) in unknowns.iter().enumerate() {
                x[(i, j)] = v.data[k].clone();
            }
            if rows == cols {
                x.legs = Some(vec![rows]);
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn kron_examples() {
        assert!(Matrix::identity(2).kron(&Matrix::identity(2)).is_identity());
        let a = Matrix::diag(vec![s("a"), s("b")]);
        let b = Matrix::diag(vec![s("c"), s("d")]);
        assert_eq!(
            a.kron(&b),
            Matrix::diag(vec![s("a*c"), s("a*d"), s("b*c"), s("b*d")])
        );
        let e12 = Matrix::unit(2, 2, 0, 1);
        let e21 = Matrix::unit(2, 2, 1, 0);
        assert_eq!(e12.kron(&e21), Matrix::unit(4, 4, 1, 2));
        assert_eq!(e12.kron(&e21).legs(), Some(&[2, 2][..]));
    }

    #[test]
    fn partial_trace_examples() {
        let a = Matrix::from_rows(vec![vec![s("a"), s("b")], vec![s("c"), s("d")]]);
        let b = Matrix::from_rows(vec![vec![s("x"), s("y")], vec![s("w"), s("z")]]);
        assert_eq!(a.kron(&b).partial_trace(1).unwrap(), a.scale(&s("x + z")));
        let i4 = Matrix::identity_legs(&[2, 2]);
        assert_eq!(i4.partial_trace(1).unwrap(), Matrix::identity(2).scale(&s("2")));
        let p = Matrix::flip(2, 2).with_legs(&[2, 2]).unwrap();
        assert!(p.partial_trace(1).unwrap().is_identity());
        assert_eq!(a.kron(&b).partial_trace(0).unwrap(), b.scale(&s("a + d")));
    }

    #[test]
    fn partial_transpose_examples() {
        let x = Matrix::from_rows(vec![vec![s("a"), s("b")], vec![s("c"), s("d")]]);
        let y = Matrix::from_rows(vec![vec![s("x"), s("y")], vec![s("w"), s("z")]]);
        let xy = x.kron(&y);
        assert_eq!(xy.partial_transpose(1).unwrap(), x.kron(&y.transpose()));
        assert_eq!(xy.partial_transpose(0).unwrap(), x.transpose().kron(&y));
        assert_eq!(xy.partial_transpose(1).unwrap().partial_transpose(1).unwrap(), xy);
        assert!(matches!(Matrix::identity(4).partial_transpose(3), Err(LinalgError::LegMismatch(3))));
    }

    #[test]
    fn inverse_examples() {
        assert!(Matrix::identity(3).inverse().unwrap().is_identity());
        let k = Matrix::diag(vec![s("1"), s("(xi - z^2)/(xi*z^2 - 1)")]);
        assert_eq!(
            k.inverse().unwrap(),
            Matrix::diag(vec![s("1"), s("(xi*z^2 - 1)/(xi - z^2)")])
        );
        let m = Matrix::from_rows(vec![
            vec![s("z"), s("1"), s("0")],
            vec![s("1/v"), s("z + 1"), s("xi")],
            vec![s("2"), s("0"), s("v*z")],
        ]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!((&inv * &m).is_identity());
        assert_eq!(
            Matrix::from_ints(&[&[1, 2], &[2, 4]]).inverse(),
            Err(LinalgError::Singular)
        );
    }

    #[test]
    fn nullspace_examples() {
        assert!(Matrix::identity(2).nullspace().is_empty());
        assert_eq!(Matrix::zeros(1, 2).nullspace().len(), 2);
        let m = Matrix::from_rows(vec![vec![s("1"), s("-z")]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], Matrix::column(vec![s("1"), s("1/z")]));
    }

    #[test]
    fn determinant_matches_expansion() {
        let m = Matrix::from_rows(vec![
            vec![s("a"), s("b")],
            vec![s("c"), s("d")],
        ]);
        assert_eq!(m.determinant().unwrap(), s("a*d - b*c"));
        let p = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.determinant().unwrap(), s("-1"));
    }

    #[test]
    fn embed_and_permutation() {
        let a = Matrix::from_rows(vec![vec![s("a"), s("b")], vec![s("c"), s("d")]]);
        let b = Matrix::from_rows(vec![vec![s("x"), s("y")], vec![s("w"), s("z")]]);
        let ab = a.kron(&b);
        // Acting on legs (1, 0) is the flipped operator.
        let e = Matrix::embed(&ab, &[1, 0], &[2, 2]).unwrap();
        assert_eq!(e, b.kron(&a));
        let e13 = Matrix::embed(&ab, &[0, 2], &[2, 3, 2]).unwrap();
        let direct = Matrix::leg_permutation(&[2, 2, 3], &[0, 2, 1])
            * ab.kron(&Matrix::identity(3))
            * Matrix::leg_permutation(&[2, 3, 2], &[0, 2, 1]);
        assert_eq!(e13, direct);
        let swapped = ab.swap_legs().unwrap();
        assert_eq!(swapped, b.kron(&a));
    }

    #[test]
    fn intertwiner_of_commuting_diagonal() {
        let d = Matrix::diag(vec![s("q"), s("1/q")]);
        let sols = intertwiner_space(&[(d.clone(), d)], 2, 2, None);
        assert_eq!(sols.len(), 2);
    }
}
