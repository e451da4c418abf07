//! Matrices of jets and exact constant matrices.

use crate::error::{Error, Result};
use crate::jet::BidegreeJet;
use crate::rational::{binomial_rational, Cq, Rat};

/// Exact constant matrix, row major.
pub type CMat = Vec<Vec<Cq>>;

pub mod cmat {
    use super::*;

    pub fn identity(k: usize) -> CMat {
        (0..k).map(|i| (0..k).map(|j| if i == j { Cq::one() } else { Cq::zero() }).collect()).collect()
    }

    pub fn diag(d: &[Cq]) -> CMat {
        let k = d.len();
        (0..k).map(|i| (0..k).map(|j| if i == j { d[i].clone() } else { Cq::zero() }).collect()).collect()
    }

    pub fn mul(a: &CMat, b: &CMat) -> CMat {
        let (r, m, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
        (0..r)
            .map(|i| {
                (0..c)
                    .map(|j| {
                        let mut acc = Cq::zero();
                        for k in 0..m {
                            acc.add_mul(&a[i][k], &b[k][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    pub fn conj_transpose(a: &CMat) -> CMat {
        let r = a.len();
        let c = a.first().map_or(0, |x| x.len());
        (0..c).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
    }

    pub fn is_identity(a: &CMat) -> bool {
        *a == identity(a.len())
    }

    pub fn is_diagonal(a: &CMat) -> bool {
        a.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
    }

    pub fn is_hermitian(a: &CMat) -> bool {
        *a == conj_transpose(a)
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(a: &CMat) -> Option<CMat> {
        let k = a.len();
        let mut m: Vec<Vec<Cq>> = a.iter().zip(identity(k)).map(|(row, id)| row.iter().cloned().chain(id).collect()).collect();
        for col in 0..k {
            let piv = (col..k).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            let inv = m[col][col].recip()?;
            for x in m[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..k {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..2 * k {
                        let v = &m[col][c] * &f;
                        m[r][c] -= &v;
                    }
                }
            }
        }
        Some(m.into_iter().map(|row| row[k..].to_vec()).collect())
    }

    pub fn det(a: &CMat) -> Cq {
        let k = a.len();
        let mut m = a.clone();
        let mut det = Cq::one();
        for col in 0..k {
            let Some(piv) = (col..k).find(|&r| !m[r][col].is_zero()) else {
                return Cq::zero();
            };
            if piv != col {
                m.swap(col, piv);
                det = -det;
            }
            det = &det * &m[col][col];
            let inv = m[col][col].recip().expect("nonzero pivot");
            for r in col + 1..k {
                if !m[r][col].is_zero() {
                    let f = &m[r][col] * &inv;
                    for c in col..k {
                        let v = &m[col][c] * &f;
                        m[r][c] -= &v;
                    }
                }
            }
        }
        det
    }

    /// Sylvester's criterion on a Hermitian matrix.
    pub fn is_positive_definite(a: &CMat) -> bool {
        if !is_hermitian(a) {
            return false;
        }
        (1..=a.len()).all(|k| {
            let minor: CMat = a[..k].iter().map(|row| row[..k].to_vec()).collect();
            let d = det(&minor);
            d.is_real() && d.re.signum() > 0
        })
    }

    /// Exact Hermitian square root, available for the identity and for
    /// diagonal matrices whose entries are squares of rationals.
    pub fn exact_sqrt(a: &CMat) -> Result<CMat> {
        if !is_hermitian(a) {
            return Err(Error::NotHermitian("constant term".into()));
        }
        if !is_positive_definite(a) {
            return Err(Error::NotPositive("constant term".into()));
        }
        if !is_diagonal(a) {
            return Err(Error::IrrationalSqrt("constant term is not diagonal".into()));
        }
        let d: Option<Vec<Cq>> = a.iter().enumerate().map(|(i, row)| row[i].re.sqrt_exact().map(Cq::real)).collect();
        d.map(|d| diag(&d)).ok_or_else(|| Error::IrrationalSqrt("diagonal entry is not a rational square".into()))
    }
}

/// Matrix whose entries are jets of one shared order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixJet {
    rows: usize,
    cols: usize,
    entries: Vec<BidegreeJet>,
}

impl MatrixJet {
    pub fn new(rows: usize, cols: usize, entries: Vec<BidegreeJet>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let (n, order) = (entries[0].n(), entries[0].order());
        for e in &entries {
            if e.n() != n {
                return Err(Error::DimensionMismatch("entries disagree on variable count".into()));
            }
            if e.order() != order {
                return Err(Error::OrderMismatch(order, e.order()));
            }
        }
        Ok(MatrixJet { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> BidegreeJet) -> Result<Self> {
        let mut f = f;
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, entries)
    }

    pub fn zero(rows: usize, cols: usize, n: usize, order: u32) -> Self {
        MatrixJet { rows, cols, entries: vec![BidegreeJet::zero(n, order); rows * cols] }
    }

    pub fn identity(k: usize, n: usize, order: u32) -> Self {
        Self::from_constant(n, order, &cmat::identity(k))
    }

    pub fn from_constant(n: usize, order: u32, c: &CMat) -> Self {
        let rows = c.len();
        let cols = c[0].len();
        Self::from_fn(rows, cols, |i, j| BidegreeJet::constant(n, order, c[i][j].clone())).expect("consistent shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.entries[0].n()
    }

    pub fn order(&self) -> u32 {
        self.entries[0].order()
    }

    pub fn get(&self, i: usize, j: usize) -> &BidegreeJet {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BidegreeJet) -> Result<()> {
        if v.order() != self.order() {
            return Err(Error::OrderMismatch(self.order(), v.order()));
        }
        self.entries[i * self.cols + j] = v;
        Ok(())
    }

    pub fn entries(&self) -> &[BidegreeJet] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&BidegreeJet) -> BidegreeJet) -> Self {
        MatrixJet { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&BidegreeJet) -> Result<BidegreeJet>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn constant_matrix(&self) -> CMat {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect()).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn scale(&self, s: &Cq) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(self.mul_raw(other, self.order()))
    }

    fn mul_raw(&self, other: &Self, target: u32) -> Self {
        let n = self.n();
        let entries = (0..self.rows * other.cols)
            .map(|idx| {
                let (i, j) = (idx / other.cols, idx % other.cols);
                let mut acc = BidegreeJet::zero(n, target);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for (key, c) in a.mul_raw(b, target).terms() {
                        acc.add_term(key, c);
                    }
                }
                acc
            })
            .collect();
        MatrixJet { rows: self.rows, cols: other.cols, entries }
    }

    /// Multiply by a constant matrix on the left.
    pub fn left_const(&self, c: &CMat) -> Result<Self> {
        self.constant_like(c)?.mul(self)
    }

    /// Multiply by a constant matrix on the right.
    pub fn right_const(&self, c: &CMat) -> Result<Self> {
        self.mul(&self.constant_like(c)?)
    }

    fn constant_like(&self, c: &CMat) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::DimensionMismatch("empty constant matrix".into()));
        }
        Ok(Self::from_constant(self.n(), self.order(), c))
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj()).expect("consistent shape")
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.conj_transpose()
    }

    pub fn truncate(&self, order: u32) -> Result<Self> {
        self.try_map(|e| e.truncate(order))
    }

    pub fn with_order(&self, order: u32) -> Self {
        self.map(|e| e.with_order(order))
    }

    pub fn hol_part(&self) -> Self {
        self.map(|e| e.hol_part())
    }

    pub fn diff_hol(&self, i: usize) -> Self {
        self.map(|e| e.diff_hol(i))
    }

    pub fn diff_anti(&self, i: usize) -> Self {
        self.map(|e| e.diff_anti(i))
    }

    pub fn compose_holomorphic(&self, map: &[BidegreeJet]) -> Result<Self> {
        self.try_map(|e| e.compose_holomorphic(map))
    }

    pub fn shift(&self, t: &[Cq]) -> Self {
        self.map(|e| e.shift(t))
    }

    pub fn trace(&self) -> Result<BidegreeJet> {
        let mut acc = BidegreeJet::zero(self.n(), self.order());
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i))?;
        }
        Ok(acc)
    }

    /// Determinant by cofactor expansion (sizes up to four).
    pub fn det(&self) -> Result<BidegreeJet> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.minor_det(&idx, &idx))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> BidegreeJet {
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let order = self.order();
        let mut acc = BidegreeJet::zero(self.n(), order);
        let sub_rows = &rows[1..];
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(rows[0], c);
            if a.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let prod = a.mul_raw(&self.minor_det(sub_rows, &sub_cols), order);
            acc = if k % 2 == 0 { acc.add(&prod) } else { acc.sub(&prod) }.expect("shared order");
        }
        acc
    }

    /// Entrywise homogeneous components of degree `0..=order`.
    fn homogeneous_parts(&self) -> Vec<Self> {
        let parts: Vec<Vec<BidegreeJet>> = self.entries.iter().map(|e| e.homogeneous_parts()).collect();
        (0..=self.order() as usize)
            .map(|d| MatrixJet { rows: self.rows, cols: self.cols, entries: parts.iter().map(|p| p[d].clone()).collect() })
            .collect()
    }

    /// Inverse by the degree recurrence `X_d = -C^{-1} Σ_{k≥1} M_k X_{d-k}`.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let c0inv = cmat::inverse(&self.constant_matrix()).ok_or_else(|| Error::BasePoint("singular constant term".into()))?;
        let (n, order) = (self.n(), self.order());
        let m = self.homogeneous_parts();
        let neg = c0inv.iter().map(|row| row.iter().map(|x| -x).collect()).collect::<CMat>();
        let mut x: Vec<Self> = vec![Self::from_constant(n, order, &c0inv)];
        for d in 1..=order as usize {
            let mut acc = Self::zero(self.rows, self.cols, n, order);
            for k in 1..=d {
                if m[k].entries.iter().all(|e| e.is_zero()) {
                    continue;
                }
                acc = acc.add(&m[k].mul_raw(&x[d - k], d as u32).with_order(order))?;
            }
            x.push(Self::from_constant(n, order, &neg).mul_raw(&acc, order));
        }
        let mut out = Self::zero(self.rows, self.cols, n, order);
        for p in x {
            out = out.add(&p)?;
        }
        Ok(out)
    }

    /// Hermitian square root. A constant term equal to `I` uses the binomial
    /// series of `sqrt(1+x)`; a diagonal constant term with rational square
    /// roots uses the degree recurrence `S_d C + C S_d = M_d - Σ S_k S_{d-k}`.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian("matrix_sqrt_jet input".into()));
        }
        let c = self.constant_matrix();
        if cmat::is_identity(&c) {
            return self.sqrt_series();
        }
        let s0 = cmat::exact_sqrt(&c)?;
        self.sqrt_recurrence(&s0)
    }

    /// `Σ_k binom(1/2, k) (M - I)^k`, requiring `M(0) = I`.
    pub fn sqrt_series(&self) -> Result<Self> {
        let (k, n, order) = (self.rows, self.n(), self.order());
        if !cmat::is_identity(&self.constant_matrix()) {
            return Err(Error::BasePoint("binomial square-root series needs M(0) = I".into()));
        }
        let id = Self::identity(k, n, order);
        let x = self.sub(&id)?;
        let half = Rat::new(1, 2);
        let coeff = |j: u32| Cq::real(binomial_rational(&half, j));
        let mut s = id.scale(&coeff(order));
        for j in (0..order).rev() {
            s = id.scale(&coeff(j)).add(&x.mul(&s)?)?;
        }
        Ok(s)
    }

    /// Degree recurrence with a given diagonal constant root.
    pub fn sqrt_recurrence(&self, s0: &CMat) -> Result<Self> {
        if !cmat::is_diagonal(s0) {
            return Err(Error::IrrationalSqrt("recurrence needs a diagonal constant root".into()));
        }
        let (k, n, order) = (self.rows, self.n(), self.order());
        let m = self.homogeneous_parts();
        let mut s: Vec<Self> = vec![Self::from_constant(n, order, s0)];
        for d in 1..=order as usize {
            let mut rhs = m[d].clone();
            for j in 1..d {
                rhs = rhs.sub(&s[j].mul_raw(&s[d - j], d as u32).with_order(order))?;
            }
            let part = Self::from_fn(k, k, |i, j| {
                let denom = (&s0[i][i] + &s0[j][j]).recip().expect("positive diagonal");
                rhs.get(i, j).scale(&denom)
            })?;
            s.push(part);
        }
        let mut out = Self::zero(k, k, n, order);
        for p in s {
            out = out.add(&p)?;
        }
        Ok(out)
    }
}
