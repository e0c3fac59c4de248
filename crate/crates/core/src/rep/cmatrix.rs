use num_complex::Complex64;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn scalar(c: Complex64) -> Self {
        CMatrix { dim: 1, data: vec![c] }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let d = entries.len();
        Self::from_fn(d, |r, c| if r == c { entries[r] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        CMatrix { dim, data }
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        CMatrix { dim, data: rows.iter().flatten().copied().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d).map(|r| (0..d).map(|c| self.data[r * d + c] * v[c]).sum()).collect()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|&a| a * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|a| a.conj()).collect() }
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Sum of squared moduli of the entries.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Residual of `M M* = I`.
    pub fn unitarity_residual(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&CMatrix::identity(self.dim))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&CMatrix::identity(self.dim)) <= tol
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| self.get(r / b, c / b) * other.get(r % b, c % b))
    }

    pub fn pow(&self, e: usize) -> CMatrix {
        (0..e).fold(CMatrix::identity(self.dim), |acc, _| acc.mul(self))
    }

    /// Dimension of the null space, by Gaussian elimination with full
    /// pivoting; pivots below `tol` (relative to the largest entry) count as zero.
    pub fn nullity(&self, tol: f64) -> usize {
        let d = self.dim;
        let mut a = self.data.clone();
        let scale = self.max_abs().max(1.0);
        let mut rank = 0;
        let mut rows: Vec<usize> = (0..d).collect();
        let mut cols: Vec<usize> = (0..d).collect();
        for step in 0..d {
            let mut best = (0.0, step, step);
            for (ri, &r) in rows.iter().enumerate().skip(step) {
                for (ci, &c) in cols.iter().enumerate().skip(step) {
                    let v = a[r * d + c].norm();
                    if v > best.0 {
                        best = (v, ri, ci);
                    }
                }
            }
            if best.0 <= tol * scale {
                break;
            }
            rows.swap(step, best.1);
            cols.swap(step, best.2);
            let (pr, pc) = (rows[step], cols[step]);
            let piv = a[pr * d + pc];
            for &r in rows.iter().skip(step + 1) {
                let f = a[r * d + pc] / piv;
                for &c in cols.iter().skip(step) {
                    let v = a[pr * d + c];
                    a[r * d + c] -= f * v;
                }
            }
            rank += 1;
        }
        d - rank
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Near-singular pivots are nudged so the solve always returns.
pub(crate) fn solve(a: &CMatrix, b: &[Complex64]) -> Vec<Complex64> {
    let d = a.dim();
    let mut m: Vec<Vec<Complex64>> = (0..d)
        .map(|r| {
            let mut row: Vec<Complex64> = (0..d).map(|c| a.get(r, c)).collect();
            row.push(b[r]);
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm())).unwrap();
        m.swap(col, piv);
        if m[col][col].norm() < 1e-300 {
            m[col][col] = Complex64::new(1e-300, 0.0);
        }
        for r in col + 1..d {
            let f = m[r][col] / m[col][col];
            for c in col..=d {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); d];
    for r in (0..d).rev() {
        let s: Complex64 = (r + 1..d).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][d] - s) / m[r][r];
    }
    x
}
