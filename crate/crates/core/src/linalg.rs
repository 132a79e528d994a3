//! Dense symmetric matrices and their eigendecomposition.
//!
//! The solver reduces the matrix to tridiagonal form with Householder
//! reflections and then runs implicitly shifted QL iterations on the
//! tridiagonal (the EISPACK `tred2`/`tql2` pair). Eigenvectors are carried as
//! rows so every plane rotation touches two contiguous slices.

use crate::error::{Error, Result};

/// Relative size below which an off-diagonal entry counts as zero.
const OFFDIAG_TOL: f64 = 1e-12;
/// Total QL sweeps allowed, per unit of matrix order.
const SWEEPS_PER_ORDER: usize = 200;
/// Relative tolerance for grouping eigenvalues as degenerate.
const DEGENERATE_TOL: f64 = 1e-10;

/// Dense symmetric matrix, full row-major storage kept symmetric on write.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from rows, rejecting anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Argument(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                if rows[j][i] != x {
                    return Err(Error::Argument(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                m.data[i * n + j] = x;
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets entries (i,j) and (j,i).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues in ascending order with unit eigenvectors, `vectors[i]`
/// belonging to `values[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖A v − λ v‖∞` for pair `i`.
    pub fn residual(&self, a: &SymmetricMatrix, i: usize) -> f64 {
        let v = &self.vectors[i];
        a.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(av, x)| (av - self.values[i] * x).abs())
            .fold(0.0, f64::max)
    }
}

/// Householder reflector `I − β v vᵀ` acting on indices `offset..`.
struct Reflector {
    offset: usize,
    beta: f64,
    v: Vec<f64>,
}

/// Reduces `a` to tridiagonal form in place. Returns the diagonal, the
/// subdiagonal (`e[i]` couples `i` and `i+1`, `e[n-1] = 0`) and the
/// reflectors whose product `Q` satisfies `A = Q T Qᵀ`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let mut e = vec![0.0; n];
    let mut reflectors = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let off = k + 1;
        let len = n - off;
        let x = &a[k * n + off..(k + 1) * n];
        let tail: f64 = x[1..].iter().map(|t| t * t).sum();
        if tail == 0.0 {
            e[k] = x[0];
            continue;
        }
        let sigma = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] > 0.0 { -sigma } else { sigma };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let beta = 2.0 / (v[0] * v[0] + tail);
        e[k] = alpha;

        // p = β S v over the trailing block S.
        let mut p: Vec<f64> = (0..len)
            .map(|i| beta * dot(&a[(off + i) * n + off..(off + i + 1) * n], &v))
            .collect();
        let kc = 0.5 * beta * dot(&p, &v);
        for (pi, vi) in p.iter_mut().zip(&v) {
            *pi -= kc * vi;
        }
        for i in 0..len {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i + 1) * n];
            for ((s, &vj), &wj) in row.iter_mut().zip(&v).zip(&p) {
                *s -= vi * wj + wi * vj;
            }
        }
        reflectors.push(Reflector { offset: off, beta, v });
    }
    if n >= 2 {
        e[n - 2] = a[(n - 2) * n + n - 1];
    }
    let d = (0..n).map(|i| a[i * n + i]).collect();
    (d, e, reflectors)
}

/// Forms `Qᵀ` row-major, so row `j` holds column `j` of `Q`.
fn accumulate_transpose(n: usize, reflectors: &[Reflector]) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    for r in reflectors.iter().rev() {
        let off = r.offset;
        for row in off..n {
            let slice = &mut m[row * n + off..(row + 1) * n];
            let s = r.beta * dot(slice, &r.v);
            if s != 0.0 {
                for (x, vj) in slice.iter_mut().zip(&r.v) {
                    *x -= s * vj;
                }
            }
        }
    }
    m
}

/// Implicit QL on a symmetric tridiagonal. When `z` is given, its rows are
/// rotated along with the iteration so that row `i` ends up as the
/// eigenvector of `d[i]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let budget = SWEEPS_PER_ORDER * n;
    let mut sweeps = 0;
    let mut shift = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > OFFDIAG_TOL * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > budget {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: sweeps - 1,
                        residual: e[l].abs(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                shift += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    let r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= OFFDIAG_TOL * tst1 {
                    break;
                }
            }
        }
        d[l] += shift;
        e[l] = 0.0;
    }
    Ok(())
}

/// Flips `v` so that its largest-magnitude entry is positive. Entries within
/// a relative `1e-10` of the maximum count as tied; the lowest index decides.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-10))
        .expect("maximum is attained");
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// All eigenvalues, ascending.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = a.order();
    let mut work = a.data.clone();
    let (mut d, mut e, _) = tridiagonalize(&mut work, n);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Full eigendecomposition with ascending eigenvalues and sign-fixed
/// eigenvectors. Within a degenerate cluster, vectors are ordered
/// lexicographically (descending).
pub fn symmetric_eigen(a: &SymmetricMatrix) -> Result<EigenSystem> {
    let n = a.order();
    let mut work = a.data.clone();
    let (mut d, mut e, reflectors) = tridiagonalize(&mut work, n);
    drop(work);
    let mut z = accumulate_transpose(n, &reflectors);
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let mut pairs: Vec<(f64, Vec<f64>)> = order
        .into_iter()
        .map(|i| {
            let mut v = z[i * n..(i + 1) * n].to_vec();
            fix_sign(&mut v);
            (d[i], v)
        })
        .collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && pairs[end].0 - pairs[end - 1].0 <= DEGENERATE_TOL * pairs[end].0.abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| {
                b.1.iter()
                    .zip(&a.1)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        start = end;
    }

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenSystem { values, vectors })
}

/// The `m` algebraically smallest eigenpairs.
pub fn smallest_eigenpairs(a: &SymmetricMatrix, m: usize) -> Result<EigenSystem> {
    if m == 0 {
        return Err(Error::Argument("number of eigenpairs must be positive".into()));
    }
    if m > a.order() {
        return Err(Error::Argument(format!(
            "requested {m} eigenpairs from a matrix of order {}",
            a.order()
        )));
    }
    let mut sys = symmetric_eigen(a)?;
    sys.values.truncate(m);
    sys.vectors.truncate(m);
    Ok(sys)
}
