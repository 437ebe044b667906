//! Exact rational arithmetic used as an independent test oracle: rank by
//! Gaussian elimination, characteristic polynomials by Faddeev-LeVerrier, and
//! inertia of symmetric matrices by Descartes' rule of signs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Dense square or rectangular rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&v| q(v)).collect(),
        }
    }

    /// Exact conversion of every finite `f64` entry.
    pub fn from_f64(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows
                .iter()
                .flatten()
                .map(|&v| Q::from_float(v).expect("finite entry"))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j) + a * o.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).to_f64().expect("representable"))
                    .collect()
            })
            .collect()
    }
}

/// Exact rank by fraction-based Gaussian elimination.
pub fn rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..a.cols {
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        for j in 0..a.cols {
            a.data.swap(r * a.cols + j, p * a.cols + j);
        }
        let pivot = a.get(r, c).clone();
        for i in r + 1..a.rows {
            let f = a.get(i, c) / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in c..a.cols {
                let v = a.get(i, j) - &f * a.get(r, j);
                a.set(i, j, v);
            }
        }
        r += 1;
        if r == a.rows {
            break;
        }
    }
    r
}

/// Coefficients `[1, c₁, …, cₙ]` of `det(xI - M) = xⁿ + c₁xⁿ⁻¹ + … + cₙ`.
pub fn char_poly(m: &QMatrix) -> Vec<Q> {
    assert_eq!(m.rows, m.cols, "square matrix required");
    let n = m.rows;
    let mut coeffs = vec![Q::one()];
    let mut mk = QMatrix::zeros(n, n);
    let id = QMatrix::identity(n);
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{k-1} I), c_k = -tr(M_k) / k
        let prev = mk.add(&id.scale(coeffs.last().expect("non-empty")));
        mk = m.mul(&prev);
        let ck = -mk.trace() / q(k as i64);
        coeffs.push(ck);
    }
    coeffs
}

fn sign_changes(seq: impl Iterator<Item = Q>) -> usize {
    let signs: Vec<bool> = seq.filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `(n_plus, n_minus, n_zero)` of a symmetric matrix. All eigenvalues are
/// real, so Descartes' rule of signs counts positive roots exactly.
pub fn inertia(m: &QMatrix) -> (usize, usize, usize) {
    assert_eq!(*m, m.transpose(), "symmetric matrix required");
    let p = char_poly(m);
    let n = m.rows;
    let n_zero = p.iter().rev().take_while(|c| c.is_zero()).count();
    let n_plus = sign_changes(p.iter().cloned());
    // p(-x): coefficient of x^{n-k} picks up (-1)^{n-k}.
    let n_minus = sign_changes(p.iter().enumerate().map(|(k, c)| {
        if (n - k) % 2 == 1 {
            -c.clone()
        } else {
            c.clone()
        }
    }));
    (n_plus, n_minus, n_zero)
}

pub fn is_psd(m: &QMatrix) -> bool {
    inertia(m).1 == 0
}

pub fn lowner_leq(a: &QMatrix, b: &QMatrix) -> bool {
    is_psd(&b.sub(a))
}

/// `rank(B - A) = rank(B) - rank(A)`.
pub fn minus_leq(a: &QMatrix, b: &QMatrix) -> bool {
    let (ra, rb, rd) = rank_triple(a, b);
    rb >= ra && rd == rb - ra
}

/// `(rank A, rank B, rank(B - A))`.
pub fn rank_triple(a: &QMatrix, b: &QMatrix) -> (usize, usize, usize) {
    (rank(a), rank(b), rank(&b.sub(a)))
}

/// `AᵗA = AᵗB` and `AAᵗ = BAᵗ`.
pub fn star_leq(a: &QMatrix, b: &QMatrix) -> bool {
    let at = a.transpose();
    at.mul(a) == at.mul(b) && a.mul(&at) == b.mul(&at)
}
