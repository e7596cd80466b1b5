//! Generic commutative-ring operations: a small trait so that matrix
//! routines (products, division-free determinants) work uniformly over
//! Laurent polynomials, truncated symmetric series and quantum polynomials.

/// Commutative ring element with contextual zero/one.
///
/// Values carry their own ring context (rank `n`, truncation degree, ...),
/// so `czero`/`cone` are instance methods that produce constants compatible
/// with `self`.
pub trait CRing: Clone {
    fn czero(&self) -> Self;
    fn cone(&self) -> Self;
    fn cadd(&self, other: &Self) -> Self;
    fn csub(&self, other: &Self) -> Self;
    fn cmul(&self, other: &Self) -> Self;
    fn cneg(&self) -> Self;
    fn cis_zero(&self) -> bool;
}

pub type Matrix<R> = Vec<Vec<R>>;

pub fn mat_mul<R: CRing>(a: &Matrix<R>, b: &Matrix<R>) -> Matrix<R> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    assert!(a.iter().all(|r| r.len() == inner));
    let zero = a[0][0].czero();
    let mut out = vec![vec![zero; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].cis_zero() {
                continue;
            }
            for j in 0..cols {
                if b[k][j].cis_zero() {
                    continue;
                }
                out[i][j] = out[i][j].cadd(&a[i][k].cmul(&b[k][j]));
            }
        }
    }
    out
}

pub fn mat_identity<R: CRing>(sample: &R, n: usize) -> Matrix<R> {
    let mut out = vec![vec![sample.czero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = sample.cone();
    }
    out
}

pub fn mat_pow<R: CRing>(m: &Matrix<R>, e: usize) -> Matrix<R> {
    let n = m.len();
    let mut acc = mat_identity(&m[0][0], n);
    for _ in 0..e {
        acc = mat_mul(&acc, m);
    }
    acc
}

/// Submatrix on the given (0-based) row and column index lists.
pub fn submatrix<R: Clone>(m: &Matrix<R>, rows: &[usize], cols: &[usize]) -> Matrix<R> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

/// Characteristic-polynomial coefficients by the Berkowitz algorithm.
///
/// Returns `v` with `det(x·E − M) = Σ_j v[j]·x^{n−j}` (so `v[0] = 1`).
/// Division-free, hence valid over any commutative ring.
pub fn charpoly_berkowitz<R: CRing>(m: &Matrix<R>) -> Vec<R> {
    let n = m.len();
    let zero = m[0][0].czero();
    let one = m[0][0].cone();
    if n == 0 {
        return vec![one];
    }
    let mut v = vec![one.clone(), m[0][0].cneg()];
    for i in 1..n {
        // Row vector R = m[i][0..i], column C = m[0..i][i], block A = m[0..i][0..i].
        // s[j] = R · A^j · C for j = 0..i-1.
        let mut s = Vec::with_capacity(i);
        let mut vcol: Vec<R> = (0..i).map(|r| m[r][i].clone()).collect();
        for _ in 0..i {
            let mut dot = zero.clone();
            for (k, vk) in vcol.iter().enumerate() {
                dot = dot.cadd(&m[i][k].cmul(vk));
            }
            s.push(dot);
            let mut next = vec![zero.clone(); i];
            for (r, slot) in next.iter_mut().enumerate() {
                for (k, vk) in vcol.iter().enumerate() {
                    *slot = slot.cadd(&m[r][k].cmul(vk));
                }
            }
            vcol = next;
        }
        // Toeplitz update: new[p] = Σ_q T[p][q]·v[q] with
        // T[p][p] = 1, T[p+1][p] = −m[i][i], T[p+j][p] = −s[j−2] for j ≥ 2.
        let mut new_v = vec![zero.clone(); i + 2];
        for (q, vq) in v.iter().enumerate() {
            if vq.cis_zero() {
                continue;
            }
            new_v[q] = new_v[q].cadd(vq);
            new_v[q + 1] = new_v[q + 1].csub(&m[i][i].cmul(vq));
            for (j, sj) in s.iter().enumerate() {
                let p = q + j + 2;
                if p <= i + 1 {
                    new_v[p] = new_v[p].csub(&sj.cmul(vq));
                }
            }
        }
        v = new_v;
    }
    v
}

/// Division-free determinant (Berkowitz).
pub fn det<R: CRing>(m: &Matrix<R>) -> R {
    let n = m.len();
    if n == 0 {
        panic!("determinant of empty matrix needs a ring context");
    }
    let cp = charpoly_berkowitz(m);
    // det = (−1)^n · p(0) = (−1)^n · v[n]
    if n % 2 == 0 {
        cp[n].clone()
    } else {
        cp[n].cneg()
    }
}

/// Principal minor `det(M^{[1..i]}_{[1..i]})` with 1-based size `i`.
pub fn principal_minor<R: CRing>(m: &Matrix<R>, i: usize, one_ctx: &R) -> R {
    if i == 0 {
        return one_ctx.cone();
    }
    let idx: Vec<usize> = (0..i).collect();
    det(&submatrix(m, &idx, &idx))
}

/// Inverse of an upper-triangular matrix whose diagonal entries are units
/// supplied through `inv_diag`. Uses the nilpotent expansion
/// `(E + U)^{-1} = E − U + U² − …`.
pub fn invert_upper_triangular<R: CRing>(m: &Matrix<R>, inv_diag: &[R]) -> Matrix<R> {
    let n = m.len();
    // D^{-1}·M = E + U with U strictly upper-triangular.
    let mut u = vec![vec![m[0][0].czero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            u[i][j] = inv_diag[i].cmul(&m[i][j]);
        }
    }
    let id = mat_identity(&m[0][0], n);
    let mut acc = id.clone();
    let mut pow = id.clone();
    for step in 1..n {
        pow = mat_mul(&pow, &u);
        let sign = step % 2 == 1;
        for i in 0..n {
            for j in 0..n {
                acc[i][j] = if sign {
                    acc[i][j].csub(&pow[i][j])
                } else {
                    acc[i][j].cadd(&pow[i][j])
                };
            }
        }
    }
    // (E + U)^{-1} · D^{-1}
    let mut out = acc;
    for row in out.iter_mut() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = entry.cmul(&inv_diag[j]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    impl CRing for i64 {
        fn czero(&self) -> Self {
            0
        }
        fn cone(&self) -> Self {
            1
        }
        fn cadd(&self, other: &Self) -> Self {
            self + other
        }
        fn csub(&self, other: &Self) -> Self {
            self - other
        }
        fn cmul(&self, other: &Self) -> Self {
            self * other
        }
        fn cneg(&self) -> Self {
            -self
        }
        fn cis_zero(&self) -> bool {
            *self == 0
        }
    }

    fn det_leibniz(m: &Matrix<i64>) -> i64 {
        let n = m.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0;
        permute(&mut perm, 0, &mut |p, sign| {
            let mut prod = 1;
            for (i, &j) in p.iter().enumerate() {
                prod *= m[i][j];
            }
            total += sign * prod;
        });
        total
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize], i64)) {
        let n = p.len();
        if k == n {
            let mut sign = 1;
            for i in 0..n {
                for j in (i + 1)..n {
                    if p[i] > p[j] {
                        sign = -sign;
                    }
                }
            }
            f(p, sign);
            return;
        }
        for i in k..n {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn berkowitz_matches_leibniz() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 7) as i64 - 3
        };
        for n in 1..=5 {
            for _ in 0..20 {
                let m: Matrix<i64> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                assert_eq!(det(&m), det_leibniz(&m), "n={n} matrix {m:?}");
            }
        }
    }

    #[test]
    fn charpoly_traces() {
        let m: Matrix<i64> = vec![vec![2, 1], vec![3, 4]];
        // x^2 - 6x + 5
        assert_eq!(charpoly_berkowitz(&m), vec![1, -6, 5]);
    }

    #[test]
    fn triangular_inverse() {
        let m: Matrix<i64> = vec![vec![1, 2, 3], vec![0, 1, 4], vec![0, 0, 1]];
        let inv = invert_upper_triangular(&m, &[1, 1, 1]);
        assert_eq!(mat_mul(&m, &inv), mat_identity(&1i64, 3));
    }
}
