//! Reference routines for the integration tests. None of them call into the
//! library's linear algebra.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Cyclic Jacobi on a real symmetric matrix; eigenvalues in descending order.
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    vals
}

/// Eigenvalues of a Hermitian matrix through the real embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is the original one doubled.
pub fn hermitian_eigs(h: &DMatrix<C64>) -> Vec<f64> {
    let n = h.nrows();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    jacobi_symmetric(a).into_iter().step_by(2).collect()
}

pub fn oracle_gap(h: &DMatrix<C64>) -> f64 {
    1.0 - hermitian_eigs(h)[1]
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::from_element(ar * br, ac * bc, c(0.0, 0.0));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn pauli(letter: char) -> DMatrix<C64> {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match letter {
        'I' => [one, o, o, one],
        'X' => [o, one, one, o],
        'Y' => [o, -i, i, o],
        'Z' => [one, o, o, -one],
        _ => panic!("bad letter"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense matrix of a sign times a Pauli word such as "XZZ".
pub fn pauli_word(sign: f64, word: &str) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, c(sign, 0.0));
    for ch in word.chars() {
        m = kron(&m, &pauli(ch));
    }
    m
}

/// `(𝟙 + sign·word)/2`.
pub fn pauli_plus(sign: f64, word: &str) -> DMatrix<C64> {
    let g = pauli_word(sign, word);
    let n = g.nrows();
    (DMatrix::identity(n, n) + g) * c(0.5, 0.0)
}

pub fn projector(v: &[C64]) -> DMatrix<C64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Bell strategy aggregate built from Pauli projectors directly.
pub fn bell_omega() -> DMatrix<C64> {
    (pauli_plus(1.0, "XX") + pauli_plus(-1.0, "YY") + pauli_plus(1.0, "ZZ")) * c(1.0 / 3.0, 0.0)
}
