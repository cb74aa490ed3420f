//! Dense complex matrix helpers shared by the builders and the Floquet
//! solver. Everything here is backed by nalgebra; the oracles use a
//! separate eigensolver so the two paths never share a diagonalization.

use nalgebra::{linalg::Schur, DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { ZERO })
}

/// Symmetric tridiagonal matrix with `m[n][n+1] = scale * sqrt(n + 1)`.
pub fn sqrt_ladder(n: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let v = real(scale * ((k + 1) as f64).sqrt());
        m[(k, k + 1)] = v;
        m[(k + 1, k)] = v;
    }
    m
}

/// Truncated bosonic annihilation operator.
pub fn annihilation(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = real((k as f64).sqrt());
    }
    a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `a b - b a`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Frobenius norm of `U†U - 1`, an upper bound on the operator-norm defect.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - identity(n)).norm()
}

/// Largest entry of `m - m†` relative to the largest entry of `m`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs_diff(m, &m.adjoint()) / scale
}

pub fn is_hermitian(m: &CMatrix, rel_tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= rel_tol
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `exp(-i θ H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, theta: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -theta * lambda);
        scaled.column_mut(j).apply(|z| *z *= phase);
    }
    scaled * v.adjoint()
}

/// Eigenvalues and orthonormal eigenvectors of a unitary matrix.
///
/// The complex Schur form of a normal matrix is diagonal, so the Schur
/// vectors are eigenvectors and stay orthonormal inside degenerate
/// clusters.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let n = u.nrows();
    let schur = Schur::try_new(u.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values = (0..n).map(|k| t[(k, k)]).collect();
    Ok((values, q))
}

/// Rotate `v` so its largest-magnitude component is real and positive.
pub fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (k, z) in v.iter().enumerate() {
        // ties broken toward the lowest index
        if z.norm() > best_norm + 1e-12 {
            best_norm = z.norm();
            best = k;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = v[best].conj() / best_norm;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// `|⟨a|b⟩|`
pub fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_entries() {
        let m = sqrt_ladder(3, 1.0);
        assert_eq!(m[(0, 1)], real(1.0));
        assert!((m[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m[(0, 2)], ZERO);
        assert!(is_hermitian(&m, 1e-12));
    }

    #[test]
    fn annihilation_lowers() {
        let a = annihilation(4);
        let n = a.adjoint() * &a;
        for k in 0..4 {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn expm_matches_diagonal_phases() {
        let h = diagonal(&[0.0, 1.0, 2.5]);
        let u = expm_hermitian(&h, 0.3);
        for (k, e) in [0.0, 1.0, 2.5].iter().enumerate() {
            assert!((u[(k, k)] - C64::from_polar(1.0, -0.3 * e)).norm() < 1e-14);
        }
    }

    #[test]
    fn unitary_eigen_of_rotated_diagonal() {
        let h = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                real(i as f64 * 0.7)
            } else {
                C64::new(0.1 * (i + j) as f64, 0.05 * (i as f64 - j as f64))
            }
        });
        let u = expm_hermitian(&h, 1.3);
        let (values, vectors) = unitary_eigen(&u).unwrap();
        assert!(unitarity_defect(&vectors) < 1e-12);
        for (k, lambda) in values.iter().enumerate() {
            let v = vectors.column(k).into_owned();
            let r = &u * &v - v * *lambda;
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_eigen_degenerate_cluster_is_orthonormal() {
        let u = diagonal(&[0.2, 0.2, 0.9]).map(|z| C64::from_polar(1.0, z.re));
        let (_, vectors) = unitary_eigen(&u).unwrap();
        assert!(unitarity_defect(&vectors) < 1e-12);
    }

    #[test]
    fn phase_fix_makes_largest_real() {
        let mut v = CVector::from_vec(vec![C64::new(0.1, 0.1), C64::new(0.0, -0.9)]);
        fix_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
    }
}
