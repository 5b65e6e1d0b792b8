//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type CMatrix3 = Matrix3<Complex64>;
pub type CVector3 = Vector3<Complex64>;

/// Largest absolute entry.
pub fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// `max |m - m^T|`.
pub fn asymmetry(m: &Matrix3<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Symmetric part `(m + m^T)/2`.
pub fn sym(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of the symmetric part, ascending.
pub fn sym_eigenvalues(m: &Matrix3<f64>) -> [f64; 3] {
    let e = SymmetricEigen::new(sym(m)).eigenvalues;
    let mut v = [e[0], e[1], e[2]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_sym_eigenvalue(m: &Matrix3<f64>) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Orthonormal basis of the numerical nullspace of `a` (columns), using
/// singular values below `rel_tol * sigma_max` as zero.
pub fn nullspace(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    // Pad with zero rows so that the SVD returns a full right basis.
    let mut padded = DMatrix::<f64>::zeros(a.nrows().max(n), n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, s| m.max(*s));
    let cols: Vec<_> = (0..n)
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax.max(f64::MIN_POSITIVE))
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Singular values, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a complex 3x3 matrix from its Schur form.
pub fn complex_eigenvalues(m: &CMatrix3) -> Option<[Complex64; 3]> {
    let t = m.schur().unpack().1;
    let v = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    v.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(v)
}

/// Eigenvalues and unit eigenvectors (columns) of a complex 3x3 matrix.
///
/// Eigenvectors come from back substitution on the Schur factor; `None` is
/// returned when two eigenvalues coincide to within `sep_tol` relative to
/// `|m|`, where the substitution breaks down.
pub fn complex_eigen(m: &CMatrix3, sep_tol: f64) -> Option<(CVector3, CMatrix3)> {
    let (q, t) = m.schur().unpack();
    let scale = m
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    let lam = CVector3::new(t[(0, 0)], t[(1, 1)], t[(2, 2)]);
    let mut y = CMatrix3::zeros();
    for k in 0..3 {
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let d = t[(j, j)] - t[(k, k)];
            if d.norm() <= sep_tol * scale {
                return None;
            }
            y[(j, k)] = -acc / d;
        }
    }
    let mut v = q * y;
    for k in 0..3 {
        let n = v.column(k).norm();
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        v.column_mut(k).unscale_mut(n);
    }
    Some((lam, v))
}

/// Converts a real matrix to complex.
pub fn complexify(m: &Matrix3<f64>) -> CMatrix3 {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let k = nullspace(&a, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).norm() < 1e-12);
    }

    #[test]
    fn nullspace_full_rank_is_empty() {
        let a = DMatrix::<f64>::identity(3, 3);
        assert_eq!(nullspace(&a, 1e-12).ncols(), 0);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = CMatrix3::new(
            Complex64::new(1.0, 0.5),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.0, 0.2),
            Complex64::new(0.1, 0.0),
            Complex64::new(2.5, 0.0),
        );
        let (lam, v) = complex_eigen(&m, 1e-12).unwrap();
        for k in 0..3 {
            let r = m * v.column(k) - v.column(k) * lam[k];
            assert!(r.norm() < 1e-12);
        }
        let ev = complex_eigenvalues(&m).unwrap();
        let trace: Complex64 = ev.iter().sum();
        assert!((trace - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn symmetric_helpers() {
        let m = Matrix3::new(2.0, 1.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(asymmetry(&m), 1.0);
        let e = sym_eigenvalues(&m);
        assert!(e[0] <= e[1] && e[1] <= e[2]);
        assert!((min_sym_eigenvalue(&m) - 1.0).abs() < 1e-14);
    }
}
