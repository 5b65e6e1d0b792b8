//! Genuine coupling and Friedrichs symmetrizability.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{max_abs, min_sym_eigenvalue, nullspace, singular_values};
use crate::symbols::{symbol_triplet, EquilibriumCoefficients, SymbolFamily};

/// Singular values below this fraction of the largest count as zero.
pub const KERNEL_TOL: f64 = 1e-10;
/// Margins at or below this value count as a coupling failure.
pub const MARGIN_TOL: f64 = 1e-10;

/// Genuine-coupling outcome at one wavenumber.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSample {
    pub xi: f64,
    pub kernel_dim: usize,
    /// Distance from admitting `(rho A0 + A) V = 0` for a kernel vector `V`.
    pub margin: f64,
    pub passed: bool,
    /// Kernel vector attaining the margin.
    pub witness: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub samples: Vec<CouplingSample>,
    pub min_margin: f64,
    pub passed: bool,
}

impl CouplingReport {
    pub fn failures(&self) -> impl Iterator<Item = &CouplingSample> {
        self.samples.iter().filter(|s| !s.passed)
    }
}

fn unit(v: Vector3<f64>) -> Option<Vector3<f64>> {
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Second singular value of `[A0 V, A V]` with unit columns.
fn pair_margin(a0: &Matrix3<f64>, a: &Matrix3<f64>, v: &Vector3<f64>) -> f64 {
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let av = a * v;
    if av.norm() <= MARGIN_TOL * scale {
        // A V = 0: rho = 0 solves the pencil.
        return 0.0;
    }
    let (Some(p), Some(q)) = (unit(a0 * v), unit(av)) else {
        return 0.0;
    };
    let m = DMatrix::from_columns(&[
        DVector::from_column_slice(p.as_slice()),
        DVector::from_column_slice(q.as_slice()),
    ]);
    singular_values(&m)[1]
}

fn coupling_at(family: &dyn SymbolFamily, xi: f64) -> CouplingSample {
    let a0 = family.a0();
    let a = family.a(xi);
    let b = family.b(xi);
    let bm = DMatrix::from_column_slice(3, 3, b.as_slice());
    let bmax = max_abs(&b);
    let kernel = if bmax == 0.0 {
        DMatrix::identity(3, 3)
    } else {
        nullspace(&bm, KERNEL_TOL)
    };
    let d = kernel.ncols();
    let kv = |c: usize| Vector3::new(kernel[(0, c)], kernel[(1, c)], kernel[(2, c)]);

    let (margin, witness) = match d {
        0 => (f64::INFINITY, None),
        1 => {
            let v = kv(0);
            (pair_margin(&a0, &a, &v), Some(v))
        }
        _ => pencil_margin(&a0, &a, &kernel),
    };
    let passed = margin > MARGIN_TOL;
    CouplingSample {
        xi,
        kernel_dim: d,
        margin,
        passed,
        witness: witness.map(|v| [v[0], v[1], v[2]]),
    }
}

/// For a kernel of dimension > 1: with `P = A0 K`, `Q = A K`, candidate
/// multipliers are the real eigenvalues of `-P^+ Q`; the margin is the
/// smallest normalized residual `|(Q + rho P) c|`.
fn pencil_margin(
    a0: &Matrix3<f64>,
    a: &Matrix3<f64>,
    k: &DMatrix<f64>,
) -> (f64, Option<Vector3<f64>>) {
    let a0d = DMatrix::from_column_slice(3, 3, a0.as_slice());
    let ad = DMatrix::from_column_slice(3, 3, a.as_slice());
    let p = &a0d * k;
    let q = &ad * k;
    let Some(pinv) = p.clone().pseudo_inverse(1e-14).ok() else {
        return (0.0, None);
    };
    let r = -(&pinv * &q);
    let scale = max_abs(a).max(max_abs(a0));
    let eig = r.clone().complex_eigenvalues();
    let mut best = (f64::INFINITY, None);
    for lam in eig.iter() {
        if lam.im.abs() > 1e-8 * lam.re.abs().max(1.0) {
            continue;
        }
        let rho = lam.re;
        let pencil = &q + &p * rho;
        let c = match nullspace(&pencil, 1e-8).column_iter().next() {
            Some(c) => c.into_owned(),
            None => {
                let svd = pencil.clone().svd(false, true);
                let vt = svd.v_t.expect("requested");
                let (imin, _) = svd.singular_values.iter().enumerate().fold(
                    (0, f64::INFINITY),
                    |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc },
                );
                vt.row(imin).transpose()
            }
        };
        let res = (&pencil * &c).norm() / (c.norm() * scale);
        if res < best.0 {
            let v = k * &c;
            best = (res, unit(Vector3::new(v[0], v[1], v[2])));
        }
    }
    best
}

/// Checks that no kernel vector of `B(xi)` is an eigenvector of the pencil
/// `rho A0 + A(xi)` at each grid point.
pub fn check_genuine_coupling(
    family: &dyn SymbolFamily,
    xi_grid: &[f64],
) -> Result<CouplingReport> {
    if xi_grid.contains(&0.0) {
        return Err(invalid("xi_grid", "must exclude xi = 0"));
    }
    let samples: Vec<CouplingSample> = xi_grid
        .par_iter()
        .map(|&xi| coupling_at(family, xi))
        .collect();
    let min_margin = samples
        .iter()
        .map(|s| s.margin)
        .fold(f64::INFINITY, f64::min);
    let passed = samples.iter().all(|s| s.passed);
    Ok(CouplingReport {
        samples,
        min_margin,
        passed,
    })
}

/// Outcome of the constrained search for a Friedrichs symmetrizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FriedrichsReport {
    /// Dimension of the space of symmetric `S` meeting every symmetry constraint.
    pub nullspace_dim: usize,
    pub feasible: bool,
    /// A positive definite symmetrizer, when one exists.
    pub symmetrizer: Option<[[f64; 3]; 3]>,
    /// Largest smallest-eigenvalue found over normalized admissible `S`.
    pub best_min_eig: f64,
    /// Diagonal entries forced to vanish on the whole admissible space.
    pub forced_zero_diagonal: Vec<usize>,
    pub certificate: String,
}

const SYM_INDEX: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn sym_from(params: &[f64]) -> Matrix3<f64> {
    let mut s = Matrix3::zeros();
    for (k, &(i, j)) in SYM_INDEX.iter().enumerate() {
        s[(i, j)] = params[k];
        s[(j, i)] = params[k];
    }
    s
}

/// Rows of the linear map `S -> (S D - (S D)^T)_{i<j}`.
fn constraint_rows(d: &Matrix3<f64>) -> Vec<[f64; 6]> {
    let mut rows = vec![[0.0; 6]; 3];
    for k in 0..6 {
        let mut e = [0.0; 6];
        e[k] = 1.0;
        let sd = sym_from(&e) * d;
        let r = sd - sd.transpose();
        for (row, &(i, j)) in rows.iter_mut().zip(&[(0, 1), (0, 2), (1, 2)]) {
            row[k] = r[(i, j)];
        }
    }
    rows
}

fn normalize(s: Matrix3<f64>) -> Matrix3<f64> {
    let n = s.norm();
    if n > 0.0 {
        s / n
    } else {
        s
    }
}

/// Searches for a positive definite symmetric `S` with `S A0` and every
/// `S D_k` symmetric.
pub fn friedrichs_search(a0: &Matrix3<f64>, ds: &[Matrix3<f64>]) -> FriedrichsReport {
    let mut rows: Vec<[f64; 6]> = constraint_rows(a0);
    for d in ds {
        rows.extend(constraint_rows(d));
    }
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let flat: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| x / scale))
        .collect();
    let m = DMatrix::from_row_slice(rows.len(), 6, &flat);
    let basis = nullspace(&m, 1e-10);
    let dim = basis.ncols();
    let mats: Vec<Matrix3<f64>> = (0..dim)
        .map(|c| sym_from(basis.column(c).as_slice()))
        .collect();

    if dim == 0 {
        return FriedrichsReport {
            nullspace_dim: 0,
            feasible: false,
            symmetrizer: None,
            best_min_eig: 0.0,
            forced_zero_diagonal: vec![0, 1, 2],
            certificate: "the symmetry constraints admit only S = 0".into(),
        };
    }

    let forced: Vec<usize> = (0..3)
        .filter(|&i| mats.iter().all(|s| s[(i, i)].abs() <= 1e-12))
        .collect();

    let (best, best_eig) = maximize_min_eig(&mats);
    let feasible = best_eig > 1e-10;
    let certificate = if feasible {
        format!("positive definite symmetrizer found, smallest eigenvalue {best_eig:.3e}")
    } else if !forced.is_empty() {
        format!("diagonal entries {forced:?} vanish on every admissible S")
    } else {
        format!("no admissible S has a positive smallest eigenvalue (best {best_eig:.3e})")
    };
    FriedrichsReport {
        nullspace_dim: dim,
        feasible,
        symmetrizer: feasible.then(|| {
            let s = best;
            [
                [s[(0, 0)], s[(0, 1)], s[(0, 2)]],
                [s[(1, 0)], s[(1, 1)], s[(1, 2)]],
                [s[(2, 0)], s[(2, 1)], s[(2, 2)]],
            ]
        }),
        best_min_eig: best_eig,
        forced_zero_diagonal: forced,
        certificate,
    }
}

/// Maximizes the smallest eigenvalue of the normalized combination
/// `sum c_i S_i` over unit `c` by multi-start coordinate ascent.
fn maximize_min_eig(mats: &[Matrix3<f64>]) -> (Matrix3<f64>, f64) {
    let dim = mats.len();
    let eval = |c: &[f64]| {
        let s = normalize(c.iter().zip(mats).map(|(w, m)| m * *w).sum());
        (s, min_sym_eigenvalue(&s))
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; dim];
            c[i] = sign;
            starts.push(c);
        }
    }
    // Candidate from the trace direction: components of the identity.
    let id: Vec<f64> = mats.iter().map(|m| m.trace()).collect();
    if id.iter().any(|x| *x != 0.0) {
        starts.push(id.clone());
        starts.push(id.iter().map(|x| -x).collect());
    }
    let mut best = (Matrix3::zeros(), f64::NEG_INFINITY);
    for start in starts {
        let mut c = start;
        let mut cur = eval(&c).1;
        let mut step = 0.5;
        while step > 1e-9 {
            let mut improved = false;
            for i in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut t = c.clone();
                    t[i] += sign * step;
                    let v = eval(&t).1;
                    if v > cur {
                        c = t;
                        cur = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur > best.1 {
            best = (eval(&c).0, cur);
        }
    }
    best
}

/// Friedrichs check for `(A0, D1, D2, D3)` at an equilibrium.
pub fn check_friedrichs(coeffs: &EquilibriumCoefficients) -> FriedrichsReport {
    let t = symbol_triplet(coeffs);
    friedrichs_search(&t.a0, &[t.d1, t.d2, t.d3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipativity::TransformedTriplet;
    use crate::grid::symmetric_log_grid;
    use crate::symbols::SymbolTriplet;
    use crate::thermo::{IdealGas, State};

    fn coeffs(kappa0: f64) -> EquilibriumCoefficients {
        let eos = IdealGas {
            kappa0,
            ..IdealGas::REFERENCE
        }
        .build_limit()
        .unwrap();
        EquilibriumCoefficients::new(&eos, &State::new(1.0, 0.0, 1.0))
    }

    fn grid() -> Vec<f64> {
        symmetric_log_grid(1e-3, 1e3, 400)
    }

    #[test]
    fn nsfk_is_genuinely_coupled() {
        let c = coeffs(1.0);
        let r = check_genuine_coupling(&symbol_triplet(&c), &grid()).unwrap();
        assert!(r.passed);
        assert!(r.min_margin > 0.0);
        assert!(r.samples.iter().all(|s| s.kernel_dim == 1));
        let t = check_genuine_coupling(&TransformedTriplet::new(&c), &grid()).unwrap();
        assert!(t.passed);
    }

    #[test]
    fn nsf_is_genuinely_coupled() {
        let r = check_genuine_coupling(&symbol_triplet(&coeffs(0.0)), &grid()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn no_dissipation_is_not_coupled() {
        let a0 = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0));
        let t = SymbolTriplet {
            a0,
            d1: a0,
            d2: Matrix3::zeros(),
            d3: Matrix3::zeros(),
        };
        let r = check_genuine_coupling(&t, &grid()).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures().count(), grid().len());
        assert!(r.samples[0].witness.is_some());
    }

    #[test]
    fn zero_wavenumber_rejected() {
        let c = coeffs(1.0);
        assert!(check_genuine_coupling(&symbol_triplet(&c), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn friedrichs_nsfk_infeasible() {
        let r = check_friedrichs(&coeffs(1.0));
        assert!(!r.feasible);
        assert_eq!(r.nullspace_dim, 0);
    }

    #[test]
    fn friedrichs_nsf_feasible() {
        let c = coeffs(0.0);
        let r = check_friedrichs(&c);
        assert!(r.feasible, "{}", r.certificate);
        let s = Matrix3::from_fn(|i, j| r.symmetrizer.unwrap()[i][j]);
        assert!(min_sym_eigenvalue(&(s * c.a0)) > 0.0);
        assert!(crate::linalg::asymmetry(&(s * c.a1)) < 1e-12);
    }

    #[test]
    fn friedrichs_symmetric_hyperbolic() {
        let d1 = Matrix3::new(1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, 3.0);
        let r = friedrichs_search(
            &Matrix3::identity(),
            &[d1, Matrix3::zeros(), Matrix3::zeros()],
        );
        assert!(r.feasible);
        assert!(r.best_min_eig > 0.0);
    }
}
