//! Small dense linear-algebra helpers on top of nalgebra: singular values,
//! numerical rank and Gram-Schmidt on spinor-homs.

use nalgebra::DMatrix;

use crate::spinor_hom::SpinorHom;

/// Singular values of a real matrix given by rows, sorted descending.
pub fn singular_values_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    singular_values(&m)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values of the 12×k matrix whose columns are the real coordinates
/// of `vectors`.
pub fn spinor_hom_singular_values(vectors: &[SpinorHom]) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.to_reals().to_vec()).collect();
    singular_values_rows(&rows)
}

/// Number of singular values with `σ_k > rel_tol · σ_max`.
pub fn numerical_rank(sv: &[f64], rel_tol: f64) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

/// Modified Gram-Schmidt for the inner product `½ Re tr(AB*)`. Vectors that
/// become smaller than `tol` relative to their input norm are dropped.
pub fn gram_schmidt(vectors: &[SpinorHom], tol: f64) -> Vec<SpinorHom> {
    let mut out: Vec<SpinorHom> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n0 = v.norm();
        let mut w = *v;
        for u in &out {
            w = w - u.scale(w.inner(u));
        }
        let n = w.norm();
        if n > tol * n0.max(f64::MIN_POSITIVE) {
            out.push(w.scale(1.0 / n));
        }
    }
    out
}

/// Component of `v` orthogonal to the span of `basis` (assumed orthonormal).
pub fn reject(v: &SpinorHom, orthonormal: &[SpinorHom]) -> SpinorHom {
    let mut w = *v;
    for u in orthonormal {
        w = w - u.scale(w.inner(u));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_diagonal() {
        let rows = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let sv = singular_values_rows(&rows);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&sv, 1e-10), 2);
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let a = SpinorHom::real_basis(0);
        let b = SpinorHom::real_basis(5);
        let c = a.scale(2.0) - b;
        let q = gram_schmidt(&[a, b, c], 1e-10);
        assert_eq!(q.len(), 2);
        assert!(q[0].inner(&q[1]).abs() < 1e-15);
        assert!((q[1].norm() - 1.0).abs() < 1e-15);
    }
}
