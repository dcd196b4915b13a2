//! Finite-dimensional representations: nest representations of the
//! semicrossed product, truncated Fock Cuntz–Krieger families, and the norms
//! used to compare them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{arg, Result};

pub mod fock;
pub mod nest;

pub use fock::{
    build_truncated_fock, check_ck_relations, compress_block, semicrossed_image, BasisVector, CKFamily, CkReport,
};
pub use nest::{
    build_colour_rep, decide_tensor_vs_semicrossed, nest_rep_exists, rep_apply, NestRep, TensorDecision,
};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Operator norm, i.e. the largest singular value. Empty matrices have norm 0.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

fn check_rows(mats: &[ComplexMatrix]) -> Result<usize> {
    let rows = mats.first().map_or(0, |m| m.nrows());
    if let Some(m) = mats.iter().find(|m| m.nrows() != rows) {
        return arg(format!("row operator needs equal row counts, got {rows} and {}", m.nrows()));
    }
    Ok(rows)
}

/// Norm of the row operator `[T_1 … T_n]`, as the largest singular value of
/// the horizontal concatenation.
pub fn row_norm(mats: &[ComplexMatrix]) -> Result<f64> {
    let rows = check_rows(mats)?;
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut row = ComplexMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        row.view_mut((0, at), (rows, m.ncols())).copy_from(m);
        at += m.ncols();
    }
    Ok(op_norm(&row))
}

/// Same quantity as [`row_norm`], computed as `‖Σ T_i T_i*‖^{1/2}` through a
/// Hermitian eigendecomposition.
pub fn row_norm_via_gram(mats: &[ComplexMatrix]) -> Result<f64> {
    let rows = check_rows(mats)?;
    if rows == 0 {
        return Ok(0.0);
    }
    let mut gram = ComplexMatrix::zeros(rows, rows);
    for m in mats {
        gram += m * m.adjoint();
    }
    let top = gram.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn norms_of_simple_rows() {
        let col = ComplexMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        assert!((row_norm(std::slice::from_ref(&col)).unwrap() - 1.0).abs() < 1e-15);
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(row_norm(&[z.clone(), z]).unwrap(), 0.0);
        assert!(row_norm(&[col, ComplexMatrix::zeros(3, 1)]).is_err());
        assert_eq!(row_norm(&[]).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn two_routes_agree(entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 18)) {
            let m: Vec<Complex64> = entries.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let a = ComplexMatrix::from_row_slice(3, 3, &m[..9]);
            let b = ComplexMatrix::from_row_slice(3, 3, &m[9..]);
            let mats = [a, b];
            let x = row_norm(&mats).unwrap();
            let y = row_norm_via_gram(&mats).unwrap();
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}
