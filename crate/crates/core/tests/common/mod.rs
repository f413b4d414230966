//! Independent oracles for the acceptance suite.

use num_complex::Complex64;
use wiretap_core::matrix::{submatrix, ComplexMatrix};

/// Cofactor-expansion determinant, independent of the library's LU and
/// Cholesky paths. Exponential cost; callers keep dimensions at 5 or below.
pub fn cofactor_det(m: &ComplexMatrix) -> Complex64 {
    let n = m.nrows();
    assert!(n >= 1 && n <= 5, "cofactor oracle limited to dim 1..=5");
    if n == 1 {
        return m[(0, 0)];
    }
    let mut det = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&x| x != j).collect();
        let minor = submatrix(m, &rows, &cols).expect("indices in range");
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += m[(0, j)] * cofactor_det(&minor) * Complex64::new(sign, 0.0);
    }
    det
}

/// Real log of a cofactor determinant expected to be real positive.
pub fn cofactor_logdet(m: &ComplexMatrix) -> f64 {
    let d = cofactor_det(m);
    assert!(
        d.im.abs() <= 1e-9 * d.norm().max(1.0),
        "determinant of a Hermitian matrix must be real, got {d}"
    );
    assert!(d.re > 0.0, "expected positive determinant, got {d}");
    d.re.ln()
}

/// Print the per-criterion verdict line and fail the test on any violation.
pub fn verdict(number: u32, name: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("acceptance criterion {number} ({name}): PASS");
    } else {
        println!(
            "acceptance criterion {number} ({name}): FAIL — {} violation(s): {}",
            failures.len(),
            failures.join("; ")
        );
        panic!("acceptance criterion {number} ({name}) failed");
    }
}
