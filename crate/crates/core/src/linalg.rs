//! Dense complex matrix helpers shared by the operator and spectrum code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖A − B‖_F, an upper bound for the operator-norm distance.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// ‖M*M − I‖_F.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let g = m.adjoint() * m;
    distance(&g, &CMatrix::identity(n, n))
}

/// Frobenius inner product ⟨a, b⟩ = Σ conj(a)·b.
pub fn inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Smallest ‖a − λb‖ over unit scalars λ, with the minimizing λ.
pub fn phase_distance(a: &CVector, b: &CVector) -> (f64, Complex64) {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let lambda = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let d = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max);
    (d, lambda)
}

/// Same as [`phase_distance`] for matrices: max entry deviation after the
/// best unit scalar.
pub fn matrix_phase_distance(a: &CMatrix, b: &CMatrix) -> (f64, Complex64) {
    let overlap = inner(b, a);
    let lambda = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let d = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max);
    (d, lambda)
}

pub fn norm_sqr(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Writes one row per line with entries formatted `re,im` and separated by a
/// single space.
pub fn write_matrix<W: std::io::Write>(w: &mut W, m: &CMatrix) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:e},{:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Parses the format produced by [`write_matrix`].
pub fn read_matrix(text: &str) -> Result<CMatrix, String> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split_whitespace()
                .map(|tok| {
                    let (re, im) = tok.split_once(',').ok_or_else(|| format!("bad entry {tok:?}"))?;
                    let re = re.parse::<f64>().map_err(|e| e.to_string())?;
                    let im = im.parse::<f64>().map_err(|e| e.to_string())?;
                    Ok(Complex64::new(re, im))
                })
                .collect::<Result<Vec<_>, String>>()
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err("ragged matrix".into());
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}
