use ndarray::Array2;
use num_complex::Complex64;

use super::{canonical_phase, unitarity_defect, MeshError, MeshProgram, Mzi, UNITARITY_TOL};

/// MZI settings that zero `u[row, col]` when `T^dag` is applied from the
/// right on columns `(col, col + 1)`.
fn null_from_right(u: &Array2<Complex64>, row: usize, col: usize) -> (f64, f64) {
    let a = u[[row, col]];
    let b = u[[row, col + 1]];
    let theta = a.norm().atan2(b.norm());
    (theta, a.arg() - b.arg())
}

/// MZI settings that zero `u[row, col]` when `T` is applied from the left on
/// rows `(row - 1, row)`.
fn null_from_left(u: &Array2<Complex64>, row: usize, col: usize) -> (f64, f64) {
    let a = u[[row - 1, col]];
    let b = u[[row, col]];
    let theta = b.norm().atan2(a.norm());
    let phi = std::f64::consts::PI + b.arg() - a.arg();
    (theta, phi)
}

fn apply_left(u: &mut Array2<Complex64>, mzi: &Mzi) {
    let t = mzi.matrix();
    let (i, j) = (mzi.i, mzi.i + 1);
    for c in 0..u.ncols() {
        let (x, y) = (u[[i, c]], u[[j, c]]);
        u[[i, c]] = t[0][0] * x + t[0][1] * y;
        u[[j, c]] = t[1][0] * x + t[1][1] * y;
    }
}

fn apply_right_adjoint(u: &mut Array2<Complex64>, mzi: &Mzi) {
    let t = mzi.matrix();
    let (i, j) = (mzi.i, mzi.i + 1);
    for r in 0..u.nrows() {
        let (x, y) = (u[[r, i]], u[[r, j]]);
        u[[r, i]] = x * t[0][0].conj() + y * t[0][1].conj();
        u[[r, j]] = x * t[1][0].conj() + y * t[1][1].conj();
    }
}

fn mzi(i: usize, theta: f64, phi: f64) -> Mzi {
    Mzi {
        i,
        theta: canonical_phase(theta),
        phi: canonical_phase(phi),
    }
}

/// Rectangular-mesh decomposition, nulling the lower triangle along
/// anti-diagonals from alternating sides.
pub fn decompose(u: &Array2<Complex64>) -> Result<MeshProgram, MeshError> {
    let (rows, cols) = u.dim();
    if rows != cols || rows == 0 {
        return Err(MeshError::NotSquare { rows, cols });
    }
    let defect = unitarity_defect(u);
    if defect.is_nan() || defect > UNITARITY_TOL {
        return Err(MeshError::NotUnitary { defect });
    }
    let n = rows;
    let mut work = u.clone();
    let mut right = Vec::new();
    let mut left = Vec::new();

    for i in 1..n {
        if i % 2 == 1 {
            for j in 0..i {
                let row = n - 1 - j;
                let col = i - j - 1;
                let (theta, phi) = null_from_right(&work, row, col);
                let m = mzi(col, theta, phi);
                apply_right_adjoint(&mut work, &m);
                right.push(m);
            }
        } else {
            for j in 1..=i {
                let row = n + j - i - 1;
                let col = j - 1;
                let (theta, phi) = null_from_left(&work, row, col);
                let m = mzi(row - 1, theta, phi);
                apply_left(&mut work, &m);
                left.push(m);
            }
        }
    }

    // work = L_m..L_1 U R_1^dag..R_n^dag is diagonal, so
    // U = L_1^dag..L_m^dag D R_n..R_1. Commute each L^dag through D.
    let mut diag: Vec<Complex64> = (0..n).map(|k| work[[k, k]]).collect();
    let mut moved = Vec::with_capacity(left.len());
    for m in left.iter().rev() {
        let (d1, d2) = (diag[m.i], diag[m.i + 1]);
        let e = Complex64::from_polar(1.0, -m.phi);
        diag[m.i] = -e * d2;
        moved.push(mzi(m.i, m.theta, (-d1 / d2).arg()));
    }
    // U = D' T'_1 .. T'_m R_n .. R_1; light meets R_1 first.
    let mut mzis = right;
    mzis.extend(moved);

    let output_phases = diag.iter().map(|d| canonical_phase(d.arg())).collect();
    MeshProgram::new(n, mzis, output_phases)
}

/// Matrix realized by a program.
pub fn reconstruct(p: &MeshProgram) -> Array2<Complex64> {
    let mut u = Array2::<Complex64>::eye(p.dimension);
    for m in &p.mzis {
        apply_left(&mut u, m);
    }
    for (k, &alpha) in p.output_phases.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, alpha);
        u.row_mut(k).mapv_inplace(|z| z * phase);
    }
    u
}
