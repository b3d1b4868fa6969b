use super::eigen::{eigh, eigh_with_basis};
use super::{EigDecomp, Matrix, SymMatrix};
use crate::{Error, Result};

/// Euclidean projection onto the probability simplex `{w ≥ 0, Σw = 1}`.
pub fn project_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::invalid("project_simplex: empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("project_simplex: non-finite entries"));
    }
    let theta = simplex_threshold(v);
    Ok(v.iter().map(|&x| (x - theta).max(0.0)).collect())
}

/// The shift θ with `Σ max(v_i − θ, 0) = 1`.
fn simplex_threshold(v: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &i) in order.iter().enumerate() {
        cumsum += v[i];
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v[i] - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

/// Frobenius-nearest point of the spectrahedron `{X ⪰ 0, tr X = 1}`.
pub fn project_spectrahedron(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eigh(a)?;
    Ok(spectrahedron_from_eig(&eig))
}

/// As [`project_spectrahedron`], warm-starting the eigensolver from `basis`
/// and returning the decomposition for the next call.
pub fn project_spectrahedron_with_basis(
    a: &SymMatrix,
    basis: &Matrix,
) -> Result<(SymMatrix, EigDecomp)> {
    let eig = eigh_with_basis(a, basis)?;
    Ok((spectrahedron_from_eig(&eig), eig))
}

fn spectrahedron_from_eig(eig: &EigDecomp) -> SymMatrix {
    if eig.dim() == 0 {
        return SymMatrix::zeros(0);
    }
    let theta = simplex_threshold(&eig.values);
    let weights: Vec<f64> = eig.values.iter().map(|&x| (x - theta).max(0.0)).collect();
    eig.reconstruct_with(&weights)
}

/// Entrywise `sign(a)·max(|a| − t, 0)`.
pub fn soft_threshold(a: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("soft_threshold: threshold {t} < 0")));
    }
    Ok(a.map(|x| soft_scalar(x, t)))
}

#[inline]
pub(crate) fn soft_scalar(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}
