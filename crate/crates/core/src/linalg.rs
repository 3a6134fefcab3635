use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending, each
/// eigenvector column signed so its largest-magnitude component is positive.
pub(crate) struct SortedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub(crate) fn sym_eigen(m: DMatrix<f64>) -> SortedEigen {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        fix_phase(v.as_mut_slice());
        vectors.set_column(col, &v);
    }
    SortedEigen { values, vectors }
}

/// Flips the sign of `v` so that its largest-magnitude entry is positive.
/// Ties resolve to the lowest index.
pub(crate) fn fix_phase(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-8) {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
