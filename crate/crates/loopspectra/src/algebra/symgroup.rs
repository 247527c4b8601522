use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::{AlgebraError, Result};

/// An integer partition in weakly decreasing row-length notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<u8>);

impl Partition {
    pub fn new(rows: Vec<u8>) -> Result<Self> {
        let p = Partition(rows);
        p.validate()?;
        Ok(p)
    }

    /// The empty partition (the `λ = []` sector).
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.0.windows(2) {
            if w[0] < w[1] {
                return Err(AlgebraError::InvalidPartition(format!(
                    "rows not weakly decreasing: {self}"
                )));
            }
        }
        if self.0.iter().any(|&r| r == 0) {
            return Err(AlgebraError::InvalidPartition("zero-length row".into()));
        }
        Ok(())
    }

    pub fn rows(&self) -> &[u8] {
        &self.0
    }

    /// Number of boxes `2j`.
    pub fn sum(&self) -> u32 {
        self.0.iter().map(|&r| r as u32).sum()
    }

    /// Parse `"[2,1]"`, `"21"` or `""`/`"[]"` forms.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
        if inner.is_empty() {
            return Ok(Partition::empty());
        }
        let rows: Vec<u8> = if inner.contains(',') {
            inner
                .split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| AlgebraError::InvalidPartition(e.to_string()))?
        } else {
            inner
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| AlgebraError::InvalidPartition(format!("bad digit {c}")))
                })
                .collect::<Result<_>>()?
        };
        Partition::new(rows)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// A permutation of through-line order indices, stored as images
/// (`perm[old_rank] = new_rank`). The identity is stored as an empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ThroughPerm(Vec<u8>);

impl ThroughPerm {
    pub fn identity() -> Self {
        ThroughPerm(Vec::new())
    }

    pub fn from_images(images: Vec<u8>) -> Self {
        let is_id = images.iter().enumerate().all(|(i, &v)| v as usize == i);
        if is_id {
            ThroughPerm::identity()
        } else {
            ThroughPerm(images)
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        if self.0.is_empty() {
            i
        } else {
            self.0[i] as usize
        }
    }

    pub fn images(&self, n: usize) -> Vec<u8> {
        if self.0.is_empty() {
            (0..n as u8).collect()
        } else {
            self.0.clone()
        }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &ThroughPerm, n: usize) -> ThroughPerm {
        let mut out = vec![0u8; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.image(other.image(i)) as u8;
        }
        ThroughPerm::from_images(out)
    }
}

/// Young's orthogonal representation of `S_m` for shape `λ ⊢ m`.
///
/// The basis is indexed by standard Young tableaux; adjacent transpositions
/// act through real orthogonal matrices built from inverse axial distances.
#[derive(Clone, Debug)]
pub struct SymIrrep {
    pub lambda: Partition,
    pub dim: usize,
    /// Matrix of the adjacent transposition `s_k = (k, k+1)`, `k = 0..m-2`.
    pub adjacent: Vec<DMatrix<f64>>,
    m: usize,
}

impl SymIrrep {
    pub fn new(lambda: &Partition) -> Result<Self> {
        lambda.validate()?;
        let m = lambda.sum() as usize;
        let tableaux = standard_tableaux(lambda);
        let dim = tableaux.len().max(1);
        let mut adjacent = Vec::new();
        if m >= 2 {
            // position (row, col) of entry v in tableau t
            let pos = |t: &[Vec<u8>], v: u8| -> (usize, usize) {
                for (r, row) in t.iter().enumerate() {
                    for (c, &x) in row.iter().enumerate() {
                        if x == v {
                            return (r, c);
                        }
                    }
                }
                unreachable!()
            };
            for k in 0..m - 1 {
                let mut mat = DMatrix::<f64>::zeros(dim, dim);
                for (i, t) in tableaux.iter().enumerate() {
                    let (r1, c1) = pos(t, (k + 1) as u8);
                    let (r2, c2) = pos(t, (k + 2) as u8);
                    // axial distance of k+2 relative to k+1
                    let d = (c2 as i64 - r2 as i64) - (c1 as i64 - r1 as i64);
                    let rho = 1.0 / d as f64;
                    mat[(i, i)] += rho;
                    if d.abs() > 1 {
                        // the swapped tableau is also standard
                        let mut swapped = t.clone();
                        swapped[r1][c1] = (k + 2) as u8;
                        swapped[r2][c2] = (k + 1) as u8;
                        let j = tableaux
                            .iter()
                            .position(|u| *u == swapped)
                            .expect("swapped tableau is standard");
                        if j > i {
                            let off = (1.0 - rho * rho).sqrt();
                            mat[(i, j)] = off;
                            mat[(j, i)] = off;
                        }
                    }
                }
                adjacent.push(mat);
            }
        }
        Ok(SymIrrep {
            lambda: lambda.clone(),
            dim,
            adjacent,
            m,
        })
    }

    /// Matrix of an arbitrary permutation given as images.
    pub fn matrix_of(&self, perm: &ThroughPerm) -> DMatrix<f64> {
        let mut mat = DMatrix::<f64>::identity(self.dim, self.dim);
        if perm.is_identity() || self.m < 2 {
            return mat;
        }
        // decompose into adjacent transpositions by bubble-sorting the images
        let mut imgs = perm.images(self.m);
        loop {
            let mut swapped = false;
            for k in 0..self.m - 1 {
                if imgs[k] > imgs[k + 1] {
                    imgs.swap(k, k + 1);
                    mat = &self.adjacent[k] * mat;
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        mat
    }
}

/// All standard Young tableaux of shape `λ`, in a deterministic order.
fn standard_tableaux(lambda: &Partition) -> Vec<Vec<Vec<u8>>> {
    let rows = lambda.rows();
    let m = lambda.sum() as usize;
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut shape: Vec<Vec<u8>> = rows.iter().map(|&r| vec![0u8; r as usize]).collect();
    fn fill(shape: &mut Vec<Vec<u8>>, v: u8, m: u8, out: &mut Vec<Vec<Vec<u8>>>) {
        if v > m {
            out.push(shape.clone());
            return;
        }
        for r in 0..shape.len() {
            let c = shape[r].iter().position(|&x| x == 0);
            let Some(c) = c else { continue };
            // must be the next free cell in the row, and the cell above filled
            if r > 0 && (shape[r - 1].len() <= c || shape[r - 1][c] == 0) {
                continue;
            }
            shape[r][c] = v;
            fill(shape, v + 1, m, out);
            shape[r][c] = 0;
        }
    }
    fill(&mut shape, 1, m as u8, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn irrep(rows: Vec<u8>) -> SymIrrep {
        SymIrrep::new(&Partition::new(rows).unwrap()).unwrap()
    }

    #[test]
    fn one_dimensional_irreps() {
        // λ = [2]: trivial, swap acts as +1
        let triv = irrep(vec![2]);
        assert_eq!(triv.dim, 1);
        assert!((triv.adjacent[0][(0, 0)] - 1.0).abs() < 1e-14);
        // λ = [1,1]: sign, swap acts as −1
        let sign = irrep(vec![1, 1]);
        assert_eq!(sign.dim, 1);
        assert!((sign.adjacent[0][(0, 0)] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn standard_irrep_of_s3_satisfies_defining_relations() {
        let rep = irrep(vec![2, 1]);
        assert_eq!(rep.dim, 2);
        let s1 = &rep.adjacent[0];
        let s2 = &rep.adjacent[1];
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((s1 * s1 - &id).norm() < 1e-12);
        assert!((s2 * s2 - &id).norm() < 1e-12);
        // braid relation s1 s2 s1 = s2 s1 s2
        assert!((s1 * s2 * s1 - s2 * s1 * s2).norm() < 1e-12);
        // orthogonality
        assert!((s1 * s1.transpose() - &id).norm() < 1e-12);
        assert!((s2 * s2.transpose() - &id).norm() < 1e-12);
    }

    #[test]
    fn matrix_of_general_permutation_is_homomorphic() {
        let rep = irrep(vec![2, 1]);
        // cycle (0 1 2): images [1, 2, 0]
        let c = ThroughPerm::from_images(vec![1, 2, 0]);
        let m = rep.matrix_of(&c);
        let m3 = &m * &m * &m;
        assert!((m3 - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
        // homomorphism: M(a∘b) = M(a) M(b)
        let a = ThroughPerm::from_images(vec![1, 0, 2]);
        let b = ThroughPerm::from_images(vec![0, 2, 1]);
        let ab = a.compose(&b, 3);
        assert!((rep.matrix_of(&ab) - rep.matrix_of(&a) * rep.matrix_of(&b)).norm() < 1e-12);
    }

    #[test]
    fn tableau_counts_match_hook_lengths() {
        assert_eq!(irrep(vec![3]).dim, 1);
        assert_eq!(irrep(vec![1, 1, 1]).dim, 1);
        assert_eq!(irrep(vec![2, 1]).dim, 2);
        assert_eq!(irrep(vec![2, 2]).dim, 2);
        assert_eq!(irrep(vec![3, 1]).dim, 3);
        assert_eq!(irrep(vec![2, 1, 1]).dim, 3);
    }
}
