//! Finite cochain and chain complexes over ℚ: Betti numbers, coboundary
//! membership, unimodularity and the homology/cohomology duality.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Exterior, IndexSet, Kind, Multivector};
use crate::graded_ops::GradedOperator;
use crate::linalg::{mat_mul, rank, solve};
use crate::scalar::Q;
use crate::twisted::TwistedStructure;

/// Blocks `C_0, …, C_N` with maps `D_k : C_k → C_{k+direction}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `maps[k]` has `dims[k + direction]` rows and `dims[k]` columns; empty
    /// when the target block does not exist.
    maps: Vec<Vec<Vec<Q>>>,
    direction: i32,
}

fn target(k: usize, direction: i32, len: usize) -> Option<usize> {
    let t = k as i64 + direction as i64;
    (t >= 0 && (t as usize) < len).then_some(t as usize)
}

fn is_zero_matrix(m: &[Vec<Q>]) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, maps: Vec<Vec<Vec<Q>>>, direction: i32) -> Result<Self> {
        if direction != 1 && direction != -1 {
            return Err(Error::Invalid(format!("direction must be ±1, got {direction}")));
        }
        if maps.len() != dims.len() {
            return Err(Error::Invalid(format!("{} blocks but {} maps", dims.len(), maps.len())));
        }
        for (k, m) in maps.iter().enumerate() {
            match target(k, direction, dims.len()) {
                Some(t) => {
                    if m.len() != dims[t] || m.iter().any(|r| r.len() != dims[k]) {
                        return Err(Error::Invalid(format!("map {k} has the wrong shape")));
                    }
                }
                None => {
                    if !m.is_empty() {
                        return Err(Error::Invalid(format!("map {k} leaves the complex")));
                    }
                }
            }
        }
        let c = ChainComplex { dims, maps, direction };
        for k in 0..c.dims.len() {
            if let Some(t) = target(k, direction, c.dims.len()) {
                if target(t, direction, c.dims.len()).is_some()
                    && !c.maps[k].is_empty()
                    && !c.maps[t].is_empty()
                    && !is_zero_matrix(&mat_mul(&c.maps[t], &c.maps[k]))
                {
                    return Err(Error::NotAComplex { degree: k });
                }
            }
        }
        Ok(c)
    }

    /// The complex of a degree ±1 operator on `Λ•`.
    pub fn from_operator<K: Kind>(op: &GradedOperator<K>) -> Result<Self> {
        let d = op.degree();
        if d != 1 && d != -1 {
            return Err(Error::BadOperatorDegree { degree: d, reason: "a differential has degree ±1" });
        }
        let n = op.dim();
        let dims = (0..=n).map(|p| IndexSet::of_degree(n, p).len()).collect();
        let maps = (0..=n).map(|p| op.block(p)).collect();
        Self::new(dims, maps, d)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn direction(&self) -> i32 {
        self.direction
    }

    pub fn map(&self, k: usize) -> &[Vec<Q>] {
        &self.maps[k]
    }

    fn rank_out(&self, k: usize) -> usize {
        if self.maps[k].is_empty() {
            0
        } else {
            rank(&self.maps[k])
        }
    }

    fn source(&self, k: usize) -> Option<usize> {
        target(k, -self.direction, self.dims.len())
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..self.dims.len())
            .map(|k| {
                let incoming = self.source(k).map_or(0, |s| self.rank_out(s));
                self.dims[k] - self.rank_out(k) - incoming
            })
            .collect()
    }

    pub fn apply(&self, k: usize, v: &[Q]) -> Vec<Q> {
        self.maps[k]
            .iter()
            .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// A preimage of the cocycle `v ∈ C_k`, or `None` when `v` is not a
    /// coboundary.
    pub fn is_coboundary(&self, k: usize, v: &[Q]) -> Result<Option<Vec<Q>>> {
        if k >= self.dims.len() || v.len() != self.dims[k] {
            return Err(Error::Invalid(format!("vector does not lie in block {k}")));
        }
        if !self.maps[k].is_empty() && self.apply(k, v).iter().any(|x| !x.is_zero()) {
            return Err(Error::NotACocycle { degree: k });
        }
        match self.source(k) {
            None => Ok(v.iter().all(Zero::is_zero).then(Vec::new)),
            Some(s) => Ok(solve(&self.maps[s], v)),
        }
    }
}

/// Coordinates of the degree-`p` part of `x` in [`IndexSet`] order.
pub fn coordinates<K: Kind>(x: &Exterior<K, Q>, p: usize) -> Vec<Q> {
    IndexSet::of_degree(x.dim(), p).into_iter().map(|s| x.coeff(s)).collect()
}

pub fn from_coordinates<K: Kind>(n: usize, p: usize, v: &[Q]) -> Exterior<K, Q> {
    Exterior::from_terms(n, IndexSet::of_degree(n, p).into_iter().zip(v.iter().cloned()))
}

/// `(Λ•𝔤, d_{π,ψ})`.
pub fn cohomology_complex(s: &TwistedStructure) -> Result<ChainComplex> {
    s.require_twisted()?;
    ChainComplex::from_operator(&s.operators()?.d_pi_psi)
}

/// `(Λ•𝔤*, ∂_π + ∂̲_{π,ψ} + i_Y)`.
pub fn homology_complex(s: &TwistedStructure) -> Result<ChainComplex> {
    s.require_twisted()?;
    ChainComplex::from_operator(&s.operators()?.bv)
}

/// True iff `Z` is `d_{π,ψ}` of a scalar.
pub fn is_unimodular(s: &TwistedStructure) -> Result<bool> {
    let z = s.modular_section()?;
    let c = cohomology_complex(s)?;
    Ok(c.is_coboundary(1, &coordinates(&z, 1))?.is_some())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    /// Betti numbers `H_k` of the homology complex.
    pub left: Vec<usize>,
    /// `H^{N−k}` of the cohomology complex.
    pub right: Vec<usize>,
    pub isomorphic: bool,
    /// `−*_λ d_{π,ψ} *_λ⁻¹` equals the homology differential.
    pub conjugate: bool,
}

pub fn duality_check(s: &TwistedStructure) -> Result<DualityReport> {
    if !is_unimodular(s)? {
        return Err(Error::NotUnimodular);
    }
    let left = homology_complex(s)?.betti_numbers();
    let mut right = cohomology_complex(s)?.betti_numbers();
    right.reverse();
    let ops = s.operators()?;
    Ok(DualityReport { isomorphic: left == right, left, right, conjugate: ops.bv_lambda == ops.bv })
}

/// Preimage of `v` under `d_{π,ψ}` as a multivector, if one exists.
pub fn d_pi_psi_preimage(s: &TwistedStructure, v: &Multivector) -> Result<Option<Multivector>> {
    let p = v.degree()?.unwrap_or(0);
    if p == 0 {
        return Ok(v.is_zero().then(|| Multivector::zero(s.dim())));
    }
    let c = cohomology_complex(s)?;
    Ok(c.is_coboundary(p, &coordinates(v, p))?.map(|x| from_coordinates(s.dim(), p - 1, &x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Vectors;
    use crate::scalar::q;
    use crate::twisted::{examples, random};
    use rand::SeedableRng;

    // Naive exact rank by row reduction over ℚ, kept separate from the
    // fraction-free routine.
    fn oracle_rank(m: &[Vec<Q>]) -> usize {
        let mut a: Vec<Vec<Q>> = m.to_vec();
        let mut r = 0;
        let cols = a.first().map_or(0, |row| row.len());
        for c in 0..cols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[r][c];
                    for j in 0..cols {
                        let v = &a[r][j] * &f;
                        a[i][j] -= v;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn oracle_betti(c: &ChainComplex) -> Vec<usize> {
        let n = c.dims().len();
        (0..n)
            .map(|k| {
                let out = if c.map(k).is_empty() { 0 } else { oracle_rank(c.map(k)) };
                let s = k as i64 - c.direction() as i64;
                let inc = if s >= 0 && (s as usize) < n && !c.map(s as usize).is_empty() {
                    oracle_rank(c.map(s as usize))
                } else {
                    0
                };
                c.dims()[k] - out - inc
            })
            .collect()
    }

    #[test]
    fn zero_differential_gives_binomials() {
        let op = GradedOperator::<Vectors>::zero(3, 1).unwrap();
        let c = ChainComplex::from_operator(&op).unwrap();
        assert_eq!(c.betti_numbers(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn rejects_non_complex() {
        let dims = vec![1, 1, 1];
        let one = vec![vec![q(1)]];
        let err = ChainComplex::new(dims, vec![one.clone(), one, vec![]], 1).unwrap_err();
        assert_eq!(err, Error::NotAComplex { degree: 0 });
    }

    #[test]
    fn betti_numbers_match_oracle() {
        for s in [examples::sl2_triangular(), examples::affine_twisted(), examples::aff1_triangular()] {
            for c in [cohomology_complex(&s).unwrap(), homology_complex(&s).unwrap()] {
                assert_eq!(c.betti_numbers(), oracle_betti(&c));
                let total: usize = c.dims().iter().sum();
                assert_eq!(total, 1 << s.dim());
            }
        }
    }

    #[test]
    fn sl2_modular_class_is_not_trivial() {
        let s = examples::sl2_triangular();
        let z = s.modular_section().unwrap();
        assert!(d_pi_psi_preimage(&s, &z).unwrap().is_none());
        assert!(!is_unimodular(&s).unwrap());
        assert!(matches!(duality_check(&s), Err(Error::NotUnimodular)));
    }

    #[test]
    fn coboundary_round_trip() {
        let s = examples::affine_twisted();
        let c = cohomology_complex(&s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in 0..s.dim() {
            let w: Multivector = random::element(&mut rng, s.dim(), p);
            let dw = s.d_pi_psi(&w).unwrap();
            let pre = d_pi_psi_preimage(&s, &dw).unwrap().expect("coboundary");
            assert_eq!(s.d_pi_psi(&pre).unwrap(), dw);
            assert_eq!(c.is_coboundary(p + 1, &coordinates(&dw, p + 1)).unwrap().is_some(), true);
        }
        let zero = vec![Q::zero(); 6];
        assert_eq!(c.is_coboundary(1, &zero).unwrap().unwrap(), vec![Q::zero()]);
    }

    #[test]
    fn non_cocycle_is_an_error() {
        let s = examples::sl2_triangular();
        let c = cohomology_complex(&s).unwrap();
        // d_π H ≠ 0 for r = X₊∧H
        let h = coordinates(&Multivector::basis(3, 0), 1);
        assert!(!s.d_pi_psi(&Multivector::basis(3, 0)).unwrap().is_zero());
        assert_eq!(c.is_coboundary(1, &h), Err(Error::NotACocycle { degree: 1 }));
    }

    #[test]
    fn duality_on_unimodular_instances() {
        let zero = crate::twisted::TwistedStructure::with_standard_volume(
            crate::lie::catalog::abelian(3),
            Multivector::zero(3),
            crate::exterior::Form::zero(3),
        )
        .unwrap();
        let r = duality_check(&zero).unwrap();
        assert_eq!(r.left, vec![1, 3, 3, 1]);
        assert!(r.isomorphic && r.conjugate);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let extension = random::twisted(&mut rng, crate::lie::catalog::sl2_plus_center());
        for s in [examples::abelian_symplectic(), examples::aff1_squared_nonclosed(), extension] {
            let r = duality_check(&s).unwrap();
            assert!(r.isomorphic && r.conjugate, "{r:?}");
        }
    }
}
