//! Finite-dimensional Lie algebras, seen as Lie algebroids over a point.
//!
//! The anchor is identically zero here, so every anchor term of the
//! algebroid formulas drops out: the Chevalley–Eilenberg differential keeps
//! only its bracket sum, brackets with functions vanish and `d(const) = 0`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{Covectors, Exterior, IndexSet, Kind, Multivector, Vectors};
use crate::linalg;
use crate::scalar::{q, Q};

/// Structure constants of a Lie bracket on the degree-one part of `Λ•K`.
///
/// Used both for `𝔤` (on multivectors) and for a dual algebra `𝔤*` (on
/// forms). The differential of the table acts on the other side.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable<K: Kind> {
    dim: usize,
    table: Vec<Exterior<K, Q>>,
}

impl<K: Kind> BracketTable<K> {
    /// Builds from `[e_i, e_j]` for `i < j`; antisymmetry fills the rest.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Result<Exterior<K, Q>>) -> Result<Self> {
        let mut table = vec![Exterior::zero(dim); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = f(i, j)?;
                if v.dim() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: v.dim() });
                }
                v.expect_degree(1)?;
                table[j * dim + i] = -v.clone();
                table[i * dim + j] = v;
            }
        }
        Ok(BracketTable { dim, table })
    }

    pub fn abelian(dim: usize) -> Self {
        BracketTable { dim, table: vec![Exterior::zero(dim); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &Exterior<K, Q> {
        &self.table[i * self.dim + j]
    }

    /// Structure constant `c^k_{ij}`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> Q {
        self.basis_bracket(i, j).coeff(IndexSet::singleton(k))
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|x| x.is_zero())
    }

    /// Bracket of two degree-one elements.
    pub fn bracket1(&self, a: &Exterior<K, Q>, b: &Exterior<K, Q>) -> Result<Exterior<K, Q>> {
        a.expect_degree(1)?;
        b.expect_degree(1)?;
        self.bracket(a, b)
    }

    fn monomial_bracket(&self, a: IndexSet, b: IndexSet) -> Exterior<K, Q> {
        let n = self.dim;
        let mut out = Exterior::zero(n);
        if a.is_empty() || b.is_empty() {
            return out;
        }
        for (k, ak) in a.iter().enumerate() {
            let rest_a = Exterior::monomial(n, IndexSet::from_bits(a.bits() & !(1 << ak)), Q::one());
            for (l, bl) in b.iter().enumerate() {
                let br = self.basis_bracket(ak, bl);
                if br.is_zero() {
                    continue;
                }
                let rest_b = Exterior::monomial(n, IndexSet::from_bits(b.bits() & !(1 << bl)), Q::one());
                let t = br.wedge_unchecked(&rest_a).wedge_unchecked(&rest_b);
                out = if (k + l) % 2 == 0 { out + t } else { out - t };
            }
        }
        out
    }

    /// The Gerstenhaber extension
    /// `[a_1∧…∧a_q, b_1∧…∧b_r] = Σ (−1)^{k+ℓ} [a_k,b_ℓ] ∧ a_1…â_k…a_q ∧ b_1…b̂_ℓ…b_r`,
    /// extended bilinearly. Brackets with scalars vanish.
    pub fn bracket(&self, a: &Exterior<K, Q>, b: &Exterior<K, Q>) -> Result<Exterior<K, Q>> {
        if a.dim() != self.dim || b.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: a.dim().max(b.dim()) });
        }
        a.degree()?;
        b.degree()?;
        let mut out = Exterior::zero(self.dim);
        for (sa, ca) in a.terms() {
            for (sb, cb) in b.terms() {
                out = out + self.monomial_bracket(*sa, *sb).scale(&(ca * cb));
            }
        }
        Ok(out)
    }

    /// `dε^k = −Σ_{i<j} c^k_{ij} ε^i∧ε^j` for each dual basis element.
    fn dual_basis_differentials(&self) -> Vec<Exterior<K::Dual, Q>> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut out = Exterior::zero(n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        let c = self.constant(i, j, k);
                        if !c.is_zero() {
                            let set = IndexSet::from_bits((1 << i) | (1 << j));
                            out.add_term(set, -c);
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// The Chevalley–Eilenberg differential on the dual exterior algebra,
    /// `(dα)(a_0,…,a_q) = Σ_{k<ℓ} (−1)^{k+ℓ} α([a_k,a_ℓ], a_0,…,â_k,…,â_ℓ,…,a_q)`.
    pub fn ce_differential(&self, omega: &Exterior<K::Dual, Q>) -> Result<Exterior<K::Dual, Q>> {
        if omega.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: omega.dim() });
        }
        omega.degree()?;
        Ok(self.ce_unchecked(omega, &self.dual_basis_differentials()))
    }

    fn ce_unchecked(&self, omega: &Exterior<K::Dual, Q>, d1: &[Exterior<K::Dual, Q>]) -> Exterior<K::Dual, Q> {
        let n = self.dim;
        let mut out = Exterior::zero(n);
        for (s, c) in omega.terms() {
            let idx = s.indices();
            for (m, &im) in idx.iter().enumerate() {
                if d1[im].is_zero() {
                    continue;
                }
                let before = IndexSet::from_sorted(&idx[..m]).expect("sorted");
                let after = IndexSet::from_sorted(&idx[m + 1..]).expect("sorted");
                let t = Exterior::monomial(n, before, c.clone())
                    .wedge_unchecked(&d1[im])
                    .wedge_unchecked(&Exterior::monomial(n, after, Q::one()));
                out = if m % 2 == 0 { out + t } else { out - t };
            }
        }
        out
    }

    /// First triple violating Jacobi, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let e = |x: usize| Exterior::<K, Q>::basis(n, x);
                    let t = |x: usize, y: usize, z: usize| {
                        self.bracket(self.basis_bracket(x, y), &e(z)).expect("same dim")
                    };
                    let sum = t(i, j, k) + t(j, k, i) + t(k, i, j);
                    if !sum.is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn check_jacobi(&self) -> bool {
        self.jacobi_violation().is_none()
    }

    /// `x ↦ Tr(ad_x)` as a degree-one element of the dual algebra.
    pub fn infinitesimal_character(&self) -> Exterior<K::Dual, Q> {
        let n = self.dim;
        let mut out = Exterior::zero(n);
        for i in 0..n {
            let tr = (0..n).fold(Q::zero(), |acc, j| acc + self.constant(i, j, j));
            out.add_term(IndexSet::singleton(i), tr);
        }
        out
    }

    /// `ℒ_X = i_X d + d i_X` for a degree-one `X`.
    pub fn lie_derivative(&self, x: &Exterior<K, Q>, omega: &Exterior<K::Dual, Q>) -> Result<Exterior<K::Dual, Q>> {
        x.expect_degree(1)?;
        let d_omega = self.ce_differential(omega)?;
        let a = Exterior::interior(x, &d_omega)?;
        let b = self.ce_differential(&Exterior::interior(x, omega)?)?;
        Ok(a + b)
    }

    /// Matrix of `ad_x` in the basis, `M[k][j] = coefficient of e_k in [x, e_j]`.
    pub fn ad_matrix(&self, x: &Exterior<K, Q>) -> Result<Vec<Vec<Q>>> {
        x.expect_degree(1)?;
        let n = self.dim;
        let cols: Vec<Exterior<K, Q>> =
            (0..n).map(|j| self.bracket(x, &Exterior::basis(n, j))).collect::<Result<_>>()?;
        Ok((0..n)
            .map(|k| (0..n).map(|j| cols[j].coeff(IndexSet::singleton(k))).collect())
            .collect())
    }
}

/// A Lie algebra with named basis and an optional invariant bilinear form.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    names: Vec<String>,
    table: BracketTable<Vectors>,
    form: Option<Vec<Vec<Q>>>,
}

impl LieAlgebra {
    /// Builds from brackets `[e_i, e_j]` listed with `i < j`. Repeated or
    /// reversed pairs are rejected, as is a Jacobi violation.
    pub fn new(names: Vec<String>, brackets: Vec<(usize, usize, Multivector)>) -> Result<Self> {
        let n = names.len();
        crate::graded_ops::check_dim(n)?;
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || names[..i].contains(a) {
                return Err(Error::Invalid(format!("basis name {a:?} is empty or repeated")));
            }
        }
        let mut given: Vec<Option<Multivector>> = vec![None; n * n];
        for (i, j, v) in brackets {
            if i >= j || j >= n {
                return Err(Error::Invalid(format!(
                    "bracket ({i}, {j}) must have first index below second, both below {n}"
                )));
            }
            if given[i * n + j].is_some() {
                return Err(Error::Invalid(format!(
                    "bracket [{}, {}] given twice",
                    names[i], names[j]
                )));
            }
            given[i * n + j] = Some(v);
        }
        let table = BracketTable::from_fn(n, |i, j| {
            Ok(given[i * n + j].clone().unwrap_or_else(|| Multivector::zero(n)))
        })?;
        if let Some((i, j, k)) = table.jacobi_violation() {
            return Err(Error::JacobiViolated { i, j, k });
        }
        Ok(LieAlgebra { names, table, form: None })
    }

    /// Builds from a closure over ordered basis pairs; used by the catalog.
    pub fn from_fn(names: &[&str], f: impl Fn(usize, usize) -> Multivector) -> Result<Self> {
        let n = names.len();
        let brackets = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, f(i, j)))
            .collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), brackets)
    }

    /// Attaches a symmetric, nondegenerate, ad-invariant bilinear form.
    pub fn with_bilinear_form(mut self, g: Vec<Vec<Q>>) -> Result<Self> {
        let n = self.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::BadBilinearForm(format!("expected a {n}×{n} matrix")));
        }
        for i in 0..n {
            for j in 0..n {
                if g[i][j] != g[j][i] {
                    return Err(Error::BadBilinearForm(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        if linalg::determinant(&g).is_zero() {
            return Err(Error::BadBilinearForm("degenerate".into()));
        }
        let pair = |a: &Multivector, b: &Multivector| -> Q {
            let mut s = Q::zero();
            for (x, cx) in a.terms() {
                for (y, cy) in b.terms() {
                    let (i, j) = (x.indices()[0], y.indices()[0]);
                    s += cx * cy * &g[i][j];
                }
            }
            s
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let e = |k| Multivector::basis(n, k);
                    let lhs = pair(self.table.basis_bracket(x, y), &e(z));
                    let rhs = pair(&e(y), self.table.basis_bracket(x, z));
                    if !(lhs + rhs).is_zero() {
                        return Err(Error::BadBilinearForm(format!(
                            "not ad-invariant at ({}, {}, {})",
                            self.names[x], self.names[y], self.names[z]
                        )));
                    }
                }
            }
        }
        self.form = Some(g);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &BracketTable<Vectors> {
        &self.table
    }

    pub fn bilinear_form(&self) -> Option<&Vec<Vec<Q>>> {
        self.form.as_ref()
    }

    /// Index of a basis name; a trailing `*` (dual basis) is accepted.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let bare = name.strip_suffix('*').unwrap_or(name);
        self.names.iter().position(|n| n == bare)
    }

    pub fn schouten(&self, a: &Multivector, b: &Multivector) -> Result<Multivector> {
        self.table.bracket(a, b)
    }

    pub fn ce_differential(&self, omega: &Exterior<Covectors, Q>) -> Result<Exterior<Covectors, Q>> {
        self.table.ce_differential(omega)
    }

    pub fn lie_derivative(&self, x: &Multivector, omega: &Exterior<Covectors, Q>) -> Result<Exterior<Covectors, Q>> {
        self.table.lie_derivative(x, omega)
    }

    pub fn infinitesimal_character(&self) -> Exterior<Covectors, Q> {
        self.table.infinitesimal_character()
    }

    pub fn check_jacobi(&self) -> bool {
        self.table.check_jacobi()
    }
}

/// Standard algebras used in examples and tests.
pub mod catalog {
    use super::*;

    fn v(n: usize, entries: &[(usize, i64)]) -> Multivector {
        Multivector::from_terms(n, entries.iter().map(|&(i, c)| (IndexSet::singleton(i), q(c))))
    }

    pub fn abelian(n: usize) -> LieAlgebra {
        let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        LieAlgebra::new(names, Vec::new()).expect("abelian algebra is valid")
    }

    /// `sl(2)` with basis `H, Xp, Xm`: `[H,X±] = ±2X±`, `[X+,X-] = H`.
    pub fn sl2() -> LieAlgebra {
        LieAlgebra::from_fn(&["H", "Xp", "Xm"], |i, j| match (i, j) {
            (0, 1) => v(3, &[(1, 2)]),
            (0, 2) => v(3, &[(2, -2)]),
            _ => v(3, &[(0, 1)]),
        })
        .expect("sl2 is a Lie algebra")
    }

    /// `sl(2)` with the invariant form `⟨H,H⟩ = 2`, `⟨X+,X-⟩ = 1`.
    pub fn sl2_with_form() -> LieAlgebra {
        let g = vec![vec![q(2), q(0), q(0)], vec![q(0), q(0), q(1)], vec![q(0), q(1), q(0)]];
        sl2().with_bilinear_form(g).expect("trace form is invariant")
    }

    /// `so(3)`: `[e1,e2] = e3` and cyclic, with the identity form.
    pub fn so3() -> LieAlgebra {
        LieAlgebra::from_fn(&["e1", "e2", "e3"], |i, j| match (i, j) {
            (0, 1) => v(3, &[(2, 1)]),
            (0, 2) => v(3, &[(1, -1)]),
            _ => v(3, &[(0, 1)]),
        })
        .expect("so3 is a Lie algebra")
        .with_bilinear_form((0..3).map(|i| (0..3).map(|j| q((i == j) as i64)).collect()).collect())
        .expect("identity form is invariant on so3")
    }

    /// The non-abelian two-dimensional algebra `[e1, e2] = e1`.
    pub fn aff1() -> LieAlgebra {
        LieAlgebra::from_fn(&["e1", "e2"], |_, _| v(2, &[(0, 1)])).expect("valid")
    }

    /// `sl(2) ⊕ ℝC`, basis `H, Xp, Xm, C`.
    pub fn sl2_plus_center() -> LieAlgebra {
        LieAlgebra::from_fn(&["H", "Xp", "Xm", "C"], |i, j| match (i, j) {
            (0, 1) => v(4, &[(1, 2)]),
            (0, 2) => v(4, &[(2, -2)]),
            (1, 2) => v(4, &[(0, 1)]),
            _ => Multivector::zero(4),
        })
        .expect("valid")
    }

    /// `gl(2) ⋉ ℝ²` with basis `e11, e12, e21, e22, u1, u2`:
    /// `[e_ij, e_kl] = δ_jk e_il − δ_li e_kj`, `[e_ij, u_k] = δ_jk u_i`.
    pub fn affine_gl2() -> LieAlgebra {
        // (i, j) of each e_ij, 0-based
        let e = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let e_index = |i: usize, j: usize| 2 * i + j;
        let n = 6;
        LieAlgebra::from_fn(&["e11", "e12", "e21", "e22", "u1", "u2"], |a, b| {
            let mut out = Multivector::zero(n);
            if b < 4 {
                let ((i, j), (k, l)) = (e[a], e[b]);
                if j == k {
                    out.add_term(IndexSet::singleton(e_index(i, l)), q(1));
                }
                if l == i {
                    out.add_term(IndexSet::singleton(e_index(k, j)), q(-1));
                }
            } else if a < 4 {
                let (i, j) = e[a];
                let k = b - 4;
                if j == k {
                    out.add_term(IndexSet::singleton(4 + i), q(1));
                }
            }
            out
        })
        .expect("affine gl2 is a Lie algebra")
    }

    /// `aff(1) ⊕ aff(1)`: `[e1, e2] = e1`, `[e3, e4] = e3`.
    pub fn aff1_squared() -> LieAlgebra {
        LieAlgebra::from_fn(&["e1", "e2", "e3", "e4"], |i, j| match (i, j) {
            (0, 1) => v(4, &[(0, 1)]),
            (2, 3) => v(4, &[(2, 1)]),
            _ => Multivector::zero(4),
        })
        .expect("valid")
    }

    /// Heisenberg `[e1, e2] = e3` plus a central `e4`.
    pub fn heisenberg_plus_line() -> LieAlgebra {
        LieAlgebra::from_fn(&["e1", "e2", "e3", "e4"], |i, j| match (i, j) {
            (0, 1) => v(4, &[(2, 1)]),
            _ => Multivector::zero(4),
        })
        .expect("valid")
    }

    /// `[e4, e_i] = i·e_i` for `i = 1, 2, 3`; not unimodular.
    pub fn diagonal_solvable4() -> LieAlgebra {
        LieAlgebra::from_fn(&["e1", "e2", "e3", "e4"], |i, j| match (i, j) {
            (k, 3) => v(4, &[(k, -(k as i64 + 1))]),
            _ => Multivector::zero(4),
        })
        .expect("valid")
    }
}
