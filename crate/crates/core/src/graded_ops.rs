//! Graded linear operators on a full exterior algebra and the order
//! filtration Φ¹, Φ², Φ³.
//!
//! An operator is stored by its images of the `2^N` basis monomials. Images
//! are sparse, so operators like `i_X` stay small even for `N = 12`.

use std::fmt;

use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Exterior, IndexSet, Kind};
use crate::scalar::{parity, Q};

pub const DEFAULT_MAX_DIM: usize = 12;

/// Dimension cap for dense operator tables, overridable with `TMTOOL_MAX_DIM`.
pub fn max_dim() -> usize {
    std::env::var("TMTOOL_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
        .min(crate::exterior::MAX_BASIS - 1)
}

pub fn check_dim(n: usize) -> Result<()> {
    let cap = max_dim();
    if n > cap {
        Err(Error::DimensionTooLarge { dim: n, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Zero,
    One,
    Two,
    MoreThanTwo,
}

impl Order {
    pub fn label(self) -> &'static str {
        match self {
            Order::Zero => "0",
            Order::One => "1",
            Order::Two => "2",
            Order::MoreThanTwo => ">2",
        }
    }
}

/// A degree-homogeneous linear endomorphism of `Λ•V`.
#[derive(Clone, PartialEq)]
pub struct GradedOperator<K: Kind> {
    dim: usize,
    degree: i32,
    columns: Vec<Exterior<K, Q>>,
}

fn monomial_product<K: Kind>(dim: usize, a: IndexSet, b: IndexSet) -> Exterior<K, Q> {
    match a.wedge(b) {
        Some((s, ab)) => Exterior::monomial(dim, ab, Q::from_integer(s.into())),
        None => Exterior::zero(dim),
    }
}

impl<K: Kind> GradedOperator<K> {
    /// Tabulates `f` on every basis monomial and checks the degree shift.
    pub fn from_fn<F>(dim: usize, degree: i32, f: F) -> Result<Self>
    where
        F: Fn(&Exterior<K, Q>) -> Result<Exterior<K, Q>> + Sync,
    {
        check_dim(dim)?;
        let columns: Vec<Result<Exterior<K, Q>>> = (0..(1u64 << dim))
            .into_par_iter()
            .map(|bits| {
                let set = IndexSet::from_bits(bits as u32);
                let img = f(&Exterior::monomial(dim, set, Q::one()))?;
                let target = set.len() as i32 + degree;
                if !img.is_zero() {
                    if target < 0 || target > dim as i32 {
                        return Err(Error::BadOperatorDegree {
                            degree,
                            reason: "image outside the exterior algebra",
                        });
                    }
                    img.expect_degree(target as usize)?;
                }
                Ok(img)
            })
            .collect();
        let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(GradedOperator { dim, degree, columns })
    }

    pub fn zero(dim: usize, degree: i32) -> Result<Self> {
        check_dim(dim)?;
        Ok(GradedOperator { dim, degree, columns: vec![Exterior::zero(dim); 1 << dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, 0, |x| Ok(x.clone()))
    }

    /// Left multiplication `ℓ_a` by a homogeneous element.
    pub fn left_mult(a: &Exterior<K, Q>) -> Result<Self> {
        let deg = a.degree()?.unwrap_or(0) as i32;
        Self::from_fn(a.dim(), deg, |x| a.wedge(x))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn column(&self, set: IndexSet) -> &Exterior<K, Q> {
        &self.columns[set.bits() as usize]
    }

    pub fn apply(&self, x: &Exterior<K, Q>) -> Exterior<K, Q> {
        let mut out = Exterior::zero(self.dim);
        for (s, c) in x.terms() {
            out = out + self.column(*s).scale(c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        } else {
            Ok(())
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.same_dim(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::BadOperatorDegree {
                degree: other.degree,
                reason: "cannot add operators of different degrees",
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let columns = self.columns.iter().zip(&other.columns).map(|(a, b)| a + b).collect();
        Ok(GradedOperator { dim: self.dim, degree, columns })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        GradedOperator {
            dim: self.dim,
            degree: self.degree,
            columns: self.columns.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let columns = other.columns.par_iter().map(|c| self.apply(c)).collect();
        Ok(GradedOperator { dim: self.dim, degree: self.degree + other.degree, columns })
    }

    /// `[u, v] = u∘v − (−1)^{|u||v|} v∘u`.
    pub fn graded_commutator(&self, other: &Self) -> Result<Self> {
        let uv = self.compose(other)?;
        let vu = other.compose(self)?;
        let s = parity((self.degree * other.degree) as i64);
        uv.sub(&vu.scale(&Q::from_integer(s.into())))
    }

    pub fn square(&self) -> Result<Self> {
        self.compose(self)
    }

    /// Image of the unit, `u(1)`.
    pub fn at_one(&self) -> &Exterior<K, Q> {
        &self.columns[0]
    }

    /// `Φ¹_u = u − ℓ_{u(1)}`.
    pub fn phi1(&self) -> Result<Self> {
        let u1 = self.at_one().clone();
        let lm = Self::left_mult(&u1)?;
        if u1.is_zero() {
            return Ok(self.clone());
        }
        self.sub(&lm)
    }

    /// `Φ²_u(a)` as an operator in `b`:
    /// `Φ¹_u(ab) − Φ¹_u(a)b − (−1)^{|a||u|} aΦ¹_u(b)`.
    pub fn phi2(&self, a: &Exterior<K, Q>) -> Result<Self> {
        let deg_a = a.degree()?.unwrap_or(0) as i32;
        let p1 = self.phi1()?;
        let p1a = p1.apply(a);
        let s = Q::from_integer(parity((deg_a * self.degree) as i64).into());
        Self::from_fn(self.dim, self.degree + deg_a, |b| {
            let ab = a.wedge(b)?;
            Ok(p1.apply(&ab) - p1a.wedge(b)? - a.wedge(&p1.apply(b))?.scale(&s))
        })
    }

    /// `Φ³_u(a, b)` as an operator in `c`.
    pub fn phi3(&self, a: &Exterior<K, Q>, b: &Exterior<K, Q>) -> Result<Self> {
        let deg_a = a.degree()?.unwrap_or(0) as i32;
        let deg_b = b.degree()?.unwrap_or(0) as i32;
        let t = self.phi2(a)?;
        let tb = t.apply(b);
        let s = Q::from_integer(parity(((deg_a + self.degree) * deg_b) as i64).into());
        Self::from_fn(self.dim, self.degree + deg_a + deg_b, |c| {
            let bc = b.wedge(c)?;
            Ok(t.apply(&bc) - tb.wedge(c)? - b.wedge(&t.apply(c))?.scale(&s))
        })
    }

    /// Table `T[a][b] = Φ²_u(a)(b)` over basis monomials.
    fn phi2_table(&self) -> Result<Vec<Vec<Exterior<K, Q>>>> {
        let n = self.dim;
        let p1 = self.phi1()?;
        let size = 1usize << n;
        let table = (0..size)
            .into_par_iter()
            .map(|ab| {
                let a = IndexSet::from_bits(ab as u32);
                let pa = p1.column(a).clone();
                let s = Q::from_integer(parity(a.len() as i64 * self.degree as i64).into());
                (0..size)
                    .map(|bb| {
                        let b = IndexSet::from_bits(bb as u32);
                        let prod = monomial_product::<K>(n, a, b);
                        let mb = Exterior::monomial(n, b, Q::one());
                        let ma = Exterior::monomial(n, a, Q::one());
                        p1.apply(&prod)
                            - pa.wedge_unchecked(&mb)
                            - ma.wedge_unchecked(p1.column(b)).scale(&s)
                    })
                    .collect()
            })
            .collect();
        Ok(table)
    }

    /// Order of the operator, up to the `>2` bucket.
    pub fn operator_order(&self) -> Result<Order> {
        if self.phi1()?.is_zero() {
            return Ok(Order::Zero);
        }
        let t = self.phi2_table()?;
        if t.iter().all(|row| row.iter().all(|x| x.is_zero())) {
            return Ok(Order::One);
        }
        let n = self.dim;
        let size = 1usize << n;
        let deg_u = self.degree as i64;
        let all_zero = (0..size).into_par_iter().all(|ab| {
            let a = IndexSet::from_bits(ab as u32);
            let row = &t[ab];
            (0..size).all(|bb| {
                let b = IndexSet::from_bits(bb as u32);
                let s = Q::from_integer(parity((a.len() as i64 + deg_u) * b.len() as i64).into());
                let mb = Exterior::<K, Q>::monomial(n, b, Q::one());
                (0..size).all(|cb| {
                    let c = IndexSet::from_bits(cb as u32);
                    let mc = Exterior::<K, Q>::monomial(n, c, Q::one());
                    let first = match b.wedge(c) {
                        Some((sg, bc)) => row[bc.bits() as usize].scale(&Q::from_integer(sg.into())),
                        None => Exterior::zero(n),
                    };
                    let v = first
                        - row[bb].wedge_unchecked(&mc)
                        - mb.wedge_unchecked(&row[cb]).scale(&s);
                    v.is_zero()
                })
            })
        });
        Ok(if all_zero { Order::Two } else { Order::MoreThanTwo })
    }

    /// A derivation: order at most one and `u(1) = 0`.
    pub fn is_derivation(&self) -> Result<bool> {
        if !self.at_one().is_zero() {
            return Ok(false);
        }
        Ok(matches!(self.operator_order()?, Order::Zero | Order::One))
    }

    /// Checks `(−1)^{|b|}Φ²_u(b)(a) = −(−1)^{(|a|+1)(|b|+1)}(−1)^{|a|}Φ²_u(a)(b)`
    /// on all monomial pairs, for odd `u`. Returns the first failing pair.
    pub fn skew_defect(&self) -> Result<Option<(IndexSet, IndexSet)>> {
        if !self.is_odd() {
            return Err(Error::BadOperatorDegree { degree: self.degree, reason: "skew-symmetry is stated for odd operators" });
        }
        let table = self.phi2_table()?;
        let size = table.len();
        for ai in 0..size {
            let la = (ai as u32).count_ones() as i64;
            for bi in 0..size {
                let lb = (bi as u32).count_ones() as i64;
                let lhs = table[bi][ai].scale(&Q::from_integer(parity(lb).into()));
                let s = -(parity((la + 1) * (lb + 1)) * parity(la));
                let rhs = table[ai][bi].scale(&Q::from_integer(s.into()));
                if lhs != rhs {
                    return Ok(Some((IndexSet::from_bits(ai as u32), IndexSet::from_bits(bi as u32))));
                }
            }
        }
        Ok(None)
    }

    /// Checks the generator law
    /// `[a,b] = (−1)^{|a|}(u(ab) − u(a)b − (−1)^{|a|} a u(b))` on all monomial pairs.
    /// Returns the first failing pair.
    pub fn bracket_defect<B>(&self, bracket: B) -> Result<Option<(IndexSet, IndexSet)>>
    where
        B: Fn(&Exterior<K, Q>, &Exterior<K, Q>) -> Result<Exterior<K, Q>> + Sync,
    {
        if self.degree != -1 && !self.is_zero() {
            return Err(Error::BadOperatorDegree { degree: self.degree, reason: "a generator has degree -1" });
        }
        let n = self.dim;
        let sets = IndexSet::all(n);
        let fails: Result<Vec<Option<(IndexSet, IndexSet)>>> = sets
            .par_iter()
            .map(|&a| {
                let ma = Exterior::<K, Q>::monomial(n, a, Q::one());
                let sa = Q::from_integer(parity(a.len() as i64).into());
                let ua = self.column(a);
                for &b in &sets {
                    let mb = Exterior::<K, Q>::monomial(n, b, Q::one());
                    let ab = monomial_product::<K>(n, a, b);
                    let rhs = (self.apply(&ab)
                        - ua.wedge_unchecked(&mb)
                        - ma.wedge_unchecked(self.column(b)).scale(&sa))
                    .scale(&sa);
                    if bracket(&ma, &mb)? != rhs {
                        return Ok(Some((a, b)));
                    }
                }
                Ok(None)
            })
            .collect();
        Ok(fails?.into_iter().flatten().next())
    }

    pub fn generates_bracket<B>(&self, bracket: B) -> Result<bool>
    where
        B: Fn(&Exterior<K, Q>, &Exterior<K, Q>) -> Result<Exterior<K, Q>> + Sync,
    {
        Ok(self.bracket_defect(bracket)?.is_none())
    }

    /// First basis monomial on which two operators differ.
    pub fn first_difference(&self, other: &Self) -> Option<IndexSet> {
        (0..self.columns.len())
            .find(|&i| self.columns[i] != other.columns[i])
            .map(|i| IndexSet::from_bits(i as u32))
    }

    pub fn nonzero_columns(&self) -> usize {
        self.columns.iter().filter(|c| !c.is_zero()).count()
    }

    /// Matrix of the block from degree `p` to degree `p + degree`, rows and
    /// columns in [`IndexSet`] order.
    pub fn block(&self, p: usize) -> Vec<Vec<Q>> {
        let target = p as i32 + self.degree;
        let cols = IndexSet::of_degree(self.dim, p);
        if target < 0 || target > self.dim as i32 {
            return Vec::new();
        }
        let rows = IndexSet::of_degree(self.dim, target as usize);
        rows.iter()
            .map(|r| cols.iter().map(|c| self.column(*c).coeff(*r)).collect())
            .collect()
    }
}

impl<K: Kind> fmt::Debug for GradedOperator<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedOperator(dim={}, degree={}, nonzero columns={})", self.dim, self.degree, self.nonzero_columns())
    }
}
