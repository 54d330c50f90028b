//! Exterior algebras over a finite basis.
//!
//! Multivectors (Λ•𝔤) and forms (Λ•𝔤*) share one sparse representation,
//! keyed by [`IndexSet`] bitmasks and tagged with a [`Kind`] marker so the two
//! cannot be mixed by accident. The interior product is the degree −1
//! derivation with `i_{e_k} ε^k = 1`, extended by `i_{X∧Y} = i_X ∘ i_Y`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Ring, Q};

/// A strictly increasing subset of `{0, …, N-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

pub const MAX_BASIS: usize = 32;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_BASIS);
        IndexSet(1 << i)
    }

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << n) - 1)
        }
    }

    /// Builds from a strictly increasing index list.
    pub fn from_sorted(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Invalid(format!("indices {indices:?} not strictly increasing")));
            }
        }
        for &i in indices {
            if i >= MAX_BASIS {
                return Err(Error::Invalid(format!("index {i} out of range")));
            }
            bits |= 1 << i;
        }
        Ok(IndexSet(bits))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_BASIS && self.0 & (1 << i) != 0
    }

    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl DoubleEndedIterator<Item = usize> {
        (0..MAX_BASIS).filter(move |&i| self.0 & (1 << i) != 0)
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(self, n: usize) -> Self {
        IndexSet(!self.0 & Self::full(n).0)
    }

    /// `e_I ∧ e_J = sign · e_{I∪J}`, or `None` when the sets overlap.
    pub fn wedge(self, other: IndexSet) -> Option<(i32, IndexSet)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for j in other.iter() {
            let above = if j >= 31 { 0 } else { self.0 & !((1u32 << (j + 1)) - 1) };
            swaps += above.count_ones();
        }
        let s = if swaps % 2 == 0 { 1 } else { -1 };
        Some((s, IndexSet(self.0 | other.0)))
    }

    /// `i_{e_k}` applied to the monomial `ε^self`.
    pub fn remove(self, k: usize) -> Option<(i32, IndexSet)> {
        if !self.contains(k) {
            return None;
        }
        let before = (self.0 & ((1u32 << k) - 1)).count_ones();
        let s = if before % 2 == 0 { 1 } else { -1 };
        Some((s, IndexSet(self.0 & !(1 << k))))
    }

    /// `i_{e_I}` applied to `ε^J`, with `i_{e_{i1}∧…∧e_{ip}} = i_{e_{i1}} ∘ … ∘ i_{e_{ip}}`.
    pub fn contract(by: IndexSet, target: IndexSet) -> Option<(i32, IndexSet)> {
        if by.0 & !target.0 != 0 {
            return None;
        }
        let mut s = 1;
        let mut cur = target;
        for k in by.iter().rev() {
            let (t, next) = cur.remove(k)?;
            s *= t;
            cur = next;
        }
        Some((s, cur))
    }

    /// All subsets of `{0..n}` of size `p`, in increasing [`Ord`] order.
    pub fn of_degree(n: usize, p: usize) -> Vec<IndexSet> {
        let mut out: Vec<IndexSet> = (0..(1u64 << n))
            .map(|b| IndexSet(b as u32))
            .filter(|s| s.len() == p)
            .collect();
        out.sort();
        out
    }

    /// Every subset of `{0..n}`, grouped by degree.
    pub fn all(n: usize) -> Vec<IndexSet> {
        (0..=n).flat_map(|p| Self::of_degree(n, p)).collect()
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

/// Marker for which side of the duality an exterior element lives on.
pub trait Kind: Copy + Clone + fmt::Debug + Default + PartialEq + Send + Sync + 'static {
    type Dual: Kind<Dual = Self>;
    const SYMBOL: &'static str;
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Vectors;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Covectors;

impl Kind for Vectors {
    type Dual = Covectors;
    const SYMBOL: &'static str = "e";
}

impl Kind for Covectors {
    type Dual = Vectors;
    const SYMBOL: &'static str = "ε";
}

/// A sparse element of an exterior algebra of rank `dim`.
#[derive(Clone, PartialEq)]
pub struct Exterior<K: Kind, R = Q> {
    dim: usize,
    terms: BTreeMap<IndexSet, R>,
    _kind: PhantomData<K>,
}

pub type Multivector<R = Q> = Exterior<Vectors, R>;
pub type Form<R = Q> = Exterior<Covectors, R>;

impl<K: Kind, R: Ring> Exterior<K, R> {
    pub fn zero(dim: usize) -> Self {
        Exterior { dim, terms: BTreeMap::new(), _kind: PhantomData }
    }

    pub fn scalar(dim: usize, c: R) -> Self {
        Self::monomial(dim, IndexSet::EMPTY, c)
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, R::one())
    }

    pub fn monomial(dim: usize, set: IndexSet, c: R) -> Self {
        let mut out = Self::zero(dim);
        out.add_term(set, c);
        out
    }

    /// The degree-one basis element with index `i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, IndexSet::singleton(i), R::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (IndexSet, R)>>(dim: usize, terms: I) -> Self {
        let mut out = Self::zero(dim);
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn add_term(&mut self, set: IndexSet, c: R) {
        debug_assert!(set.max_index().map_or(true, |m| m < self.dim));
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&set) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&set);
                }
            }
            None => {
                self.terms.insert(set, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &R)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<IndexSet, R> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, set: IndexSet) -> R {
        self.terms.get(&set).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|s| s.len()).collect();
        d.dedup();
        d
    }

    /// `Ok(None)` for zero, `Ok(Some(p))` when homogeneous of degree `p`.
    pub fn degree(&self) -> Result<Option<usize>> {
        let d = self.degrees();
        match d.len() {
            0 => Ok(None),
            1 => Ok(Some(d[0])),
            _ => Err(Error::NotHomogeneous { degrees: d }),
        }
    }

    /// Checks that `self` is zero or homogeneous of degree `p`.
    pub fn expect_degree(&self, p: usize) -> Result<()> {
        match self.degree()? {
            None => Ok(()),
            Some(d) if d == p => Ok(()),
            Some(d) => Err(Error::DegreeMismatch { expected: p, found: d }),
        }
    }

    pub fn grade(&self, p: usize) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(s, _)| s.len() == p).map(|(s, c)| (*s, c.clone())),
        )
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(s, v)| (*s, v.clone() * c.clone())))
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(s, v)| (*s, v.scale(c))))
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> Exterior<K, S> {
        Exterior::from_terms(self.dim, self.terms.iter().map(|(s, v)| (*s, f(v))))
    }

    fn check_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            Err(Error::DimensionMismatch { left: self.dim, right: other_dim })
        } else {
            Ok(())
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((s, ab)) = a.wedge(*b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(ab, if s > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// `ξ ∧ ω` for a degree-one `ξ` (left exterior multiplication ε_ξ).
    pub fn wedge_left(xi: &Self, omega: &Self) -> Result<Self> {
        xi.expect_degree(1)?;
        xi.wedge(omega)
    }

    pub fn wedge_power(&self, k: usize) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..k {
            out = out.wedge_unchecked(self);
        }
        out
    }

    /// Interior product `i_by(self)` with `by` from the dual algebra.
    ///
    /// Both arguments must be homogeneous; the result vanishes when
    /// `deg by > deg self`.
    pub fn interior(by: &Exterior<K::Dual, R>, target: &Self) -> Result<Self> {
        target.check_dim(by.dim)?;
        by.degree()?;
        target.degree()?;
        Ok(Self::interior_unchecked(by, target))
    }

    pub(crate) fn interior_unchecked(by: &Exterior<K::Dual, R>, target: &Self) -> Self {
        let mut out = Self::zero(target.dim);
        for (v, cv) in by.terms() {
            for (w, cw) in &target.terms {
                if let Some((s, rest)) = IndexSet::contract(*v, *w) {
                    let c = cv.clone() * cw.clone();
                    out.add_term(rest, if s > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// The duality pairing `⟨self, other⟩` with `⟨ε^I, e_J⟩ = δ_IJ`.
    pub fn pairing(&self, other: &Exterior<K::Dual, R>) -> Result<R> {
        self.check_dim(other.dim)?;
        let (a, b) = (self.degree()?, other.degree()?);
        if let (Some(p), Some(q)) = (a, b) {
            if p != q {
                return Err(Error::DegreeMismatch { expected: p, found: q });
            }
        }
        let mut acc = R::zero();
        for (s, c) in &self.terms {
            if let Some(d) = other.terms.get(s) {
                acc += c.clone() * d.clone();
            }
        }
        Ok(acc)
    }

    /// Evaluates a degree-`p` element on `p` degree-one elements of the dual
    /// algebra, `ω(v_1, …, v_p) = ⟨ω, v_1 ∧ … ∧ v_p⟩`.
    pub fn evaluate(&self, args: &[Exterior<K::Dual, R>]) -> Result<R> {
        let mut w = Exterior::<K::Dual, R>::one(self.dim);
        for a in args {
            a.expect_degree(1)?;
            w = w.wedge(a)?;
        }
        self.expect_degree(args.len())?;
        self.pairing(&w)
    }
}

impl<K: Kind, R: Ring> Add for Exterior<K, R> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in addition");
        for (s, c) in rhs.terms {
            self.add_term(s, c);
        }
        self
    }
}

impl<K: Kind, R: Ring> Add for &Exterior<K, R> {
    type Output = Exterior<K, R>;
    fn add(self, rhs: Self) -> Exterior<K, R> {
        self.clone() + rhs.clone()
    }
}

impl<K: Kind, R: Ring> Neg for Exterior<K, R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_terms(self.dim, self.terms.into_iter().map(|(s, c)| (s, -c)))
    }
}

impl<K: Kind, R: Ring> Neg for &Exterior<K, R> {
    type Output = Exterior<K, R>;
    fn neg(self) -> Exterior<K, R> {
        -self.clone()
    }
}

impl<K: Kind, R: Ring> Sub for Exterior<K, R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<K: Kind, R: Ring> Sub for &Exterior<K, R> {
    type Output = Exterior<K, R>;
    fn sub(self, rhs: Self) -> Exterior<K, R> {
        self.clone() - rhs.clone()
    }
}

impl<K: Kind, R: Ring> fmt::Debug for Exterior<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            if s.is_empty() {
                continue;
            }
            let names: Vec<String> = s.iter().map(|i| format!("{}{}", K::SYMBOL, i + 1)).collect();
            write!(f, "·{}", names.join("∧"))?;
        }
        Ok(())
    }
}

/// Interior product of forms by a multivector, `i_V ω`.
pub fn interior_by_multivector<R: Ring>(v: &Multivector<R>, omega: &Form<R>) -> Result<Form<R>> {
    Form::interior(v, omega)
}

/// `π♯α`, defined by `⟨β, π♯α⟩ = π(α, β)`; componentwise `π♯ε^k = π^{kℓ} e_ℓ`.
pub fn sharp<R: Ring>(pi: &Multivector<R>, alpha: &Form<R>) -> Result<Multivector<R>> {
    if pi.dim() != alpha.dim() {
        return Err(Error::DimensionMismatch { left: pi.dim(), right: alpha.dim() });
    }
    pi.expect_degree(2)?;
    alpha.expect_degree(1)?;
    Ok(sharp_unchecked(pi, alpha))
}

pub(crate) fn sharp_unchecked<R: Ring>(pi: &Multivector<R>, alpha: &Form<R>) -> Multivector<R> {
    let n = pi.dim();
    let mut out = Multivector::zero(n);
    for (s, c) in pi.terms() {
        let idx = s.indices();
        let (k, l) = (idx[0], idx[1]);
        // π^{kl} = c, π^{lk} = -c
        let ak = alpha.coeff(IndexSet::singleton(k));
        let al = alpha.coeff(IndexSet::singleton(l));
        if !ak.is_zero() {
            out.add_term(IndexSet::singleton(l), ak * c.clone());
        }
        if !al.is_zero() {
            out.add_term(IndexSet::singleton(k), -(al * c.clone()));
        }
    }
    out
}

/// The map `∧^q π♯` applied to a form: `α_1∧…∧α_q ↦ π♯α_1 ∧ … ∧ π♯α_q`.
pub fn wedge_sharp<R: Ring>(pi: &Multivector<R>, omega: &Form<R>) -> Result<Multivector<R>> {
    pi.expect_degree(2)?;
    if pi.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { left: pi.dim(), right: omega.dim() });
    }
    let n = pi.dim();
    let images: Vec<Multivector<R>> =
        (0..n).map(|k| sharp_unchecked(pi, &Form::basis(n, k))).collect();
    let mut out = Multivector::zero(n);
    for (s, c) in omega.terms() {
        let mut w = Multivector::scalar(n, c.clone());
        for k in s.iter() {
            w = w.wedge_unchecked(&images[k]);
        }
        out = out + w;
    }
    Ok(out)
}

fn check_volume<R: Ring>(lambda: &Form<R>) -> Result<R> {
    let n = lambda.dim();
    let top = IndexSet::full(n);
    let c = lambda.coeff(top);
    if c.is_zero() || lambda.num_terms() != 1 {
        return Err(Error::BadVolume { dim: n });
    }
    Ok(c)
}

/// `*_λ V = i_V λ`, sending `p`-vectors to `(N-p)`-forms.
pub fn star<R: Ring>(lambda: &Form<R>, v: &Multivector<R>) -> Result<Form<R>> {
    check_volume(lambda)?;
    if lambda.dim() != v.dim() {
        return Err(Error::DimensionMismatch { left: lambda.dim(), right: v.dim() });
    }
    Ok(Form::interior_unchecked(v, lambda))
}

/// Inverse of [`star`]. Requires the coefficient of `λ` to be invertible.
pub fn star_inverse<R: Ring>(lambda: &Form<R>, omega: &Form<R>) -> Result<Multivector<R>> {
    let c = check_volume(lambda)?;
    let inv = c.try_inverse().ok_or(Error::NonConstantVolume)?;
    let n = lambda.dim();
    if n != omega.dim() {
        return Err(Error::DimensionMismatch { left: n, right: omega.dim() });
    }
    let top = IndexSet::full(n);
    let mut out = Multivector::zero(n);
    for (s, w) in omega.terms() {
        let vset = s.complement(n);
        let (sg, rest) = IndexSet::contract(vset, top).expect("complement contracts");
        debug_assert_eq!(rest, *s);
        let v = w.clone() * inv.clone();
        out.add_term(vset, if sg > 0 { v } else { -v });
    }
    Ok(out)
}

/// An element of `Λ^q 𝔤* ⊗ Λ^p 𝔤`, stored by (form monomial, vector monomial).
#[derive(Clone, PartialEq)]
pub struct MixedTensor<R = Q> {
    dim: usize,
    form_degree: usize,
    vector_degree: usize,
    terms: BTreeMap<(IndexSet, IndexSet), R>,
}

impl<R: Ring> MixedTensor<R> {
    pub fn zero(dim: usize, form_degree: usize, vector_degree: usize) -> Self {
        MixedTensor { dim, form_degree, vector_degree, terms: BTreeMap::new() }
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.form_degree, self.vector_degree)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(IndexSet, IndexSet), &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, form: IndexSet, vector: IndexSet) -> R {
        self.terms.get(&(form, vector)).cloned().unwrap_or_else(R::zero)
    }

    pub fn add_term(&mut self, form: IndexSet, vector: IndexSet, c: R) -> Result<()> {
        if form.len() != self.form_degree {
            return Err(Error::DegreeMismatch { expected: self.form_degree, found: form.len() });
        }
        if vector.len() != self.vector_degree {
            return Err(Error::DegreeMismatch { expected: self.vector_degree, found: vector.len() });
        }
        if c.is_zero() {
            return Ok(());
        }
        let key = (form, vector);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
        Ok(())
    }

    /// Adds `ξ ⊗ V` for homogeneous `ξ` and `V` of the right degrees.
    pub fn add_product(&mut self, xi: &Form<R>, v: &Multivector<R>) -> Result<()> {
        xi.expect_degree(self.form_degree)?;
        v.expect_degree(self.vector_degree)?;
        for (f, cf) in xi.terms() {
            for (w, cw) in v.terms() {
                self.add_term(*f, *w, cf.clone() * cw.clone())?;
            }
        }
        Ok(())
    }

    /// `i_{ξ⊗X}(ω) = ξ ∧ i_X ω`; zero when `p > deg ω`.
    pub fn interior_forms(&self, omega: &Form<R>) -> Result<Form<R>> {
        if self.dim != omega.dim() {
            return Err(Error::DimensionMismatch { left: self.dim, right: omega.dim() });
        }
        omega.degree()?;
        Ok(self.interior_forms_unchecked(omega))
    }

    pub(crate) fn interior_forms_unchecked(&self, omega: &Form<R>) -> Form<R> {
        let mut out = Form::zero(self.dim);
        for ((f, v), c) in &self.terms {
            for (w, cw) in omega.terms() {
                let Some((s1, rest)) = IndexSet::contract(*v, *w) else { continue };
                let Some((s2, full)) = f.wedge(rest) else { continue };
                let val = c.clone() * cw.clone();
                out.add_term(full, if s1 * s2 > 0 { val } else { -val });
            }
        }
        out
    }

    /// The dual action on multivectors: `i_{ξ⊗X}(W) = X ∧ i_ξ W`.
    pub fn interior_multivectors(&self, w: &Multivector<R>) -> Result<Multivector<R>> {
        if self.dim != w.dim() {
            return Err(Error::DimensionMismatch { left: self.dim, right: w.dim() });
        }
        w.degree()?;
        Ok(self.interior_multivectors_unchecked(w))
    }

    pub(crate) fn interior_multivectors_unchecked(&self, w: &Multivector<R>) -> Multivector<R> {
        let mut out = Multivector::zero(self.dim);
        for ((f, v), c) in &self.terms {
            for (x, cx) in w.terms() {
                let Some((s1, rest)) = IndexSet::contract(*f, *x) else { continue };
                let Some((s2, full)) = v.wedge(rest) else { continue };
                let val = c.clone() * cx.clone();
                out.add_term(full, if s1 * s2 > 0 { val } else { -val });
            }
        }
        out
    }
}

impl<R: Ring> fmt::Debug for MixedTensor<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedTensor({},{})[", self.form_degree, self.vector_degree)?;
        for ((a, b), c) in &self.terms {
            write!(f, " ({c:?})ε{a:?}⊗e{b:?}")?;
        }
        write!(f, " ]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn e(n: usize, i: usize) -> Multivector {
        Multivector::basis(n, i)
    }
    fn eps(n: usize, i: usize) -> Form {
        Form::basis(n, i)
    }

    #[test]
    fn wedge_basics() {
        let e12 = e(2, 0).wedge(&e(2, 1)).unwrap();
        assert_eq!(e12.coeff(IndexSet::full(2)), q(1));
        assert!(e(2, 0).wedge(&e(2, 0)).unwrap().is_zero());
        let e21 = e(2, 1).wedge(&e(2, 0)).unwrap();
        assert_eq!(e21, -e12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(e(2, 0).wedge(&e(3, 0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn interior_by_larger_degree_vanishes() {
        let v = e(3, 0).wedge(&e(3, 1)).unwrap();
        let w = eps(3, 0);
        assert!(Form::interior(&v, &w).unwrap().is_zero());
    }

    #[test]
    fn interior_composition_rule_pins_sign() {
        // i_{e1∧e2}(ε¹∧ε²) = i_{e1}(i_{e2}(ε¹∧ε²)) = i_{e1}(-ε¹) = -1
        let v = e(2, 0).wedge(&e(2, 1)).unwrap();
        let w = eps(2, 0).wedge(&eps(2, 1)).unwrap();
        assert_eq!(Form::interior(&v, &w).unwrap(), Form::scalar(2, q(-1)));
    }

    #[test]
    fn interior_rejects_mixed_degrees() {
        let w = eps(2, 0) + Form::one(2);
        assert!(Form::interior(&e(2, 0), &w).is_err());
    }

    #[test]
    fn pairing_is_kronecker_on_monomials() {
        let w = eps(2, 0).wedge(&eps(2, 1)).unwrap();
        let v = e(2, 0).wedge(&e(2, 1)).unwrap();
        assert_eq!(w.pairing(&v).unwrap(), q(1));
        assert_eq!(eps(2, 0).pairing(&e(2, 1)).unwrap(), q(0));
        assert!(eps(2, 0).pairing(&v).is_err());
    }

    #[test]
    fn sharp_of_e1_wedge_e2() {
        let pi = e(2, 0).wedge(&e(2, 1)).unwrap();
        assert_eq!(sharp(&pi, &eps(2, 0)).unwrap(), e(2, 1));
        assert_eq!(sharp(&pi, &eps(2, 1)).unwrap(), -e(2, 0));
        assert!(sharp(&pi, &Form::zero(2)).unwrap().is_zero());
        assert!(sharp(&e(2, 0), &eps(2, 0)).is_err());
    }

    #[test]
    fn mixed_interior_small_case() {
        // T = ε¹ ⊗ (e1∧e2), ω = ε¹∧ε²: ε¹ ∧ i_{e1∧e2}(ε¹∧ε²) = -ε¹
        let mut t = MixedTensor::zero(2, 1, 2);
        t.add_term(IndexSet::singleton(0), IndexSet::full(2), q(1)).unwrap();
        let w = eps(2, 0).wedge(&eps(2, 1)).unwrap();
        assert_eq!(t.interior_forms(&w).unwrap(), -eps(2, 0));
        // p > deg ω
        assert!(t.interior_forms(&eps(2, 0)).unwrap().is_zero());
        // (1,2) tensor on a scalar multivector
        assert!(t.interior_multivectors(&Multivector::one(2)).unwrap().is_zero());
    }

    #[test]
    fn star_roundtrip_and_unit() {
        let n = 3;
        let lambda = eps(n, 0).wedge(&eps(n, 1)).unwrap().wedge(&eps(n, 2)).unwrap().scale(&q(5));
        assert_eq!(star(&lambda, &Multivector::one(n)).unwrap(), lambda);
        for s in IndexSet::all(n) {
            let v = Multivector::monomial(n, s, q(3));
            let w = star(&lambda, &v).unwrap();
            assert_eq!(w.degree().unwrap(), Some(n - s.len()));
            assert_eq!(star_inverse(&lambda, &w).unwrap(), v);
        }
        assert!(star(&Form::<Q>::zero(n), &Multivector::one(n)).is_err());
        assert!(star(&eps(n, 0), &Multivector::one(n)).is_err());
    }

    #[test]
    fn wedge_left_checks_degree() {
        let w = Form::wedge_left(&eps(2, 0), &eps(2, 1)).unwrap();
        assert_eq!(w, eps(2, 0).wedge(&eps(2, 1)).unwrap());
        assert!(Form::wedge_left(&eps(2, 0), &eps(2, 0)).unwrap().is_zero());
        assert!(Form::wedge_left(&Form::one(2), &eps(2, 0)).is_err());
    }

    #[test]
    fn index_set_order_is_degree_then_lex() {
        let a = IndexSet::from_sorted(&[0, 3]).unwrap();
        let b = IndexSet::from_sorted(&[1, 2]).unwrap();
        let c = IndexSet::from_sorted(&[4]).unwrap();
        assert!(c < a && a < b);
        assert!(IndexSet::from_sorted(&[2, 1]).is_err());
    }
}
