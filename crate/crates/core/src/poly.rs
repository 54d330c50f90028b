//! Polynomial multivector fields and forms on ℝⁿ: de Rham calculus, the
//! Schouten bracket, twisted Poisson structures, modular vector fields,
//! the ELW comparison and gauge transformations.
//!
//! Forms are written in the coordinate coframe `dx1…dxn`, multivectors in
//! the frame `∂1…∂n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{sharp, wedge_sharp, Exterior, Form, IndexSet, Kind, MixedTensor, Multivector};
use crate::lie::BracketTable;
use crate::linalg::solve;
use crate::scalar::{format_q, q, qf, Ring, Q};

pub const DEFAULT_MAX_BASE_DIM: usize = 6;

pub fn check_base_dim(n: usize) -> Result<()> {
    if n > DEFAULT_MAX_BASE_DIM {
        Err(Error::DimensionTooLarge { dim: n, cap: DEFAULT_MAX_BASE_DIM })
    } else {
        Ok(())
    }
}

/// Polynomial in `x1, x2, …` with rational coefficients. Exponent vectors
/// carry no trailing zeros, so the number of variables is implicit.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, Q>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl Poly {
    pub fn constant(c: Q) -> Self {
        Self::monomial(&[], c)
    }

    /// The coordinate `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Self::monomial(&e, Q::one())
    }

    pub fn monomial(exponents: &[u32], c: Q) -> Self {
        let mut p = Poly::default();
        p.add_term(exponents.to_vec(), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Q)>>(terms: I) -> Self {
        let mut p = Poly::default();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = trim(exponents);
        let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of variables actually occurring (highest index + 1).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, exponents: &[u32]) -> Q {
        self.terms.get(&trim(exponents.to_vec())).cloned().unwrap_or_else(Q::zero)
    }

    /// `∂f/∂x_{i+1}`.
    pub fn deriv(&self, i: usize) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let k = e.get(i).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * q(k as i64));
        }
        out
    }

    pub fn scale_q(&self, c: &Q) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, x)| (e.clone(), x * c)))
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(Q::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_terms(self.terms.into_iter().map(|(e, c)| (e, -c)))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let len = a.len().max(b.len());
                let e: Vec<u32> = (0..len)
                    .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Ring for Poly {
    fn try_inverse(&self) -> Option<Self> {
        match self.as_constant() {
            Some(c) if !c.is_zero() => Some(Poly::constant(c.recip())),
            _ => None,
        }
    }

    fn scale(&self, q: &Q) -> Self {
        self.scale_q(q)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| if *k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_q(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

pub type PolyMultivector = Multivector<Poly>;
pub type PolyForm = Form<Poly>;

/// Exponent vectors of total degree at most `d` in `n` variables.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(trim(prefix.clone()));
            return;
        }
        for k in 0..=d {
            prefix.push(k);
            go(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

fn map_coeffs<K: Kind>(x: &Exterior<K, Poly>, f: impl Fn(&Poly) -> Poly) -> Exterior<K, Poly> {
    Exterior::from_terms(x.dim(), x.terms().map(|(s, c)| (*s, f(c))))
}

/// Coefficientwise `∂/∂x_{i+1}`.
pub fn deriv_coeffs<K: Kind>(x: &Exterior<K, Poly>, i: usize) -> Exterior<K, Poly> {
    map_coeffs(x, |c| c.deriv(i))
}

/// `X·f` for a vector field `X`.
pub fn apply_vector(x: &PolyMultivector, f: &Poly) -> Result<Poly> {
    x.expect_degree(1)?;
    let mut out = Poly::zero();
    for (s, c) in x.terms() {
        out += c * &f.deriv(s.indices()[0]);
    }
    Ok(out)
}

pub fn divergence(x: &PolyMultivector) -> Result<Poly> {
    x.expect_degree(1)?;
    let mut out = Poly::zero();
    for (s, c) in x.terms() {
        out += c.deriv(s.indices()[0]);
    }
    Ok(out)
}

pub fn de_rham(omega: &PolyForm) -> PolyForm {
    let n = omega.dim();
    let mut out = PolyForm::zero(n);
    for (s, c) in omega.terms() {
        for i in 0..n {
            let dc = c.deriv(i);
            if dc.is_zero() {
                continue;
            }
            if let Some((sg, t)) = IndexSet::singleton(i).wedge(*s) {
                out.add_term(t, if sg > 0 { dc } else { -dc });
            }
        }
    }
    out
}

/// `d f` for a function.
pub fn differential(n: usize, f: &Poly) -> PolyForm {
    de_rham(&PolyForm::scalar(n, f.clone()))
}

/// Right derivative `∂/∂ξ_i` of a multivector viewed as a function of odd
/// variables `ξ_j = ∂_j`.
fn right_odd_derivative(a: &PolyMultivector, i: usize) -> PolyMultivector {
    let mut out = PolyMultivector::zero(a.dim());
    for (s, c) in a.terms() {
        if !s.contains(i) {
            continue;
        }
        let idx = s.indices();
        let pos = idx.iter().position(|&j| j == i).expect("contains");
        let rest = IndexSet::from_bits(s.bits() & !(1 << i));
        let sign_odd = (idx.len() - 1 - pos) % 2 == 1;
        out.add_term(rest, if sign_odd { -c.clone() } else { c.clone() });
    }
    out
}

fn schouten_homogeneous(a: &PolyMultivector, p: usize, b: &PolyMultivector, qd: usize) -> PolyMultivector {
    let n = a.dim();
    let mut out = PolyMultivector::zero(n);
    let sign = if (p + 1) * (qd + 1) % 2 == 0 { Q::one() } else { -Q::one() };
    // (−1)^{(p−1)(q−1)} = (−1)^{(p+1)(q+1)}
    for i in 0..n {
        let ra = right_odd_derivative(a, i);
        if !ra.is_zero() {
            out = out + ra.wedge(&deriv_coeffs(b, i)).expect("same dim");
        }
        let rb = right_odd_derivative(b, i);
        if !rb.is_zero() {
            let t = rb.wedge(&deriv_coeffs(a, i)).expect("same dim");
            out = out - t.scale_q(&sign);
        }
    }
    out
}

/// Schouten bracket of polynomial multivector fields, normalized so that
/// `[X, Y]` is the Lie bracket of vector fields and `[X, f] = X·f`.
pub fn schouten_fields(a: &PolyMultivector, b: &PolyMultivector) -> Result<PolyMultivector> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let mut out = PolyMultivector::zero(a.dim());
    for p in a.degrees() {
        for qd in b.degrees() {
            out = out + schouten_homogeneous(&a.grade(p), p, &b.grade(qd), qd);
        }
    }
    Ok(out)
}

/// `H_f = π♯(df)`.
pub fn hamiltonian(pi: &PolyMultivector, f: &Poly) -> Result<PolyMultivector> {
    sharp(pi, &differential(pi.dim(), f))
}

/// `−[π, f]`, the other expression for `H_f`.
pub fn hamiltonian_via_bracket(pi: &PolyMultivector, f: &Poly) -> Result<PolyMultivector> {
    Ok(-schouten_fields(pi, &PolyMultivector::scalar(pi.dim(), f.clone()))?)
}

/// `{f, g} = H_f · g`.
pub fn poisson_bracket(pi: &PolyMultivector, f: &Poly, g: &Poly) -> Result<Poly> {
    apply_vector(&hamiltonian(pi, f)?, g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiAnomaly {
    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}`.
    pub lhs: Poly,
    /// `ψ(H_f, H_g, H_h)`.
    pub rhs: Poly,
}

pub fn jacobi_anomaly(pi: &PolyMultivector, psi: &PolyForm, f: &Poly, g: &Poly, h: &Poly) -> Result<JacobiAnomaly> {
    let br = |a: &Poly, b: &Poly| poisson_bracket(pi, a, b);
    let lhs = br(&br(f, g)?, h)? + br(&br(g, h)?, f)? + br(&br(h, f)?, g)?;
    let args = [hamiltonian(pi, f)?, hamiltonian(pi, g)?, hamiltonian(pi, h)?];
    Ok(JacobiAnomaly { lhs, rhs: psi.evaluate(&args)? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldTwistReport {
    pub closed: bool,
    pub condition: bool,
    pub defect: PolyMultivector,
}

impl FieldTwistReport {
    pub fn is_twisted(&self) -> bool {
        self.closed && self.condition
    }
}

pub fn verify_twisted_fields(pi: &PolyMultivector, psi: &PolyForm) -> Result<FieldTwistReport> {
    pi.expect_degree(2)?;
    psi.expect_degree(3)?;
    let closed = de_rham(psi).is_zero();
    let half = schouten_fields(pi, pi)?.scale_q(&qf(1, 2));
    let defect = half - wedge_sharp(pi, psi)?;
    Ok(FieldTwistReport { closed, condition: defect.is_zero(), defect })
}

fn require_twisted(pi: &PolyMultivector, psi: &PolyForm) -> Result<()> {
    let r = verify_twisted_fields(pi, psi)?;
    if r.is_twisted() {
        Ok(())
    } else {
        Err(Error::NotTwisted { closed: r.closed, condition: r.condition })
    }
}

/// `ψ⁽¹⁾(X, Y) = Σ_k ψ(π♯dx_k, X, Y) ∂_k`.
pub fn psi1_pair(pi: &PolyMultivector, psi: &PolyForm, x: &PolyMultivector, y: &PolyMultivector) -> Result<PolyMultivector> {
    let n = pi.dim();
    let mut out = PolyMultivector::zero(n);
    for k in 0..n {
        let pk = sharp(pi, &PolyForm::basis(n, k))?;
        out.add_term(IndexSet::singleton(k), psi.evaluate(&[pk, x.clone(), y.clone()])?);
    }
    Ok(out)
}

/// `ψ⁽²⁾` as a one-form-valued bivector field.
pub fn psi2_fields(pi: &PolyMultivector, psi: &PolyForm) -> Result<MixedTensor<Poly>> {
    let n = pi.dim();
    let images: Vec<PolyMultivector> =
        (0..n).map(|k| sharp(pi, &PolyForm::basis(n, k))).collect::<Result<_>>()?;
    let mut t = MixedTensor::zero(n, 1, 2);
    for k in 0..n {
        for l in (k + 1)..n {
            for m in 0..n {
                let v = psi.evaluate(&[images[k].clone(), images[l].clone(), PolyMultivector::basis(n, m)])?;
                t.add_term(IndexSet::singleton(m), IndexSet::from_bits((1 << k) | (1 << l)), v)?;
            }
        }
    }
    Ok(t)
}

/// `d_{π,ψ} V = [π, V] − d̲_{π,ψ} V`.
pub fn d_pi_psi_fields(pi: &PolyMultivector, psi: &PolyForm, v: &PolyMultivector) -> Result<PolyMultivector> {
    Ok(schouten_fields(pi, v)? - psi2_fields(pi, psi)?.interior_multivectors(v)?)
}

/// Both sides of the coboundary formula
/// `⟨α∧β, d_{π,ψ}Y⟩ = −⟨π, d i_{π♯α∧π♯β}ψ⟩ + ⟨d(α∧β), ½[π,π]⟩` on a pair of
/// one-forms. The right-hand side is not tensorial; take `α, β` closed.
pub fn coboundary_sides_fields(pi: &PolyMultivector, psi: &PolyForm, a: &PolyForm, b: &PolyForm) -> Result<(Poly, Poly)> {
    let ab = a.wedge(b)?;
    let dy = d_pi_psi_fields(pi, psi, &y_field(pi, psi)?)?;
    let lhs = ab.pairing(&dy)?;
    let pab = sharp(pi, a)?.wedge(&sharp(pi, b)?)?;
    let t1 = -pi.pairing(&de_rham(&Form::interior(&pab, psi)?))?;
    let half = schouten_fields(pi, pi)?.scale_q(&crate::scalar::qf(1, 2));
    Ok((lhs, t1 + de_rham(&ab).pairing(&half)?))
}

/// First coordinate pair `(k, l)` where the coboundary formula fails.
pub fn coboundary_defect_fields(pi: &PolyMultivector, psi: &PolyForm) -> Result<Option<(usize, usize)>> {
    let n = pi.dim();
    for k in 0..n {
        for l in (k + 1)..n {
            let (lhs, rhs) = coboundary_sides_fields(pi, psi, &PolyForm::basis(n, k), &PolyForm::basis(n, l))?;
            if lhs != rhs {
                return Ok(Some((k, l)));
            }
        }
    }
    Ok(None)
}

/// `ℒ_V ω = i_V dω + d i_V ω` for a vector field `V`.
pub fn lie_derivative_fields(v: &PolyMultivector, omega: &PolyForm) -> Result<PolyForm> {
    v.expect_degree(1)?;
    Ok(Form::interior(v, &de_rham(omega))? + de_rham(&Form::interior(v, omega)?))
}

fn volume_constant(lambda: &PolyForm) -> Result<Q> {
    let n = lambda.dim();
    if lambda.num_terms() != 1 {
        return Err(Error::BadVolume { dim: n });
    }
    let c = lambda.coeff(IndexSet::full(n));
    match c.as_constant() {
        Some(c) if !c.is_zero() => Ok(c),
        Some(_) => Err(Error::BadVolume { dim: n }),
        None => Err(Error::NonConstantVolume),
    }
}

/// `X_{π,λ}` for a constant volume: `⟨dx_k, X⟩ = div(π♯dx_k)`.
pub fn x_field(pi: &PolyMultivector, lambda: &PolyForm) -> Result<PolyMultivector> {
    volume_constant(lambda)?;
    let n = pi.dim();
    let mut out = PolyMultivector::zero(n);
    for k in 0..n {
        out.add_term(IndexSet::singleton(k), divergence(&sharp(pi, &PolyForm::basis(n, k))?)?);
    }
    Ok(out)
}

/// `Y_{π,ψ} = −π♯(i_π ψ)`, i.e. `⟨α, Y⟩ = ½ Tr ψ⁽²⁾(α, ·)`.
pub fn y_field(pi: &PolyMultivector, psi: &PolyForm) -> Result<PolyMultivector> {
    Ok(-sharp(pi, &Form::interior(pi, psi)?)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularField {
    pub x: PolyMultivector,
    pub y: PolyMultivector,
    pub z: PolyMultivector,
}

pub fn modular_vector_field(pi: &PolyMultivector, psi: &PolyForm, lambda: &PolyForm) -> Result<ModularField> {
    require_twisted(pi, psi)?;
    let x = x_field(pi, lambda)?;
    let y = y_field(pi, psi)?;
    let z = &x + &y;
    Ok(ModularField { x, y, z })
}

/// `[α, β]_{π,ψ} = ℒ_{π♯α}β − ℒ_{π♯β}α − d(π(α,β)) + ψ(π♯α, π♯β, ·)`.
pub fn twisted_bracket_one_forms(pi: &PolyMultivector, psi: &PolyForm, a: &PolyForm, b: &PolyForm) -> Result<PolyForm> {
    let n = pi.dim();
    let (pa, pb) = (sharp(pi, a)?, sharp(pi, b)?);
    let pab = b.pairing(&pa)?;
    let mut out = lie_derivative_fields(&pa, b)? - lie_derivative_fields(&pb, a)? - differential(n, &pab);
    for m in 0..n {
        let v = psi.evaluate(&[pa.clone(), pb.clone(), PolyMultivector::basis(n, m)])?;
        out.add_term(IndexSet::singleton(m), v);
    }
    Ok(out)
}

/// `U` with `⟨α, U⟩λ⊗λ = [α, λ]_{π,ψ}⊗λ + λ⊗ℒ_{π♯α}λ`, for a constant volume.
/// The bracket with `λ = c dx_1∧…∧dx_n` is expanded factor by factor.
pub fn elw_field(pi: &PolyMultivector, psi: &PolyForm, lambda: &PolyForm) -> Result<PolyMultivector> {
    volume_constant(lambda)?;
    let n = pi.dim();
    let mut out = PolyMultivector::zero(n);
    for k in 0..n {
        let a = PolyForm::basis(n, k);
        let mut coeff = Poly::zero();
        for j in 0..n {
            let br = twisted_bracket_one_forms(pi, psi, &a, &PolyForm::basis(n, j))?;
            coeff += br.coeff(IndexSet::singleton(j));
        }
        let lie = lie_derivative_fields(&sharp(pi, &a)?, lambda)?;
        let ratio = lie.coeff(IndexSet::full(n)) * Poly::constant(volume_constant(lambda)?.recip());
        out.add_term(IndexSet::singleton(k), coeff + ratio);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElwReport {
    pub u: PolyMultivector,
    pub z: PolyMultivector,
    pub holds: bool,
}

pub fn elw_factor_two(pi: &PolyMultivector, psi: &PolyForm, lambda: &PolyForm) -> Result<ElwReport> {
    let z = modular_vector_field(pi, psi, lambda)?.z;
    let u = elw_field(pi, psi, lambda)?;
    let holds = u == z.scale_q(&q(2));
    Ok(ElwReport { u, z, holds })
}

/// A polynomial `u` of degree at most `max_degree` with `[π, u] = V`.
pub fn hamiltonian_preimage(pi: &PolyMultivector, v: &PolyMultivector, max_degree: u32) -> Result<Option<Poly>> {
    v.expect_degree(1).or_else(|e| if v.is_zero() { Ok(()) } else { Err(e) })?;
    let n = pi.dim();
    let basis = monomials_up_to(n, max_degree);
    let images: Vec<PolyMultivector> = basis
        .iter()
        .map(|e| schouten_fields(pi, &PolyMultivector::scalar(n, Poly::monomial(e, Q::one()))))
        .collect::<Result<_>>()?;
    let mut rows: HashMap<(IndexSet, Vec<u32>), usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut index = |key: (IndexSet, Vec<u32>)| {
        *rows.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            keys.len() - 1
        })
    };
    let mut entries = Vec::new();
    for (col, img) in images.iter().enumerate() {
        for (s, c) in img.terms() {
            for (e, x) in c.terms() {
                entries.push((index((*s, e.clone())), col, x.clone()));
            }
        }
    }
    let mut rhs_entries = Vec::new();
    for (s, c) in v.terms() {
        for (e, x) in c.terms() {
            rhs_entries.push((index((*s, e.clone())), x.clone()));
        }
    }
    let m = keys.len();
    let mut a = vec![vec![Q::zero(); basis.len()]; m];
    for (r, c, x) in entries {
        a[r][c] += x;
    }
    let mut b = vec![Q::zero(); m];
    for (r, x) in rhs_entries {
        b[r] += x;
    }
    Ok(solve(&a, &b).map(|x| Poly::from_terms(basis.into_iter().zip(x))))
}

/// True iff `[π, u] = V` has no polynomial solution of degree `⩽ max_degree`.
pub fn not_globally_hamiltonian(pi: &PolyMultivector, v: &PolyMultivector, max_degree: u32) -> Result<bool> {
    Ok(hamiltonian_preimage(pi, v, max_degree)?.is_none())
}

/// The linear Poisson structure `Σ_{i<j} c^k_{ij} x_k ∂_i∧∂_j` on the dual
/// of a Lie algebra with the given structure constants.
pub fn lie_poisson<K: Kind>(table: &BracketTable<K>) -> PolyMultivector {
    let n = table.dim();
    let mut pi = PolyMultivector::zero(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut c = Poly::zero();
            for k in 0..n {
                c += Poly::var(k).scale_q(&table.constant(i, j, k));
            }
            pi.add_term(IndexSet::from_bits((1 << i) | (1 << j)), c);
        }
    }
    pi
}

pub fn determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut out = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor = minor_matrix(m, 0, j);
                let t = &m[0][j] * &determinant(&minor);
                out += if j % 2 == 0 { t } else { -t };
            }
            out
        }
    }
}

fn minor_matrix(m: &[Vec<Poly>], row: usize, col: usize) -> Vec<Vec<Poly>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// `σ_B = Id + B♭∘π♯` on one-forms together with its inverse; requires a
/// nonzero constant determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeData {
    /// `sigma[j][k]` is the `dx_j` coefficient of `σ(dx_k)`.
    pub sigma: Vec<Vec<Poly>>,
    pub inverse: Vec<Vec<Poly>>,
    pub det: Q,
}

impl GaugeData {
    pub fn new(pi: &PolyMultivector, b: &PolyForm) -> Result<Self> {
        b.expect_degree(2).or_else(|e| if b.is_zero() { Ok(()) } else { Err(e) })?;
        let n = pi.dim();
        let mut sigma = vec![vec![Poly::zero(); n]; n];
        for k in 0..n {
            let a = PolyForm::basis(n, k);
            let img = a.clone() + Form::interior(&sharp(pi, &a)?, b)?;
            for (j, row) in sigma.iter_mut().enumerate() {
                row[k] = img.coeff(IndexSet::singleton(j));
            }
        }
        let det_poly = determinant(&sigma);
        let det = match det_poly.as_constant() {
            Some(c) if !c.is_zero() => c,
            _ => return Err(Error::GaugeNotInvertible { det: det_poly.to_string() }),
        };
        let inv_det = Poly::constant(det.recip());
        let inverse = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = determinant(&minor_matrix(&sigma, j, i));
                        let c = if (i + j) % 2 == 0 { c } else { -c };
                        &c * &inv_det
                    })
                    .collect()
            })
            .collect();
        Ok(GaugeData { sigma, inverse, det })
    }

    fn apply(m: &[Vec<Poly>], alpha: &PolyForm) -> PolyForm {
        let n = alpha.dim();
        let mut out = PolyForm::zero(n);
        for (k, col_coeff) in (0..n).map(|k| (k, alpha.coeff(IndexSet::singleton(k)))) {
            if col_coeff.is_zero() {
                continue;
            }
            for (j, row) in m.iter().enumerate() {
                out.add_term(IndexSet::singleton(j), &row[k] * &col_coeff);
            }
        }
        out
    }

    fn transpose_apply(m: &[Vec<Poly>], x: &PolyMultivector) -> PolyMultivector {
        let n = x.dim();
        let mut out = PolyMultivector::zero(n);
        for k in 0..n {
            let mut c = Poly::zero();
            for (j, row) in m.iter().enumerate() {
                c += &row[k] * &x.coeff(IndexSet::singleton(j));
            }
            out.add_term(IndexSet::singleton(k), c);
        }
        out
    }

    pub fn sigma_form(&self, alpha: &PolyForm) -> PolyForm {
        Self::apply(&self.sigma, alpha)
    }

    pub fn inverse_form(&self, alpha: &PolyForm) -> PolyForm {
        Self::apply(&self.inverse, alpha)
    }

    /// `ᵗσ X = X + π♯ i_X B`.
    pub fn transpose(&self, x: &PolyMultivector) -> PolyMultivector {
        Self::transpose_apply(&self.sigma, x)
    }

    pub fn transpose_inverse(&self, x: &PolyMultivector) -> PolyMultivector {
        Self::transpose_apply(&self.inverse, x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gauged {
    pub pi: PolyMultivector,
    pub psi: PolyForm,
    pub data: GaugeData,
}

/// `(π′, ψ − dB)` with `(π′)♯ = π♯ σ_B⁻¹`.
pub fn gauge_transform(pi: &PolyMultivector, psi: &PolyForm, b: &PolyForm) -> Result<Gauged> {
    let data = GaugeData::new(pi, b)?;
    let n = pi.dim();
    let images: Vec<PolyMultivector> = (0..n)
        .map(|k| sharp(pi, &data.inverse_form(&PolyForm::basis(n, k))))
        .collect::<Result<_>>()?;
    let mut new_pi = PolyMultivector::zero(n);
    for k in 0..n {
        for l in (k + 1)..n {
            new_pi.add_term(IndexSet::from_bits((1 << k) | (1 << l)), images[k].coeff(IndexSet::singleton(l)));
        }
    }
    for (k, img) in images.iter().enumerate() {
        if &sharp(&new_pi, &PolyForm::basis(n, k))? != img {
            return Err(Error::Invalid("gauge-transformed bivector is not skew".into()));
        }
    }
    Ok(Gauged { pi: new_pi, psi: psi - &de_rham(b), data })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeReport {
    pub z: PolyMultivector,
    pub z_prime: PolyMultivector,
    pub twisted_preserved: bool,
    /// `Z + π♯ i_Z B`.
    pub transported: PolyMultivector,
    /// `ᵗσ⁻¹ Z`.
    pub transported_inverse: PolyMultivector,
    /// `u` with `Z′ − (Z + π♯ i_Z B) = [π′, u]`, if found.
    pub forward: Option<Poly>,
    /// `u` with `Z′ − ᵗσ⁻¹ Z = [π′, u]`, if found.
    pub backward: Option<Poly>,
}

/// Compares the modular vector fields of `(π, ψ)` and its gauge transform,
/// both with the same constant volume (a constant rescaling does not change
/// the modular field).
pub fn gauge_modular_correspondence(
    pi: &PolyMultivector,
    psi: &PolyForm,
    b: &PolyForm,
    lambda: &PolyForm,
    degree_bound: u32,
) -> Result<GaugeReport> {
    let g = gauge_transform(pi, psi, b)?;
    let z = modular_vector_field(pi, psi, lambda)?.z;
    let twisted_preserved = verify_twisted_fields(&g.pi, &g.psi)?.is_twisted();
    let z_prime = modular_vector_field(&g.pi, &g.psi, lambda)?.z;
    let transported = g.data.transpose(&z);
    let transported_inverse = g.data.transpose_inverse(&z);
    let forward = hamiltonian_preimage(&g.pi, &(&z_prime - &transported), degree_bound)?;
    let backward = hamiltonian_preimage(&g.pi, &(&z_prime - &transported_inverse), degree_bound)?;
    Ok(GaugeReport { z, z_prime, twisted_preserved, transported, transported_inverse, forward, backward })
}

/// Default degree bound for coboundary searches: `2·(max input degree) + 4`.
pub fn default_degree_bound<'a, K: Kind + 'a>(inputs: impl IntoIterator<Item = &'a Exterior<K, Poly>>) -> u32 {
    let d = inputs.into_iter().flat_map(|x| x.terms().filter_map(|(_, c)| c.degree())).max().unwrap_or(0);
    2 * d + 4
}

/// Named instances on ℝⁿ.
pub mod instances {
    use super::*;
    use crate::lie::catalog;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(q(v))
    }

    pub fn bivector(n: usize, terms: Vec<(usize, usize, Poly)>) -> PolyMultivector {
        PolyMultivector::from_terms(n, terms.into_iter().map(|(i, j, p)| (IndexSet::from_bits((1 << i) | (1 << j)), p)))
    }

    pub fn form(n: usize, terms: Vec<(&[usize], Poly)>) -> PolyForm {
        PolyForm::from_terms(n, terms.into_iter().map(|(s, p)| (IndexSet::from_sorted(s).expect("sorted"), p)))
    }

    pub fn volume(n: usize) -> PolyForm {
        PolyForm::monomial(n, IndexSet::full(n), Poly::one())
    }

    /// `π = ∂1∧∂2` on ℝ².
    pub fn symplectic_r2() -> PolyMultivector {
        bivector(2, vec![(0, 1, c(1))])
    }

    /// The linear Poisson structure dual to `(𝔤*, [ , ]_r)` for `[e1,e2] = e1`,
    /// `r = e1∧e2`: `π^r = −x2 ∂1∧∂2`.
    pub fn linear_rmatrix() -> PolyMultivector {
        lie_poisson(&crate::twisted::examples::aff1_triangular().dual_table())
    }

    /// Linear Poisson structure of `sl(2)*`.
    pub fn lie_poisson_sl2() -> PolyMultivector {
        lie_poisson(catalog::sl2().table())
    }

    /// ℝ³ with `π = (1+x1)∂1∧∂2 + ∂2∧∂3` and `ψ = dx1∧dx2∧dx3`.
    pub fn twisted_r3() -> (PolyMultivector, PolyForm) {
        let pi = bivector(3, vec![(0, 1, c(1) + x(0)), (1, 2, c(1))]);
        (pi, form(3, vec![(&[0, 1, 2], c(1))]))
    }

    /// ℝ⁴ with `π = −x2 ∂1∧∂2 + ∂3∧∂4`, `ψ = 0` and the gauge 2-form
    /// `B = x4 dx1∧dx3` (det σ_B = 1). The modular class is nontrivial.
    pub fn split_r4_with_gauge() -> (PolyMultivector, PolyForm, PolyForm) {
        let pi = bivector(4, vec![(0, 1, -x(1)), (2, 3, c(1))]);
        (pi, PolyForm::zero(4), form(4, vec![(&[0, 2], x(3))]))
    }

    /// Constant-coefficient instance: `π = ∂1∧∂2 + ∂3∧∂4`, `ψ = 0`,
    /// `B = dx1∧dx3 + 2 dx2∧dx4`.
    pub fn constant_r4_with_gauge() -> (PolyMultivector, PolyForm, PolyForm) {
        let pi = bivector(4, vec![(0, 1, c(1)), (2, 3, c(1))]);
        (pi, PolyForm::zero(4), form(4, vec![(&[0, 2], c(1)), (&[1, 3], c(2))]))
    }

    /// ℝ⁴ with `ω = dx12 + dx34 + x2 x4 dx13`, `π = ω⁻¹`, `ψ = −dω`.
    pub fn twisted_r4() -> (PolyMultivector, PolyForm) {
        let f = x(1) * x(3);
        let omega = form(4, vec![(&[0, 1], c(1)), (&[2, 3], c(1)), (&[0, 2], f)]);
        // ω has Pfaffian 1, so the inverse stays polynomial
        let m: Vec<Vec<Poly>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        if i == j {
                            return Poly::zero();
                        }
                        let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
                        omega.coeff(IndexSet::from_bits((1 << a) | (1 << b))).scale_q(&q(s))
                    })
                    .collect()
            })
            .collect();
        let det = determinant(&m).as_constant().expect("constant Pfaffian");
        let mut pi = PolyMultivector::zero(4);
        for k in 0..4 {
            for l in (k + 1)..4 {
                let cof = determinant(&minor_matrix(&m, l, k));
                let cof = if (k + l) % 2 == 0 { cof } else { -cof };
                pi.add_term(IndexSet::from_bits((1 << k) | (1 << l)), cof.scale_q(&det.recip()));
            }
        }
        (pi, -de_rham(&omega))
    }
}

#[cfg(test)]
mod tests {
    use super::instances::*;
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(q(v))
    }

    fn vf(n: usize, comps: Vec<Poly>) -> PolyMultivector {
        PolyMultivector::from_terms(n, comps.into_iter().enumerate().map(|(i, p)| (IndexSet::singleton(i), p)))
    }

    // Lie bracket of vector fields, written out directly.
    fn lie_bracket(a: &PolyMultivector, b: &PolyMultivector) -> PolyMultivector {
        let n = a.dim();
        vf(
            n,
            (0..n)
                .map(|k| {
                    let bk = b.coeff(IndexSet::singleton(k));
                    let ak = a.coeff(IndexSet::singleton(k));
                    apply_vector(a, &bk).unwrap() - apply_vector(b, &ak).unwrap()
                })
                .collect(),
        )
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec((prop::collection::vec(0u32..3, nvars), -3i64..4), 0..4)
            .prop_map(|ts| Poly::from_terms(ts.into_iter().map(|(e, c)| (e, q(c)))))
    }

    fn arb_field(n: usize, p: usize) -> impl Strategy<Value = PolyMultivector> {
        let sets = IndexSet::of_degree(n, p);
        prop::collection::vec(arb_poly(n), sets.len())
            .prop_map(move |cs| PolyMultivector::from_terms(n, sets.clone().into_iter().zip(cs)))
    }

    #[test]
    fn poly_arithmetic() {
        let p = (x(0) + c(1)) * (x(0) - c(1));
        assert_eq!(p, x(0) * x(0) - c(1));
        assert_eq!(p.deriv(0), x(0).scale_q(&q(2)));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(c(3).as_constant(), Some(q(3)));
        assert!(x(2).as_constant().is_none());
        assert_eq!(p.to_string(), "x1^2 - 1");
        assert_eq!((x(1) - x(1)).degree(), None);
    }

    #[test]
    fn de_rham_examples() {
        let w = form(2, vec![(&[1], x(0))]);
        assert_eq!(de_rham(&w), form(2, vec![(&[0, 1], c(1))]));
        assert!(de_rham(&form(3, vec![(&[1], c(1))])).is_zero());
    }

    #[test]
    fn schouten_examples() {
        let d1 = vf(2, vec![c(1), c(0)]);
        let x1d2 = vf(2, vec![c(0), x(0)]);
        assert_eq!(schouten_fields(&d1, &x1d2).unwrap(), vf(2, vec![c(0), c(1)]));
        let pi = symplectic_r2();
        assert!(schouten_fields(&pi, &pi).unwrap().is_zero());
        assert_eq!(linear_rmatrix(), bivector(2, vec![(0, 1, -x(1))]));
        assert!(schouten_fields(&linear_rmatrix(), &linear_rmatrix()).unwrap().is_zero());
        let sl2 = lie_poisson_sl2();
        assert!(schouten_fields(&sl2, &sl2).unwrap().is_zero());
    }

    #[test]
    fn schouten_matches_extension_formula() {
        // [X1∧X2, Y] = [X1,Y]∧X2 + X1∧[X2,Y] and [Y, X1∧X2] = [Y,X1]∧X2 + X1∧[Y,X2]
        let n = 3;
        let x1 = vf(n, vec![x(1), c(1), x(0) * x(2)]);
        let x2 = vf(n, vec![c(0), x(2), x(0)]);
        let y = vf(n, vec![x(0) * x(1), c(2), x(1)]);
        let w = x1.wedge(&x2).unwrap();
        let lhs = schouten_fields(&w, &y).unwrap();
        let rhs = lie_bracket(&x1, &y).wedge(&x2).unwrap() + x1.wedge(&lie_bracket(&x2, &y)).unwrap();
        assert_eq!(lhs, rhs);
        let lhs2 = schouten_fields(&y, &w).unwrap();
        let rhs2 = lie_bracket(&y, &x1).wedge(&x2).unwrap() + x1.wedge(&lie_bracket(&y, &x2)).unwrap();
        assert_eq!(lhs2, rhs2);
        let f = x(0) * x(2);
        assert_eq!(
            schouten_fields(&x1, &PolyMultivector::scalar(n, f.clone())).unwrap(),
            PolyMultivector::scalar(n, apply_vector(&x1, &f).unwrap())
        );
    }

    #[test]
    fn hamiltonian_formulas_agree() {
        for pi in [symplectic_r2(), linear_rmatrix()] {
            for f in [x(0), x(0) * x(1) + c(3), x(1) * x(1) * x(0)] {
                assert_eq!(hamiltonian(&pi, &f).unwrap(), hamiltonian_via_bracket(&pi, &f).unwrap());
            }
        }
        // π♯ε¹ = e2
        assert_eq!(hamiltonian(&symplectic_r2(), &x(0)).unwrap(), vf(2, vec![c(0), c(1)]));
        assert!(hamiltonian(&symplectic_r2(), &c(5)).unwrap().is_zero());
        assert_eq!(hamiltonian(&linear_rmatrix(), &x(0)).unwrap(), vf(2, vec![c(0), -x(1)]));
    }

    #[test]
    fn linear_rmatrix_modular_field() {
        let pi = linear_rmatrix();
        let lam = volume(2);
        let m = modular_vector_field(&pi, &PolyForm::zero(2), &lam).unwrap();
        assert_eq!(m.x, vf(2, vec![c(-1), c(0)]));
        let r = elw_factor_two(&pi, &PolyForm::zero(2), &lam).unwrap();
        assert!(r.holds);
        assert_eq!(r.u, vf(2, vec![c(-2), c(0)]));
    }

    #[test]
    fn twisted_instances() {
        let (pi, psi) = twisted_r3();
        assert!(verify_twisted_fields(&pi, &psi).unwrap().is_twisted());
        let m = modular_vector_field(&pi, &psi, &volume(3)).unwrap();
        assert!(!m.z.is_zero());
        assert!(d_pi_psi_fields(&pi, &psi, &m.z).unwrap().is_zero());
        assert!(elw_factor_two(&pi, &psi, &volume(3)).unwrap().holds);

        let (pi, psi) = twisted_r4();
        let r = verify_twisted_fields(&pi, &psi).unwrap();
        assert!(r.is_twisted(), "{:?}", r.defect);
        assert!(!psi.is_zero());
        let m = modular_vector_field(&pi, &psi, &volume(4)).unwrap();
        assert!(!m.y.is_zero());
        assert!(m.z.is_zero());
        assert!(elw_factor_two(&pi, &psi, &volume(4)).unwrap().holds);
    }

    #[test]
    fn modular_field_rejects_bad_input() {
        let pi = symplectic_r2();
        let lam = PolyForm::monomial(2, IndexSet::full(2), x(0) + c(1));
        assert_eq!(modular_vector_field(&pi, &PolyForm::zero(2), &lam), Err(Error::NonConstantVolume));
        let bad = bivector(3, vec![(0, 1, x(1)), (1, 2, c(1))]);
        assert!(matches!(
            modular_vector_field(&bad, &PolyForm::zero(3), &volume(3)),
            Err(Error::NotTwisted { .. })
        ));
    }

    #[test]
    fn divergence_of_hamiltonian_fields() {
        let (pi, psi) = twisted_r3();
        let lam = volume(3);
        let m = modular_vector_field(&pi, &psi, &lam).unwrap();
        for f in [x(0), x(1) * x(2), x(0) * x(0) + x(2)] {
            let h = hamiltonian(&pi, &f).unwrap();
            let lie = lie_derivative_fields(&h, &lam).unwrap();
            assert_eq!(lie, lam.map_coeffs(|l| l.clone() * apply_vector(&m.x, &f).unwrap()));
        }
    }

    #[test]
    fn jacobi_anomaly_matches_psi() {
        let (pi, psi) = twisted_r4();
        let fs = [x(0) * x(1), x(2) + x(3) * x(0), x(1) * x(2)];
        let r = jacobi_anomaly(&pi, &psi, &fs[0], &fs[1], &fs[2]).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(!r.lhs.is_zero());
        let wrong = jacobi_anomaly(&pi, &PolyForm::zero(4), &fs[0], &fs[1], &fs[2]).unwrap();
        assert_ne!(wrong.lhs, wrong.rhs);
    }

    #[test]
    fn hamiltonian_of_bracket() {
        let (pi, psi) = twisted_r4();
        let (f, g) = (x(0) * x(2), x(1) + x(3) * x(3));
        let hf = hamiltonian(&pi, &f).unwrap();
        let hg = hamiltonian(&pi, &g).unwrap();
        let lhs = hamiltonian(&pi, &poisson_bracket(&pi, &f, &g).unwrap()).unwrap();
        let rhs = schouten_fields(&hf, &hg).unwrap() + psi1_pair(&pi, &psi, &hf, &hg).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_search() {
        let pi = linear_rmatrix();
        assert!(not_globally_hamiltonian(&pi, &vf(2, vec![c(-1), c(0)]), 6).unwrap());
        let target = schouten_fields(&pi, &PolyMultivector::scalar(2, x(0) * x(1))).unwrap();
        let u = hamiltonian_preimage(&pi, &target, 3).unwrap().unwrap();
        assert_eq!(schouten_fields(&pi, &PolyMultivector::scalar(2, u)).unwrap(), target);
        assert!(!not_globally_hamiltonian(&pi, &PolyMultivector::zero(2), 2).unwrap());
    }

    #[test]
    fn gauge_identity_and_constant() {
        let pi = symplectic_r2();
        let g = gauge_transform(&pi, &PolyForm::zero(2), &PolyForm::zero(2)).unwrap();
        assert_eq!(g.pi, pi);
        let b = form(2, vec![(&[0, 1], c(2))]);
        let g = gauge_transform(&pi, &PolyForm::zero(2), &b).unwrap();
        assert_eq!(g.data.det, q(1));
        // σ = −Id, so π′ = −π
        assert_eq!(g.pi, -pi);
        let degenerate = form(2, vec![(&[0, 1], c(1))]);
        assert!(matches!(gauge_transform(&symplectic_r2(), &PolyForm::zero(2), &degenerate), Err(Error::GaugeNotInvertible { .. })));
        assert!(verify_twisted_fields(&g.pi, &g.psi).unwrap().is_twisted());
    }

    #[test]
    fn gauge_rejects_non_constant_determinant() {
        let pi = bivector(3, vec![(0, 1, c(1))]);
        let b = form(3, vec![(&[0, 1], x(2))]);
        assert!(matches!(gauge_transform(&pi, &PolyForm::zero(3), &b), Err(Error::GaugeNotInvertible { .. })));
    }

    #[test]
    fn transpose_is_x_plus_sharp_b() {
        let (pi, _) = twisted_r3();
        let b = form(3, vec![(&[0, 2], x(1))]);
        let data = GaugeData::new(&pi, &b).unwrap();
        let xv = vf(3, vec![x(0), c(1), x(2) * x(1)]);
        let expected = &xv + &sharp(&pi, &Form::interior(&xv, &b).unwrap()).unwrap();
        assert_eq!(data.transpose(&xv), expected);
        assert_eq!(data.transpose_inverse(&data.transpose(&xv)), xv);
    }

    #[test]
    fn coboundary_formula_on_coordinate_forms() {
        let zero3 = PolyForm::zero(3);
        let cases = vec![
            instances::twisted_r3(),
            instances::twisted_r4(),
            (instances::lie_poisson_sl2(), zero3),
            (instances::symplectic_r2(), PolyForm::zero(2)),
        ];
        for (pi, psi) in cases {
            assert!(verify_twisted_fields(&pi, &psi).unwrap().is_twisted());
            assert_eq!(coboundary_defect_fields(&pi, &psi).unwrap(), None);
        }
    }

    #[test]
    fn gauge_transports_by_inverse_transpose() {
        let (pi, psi, b) = split_r4_with_gauge();
        let r = gauge_modular_correspondence(&pi, &psi, &b, &volume(4), 6).unwrap();
        assert!(r.twisted_preserved);
        assert!(not_globally_hamiltonian(&pi, &r.z, 6).unwrap());
        assert_eq!(r.z_prime, r.transported_inverse);
        assert!(r.backward.is_some());
        assert!(r.forward.is_none());

        let (pi, psi, b) = constant_r4_with_gauge();
        let g = gauge_transform(&pi, &psi, &b).unwrap();
        assert!(verify_twisted_fields(&g.pi, &g.psi).unwrap().is_twisted());
        let r = gauge_modular_correspondence(&pi, &psi, &b, &volume(4), 4).unwrap();
        assert!(r.forward.is_some() && r.backward.is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn de_rham_squares_to_zero(w in arb_field(3, 1)) {
            let f = PolyForm::from_terms(3, w.terms().map(|(s, c)| (*s, c.clone())));
            prop_assert!(de_rham(&de_rham(&f)).is_zero());
        }

        #[test]
        fn schouten_graded_jacobi(a in arb_field(3, 1), b in arb_field(3, 2), cc in arb_field(3, 1)) {
            // [a,[b,c]] = [[a,b],c] + (−1)^{(|a|−1)(|b|−1)} [b,[a,c]]
            let (pa, pb) = (1i64, 2i64);
            let s = if ((pa - 1) * (pb - 1)) % 2 == 0 { q(1) } else { q(-1) };
            let lhs = schouten_fields(&a, &schouten_fields(&b, &cc).unwrap()).unwrap();
            let rhs = schouten_fields(&schouten_fields(&a, &b).unwrap(), &cc).unwrap()
                + schouten_fields(&b, &schouten_fields(&a, &cc).unwrap()).unwrap().scale_q(&s);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn schouten_graded_antisymmetry(a in arb_field(3, 2), b in arb_field(3, 2)) {
            let ab = schouten_fields(&a, &b).unwrap();
            let ba = schouten_fields(&b, &a).unwrap();
            // −(−1)^{(2−1)(2−1)} = +1
            prop_assert_eq!(ab, ba);
        }
    }
}
