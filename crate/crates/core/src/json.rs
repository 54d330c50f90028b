//! JSON structure files and term serialization.
//!
//! Coefficients are `"p/q"` strings. Lie-algebra files name basis vectors
//! (`"H"`, `"Xp"`, …); form indices may carry a trailing `*`. Polynomial
//! files use frame names `"d1"…` for multivectors and `"dx1"…` for forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Exterior, Form, IndexSet, Kind, Multivector};
use crate::lie::LieAlgebra;
use crate::poly::{Poly, PolyForm, PolyMultivector};
use crate::scalar::{format_q, parse_q, Q};
use crate::twisted::TwistedStructure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub indices: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub x: String,
    pub y: String,
    pub value: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraJson {
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilinear_form: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub algebra: LieAlgebraJson,
    pub pi: Vec<TermJson>,
    #[serde(default)]
    pub psi: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<TermJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub monomial: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermJson {
    pub indices: Vec<String>,
    pub coeff: Vec<MonomialJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyStructureJson {
    pub base_dim: usize,
    pub pi: Vec<PolyTermJson>,
    #[serde(default)]
    pub psi: Vec<PolyTermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<PolyTermJson>>,
    /// Gauge 2-form.
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<PolyTermJson>>,
    /// Vector field to test for being hamiltonian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<PolyTermJson>>,
    /// Functions for the Jacobiator check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<Vec<MonomialJson>>,
}

/// Either kind of structure file, told apart by `"algebra"` vs `"base_dim"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputJson {
    Algebra(StructureJson),
    Poly(PolyStructureJson),
}

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("{path}: {msg}"))
}

fn parse_coeff(path: &str, s: &str) -> Result<Q> {
    parse_q(s).map_err(|_| bad(path, format!("bad rational {s:?}")))
}

/// Parses a structure file, reporting syntax errors with line and column.
pub fn parse_input(text: &str) -> Result<InputJson> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let is_poly = value.get("base_dim").is_some();
    let is_alg = value.get("algebra").is_some();
    match (is_alg, is_poly) {
        (true, false) => serde_json::from_value(value).map(InputJson::Algebra),
        (false, true) => serde_json::from_value(value).map(InputJson::Poly),
        _ => return Err(Error::Invalid("expected exactly one of \"algebra\" or \"base_dim\"".into())),
    }
    .map_err(|e| Error::Invalid(format!("schema: {e}")))
}

/// Basis-name lookup for one kind of element.
pub struct Names<'a> {
    names: &'a [String],
    suffix: Option<&'a str>,
}

impl<'a> Names<'a> {
    pub fn new(names: &'a [String], suffix: Option<&'a str>) -> Self {
        Names { names, suffix }
    }

    fn lookup(&self, path: &str, name: &str) -> Result<usize> {
        let base = match self.suffix {
            Some(sfx) => name.strip_suffix(sfx).unwrap_or(name),
            None => name,
        };
        self.names.iter().position(|n| n == base).ok_or_else(|| bad(path, format!("unknown basis name {name:?}")))
    }

    /// Sign and index set of a (possibly unsorted) list of basis names.
    fn index_set(&self, path: &str, names: &[String]) -> Result<(i32, IndexSet)> {
        let mut set = IndexSet::EMPTY;
        let mut sign = 1;
        for (i, name) in names.iter().enumerate() {
            let k = self.lookup(&format!("{path}.indices[{i}]"), name)?;
            // appending on the right: ε_I ∧ ε_k
            let (s, t) = set.wedge(IndexSet::singleton(k)).ok_or_else(|| bad(path, format!("repeated index {name:?}")))?;
            sign *= s;
            set = t;
        }
        Ok((sign, set))
    }
}

pub fn terms_from_json<K: Kind>(path: &str, names: &Names, terms: &[TermJson]) -> Result<Exterior<K, Q>> {
    let n = names.names.len();
    let mut out = Exterior::zero(n);
    for (i, t) in terms.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let (s, set) = names.index_set(&p, &t.indices)?;
        let c = parse_coeff(&format!("{p}.coeff"), &t.coeff)?;
        out.add_term(set, if s > 0 { c } else { -c });
    }
    Ok(out)
}

pub fn terms_to_json<K: Kind>(x: &Exterior<K, Q>, names: &[String]) -> Vec<TermJson> {
    x.terms()
        .map(|(s, c)| TermJson { indices: s.iter().map(|i| names[i].clone()).collect(), coeff: format_q(c) })
        .collect()
}

pub fn algebra_from_json(a: &LieAlgebraJson) -> Result<LieAlgebra> {
    let names = Names::new(&a.basis, None);
    let n = a.basis.len();
    crate::graded_ops::check_dim(n)?;
    for (i, x) in a.basis.iter().enumerate() {
        if a.basis[..i].contains(x) {
            return Err(bad(&format!("algebra.basis[{i}]"), format!("duplicate name {x:?}")));
        }
    }
    let mut brackets = Vec::new();
    for (i, b) in a.brackets.iter().enumerate() {
        let p = format!("algebra.brackets[{i}]");
        let x = names.lookup(&format!("{p}.x"), &b.x)?;
        let y = names.lookup(&format!("{p}.y"), &b.y)?;
        let mut v = Multivector::zero(n);
        for (name, c) in &b.value {
            let k = names.lookup(&format!("{p}.value"), name)?;
            v.add_term(IndexSet::singleton(k), parse_coeff(&format!("{p}.value.{name}"), c)?);
        }
        brackets.push((x, y, v));
    }
    let alg = LieAlgebra::new(a.basis.clone(), brackets)?;
    match &a.bilinear_form {
        None => Ok(alg),
        Some(rows) => {
            let g = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, s)| parse_coeff(&format!("algebra.bilinear_form[{i}][{j}]"), s))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            alg.with_bilinear_form(g)
        }
    }
}

pub fn algebra_to_json(alg: &LieAlgebra) -> LieAlgebraJson {
    let n = alg.dim();
    let names = alg.names();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = alg.table().basis_bracket(i, j);
            if v.is_zero() {
                continue;
            }
            let value = v.terms().map(|(s, c)| (names[s.indices()[0]].clone(), format_q(c))).collect();
            brackets.push(BracketJson { x: names[i].clone(), y: names[j].clone(), value });
        }
    }
    let bilinear_form = alg.bilinear_form().map(|g| g.iter().map(|r| r.iter().map(format_q).collect()).collect());
    LieAlgebraJson { basis: names.to_vec(), brackets, bilinear_form }
}

pub fn structure_from_json(s: &StructureJson) -> Result<TwistedStructure> {
    let alg = algebra_from_json(&s.algebra)?;
    let vnames = Names::new(&s.algebra.basis, None);
    let fnames = Names::new(&s.algebra.basis, Some("*"));
    let pi: Multivector = terms_from_json("pi", &vnames, &s.pi)?;
    let psi: Form = terms_from_json("psi", &fnames, &s.psi)?;
    match &s.lambda {
        None => TwistedStructure::with_standard_volume(alg, pi, psi),
        Some(l) => TwistedStructure::new(alg, pi, psi, terms_from_json("lambda", &fnames, l)?),
    }
}

pub fn structure_to_json(s: &TwistedStructure) -> StructureJson {
    let names = s.algebra().names();
    StructureJson {
        algebra: algebra_to_json(s.algebra()),
        pi: terms_to_json(s.pi(), names),
        psi: terms_to_json(s.psi(), names),
        lambda: Some(terms_to_json(s.lambda(), names)),
    }
}

pub fn frame_names(n: usize, forms: bool) -> Vec<String> {
    (1..=n).map(|i| if forms { format!("dx{i}") } else { format!("d{i}") }).collect()
}

pub fn poly_from_json(path: &str, n: usize, monos: &[MonomialJson]) -> Result<Poly> {
    let mut p = Poly::default();
    for (i, m) in monos.iter().enumerate() {
        let mp = format!("{path}[{i}]");
        if m.monomial.len() != n {
            return Err(bad(&mp, format!("monomial has {} exponents, base_dim is {n}", m.monomial.len())));
        }
        p.add_term(m.monomial.clone(), parse_coeff(&format!("{mp}.coeff"), &m.coeff)?);
    }
    Ok(p)
}

pub fn poly_to_json(p: &Poly, n: usize) -> Vec<MonomialJson> {
    p.terms()
        .map(|(e, c)| {
            let mut m = e.clone();
            m.resize(n, 0);
            MonomialJson { monomial: m, coeff: format_q(c) }
        })
        .collect()
}

pub fn poly_terms_from_json<K: Kind>(path: &str, n: usize, forms: bool, terms: &[PolyTermJson]) -> Result<Exterior<K, Poly>> {
    let names_vec = frame_names(n, forms);
    let names = Names::new(&names_vec, None);
    let mut out = Exterior::zero(n);
    for (i, t) in terms.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let (s, set) = names.index_set(&p, &t.indices)?;
        let c = poly_from_json(&format!("{p}.coeff"), n, &t.coeff)?;
        out.add_term(set, if s > 0 { c } else { -c });
    }
    Ok(out)
}

pub fn poly_terms_to_json<K: Kind>(x: &Exterior<K, Poly>, forms: bool) -> Vec<PolyTermJson> {
    let n = x.dim();
    let names = frame_names(n, forms);
    x.terms()
        .map(|(s, c)| PolyTermJson { indices: s.iter().map(|i| names[i].clone()).collect(), coeff: poly_to_json(c, n) })
        .collect()
}

/// Parsed polynomial structure file.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyStructure {
    pub pi: PolyMultivector,
    pub psi: PolyForm,
    pub lambda: PolyForm,
    pub b: Option<PolyForm>,
    pub vector: Option<PolyMultivector>,
    pub functions: Vec<Poly>,
}

impl PolyStructure {
    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    /// Largest total degree among all coefficients.
    pub fn max_degree(&self) -> u32 {
        let fields = std::iter::once(&self.pi).chain(self.vector.as_ref());
        let forms = [&self.psi, &self.lambda].into_iter().chain(self.b.as_ref());
        let a = fields.flat_map(|x| x.terms().filter_map(|(_, c)| c.degree())).max();
        let b = forms.flat_map(|x| x.terms().filter_map(|(_, c)| c.degree())).max();
        a.max(b).unwrap_or(0)
    }
}

pub fn poly_structure_from_json(s: &PolyStructureJson) -> Result<PolyStructure> {
    let n = s.base_dim;
    if n == 0 {
        return Err(bad("base_dim", "must be positive"));
    }
    crate::poly::check_base_dim(n)?;
    let pi = poly_terms_from_json("pi", n, false, &s.pi)?;
    let psi = poly_terms_from_json("psi", n, true, &s.psi)?;
    let lambda = match &s.lambda {
        Some(l) => poly_terms_from_json("lambda", n, true, l)?,
        None => crate::poly::instances::volume(n),
    };
    let b = s.b.as_ref().map(|b| poly_terms_from_json("B", n, true, b)).transpose()?;
    let vector = s.vector.as_ref().map(|v| poly_terms_from_json("vector", n, false, v)).transpose()?;
    let functions = s
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| poly_from_json(&format!("functions[{i}]"), n, f))
        .collect::<Result<_>>()?;
    let degree_checks: [(&str, bool); 3] = [
        ("pi", pi.expect_degree(2).is_ok() || pi.is_zero()),
        ("psi", psi.expect_degree(3).is_ok() || psi.is_zero()),
        ("lambda", lambda.expect_degree(n).is_ok()),
    ];
    for (name, ok) in degree_checks {
        if !ok {
            return Err(bad(name, "wrong degree"));
        }
    }
    Ok(PolyStructure { pi, psi, lambda, b, vector, functions })
}

pub fn poly_structure_to_json(s: &PolyStructure) -> PolyStructureJson {
    let n = s.dim();
    PolyStructureJson {
        base_dim: n,
        pi: poly_terms_to_json(&s.pi, false),
        psi: poly_terms_to_json(&s.psi, true),
        lambda: Some(poly_terms_to_json(&s.lambda, true)),
        b: s.b.as_ref().map(|b| poly_terms_to_json(b, true)),
        vector: s.vector.as_ref().map(|v| poly_terms_to_json(v, false)),
        functions: s.functions.iter().map(|f| poly_to_json(f, n)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::instances;
    use crate::scalar::q;
    use crate::twisted::examples;

    #[test]
    fn structure_round_trip() {
        for s in [examples::sl2_triangular(), examples::affine_twisted(), examples::aff1_triangular()] {
            let j = structure_to_json(&s);
            let text = serde_json::to_string(&j).unwrap();
            let back = match parse_input(&text).unwrap() {
                InputJson::Algebra(a) => structure_from_json(&a).unwrap(),
                InputJson::Poly(_) => panic!("wrong kind"),
            };
            assert_eq!(back.pi(), s.pi());
            assert_eq!(back.psi(), s.psi());
            assert_eq!(back.lambda(), s.lambda());
            assert_eq!(back.algebra().table(), s.algebra().table());
        }
    }

    #[test]
    fn unsorted_indices_pick_up_sign() {
        let text = r#"{"algebra":{"basis":["a","b"],"brackets":[{"x":"a","y":"b","value":{"a":"1"}}]},
                       "pi":[{"indices":["b","a"],"coeff":"3/2"}]}"#;
        let s = match parse_input(text).unwrap() {
            InputJson::Algebra(a) => structure_from_json(&a).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(s.pi().coeff(IndexSet::full(2)), -crate::scalar::qf(3, 2));
    }

    #[test]
    fn errors_are_positioned() {
        let text = r#"{"algebra":{"basis":["a","b"]},"pi":[{"indices":["a","c"],"coeff":"1"}]}"#;
        let err = match parse_input(text).unwrap() {
            InputJson::Algebra(a) => structure_from_json(&a).unwrap_err(),
            _ => unreachable!(),
        };
        assert_eq!(err.to_string(), Error::Invalid("pi[0].indices[1]: unknown basis name \"c\"".into()).to_string());
        let e = parse_input("{\"algebra\": [1,\n}").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let text = r#"{"base_dim":2,"pi":[{"indices":["d1","d2"],"coeff":[{"monomial":[1],"coeff":"1"}]}]}"#;
        let e = match parse_input(text).unwrap() {
            InputJson::Poly(p) => poly_structure_from_json(&p).unwrap_err().to_string(),
            _ => unreachable!(),
        };
        assert!(e.contains("pi[0].coeff[0]"), "{e}");
    }

    #[test]
    fn poly_round_trip() {
        let (pi, psi) = instances::twisted_r4();
        let s = PolyStructure {
            pi,
            psi,
            lambda: instances::volume(4),
            b: None,
            vector: None,
            functions: vec![Poly::var(0) * Poly::var(3) + Poly::constant(q(2))],
        };
        let text = serde_json::to_string(&poly_structure_to_json(&s)).unwrap();
        let back = match parse_input(&text).unwrap() {
            InputJson::Poly(p) => poly_structure_from_json(&p).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(back, s);
    }
}
