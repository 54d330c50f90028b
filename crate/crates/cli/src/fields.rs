use serde_json::{json, Value};
use twisted_poisson::exterior::{Exterior, Kind};
use twisted_poisson::json::{poly_terms_to_json, poly_to_json, PolyStructure};
use twisted_poisson::poly::*;
use twisted_poisson::scalar::{format_q, q};
use twisted_poisson::{Error, Result};

use crate::{unsupported, Command, Report, RunConfig};

fn vterms(x: &PolyMultivector) -> Value {
    json!(poly_terms_to_json(x, false))
}

fn fterms(x: &PolyForm) -> Value {
    json!(poly_terms_to_json(x, true))
}

fn poly(p: &Poly, n: usize) -> Value {
    json!(poly_to_json(p, n))
}

fn diff<K: Kind>(a: &Exterior<K, Poly>, b: &Exterior<K, Poly>, forms: bool) -> Value {
    json!({ "lhs": poly_terms_to_json(a, forms), "rhs": poly_terms_to_json(b, forms) })
}

/// Coordinates followed by the file's functions.
fn test_functions(s: &PolyStructure) -> Vec<Poly> {
    (0..s.dim()).map(Poly::var).chain(s.functions.iter().cloned()).collect()
}

fn degree_bound(cfg: &RunConfig, s: &PolyStructure) -> u32 {
    cfg.degree_bound.unwrap_or(2 * s.max_degree() + 4)
}

fn twist_section(s: &PolyStructure, r: &mut Report) -> Result<bool> {
    let t = verify_twisted_fields(&s.pi, &s.psi)?;
    r.section("twisted", json!({ "closed": t.closed, "condition": t.condition, "defect": vterms(&t.defect) }));
    r.check("psi_closed", t.closed, || json!({ "lhs": fterms(&de_rham(&s.psi)), "rhs": [] }));
    r.check("twisted_condition", t.condition, || {
        let half = schouten_fields(&s.pi, &s.pi).expect("same dim").scale_q(&twisted_poisson::scalar::qf(1, 2));
        let cube = twisted_poisson::exterior::wedge_sharp(&s.pi, &s.psi).expect("degrees");
        diff(&half, &cube, false)
    });
    Ok(t.is_twisted())
}

fn modular(s: &PolyStructure, r: &mut Report) -> Result<()> {
    if !twist_section(s, r)? {
        return Ok(());
    }
    let m = modular_vector_field(&s.pi, &s.psi, &s.lambda)?;
    r.section("X", vterms(&m.x));
    r.section("Y", vterms(&m.y));
    r.section("Z", vterms(&m.z));
    let dz = d_pi_psi_fields(&s.pi, &s.psi, &m.z)?;
    r.check("z_cocycle", dz.is_zero(), || json!({ "lhs": vterms(&dz), "rhs": [] }));
    if let Some((k, l)) = coboundary_defect_fields(&s.pi, &s.psi)? {
        let n = s.dim();
        let (lhs, rhs) = coboundary_sides_fields(&s.pi, &s.psi, &PolyForm::basis(n, k), &PolyForm::basis(n, l))?;
        r.check("coboundary", false, || json!({ "at": [k + 1, l + 1], "lhs": poly(&lhs, n), "rhs": poly(&rhs, n) }));
    } else {
        r.check("coboundary", true, || Value::Null);
    }
    for f in test_functions(s) {
        // ℒ_{H_f} λ = (X·f) λ
        let lhs = lie_derivative_fields(&hamiltonian(&s.pi, &f)?, &s.lambda)?;
        let xf = apply_vector(&m.x, &f)?;
        let rhs = s.lambda.map_coeffs(|c| c * &xf);
        r.check("divergence_of_hamiltonian", lhs == rhs, || {
            let mut v = diff(&lhs, &rhs, true);
            v["f"] = poly(&f, s.dim());
            v
        });
    }
    Ok(())
}

fn elw(s: &PolyStructure, r: &mut Report) -> Result<()> {
    if !twist_section(s, r)? {
        return Ok(());
    }
    let e = elw_factor_two(&s.pi, &s.psi, &s.lambda)?;
    r.section("U", vterms(&e.u));
    r.section("Z", vterms(&e.z));
    r.check("u_equals_twice_z", e.holds, || diff(&e.u, &e.z.scale_q(&q(2)), false));
    Ok(())
}

fn poly_suite(cfg: &RunConfig, s: &PolyStructure, r: &mut Report) -> Result<()> {
    let twisted = twist_section(s, r)?;
    let n = s.dim();
    let fs = test_functions(s);
    for f in &fs {
        let a = hamiltonian(&s.pi, f)?;
        let b = hamiltonian_via_bracket(&s.pi, f)?;
        r.check("hamiltonian_formulas", a == b, || {
            let mut v = diff(&a, &b, false);
            v["f"] = poly(f, n);
            v
        });
    }
    if twisted {
        for (i, f) in fs.iter().enumerate() {
            for (j, g) in fs.iter().enumerate().skip(i + 1) {
                let hf = hamiltonian(&s.pi, f)?;
                let hg = hamiltonian(&s.pi, g)?;
                let lhs = hamiltonian(&s.pi, &poisson_bracket(&s.pi, f, g)?)?;
                let rhs = schouten_fields(&hf, &hg)? + psi1_pair(&s.pi, &s.psi, &hf, &hg)?;
                r.check("hamiltonian_of_bracket", lhs == rhs, || {
                    let mut v = diff(&lhs, &rhs, false);
                    v["f"] = poly(f, n);
                    v["g"] = poly(g, n);
                    v
                });
                for h in fs.iter().skip(j + 1) {
                    let a = jacobi_anomaly(&s.pi, &s.psi, f, g, h)?;
                    r.check("jacobi_anomaly", a.lhs == a.rhs, || {
                        json!({ "f": poly(f, n), "g": poly(g, n), "h": poly(h, n), "lhs": poly(&a.lhs, n), "rhs": poly(&a.rhs, n) })
                    });
                }
            }
        }
    }
    if let Some(v) = &s.vector {
        let d = degree_bound(cfg, s);
        let pre = hamiltonian_preimage(&s.pi, v, d)?;
        r.section(
            "vector",
            json!({
                "field": vterms(v),
                "degree_bound": d,
                "not_globally_hamiltonian": pre.is_none(),
                "potential": pre.map(|u| poly(&u, n)),
            }),
        );
    }
    Ok(())
}

fn gauge(cfg: &RunConfig, s: &PolyStructure, r: &mut Report) -> Result<()> {
    let Some(b) = &s.b else {
        return Err(Error::Invalid("B: the gauge command needs a 2-form \"B\"".into()));
    };
    if !twist_section(s, r)? {
        return Ok(());
    }
    let d = degree_bound(cfg, s);
    let g = gauge_transform(&s.pi, &s.psi, b)?;
    let rep = gauge_modular_correspondence(&s.pi, &s.psi, b, &s.lambda, d)?;
    let n = s.dim();
    r.section(
        "gauge",
        json!({
            "pi_prime": vterms(&g.pi),
            "psi_prime": fterms(&g.psi),
            "det_sigma": format_q(&g.data.det),
            "degree_bound": d,
            "Z": vterms(&rep.z),
            "Z_prime": vterms(&rep.z_prime),
            "transported": vterms(&rep.transported),
            "transported_inverse": vterms(&rep.transported_inverse),
            "potential_transported": rep.forward.as_ref().map(|u| poly(u, n)),
            "potential_transported_inverse": rep.backward.as_ref().map(|u| poly(u, n)),
        }),
    );
    r.check("twisted_preserved", rep.twisted_preserved, || json!({ "pi_prime": vterms(&g.pi), "psi_prime": fterms(&g.psi) }));
    r.check("modular_class_transported_inverse", rep.backward.is_some(), || {
        diff(&rep.z_prime, &rep.transported_inverse, false)
    });
    r.note("modular_class_transported", rep.forward.is_some());
    Ok(())
}

pub(crate) fn run(cfg: &RunConfig, s: &PolyStructure, r: &mut Report) -> Result<()> {
    r.section("structure", json!({ "kind": "polynomial", "base_dim": s.dim() }));
    match cfg.command {
        Command::Verify => twist_section(s, r).map(|_| ()),
        Command::Modular => modular(s, r),
        Command::Elw => elw(s, r),
        Command::Poly => poly_suite(cfg, s, r),
        Command::Gauge => gauge(cfg, s, r),
        Command::Cohomology | Command::Identities => Err(unsupported(cfg.command, "polynomial")),
        Command::All => {
            modular(s, r)?;
            elw(s, r)?;
            poly_suite(cfg, s, r)?;
            if s.b.is_some() {
                gauge(cfg, s, r)?;
            }
            Ok(())
        }
    }
}
