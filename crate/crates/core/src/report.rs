//! JSON reports. Complex numbers are `[re, im]`, rationals `"num/den"`, and
//! branch indices, permutations and colors are 1-based. Objects are built as
//! `serde_json::Value`, whose maps keep keys sorted.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cactus::Node;
use crate::error::Result;
use crate::moments::MomentReport;
use crate::poly::ComplexPoly;
use crate::solver::{
    decompose_instance, double_decompositions, exists_nonzero_solution, reducible_generators, ProblemInstance,
    ReducibleSummand,
};

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn poly(p: &ComplexPoly) -> Value {
    serde_json::to_value(p).expect("polynomials serialize")
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn node(inst: &ProblemInstance, n: &Node) -> Value {
    match n {
        Node::Star(i) => json!({"kind": "star", "index": i + 1}),
        Node::Vertex(v) => json!({
            "kind": "vertex",
            "color": v.color + 1,
            "branches": one_based(&inst.cactus.cycles[v.color][v.cycle]),
        }),
    }
}

pub fn analyze(inst: &ProblemInstance) -> Result<Value> {
    let md = &inst.md;
    let nodes = inst.cactus.nodes();
    let s = decompose_instance(inst)?;
    let generators = reducible_generators(inst)?;
    let doubles = double_decompositions(inst)?;
    Ok(json!({
        "n": md.n,
        "base_point": complex(md.base_point),
        "critical_values": md.critical_values.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        "supplemented": md.supplemented,
        "generators": md.generators,
        "g_inf": md.g_inf,
        "tree": {
            "vertices": nodes.iter().map(|n| node(inst, n)).collect::<Vec<_>>(),
            "edges": inst.cactus.edges().iter().map(|(i, j)| json!([i + 1, j + 1])).collect::<Vec<_>>(),
        },
        "V_a": one_based(&inst.cactus.v_a),
        "V_b": one_based(&inst.cactus.v_b),
        "path": inst.path.iter().map(|n| node(inst, n)).collect::<Vec<_>>(),
        "f_vectors": inst.fv.vectors,
        "M": {"dim": inst.m.dim(), "basis": inst.m.basis()},
        "D": inst.lattice.divisors(),
        "S": s,
        "i_P": inst.lattice.len(),
        "existence": exists_nonzero_solution(inst),
        "reducible_generators": generators.iter().map(|g| json!({
            "d": g.d, "W": poly(&g.w), "A": poly(&g.a), "gap": g.gap,
        })).collect::<Vec<_>>(),
        "double_decompositions": doubles.iter().map(|((a, b), (c, d))| json!([
            {"A": poly(a), "B": poly(b)},
            {"A": poly(c), "B": poly(d)},
        ])).collect::<Vec<_>>(),
    }))
}

pub fn verify(report: &MomentReport) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

pub fn decompose(p: &ComplexPoly, parts: &[ReducibleSummand]) -> Value {
    Value::Array(
        parts
            .iter()
            .map(|s| {
                let (rp, rq) = s.residuals(p);
                json!({
                    "Q_j": poly(&s.q),
                    "W_j": poly(&s.w),
                    "A_tilde_j": poly(&s.a_tilde),
                    "Q_tilde_j": poly(&s.q_tilde),
                    "gap": s.gap,
                    "residuals": {"P": rp, "Q": rq},
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::VerifyOptions;
    use crate::poly::chebyshev;
    use crate::solver::build_instance;

    #[test]
    fn analyze_report_for_chebyshev() {
        let h = 3f64.sqrt() / 2.0;
        let inst = build_instance(
            &chebyshev(6),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
            &VerifyOptions::default(),
        )
        .unwrap();
        let v = analyze(&inst).unwrap();
        assert_eq!(v["D"], json!([1, 2, 3, 6]));
        assert_eq!(v["existence"], json!(true));
        assert_eq!(v["g_inf"], json!([2, 3, 4, 5, 6, 1]));
        assert_eq!(v["V_a"].as_array().unwrap().len(), 2);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.find("\"D\"").unwrap() < text.find("\"M\"").unwrap());
    }
}
