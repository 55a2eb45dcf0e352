//! JSON encoders for the `v1` result schema. Rationals are `"p/q"` strings.

use serde_json::{json, Value};

use crate::ifs::{LatticeClass, MemberCertificate, Word};
use crate::measurability::{Extrema, OscEvidence, OscStatus, PiecewisePower, Status, Verdict};
use crate::neighbor::{Classification, DbCardinality, NeighborGraph, VertexClass};
use crate::numerics::rational::format_rational;
use crate::numerics::{Enclosure, Interval, IntervalSet, Rational};
use crate::openset::{FeasibilityReport, GeneratorData, OpenSetKind, OpenSetRep, ULambdaCertificate};

pub const SCHEMA: &str = "v1";
const DECIMALS: usize = 20;

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn enclosure(e: &Enclosure) -> Value {
    let (lo_dec, hi_dec) = e.decimal_endpoints(DECIMALS);
    json!({ "lo": rational(e.lo()), "hi": rational(e.hi()), "lo_decimal": lo_dec, "hi_decimal": hi_dec })
}

pub fn interval(iv: &Interval) -> Value {
    json!({ "lo": rational(&iv.lo), "hi": rational(&iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed })
}

pub fn interval_set(s: &IntervalSet) -> Value {
    Value::Array(s.intervals().iter().map(interval).collect())
}

pub fn word(w: &Word) -> Value {
    json!(w.one_based())
}

pub fn certificate(c: &MemberCertificate) -> Value {
    json!({ "prefix": word(&c.prefix), "cycle": word(&c.cycle) })
}

pub fn lattice(l: &LatticeClass) -> Value {
    match l {
        LatticeClass::Lattice { base, exponents } => {
            json!({ "class": "lattice", "base": rational(base), "exponents": exponents })
        }
        LatticeClass::Nonlattice => json!({ "class": "nonlattice" }),
        LatticeClass::Unknown => json!({ "class": "unknown" }),
    }
}

pub fn feasibility(r: &FeasibilityReport) -> Value {
    let overlaps: Vec<Value> = r
        .overlaps
        .iter()
        .map(|o| json!({ "i": o.i + 1, "j": o.j + 1, "intersection": interval_set(&o.intersection) }))
        .collect();
    let failures: Vec<u32> = r.containment_failures.iter().map(|i| i + 1).collect();
    json!({ "feasible": r.feasible, "containment_failures": failures, "overlaps": overlaps })
}

pub fn u_lambda(c: &ULambdaCertificate) -> Value {
    json!({
        "m": c.m,
        "kappa": word(&c.kappa),
        "k": c.k,
        "lambda": c.lambda.iter().map(word).collect::<Vec<_>>(),
        "depth": c.depth,
    })
}

pub fn open_set(o: &OpenSetRep) -> Value {
    let mut v = match &o.kind {
        OpenSetKind::FiniteUnion(set) => json!({ "kind": "finite_union", "set": interval_set(set) }),
        OpenSetKind::ULambda { m, lambda, depth } => json!({
            "kind": "u_lambda",
            "m": m,
            "lambda": lambda.iter().map(word).collect::<Vec<_>>(),
            "depth": depth,
        }),
    };
    v["feasible"] = json!(o.feasible);
    v["strong"] = json!(o.strong);
    v["compatible"] = json!(o.compatible);
    v["projection_condition"] = json!(o.projection_condition());
    v["strong_witness"] = o.strong_witness.as_ref().map_or(Value::Null, certificate);
    v
}

pub fn generator(g: &GeneratorData) -> Value {
    json!({
        "components": g.components.iter().map(interval).collect::<Vec<_>>(),
        "lengths": g.lengths.iter().map(rational).collect::<Vec<_>>(),
        "g": rational(&g.g),
        "lambda_gamma": enclosure(&g.lambda_gamma),
        "complete": g.complete,
    })
}

pub fn pfunction(pp: &PiecewisePower) -> Value {
    let pieces: Vec<Value> = pp
        .pieces
        .iter()
        .map(|p| json!({ "lo": rational(&p.lo), "hi": rational(&p.hi), "a": enclosure(&p.a), "b": enclosure(&p.b) }))
        .collect();
    let breakpoints: Vec<Value> = pp
        .breakpoints
        .iter()
        .map(|b| json!({ "at": rational(&b.at), "gap": b.gap, "level": b.level }))
        .collect();
    json!({
        "domain": { "lo": rational(&pp.lo), "hi": rational(&pp.hi), "lo_closed": false, "hi_closed": true },
        "dimension": enclosure(&pp.dimension),
        "pieces": pieces,
        "breakpoints": breakpoints,
        "tail": rational(&pp.tail),
    })
}

pub fn extrema(e: &Extrema) -> Value {
    json!({ "min": enclosure(&e.min), "max": enclosure(&e.max), "argmin": enclosure(&e.argmin), "argmax": rational(&e.argmax) })
}

pub fn status(s: Status) -> &'static str {
    match s {
        Status::NotMeasurableLattice => "NotMeasurableLattice",
        Status::MeasurableNonlattice => "MeasurableNonlattice",
        Status::MeasurableTrivial => "MeasurableTrivial",
        Status::Inconclusive => "Inconclusive",
    }
}

fn osc(o: &OscStatus) -> Value {
    match o {
        OscStatus::Assumed => json!({ "status": "assumed" }),
        OscStatus::Certified(e) => {
            let evidence = match e {
                OscEvidence::ConvexIterate(m) => json!({ "kind": "convex_iterate", "m": m }),
                OscEvidence::ULambda(c) => json!({ "kind": "u_lambda", "certificate": u_lambda(c) }),
                OscEvidence::DigitResidues => json!({ "kind": "digit_residues" }),
            };
            json!({ "status": "certified", "evidence": evidence })
        }
    }
}

pub fn verdict(v: &Verdict) -> Value {
    json!({
        "status": status(v.status),
        "dimension": enclosure(&v.dimension.value),
        "lattice": lattice(&v.lattice),
        "osc": osc(&v.osc),
        "open_set": v.open_set.as_ref().map_or(Value::Null, open_set),
        "extrema": v.extrema.as_ref().map_or(Value::Null, extrema),
        "amplitude": v.amplitude.as_ref().map_or(Value::Null, enclosure),
        "amplitude_note": v.amplitude_note,
        "content": v.content.as_ref().map_or(Value::Null, |c| json!({
            "value": rational(&c.value),
            "iterations": c.iterations,
            "converged": c.converged,
        })),
        "empirical_content": v.empirical_content.as_ref().map_or(Value::Null, |e| json!({
            "certified": false,
            "mean": e.mean,
            "samples": e.samples.iter().map(|(eps, val)| json!({ "epsilon": rational(eps), "value": enclosure(val) })).collect::<Vec<_>>(),
        })),
        "reason": v.reason,
    })
}

fn vertex_class(c: VertexClass) -> &'static str {
    match c {
        VertexClass::Terminal => "terminal",
        VertexClass::Branching => "branching",
        VertexClass::Intermediate => "intermediate",
        VertexClass::Uncountable => "uncountable",
    }
}

pub fn db(d: DbCardinality) -> &'static str {
    match d {
        DbCardinality::Empty => "empty",
        DbCardinality::Finite => "finite",
        DbCardinality::CountablyInfinite => "countably_infinite",
        DbCardinality::Uncountable => "uncountable",
    }
}

pub fn neighbor_graph(g: &NeighborGraph, c: Option<&Classification>) -> Value {
    let vertices: Vec<Value> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(id, v)| {
            json!({
                "id": id,
                "scale": rational(&v.map.scale),
                "offset": rational(&v.map.offset),
                "u": word(&v.u),
                "omega": word(&v.omega),
                "class": c.map(|c| vertex_class(c.classes[id])),
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| json!({ "from": e.from, "to": e.to, "label": [e.label.0 + 1, e.label.1 + 1] }))
        .collect();
    json!({
        "complete": g.complete,
        "depth": g.depth,
        "vertices": vertices,
        "edges": edges,
        "db": c.map(|c| db(c.db)),
    })
}
