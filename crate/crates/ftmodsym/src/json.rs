//! Canonical JSON encodings of every artifact.
//!
//! Rationals are always "num/den" strings with den >= 1 and the fraction
//! reduced, so output is byte-identical across runs. serde_json's default
//! map (sorted keys) keeps ordering deterministic. Basis-dependent payloads
//! carry a "conventions" object naming the point order, the path
//! orientation and the matrix action so the numbers are interpretable
//! without this source tree.

use crate::explicit_basis::ExplicitBasis;
use crate::hecke::{HeilbronnSet, OperatorMatrix};
use crate::poly::format_poly;
use crate::presentation::PresentationResult;
use crate::projective::LevelContext;
use crate::symbols::FormalSum;
use crate::winding::WindingElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

pub fn rational_str(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn vector_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(rational_str(x))).collect())
}

pub fn conventions() -> Value {
    json!({
        "point_order": "by (deg u, deg v), then coefficients from the highest power down",
        "path_orientation": "(u:v) = [g0, g-infinity] = [b/v, a/u]",
        "matrix_action": "columns are images of basis elements; vectors are columns",
        "rationals": "num/den, reduced, positive denominator",
    })
}

fn level_header(ctx: &LevelContext) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("q".into(), json!(ctx.fq.q));
    m.insert("level".into(), json!(format_poly(&ctx.modulus)));
    m.insert("level_degree".into(), json!(ctx.degree));
    m.insert("level_is_prime".into(), json!(ctx.prime));
    m
}

pub fn presentation_json(ctx: &LevelContext, pres: &PresentationResult) -> Value {
    let mut root = level_header(ctx);
    root.insert("rank".into(), json!(pres.rank));
    root.insert(
        "torsion".into(),
        Value::Array(
            pres.torsion
                .iter()
                .map(|t| match u64::try_from(t) {
                    Ok(n) => json!(n),
                    Err(_) => json!(t.to_string()),
                })
                .collect(),
        ),
    );
    root.insert(
        "basis".into(),
        Value::Array(
            pres.chosen_basis
                .iter()
                .map(|&i| Value::String(pres.generators[i].to_string()))
                .collect(),
        ),
    );
    let mut coords = Map::new();
    for (i, gen) in pres.generators.iter().enumerate() {
        coords.insert(gen.to_string(), vector_json(&pres.coords[i]));
    }
    root.insert("coords".into(), Value::Object(coords));
    root.insert("conventions".into(), conventions());
    Value::Object(root)
}

pub fn basis_json(ctx: &LevelContext, basis: &ExplicitBasis) -> Value {
    let mut root = level_header(ctx);
    root.insert(
        "elements".into(),
        Value::Array(
            basis
                .elements
                .iter()
                .map(|p| Value::String(p.to_string()))
                .collect(),
        ),
    );
    root.insert(
        "blocks".into(),
        Value::Array(
            basis
                .blocks
                .iter()
                .map(|&(k, s, e)| json!({"k": k, "start": s, "end": e}))
                .collect(),
        ),
    );
    root.insert("parabolic_start".into(), json!(1));
    root.insert("conventions".into(), conventions());
    Value::Object(root)
}

pub fn formal_sum_json(f: &FormalSum) -> Value {
    let mut m = Map::new();
    for (x, c) in &f.terms {
        m.insert(x.to_string(), Value::String(rational_str(c)));
    }
    Value::Object(m)
}

pub fn matrix_json(ctx: &LevelContext, op: &OperatorMatrix) -> Value {
    let mut root = level_header(ctx);
    root.insert("label".into(), json!(op.label));
    root.insert(
        "basis".into(),
        Value::Array(op.basis_labels.iter().map(|s| json!(s)).collect()),
    );
    let rows: Vec<Value> = (0..op.mat.rows)
        .map(|i| vector_json(op.mat.row(i)))
        .collect();
    root.insert("rows".into(), Value::Array(rows));
    root.insert(
        "charpoly".into(),
        Value::Array(
            op.charpoly()
                .iter()
                .map(|c| Value::String(rational_str(c)))
                .collect(),
        ),
    );
    root.insert(
        "charpoly_order".into(),
        json!("leading coefficient first (X^n down to the constant)"),
    );
    root.insert("conventions".into(), conventions());
    Value::Object(root)
}

pub fn matrix_csv(op: &OperatorMatrix) -> String {
    let mut out = String::new();
    for i in 0..op.mat.rows {
        let row: Vec<String> = op.mat.row(i).iter().map(rational_str).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn heilbronn_json(set: &HeilbronnSet) -> Value {
    json!({
        "m": format_poly(&set.modulus),
        "count": set.matrices.len(),
        "matrices": set
            .matrices
            .iter()
            .map(|m| {
                json!([
                    format_poly(&m.a),
                    format_poly(&m.b),
                    format_poly(&m.c),
                    format_poly(&m.d)
                ])
            })
            .collect::<Vec<Value>>(),
    })
}

pub fn heilbronn_csv(set: &HeilbronnSet) -> String {
    let mut out = String::new();
    for m in &set.matrices {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_poly(&m.a),
            format_poly(&m.b),
            format_poly(&m.c),
            format_poly(&m.d)
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn winding_json(
    ctx: &LevelContext,
    e: &WindingElement,
    basis_labels: &[String],
    denominator: &BigInt,
    ranks: &[(usize, usize)],
    ranks_mod_p: &[(usize, usize)],
    nonvanishing: usize,
    stable_at_cap: usize,
) -> Value {
    let mut root = level_header(ctx);
    root.insert("e".into(), vector_json(&e.vector));
    root.insert(
        "basis".into(),
        Value::Array(basis_labels.iter().map(|s| json!(s)).collect()),
    );
    root.insert(
        "denominator".into(),
        match u64::try_from(denominator) {
            Ok(n) => json!(n),
            Err(_) => json!(denominator.to_string()),
        },
    );
    root.insert("aux_m".into(), json!(format_poly(&e.aux_m)));
    let mut rank_map = Map::new();
    for &(r, rank) in ranks {
        rank_map.insert(r.to_string(), json!(rank));
    }
    root.insert("ranks".into(), Value::Object(rank_map));
    let mut rank_p_map = Map::new();
    for &(r, rank) in ranks_mod_p {
        rank_p_map.insert(r.to_string(), json!(rank));
    }
    root.insert("ranks_mod_p".into(), Value::Object(rank_p_map));
    root.insert("nonvanishing".into(), json!(nonvanishing));
    root.insert("stable_at_cap".into(), json!(stable_at_cap));
    root.insert("conventions".into(), conventions());
    Value::Object(root)
}

/// Pretty-printed with a trailing newline; the single sink for stdout/file
/// output so formatting is uniform.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_formatting_is_fixed() {
        assert_eq!(rational_str(&BigRational::one()), "1/1");
        let x = BigRational::new(BigInt::from(-6), BigInt::from(4));
        assert_eq!(rational_str(&x), "-3/2");
    }

    #[test]
    fn formal_sum_encodes_point_to_rational_pairs() {
        use crate::field::FqField;
        use crate::poly::{parse_poly, Poly};
        use crate::projective::{p1_normalize, LevelContext};
        use crate::symbols::FormalSum;
        let fq = FqField::new(2, 1).unwrap();
        let level = parse_poly("T^3+T+1", &fq).unwrap();
        let ctx = LevelContext::new(fq, level).unwrap();
        let mut f = FormalSum::generator(p1_normalize(&Poly::t(), &Poly::one(), &ctx).unwrap());
        f.add_term(
            p1_normalize(&Poly::one(), &Poly::zero(), &ctx).unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        );
        let v = formal_sum_json(&f);
        assert_eq!(v["(T:1)"], "1/1");
        assert_eq!(v["(1:0)"], "1/2");
    }

    #[test]
    fn render_is_deterministic() {
        let v = json!({"b": 1, "a": [2, 3]});
        assert_eq!(render(&v), render(&v));
        // serde_json sorts keys: "a" before "b"
        assert!(render(&v).find("\"a\"").unwrap() < render(&v).find("\"b\"").unwrap());
    }
}
