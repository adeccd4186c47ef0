use super::ast::{Literal, Predicate, Projection, SqlQuery};

/// Canonical spelling of a decimal numeral: no leading zeros, no trailing
/// fractional zeros, no bare decimal point and no negative zero.
pub fn canonical_number(n: &str) -> String {
    let (neg, body) = match n.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, n),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let int = int.trim_start_matches('0');
    let int = if int.is_empty() { "0" } else { int };
    let frac = frac.trim_end_matches('0');
    let mut out = String::new();
    if neg && !(int == "0" && frac.is_empty()) {
        out.push('-');
    }
    out.push_str(int);
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    out
}

fn literal(l: &Literal) -> Literal {
    match l {
        Literal::Number(n) => Literal::Number(canonical_number(n)),
        Literal::Text(t) => Literal::Text(t.clone()),
    }
}

/// Case-folds identifiers, canonicalizes numerals and sorts the conjunction.
pub fn normalize(q: &SqlQuery) -> SqlQuery {
    let mut conjuncts: Vec<Predicate> = q
        .conjuncts
        .iter()
        .map(|p| Predicate {
            column: p.column.to_lowercase(),
            op: p.op,
            value: literal(&p.value),
        })
        .collect();
    conjuncts.sort();
    SqlQuery {
        kind: q.kind,
        agg: q.agg,
        column: match &q.column {
            Projection::Star => Projection::Star,
            Projection::Column(c) => Projection::Column(c.to_lowercase()),
        },
        table: q.table.to_lowercase(),
        conjuncts,
        insert_values: q
            .insert_values
            .as_ref()
            .map(|vs| vs.iter().map(|(c, v)| (c.to_lowercase(), literal(v))).collect()),
        set_clause: q.set_clause.as_ref().map(|(c, v)| (c.to_lowercase(), literal(v))),
    }
}

pub fn logical_form_equal(a: &SqlQuery, b: &SqlQuery) -> bool {
    normalize(a) == normalize(b)
}
