//! Plain-text model descriptors.
//!
//! ```text
//! caldef-model 1
//! kind g2
//! params -
//! dim 7
//! orientation +
//! component 1 degree 3 real terms 7
//! 1,2,7 1 0
//! ...
//! ```
//!
//! Each coefficient line is `indices re im` with 1-based indices. Values use
//! the shortest decimal that round-trips, so model entries print as `1`,
//! `-1` or `0.5`. The Hodge star is `*e^I = s · sign(I, I^c) e^{I^c}` with `s`
//! the orientation sign.

use num_complex::Complex64;

use super::{CalibrationModel, ModelKind};
use crate::exterior::{Form, FormTuple, MultiIndex, Orientation};
use crate::{Error, Result};

pub fn to_descriptor(model: &CalibrationModel) -> String {
    let kind = model.kind();
    let mut s = String::new();
    s.push_str("caldef-model 1\n");
    s.push_str(&format!("kind {}\n", kind.name()));
    s.push_str(&format!("params {}\n", kind.params()));
    s.push_str(&format!("dim {}\n", model.dim()));
    let o = if model.orientation() == Orientation::Positive { "+" } else { "-" };
    s.push_str(&format!("orientation {o}\n"));
    for (i, (part, complex)) in model.phi0().parts().iter().zip(kind.complex_parts()).enumerate() {
        s.push_str(&format!(
            "component {} degree {} {} terms {}\n",
            i + 1,
            part.degree(),
            if complex { "complex" } else { "real" },
            part.terms()
        ));
        for (idx, c) in part.iter() {
            s.push_str(&format!("{idx} {} {}\n", c.re, c.im));
        }
    }
    s
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_descriptor(text: &str) -> Result<CalibrationModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    fn next_header<'a>(
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
        key: &str,
    ) -> Result<(usize, String)> {
        let (no, l) = lines.next().ok_or_else(|| perr(0, format!("missing `{key}`")))?;
        let rest = l
            .strip_prefix(key)
            .ok_or_else(|| perr(no, format!("expected `{key}`")))?;
        Ok((no, rest.trim().to_string()))
    }
    let mut header = |key: &str| next_header(&mut lines, key);
    let (no, version) = header("caldef-model")?;
    if version != "1" {
        return Err(perr(no, format!("unsupported version {version}")));
    }
    let (_, name) = header("kind")?;
    let (no, params) = header("params")?;
    let kind = ModelKind::parse(&name, &params).map_err(|e| perr(no, e.to_string()))?;
    let (no, dim) = header("dim")?;
    let dim: usize = dim.parse().map_err(|_| perr(no, "bad dimension"))?;
    if dim != kind.dim() {
        return Err(perr(no, format!("{kind} lives in dimension {}", kind.dim())));
    }
    let (no, o) = header("orientation")?;
    let orientation = match o.as_str() {
        "+" => Orientation::Positive,
        "-" => Orientation::Negative,
        _ => return Err(perr(no, "orientation must be + or -")),
    };
    let mut parts = Vec::new();
    for expected in 1..=kind.complex_parts().len() {
        let (no, l) = next_header(&mut lines, "component")?;
        let f: Vec<&str> = l.split_whitespace().collect();
        let parsed = match f.as_slice() {
            [i, "degree", p, _, "terms", t] => i
                .parse::<usize>()
                .ok()
                .zip(p.parse::<usize>().ok())
                .zip(t.parse::<usize>().ok()),
            _ => None,
        };
        let Some(((i, p), terms)) = parsed else {
            return Err(perr(no, "malformed component header"));
        };
        if i != expected {
            return Err(perr(no, format!("expected component {expected}")));
        }
        let mut form = Form::zero(dim, p);
        for _ in 0..terms {
            let (no, l) = lines.next().ok_or_else(|| perr(0, "truncated coefficient table"))?;
            let f: Vec<&str> = l.split_whitespace().collect();
            let [idx, re, im] = f.as_slice() else {
                return Err(perr(no, "expected `indices re im`"));
            };
            let idx: MultiIndex = idx.parse().map_err(|e: Error| perr(no, e.to_string()))?;
            let re: f64 = re.parse().map_err(|_| perr(no, "bad real part"))?;
            let im: f64 = im.parse().map_err(|_| perr(no, "bad imaginary part"))?;
            if idx.degree() != p || idx.span() > dim {
                return Err(perr(no, format!("index {idx} does not fit a {p}-form")));
            }
            form.add_term(idx, Complex64::new(re, im));
        }
        parts.push(form);
    }
    if let Some((no, _)) = lines.next() {
        return Err(perr(no, "trailing content"));
    }
    CalibrationModel::with_forms(kind, FormTuple::new(parts)?, orientation)
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, ModelKind};
    use super::*;

    #[test]
    fn round_trip_all_models() {
        for kind in [
            ModelKind::Symplectic { n: 2 },
            ModelKind::CalabiYau { n: 3 },
            ModelKind::HyperKahler { m: 1 },
            ModelKind::G2,
            ModelKind::Spin7,
        ] {
            let m = build_model(kind).unwrap();
            let text = to_descriptor(&m);
            let back = parse_descriptor(&text).unwrap();
            assert_eq!(back.kind(), kind);
            assert_eq!(back.phi0(), m.phi0());
            assert_eq!(back.orientation(), m.orientation());
            assert_eq!(to_descriptor(&back), text);
        }
    }

    #[test]
    fn g2_entries_are_exact() {
        let text = to_descriptor(&build_model(ModelKind::G2).unwrap());
        assert!(text.contains("component 2 degree 4 real terms 7"));
        for line in text.lines().filter(|l| l.contains(',')) {
            let re = line.split_whitespace().nth(1).unwrap();
            assert!(["1", "-1", "0.5", "-0.5"].contains(&re), "{line}");
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "caldef-model 1\nkind g2\nparams -\ndim 6\n";
        assert!(matches!(parse_descriptor(bad), Err(Error::Parse { line: 4, .. })));
    }
}
