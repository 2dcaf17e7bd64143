//! Text snapshots of Fourier fields.
//!
//! ```text
//! caldef-field 1
//! dim 3
//! cap 64
//! layout forms 1,2
//! (1,0,0) 0 2 0.5 -0.25
//! ```
//!
//! Each record is `frequency component index re im`. For form layouts the
//! component is the block number and the index a 1-based multi-index (`-` for
//! the empty one); for `endo` and `vector` layouts the component is 0 and the
//! index the dense position. Floats use shortest round-trip formatting, so
//! writing and reading back is bit-exact. Records come in frequency order,
//! zero coefficients are omitted.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::field::{FourierField, Layout, TorusCtx};
use super::freq::Freq;
use crate::exterior::{FormBasis, MultiIndex, TupleLayout};
use crate::{Error, Result};

pub fn write_field(f: &FourierField) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "caldef-field 1\ndim {}\ncap {}", f.ctx.n, f.ctx.cap);
    let offsets = match &f.layout {
        Layout::Forms(t) => {
            let degs: Vec<String> = t.degrees.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "layout forms {}", degs.join(","));
            Some(t.offsets())
        }
        Layout::Endo(n) => {
            let _ = writeln!(s, "layout endo {n}");
            None
        }
        Layout::Vector(n) => {
            let _ = writeln!(s, "layout vector {n}");
            None
        }
    };
    for (k, c) in f.modes() {
        for (pos, z) in c.iter().enumerate() {
            if *z == Complex64::default() {
                continue;
            }
            let (comp, idx) = match (&f.layout, &offsets) {
                (Layout::Forms(t), Some(off)) => {
                    let b = off.partition_point(|&o| o <= pos) - 1;
                    let basis = FormBasis::get(t.dim, t.degrees[b]);
                    (b, basis.index(pos - off[b]).to_string())
                }
                _ => (0, pos.to_string()),
            };
            let _ = writeln!(s, "{k} {comp} {idx} {} {}", z.re, z.im);
        }
    }
    s
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, line) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .map(|rest| (no, rest.trim()))
        .ok_or_else(|| err(no, format!("expected `{key}`")))
}

pub fn read_field(text: &str) -> Result<FourierField> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (no, v) = header(&mut lines, "caldef-field")?;
    if v != "1" {
        return Err(err(no, format!("unsupported version {v}")));
    }
    let (no, v) = header(&mut lines, "dim")?;
    let n: usize = v.parse().map_err(|_| err(no, "bad dim"))?;
    let (no, v) = header(&mut lines, "cap")?;
    let cap: i32 = v.parse().map_err(|_| err(no, "bad cap"))?;
    let (no, v) = header(&mut lines, "layout")?;
    let mut it = v.split_whitespace();
    let layout = match (it.next(), it.next()) {
        (Some("forms"), Some(d)) => {
            let degrees = d
                .split(',')
                .map(|x| x.parse::<usize>().map_err(|_| err(no, "bad degree list")))
                .collect::<Result<Vec<_>>>()?;
            Layout::Forms(TupleLayout::new(n, degrees))
        }
        (Some("forms"), None) => Layout::Forms(TupleLayout::new(n, vec![])),
        (Some("endo"), Some(m)) if m.parse() == Ok(n) => Layout::Endo(n),
        (Some("vector"), Some(m)) if m.parse() == Ok(n) => Layout::Vector(n),
        _ => return Err(err(no, format!("bad layout `{v}`"))),
    };
    let mut f = FourierField::zero(TorusCtx::with_cap(n, cap), layout.clone());
    for (no, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 5 {
            return Err(err(no, "expected `k component index re im`"));
        }
        let k: Freq = t[0].parse().map_err(|e: Error| err(no, e.to_string()))?;
        if k.dim() != n {
            return Err(err(no, "frequency has wrong length"));
        }
        let comp: usize = t[1].parse().map_err(|_| err(no, "bad component"))?;
        let pos = match &layout {
            Layout::Forms(tl) => {
                if comp >= tl.degrees.len() {
                    return Err(err(no, "component out of range"));
                }
                let idx: MultiIndex = t[2].parse().map_err(|e: Error| err(no, e.to_string()))?;
                let basis = FormBasis::get(n, tl.degrees[comp]);
                let p = basis.position(idx).filter(|_| idx.degree() == tl.degrees[comp]);
                tl.offsets()[comp] + p.ok_or_else(|| err(no, "multi-index does not match degree"))?
            }
            _ => {
                let p: usize = t[2].parse().map_err(|_| err(no, "bad index"))?;
                if comp != 0 || p >= layout.len() {
                    return Err(err(no, "index out of range"));
                }
                p
            }
        };
        let re: f64 = t[3].parse().map_err(|_| err(no, "bad real part"))?;
        let im: f64 = t[4].parse().map_err(|_| err(no, "bad imaginary part"))?;
        let mut c = vec![Complex64::default(); layout.len()];
        c[pos] = Complex64::new(re, im);
        f.add_mode(&k, &c, "read").map_err(|e| err(no, e.to_string()))?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for layout in [Layout::forms(4, vec![0, 2, 3]), Layout::Endo(4), Layout::Vector(4)] {
            let ctx = TorusCtx::with_cap(4, 5);
            let mut f = FourierField::zero(ctx, layout.clone());
            for _ in 0..4 {
                let k = Freq((0..4).map(|_| rng.random_range(-5..=5)).collect());
                let c: Vec<Complex64> = (0..layout.len())
                    .map(|_| Complex64::new(rng.random::<f64>() * 1e-7, -rng.random::<f64>()))
                    .collect();
                f.add_mode(&k, &c, "t").unwrap();
            }
            let text = write_field(&f);
            let g = read_field(&text).unwrap();
            assert_eq!(f, g);
            assert_eq!(write_field(&g), text);
        }
    }

    #[test]
    fn bad_records_name_the_line() {
        let text = "caldef-field 1\ndim 2\ncap 4\nlayout forms 1\n(1,0) 0 1,2 1 0\n";
        match read_field(text) {
            Err(Error::Parse { line: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
