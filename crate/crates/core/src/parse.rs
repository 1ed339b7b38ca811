//! Command-line mini-language for spaces, symbols, weights and points.
//!
//! Parameters follow the JSON field order, separated by a colon from the
//! family or kind name. Any argument starting with `{` or `[` is parsed as
//! JSON instead.
//!
//! ```text
//! space     hardy | bergman:ALPHA | weighted_hardy:B0,B1,.. | hardy_polydisc:N
//!           | bergman_polydisc:N,ALPHA | bergman_polydisc_star:N,ALPHA | hardy_ball:N
//! symbol    identity | affine:A,B | automorphism:P | rotation:T | constant:B
//!           | blaschke:A1,A2,.. | series:C0,C1,.. | z_times(SYMBOL)
//!           | composite(OUTER;INNER)
//! complex   0.5 | -0.2+0.3i | 0.7i | -i
//! ```

use num_complex::Complex64;

use crate::certify::{PointFunction, PointSet};
use crate::multivar::GridSpec;
use crate::series::PowerSeries;
use crate::spaces::{Point, SpaceDescriptor, WeightSequence};
use crate::symbols::{Component, MultiPoly, PolySymbol, SymbolMap, Weight};
use crate::{Error, Result};

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn is_json(s: &str) -> bool {
    s.starts_with('{') || s.starts_with('[')
}

pub fn real(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| err(format!("not a number: {s:?}")))
}

pub fn usize_arg(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| err(format!("not a nonnegative integer: {s:?}")))
}

/// A complex number written as `a`, `bi`, `a+bi` or `a-bi`.
pub fn complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("empty complex number"));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&t)?, 0.0));
    };
    // the last sign that is neither leading nor part of an exponent splits re from im
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |u: &str| -> Result<f64> {
        match u {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(u),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(complex).collect()
}

fn real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(real).collect()
}

/// Split at `sep` outside parentheses and brackets.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(format!("unbalanced parentheses in {s:?}")));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..k]);
                start = k + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err(format!("unbalanced parentheses in {s:?}")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn head_args(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (s.trim(), None),
    }
}

fn need<'a>(args: Option<&'a str>, what: &str) -> Result<&'a str> {
    args.filter(|a| !a.is_empty()).ok_or_else(|| err(format!("{what} needs parameters")))
}

pub fn space(s: &str) -> Result<SpaceDescriptor> {
    let s = s.trim();
    if is_json(s) {
        return SpaceDescriptor::from_json(s);
    }
    let (head, args) = head_args(s);
    let n_alpha = |args: Option<&str>| -> Result<(usize, f64)> {
        let v: Vec<&str> = need(args, head)?.split(',').collect();
        match v.as_slice() {
            [n] => Ok((usize_arg(n)?, 0.0)),
            [n, a] => Ok((usize_arg(n)?, real(a)?)),
            _ => Err(err(format!("{head} takes N[,ALPHA]"))),
        }
    };
    match head {
        "hardy" | "hardy_disk" => {
            if args.is_some() {
                return Err(err("hardy takes no parameters"));
            }
            Ok(SpaceDescriptor::HardyDisk)
        }
        "bergman" | "bergman_disk" => SpaceDescriptor::bergman_disk(args.map(real).transpose()?.unwrap_or(0.0)),
        "weighted_hardy" => Ok(SpaceDescriptor::weighted_hardy(WeightSequence::explicit(real_list(need(args, head)?)?)?)),
        "hardy_polydisc" => SpaceDescriptor::hardy_polydisc(usize_arg(need(args, head)?)?),
        "bergman_polydisc" => {
            let (n, a) = n_alpha(args)?;
            SpaceDescriptor::bergman_polydisc(n, a)
        }
        "bergman_polydisc_star" => {
            let (n, a) = n_alpha(args)?;
            SpaceDescriptor::bergman_polydisc_star(n, a)
        }
        "hardy_ball" => SpaceDescriptor::hardy_ball(usize_arg(need(args, head)?)?),
        _ => Err(err(format!("unknown space {head:?}"))),
    }
}

/// Parenthesized argument of `name(...)`, if `s` has that shape.
fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

pub fn symbol(s: &str) -> Result<SymbolMap> {
    let s = s.trim();
    if is_json(s) {
        return serde_json::from_str(s).map_err(|e| err(format!("symbol JSON: {e}")));
    }
    if let Some(inner) = call(s, "z_times") {
        return Ok(SymbolMap::z_times(symbol(inner)?));
    }
    if let Some(body) = call(s, "composite") {
        let parts = split_top(body, ';')?;
        let [outer, inner] = parts.as_slice() else {
            return Err(err("composite takes (OUTER;INNER)"));
        };
        return Ok(SymbolMap::composite(symbol(outer)?, symbol(inner)?));
    }
    let (head, args) = head_args(s);
    match head {
        "identity" | "z" => Ok(SymbolMap::identity()),
        "affine" => match complex_list(need(args, head)?)?.as_slice() {
            [a, b] => SymbolMap::affine(*a, *b),
            _ => Err(err("affine takes A,B")),
        },
        "automorphism" => SymbolMap::automorphism(complex(need(args, head)?)?),
        "rotation" => SymbolMap::rotation(real(need(args, head)?)?),
        "constant" => SymbolMap::constant(complex(need(args, head)?)?),
        "blaschke" => SymbolMap::blaschke(complex_list(need(args, head)?)?, Complex64::new(1.0, 0.0)),
        "series" => Ok(SymbolMap::series(PowerSeries::new(complex_list(need(args, head)?)?)?)),
        _ => Err(err(format!("unknown symbol {head:?}"))),
    }
}

/// A multiplier: a complex constant, `series:..`, or any symbol.
pub fn weight(s: &str) -> Result<Weight> {
    let s = s.trim();
    if is_json(s) {
        return serde_json::from_str(s).map_err(|e| err(format!("weight JSON: {e}")));
    }
    if let Ok(c) = complex(s) {
        return Ok(Weight::constant(c));
    }
    match symbol(s)? {
        SymbolMap::Series { coeffs } => Ok(Weight::Series(coeffs)),
        other => Ok(Weight::Symbol(other)),
    }
}

/// A polynomial in `z1..zn`: terms joined by `+`, each `[COEF*]z1^a*z2^b..`.
/// Complex coefficients go in parentheses, e.g. `(0.3+0.1i)*z1*z2`.
pub fn multipoly(s: &str, n: usize) -> Result<MultiPoly> {
    let mut terms = Vec::new();
    for term in split_top(s.trim(), '+')? {
        let term = term.trim();
        let (sign, term) = match term.strip_prefix('-') {
            Some(t) => (-1.0, t.trim()),
            None => (1.0, term),
        };
        let mut coef = Complex64::new(sign, 0.0);
        let mut exps = vec![0u32; n];
        for factor in split_top(term, '*')? {
            let f = factor.trim();
            if let Some(rest) = f.strip_prefix('z') {
                let (idx, e) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| err(format!("bad exponent in {f:?}")))?),
                    None => (rest, 1),
                };
                let k = if idx.is_empty() && n == 1 { 1 } else { usize_arg(idx)? };
                if k == 0 || k > n {
                    return Err(err(format!("variable {f:?} outside z1..z{n}")));
                }
                exps[k - 1] += e;
            } else {
                let f = f.strip_prefix('(').and_then(|g| g.strip_suffix(')')).unwrap_or(f);
                coef *= complex(f)?;
            }
        }
        terms.push((exps, coef));
    }
    Ok(MultiPoly::new(terms))
}

/// Several-variable symbol: `;`-separated components, each a polynomial in
/// `z1..zn` or a one-variable symbol acting on its own coordinate.
pub fn poly_symbol(s: &str) -> Result<PolySymbol> {
    let s = s.trim();
    if is_json(s) {
        return serde_json::from_str(s).map_err(|e| err(format!("several-variable symbol JSON: {e}")));
    }
    let parts = split_top(s, ';')?;
    let n = parts.len();
    let comps = parts
        .iter()
        .enumerate()
        .map(|(i, p)| match multipoly(p, n) {
            Ok(m) => Ok(Component::Poly(m)),
            Err(_) => Ok(Component::Axis { axis: i, map: symbol(p)? }),
        })
        .collect::<Result<Vec<_>>>()?;
    PolySymbol::new(comps)
}

/// Several-variable multiplier as a polynomial.
pub fn point_function(s: &str, n: usize) -> Result<PointFunction> {
    if n == 1 {
        return Ok(PointFunction::Disk(weight(s)?));
    }
    Ok(PointFunction::Poly(multipoly(s, n)?))
}

/// A point: comma-separated complex coordinates.
pub fn point(s: &str) -> Result<Point> {
    let s = s.trim();
    if is_json(s) {
        let coords: Vec<Complex64> = serde_json::from_str(s).map_err(|e| err(format!("point JSON: {e}")))?;
        return Ok(Point::new(coords));
    }
    Ok(Point::new(complex_list(s)?))
}

/// Point sets: JSON, `grid:R,A[,MIN,MAX]`, `random:COUNT,SEED[,DIM]`,
/// `default:P`, or explicit points separated by `;`.
pub fn point_set(s: &str) -> Result<PointSet> {
    let s = s.trim();
    if s.starts_with('{') {
        return PointSet::from_json(s);
    }
    let (head, args) = head_args(s);
    match head {
        "grid" => {
            let v: Vec<&str> = need(args, head)?.split(',').collect();
            match v.as_slice() {
                [r, a] => PointSet::radial_grid(usize_arg(r)?, usize_arg(a)?, 0.1, 0.95),
                [r, a, lo, hi] => PointSet::radial_grid(usize_arg(r)?, usize_arg(a)?, real(lo)?, real(hi)?),
                _ => Err(err("grid takes R,A[,MIN,MAX]")),
            }
        }
        "random" => {
            let v: Vec<&str> = need(args, head)?.split(',').collect();
            match v.as_slice() {
                [c, seed] => PointSet::random(usize_arg(c)?, seed_arg(seed)?, 1),
                [c, seed, d] => PointSet::random(usize_arg(c)?, seed_arg(seed)?, usize_arg(d)?),
                _ => Err(err("random takes COUNT,SEED[,DIM]")),
            }
        }
        "default" => PointSet::default_grid(complex(need(args, head)?)?),
        _ => PointSet::explicit(split_top(s, ';')?.into_iter().map(point).collect::<Result<_>>()?),
    }
}

fn seed_arg(s: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| err(format!("not a seed: {s:?}")))
}

/// `RADII,ANGLES[,MAX_RADIUS]` for several-variable grids.
pub fn grid_spec(s: &str) -> Result<GridSpec> {
    let v: Vec<&str> = s.split(',').collect();
    match v.as_slice() {
        [r, a] => GridSpec::square(usize_arg(r)?, usize_arg(a)?),
        [r, a, m] => GridSpec::new(usize_arg(r)?, usize_arg(a)?, real(m)?),
        _ => Err(err("grid takes RADII,ANGLES[,MAX_RADIUS]")),
    }
}
