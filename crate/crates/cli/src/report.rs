//! Report assembly and serialization.
//!
//! The JSON report uses fixed 15-significant-digit float formatting and
//! fully deterministic ordering, so identical runs produce identical bytes.

use gasym::asymptotes::{AsymptoteKind, GAsymptote, PoleFailure};
use gasym::branches::InfinityBranch;
use gasym::expr::{GaussianRational, Rat, C};
use gasym::poles::{PoleData, Window};
use serde_json::{json, Map, Value};
use std::io::Write;

/// One analyzed pole with everything the run produced for it.
pub struct PoleReport {
    pub pole: PoleData,
    pub branch: InfinityBranch,
    pub asymptote: GAsymptote,
    pub distances: Option<Vec<f64>>,
}

pub struct Report {
    pub curve: Vec<String>,
    pub window: Window,
    pub depth: Option<i64>,
    pub tail_terms: usize,
    pub tolerance: f64,
    pub radii: Vec<f64>,
    pub results: Vec<PoleReport>,
    pub failures: Vec<PoleFailure>,
}

fn fnum(v: f64) -> Value {
    // placeholder; the custom formatter rewrites every f64 on output
    json!(v)
}

fn complex_value(c: C, exact: Option<&GaussianRational>) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), fnum(c.re));
    m.insert("im".into(), fnum(c.im));
    if let Some(g) = exact {
        m.insert(
            "rational".into(),
            json!({"re": g.re.to_string(), "im": g.im.to_string()}),
        );
    }
    Value::Object(m)
}

fn rat_string(r: Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn pole_value(p: &PoleData) -> Value {
    json!({
        "location": complex_value(p.location, p.exact.as_ref()),
        "gamma": p.gamma,
        "orders": p.orders.iter().map(|o| json!({
            "numerator": rat_string(o.numerator),
            "denominator": rat_string(o.denominator),
        })).collect::<Vec<_>>(),
        "reduced_orders": p.reduced_orders,
        "leaf": p.leaf.describe().iter().map(|(base, w)| json!({
            "base": base, "winding": w,
        })).collect::<Vec<_>>(),
        "defining_factor": p.defining_factor,
    })
}

fn branch_value(b: &InfinityBranch) -> Value {
    json!({
        "pivot": b.pivot,
        "ramification_index": b.ramification_index,
        "degree": b.degree,
        "series": b.coords.iter().map(|coord| json!({
            "component": coord.component,
            "display": coord.series.to_string(),
            "terms": coord.series.terms().map(|(e, v)| json!({
                "z_exponent": rat_string(-e),
                "re": fnum(v.re),
                "im": fnum(v.im),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "infinity_point": b.infinity_point.iter()
            .map(|&v| complex_value(v, None)).collect::<Vec<_>>(),
    })
}

fn kind_name(kind: AsymptoteKind) -> &'static str {
    match kind {
        AsymptoteKind::Generic => "generic",
        AsymptoteKind::HorizontalLine => "horizontal_line",
        AsymptoteKind::VerticalLine => "vertical_line",
    }
}

fn asymptote_value(a: &GAsymptote) -> Value {
    json!({
        "kind": kind_name(a.kind),
        "pivot": a.pivot,
        "base_exponent": a.base_exponent,
        "reduction_factor": a.reduction_factor,
        "coordinates": a.coordinates.iter().map(|coord| json!({
            "component": coord.component,
            "coefficients": coord.coefficients.iter().zip(&coord.exact)
                .map(|(&v, exact)| complex_value(v, exact.as_ref()))
                .collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "infinity_point": a.infinity_point.iter()
            .map(|&v| complex_value(v, None)).collect::<Vec<_>>(),
        "beyond_hypotheses": a.beyond_hypotheses,
    })
}

impl Report {
    pub fn to_json_value(&self) -> Value {
        json!({
            "curve": self.curve,
            "window": {
                "re_min": fnum(self.window.re_min),
                "re_max": fnum(self.window.re_max),
                "im_min": fnum(self.window.im_min),
                "im_max": fnum(self.window.im_max),
            },
            "config": {
                "depth": self.depth,
                "tail_terms": self.tail_terms,
                "tolerance": fnum(self.tolerance),
                "radii": self.radii.iter().map(|&r| fnum(r)).collect::<Vec<_>>(),
            },
            "results": self.results.iter().map(|r| json!({
                "pole": pole_value(&r.pole),
                "branch": branch_value(&r.branch),
                "asymptote": asymptote_value(&r.asymptote),
                "approach_distances": r.distances.as_ref().map(|d| json!({
                    "radii": self.radii.iter().map(|&x| fnum(x)).collect::<Vec<_>>(),
                    "distances": d.iter().map(|&x| fnum(x)).collect::<Vec<_>>(),
                })),
            })).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|f| json!({
                "pole": pole_value(&f.pole),
                "error": f.error.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn write_json<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let value = self.to_json_value();
        let mut ser = serde_json::Serializer::with_formatter(&mut *out, SigFigFormatter);
        serde::Serialize::serialize(&value, &mut ser).map_err(std::io::Error::other)?;
        writeln!(out)
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "curve:")?;
        for (i, c) in self.curve.iter().enumerate() {
            writeln!(out, "  p{}(s) = {}", i + 1, c)?;
        }
        writeln!(
            out,
            "window: [{}, {}] x [{}, {}]i",
            fmt_f(self.window.re_min),
            fmt_f(self.window.re_max),
            fmt_f(self.window.im_min),
            fmt_f(self.window.im_max)
        )?;
        writeln!(out, "poles found: {}", self.results.len())?;
        for r in &self.results {
            writeln!(out)?;
            writeln!(out, "pole at {}", fmt_c(r.pole.location))?;
            if let Some(g) = &r.pole.exact {
                writeln!(out, "  exact: {} + ({})*I", g.re, g.im)?;
            }
            for (base, w) in r.pole.leaf.describe() {
                writeln!(out, "  leaf: {base} on winding {w}")?;
            }
            if let Some(f) = &r.pole.defining_factor {
                writeln!(out, "  vanishing factor: {f}")?;
            }
            writeln!(
                out,
                "  gamma = {}, reduced orders = {:?}",
                r.pole.gamma, r.pole.reduced_orders
            )?;
            for o in &r.pole.orders {
                writeln!(
                    out,
                    "    orders (numerator, denominator) = ({}, {})",
                    rat_string(o.numerator),
                    rat_string(o.denominator)
                )?;
            }
            writeln!(
                out,
                "  branch: pivot {}, ramification {}, degree {}",
                r.branch.pivot, r.branch.ramification_index, r.branch.degree
            )?;
            for coord in &r.branch.coords {
                writeln!(out, "    r_{}(z) = {}", coord.component + 1, coord.series)?;
            }
            let ip: Vec<String> = r.branch.infinity_point.iter().map(|&v| fmt_c(v)).collect();
            writeln!(out, "  infinity point: ({})", ip.join(" : "))?;
            let a = &r.asymptote;
            writeln!(
                out,
                "  asymptote [{}]: pivot {}, t^{}, reduction {}{}",
                kind_name(a.kind),
                a.pivot,
                a.base_exponent,
                a.reduction_factor,
                if a.beyond_hypotheses {
                    " (beyond order hypotheses)"
                } else {
                    ""
                }
            )?;
            for coord in &a.coordinates {
                let terms: Vec<String> = coord
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        if k == 0 {
                            fmt_c(v)
                        } else if k == 1 {
                            format!("{} t", fmt_c(v))
                        } else {
                            format!("{} t^{}", fmt_c(v), k)
                        }
                    })
                    .collect();
                writeln!(
                    out,
                    "    q_{}(t) = {}",
                    coord.component + 1,
                    terms.join(" + ")
                )?;
            }
            if let Some(d) = &r.distances {
                let pairs: Vec<String> = self
                    .radii
                    .iter()
                    .zip(d)
                    .map(|(r, d)| format!("{} -> {}", fmt_f(*r), fmt_f(*d)))
                    .collect();
                writeln!(out, "  approach distances: {}", pairs.join(", "))?;
            }
        }
        for f in &self.failures {
            writeln!(out)?;
            writeln!(
                out,
                "pole at {} failed: {}",
                fmt_c(f.pole.location),
                f.error
            )?;
        }
        Ok(())
    }
}

/// 15 significant digits, deterministic.
pub fn fmt_f(v: f64) -> String {
    format!("{:.14e}", v)
}

pub fn fmt_c(v: C) -> String {
    if v.im == 0.0 {
        fmt_f(v.re)
    } else if v.im.is_sign_negative() {
        format!("{} - {}i", fmt_f(v.re), fmt_f(-v.im))
    } else {
        format!("{} + {}i", fmt_f(v.re), fmt_f(v.im))
    }
}

/// Compact JSON with every float written as `d.dddddddddddddde[sign]d`.
pub struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{:.14e}", value)
    }
}
