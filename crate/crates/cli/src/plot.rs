//! Plot-sample export: CSV with the real trace of the curve near each real
//! pole and the real asymptotes over the configured x-range.

use gasym::expr::{evaluate, CurveParam, C};
use gasym::poles::PoleData;
use gasym::GAsymptote;
use std::io::Write;

const CURVE_SAMPLES: usize = 1200;
const ASYMPTOTE_SAMPLES: usize = 512;
const POLE_CLEARANCE: f64 = 1e-3;
const REAL_TOL: f64 = 1e-9;

fn real_or_none(v: C) -> Option<f64> {
    if v.im.abs() <= REAL_TOL * (1.0 + v.norm()) {
        Some(v.re)
    } else {
        None
    }
}

fn real_point(curve: &CurveParam, s: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(curve.dimension());
    for component in curve.components() {
        let v = evaluate(&component.expr, C::new(s, 0.0)).ok()?;
        out.push(real_or_none(v)?);
    }
    Some(out)
}

/// Writes `series_id,x,y[,z]` rows (UTF-8, LF endings, shortest round-trip
/// float formatting so endpoints parse back exactly).
pub fn emit_plot_samples<W: Write>(
    out: &mut W,
    curve: &CurveParam,
    poles: &[PoleData],
    asymptotes: &[GAsymptote],
    xrange: (f64, f64),
) -> std::io::Result<()> {
    let dim = curve.dimension();
    if dim == 2 {
        writeln!(out, "series_id,x,y")?;
    } else {
        writeln!(out, "series_id,x,y,z")?;
    }
    let write_row = |out: &mut W, id: &str, coords: &[f64]| -> std::io::Result<()> {
        let cols: Vec<String> = coords.iter().take(3).map(|v| format!("{v}")).collect();
        writeln!(out, "{id},{}", cols.join(","))
    };

    // curve trace near each real principal-leaf pole
    let mut curve_index = 0usize;
    for pole in poles {
        if pole.location.im.abs() > REAL_TOL || !pole.leaf.is_principal() {
            continue;
        }
        let tau = pole.location.re;
        let id = format!("curve_{curve_index}");
        curve_index += 1;
        let span = 2.0;
        for k in 0..=CURVE_SAMPLES {
            let s = tau - span + 2.0 * span * k as f64 / CURVE_SAMPLES as f64;
            if (s - tau).abs() < POLE_CLEARANCE {
                continue;
            }
            if let Some(p) = real_point(curve, s) {
                if p[0] >= xrange.0 && p[0] <= xrange.1 {
                    write_row(out, &id, &p)?;
                }
            }
        }
    }

    // real asymptotes over the x-range
    for (k, asymptote) in asymptotes.iter().enumerate() {
        if !asymptote.is_real() {
            continue;
        }
        let id = format!("asymptote_{k}");
        let n = asymptote.base_exponent;
        let (lo, hi) = xrange;
        let us: Vec<f64> = if n % 2 == 1 {
            // odd base: u = x^(1/n) exists for the whole range, endpoints exact
            (0..=ASYMPTOTE_SAMPLES)
                .map(|i| {
                    let x = if i == 0 {
                        lo
                    } else if i == ASYMPTOTE_SAMPLES {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / ASYMPTOTE_SAMPLES as f64
                    };
                    if n == 1 {
                        x
                    } else {
                        x.signum() * x.abs().powf(1.0 / n as f64)
                    }
                })
                .collect()
        } else {
            // even base: the pivot coordinate is nonnegative; sweep u symmetrically
            let top = lo.abs().max(hi.abs()).powf(1.0 / n as f64);
            (0..=ASYMPTOTE_SAMPLES)
                .map(|i| -top + 2.0 * top * i as f64 / ASYMPTOTE_SAMPLES as f64)
                .collect()
        };
        for u in us {
            let point = asymptote.point(C::new(u, 0.0));
            let mut coords = Vec::with_capacity(dim);
            let mut ok = true;
            for v in &point {
                match real_or_none(*v) {
                    Some(x) => coords.push(x),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // pivot coordinate stays within the plotted range
            let pivot_value = coords[asymptote.pivot];
            if pivot_value < lo - 1e-12 || pivot_value > hi + 1e-12 {
                continue;
            }
            write_row(out, &id, &coords)?;
        }
    }
    Ok(())
}
