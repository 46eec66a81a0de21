//! Plain-text and image artifacts for sweeps: CSV tables and an 8-bit PGM
//! heatmap. All floats go through [`fmt_g`] so identical inputs produce
//! byte-identical files.

use std::io::{self, Write};

use crate::topo::{ConcurrenceField, LatticeSite, Locus, Polyline, SiteKind};

/// Significant digits of every emitted float.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`: shortest of fixed or scientific notation at 12 significant
/// digits, trailing zeros removed.
pub fn fmt_g(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `eta,kappa,concurrence,vbar`, one row per node, η-major.
pub fn write_field_csv(field: &ConcurrenceField, w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "eta,kappa,concurrence,vbar")?;
    let g = &field.grid;
    for i in 0..g.n_eta {
        for j in 0..g.n_kappa {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_g(g.eta(i)),
                fmt_g(g.kappa(j)),
                fmt_g(field.value(i, j)),
                fmt_g(field.vbar_at(i, j))
            )?;
        }
    }
    Ok(())
}

/// Binary P5 grayscale, `round(255 C)`: black is separable, white maximally
/// entangled. Columns run along η, rows along κ with `κ_max` on top.
pub fn write_heatmap_pgm(field: &ConcurrenceField, w: &mut impl Write) -> io::Result<()> {
    let g = &field.grid;
    write!(w, "P5\n{} {}\n255\n", g.n_eta, g.n_kappa)?;
    let mut row = Vec::with_capacity(g.n_eta);
    for r in 0..g.n_kappa {
        let j = g.n_kappa - 1 - r;
        row.clear();
        row.extend((0..g.n_eta).map(|i| gray(field.value(i, j))));
        w.write_all(&row)?;
    }
    Ok(())
}

pub fn gray(concurrence: f64) -> u8 {
    (255.0 * concurrence).round().clamp(0.0, 255.0) as u8
}

/// Zero-expectation lines sampled at `samples` points each:
/// `locus,eta,kappa`.
pub fn write_loci_csv(loci: &[Locus], samples: usize, w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "locus,eta,kappa")?;
    let samples = samples.max(2);
    for locus in loci {
        for k in 0..samples {
            let s = if k + 1 == samples {
                locus.end
            } else {
                locus.start + locus.length() * k as f64 / (samples - 1) as f64
            };
            let (eta, kappa) = locus.point(s);
            writeln!(w, "{},{},{}", locus.label(), fmt_g(eta), fmt_g(kappa))?;
        }
    }
    Ok(())
}

pub fn kind_name(kind: SiteKind) -> &'static str {
    match kind {
        SiteKind::Separable => "Separable",
        SiteKind::MaxEntangled => "MaxEntangled",
    }
}

/// `locus,eta,kappa,kind,concurrence`.
pub fn write_sites_csv(
    per_locus: &[(Locus, Vec<LatticeSite>)],
    w: &mut impl Write,
) -> io::Result<()> {
    writeln!(w, "locus,eta,kappa,kind,concurrence")?;
    for (locus, sites) in per_locus {
        for site in sites {
            writeln!(
                w,
                "{},{},{},{},{}",
                locus.label(),
                fmt_g(site.eta),
                fmt_g(site.kappa),
                kind_name(site.kind),
                fmt_g(site.concurrence)
            )?;
        }
    }
    Ok(())
}

/// `level,polyline,eta,kappa`.
pub fn write_contours_csv(levels: &[(f64, Vec<Polyline>)], w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "level,polyline,eta,kappa")?;
    for (level, lines) in levels {
        for (k, line) in lines.iter().enumerate() {
            for &(eta, kappa) in line {
                writeln!(w, "{},{},{},{}", fmt_g(*level), k, fmt_g(eta), fmt_g(kappa))?;
            }
        }
    }
    Ok(())
}
