//! Deterministic image output: space-time diagrams as PPM or SVG, and SVG
//! bar charts of experiment histograms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentResult, Mode};
use crate::rule::Rule;
use crate::word::{State, Word};

const PALETTE: [[u8; 3]; 10] = [
    [255, 255, 255],
    [30, 30, 30],
    [214, 39, 40],
    [31, 119, 180],
    [44, 160, 44],
    [255, 127, 14],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [23, 190, 207],
];

/// Colour of a state. The first ten are fixed; later states get a
/// deterministic scrambled colour.
pub fn state_color(state: State) -> [u8; 3] {
    if let Some(c) = PALETTE.get(state as usize) {
        return *c;
    }
    let h = (state as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let b = h.to_be_bytes();
    [b[0] / 2 + 64, b[1] / 2 + 64, b[2] / 2 + 64]
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// A space-time diagram: row `t` is the configuration at time `t`, shown
/// `repeat` times side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTime {
    rows: Vec<Vec<State>>,
}

impl SpaceTime {
    pub fn new(rule: &Rule, init: &Word, steps: usize, repeat: usize) -> Result<Self> {
        if repeat == 0 {
            return Err(Error::InvalidArgument(
                "repeat width must be at least 1".into(),
            ));
        }
        let rows = rule
            .evolve(init, steps)?
            .iter()
            .map(|w| {
                w.states()
                    .iter()
                    .copied()
                    .cycle()
                    .take(w.len() * repeat)
                    .collect()
            })
            .collect();
        Ok(SpaceTime { rows })
    }

    pub fn rows(&self) -> &[Vec<State>] {
        &self.rows
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// Binary PPM (`P6`), each cell a `scale x scale` block.
    pub fn to_ppm(&self, scale: usize) -> Result<Vec<u8>> {
        let scale = check_scale(scale)?;
        let (w, h) = (self.width() * scale, self.height() * scale);
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        out.reserve(w * h * 3);
        for row in &self.rows {
            let line: Vec<u8> = row
                .iter()
                .flat_map(|&s| std::iter::repeat_n(state_color(s), scale))
                .flatten()
                .collect();
            for _ in 0..scale {
                out.extend_from_slice(&line);
            }
        }
        Ok(out)
    }

    pub fn to_svg(&self, scale: usize) -> Result<String> {
        let scale = check_scale(scale)?;
        let (w, h) = (self.width() * scale, self.height() * scale);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
        );
        for (t, row) in self.rows.iter().enumerate() {
            for (j, &state) in row.iter().enumerate() {
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{scale}" height="{scale}" fill="{}"/>"#,
                    j * scale,
                    t * scale,
                    hex(state_color(state))
                );
            }
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

fn check_scale(scale: usize) -> Result<usize> {
    if scale == 0 || scale > 1024 {
        return Err(Error::InvalidArgument("scale must be in 1..=1024".into()));
    }
    Ok(scale)
}

struct Bar {
    label: String,
    empirical: f64,
    reference: Option<f64>,
}

fn chart_bars(result: &ExperimentResult) -> Vec<Bar> {
    let m = result.config.samples as f64;
    let freq = |v: Option<u64>| result.count_of(v) as f64 / m;
    let reference = |x: u64| result.theory.pmf.iter().find(|p| p.x == x).map(|p| p.value);
    match result.config.mode {
        Mode::Existence { .. } => {
            let p = result.theory.limit_probability;
            vec![
                Bar {
                    label: "0".into(),
                    empirical: freq(Some(0)),
                    reference: p.map(|p| 1.0 - p),
                },
                Bar {
                    label: "1".into(),
                    empirical: freq(Some(1)),
                    reference: p,
                },
            ]
        }
        Mode::MinTemporal { .. } | Mode::MinSpatial { .. } => {
            let top = result.theory.pmf.last().map_or(0, |p| p.x);
            let mut bars: Vec<Bar> = (1..=top)
                .map(|y| Bar {
                    label: y.to_string(),
                    empirical: freq(Some(y)),
                    reference: reference(y),
                })
                .collect();
            let beyond = result
                .histogram
                .iter()
                .filter(|b| b.value.is_some_and(|v| v > top))
                .map(|b| b.count)
                .sum::<u64>() as f64
                / m;
            let covered: f64 = bars.iter().filter_map(|b| b.reference).sum();
            bars.push(Bar {
                label: format!(">{top}"),
                empirical: beyond,
                reference: Some((1.0 - covered).max(0.0)),
            });
            bars.push(Bar {
                label: "none".into(),
                empirical: freq(None),
                reference: Some(0.0),
            });
            bars
        }
        Mode::SimpleCount { .. } => result
            .theory
            .pmf
            .iter()
            .map(|p| Bar {
                label: p.x.to_string(),
                empirical: freq(Some(p.x)),
                reference: Some(p.value),
            })
            .collect(),
    }
}

/// Bar chart of the empirical distribution with the reference law drawn as
/// a step line over it.
pub fn histogram_svg(result: &ExperimentResult) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 50.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 40.0;
    let bars = chart_bars(result);
    let ymax = bars
        .iter()
        .flat_map(|b| [b.empirical, b.reference.unwrap_or(0.0)])
        .fold(0.0f64, f64::max)
        .max(1e-9)
        * 1.1;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let slot = plot_w / bars.len().max(1) as f64;
    let y_of = |v: f64| TOP + plot_h * (1.0 - v / ymax);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="18">{}</text>"#,
        chart_title(result)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h
    );
    for k in 0..=4 {
        let v = ymax * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 4.0,
            y_of(v) + 4.0
        );
    }
    for (i, b) in bars.iter().enumerate() {
        let x = LEFT + slot * i as f64;
        let top = y_of(b.empirical);
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
            x + slot * 0.1,
            slot * 0.8,
            TOP + plot_h - top
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x + slot / 2.0,
            TOP + plot_h + 15.0,
            b.label
        );
    }
    let mut path = String::new();
    for (i, b) in bars.iter().enumerate() {
        if let Some(r) = b.reference {
            let x = LEFT + slot * i as f64;
            let y = y_of(r);
            let cmd = if path.is_empty() { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{x:.2},{y:.2} L{:.2},{y:.2} ", x + slot);
        }
    }
    if !path.is_empty() {
        let _ = writeln!(
            s,
            r##"<path d="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
            path.trim_end()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn chart_title(result: &ExperimentResult) -> String {
    let c = &result.config;
    let what = match c.mode {
        Mode::Existence { tau, sigma } => format!("existence tau={tau} sigma={sigma}"),
        Mode::MinTemporal { sigma } => format!("least temporal period, sigma={sigma}"),
        Mode::MinSpatial { tau, sigma_max } => {
            format!("least spatial period, tau={tau}, up to {sigma_max}")
        }
        Mode::SimpleCount { tau, sigma } => format!("simple solutions tau={tau} sigma={sigma}"),
    };
    format!(
        "{what}, n={}, {} rules, seed {}",
        c.n, c.samples, c.master_seed
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run, ExperimentConfig};

    fn two_row() -> Rule {
        Rule::parse("021102022", 3).unwrap()
    }

    #[test]
    fn rows_alternate() {
        let st = SpaceTime::new(&two_row(), &Word::parse("120", 3).unwrap(), 8, 2).unwrap();
        assert_eq!(st.height(), 9);
        assert_eq!(st.width(), 6);
        for (t, row) in st.rows().iter().enumerate() {
            let expect = if t % 2 == 0 { [1, 2, 0] } else { [2, 1, 1] };
            assert_eq!(&row[..3], &expect);
            assert_eq!(&row[3..], &expect);
        }
    }

    #[test]
    fn ppm_layout() {
        let st = SpaceTime::new(&two_row(), &Word::parse("120", 3).unwrap(), 1, 1).unwrap();
        let ppm = st.to_ppm(2).unwrap();
        let header = b"P6\n6 4\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(ppm.len(), header.len() + 6 * 4 * 3);
        let px = &ppm[header.len()..header.len() + 3];
        assert_eq!(px, state_color(1));
        assert!(st.to_ppm(0).is_err());
    }

    #[test]
    fn svg_is_deterministic() {
        let st = SpaceTime::new(&two_row(), &Word::parse("122", 3).unwrap(), 4, 1).unwrap();
        let a = st.to_svg(5).unwrap();
        assert_eq!(a, st.to_svg(5).unwrap());
        assert_eq!(a.matches("<rect").count(), 15);
    }

    #[test]
    fn palette_is_distinct() {
        let colors: std::collections::BTreeSet<[u8; 3]> = (0..40).map(state_color).collect();
        assert_eq!(colors.len(), 40);
    }

    #[test]
    fn chart_has_one_bar_per_bucket() {
        let cfg = ExperimentConfig::new(5, Mode::MinTemporal { sigma: 2 })
            .samples(200)
            .seed(4)
            .cdf_max(6);
        let r = run(&cfg).unwrap();
        let svg = histogram_svg(&r);
        assert_eq!(svg.matches("fill=\"#9ecae1\"").count(), 8);
        assert_eq!(svg, histogram_svg(&r));
        assert!(svg.contains("<path"));
    }
}
