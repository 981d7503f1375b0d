//! Canvases, plot specifications and a small SVG renderer.
//!
//! Style is fixed: 40px margins around each grid cell's plot area, 12px
//! sans-serif text, an 8-colour palette cycled per series, 6 ticks per
//! axis labelled to 4 significant digits, and axis ranges padded by 5% of
//! the data span. Bar plots always include 0 in the y range. Y tick
//! labels sit just inside the axis so that the margin never clips them.

use std::fmt::Write as _;

use thiserror::Error;

pub const MAX_CANVAS_PX: u32 = 10_000;
pub const MARGIN: f64 = 40.0;
pub const FONT_SIZE: u32 = 12;
pub const TICKS: usize = 6;
pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VisuError {
    #[error("canvas dimension {name} = {value} must be in 1..={max}")]
    InvalidDimension {
        name: &'static str,
        value: i64,
        max: i64,
    },
    #[error("slot {slot} is outside a grid of {slots} slots")]
    SlotOutOfRange { slot: i64, slots: usize },
    #[error("slot {0} already holds a plot")]
    SlotOccupied(usize),
    #[error("nothing to render: every slot is empty")]
    EmptyCanvas,
    #[error("a plot needs at least one series")]
    NoSeries,
    #[error("series `{0}` has no points")]
    EmptySeries(String),
    #[error("series `{label}` has {x} x-values but {y} y-values")]
    LengthMismatch { label: String, x: usize, y: usize },
    #[error("series `{0}` has categorical x-values; only bar plots accept them")]
    CategoricalX(String),
    #[error("series `{0}` contains a non-finite value")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Scatter,
    Bar,
}

#[derive(Debug, Clone, PartialEq)]
pub enum XValues {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl XValues {
    fn len(&self) -> usize {
        match self {
            XValues::Numeric(v) => v.len(),
            XValues::Categorical(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Option<XValues>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, y: Vec<f64>) -> Self {
        Series {
            label: label.into(),
            x: None,
            y,
        }
    }

    pub fn with_x(mut self, x: XValues) -> Self {
        self.x = Some(x);
        self
    }

    /// The x-values, defaulting to `0..n-1`.
    pub fn numeric_x(&self) -> Vec<f64> {
        match &self.x {
            Some(XValues::Numeric(v)) => v.clone(),
            _ => (0..self.y.len()).map(|i| i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: Option<String>,
    pub series: Vec<Series>,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, title: Option<String>, series: Vec<Series>) -> Result<Self, VisuError> {
        if series.is_empty() {
            return Err(VisuError::NoSeries);
        }
        for s in &series {
            if s.y.is_empty() {
                return Err(VisuError::EmptySeries(s.label.clone()));
            }
            if let Some(x) = &s.x {
                if x.len() != s.y.len() {
                    return Err(VisuError::LengthMismatch {
                        label: s.label.clone(),
                        x: x.len(),
                        y: s.y.len(),
                    });
                }
                if matches!(x, XValues::Categorical(_)) && kind != PlotKind::Bar {
                    return Err(VisuError::CategoricalX(s.label.clone()));
                }
                if let XValues::Numeric(v) = x {
                    if v.iter().any(|v| !v.is_finite()) {
                        return Err(VisuError::NonFinite(s.label.clone()));
                    }
                }
            }
            if s.y.iter().any(|v| !v.is_finite()) {
                return Err(VisuError::NonFinite(s.label.clone()));
            }
        }
        Ok(PlotSpec { kind, title, series })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    width: u32,
    height: u32,
    rows: u32,
    cols: u32,
    slots: Vec<Option<PlotSpec>>,
}

fn dimension(name: &'static str, value: i64, max: i64) -> Result<u32, VisuError> {
    if value < 1 || value > max {
        return Err(VisuError::InvalidDimension { name, value, max });
    }
    Ok(value as u32)
}

pub fn create_canvas(width: i64, height: i64, rows: i64, cols: i64) -> Result<Canvas, VisuError> {
    let max = MAX_CANVAS_PX as i64;
    let width = dimension("width", width, max)?;
    let height = dimension("height", height, max)?;
    // A cell must keep a positive plot area inside its margins.
    let rows = dimension("rows", rows, (height as i64 / (2 * MARGIN as i64 + 1)).max(1))?;
    let cols = dimension("cols", cols, (width as i64 / (2 * MARGIN as i64 + 1)).max(1))?;
    Ok(Canvas {
        width,
        height,
        rows,
        cols,
        slots: vec![None; (rows * cols) as usize],
    })
}

impl Canvas {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn grid(&self) -> (u32, u32) {
        (self.rows, self.cols)
    }

    pub fn slots(&self) -> &[Option<PlotSpec>] {
        &self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    /// Slots are numbered row-major.
    pub fn add_plot(mut self, slot: i64, plot: PlotSpec) -> Result<Canvas, VisuError> {
        let n = self.slots.len();
        if slot < 0 || slot as usize >= n {
            return Err(VisuError::SlotOutOfRange { slot, slots: n });
        }
        let cell = &mut self.slots[slot as usize];
        if cell.is_some() {
            return Err(VisuError::SlotOccupied(slot as usize));
        }
        *cell = Some(plot);
        Ok(self)
    }
}

/// Affine map from a data interval onto a pixel interval. The pixel
/// interval may be reversed (y grows downward in SVG).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
}

impl LinearScale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        debug_assert!(domain.1 > domain.0);
        LinearScale { domain, range }
    }

    /// `[min, max]` widened by 5% of the span on each side; a zero span
    /// becomes `[v - 0.5, v + 0.5]`.
    pub fn padded(values: impl IntoIterator<Item = f64>, range: (f64, f64)) -> Self {
        let (lo, hi) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        LinearScale::new(pad(lo, hi), range)
    }

    pub fn map(&self, v: f64) -> f64 {
        let (d0, d1) = self.domain;
        let (p0, p1) = self.range;
        p0 + (v - d0) * (p1 - p0) / (d1 - d0)
    }

    pub fn ticks(&self) -> Vec<f64> {
        let (d0, d1) = self.domain;
        (0..TICKS)
            .map(|i| d0 + (d1 - d0) * i as f64 / (TICKS - 1) as f64)
            .collect()
    }
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// `v` to 4 significant digits, trailing zeros removed; exponent form
/// outside `[1e-4, 1e6)`.
pub fn format_tick(v: f64) -> String {
    if v == 0.0 || v.abs() < 1e-12 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{v:.3e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (3 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Area {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

pub fn render_svg(canvas: &Canvas) -> Result<String, VisuError> {
    if canvas.is_empty() {
        return Err(VisuError::EmptyCanvas);
    }
    let (w, h) = (canvas.width, canvas.height);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{FONT_SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let cell_w = w as f64 / canvas.cols as f64;
    let cell_h = h as f64 / canvas.rows as f64;
    for (i, slot) in canvas.slots.iter().enumerate() {
        let Some(plot) = slot else { continue };
        let (r, c) = (i as u32 / canvas.cols, i as u32 % canvas.cols);
        let x0 = c as f64 * cell_w;
        let y0 = r as f64 * cell_h;
        let area = Area {
            left: x0 + MARGIN,
            right: x0 + cell_w - MARGIN,
            top: y0 + MARGIN,
            bottom: y0 + cell_h - MARGIN,
        };
        let _ = writeln!(out, r#"<g class="plot" id="slot-{i}">"#);
        if let Some(title) = &plot.title {
            let _ = writeln!(
                out,
                r#"<text class="title" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                (area.left + area.right) / 2.0,
                y0 + MARGIN / 2.0,
                escape(title)
            );
        }
        match plot.kind {
            PlotKind::Bar => render_bars(&mut out, plot, &area),
            PlotKind::Line | PlotKind::Scatter => render_xy(&mut out, plot, &area),
        }
        render_legend(&mut out, plot, &area);
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_axes(out: &mut String, area: &Area, x_ticks: &[(f64, String)], y: &LinearScale) {
    let _ = writeln!(out, r#"<g class="axes" stroke="black" fill="black">"#);
    let _ = writeln!(
        out,
        r#"<line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}"/>"#,
        l = area.left,
        r = area.right,
        b = area.bottom
    );
    let _ = writeln!(
        out,
        r#"<line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}"/>"#,
        l = area.left,
        t = area.top,
        b = area.bottom
    );
    for (px, label) in x_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{b4:.2}"/><text x="{px:.2}" y="{ty:.2}" stroke="none" text-anchor="middle">{label}</text>"#,
            b = area.bottom,
            b4 = area.bottom + 4.0,
            ty = area.bottom + 4.0 + FONT_SIZE as f64,
            label = escape(label)
        );
    }
    for v in y.ticks() {
        let py = y.map(v);
        let _ = writeln!(
            out,
            r#"<line x1="{l4:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}"/><text x="{tx:.2}" y="{ty:.2}" stroke="none" text-anchor="start">{label}</text>"#,
            l = area.left,
            l4 = area.left - 4.0,
            tx = area.left + 4.0,
            ty = py - 3.0,
            label = format_tick(v)
        );
    }
    let _ = writeln!(out, "</g>");
}

fn render_xy(out: &mut String, plot: &PlotSpec, area: &Area) {
    let xs: Vec<Vec<f64>> = plot.series.iter().map(Series::numeric_x).collect();
    let x = LinearScale::padded(xs.iter().flatten().copied(), (area.left, area.right));
    let y = LinearScale::padded(
        plot.series.iter().flat_map(|s| s.y.iter().copied()),
        (area.bottom, area.top),
    );
    let x_ticks: Vec<(f64, String)> = x.ticks().into_iter().map(|v| (x.map(v), format_tick(v))).collect();
    render_axes(out, area, &x_ticks, &y);
    let _ = writeln!(out, r#"<g class="data">"#);
    for (k, (s, sx)) in plot.series.iter().zip(&xs).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        match plot.kind {
            PlotKind::Scatter => {
                for (xv, yv) in sx.iter().zip(&s.y) {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                        x.map(*xv),
                        y.map(*yv)
                    );
                }
            }
            _ => {
                let points: Vec<String> = sx
                    .iter()
                    .zip(&s.y)
                    .map(|(xv, yv)| format!("{:.2},{:.2}", x.map(*xv), y.map(*yv)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    points.join(" ")
                );
            }
        }
    }
    let _ = writeln!(out, "</g>");
}

fn category_label(plot: &PlotSpec, i: usize) -> String {
    for s in &plot.series {
        match &s.x {
            Some(XValues::Categorical(v)) if i < v.len() => return v[i].clone(),
            Some(XValues::Numeric(v)) if i < v.len() => return format_tick(v[i]),
            _ => {}
        }
    }
    i.to_string()
}

/// Grouped bars: category `i` of every series shares one band.
fn render_bars(out: &mut String, plot: &PlotSpec, area: &Area) {
    let n = plot.series.iter().map(|s| s.y.len()).max().unwrap_or(1);
    let band = (area.right - area.left) / n as f64;
    let group = 0.8 * band;
    let bar_w = group / plot.series.len() as f64;
    let y = LinearScale::padded(
        plot.series
            .iter()
            .flat_map(|s| s.y.iter().copied())
            .chain(std::iter::once(0.0)),
        (area.bottom, area.top),
    );
    let step = if n <= 12 { 1 } else { n.div_ceil(TICKS) };
    let x_ticks: Vec<(f64, String)> = (0..n)
        .step_by(step)
        .map(|i| (area.left + (i as f64 + 0.5) * band, category_label(plot, i)))
        .collect();
    render_axes(out, area, &x_ticks, &y);
    let _ = writeln!(out, r#"<g class="data">"#);
    let zero = y.map(0.0);
    for (k, s) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for (i, v) in s.y.iter().enumerate() {
            let px = area.left + i as f64 * band + 0.1 * band + k as f64 * bar_w;
            let py = y.map(*v);
            let _ = writeln!(
                out,
                r#"<rect x="{px:.2}" y="{:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"/>"#,
                py.min(zero),
                (py - zero).abs()
            );
        }
    }
    let _ = writeln!(out, "</g>");
}

fn render_legend(out: &mut String, plot: &PlotSpec, area: &Area) {
    let _ = writeln!(out, r#"<g class="legend">"#);
    for (k, s) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ly = area.top + 4.0 + k as f64 * (FONT_SIZE as f64 + 4.0);
        let lx = area.right - 120.0_f64.min((area.right - area.left) / 2.0);
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{ly:.2}" width="10" height="10" fill="{color}"/><text x="{tx:.2}" y="{ty:.2}">{}</text>"#,
            escape(&s.label),
            tx = lx + 14.0,
            ty = ly + 10.0
        );
    }
    let _ = writeln!(out, "</g>");
}
