//! Deterministic SVG rendering for main-effects panels, structured plots and
//! the flattened design cube.
//!
//! Output is plain SVG 1.1 text. Coordinates are printed with two decimals and
//! nothing depends on time or randomness, so identical inputs give identical
//! bytes. Elements carry classes (`panel`, `point`, `mean-line`, `square`,
//! `run-label`) so the documents can be inspected by tests and stylesheets.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::design::{DesignMatrix, Level};
use crate::error::{DoeError, Result};
use crate::screening::{PanelData, PanelPoint, StructuredLayout};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum YRange {
    /// Data range padded by 5% on each side.
    AutoPadded,
    Explicit { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotConfig {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub point_radius: f64,
    pub font_size: f64,
    pub y_range: YRange,
}

impl Default for PlotConfig {
    fn default() -> Self {
        Self {
            width: 960.0,
            height: 360.0,
            margin: 48.0,
            point_radius: 4.0,
            font_size: 12.0,
            y_range: YRange::AutoPadded,
        }
    }
}

impl PlotConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [self.width, self.height, self.point_radius, self.font_size];
        if dims.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(DoeError::validation("plot dimensions must be positive"));
        }
        if 2.0 * self.margin >= self.width.min(self.height) {
            return Err(DoeError::validation("plot margins leave no drawing area"));
        }
        Ok(())
    }

    fn y_scale(&self, values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        match self.y_range {
            YRange::Explicit { min, max } => {
                if min.partial_cmp(&max) != Some(std::cmp::Ordering::Less) {
                    return Err(DoeError::validation("explicit y range must have min < max"));
                }
                if lo < min || hi > max {
                    return Err(DoeError::validation(format!(
                        "explicit y range [{min}, {max}] does not contain data range [{lo}, {hi}]"
                    )));
                }
                Ok((min, max))
            }
            YRange::AutoPadded => {
                if !lo.is_finite() {
                    return Ok((0.0, 1.0));
                }
                let pad = if hi > lo { 0.05 * (hi - lo) } else { (0.05 * hi.abs()).max(1.0) };
                Ok((lo - pad, hi + pad))
            }
        }
    }
}

fn n(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Svg {
    buf: String,
}

impl Svg {
    fn new(width: f64, height: f64, font_size: f64, title: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#,
            w = n(width),
            h = n(height),
            fs = n(font_size)
        );
        let _ = writeln!(buf, "<title>{}</title>", esc(title));
        let _ = writeln!(
            buf,
            r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
            n(width),
            n(height)
        );
        Self { buf }
    }

    fn line(&mut self, class: &str, x1: f64, y1: f64, x2: f64, y2: f64) {
        let _ = writeln!(
            self.buf,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            n(x1),
            n(y1),
            n(x2),
            n(y2)
        );
    }

    fn text(&mut self, class: &str, x: f64, y: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text class="{class}" x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            n(x),
            n(y),
            esc(content)
        );
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, run_id: u32, value: f64) {
        let _ = writeln!(
            self.buf,
            r##"<circle class="point" cx="{}" cy="{}" r="{}" data-run="{run_id}" data-value="{value}" fill="#1f4e79"/>"##,
            n(x),
            n(y),
            n(r)
        );
    }

    fn rect(&mut self, class: &str, x: f64, y: f64, w: f64, h: f64) {
        let _ = writeln!(
            self.buf,
            r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            n(x),
            n(y),
            n(w),
            n(h)
        );
    }

    fn open_group(&mut self, attrs: &str) {
        let _ = writeln!(self.buf, "<g {attrs}>");
    }

    fn close_group(&mut self) {
        self.buf.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Maps response values onto a vertical pixel band (larger value, smaller y).
#[derive(Clone, Copy)]
struct YAxis {
    lo: f64,
    hi: f64,
    top: f64,
    bottom: f64,
}

impl YAxis {
    fn px(&self, v: f64) -> f64 {
        self.bottom - (v - self.lo) / (self.hi - self.lo) * (self.bottom - self.top)
    }

    fn draw(&self, svg: &mut Svg, x: f64, label: &str) {
        svg.line("axis", x, self.top, x, self.bottom);
        for i in 0..=4 {
            let v = self.lo + (self.hi - self.lo) * f64::from(i) / 4.0;
            let y = self.px(v);
            svg.line("tick", x - 4.0, y, x, y);
            svg.text("tick-label", x - 6.0, y + 4.0, "end", &format!("{v:.1}"));
        }
        svg.text("axis-label", x - 6.0, self.top - 8.0, "end", label);
    }
}

/// Horizontal position of a coded level inside a panel spanning `[left, right]`.
fn level_px(level: Level, left: f64, right: f64) -> f64 {
    let mid = (left + right) / 2.0;
    mid + level.value() * (right - left) * 0.3
}

/// Offset for the k-th point sharing an exact (level, response) position:
/// 0, +d, −d, +2d, −2d, ...
fn jitter(points: &[PanelPoint], index: usize, radius: f64) -> f64 {
    let p = &points[index];
    let k = points[..index]
        .iter()
        .filter(|q| q.level == p.level && q.response == p.response)
        .count();
    if k == 0 {
        return 0.0;
    }
    let step = k.div_ceil(2) as f64 * radius * 1.2;
    if k % 2 == 1 {
        step
    } else {
        -step
    }
}

fn draw_points(svg: &mut Svg, points: &[PanelPoint], left: f64, right: f64, y: YAxis, r: f64) {
    for (i, p) in points.iter().enumerate() {
        let x = level_px(p.level, left, right) + jitter(points, i, r);
        svg.circle(x, y.px(p.response), r, p.run_id, p.response);
    }
}

fn draw_level_ticks(svg: &mut Svg, levels: &[Level], left: f64, right: f64, base: f64) {
    svg.line("axis", left, base, right, base);
    for &l in levels {
        svg.text("tick-label", level_px(l, left, right), base + 14.0, "middle", l.tag());
    }
}

/// One sub-panel per factor on a shared y-axis. When `benchmark` names a
/// factor, that panel is drawn rightmost; the others keep declaration order.
pub fn render_main_effects(panels: &PanelData, config: &PlotConfig, benchmark: Option<&str>) -> Result<String> {
    config.validate()?;
    if panels.panels.is_empty() {
        return Err(DoeError::validation("no panels to render"));
    }
    let mut order: Vec<usize> = (0..panels.panels.len()).collect();
    if let Some(name) = benchmark {
        let pos = panels
            .panels
            .iter()
            .position(|p| p.factor == name)
            .ok_or_else(|| DoeError::validation(format!("benchmark factor {name} has no panel")))?;
        order.retain(|&i| i != pos);
        order.push(pos);
    }
    let (lo, hi) = config.y_scale(panels.panels.iter().flat_map(|p| p.points.iter().map(|q| q.response)))?;
    let m = config.margin;
    let y = YAxis {
        lo,
        hi,
        top: m,
        bottom: config.height - m,
    };
    let panel_w = (config.width - 2.0 * m) / order.len() as f64;

    let mut svg = Svg::new(config.width, config.height, config.font_size, "Main effects");
    y.draw(&mut svg, m, &panels.response_name);
    for (slot, &i) in order.iter().enumerate() {
        let panel = &panels.panels[i];
        let left = m + slot as f64 * panel_w;
        let right = left + panel_w;
        svg.open_group(&format!(r#"class="panel" data-factor="{}""#, esc(&panel.factor)));
        svg.rect("frame", left, y.top, panel_w, y.bottom - y.top);
        svg.text("panel-title", (left + right) / 2.0, y.top - 8.0, "middle", &panel.factor);
        let levels: Vec<Level> = panel.level_means.iter().map(|l| l.level).collect();
        draw_level_ticks(&mut svg, &levels, left, right, y.bottom);
        draw_points(&mut svg, &panel.points, left, right, y, config.point_radius);
        let pts: Vec<String> = panel
            .level_means
            .iter()
            .map(|lm| format!("{},{}", n(level_px(lm.level, left, right)), n(y.px(lm.mean))))
            .collect();
        let _ = writeln!(
            svg.buf,
            r##"<polyline class="mean-line" points="{}" fill="none" stroke="#c00000" stroke-width="2"/>"##,
            pts.join(" ")
        );
        svg.close_group();
    }
    Ok(svg.finish())
}

/// Four panels left to right in layout order, each with a legend naming the
/// conditioner levels and a line joining the focal-level means in that cell.
pub fn render_structured(layout: &StructuredLayout, config: &PlotConfig) -> Result<String> {
    config.validate()?;
    if layout.cells.len() != 4 {
        return Err(DoeError::validation(format!(
            "structured layout needs 4 cells, got {}",
            layout.cells.len()
        )));
    }
    let (lo, hi) = config.y_scale(layout.cells.iter().flat_map(|c| c.points.iter().map(|p| p.response)))?;
    let m = config.margin;
    let legend = 2.2 * config.font_size;
    let y = YAxis {
        lo,
        hi,
        top: m + legend,
        bottom: config.height - m,
    };
    let panel_w = (config.width - 2.0 * m) / 4.0;
    let [first, second] = &layout.conditioners;

    let mut svg = Svg::new(
        config.width,
        config.height,
        config.font_size,
        &format!("{} vs {} by {} and {}", layout.response_name, layout.focal, first, second),
    );
    y.draw(&mut svg, m, &layout.response_name);
    for (slot, cell) in layout.cells.iter().enumerate() {
        let left = m + slot as f64 * panel_w;
        let right = left + panel_w;
        let [a, b] = cell.levels;
        svg.open_group(&format!(
            r#"class="panel" data-cell="{slot}" data-{}="{}" data-{}="{}""#,
            esc(&first.to_lowercase()),
            a.tag(),
            esc(&second.to_lowercase()),
            b.tag()
        ));
        svg.rect("frame", left, y.top, panel_w, y.bottom - y.top);
        svg.text("legend", (left + right) / 2.0, m, "middle", &format!("{first} = {}", a.tag()));
        svg.text(
            "legend",
            (left + right) / 2.0,
            m + 1.1 * config.font_size,
            "middle",
            &format!("{second} = {}", b.tag()),
        );
        draw_level_ticks(&mut svg, &[Level::LOW, Level::HIGH], left, right, y.bottom);
        svg.text("axis-label", (left + right) / 2.0, y.bottom + 28.0, "middle", &layout.focal);
        draw_points(&mut svg, &cell.points, left, right, y, config.point_radius);

        let means: Vec<(Level, f64)> = [Level::LOW, Level::HIGH]
            .iter()
            .filter_map(|&l| {
                let ys: Vec<f64> = cell.points.iter().filter(|p| p.level == l).map(|p| p.response).collect();
                (!ys.is_empty()).then(|| (l, ys.iter().sum::<f64>() / ys.len() as f64))
            })
            .collect();
        if means.len() == 2 {
            svg.line(
                "mean-line",
                level_px(means[0].0, left, right),
                y.px(means[0].1),
                level_px(means[1].0, left, right),
                y.px(means[1].1),
            );
        }
        svg.close_group();
    }
    Ok(svg.finish())
}

/// A run placed on one face of the flattened design cube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryPoint {
    pub run_id: u32,
    /// 0 for the low slice level (left square), 1 for high.
    pub square: usize,
    pub horizontal: Level,
    pub vertical: Level,
}

/// `axes` lists three factors; the two that are not `slice` give the
/// horizontal and vertical square coordinates, in that order.
pub fn geometry_points(design: &DesignMatrix, axes: [&str; 3], slice: &str) -> Result<Vec<GeometryPoint>> {
    let (h, v, s) = geometry_axes(design, axes, slice)?;
    Ok(design
        .runs()
        .iter()
        .map(|run| GeometryPoint {
            run_id: run.run_id,
            square: usize::from(run.settings[s] == Level::HIGH),
            horizontal: run.settings[h],
            vertical: run.settings[v],
        })
        .collect())
}

fn geometry_axes(design: &DesignMatrix, axes: [&str; 3], slice: &str) -> Result<(usize, usize, usize)> {
    if axes[0] == axes[1] || axes[0] == axes[2] || axes[1] == axes[2] {
        return Err(DoeError::validation("geometry axes must be distinct"));
    }
    let idx = axes.iter().map(|a| design.factor_index(a)).collect::<Result<Vec<_>>>()?;
    let s_pos = axes
        .iter()
        .position(|a| *a == slice)
        .ok_or_else(|| DoeError::validation(format!("slice factor {slice} is not one of the axes")))?;
    if !design.factors()[idx[s_pos]].is_two_level() {
        return Err(DoeError::validation(format!("slice factor {slice} must be two-level")));
    }
    let rest: Vec<usize> = (0..3).filter(|&i| i != s_pos).map(|i| idx[i]).collect();
    Ok((rest[0], rest[1], idx[s_pos]))
}

/// Two squares side by side, low slice level on the left, with each run drawn
/// at its coded position and labelled with its run ID.
pub fn render_design_geometry(
    design: &DesignMatrix,
    axes: [&str; 3],
    slice: &str,
    config: &PlotConfig,
) -> Result<String> {
    config.validate()?;
    let (h, v, s) = geometry_axes(design, axes, slice)?;
    let points = geometry_points(design, axes, slice)?;
    let factors = design.factors();
    let level_text = |j: usize, l: Level| match factors[j].label(l) {
        Some(label) => format!("{} = {label}", factors[j].name()),
        None => format!("{} = {l}", factors[j].name()),
    };

    let m = config.margin;
    let side = ((config.width - 3.0 * m) / 2.0).min(config.height - 2.0 * m - 2.0 * config.font_size);
    if side <= 0.0 {
        return Err(DoeError::validation("plot too small for design geometry"));
    }
    let top = m + 1.5 * config.font_size;
    let mut svg = Svg::new(
        config.width,
        config.height,
        config.font_size,
        &format!("Design geometry: {} vs {} by {}", factors[v].name(), factors[h].name(), factors[s].name()),
    );
    for (square, level) in [Level::LOW, Level::HIGH].into_iter().enumerate() {
        let left = m + square as f64 * (side + m);
        svg.open_group(&format!(r#"class="panel" data-square="{square}""#));
        svg.rect("square", left, top, side, side);
        svg.text("panel-title", left + side / 2.0, m, "middle", &level_text(s, level));
        svg.text("axis-label", left + side / 2.0, top + side + 1.5 * config.font_size, "middle", factors[h].name());
        svg.text("axis-label", left - 6.0, top + side / 2.0, "end", factors[v].name());
        let px = |l: Level| left + (l.value() + 1.0) / 2.0 * side;
        let py = |l: Level| top + side - (l.value() + 1.0) / 2.0 * side;
        for (i, p) in points.iter().enumerate().filter(|(_, p)| p.square == square) {
            let stacked = points[..i]
                .iter()
                .filter(|q| q.square == square && q.horizontal == p.horizontal && q.vertical == p.vertical)
                .count() as f64;
            let (x, y) = (px(p.horizontal), py(p.vertical));
            svg.circle(x, y, config.point_radius, p.run_id, f64::from(p.run_id));
            svg.text(
                "run-label",
                x + config.point_radius + 2.0,
                y - config.point_radius - 2.0 - stacked * config.font_size,
                "start",
                &p.run_id.to_string(),
            );
        }
        svg.close_group();
    }
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{full_factorial, FactorSpec};
    use crate::effects::ExperimentData;
    use crate::fixtures;
    use crate::screening::{main_effects_panels, structured_plot_layout};

    fn count(svg: &str, needle: &str) -> usize {
        svg.matches(needle).count()
    }

    #[test]
    fn table3_main_effects_elements() {
        let panels = main_effects_panels(&fixtures::table3());
        let svg = render_main_effects(&panels, &PlotConfig::default(), Some("X")).unwrap();
        assert_eq!(count(&svg, r#"class="panel""#), 6);
        assert_eq!(count(&svg, r#"class="point""#), 72);
        assert_eq!(count(&svg, r#"class="mean-line""#), 6);
        // benchmark drawn last
        let last = svg.rfind("data-factor=").unwrap();
        assert!(svg[last..].starts_with(r#"data-factor="X""#));
        assert_eq!(svg, render_main_effects(&panels, &PlotConfig::default(), Some("X")).unwrap());
    }

    #[test]
    fn constant_response_gives_flat_line() {
        let d = full_factorial(&[FactorSpec::two_level("a")]).unwrap();
        let data = ExperimentData::new(d, vec![3.0, 3.0], "y").unwrap();
        let svg = render_main_effects(&main_effects_panels(&data), &PlotConfig::default(), None).unwrap();
        let start = svg.find(r#"class="mean-line" points=""#).unwrap() + r#"class="mean-line" points=""#.len();
        let pts: Vec<&str> = svg[start..].split('"').next().unwrap().split(' ').collect();
        let ys: Vec<&str> = pts.iter().map(|p| p.split(',').nth(1).unwrap()).collect();
        assert_eq!(ys[0], ys[1]);
    }

    #[test]
    fn empty_panels_and_bad_config_rejected() {
        let empty = PanelData {
            response_name: "y".into(),
            panels: vec![],
        };
        assert!(render_main_effects(&empty, &PlotConfig::default(), None).is_err());
        let panels = main_effects_panels(&fixtures::table3());
        let tight = PlotConfig {
            y_range: YRange::Explicit { min: 90.0, max: 100.0 },
            ..PlotConfig::default()
        };
        assert!(render_main_effects(&panels, &tight, None).is_err());
        let zero = PlotConfig {
            width: 0.0,
            ..PlotConfig::default()
        };
        assert!(render_main_effects(&panels, &zero, None).is_err());
        assert!(render_main_effects(&panels, &PlotConfig::default(), Some("nope")).is_err());
    }

    #[test]
    fn structured_panels() {
        let layout = structured_plot_layout(&fixtures::table3(), "X", &["A", "B"]).unwrap();
        let svg = render_structured(&layout, &PlotConfig::default()).unwrap();
        assert_eq!(count(&svg, r#"class="panel""#), 4);
        assert_eq!(count(&svg, r#"class="point""#), 12);
        let third = svg.find(r#"data-cell="2""#).unwrap();
        let fourth = svg.find(r#"data-cell="3""#).unwrap();
        let chunk = &svg[third..fourth];
        for v in ["85.8", "91.7", "114.8"] {
            assert!(chunk.contains(&format!(r#"data-value="{v}""#)), "{v}");
        }
        assert!(chunk.contains(r#"data-a="L" data-b="H""#));
        assert_eq!(svg, render_structured(&layout, &PlotConfig::default()).unwrap());
    }

    #[test]
    fn vertical_order_follows_values() {
        let y = YAxis {
            lo: 80.0,
            hi: 120.0,
            top: 10.0,
            bottom: 300.0,
        };
        assert!(y.px(118.8) < y.px(85.8));
    }

    #[test]
    fn factorial_geometry_corners() {
        let d = fixtures::table2_design();
        let pts = geometry_points(&d, ["T", "Q", "M"], "M").unwrap();
        let lower_right: Vec<u32> = pts
            .iter()
            .filter(|p| p.horizontal == Level::HIGH && p.vertical == Level::LOW)
            .map(|p| p.run_id)
            .collect();
        assert_eq!(lower_right, [11, 15]);
        let svg = render_design_geometry(&d, ["T", "Q", "M"], "M", &PlotConfig::default()).unwrap();
        assert_eq!(count(&svg, r#"class="square""#), 2);
        assert_eq!(count(&svg, r#"class="point""#), 8);
        assert!(svg.contains(">11</text>") && svg.contains(">15</text>"));
    }

    #[test]
    fn ofat_geometry_pattern() {
        let d = fixtures::table1_design();
        let pts = geometry_points(&d, ["T", "Q", "M"], "M").unwrap();
        for square in 0..2 {
            let here: Vec<_> = pts.iter().filter(|p| p.square == square).collect();
            assert_eq!(here.len(), 4);
            assert!(here.iter().any(|p| p.horizontal == Level::CENTER && p.vertical == Level::LOW));
            assert!(here.iter().any(|p| p.horizontal == Level::CENTER && p.vertical == Level::HIGH));
            assert!(here.iter().any(|p| p.horizontal == Level::LOW && p.vertical == Level::LOW));
            assert!(here.iter().any(|p| p.horizontal == Level::HIGH && p.vertical == Level::LOW));
        }
        let lower_right: Vec<u32> = pts
            .iter()
            .filter(|p| p.horizontal == Level::HIGH && p.vertical == Level::LOW)
            .map(|p| p.run_id)
            .collect();
        assert_eq!(lower_right, [4, 8]);
    }

    #[test]
    fn geometry_rejects_bad_axes() {
        let d = fixtures::table1_design();
        let cfg = PlotConfig::default();
        assert!(render_design_geometry(&d, ["T", "Q", "Z"], "M", &cfg).is_err());
        assert!(render_design_geometry(&d, ["T", "Q", "M"], "Z", &cfg).is_err());
        assert!(render_design_geometry(&d, ["Q", "M", "T"], "T", &cfg).is_err());
        assert!(render_design_geometry(&d, ["T", "T", "M"], "M", &cfg).is_err());
    }
}
