//! ASCII and SVG Adams charts.
//!
//! A class sits at `(stem, s) = (t − c, f)`. A differential `d_r` moves one
//! stem to the left and `r + 1` rows up.
//!
//! SVG layout constants are part of the output contract so that golden files
//! stay meaningful: see [`CELL`], [`MARGIN`], [`DOT_RADIUS`], [`DOT_SPACING`]
//! and [`FONT_SIZE`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::ssq::{ChartClass, DifferentialRecord};

/// Width and height of one chart cell in SVG user units.
pub const CELL: i64 = 40;
/// Blank border around the grid, holding the axis labels.
pub const MARGIN: i64 = 40;
pub const DOT_RADIUS: i64 = 4;
/// Horizontal offset between classes sharing a cell.
pub const DOT_SPACING: i64 = 10;
pub const FONT_SIZE: i64 = 10;

/// Width of one stem column in the ASCII chart.
const ASCII_COLUMN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartDot {
    pub stem: i64,
    pub s: u32,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartArrow {
    pub r: u32,
    pub from: (i64, u32),
    pub to: (i64, u32),
}

/// What a chart shows: classes and differentials inside a stem window and
/// below a filtration bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartView {
    pub stem_min: i64,
    pub stem_max: i64,
    pub s_max: u32,
    pub dots: Vec<ChartDot>,
    pub arrows: Vec<ChartArrow>,
}

impl ChartView {
    pub fn new(
        stem_min: i64,
        stem_max: i64,
        s_max: u32,
        classes: &[ChartClass],
        differentials: &[DifferentialRecord],
    ) -> Self {
        let inside = |stem: i64, s: u32| (stem_min..=stem_max).contains(&stem) && s <= s_max;
        let dots = classes
            .iter()
            .filter(|k| inside(k.stem(), k.f))
            .map(|k| ChartDot {
                stem: k.stem(),
                s: k.f,
                name: k.name.clone(),
            })
            .collect();
        let arrows = differentials
            .iter()
            .filter(|d| inside(d.source.stem(), d.source.f) && inside(d.target.stem(), d.target.f))
            .map(|d| ChartArrow {
                r: d.r,
                from: (d.source.stem(), d.source.f),
                to: (d.target.stem(), d.target.f),
            })
            .collect();
        ChartView {
            stem_min,
            stem_max,
            s_max,
            dots,
            arrows,
        }
    }

    fn cells(&self) -> BTreeMap<(i64, u32), Vec<&ChartDot>> {
        let mut cells: BTreeMap<(i64, u32), Vec<&ChartDot>> = BTreeMap::new();
        for d in &self.dots {
            cells.entry((d.stem, d.s)).or_default().push(d);
        }
        cells
    }

    /// Text chart: `*` per class (a digit when several share a cell) and
    /// `\` along each differential.
    pub fn to_ascii(&self) -> String {
        let stems = (self.stem_max - self.stem_min + 1).max(0) as usize;
        let width = stems * ASCII_COLUMN;
        let rows = self.s_max as usize + 1;
        let mut grid = vec![vec![b' '; width]; rows];
        let col = |stem: i64| (stem - self.stem_min) as usize * ASCII_COLUMN + ASCII_COLUMN / 2;
        for a in &self.arrows {
            let (x0, y0) = (col(a.from.0) as f64, a.from.1 as f64);
            let (x1, y1) = (col(a.to.0) as f64, a.to.1 as f64);
            for y in a.from.1 + 1..a.to.1 {
                let frac = (y as f64 - y0) / (y1 - y0);
                let x = (x0 + frac * (x1 - x0)).round() as usize;
                grid[y as usize][x] = b'\\';
            }
        }
        for ((stem, s), dots) in self.cells() {
            let glyph = if dots.len() == 1 {
                b'*'
            } else {
                b'0' + dots.len().min(9) as u8
            };
            grid[s as usize][col(stem)] = glyph;
        }
        let label_width = self.s_max.to_string().len();
        let mut out = String::new();
        for s in (0..rows).rev() {
            let line = String::from_utf8(grid[s].clone()).expect("ascii");
            writeln!(out, "{s:>label_width$} |{}", line.trim_end()).expect("write to string");
        }
        writeln!(out, "{} +{}", " ".repeat(label_width), "-".repeat(width)).expect("write");
        let mut axis = String::new();
        for stem in self.stem_min..=self.stem_max {
            write!(axis, "{:^ASCII_COLUMN$}", stem).expect("write");
        }
        writeln!(out, "{}  {}", " ".repeat(label_width), axis.trim_end()).expect("write");
        out
    }

    /// Deterministic SVG chart.
    pub fn to_svg(&self) -> String {
        let stems = (self.stem_max - self.stem_min + 1).max(0);
        let rows = i64::from(self.s_max) + 1;
        let width = 2 * MARGIN + CELL * stems;
        let height = 2 * MARGIN + CELL * rows;
        let cx = |stem: i64| MARGIN + CELL * (stem - self.stem_min) + CELL / 2;
        let cy = |s: u32| MARGIN + CELL * (rows - 1 - i64::from(s)) + CELL / 2;
        let mut out = String::new();
        let w = &mut out;
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="{FONT_SIZE}">"#
        )
        .expect("write");
        writeln!(w, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#).expect("write");
        writeln!(w, r##"<g stroke="#dddddd" stroke-width="1">"##).expect("write");
        for i in 0..=stems {
            let x = MARGIN + CELL * i;
            writeln!(w, r#"<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{}"/>"#, height - MARGIN).expect("write");
        }
        for j in 0..=rows {
            let y = MARGIN + CELL * j;
            writeln!(w, r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}"/>"#, width - MARGIN).expect("write");
        }
        writeln!(w, "</g>").expect("write");
        writeln!(w, r#"<g text-anchor="middle">"#).expect("write");
        for stem in self.stem_min..=self.stem_max {
            writeln!(
                w,
                r#"<text x="{}" y="{}">{stem}</text>"#,
                cx(stem),
                height - MARGIN + CELL / 2
            )
            .expect("write");
        }
        for s in 0..=self.s_max {
            writeln!(w, r#"<text x="{}" y="{}">{s}</text>"#, MARGIN / 2, cy(s) + FONT_SIZE / 2).expect("write");
        }
        writeln!(w, "</g>").expect("write");
        writeln!(w, r##"<g stroke="#1f4e9c" stroke-width="1.5">"##).expect("write");
        for a in &self.arrows {
            writeln!(
                w,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"><title>d_{}</title></line>"#,
                cx(a.from.0),
                cy(a.from.1),
                cx(a.to.0),
                cy(a.to.1),
                a.r
            )
            .expect("write");
        }
        writeln!(w, "</g>").expect("write");
        writeln!(w, r#"<g fill="black">"#).expect("write");
        for ((stem, s), dots) in self.cells() {
            let n = dots.len() as i64;
            for (i, d) in dots.iter().enumerate() {
                let x = cx(stem) + DOT_SPACING * (2 * i as i64 - (n - 1)) / 2;
                writeln!(
                    w,
                    r#"<circle cx="{x}" cy="{}" r="{DOT_RADIUS}"><title>{}</title></circle>"#,
                    cy(s),
                    d.name
                )
                .expect("write");
            }
        }
        writeln!(w, "</g>").expect("write");
        writeln!(w, "</svg>").expect("write");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view() -> ChartView {
        let classes = vec![
            ChartClass::new("1", 0, 0, false),
            ChartClass::new("v_1", 4, 0, false),
            ChartClass::new("v_1", 4, 1, true),
        ];
        let diffs = vec![DifferentialRecord {
            r: 1,
            source: classes[1].clone(),
            target: classes[2].clone(),
            coefficient: 1,
        }];
        ChartView::new(-1, 4, 2, &classes, &diffs)
    }

    #[test]
    fn ascii_has_glyphs_and_arrow() {
        let text = view().to_ascii();
        assert_eq!(text.matches('*').count(), 3);
        assert!(text.contains('\\'));
        assert!(text.lines().last().unwrap().contains("-1"));
    }

    #[test]
    fn svg_is_deterministic() {
        let a = view().to_svg();
        assert_eq!(a, view().to_svg());
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.contains("<title>d_1</title>"));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    }
}
