//! Static heatmaps of one landscape layer: SVG for viewing, plain PGM for
//! pixel-exact comparisons.

use std::fmt::Write;

use stland::landscape::MeanLandscape;

const CELL: usize = 18;
const LEFT: usize = 70;
const TOP: usize = 30;
const BOTTOM: usize = 50;
const LEGEND_GAP: usize = 30;
const LEGEND_W: usize = 16;
const LEGEND_TEXT: usize = 60;

const LOW: (u8, u8, u8) = (247, 251, 255);
const HIGH: (u8, u8, u8) = (8, 48, 107);

fn mix(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let ch = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    (ch(LOW.0, HIGH.0), ch(LOW.1, HIGH.1), ch(LOW.2, HIGH.2))
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" { "0".into() } else { s.into() }
}

fn layer_max(layer: &[Vec<f64>]) -> f64 {
    layer.iter().flatten().fold(0.0, |m, &v| f64::max(m, v))
}

/// Heatmap of layer `k` (1-based). Row 0 sits at the bottom; columns are
/// labelled with 1-based zigzag indices.
pub fn svg(l: &MeanLandscape, k: usize) -> String {
    let layer = &l.values[k - 1];
    let (cols, rows) = (l.cols, l.rows);
    let max = layer_max(layer);
    let plot_w = cols * CELL;
    let plot_h = rows * CELL;
    let width = LEFT + plot_w + LEGEND_GAP + LEGEND_W + LEGEND_TEXT;
    let height = TOP + plot_h + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">lambda_{k}, H{}</text>"#,
        LEFT + plot_w / 2,
        TOP - 12,
        l.hom_dim
    );
    let _ = writeln!(
        s,
        r#"<rect class="background" x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="{}"/>"#,
        hex(LOW)
    );
    for (r, row) in layer.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            let x = LEFT + c * CELL;
            let y = TOP + (rows - 1 - r) * CELL;
            let _ = writeln!(
                s,
                r#"<rect class="cell" data-col="{c}" data-row="{r}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>{}</title></rect>"#,
                hex(mix(v / max)),
                num(v)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for c in 0..cols {
        let x = LEFT + c * CELL + CELL / 2;
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, TOP + plot_h + 12, c + 1);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">zigzag index</text>"#,
        LEFT + plot_w / 2,
        TOP + plot_h + 30
    );
    for (r, eps) in l.epsilons.iter().enumerate() {
        let y = TOP + (rows - 1 - r) * CELL + CELL / 2 + 3;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, LEFT - 4, num(*eps));
    }
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">epsilon</text>"#,
        TOP + plot_h / 2,
        TOP + plot_h / 2
    );

    let lx = LEFT + plot_w + LEGEND_GAP;
    let _ = writeln!(s, r#"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0">"#);
    let _ = writeln!(s, r#"<stop offset="0" stop-color="{}"/>"#, hex(LOW));
    let _ = writeln!(s, r#"<stop offset="1" stop-color="{}"/>"#, hex(if max > 0.0 { HIGH } else { LOW }));
    let _ = writeln!(s, "</linearGradient></defs>");
    let _ = writeln!(
        s,
        r#"<rect class="legend" x="{lx}" y="{TOP}" width="{LEGEND_W}" height="{plot_h}" fill="url(#scale)" stroke="black"/>"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + LEGEND_W + 4, TOP + 8, num(max));
    let _ = writeln!(s, r#"<text x="{}" y="{}">0</text>"#, lx + LEGEND_W + 4, TOP + plot_h);
    s.push_str("</svg>\n");
    s
}

/// Plain-text greymap, one pixel per cell, row 0 at the bottom. Zero is black
/// and the layer maximum is 255.
pub fn pgm(l: &MeanLandscape, k: usize) -> String {
    let layer = &l.values[k - 1];
    let max = layer_max(layer);
    let mut s = format!("P2\n{} {}\n255\n", l.cols, l.rows);
    for row in layer.iter().rev() {
        let px: Vec<String> = row
            .iter()
            .map(|&v| if max > 0.0 { ((v / max) * 255.0).round() as u8 } else { 0 }.to_string())
            .collect();
        s.push_str(&px.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(cols_t: usize, rows: usize) -> MeanLandscape {
        let cols = 2 * cols_t - 1;
        MeanLandscape {
            t_windows: cols_t,
            cols,
            rows,
            k_max: 1,
            hom_dim: 1,
            epsilons: (0..rows).map(|r| r as f64 * 0.25).collect(),
            values: vec![vec![vec![0.0; cols]; rows]],
        }
    }

    #[test]
    fn zero_layer_has_no_cells() {
        let s = svg(&flat(3, 4), 1);
        assert_eq!(s.matches(r#"class="cell""#).count(), 0);
        assert_eq!(s.matches(r#"class="background""#).count(), 1);
    }

    #[test]
    fn single_cell_is_placed_from_bottom() {
        let mut l = flat(3, 4);
        l.values[0][0][2] = 2.0;
        let s = svg(&l, 1);
        assert_eq!(s.matches(r#"class="cell""#).count(), 1);
        let x = LEFT + 2 * CELL;
        let y = TOP + 3 * CELL;
        assert!(s.contains(&format!(r#"data-col="2" data-row="0" x="{x}" y="{y}""#)));
        assert!(s.contains(&hex(HIGH)));
    }

    #[test]
    fn pgm_rows_are_flipped() {
        let mut l = flat(2, 2);
        l.values[0][0][1] = 1.0;
        assert_eq!(pgm(&l, 1), "P2\n3 2\n255\n0 0 0\n0 255 0\n");
    }

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(0.0), "0");
    }
}
