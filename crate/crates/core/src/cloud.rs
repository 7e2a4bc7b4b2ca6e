//! Word-cloud layout and SVG rendering.
//!
//! Words are placed in weight order along an Archimedean spiral from the
//! canvas center; the first collision-free position wins. Font sizes are
//! interpolated between the configured bounds by dense weight rank, so
//! equal weights always get equal sizes. Everything is deterministic under
//! a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("canvas too small: no word fits")]
    CanvasTooSmall,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudConfig {
    pub width: u32,
    pub height: u32,
    pub font_min: f64,
    pub font_max: f64,
    pub seed: u64,
    pub max_words: usize,
}

impl Default for CloudConfig {
    fn default() -> Self {
        Self {
            width: 800,
            height: 600,
            font_min: 12.0,
            font_max: 96.0,
            seed: 42,
            max_words: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rotation {
    None,
    Quarter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Placement {
    pub gram: String,
    /// Bounding-box origin (top-left), in canvas pixels.
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub font_px: f64,
    pub rotation: Rotation,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordCloudLayout {
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub placements: Vec<Placement>,
    pub skipped: Vec<String>,
}

// monospace glyph aspect ratio used for box estimation
const GLYPH_WIDTH_RATIO: f64 = 0.6;
const SPIRAL_ANGLE_STEP: f64 = 0.3;
const SPIRAL_RADIUS_PER_RADIAN: f64 = 1.7;

fn boxes_overlap(a: &Placement, bx: f64, by: f64, bw: f64, bh: f64) -> bool {
    a.x < bx + bw && bx < a.x + a.width && a.y < by + bh && by < a.y + a.height
}

/// Dense rank over weights (descending); equal weights share a rank.
fn dense_ranks(weights: &[f64]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<f64> = weights.to_vec();
    distinct.sort_by(|a, b| b.partial_cmp(a).unwrap());
    distinct.dedup();
    let ranks = weights
        .iter()
        .map(|w| distinct.iter().position(|d| d == w).unwrap())
        .collect();
    (ranks, distinct.len())
}

/// Lays out ranked `(gram, weight)` pairs on the canvas.
///
/// Words that find no collision-free position inside the canvas are
/// reported in `skipped`. Fails only when not a single word fits.
pub fn layout_cloud(
    ranked: &[(String, f64)],
    config: &CloudConfig,
) -> Result<WordCloudLayout, CloudError> {
    let words = &ranked[..ranked.len().min(config.max_words)];
    let (ranks, rank_count) = dense_ranks(&words.iter().map(|(_, w)| *w).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (cw, ch) = (config.width as f64, config.height as f64);
    let (cx, cy) = (cw / 2.0, ch / 2.0);
    let max_radius = (cw * cw + ch * ch).sqrt() / 2.0;

    let mut placements: Vec<Placement> = Vec::new();
    let mut skipped = Vec::new();

    for ((gram, weight), rank) in words.iter().zip(ranks) {
        let font_px = if rank_count <= 1 {
            config.font_max
        } else {
            config.font_max
                - (config.font_max - config.font_min) * rank as f64 / (rank_count - 1) as f64
        };
        let rotation = if rng.gen_bool(0.25) { Rotation::Quarter } else { Rotation::None };
        let text_w = GLYPH_WIDTH_RATIO * font_px * gram.chars().count() as f64;
        let text_h = font_px;
        let (bw, bh) = match rotation {
            Rotation::None => (text_w, text_h),
            Rotation::Quarter => (text_h, text_w),
        };

        let mut placed = false;
        let mut theta = 0.0_f64;
        while SPIRAL_RADIUS_PER_RADIAN * theta <= max_radius {
            let r = SPIRAL_RADIUS_PER_RADIAN * theta;
            let bx = cx + r * theta.cos() - bw / 2.0;
            let by = cy + r * theta.sin() - bh / 2.0;
            theta += SPIRAL_ANGLE_STEP;
            if bx < 0.0 || by < 0.0 || bx + bw > cw || by + bh > ch {
                continue;
            }
            if placements.iter().any(|p| boxes_overlap(p, bx, by, bw, bh)) {
                continue;
            }
            placements.push(Placement {
                gram: gram.clone(),
                x: bx,
                y: by,
                width: bw,
                height: bh,
                font_px,
                rotation,
                weight: *weight,
            });
            placed = true;
            break;
        }
        if !placed {
            skipped.push(gram.clone());
        }
    }

    if placements.is_empty() && !words.is_empty() {
        return Err(CloudError::CanvasTooSmall);
    }

    Ok(WordCloudLayout {
        canvas_width: config.width,
        canvas_height: config.height,
        placements,
        skipped,
    })
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Renders the layout to an SVG document; elements appear in weight order,
/// so re-rendering the same layout is byte-identical.
pub fn render_svg(layout: &WordCloudLayout) -> String {
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = layout.canvas_width,
        h = layout.canvas_height,
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    for (i, p) in layout.placements.iter().enumerate() {
        let cx = p.x + p.width / 2.0;
        let cy = p.y + p.height / 2.0;
        let transform = match p.rotation {
            Rotation::None => String::new(),
            Rotation::Quarter => format!(" transform=\"rotate(90 {cx:.2} {cy:.2})\""),
        };
        svg.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"{:.2}\" font-family=\"monospace\" \
             fill=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\"{}>{}</text>\n",
            p.font_px,
            PALETTE[i % PALETTE.len()],
            transform,
            escape_xml(&p.gram),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
