//! Procedurally drawn face images used as two-dimensional driver densities.
//!
//! Each face is a head outline, two eyes, optional brows and a mouth rendered as
//! soft strokes. Expressions differ in mouth and brow shape, which makes the six
//! densities distinct, non-Gaussian and dependent across their two coordinates.

use serde::{Deserialize, Serialize};

use super::density::{DensityGrid, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expression {
    Happy,
    Sad,
    Surprised,
    Angry,
    Disgusted,
    Afraid,
}

impl Expression {
    pub const ALL: [Expression; 6] = [
        Expression::Happy,
        Expression::Sad,
        Expression::Surprised,
        Expression::Angry,
        Expression::Disgusted,
        Expression::Afraid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Expression::Happy => "happy",
            Expression::Sad => "sad",
            Expression::Surprised => "surprised",
            Expression::Angry => "angry",
            Expression::Disgusted => "disgusted",
            Expression::Afraid => "afraid",
        }
    }
}

type Polyline = Vec<[f64; 2]>;

fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64, steps: usize) -> Polyline {
    (0..=steps)
        .map(|k| {
            let a = from + (to - from) * k as f64 / steps as f64;
            [cx + rx * a.cos(), cy + ry * a.sin()]
        })
        .collect()
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (qx * qx + qy * qy).sqrt()
}

fn polyline_distance(p: [f64; 2], line: &Polyline) -> f64 {
    line.windows(2)
        .map(|w| segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

fn strokes(expr: Expression) -> Vec<(Polyline, f64)> {
    use std::f64::consts::PI;
    let thick = 0.035;
    let mut s = vec![(arc(0.5, 0.5, 0.42, 0.45, 0.0, 2.0 * PI, 64), thick)];
    let eye_r = if matches!(expr, Expression::Surprised | Expression::Afraid) {
        0.06
    } else {
        0.035
    };
    for ex in [0.35, 0.65] {
        s.push((arc(ex, 0.62, eye_r, eye_r, 0.0, 2.0 * PI, 24), 0.03));
    }
    let mouth = match expr {
        Expression::Happy => arc(0.5, 0.42, 0.2, 0.14, PI * 1.1, PI * 1.9, 24),
        Expression::Sad => arc(0.5, 0.18, 0.18, 0.1, PI * 0.15, PI * 0.85, 24),
        Expression::Surprised => arc(0.5, 0.3, 0.08, 0.1, 0.0, 2.0 * PI, 32),
        Expression::Angry => vec![[0.35, 0.27], [0.65, 0.27]],
        Expression::Disgusted => vec![[0.33, 0.3], [0.42, 0.26], [0.5, 0.3], [0.58, 0.25], [0.67, 0.29]],
        Expression::Afraid => arc(0.5, 0.26, 0.16, 0.05, 0.0, 2.0 * PI, 32),
    };
    s.push((mouth, thick));
    match expr {
        Expression::Angry => {
            s.push((vec![[0.27, 0.78], [0.42, 0.71]], 0.025));
            s.push((vec![[0.58, 0.71], [0.73, 0.78]], 0.025));
        }
        Expression::Sad | Expression::Afraid => {
            s.push((vec![[0.27, 0.72], [0.42, 0.78]], 0.025));
            s.push((vec![[0.58, 0.78], [0.73, 0.72]], 0.025));
        }
        Expression::Disgusted => {
            s.push((vec![[0.27, 0.74], [0.42, 0.74]], 0.025));
            s.push((vec![[0.58, 0.78], [0.73, 0.72]], 0.025));
        }
        Expression::Happy | Expression::Surprised => {}
    }
    s
}

/// Renders a face as an 8-bit grayscale image of `size x size` pixels.
pub fn face_image(expr: Expression, size: usize) -> GrayImage {
    let lines = strokes(expr);
    let mut pixels = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            let p = [
                (col as f64 + 0.5) / size as f64,
                1.0 - (row as f64 + 0.5) / size as f64,
            ];
            let v = lines
                .iter()
                .map(|(line, w)| (1.0 - polyline_distance(p, line) / w).max(0.0))
                .fold(0.0, f64::max);
            pixels.push((255.0 * v).round() as u16);
        }
    }
    GrayImage {
        width: size,
        height: size,
        max_value: 255,
        pixels,
    }
}

/// Density of a rendered face.
pub fn face_density(expr: Expression, size: usize) -> DensityGrid {
    DensityGrid::from_image(&face_image(expr, size)).expect("rendered faces have positive mass")
}
