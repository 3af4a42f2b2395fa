//! Shared helpers and independent oracles for the acceptance suite.

use pmatch_core::{Homography, Point2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random identity perturbation: rotation ≤ ±30°, anisotropic scale in
/// [0.7, 1.4], perspective ≤ 1e-3, translation ≤ 20% of the frame, applied
/// about the frame center. Condition numbers stay far below 1e6.
pub fn random_perturbation(rng: &mut ChaCha8Rng, width: f64, height: f64) -> Homography {
    let max_angle = std::f64::consts::FRAC_PI_6;
    let angle: f64 = rng.random_range(-max_angle..max_angle);
    let sx: f64 = rng.random_range(0.7..1.4);
    let sy: f64 = rng.random_range(0.7..1.4);
    let g: f64 = rng.random_range(-1e-3..1e-3);
    let h: f64 = rng.random_range(-1e-3..1e-3);
    let tx: f64 = rng.random_range(-0.2..0.2) * width;
    let ty: f64 = rng.random_range(-0.2..0.2) * height;

    let (c, s) = (angle.cos(), angle.sin());
    let (a, b) = (c * sx, -s * sy);
    let (d, e) = (s * sx, c * sy);
    let (cx, cy) = (width / 2.0, height / 2.0);
    let w_off = -g * cx - h * cy + 1.0;
    Homography::new([
        a + cx * g,
        b + cx * h,
        (-a * cx - b * cy + tx) + cx * w_off,
        d + cy * g,
        e + cy * h,
        (-d * cx - e * cy + ty) + cy * w_off,
        g,
        h,
        w_off,
    ])
    .expect("bounded perturbation is invertible")
}

/// Smallest sine of the angle spanned by any of the twenty signature cross
/// products; a floor on this keeps floating-point amplification bounded.
pub fn min_conditioning(pentagon: &[Point2; 5]) -> f64 {
    let mut worst = f64::INFINITY;
    for i in 0..5 {
        let rest: Vec<Point2> = (0..5).filter(|&j| j != i).map(|j| pentagon[j]).collect();
        let o = pentagon[i];
        let v = |p: Point2| (p.x - o.x, p.y - o.y);
        let (a, b, c, d) = (v(rest[0]), v(rest[1]), v(rest[2]), v(rest[3]));
        for (u, w) in [(a, c), (b, d), (b, c), (a, d)] {
            let cross = (u.0 * w.1 - u.1 * w.0).abs();
            let lens = u.0.hypot(u.1) * w.0.hypot(w.1);
            worst = worst.min(cross / lens);
        }
    }
    worst
}

/// Well-separated, well-conditioned random pentagon in the frame.
pub fn random_pentagon(rng: &mut ChaCha8Rng, width: f64, height: f64) -> [Point2; 5] {
    loop {
        let pts: [Point2; 5] = std::array::from_fn(|_| {
            Point2::new(rng.random_range(0.0..width), rng.random_range(0.0..height))
        });
        let mut ok = true;
        'sep: for i in 0..5 {
            for j in (i + 1)..5 {
                if pts[i].dist(&pts[j]) < 30.0 {
                    ok = false;
                    break 'sep;
                }
            }
        }
        if ok && min_conditioning(&pts) >= 1e-3 {
            return pts;
        }
    }
}

/// Uniform points with no three collinear (for DLT exactness draws).
pub fn spread_points(rng: &mut ChaCha8Rng, n: usize, width: f64, height: f64) -> Vec<Point2> {
    loop {
        let pts: Vec<Point2> = (0..n)
            .map(|_| Point2::new(rng.random_range(0.0..width), rng.random_range(0.0..height)))
            .collect();
        let mut ok = true;
        'tri: for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (a, b, c) = (pts[i], pts[j], pts[k]);
                    let area2 =
                        ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
                    if area2 < 1.0 {
                        ok = false;
                        break 'tri;
                    }
                }
            }
        }
        if ok {
            return pts;
        }
    }
}

/// Brute-force step-curve integration of the recall AUC: walk the sorted
/// breakpoints and accumulate rectangles. Independent of the closed-form
/// implementation under test.
pub fn auc_oracle(errors: &[f64], threshold: f64) -> f64 {
    let n = errors.len() as f64;
    let mut finite: Vec<f64> = errors
        .iter()
        .copied()
        .filter(|e| e.is_finite() && *e <= threshold)
        .collect();
    finite.sort_by(f64::total_cmp);

    let mut area = 0.0;
    let mut prev_x = 0.0;
    let mut count_below = 0usize;
    let mut idx = 0usize;
    while idx < finite.len() {
        let x = finite[idx];
        area += (count_below as f64 / n) * (x - prev_x);
        // absorb ties
        while idx < finite.len() && finite[idx] == x {
            count_below += 1;
            idx += 1;
        }
        prev_x = x;
    }
    area += (count_below as f64 / n) * (threshold - prev_x);
    area / threshold
}

/// Spearman rank correlation.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |vals: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut ranks = vec![0.0; vals.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r as f64;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mean) * (b - mean);
        dx += (a - mean) * (a - mean);
        dy += (b - mean) * (b - mean);
    }
    num / (dx.sqrt() * dy.sqrt())
}
