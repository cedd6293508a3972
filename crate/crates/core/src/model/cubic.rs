//! Real roots of monic cubics.

use std::f64::consts::PI;

/// Real roots of x³ + a x² + b x + c = 0 in ascending order.
///
/// Closed form (trigonometric when three real roots exist, Cardano otherwise)
/// followed by guarded Newton polishing. Multiple roots are returned once per
/// multiplicity only when the discriminant is resolved as non-positive.
pub fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * shift;
    let q = 2.0 * shift * shift * shift - b * shift + c;

    // rounding envelopes of p and q; anything inside is a multiple root
    let eps = f64::EPSILON;
    let p_tol = 8.0 * eps * (b.abs() + (a * shift).abs());
    let q_tol = 8.0 * eps * (2.0 * (shift * shift * shift).abs() + (b * shift).abs() + c.abs());

    let mut roots = if p.abs() <= p_tol && q.abs() <= q_tol {
        vec![-shift; 3]
    } else {
        let half_q = q / 2.0;
        let third_p = p / 3.0;
        let disc = half_q * half_q + third_p * third_p * third_p;
        let disc_tol = 8.0 * eps * (half_q * half_q + (third_p * third_p * third_p).abs());
        if disc.abs() <= disc_tol && p != 0.0 {
            let single = 3.0 * q / p;
            let double = -1.5 * q / p;
            vec![single - shift, double - shift, double - shift]
        } else if disc > 0.0 {
            let sq = disc.sqrt();
            // pick the branch that avoids cancellation
            let u = (-half_q - half_q.signum() * sq).cbrt();
            let t = if u != 0.0 { u - third_p / u } else { 0.0 };
            vec![t - shift]
        } else {
            let m = 2.0 * (-third_p).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let phi = arg.acos() / 3.0;
            (0..3)
                .map(|k| m * (phi - 2.0 * PI * k as f64 / 3.0).cos() - shift)
                .collect()
        }
    };

    if roots.len() == 3 && roots[0] != roots[1] && roots[1] != roots[2] && roots[0] != roots[2] {
        for r in roots.iter_mut() {
            *r = polish(*r, a, b, c);
        }
    } else if roots.len() == 1 {
        roots[0] = polish(roots[0], a, b, c);
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots
}

fn eval(x: f64, a: f64, b: f64, c: f64) -> (f64, f64) {
    let f = ((x + a) * x + b) * x + c;
    let df = (3.0 * x + 2.0 * a) * x + b;
    (f, df)
}

fn polish(mut x: f64, a: f64, b: f64, c: f64) -> f64 {
    let (mut f, mut df) = eval(x, a, b, c);
    for _ in 0..4 {
        if f == 0.0 || df == 0.0 {
            break;
        }
        let candidate = x - f / df;
        let (fc, dfc) = eval(candidate, a, b, c);
        if fc.abs() >= f.abs() {
            break;
        }
        x = candidate;
        f = fc;
        df = dfc;
    }
    x
}
