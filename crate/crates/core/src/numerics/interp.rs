//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes)
//! and threshold-crossing search on sampled data.

/// Slopes that keep the interpolant monotone between monotone samples.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, y.len());
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Evaluates the monotone cubic interpolant at `xq` (clamped to the data).
pub fn pchip_eval(x: &[f64], y: &[f64], xq: f64) -> f64 {
    let d = pchip_slopes(x, y);
    let n = x.len();
    if xq <= x[0] {
        return y[0];
    }
    if xq >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= xq) - 1;
    hermite(x[i], x[i + 1], y[i], y[i + 1], d[i], d[i + 1], xq)
}

/// Every crossing of `level` by the interpolant, in increasing order.
pub fn crossings(x: &[f64], y: &[f64], level: f64) -> Vec<f64> {
    let d = pchip_slopes(x, y);
    let mut out = Vec::new();
    for i in 0..x.len().saturating_sub(1) {
        let (a, b) = (y[i] - level, y[i + 1] - level);
        if a == 0.0 {
            if out.last().is_none_or(|&l: &f64| l < x[i]) {
                out.push(x[i]);
            }
            continue;
        }
        if a * b > 0.0 {
            continue;
        }
        if b == 0.0 {
            continue; // picked up at the next interval
        }
        // bisection on the Hermite segment; it is monotone on [x_i, x_i+1]
        let (mut lo, mut hi) = (x[i], x[i + 1]);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let v = hermite(x[i], x[i + 1], y[i], y[i + 1], d[i], d[i + 1], mid) - level;
            if (v < 0.0) == (a < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + hi.abs()) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}
