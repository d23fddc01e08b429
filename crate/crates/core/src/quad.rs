//! Adaptive Gauss-Kronrod (7/15) quadrature.
#![allow(clippy::excessive_precision)]

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integral estimate and error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]`, starting from `initial` equal panels and
/// bisecting the worst panel until the summed error is below
/// `max(abs_tol, rel_tol |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, initial: usize, rel_tol: f64, abs_tol: f64) -> Quadrature {
    const MAX_PANELS: usize = 20_000;
    let initial = initial.max(1);
    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial * 4);
    let (mut total, mut total_err) = (0.0, 0.0);
    for i in 0..initial {
        let (lo, hi) = (a + width * i as f64, a + width * (i + 1) as f64);
        let (value, error) = gk15(&f, lo, hi);
        total += value;
        total_err += error;
        heap.push(Panel { a: lo, b: hi, value, error });
    }
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) || heap.len() >= MAX_PANELS {
            // re-sum to drop accumulated rounding from the running totals
            let value = heap.iter().map(|p| p.value).sum();
            let error = heap.iter().map(|p| p.error).sum();
            return Quadrature { value, error };
        }
        let worst = heap.pop().expect("non-empty");
        total -= worst.value;
        total_err -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            total += worst.value;
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            total += value;
            total_err += error;
            heap.push(Panel { a: lo, b: hi, value, error });
        }
        total_err = total_err.max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1, 1e-14, 0.0);
        assert_abs_diff_eq!(q.value, 8.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_and_oscillatory() {
        let q = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, 4, 1e-12, 0.0);
        assert_abs_diff_eq!(q.value, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        let q = integrate(|x: f64| (20.0 * x).cos().powi(2), 0.0, std::f64::consts::PI, 8, 1e-12, 0.0);
        assert_abs_diff_eq!(q.value, std::f64::consts::FRAC_PI_2, epsilon = 1e-11);
    }
}
