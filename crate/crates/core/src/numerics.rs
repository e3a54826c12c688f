//! Small numeric helpers shared across the estimators.

/// Compensated (Neumaier) summation. Sequential and deterministic; the
/// compensation keeps reduction error near one ulp even for long inputs.
pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoid-rule integral of uniformly spaced samples.
pub(crate) fn trapezoid_1d(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner = kahan_sum(values[1..values.len() - 1].iter().copied());
    dx * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}

/// Trapezoid weight for knot `i` of an `n`-knot axis: 1/2 at the ends,
/// 1 in the interior.
pub(crate) fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// 2-D trapezoid-rule integral over an `nx` x `ny` lattice stored x-major
/// (`values[ix * ny + iy]`).
pub(crate) fn trapezoid_2d(values: &[f64], nx: usize, ny: usize, dx: f64, dy: f64) -> f64 {
    debug_assert_eq!(values.len(), nx * ny);
    let terms = (0..nx).flat_map(|ix| {
        let wx = trapezoid_weight(ix, nx);
        (0..ny).map(move |iy| wx * trapezoid_weight(iy, ny) * values[ix * ny + iy])
    });
    dx * dy * kahan_sum(terms)
}
