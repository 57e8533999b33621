//! Small quadrature helpers on uniform grids.

use num_complex::Complex64;

/// `count` evenly spaced points covering `[min, max]` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    let dx = (max - min) / (count - 1) as f64;
    (0..count).map(|i| min + dx * i as f64).collect()
}

/// Trapezoid rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Trapezoid rule for complex samples.
pub fn trapezoid_c(values: &[Complex64], dx: f64) -> Complex64 {
    if values.len() < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let interior: Complex64 = values[1..values.len() - 1].iter().sum();
    dx * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Composite Simpson rule; `values.len()` must be odd (even panel count).
pub fn simpson(values: &[f64], dx: f64) -> f64 {
    assert!(
        values.len() >= 3 && values.len() % 2 == 1,
        "simpson needs an odd sample count >= 3"
    );
    let mut sum = values[0] + values[values.len() - 1];
    for (i, v) in values[1..values.len() - 1].iter().enumerate() {
        sum += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    sum * dx / 3.0
}

/// Composite Simpson rule for complex samples; odd sample count required.
pub fn simpson_c(values: &[Complex64], dx: f64) -> Complex64 {
    assert!(
        values.len() >= 3 && values.len() % 2 == 1,
        "simpson needs an odd sample count >= 3"
    );
    let mut sum = values[0] + values[values.len() - 1];
    for (i, v) in values[1..values.len() - 1].iter().enumerate() {
        sum += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    sum * (dx / 3.0)
}

/// Quadrature of `f` over `[min, max]` with `count` Simpson nodes.
pub fn integrate(min: f64, max: f64, count: usize, f: impl Fn(f64) -> f64) -> f64 {
    let count = if count % 2 == 0 { count + 1 } else { count };
    let xs = linspace(min, max, count);
    let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    simpson(&values, xs[1] - xs[0])
}

/// Quadrature of a complex integrand over `[min, max]` with Simpson nodes.
pub fn integrate_c(min: f64, max: f64, count: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let count = if count % 2 == 0 { count + 1 } else { count };
    let xs = linspace(min, max, count);
    let values: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
    simpson_c(&values, xs[1] - xs[0])
}

/// Mean and standard deviation of a sampled density (normalized internally).
pub fn density_moments(xs: &[f64], rho: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), rho.len());
    let dx = xs[1] - xs[0];
    let norm = trapezoid(rho, dx);
    let weighted: Vec<f64> = xs.iter().zip(rho).map(|(&x, &r)| x * r).collect();
    let mean = trapezoid(&weighted, dx) / norm;
    let sq: Vec<f64> = xs
        .iter()
        .zip(rho)
        .map(|(&x, &r)| (x - mean) * (x - mean) * r)
        .collect();
    let var = trapezoid(&sq, dx) / norm;
    (mean, var.max(0.0).sqrt())
}
