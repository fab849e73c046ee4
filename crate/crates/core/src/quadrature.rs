//! Composite Simpson quadrature.

/// Integrate `f` over `[a, b]` with `panels` Simpson panels (two subintervals each).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1);
        assert!((v - 3.75).abs() < 1e-12);
    }

    #[test]
    fn converges_for_sine() {
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 200);
        assert!((v - 2.0).abs() < 1e-9);
    }
}
