//! Monomial polynomial helpers shared by the trajectory model, the cost
//! matrices and the constraint rows.

/// `i! / (i - s)!`, zero when `s > i`.
pub fn falling_factorial(i: usize, s: usize) -> f64 {
    if s > i {
        return 0.0;
    }
    ((i - s + 1)..=i).fold(1.0, |acc, v| acc * v as f64)
}

/// Evaluates the `s`-th derivative of `Σ c_i t^i` at `t` with Horner's scheme.
pub fn eval_derivative(coeffs: &[f64], t: f64, s: usize) -> f64 {
    if s >= coeffs.len() {
        return 0.0;
    }
    coeffs[s..]
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (j, &c)| acc * t + c * falling_factorial(j + s, s))
}

/// Coefficients of the `s`-th derivative, lowest power first.
pub fn derivative_coefficients(coeffs: &[f64], s: usize) -> Vec<f64> {
    if s >= coeffs.len() {
        return vec![0.0];
    }
    coeffs[s..]
        .iter()
        .enumerate()
        .map(|(j, &c)| c * falling_factorial(j + s, s))
        .collect()
}

/// Plain Horner evaluation.
pub fn eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorial_values() {
        assert_eq!(falling_factorial(5, 0), 1.0);
        assert_eq!(falling_factorial(5, 3), 60.0);
        assert_eq!(falling_factorial(3, 3), 6.0);
        assert_eq!(falling_factorial(2, 3), 0.0);
    }

    #[test]
    fn derivative_matches_coefficients() {
        let c = [1.0, -2.0, 0.5, 3.0, -1.0, 0.25];
        for s in 0..7 {
            let d = derivative_coefficients(&c, s);
            for &t in &[0.0, 0.3, 1.7] {
                let a = eval_derivative(&c, t, s);
                let b = eval(&d, t);
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "s={s} t={t}");
            }
        }
    }
}
