//! Gauss–Hermite rules for integrals against `exp(-t²)`.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Hermite rule,
/// `∫ exp(-t²) g(t) dt ≈ Σ wᵢ g(tᵢ)`, exact for polynomials of degree < 2n.
///
/// Nodes are returned in ascending order.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Hermite rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        // initial guesses for the largest roots, then walk inward
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // normalized Hermite recurrence
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 20, 41, 80] {
            let (_, w) = gauss_hermite(n);
            let s: f64 = w.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn integrates_even_moments_exactly() {
        // ∫ t^{2k} e^{-t²} dt = Γ(k + 1/2)
        let (t, w) = gauss_hermite(41);
        let mut gamma = PI.sqrt();
        for k in 0..30 {
            let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(2 * k)).sum();
            assert!((q - gamma).abs() < 1e-10 * gamma, "k={k}: {q} vs {gamma}");
            gamma *= k as f64 + 0.5;
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let (t, _) = gauss_hermite(11);
        assert!(t.windows(2).all(|p| p[0] < p[1]));
        assert!(t[5].abs() < 1e-14);
        assert!((t[0] + t[10]).abs() < 1e-13);
    }
}
