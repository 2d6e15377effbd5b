use std::sync::OnceLock;

/// C^∞ step: 0 for u ≤ 0, 1 for u ≥ 1, monotone in between.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

fn bump(t: f64) -> f64 {
    let d = 0.25 - t * t;
    if d > 0.0 {
        (-1.0 / d).exp()
    } else {
        0.0
    }
}

/// Table of m_o on [0, 1] with step 1/TABLE_HALF.
pub const TABLE_HALF: usize = 1 << 11;
const QUAD: usize = 1 << 12;

struct Profiles {
    scale: f64,
    table: Vec<f64>,
}

fn profiles() -> &'static Profiles {
    static CELL: OnceLock<Profiles> = OnceLock::new();
    CELL.get_or_init(|| {
        // Trapezoid rule on [−1/2, 1/2]; the integrand vanishes to all
        // orders at the ends so this converges very fast.
        let ds = 1.0 / QUAD as f64;
        let nodes: Vec<f64> = (0..=QUAD).map(|i| -0.5 + i as f64 * ds).collect();
        let mass: f64 = nodes.iter().map(|&s| bump(s)).sum::<f64>() * ds;
        let scale = 1.0 / mass;
        let vals: Vec<f64> = nodes.iter().map(|&s| scale * bump(s)).collect();
        let table = (0..=TABLE_HALF)
            .map(|i| {
                let t = i as f64 / TABLE_HALF as f64;
                if i == TABLE_HALF {
                    return 0.0;
                }
                nodes.iter().zip(&vals).map(|(&s, &v)| v * scale * bump(t - s)).sum::<f64>() * ds
            })
            .collect();
        Profiles { scale, table }
    })
}

/// φ_o: the normalized bump supported in (−1/2, 1/2).
pub fn phi_o(t: f64) -> f64 {
    profiles().scale * bump(t)
}

/// m_o = φ_o ∗ φ_o, linearly interpolated from its table. Exactly even and
/// exactly zero for |t| ≥ 1.
pub fn m_o(t: f64) -> f64 {
    let a = t.abs();
    if !(a < 1.0) {
        return 0.0;
    }
    let table = &profiles().table;
    let x = a * TABLE_HALF as f64;
    let i = (x as usize).min(TABLE_HALF - 1);
    let w = x - i as f64;
    table[i] * (1.0 - w) + table[i + 1] * w
}

/// Radial cutoff: 1 on |ξ| ≤ 2n², 0 on |ξ| ≥ 4n².
pub fn eta_o(n: usize, xi: &[f64]) -> f64 {
    let n2 = (n * n) as f64;
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r <= 2.0 * n2 {
        return 1.0;
    }
    smooth_step((4.0 * n2 - r) / (2.0 * n2))
}

/// m(ζ) = (1 − η_o(ζ)) m_o(𝟏·ζ).
pub fn m_multiplier(n: usize, zeta: &[f64]) -> f64 {
    let s: f64 = zeta.iter().sum();
    let mo = m_o(s);
    if mo == 0.0 {
        return 0.0;
    }
    (1.0 - eta_o(n, zeta)) * mo
}
