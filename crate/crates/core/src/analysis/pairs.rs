use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::DiskFunction;
use crate::par::map_slice;

/// Separations of the near-diagonal pairs.
pub const NEAR_DIAGONAL_SEPARATIONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Extremes of |f(z₁) − f(z₂)|/|z₁ − z₂| over the sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bilipschitz {
    pub lower: f64,
    pub upper: f64,
    pub lower_pair: (Complex64, Complex64),
    pub upper_pair: (Complex64, Complex64),
    pub pairs: usize,
}

/// `n_pairs` seeded uniform-area random pairs plus, for every grid node and
/// for the origin, radial and tangential pairs centered there at each of
/// [`NEAR_DIAGONAL_SEPARATIONS`]. Pairs leaving the closed disk are skipped.
pub fn empirical_bilipschitz(f: &DiskFunction, n_pairs: usize, seed: u64) -> Result<Bilipschitz> {
    if n_pairs == 0 {
        return Err(Error::Domain("at least one random pair is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = move || Complex64::from_polar(rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
    let mut pairs: Vec<(Complex64, Complex64)> = Vec::with_capacity(n_pairs);
    while pairs.len() < n_pairs {
        let (a, b) = (sample(), sample());
        if a != b {
            pairs.push((a, b));
        }
    }

    let grid = f.grid();
    let mut centers = vec![Complex64::new(0.0, 0.0)];
    centers.extend((0..grid.len()).map(|idx| grid.point(idx / grid.n_theta(), idx % grid.n_theta())));
    for c in centers {
        let radial = if c.norm() > 0.0 { c / c.norm() } else { Complex64::new(1.0, 0.0) };
        for dir in [radial, radial * Complex64::i()] {
            for h in NEAR_DIAGONAL_SEPARATIONS {
                let (a, b) = (c - 0.5 * h * dir, c + 0.5 * h * dir);
                if a.norm() <= 1.0 && b.norm() <= 1.0 {
                    pairs.push((a, b));
                }
            }
        }
    }

    let active = f.active_modes(1e-15);
    let n_r = grid.n_r();
    let ratios = map_slice(&pairs, |&(a, b)| {
        let mut basis = vec![0.0; n_r];
        let fa = f.eval_modes(a, &active, &mut basis);
        let fb = f.eval_modes(b, &active, &mut basis);
        (fa - fb).norm() / (a - b).norm()
    });

    let mut out = Bilipschitz {
        lower: f64::INFINITY,
        upper: 0.0,
        lower_pair: pairs[0],
        upper_pair: pairs[0],
        pairs: pairs.len(),
    };
    for (p, r) in pairs.iter().zip(&ratios) {
        if !r.is_finite() {
            return Err(Error::NonFinite("difference quotient"));
        }
        if *r < out.lower {
            out.lower = *r;
            out.lower_pair = *p;
        }
        if *r > out.upper {
            out.upper = *r;
            out.upper_pair = *p;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DiskGrid;

    #[test]
    fn dilation_has_constant_ratio() {
        let grid = DiskGrid::shared(8, 16).unwrap();
        let f = DiskFunction::from_fn(grid, |z| 2.0 * z).unwrap();
        let b = empirical_bilipschitz(&f, 100, 7).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-9 && (b.upper - 2.0).abs() < 1e-9);
        let again = empirical_bilipschitz(&f, 100, 7).unwrap();
        assert_eq!(b, again);
    }
}
