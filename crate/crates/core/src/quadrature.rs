//! Fixed quadrature rules.

use crate::error::{Error, Result};

/// Gauss–Legendre points and weights mapped to `[0, 1]` (weights sum to 1).
pub fn gauss_legendre_unit(points: usize) -> Result<Vec<(f64, f64)>> {
    let rule: &[(f64, f64)] = match points {
        1 => &[(0.0, 2.0)],
        2 => {
            const A: f64 = 0.577_350_269_189_625_8;
            &[(-A, 1.0), (A, 1.0)]
        }
        3 => {
            const A: f64 = 0.774_596_669_241_483_4;
            &[(-A, 5.0 / 9.0), (0.0, 8.0 / 9.0), (A, 5.0 / 9.0)]
        }
        4 => {
            const A: f64 = 0.339_981_043_584_856_3;
            const B: f64 = 0.861_136_311_594_052_6;
            const WA: f64 = 0.652_145_154_862_546_1;
            const WB: f64 = 0.347_854_845_137_453_9;
            &[(-B, WB), (-A, WA), (A, WA), (B, WB)]
        }
        n => {
            return Err(Error::InvalidInput(format!(
                "{n} Gauss points requested (1 to 4 supported)"
            )))
        }
    };
    Ok(rule.iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect())
}

/// Degree-2 interior rule on a triangle: barycentric points and weights
/// relative to the triangle area.
pub const TRIANGLE_3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];
