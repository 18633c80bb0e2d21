use crate::error::{Error, Result};

/// `∫_{−1}^{1} exp(−1/(1 − x²)) dx`.
pub const BUMP_UNIT_INTEGRAL: f64 = 0.443_993_816_168_078_65;

/// Smooth compactly supported test function `a·exp(−1/(1 − (x/w)²))` on `(−w, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub width: f64,
}

impl Bump {
    pub fn new(amplitude: f64, width: f64) -> Result<Self> {
        if !amplitude.is_finite() || !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain(format!(
                "bump needs finite amplitude and positive width, got a = {amplitude}, w = {width}"
            )));
        }
        Ok(Self { amplitude, width })
    }

    pub fn unit() -> Self {
        Self {
            amplitude: 1.0,
            width: 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / (1.0 - u * u)).exp()
        }
    }

    /// `∫ φ` by adaptive Simpson quadrature over the support.
    pub fn integral(&self) -> f64 {
        adaptive_simpson(|x| self.eval(x), -self.width, self.width, 1e-13)
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        recurse(f, (a, fa), (lm, flm), (m, fm), left, tol / 2.0, depth - 1)
            + recurse(f, (m, fm), (rm, frm), (b, fb), right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, (a, fa), (m, fm), (b, fb), whole, tol, 50)
}
