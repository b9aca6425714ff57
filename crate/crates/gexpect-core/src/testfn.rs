//! A closed catalog of bounded-Lipschitz test functions.
//!
//! Test functions are identified by a catalog id plus a flat numeric
//! parameter list so that a serialized config renders the identical
//! function everywhere. Every entry knows its own Lipschitz constant and,
//! when it has one, a global bound; entries without a global bound are
//! still admissible on finite lattices and grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Catalog identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Catalog {
    /// `cos(x[axis])`; params `[]` or `[axis]`.
    Cosine,
    /// Euclidean norm `|x|`; params `[]`.
    Abs,
    /// `-|x|`; params `[]`.
    NegAbs,
    /// `min(|x|, clip)`; params `[clip]`.
    ClippedAbs,
    /// `offset + <coeffs, x>`; params `[offset, c_1, ..., c_d]`.
    Linear,
    /// `scale * min(|x|, clip)^2`; params `[clip]` or `[clip, scale]`.
    QuadraticClipped,
    /// Piecewise-linear function of a scalar argument; params
    /// `[left_slope, x_1, y_1, ..., x_k, y_k, right_slope]` with strictly
    /// increasing knots. Only valid in dimension 1.
    PiecewiseLinear1d,
    /// Piecewise-linear function of the radius `r = |x|`; params
    /// `[r_1, v_1, ..., r_k, v_k, right_slope]` with `0 <= r_1` and
    /// strictly increasing radii; constant `v_1` for `r <= r_1`.
    RadialPiecewiseLinear,
}

impl Catalog {
    fn name(self) -> &'static str {
        match self {
            Catalog::Cosine => "cosine",
            Catalog::Abs => "abs",
            Catalog::NegAbs => "neg_abs",
            Catalog::ClippedAbs => "clipped_abs",
            Catalog::Linear => "linear",
            Catalog::QuadraticClipped => "quadratic_clipped",
            Catalog::PiecewiseLinear1d => "piecewise_linear_1d",
            Catalog::RadialPiecewiseLinear => "radial_piecewise_linear",
        }
    }
}

/// Serialized form: `{"id": "...", "params": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TestFunctionSpec {
    id: Catalog,
    #[serde(default)]
    params: Vec<f64>,
}

/// A catalog test function together with its derived metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TestFunctionSpec", into = "TestFunctionSpec")]
pub struct TestFunction {
    kind: Catalog,
    params: Vec<f64>,
    lipschitz: f64,
    bound: Option<f64>,
}

impl TryFrom<TestFunctionSpec> for TestFunction {
    type Error = Error;
    fn try_from(spec: TestFunctionSpec) -> Result<Self> {
        TestFunction::new(spec.id, spec.params)
    }
}

impl From<TestFunction> for TestFunctionSpec {
    fn from(f: TestFunction) -> Self {
        TestFunctionSpec {
            id: f.kind,
            params: f.params,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl TestFunction {
    pub fn new(kind: Catalog, params: Vec<f64>) -> Result<Self> {
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Construction(format!(
                "{}: parameters must be finite",
                kind.name()
            )));
        }
        let (lipschitz, bound) = match kind {
            Catalog::Cosine => {
                match params.len() {
                    0 => {}
                    1 => {
                        let a = params[0];
                        if a < 0.0 || a.fract() != 0.0 {
                            return Err(Error::Construction(
                                "cosine: axis must be a nonnegative integer".into(),
                            ));
                        }
                    }
                    n => {
                        return Err(Error::Construction(format!(
                            "cosine: expected 0 or 1 params, got {n}"
                        )))
                    }
                }
                (1.0, Some(1.0))
            }
            Catalog::Abs | Catalog::NegAbs => {
                if !params.is_empty() {
                    return Err(Error::Construction(format!(
                        "{}: takes no parameters",
                        kind.name()
                    )));
                }
                (1.0, None)
            }
            Catalog::ClippedAbs => {
                if params.len() != 1 || params[0] <= 0.0 {
                    return Err(Error::Construction(
                        "clipped_abs: params must be [clip] with clip > 0".into(),
                    ));
                }
                (1.0, Some(params[0]))
            }
            Catalog::Linear => {
                if params.is_empty() {
                    return Err(Error::Construction(
                        "linear: params must be [offset, c_1, ..., c_d]".into(),
                    ));
                }
                let coeffs = &params[1..];
                let l = norm(coeffs);
                let bound = if l == 0.0 {
                    Some(params[0].abs())
                } else {
                    None
                };
                (l, bound)
            }
            Catalog::QuadraticClipped => {
                if params.is_empty() || params.len() > 2 || params[0] <= 0.0 {
                    return Err(Error::Construction(
                        "quadratic_clipped: params must be [clip] or [clip, scale] with clip > 0"
                            .into(),
                    ));
                }
                let clip = params[0];
                let scale = params.get(1).copied().unwrap_or(1.0);
                (2.0 * scale.abs() * clip, Some(scale.abs() * clip * clip))
            }
            Catalog::PiecewiseLinear1d => {
                let k = validate_piecewise(&params)?;
                let mut lip = params[0].abs().max(params[params.len() - 1].abs());
                let mut max_v: f64 = 0.0;
                for i in 0..k {
                    max_v = max_v.max(params[2 + 2 * i].abs());
                    if i + 1 < k {
                        let dx = params[1 + 2 * (i + 1)] - params[1 + 2 * i];
                        let dy = params[2 + 2 * (i + 1)] - params[2 + 2 * i];
                        lip = lip.max((dy / dx).abs());
                    }
                }
                let bounded = params[0] == 0.0 && params[params.len() - 1] == 0.0;
                (lip, bounded.then_some(max_v))
            }
            Catalog::RadialPiecewiseLinear => {
                let k = validate_radial(&params)?;
                let mut lip = params[params.len() - 1].abs();
                let mut max_v: f64 = 0.0;
                for i in 0..k {
                    max_v = max_v.max(params[1 + 2 * i].abs());
                    if i + 1 < k {
                        let dr = params[2 * (i + 1)] - params[2 * i];
                        let dv = params[1 + 2 * (i + 1)] - params[1 + 2 * i];
                        lip = lip.max((dv / dr).abs());
                    }
                }
                let bounded = params[params.len() - 1] == 0.0;
                (lip, bounded.then_some(max_v))
            }
        };
        Ok(TestFunction {
            kind,
            params,
            lipschitz,
            bound,
        })
    }

    pub fn cosine() -> Self {
        Self::new(Catalog::Cosine, vec![]).unwrap()
    }

    pub fn cosine_axis(axis: usize) -> Self {
        Self::new(Catalog::Cosine, vec![axis as f64]).unwrap()
    }

    pub fn abs() -> Self {
        Self::new(Catalog::Abs, vec![]).unwrap()
    }

    pub fn neg_abs() -> Self {
        Self::new(Catalog::NegAbs, vec![]).unwrap()
    }

    pub fn clipped_abs(clip: f64) -> Result<Self> {
        Self::new(Catalog::ClippedAbs, vec![clip])
    }

    /// `offset + <coeffs, x>`.
    pub fn linear(offset: f64, coeffs: &[f64]) -> Result<Self> {
        let mut params = vec![offset];
        params.extend_from_slice(coeffs);
        Self::new(Catalog::Linear, params)
    }

    /// The constant function `c` in dimension `d`.
    pub fn constant(c: f64, dimension: usize) -> Result<Self> {
        Self::linear(c, &vec![0.0; dimension])
    }

    pub fn quadratic_clipped(clip: f64) -> Result<Self> {
        Self::new(Catalog::QuadraticClipped, vec![clip])
    }

    pub fn quadratic_clipped_scaled(clip: f64, scale: f64) -> Result<Self> {
        Self::new(Catalog::QuadraticClipped, vec![clip, scale])
    }

    pub fn kind(&self) -> Catalog {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Lipschitz constant with respect to the Euclidean norm.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Global bound on `|phi|`, or `None` when the entry is unbounded
    /// (which is fine on a finite lattice or grid).
    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    /// Checks that the function can consume points of dimension `d`.
    pub fn check_dimension(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        match self.kind {
            Catalog::Cosine => {
                let axis = self.params.first().copied().unwrap_or(0.0) as usize;
                if axis >= d {
                    return Err(Error::DimensionMismatch {
                        expected: axis + 1,
                        got: d,
                    });
                }
            }
            Catalog::Linear => {
                if self.params.len() != d + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: self.params.len() - 1,
                        got: d,
                    });
                }
            }
            Catalog::PiecewiseLinear1d if d != 1 => {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: d,
                });
            }
            _ => {}
        }
        Ok(())
    }

    /// Evaluates the function at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind {
            Catalog::Cosine => {
                let axis = self.params.first().copied().unwrap_or(0.0) as usize;
                x[axis].cos()
            }
            Catalog::Abs => norm(x),
            Catalog::NegAbs => -norm(x),
            Catalog::ClippedAbs => norm(x).min(self.params[0]),
            Catalog::Linear => {
                self.params[0]
                    + self.params[1..]
                        .iter()
                        .zip(x)
                        .map(|(c, v)| c * v)
                        .sum::<f64>()
            }
            Catalog::QuadraticClipped => {
                let clip = self.params[0];
                let scale = self.params.get(1).copied().unwrap_or(1.0);
                let r = norm(x).min(clip);
                scale * r * r
            }
            Catalog::PiecewiseLinear1d => self.eval_piecewise(x[0]),
            Catalog::RadialPiecewiseLinear => self.eval_radial(norm(x)),
        }
    }

    /// Evaluates at a scalar argument (dimension-1 shortcut).
    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    fn eval_piecewise(&self, x: f64) -> f64 {
        let p = &self.params;
        let k = (p.len() - 2) / 2;
        let knot = |i: usize| (p[1 + 2 * i], p[2 + 2 * i]);
        let (x0, y0) = knot(0);
        if x <= x0 {
            return y0 + p[0] * (x - x0);
        }
        for i in 0..k - 1 {
            let (xa, ya) = knot(i);
            let (xb, yb) = knot(i + 1);
            if x <= xb {
                return ya + (yb - ya) * (x - xa) / (xb - xa);
            }
        }
        let (xk, yk) = knot(k - 1);
        yk + p[p.len() - 1] * (x - xk)
    }

    fn eval_radial(&self, r: f64) -> f64 {
        let p = &self.params;
        let k = (p.len() - 1) / 2;
        let knot = |i: usize| (p[2 * i], p[1 + 2 * i]);
        let (r0, v0) = knot(0);
        if r <= r0 {
            return v0;
        }
        for i in 0..k - 1 {
            let (ra, va) = knot(i);
            let (rb, vb) = knot(i + 1);
            if r <= rb {
                return va + (vb - va) * (r - ra) / (rb - ra);
            }
        }
        let (rk, vk) = knot(k - 1);
        vk + p[p.len() - 1] * (r - rk)
    }
}

fn validate_piecewise(params: &[f64]) -> Result<usize> {
    if params.len() < 4 || !params.len().is_multiple_of(2) {
        return Err(Error::Construction(
            "piecewise_linear_1d: params must be [left_slope, x_1, y_1, ..., x_k, y_k, right_slope]"
                .into(),
        ));
    }
    let k = (params.len() - 2) / 2;
    for i in 0..k - 1 {
        if params[1 + 2 * (i + 1)] <= params[1 + 2 * i] {
            return Err(Error::Construction(
                "piecewise_linear_1d: knot abscissae must be strictly increasing".into(),
            ));
        }
    }
    Ok(k)
}

fn validate_radial(params: &[f64]) -> Result<usize> {
    if params.len() < 3 || params.len().is_multiple_of(2) {
        return Err(Error::Construction(
            "radial_piecewise_linear: params must be [r_1, v_1, ..., r_k, v_k, right_slope]".into(),
        ));
    }
    let k = (params.len() - 1) / 2;
    if params[0] < 0.0 {
        return Err(Error::Construction(
            "radial_piecewise_linear: radii must be nonnegative".into(),
        ));
    }
    for i in 0..k - 1 {
        if params[2 * (i + 1)] <= params[2 * i] {
            return Err(Error::Construction(
                "radial_piecewise_linear: radii must be strictly increasing".into(),
            ));
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_evaluates_on_requested_axis() {
        let f = TestFunction::cosine_axis(1);
        assert_eq!(f.eval(&[0.0, std::f64::consts::PI]), -1.0);
        assert!(f.check_dimension(1).is_err());
        assert!(f.check_dimension(2).is_ok());
    }

    #[test]
    fn linear_with_offset_is_constant_when_coeffs_vanish() {
        let f = TestFunction::constant(5.0, 2).unwrap();
        assert_eq!(f.eval(&[3.0, -7.0]), 5.0);
        assert_eq!(f.bound(), Some(5.0));
        assert_eq!(f.lipschitz(), 0.0);
    }

    #[test]
    fn clipped_quadratic_saturates() {
        let f = TestFunction::quadratic_clipped(2.0).unwrap();
        assert_eq!(f.eval(&[1.0]), 1.0);
        assert_eq!(f.eval(&[5.0]), 4.0);
        assert_eq!(f.bound(), Some(4.0));
        assert_eq!(f.lipschitz(), 4.0);
    }

    #[test]
    fn piecewise_positive_part() {
        // x^+ = max(x, 0): flat left of 0, slope 1 right of it.
        let f = TestFunction::new(Catalog::PiecewiseLinear1d, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.eval1(-3.0), 0.0);
        assert_eq!(f.eval1(2.0), 2.0);
        assert_eq!(f.lipschitz(), 1.0);
        assert_eq!(f.bound(), None);
    }

    #[test]
    fn piecewise_clipped_abs_matches_radial_form() {
        // min(|x|, 2) two ways.
        let p = TestFunction::new(
            Catalog::PiecewiseLinear1d,
            vec![0.0, -2.0, 2.0, 0.0, 0.0, 2.0, 2.0, 0.0],
        )
        .unwrap();
        let r = TestFunction::clipped_abs(2.0).unwrap();
        for x in [-3.0, -2.0, -0.5, 0.0, 1.0, 2.0, 4.0] {
            assert!((p.eval1(x) - r.eval1(x)).abs() < 1e-15);
        }
        assert_eq!(p.bound(), Some(2.0));
    }

    #[test]
    fn radial_negative_clipped() {
        // -min(|x|, 5) as a radial profile.
        let f = TestFunction::new(
            Catalog::RadialPiecewiseLinear,
            vec![0.0, 0.0, 5.0, -5.0, 0.0],
        )
        .unwrap();
        assert_eq!(f.eval(&[3.0, 4.0]), -5.0);
        assert_eq!(f.eval(&[0.6, 0.8]), -1.0);
        assert_eq!(f.lipschitz(), 1.0);
        assert_eq!(f.bound(), Some(5.0));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TestFunction::new(Catalog::ClippedAbs, vec![-1.0]).is_err());
        assert!(TestFunction::new(Catalog::Cosine, vec![0.5]).is_err());
        assert!(TestFunction::new(Catalog::Linear, vec![]).is_err());
        assert!(TestFunction::new(
            Catalog::PiecewiseLinear1d,
            vec![0.0, 1.0, 0.0, 0.5, 0.0, 0.0]
        )
        .is_err());
        assert!(TestFunction::new(Catalog::Abs, vec![f64::NAN]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = TestFunction::quadratic_clipped_scaled(10.0, -1.0).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"id":"quadratic_clipped","params":[10.0,-1.0]}"#);
        let back: TestFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
