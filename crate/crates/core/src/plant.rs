//! Linearized depth-channel plant.
//!
//! The vertical-plane dynamics from stern-plane angle to depth reduce to a
//! fourth-order transfer function with a free integrator. [`build_depth_tf`]
//! assembles it from hydrodynamic parameters; [`default_auv_plant`] is the
//! identified benchmark vehicle. Either is realized in controllable canonical
//! form for fixed-step simulation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rigid-body and hydrodynamic parameters of the vertical plane.
///
/// `z_q_dot`, `m_w_dot` and `m_q_dot` belong to the full vertical-plane model
/// but do not enter the reduced denominator; they are carried so a complete
/// parameter sheet can be loaded unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroParams {
    /// Mass [kg].
    pub m: f64,
    /// Pitch moment of inertia [kg m^2].
    pub iy: f64,
    /// Forward speed [m/s].
    pub v: f64,
    /// Gravitational acceleration [m/s^2].
    pub g: f64,
    /// Metacentric arm between centres of gravity and buoyancy [m].
    pub h: f64,
    pub z_w: f64,
    pub z_w_dot: f64,
    pub z_q: f64,
    pub z_q_dot: f64,
    pub m_w: f64,
    pub m_w_dot: f64,
    pub m_q: f64,
    pub m_q_dot: f64,
    /// Stern-plane effectiveness on vertical force.
    pub z_de: f64,
}

impl HydroParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.m,
            self.iy,
            self.v,
            self.g,
            self.h,
            self.z_w,
            self.z_w_dot,
            self.z_q,
            self.z_q_dot,
            self.m_w,
            self.m_w_dot,
            self.m_q,
            self.m_q_dot,
            self.z_de,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hydrodynamic parameters"));
        }
        if self.m <= 0.0 || self.iy <= 0.0 || self.g <= 0.0 {
            return Err(Error::InvalidConfig(
                "hydro parameters require m > 0, iy > 0 and g > 0".into(),
            ));
        }
        if self.v < 0.0 {
            return Err(Error::InvalidConfig("hydro parameter v must be >= 0".into()));
        }
        Ok(())
    }
}

/// Denominator coefficients of the depth transfer function,
/// `A3 s^4 + A2 s^3 + A1 s^2 + A0 s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Evaluates the reduced denominator coefficients.
///
/// The expressions mix `z_w` and `z_w_dot` exactly as they are published for
/// this model; they are not rewritten to the usual added-mass convention.
pub fn denominator_coeffs(p: &HydroParams) -> Result<DenominatorCoeffs> {
    p.validate()?;
    let mgh = p.m * p.g * p.h;
    let a0 = -mgh;
    let a1 = p.m_q * p.z_w + mgh * (p.m - p.z_w) - p.m_w * (p.m * p.v + p.z_q);
    let a2 = -p.m_q * (p.m - p.z_w) - p.iy * p.z_w_dot;
    let a3 = p.iy * (p.m - p.z_w_dot);
    if a3 == 0.0 {
        return Err(Error::DegeneratePlant);
    }
    Ok(DenominatorCoeffs { a0, a1, a2, a3 })
}

/// Depth transfer function `Z_de V (Iy s^2 - Mq s + mgh) / (A3 s^4 + A2 s^3 + A1 s^2 + A0 s)`,
/// normalized to a monic denominator.
pub fn build_depth_tf(p: &HydroParams) -> Result<TransferFunction> {
    let c = denominator_coeffs(p)?;
    let k = p.z_de * p.v;
    let mgh = p.m * p.g * p.h;
    let num = vec![k * p.iy, -k * p.m_q, k * mgh];
    let den = vec![c.a3, c.a2, c.a1, c.a0, 0.0];
    Ok(TransferFunction::new(num, den)?.monic())
}

/// The identified benchmark vehicle:
/// `(0.3559 s^2 + 5.226 s + 35.2459) / (s^4 + 10.0997 s^3 + 8.3879 s^2)`.
pub fn default_auv_plant() -> TransferFunction {
    TransferFunction {
        num: vec![0.3559, 5.226, 35.2459],
        den: vec![1.0, 10.0997, 8.3879, 0.0, 0.0],
    }
}

/// SISO rational transfer function with coefficients listed highest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    /// Builds a strictly proper transfer function.
    ///
    /// Leading zeros of the numerator are ignored for the degree check; the
    /// denominator must have a nonzero leading coefficient.
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("transfer function coefficients"));
        }
        match den.first() {
            None => {
                return Err(Error::ImproperTransferFunction("empty denominator".into()));
            }
            Some(&lead) if lead == 0.0 => {
                return Err(Error::ImproperTransferFunction(
                    "denominator leading coefficient is zero".into(),
                ));
            }
            _ => {}
        }
        let num_degree = num
            .iter()
            .position(|&c| c != 0.0)
            .map(|first| num.len() - 1 - first);
        let den_degree = den.len() - 1;
        if let Some(nd) = num_degree {
            if nd >= den_degree {
                return Err(Error::ImproperTransferFunction(format!(
                    "numerator degree {nd} is not below denominator degree {den_degree}"
                )));
            }
        }
        Ok(Self { num, den })
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    /// Same transfer function scaled so the denominator leads with 1.
    pub fn monic(&self) -> Self {
        let lead = self.den[0];
        Self {
            num: self.num.iter().map(|c| c / lead).collect(),
            den: self.den.iter().map(|c| c / lead).collect(),
        }
    }

    /// Evaluates `num(s) / den(s)`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner(&self.num, s) / horner(&self.den, s)
    }

    /// Controllable canonical realization of the monic form.
    pub fn to_state_space(&self) -> StateSpaceModel {
        let tf = self.monic();
        let n = tf.order();
        let mut a = vec![0.0; n * n];
        for i in 0..n.saturating_sub(1) {
            a[i * n + i + 1] = 1.0;
        }
        // den = [1, a_{n-1}, ..., a_0]; last row = [-a_0, ..., -a_{n-1}]
        for j in 0..n {
            a[(n - 1) * n + j] = -tf.den[n - j];
        }
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        // c = [b_0, ..., b_{n-1}]; numerator terms of degree >= n are zero
        let mut c = vec![0.0; n];
        for (slot, &coef) in c.iter_mut().zip(tf.num.iter().rev()) {
            *slot = coef;
        }
        StateSpaceModel { n, a, b, c, d: 0.0 }
    }
}

fn horner(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// Continuous-time SISO state-space model `x' = A x + B u`, `y = C x + D u`.
///
/// `A` is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl StateSpaceModel {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: f64) -> Result<Self> {
        let n = b.len();
        if a.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: a.len(),
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
        Ok(Self { n, a, b, c, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn a(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.n + col]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `A x + B u`, checked.
    pub fn derivative(&self, x: &[f64], u: f64) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut dx = vec![0.0; self.n];
        self.derivative_into(x, u, &mut dx);
        Ok(dx)
    }

    /// Unchecked `A x + B u` into a caller-owned buffer.
    pub fn derivative_into(&self, x: &[f64], u: f64, dx: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(dx.len(), self.n);
        for (i, out) in dx.iter_mut().enumerate() {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            *out = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b[i] * u;
        }
    }

    /// `C x` (the feedthrough term is handled by the caller's input).
    pub fn output(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// `C (jw I - A)^-1 B + D`.
    pub fn frequency_response(&self, omega: f64) -> Complex64 {
        let n = self.n;
        let jw = Complex64::new(0.0, omega);
        let m = DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { jw } else { Complex64::new(0.0, 0.0) };
            diag - Complex64::new(self.a[i * n + j], 0.0)
        });
        let rhs = DVector::from_iterator(n, self.b.iter().map(|&b| Complex64::new(b, 0.0)));
        let x = m
            .lu()
            .solve(&rhs)
            .unwrap_or_else(|| DVector::from_element(n, Complex64::new(f64::NAN, f64::NAN)));
        self.c
            .iter()
            .zip(x.iter())
            .map(|(&c, x)| x * c)
            .sum::<Complex64>()
            + self.d
    }
}

/// `A x + B u` for `model`.
pub fn plant_derivative(model: &StateSpaceModel, x: &[f64], u: f64) -> Result<Vec<f64>> {
    model.derivative(x, u)
}
