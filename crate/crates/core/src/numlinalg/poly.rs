use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::digraph::IntMatrix;

/// Polynomial with big-integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `Π (x - r)` over the given integer roots.
    pub fn from_roots(roots: &[i64]) -> Self {
        let mut p = Self::from_i64(&[1]);
        for &r in roots {
            p = p.mul(&Self::from_i64(&[-r, 1]));
        }
        p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.to_complex_coeffs()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Exact `p(A)` in big integers.
    pub fn eval_matrix(&self, a: &IntMatrix) -> IntMatrix {
        let n = a.n();
        let mut acc = IntMatrix::zeros(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(&IntMatrix::identity(n).scale(c));
        }
        acc
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
            .collect()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn to_rational(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Squarefree decomposition `p = c · Π f_i^i` (Yun's algorithm over ℚ).
    ///
    /// Returns the nonconstant factors `f_i` with their exponent `i`, each
    /// scaled to a primitive integer polynomial with positive leading
    /// coefficient.
    pub fn squarefree_factors(&self) -> Vec<(IntPolynomial, usize)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let f = self.to_rational().monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0);
        let mut c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a.to_primitive_int(), i));
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(k == 0 && first) {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            match (show_mag, k) {
                (_, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}x")?,
                (false, 1) => f.write_str("x")?,
                (true, _) => write!(f, "{mag}x^{k}")?,
                (false, _) => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Exact characteristic polynomial `det(xI - A)` (monic) by Faddeev–LeVerrier.
///
/// With `M_0 = 0`, `M_k = A M_{k-1} + c_{n-k+1} I` and
/// `c_{n-k} = -tr(A M_k) / k`; the division is exact over the integers.
pub fn char_poly(a: &IntMatrix) -> IntPolynomial {
    let n = a.n();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n);
    let identity = IntMatrix::identity(n);
    for k in 1..=n {
        m = a.mul(&m).add(&identity.scale(&coeffs[n - k + 1]));
        let trace = a.mul(&m).trace();
        let (q, r) = trace.div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev–LeVerrier division must be exact");
        coeffs[n - k] = -q;
    }
    IntPolynomial::new(coeffs)
}

#[derive(Clone, Debug, PartialEq)]
struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    /// Degree, with the zero polynomial reported as 0.
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn monic(&self) -> RatPoly {
        match self.coeffs.last() {
            Some(lead) => RatPoly::new(self.coeffs.iter().map(|c| c / lead).collect()),
            None => self.clone(),
        }
    }

    fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn sub(&self, other: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        RatPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.coeffs.last().unwrap();
        if rem.len() < divisor.coeffs.len() {
            return (RatPoly::new(Vec::new()), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / lead;
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &q * c;
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    fn div_exact(&self, divisor: &RatPoly) -> RatPoly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd; `gcd(0, 0)` is 1.
    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            RatPoly::new(vec![BigRational::one()])
        } else {
            a.monic()
        }
    }

    fn to_primitive_int(&self) -> IntPolynomial {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(Signed::is_negative) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        IntPolynomial::new(ints.into_iter().map(|c| c / &g * &sign).collect())
    }
}
