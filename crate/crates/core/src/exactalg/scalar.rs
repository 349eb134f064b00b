//! Scalars: Gaussian rationals, polynomials in a formal `π`, and truncated
//! power series in `ħ` with `π`-polynomial coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"a"`, `"-a"` or `"a/b"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |m: &str| Error::Parse { location: format!("rational {s:?}"), message: m.to_string() };
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty string"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(bad("expected an integer or a fraction a/b"));
    }
    let n: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact element of `ℚ(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(rat_int(re), rat_int(im))
    }

    pub fn real(re: Rational) -> Self {
        GaussRat { re, im: Rational::zero() }
    }

    pub fn int(n: i64) -> Self {
        GaussRat::from_ints(n, 0)
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }

    pub fn div(&self, other: &GaussRat) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat { re: Rational::one(), im: Rational::zero() }
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re + o.re, im: self.im + o.im }
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        &self * &o
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}i", format_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", format_rational(&self.re), sign, format_rational(&self.im.abs()))
            }
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Polynomial in the formal transcendental `π` with `ℚ(i)` coefficients.
///
/// `π` never gets a numeric value. Because it is transcendental, `ℚ(i)[π]`
/// is an integral domain and nonzero constants are its only units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PiScalar {
    coeffs: Vec<GaussRat>,
}

impl PiScalar {
    pub fn constant(c: GaussRat) -> Self {
        let mut s = PiScalar { coeffs: vec![c] };
        s.trim();
        s
    }

    /// `c·π^degree`.
    pub fn monomial(c: GaussRat, degree: usize) -> Self {
        let mut coeffs = vec![GaussRat::zero(); degree + 1];
        coeffs[degree] = c;
        let mut s = PiScalar { coeffs };
        s.trim();
        s
    }

    pub fn pi() -> Self {
        PiScalar::monomial(GaussRat::one(), 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, degree: usize) -> GaussRat {
        self.coeffs.get(degree).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    /// Highest power of `π` present; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.coeffs.len() {
            0 => Some(GaussRat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return PiScalar::zero();
        }
        PiScalar { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul_pi(&self, power: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![GaussRat::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        PiScalar { coeffs }
    }

    /// Inverse, which exists only for nonzero constants.
    pub fn inv(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            self.coeffs[0].inv().map(PiScalar::constant)
        } else {
            None
        }
    }
}

impl Zero for PiScalar {
    fn zero() -> Self {
        PiScalar { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for PiScalar {
    fn one() -> Self {
        PiScalar::constant(GaussRat::one())
    }
}

impl<'a> Add<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn add(self, o: &PiScalar) -> PiScalar {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl Add for PiScalar {
    type Output = PiScalar;
    fn add(self, o: PiScalar) -> PiScalar {
        &self + &o
    }
}

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, o: &PiScalar) {
        if self.coeffs.len() < o.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), GaussRat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&PiScalar> for PiScalar {
    fn sub_assign(&mut self, o: &PiScalar) {
        if self.coeffs.len() < o.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), GaussRat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl<'a> Sub<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn sub(self, o: &PiScalar) -> PiScalar {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl Sub for PiScalar {
    type Output = PiScalar;
    fn sub(self, o: PiScalar) -> PiScalar {
        &self - &o
    }
}

impl<'a> Mul<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn mul(self, o: &PiScalar) -> PiScalar {
        if self.is_zero() || o.is_zero() {
            return PiScalar::zero();
        }
        let mut coeffs = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        let mut r = PiScalar { coeffs };
        r.trim();
        r
    }
}

impl Mul for PiScalar {
    type Output = PiScalar;
    fn mul(self, o: PiScalar) -> PiScalar {
        &self * &o
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·π")?,
                _ => write!(f, "{c}·π^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of `ℚ(i)[π][ħ]/(ħ^order)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HbarSeries {
    terms: Vec<PiScalar>,
}

impl HbarSeries {
    pub fn zero(order: usize) -> Self {
        HbarSeries { terms: vec![PiScalar::zero(); order] }
    }

    pub fn one(order: usize) -> Self {
        HbarSeries::constant(PiScalar::one(), order)
    }

    pub fn constant(c: PiScalar, order: usize) -> Self {
        let mut s = HbarSeries::zero(order);
        if order > 0 {
            s.terms[0] = c;
        }
        s
    }

    /// `c·ħ^power`, truncated.
    pub fn monomial(c: PiScalar, power: usize, order: usize) -> Self {
        let mut s = HbarSeries::zero(order);
        if power < order {
            s.terms[power] = c;
        }
        s
    }

    pub fn from_terms(terms: Vec<PiScalar>) -> Self {
        HbarSeries { terms }
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[PiScalar] {
        &self.terms
    }

    pub fn coeff(&self, k: usize) -> PiScalar {
        self.terms.get(k).cloned().unwrap_or_else(PiScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.iter().position(|t| !t.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut terms: Vec<PiScalar> = self.terms.iter().take(order).cloned().collect();
        terms.resize(order, PiScalar::zero());
        HbarSeries { terms }
    }

    pub fn scale(&self, c: &PiScalar) -> Self {
        HbarSeries { terms: self.terms.iter().map(|t| t * c).collect() }
    }

    pub fn scale_gauss(&self, c: &GaussRat) -> Self {
        HbarSeries { terms: self.terms.iter().map(|t| t.scale(c)).collect() }
    }

    pub fn mul_pi(&self, power: usize) -> Self {
        HbarSeries { terms: self.terms.iter().map(|t| t.mul_pi(power)).collect() }
    }

    /// Multiplication by `ħ^k`, staying at the same order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut s = HbarSeries::zero(n);
        for i in 0..n.saturating_sub(k) {
            s.terms[i + k] = self.terms[i].clone();
        }
        s
    }

    /// Exact division by `ħ^k`; the order drops by `k`.
    pub fn divide_hbar(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::TruncationMismatch { needed: k, got: self.order() });
        }
        if self.terms[..k].iter().any(|t| !t.is_zero()) {
            return Err(Error::NotDivisible(k));
        }
        Ok(HbarSeries { terms: self.terms[k..].to_vec() })
    }

    pub fn add(&self, o: &HbarSeries) -> HbarSeries {
        let n = self.order().min(o.order());
        HbarSeries { terms: (0..n).map(|i| &self.terms[i] + &o.terms[i]).collect() }
    }

    pub fn sub(&self, o: &HbarSeries) -> HbarSeries {
        let n = self.order().min(o.order());
        HbarSeries { terms: (0..n).map(|i| &self.terms[i] - &o.terms[i]).collect() }
    }

    pub fn neg(&self) -> HbarSeries {
        HbarSeries { terms: self.terms.iter().map(|t| -t.clone()).collect() }
    }

    pub fn add_assign(&mut self, o: &HbarSeries) {
        let n = self.order().min(o.order());
        self.terms.truncate(n);
        for (a, b) in self.terms.iter_mut().zip(&o.terms) {
            *a += b;
        }
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, o: &HbarSeries) -> HbarSeries {
        let n = self.order().min(o.order());
        let mut terms = vec![PiScalar::zero(); n];
        for i in 0..n {
            if self.terms[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !o.terms[j].is_zero() {
                    terms[i + j] += &(&self.terms[i] * &o.terms[j]);
                }
            }
        }
        HbarSeries { terms }
    }

    /// `exp(x)` for `x` with vanishing constant term.
    pub fn exp(&self) -> Result<HbarSeries> {
        let n = self.order();
        if n > 0 && !self.terms[0].is_zero() {
            return Err(Error::NotInvertible("exp of a series with nonzero constant term".into()));
        }
        let mut result = HbarSeries::one(n);
        let mut power = HbarSeries::one(n);
        for k in 1..n {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            let inv_fact = GaussRat::real(Rational::new(BigInt::one(), factorial(k)));
            result.add_assign(&power.scale_gauss(&inv_fact));
        }
        Ok(result)
    }

    /// Multiplicative inverse; needs a constant in `ℚ(i)^×` at `ħ⁰`.
    pub fn inv(&self) -> Result<HbarSeries> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0 = self.terms[0]
            .inv()
            .ok_or_else(|| Error::NotInvertible(format!("series with constant term {}", self.terms[0])))?;
        let mut out = vec![PiScalar::zero(); n];
        out[0] = c0.clone();
        for k in 1..n {
            let mut acc = PiScalar::zero();
            for i in 1..=k {
                if !self.terms[i].is_zero() {
                    acc += &(&self.terms[i] * &out[k - i]);
                }
            }
            out[k] = -(&acc * &c0);
        }
        Ok(HbarSeries { terms: out })
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, t) in self.terms.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({t})")?,
                1 => write!(f, "({t})·ħ")?,
                _ => write!(f, "({t})·ħ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(ħ^{})", self.order())
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `C(n, k)` with `C(n, k) = 0` for negative `k` or `k > n`.
pub fn binom(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let (n, k) = (n as u64, k.min(n - k) as u64);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r as usize
}

/// Reduces a rational into `[0, modulus)`, returning the reduced value and the
/// integer quotient.
pub fn reduce_mod(r: &Rational, modulus: i64) -> (Rational, BigInt) {
    let m = BigInt::from(modulus);
    let num = r.numer();
    let den = r.denom();
    let (q, _) = num.div_mod_floor(&(den * &m));
    let reduced = r - Rational::from_integer(&q * &m);
    (reduced, q)
}
