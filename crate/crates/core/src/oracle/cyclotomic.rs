//! Exact arithmetic in `Q(ζ_N)`: polynomials in `ζ` with rational
//! coefficients, reduced modulo the `N`-th cyclotomic polynomial.
//!
//! Numerators are `i128` over a common positive denominator. Values that occur
//! in the reflection representation are algebraic integers up to a factor 2,
//! so coefficients stay small at desk scale; overflow panics rather than
//! wrapping.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::OracleError;

/// Default upper bound on `N`.
pub const DEFAULT_MAX_MODULUS: u32 = 120;

/// `Q(ζ_N)` presented as `Q[x] / Φ_N(x)`.
pub struct CyclotomicField {
    modulus: u32,
    /// Coefficients of `Φ_N`, low degree first, monic.
    phi: Vec<i128>,
    /// Nonzero non-leading coefficients of `Φ_N`.
    phi_terms: Vec<(usize, i128)>,
    /// `cos(2πk/N)` for `k < N`.
    cosines: Vec<f64>,
}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.modulus)
    }
}

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i128; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Coefficients of the `n`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i128> {
    fn go(n: u32, memo: &mut HashMap<u32, Vec<i128>>) -> Vec<i128> {
        if let Some(p) = memo.get(&n) {
            return p.clone();
        }
        let mut p = vec![0i128; n as usize + 1];
        p[0] = -1;
        p[n as usize] = 1;
        for d in 1..n {
            if n.is_multiple_of(d) {
                let q = go(d, memo);
                p = poly_div_exact(&p, &q);
            }
        }
        memo.insert(n, p.clone());
        p
    }
    go(n, &mut HashMap::new())
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

impl CyclotomicField {
    pub fn new(modulus: u32) -> Arc<CyclotomicField> {
        assert!(modulus >= 3, "modulus must be at least 3");
        let phi = cyclotomic_polynomial(modulus);
        let d = phi.len() - 1;
        let phi_terms = phi[..d]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let cosines = (0..modulus)
            .map(|k| (2.0 * std::f64::consts::PI * f64::from(k) / f64::from(modulus)).cos())
            .collect();
        Arc::new(CyclotomicField {
            modulus,
            phi,
            phi_terms,
            cosines,
        })
    }

    /// Field with `N = 2 * lcm(labels ∪ {2})`, refusing `N > max_modulus`.
    pub fn for_labels(labels: &[u32], max_modulus: u32) -> Result<Arc<CyclotomicField>, OracleError> {
        let l = labels.iter().fold(2u32, |acc, &m| lcm(acc, m));
        let modulus = 2 * l;
        if modulus > max_modulus {
            return Err(OracleError::ModulusTooLarge {
                modulus,
                limit: max_modulus,
            });
        }
        Ok(CyclotomicField::new(modulus))
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Units `k` with `gcd(k, N) = 1`, indexing the complex embeddings.
    pub fn embeddings(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.modulus).filter(|k| k.gcd(&self.modulus) == 1)
    }

    /// `ζ_N^k`.
    pub fn zeta_pow(self: &Arc<Self>, k: u32) -> CycNumber {
        let k = (k % self.modulus) as usize;
        let mut num = vec![0i128; k + 1];
        num[k] = 1;
        CycNumber::from_raw(Some(self.clone()), num, 1)
    }

    /// `2 cos(π/m) = ζ_{2m} + ζ_{2m}^{-1}`; requires `2m | N`.
    pub fn two_cos_pi_over(self: &Arc<Self>, m: u32) -> CycNumber {
        assert!(self.modulus.is_multiple_of(2 * m), "2*{m} does not divide {}", self.modulus);
        let step = self.modulus / (2 * m);
        &self.zeta_pow(step) + &self.zeta_pow(self.modulus - step)
    }

    fn reduce(&self, num: &mut Vec<i128>) {
        let d = self.degree();
        if num.len() > d {
            for i in (d..num.len()).rev() {
                let c = num[i];
                if c != 0 {
                    for &(j, p) in &self.phi_terms {
                        let t = num[i - d + j];
                        num[i - d + j] = ck(t.checked_sub(ck(c.checked_mul(p))));
                    }
                }
            }
            num.truncate(d);
        }
    }
}

#[inline]
fn ck(x: Option<i128>) -> i128 {
    x.expect("cyclotomic coefficient overflow")
}

/// An exact element of `Q(ζ_N)`.
///
/// Rational constants carry no field and combine with numbers of any field.
#[derive(Clone)]
pub struct CycNumber {
    field: Option<Arc<CyclotomicField>>,
    num: Vec<i128>,
    den: i128,
}

impl CycNumber {
    fn from_raw(field: Option<Arc<CyclotomicField>>, mut num: Vec<i128>, den: i128) -> CycNumber {
        if let Some(f) = &field {
            f.reduce(&mut num);
        }
        let mut x = CycNumber { field, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        while self.num.last() == Some(&0) {
            self.num.pop();
        }
        if self.num.is_empty() {
            self.den = 1;
            return;
        }
        if self.den < 0 {
            self.den = -self.den;
            for c in &mut self.num {
                *c = -*c;
            }
        }
        if self.den != 1 {
            let g = self.num.iter().fold(self.den, |g, &c| g.gcd(&c));
            if g > 1 {
                self.den /= g;
                for c in &mut self.num {
                    *c /= g;
                }
            }
        }
        if self.num.len() <= 1 {
            // constants are valid in every field
            self.field = None;
        }
    }

    pub fn ratio(n: i64, d: i64) -> CycNumber {
        assert!(d != 0);
        CycNumber::from_raw(None, vec![i128::from(n)], i128::from(d))
    }

    pub fn integer(n: i64) -> CycNumber {
        CycNumber::ratio(n, 1)
    }

    pub fn field(&self) -> Option<&Arc<CyclotomicField>> {
        self.field.as_ref()
    }

    /// Numerator coefficients in the power basis of `ζ` (low degree first).
    pub fn numerators(&self) -> &[i128] {
        &self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn is_rational(&self) -> bool {
        self.num.len() <= 1
    }

    fn merged_field(&self, other: &CycNumber) -> Option<Arc<CyclotomicField>> {
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => {
                assert_eq!(a.modulus, b.modulus, "mixing cyclotomic fields");
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        }
    }

    fn add_signed(&self, other: &CycNumber, sign: i128) -> CycNumber {
        let field = self.merged_field(other);
        let len = self.num.len().max(other.num.len());
        let mut num = vec![0i128; len];
        if self.den == other.den {
            for (i, &c) in self.num.iter().enumerate() {
                num[i] = c;
            }
            for (i, &c) in other.num.iter().enumerate() {
                num[i] = ck(num[i].checked_add(sign * c));
            }
            return CycNumber::from_raw(field, num, self.den);
        }
        let g = self.den.gcd(&other.den);
        let (fa, fb) = (other.den / g, self.den / g);
        for (i, &c) in self.num.iter().enumerate() {
            num[i] = ck(c.checked_mul(fa));
        }
        for (i, &c) in other.num.iter().enumerate() {
            num[i] = ck(num[i].checked_add(ck((sign * c).checked_mul(fb))));
        }
        CycNumber::from_raw(field, num, ck(self.den.checked_mul(fa)))
    }

    fn mul_ref(&self, other: &CycNumber) -> CycNumber {
        if self.num.is_empty() || other.num.is_empty() {
            return CycNumber::zero();
        }
        let field = self.merged_field(other);
        let mut acc = vec![0i128; self.num.len() + other.num.len() - 1];
        mul_acc(&mut acc, &self.num, &other.num);
        CycNumber::from_raw(field, acc, ck(self.den.checked_mul(other.den)))
    }

    /// `Σ a_i b_i`, reducing once at the end.
    pub fn dot<'a>(terms: impl Iterator<Item = (&'a CycNumber, &'a CycNumber)>) -> CycNumber {
        let mut field: Option<Arc<CyclotomicField>> = None;
        let mut acc: Vec<i128> = Vec::new();
        let mut den: i128 = 1;
        for (a, b) in terms {
            if a.num.is_empty() || b.num.is_empty() {
                continue;
            }
            if field.is_none() {
                field = a.field.clone().or_else(|| b.field.clone());
            }
            if let Some(f) = a.field.as_ref().or(b.field.as_ref()) {
                debug_assert_eq!(f.modulus, field.as_ref().unwrap().modulus);
            }
            let tden = ck(a.den.checked_mul(b.den));
            if tden != den {
                let l = den.lcm(&tden);
                let scale = l / den;
                if scale != 1 {
                    for c in &mut acc {
                        *c = ck(c.checked_mul(scale));
                    }
                }
                den = l;
            }
            let scale = den / tden;
            let need = a.num.len() + b.num.len() - 1;
            if acc.len() < need {
                acc.resize(need, 0);
            }
            if scale == 1 {
                mul_acc(&mut acc, &a.num, &b.num);
            } else {
                for (i, &x) in a.num.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let xs = ck(x.checked_mul(scale));
                    for (j, &y) in b.num.iter().enumerate() {
                        acc[i + j] = ck(acc[i + j].checked_add(ck(xs.checked_mul(y))));
                    }
                }
            }
        }
        CycNumber::from_raw(field, acc, den)
    }

    /// Real value under the embedding `ζ -> exp(2πik/N)`. Values handled here
    /// are real, so the imaginary part is dropped.
    pub fn embed(&self, k: u32) -> f64 {
        let Some(f) = &self.field else {
            return self.num.first().map_or(0.0, |&c| c as f64) / self.den as f64;
        };
        let n = f.modulus as usize;
        let mut s = 0.0;
        for (i, &c) in self.num.iter().enumerate() {
            if c != 0 {
                s += c as f64 * f.cosines[(i * k as usize) % n];
            }
        }
        s / self.den as f64
    }

    /// Value under the standard embedding `ζ = exp(2πi/N)`.
    pub fn to_f64(&self) -> f64 {
        self.embed(1)
    }

    /// Absolute values under every complex embedding.
    pub fn conjugate_magnitudes(&self) -> Vec<f64> {
        match &self.field {
            None => vec![self.to_f64().abs()],
            Some(f) => f.embeddings().map(|k| self.embed(k).abs()).collect(),
        }
    }

    /// Multiplicative inverse, computed with the extended Euclidean algorithm
    /// over `Q[x]`.
    pub fn inverse(&self) -> Option<CycNumber> {
        if self.num.is_empty() {
            return None;
        }
        let Some(field) = &self.field else {
            let c = self.num[0];
            return Some(CycNumber::from_raw(None, vec![self.den], c));
        };
        let to_q = |v: &[i128], d: i128| -> Vec<BigRational> {
            v.iter()
                .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(d)))
                .collect()
        };
        let a = to_q(&self.num, self.den);
        let m = to_q(&field.phi, 1);
        let inv = qpoly_inverse_mod(&a, &m)?;
        let mut den = BigInt::one();
        for c in &inv {
            den = den.lcm(c.denom());
        }
        let num: Option<Vec<i128>> = inv
            .iter()
            .map(|c| (c.numer() * (&den / c.denom())).to_i128())
            .collect();
        Some(CycNumber::from_raw(Some(field.clone()), num?, den.to_i128()?))
    }
}

fn mul_acc(acc: &mut [i128], a: &[i128], b: &[i128]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                acc[i + j] = ck(acc[i + j].checked_add(ck(x.checked_mul(y))));
            }
        }
    }
}

fn qtrim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qdivmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] = &r[i + j] - &c * bj;
            }
        }
        q[i] = c;
    }
    qtrim(&mut r);
    (q, r)
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    qtrim(&mut out);
    out
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    qtrim(&mut out);
    out
}

/// `a^{-1} mod m` in `Q[x]`, if `gcd(a, m) = 1`.
fn qpoly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    qtrim(&mut r1);
    let (mut t0, mut t1): (Vec<BigRational>, Vec<BigRational>) = (vec![], vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = qdivmod(&r0, &r1);
        let t = qsub(&t0, &qmul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].clone();
    let inv: Vec<BigRational> = t0.iter().map(|x| x / &c).collect();
    let (_, rem) = qdivmod(&inv, m);
    Some(rem)
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        self.den == other.den && self.num == other.num
    }
}

impl Eq for CycNumber {}

impl Hash for CycNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (i, &c) in self.num.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            });
        }
        let body = terms.join(" + ");
        let n = self.field.as_ref().map_or(String::new(), |f| format!(" [N={}]", f.modulus));
        if self.den == 1 {
            write!(f, "{body}{n}")
        } else {
            write!(f, "({body})/{}{n}", self.den)
        }
    }
}

impl Zero for CycNumber {
    fn zero() -> Self {
        CycNumber {
            field: None,
            num: vec![],
            den: 1,
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

impl One for CycNumber {
    fn one() -> Self {
        CycNumber {
            field: None,
            num: vec![1],
            den: 1,
        }
    }
}

impl Signed for CycNumber {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn abs_sub(&self, other: &Self) -> Self {
        let d = self - other;
        if d.is_negative() {
            CycNumber::zero()
        } else {
            d
        }
    }
    fn signum(&self) -> Self {
        if self.is_zero() {
            CycNumber::zero()
        } else if self.is_negative() {
            CycNumber::integer(-1)
        } else {
            CycNumber::one()
        }
    }
    fn is_positive(&self) -> bool {
        !self.is_zero() && self.to_f64() > 0.0
    }
    fn is_negative(&self) -> bool {
        !self.is_zero() && self.to_f64() < 0.0
    }
}

impl num_traits::Num for CycNumber {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        i64::from_str_radix(s, radix).map(CycNumber::integer).map_err(|_| ())
    }
}

impl std::ops::Div for CycNumber {
    type Output = CycNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: CycNumber) -> CycNumber {
        &self * &rhs.inverse().expect("division by zero")
    }
}

impl std::ops::Rem for CycNumber {
    type Output = CycNumber;
    /// Field elements have no nontrivial remainder.
    fn rem(self, _rhs: CycNumber) -> CycNumber {
        CycNumber::zero()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a CycNumber> for &'a CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: &'a CycNumber) -> CycNumber {
                $body(self, rhs)
            }
        }
        impl $tr for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: CycNumber) -> CycNumber {
                $body(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycNumber, b: &CycNumber| a.add_signed(b, 1));
binop!(Sub, sub, |a: &CycNumber, b: &CycNumber| a.add_signed(b, -1));
binop!(Mul, mul, |a: &CycNumber, b: &CycNumber| a.mul_ref(b));

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(mut self) -> CycNumber {
        for c in &mut self.num {
            *c = -*c;
        }
        self
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(120).len() - 1, 32);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).contains(&-2));
    }

    #[test]
    fn embedding_identities() {
        let f = CyclotomicField::new(60);
        assert!(f.two_cos_pi_over(2).is_zero());
        assert_eq!(f.two_cos_pi_over(3), CycNumber::one());
        let g = f.two_cos_pi_over(5);
        assert_eq!(&g * &g, &g + &CycNumber::one());
        let h = f.two_cos_pi_over(6);
        assert_eq!(&h * &h, CycNumber::integer(3));
        assert!((g.to_f64() - 2.0 * (std::f64::consts::PI / 5.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn cos_pi_over_five_minimal_polynomial() {
        let f = CyclotomicField::new(10);
        let b = -(&f.two_cos_pi_over(5) * &CycNumber::ratio(1, 2));
        let lhs = &(&CycNumber::integer(4) * &(&b * &b)) + &(&CycNumber::integer(2) * &b);
        assert_eq!(lhs, CycNumber::one());
    }

    #[test]
    fn inverse_round_trip() {
        let f = CyclotomicField::new(24);
        let x = &f.two_cos_pi_over(12) + &CycNumber::ratio(3, 7);
        let y = x.inverse().unwrap();
        assert_eq!(&x * &y, CycNumber::one());
        assert!(CycNumber::zero().inverse().is_none());
        assert_eq!(CycNumber::ratio(2, 3).inverse(), Some(CycNumber::ratio(3, 2)));
    }

    #[test]
    fn dot_matches_sum_of_products() {
        let f = CyclotomicField::new(20);
        let a = [f.two_cos_pi_over(5), CycNumber::ratio(1, 2), f.zeta_pow(3)];
        let b = [f.two_cos_pi_over(10), f.zeta_pow(7), CycNumber::ratio(-3, 4)];
        let direct = a
            .iter()
            .zip(&b)
            .fold(CycNumber::zero(), |s, (x, y)| &s + &(x * y));
        assert_eq!(CycNumber::dot(a.iter().zip(&b)), direct);
    }

    #[test]
    fn modulus_cap() {
        assert!(CyclotomicField::for_labels(&[4, 5, 6], 120).is_ok());
        assert_eq!(CyclotomicField::for_labels(&[7, 8], 120).unwrap().modulus(), 112);
        assert!(matches!(
            CyclotomicField::for_labels(&[5, 7], 120),
            Err(OracleError::ModulusTooLarge { modulus: 140, .. })
        ));
        assert!(matches!(
            CyclotomicField::for_labels(&[5, 7, 8], 120),
            Err(OracleError::ModulusTooLarge { modulus: 560, .. })
        ));
        assert_eq!(CyclotomicField::for_labels(&[], 120).unwrap().modulus(), 4);
    }
}
