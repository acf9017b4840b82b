//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! A [`CycloNum`] stores its value in the power basis `1, x, …, x^{φ(n)-1}` of
//! `Q[x]/(Φ_n(x))`, where `x ↦ ζ_n = e^{2πi/n}`. After every operation the value
//! is deflated to the smallest conductor whose field contains it, so two
//! values are equal exactly when their conductors and coefficient vectors are.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("E({root}) does not lie in Q(zeta_{conductor})")]
    ConductorMismatch { root: u32, conductor: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {0} is not rational")]
    NotRational(String),
    #[error("conductor must be positive")]
    ZeroConductor,
}

/// An element of the cyclotomic field `Q(ζ_n)` in canonical power-basis form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNum {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

/// The four field operations, for callers that dispatch on an operator value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(op: ArithOp, a: &CycloNum, b: &CycloNum) -> Result<CycloNum, CycloError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

pub fn totient(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

type Matrix = Vec<Vec<BigRational>>;

fn poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn descent_cache() -> &'static Mutex<HashMap<(u32, u32), Arc<Matrix>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Matrix>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of `Φ_n`, lowest degree first. The polynomial is monic
/// of degree `φ(n)`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = exact_poly_div(&num, &div);
        }
    }
    let arc = Arc::new(num);
    poly_cache().lock().unwrap().insert(n, arc.clone());
    arc
}

fn exact_poly_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = rem.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Reduces a polynomial in `ζ_n` given by arbitrary exponents (already folded
/// into `0..n`) modulo `Φ_n`.
fn reduce(mut poly: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = totient(n) as usize;
    let cyc = cyclotomic_polynomial(n);
    for top in (phi..poly.len()).rev() {
        if poly[top].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut poly[top], BigRational::zero());
        let base = top - phi;
        for (j, k) in cyc.iter().enumerate().take(phi) {
            if !k.is_zero() {
                poly[base + j] -= &c * BigRational::from_integer(k.clone());
            }
        }
    }
    poly.truncate(phi);
    poly.resize(phi, BigRational::zero());
    poly
}

/// Map of exponent `i` to exponent `(i * k) mod n` applied to a reduced vector.
fn substitute(coeffs: &[BigRational], n: u32, k: u64) -> Vec<BigRational> {
    let mut poly = vec![BigRational::zero(); n as usize];
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let e = ((i as u64 * k) % n as u64) as usize;
            poly[e] += c;
        }
    }
    reduce(poly, n)
}

fn lift_coeffs(coeffs: &[BigRational], from: u32, to: u32) -> Vec<BigRational> {
    if from == to {
        return coeffs.to_vec();
    }
    debug_assert_eq!(to % from, 0);
    let step = (to / from) as usize;
    let mut poly = vec![BigRational::zero(); to as usize];
    for (i, c) in coeffs.iter().enumerate() {
        poly[i * step] = c.clone();
    }
    reduce(poly, to)
}

/// Returns a matrix `E` with `E · L = [I; 0]` where `L` is the lift matrix from
/// `Q(ζ_small)` into `Q(ζ_big)`. Applying `E` to a big-field vector yields the
/// small-field coordinates in the first `φ(small)` rows and zeros in the rest
/// exactly when the value lies in the subfield.
fn descent_matrix(big: u32, small: u32) -> Arc<Matrix> {
    if let Some(m) = descent_cache().lock().unwrap().get(&(big, small)) {
        return m.clone();
    }
    let nb = totient(big) as usize;
    let ns = totient(small) as usize;
    let mut basis_lift: Matrix = vec![vec![BigRational::zero(); ns]; nb];
    for i in 0..ns {
        let mut e = vec![BigRational::zero(); ns];
        e[i] = BigRational::one();
        let col = lift_coeffs(&e, small, big);
        for r in 0..nb {
            basis_lift[r][i] = col[r].clone();
        }
    }
    // Row-reduce [L | I] and keep the accumulated row operations.
    let mut ops: Matrix = (0..nb)
        .map(|r| {
            let mut row = vec![BigRational::zero(); nb];
            row[r] = BigRational::one();
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..ns {
        let Some(p) = (pivot_row..nb).find(|&r| !basis_lift[r][col].is_zero()) else {
            unreachable!("lift matrix has full column rank");
        };
        basis_lift.swap(pivot_row, p);
        ops.swap(pivot_row, p);
        let inv = basis_lift[pivot_row][col].recip();
        for x in basis_lift[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for x in ops[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nb {
            if r != pivot_row && !basis_lift[r][col].is_zero() {
                let f = basis_lift[r][col].clone();
                for c in 0..ns {
                    let t = &f * &basis_lift[pivot_row][c];
                    basis_lift[r][c] -= t;
                }
                for c in 0..nb {
                    let t = &f * &ops[pivot_row][c];
                    ops[r][c] -= t;
                }
            }
        }
        pivot_row += 1;
    }
    let arc = Arc::new(ops);
    descent_cache()
        .lock()
        .unwrap()
        .insert((big, small), arc.clone());
    arc
}

fn try_descend(coeffs: &[BigRational], big: u32, small: u32) -> Option<Vec<BigRational>> {
    let ns = totient(small) as usize;
    let e = descent_matrix(big, small);
    let mut out = Vec::with_capacity(ns);
    for (r, row) in e.iter().enumerate() {
        let mut acc = BigRational::zero();
        for (a, b) in row.iter().zip(coeffs) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        if r < ns {
            out.push(acc);
        } else if !acc.is_zero() {
            return None;
        }
    }
    Some(out)
}

impl CycloNum {
    fn from_parts(conductor: u32, coeffs: Vec<BigRational>) -> CycloNum {
        let mut v = CycloNum { conductor, coeffs };
        v.deflate();
        v
    }

    pub fn zero() -> CycloNum {
        CycloNum::rational(BigRational::zero())
    }

    pub fn one() -> CycloNum {
        CycloNum::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> CycloNum {
        CycloNum {
            conductor: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_int(v: i64) -> CycloNum {
        CycloNum::rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ_n^k`, i.e. `E(n)^k`.
    pub fn root_of_unity(n: u32, k: i64) -> CycloNum {
        assert!(n > 0, "conductor must be positive");
        let e = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![BigRational::zero(); n as usize];
        poly[e] = BigRational::one();
        CycloNum::from_parts(n, reduce(poly, n))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn to_rational(&self) -> Result<BigRational, CycloError> {
        if self.is_rational() {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CycloError::NotRational(self.to_string()))
        }
    }

    /// The value as an exact integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        let q = self.to_rational().ok()?;
        q.is_integer().then(|| q.to_integer())
    }

    /// Coordinates of this value in `Q(ζ_m)`; `m` must be a multiple of the
    /// conductor.
    pub fn lifted_coeffs(&self, m: u32) -> Vec<BigRational> {
        assert_eq!(m % self.conductor, 0, "lift target must be a multiple");
        lift_coeffs(&self.coeffs, self.conductor, m)
    }

    fn deflate(&mut self) {
        loop {
            let n = self.conductor;
            if n == 1 {
                return;
            }
            if self.coeffs.iter().skip(1).all(Zero::is_zero) {
                self.conductor = 1;
                self.coeffs.truncate(1);
                return;
            }
            let mut moved = false;
            for p in prime_factors(n as u64) {
                let m = n / p as u32;
                if let Some(c) = try_descend(&self.coeffs, n, m) {
                    self.conductor = m;
                    self.coeffs = c;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return;
            }
        }
    }

    /// Applies the field automorphism `ζ ↦ ζ^k`; `k` must be coprime to the
    /// conductor.
    pub fn galois(&self, k: i64) -> CycloNum {
        let n = self.conductor;
        let k = k.rem_euclid(n as i64) as u64;
        assert_eq!(
            (k as u32).gcd(&n),
            1,
            "Galois exponent must be coprime to the conductor"
        );
        CycloNum::from_parts(n, substitute(&self.coeffs, n, k))
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conjugate(&self) -> CycloNum {
        self.galois(-1)
    }

    pub fn checked_div(&self, rhs: &CycloNum) -> Result<CycloNum, CycloError> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn inverse(&self) -> Result<CycloNum, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(CycloNum::rational(self.coeffs[0].recip()));
        }
        // Solve (multiplication by self) · y = 1 over the power basis.
        let n = self.conductor;
        let phi = self.coeffs.len();
        let mut m: Matrix = vec![vec![BigRational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let mut poly = vec![BigRational::zero(); n as usize];
            for (i, c) in self.coeffs.iter().enumerate() {
                poly[(i + j) % n as usize] += c;
            }
            let col = reduce(poly, n);
            for r in 0..phi {
                m[r][j] = col[r].clone();
            }
        }
        m[0][phi] = BigRational::one();
        for col in 0..phi {
            let p = (col..phi)
                .find(|&r| !m[r][col].is_zero())
                .expect("nonzero field element has an invertible multiplication matrix");
            m.swap(col, p);
            let inv = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..phi {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..=phi {
                        let t = &f * &m[col][c];
                        m[r][c] -= t;
                    }
                }
            }
        }
        let y = m.into_iter().map(|row| row[phi].clone()).collect();
        Ok(CycloNum::from_parts(n, y))
    }

    fn binary(&self, rhs: &CycloNum, f: impl Fn(&mut BigRational, &BigRational)) -> CycloNum {
        let n = lcm(self.conductor, rhs.conductor);
        let mut a = self.lifted_coeffs(n);
        let b = rhs.lifted_coeffs(n);
        for (x, y) in a.iter_mut().zip(&b) {
            f(x, y);
        }
        CycloNum::from_parts(n, a)
    }

    fn multiply(&self, rhs: &CycloNum) -> CycloNum {
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        let n = lcm(self.conductor, rhs.conductor);
        let a = self.lifted_coeffs(n);
        let b = rhs.lifted_coeffs(n);
        let mut poly = vec![BigRational::zero(); n as usize];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    poly[(i + j) % n as usize] += x * y;
                }
            }
        }
        CycloNum::from_parts(n, reduce(poly, n))
    }

    pub fn scale(&self, q: &BigRational) -> CycloNum {
        if q.is_zero() {
            return CycloNum::zero();
        }
        CycloNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Parses `expr` and checks that every root of unity in it embeds in
    /// `Q(ζ_conductor)`.
    pub fn parse(expr: &str, conductor: u32) -> Result<CycloNum, CycloError> {
        if conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let mut p = Parser {
            src: expr.as_bytes(),
            pos: 0,
            conductor: Some(conductor),
        };
        p.parse_all()
    }

    /// Parses `expr` in whatever field its roots of unity generate.
    pub fn parse_any(expr: &str) -> Result<CycloNum, CycloError> {
        let mut p = Parser {
            src: expr.as_bytes(),
            pos: 0,
            conductor: None,
        };
        p.parse_all()
    }

    /// Approximate complex value, for display and diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let t = std::f64::consts::TAU * i as f64 / n;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }
}

impl FromStr for CycloNum {
    type Err = CycloError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CycloNum::parse_any(s)
    }
}

impl From<i64> for CycloNum {
    fn from(v: i64) -> Self {
        CycloNum::from_int(v)
    }
}

impl From<BigRational> for CycloNum {
    fn from(q: BigRational) -> Self {
        CycloNum::rational(q)
    }
}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        self.binary(rhs, |x, y| *x += y)
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self.binary(rhs, |x, y| *x -= y)
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        self.multiply(rhs)
    }
}

/// Panics on division by zero; use [`CycloNum::checked_div`] otherwise.
impl Div for &CycloNum {
    type Output = CycloNum;
    fn div(self, rhs: &CycloNum) -> CycloNum {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl std::iter::Sum for CycloNum {
    fn sum<I: Iterator<Item = CycloNum>>(iter: I) -> CycloNum {
        iter.fold(CycloNum::zero(), |a, b| &a + &b)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serializes in the same grammar [`CycloNum::parse`] accepts: the constant
/// term first, then `c*E(n)^i` in increasing `i`.
impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.conductor;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let root = match i {
                0 => String::new(),
                1 => format!("E({n})"),
                _ => format!("E({n})^{i}"),
            };
            if first {
                if root.is_empty() {
                    write!(f, "{}", fmt_rational(c))?;
                } else if c.is_one() {
                    write!(f, "{root}")?;
                } else {
                    write!(f, "{}*{root}", fmt_rational(c))?;
                }
                first = false;
                continue;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let a = c.abs();
            if root.is_empty() {
                write!(f, "{sign}{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{sign}{root}")?;
            } else {
                write!(f, "{sign}{}*{root}", fmt_rational(&a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum({self})")
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    conductor: Option<u32>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CycloError> {
        Err(CycloError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), CycloError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn parse_all(&mut self) -> Result<CycloNum, CycloError> {
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        let v = self.value()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        if let Some(n) = self.conductor {
            // Only a sanity check: the value is already canonical.
            let ok = n % v.conductor == 0 || (n % 2 == 1 && (2 * n) % v.conductor == 0);
            if !ok {
                return Err(CycloError::ConductorMismatch {
                    root: v.conductor,
                    conductor: n,
                });
            }
        }
        Ok(v)
    }

    fn value(&mut self) -> Result<CycloNum, CycloError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CycloNum, CycloError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CycloNum, CycloError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.value()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b'E') => self.root(),
            Some(b'-') => {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_digit() => Ok(-self.rational()?),
                    // Leading minus on a root or group, as in `-E(5)`.
                    _ => Ok(-self.factor()?),
                }
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(_) => self.err("expected a number, E(n) or '('"),
            None => self.err("unexpected end of input"),
        }
    }

    fn int(&mut self) -> Result<BigInt, CycloError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_int(&mut self) -> Result<i64, CycloError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let v = self.int()?;
        match v.to_i64() {
            Some(x) => Ok(if neg { -x } else { x }),
            None => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn rational(&mut self) -> Result<CycloNum, CycloError> {
        let num = self.int()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.int()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            return Ok(CycloNum::rational(BigRational::new(num, den)));
        }
        Ok(CycloNum::rational(BigRational::from_integer(num)))
    }

    fn root(&mut self) -> Result<CycloNum, CycloError> {
        self.pos += 1;
        self.expect(b'(')?;
        let at = self.pos;
        let n = self.small_int()?;
        if n <= 0 || n > u32::MAX as i64 {
            self.pos = at;
            return self.err("root order must be positive");
        }
        let n = n as u32;
        self.expect(b')')?;
        let k = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.small_int()?
        } else {
            1
        };
        if let Some(c) = self.conductor {
            let ok = c % n == 0 || (c % 2 == 1 && (2 * c) % n == 0);
            if !ok {
                return Err(CycloError::ConductorMismatch {
                    root: n,
                    conductor: c,
                });
            }
        }
        Ok(CycloNum::root_of_unity(n, k))
    }
}
