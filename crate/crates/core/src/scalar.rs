use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficient field Q(w), w a fixed primitive root of unity of `order`.
/// Values are coordinate vectors of length phi(order) reduced modulo the
/// cyclotomic polynomial, so equality of coordinates is equality in the
/// field and rendering is canonical.
pub struct FieldCtx {
    order: u32,
    degree: usize,
    /// Monic, ascending coefficients, length `degree + 1`.
    modulus: Vec<Rat>,
    /// Reduced coordinates of w^k for k in 0..order.
    root_powers: Vec<Vec<Rat>>,
}

static CTX_CACHE: Lazy<Mutex<HashMap<u32, Arc<FieldCtx>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl FieldCtx {
    pub fn get(order: u32) -> Arc<FieldCtx> {
        assert!(order >= 1, "field order must be positive");
        let mut cache = CTX_CACHE.lock().unwrap();
        cache
            .entry(order)
            .or_insert_with(|| Arc::new(FieldCtx::build(order)))
            .clone()
    }

    fn build(order: u32) -> FieldCtx {
        let modulus: Vec<Rat> = cyclotomic(order)
            .into_iter()
            .map(|c| Rat::from_integer(c))
            .collect();
        let degree = modulus.len() - 1;
        let mut root_powers = Vec::with_capacity(order as usize);
        for k in 0..order {
            let mut poly = vec![Rat::zero(); k as usize + 1];
            poly[k as usize] = Rat::one();
            root_powers.push(reduce(&poly, &modulus, degree));
        }
        FieldCtx {
            order,
            degree,
            modulus,
            root_powers,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(order={})", self.order)
    }
}

/// Cyclotomic polynomial of order `n` via Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d,
/// ascending integer coefficients.
fn cyclotomic(n: u32) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = int_poly_div_exact(&num, &cyclotomic(d));
        }
    }
    num
}

/// Exact division of integer polynomials; the divisor is monic and the
/// division is known to leave no remainder.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one() && dn >= dd);
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[k + j] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Remainder of `poly` modulo the monic `modulus`, padded to `degree` coordinates.
fn reduce(poly: &[Rat], modulus: &[Rat], degree: usize) -> Vec<Rat> {
    let mut rem = poly.to_vec();
    while rem.len() > degree {
        let top = rem.len() - 1;
        let c = rem[top].clone();
        if !c.is_zero() {
            let shift = top - degree;
            for j in 0..degree {
                let t = &modulus[j] * &c;
                rem[shift + j] -= t;
            }
        }
        rem.pop();
    }
    rem.resize(degree, Rat::zero());
    rem
}

/// An element of Q(w) held as reduced coordinates over its shared field context.
#[derive(Clone)]
pub struct Scalar {
    ctx: Arc<FieldCtx>,
    coords: Vec<Rat>,
}

impl Scalar {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Scalar {
        Scalar {
            ctx: ctx.clone(),
            coords: vec![Rat::zero(); ctx.degree],
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Scalar {
        Scalar::from_rat(ctx, Rat::one())
    }

    pub fn from_rat(ctx: &Arc<FieldCtx>, r: Rat) -> Scalar {
        let mut coords = vec![Rat::zero(); ctx.degree];
        coords[0] = r;
        Scalar {
            ctx: ctx.clone(),
            coords,
        }
    }

    pub fn from_i64(ctx: &Arc<FieldCtx>, n: i64) -> Scalar {
        Scalar::from_rat(ctx, Rat::from_integer(BigInt::from(n)))
    }

    /// w^k, with k taken modulo the field order.
    pub fn root_pow(ctx: &Arc<FieldCtx>, k: i64) -> Scalar {
        let order = ctx.order as i64;
        let k = k.rem_euclid(order) as usize;
        Scalar {
            ctx: ctx.clone(),
            coords: ctx.root_powers[k].clone(),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        // Extended Euclid in Q[x] against the (irreducible) modulus: the gcd
        // is a nonzero constant g with u * self + v * modulus = g.
        let (g, u) = poly_ext_gcd(&self.coords, &self.ctx.modulus);
        let ginv = Rat::one() / g;
        let scaled: Vec<Rat> = u.iter().map(|c| c * &ginv).collect();
        Some(Scalar {
            ctx: self.ctx.clone(),
            coords: reduce(&scaled, &self.ctx.modulus, self.ctx.degree),
        })
    }

    pub fn div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.inv().map(|i| self * &i)
    }

    fn assert_same_field(&self, rhs: &Scalar) {
        assert_eq!(
            self.ctx.order, rhs.ctx.order,
            "scalars from different fields"
        );
    }
}

/// (gcd normalized to a constant, cofactor of `a`): runs the Euclidean chain
/// until the remainder is constant; `b` (the modulus) is irreducible, so this
/// terminates with a nonzero constant for any nonzero `a` of lower degree.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Rat, Vec<Rat>) {
    let trim = |p: &[Rat]| -> Vec<Rat> {
        let mut v = p.to_vec();
        while v.len() > 1 && v.last().unwrap().is_zero() {
            v.pop();
        }
        v
    };
    let mut r0 = trim(b);
    let mut r1 = trim(a);
    let mut u0: Vec<Rat> = vec![Rat::zero()];
    let mut u1: Vec<Rat> = vec![Rat::one()];
    loop {
        if r1.len() == 1 {
            assert!(!r1[0].is_zero(), "inverse of zero divisor");
            return (r1[0].clone(), u1);
        }
        // r0 = q * r1 + r2 by long division
        let mut rem = r0.clone();
        let mut quot = vec![Rat::zero(); rem.len().saturating_sub(r1.len()) + 1];
        let lead = r1.last().unwrap().clone();
        while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0].is_zero()) {
            let k = rem.len() - r1.len();
            let c = rem.last().unwrap() / &lead;
            if !c.is_zero() {
                quot[k] = c.clone();
                for j in 0..r1.len() {
                    let t = &r1[j] * &c;
                    rem[k + j] -= t;
                }
            }
            while rem.len() > 1 && rem.last().unwrap().is_zero() {
                rem.pop();
            }
            if rem.len() < r1.len() {
                break;
            }
        }
        // u2 = u0 - q * u1
        let mut u2 = u0.clone();
        u2.resize(u2.len().max(quot.len() + u1.len() - 1), Rat::zero());
        for (i, q) in quot.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (j, u) in u1.iter().enumerate() {
                let t = q * u;
                u2[i + j] -= t;
            }
        }
        r0 = r1;
        r1 = trim(&rem);
        u0 = u1;
        u1 = u2;
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        self.assert_same_field(other);
        self.coords == other.coords
    }
}

impl Eq for Scalar {}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.assert_same_field(rhs);
        Scalar {
            ctx: self.ctx.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.assert_same_field(rhs);
        Scalar {
            ctx: self.ctx.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.assert_same_field(rhs);
        let d = self.ctx.degree;
        if d == 0 {
            return Scalar::zero(&self.ctx);
        }
        let mut prod = vec![Rat::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                prod[i + j] += t;
            }
        }
        Scalar {
            ctx: self.ctx.clone(),
            coords: reduce(&prod, &self.ctx.modulus, d),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let pow = |k: usize| -> String {
            if k == 1 {
                "w".to_string()
            } else {
                format!("w^{}", k)
            }
        };
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if k == 0 {
                    write!(f, "{}", c)?;
                } else if c.is_one() {
                    write!(f, "{}", pow(k))?;
                } else {
                    write!(f, "{}*{}", c, pow(k))?;
                }
                first = false;
            } else {
                let mag = c.abs();
                let sign = if c.is_negative() { " - " } else { " + " };
                if k == 0 {
                    write!(f, "{}{}", sign, mag)?;
                } else if mag.is_one() {
                    write!(f, "{}{}", sign, pow(k))?;
                } else {
                    write!(f, "{}{}*{}", sign, mag, pow(k))?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("scalar parse error at byte {pos}: {msg}")]
pub struct ScalarParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ScalarParseError> {
        Err(ScalarParseError {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn uint(&mut self) -> Result<BigInt, ScalarParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(text.parse::<BigInt>().unwrap())
    }

    /// rational := '-'? uint ('/' uint)?
    fn rational(&mut self) -> Result<Rat, ScalarParseError> {
        let neg = if self.peek() == Some(b'-') {
            self.bump();
            true
        } else {
            false
        };
        let numer = self.uint()?;
        let denom = if self.peek() == Some(b'/') {
            self.bump();
            let d = self.uint()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            d
        } else {
            BigInt::one()
        };
        let r = Rat::new(numer, denom);
        Ok(if neg { -r } else { r })
    }

    /// wpow := 'w' ('^' uint)?
    fn wpow(&mut self, ctx: &Arc<FieldCtx>) -> Result<Scalar, ScalarParseError> {
        if self.peek() != Some(b'w') {
            return self.err("expected 'w'");
        }
        self.bump();
        let exp = if self.peek() == Some(b'^') {
            self.bump();
            self.uint()?
        } else {
            BigInt::one()
        };
        let k = (&exp % BigInt::from(ctx.order)).to_string().parse::<i64>().unwrap();
        Ok(Scalar::root_pow(ctx, k))
    }

    /// term := (rational | wpow) ('*' wpow)*
    fn term(&mut self, ctx: &Arc<FieldCtx>) -> Result<Scalar, ScalarParseError> {
        let mut acc = match self.peek() {
            Some(b'w') => self.wpow(ctx)?,
            Some(b'-') | Some(b'0'..=b'9') => {
                let r = self.rational()?;
                Scalar::from_rat(ctx, r)
            }
            _ => return self.err("expected term"),
        };
        while self.peek() == Some(b'*') {
            self.bump();
            let p = self.wpow(ctx)?;
            acc = &acc * &p;
        }
        Ok(acc)
    }
}

/// Parses `scalar := term (('+'|'-') term)*` over the given field, with the
/// exact rendering of `Display` as a fixed point.
pub fn parse_scalar(ctx: &Arc<FieldCtx>, input: &str) -> Result<Scalar, ScalarParseError> {
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
    };
    let mut acc = p.term(ctx)?;
    loop {
        match p.peek() {
            Some(b'+') => {
                p.bump();
                let t = p.term(ctx)?;
                acc = &acc + &t;
            }
            Some(b'-') => {
                p.bump();
                let t = p.term(ctx)?;
                acc = &acc - &t;
            }
            None => return Ok(acc),
            _ => return p.err("expected '+', '-' or end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> Arc<FieldCtx> {
        FieldCtx::get(n)
    }

    #[test]
    fn rational_parse() {
        let c = ctx(1);
        let s = parse_scalar(&c, "1/2").unwrap();
        assert_eq!(s.as_rat(), Some(&rat(1, 2)));
        let s = parse_scalar(&c, "-3/6").unwrap();
        assert_eq!(s.as_rat(), Some(&rat(-1, 2)));
    }

    #[test]
    fn root_arithmetic_order_four() {
        // w^2 = -1 in Q(i)
        let c = ctx(4);
        let w = parse_scalar(&c, "w").unwrap();
        let sq = &w * &w;
        assert_eq!(sq, Scalar::from_i64(&c, -1));
        assert_eq!(parse_scalar(&c, "w*w").unwrap(), Scalar::from_i64(&c, -1));
        assert_eq!(parse_scalar(&c, "w^2").unwrap(), Scalar::from_i64(&c, -1));
    }

    #[test]
    fn cubic_root_relation() {
        // 1 + w + w^2 = 0 for order 3, so w^2 + 1 = -w
        let c = ctx(3);
        let lhs = parse_scalar(&c, "w^2+1").unwrap();
        let rhs = -parse_scalar(&c, "w").unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "-1*w");
    }

    #[test]
    fn inverse_round_trip() {
        let c = ctx(5);
        let s = parse_scalar(&c, "1/3*w^2 + w - 2").unwrap();
        let i = s.inv().unwrap();
        assert!((&s * &i).is_one());
        assert!(Scalar::zero(&c).inv().is_none());
    }

    #[test]
    fn render_parse_round_trip() {
        let c = ctx(6);
        for text in ["0", "1", "-1", "w", "-1*w", "2/3*w - 1/2", "w + 1"] {
            let s = parse_scalar(&c, text).unwrap();
            let again = parse_scalar(&c, &s.to_string()).unwrap();
            assert_eq!(s, again, "failed on {}", text);
        }
    }

    #[test]
    fn negative_bare_root_is_rejected() {
        // '-w' is not in the grammar; the sign lives inside the rational.
        let c = ctx(4);
        assert!(parse_scalar(&c, "-w").is_err());
        assert_eq!(parse_scalar(&c, "-1*w").unwrap(), -Scalar::root_pow(&c, 1));
    }

    #[test]
    fn exponent_reduction() {
        let c = ctx(4);
        assert_eq!(
            parse_scalar(&c, "w^7").unwrap(),
            parse_scalar(&c, "w^3").unwrap()
        );
    }

    #[test]
    fn order_one_and_two_collapse_to_rationals() {
        let c1 = ctx(1);
        assert_eq!(parse_scalar(&c1, "w").unwrap(), Scalar::one(&c1));
        let c2 = ctx(2);
        assert_eq!(parse_scalar(&c2, "w").unwrap(), Scalar::from_i64(&c2, -1));
    }
}
