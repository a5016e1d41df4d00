//! The affine group `Q_p ⋊ Q_p^×` acting on `T_{p+1}` through the cosets `y + p^{n+1}Z_p`,
//! at explicit finite precision.
//!
//! The string-model vertex at level `n` with digits `w_i` is the coset `Σ w_i p^i + p^{n+1}Z_p`,
//! so `ṽ_{-1} = Z_p` and `(0, p)` is the translation `x̃₀`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automata::{level_quotient, odometer};
use crate::corr::{build_labelling, extract_selfreplicating, CompatibleLabelling};
use crate::perm::PermGroup;
use crate::trees::{EdgeLabelling, TreeAction, UnrootedVertex, Window};
use crate::{Error, Result};

/// A `p`-adic number known modulo `p^precision`, or exactly when its expansion is finite.
///
/// Digits are little-endian from position `floor`; the value is `Σ digits[i] p^{floor+i}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPAdic")]
pub struct PAdicWindow {
    p: u32,
    floor: i64,
    digits: Vec<u8>,
    /// All digits above the stored ones are zero.
    #[serde(default)]
    exact: bool,
}

#[derive(Deserialize)]
struct RawPAdic {
    p: u32,
    floor: i64,
    digits: Vec<u8>,
    #[serde(default)]
    exact: bool,
}

impl TryFrom<RawPAdic> for PAdicWindow {
    type Error = Error;

    fn try_from(r: RawPAdic) -> Result<Self> {
        PAdicWindow::new(r.p, r.floor, r.digits, r.exact)
    }
}

fn check_prime(p: u32) -> Result<()> {
    let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime || p > 251 {
        return Err(Error::Invalid(format!("p = {p} must be a prime below 256")));
    }
    Ok(())
}

fn pow(p: u32, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e.max(0) as usize)
}

/// Little-endian base-`p` digits of `0 ≤ x < p^len`.
fn to_digits(p: u32, x: &BigInt, len: usize) -> Vec<u8> {
    let mut d = x.magnitude().to_radix_le(p);
    d.resize(len, 0);
    d
}

fn from_digits(p: u32, digits: &[u8]) -> BigInt {
    if digits.is_empty() {
        return BigInt::zero();
    }
    BigInt::from(BigUint::from_radix_le(digits, p).expect("digits below p"))
}

impl PAdicWindow {
    /// `exact` asserts that all digits above the given ones vanish; otherwise the value is known
    /// modulo `p^{floor + digits.len()}`.
    pub fn new(p: u32, floor: i64, digits: Vec<u8>, exact: bool) -> Result<Self> {
        check_prime(p)?;
        if let Some(&d) = digits.iter().find(|&&d| d as u32 >= p) {
            return Err(Error::Invalid(format!("digit {d} not below p = {p}")));
        }
        Ok(PAdicWindow { p, floor, digits, exact }.canonical())
    }

    fn canonical(mut self) -> Self {
        let lead = self.digits.iter().take_while(|&&d| d == 0).count();
        self.digits.drain(..lead);
        self.floor += lead as i64;
        if self.exact {
            while self.digits.last() == Some(&0) {
                self.digits.pop();
            }
            if self.digits.is_empty() {
                self.floor = 0;
            }
        }
        self
    }

    /// `p^e · x`, reduced modulo `p^precision` unless `precision` is `None`.
    fn from_scaled(p: u32, e: i64, x: BigInt, precision: Option<i64>) -> Self {
        match precision {
            None => {
                debug_assert!(!x.is_negative());
                let len = x.magnitude().to_radix_le(p).len();
                PAdicWindow {
                    p,
                    floor: e,
                    digits: if x.is_zero() { Vec::new() } else { to_digits(p, &x, len) },
                    exact: true,
                }
                .canonical()
            }
            Some(prec) => {
                let len = (prec - e).max(0);
                let m = pow(p, len);
                let r = ((x % &m) + &m) % &m;
                PAdicWindow {
                    p,
                    floor: e.min(prec),
                    digits: to_digits(p, &r, len as usize),
                    exact: false,
                }
                .canonical()
            }
        }
    }

    /// The non-negative integer `x`, exactly.
    pub fn exact_integer(p: u32, x: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self::from_scaled(p, 0, BigInt::from(x), None))
    }

    /// The integer `x` modulo `p^precision`.
    pub fn from_bigint(p: u32, x: &BigInt, precision: i64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self::from_scaled(p, 0, x.clone(), Some(precision)))
    }

    /// `num / den` modulo `p^precision`; exact when `num ≥ 0` and `den` is a power of `p`.
    pub fn from_rational(p: u32, num: i64, den: i64, precision: i64) -> Result<Self> {
        check_prime(p)?;
        if den == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let mut e = 0i64;
        while den % p as i64 == 0 {
            den /= p as i64;
            e -= 1;
        }
        while num != 0 && num % p as i64 == 0 {
            num /= p as i64;
            e += 1;
        }
        if den == 1 && num >= 0 {
            return Ok(Self::from_scaled(p, e, BigInt::from(num), None));
        }
        let m = pow(p, precision - e);
        let inv = BigInt::from(den)
            .modinv(&m)
            .ok_or_else(|| Error::Invalid(format!("{den} is not invertible mod {p}")))?;
        Ok(Self::from_scaled(p, e, BigInt::from(num) * inv, Some(precision)))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Absolute precision: the value is known modulo `p^precision`; `None` when exact.
    pub fn precision(&self) -> Option<i64> {
        (!self.exact).then(|| self.floor + self.digits.len() as i64)
    }

    /// The digit at position `i`.
    pub fn digit(&self, i: i64) -> Result<u8> {
        if let Some(prec) = self.precision() {
            if i >= prec {
                return Err(Error::Precision(format!("digit {i} of {self} is not known")));
            }
        }
        if i < self.floor {
            return Ok(0);
        }
        Ok(self.digits.get((i - self.floor) as usize).copied().unwrap_or(0))
    }

    /// The valuation, `None` for exact zero; fails when every known digit is zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if !self.digits.is_empty() {
            Ok(Some(self.floor))
        } else if self.exact {
            Ok(None)
        } else {
            Err(Error::Precision(format!("{self} is zero to its precision")))
        }
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.valuation()? == Some(0))
    }

    /// The integer `X` with `self ≡ p^e X (mod p^top)` and `0 ≤ X < p^{top-e}`.
    fn scaled(&self, e: i64, top: i64) -> Result<BigInt> {
        if top <= e {
            return Ok(BigInt::zero());
        }
        if let Some(prec) = self.precision() {
            if prec < top {
                return Err(Error::Precision(format!("{self} is needed modulo {}^{top}", self.p)));
            }
        }
        if self.floor < e && !self.digits.is_empty() {
            return Err(Error::Invalid(format!("{self} has digits below position {e}")));
        }
        let digits: Vec<u8> = (e..top).map(|i| self.digit(i).expect("within precision")).collect();
        Ok(from_digits(self.p, &digits))
    }

    fn same_prime(&self, other: &PAdicWindow) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Invalid(format!("primes {} and {} differ", self.p, other.p)));
        }
        Ok(())
    }

    fn parts(&self) -> (i64, BigInt) {
        (self.floor, from_digits(self.p, &self.digits))
    }

    pub fn add(&self, other: &PAdicWindow) -> Result<PAdicWindow> {
        self.same_prime(other)?;
        let ((f1, x1), (f2, x2)) = (self.parts(), other.parts());
        let e = f1.min(f2);
        let x = x1 * pow(self.p, f1 - e) + x2 * pow(self.p, f2 - e);
        let prec = match (self.precision(), other.precision()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        };
        Ok(Self::from_scaled(self.p, e, x, prec))
    }

    pub fn mul(&self, other: &PAdicWindow) -> Result<PAdicWindow> {
        self.same_prime(other)?;
        let ((f1, x1), (f2, x2)) = (self.parts(), other.parts());
        // an error of valuation P in one factor costs valuation `floor + P` in the product
        let prec = match (self.precision(), other.precision()) {
            (None, None) => None,
            (a, b) => Some(
                b.map_or(i64::MAX, |p2| f1 + p2)
                    .min(a.map_or(i64::MAX, |p1| f2 + p1)),
            ),
        };
        let e = f1 + f2;
        Ok(match prec {
            Some(prec) if prec <= e => Self::from_scaled(self.p, prec, BigInt::zero(), Some(prec)),
            _ => Self::from_scaled(self.p, e, x1 * x2, prec),
        })
    }

    /// `-self`; an exact nonzero value has an infinite expansion, so it is cut at `precision`.
    pub fn neg(&self, precision: i64) -> PAdicWindow {
        let (f, x) = self.parts();
        if x.is_zero() && self.exact {
            return self.clone();
        }
        let prec = self.precision().map_or(precision, |p| p.min(precision));
        if prec <= f {
            return Self::from_scaled(self.p, prec, BigInt::zero(), Some(prec));
        }
        Self::from_scaled(self.p, f, -x, Some(prec))
    }

    /// The unit `u` and valuation `k` with `self = p^k u`.
    fn split_unit(&self) -> Result<(i64, PAdicWindow)> {
        let k = self
            .valuation()?
            .ok_or_else(|| Error::Invalid("the multiplier must be nonzero".into()))?;
        Ok((
            k,
            PAdicWindow {
                floor: 0,
                ..self.clone()
            },
        ))
    }
}

impl fmt::Display for PAdicWindow {
    /// `…d_k ⋯ d_0 . d_{-1} ⋯@p`, most significant digit first; `…` marks a truncated value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = match self.precision() {
            Some(prec) => prec - 1,
            None => (self.floor + self.digits.len() as i64 - 1).max(0),
        };
        let lo = self.floor.min(0);
        let mut parts = Vec::new();
        if !self.exact {
            parts.push("…".to_string());
        }
        for i in (lo..=hi.max(lo)).rev() {
            if i == -1 {
                parts.push(".".to_string());
            }
            parts.push(self.digit(i).map_or("?".to_string(), |d| d.to_string()));
        }
        write!(f, "{}@{}", parts.join(" "), self.p)
    }
}

impl fmt::Debug for PAdicWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PAdicWindow {
    type Err = Error;

    /// Parses `[…] d_k ⋯ d_0 [. d_{-1} ⋯]@p`; a leading `…` or `...` marks the value as known
    /// only to the digits written.
    fn from_str(text: &str) -> Result<Self> {
        let (body, p) = text
            .trim()
            .rsplit_once('@')
            .ok_or_else(|| Error::Invalid(format!("expected digits@p, got {text:?}")))?;
        let p: u32 = p
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad prime in {text:?}")))?;
        let mut body = body.trim();
        let mut exact = true;
        for prefix in ["…", "..."] {
            if let Some(rest) = body.strip_prefix(prefix) {
                body = rest.trim_start();
                exact = false;
            }
        }
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        let parse = |s: &str| -> Result<Vec<u8>> {
            let tokens: Vec<&str> = if s.contains(char::is_whitespace) || p > 10 {
                s.split_whitespace().collect()
            } else {
                s.split("").filter(|t| !t.is_empty()).collect()
            };
            tokens
                .iter()
                .map(|t| t.parse::<u8>().map_err(|_| Error::Invalid(format!("bad digit {t:?}"))))
                .collect()
        };
        let int = parse(int)?;
        let frac = parse(frac)?;
        let floor = -(frac.len() as i64);
        let digits: Vec<u8> = frac.iter().rev().chain(int.iter().rev()).copied().collect();
        PAdicWindow::new(p, floor, digits, exact)
    }
}

/// The vertex `y + p^{n+1}Z_p`, with `y` the canonical representative whose digits sit at
/// positions at most `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicVertex {
    pub level: i64,
    pub center: PAdicWindow,
}

impl PAdicVertex {
    /// The coset `y + p^{level+1}Z_p`; `y` must be known to that precision.
    pub fn new(y: &PAdicWindow, level: i64) -> Result<Self> {
        let floor = y.floor.min(level + 1);
        let x = y.scaled(floor, level + 1)?;
        Ok(PAdicVertex {
            level,
            center: PAdicWindow::from_scaled(y.p, floor, x, None),
        })
    }

    pub fn from_unrooted(v: &UnrootedVertex) -> Result<Self> {
        Ok(PAdicVertex {
            level: v.level(),
            center: PAdicWindow::new(v.q() as u32, v.lowest_position(), v.digits().to_vec(), true)?,
        })
    }

    pub fn to_unrooted(&self) -> UnrootedVertex {
        let digits = (self.center.floor..=self.level)
            .map(|i| self.center.digit(i).expect("exact"))
            .collect();
        UnrootedVertex::from_parts(self.center.p as usize, self.level, digits)
    }
}

impl fmt::Display for PAdicVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.center.p;
        write!(f, "{} + {p}^{}Z_{p}", self.center, self.level + 1)
    }
}

impl fmt::Debug for PAdicVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The affine map `y ↦ b + a y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement {
    pub b: PAdicWindow,
    pub a: PAdicWindow,
    k: i64,
    unit: PAdicWindow,
}

impl AffineElement {
    pub fn new(b: PAdicWindow, a: PAdicWindow) -> Result<Self> {
        b.same_prime(&a)?;
        let (k, unit) = a.split_unit()?;
        Ok(AffineElement { b, a, k, unit })
    }

    /// `(b, a)` for integers `b ≥ 0` and `a > 0`, exactly.
    pub fn integers(p: u32, b: u64, a: u64) -> Result<Self> {
        Self::new(PAdicWindow::exact_integer(p, b)?, PAdicWindow::exact_integer(p, a)?)
    }

    pub fn p(&self) -> u32 {
        self.b.p
    }

    /// Valuation of `a`, the translation length along the spine.
    pub fn shift(&self) -> i64 {
        self.k
    }

    /// `(b₁, a₁)(b₂, a₂) = (b₁ + a₁b₂, a₁a₂)`.
    pub fn compose(&self, other: &AffineElement) -> Result<AffineElement> {
        AffineElement::new(self.b.add(&self.a.mul(&other.b)?)?, self.a.mul(&other.a)?)
    }

    /// `(b + a y) + a p^{n+1}Z_p` for the vertex `y + p^{n+1}Z_p`.
    pub fn apply(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        let p = self.p();
        let (n, l) = (v.level(), v.lowest_position());
        let top = n + self.k + 1;
        let b_floor = if self.b.digits.is_empty() { top } else { self.b.floor };
        let e = (l + self.k).min(b_floor).min(top);
        let mut z = self.b.scaled(e, top)?;
        if !v.is_spine() {
            let y = from_digits(p, v.digits());
            let u = self.unit.scaled(0, n + 1 - l)?;
            z += u * y * pow(p, l + self.k - e);
        }
        let z = z % pow(p, top - e);
        Ok(UnrootedVertex::from_parts(p as usize, top - 1, to_digits(p, &z, (top - e) as usize)))
    }

    /// `a^{-1}(w - b) + p^{m-k+1}Z_p` for the vertex `w + p^{m+1}Z_p`.
    pub fn apply_inverse(&self, w: &UnrootedVertex) -> Result<UnrootedVertex> {
        let p = self.p();
        let (m, l) = (w.level(), w.lowest_position());
        let top = m + 1;
        let b_floor = if self.b.digits.is_empty() { top } else { self.b.floor };
        let e = l.min(b_floor).min(top);
        let modulus = pow(p, top - e);
        let t = from_digits(p, w.digits()) * pow(p, l - e) - self.b.scaled(e, top)?;
        let u = self.unit.scaled(0, top - e)?;
        let y = if top == e {
            BigInt::zero()
        } else {
            let inv = u.modinv(&modulus).expect("units are invertible");
            ((t * inv) % &modulus + &modulus) % &modulus
        };
        Ok(UnrootedVertex::from_parts(p as usize, m - self.k, to_digits(p, &y, (top - e) as usize)))
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b, self.a)
    }
}

impl TreeAction for AffineElement {
    fn q(&self) -> usize {
        self.p() as usize
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        self.apply(v)
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        self.apply_inverse(v)
    }
}

/// `(b, a).(y + p^{n+1}Z_p) = (b + a y) + a p^{n+1}Z_p`.
pub fn affine_act(b: &PAdicWindow, a: &PAdicWindow, v: &PAdicVertex) -> Result<PAdicVertex> {
    PAdicVertex::from_unrooted(&AffineElement::new(b.clone(), a.clone())?.apply(&v.to_unrooted())?)
}

/// The transversal `x_i = (i, bp)` of `Q_p ⋊ ⟨bp⟩` at `Z_p = ṽ_{-1}`.
pub fn labelling_transversal(b: &PAdicWindow) -> Result<Vec<AffineElement>> {
    if !b.is_unit()? {
        return Err(Error::NotUnit(b.to_string()));
    }
    let p = b.p;
    let bp = b.mul(&PAdicWindow::exact_integer(p, p as u64)?)?;
    (0..p as u64)
        .map(|i| AffineElement::new(PAdicWindow::exact_integer(p, i)?, bp.clone()))
        .collect()
}

/// The labelling compatible with `Q_p ⋊ ⟨bp⟩` built from [`labelling_transversal`].
pub fn compatible_labelling(b: &PAdicWindow, window: &Window) -> Result<CompatibleLabelling> {
    if window.q != b.p as usize {
        return Err(Error::Invalid(format!("window has q = {}, p = {}", window.q, b.p)));
    }
    let xs = labelling_transversal(b)?;
    let refs: Vec<&dyn TreeAction> = xs.iter().map(|x| x as &dyn TreeAction).collect();
    build_labelling(&refs, &UnrootedVertex::spine(window.q, -1), window)
}

pub fn label_edges(b: &PAdicWindow, window: &Window) -> Result<EdgeLabelling> {
    Ok(compatible_labelling(b, window)?.labels)
}

/// `b^{-n} j mod p`: the label of the edge to child `a + j p^n` of `a + p^n Z_p`.
pub fn horosphere_label(p: u32, b: u64, n: i64, j: u64) -> Result<u64> {
    let m = BigInt::from(p);
    let b = BigInt::from(b % p as u64);
    let binv = b
        .modinv(&m)
        .ok_or_else(|| Error::NotUnit(format!("{b} mod {p}")))?;
    let base = if n >= 0 { binv } else { b };
    let r = base.modpow(&BigInt::from(n.abs()), &m) * BigInt::from(j) % &m;
    Ok(r.to_u64().expect("below p"))
}

/// `P|_{Z_p}` for `⟨(1, 1), (0, p)⟩` compared with the odometer's level quotient.
#[derive(Clone, Debug)]
pub struct OdometerReport {
    pub p: u32,
    pub depth: usize,
    pub extracted: PermGroup,
    pub builtin: PermGroup,
    pub order: BigUint,
    /// The two groups coincide as permutation groups on level `depth`.
    pub identical: bool,
    pub regular: bool,
    pub cyclic: bool,
}

impl OdometerReport {
    pub fn passed(&self) -> bool {
        self.identical && self.regular && self.cyclic
    }
}

pub fn odometer_extract(p: u32, depth: usize) -> Result<OdometerReport> {
    check_prime(p)?;
    let q = p as usize;
    let gens = [AffineElement::integers(p, 1, 1)?, AffineElement::integers(p, 0, p as u64)?];
    let refs: Vec<&dyn TreeAction> = gens.iter().map(|x| x as &dyn TreeAction).collect();
    let window = Window::from_range(q, -1, (depth as i64 - 1).max(-1));
    let ex = extract_selfreplicating(&refs, &UnrootedVertex::spine(q, -1), depth, &window)?;
    let extracted = ex.group;
    let builtin = level_quotient(&odometer(q)?, depth)?.group;
    let order = extracted.order()?;
    let points = BigUint::from(extracted.degree());
    let exponent = extracted
        .generators()
        .iter()
        .fold(BigUint::one(), |acc, g| lcm(&acc, &BigUint::from(g.order())));
    Ok(OdometerReport {
        p,
        depth,
        identical: extracted.same_group(&builtin)?,
        regular: extracted.is_transitive() && order == points,
        cyclic: extracted.is_abelian() && exponent == order,
        order,
        extracted,
        builtin,
    })
}

fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    if x.is_zero() {
        return BigUint::zero();
    }
    a / &x * b
}
