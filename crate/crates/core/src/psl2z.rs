//! Exact arithmetic in PSL(2,Z).
//!
//! Elements are integral unimodular 2x2 matrices modulo ±Id, stored in a
//! canonical sign form so that structural equality is group equality. Words
//! over the generators `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]` evaluate
//! left to right; [`decompose_st`] inverts evaluation by continued-fraction
//! descent.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of PSL(2,Z) in canonical sign form.
///
/// The sign is fixed by: keep the matrix if `c > 0`, or `c = 0` and `d > 0`,
/// or `c = d = 0` and `a > 0`; otherwise negate every entry.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ModularElement {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

fn is_canonical(a: &BigInt, c: &BigInt, d: &BigInt) -> bool {
    c.is_positive() || (c.is_zero() && d.is_positive()) || (c.is_zero() && d.is_zero() && a.is_positive())
}

impl ModularElement {
    /// Builds an element from entries, rejecting matrices with `ad - bc != 1`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::Domain(format!(
                "[[{a},{b}],[{c},{d}]] does not have determinant 1"
            )));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Canonicalizes without checking the determinant. Callers must already
    /// know `ad - bc = 1`.
    pub(crate) fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        if is_canonical(&a, &c, &d) {
            Self { a, b, c, d }
        } else {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        }
    }

    pub fn identity() -> Self {
        Self::canonical(1.into(), 0.into(), 0.into(), 1.into())
    }

    pub fn s() -> Self {
        Self::canonical(0.into(), (-1).into(), 1.into(), 0.into())
    }

    pub fn t() -> Self {
        Self::t_pow(&BigInt::one())
    }

    pub fn t_pow(k: &BigInt) -> Self {
        Self::canonical(1.into(), k.clone(), 0.into(), 1.into())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        self.c.is_zero() && self.b.is_zero() && self.a.is_one() && self.d.is_one()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::canonical(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, exp: i64) -> Self {
        let mut base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `(xy)^-1 (yx)` for `x = self`, `y = other`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).inverse().mul(&other.mul(self))
    }

    pub fn reduce_mod(&self, n: u32) -> ResidueElement {
        let m = BigInt::from(n);
        let r = |x: &BigInt| x.mod_floor(&m).to_u32().expect("residue fits in u32");
        ResidueElement::new_unchecked(n, r(&self.a), r(&self.b), r(&self.c), r(&self.d))
    }
}

impl std::ops::Mul for &ModularElement {
    type Output = ModularElement;
    fn mul(self, rhs: Self) -> ModularElement {
        ModularElement::mul(self, rhs)
    }
}

impl fmt::Display for ModularElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for ModularElement {
    type Err = Error;

    /// Parses `[[a,b],[c,d]]`, whitespace allowed anywhere.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("expected a matrix [[a,b],[c,d]], got {s:?}"));
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(bad)?;
        let (top, bottom) = inner.split_once("],[").ok_or_else(bad)?;
        let mut entries = Vec::with_capacity(4);
        for row in [top, bottom] {
            let (x, y) = row.split_once(',').ok_or_else(bad)?;
            for v in [x, y] {
                entries.push(v.parse::<BigInt>().map_err(|_| bad())?);
            }
        }
        let [a, b, c, d]: [BigInt; 4] = entries.try_into().map_err(|_| bad())?;
        Self::new(a, b, c, d)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(x.to_string()),
        }
    }
}

impl TryFrom<JsonInt> for BigInt {
    type Error = String;
    fn try_from(x: JsonInt) -> std::result::Result<Self, String> {
        match x {
            JsonInt::Small(v) => Ok(v.into()),
            JsonInt::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

/// Serialized as `[[a,b],[c,d]]`; entries outside the `i64` range become strings.
impl Serialize for ModularElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [JsonInt::from(&self.a), JsonInt::from(&self.b)],
            [JsonInt::from(&self.c), JsonInt::from(&self.d)],
        ];
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModularElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let [[a, b], [c, d]] = <[[JsonInt; 2]; 2]>::deserialize(deserializer)?;
        let conv = |x: JsonInt| BigInt::try_from(x).map_err(D::Error::custom);
        ModularElement::new(conv(a)?, conv(b)?, conv(c)?, conv(d)?).map_err(D::Error::custom)
    }
}

/// A letter of a word over `{S, T}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    S,
    T(BigInt),
}

impl Token {
    pub fn matrix(&self) -> ModularElement {
        match self {
            Token::S => ModularElement::s(),
            Token::T(k) => ModularElement::t_pow(k),
        }
    }

    pub fn inverse(&self) -> Token {
        match self {
            Token::S => Token::S,
            Token::T(k) => Token::T(-k),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::S => write!(f, "S"),
            Token::T(k) if k.is_one() => write!(f, "T"),
            Token::T(k) => write!(f, "T^{k}"),
        }
    }
}

/// A freely reduced word in `S` and `T^k`.
///
/// Construction always reduces: adjacent `T` powers merge, `T^0` drops out
/// and `S S` cancels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct STWord(Vec<Token>);

impl STWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_tokens<I: IntoIterator<Item = Token>>(tokens: I) -> Self {
        let mut out: Vec<Token> = Vec::new();
        for tok in tokens {
            match (out.last_mut(), tok) {
                (Some(Token::T(prev)), Token::T(k)) => {
                    *prev += k;
                    if prev.is_zero() {
                        out.pop();
                    }
                }
                (Some(Token::S), Token::S) => {
                    out.pop();
                }
                (_, Token::T(k)) if k.is_zero() => {}
                (_, tok) => out.push(tok),
            }
        }
        Self(out)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self) -> ModularElement {
        self.0
            .iter()
            .fold(ModularElement::identity(), |acc, tok| acc.mul(&tok.matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_tokens(self.0.iter().rev().map(Token::inverse))
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::from_tokens(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// A random reduced word built from `len` random letters, each either `S`
    /// or `T^k` with `0 < |k| <= 5`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self::from_tokens((0..len).map(|_| {
            if rng.gen_bool(0.5) {
                Token::S
            } else {
                let k: i64 = rng.gen_range(1..=5);
                Token::T(BigInt::from(if rng.gen_bool(0.5) { k } else { -k }))
            }
        }))
    }
}

impl fmt::Display for STWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Id");
        }
        for (i, tok) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{tok}")?;
        }
        Ok(())
    }
}

impl FromStr for STWord {
    type Err = Error;

    /// Whitespace-separated `S`, `T`, `T^k`, `T^-k`; `Id` or the empty string
    /// is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for raw in s.split_whitespace() {
            let tok = match raw {
                "Id" => continue,
                "S" => Token::S,
                "T" => Token::T(BigInt::one()),
                _ => {
                    let exp = raw
                        .strip_prefix("T^")
                        .ok_or_else(|| Error::Parse(format!("unknown token {raw:?}")))?;
                    let exp = exp.strip_prefix('+').unwrap_or(exp);
                    let k: BigInt = exp
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {raw:?}")))?;
                    Token::T(k)
                }
            };
            tokens.push(tok);
        }
        Ok(Self::from_tokens(tokens))
    }
}

/// Nearest integer to `num / den` (`den != 0`). Ties go to the smaller
/// absolute value, then to the positive candidate.
pub(crate) fn nearest_quotient(num: &BigInt, den: &BigInt) -> BigInt {
    let fl = num.div_floor(den);
    let rem = num - &fl * den;
    let twice = (&rem * BigInt::from(2)).abs();
    let den_abs = den.abs();
    let up = &fl + 1;
    if twice < den_abs {
        fl
    } else if twice > den_abs {
        up
    } else if fl.abs() < up.abs() || (fl.abs() == up.abs() && fl.is_positive()) {
        fl
    } else {
        up
    }
}

/// Writes `m` as a word in `S` and `T` of length `O(log max|entry|)`.
///
/// Each step picks `q` nearest to `a/c` and replaces `m` by `S T^-q m`,
/// whose lower-left entry `a - qc` has at most half the size of `c`.
pub fn decompose_st(m: &ModularElement) -> STWord {
    let (mut a, mut b, mut c, mut d) = (m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone());
    let mut tokens = Vec::new();
    while !c.is_zero() {
        let q = nearest_quotient(&a, &c);
        // T^-q m
        let a1 = &a - &q * &c;
        let b1 = &b - &q * &d;
        // S (T^-q m) = [[-c, -d], [a1, b1]]
        let (na, nb, nc, nd) = (-c, -d, a1, b1);
        tokens.push(Token::T(q));
        tokens.push(Token::S);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    // c == 0 forces a = d = ±1, so the remainder is T^(b/a) = T^(ab).
    tokens.push(Token::T(&a * &b));
    STWord::from_tokens(tokens)
}

pub fn in_gamma0(m: &ModularElement, n: u64) -> bool {
    n != 0 && m.c.is_multiple_of(&BigInt::from(n))
}

/// `m ≡ ±Id (mod n)`.
pub fn in_gamma(m: &ModularElement, n: u64) -> bool {
    if n == 0 {
        return m.is_identity();
    }
    let n = BigInt::from(n);
    let r = |x: &BigInt| x.mod_floor(&n);
    let one = BigInt::one().mod_floor(&n);
    let minus_one = (-BigInt::one()).mod_floor(&n);
    let (a, b, c, d) = (r(&m.a), r(&m.b), r(&m.c), r(&m.d));
    b.is_zero() && c.is_zero() && ((a == one && d == one) || (a == minus_one && d == minus_one))
}

/// Membership in the largest normal subgroup of PSL(2,Z) inside Γ₀(n):
/// `m ≡ ±diag(x, x) (mod n)` with `x² ≡ 1`.
pub fn in_h(m: &ModularElement, n: u64) -> bool {
    if n == 0 {
        return m.is_identity();
    }
    let n = BigInt::from(n);
    let r = |x: &BigInt| x.mod_floor(&n);
    let (a, b, c, d) = (r(&m.a), r(&m.b), r(&m.c), r(&m.d));
    b.is_zero() && c.is_zero() && a == d && (&a * &a).mod_floor(&n) == BigInt::one().mod_floor(&n)
}

/// Indicator of Γ₀(4).
pub fn delta_gamma04(m: &ModularElement) -> u8 {
    u8::from(in_gamma0(m, 4))
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `[PSL(2,Z) : Γ(n)]`.
pub fn index_gamma(n: u64) -> Result<u128> {
    if n < 2 {
        return Err(Error::Domain(format!("index of Γ(n) needs n >= 2, got {n}")));
    }
    if n == 2 {
        return Ok(6);
    }
    let n128 = n as u128;
    let mut acc = n128
        .checked_mul(n128)
        .and_then(|x| x.checked_mul(n128))
        .ok_or(Error::Overflow("n^3 in index_gamma"))?;
    for p in prime_divisors(n) {
        let p2 = (p as u128) * (p as u128);
        acc = acc / p2 * (p2 - 1);
    }
    Ok(acc / 2)
}

/// `[PSL(2,Z) : Γ₀(n)]`.
pub fn index_gamma0(n: u64) -> Result<u128> {
    if n < 1 {
        return Err(Error::Domain("index of Γ₀(n) needs n >= 1".into()));
    }
    let mut acc = n as u128;
    for p in prime_divisors(n) {
        acc = acc / p as u128 * (p as u128 + 1);
    }
    Ok(acc)
}

/// An element of PSL(2, Z/n), canonical up to multiplication by -1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ResidueElement {
    n: u32,
    m: [u32; 4],
}

impl ResidueElement {
    fn new_unchecked(n: u32, a: u32, b: u32, c: u32, d: u32) -> Self {
        let pos = [a, b, c, d];
        let neg = pos.map(|x| if x == 0 { 0 } else { n - x });
        Self { n, m: pos.min(neg) }
    }

    pub fn new(n: u32, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("modulus must be >= 2, got {n}")));
        }
        let r = |x: i64| x.rem_euclid(n as i64) as u32;
        let det = (a as i128 * d as i128 - b as i128 * c as i128).rem_euclid(n as i128);
        if det != 1 {
            return Err(Error::Domain(format!("determinant is not 1 mod {n}")));
        }
        Ok(Self::new_unchecked(n, r(a), r(b), r(c), r(d)))
    }

    pub fn identity(n: u32) -> Self {
        Self::new_unchecked(n, 1, 0, 0, 1)
    }

    pub fn s(n: u32) -> Self {
        Self::new_unchecked(n, 0, n - 1, 1, 0)
    }

    pub fn t(n: u32) -> Self {
        Self::new_unchecked(n, 1, 1 % n, 0, 1)
    }

    pub fn t_inv(n: u32) -> Self {
        Self::new_unchecked(n, 1, n - 1, 0, 1)
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> [u32; 4] {
        self.m
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n as u64;
        let [a, b, c, d] = self.m.map(u64::from);
        let [e, f, g, h] = rhs.m.map(u64::from);
        let r = |x: u64| (x % n) as u32;
        Self::new_unchecked(
            self.n,
            r(a * e + b * g),
            r(a * f + b * h),
            r(c * e + d * g),
            r(c * f + d * h),
        )
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.n)
    }
}
