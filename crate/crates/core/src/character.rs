//! Selberg's character on Γ₀(4).
//!
//! Γ₀(4) is free on `T` and `V = S T^4 S = ±[[-1,0],[4,-1]]`, and the
//! character sends `T ↦ e^{2πiα}`, `V ↦ 1`. We evaluate it by rewriting an
//! element as a reduced word in `T`, `V` and summing the `T` exponents.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::psl2z::{in_gamma0, nearest_quotient, ModularElement};

/// The character parameter `α = p/q` reduced into `[0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Alpha {
    p: u64,
    q: u64,
}

impl Alpha {
    pub const ZERO: Alpha = Alpha { p: 0, q: 1 };

    /// `p/q` modulo 1. Panics on `q == 0`.
    pub fn new(p: i64, q: u64) -> Self {
        let ph = Phase::new(p, q);
        Self {
            p: ph.numer(),
            q: ph.denom(),
        }
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn phase(&self) -> Phase {
        Phase::new(self.p as i64, self.q)
    }

    /// `1 - α` (mod 1), the parameter of the complex-conjugate character.
    pub fn conjugate(&self) -> Alpha {
        Alpha::new(-(self.p as i64), self.q)
    }

    /// `N(α) = min{n : q | 4n} = q / gcd(q, 4)`.
    pub fn n(&self) -> u64 {
        n_of_alpha(self)
    }

    /// `α <= 1/2`.
    pub fn in_lower_half(&self) -> bool {
        2 * self.p <= self.q
    }
}

pub fn n_of_alpha(a: &Alpha) -> u64 {
    a.q / a.q.gcd(&4)
}

impl PartialOrd for Alpha {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Alpha {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.phase().cmp(&other.phase())
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.phase().fmt(f)
    }
}

impl FromStr for Alpha {
    type Err = Error;

    /// Accepts `p/q` or an integer; decimals are rejected.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains('.') || s.contains('e') {
            return Err(Error::Parse(format!("alpha must be an exact fraction p/q, got {s:?}")));
        }
        let ph: Phase = s.parse()?;
        Ok(Alpha {
            p: ph.numer(),
            q: ph.denom(),
        })
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FreeToken {
    T(BigInt),
    V(BigInt),
}

impl FreeToken {
    fn exponent_mut(&mut self) -> &mut BigInt {
        match self {
            FreeToken::T(k) | FreeToken::V(k) => k,
        }
    }

    fn same_letter(&self, other: &FreeToken) -> bool {
        matches!(
            (self, other),
            (FreeToken::T(_), FreeToken::T(_)) | (FreeToken::V(_), FreeToken::V(_))
        )
    }

    pub fn matrix(&self) -> ModularElement {
        match self {
            FreeToken::T(k) => ModularElement::t_pow(k),
            FreeToken::V(k) => {
                ModularElement::canonical(BigInt::one(), BigInt::zero(), BigInt::from(-4) * k, BigInt::one())
            }
        }
    }
}

/// A freely reduced word in the free generators `T`, `V` of Γ₀(4).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Gamma04Word(Vec<FreeToken>);

impl Gamma04Word {
    pub fn from_tokens<I: IntoIterator<Item = FreeToken>>(tokens: I) -> Self {
        let mut out: Vec<FreeToken> = Vec::new();
        for mut tok in tokens {
            if tok.exponent_mut().is_zero() {
                continue;
            }
            match out.last_mut() {
                Some(prev) if prev.same_letter(&tok) => {
                    *prev.exponent_mut() += std::mem::take(tok.exponent_mut());
                    if prev.exponent_mut().is_zero() {
                        out.pop();
                    }
                }
                _ => out.push(tok),
            }
        }
        Self(out)
    }

    pub fn tokens(&self) -> &[FreeToken] {
        &self.0
    }

    pub fn eval(&self) -> ModularElement {
        self.0
            .iter()
            .fold(ModularElement::identity(), |acc, t| acc.mul(&t.matrix()))
    }

    /// Sum of the `T` exponents.
    pub fn t_exponent(&self) -> BigInt {
        self.0
            .iter()
            .filter_map(|t| match t {
                FreeToken::T(k) => Some(k),
                FreeToken::V(_) => None,
            })
            .sum()
    }
}

impl fmt::Display for Gamma04Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Id");
        }
        for (i, tok) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match tok {
                FreeToken::T(k) => write!(f, "T^{k}")?,
                FreeToken::V(k) => write!(f, "V^{k}")?,
            }
        }
        Ok(())
    }
}

fn not_in_gamma04(m: &ModularElement) -> Error {
    Error::Membership {
        element: m.to_string(),
        group: "Γ₀(4)",
    }
}

/// Rewrites `m ∈ Γ₀(4)` as a reduced word in `T` and `V`.
///
/// Ping-pong descent: left-multiplying by `T^k` moves `a` to `a + kc`, by
/// `V^k` moves `c` to `c - 4ka`. Alternating the two with `k` chosen to
/// minimize the moved entry strictly shrinks `|a| + |c|` until `c = 0`.
pub fn decompose_gamma04(m: &ModularElement) -> Result<Gamma04Word> {
    if !in_gamma0(m, 4) {
        return Err(not_in_gamma04(m));
    }
    let (mut a, mut b, mut c, mut d) = (m.a().clone(), m.b().clone(), m.c().clone(), m.d().clone());
    // m = X_1 X_2 ... X_r (remaining), collected left to right.
    let mut tokens = Vec::new();
    while !c.is_zero() {
        let k = nearest_quotient(&-&a, &c);
        if !k.is_zero() {
            a += &k * &c;
            b += &k * &d;
            tokens.push(FreeToken::T(-k));
        }
        let four_a = BigInt::from(4) * &a;
        let k = nearest_quotient(&c, &four_a);
        if k.is_zero() {
            // |c| <= 2|a| and |a| <= |c|/2 only meet at |c| = 2|a|, which
            // Γ₀(4) rules out.
            return Err(Error::Internal(format!("Γ₀(4) descent stalled at {m}")));
        }
        c -= &k * &four_a;
        d -= &k * BigInt::from(4) * &b;
        tokens.push(FreeToken::V(-k));
    }
    debug_assert!(a.abs().is_one() && d.abs().is_one());
    tokens.push(FreeToken::T(&a * &b));
    Ok(Gamma04Word::from_tokens(tokens))
}

/// Sum of `T` exponents of the reduced `T`/`V` word: the homomorphism
/// Γ₀(4) → Z through which the character factors.
pub fn t_exponent(m: &ModularElement) -> Result<BigInt> {
    Ok(decompose_gamma04(m)?.t_exponent())
}

/// `χ_α(m)` as a phase.
pub fn chi(a: &Alpha, m: &ModularElement) -> Result<Phase> {
    Ok(a.phase().scale_big(&t_exponent(m)?))
}

/// `m ∈ Γ₀(4)` and `χ_α(m) = 1`.
pub fn in_ker_chi(a: &Alpha, m: &ModularElement) -> bool {
    chi(a, m).map(|p| p.is_zero()).unwrap_or(false)
}
