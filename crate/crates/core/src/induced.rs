//! The 6-dimensional representation of PSL(2,Z) induced from `χ_α` on Γ₀(4).
//!
//! Rows and columns are indexed by the fixed coset representatives
//! `R = (Id, S, ST, ST², ST³, ST²S)`. Entry `(i, j)` of `U_α(g)` is
//! `χ_α(r_i g r_j⁻¹)` when `r_i g r_j⁻¹ ∈ Γ₀(4)` and zero otherwise.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::character::{chi, in_ker_chi, Alpha};
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::phase::Phase;
use crate::psl2z::{ModularElement, STWord, Token};

pub const DIM: usize = 6;

/// The coset representatives of Γ₀(4)\PSL(2,Z) and their inverses.
pub struct CosetReps {
    reps: [ModularElement; DIM],
    inverses: [ModularElement; DIM],
}

impl CosetReps {
    pub const WORDS: [&'static str; DIM] = ["Id", "S", "S T", "S T^2", "S T^3", "S T^2 S"];

    pub fn get() -> &'static CosetReps {
        static REPS: OnceLock<CosetReps> = OnceLock::new();
        REPS.get_or_init(|| {
            let reps: [ModularElement; DIM] =
                Self::WORDS.map(|w| w.parse::<STWord>().expect("representative words parse").eval());
            let inverses = reps.clone().map(|r| r.inverse());
            CosetReps { reps, inverses }
        })
    }

    pub fn reps(&self) -> &[ModularElement; DIM] {
        &self.reps
    }

    /// For each column `j`, the unique row `i` with `r_i g r_j⁻¹ ∈ Γ₀(4)`
    /// together with that element.
    fn columns(&self, g: &ModularElement) -> Result<[(usize, ModularElement); DIM]> {
        let four = BigInt::from(4);
        let mut out: [Option<(usize, ModularElement)>; DIM] = Default::default();
        for (j, slot) in out.iter_mut().enumerate() {
            let h = g.mul(&self.inverses[j]);
            let mut hit = None;
            for (i, r) in self.reps.iter().enumerate() {
                // lower-left entry of r_i h
                let c = r.c() * h.a() + r.d() * h.c();
                if c.is_multiple_of(&four) {
                    if hit.is_some() {
                        return Err(Error::Internal(format!(
                            "column {j} of U({g}) has several nonzero rows"
                        )));
                    }
                    hit = Some(i);
                }
            }
            let i = hit.ok_or_else(|| Error::Internal(format!("column {j} of U({g}) is zero")))?;
            *slot = Some((i, self.reps[i].mul(&h)));
        }
        Ok(out.map(|x| x.expect("filled above")))
    }

    /// For each row `i`, the unique column `r(i)` with `r_i g r(i)⁻¹ ∈ Γ₀(4)`.
    fn rows(&self, g: &ModularElement) -> Result<[(usize, ModularElement); DIM]> {
        let mut out: [Option<(usize, ModularElement)>; DIM] = Default::default();
        for (i, slot) in out.iter_mut().enumerate() {
            let rg = self.reps[i].mul(g);
            let hits: Vec<usize> = (0..DIM)
                .filter(|&j| crate::psl2z::in_gamma0(&rg.mul(&self.inverses[j]), 4))
                .collect();
            match hits.as_slice() {
                [j] => *slot = Some((*j, rg.mul(&self.inverses[*j]))),
                _ => {
                    return Err(Error::Internal(format!(
                        "row {i} of U({g}) has {} nonzero entries",
                        hits.len()
                    )))
                }
            }
        }
        Ok(out.map(|x| x.expect("filled above")))
    }
}

/// `U_α(g)`.
pub fn u_alpha(a: &Alpha, g: &ModularElement) -> Result<Monomial> {
    let cols = CosetReps::get().columns(g)?;
    let mut perm = [0u8; DIM];
    let mut phases = [Phase::ZERO; DIM];
    for (j, (i, x)) in cols.iter().enumerate() {
        perm[j] = *i as u8;
        phases[j] = chi(a, x)?;
    }
    Ok(Monomial::new(perm, phases))
}

/// `U_0(g)`: the permutation of cosets, no character values.
pub fn u_zero(g: &ModularElement) -> Result<Monomial> {
    let cols = CosetReps::get().columns(g)?;
    Ok(Monomial::permutation(cols.map(|(i, _)| i as u8)))
}

/// `D_α(g)`: diagonal with entry `i` equal to `χ_α(r_i g r(i)⁻¹)`.
pub fn d_alpha(a: &Alpha, g: &ModularElement) -> Result<Monomial> {
    let rows = CosetReps::get().rows(g)?;
    let mut phases = [Phase::ZERO; DIM];
    for (i, (_, x)) in rows.iter().enumerate() {
        phases[i] = chi(a, x)?;
    }
    Ok(Monomial::diagonal(phases))
}

pub fn in_ker_u(a: &Alpha, g: &ModularElement) -> bool {
    u_alpha(a, g).map(|m| m.is_identity()).unwrap_or(false)
}

/// `g ∈ ker U_α` iff `r g r⁻¹ ∈ ker χ_α` for every representative `r`.
/// Cross-check for [`in_ker_u`].
pub fn in_ker_u_by_conjugation(a: &Alpha, g: &ModularElement) -> bool {
    let reps = CosetReps::get();
    reps.reps
        .iter()
        .zip(&reps.inverses)
        .all(|(r, r_inv)| in_ker_chi(a, &r.mul(g).mul(r_inv)))
}

pub const GAMMA4_GENERATOR_WORDS: [&str; 5] = [
    "T^4",
    "S T^-4 S",
    "T^-1 S T^4 S T",
    "T^-2 S T^-4 S T^-2",
    "T S T^-4 S T^-1",
];

/// Generators `g₁, ..., g₅` of Γ(4).
pub fn gamma4_generators() -> [ModularElement; 5] {
    GAMMA4_GENERATOR_WORDS.map(|w| w.parse::<STWord>().expect("generator words parse").eval())
}

/// `(A₁, A₂, A₃) = (U_α(g₁), U_α(g₂), U_α(g₃))`.
pub fn a_generators(a: &Alpha) -> Result<[Monomial; 3]> {
    let g = gamma4_generators();
    Ok([u_alpha(a, &g[0])?, u_alpha(a, &g[1])?, u_alpha(a, &g[2])?])
}

/// `U_α` with the images of `S` and `T` cached, for evaluating words.
#[derive(Clone, Debug)]
pub struct InducedRep {
    alpha: Alpha,
    s: Monomial,
    t: Monomial,
    t_inv: Monomial,
    t_order: u64,
}

impl InducedRep {
    pub fn new(alpha: Alpha) -> Result<Self> {
        let s = u_alpha(&alpha, &ModularElement::s())?;
        let t = u_alpha(&alpha, &ModularElement::t())?;
        Ok(Self {
            alpha,
            s,
            t,
            t_inv: t.inverse(),
            t_order: t.order(),
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn s(&self) -> &Monomial {
        &self.s
    }

    pub fn t(&self) -> &Monomial {
        &self.t
    }

    pub fn t_inv(&self) -> &Monomial {
        &self.t_inv
    }

    pub fn t_pow(&self, k: &BigInt) -> Monomial {
        let r = k.mod_floor(&BigInt::from(self.t_order)).to_u64().expect("below order");
        if k.is_negative() && r != 0 {
            self.t_inv.pow(self.t_order - r)
        } else {
            self.t.pow(r)
        }
    }

    /// Image of a word, by the homomorphism property.
    pub fn image_of_word(&self, w: &STWord) -> Monomial {
        w.tokens().iter().fold(Monomial::identity(), |acc, tok| match tok {
            Token::S => acc.mul(&self.s),
            Token::T(k) if k.is_zero() => acc,
            Token::T(k) => acc.mul(&self.t_pow(k)),
        })
    }

    pub fn generators(&self) -> [Monomial; 2] {
        [self.s, self.t]
    }
}
