//! Kernel invariants, congruence certificates, and the Γ_d bound arithmetic.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::cache::Cache;
use crate::character::Alpha;
use crate::error::{Error, Result};
use crate::groups::{
    diagonal_subgroup, enumerate_monomial_group, enumerate_psl2_zn, SchreierData, DEFAULT_CAP, DEFAULT_MAX_MODULUS,
};
use crate::induced::{gamma4_generators, in_ker_u, u_alpha, InducedRep};
use crate::monomial::Monomial;
use crate::psl2z::{in_gamma, index_gamma, ModularElement, STWord};

fn ratio_as_string<S: Serializer, T: fmt::Display + Clone + Integer>(
    r: &Ratio<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

fn ratio_from_string<'de, D, T>(d: D) -> std::result::Result<Ratio<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Clone + Integer + std::str::FromStr,
{
    let s = String::deserialize(d)?;
    s.parse::<Ratio<T>>()
        .map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
}

/// Enumeration results that must agree with the closed formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossChecks {
    pub group_order: u128,
    pub diagonal_order: u128,
    pub t_image_order: u64,
}

/// Invariants of `ker U_α` as functions of `N = N(α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub alpha: Alpha,
    #[serde(rename = "N")]
    pub n: u64,
    pub index: u128,
    pub genus: u128,
    pub cusps: u128,
    pub level: u64,
    pub free_generators: u128,
    /// Hyperbolic area of a fundamental domain, as a multiple of π.
    #[serde(serialize_with = "ratio_as_string", deserialize_with = "ratio_from_string")]
    pub area_over_pi: Ratio<u128>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_checks: Option<CrossChecks>,
}

impl KernelReport {
    /// Formula values for `N`.
    pub fn from_n(alpha: Alpha, n: u64) -> Result<Self> {
        let big = n as u128;
        let n2 = big.checked_mul(big).ok_or(Error::Overflow("N^2"))?;
        let n3 = n2.checked_mul(big).ok_or(Error::Overflow("N^3"))?;
        let index = n3.checked_mul(24).ok_or(Error::Overflow("24 N^3"))?;
        let level = n.checked_mul(4).ok_or(Error::Overflow("4N"))?;
        Ok(Self {
            alpha,
            n,
            index,
            genus: 1 + 2 * n3 - 3 * n2,
            cusps: 6 * n2,
            level,
            free_generators: 4 * n3 + 1,
            area_over_pi: Ratio::new(index, 3),
            cross_checks: None,
        })
    }

    /// Checks the relations tying the five invariants together.
    pub fn verify_identities(&self) -> Result<()> {
        let n3 = (self.n as u128).pow(3);
        let fail = |what: &str| Err(Error::Internal(format!("{what} fails for α = {}", self.alpha)));
        if 2 * self.genus + self.cusps != 4 * n3 + 2 {
            return fail("2g + p = 4N³ + 2");
        }
        if self.free_generators != 2 * self.genus + self.cusps - 1 {
            return fail("free generators = 2g + p - 1");
        }
        let newman = newman_genus(self.index, self.level as u128)?;
        if newman != Ratio::from_integer(self.genus as i128) {
            return fail("Newman's genus formula");
        }
        // μ/3 = 2(2g - 2 + p)
        if self.area_over_pi != Ratio::from_integer(2 * (2 * self.genus + self.cusps - 2)) {
            return fail("Gauss–Bonnet");
        }
        if self.cusps * self.level as u128 != self.index {
            return fail("cusps · level = index");
        }
        Ok(())
    }
}

/// `g = 1 + μ/12 - t/2` with `t = μ / level`.
pub fn newman_genus(mu: u128, level: u128) -> Result<Ratio<i128>> {
    if level == 0 || !mu.is_multiple_of(level) {
        return Err(Error::Domain(format!("level {level} does not divide index {mu}")));
    }
    let mu_i = i128::try_from(mu).map_err(|_| Error::Overflow("index"))?;
    let t = mu_i / level as i128;
    Ok(Ratio::from_integer(1) + Ratio::new(mu_i, 12) - Ratio::new(t, 2))
}

/// Cusp width of `ker U_α` at ∞: the order of `U_α(T)`.
pub fn wohlfahrt_level(a: &Alpha) -> Result<u64> {
    Ok(InducedRep::new(*a)?.t().order())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelId {
    #[serde(rename = "Gamma(4)")]
    Gamma4,
    #[serde(rename = "Gamma(8)")]
    Gamma8,
    #[serde(rename = "noncongruence")]
    Noncongruence,
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelId::Gamma4 => "Gamma(4)",
            KernelId::Gamma8 => "Gamma(8)",
            KernelId::Noncongruence => "noncongruence",
        })
    }
}

/// An element of `Γ(4N)` outside `ker U_α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: ModularElement,
    pub word: String,
    pub image: Monomial,
}

impl Witness {
    /// Recomputes membership in `Γ(level)` and the image from scratch.
    pub fn recheck(&self, alpha: &Alpha, level: u64) -> Result<bool> {
        let word: STWord = self.word.parse()?;
        let image = u_alpha(alpha, &self.matrix)?;
        Ok(word.eval() == self.matrix && in_gamma(&self.matrix, level) && image == self.image && !image.is_identity())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCertificate {
    pub alpha: Alpha,
    #[serde(rename = "N")]
    pub n: u64,
    pub congruent: bool,
    pub kernel: KernelId,
    pub level: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

/// Data for `Γ_d = ker χ_{n/d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaDInfo {
    pub d: u64,
    pub index_in_psl: u128,
    pub genus: u64,
    pub cusps: u64,
    pub parabolic_generators: u64,
    #[serde(serialize_with = "ratio_as_string", deserialize_with = "ratio_from_string")]
    pub area_over_pi: Ratio<u128>,
    #[serde(serialize_with = "ratio_as_string", deserialize_with = "ratio_from_string")]
    pub gauss_bonnet_area_over_pi: Ratio<u128>,
    pub zograf_applicable: bool,
    pub congruence_excluded_by_bound: bool,
    pub known_congruent: bool,
}

/// Selberg's lower bound for λ₁ on congruence subgroups.
pub const SELBERG_BOUND: (u128, u128) = (3, 16);

pub fn gamma_d_info(d: u64) -> Result<GammaDInfo> {
    if d < 1 {
        return Err(Error::Domain("d must be at least 1".into()));
    }
    let genus = 0u64;
    let cusps = d.checked_add(2).ok_or(Error::Overflow("d + 2"))?;
    let area = Ratio::from_integer(2 * d as u128);
    let gauss_bonnet = Ratio::from_integer(2 * (2 * genus as u128 + cusps as u128 - 2));
    // Zograf's upper bound needs A ≥ 32π(g+1); it then gives λ₁ < 8π(g+1)/A.
    let zograf_applicable = area >= Ratio::from_integer(32 * (genus as u128 + 1));
    let upper = Ratio::new(8 * (genus as u128 + 1), 1) / area;
    let selberg = Ratio::new(SELBERG_BOUND.0, SELBERG_BOUND.1);
    let congruence_excluded_by_bound = zograf_applicable && selberg >= upper;
    Ok(GammaDInfo {
        d,
        index_in_psl: 6 * d as u128,
        genus,
        cusps,
        parabolic_generators: cusps,
        area_over_pi: area,
        gauss_bonnet_area_over_pi: gauss_bonnet,
        zograf_applicable,
        congruence_excluded_by_bound,
        known_congruent: matches!(d, 1 | 2 | 4 | 8),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorSample {
    pub h1: ModularElement,
    pub h2: ModularElement,
    pub commutator: ModularElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianProbe {
    pub k: u32,
    pub modulus: u64,
    pub samples: usize,
    pub failures: usize,
    pub first_failure: Option<CommutatorSample>,
    /// For `k >= 3`: the pair `[[1,4],[0,1]]`, `[[-1,0],[4,-1]]`, whose
    /// commutator is not in `Γ(2^{k+2})`.
    pub witness: Option<CommutatorSample>,
    pub witness_outside: Option<bool>,
}

impl AbelianProbe {
    /// No sampled commutator left `Γ(2^{k+2})` and no witness refutes it.
    pub fn abelian(&self) -> bool {
        self.failures == 0 && self.witness_outside != Some(true)
    }
}

/// Random word of length `1..=max_len` in `g₁..g₅` and their inverses.
pub fn random_gamma4_element<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> ModularElement {
    let gens = gamma4_generators();
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len).fold(ModularElement::identity(), |acc, _| {
        let g = &gens[rng.gen_range(0..5)];
        acc.mul(&if rng.gen_bool(0.5) { g.clone() } else { g.inverse() })
    })
}

/// Tests whether `Γ(4)/Γ(2^{k+2})` looks abelian on random commutators.
pub fn abelianness_probe<R: Rng + ?Sized>(k: u32, samples: usize, rng: &mut R) -> Result<AbelianProbe> {
    let modulus = 1u64
        .checked_shl(k + 2)
        .filter(|_| k <= 60)
        .ok_or(Error::Overflow("2^(k+2)"))?;
    let mut failures = 0;
    let mut first_failure = None;
    for _ in 0..samples {
        let h1 = random_gamma4_element(rng, 10);
        let h2 = random_gamma4_element(rng, 10);
        let commutator = h1.commutator(&h2);
        if !in_gamma(&commutator, modulus) {
            failures += 1;
            first_failure.get_or_insert(CommutatorSample { h1, h2, commutator });
        }
    }
    let (witness, witness_outside) = if k >= 3 {
        let h1 = ModularElement::from_i64(1, 4, 0, 1)?;
        let h2 = ModularElement::from_i64(-1, 0, 4, -1)?;
        let commutator = h1.commutator(&h2);
        let outside = !in_gamma(&commutator, modulus);
        (Some(CommutatorSample { h1, h2, commutator }), Some(outside))
    } else {
        (None, None)
    };
    Ok(AbelianProbe {
        k,
        modulus,
        samples,
        failures,
        first_failure,
        witness,
        witness_outside,
    })
}

/// One row of a scan over α.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: Alpha,
    #[serde(rename = "N")]
    pub n: u64,
    pub index: u128,
    pub genus: u128,
    pub cusps: u128,
    pub level: u64,
    pub free_generators: u128,
    pub congruent: bool,
}

/// Reduced fractions `p/q` with `q <= max_den`, in `[0, 1/2]` (or `[0, 1)`
/// with `full_range`), sorted by value.
pub fn alphas_up_to(max_den: u64, full_range: bool) -> Vec<Alpha> {
    let mut out: Vec<Alpha> = (1..=max_den)
        .flat_map(|q| {
            (0..q)
                .filter(move |p| p.gcd(&q) == 1)
                .map(move |p| Alpha::new(p as i64, q))
        })
        .filter(|a| full_range || a.in_lower_half())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Holds the enumeration bounds and memoizes coset tables by modulus.
pub struct Analyzer {
    pub cap: usize,
    pub max_modulus: u64,
    cache: Option<Cache>,
    tables: Mutex<HashMap<u64, Arc<OnceLock<Arc<SchreierData>>>>>,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::new(DEFAULT_CAP, DEFAULT_MAX_MODULUS)
    }
}

impl Analyzer {
    pub fn new(cap: usize, max_modulus: u64) -> Self {
        Self {
            cap,
            max_modulus,
            cache: None,
            tables: Mutex::new(HashMap::new()),
        }
    }

    /// Reads and writes reports and certificates through `cache`.
    pub fn with_cache(mut self, cache: Cache) -> Self {
        self.cache = Some(cache);
        self
    }

    fn cached<T, F>(&self, kind: &str, key: &str, compute: F) -> Result<T>
    where
        T: Serialize + serde::de::DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        match &self.cache {
            Some(cache) => cache.get_or_compute(kind, key, compute),
            None => compute(),
        }
    }

    /// Coset table of PSL(2,Z/n), built once per modulus.
    pub fn schreier_data(&self, n: u64) -> Result<Arc<SchreierData>> {
        if n > self.max_modulus {
            return Err(Error::ModulusBound {
                modulus: n,
                bound: self.max_modulus,
            });
        }
        if n < 2 {
            return Err(Error::Domain(format!("modulus must be at least 2, got {n}")));
        }
        let cell = self.tables.lock().expect("table lock").entry(n).or_default().clone();
        Ok(cell
            .get_or_init(|| Arc::new(enumerate_psl2_zn(n, self.max_modulus).expect("bounds checked above")))
            .clone())
    }

    fn image_group_order(&self, rep: &InducedRep) -> Result<(u128, u128)> {
        let g = enumerate_monomial_group(&rep.generators(), self.cap)?;
        let a = diagonal_subgroup(&g);
        Ok((g.order() as u128, a.order() as u128))
    }

    /// The invariants of `ker U_α`; with `verify`, also enumerates `G_α` and
    /// `A_α` and fails on any disagreement with the formulas.
    pub fn kernel_report(&self, a: &Alpha, verify: bool) -> Result<KernelReport> {
        let kind = if verify {
            "kernel-report-verified"
        } else {
            "kernel-report"
        };
        self.cached(kind, &a.to_string(), || self.compute_kernel_report(a, verify))
    }

    fn compute_kernel_report(&self, a: &Alpha, verify: bool) -> Result<KernelReport> {
        let mut report = KernelReport::from_n(*a, a.n())?;
        report.verify_identities()?;
        if verify {
            if report.index > self.cap as u128 {
                return Err(Error::CapPredicted {
                    cap: self.cap,
                    predicted: report.index,
                });
            }
            let rep = InducedRep::new(*a)?;
            let (group_order, diagonal_order) = self.image_group_order(&rep)?;
            let checks = CrossChecks {
                group_order,
                diagonal_order,
                t_image_order: rep.t().order(),
            };
            let n3 = (report.n as u128).pow(3);
            if checks.group_order != report.index || checks.diagonal_order != n3 || checks.t_image_order != report.level
            {
                return Err(Error::Internal(format!(
                    "enumeration disagrees with the formulas for α = {a}: {checks:?}"
                )));
            }
            report.cross_checks = Some(checks);
        }
        Ok(report)
    }

    /// Decides whether `ker U_α` is a congruence subgroup by testing
    /// `Γ(4N) ≤ ker U_α` on Schreier generators.
    pub fn decide_congruence(&self, a: &Alpha) -> Result<CongruenceCertificate> {
        self.cached("congruence", &a.to_string(), || self.compute_congruence(a))
    }

    fn compute_congruence(&self, a: &Alpha) -> Result<CongruenceCertificate> {
        let n = a.n();
        let level = n.checked_mul(4).ok_or(Error::Overflow("4N"))?;
        let data = self.schreier_data(level)?;
        let rep = InducedRep::new(*a)?;
        let check = data.kernel_check(&rep);

        if let Some(w) = check.witness {
            let image = u_alpha(a, &w.matrix)?;
            let witness = Witness {
                matrix: w.matrix,
                word: w.word,
                image,
            };
            if !witness.recheck(a, level)? {
                return Err(Error::Internal(format!("witness for α = {a} does not re-verify")));
            }
            return Ok(CongruenceCertificate {
                alpha: *a,
                n,
                congruent: false,
                kernel: KernelId::Noncongruence,
                level,
                witness: Some(witness),
            });
        }

        // Γ(4N) ≤ ker U_α. The reverse inclusion holds when |G_α| equals
        // [PSL(2,Z) : Γ(4N)].
        let kernel = match n {
            1 => KernelId::Gamma4,
            2 => KernelId::Gamma8,
            _ => {
                return Err(Error::Internal(format!(
                    "Γ({level}) ≤ ker U_α for α = {a} with N = {n}: only N ≤ 2 can be congruent"
                )))
            }
        };
        let (group_order, diagonal_order) = self.image_group_order(&rep)?;
        if group_order != index_gamma(level)? {
            return Err(Error::Internal(format!(
                "|G_α| = {group_order} but [PSL(2,Z) : Γ({level})] = {}",
                index_gamma(level)?
            )));
        }
        if kernel == KernelId::Gamma4 && (diagonal_order != 1 || !gamma4_generators().iter().all(|g| in_ker_u(a, g))) {
            return Err(Error::Internal(format!("α = {a}: kernel should be Γ(4)")));
        }
        Ok(CongruenceCertificate {
            alpha: *a,
            n,
            congruent: true,
            kernel,
            level,
            witness: None,
        })
    }

    /// One row per α, computed in parallel and returned in α order.
    pub fn scan(&self, max_den: u64, full_range: bool) -> Result<Vec<ScanRow>> {
        let alphas = alphas_up_to(max_den, full_range);
        alphas
            .par_iter()
            .map(|a| {
                let report = self.kernel_report(a, false)?;
                let cert = self.decide_congruence(a)?;
                Ok(ScanRow {
                    alpha: *a,
                    n: report.n,
                    index: report.index,
                    genus: report.genus,
                    cusps: report.cusps,
                    level: report.level,
                    free_generators: report.free_generators,
                    congruent: cert.congruent,
                })
            })
            .collect()
    }
}
