//! Finite-group machinery: BFS closure of monomial groups, the coset table of
//! PSL(2,Z) acting on PSL(2,Z/n), and Reidemeister–Schreier generators of Γ(n).

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::induced::InducedRep;
use crate::monomial::Monomial;
use crate::psl2z::{ModularElement, ResidueElement, STWord, Token};

pub const DEFAULT_CAP: usize = 1_000_000;
pub const DEFAULT_MAX_MODULUS: u64 = 64;

/// A finite group of monomial matrices, listed in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedMonomialGroup {
    elements: Vec<Monomial>,
    generators: Vec<Monomial>,
}

impl EnumeratedMonomialGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    pub fn contains(&self, x: &Monomial) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Closure of `gens` under multiplication, refusing to grow past `cap`.
pub fn enumerate_monomial_group(gens: &[Monomial], cap: usize) -> Result<EnumeratedMonomialGroup> {
    if cap == 0 {
        return Err(Error::Domain("enumeration cap must be at least 1".into()));
    }
    let id = Monomial::identity();
    let mut seen: HashSet<Monomial> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        partial: seen.len(),
                    });
                }
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Monomial> = seen.into_iter().collect();
    elements.par_sort_unstable();
    Ok(EnumeratedMonomialGroup {
        elements,
        generators: gens.to_vec(),
    })
}

/// The diagonal elements of `g`.
pub fn diagonal_subgroup(g: &EnumeratedMonomialGroup) -> EnumeratedMonomialGroup {
    let elements: Vec<Monomial> = g.elements.iter().filter(|x| x.is_diagonal()).copied().collect();
    EnumeratedMonomialGroup {
        generators: elements.clone(),
        elements,
    }
}

/// Letters acting on cosets, in BFS order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    S,
    T,
    SInv,
    TInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::S, Letter::T, Letter::SInv, Letter::TInv];

    fn column(self) -> usize {
        self as usize
    }

    pub fn token(self) -> Token {
        match self {
            Letter::S | Letter::SInv => Token::S,
            Letter::T => Token::T(BigInt::from(1)),
            Letter::TInv => Token::T(BigInt::from(-1)),
        }
    }

    fn residue(self, n: u32) -> ResidueElement {
        match self {
            Letter::S | Letter::SInv => ResidueElement::s(n),
            Letter::T => ResidueElement::t(n),
            Letter::TInv => ResidueElement::t_inv(n),
        }
    }

    fn image(self, rep: &InducedRep) -> Monomial {
        match self {
            Letter::S | Letter::SInv => *rep.s(),
            Letter::T => *rep.t(),
            Letter::TInv => *rep.t_inv(),
        }
    }
}

/// `word(coset) · letter · word(coset·letter)⁻¹`, an element of Γ(n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchreierGenerator {
    pub coset: usize,
    pub letter: Letter,
    pub word: String,
    pub matrix: ModularElement,
}

/// PSL(2,Z/n) as the coset space Γ(n)\PSL(2,Z), with a BFS spanning tree.
#[derive(Clone, Debug)]
pub struct SchreierData {
    n: u32,
    elements: Vec<ResidueElement>,
    index: HashMap<ResidueElement, usize>,
    parent: Vec<Option<(usize, Letter)>>,
    table: Vec<[usize; 4]>,
}

/// BFS over `{S, T, S⁻¹, T⁻¹}` from the identity of PSL(2,Z/n).
pub fn enumerate_psl2_zn(n: u64, max_modulus: u64) -> Result<SchreierData> {
    if n < 2 {
        return Err(Error::Domain(format!("modulus must be at least 2, got {n}")));
    }
    if n > max_modulus {
        return Err(Error::ModulusBound {
            modulus: n,
            bound: max_modulus,
        });
    }
    let n32 = u32::try_from(n).map_err(|_| Error::Overflow("modulus above u32"))?;
    let gens = Letter::ALL.map(|l| l.residue(n32));

    let id = ResidueElement::identity(n32);
    let mut elements = vec![id];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut parent = vec![None];
    let mut table: Vec<[usize; 4]> = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head];
        let mut row = [0usize; 4];
        for (letter, g) in Letter::ALL.iter().zip(&gens) {
            let y = x.mul(g);
            let next = elements.len();
            let j = *index.entry(y).or_insert(next);
            if j == next {
                elements.push(y);
                parent.push(Some((head, *letter)));
            }
            row[letter.column()] = j;
        }
        table.push(row);
        head += 1;
    }
    Ok(SchreierData {
        n: n32,
        elements,
        index,
        parent,
        table,
    })
}

impl SchreierData {
    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ResidueElement] {
        &self.elements
    }

    pub fn index_of(&self, x: &ResidueElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn act(&self, coset: usize, letter: Letter) -> usize {
        self.table[coset][letter.column()]
    }

    fn path(&self, mut coset: usize) -> Vec<Letter> {
        let mut letters = Vec::new();
        while let Some((p, l)) = self.parent[coset] {
            letters.push(l);
            coset = p;
        }
        letters.reverse();
        letters
    }

    /// The spanning-tree word of a coset.
    pub fn tree_word(&self, coset: usize) -> STWord {
        STWord::from_tokens(self.path(coset).into_iter().map(Letter::token))
    }

    /// Reduced word of the Schreier generator for `(coset, letter)`.
    pub fn schreier_word(&self, coset: usize, letter: Letter) -> STWord {
        let target = self.act(coset, letter);
        self.tree_word(coset)
            .concat(&STWord::from_tokens([letter.token()]))
            .concat(&self.tree_word(target).inverse())
    }

    fn is_tree_edge(&self, coset: usize, letter: Letter) -> bool {
        let target = self.act(coset, letter);
        self.parent[target] == Some((coset, letter))
    }

    /// Nontrivial Schreier generators for `x ∈ {S, T}`, ordered by
    /// `(coset, letter)`, with duplicates and identities removed.
    pub fn schreier_generators(&self) -> Vec<SchreierGenerator> {
        let candidates: Vec<(usize, Letter)> = (0..self.order())
            .flat_map(|c| [(c, Letter::S), (c, Letter::T)])
            .filter(|&(c, l)| !self.is_tree_edge(c, l))
            .collect();
        let built: Vec<Option<SchreierGenerator>> = candidates
            .par_iter()
            .map(|&(coset, letter)| {
                let word = self.schreier_word(coset, letter);
                let matrix = word.eval();
                (!matrix.is_identity()).then(|| SchreierGenerator {
                    coset,
                    letter,
                    word: word.to_string(),
                    matrix,
                })
            })
            .collect();
        let mut seen = HashSet::new();
        built
            .into_iter()
            .flatten()
            .filter(|g| seen.insert(g.matrix.clone()))
            .collect()
    }

    /// `U(tree_word(c))` for every coset `c`.
    pub fn coset_images(&self, rep: &InducedRep) -> Vec<Monomial> {
        let mut images: Vec<Monomial> = Vec::with_capacity(self.order());
        for c in 0..self.order() {
            let img = match self.parent[c] {
                None => Monomial::identity(),
                Some((p, l)) => images[p].mul(&l.image(rep)),
            };
            images.push(img);
        }
        images
    }

    /// Whether `U` kills every Schreier generator; the first one it does
    /// not kill, in `(coset, letter)` order, is returned as a witness.
    pub fn kernel_check(&self, rep: &InducedRep) -> InclusionCheck {
        let images = self.coset_images(rep);
        let failing = (0..self.order())
            .flat_map(|c| [(c, Letter::S), (c, Letter::T)])
            .find(|&(c, l)| {
                let target = self.act(c, l);
                !images[c]
                    .mul(&l.image(rep))
                    .mul(&images[target].inverse())
                    .is_identity()
            });
        let witness = failing.map(|(coset, letter)| {
            let word = self.schreier_word(coset, letter);
            let matrix = word.eval();
            SchreierGenerator {
                coset,
                letter,
                word: word.to_string(),
                matrix,
            }
        });
        InclusionCheck {
            modulus: self.n,
            holds: witness.is_none(),
            witness,
        }
    }

    /// Reidemeister–Schreier rewriting: for `w ∈ Γ(n)`, returns the Schreier
    /// generators `(coset, letter, inverted)` whose product is `w`.
    pub fn rewrite(&self, w: &STWord) -> Result<Vec<(usize, Letter, bool)>> {
        let mut coset = 0usize;
        let mut out = Vec::new();
        for tok in w.tokens() {
            let (letter, count) = match tok {
                Token::S => (Letter::S, 1u64),
                Token::T(k) => {
                    let c = k
                        .abs()
                        .to_u64()
                        .filter(|c| *c <= 1_000_000)
                        .ok_or_else(|| Error::Domain(format!("exponent {k} too large to rewrite")))?;
                    (if k.is_negative() { Letter::TInv } else { Letter::T }, c)
                }
            };
            for _ in 0..count {
                match letter {
                    Letter::TInv => {
                        // s(c, T⁻¹) = s(c T⁻¹, T)⁻¹
                        let prev = self.act(coset, Letter::TInv);
                        out.push((prev, Letter::T, true));
                        coset = prev;
                    }
                    _ => {
                        out.push((coset, letter, false));
                        coset = self.act(coset, letter);
                    }
                }
            }
        }
        if coset != 0 {
            return Err(Error::Membership {
                element: w.to_string(),
                group: "Γ(n)",
            });
        }
        Ok(out)
    }
}

/// Outcome of testing `Γ(n) ≤ ker U_α` on Schreier generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionCheck {
    pub modulus: u32,
    pub holds: bool,
    pub witness: Option<SchreierGenerator>,
}

/// `Γ(n) ≤ ker U_α`, decided on the Schreier generators of Γ(n).
pub fn contains_gamma_n_in_kernel(rep: &InducedRep, n: u64, max_modulus: u64) -> Result<InclusionCheck> {
    Ok(enumerate_psl2_zn(n, max_modulus)?.kernel_check(rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::Alpha;
    use crate::induced::{a_generators, gamma4_generators, u_zero, GAMMA4_GENERATOR_WORDS};
    use crate::psl2z::{in_gamma, index_gamma};

    #[test]
    fn small_monomial_groups() {
        let g0 = enumerate_monomial_group(&InducedRep::new(Alpha::ZERO).unwrap().generators(), DEFAULT_CAP).unwrap();
        assert_eq!(g0.order(), 24);
        assert_eq!(diagonal_subgroup(&g0).order(), 1);
        let trivial = enumerate_monomial_group(&[Monomial::identity()], 10).unwrap();
        assert_eq!(trivial.order(), 1);
        let g =
            enumerate_monomial_group(&InducedRep::new(Alpha::new(1, 8)).unwrap().generators(), DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 192);
        assert!(g.contains(&Monomial::identity()));
        let a = diagonal_subgroup(&g);
        assert_eq!(a.order(), 8);
        let closure = enumerate_monomial_group(&a_generators(&Alpha::new(1, 8)).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(closure.elements(), a.elements());
    }

    #[test]
    fn cap_is_enforced() {
        let gens = InducedRep::new(Alpha::new(1, 3)).unwrap().generators();
        match enumerate_monomial_group(&gens, 100) {
            Err(Error::CapExceeded { cap: 100, partial }) => assert!(partial > 100),
            other => panic!("expected cap error, got {other:?}"),
        }
        let g = enumerate_monomial_group(&gens, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 648);
        assert_eq!(diagonal_subgroup(&g).order(), 27);
    }

    #[test]
    fn closure_spot_check() {
        let g =
            enumerate_monomial_group(&InducedRep::new(Alpha::new(1, 5)).unwrap().generators(), DEFAULT_CAP).unwrap();
        for x in g.elements().iter().step_by(97) {
            assert!(g.contains(&x.inverse()));
            for y in g.elements().iter().step_by(131) {
                assert!(g.contains(&x.mul(y)));
            }
        }
    }

    #[test]
    fn psl2_zn_sizes() {
        assert_eq!(enumerate_psl2_zn(2, 64).unwrap().order(), 6);
        assert_eq!(enumerate_psl2_zn(4, 64).unwrap().order(), 24);
        assert_eq!(enumerate_psl2_zn(8, 64).unwrap().order(), 192);
        assert!(matches!(enumerate_psl2_zn(65, 64), Err(Error::ModulusBound { .. })));
        assert!(enumerate_psl2_zn(1, 64).is_err());
    }

    #[test]
    fn table_is_a_permutation_action() {
        let data = enumerate_psl2_zn(6, 64).unwrap();
        for l in Letter::ALL {
            let mut hit = vec![false; data.order()];
            for c in 0..data.order() {
                hit[data.act(c, l)] = true;
            }
            assert!(hit.iter().all(|&h| h));
        }
        for c in 0..data.order() {
            assert_eq!(data.tree_word(c).eval().reduce_mod(6), data.elements()[c]);
        }
    }

    #[test]
    fn schreier_generators_of_gamma4() {
        let data = enumerate_psl2_zn(4, 64).unwrap();
        let gens = data.schreier_generators();
        assert!(!gens.is_empty());
        for g in &gens {
            assert!(in_gamma(&g.matrix, 4));
            assert!(u_zero(&g.matrix).unwrap().is_identity());
        }
        // g₁..g₅ rewrite into products of Schreier generators
        for (w, g) in GAMMA4_GENERATOR_WORDS.iter().zip(gamma4_generators()) {
            let word: STWord = w.parse().unwrap();
            let factors = data.rewrite(&word).unwrap();
            let product = factors.iter().fold(ModularElement::identity(), |acc, &(c, l, inv)| {
                let s = data.schreier_word(c, l).eval();
                acc.mul(&if inv { s.inverse() } else { s })
            });
            assert_eq!(product, g);
        }
        assert!(data.rewrite(&"T".parse().unwrap()).is_err());
    }

    #[test]
    fn schreier_generators_of_gamma2() {
        let data = enumerate_psl2_zn(2, 64).unwrap();
        let gens = data.schreier_generators();
        assert!(gens.len() >= 2);
        assert!(gens.iter().all(|g| in_gamma(&g.matrix, 2)));
    }

    #[test]
    fn index_formula_matches_enumeration() {
        for n in 2..=12u64 {
            assert_eq!(
                enumerate_psl2_zn(n, 64).unwrap().order() as u128,
                index_gamma(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn inclusion_examples() {
        let zero = InducedRep::new(Alpha::ZERO).unwrap();
        assert!(contains_gamma_n_in_kernel(&zero, 4, 64).unwrap().holds);
        let eighth = InducedRep::new(Alpha::new(1, 8)).unwrap();
        assert!(contains_gamma_n_in_kernel(&eighth, 8, 64).unwrap().holds);
        assert!(!contains_gamma_n_in_kernel(&eighth, 4, 64).unwrap().holds);
        let third = InducedRep::new(Alpha::new(1, 3)).unwrap();
        let check = contains_gamma_n_in_kernel(&third, 12, 64).unwrap();
        assert!(!check.holds);
        let w = check.witness.unwrap();
        assert!(in_gamma(&w.matrix, 12));
        assert!(!crate::induced::u_alpha(&third.alpha(), &w.matrix)
            .unwrap()
            .is_identity());
        assert_eq!(w.word.parse::<STWord>().unwrap().eval(), w.matrix);
    }
}
