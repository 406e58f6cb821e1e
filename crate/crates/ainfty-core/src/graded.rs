//! Graded bases, sparse elements, sparse multilinear maps, and the Koszul
//! sign engine.
//!
//! A [`MultiMap`] is the structure-constant tensor of a multilinear map
//! `H^{(x)k} -> H` of a fixed degree: a sparse map from `(input index tuple,
//! output index)` to an exact coefficient, kept in lexicographic order so all
//! iteration and serialization downstream is deterministic. The products
//! `m_k`, morphism components `f_k`, gauge generators and homotopy operators
//! are all `MultiMap`s distinguished only by their map degree.
//!
//! All Koszul signs in this crate come out of two composition helpers,
//! [`MultiMap::insert`] and [`MultiMap::blocks`]: a graded operator passing a
//! block of inputs contributes `(-1)^(deg(op) * deg(block))`. Nothing else
//! in the workspace hand-codes a sign table.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// A finite ordered basis with integer degrees. The order is fixed at
/// construction and defines index semantics everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    entries: Vec<(String, i64)>,
}

impl GradedBasis {
    pub fn new(entries: Vec<(String, i64)>) -> Result<Self> {
        for (i, (name, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Input(format!("duplicate basis name `{name}`")));
            }
        }
        Ok(GradedBasis { entries })
    }

    /// Basis with auto-generated names `e0, e1, ...` and the given degrees.
    pub fn with_degrees(degrees: &[i64]) -> Self {
        GradedBasis {
            entries: degrees
                .iter()
                .enumerate()
                .map(|(i, &d)| (format!("e{i}"), d))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn degree(&self, index: usize) -> i64 {
        self.entries[index].1
    }

    pub fn name(&self, index: usize) -> &str {
        &self.entries[index].0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, i64)> {
        self.entries.iter().enumerate().map(|(i, (n, d))| (i, n.as_str(), *d))
    }

    /// Sum of degrees of a tuple of indices.
    pub fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|&i| self.degree(i)).sum()
    }

    /// Indices of a given degree.
    pub fn indices_of_degree(&self, d: i64) -> Vec<usize> {
        self.iter().filter(|&(_, _, deg)| deg == d).map(|(i, _, _)| i).collect()
    }
}

/// The sign `(-1)^(operator degree * sum of degrees passed)`.
pub fn koszul_sign(degrees_passed: &[i64], operator_degree: i64) -> Scalar {
    let total: i64 = degrees_passed.iter().sum();
    Scalar::neg_one_pow(operator_degree * total)
}

/// A sparse vector over the scalar field, optionally declared homogeneous.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    coeffs: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis_vector(index: usize) -> Self {
        let mut e = Element::zero();
        e.add_term(index, Scalar::one());
        e
    }

    pub fn add_term(&mut self, index: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(index).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeff(&self, index: usize) -> Scalar {
        self.coeffs.get(&index).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn scaled(&self, c: &Scalar) -> Element {
        let mut out = Element::zero();
        for (i, v) in self.iter() {
            out.add_term(i, c * v);
        }
        out
    }

    pub fn add(&mut self, other: &Element) {
        for (i, v) in other.iter() {
            self.add_term(i, v.clone());
        }
    }

    pub fn sub(&mut self, other: &Element) {
        for (i, v) in other.iter() {
            self.add_term(i, -v);
        }
    }

    /// The common degree of all supported indices, if the element is
    /// homogeneous and nonzero.
    pub fn homogeneous_degree(&self, basis: &GradedBasis) -> Option<i64> {
        let mut deg = None;
        for (i, _) in self.iter() {
            match deg {
                None => deg = Some(basis.degree(i)),
                Some(d) if d != basis.degree(i) => return None,
                _ => {}
            }
        }
        deg
    }
}

/// Sparse structure constants of a degree-`d` multilinear map `H^(x)k -> H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    arity: usize,
    degree: i64,
    entries: BTreeMap<(Vec<usize>, usize), Scalar>,
}

impl MultiMap {
    pub fn new(arity: usize, degree: i64) -> Self {
        assert!(arity >= 1, "MultiMap arity must be at least 1");
        MultiMap { arity, degree, entries: BTreeMap::new() }
    }

    /// The identity operator as an arity-1, degree-0 map.
    pub fn identity(basis: &GradedBasis) -> Self {
        let mut m = MultiMap::new(1, 0);
        for i in 0..basis.dim() {
            m.entries.insert((alloc::vec![i], i), Scalar::one());
        }
        m
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `c` to the entry `(inputs, output)` without a degree check.
    /// Used internally where homogeneity holds by construction.
    pub fn add_term(&mut self, inputs: Vec<usize>, output: usize, c: Scalar) {
        assert_eq!(inputs.len(), self.arity, "tuple length != arity");
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry((inputs, output)).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.entries.retain(|_, v| !v.is_zero());
        }
    }

    /// Adds an entry, enforcing degree homogeneity against `basis`:
    /// `deg(out) = sum(deg(in)) + map degree`.
    pub fn add_checked(
        &mut self,
        basis: &GradedBasis,
        inputs: Vec<usize>,
        output: usize,
        c: Scalar,
    ) -> Result<()> {
        let din = basis.word_degree(&inputs);
        let dout = basis.degree(output);
        if dout != din + self.degree {
            return Err(Error::Input(format!(
                "degree-inhomogeneous entry: inputs {:?} (degree {din}) -> {} (degree {dout}) \
                 for a map of degree {}",
                inputs,
                basis.name(output),
                self.degree
            )));
        }
        self.add_term(inputs, output, c);
        Ok(())
    }

    pub fn coeff(&self, inputs: &[usize], output: usize) -> Scalar {
        self.entries
            .get(&(inputs.to_vec(), output))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], usize, &Scalar)> {
        self.entries.iter().map(|((w, o), c)| (w.as_slice(), *o, c))
    }

    /// Lexicographically smallest entry, as a failure witness.
    pub fn first_entry(&self) -> Option<(Vec<usize>, usize, Scalar)> {
        self.entries
            .iter()
            .next()
            .map(|((w, o), c)| (w.clone(), *o, c.clone()))
    }

    pub fn add(&mut self, other: &MultiMap) {
        assert_eq!(self.arity, other.arity);
        assert_eq!(self.degree, other.degree);
        for (w, o, c) in other.iter() {
            self.add_term(w.to_vec(), o, c.clone());
        }
    }

    pub fn sub(&mut self, other: &MultiMap) {
        assert_eq!(self.arity, other.arity);
        for (w, o, c) in other.iter() {
            self.add_term(w.to_vec(), o, -c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> MultiMap {
        let mut out = MultiMap::new(self.arity, self.degree);
        for (w, o, v) in self.iter() {
            out.add_term(w.to_vec(), o, c * v);
        }
        out
    }

    /// Multilinear evaluation on elements. `args.len()` must equal the arity.
    pub fn contract(&self, args: &[Element]) -> Result<Element> {
        if args.len() != self.arity {
            return Err(Error::Input(format!(
                "contract: expected {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        let mut out = Element::zero();
        for (word, o, c) in self.iter() {
            let mut factor = c.clone();
            for (slot, &idx) in word.iter().enumerate() {
                let a = args[slot].coeff(idx);
                if a.is_zero() {
                    factor = Scalar::zero();
                    break;
                }
                factor *= &a;
            }
            if !factor.is_zero() {
                out.add_term(o, factor);
            }
        }
        Ok(out)
    }

    /// Post-composition `outer . self` with an arity-1 map.
    pub fn then(&self, outer: &MultiMap) -> MultiMap {
        assert_eq!(outer.arity(), 1);
        let mut out = MultiMap::new(self.arity, self.degree + outer.degree);
        for (w, mid, c1) in self.iter() {
            for (w2, o, c2) in outer.iter() {
                if w2[0] == mid {
                    out.add_term(w.to_vec(), o, c1 * c2);
                }
            }
        }
        out
    }

    /// Arity-1 composition `self . other` (matrix product).
    pub fn compose1(&self, other: &MultiMap) -> MultiMap {
        assert_eq!(self.arity, 1);
        assert_eq!(other.arity, 1);
        let mut out = MultiMap::new(1, self.degree + other.degree);
        for (w, mid, c1) in other.iter() {
            for (w2, o, c2) in self.iter() {
                if w2[0] == mid {
                    out.add_term(w.to_vec(), o, c1 * c2);
                }
            }
        }
        out
    }

    /// `self . (1^(p) (x) inner (x) 1^(arity-p-1))`: substitutes `inner`
    /// into input slot `p` (0-based). The Koszul sign
    /// `(-1)^(deg(inner) * deg(first p inputs))` is generated here.
    pub fn insert(&self, basis: &GradedBasis, p: usize, inner: &MultiMap) -> MultiMap {
        assert!(p < self.arity);
        let mut out = MultiMap::new(self.arity + inner.arity - 1, self.degree + inner.degree);
        for (outer_word, o, c_o) in self.iter() {
            let hole = outer_word[p];
            for (inner_word, mid, c_i) in inner.iter() {
                if mid != hole {
                    continue;
                }
                let mut word = Vec::with_capacity(out.arity);
                word.extend_from_slice(&outer_word[..p]);
                word.extend_from_slice(inner_word);
                word.extend_from_slice(&outer_word[p + 1..]);
                let prefix_deg: i64 = outer_word[..p].iter().map(|&i| basis.degree(i)).sum();
                let sign = Scalar::neg_one_pow(inner.degree * prefix_deg);
                out.add_term(word, o, &(c_o * c_i) * &sign);
            }
        }
        out
    }

    /// `self . (inner_1 (x) ... (x) inner_arity)` with one inner map per
    /// input slot. Each inner of degree `d` passing earlier blocks
    /// contributes `(-1)^(d * deg(earlier inputs))`.
    pub fn blocks(&self, basis: &GradedBasis, inners: &[&MultiMap]) -> MultiMap {
        assert_eq!(inners.len(), self.arity);
        let total_arity: usize = inners.iter().map(|m| m.arity).sum();
        let total_degree: i64 = self.degree + inners.iter().map(|m| m.degree).sum::<i64>();
        let mut out = MultiMap::new(total_arity, total_degree);
        for (outer_word, o, c_o) in self.iter() {
            // Depth-first over choices of inner entries matching each slot.
            let mut stack: Vec<(usize, Vec<usize>, i64, Scalar)> =
                alloc::vec![(0, Vec::new(), 0i64, c_o.clone())];
            while let Some((slot, word, deg_so_far, coeff)) = stack.pop() {
                if slot == self.arity {
                    out.add_term(word, o, coeff);
                    continue;
                }
                let want = outer_word[slot];
                for (in_word, mid, c_i) in inners[slot].iter() {
                    if mid != want {
                        continue;
                    }
                    let sign = Scalar::neg_one_pow(inners[slot].degree * deg_so_far);
                    let mut w = word.clone();
                    w.extend_from_slice(in_word);
                    let block_deg: i64 = in_word.iter().map(|&i| basis.degree(i)).sum();
                    stack.push((slot + 1, w, deg_so_far + block_deg, &(&coeff * c_i) * &sign));
                }
            }
        }
        out
    }

    /// Checks degree homogeneity of every entry.
    pub fn check_homogeneous(&self, basis: &GradedBasis) -> Result<()> {
        for (w, o, _) in self.iter() {
            let din = basis.word_degree(w);
            if basis.degree(o) != din + self.degree {
                return Err(Error::Structure(format!(
                    "inhomogeneous entry {:?} -> {o} in degree-{} map",
                    w, self.degree
                )));
            }
        }
        Ok(())
    }

    /// Restricts entries to those whose inputs and output all satisfy `keep`.
    pub fn filter_indices(&self, keep: impl Fn(usize) -> bool) -> MultiMap {
        let mut out = MultiMap::new(self.arity, self.degree);
        for (w, o, c) in self.iter() {
            if keep(o) && w.iter().all(|&i| keep(i)) {
                out.add_term(w.to_vec(), o, c.clone());
            }
        }
        out
    }
}

/// A finite linear combination of tensor words of basis indices.
pub type WordSum = BTreeMap<Vec<usize>, Scalar>;

pub fn word_sum_add(sum: &mut WordSum, word: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = sum.entry(word).or_insert_with(Scalar::zero);
    *slot += &c;
    if slot.is_zero() {
        sum.retain(|_, v| !v.is_zero());
    }
}

/// Applies the coderivation lift of a single `m` of arity `k` to one tensor
/// word: the sum over positions `p` of
/// `(-1)^(deg(m) * deg(prefix)) prefix (x) m(window) (x) suffix`.
///
/// Words shorter than `k` give the empty result.
pub fn apply_coderivation(basis: &GradedBasis, m: &MultiMap, word: &[usize]) -> WordSum {
    let mut out = WordSum::new();
    let k = m.arity();
    if word.len() < k {
        return out;
    }
    for p in 0..=word.len() - k {
        let prefix_deg = basis.word_degree(&word[..p]);
        let sign = Scalar::neg_one_pow(m.degree() * prefix_deg);
        for (w, o, c) in m.iter() {
            if w == &word[p..p + k] {
                let mut new_word = Vec::with_capacity(word.len() - k + 1);
                new_word.extend_from_slice(&word[..p]);
                new_word.push(o);
                new_word.extend_from_slice(&word[p + k..]);
                word_sum_add(&mut out, new_word, &sign * c);
            }
        }
    }
    out
}

/// Coderivation lift of an arity-0 insertion (an element `a` of the given
/// degree): inserts the letters of `a` at every gap of the word.
pub fn apply_coderivation_element(
    basis: &GradedBasis,
    a: &Element,
    degree: i64,
    word: &[usize],
) -> WordSum {
    let mut out = WordSum::new();
    for p in 0..=word.len() {
        let prefix_deg = basis.word_degree(&word[..p]);
        let sign = Scalar::neg_one_pow(degree * prefix_deg);
        for (idx, c) in a.iter() {
            let mut new_word = Vec::with_capacity(word.len() + 1);
            new_word.extend_from_slice(&word[..p]);
            new_word.push(idx);
            new_word.extend_from_slice(&word[p..]);
            word_sum_add(&mut out, new_word, &sign * c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_dim() -> GradedBasis {
        // u of degree 0, t of degree 1
        GradedBasis::new(vec![("u".into(), 0), ("t".into(), 1)]).unwrap()
    }

    #[test]
    fn koszul_sign_examples() {
        assert_eq!(koszul_sign(&[], 1), Scalar::one());
        assert_eq!(koszul_sign(&[1], 1), -Scalar::one());
        // (-1)^(1*2) by direct product
        assert_eq!(koszul_sign(&[1, 1], 1), Scalar::one());
        assert_eq!(koszul_sign(&[1, 2, -1], 1), Scalar::one());
        assert_eq!(koszul_sign(&[3], -1), -Scalar::one());
    }

    #[test]
    fn coderivation_single_letter() {
        let basis = two_dim();
        let mut q = MultiMap::new(1, 1);
        q.add_checked(&basis, vec![0], 1, Scalar::one()).unwrap();
        let out = apply_coderivation(&basis, &q, &[0]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[&vec![1]], Scalar::one());
    }

    #[test]
    fn coderivation_leibniz_even_letter() {
        let basis = two_dim();
        let mut q = MultiMap::new(1, 1);
        q.add_checked(&basis, vec![0], 1, Scalar::one()).unwrap();
        // deg u = 0: Q(u (x) u) = t (x) u + u (x) t, both with +1
        let out = apply_coderivation(&basis, &q, &[0, 0]);
        assert_eq!(out[&vec![1, 0]], Scalar::one());
        assert_eq!(out[&vec![0, 1]], Scalar::one());
    }

    #[test]
    fn coderivation_sign_odd_letter() {
        // x of degree 1, y of degree 2, Qx = y: Q(x (x) x) = y(x)x - x(x)y
        let basis = GradedBasis::new(vec![("x".into(), 1), ("y".into(), 2)]).unwrap();
        let mut q = MultiMap::new(1, 1);
        q.add_checked(&basis, vec![0], 1, Scalar::one()).unwrap();
        let out = apply_coderivation(&basis, &q, &[0, 0]);
        assert_eq!(out[&vec![1, 0]], Scalar::one());
        assert_eq!(out[&vec![0, 1]], -Scalar::one());
    }

    #[test]
    fn contract_identity_and_zero() {
        let basis = two_dim();
        let id = MultiMap::identity(&basis);
        let mut v = Element::zero();
        v.add_term(0, Scalar::ratio(2, 3));
        v.add_term(1, Scalar::from_int(-1));
        assert_eq!(id.contract(&[v.clone()]).unwrap(), v);

        let mut m2 = MultiMap::new(2, 1);
        // m2(u, u) = t
        m2.add_checked(&basis, vec![0, 0], 1, Scalar::one()).unwrap();
        let z = Element::zero();
        assert!(m2.contract(&[v.clone(), z]).unwrap().is_zero());
        let u = Element::basis_vector(0);
        assert_eq!(
            m2.contract(&[u.clone(), u]).unwrap(),
            Element::basis_vector(1)
        );
        assert!(m2.contract(&[v]).is_err());
    }

    #[test]
    fn inhomogeneous_entry_rejected() {
        let basis = two_dim();
        let mut m = MultiMap::new(1, 1);
        assert!(m.add_checked(&basis, vec![1], 0, Scalar::one()).is_err());
    }

    #[test]
    fn insert_generates_prefix_sign() {
        // basis: a (deg 1); inner = degree-1 map a -> b; outer = 2-ary map.
        let basis = GradedBasis::new(vec![("a".into(), 1), ("b".into(), 2)]).unwrap();
        let mut q = MultiMap::new(1, 1);
        q.add_checked(&basis, vec![0], 1, Scalar::one()).unwrap();
        let mut outer = MultiMap::new(2, 0);
        // outer(a, b) = a  (degrees: 1+2+0 = 3? no: pick outer degree to fit)
        // use outer of degree -2: deg(out a)=1 = 1+2-2
        let mut outer2 = MultiMap::new(2, -2);
        outer2.add_checked(&basis, vec![0, 1], 0, Scalar::one()).unwrap();
        outer = outer2;
        // insert q at slot 1: outer(a, q(a)): sign (-1)^(1*deg a) = -1
        let composed = outer.insert(&basis, 1, &q);
        assert_eq!(composed.coeff(&[0, 0], 0), -Scalar::one());
        // insert q at slot 0: no prefix, sign +1, but outer has no entry with
        // first slot b, so empty.
        let composed0 = outer.insert(&basis, 0, &q);
        assert!(composed0.is_zero());
    }
}
