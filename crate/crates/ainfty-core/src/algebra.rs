//! A-infinity structures, odd symplectic forms, morphisms, and homotopies,
//! with every defining identity exposed as a defect computation.
//!
//! A defect is a sparse tensor that is zero exactly when the identity holds;
//! verifiers return the lexicographically smallest nonzero entry as a
//! witness, so failures are reproducible and localizable.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graded::{Element, GradedBasis, MultiMap};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// All ordered compositions of `n` into positive parts.
pub(crate) fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            let mut comp = alloc::vec![first];
            comp.append(&mut rest);
            out.push(comp);
        }
    }
    out
}

/// Outcome of an identity check, with the smallest failing entry.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub pass: bool,
    pub checked: usize,
    /// `(arity or word-length n, input tuple, output index (usize::MAX for
    /// scalar-valued tensors), defect value)`
    pub witness: Option<(usize, Vec<usize>, usize, Scalar)>,
}

impl CheckReport {
    pub fn passing(checked: usize) -> Self {
        CheckReport { pass: true, checked, witness: None }
    }

    pub fn failing(checked: usize, n: usize, word: Vec<usize>, out: usize, v: Scalar) -> Self {
        CheckReport { pass: false, checked, witness: Some((n, word, out, v)) }
    }

    pub fn describe(&self, basis: &GradedBasis) -> String {
        match &self.witness {
            None => format!("pass ({} identities checked)", self.checked),
            Some((n, word, out, v)) => {
                let inputs: Vec<&str> = word.iter().map(|&i| basis.name(i)).collect();
                let target = if *out == usize::MAX {
                    String::from("scalar")
                } else {
                    String::from(basis.name(*out))
                };
                format!(
                    "FAIL at n={n}: inputs ({}) -> {target}, defect {v} ({} identities checked)",
                    inputs.join(", "),
                    self.checked
                )
            }
        }
    }
}

/// An A-infinity structure: a graded basis plus degree-one products `m_k`
/// for `1 <= k <= max_arity`. Absent arities are zero maps.
#[derive(Clone, Debug)]
pub struct AInfinity {
    basis: GradedBasis,
    maps: BTreeMap<usize, MultiMap>,
    max_arity: usize,
}

impl AInfinity {
    pub fn new(basis: GradedBasis, max_arity: usize) -> Self {
        AInfinity { basis, maps: BTreeMap::new(), max_arity }
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn set_map(&mut self, m: MultiMap) -> Result<()> {
        if m.degree() != 1 {
            return Err(Error::Input(format!(
                "product of arity {} has degree {}, expected +1",
                m.arity(),
                m.degree()
            )));
        }
        m.check_homogeneous(&self.basis)?;
        if m.arity() == 0 {
            return Err(Error::Input("weak structures (m_0) are not supported".into()));
        }
        self.maps.insert(m.arity(), m);
        Ok(())
    }

    pub fn map(&self, k: usize) -> Option<&MultiMap> {
        self.maps.get(&k)
    }

    pub fn map_or_zero(&self, k: usize) -> MultiMap {
        self.maps.get(&k).cloned().unwrap_or_else(|| MultiMap::new(k, 1))
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.maps.keys().copied()
    }

    pub fn differential(&self) -> MultiMap {
        self.map_or_zero(1)
    }

    /// The Stasheff defect at arity `n`: the sum over `k + l = n + 1` of all
    /// insertions of `m_l` into `m_k` with the Koszul prefix sign. Zero iff
    /// the structure satisfies the arity-`n` identity.
    pub fn stasheff_defect(&self, n: usize) -> Result<MultiMap> {
        if n < 1 {
            return Err(Error::Input("stasheff_defect needs n >= 1".into()));
        }
        let mut defect = MultiMap::new(n, 2);
        for k in 1..=n {
            let l = n + 1 - k;
            let (Some(mk), Some(ml)) = (self.maps.get(&k), self.maps.get(&l)) else {
                continue;
            };
            for p in 0..k {
                defect.add(&mk.insert(&self.basis, p, ml));
            }
        }
        Ok(defect)
    }

    /// Checks the Stasheff identities for all `1 <= n <= n_max`.
    pub fn verify(&self, n_max: usize) -> Result<CheckReport> {
        let mut checked = 0;
        for n in 1..=n_max {
            let defect = self.stasheff_defect(n)?;
            checked += 1;
            if let Some((w, o, v)) = defect.first_entry() {
                return Ok(CheckReport::failing(checked, n, w, o, v));
            }
        }
        Ok(CheckReport::passing(checked))
    }

    /// The coderivation applied to a tensor word: the sum over all products
    /// and positions.
    pub fn coderivation_word(&self, word: &[usize]) -> crate::graded::WordSum {
        let mut out = crate::graded::WordSum::new();
        for m in self.maps.values() {
            for (w, c) in crate::graded::apply_coderivation(&self.basis, m, word) {
                crate::graded::word_sum_add(&mut out, w, c);
            }
        }
        out
    }
}

/// An odd constant symplectic structure: nondegenerate, degree minus one,
/// skew. The inverse matrix is computed and cached at construction.
#[derive(Clone, Debug)]
pub struct SymplecticForm {
    dim: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
    inverse: BTreeMap<(usize, usize), Scalar>,
}

impl SymplecticForm {
    /// Builds from the entries `omega(e_i, e_j)`. Either both `(i, j)` and
    /// `(j, i)` may be given (checked for skewness) or only one (the other
    /// is filled in).
    pub fn new(basis: &GradedBasis, given: &[(usize, usize, Scalar)]) -> Result<Self> {
        let dim = basis.dim();
        let mut entries: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (i, j, c) in given {
            if c.is_zero() {
                continue;
            }
            if basis.degree(*i) + basis.degree(*j) != 1 {
                return Err(Error::Input(format!(
                    "omega entry ({}, {}) violates degree minus one",
                    basis.name(*i),
                    basis.name(*j)
                )));
            }
            let slot = entries.entry((*i, *j)).or_insert_with(Scalar::zero);
            *slot += c;
        }
        entries.retain(|_, v| !v.is_zero());
        // Fill or check skew partners.
        let keys: Vec<(usize, usize)> = entries.keys().copied().collect();
        for (i, j) in keys {
            let v = entries[&(i, j)].clone();
            match entries.get(&(j, i)) {
                None => {
                    entries.insert((j, i), -&v);
                }
                Some(w) => {
                    if !(w.clone() + &v).is_zero() {
                        return Err(Error::Input(format!(
                            "omega is not skew at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        let mut mat = Matrix::zero(dim, dim);
        for ((i, j), v) in &entries {
            mat.set(*i, *j, v.clone());
        }
        let inv = mat
            .inverse()
            .ok_or_else(|| Error::Structure("omega is degenerate".into()))?;
        let mut inverse = BTreeMap::new();
        for i in 0..dim {
            for j in 0..dim {
                if !inv.get(i, j).is_zero() {
                    inverse.insert((i, j), inv.get(i, j).clone());
                }
            }
        }
        Ok(SymplecticForm { dim, entries, inverse })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `omega^{ij}` with `sum_j omega_{ij} omega^{jk} = delta_i^k`.
    pub fn inverse_entry(&self, i: usize, j: usize) -> Scalar {
        self.inverse.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), c)| (i, j, c))
    }

    /// Pairs two elements: `omega(a, b)`.
    pub fn pair(&self, a: &Element, b: &Element) -> Scalar {
        let mut out = Scalar::zero();
        for (i, ca) in a.iter() {
            for (j, cb) in b.iter() {
                let w = self.entry(i, j);
                if !w.is_zero() {
                    out += &(&(ca * cb) * &w);
                }
            }
        }
        out
    }

    /// Restriction `omega(iota (x) iota)` to a subset of the basis, indexed
    /// by positions in `indices`.
    pub fn restrict(&self, basis: &GradedBasis, indices: &[usize]) -> Result<SymplecticForm> {
        let sub_degrees: Vec<i64> = indices.iter().map(|&i| basis.degree(i)).collect();
        let sub_basis = GradedBasis::with_degrees(&sub_degrees);
        let mut given = Vec::new();
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                let v = self.entry(i, j);
                if !v.is_zero() {
                    given.push((a, b, v));
                }
            }
        }
        SymplecticForm::new(&sub_basis, &given)
    }
}

/// A scalar-valued multilinear tensor `H^(x)n -> scalars`, used for the
/// cyclic vertices `V_{k+1}` and tree amplitudes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CyclicTensor {
    arity: usize,
    entries: BTreeMap<Vec<usize>, Scalar>,
}

impl CyclicTensor {
    pub fn new(arity: usize) -> Self {
        CyclicTensor { arity, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn add_term(&mut self, word: Vec<usize>, c: Scalar) {
        assert_eq!(word.len(), self.arity);
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(word).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.entries.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, word: &[usize]) -> Scalar {
        self.entries.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.entries.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn first_entry(&self) -> Option<(Vec<usize>, Scalar)> {
        self.entries.iter().next().map(|(w, c)| (w.clone(), c.clone()))
    }

    pub fn add(&mut self, other: &CyclicTensor) {
        assert_eq!(self.arity, other.arity);
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), c.clone());
        }
    }

    pub fn sub(&mut self, other: &CyclicTensor) {
        assert_eq!(self.arity, other.arity);
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), -c);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> CyclicTensor {
        let mut out = CyclicTensor::new(self.arity);
        for (w, c) in self.iter() {
            out.add_term(w.to_vec(), s * c);
        }
        out
    }

    /// First entry violating graded cyclic symmetry
    /// `V(o_1..o_n) = (-1)^(deg o_1 * deg(o_2..o_n)) V(o_2..o_n, o_1)`.
    pub fn cyclicity_witness(&self, basis: &GradedBasis) -> Option<(Vec<usize>, Scalar)> {
        let mut keys: Vec<Vec<usize>> = self.entries.keys().cloned().collect();
        // Also check rotations of supported words (entries that should be
        // nonzero by symmetry but are missing).
        for w in self.entries.keys() {
            let mut rot = w.clone();
            if !rot.is_empty() {
                let first = rot.remove(0);
                rot.push(first);
                keys.push(rot);
            }
        }
        keys.sort();
        keys.dedup();
        for w in keys {
            if w.is_empty() {
                continue;
            }
            let mut rot = w.clone();
            let first = rot.remove(0);
            rot.push(first);
            let tail_deg: i64 = w[1..].iter().map(|&i| basis.degree(i)).sum();
            let sign = Scalar::neg_one_pow(basis.degree(w[0]) * tail_deg);
            let lhs = self.coeff(&w);
            let rhs = &sign * &self.coeff(&rot);
            let diff = lhs - rhs;
            if !diff.is_zero() {
                return Some((w, diff));
            }
        }
        None
    }
}

/// The cyclic vertex `V_{k+1}(o_0, ..., o_k) = (-1)^(deg o_0)
/// omega(o_0, m_k(o_1, ..., o_k))` as a scalar tensor.
pub fn cyclic_vertex(omega: &SymplecticForm, algebra: &AInfinity, k: usize) -> Result<CyclicTensor> {
    if k < 1 {
        return Err(Error::Input("cyclic_vertex needs k >= 1".into()));
    }
    let basis = algebra.basis();
    let mut v = CyclicTensor::new(k + 1);
    let Some(mk) = algebra.map(k) else {
        return Ok(v);
    };
    for (w, out, c) in mk.iter() {
        for i0 in 0..basis.dim() {
            let om = omega.entry(i0, out);
            if om.is_zero() {
                continue;
            }
            let sign = Scalar::neg_one_pow(basis.degree(i0));
            let mut word = Vec::with_capacity(k + 1);
            word.push(i0);
            word.extend_from_slice(w);
            v.add_term(word, &(&sign * &om) * c);
        }
    }
    Ok(v)
}

/// Inverse of [`cyclic_vertex`]: recovers the structure constants by raising
/// the first index, `c^j = (-1)^(deg e_m) omega^{jm} V_{m i_1 .. i_k}`.
pub fn structure_from_vertex(
    omega: &SymplecticForm,
    basis: &GradedBasis,
    v: &CyclicTensor,
) -> Result<MultiMap> {
    if v.arity() < 2 {
        return Err(Error::Input("vertex tensor must have arity >= 2".into()));
    }
    let k = v.arity() - 1;
    let mut m = MultiMap::new(k, 1);
    for (word, c) in v.iter() {
        let first = word[0];
        let sign = Scalar::neg_one_pow(basis.degree(first));
        for j in 0..basis.dim() {
            let inv = omega.inverse_entry(j, first);
            if inv.is_zero() {
                continue;
            }
            m.add_checked(basis, word[1..].to_vec(), j, &(&sign * &inv) * c)?;
        }
    }
    Ok(m)
}

/// Checks that every product of `algebra` up to arity `n_max - 1` has a
/// cyclically symmetric vertex tensor with respect to `omega`.
pub fn verify_cyclicity(
    omega: &SymplecticForm,
    algebra: &AInfinity,
    n_max: usize,
) -> Result<CheckReport> {
    let mut checked = 0;
    for k in 1..n_max.max(2) {
        let v = cyclic_vertex(omega, algebra, k)?;
        checked += 1;
        if let Some((w, diff)) = v.cyclicity_witness(algebra.basis()) {
            return Ok(CheckReport::failing(checked, k + 1, w, usize::MAX, diff));
        }
    }
    Ok(CheckReport::passing(checked))
}

/// A collection of degree-zero components `f_k` defining a cohomomorphism
/// between tensor coalgebras (an A-infinity morphism candidate).
#[derive(Clone, Debug)]
pub struct Morphism {
    source: GradedBasis,
    target: GradedBasis,
    components: BTreeMap<usize, MultiMap>,
    max_arity: usize,
}

impl Morphism {
    pub fn new(source: GradedBasis, target: GradedBasis, max_arity: usize) -> Self {
        Morphism { source, target, components: BTreeMap::new(), max_arity }
    }

    pub fn identity(basis: &GradedBasis, max_arity: usize) -> Self {
        let mut f = Morphism {
            source: basis.clone(),
            target: basis.clone(),
            components: BTreeMap::new(),
            max_arity,
        };
        f.components.insert(1, MultiMap::identity(basis));
        f
    }

    /// Extends a linear map (arity-1, degree-0 tensor) by zero higher
    /// components.
    pub fn from_linear(
        source: GradedBasis,
        target: GradedBasis,
        f1: MultiMap,
        max_arity: usize,
    ) -> Result<Self> {
        if f1.arity() != 1 || f1.degree() != 0 {
            return Err(Error::Input("linear part must be an arity-1, degree-0 map".into()));
        }
        let mut f = Morphism { source, target, components: BTreeMap::new(), max_arity };
        f.set_component(f1)?;
        Ok(f)
    }

    pub fn source(&self) -> &GradedBasis {
        &self.source
    }

    pub fn target(&self) -> &GradedBasis {
        &self.target
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn set_component(&mut self, f: MultiMap) -> Result<()> {
        if f.degree() != 0 {
            return Err(Error::Input(format!(
                "morphism component of arity {} has degree {}, expected 0",
                f.arity(),
                f.degree()
            )));
        }
        // Homogeneity is mixed-basis: inputs in source, output in target.
        for (w, o, _) in f.iter() {
            let din: i64 = w.iter().map(|&i| self.source.degree(i)).sum();
            if self.target.degree(o) != din {
                return Err(Error::Input(format!(
                    "inhomogeneous morphism entry {:?} -> {o}",
                    w
                )));
            }
        }
        self.components.insert(f.arity(), f);
        Ok(())
    }

    pub fn component(&self, k: usize) -> Option<&MultiMap> {
        self.components.get(&k)
    }

    pub fn component_or_zero(&self, k: usize) -> MultiMap {
        self.components.get(&k).cloned().unwrap_or_else(|| MultiMap::new(k, 0))
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    pub fn linear_part(&self) -> MultiMap {
        self.component_or_zero(1)
    }

    /// The sum over compositions `n = k_1 + ... + k_i` of
    /// `inner(f_{k_1} (x) ... (x) f_{k_i})` for a given outer map `inner` of
    /// arity `i`. Shared by the defect, composition and conjugation code.
    fn blocks_into(&self, outer: &MultiMap, n: usize) -> MultiMap {
        let mut out = MultiMap::new(n, outer.degree());
        let i = outer.arity();
        for comp in compositions_with_parts(n, i) {
            let inners: Option<Vec<&MultiMap>> =
                comp.iter().map(|&k| self.components.get(&k)).collect();
            let Some(inners) = inners else { continue };
            out.add(&outer.blocks(&self.source, &inners));
        }
        out
    }

    /// Left side of the morphism identity at arity `n`:
    /// `sum_i m'_i (f (x) ... (x) f)`.
    fn morphism_lhs(&self, target_alg: &AInfinity, n: usize) -> MultiMap {
        let mut out = MultiMap::new(n, 1);
        for i in 1..=n {
            if let Some(mi) = target_alg.map(i) {
                out.add(&self.blocks_into(mi, n));
            }
        }
        out
    }

    /// Right side of the morphism identity at arity `n`:
    /// `sum f_k (1 .. m_l .. 1)` with Koszul prefix signs.
    fn morphism_rhs(&self, source_alg: &AInfinity, n: usize) -> MultiMap {
        let mut out = MultiMap::new(n, 1);
        for k in 1..=n {
            let l = n + 1 - k;
            let (Some(fk), Some(ml)) = (self.components.get(&k), source_alg.map(l)) else {
                continue;
            };
            for p in 0..k {
                out.add(&fk.insert(&self.source, p, ml));
            }
        }
        out
    }

    /// Defect of the A-infinity morphism identity at arity `n`
    /// (left minus right); zero iff the identity holds there.
    pub fn defect(&self, source_alg: &AInfinity, target_alg: &AInfinity, n: usize) -> Result<MultiMap> {
        if self.source != *source_alg.basis() || self.target != *target_alg.basis() {
            return Err(Error::Input("morphism_defect: basis mismatch".into()));
        }
        let mut d = self.morphism_lhs(target_alg, n);
        d.sub(&self.morphism_rhs(source_alg, n));
        Ok(d)
    }

    pub fn verify(
        &self,
        source_alg: &AInfinity,
        target_alg: &AInfinity,
        n_max: usize,
    ) -> Result<CheckReport> {
        let mut checked = 0;
        for n in 1..=n_max {
            let d = self.defect(source_alg, target_alg, n)?;
            checked += 1;
            if let Some((w, o, v)) = d.first_entry() {
                return Ok(CheckReport::failing(checked, n, w, o, v));
            }
        }
        Ok(CheckReport::passing(checked))
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if other.target != self.source {
            return Err(Error::Input("compose: basis mismatch".into()));
        }
        let max_arity = self.max_arity.min(other.max_arity);
        let mut out = Morphism {
            source: other.source.clone(),
            target: self.target.clone(),
            components: BTreeMap::new(),
            max_arity,
        };
        for n in 1..=max_arity {
            let mut comp_n = MultiMap::new(n, 0);
            for i in 1..=n {
                if let Some(fi) = self.components.get(&i) {
                    comp_n.add(&other.blocks_into(fi, n));
                }
            }
            if !comp_n.is_zero() {
                out.components.insert(n, comp_n);
            }
        }
        Ok(out)
    }

    /// Inverse cohomomorphism, defined when the linear part is invertible.
    pub fn inverse(&self) -> Result<Morphism> {
        let f1 = self.component_or_zero(1);
        let dim = self.source.dim();
        if dim != self.target.dim() {
            return Err(Error::Input("inverse: dimension mismatch".into()));
        }
        let mut mat = Matrix::zero(dim, dim);
        for (w, o, c) in f1.iter() {
            mat.set(o, w[0], c.clone());
        }
        let inv = mat
            .inverse()
            .ok_or_else(|| Error::Structure("linear part is not invertible".into()))?;
        let mut g1 = MultiMap::new(1, 0);
        for i in 0..dim {
            for j in 0..dim {
                if !inv.get(i, j).is_zero() {
                    g1.add_term(alloc::vec![j], i, inv.get(i, j).clone());
                }
            }
        }
        let mut g = Morphism {
            source: self.target.clone(),
            target: self.source.clone(),
            components: BTreeMap::new(),
            max_arity: self.max_arity,
        };
        g.components.insert(1, g1.clone());
        // (G . F)_n = 0 for n >= 2 determines g_n recursively:
        // g_n = -(sum of lower terms) composed with f_1^{-1} per slot.
        for n in 2..=self.max_arity {
            let mut acc = MultiMap::new(n, 0);
            for i in 1..n {
                // g_i applied to f-blocks covering n inputs (i blocks).
                if let Some(gi) = g.components.get(&i).cloned() {
                    acc.add(&self.blocks_into(&gi, n));
                }
            }
            // plus g_n(f_1 (x) ... (x) f_1) = acc_total must vanish
            // => g_n = -acc . (f_1^{-1})^(x)n
            let inv_blocks: Vec<&MultiMap> = (0..n).map(|_| &g1).collect();
            let gn = acc.blocks(&self.target, &inv_blocks).scaled(&-Scalar::one());
            if !gn.is_zero() {
                g.components.insert(n, gn);
            }
        }
        Ok(g)
    }

    /// Whether all components agree with `other` up to arity `n_max`.
    pub fn equals_up_to(&self, other: &Morphism, n_max: usize) -> bool {
        for n in 1..=n_max {
            let mut d = self.component_or_zero(n);
            d.sub(&other.component_or_zero(n));
            if !d.is_zero() {
                return false;
            }
        }
        true
    }

    /// Is this the identity cohomomorphism (up to `n_max`)?
    pub fn is_identity_up_to(&self, n_max: usize) -> bool {
        self.equals_up_to(&Morphism::identity(&self.source, self.max_arity), n_max)
    }

    /// The full cohomomorphism applied to one tensor word of the source,
    /// summed over all block decompositions. Empty input gives the counit.
    pub fn expand_word(&self, word: &[usize]) -> crate::graded::WordSum {
        let mut out = crate::graded::WordSum::new();
        if word.is_empty() {
            crate::graded::word_sum_add(&mut out, Vec::new(), Scalar::one());
            return out;
        }
        for comp in compositions(word.len()) {
            let maps: Option<Vec<&MultiMap>> =
                comp.iter().map(|&k| self.components.get(&k)).collect();
            let Some(maps) = maps else { continue };
            // multiply out the block images
            let mut partial: Vec<(Vec<usize>, Scalar)> =
                alloc::vec![(Vec::new(), Scalar::one())];
            let mut offset = 0;
            for (b, &len) in comp.iter().enumerate() {
                let block = &word[offset..offset + len];
                offset += len;
                let mut next = Vec::new();
                for (w, o, c) in maps[b].iter() {
                    if w != block {
                        continue;
                    }
                    for (prev_word, prev_c) in &partial {
                        let mut nw = prev_word.clone();
                        nw.push(o);
                        next.push((nw, prev_c * c));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (w, c) in partial {
                crate::graded::word_sum_add(&mut out, w, c);
            }
        }
        out
    }

    /// The conjugated structure `F^{-1} m F` as products on the source,
    /// computed arity by arity. `inv` must be the inverse cohomomorphism.
    pub fn conjugate(&self, algebra: &AInfinity, inv: &Morphism, max_arity: usize) -> Result<AInfinity> {
        if *algebra.basis() != self.target {
            return Err(Error::Input("conjugate: algebra does not live on the target".into()));
        }
        let mut out = AInfinity::new(self.source.clone(), max_arity);
        for n in 1..=max_arity {
            let mut mn = MultiMap::new(n, 1);
            // F expands n inputs into i blocks; one m_l consumes l of those
            // block outputs; the inverse consumes the remaining word.
            for comp in compositions(n) {
                let i = comp.len();
                let fs: Option<Vec<&MultiMap>> =
                    comp.iter().map(|&k| self.components.get(&k)).collect();
                let Some(fs) = fs else { continue };
                for l in 1..=i {
                    let Some(ml) = algebra.map(l) else { continue };
                    let r = i - l + 1;
                    let Some(gr) = inv.components.get(&r) else { continue };
                    for p in 0..=(i - l) {
                        let composite = ml.blocks(&self.source, &fs[p..p + l].to_vec());
                        let mut inners: Vec<&MultiMap> = Vec::with_capacity(r);
                        inners.extend_from_slice(&fs[..p]);
                        inners.push(&composite);
                        inners.extend_from_slice(&fs[p + l..]);
                        mn.add(&gr.blocks(&self.source, &inners));
                    }
                }
            }
            if !mn.is_zero() {
                out.set_map(mn)?;
            }
        }
        Ok(out)
    }
}

/// Checks eq-level cyclicity of a morphism between cyclic structures:
/// the linear part preserves the pairing and the higher pairing sums vanish.
pub fn verify_cyclic_morphism(
    f: &Morphism,
    omega_source: &SymplecticForm,
    omega_target: &SymplecticForm,
    n_max: usize,
) -> Result<CheckReport> {
    let mut checked = 0;
    // omega'(f_1 o, f_1 o') = omega(o, o')
    let f1 = f.component_or_zero(1);
    let mut defect2 = CyclicTensor::new(2);
    for i in 0..f.source().dim() {
        for j in 0..f.source().dim() {
            let mut lhs = Scalar::zero();
            for (w1, o1, c1) in f1.iter() {
                if w1[0] != i {
                    continue;
                }
                for (w2, o2, c2) in f1.iter() {
                    if w2[0] != j {
                        continue;
                    }
                    lhs += &(&(c1 * c2) * &omega_target.entry(o1, o2));
                }
            }
            let diff = lhs - omega_source.entry(i, j);
            defect2.add_term(alloc::vec![i, j], diff);
        }
    }
    checked += 1;
    if let Some((w, c)) = defect2.first_entry() {
        return Ok(CheckReport::failing(checked, 2, w, usize::MAX, c));
    }
    // sum_{k+l=n} omega'(f_k(..), f_l(..)) = 0 for 3 <= n <= n_max
    for n in 3..=n_max {
        let mut defect = CyclicTensor::new(n);
        for k in 1..n {
            let l = n - k;
            let (Some(fk), Some(fl)) = (f.component(k), f.component(l)) else {
                continue;
            };
            for (w1, o1, c1) in fk.iter() {
                for (w2, o2, c2) in fl.iter() {
                    let om = omega_target.entry(o1, o2);
                    if om.is_zero() {
                        continue;
                    }
                    let mut word = Vec::with_capacity(n);
                    word.extend_from_slice(w1);
                    word.extend_from_slice(w2);
                    defect.add_term(word, &(c1 * c2) * &om);
                }
            }
        }
        checked += 1;
        if let Some((w, c)) = defect.first_entry() {
            return Ok(CheckReport::failing(checked, n, w, usize::MAX, c));
        }
    }
    Ok(CheckReport::passing(checked))
}

/// A two-sided homotopy between morphisms `F` and `G`: components `h_k` of
/// degree minus one (plus an optional arity-zero part), lifted by the rule
/// `H = sum F (x) h (x) G`.
#[derive(Clone, Debug, Default)]
pub struct MorphismHomotopy {
    pub h0: Element,
    components: BTreeMap<usize, MultiMap>,
}

impl MorphismHomotopy {
    pub fn new() -> Self {
        MorphismHomotopy::default()
    }

    pub fn set_component(&mut self, h: MultiMap) -> Result<()> {
        if h.degree() != -1 {
            return Err(Error::Input("homotopy components must have degree -1".into()));
        }
        self.components.insert(h.arity(), h);
        Ok(())
    }

    pub fn component(&self, k: usize) -> Option<&MultiMap> {
        self.components.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.h0.is_zero() && self.components.values().all(|m| m.is_zero())
    }
}

/// The standard homotopy between the identity and the projection extension
/// on a decomposed structure: `h_1 = Q^+`, all other components zero.
pub fn standard_homotopy(split: &crate::splitting::Splitting) -> MorphismHomotopy {
    let mut h = MorphismHomotopy::new();
    let qplus = split.qplus().clone();
    if !qplus.is_zero() {
        h.set_component(qplus).expect("Q+ has degree -1");
    }
    h
}

/// Defect of the homotopy relation `G - F = m' H + H m` restricted to
/// single-letter output, at arity `n`.
pub fn homotopy_defect(
    f: &Morphism,
    g: &Morphism,
    h: &MorphismHomotopy,
    source_alg: &AInfinity,
    target_alg: &AInfinity,
    n: usize,
) -> Result<MultiMap> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::Input("homotopy_defect: basis mismatch".into()));
    }
    if f.source() != source_alg.basis() || f.target() != target_alg.basis() {
        return Err(Error::Input("homotopy_defect: algebra bases do not match".into()));
    }
    let basis = f.source();
    let mut defect = g.component_or_zero(n);
    defect.sub(&f.component_or_zero(n));

    // (m' H)|_1: m'_(s+1+t) applied to F-blocks, one h (or h0), G-blocks.
    let mut mh = MultiMap::new(n, 0);
    for a in 0..=n {
        for j in 0..=(n - a) {
            let b = n - a - j;
            let middle: Option<MiddleSlot> = if j == 0 {
                if h.h0.is_zero() {
                    None
                } else {
                    Some(MiddleSlot::Unit(&h.h0))
                }
            } else {
                h.component(j).map(MiddleSlot::Map)
            };
            let Some(middle) = middle else { continue };
            for fcomp in compositions(a) {
                let fmaps: Option<Vec<&MultiMap>> =
                    fcomp.iter().map(|&k| f.component(k)).collect();
                let Some(fmaps) = fmaps else { continue };
                for gcomp in compositions(b) {
                    let gmaps: Option<Vec<&MultiMap>> =
                        gcomp.iter().map(|&k| g.component(k)).collect();
                    let Some(gmaps) = gmaps else { continue };
                    let outer_arity = fmaps.len() + 1 + gmaps.len();
                    let Some(m_outer) = target_alg.map(outer_arity) else {
                        continue;
                    };
                    mh.add(&blocks_with_middle(
                        basis, m_outer, &fmaps, &middle, &gmaps,
                    ));
                }
            }
        }
    }
    defect.sub(&mh);

    // (H m)|_1 = sum h_(n-l+1) ( 1 .. m_l .. 1 ).
    let mut hm = MultiMap::new(n, 0);
    for l in 1..=n {
        let k = n + 1 - l;
        let (Some(hk), Some(ml)) = (h.component(k), source_alg.map(l)) else {
            continue;
        };
        for p in 0..k {
            hm.add(&hk.insert(basis, p, ml));
        }
    }
    defect.sub(&hm);
    Ok(defect)
}

enum MiddleSlot<'a> {
    Map(&'a MultiMap),
    Unit(&'a Element),
}

/// `outer(f_1(..), .., f_s(..), middle(..), g_1(..), .., g_t(..))` where the
/// middle operator has degree minus one (Koszul sign against the F-block
/// inputs) and may be an arity-zero insertion.
fn blocks_with_middle(
    basis: &GradedBasis,
    outer: &MultiMap,
    fmaps: &[&MultiMap],
    middle: &MiddleSlot<'_>,
    gmaps: &[&MultiMap],
) -> MultiMap {
    // Total inputs consumed.
    let a: usize = fmaps.iter().map(|m| m.arity()).sum();
    let j: usize = match middle {
        MiddleSlot::Map(m) => m.arity(),
        MiddleSlot::Unit(_) => 0,
    };
    let b: usize = gmaps.iter().map(|m| m.arity()).sum();
    let n = a + j + b;
    let mut out = MultiMap::new(n, 0);
    let s = fmaps.len();
    let t = gmaps.len();
    debug_assert_eq!(outer.arity(), s + 1 + t);
    for (outer_word, o, c_o) in outer.iter() {
        // enumerate choices per slot
        let mut partial: Vec<(Vec<usize>, i64, Scalar)> =
            alloc::vec![(Vec::new(), 0, c_o.clone())];
        let mut dead = false;
        for slot in 0..outer.arity() {
            let want = outer_word[slot];
            let mut next: Vec<(Vec<usize>, i64, Scalar)> = Vec::new();
            if slot == s {
                // middle slot: degree -1 operator passing earlier inputs
                match middle {
                    MiddleSlot::Map(hm) => {
                        for (w, mid, c) in hm.iter() {
                            if mid != want {
                                continue;
                            }
                            for (pw, pd, pc) in &partial {
                                let sign = Scalar::neg_one_pow(-1 * *pd);
                                let mut nw = pw.clone();
                                nw.extend_from_slice(w);
                                let block_deg = basis.word_degree(w);
                                next.push((nw, pd + block_deg, &(pc * c) * &sign));
                            }
                        }
                    }
                    MiddleSlot::Unit(e) => {
                        let c = e.coeff(want);
                        if !c.is_zero() {
                            for (pw, pd, pc) in &partial {
                                let sign = Scalar::neg_one_pow(-1 * *pd);
                                next.push((pw.clone(), *pd, &(pc * &c) * &sign));
                            }
                        }
                    }
                }
            } else {
                let inner = if slot < s { fmaps[slot] } else { gmaps[slot - s - 1] };
                for (w, mid, c) in inner.iter() {
                    if mid != want {
                        continue;
                    }
                    for (pw, pd, pc) in &partial {
                        let mut nw = pw.clone();
                        nw.extend_from_slice(w);
                        let block_deg = basis.word_degree(w);
                        next.push((nw, pd + block_deg, pc * c));
                    }
                }
            }
            partial = next;
            if partial.is_empty() {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        for (w, _, c) in partial {
            out.add_term(w, o, c);
        }
    }
    out
}

/// Ordered compositions of `n` into exactly `parts` positive parts.
pub(crate) fn compositions_with_parts(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { alloc::vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    if n < parts {
        return out;
    }
    for first in 1..=(n - parts + 1) {
        for mut rest in compositions_with_parts(n - first, parts - 1) {
            let mut comp = alloc::vec![first];
            comp.append(&mut rest);
            out.push(comp);
        }
    }
    out
}
