//! Cyclic noncommutative polynomials, odd Poisson brackets, the
//! noncommutative de Rham complex with its contracting homotopy, Darboux
//! normalization, and the master-equation dual of the Stasheff identities.
//!
//! Storage convention: a word key `(i_1, .., i_k)` holds the coefficient
//! `a_{i_1..i_k}` of the monomial `phi^{i_k} ... phi^{i_1}`; a cyclic
//! object stores the full orbit (every rotation present, coefficients
//! related by the graded rotation sign), and the `1/k` of the function
//! notation lives in the interpretation, not the data. Converting to a
//! plain polynomial divides by the word length; symmetrizing a plain
//! polynomial takes the signed orbit sum, so the two are mutually inverse
//! on cyclic data and symmetrization is a projector at the function level.
//!
//! The contracting homotopy of the de Rham differential carries a
//! `1/length` normalization: letterwise, insertion and deletion of the
//! derivative marker compose to `length * Id`, and the paper's cyclic
//! function notation absorbs exactly that factor. With the normalization
//! here, `d d^{-1} + d^{-1} d = Id` holds literally; both `d` and `d^{-1}`
//! preserve cyclicity.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{AInfinity, Morphism, SymplecticForm};
use crate::graded::{GradedBasis, MultiMap};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// e-degree of an index word (mod-two equal to minus the phi-degree).
fn word_e_degree(basis: &GradedBasis, w: &[usize]) -> i64 {
    w.iter().map(|&i| basis.degree(i)).sum()
}

/// A plain (free) noncommutative polynomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NcPoly {
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn add_term(&mut self, word: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(word).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, word: &[usize]) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &NcPoly) {
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), c.clone());
        }
    }

    pub fn scaled(&self, s: &Scalar) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in self.iter() {
            out.add_term(w.to_vec(), s * c);
        }
        out
    }
}

/// Rotation sign for `(i_1..i_k) -> (i_2..i_k, i_1)`.
fn rotation_sign(basis: &GradedBasis, w: &[usize]) -> Scalar {
    if w.len() < 2 {
        return Scalar::one();
    }
    let head = basis.degree(w[0]);
    let tail = word_e_degree(basis, &w[1..]);
    Scalar::neg_one_pow(head * tail)
}

/// A cyclic polynomial: coefficients invariant under the graded rotation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CyclicPoly {
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl CyclicPoly {
    pub fn zero() -> Self {
        CyclicPoly::default()
    }

    pub fn add_term(&mut self, word: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(word).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, word: &[usize]) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &CyclicPoly) {
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), c.clone());
        }
    }

    pub fn sub(&mut self, other: &CyclicPoly) {
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), -c);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> CyclicPoly {
        let mut out = CyclicPoly::zero();
        for (w, c) in self.iter() {
            out.add_term(w.to_vec(), s * c);
        }
        out
    }

    /// Truncates to words of length at most `n`.
    pub fn truncated(&self, n: usize) -> CyclicPoly {
        let mut out = CyclicPoly::zero();
        for (w, c) in self.iter() {
            if w.len() <= n {
                out.add_term(w.to_vec(), c.clone());
            }
        }
        out
    }

    /// First violation of the rotation invariance, if any.
    pub fn cyclicity_witness(&self, basis: &GradedBasis) -> Option<(Vec<usize>, Scalar)> {
        let mut keys: Vec<Vec<usize>> = self.terms.keys().cloned().collect();
        for w in self.terms.keys() {
            if w.len() >= 2 {
                let mut rot = w[1..].to_vec();
                rot.push(w[0]);
                keys.push(rot);
            }
        }
        keys.sort();
        keys.dedup();
        for w in keys {
            if w.len() < 2 {
                continue;
            }
            let mut rot = w[1..].to_vec();
            rot.push(w[0]);
            let diff = self.coeff(&w) - &rotation_sign(basis, &w) * &self.coeff(&rot);
            if !diff.is_zero() {
                return Some((w, diff));
            }
        }
        None
    }

    /// Function view: divides every coefficient by its word length.
    pub fn to_nc(&self) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in self.iter() {
            let n = w.len().max(1) as i64;
            out.add_term(w.to_vec(), c * &Scalar::ratio(1, n));
        }
        out
    }

    /// The H-degree of the polynomial as a function (phi-side), when all
    /// words agree.
    pub fn function_degree(&self, basis: &GradedBasis) -> Option<i64> {
        let mut deg = None;
        for (w, _) in self.iter() {
            let d = -word_e_degree(basis, w);
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Pullback through a morphism: substitutes the coordinate expansion
    /// into the function view and re-symmetrizes.
    pub fn pullback(&self, f: &Morphism, basis_source: &GradedBasis) -> CyclicPoly {
        let nc = self.to_nc();
        let mut subst = NcPoly::zero();
        for (w, c) in nc.iter() {
            // each letter w_a expands into the words of the component sums
            let mut partial: Vec<(Vec<usize>, Scalar)> = alloc::vec![(Vec::new(), c.clone())];
            for &letter in w {
                let mut next = Vec::new();
                for k in 1..=f.max_arity() {
                    let Some(fk) = f.component(k) else { continue };
                    for (inw, out, fc) in fk.iter() {
                        if out != letter {
                            continue;
                        }
                        for (pw, pc) in &partial {
                            let mut nw = pw.clone();
                            nw.extend_from_slice(inw);
                            next.push((nw, pc * fc));
                        }
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (word, coeff) in partial {
                subst.add_term(word, coeff);
            }
        }
        cyclic_symmetrize(&subst, basis_source)
    }
}

/// Signed orbit sum: the trace projection onto cyclic polynomials. A
/// polynomial that is already the function view of a cyclic one is a fixed
/// point, and the composite with the function view is idempotent.
pub fn cyclic_symmetrize(p: &NcPoly, basis: &GradedBasis) -> CyclicPoly {
    let mut out = CyclicPoly::zero();
    for (w, c) in p.iter() {
        if w.is_empty() {
            out.add_term(Vec::new(), c.clone());
            continue;
        }
        let mut current = w.to_vec();
        let mut sign = Scalar::one();
        for _ in 0..w.len() {
            out.add_term(current.clone(), &sign * c);
            let s = rotation_sign(basis, &current);
            sign = &sign * &s;
            let head = current.remove(0);
            current.push(head);
        }
    }
    out
}

/// The constant odd Poisson bracket of two cyclic polynomials: joins the
/// first index of one coefficient to the last index of the other through
/// the inverse pairing and symmetrizes the result.
pub fn const_bracket(
    a: &CyclicPoly,
    b: &CyclicPoly,
    omega: &SymplecticForm,
    basis: &GradedBasis,
) -> CyclicPoly {
    let mut join = NcPoly::zero();
    for (wa, ca) in a.iter() {
        if wa.is_empty() {
            continue;
        }
        let i = wa[0];
        let a_tail = &wa[1..];
        for (wb, cb) in b.iter() {
            if wb.is_empty() {
                continue;
            }
            let j = wb[wb.len() - 1];
            let b_head = &wb[..wb.len() - 1];
            let inv = omega.inverse_entry(i, j);
            if inv.is_zero() {
                continue;
            }
            let mut word = Vec::with_capacity(a_tail.len() + b_head.len());
            word.extend_from_slice(b_head);
            word.extend_from_slice(a_tail);
            join.add_term(word, &(ca * cb) * &inv);
        }
    }
    cyclic_symmetrize(&join, basis)
}

/// The graded commutative product of two cyclic polynomials inside the
/// free tensor algebra, realized on coefficients far enough for two-factor
/// derivation checks: `(A, B bullet C) = (A, B) bullet C +- B bullet (A, C)`
/// is tested against this.
#[derive(Clone, Debug, Default)]
pub struct BulletPair {
    pub left: CyclicPoly,
    pub right: CyclicPoly,
}

/// The master-equation defect `(S, S)` of an action.
pub fn master_defect(
    s: &CyclicPoly,
    omega: &SymplecticForm,
    basis: &GradedBasis,
) -> CyclicPoly {
    const_bracket(s, s, omega, basis)
}

/// The structure constants of the odd vector field of an action:
/// the products obtained by raising the first index of every vertex
/// tensor. Refuses actions with constant or linear terms or of the wrong
/// degree.
pub fn hamiltonian_vf(
    s: &CyclicPoly,
    omega: &SymplecticForm,
    basis: &GradedBasis,
    max_arity: usize,
) -> Result<AInfinity> {
    match s.function_degree(basis) {
        Some(0) | None if s.is_zero() => {}
        Some(0) => {}
        Some(d) => {
            return Err(Error::Input(format!("action has degree {d}, expected 0")));
        }
        None => return Err(Error::Input("action is not degree homogeneous".into())),
    }
    for (w, _) in s.iter() {
        if w.len() < 2 {
            return Err(Error::Input(
                "action has a constant or linear term; no critical point at the origin".into(),
            ));
        }
    }
    if let Some((w, d)) = s.cyclicity_witness(basis) {
        return Err(Error::Input(format!(
            "action is not cyclic at {:?} (defect {d})",
            w
        )));
    }
    let mut algebra = AInfinity::new(basis.clone(), max_arity);
    let mut per_arity: BTreeMap<usize, MultiMap> = BTreeMap::new();
    for (w, c) in s.iter() {
        let k = w.len() - 1;
        if k > max_arity {
            continue;
        }
        let m = w[0];
        let sign = Scalar::neg_one_pow(basis.degree(m));
        for j in 0..basis.dim() {
            let inv = omega.inverse_entry(j, m);
            if inv.is_zero() {
                continue;
            }
            per_arity
                .entry(k)
                .or_insert_with(|| MultiMap::new(k, 1))
                .add_term(w[1..].to_vec(), j, &(&sign * &inv) * c);
        }
    }
    for (_, m) in per_arity {
        if !m.is_zero() {
            m.check_homogeneous(basis)?;
            algebra.set_map(m)?;
        }
    }
    Ok(algebra)
}

/// The action of a cyclic structure, with the vertex tensors of all
/// products as coefficients (inverse of [`hamiltonian_vf`]).
pub fn action_of_structure(
    algebra: &AInfinity,
    omega: &SymplecticForm,
) -> Result<CyclicPoly> {
    let mut s = CyclicPoly::zero();
    for k in algebra.arities().collect::<Vec<_>>() {
        let v = crate::algebra::cyclic_vertex(omega, algebra, k)?;
        for (w, c) in v.iter() {
            s.add_term(w.to_vec(), c.clone());
        }
    }
    Ok(s)
}

/// One letter of a differential-form word: a coordinate index, possibly
/// carrying the derivative marker.
pub type FormLetter = (usize, bool);

fn form_rotation_sign(basis: &GradedBasis, w: &[FormLetter]) -> Scalar {
    if w.len() < 2 {
        return Scalar::one();
    }
    let head_e = basis.degree(w[0].0);
    let tail_e: i64 = w[1..].iter().map(|&(i, _)| basis.degree(i)).sum();
    let head_sharp = w[0].1 as i64;
    let tail_sharp: i64 = w[1..].iter().map(|&(_, d)| d as i64).sum();
    Scalar::neg_one_pow(head_e * tail_e + head_sharp * tail_sharp)
}

/// A cyclic differential form: orbit-stored coefficients on words of
/// marked letters; the form degree of a word is its marker count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CyclicForm {
    terms: BTreeMap<Vec<FormLetter>, Scalar>,
}

impl CyclicForm {
    pub fn zero() -> Self {
        CyclicForm::default()
    }

    pub fn add_term(&mut self, word: Vec<FormLetter>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(word).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, word: &[FormLetter]) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[FormLetter], &Scalar)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &CyclicForm) {
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), c.clone());
        }
    }

    pub fn sub(&mut self, other: &CyclicForm) {
        for (w, c) in other.iter() {
            self.add_term(w.to_vec(), -c);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> CyclicForm {
        let mut out = CyclicForm::zero();
        for (w, c) in self.iter() {
            out.add_term(w.to_vec(), s * c);
        }
        out
    }

    /// Keeps the words with exactly `phi_count` unmarked letters.
    pub fn phi_part(&self, phi_count: usize) -> CyclicForm {
        let mut out = CyclicForm::zero();
        for (w, c) in self.iter() {
            let n = w.iter().filter(|&&(_, d)| !d).count();
            if n == phi_count {
                out.add_term(w.to_vec(), c.clone());
            }
        }
        out
    }

    pub fn max_phi_count(&self) -> usize {
        self.iter()
            .map(|(w, _)| w.iter().filter(|&&(_, d)| !d).count())
            .max()
            .unwrap_or(0)
    }

    pub fn cyclicity_witness(&self, basis: &GradedBasis) -> Option<(Vec<FormLetter>, Scalar)> {
        let mut keys: Vec<Vec<FormLetter>> = self.terms.keys().cloned().collect();
        for w in self.terms.keys() {
            if w.len() >= 2 {
                let mut rot = w[1..].to_vec();
                rot.push(w[0]);
                keys.push(rot);
            }
        }
        keys.sort();
        keys.dedup();
        for w in keys {
            if w.len() < 2 {
                continue;
            }
            let mut rot = w[1..].to_vec();
            rot.push(w[0]);
            let diff = self.coeff(&w) - &form_rotation_sign(basis, &w) * &self.coeff(&rot);
            if !diff.is_zero() {
                return Some((w, diff));
            }
        }
        None
    }
}

/// Signed orbit sum for form words.
pub fn form_symmetrize(terms: &BTreeMap<Vec<FormLetter>, Scalar>, basis: &GradedBasis) -> CyclicForm {
    let mut out = CyclicForm::zero();
    for (w, c) in terms {
        if w.is_empty() {
            out.add_term(Vec::new(), c.clone());
            continue;
        }
        let mut current = w.clone();
        let mut sign = Scalar::one();
        for _ in 0..w.len() {
            out.add_term(current.clone(), &sign * c);
            let s = form_rotation_sign(basis, &current);
            sign = &sign * &s;
            let head = current.remove(0);
            current.push(head);
        }
    }
    out
}

/// The exterior derivative on coefficients: promotes each unmarked letter,
/// with the sign counting the markers at earlier index positions. Squares
/// to zero and preserves cyclicity.
pub fn ext_d(a: &CyclicForm) -> CyclicForm {
    let mut out = CyclicForm::zero();
    for (w, c) in a.iter() {
        let mut sharp_before = 0i64;
        for i in 0..w.len() {
            if w[i].1 {
                sharp_before += 1;
                continue;
            }
            let mut nw = w.to_vec();
            nw[i].1 = true;
            out.add_term(nw, &Scalar::neg_one_pow(sharp_before) * c);
        }
    }
    out
}

/// The contracting homotopy: demotes each marked letter with the same
/// sign rule and divides by the word length, so that
/// `d d^{-1} + d^{-1} d = Id` holds exactly on forms of positive length.
pub fn ext_d_inv(a: &CyclicForm) -> CyclicForm {
    let mut out = CyclicForm::zero();
    for (w, c) in a.iter() {
        if w.is_empty() {
            continue;
        }
        let scale = Scalar::ratio(1, w.len() as i64);
        let mut sharp_before = 0i64;
        for i in 0..w.len() {
            if !w[i].1 {
                continue;
            }
            let mut nw = w.to_vec();
            nw[i].1 = false;
            out.add_term(nw, &(&Scalar::neg_one_pow(sharp_before) * c) * &scale);
            sharp_before += 1;
        }
    }
    out
}

/// The constant two-form of a pairing, `omega_{ji} (dphi^i dphi^j)`-style:
/// stored as the symmetrized two-letter marked words.
pub fn constant_form(omega: &SymplecticForm, basis: &GradedBasis) -> CyclicForm {
    // Word (i, j) both marked with coefficient omega(e_j, e_i): the
    // monomial reading is dphi^j dphi^i, matching the vertex convention of
    // the quadratic action term; the overall normalization is fixed by the
    // Darboux tests.
    let mut terms: BTreeMap<Vec<FormLetter>, Scalar> = BTreeMap::new();
    for (i, j, c) in omega.iter() {
        let w = alloc::vec![(j, true), (i, true)];
        let slot = terms.entry(w).or_insert_with(Scalar::zero);
        *slot += c;
    }
    terms.retain(|_, v| !v.is_zero());
    // Each unordered pair was inserted twice (skewness pairs them up), and
    // the orbit sum doubles again; halve twice to make the constant block
    // recover omega on the nose.
    let sym = form_symmetrize(&terms, basis);
    sym.scaled(&Scalar::ratio(1, 2))
}

/// Reads the constant block of a two-form back as a pairing candidate:
/// the coefficient of the two-marker words with no unmarked letters.
pub fn constant_block(form: &CyclicForm, basis: &GradedBasis) -> Result<SymplecticForm> {
    let mut entries = Vec::new();
    for (w, c) in form.phi_part(0).iter() {
        if w.len() != 2 {
            return Err(Error::Input("constant block of a two-form must have two letters".into()));
        }
        entries.push((w[1].0, w[0].0, c.clone()));
    }
    // The orbit store holds each unordered pair twice; halving recovers
    // the pairing (mirrors `constant_form`).
    let halved: Vec<(usize, usize, Scalar)> = entries
        .into_iter()
        .map(|(i, j, c)| (i, j, &c * &Scalar::ratio(1, 2)))
        .collect();
    // SymplecticForm::new sums duplicate entries; both (i,j) and (j,i)
    // are present and skew, so this reconstructs the matrix.
    let mut seen: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for (i, j, c) in halved {
        let slot = seen.entry((i, j)).or_insert_with(Scalar::zero);
        *slot += &c;
    }
    let collected: Vec<(usize, usize, Scalar)> =
        seen.into_iter().map(|((i, j), c)| (i, j, c)).collect();
    SymplecticForm::new(basis, &collected)
}

/// A polynomial coordinate shift `phi^i -> phi^i + f^i(phi)`.
#[derive(Clone, Debug, Default)]
pub struct CoordinateShift {
    /// component polynomials per coordinate
    pub components: BTreeMap<usize, NcPoly>,
}

impl CoordinateShift {
    pub fn is_zero(&self) -> bool {
        self.components.values().all(|p| p.is_zero())
    }
}

/// Pullback of a cyclic form under `phi -> phi + f(phi)`, truncated to
/// words of length at most `max_len`: each unmarked letter expands into
/// the shifted coordinate, each marked letter into its differential, and
/// the result is re-symmetrized.
pub fn pullback_form(
    form: &CyclicForm,
    shift: &CoordinateShift,
    basis: &GradedBasis,
    max_len: usize,
) -> CyclicForm {
    // Letter expansions.
    let expand_phi = |i: usize| -> Vec<(Vec<FormLetter>, Scalar)> {
        let mut out = alloc::vec![(alloc::vec![(i, false)], Scalar::one())];
        if let Some(f) = shift.components.get(&i) {
            for (w, c) in f.iter() {
                out.push((w.iter().map(|&x| (x, false)).collect(), c.clone()));
            }
        }
        out
    };
    let expand_d = |i: usize| -> Vec<(Vec<FormLetter>, Scalar)> {
        let mut out = alloc::vec![(alloc::vec![(i, true)], Scalar::one())];
        if let Some(f) = shift.components.get(&i) {
            // d of an unmarked word: promote each letter; no marker signs
            // arise because the word has no markers yet.
            for (w, c) in f.iter() {
                for pos in 0..w.len() {
                    let letters: Vec<FormLetter> = w
                        .iter()
                        .enumerate()
                        .map(|(a, &x)| (x, a == pos))
                        .collect();
                    out.push((letters, c.clone()));
                }
            }
        }
        out
    };
    // Substitute in the function view, then symmetrize back.
    let mut raw: BTreeMap<Vec<FormLetter>, Scalar> = BTreeMap::new();
    for (w, c) in form.iter() {
        let scale = Scalar::ratio(1, w.len().max(1) as i64);
        let mut partial: Vec<(Vec<FormLetter>, Scalar)> =
            alloc::vec![(Vec::new(), c * &scale)];
        for &(idx, marked) in w {
            let options = if marked { expand_d(idx) } else { expand_phi(idx) };
            let mut next = Vec::new();
            for (pw, pc) in &partial {
                for (block, bc) in &options {
                    if pw.len() + block.len() > max_len {
                        continue;
                    }
                    let mut nw = pw.clone();
                    nw.extend_from_slice(block);
                    next.push((nw, pc * bc));
                }
            }
            partial = next;
        }
        for (word, coeff) in partial {
            if word.len() <= max_len {
                let slot = raw.entry(word).or_insert_with(Scalar::zero);
                *slot += &coeff;
            }
        }
    }
    raw.retain(|_, v| !v.is_zero());
    form_symmetrize(&raw, basis)
}

/// Result of the Darboux normalization.
pub struct DarbouxResult {
    pub shifts: Vec<CoordinateShift>,
    pub normalized: CyclicForm,
}

/// Brings a closed two-form with nondegenerate constant block to constant
/// shape through words with `order` unmarked letters, order by order: the
/// nonconstant part at each order is closed, hence exact by the
/// contracting homotopy, and is cancelled by a coordinate shift read off
/// from the potential through the constant block.
pub fn darboux(form: &CyclicForm, basis: &GradedBasis, order: usize) -> Result<DarbouxResult> {
    // Closedness, reported with the first non-closed phi-order.
    let d = ext_d(form);
    if !d.is_zero() {
        for k in 0..=form.max_phi_count() {
            let part = d.phi_part(k);
            if !part.is_zero() {
                return Err(Error::Input(format!(
                    "form is not closed: first failure with {k} coordinate letters"
                )));
            }
        }
    }
    let omega0 = constant_block(form, basis)?;
    let max_len = order + 2;
    let mut current = truncate_form(form, max_len);
    let mut shifts = Vec::new();
    for k in 1..=order {
        let part = current.phi_part(k);
        if part.is_zero() {
            continue;
        }
        // potential: theta with d(theta) = part
        let theta = ext_d_inv(&part);
        // Read a shift with 2 d(omega0_{ji} f^i dphi^j)_c = -part, i.e.
        // omega0-contract the one-marker words of theta.
        let mut shift = CoordinateShift::default();
        for (w, c) in theta.iter() {
            // words with exactly one marker; the marked letter is dphi^j,
            // the rest (cyclically rotated so the marker is last) is the
            // f-part attached to j.
            let marked: Vec<usize> = w
                .iter()
                .enumerate()
                .filter(|(_, &(_, m))| m)
                .map(|(a, _)| a)
                .collect();
            if marked.len() != 1 {
                continue;
            }
            let pos = marked[0];
            // rotate so the marked letter sits at the front
            let mut rot: Vec<FormLetter> = Vec::with_capacity(w.len());
            rot.extend_from_slice(&w[pos..]);
            rot.extend_from_slice(&w[..pos]);
            let mut sign = Scalar::one();
            {
                let mut cur = w.to_vec();
                for _ in 0..pos {
                    sign = &sign * &form_rotation_sign(basis, &cur);
                    let head = cur.remove(0);
                    cur.push(head);
                }
            }
            let j = rot[0].0;
            let tail: Vec<usize> = rot[1..].iter().map(|&(i, _)| i).collect();
            // theta term: coeff * phi-word(tail) attached to dphi^j. The
            // corresponding shift solves omega0_{ji} f^i = -(1/2) theta_j.
            for i in 0..basis.dim() {
                let inv = omega0.inverse_entry(i, j);
                if inv.is_zero() {
                    continue;
                }
                let v = &(&sign * c) * &inv;
                let entry = shift.components.entry(i).or_insert_with(NcPoly::zero);
                // the orbit store counts each word w.len() times relative
                // to the function view; shifts act on the nose, so divide.
                entry.add_term(
                    tail.clone(),
                    &v * &Scalar::ratio(-1, 2 * w.len() as i64),
                );
            }
        }
        if shift.is_zero() {
            return Err(Error::Structure(format!(
                "no shift candidate at order {k}"
            )));
        }
        let candidate = pullback_form(&current, &shift, basis, max_len);
        let mut fixed = candidate.phi_part(k);
        if !fixed.is_zero() {
            // Try the opposite orientation of the potential before giving
            // up: the homotopy normalization fixes d d^{-1} + d^{-1} d,
            // not the sign pairing of markers to coordinates.
            let mut flipped = CoordinateShift::default();
            for (i, p) in &shift.components {
                flipped.components.insert(*i, p.scaled(&-Scalar::one()));
            }
            let candidate2 = pullback_form(&current, &flipped, basis, max_len);
            fixed = candidate2.phi_part(k);
            if fixed.is_zero() {
                shifts.push(flipped);
                current = candidate2;
                continue;
            }
            return Err(Error::Structure(format!(
                "Darboux step failed to cancel order {k}"
            )));
        }
        shifts.push(shift);
        current = candidate;
    }
    Ok(DarbouxResult { shifts, normalized: truncate_form(&current, order + 2) })
}

fn truncate_form(form: &CyclicForm, max_len: usize) -> CyclicForm {
    let mut out = CyclicForm::zero();
    for (w, c) in form.iter() {
        if w.len() <= max_len {
            out.add_term(w.to_vec(), c.clone());
        }
    }
    out
}

/// The flow `exp((., eps))` applied to a cyclic polynomial, truncating by
/// word length: the generator must have only words of length at least
/// three, so each bracket application raises the length.
pub fn symplectomorphism_flow(
    a: &CyclicPoly,
    eps: &CyclicPoly,
    omega: &SymplecticForm,
    basis: &GradedBasis,
    max_len: usize,
) -> Result<CyclicPoly> {
    for (w, _) in eps.iter() {
        if w.len() <= 2 {
            return Err(Error::Input(
                "flow generator must have word length at least three".into(),
            ));
        }
    }
    let mut total = a.truncated(max_len);
    let mut current = total.clone();
    let mut factorial = Scalar::one();
    for j in 1..=max_len {
        factorial *= &Scalar::from_int(j as i64);
        current = const_bracket(&current, eps, omega, basis).truncated(max_len);
        if current.is_zero() {
            break;
        }
        let scale = factorial.inv().expect("nonzero");
        total.add(&current.scaled(&scale));
    }
    Ok(total.truncated(max_len))
}
