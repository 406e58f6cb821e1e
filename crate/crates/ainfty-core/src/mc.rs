//! Formal Maurer-Cartan theory in a bookkeeping parameter.
//!
//! Solutions live in the degree-zero part of the space tensored with the
//! ideal generated by the formal parameter, so every expansion truncates:
//! an order-`N` statement involves only finitely many exact terms. The
//! parameter is never a number; convergence is out of scope by design.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{AInfinity, Morphism};
use crate::graded::{
    apply_coderivation, apply_coderivation_element, word_sum_add, Element, GradedBasis, MultiMap,
    WordSum,
};
use crate::scalar::Scalar;
use crate::splitting::Splitting;
use crate::{Error, Result};

/// A series `sum_{n >= 1} order-n element`, each term homogeneous of
/// degree zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSeries {
    terms: BTreeMap<usize, Element>,
}

/// A series of elements without the degree-zero restriction (defects,
/// obstructions, gauge displacements).
pub type ElementSeries = BTreeMap<usize, Element>;

pub fn series_is_zero(s: &ElementSeries) -> bool {
    s.values().all(|e| e.is_zero())
}

pub fn series_first_nonzero(s: &ElementSeries) -> Option<(usize, &Element)> {
    s.iter().find(|(_, e)| !e.is_zero()).map(|(&n, e)| (n, e))
}

impl FormalSeries {
    pub fn zero() -> Self {
        FormalSeries::default()
    }

    pub fn set_term(&mut self, basis: &GradedBasis, order: usize, e: Element) -> Result<()> {
        if order == 0 {
            return Err(Error::Input("formal series start at order one".into()));
        }
        if let Some(d) = e.homogeneous_degree(basis) {
            if d != 0 {
                return Err(Error::Input(format!(
                    "order-{order} term has degree {d}, expected 0"
                )));
            }
        } else if !e.is_zero() {
            return Err(Error::Input(format!("order-{order} term is not homogeneous")));
        }
        if e.is_zero() {
            self.terms.remove(&order);
        } else {
            self.terms.insert(order, e);
        }
        Ok(())
    }

    pub fn term(&self, order: usize) -> Element {
        self.terms.get(&order).cloned().unwrap_or_else(Element::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Element)> {
        self.terms.iter().map(|(&n, e)| (n, e))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|e| e.is_zero())
    }

    pub fn truncated(&self, order: usize) -> FormalSeries {
        FormalSeries {
            terms: self
                .terms
                .iter()
                .filter(|(&n, _)| n <= order)
                .map(|(&n, e)| (n, e.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, order: usize, e: &Element) {
        let slot = self.terms.entry(order).or_insert_with(Element::zero);
        slot.add(e);
        if slot.is_zero() {
            self.terms.remove(&order);
        }
    }
}

/// Evaluates `sum_k map_k(Phi, ..., Phi)` order by order up to `order`,
/// for an arity-indexed family of maps.
fn evaluate_family<'a>(
    maps: impl Fn(usize) -> Option<&'a MultiMap>,
    max_arity: usize,
    phi: &FormalSeries,
    order: usize,
    min_arity: usize,
) -> ElementSeries {
    let mut out = ElementSeries::new();
    let orders: Vec<usize> = phi.iter().map(|(n, _)| n).collect();
    if orders.is_empty() {
        return out;
    }
    for k in min_arity..=max_arity {
        let Some(mk) = maps(k) else { continue };
        // all order compositions (o_1..o_k) with sum <= order
        let mut stack: Vec<(usize, Vec<usize>)> = alloc::vec![(0, Vec::new())];
        while let Some((total, picks)) = stack.pop() {
            if picks.len() == k {
                let args: Vec<Element> = picks.iter().map(|&o| phi.term(o)).collect();
                let value = mk.contract(&args).expect("arity matches");
                if !value.is_zero() {
                    let slot = out.entry(total).or_insert_with(Element::zero);
                    slot.add(&value);
                    if slot.is_zero() {
                        out.remove(&total);
                    }
                }
                continue;
            }
            for &o in &orders {
                if total + o + (k - picks.len() - 1) <= order {
                    let mut p = picks.clone();
                    p.push(o);
                    stack.push((total + o, p));
                }
            }
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// The Maurer-Cartan defect `sum_k m_k(Phi, .., Phi)` through the given
/// order; zero iff `Phi` solves the equation to that order.
pub fn mc_defect(algebra: &AInfinity, phi: &FormalSeries, order: usize) -> ElementSeries {
    evaluate_family(|k| algebra.map(k), algebra.max_arity(), phi, order, 1)
}

/// Result of the order-by-order solve.
#[derive(Clone, Debug)]
pub struct McSolution {
    pub phi: FormalSeries,
    /// The cohomology-valued obstruction per order; empty iff the seed
    /// extends to a solution through the requested order.
    pub obstruction: ElementSeries,
}

/// Solves the Maurer-Cartan equation with a cohomology-valued seed: the
/// non-seed part is determined recursively by the homotopy, and the
/// projected part of the defect is returned as the obstruction.
pub fn mc_solve(
    algebra: &AInfinity,
    split: &Splitting,
    seed: &FormalSeries,
    order: usize,
) -> Result<McSolution> {
    let proj = split.proj();
    let qplus = split.qplus();
    for (n, e) in seed.iter() {
        let projected = proj.contract(core::slice::from_ref(e))?;
        let mut diff = projected;
        diff.sub(e);
        if !diff.is_zero() {
            return Err(Error::Input(format!(
                "seed term at order {n} is not valued in the cohomology part"
            )));
        }
    }
    let mut phi = seed.truncated(order);
    let mut obstruction = ElementSeries::new();
    for n in 1..=order {
        // interactions at order n use only lower-order terms
        let interactions = evaluate_family(
            |k| algebra.map(k),
            algebra.max_arity(),
            &phi.truncated(n - 1),
            n,
            2,
        );
        let at_n = interactions.get(&n).cloned().unwrap_or_else(Element::zero);
        if !at_n.is_zero() {
            let u = qplus.contract(core::slice::from_ref(&at_n))?;
            let mut term = phi.term(n);
            term.sub(&u);
            phi.set_term(algebra.basis(), n, term)?;
            let ob = proj.contract(core::slice::from_ref(&at_n))?;
            if !ob.is_zero() {
                obstruction.insert(n, ob);
            }
        }
    }
    if series_is_zero(&obstruction) {
        let defect = mc_defect(algebra, &phi, order);
        if let Some((n, _)) = series_first_nonzero(&defect) {
            return Err(Error::Structure(format!(
                "vanishing obstruction but nonzero defect at order {n}"
            )));
        }
    }
    Ok(McSolution { phi, obstruction })
}

/// Pushforward of a series through a morphism,
/// `sum_n f_n(Phi, ..., Phi)`, truncated at the given order. When the
/// source series solves its Maurer-Cartan equation through the order, the
/// image is checked to solve the target one.
pub fn pushforward(
    f: &Morphism,
    source_alg: &AInfinity,
    target_alg: &AInfinity,
    phi: &FormalSeries,
    order: usize,
) -> Result<FormalSeries> {
    let raw = evaluate_family(|k| f.component(k), f.max_arity(), phi, order, 1);
    let mut out = FormalSeries::zero();
    for (n, e) in raw {
        out.set_term(target_alg.basis(), n, e)?;
    }
    if series_is_zero(&mc_defect(source_alg, phi, order)) {
        let image_defect = mc_defect(target_alg, &out, order);
        if let Some((n, _)) = series_first_nonzero(&image_defect) {
            return Err(Error::Structure(format!(
                "pushforward broke the Maurer-Cartan equation at order {n}"
            )));
        }
    }
    Ok(out)
}

/// A formal-parameter-graded gauge generator: degree minus one components
/// per (order >= 1, arity >= 0).
#[derive(Clone, Debug, Default)]
pub struct GaugeGenerator {
    /// arity-zero insertions per order
    pub constants: BTreeMap<usize, Element>,
    /// higher components per (order, arity)
    pub components: BTreeMap<(usize, usize), MultiMap>,
}

impl GaugeGenerator {
    pub fn new() -> Self {
        GaugeGenerator::default()
    }

    pub fn set_constant(&mut self, basis: &GradedBasis, order: usize, e: Element) -> Result<()> {
        if order == 0 {
            return Err(Error::Input("gauge generators must carry the formal parameter".into()));
        }
        if let Some(d) = e.homogeneous_degree(basis) {
            if d != -1 {
                return Err(Error::Input("gauge constants must have degree -1".into()));
            }
        }
        self.constants.insert(order, e);
        Ok(())
    }

    pub fn set_component(&mut self, order: usize, m: MultiMap) -> Result<()> {
        if order == 0 {
            return Err(Error::Input("gauge generators must carry the formal parameter".into()));
        }
        if m.degree() != -1 {
            return Err(Error::Input("gauge components must have degree -1".into()));
        }
        self.components.insert((order, m.arity()), m);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.constants.values().all(|e| e.is_zero())
            && self.components.values().all(|m| m.is_zero())
    }
}

/// Order-graded linear combinations of tensor words.
type GradedWords = BTreeMap<usize, WordSum>;

fn graded_add(sum: &mut GradedWords, order: usize, word: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = sum.entry(order).or_insert_with(WordSum::new);
    word_sum_add(slot, word, c);
    if slot.is_empty() {
        sum.remove(&order);
    }
}

/// The group-like element of a series: all tensor powers, graded by total
/// order, truncated.
fn exp_series(phi: &FormalSeries, order: usize) -> GradedWords {
    let mut out = GradedWords::new();
    graded_add(&mut out, 0, Vec::new(), Scalar::one());
    // repeatedly extend by one letter
    let mut frontier: Vec<(usize, Vec<usize>, Scalar)> =
        alloc::vec![(0, Vec::new(), Scalar::one())];
    while let Some((total, word, coeff)) = frontier.pop() {
        for (n, e) in phi.iter() {
            if total + n > order {
                continue;
            }
            for (idx, c) in e.iter() {
                let mut w = word.clone();
                w.push(idx);
                let nc = &coeff * c;
                graded_add(&mut out, total + n, w.clone(), nc.clone());
                frontier.push((total + n, w, nc));
            }
        }
    }
    out
}

/// Applies the coderivation lift of the structure (order-preserving) to
/// graded words.
fn apply_structure(algebra: &AInfinity, words: &GradedWords, order: usize) -> GradedWords {
    let mut out = GradedWords::new();
    for (&n, sum) in words {
        if n > order {
            continue;
        }
        for (word, c) in sum {
            for k in algebra.arities().collect::<Vec<_>>() {
                let m = algebra.map(k).unwrap();
                for (w, s) in apply_coderivation(algebra.basis(), m, word) {
                    graded_add(&mut out, n, w, &s * c);
                }
            }
        }
    }
    out
}

/// Applies the coderivation lift of a gauge generator (raises order).
fn apply_gauge(
    basis: &GradedBasis,
    alpha: &GaugeGenerator,
    words: &GradedWords,
    order: usize,
) -> GradedWords {
    let mut out = GradedWords::new();
    for (&n, sum) in words {
        for (word, c) in sum {
            for (&o, e) in &alpha.constants {
                if n + o > order || e.is_zero() {
                    continue;
                }
                for (w, s) in apply_coderivation_element(basis, e, -1, word) {
                    graded_add(&mut out, n + o, w, &s * c);
                }
            }
            for (&(o, _arity), m) in &alpha.components {
                if n + o > order || m.is_zero() {
                    continue;
                }
                for (w, s) in apply_coderivation(basis, m, word) {
                    graded_add(&mut out, n + o, w, &s * c);
                }
            }
        }
    }
    out
}

/// The finite gauge transformation `exp([m, alpha])` applied to the
/// group-like element of `phi`, re-extracted as a series. Because the
/// generator carries at least one power of the parameter, the exponential
/// truncates exactly at the requested order.
///
/// If `phi` solves the Maurer-Cartan equation through the order, the result
/// is checked to solve it too.
pub fn gauge_apply(
    algebra: &AInfinity,
    alpha: &GaugeGenerator,
    phi: &FormalSeries,
    order: usize,
) -> Result<FormalSeries> {
    for (&o, e) in &alpha.constants {
        if o == 0 && !e.is_zero() {
            return Err(Error::Input("gauge generator has an order-zero part".into()));
        }
    }
    for (&(o, _), m) in &alpha.components {
        if o == 0 && !m.is_zero() {
            return Err(Error::Input("gauge generator has an order-zero part".into()));
        }
    }
    let basis = algebra.basis();
    let mut total = exp_series(phi, order);
    // exp(D) with D = m . alpha + alpha . m; each application of D raises
    // the order by at least one.
    let mut current = total.clone();
    let mut factorial = Scalar::one();
    for j in 1..=order {
        factorial *= &Scalar::from_int(j as i64);
        let d1 = apply_structure(algebra, &apply_gauge(basis, alpha, &current, order), order);
        let d2 = apply_gauge(basis, alpha, &apply_structure(algebra, &current, order), order);
        let mut next = GradedWords::new();
        for (n, sum) in d1.into_iter().chain(d2) {
            for (w, c) in sum {
                graded_add(&mut next, n, w, c);
            }
        }
        let scale = factorial.inv().expect("nonzero");
        for (&n, sum) in &next {
            for (w, c) in sum {
                graded_add(&mut total, n, w.clone(), c * &scale);
            }
        }
        current = next;
        if current.values().all(|s| s.is_empty()) {
            break;
        }
    }
    // Extract the single-letter part.
    let mut out = FormalSeries::zero();
    for (&n, sum) in &total {
        if n == 0 {
            continue;
        }
        let mut e = Element::zero();
        for (w, c) in sum {
            if w.len() == 1 {
                e.add_term(w[0], c.clone());
            }
        }
        if !e.is_zero() {
            out.set_term(basis, n, e)?;
        }
    }
    if series_is_zero(&mc_defect(algebra, phi, order)) {
        let defect = mc_defect(algebra, &out, order);
        if let Some((n, _)) = series_first_nonzero(&defect) {
            return Err(Error::Structure(format!(
                "gauge transformation broke the Maurer-Cartan equation at order {n}"
            )));
        }
    }
    Ok(out)
}

/// The value of a gauge generator on a series,
/// `sum alpha_k(Phi, .., Phi)` plus the constants: a degree minus one
/// element series.
pub fn gauge_value(alpha: &GaugeGenerator, phi: &FormalSeries, order: usize) -> ElementSeries {
    let mut out = ElementSeries::new();
    for (&o, e) in &alpha.constants {
        if o <= order && !e.is_zero() {
            let slot = out.entry(o).or_insert_with(Element::zero);
            slot.add(e);
        }
    }
    let arities: Vec<usize> = alpha.components.keys().map(|&(_, k)| k).collect();
    for &(gen_order, k) in alpha.components.keys() {
        let m = &alpha.components[&(gen_order, k)];
        let partial = evaluate_family(
            |kk| if kk == k { Some(m) } else { None },
            k,
            phi,
            order.saturating_sub(gen_order),
            1,
        );
        for (n, e) in partial {
            if gen_order + n <= order && !e.is_zero() {
                let slot = out.entry(gen_order + n).or_insert_with(Element::zero);
                slot.add(&e);
            }
        }
    }
    let _ = arities;
    out.retain(|_, e| !e.is_zero());
    out
}

/// `sum_k sum_pos m_k(Phi, .., v, .., Phi)` for an element series `v`: the
/// single-letter part of the commutator insertion. The inserted letters
/// have odd degree but only pass degree-zero elements, so no signs arise.
pub fn insert_value(
    algebra: &AInfinity,
    phi: &FormalSeries,
    v: &ElementSeries,
    order: usize,
) -> ElementSeries {
    let mut out = ElementSeries::new();
    for k in 1..=algebra.max_arity() {
        let Some(mk) = algebra.map(k) else { continue };
        for pos in 0..k {
            for (&vo, ve) in v.iter() {
                if ve.is_zero() || vo > order {
                    continue;
                }
                // remaining k-1 slots filled by phi terms
                let mut stack: Vec<(usize, Vec<Element>)> = alloc::vec![(vo, Vec::new())];
                while let Some((total, picked)) = stack.pop() {
                    if picked.len() == k - 1 {
                        let mut args: Vec<Element> = Vec::with_capacity(k);
                        args.extend_from_slice(&picked[..pos]);
                        args.push(ve.clone());
                        args.extend_from_slice(&picked[pos..]);
                        let val = mk.contract(&args).expect("arity");
                        if !val.is_zero() {
                            let slot = out.entry(total).or_insert_with(Element::zero);
                            slot.add(&val);
                        }
                        continue;
                    }
                    for (n, e) in phi.iter() {
                        if total + n + (k - 1 - picked.len() - 1) <= order {
                            let mut p = picked.clone();
                            p.push(e.clone());
                            stack.push((total + n, p));
                        }
                    }
                }
            }
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// Same insertion sum for morphism components (used by the induced gauge
/// generator on the target of a morphism).
pub fn insert_value_morphism(
    f: &Morphism,
    phi: &FormalSeries,
    v: &ElementSeries,
    order: usize,
) -> ElementSeries {
    let mut out = ElementSeries::new();
    for k in 1..=f.max_arity() {
        let Some(fk) = f.component(k) else { continue };
        for pos in 0..k {
            for (&vo, ve) in v.iter() {
                if ve.is_zero() || vo > order {
                    continue;
                }
                let mut stack: Vec<(usize, Vec<Element>)> = alloc::vec![(vo, Vec::new())];
                while let Some((total, picked)) = stack.pop() {
                    if picked.len() == k - 1 {
                        let mut args: Vec<Element> = Vec::with_capacity(k);
                        args.extend_from_slice(&picked[..pos]);
                        args.push(ve.clone());
                        args.extend_from_slice(&picked[pos..]);
                        let val = fk.contract(&args).expect("arity");
                        if !val.is_zero() {
                            let slot = out.entry(total).or_insert_with(Element::zero);
                            slot.add(&val);
                        }
                        continue;
                    }
                    for (n, e) in phi.iter() {
                        if total + n + (k - 1 - picked.len() - 1) <= order {
                            let mut p = picked.clone();
                            p.push(e.clone());
                            stack.push((total + n, p));
                        }
                    }
                }
            }
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// The products induced by a background series (the structure shifted by
/// `Phi`): for each arity and parameter order, the sum over interleavings
/// of background insertions. The order-zero arity-`k` part is the original
/// product.
pub fn shifted_products(
    algebra: &AInfinity,
    phi: &FormalSeries,
    arity: usize,
    order: usize,
) -> BTreeMap<usize, MultiMap> {
    let basis = algebra.basis();
    let mut out: BTreeMap<usize, MultiMap> = BTreeMap::new();
    for total_arity in arity..=algebra.max_arity() {
        let Some(m) = algebra.map(total_arity) else { continue };
        let inserts = total_arity - arity;
        // choose positions of the `arity` live slots among total_arity, and
        // orders for each inserted background letter
        let slots = choose(total_arity, arity);
        for live in slots {
            let mut stack: Vec<(usize, Vec<(usize, Element)>)> =
                alloc::vec![(0usize, Vec::new())];
            while let Some((total, picked)) = stack.pop() {
                if picked.len() == inserts {
                    // build the tensor: contract m over background slots
                    let mut partial = MultiMap::new(arity, 1);
                    'entries: for (w, o, c) in m.iter() {
                        let mut coeff = c.clone();
                        let mut live_word = Vec::with_capacity(arity);
                        let mut bg_iter = picked.iter();
                        for (slot, &idx) in w.iter().enumerate() {
                            if live.contains(&slot) {
                                live_word.push(idx);
                            } else {
                                let (_, e) = bg_iter.next().expect("count");
                                let a = e.coeff(idx);
                                if a.is_zero() {
                                    continue 'entries;
                                }
                                coeff *= &a;
                            }
                        }
                        partial.add_term(live_word, o, coeff);
                    }
                    if !partial.is_zero() {
                        let slot = out
                            .entry(total)
                            .or_insert_with(|| MultiMap::new(arity, 1));
                        slot.add(&partial);
                    }
                    continue;
                }
                for (n, e) in phi.iter() {
                    if total + n + (inserts - picked.len() - 1) <= order {
                        let mut p = picked.clone();
                        p.push((n, e.clone()));
                        stack.push((total + n, p));
                    }
                }
            }
        }
    }
    let _ = basis;
    out.retain(|_, m| !m.is_zero());
    out
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, prefix: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix);
            return;
        }
        for i in start..n {
            let mut p = prefix.clone();
            p.push(i);
            go(i + 1, n, k, p, out);
        }
    }
    let mut out = Vec::new();
    go(0, n, k, Vec::new(), &mut out);
    out
}
