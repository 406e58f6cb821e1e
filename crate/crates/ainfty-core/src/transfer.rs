//! Minimal models by tree summation and by recursion, the decomposition
//! isomorphism, cyclic transfer, tree amplitudes, and effective actions.
//!
//! The tree evaluation attaches a product to each vertex, minus the
//! contracting homotopy to each internal edge, and either the projection
//! (for the transferred products) or minus the homotopy (for the morphism
//! components) to the root. The recursion of the explicit minimal model and
//! the sum over all rooted planar trees are implemented independently and
//! cross-checked entrywise on every call.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{
    compositions_with_parts, cyclic_vertex, verify_cyclic_morphism, verify_cyclicity, AInfinity,
    CyclicTensor, Morphism, SymplecticForm,
};
use crate::graded::{Element, GradedBasis, MultiMap};
use crate::matrix::Matrix;
use crate::ncgeo::CyclicPoly;
use crate::scalar::Scalar;
use crate::splitting::Splitting;
use crate::trees::{cyclic_classes, enumerate_trees, rootings, PlanarTree};
use crate::{Error, Result};

/// Output of homotopy transfer: the minimal structure on the cohomology,
/// the quasi-isomorphism embedding it, and (in the cyclic case) the
/// restricted pairing.
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub minimal: AInfinity,
    pub morphism: Morphism,
    pub omega_p: Option<SymplecticForm>,
    /// Inclusion of the cohomology representatives into the ambient space,
    /// column per generator of the minimal basis.
    pub reps: Vec<Element>,
}

/// Tree evaluation context: caches the per-tree tensors within one call.
struct TreeEval<'a> {
    algebra: &'a AInfinity,
    split: &'a Splitting,
    f_cache: BTreeMap<PlanarTree, MultiMap>,
    m_cache: BTreeMap<PlanarTree, MultiMap>,
}

impl<'a> TreeEval<'a> {
    fn new(algebra: &'a AInfinity, split: &'a Splitting) -> Self {
        TreeEval { algebra, split, f_cache: BTreeMap::new(), m_cache: BTreeMap::new() }
    }

    /// The bare tree tensor: products on vertices, minus homotopy on
    /// internal edges, nothing on the root. A bare edge evaluates to the
    /// differential.
    fn m_tensor(&mut self, tree: &PlanarTree) -> MultiMap {
        if let Some(t) = self.m_cache.get(tree) {
            return t.clone();
        }
        let out = match tree {
            PlanarTree::Leaf => self.algebra.differential(),
            PlanarTree::Vertex(children) => {
                let r = children.len();
                match self.algebra.map(r) {
                    None => MultiMap::new(tree.leaves(), 1),
                    Some(mr) => {
                        let inner: Vec<MultiMap> =
                            children.iter().map(|c| self.f_tensor(c)).collect();
                        let refs: Vec<&MultiMap> = inner.iter().collect();
                        mr.blocks(self.algebra.basis(), &refs)
                    }
                }
            }
        };
        self.m_cache.insert(tree.clone(), out.clone());
        out
    }

    /// The morphism-side tree tensor: minus the homotopy after the bare
    /// tensor; a bare edge is the identity.
    fn f_tensor(&mut self, tree: &PlanarTree) -> MultiMap {
        if let Some(t) = self.f_cache.get(tree) {
            return t.clone();
        }
        let out = match tree {
            PlanarTree::Leaf => MultiMap::identity(self.algebra.basis()),
            PlanarTree::Vertex(_) => self
                .m_tensor(tree)
                .then(self.split.qplus())
                .scaled(&-Scalar::one()),
        };
        self.f_cache.insert(tree.clone(), out.clone());
        out
    }
}

/// The tensor of one tree with minus-homotopy root (a morphism component
/// before restriction to the cohomology).
pub fn tree_map_f(tree: &PlanarTree, algebra: &AInfinity, split: &Splitting) -> MultiMap {
    TreeEval::new(algebra, split).f_tensor(tree)
}

/// The bare tensor of one tree (differential on the bare edge, product on a
/// corolla), the building block of both the transferred products and the
/// amplitudes.
pub fn tree_map_m(tree: &PlanarTree, algebra: &AInfinity, split: &Splitting) -> MultiMap {
    TreeEval::new(algebra, split).m_tensor(tree)
}

/// Sums of tree tensors per arity, on the ambient space.
struct TreeSums {
    /// `f_k = sum of f-tensors over all k-trees` (identity at k = 1).
    f: BTreeMap<usize, MultiMap>,
    /// `m_k = sum of bare tensors over all k-trees` (differential at k = 1).
    m: BTreeMap<usize, MultiMap>,
}

fn tree_sums(algebra: &AInfinity, split: &Splitting, max_arity: usize) -> TreeSums {
    let mut eval = TreeEval::new(algebra, split);
    let mut f = BTreeMap::new();
    let mut m = BTreeMap::new();
    for k in 1..=max_arity {
        let mut fk = MultiMap::new(k, 0);
        let mut mk = MultiMap::new(k, 1);
        for tree in enumerate_trees(k) {
            fk.add(&eval.f_tensor(&tree));
            mk.add(&eval.m_tensor(&tree));
        }
        f.insert(k, fk);
        m.insert(k, mk);
    }
    TreeSums { f, m }
}

/// Inclusion/projection data of the cohomology inside the ambient space.
pub struct SubSpace {
    pub basis: GradedBasis,
    pub reps: Vec<Element>,
    /// `iota` as entries sub-index -> ambient index.
    pub iota: MultiMap,
    /// `pi` as entries ambient index -> sub-index.
    pub pi: MultiMap,
}

pub fn subspace(split: &Splitting, ambient: &GradedBasis) -> Result<SubSpace> {
    let (basis, reps, pi_mat) = split.cohomology_maps(ambient)?;
    let mut iota = MultiMap::new(1, 0);
    for (j, rep) in reps.iter().enumerate() {
        for (i, c) in rep.iter() {
            iota.add_term(alloc::vec![j], i, c.clone());
        }
    }
    let mut pi = MultiMap::new(1, 0);
    for r in 0..pi_mat.rows {
        for c in 0..pi_mat.cols {
            if !pi_mat.get(r, c).is_zero() {
                pi.add_term(alloc::vec![c], r, pi_mat.get(r, c).clone());
            }
        }
    }
    Ok(SubSpace { basis, reps, iota, pi })
}

/// Restricts an ambient tensor to the cohomology on every input.
fn restrict_inputs(t: &MultiMap, sub: &SubSpace) -> MultiMap {
    let iotas: Vec<&MultiMap> = (0..t.arity()).map(|_| &sub.iota).collect();
    t.blocks(&sub.basis, &iotas)
}

/// The explicit minimal model and quasi-isomorphism for a verified
/// structure and splitting, truncated at `max_arity`.
///
/// Both the arity recursion and the sum over rooted planar trees are
/// computed; a mismatch is reported as a structural error.
pub fn transfer(algebra: &AInfinity, split: &Splitting, max_arity: usize) -> Result<TransferResult> {
    let sub = subspace(split, algebra.basis())?;
    let sums = tree_sums(algebra, split, max_arity);

    // Tree-sum route: f^p_k = (sum over k-trees) . iota^k,
    // m^p_k = pi . (bare sum) . iota^k.
    let mut morphism = Morphism::new(sub.basis.clone(), algebra.basis().clone(), max_arity);
    let mut minimal = AInfinity::new(sub.basis.clone(), max_arity);
    for k in 1..=max_arity {
        let fk = restrict_inputs(&sums.f[&k], &sub);
        if !fk.is_zero() {
            morphism.set_component(fk)?;
        }
        if k >= 2 {
            let mk = restrict_inputs(&sums.m[&k], &sub).then(&sub.pi);
            if !mk.is_zero() {
                minimal.set_map(mk)?;
            }
        }
    }

    // Recursion route, computed independently and compared.
    let rec = transfer_by_recursion(algebra, split, &sub, max_arity)?;
    for k in 1..=max_arity {
        let mut df = morphism.component_or_zero(k);
        df.sub(&rec.0.component_or_zero(k));
        if !df.is_zero() {
            return Err(Error::Structure(format!(
                "tree sum and recursion disagree in morphism component {k}"
            )));
        }
        if k >= 2 {
            let mut dm = minimal.map_or_zero(k);
            dm.sub(&rec.1.map_or_zero(k));
            if !dm.is_zero() {
                return Err(Error::Structure(format!(
                    "tree sum and recursion disagree in product {k}"
                )));
            }
        }
    }

    Ok(TransferResult { minimal, morphism, omega_p: None, reps: sub.reps })
}

/// The arity recursion for the minimal model: each morphism component is
/// minus the homotopy applied to all products of earlier components, and
/// each product is the projection of the same sum.
fn transfer_by_recursion(
    algebra: &AInfinity,
    split: &Splitting,
    sub: &SubSpace,
    max_arity: usize,
) -> Result<(Morphism, AInfinity)> {
    let mut f: BTreeMap<usize, MultiMap> = BTreeMap::new();
    f.insert(1, sub.iota.clone());
    let mut minimal = AInfinity::new(sub.basis.clone(), max_arity);
    for k in 2..=max_arity {
        let mut acc = MultiMap::new(k, 1);
        for i in 2..=k {
            let Some(mi) = algebra.map(i) else { continue };
            for comp in compositions_with_parts(k, i) {
                let inners: Option<Vec<&MultiMap>> = comp.iter().map(|p| f.get(p)).collect();
                let Some(inners) = inners else { continue };
                acc.add(&mi.blocks(&sub.basis, &inners));
            }
        }
        let fk = acc.then(split.qplus()).scaled(&-Scalar::one());
        let mk = acc.then(&sub.pi);
        if !mk.is_zero() {
            minimal.set_map(mk)?;
        }
        f.insert(k, fk);
    }
    let mut morphism = Morphism::new(sub.basis.clone(), algebra.basis().clone(), max_arity);
    for (_, fk) in f {
        if !fk.is_zero() {
            morphism.set_component(fk)?;
        }
    }
    Ok((morphism, minimal))
}

/// The transferred structure and isomorphism on the whole space: products
/// `P . (tree sums)` with the differential kept, morphism with identity
/// linear part, and its explicit inverse `Phi + Q+ sum m_k(Phi)`.
///
/// Returns `(structure, morphism, inverse)`; the composition of the
/// morphism with its inverse is checked to be the identity up to
/// `max_arity`.
pub fn transfer_full(
    algebra: &AInfinity,
    split: &Splitting,
    max_arity: usize,
) -> Result<(AInfinity, Morphism, Morphism)> {
    let basis = algebra.basis();
    let sums = tree_sums(algebra, split, max_arity);
    let mut structure = AInfinity::new(basis.clone(), max_arity);
    structure.set_map(algebra.differential())?;
    let proj = split.proj();
    for k in 2..=max_arity {
        let mk = sums.m[&k].then(proj);
        if !mk.is_zero() {
            structure.set_map(mk)?;
        }
    }
    let mut morphism = Morphism::new(basis.clone(), basis.clone(), max_arity);
    for k in 1..=max_arity {
        let fk = &sums.f[&k];
        if !fk.is_zero() {
            morphism.set_component(fk.clone())?;
        }
    }
    // Explicit inverse: identity plus Q+ m_k.
    let mut inverse = Morphism::new(basis.clone(), basis.clone(), max_arity);
    inverse.set_component(MultiMap::identity(basis))?;
    for k in 2..=max_arity {
        if let Some(mk) = algebra.map(k) {
            let gk = mk.then(split.qplus());
            if !gk.is_zero() {
                inverse.set_component(gk)?;
            }
        }
    }
    let left = inverse.compose(&morphism)?;
    let right = morphism.compose(&inverse)?;
    if !left.is_identity_up_to(max_arity) || !right.is_identity_up_to(max_arity) {
        return Err(Error::Structure(
            "explicit inverse does not invert the transferred morphism".into(),
        ));
    }
    Ok((structure, morphism, inverse))
}

/// The two-sided word homotopy on arity-`n` tensors:
/// `K(T) = Q+ . T + (-1)^deg(T) P . T . H` where `H` is the identity
/// (x) homotopy (x) projection operator on the input side. It satisfies
/// `dK + Kd = Id - Pi^p` for the mapping-complex differential
/// `d(T) = Q . T - (-1)^deg(T) T . (Q lifted)`, with `Pi^p` the projection
/// killing every entry with a non-cohomology index.
pub fn word_homotopy(t: &MultiMap, split: &Splitting, basis: &GradedBasis) -> MultiMap {
    let n = t.arity();
    let qplus = split.qplus();
    let proj = split.proj();
    let id = MultiMap::identity(basis);
    let mut out = t.then(qplus);
    // T . H: sum over the homotopy slot position.
    let mut th = MultiMap::new(n, t.degree() - 1);
    for a in 0..n {
        let mut inners: Vec<&MultiMap> = Vec::with_capacity(n);
        for slot in 0..n {
            if slot < a {
                inners.push(&id);
            } else if slot == a {
                inners.push(qplus);
            } else {
                inners.push(proj);
            }
        }
        th.add(&t.blocks(basis, &inners));
    }
    let sign = Scalar::neg_one_pow(t.degree());
    out.add(&th.then(proj).scaled(&sign));
    out
}

/// The mapping-complex differential on arity-`n` tensors.
pub fn word_differential(t: &MultiMap, algebra: &AInfinity) -> MultiMap {
    let q = algebra.differential();
    let mut out = t.then(&q);
    let sign = -Scalar::neg_one_pow(t.degree());
    for p in 0..t.arity() {
        out.add(&t.insert(algebra.basis(), p, &q).scaled(&sign));
    }
    out
}

/// Projection `Pi^p`: conjugates every index by the cohomology projection.
pub fn word_projection(t: &MultiMap, split: &Splitting, basis: &GradedBasis) -> MultiMap {
    let proj = split.proj();
    let projs: Vec<&MultiMap> = (0..t.arity()).map(|_| proj).collect();
    t.blocks(basis, &projs).then(proj)
}

/// Decomposition: conjugates the structure arity by arity so every product
/// beyond the differential is supported on the cohomology part, and returns
/// the decomposed structure with the isomorphism onto the original one.
pub fn decompose(
    algebra: &AInfinity,
    split: &Splitting,
    max_arity: usize,
) -> Result<(AInfinity, Morphism)> {
    let basis = algebra.basis();
    let mut current = algebra.clone();
    let mut total = Morphism::identity(basis, max_arity);
    for l in 2..=max_arity {
        let t = current.map_or_zero(l);
        if t.is_zero() {
            continue;
        }
        let correction = word_homotopy(&t, split, basis).scaled(&-Scalar::one());
        if correction.is_zero() {
            continue;
        }
        let mut step = Morphism::identity(basis, max_arity);
        step.set_component(correction)?;
        let step_inv = step.inverse()?;
        current = step.conjugate(&current, &step_inv, max_arity)?;
        total = total.compose(&step)?;
    }
    // The products beyond the differential must now be supported on the
    // cohomology part of every index.
    for k in 2..=max_arity {
        let mk = current.map_or_zero(k);
        let mut diff = word_projection(&mk, split, basis);
        diff.sub(&mk);
        if !diff.is_zero() {
            return Err(Error::Structure(format!(
                "decomposition left a non-minimal component at arity {k}"
            )));
        }
    }
    Ok((current, total))
}

/// Cyclic transfer: requires a pairing-compatible splitting, restricts the
/// pairing to the cohomology, and verifies both cyclicity of the minimal
/// structure and cyclicity of the quasi-isomorphism.
pub fn cyclic_transfer(
    algebra: &AInfinity,
    omega: &SymplecticForm,
    split: &Splitting,
    max_arity: usize,
) -> Result<TransferResult> {
    let compat = split.verify(algebra, Some(omega));
    if !compat.pass {
        return Err(Error::Input(format!(
            "splitting is not compatible with the pairing: {}",
            compat.describe(algebra.basis())
        )));
    }
    let mut result = transfer(algebra, split, max_arity)?;
    // omega restricted through the inclusion.
    let mut entries = Vec::new();
    for (a, ra) in result.reps.iter().enumerate() {
        for (b, rb) in result.reps.iter().enumerate() {
            let v = omega.pair(ra, rb);
            if !v.is_zero() {
                entries.push((a, b, v));
            }
        }
    }
    let omega_p = SymplecticForm::new(result.minimal.basis(), &entries)?;
    let cyc = verify_cyclicity(&omega_p, &result.minimal, max_arity + 1)?;
    if !cyc.pass {
        return Err(Error::Structure(format!(
            "transferred structure is not cyclic: {}",
            cyc.describe(result.minimal.basis())
        )));
    }
    let morph = verify_cyclic_morphism(&result.morphism, &omega_p, omega, max_arity + 1)?;
    if !morph.pass {
        return Err(Error::Structure(format!(
            "transferred morphism does not preserve the pairing: {}",
            morph.describe(result.minimal.basis())
        )));
    }
    result.omega_p = Some(omega_p);
    Ok(result)
}

/// `omega . (1 (x) T)` as a scalar tensor: the composition Koszul sign
/// `(-1)^(deg T * deg first input)` is generated here.
pub fn omega_one_tensor(
    omega: &SymplecticForm,
    basis: &GradedBasis,
    t: &MultiMap,
) -> CyclicTensor {
    let mut v = CyclicTensor::new(t.arity() + 1);
    for (w, out, c) in t.iter() {
        for i0 in 0..basis.dim() {
            let om = omega.entry(i0, out);
            if om.is_zero() {
                continue;
            }
            let sign = Scalar::neg_one_pow(t.degree() * basis.degree(i0));
            let mut word = Vec::with_capacity(t.arity() + 1);
            word.push(i0);
            word.extend_from_slice(w);
            v.add_term(word, &(&sign * &om) * c);
        }
    }
    v
}

/// Restricts a scalar tensor through the inclusion on every slot.
fn tensor_restrict(v: &CyclicTensor, sub_iota: &MultiMap, sub_dim: usize) -> CyclicTensor {
    let n = v.arity();
    let mut out = CyclicTensor::new(n);
    // iota entries: sub index -> ambient index.
    let mut cols: Vec<Vec<(usize, Scalar)>> = alloc::vec![Vec::new(); sub_dim];
    for (w, o, c) in sub_iota.iter() {
        cols[w[0]].push((o, c.clone()));
    }
    fn walk(
        v: &CyclicTensor,
        cols: &[Vec<(usize, Scalar)>],
        word: &mut Vec<usize>,
        ambient: &mut Vec<usize>,
        coeff: Scalar,
        out: &mut CyclicTensor,
        n: usize,
    ) {
        if word.len() == n {
            let base = v.coeff(ambient);
            if !base.is_zero() {
                out.add_term(word.clone(), &coeff * &base);
            }
            return;
        }
        let slot = word.len();
        let _ = slot;
        for (sub_idx, choices) in cols.iter().enumerate() {
            for (amb, c) in choices {
                word.push(sub_idx);
                ambient.push(*amb);
                walk(v, cols, word, ambient, &coeff * c, out, n);
                word.pop();
                ambient.pop();
            }
        }
    }
    let mut word = Vec::new();
    let mut ambient = Vec::new();
    walk(v, &cols, &mut word, &mut ambient, Scalar::one(), &mut out, n);
    out
}

/// Report of the three-way amplitude computation.
pub struct AmplitudeResult {
    /// The amplitude on the ambient space, from the plain sum over trees.
    pub tensor: CyclicTensor,
    /// The same tensor from the cyclic-class sum with symmetry factors.
    pub by_classes: CyclicTensor,
    /// The on-shell restriction, and the minimal-product comparison value.
    pub on_shell: CyclicTensor,
    pub from_minimal: CyclicTensor,
}

/// The `n`-point tree amplitude, computed three ways: as the sum over all
/// `(n-1)`-trees, as the cyclic-class sum weighted by symmetry factors, and
/// (after restriction) as the pairing with the transferred product. All
/// three must agree; disagreement is a structural error.
pub fn amplitude(
    algebra: &AInfinity,
    omega: &SymplecticForm,
    split: &Splitting,
    n: usize,
    max_arity: usize,
) -> Result<AmplitudeResult> {
    if n < 3 {
        return Err(Error::Input("amplitude needs n >= 3".into()));
    }
    let basis = algebra.basis();
    let mut eval = TreeEval::new(algebra, split);
    // Plain sum over G_{n-1}.
    let mut plain = CyclicTensor::new(n);
    for tree in enumerate_trees(n - 1) {
        let t = eval.m_tensor(&tree);
        plain.add(&omega_one_tensor(omega, basis, &t));
    }
    // Cyclic-class sum: per class, the sum over all leg rootings of the
    // representative, weighted by one over the class automorphism count.
    let mut by_classes = CyclicTensor::new(n);
    for class in cyclic_classes(n)? {
        let mut class_sum = CyclicTensor::new(n);
        for rooted in rootings(&class.representative) {
            let t = eval.m_tensor(&rooted);
            class_sum.add(&omega_one_tensor(omega, basis, &t));
        }
        by_classes.add(&class_sum.scaled(&class.factor));
    }
    let mut diff = plain.clone();
    diff.sub(&by_classes);
    if !diff.is_zero() {
        return Err(Error::Structure(
            "tree sum and cyclic-class sum disagree".into(),
        ));
    }
    // On-shell: restrict and compare against the transferred product.
    let result = cyclic_transfer(algebra, omega, split, max_arity.max(n - 1))?;
    let sub = subspace(split, basis)?;
    let on_shell = tensor_restrict(&plain, &sub.iota, sub.basis.dim());
    let omega_p = result.omega_p.as_ref().expect("cyclic transfer sets omega_p");
    let from_minimal = cyclic_vertex(omega_p, &result.minimal, n - 1)?;
    let mut d2 = on_shell.clone();
    d2.sub(&from_minimal);
    if !d2.is_zero() {
        return Err(Error::Structure(
            "on-shell amplitude does not match the transferred product".into(),
        ));
    }
    Ok(AmplitudeResult { tensor: plain, by_classes, on_shell, from_minimal })
}

/// The action of a cyclic minimal structure: the cyclic polynomial whose
/// word-`(k+1)` coefficients are the vertex tensors of the products.
pub fn effective_action(result: &TransferResult) -> Result<CyclicPoly> {
    let omega_p = result
        .omega_p
        .as_ref()
        .ok_or_else(|| Error::Input("effective_action needs a cyclic transfer result".into()))?;
    let mut poly = CyclicPoly::zero();
    for k in result.minimal.arities().collect::<Vec<_>>() {
        let v = cyclic_vertex(omega_p, &result.minimal, k)?;
        for (w, c) in v.iter() {
            poly.add_term(w.to_vec(), c.clone());
        }
    }
    Ok(poly)
}

/// Solves for a linear intertwiner between two minimal structures with the
/// same underlying basis: a degree-zero isomorphism `g` on the basis and a
/// two-input correction such that the morphism identity holds at arities
/// two and three. Returns the morphism if one exists. Used to compare
/// minimal models that are only unique up to isomorphism.
pub fn linear_intertwiner(
    a: &AInfinity,
    b: &AInfinity,
    max_check: usize,
) -> Option<Morphism> {
    // Try the identity linear part with a quadratic correction g2 solving
    // the arity-3 identity; arity 2 must already agree on the nose.
    let basis = a.basis();
    let mut f = Morphism::identity(basis, max_check.max(3));
    let d2 = f.defect(a, b, 2).ok()?;
    if !d2.is_zero() {
        return None;
    }
    // Unknown g2 entries: all degree-homogeneous (w, o) pairs.
    let mut slots: Vec<(Vec<usize>, usize)> = Vec::new();
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            for o in 0..basis.dim() {
                if basis.degree(o) == basis.degree(i) + basis.degree(j) {
                    slots.push((alloc::vec![i, j], o));
                }
            }
        }
    }
    // The defect at arity 3 is affine in g2; build the linear system by
    // probing unit values.
    let base = f.defect(a, b, 3).ok()?;
    let mut columns: Vec<MultiMap> = Vec::new();
    for (w, o) in &slots {
        let mut g2 = MultiMap::new(2, 0);
        g2.add_term(w.clone(), *o, Scalar::one());
        let mut probe = Morphism::identity(basis, max_check.max(3));
        probe.set_component(g2).ok()?;
        let mut col = probe.defect(a, b, 3).ok()?;
        col.sub(&base);
        columns.push(col);
    }
    // Collect all defect coordinates.
    let mut coords: Vec<(Vec<usize>, usize)> = Vec::new();
    for (w, o, _) in base.iter() {
        coords.push((w.to_vec(), o));
    }
    for col in &columns {
        for (w, o, _) in col.iter() {
            coords.push((w.to_vec(), o));
        }
    }
    coords.sort();
    coords.dedup();
    let mut system = Matrix::zero(coords.len(), slots.len());
    let mut rhs = Vec::with_capacity(coords.len());
    for (r, (w, o)) in coords.iter().enumerate() {
        for (c, col) in columns.iter().enumerate() {
            system.set(r, c, col.coeff(w, *o));
        }
        rhs.push(-base.coeff(w, *o));
    }
    let sol = system.solve(&rhs)?;
    let mut g2 = MultiMap::new(2, 0);
    for ((w, o), v) in slots.into_iter().zip(sol) {
        if !v.is_zero() {
            g2.add_term(w, o, v);
        }
    }
    if !g2.is_zero() {
        f.set_component(g2).ok()?;
    }
    // Confirm through the requested arity where possible.
    for nn in 1..=max_check.min(3) {
        if !f.defect(a, b, nn).ok()?.is_zero() {
            return None;
        }
    }
    Some(f)
}
