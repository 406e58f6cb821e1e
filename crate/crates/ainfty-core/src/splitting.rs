//! Hodge-Kodaira decompositions of the complex `(H, Q)`.
//!
//! A [`Splitting`] is a pair `(Q+, P)` with `QQ+ + Q+Q + P = Id`, `P^2 = P`
//! and `QP = PQ = 0`, splitting `H` into exact, unphysical and cohomology
//! parts. Three constructors are provided: plain Gaussian elimination,
//! a symplectically compatible refinement, and the propagator form built
//! from a Darboux field/antifield partition. All constructions use
//! first-nonzero pivoting so results are reproducible, and every constructor
//! verifies its output instead of trusting the derivation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{AInfinity, CheckReport, SymplecticForm};
use crate::graded::{Element, GradedBasis, MultiMap};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// The operators `(Q+, P)` of a Hodge-Kodaira decomposition.
#[derive(Clone, Debug)]
pub struct Splitting {
    qplus: MultiMap,
    proj: MultiMap,
}

fn as_matrix(m: &MultiMap, dim: usize) -> Matrix {
    let mut out = Matrix::zero(dim, dim);
    for (w, o, c) in m.iter() {
        let mut v = out.get(o, w[0]).clone();
        v += c;
        out.set(o, w[0], v);
    }
    out
}

fn from_matrix(m: &Matrix, degree: i64) -> MultiMap {
    let mut out = MultiMap::new(1, degree);
    for r in 0..m.rows {
        for c in 0..m.cols {
            if !m.get(r, c).is_zero() {
                out.add_term(alloc::vec![c], r, m.get(r, c).clone());
            }
        }
    }
    out
}

impl Splitting {
    pub fn from_parts(qplus: MultiMap, proj: MultiMap) -> Result<Self> {
        if qplus.arity() != 1 || qplus.degree() != -1 {
            return Err(Error::Input("Q+ must be an arity-1 map of degree -1".into()));
        }
        if proj.arity() != 1 || proj.degree() != 0 {
            return Err(Error::Input("P must be an arity-1 map of degree 0".into()));
        }
        Ok(Splitting { qplus, proj })
    }

    pub fn qplus(&self) -> &MultiMap {
        &self.qplus
    }

    pub fn proj(&self) -> &MultiMap {
        &self.proj
    }

    /// Entrywise verification of the decomposition identities, and of the
    /// pairing compatibility when a symplectic form is supplied.
    pub fn verify(&self, algebra: &AInfinity, omega: Option<&SymplecticForm>) -> CheckReport {
        let basis = algebra.basis();
        let dim = basis.dim();
        let q = as_matrix(&algebra.differential(), dim);
        let qp = as_matrix(&self.qplus, dim);
        let p = as_matrix(&self.proj, dim);
        let id = Matrix::identity(dim);

        let mut hk = q.mul(&qp);
        let qpq = qp.mul(&q);
        for r in 0..dim {
            for c in 0..dim {
                let mut v = hk.get(r, c).clone();
                v += qpq.get(r, c);
                v += p.get(r, c);
                v -= id.get(r, c);
                hk.set(r, c, v);
            }
        }
        let named: &[(&str, Matrix)] = &[
            ("QQ+ + Q+Q + P - Id", hk),
            ("P^2 - P", {
                let mut m = p.mul(&p);
                for r in 0..dim {
                    for c in 0..dim {
                        let mut v = m.get(r, c).clone();
                        v -= p.get(r, c);
                        m.set(r, c, v);
                    }
                }
                m
            }),
            ("QP", q.mul(&p)),
            ("PQ", p.mul(&q)),
            ("QQ+Q - Q", {
                let mut m = q.mul(&qp).mul(&q);
                for r in 0..dim {
                    for c in 0..dim {
                        let mut v = m.get(r, c).clone();
                        v -= q.get(r, c);
                        m.set(r, c, v);
                    }
                }
                m
            }),
            ("Q+QQ+ - Q+", {
                let mut m = qp.mul(&q).mul(&qp);
                for r in 0..dim {
                    for c in 0..dim {
                        let mut v = m.get(r, c).clone();
                        v -= qp.get(r, c);
                        m.set(r, c, v);
                    }
                }
                m
            }),
            ("(QQ+)(Q+Q)", q.mul(&qp).mul(&qp).mul(&q)),
            ("P(Q+Q)", p.mul(&qp).mul(&q)),
            ("(Q+Q)P", qp.mul(&q).mul(&p)),
        ];
        let mut checked = 0;
        for (label, m) in named {
            checked += 1;
            if !m.is_zero() {
                for r in 0..dim {
                    for c in 0..dim {
                        if !m.get(r, c).is_zero() {
                            let mut rep = CheckReport::failing(
                                checked,
                                1,
                                alloc::vec![c],
                                r,
                                m.get(r, c).clone(),
                            );
                            rep.witness = Some((1, alloc::vec![c], r, m.get(r, c).clone()));
                            let _ = label;
                            return rep;
                        }
                    }
                }
            }
        }
        if let Some(om) = omega {
            // omega(1 (x) Q+) = omega(Q+ (x) 1) and the same for P.
            for (label_deg, op) in [(&qp, &qp), (&p, &p)].iter().enumerate() {
                let _ = label_deg;
                let m = op.0;
                for i in 0..dim {
                    for j in 0..dim {
                        let mut lhs = Scalar::zero();
                        let mut rhs = Scalar::zero();
                        for k in 0..dim {
                            lhs += &(&om.entry(i, k) * m.get(k, j));
                            rhs += &(&om.entry(k, j) * m.get(k, i));
                        }
                        checked += 1;
                        let diff = lhs - rhs;
                        if !diff.is_zero() {
                            return CheckReport::failing(checked, 2, alloc::vec![i, j], usize::MAX, diff);
                        }
                    }
                }
            }
        }
        CheckReport::passing(checked)
    }

    /// A deterministic basis of the cohomology `H^p = im P`, as elements.
    pub fn cohomology_basis(&self, basis: &GradedBasis) -> Vec<Element> {
        let dim = basis.dim();
        let p = as_matrix(&self.proj, dim);
        let pivots = p.pivot_columns();
        pivots
            .into_iter()
            .map(|c| {
                let mut e = Element::zero();
                for r in 0..dim {
                    if !p.get(r, c).is_zero() {
                        e.add_term(r, p.get(r, c).clone());
                    }
                }
                e
            })
            .collect()
    }

    /// The graded basis of `H^p` (auto-named `p0, p1, ...`), the inclusion
    /// entries `iota: H^p -> H` and the projection entries `pi: H -> H^p`
    /// with `iota . pi = P` and `pi . iota = Id`.
    pub fn cohomology_maps(
        &self,
        basis: &GradedBasis,
    ) -> Result<(GradedBasis, Vec<Element>, Matrix)> {
        let reps = self.cohomology_basis(basis);
        let r = reps.len();
        let dim = basis.dim();
        let mut b = Matrix::zero(dim, r);
        let mut degrees = Vec::with_capacity(r);
        for (j, rep) in reps.iter().enumerate() {
            let deg = rep
                .homogeneous_degree(basis)
                .ok_or_else(|| Error::Structure("cohomology representative not homogeneous".into()))?;
            degrees.push(deg);
            for (i, c) in rep.iter() {
                b.set(i, j, c.clone());
            }
        }
        let sub = GradedBasis::with_degrees(&degrees);
        // pi = solve(B, P) column by column.
        let p = as_matrix(&self.proj, dim);
        let mut pi = Matrix::zero(r, dim);
        for col in 0..dim {
            let rhs: Vec<Scalar> = (0..dim).map(|row| p.get(row, col).clone()).collect();
            let x = b
                .solve(&rhs)
                .ok_or_else(|| Error::Structure("projection does not factor through its image".into()))?;
            for row in 0..r {
                pi.set(row, col, x[row].clone());
            }
        }
        Ok((sub, reps, pi))
    }
}

/// Splitting by exact Gaussian elimination: image pivots give the exact
/// part, their preimages the unphysical part, and kernel vectors outside
/// the image span the cohomology.
pub fn build_splitting(algebra: &AInfinity) -> Result<Splitting> {
    let basis = algebra.basis();
    let dim = basis.dim();
    let q_map = algebra.differential();
    let defect = algebra.stasheff_defect(1)?;
    if let Some((w, o, v)) = defect.first_entry() {
        return Err(Error::Structure(format!(
            "Q^2 is nonzero at {:?} -> {o} (value {v})",
            w
        )));
    }
    let q = as_matrix(&q_map, dim);
    let pivot_cols = q.pivot_columns();
    // H^t basis: Q applied to pivot columns; H^u basis: the pivot columns.
    let mut t_basis: Vec<Vec<Scalar>> = Vec::new();
    for &j in &pivot_cols {
        t_basis.push((0..dim).map(|r| q.get(r, j).clone()).collect());
    }
    let u_basis: Vec<Vec<Scalar>> = pivot_cols
        .iter()
        .map(|&j| {
            let mut v = alloc::vec![Scalar::zero(); dim];
            v[j] = Scalar::one();
            v
        })
        .collect();
    let kernel = q.kernel_basis();
    // Complement of im Q inside ker Q: RREF of [T | K], keep K-columns that
    // are pivots.
    let mut tk = Matrix::zero(dim, t_basis.len() + kernel.len());
    for (c, v) in t_basis.iter().chain(kernel.iter()).enumerate() {
        for r in 0..dim {
            tk.set(r, c, v[r].clone());
        }
    }
    let p_cols: Vec<usize> = tk
        .pivot_columns()
        .into_iter()
        .filter(|&c| c >= t_basis.len())
        .map(|c| c - t_basis.len())
        .collect();
    let p_basis: Vec<Vec<Scalar>> = p_cols.iter().map(|&c| kernel[c].clone()).collect();
    assemble_splitting(basis, &q, t_basis, u_basis, p_basis)
}

fn assemble_splitting(
    basis: &GradedBasis,
    q: &Matrix,
    t_basis: Vec<Vec<Scalar>>,
    u_basis: Vec<Vec<Scalar>>,
    p_basis: Vec<Vec<Scalar>>,
) -> Result<Splitting> {
    let dim = basis.dim();
    let nt = t_basis.len();
    let nu = u_basis.len();
    let np = p_basis.len();
    if nt + nu + np != dim {
        return Err(Error::Structure("decomposition does not span".into()));
    }
    let mut b = Matrix::zero(dim, dim);
    for (c, v) in t_basis.iter().chain(u_basis.iter()).chain(p_basis.iter()).enumerate() {
        for r in 0..dim {
            b.set(r, c, v[r].clone());
        }
    }
    let binv = b
        .inverse()
        .ok_or_else(|| Error::Structure("decomposition basis is singular".into()))?;
    // Q+ sends t_a to u_a, kills u and p; P projects onto the p block.
    let mut qp_diag = Matrix::zero(dim, dim);
    for a in 0..nt {
        qp_diag.set(nt + a, a, Scalar::one());
    }
    let mut p_diag = Matrix::zero(dim, dim);
    for c in 0..np {
        p_diag.set(nt + nu + c, nt + nu + c, Scalar::one());
    }
    let qp = b.mul(&qp_diag).mul(&binv);
    let p = b.mul(&p_diag).mul(&binv);
    let qplus = from_matrix(&qp, -1);
    let proj = from_matrix(&p, 0);
    qplus.check_homogeneous(basis)?;
    proj.check_homogeneous(basis)?;
    let _ = q;
    Splitting::from_parts(qplus, proj)
}

/// Refines [`build_splitting`] so the decomposition is orthogonal for the
/// pairing: `omega(H^p, H^u) = omega(H^u, H^u) = 0`. Corrections to the
/// unphysical and cohomology representatives are taken inside the exact
/// part, using that the pairing between exact and unphysical parts is
/// perfect.
pub fn omega_compatible_splitting(
    algebra: &AInfinity,
    omega: &SymplecticForm,
) -> Result<Splitting> {
    let basis = algebra.basis();
    let dim = basis.dim();
    // Precondition: omega(., Q.) graded symmetric, i.e. cyclicity at arity 1.
    let rep = crate::algebra::verify_cyclicity(omega, algebra, 2)?;
    if !rep.pass {
        return Err(Error::Structure(
            "kinetic term is not cyclic: omega(., Q.) is not graded symmetric".into(),
        ));
    }
    let plain = build_splitting(algebra)?;
    let q = as_matrix(&algebra.differential(), dim);
    let qp = as_matrix(plain.qplus(), dim);
    let p = as_matrix(plain.proj(), dim);
    // Extract the three blocks from the plain splitting.
    let tproj = q.mul(&qp);
    let uproj = qp.mul(&q);
    let t_cols = tproj.pivot_columns();
    let u_cols = uproj.pivot_columns();
    let p_cols = p.pivot_columns();
    let col = |m: &Matrix, c: usize| -> Vec<Scalar> { (0..dim).map(|r| m.get(r, c).clone()).collect() };
    let t_basis: Vec<Vec<Scalar>> = t_cols.iter().map(|&c| col(&tproj, c)).collect();
    let mut u_basis: Vec<Vec<Scalar>> = u_cols.iter().map(|&c| col(&uproj, c)).collect();
    let mut p_basis: Vec<Vec<Scalar>> = p_cols.iter().map(|&c| col(&p, c)).collect();
    let nt = t_basis.len();

    let pair = |a: &[Scalar], b: &[Scalar]| -> Scalar {
        let mut s = Scalar::zero();
        for i in 0..dim {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if b[j].is_zero() {
                    continue;
                }
                s += &(&(&a[i] * &b[j]) * &omega.entry(i, j));
            }
        }
        s
    };

    // Gram matrix of the perfect pairing omega(t_a, u_b).
    let mut gram = Matrix::zero(nt, nt);
    for a in 0..nt {
        for bix in 0..nt {
            gram.set(a, bix, pair(&t_basis[a], &u_basis[bix]));
        }
    }
    // Solve for a t-correction with prescribed pairings against all u_b.
    let correction = |targets: &[Scalar], gram: &Matrix| -> Result<Vec<Scalar>> {
        gram_solve(gram, targets)
    };
    fn gram_solve(gram: &Matrix, targets: &[Scalar]) -> Result<Vec<Scalar>> {
        // lambda^T gram = targets  <=>  gram^T lambda = targets
        let n = gram.rows;
        let mut gt = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                gt.set(r, c, gram.get(c, r).clone());
            }
        }
        gt.solve(targets)
            .ok_or_else(|| Error::Structure("pairing between exact and unphysical parts is degenerate".into()))
    }

    // Step 1: p_c -> p_c - sum lambda_a t_a so omega(p_c, u_b) = 0.
    for pc in p_basis.iter_mut() {
        let targets: Vec<Scalar> = u_basis.iter().map(|u| pair(pc, u)).collect();
        let lambda = correction(&targets, &gram)?;
        for (a, la) in lambda.iter().enumerate() {
            for i in 0..dim {
                let delta = la * &t_basis[a][i];
                let v = pc[i].clone() - delta;
                pc[i] = v;
            }
        }
    }
    // Step 2: u_a -> u_a - s_a with omega(s_a, u_b) = omega(u_a, u_b)/2.
    let half = Scalar::ratio(1, 2);
    let m_uu: Vec<Vec<Scalar>> = u_basis
        .iter()
        .map(|ua| u_basis.iter().map(|ub| &pair(ua, ub) * &half).collect())
        .collect();
    let mut s_list = Vec::with_capacity(nt);
    for targets in &m_uu {
        let lambda = correction(targets, &gram)?;
        let mut s = alloc::vec![Scalar::zero(); dim];
        for (a, la) in lambda.iter().enumerate() {
            for i in 0..dim {
                let v = s[i].clone() + &(la * &t_basis[a][i]);
                s[i] = v;
            }
        }
        s_list.push(s);
    }
    for (ua, s) in u_basis.iter_mut().zip(s_list) {
        for i in 0..dim {
            let v = ua[i].clone() - s[i].clone();
            ua[i] = v;
        }
    }
    // Q u_a is unchanged by a correction inside ker Q, so Q+ t_a = u_a still
    // inverts Q. Reassemble and verify.
    let split = assemble_splitting(basis, &q, t_basis, u_basis, p_basis)?;
    let report = split.verify(algebra, Some(omega));
    if !report.pass {
        return Err(Error::Structure(format!(
            "compatible splitting failed verification: {}",
            report.describe(basis)
        )));
    }
    Ok(split)
}

/// The field/antifield partition of a Darboux basis.
#[derive(Clone, Debug)]
pub struct DarbouxSplit {
    /// Indices of the field block; the antifield partner of `fields[a]` is
    /// `antifields[a]`.
    pub fields: Vec<usize>,
    pub antifields: Vec<usize>,
}

/// Builds the homotopy operator from the gauge-fixed kinetic term: the
/// propagator is a reflexive generalized inverse of the field-block kinetic
/// form, placed on the antifield-to-field block.
///
/// Requires `omega` to be in Darboux form for the partition and the kinetic
/// term to be proper: a degree-zero symmetric `t` with
/// `c = T^{-1} [[0,0],[c3,0]] T`, `T = [[1,t],[0,1]]`, must exist.
pub fn propagator_splitting(
    algebra: &AInfinity,
    omega: &SymplecticForm,
    split: &DarbouxSplit,
) -> Result<Splitting> {
    let basis = algebra.basis();
    let dim = basis.dim();
    let nf = split.fields.len();
    if split.antifields.len() != nf || nf * 2 != dim {
        return Err(Error::Input("field/antifield partition must halve the basis".into()));
    }
    // Darboux check: omega(e_a, e*_b) = -delta_ab, blocks vanish.
    for a in 0..nf {
        for b in 0..nf {
            let expect = if a == b { -Scalar::one() } else { Scalar::zero() };
            if omega.entry(split.fields[a], split.antifields[b]) != expect {
                return Err(Error::Input("omega is not in Darboux form for this partition".into()));
            }
            if !omega.entry(split.fields[a], split.fields[b]).is_zero()
                || !omega.entry(split.antifields[a], split.antifields[b]).is_zero()
            {
                return Err(Error::Input("omega is not in Darboux form for this partition".into()));
            }
        }
    }
    let q = as_matrix(&algebra.differential(), dim);
    let block = |rows: &[usize], cols: &[usize]| -> Matrix {
        let mut m = Matrix::zero(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                m.set(r, c, q.get(i, j).clone());
            }
        }
        m
    };
    let c1 = block(&split.fields, &split.fields);
    let c2 = block(&split.fields, &split.antifields);
    let c3 = block(&split.antifields, &split.fields);
    let c4 = block(&split.antifields, &split.antifields);
    properness_check(basis, split, &c1, &c2, &c3, &c4)?;

    // Reflexive generalized inverse of c3 via a rank factorization.
    let x = generalized_inverse(&c3);
    // Q+ : antifield block -> field block via x, zero on fields.
    let mut qplus = MultiMap::new(1, -1);
    for a in 0..nf {
        for b in 0..nf {
            if !x.get(a, b).is_zero() {
                qplus.add_term(
                    alloc::vec![split.antifields[b]],
                    split.fields[a],
                    x.get(a, b).clone(),
                );
            }
        }
    }
    qplus.check_homogeneous(basis).map_err(|_| {
        Error::Structure("propagator is not degree homogeneous; kinetic term is not proper".into())
    })?;
    // P := Id - QQ+ - Q+Q, then verify all invariants.
    let qpm = as_matrix(&qplus, dim);
    let mut p = Matrix::identity(dim);
    let qqp = q.mul(&qpm);
    let qpq = qpm.mul(&q);
    for r in 0..dim {
        for c in 0..dim {
            let mut v = p.get(r, c).clone();
            v -= qqp.get(r, c);
            v -= qpq.get(r, c);
            p.set(r, c, v);
        }
    }
    let splitting = Splitting::from_parts(qplus, from_matrix(&p, 0))?;
    let report = splitting.verify(algebra, None);
    if !report.pass {
        return Err(Error::Structure(format!(
            "not proper: propagator fails the decomposition identities: {}",
            report.describe(basis)
        )));
    }
    Ok(splitting)
}

/// Solves for a degree-zero symmetric `t` with `c4 = c3 t`, `c1 = -t c3`,
/// then checks `c2 = -t c3 t`. Fails with "not proper" if no solution.
fn properness_check(
    basis: &GradedBasis,
    split: &DarbouxSplit,
    c1: &Matrix,
    c2: &Matrix,
    c3: &Matrix,
    c4: &Matrix,
) -> Result<()> {
    let nf = split.fields.len();
    // Unknowns t_{ab} (a, b in 0..nf), linear equations:
    //   sum_k c3_{ik} t_{kb} = c4_{ib}        for all i, b
    //   sum_k t_{ak} c3_{kj} = -c1_{aj}       for all a, j
    //   t_{ab} - t_{ba} = 0
    //   t_{ab} = 0 unless deg(field a) = deg(antifield b)
    let unknowns = nf * nf;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    let idx = |a: usize, b: usize| a * nf + b;
    for i in 0..nf {
        for b in 0..nf {
            let mut row = alloc::vec![Scalar::zero(); unknowns];
            for k in 0..nf {
                row[idx(k, b)] = c3.get(i, k).clone();
            }
            rows.push(row);
            rhs.push(c4.get(i, b).clone());
        }
    }
    for a in 0..nf {
        for j in 0..nf {
            let mut row = alloc::vec![Scalar::zero(); unknowns];
            for k in 0..nf {
                row[idx(a, k)] = c3.get(k, j).clone();
            }
            rows.push(row);
            rhs.push(-c1.get(a, j));
        }
    }
    for a in 0..nf {
        for b in (a + 1)..nf {
            let mut row = alloc::vec![Scalar::zero(); unknowns];
            row[idx(a, b)] = Scalar::one();
            row[idx(b, a)] = -Scalar::one();
            rows.push(row);
            rhs.push(Scalar::zero());
        }
    }
    for a in 0..nf {
        for b in 0..nf {
            if basis.degree(split.fields[a]) != basis.degree(split.antifields[b]) {
                let mut row = alloc::vec![Scalar::zero(); unknowns];
                row[idx(a, b)] = Scalar::one();
                rows.push(row);
                rhs.push(Scalar::zero());
            }
        }
    }
    let mut system = Matrix::zero(rows.len(), unknowns);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            system.set(r, c, v.clone());
        }
    }
    let t = system
        .solve(&rhs)
        .ok_or_else(|| Error::Structure("not proper: no symmetric gauge-fixing solution".into()))?;
    // Check the quadratic condition c2 = -t c3 t.
    let mut tm = Matrix::zero(nf, nf);
    for a in 0..nf {
        for b in 0..nf {
            tm.set(a, b, t[idx(a, b)].clone());
        }
    }
    let mut lhs = tm.mul(c3).mul(&tm);
    for r in 0..nf {
        for c in 0..nf {
            let mut v = lhs.get(r, c).clone();
            v += c2.get(r, c);
            lhs.set(r, c, v);
        }
    }
    if !lhs.is_zero() {
        return Err(Error::Structure(
            "not proper: kinetic term does not reduce to its gauge-fixed block".into(),
        ));
    }
    Ok(())
}

/// A reflexive generalized inverse `x` of `m`: `m x m = m` and `x m x = x`,
/// via a rank factorization from the reduced row echelon form.
fn generalized_inverse(m: &Matrix) -> Matrix {
    let rows = m.rows;
    let cols = m.cols;
    let mut r = m.clone();
    let pivots = r.rref();
    let rank = pivots.len();
    if rank == 0 {
        return Matrix::zero(cols, rows);
    }
    // m = c * rr where c = pivot columns of m, rr = first `rank` rows of r.
    let mut c = Matrix::zero(rows, rank);
    for (j, &pc) in pivots.iter().enumerate() {
        for i in 0..rows {
            c.set(i, j, m.get(i, pc).clone());
        }
    }
    let mut rr = Matrix::zero(rank, cols);
    for i in 0..rank {
        for j in 0..cols {
            rr.set(i, j, r.get(i, j).clone());
        }
    }
    // Right inverse of rr: rr^T (rr rr^T)^{-1}; left inverse of c.
    let rt = transpose(&rr);
    let ct = transpose(&c);
    let rrt_inv = rr.mul(&rt).inverse().expect("full row rank");
    let ctc_inv = ct.mul(&c).inverse().expect("full column rank");
    rt.mul(&rrt_inv).mul(&ctc_inv).mul(&ct)
}

fn transpose(m: &Matrix) -> Matrix {
    let mut out = Matrix::zero(m.cols, m.rows);
    for r in 0..m.rows {
        for c in 0..m.cols {
            out.set(c, r, m.get(r, c).clone());
        }
    }
    out
}

/// Dimension of the cohomology per degree, by the independent rank/nullity
/// computation (kernel minus image, degree by degree). Test oracle.
pub fn cohomology_dims_oracle(algebra: &AInfinity) -> BTreeMap<i64, usize> {
    let basis = algebra.basis();
    let dim = basis.dim();
    let q = as_matrix(&algebra.differential(), dim);
    let mut out = BTreeMap::new();
    let degrees: alloc::collections::BTreeSet<i64> = basis.iter().map(|(_, _, d)| d).collect();
    for &d in &degrees {
        let cols: Vec<usize> = basis.indices_of_degree(d);
        let rows: Vec<usize> = basis.indices_of_degree(d + 1);
        let prev: Vec<usize> = basis.indices_of_degree(d - 1);
        let mut qd = Matrix::zero(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                qd.set(r, c, q.get(i, j).clone());
            }
        }
        let mut qprev = Matrix::zero(cols.len(), prev.len());
        for (r, &i) in cols.iter().enumerate() {
            for (c, &j) in prev.iter().enumerate() {
                qprev.set(r, c, q.get(i, j).clone());
            }
        }
        let ker = cols.len() - qd.rank();
        let im = qprev.rank();
        out.insert(d, ker - im);
    }
    out
}
