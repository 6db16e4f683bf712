//! KKT maps of the face-restricted systems and their Jacobians.
//!
//! On `K_α` the multipliers of inactive constraints vanish, so the map lives
//! in the extended variables `(x, λ_α, μ)` ordered as
//! `x_1..x_n, λ_i (i ∈ α ascending), μ_1..μ_ℓ`:
//!
//! ```text
//! Φ_α(x, λ_α, μ) = ( F(x) + Σ_{i∈α} λ_i ∇g_i(x) + Σ_j μ_j ∇h_j(x),  g_α(x),  h(x) )
//! ```

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::model::{ProblemKind, ProblemSpec};
use crate::poly::{jacobian, PolyMatrix, Polynomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KktMap {
    pub alpha: Vec<usize>,
    pub n: usize,
    pub l: usize,
    pub total_vars: usize,
    pub components: Vec<Polynomial>,
    pub jac: PolyMatrix,
}

impl KktMap {
    pub fn num_multipliers(&self) -> usize {
        self.alpha.len() + self.l
    }

    /// Top-left `n × n` block, `DF + Σ λ_i ∇²g_i`.
    pub fn stationarity_block(&self) -> PolyMatrix {
        self.jac.block(0, self.n, 0, self.n)
    }

    /// Whether any Jacobian entry depends on a multiplier.
    pub fn jac_mentions_multipliers(&self) -> bool {
        (self.n..self.total_vars).any(|v| self.jac.mentions_var(v))
    }
}

fn check_alpha(alpha: &[usize], m: usize) -> Result<()> {
    for w in alpha.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput("alpha must be strictly ascending".into()));
        }
    }
    if let Some(&i) = alpha.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange { index: i, nvars: m });
    }
    Ok(())
}

fn assemble(spec: &ProblemSpec, alpha: &[usize], field: &[Polynomial]) -> Result<KktMap> {
    let k = &spec.constraints;
    check_alpha(alpha, k.m())?;
    let n = k.n();
    let l = k.l();
    let total = n + alpha.len() + l;
    let lam = |j: usize| Polynomial::var(total, n + j);
    let mu = |j: usize| Polynomial::var(total, n + alpha.len() + j);

    let mut comps = Vec::with_capacity(total);
    let grads: Vec<Vec<Polynomial>> = alpha.iter().map(|&i| k.g()[i].gradient_vec()).collect();
    let hgrads: Vec<Vec<Polynomial>> = k.h().iter().map(Polynomial::gradient_vec).collect();
    for r in 0..n {
        let mut c = field[r].extend(total);
        for (j, g) in grads.iter().enumerate() {
            c = c + &lam(j) * &g[r].extend(total);
        }
        for (j, g) in hgrads.iter().enumerate() {
            c = c + &mu(j) * &g[r].extend(total);
        }
        comps.push(c);
    }
    comps.extend(alpha.iter().map(|&i| k.g()[i].extend(total)));
    comps.extend(k.h().iter().map(|h| h.extend(total)));
    let jac = jacobian(&comps, total)?;
    let map = KktMap { alpha: alpha.to_vec(), n, l, total_vars: total, components: comps, jac };
    if map.jac != block_formula(spec, alpha, field)? {
        return Err(Error::Internal("KKT Jacobian disagrees with its block form".into()));
    }
    Ok(map)
}

/// The block form
///
/// ```text
/// [ DF + Σ λ_i ∇²g_i   ∇g_α   ∇h ]
/// [ ∇g_αᵀ               0      0  ]
/// [ ∇hᵀ                 0      0  ]
/// ```
///
/// assembled directly from the data (the `∇²h_j` vanish since `h` is affine).
pub fn block_formula(spec: &ProblemSpec, alpha: &[usize], field: &[Polynomial]) -> Result<PolyMatrix> {
    let k = &spec.constraints;
    let n = k.n();
    let a = alpha.len();
    let total = n + a + k.l();
    let mut out = PolyMatrix::zeros(total, total, total);
    let mut top = jacobian(field, n)?.extend(total);
    for (j, &i) in alpha.iter().enumerate() {
        let lam = Polynomial::var(total, n + j);
        top = top.add(&k.g()[i].hessian().extend(total).scale(&lam));
    }
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, top.get(r, c).clone());
        }
    }
    let cols: Vec<Vec<Polynomial>> = alpha
        .iter()
        .map(|&i| k.g()[i].gradient_vec())
        .chain(k.h().iter().map(Polynomial::gradient_vec))
        .collect();
    for (j, grad) in cols.iter().enumerate() {
        for r in 0..n {
            let e = grad[r].extend(total);
            out.set(r, n + j, e.clone());
            out.set(n + j, r, e);
        }
    }
    Ok(out)
}

/// `Φ_α` for a PVI or PCP (a fractional program is routed to [`build_psi`]).
pub fn build_phi(spec: &ProblemSpec, alpha: &[usize]) -> Result<KktMap> {
    if spec.kind == ProblemKind::FracOpt {
        return build_psi(spec, alpha);
    }
    assemble(spec, alpha, &spec.field)
}

/// `Ψ_α`: the KKT map with `F` replaced by `q∇p − p∇q`.
pub fn build_psi(spec: &ProblemSpec, alpha: &[usize]) -> Result<KktMap> {
    let Some(fr) = &spec.fraction else {
        return Err(Error::InvalidInput("Ψ_α needs a fractional objective".into()));
    };
    if fr.q.is_zero() {
        return Err(Error::InvalidInput("denominator q is identically zero".into()));
    }
    let map = assemble(spec, alpha, &fr.stationarity_map())?;
    if jacobian(&fr.stationarity_map(), spec.n())? != q_matrix(&fr.p, &fr.q) {
        return Err(Error::Internal("Jacobian of q∇p − p∇q disagrees with Q(x)".into()));
    }
    Ok(map)
}

/// `Q(x) = q∇²p − p∇²q + ∇p ∇qᵀ − ∇q ∇pᵀ`, entry by entry.
pub fn q_matrix(p: &Polynomial, q: &Polynomial) -> PolyMatrix {
    let n = p.nvars();
    let hp = p.hessian();
    let hq = q.hessian();
    let gp = p.gradient_vec();
    let gq = q.gradient_vec();
    let mut out = PolyMatrix::zeros(n, n, n);
    for i in 0..n {
        for j in 0..n {
            let e = &(&(q * hp.get(i, j)) - &(p * hq.get(i, j))) + &(&(&gp[i] * &gq[j]) - &(&gq[i] * &gp[j]));
            out.set(i, j, e);
        }
    }
    out
}

/// `C_α ∈ ℝ^{n×|α|}` with `c_ij = 1` when `i` is the `j`-th index of `α`.
pub fn selection_matrix(n: usize, alpha: &[usize]) -> Result<QMatrix> {
    let mut c = QMatrix::zeros(n, alpha.len());
    for (j, &i) in alpha.iter().enumerate() {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, nvars: n });
        }
        c.set(i, j, Rational::from_integer(1.into()));
    }
    Ok(c)
}

/// Sup-norm residual of the `α`-restricted KKT system at `(x, λ_α, μ)`.
///
/// Adds the hinge terms `max(0, −λ_i)` and `max(0, g_i(x))` for `i ∉ α`.
pub fn kkt_residual(spec: &ProblemSpec, alpha: &[usize], point: &[f64]) -> Result<f64> {
    let map = build_phi(spec, alpha)?;
    residual_of(&map, spec, point)
}

/// Same as [`kkt_residual`] for an already assembled map.
pub fn residual_of(map: &KktMap, spec: &ProblemSpec, point: &[f64]) -> Result<f64> {
    if point.len() != map.total_vars {
        return Err(Error::DimensionMismatch { expected: map.total_vars, got: point.len() });
    }
    let mut r = map.components.iter().map(|c| c.eval_f64(point).abs()).fold(0.0, f64::max);
    let n = map.n;
    for j in 0..map.alpha.len() {
        r = r.max(-point[n + j]);
    }
    let x = &point[..n];
    for (i, g) in spec.constraints.g().iter().enumerate() {
        if !map.alpha.contains(&i) {
            r = r.max(g.eval_f64(x));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstraintSet;
    use crate::poly::int;

    pub(crate) fn example_half_plane() -> ProblemSpec {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let f = &(&(&(&x1 * &x1) * &x1) + &x1) - &x2;
        let k = ConstraintSet::new(2, vec![&x1 + &x2], vec![]).unwrap();
        ProblemSpec::pvi(k, vec![f.clone(), f]).unwrap()
    }

    pub(crate) fn example_pcp() -> ProblemSpec {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let one = Polynomial::one(2);
        let f1 = &x1 - &one;
        let f2 = &(&(-&(&(&x1 * &x1) * &x1)) - &x2) + &one;
        ProblemSpec::pcp(vec![f1, f2]).unwrap()
    }

    fn c(v: i64, nv: usize) -> Polynomial {
        Polynomial::constant(nv, int(v))
    }

    #[test]
    fn phi_on_the_line_face() {
        let map = build_phi(&example_half_plane(), &[0]).unwrap();
        assert_eq!(map.total_vars, 3);
        let x1 = Polynomial::var(3, 0);
        let d = &(&x1 * &x1).scale(&int(3)) + &c(1, 3);
        let want = PolyMatrix::new(
            3,
            3,
            3,
            vec![d.clone(), c(-1, 3), c(1, 3), d, c(-1, 3), c(1, 3), c(1, 3), c(1, 3), c(0, 3)],
        )
        .unwrap();
        assert_eq!(map.jac, want);
    }

    #[test]
    fn phi_empty_alpha_is_the_field() {
        let x1 = Polynomial::var(2, 0);
        let f = vec![&x1 * &x1, Polynomial::var(2, 1)];
        let spec = ProblemSpec::pvi(ConstraintSet::whole_space(2), f.clone()).unwrap();
        let map = build_phi(&spec, &[]).unwrap();
        assert_eq!(map.components, f);
        assert_eq!(map.jac, jacobian(&f, 2).unwrap());
    }

    #[test]
    fn phi_for_pcp_has_negated_selection_column() {
        let map = build_phi(&example_pcp(), &[0]).unwrap();
        assert_eq!(map.jac.rows(), 3);
        let x1 = Polynomial::var(3, 0);
        assert_eq!(map.jac.get(0, 0), &c(1, 3));
        assert_eq!(map.jac.get(0, 1), &c(0, 3));
        assert_eq!(map.jac.get(1, 0), &(&x1 * &x1).scale(&int(-3)));
        assert_eq!(map.jac.get(1, 1), &c(-1, 3));
        let sel = selection_matrix(2, &[0]).unwrap();
        assert_eq!(sel, QMatrix::from_rows(vec![vec![int(1)], vec![int(0)]]));
        // the constraint is -x1, so the multiplier column is -C_α
        assert_eq!(map.jac.get(0, 2), &c(-1, 3));
        assert_eq!(map.jac.get(1, 2), &c(0, 3));
        assert!(!map.jac_mentions_multipliers());
    }

    #[test]
    fn q_matrix_of_the_rational_bump() {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let q = &(&(&(&x1 * &x1) - &(&x1 * &x2).scale(&int(2))) + &(&x2 * &x2)) + &Polynomial::one(2);
        let p = c(-1, 2);
        let spec = ProblemSpec::fracopt(ConstraintSet::whole_space(2), p.clone(), q.clone()).unwrap();
        let map = build_psi(&spec, &[]).unwrap();
        let want = PolyMatrix::new(2, 2, 2, vec![c(2, 2), c(-2, 2), c(-2, 2), c(2, 2)]).unwrap();
        assert_eq!(q_matrix(&p, &q), want);
        assert_eq!(map.jac, want);
    }

    #[test]
    fn q_matrix_vanishes_when_p_equals_q() {
        let x1 = Polynomial::var(2, 0);
        let q = &(&x1 * &x1) + &Polynomial::one(2);
        assert!(q_matrix(&q, &q).is_zero());
        let spec = ProblemSpec::fracopt(ConstraintSet::whole_space(2), q.clone(), q).unwrap();
        assert!(spec.vi_map().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn q_matrix_of_linear_fraction_is_constant() {
        // f = (a·x + b) / (c·x + d)
        let a = [int(1), int(2), int(-1)];
        let cc = [int(3), int(0), int(5)];
        let p = Polynomial::affine(&a, int(4));
        let q = Polynomial::affine(&cc, int(7));
        let qm = q_matrix(&p, &q);
        assert!(qm.is_constant());
        for i in 0..3 {
            for j in 0..3 {
                let e = &a[i] * &cc[j] - &cc[i] * &a[j];
                assert_eq!(qm.get(i, j), &Polynomial::constant(3, e));
            }
        }
    }

    #[test]
    fn psi_requires_fraction() {
        assert!(build_psi(&example_pcp(), &[]).is_err());
    }

    #[test]
    fn selection_examples() {
        let s = selection_matrix(3, &[0, 2]).unwrap();
        assert_eq!(
            s,
            QMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(0)], vec![int(0), int(1)]])
        );
        assert_eq!(s.rank(), 2);
        let e = selection_matrix(2, &[]).unwrap();
        assert_eq!((e.rows(), e.cols(), e.rank()), (2, 0, 0));
    }

    #[test]
    fn residual_examples() {
        let pcp = example_pcp();
        // at (1,0), F = (0,0): the multiplier of the active -x2 must be 0
        assert_eq!(kkt_residual(&pcp, &[1], &[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(kkt_residual(&pcp, &[1], &[1.0, 0.0, 1.0]).unwrap(), 1.0);
        let hp = example_half_plane();
        assert_eq!(kkt_residual(&hp, &[0], &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(kkt_residual(&hp, &[0], &[0.0, 0.0]).is_err());
        // negative multiplier is penalised
        assert_eq!(kkt_residual(&pcp, &[1], &[1.0, 0.0, -2.0]).unwrap(), 2.0);
    }

    #[test]
    fn residual_zero_field_on_feasible_point() {
        let spec = ProblemSpec::pvi(crate::model::unit_box(2), vec![c(0, 2), c(0, 2)]).unwrap();
        assert_eq!(kkt_residual(&spec, &[], &[0.3, 0.6]).unwrap(), 0.0);
    }

    #[test]
    fn alpha_must_be_valid() {
        assert!(build_phi(&example_pcp(), &[2]).is_err());
        assert!(build_phi(&example_pcp(), &[1, 0]).is_err());
    }

    #[test]
    fn multipliers_hit_hessian_block() {
        // g = x1^2 + x2^2 - 1: top-left block gains 2λ on the diagonal
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let g = &(&(&x1 * &x1) + &(&x2 * &x2)) - &Polynomial::one(2);
        let k = ConstraintSet::new(2, vec![g], vec![]).unwrap();
        let spec = ProblemSpec::pvi(k, vec![x1.clone(), x2.clone()]).unwrap();
        let map = build_phi(&spec, &[0]).unwrap();
        let lam = Polynomial::var(3, 2);
        assert_eq!(map.jac.get(0, 0), &(&c(1, 3) + &lam.scale(&int(2))));
        assert!(map.jac_mentions_multipliers());
    }
}
