//! Fixed-size complex linear algebra for one- and two-qubit gates.
//!
//! Dimensions are carried in the type (`N = 2` or `N = 4`), so a gate can only
//! ever be applied to a state of matching size.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// State vector of an `N`-level system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec<const N: usize>(pub [C64; N]);

/// Row-major `N x N` complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateMatrix<const N: usize>(pub [[C64; N]; N]);

pub type Qubit = StateVec<2>;
pub type TwoQubit = StateVec<4>;
pub type Gate2 = GateMatrix<2>;
pub type Gate4 = GateMatrix<4>;

impl<const N: usize> StateVec<N> {
    pub fn new(amplitudes: [C64; N]) -> Self {
        Self(amplitudes)
    }

    /// Computational basis state `|k>`.
    pub fn basis(k: usize) -> Self {
        let mut a = [ZERO; N];
        a[k] = ONE;
        Self(a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for z in self.0.iter_mut() {
            *z /= n;
        }
        self
    }

    pub fn scale(mut self, s: C64) -> Self {
        for z in self.0.iter_mut() {
            *z *= s;
        }
        self
    }
}

impl StateVec<2> {
    /// Tensor product `self ⊗ other`, with `self` as the first (control) qubit.
    pub fn kron(&self, other: &StateVec<2>) -> StateVec<4> {
        let [a0, a1] = self.0;
        let [b0, b1] = other.0;
        StateVec([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
    }
}

impl<const N: usize> Index<usize> for StateVec<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> GateMatrix<N> {
    pub fn identity() -> Self {
        let mut m = [[ZERO; N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self(m)
    }

    pub fn zeros() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn scale(mut self, s: C64) -> Self {
        for row in self.0.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        self
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Largest elementwise deviation of `M†M` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        mat_compose(&mat_adjoint(self), self).max_abs_diff(&Self::identity())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }
}

impl GateMatrix<2> {
    pub fn determinant(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

impl<const N: usize> Index<(usize, usize)> for GateMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for GateMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for GateMatrix<N> {
    type Output = GateMatrix<N>;
    fn mul(self, rhs: Self) -> Self {
        mat_compose(&self, &rhs)
    }
}

impl<const N: usize> Mul<StateVec<N>> for GateMatrix<N> {
    type Output = StateVec<N>;
    fn mul(self, rhs: StateVec<N>) -> StateVec<N> {
        mat_apply(&self, &rhs)
    }
}

/// `m · v`, without renormalizing.
pub fn mat_apply<const N: usize>(m: &GateMatrix<N>, v: &StateVec<N>) -> StateVec<N> {
    let mut out = [ZERO; N];
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m.0[i];
        let mut acc = ZERO;
        for j in 0..N {
            acc += row[j] * v.0[j];
        }
        *o = acc;
    }
    StateVec(out)
}

pub fn mat_compose<const N: usize>(a: &GateMatrix<N>, b: &GateMatrix<N>) -> GateMatrix<N> {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a.0[i][k];
            for j in 0..N {
                out[i][j] += aik * b.0[k][j];
            }
        }
    }
    GateMatrix(out)
}

pub fn mat_adjoint<const N: usize>(m: &GateMatrix<N>) -> GateMatrix<N> {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[j][i] = m.0[i][j].conj();
        }
    }
    GateMatrix(out)
}

/// Two-qubit gate with `a` acting on the target when the control is `|0>` and
/// `b` when it is `|1>`. Basis order is `|00>, |01>, |10>, |11>`, control first.
pub fn block_diag(a: &Gate2, b: &Gate2) -> Gate4 {
    let mut out = Gate4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = a.0[i][j];
            out.0[i + 2][j + 2] = b.0[i][j];
        }
    }
    out
}

/// Inner product `<a|b>`, conjugate-linear in `a`.
pub fn overlap<const N: usize>(a: &StateVec<N>, b: &StateVec<N>) -> C64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn sigma_x() -> Gate2 {
    GateMatrix([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> Gate2 {
    GateMatrix([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> Gate2 {
    GateMatrix([[ONE, ZERO], [ZERO, -ONE]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    prop_compose! {
        fn any_c64()(re in -2.0..2.0f64, im in -2.0..2.0f64) -> C64 { c(re, im) }
    }

    prop_compose! {
        fn any_qubit()(a in any_c64(), b in any_c64()) -> Qubit {
            let v = StateVec([a, b]);
            if v.norm_sqr() < 1e-6 { Qubit::basis(0) } else { v.normalize() }
        }
    }

    prop_compose! {
        fn any_gate2()(e in proptest::array::uniform4(any_c64())) -> Gate2 {
            GateMatrix([[e[0], e[1]], [e[2], e[3]]])
        }
    }

    /// Random SU(2)-ish unitary from Euler-type angles.
    fn unitary2(a: f64, b: f64, g: f64, phase: f64) -> Gate2 {
        let (s, co) = a.sin_cos();
        let e = |x: f64| C64::from_polar(1.0, x);
        GateMatrix([[e(b) * co, e(g) * s], [-e(-g) * s, e(-b) * co]]).scale(e(phase))
    }

    #[test]
    fn identity_and_pauli_action() {
        let v = Qubit::basis(0);
        assert_eq!(mat_apply(&Gate2::identity(), &v), v);
        assert_eq!(mat_apply(&sigma_x(), &v), Qubit::basis(1));
        assert_eq!(sigma_x() * sigma_x(), Gate2::identity());
        assert_eq!(Gate2::identity() * Gate2::identity(), Gate2::identity());
        assert_eq!(mat_adjoint(&Gate2::identity()), Gate2::identity());
        assert_eq!(mat_adjoint(&sigma_y()), sigma_y());
    }

    #[test]
    fn block_diag_routing() {
        assert_eq!(block_diag(&Gate2::identity(), &Gate2::identity()), Gate4::identity());
        let g = block_diag(&sigma_z(), &Gate2::identity());
        let ket10 = TwoQubit::basis(2);
        assert_eq!(mat_apply(&g, &ket10), ket10);
        // |00> picks up the sigma_z sign only on the |01> component.
        let ket01 = TwoQubit::basis(1);
        assert_eq!(mat_apply(&g, &ket01), ket01.scale(-ONE));
    }

    #[test]
    fn kron_ordering_is_control_first() {
        let k = Qubit::basis(0).kron(&Qubit::basis(1));
        assert_eq!(k, TwoQubit::basis(1));
        let k = Qubit::basis(1).kron(&Qubit::basis(0));
        assert_eq!(k, TwoQubit::basis(2));
    }

    proptest! {
        #[test]
        fn xy_product_is_i_z(v in any_qubit()) {
            let lhs = mat_apply(&(sigma_x() * sigma_y()), &v);
            // direct 2x2 evaluation of i*sigma_z*v
            let rhs = StateVec([I * v[0], -I * v[1]]);
            for k in 0..2 {
                prop_assert!((lhs[k] - rhs[k]).norm() < 1e-15);
            }
        }

        #[test]
        fn products_of_unitaries_stay_unitary(
            a in proptest::array::uniform4(-3.0..3.0f64),
            b in proptest::array::uniform4(-3.0..3.0f64),
        ) {
            let ua = unitary2(a[0], a[1], a[2], a[3]);
            let ub = unitary2(b[0], b[1], b[2], b[3]);
            prop_assert!((ua * ub).unitarity_error() <= 1e-12);
            let bd = block_diag(&ua, &ub);
            prop_assert!(bd.unitarity_error() <= 1e-12);
            for i in 0..2 {
                for j in 2..4 {
                    prop_assert_eq!(bd[(i, j)], ZERO);
                    prop_assert_eq!(bd[(j, i)], ZERO);
                }
            }
        }

        #[test]
        fn block_diag_of_non_unitary_is_not_unitary(m in any_gate2()) {
            let bd = block_diag(&Gate2::identity(), &m);
            let unitary_block = m.unitarity_error() <= 1e-9;
            prop_assert_eq!(bd.unitarity_error() <= 1e-9, unitary_block);
        }

        #[test]
        fn double_adjoint(m in any_gate2()) {
            prop_assert_eq!(mat_adjoint(&mat_adjoint(&m)), m);
        }

        #[test]
        fn overlap_conjugate_symmetry(a in any_qubit(), b in any_qubit()) {
            prop_assert!((overlap(&a, &b) - overlap(&b, &a).conj()).norm() <= 1e-15);
            prop_assert!((overlap(&a, &a) - ONE).norm() <= 1e-12);
        }

        #[test]
        fn completeness_in_two_dimensions(a in any_qubit(), b in any_qubit()) {
            // a_perp = [-conj(a1), conj(a0)]
            let perp = StateVec([-a[1].conj(), a[0].conj()]);
            prop_assert!(overlap(&a, &perp).norm() < 1e-15);
            let total = overlap(&a, &b).norm_sqr() + overlap(&perp, &b).norm_sqr();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
