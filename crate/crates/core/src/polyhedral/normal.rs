//! Primitive normal vectors `u_{sigma/tau}` of a cell relative to a facet.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cell::Cell;
use crate::arith::lattice::{bezout_vector, integer_kernel, reduce_mod_hnf};
use crate::arith::linalg::express;
use crate::arith::rat::{axpy, dot, from_bigints, sub, to_bigints, zero_vec, QVec, Rat};

/// The lattice vector of `Lambda_sigma` whose class generates `Lambda_sigma / Lambda_tau`
/// and points from `tau` into `sigma`.
///
/// It is only defined modulo `Lambda_tau`; the representative returned is the one reduced
/// against the Hermite normal form basis of `Lambda_tau`, so equal inputs always produce
/// identical vectors.
pub fn normal_vector(sigma: &Cell, tau: &Cell) -> QVec {
    debug_assert_eq!(sigma.dim(), tau.dim() + 1);
    let n = sigma.ambient_dim();
    let big = sigma.lattice();
    let small = tau.lattice();
    let k = big.len();
    let coords: Vec<Vec<BigInt>> = small
        .iter()
        .map(|v| {
            let c = express(big, v).expect("facet lattice lies in the cell lattice");
            to_bigints(&c).expect("facet lattice is a sublattice")
        })
        .collect();
    let kernel = integer_kernel(&coords, k);
    debug_assert_eq!(kernel.len(), 1);
    let mut h = kernel.into_iter().next().expect("codimension one");
    let (g, mut z) = bezout_vector(&h);
    debug_assert!(g.is_one());
    let w = sub(&sigma.relint_point(), &tau.relint_point());
    let wc = express(big, &w).expect("difference of points lies in the direction space");
    let side = dot(&from_bigints(&h), &wc);
    debug_assert!(!side.is_zero());
    if side.is_negative() {
        for x in h.iter_mut().chain(z.iter_mut()) {
            *x = -x.clone();
        }
    }
    let mut u = zero_vec(n);
    for (c, b) in z.iter().zip(big) {
        axpy(&mut u, &Rat::from_integer(c.clone()), b);
    }
    reduce_mod_hnf(&u, small)
}

/// Integer coordinate of `v` along the normal direction, i.e. the value on `v` of the
/// functional on `Lambda_sigma` that vanishes on `Lambda_tau` and is one on `u_{sigma/tau}`.
pub fn normal_coordinate(sigma: &Cell, tau: &Cell, v: &[Rat]) -> Option<Rat> {
    let u = normal_vector(sigma, tau);
    let mut basis: Vec<QVec> = vec![u];
    basis.extend(tau.lattice().iter().cloned());
    express(&basis, v).map(|c| c[0].clone())
}
