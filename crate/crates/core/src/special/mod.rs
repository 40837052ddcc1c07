//! Special-function kernel: Bernoulli numbers, the Hurwitz zeta function
//! for complex first argument, digamma, divisor sums and Ramanujan's τ.

mod arith;
mod bernoulli;
mod dd;
mod hurwitz;

pub use arith::{ramanujan_tau, sigma_div};
pub use bernoulli::{bernoulli, bernoulli_table};
pub use hurwitz::{
    a_kappa1, digamma, hurwitz_zeta, kappa_constants, riemann_zeta, EulerMaclaurinConfig, Kappa,
    EULER_GAMMA,
};

pub(crate) use bernoulli::even_bernoulli_over_factorial;
pub(crate) use hurwitz::{digamma_unchecked, ReflectedDifference, hurwitz_complex_unchecked, hurwitz_real_unchecked, real_pow};
