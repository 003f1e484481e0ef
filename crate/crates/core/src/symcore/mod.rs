//! Model symbols at a boundary point: homogeneity, μ-transmission and factorization index.
//!
//! A symbol is a function p(σ, ξ) of the tangential frequency magnitude σ > 0 and the
//! conormal frequency ξ. Expression-backed symbols carry exact derivatives through
//! Taylor jets; closure symbols fall back to finite differences.

mod checks;
mod expr;
pub mod jet;
mod symbol;

pub use checks::{
    check_homogeneity, check_mu_transmission, factorization_index, DerivativeSource, IndexReport,
    TransmissionOptions, TransmissionReport, TransmissionSample,
};
pub use expr::Expr;
pub use symbol::BoundarySymbol;

#[cfg(test)]
mod props {
    use super::*;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn test_symbol(kind: u8, x: f64) -> (BoundarySymbol, C64) {
        match kind % 3 {
            0 => (BoundarySymbol::abs2pow(x), C64::new(x, 0.0)),
            1 => (BoundarySymbol::chiplus(C64::new(x, 0.0)), C64::new(x, 0.0)),
            _ => (BoundarySymbol::chiminus(C64::new(x, 0.0)), C64::new(0.0, 0.0)),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn index_congruent_to_type(kind in 0u8..3, x in 0.05f64..1.9) {
            let (p, mu) = test_symbol(kind, x);
            let tr = check_mu_transmission(&p, mu, 3, Default::default()).unwrap();
            prop_assert!(tr.passed);
            let ix = factorization_index(&p, 1.0, 1e4).unwrap();
            let d = ix.mu0 - mu;
            prop_assert!((d.re - d.re.round()).abs() < 1e-6 && d.im.abs() < 1e-6);
        }

        #[test]
        fn index_scale_invariant(kind in 0u8..3, x in 0.05f64..1.9, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            prop_assume!(re.abs() + im.abs() > 0.1);
            let (p, _) = test_symbol(kind, x);
            let c = C64::new(re, im);
            let pc = p.clone();
            let scaled = BoundarySymbol::from_fn(p.order_m, "c*p", move |s, xi| c * pc.eval(s, xi));
            let a = factorization_index(&p, 1.0, 1e4).unwrap();
            let b = factorization_index(&scaled, 1.0, 1e4).unwrap();
            prop_assert!((a.mu0 - b.mu0).norm() < 1e-10);
        }

        #[test]
        fn product_closure(k1 in 0u8..3, x1 in 0.05f64..1.5, k2 in 0u8..3, x2 in 0.05f64..1.5) {
            let (p, mu) = test_symbol(k1, x1);
            let (q, nu) = test_symbol(k2, x2);
            prop_assert!(check_mu_transmission(&p, mu, 3, Default::default()).unwrap().passed);
            let pq = p.mul(&q);
            let r = check_mu_transmission(&pq, mu + nu, 3, Default::default()).unwrap();
            prop_assert!(r.passed, "residual {}", r.max_residual);
        }
    }
}
