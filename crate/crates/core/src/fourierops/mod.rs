//! Fourier multipliers on a truncated line, the order-reducing operators Ξ^μ± and the
//! restriction/extension pair r⁺, e⁺.
//!
//! Transform convention: F f(ξ) = ∫ e^{−ixξ} f(x) dx, approximated by h Σ_k.

pub mod fft;
mod grid;
mod multiplier;
mod xi;

pub use grid::{Grid, GridFunction, SupportSide};
pub use multiplier::{
    apply_multiplier, apply_multiplier_with, multiplier_kernel, periodized_symbol, sampled_symbol, Asymptotics,
    Discretization, MultiplierSpec, Side,
};
pub use xi::{
    apply_layered, layer_remainder, minus_truncated_apply, sobolev_norm, truncate_restrict, xi_minus_apply,
    xi_plus_apply, LayerExpansion, MinusTruncated, EXTENSION_TOL, LAYER_TERMS,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use num_complex::Complex64 as C64;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel_err_on(a: &GridFunction, b: &GridFunction, keep: impl Fn(f64) -> bool) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..a.grid.n {
            if keep(a.x(k)) {
                num += (a.values[k] - b.values[k]).norm_sqr();
                den += b.values[k].norm_sqr();
            }
        }
        (num / den).sqrt()
    }

    fn gauss(grid: Grid) -> GridFunction {
        GridFunction::from_fn(grid, SupportSide::Whole, |x| C64::new((-x * x).exp(), 0.3 * x * (-x * x / 2.0).exp()))
    }

    fn bump(x: f64) -> f64 {
        let t = (x - 3.0) / 2.0;
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn identity_multiplier() {
        let g = Grid::new(256, 10.0).unwrap();
        let f = gauss(g);
        let out = apply_multiplier(&MultiplierSpec::identity(), &f).unwrap();
        assert!(out.sub(&f).l2_norm() < 1e-14);
        let out = xi_plus_apply(c(0.0), 1.0, &f).unwrap();
        assert!(out.sub(&f).l2_norm() < 1e-14);
    }

    #[test]
    fn nonfinite_multiplier_is_reported() {
        let g = Grid::new(64, 4.0).unwrap();
        let spec = MultiplierSpec::new(c(-1.0), Side::Neutral, "1/xi", |xi| c(1.0 / xi));
        let e = apply_multiplier(&spec, &gauss(g)).unwrap_err();
        assert!(e.to_string().contains("xi_j = 0"), "{e}");
    }

    #[test]
    fn power_kernel_transform_pair() {
        let g = Grid::new(1 << 14, 40.0).unwrap();
        for &mu in &[-0.5, 0.0, 0.5, 1.5] {
            for &sigma in &[0.5, 1.0, 2.0] {
                let k = multiplier_kernel(&MultiplierSpec::chi_plus(c(-mu - 1.0), sigma), g).unwrap();
                let exact = GridFunction::from_fn(g, SupportSide::Whole, |x| {
                    if x > 0.0 {
                        c(x.powf(mu) * (-sigma * x).exp() / gamma(mu + 1.0))
                    } else {
                        c(0.0)
                    }
                });
                let e = rel_err_on(&k, &exact, |x| x.abs() > 0.05);
                assert!(e < 1e-5, "mu {mu} sigma {sigma}: {e}");
            }
        }
    }

    #[test]
    fn periodized_node_zero_follows_zeta_rule() {
        // kernel of (σ+iξ)^{-1} is e^{-σx}H(x); the node at 0 carries the mean ½
        let g = Grid::new(1024, 20.0).unwrap();
        let k = multiplier_kernel(&MultiplierSpec::chi_plus(c(-1.0), 1.0), g).unwrap();
        assert!((k.values[g.k0()] - c(0.5)).norm() < 1e-9, "{}", k.values[g.k0()]);
    }

    #[test]
    fn symbol_cancellation() {
        let g = Grid::new(512, 12.0).unwrap();
        let f = gauss(g);
        let a = xi_plus_apply(C64::new(0.7, 0.4), 1.3, &f).unwrap();
        let b = xi_plus_apply(C64::new(-0.7, -0.4), 1.3, &a).unwrap();
        assert!(b.sub(&f).l2_norm() < 1e-9 * f.l2_norm());
    }

    #[test]
    fn first_order_plus_is_sigma_plus_derivative() {
        // (1 + ∂ₓ)(x e^{−x}) = e^{−x} on x > 0
        let g = Grid::new(4096, 30.0).unwrap();
        let f = GridFunction::half_line(g, |x| c(x * (-x).exp()));
        let layers = LayerExpansion::fit(&f, c(0.0), LAYER_TERMS).unwrap();
        let out = apply_layered(&MultiplierSpec::chi_plus(c(1.0), 1.0), &f, &[layers]).unwrap();
        let exact = GridFunction::half_line(g, |x| c((-x).exp()));
        let e = rel_err_on(&out, &exact, |x| x > 0.0);
        assert!(e < 1e-8, "{e}");
        assert!(out.l2_norm_on(-30.0, -1e-12) < 1e-8);
    }

    #[test]
    fn plus_multiplier_preserves_support() {
        // box wide enough that the periodic wrap of the e^{−σx} tail stays below tolerance
        let g = Grid::new(16384, 64.0).unwrap();
        let f = GridFunction::from_fn(g, SupportSide::Nonneg, |x| c(bump(x)));
        for mu in [0.5, -0.5, 1.0] {
            let out = xi_plus_apply(c(mu), 1.0, &f).unwrap();
            assert_eq!(out.support_side, SupportSide::Nonneg);
            let left = out.l2_norm_on(-32.0, 0.9) / out.l2_norm();
            assert!(left < 1e-8, "mu {mu}: {left}");
        }
        let fm = GridFunction::from_fn(g, SupportSide::Nonpos, |x| c(bump(-x)));
        let out = xi_minus_apply(c(0.5), 1.0, &fm).unwrap();
        assert_eq!(out.support_side, SupportSide::Nonpos);
        assert!(out.l2_norm_on(-0.9, 32.0) / out.l2_norm() < 1e-8);
    }

    #[test]
    fn truncation_examples() {
        let g = Grid::new(1024, 10.0).unwrap();
        let f = GridFunction::from_fn(g, SupportSide::Whole, |x| c((-x * x).exp()));
        let t = truncate_restrict(&f);
        let half = f.l2_norm().powi(2) / 2.0;
        assert!((t.l2_norm().powi(2) - half).abs() < g.h());
        assert_eq!(truncate_restrict(&t).values, t.values);
        let h = GridFunction::half_line(g, |x| c((-x).exp()));
        assert_eq!(truncate_restrict(&h).values, h.values);
    }

    #[test]
    fn minus_truncated_examples() {
        let g = Grid::new(8192, 60.0).unwrap();
        let f = GridFunction::half_line(g, |x| c((-x).exp()));
        let id = minus_truncated_apply(c(0.0), 1.0, &f).unwrap();
        assert!(rel_err_on(&id.result, &f, |x| x > 0.0) < 1e-10);
        for sigma in [0.5, 1.0, 2.0] {
            let r = minus_truncated_apply(c(-1.0), sigma, &f).unwrap();
            let exact = GridFunction::half_line(g, |x| c((-x).exp() / (sigma + 1.0)));
            let e = rel_err_on(&r.result, &exact, |x| x > 0.0);
            assert!(e < 1e-8, "sigma {sigma}: {e}");
            assert!(r.discrepancy.unwrap() < EXTENSION_TOL);
        }
        let r = minus_truncated_apply(c(0.5), 1.0, &f).unwrap();
        assert!(r.discrepancy.unwrap() < EXTENSION_TOL, "{:?}", r.discrepancy);
    }

    #[test]
    fn composition_and_adjoint() {
        let g = Grid::new(512, 12.0).unwrap();
        let f = gauss(g);
        let fg = GridFunction::from_fn(g, SupportSide::Whole, |x| C64::new(0.0, (-(x - 0.5).powi(2)).exp()));
        let (m1, m2) = (C64::new(0.4, 0.2), C64::new(-1.1, 0.5));
        let a = xi_plus_apply(m2, 0.8, &xi_plus_apply(m1, 0.8, &f).unwrap()).unwrap();
        let b = xi_plus_apply(m1 + m2, 0.8, &f).unwrap();
        assert!(a.sub(&b).l2_norm() < 1e-9 * b.l2_norm());
        let lhs = xi_plus_apply(m1, 0.8, &f).unwrap().inner(&fg);
        let rhs = f.inner(&xi_minus_apply(m1.conj(), 0.8, &fg).unwrap());
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn io_round_trips() {
        let g = Grid::new(64, 3.0).unwrap();
        let f = gauss(g);
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        let r = GridFunction::read_binary(&buf[..]).unwrap();
        assert_eq!(r.values, f.values);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let r = GridFunction::read_csv(&csv[..], SupportSide::Whole).unwrap();
        assert_eq!(r.grid, g);
        assert!(r.sub(&f).l2_norm() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn composition(a in -1.5f64..1.5, b in -1.5f64..1.5, ai in -1.0f64..1.0, sigma in 0.3f64..3.0) {
                let g = Grid::new(512, 12.0).unwrap();
                let f = GridFunction::from_fn(g, SupportSide::Whole, |x| c((-x * x).exp()));
                let (m1, m2) = (C64::new(a, ai), C64::new(b, -ai));
                let lhs = xi_plus_apply(m2, sigma, &xi_plus_apply(m1, sigma, &f).unwrap()).unwrap();
                let rhs = xi_plus_apply(m1 + m2, sigma, &f).unwrap();
                prop_assert!(lhs.sub(&rhs).l2_norm() < 1e-9 * rhs.l2_norm().max(1e-3));
            }

            #[test]
            fn adjoint(a in -1.5f64..1.5, ai in -1.0f64..1.0, sigma in 0.3f64..3.0, shift in -2.0f64..2.0) {
                let g = Grid::new(512, 12.0).unwrap();
                let f = GridFunction::from_fn(g, SupportSide::Whole, |x| c((-x * x).exp()));
                let h = GridFunction::from_fn(g, SupportSide::Whole, |x| C64::new((-(x - shift).powi(2)).exp(), x * (-x * x).exp()));
                let m = C64::new(a, ai);
                let lhs = xi_plus_apply(m, sigma, &f).unwrap().inner(&h);
                let rhs = f.inner(&xi_minus_apply(m.conj(), sigma, &h).unwrap());
                prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1e-2));
            }

            #[test]
            fn support_preservation(mu in -1.5f64..1.5, sigma in 0.3f64..3.0) {
                let g = Grid::new(16384, 64.0).unwrap();
                let f = GridFunction::from_fn(g, SupportSide::Nonneg, |x| c(bump(x)));
                let out = xi_plus_apply(c(mu), sigma, &f).unwrap();
                prop_assert!(out.l2_norm_on(-32.0, 0.9) / out.l2_norm() < 1e-8);
            }

            #[test]
            fn sobolev_homeomorphism(mu in -1.5f64..1.5, sigma in 0.3f64..3.0, s in -1.0f64..2.0, w in 0.5f64..3.0) {
                // ‖Ξ^μ₊f‖_{s−μ} / ‖f‖_s lies between 1 and σ^μ
                let g = Grid::new(1024, 20.0).unwrap();
                let f = GridFunction::from_fn(g, SupportSide::Whole, |x| c((-x * x * w).exp()));
                let r = sobolev_norm(&xi_plus_apply(c(mu), sigma, &f).unwrap(), s - mu) / sobolev_norm(&f, s);
                let lo = sigma.powf(mu).min(1.0);
                let hi = sigma.powf(mu).max(1.0);
                prop_assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12), "{} not in [{}, {}]", r, lo, hi);
            }
        }
    }
}
