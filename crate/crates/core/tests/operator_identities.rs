//! Property tests for the Laplacian's structural identities.
//!
//! Every graph family the crate can build is sampled with random windows and
//! random complex fields, and the assembled operator is checked against the
//! quadratic form, the symmetry of the matrix, and the zero-row-sum law.

use lapnet::graph::{materialize, GraphSystem, IndexSpace, WeightRule, Window};
use lapnet::operator::{
    apply_laplacian, assemble_matrix, energy, energy_bilinear, row_sum_check, BoundaryMode,
    VertexField,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// A random `(graph, window)` pair drawn from every supported family.
fn family() -> impl Strategy<Value = (GraphSystem, Window)> {
    prop_oneof![
        (3i64..=40).prop_map(|n| (GraphSystem::cyclic(n).unwrap(), Window::All)),
        (1i64..=25, 1i64..=25).prop_map(|(a, b)| {
            (
                GraphSystem::chain(WeightRule::Constant, IndexSpace::FullLine).unwrap(),
                Window::Range { lo: -a, hi: b },
            )
        }),
        (8i64..=40).prop_map(|n| {
            (
                GraphSystem::chain(WeightRule::Linear, IndexSpace::HalfLine).unwrap(),
                Window::Range { lo: 0, hi: n },
            )
        }),
        (8i64..=40).prop_map(|n| {
            (
                GraphSystem::chain(WeightRule::Square, IndexSpace::HalfLine).unwrap(),
                Window::Range { lo: 0, hi: n },
            )
        }),
        (prop_oneof![Just(0.5f64), Just(2.0f64)], 8i64..=24).prop_map(|(l, n)| {
            (
                GraphSystem::chain(WeightRule::Geometric(l), IndexSpace::HalfLine).unwrap(),
                Window::Range { lo: 0, hi: n },
            )
        }),
        (2usize..=3, 3i64..=5).prop_map(|(d, e)| (GraphSystem::lattice(d, e).unwrap(), Window::All)),
    ]
}

/// Mostly-dense complex amplitudes with occasional exact zeros so that the
/// sampled fields also exercise partial support.
fn amplitude() -> impl Strategy<Value = Complex64> {
    prop_oneof![
        4 => (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im)),
        1 => Just(Complex64::default()),
    ]
}

fn family_and_fields(
    k: usize,
) -> impl Strategy<Value = (GraphSystem, Window, Vec<Vec<Complex64>>)> {
    family().prop_flat_map(move |(g, w)| {
        let n = materialize(&g, &w).unwrap().len();
        let fields = proptest::collection::vec(proptest::collection::vec(amplitude(), n), k);
        (Just(g), Just(w), fields)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `<Lu, w> == <u, Lw>` for both boundary conventions; the assembled
    /// matrix agrees with the direct edge-walk application; row sums vanish
    /// away from the boundary; and the quadratic form satisfies
    /// `2 <u, L_ind u> == sum over ordered pairs of c |du|^2 >= 0`.
    #[test]
    fn laplacian_identities_hold_on_random_fields((g, win, raw) in family_and_fields(2)) {
        let w = materialize(&g, &win).unwrap();
        let u = VertexField::from_complex(raw[0].clone());
        let v = VertexField::from_complex(raw[1].clone());
        let scale = (u.norm() * v.norm()).max(1.0);

        for mode in [BoundaryMode::Induced, BoundaryMode::Compressed] {
            let m = assemble_matrix(&w, mode).unwrap();
            prop_assert!(m.hermitian_defect() <= 1e-12 * m.gershgorin_bounds().unwrap().1.abs().max(1.0));

            let mu = m.apply_field(&u);
            let mv = m.apply_field(&v);
            // Symmetry of the bilinear form.
            let gap = (mu.inner(&v) - u.inner(&mv)).norm();
            prop_assert!(gap <= 1e-10 * scale, "symmetry defect {gap} at scale {scale}");
            // Matrix application matches the edge-walk application.
            let direct = apply_laplacian(&w, &u, mode).unwrap().field;
            for i in 0..w.len() {
                prop_assert!((mu.get(i) - direct.get(i)).norm() <= 1e-12 * scale.max(m.gershgorin_bounds().unwrap().1));
            }
        }

        // Interior row sums vanish in both conventions; in the induced
        // convention every row sums to zero.
        prop_assert!(row_sum_check(&w, BoundaryMode::Induced).unwrap() <= 1e-12);
        prop_assert!(row_sum_check(&w, BoundaryMode::Compressed).unwrap() <= 1e-12);

        // Quadratic form identity, ordered-pair count.
        let m_ind = assemble_matrix(&w, BoundaryMode::Induced).unwrap();
        let quad = u.inner(&m_ind.apply_field(&u));
        let en = energy(&w, &u).unwrap();
        prop_assert!(en.value >= 0.0);
        prop_assert!(quad.im.abs() <= 1e-10 * (1.0 + en.value));
        let gap = (2.0 * quad.re - en.value).abs();
        prop_assert!(gap <= 1e-10 * (1.0 + en.value), "energy gap {gap} vs {}", en.value);

        // Polarization consistency: the bilinear form at (u, u) is the energy.
        let bi = energy_bilinear(&w, &u, &u).unwrap();
        prop_assert!((bi.re - en.value).abs() <= 1e-10 * (1.0 + en.value));
        prop_assert!(bi.im.abs() <= 1e-10 * (1.0 + en.value));
    }

    /// Constant fields lie in the kernel of the induced operator and carry
    /// zero energy on every family.
    #[test]
    fn constants_are_harmonic((g, win) in family(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let w = materialize(&g, &win).unwrap();
        let z = Complex64::new(re, im);
        let u = VertexField::from_complex(vec![z; w.len()]);
        let m = assemble_matrix(&w, BoundaryMode::Induced).unwrap();
        let mu = m.apply_field(&u);
        prop_assert!(mu.norm() <= 1e-12 * (1.0 + u.norm()) * m.gershgorin_bounds().unwrap().1.max(1.0));
        prop_assert!(energy(&w, &u).unwrap().value <= 1e-12);
    }
}
