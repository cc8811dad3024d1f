use proptest::prelude::*;

use rwre_core::env::{presets, Environment, JumpKernel, LatticeVector, LawSpec};
use rwre_core::exactq::{forward_law, PropagationConfig};
use rwre_core::renewal::{exact_moment_l, RenewalLaw};
use rwre_core::walk::{sample_blocks, BlockConfig, Walker};

fn vec2() -> impl Strategy<Value = LatticeVector> {
    (-1000i64..1000, -1000i64..1000).prop_map(|(a, b)| LatticeVector::of(&[a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_group_laws(a in vec2(), b in vec2(), c in vec2()) {
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a - a, LatticeVector::zero(2));
        prop_assert_eq!(-(-a), a);
        prop_assert_eq!((a + b).dot(&c), a.dot(&c) + b.dot(&c));
        prop_assert!((a + b).norm1() <= a.norm1() + b.norm1());
    }

    #[test]
    fn sites_are_pure_functions_of_seed_and_position(seed in any::<u64>(), x in vec2(), z in vec2()) {
        let law = presets::abscont();
        let env = Environment::new(&law, seed);
        prop_assert_eq!(env.site_atom(&x), Environment::new(&law, seed).site_atom(&x));
        prop_assert_eq!(env.shifted(&z).site_atom(&x), env.site_atom(&(x + z)));
    }

    #[test]
    fn walks_never_move_against_u_hat(seed in any::<u64>(), walk in any::<u64>(), which in 0usize..4) {
        let law = [presets::abscont(), presets::one_two_jump(), presets::two_jump_homogeneous(), presets::restricted_2d()][which].clone();
        let u = law.u_hat();
        let mut w = Walker::new(Environment::new(&law, seed), LatticeVector::zero(law.dim()), walk);
        let mut last = 0;
        for _ in 0..200 {
            w.step();
            let h = w.position().dot(&u);
            prop_assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn propagation_conserves_mass(seed in any::<u64>(), n in 1usize..40, which in 0usize..3) {
        let law = [presets::abscont(), presets::one_two_jump(), presets::lazy_nn()][which].clone();
        let env = Environment::new(&law, seed);
        let cfg = PropagationConfig { prune: 1e-12, ..Default::default() };
        let fl = forward_law(&env, LatticeVector::zero(law.dim()), n, &cfg).unwrap();
        prop_assert!((fl.total_mass() + fl.tracked_leak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renewal_moments_are_log_convex(b in 2u64..6, j in 0u64..30) {
        let law = RenewalLaw::uniform(1, b).unwrap();
        let m: Vec<f64> = [1.0, 2.0, 3.0].iter().map(|&p| exact_moment_l(&law, 0, j, p).unwrap().value).collect();
        prop_assert!(m[1] * m[1] <= m[0] * m[2] * (1.0 + 1e-10));
    }

    #[test]
    fn law_json_round_trips(ps in prop::collection::vec(0.05f64..1.0, 1..4)) {
        let law = presets::lazy_nn_with(&ps, &vec![1.0 / ps.len() as f64; ps.len()]).unwrap();
        let text = serde_json::json!({
            "dim": 1,
            "u_hat": [1],
            "atoms": law.site_law().atoms().iter().map(|(w, jd)| serde_json::json!({
                "weight": w,
                "jumps": jd.atoms().iter().map(|(z, p)| serde_json::json!({"z": z.coords(), "p": p})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }).to_string();
        let spec = LawSpec::from_json(&text).unwrap();
        let (site, u) = spec.raw().unwrap();
        prop_assert_eq!(u, LatticeVector::from_1d(1));
        prop_assert_eq!(site.atoms(), law.site_law().atoms());
    }
}

#[test]
fn block_samples_do_not_depend_on_thread_count() {
    let law = presets::one_two_jump();
    let cfg = BlockConfig::default();
    let run = |t: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| sample_blocks(&law, 5000, 42, &cfg))
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.blocks, b.blocks);
}
