use flaf_core::rng::{stream_rng, StreamPurpose};
use flaf_core::{
    AdaptiveFilter, ExpansionOrder, HboTflaf, HboTflafParams, Lms, LmsParams, Tflaf, TflafMode, TflafParams,
};
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn signal(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = stream_rng(seed, 0, StreamPurpose::Input);
    let normal = Normal::new(0.0, 0.5).unwrap();
    (0..n)
        .map(|_| {
            let x: f64 = normal.sample(&mut rng);
            (x, (2.0 * x).tanh() + 0.1 * rng.random::<f64>())
        })
        .collect()
}

fn tflaf(m: usize, p: usize, mode: TflafMode) -> Tflaf {
    Tflaf::<f64>::new(TflafParams {
        m_taps: m,
        mu: 0.01 / m as f64,
        order: ExpansionOrder::new(p).unwrap(),
        mode,
    })
    .unwrap()
}

#[test]
fn single_phi_matches_per_tap_expansion_bit_for_bit() {
    for seed in 0..10 {
        let data = signal(seed, 10_000);
        for m in [8, 64] {
            for p in [1, 3] {
                let mut original = tflaf(m, p, TflafMode::Original);
                let mut single = tflaf(m, p, TflafMode::SinglePhi);
                for (n, &(x, d)) in data.iter().enumerate() {
                    let a = original.step(x, d).unwrap();
                    let b = single.step(x, d).unwrap();
                    assert!(
                        a.y.to_bits() == b.y.to_bits() && a.e.to_bits() == b.e.to_bits(),
                        "seed {seed} M={m} P={p} diverged at n={n}: {a:?} vs {b:?}"
                    );
                }
                assert_eq!(original.weights(), single.weights());
            }
        }
    }
}

#[test]
fn hbo_with_frozen_nonlinearity_is_lms_with_bias() {
    for seed in 0..10 {
        let data = signal(100 + seed, 10_000);
        for m in [1, 8, 64] {
            let mut hbo = HboTflaf::<f64>::new(HboTflafParams {
                m_taps: m,
                mu_w: 0.02 / m as f64,
                mu_a: 0.0,
                order: ExpansionOrder::new(3).unwrap(),
            })
            .unwrap();
            let mut lms = Lms::<f64>::new(LmsParams {
                m_taps: m,
                mu: 0.02 / m as f64,
                bias: true,
            })
            .unwrap();
            for (n, &(x, d)) in data.iter().enumerate() {
                let a = hbo.step(x, d).unwrap();
                let b = lms.step(x, d).unwrap();
                assert!(
                    a.y.to_bits() == b.y.to_bits() && a.e.to_bits() == b.e.to_bits(),
                    "seed {seed} M={m} diverged at n={n}: {a:?} vs {b:?}"
                );
            }
            let mut expected = vec![lms.bias().unwrap()];
            expected.extend(lms.weights());
            assert_eq!(hbo.linear_weights(), expected);
        }
    }
}
