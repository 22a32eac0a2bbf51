use flaf_core::{cost_of, documented_offset, filter_factory, measured_cost, Algorithm, CostParams, FilterParams};

fn params(m: usize, q_t: usize) -> FilterParams {
    FilterParams {
        m_taps: m,
        q_t,
        ..FilterParams::memoryless_2()
    }
}

#[test]
fn measured_cost_matches_closed_form_plus_documented_offset() {
    for m in [1usize, 2, 7, 32, 128] {
        for q_t in [3usize, 7, 9] {
            for alg in Algorithm::ALL {
                let spec = filter_factory(&params(m, q_t), alg).unwrap();
                let measured = measured_cost(&spec, 16).unwrap();
                let exact = measured.exact().expect("uniform per-iteration cost");
                let model = cost_of(alg, &CostParams::new(m as u64).with_q_t(q_t as u64).with_q_h(4)).unwrap();
                let offset = documented_offset(alg, m as u64);
                let ctx = format!("{alg} M={m} Q_t={q_t}");
                assert_eq!(exact.trig_evals, model.trig_evals, "{ctx}");
                assert_eq!(
                    exact.multipliers as i64 - model.multipliers as i64,
                    offset.multipliers,
                    "{ctx}"
                );
                assert_eq!(exact.adders as i64 - model.adders as i64, offset.adders, "{ctx}");
            }
        }
    }
}

#[test]
fn single_expansion_trig_count_independent_of_length() {
    for alg in [Algorithm::SinglePhiTflaf, Algorithm::HboTflaf] {
        for m in [1usize, 16, 256] {
            let spec = filter_factory(&params(m, 7), alg).unwrap();
            assert_eq!(measured_cost(&spec, 8).unwrap().trig_evals, 6.0, "{alg} M={m}");
        }
    }
    let spec = filter_factory(&params(256, 7), Algorithm::Tflaf).unwrap();
    assert_eq!(measured_cost(&spec, 8).unwrap().trig_evals, 256.0 * 6.0);
}
