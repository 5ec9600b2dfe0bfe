use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wpcc_core::channel::{omega_from_distance, LinkSpec, StreamFactory};
use wpcc_core::oracle::integrate;

fn draws(link: &LinkSpec, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| link.sample(&mut rng)).collect()
}

#[test]
fn kolmogorov_smirnov_below_one_percent_critical_value() {
    let n = 100_000;
    let critical = 1.628 / (n as f64).sqrt();
    for (m, omega) in [(1, 1.0), (2, 0.5), (3, 2.0), (7, 1e-5)] {
        let link = LinkSpec::new(m, omega).unwrap();
        let mut x = draws(&link, n, 11 + m as u64);
        x.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, &v) in x.iter().enumerate() {
            let f = link.cdf(v).unwrap();
            d = d.max((i + 1) as f64 / n as f64 - f).max(f - i as f64 / n as f64);
        }
        assert!(d < critical, "m={m}: D={d} critical={critical}");
    }
}

#[test]
fn sample_moments_match_gamma_law() {
    let n = 400_000;
    for (m, omega) in [(1, 1.0), (3, 4e-5), (5, 0.2)] {
        let link = LinkSpec::new(m, omega).unwrap();
        let x = draws(&link, n, 99);
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let want_var = omega * omega / m as f64;
        // Standard error of the mean is sqrt(var/n); allow five of them.
        assert!((mean - omega).abs() < 5.0 * (want_var / n as f64).sqrt(), "m={m} mean={mean}");
        assert!((var / want_var - 1.0).abs() < 0.02, "m={m} var={var}");
    }
}

#[test]
fn pdf_integrates_to_cdf() {
    for (m, omega) in [(1, 1.0), (2, 0.5), (3, 2.0), (6, 3.0)] {
        let link = LinkSpec::new(m, omega).unwrap();
        for x in [0.05, 0.4, 1.0, 2.5, 8.0] {
            let area = integrate(|t| link.pdf(t).unwrap(), 0.0, x, 1e-13);
            assert!((area - link.cdf(x).unwrap()).abs() < 1e-11, "m={m} x={x}");
            assert!((link.cdf(x).unwrap() + link.survival(x).unwrap() - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn fig_defaults_path_loss() {
    assert!((omega_from_distance(10.0, 2.0).unwrap() - 1e-5).abs() < 1e-20);
    let near = omega_from_distance(2.0, 3.0).unwrap();
    let far = omega_from_distance(8.0, 3.0).unwrap();
    assert!((near / far - 64.0).abs() < 1e-12);
}

#[test]
fn stream_draws_independent_of_visit_order() {
    let f = StreamFactory::new(5);
    let link = LinkSpec::new(2, 1.0).unwrap();
    let forward: Vec<f64> = (0..50).map(|i| link.sample(&mut f.stream(i))).collect();
    let backward: Vec<f64> = (0..50).rev().map(|i| link.sample(&mut f.stream(i))).collect();
    let mut backward = backward;
    backward.reverse();
    assert_eq!(forward, backward);
}
