use wpcc_core::analytic::{outage_htt_cf, throughput_cf};
use wpcc_core::montecarlo::{branch_fraction, estimate_outage, estimate_throughput};
use wpcc_core::{outage_cf, Backend, Error, ProtocolKind, RelayMode, Severities, Simulator, SystemParams, Topology};

fn fig3(m: u32, dbm: f64) -> SystemParams {
    let topo = Topology::new(10.0, 5.0, 2.0).unwrap();
    SystemParams::from_dbm(dbm, -80.0, 0.5, 0.5, 2.0, topo, Severities::uniform(m)).unwrap()
}

#[test]
fn degenerate_rates() {
    let p = fig3(2, 30.0).with_rate(1e6).unwrap();
    for kind in ProtocolKind::ALL {
        let e = estimate_outage(kind, &p, 2_000, 1, RelayMode::Exact).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.throughput(&p), 0.0);
    }
    let p = fig3(2, 30.0).with_rate(1e-9).unwrap();
    for kind in ProtocolKind::ALL {
        let e = estimate_outage(kind, &p, 2_000, 1, RelayMode::Exact).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.throughput(&p), p.rate() * (1.0 - p.tau()));
    }
    assert!(matches!(
        estimate_outage(ProtocolKind::Htt, &p, 999, 1, RelayMode::Exact),
        Err(Error::Domain(_))
    ));
}

#[test]
fn htt_point_within_four_sigma() {
    let p = fig3(1, 40.0);
    let e = estimate_outage(ProtocolKind::Htt, &p, 1_000_000, 1, RelayMode::Exact).unwrap();
    assert!((e.p_hat - outage_htt_cf(&p).unwrap()).abs() <= 4.0 * e.stderr);
}

#[test]
fn min_snr_points_within_four_sigma() {
    let p = fig3(3, 40.0);
    for kind in [ProtocolKind::Htc, ProtocolKind::At] {
        let e = estimate_outage(kind, &p, 1_000_000, 2, RelayMode::Approx).unwrap();
        assert!((e.p_hat - outage_cf(kind, &p).unwrap()).abs() <= 4.0 * e.stderr, "{kind}");
    }
}

#[test]
fn exact_relay_tight_at_high_power() {
    let p = fig3(3, 40.0);
    for kind in [ProtocolKind::Htc, ProtocolKind::At] {
        let mc = estimate_throughput(kind, &p, 1_000_000, 3, RelayMode::Exact).unwrap();
        let cf = throughput_cf(kind, &p).unwrap();
        assert!((mc - cf).abs() / cf <= 0.02, "{kind}: mc={mc} cf={cf}");
    }
    let p = fig3(3, 45.0);
    let mc = estimate_outage(ProtocolKind::At, &p, 1_000_000, 4, RelayMode::Exact).unwrap();
    let cf = throughput_cf(ProtocolKind::At, &p).unwrap();
    let tol = 4.0 * mc.stderr * p.rate() * (1.0 - p.tau()) + 1e-3 * cf;
    assert!((mc.throughput(&p) - cf).abs() <= tol);
}

#[test]
fn exact_mode_never_beats_min_snr() {
    for (m, dbm) in [(1, 25.0), (3, 30.0), (2, 40.0)] {
        let p = fig3(m, dbm);
        let sim = Simulator::new(Backend::Serial);
        let ex = sim.estimate_outages(&ProtocolKind::ALL, &p, 50_000, 9, RelayMode::Exact).unwrap();
        let ap = sim.estimate_outages(&ProtocolKind::ALL, &p, 50_000, 9, RelayMode::Approx).unwrap();
        for (e, a) in ex.iter().zip(&ap) {
            assert!(e.outages >= a.outages, "{}", e.kind);
        }
        assert_eq!(ex[0].outages, ap[0].outages);
    }
}

#[test]
fn coverage_calibration_over_fifty_seeds() {
    let p = fig3(1, 35.0);
    let cf = outage_htt_cf(&p).unwrap();
    let hits = (1..=50u64)
        .filter(|&seed| {
            let e = estimate_outage(ProtocolKind::Htt, &p, 20_000, 1000 + seed, RelayMode::Exact).unwrap();
            (e.p_hat - cf).abs() <= 1.96 * e.stderr
        })
        .count();
    assert!(hits >= 46, "{hits}/50 intervals cover the closed form");
}

#[test]
fn deterministic_and_backend_independent() {
    let p = fig3(2, 33.0);
    let a = Simulator::new(Backend::Serial)
        .estimate_outages(&ProtocolKind::ALL, &p, 30_001, 17, RelayMode::Exact)
        .unwrap();
    let b = Simulator::default()
        .estimate_outages(&ProtocolKind::ALL, &p, 30_001, 17, RelayMode::Exact)
        .unwrap();
    assert_eq!(a, b);
    let c = Simulator::default()
        .estimate_outages(&ProtocolKind::ALL, &p, 30_001, 18, RelayMode::Exact)
        .unwrap();
    assert_ne!(a, c);
}

#[test]
fn branch_fraction_identity_and_limit() {
    let p = fig3(1, 20.0);
    let b = branch_fraction(&p, 100_000, 1).unwrap();
    let htt = estimate_outage(ProtocolKind::Htt, &p, 100_000, 1, RelayMode::Exact).unwrap();
    assert_eq!(b.direct, htt.n - htt.outages);
    assert!((b.fraction - (1.0 - htt.p_hat)).abs() < 1e-15);
    // Diagnostic at the low end of the power sweep: the direct link rarely suffices.
    assert!(b.fraction > 0.0 && b.fraction < 0.2, "{}", b.fraction);
    let loud = branch_fraction(&fig3(1, 90.0), 10_000, 1).unwrap();
    assert!(loud.fraction > 0.999);
}

#[test]
fn inclusion_has_no_violations() {
    let sim = Simulator::default();
    for mode in [RelayMode::Exact, RelayMode::Approx] {
        let rep = sim.inclusion_violations(&fig3(1, 27.0), 200_000, 5, mode).unwrap();
        assert!(rep.at_outages > 0);
        assert_eq!(rep.violations(), 0);
    }
}
