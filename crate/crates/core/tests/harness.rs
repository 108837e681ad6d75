use mvba_core::harness::{
    fit, fit_points, run_campaign, simulate, CampaignConfig, CampaignReport, Claim, HarnessError, Protocol, Scenario,
};
use mvba_core::netsim::{AdversaryKind, SchedulerKind};

fn scenario(protocol: Protocol, n: usize) -> Scenario {
    Scenario::new(protocol, n, protocol.max_faults(n), 64)
}

#[test]
fn repeated_runs_are_identical() {
    for protocol in Protocol::ALL {
        let s = Scenario {
            adversary: AdversaryKind::Adaptive,
            seed: 5,
            ..scenario(protocol, 11)
        };
        let a = simulate(&s, 5, true).unwrap();
        let b = simulate(&s, 5, true).unwrap();
        assert_eq!(a.metrics, b.metrics, "{protocol}");
        assert_eq!(a.trace, b.trace, "{protocol}");
        assert!(!a.trace.is_empty());
    }
}

#[test]
fn seeds_change_the_trace() {
    let s = scenario(Protocol::Hash, 7);
    let a = simulate(&s, 1, false).unwrap();
    let b = simulate(&s, 2, false).unwrap();
    assert_ne!(a.metrics.trace_digest, b.metrics.trace_digest);
}

#[test]
fn report_json_is_byte_identical() {
    let s = Scenario {
        runs: 3,
        adversary: AdversaryKind::Equivocate,
        ..scenario(Protocol::Rmvba, 10)
    };
    let a = run_campaign(std::slice::from_ref(&s)).unwrap().to_json();
    let b = run_campaign(&[s]).unwrap().to_json();
    assert_eq!(a, b);
    let parsed: CampaignReport = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed.runs.len(), 3);
}

#[test]
fn fit_recovers_a_planted_coefficient() {
    let points: Vec<(f64, f64)> = [8.0f64, 16.0, 32.0].iter().map(|n| (n * n, 5.0 * n * n)).collect();
    let (c, r) = fit_points(&points);
    assert!((c - 5.0).abs() < 1e-12);
    assert!(r < 1e-12);
    let (c, r) = fit_points(&[(1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]);
    // y = x² against x: c = 36/14, residual computed by hand
    assert!((c - 36.0 / 14.0).abs() < 1e-12);
    let expect = ((1.0 - c).powi(2) + (4.0 - 2.0 * c).powi(2) + (9.0 - 3.0 * c).powi(2)).sqrt() / 98f64.sqrt();
    assert!((r - expect).abs() < 1e-12);
}

#[test]
fn fit_needs_three_sizes() {
    let report = run_campaign(&[scenario(Protocol::Hash, 4), scenario(Protocol::Hash, 7)]).unwrap();
    assert!(matches!(
        fit(&report, Claim::HashBits),
        Err(HarnessError::TooFewSizes(2))
    ));
    assert!(matches!(fit(&report, Claim::RrBits), Err(HarnessError::NoData { .. })));
}

#[test]
fn fit_over_a_campaign() {
    let scenarios: Vec<Scenario> = [4, 7, 10].into_iter().map(|n| scenario(Protocol::Hash, n)).collect();
    let report = run_campaign(&scenarios).unwrap();
    let f = fit(&report, Claim::HashBits).unwrap();
    assert_eq!(f.points.len(), 3);
    assert!(f.coefficient > 0.0);
    assert!(report.fits.iter().any(|g| g.claim == Claim::HashBits));
}

#[test]
fn resilience_is_enforced() {
    let err = run_campaign(&[Scenario::new(Protocol::Rr, 5, 1, 64)]).unwrap_err();
    assert!(matches!(err, HarnessError::Resilience { factor: 5, .. }));
    assert!(Scenario::new(Protocol::Rr, 6, 1, 64).validate().is_ok());
    assert!(Scenario::new(Protocol::Hash, 6, 2, 64).validate().is_err());
    assert!(Scenario::new(Protocol::Hash, 7, 2, 64).validate().is_ok());
    assert!(Scenario::new(Protocol::Hash, 7, 2, 2).validate().is_err());
    let bad_kappa = Scenario {
        kappa: Some(12),
        ..scenario(Protocol::Hash, 4)
    };
    assert!(matches!(bad_kappa.validate(), Err(HarnessError::Kappa(12))));
}

#[test]
fn flat_reports_carry_election_rounds() {
    let report = run_campaign(&[scenario(Protocol::Hash, 7), scenario(Protocol::Rmvba, 7)]).unwrap();
    let hash = report.aggregates.iter().find(|a| a.protocol == Protocol::Hash).unwrap();
    assert!(hash.mean_election_rounds.unwrap() >= 1.0);
    let rmvba = report
        .aggregates
        .iter()
        .find(|a| a.protocol == Protocol::Rmvba)
        .unwrap();
    assert!(rmvba.mean_election_rounds.is_none());
}

#[test]
fn config_with_grid_and_scenarios() {
    let text = r#"{
        "scenarios": [
            {"protocol": "rr", "n": 6, "t": 1, "msg_size": 32, "adversary": "crash", "scheduler": "fifo"}
        ],
        "grid": {
            "protocols": ["rmvba", "rr"],
            "sizes": [[4, 1], [7, 2]],
            "msg_size_bytes": 32,
            "adversaries": ["none", "worst-case-delay"],
            "runs": 2
        }
    }"#;
    let config: CampaignConfig = serde_json::from_str(text).unwrap();
    let scenarios = config.scenarios();
    // rr skips both grid sizes since 4 and 7 are below 5t+1
    assert_eq!(scenarios.len(), 1 + 2 * 2);
    assert_eq!(scenarios[0].scheduler, SchedulerKind::Fifo);
    assert_eq!(scenarios[1].scheduler, SchedulerKind::Random);
    assert!(scenarios[1..]
        .iter()
        .all(|s| s.protocol == Protocol::Rmvba && s.runs == 2));

    let typo = r#"{"scenarios": [{"protocol": "rr", "n": 6, "t": 1, "msg_size": 32, "sead": 1}]}"#;
    assert!(serde_json::from_str::<CampaignConfig>(typo).is_err());
}

#[test]
fn csv_has_one_row_per_run() {
    let s = Scenario {
        runs: 4,
        ..scenario(Protocol::Rr, 6)
    };
    let csv = run_campaign(&[s]).unwrap().to_csv().unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("protocol,"));
    assert!(header.contains("total_bits"));
    assert_eq!(lines.count(), 4);
}
