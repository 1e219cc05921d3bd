use std::f64::consts::FRAC_PI_4;

use xlsched::harness::{
    campaign_csv, emit_csv, emit_plot_script, generate_scenario, parse_campaign_csv, run_campaign,
    summarize, CampaignConfig, CAMPAIGN_HEADER,
};
use xlsched::{ChannelModel, Method};

/// Largest gap between the empirical CDF of `xs` and the uniform CDF on
/// `[lo, hi]`.
fn ks_statistic(xs: &mut [f64], lo: f64, hi: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x - lo) / (hi - lo);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn scenario_marginals_are_uniform() {
    let mut cfg = CampaignConfig::default();
    cfg.num_users = 1000;
    let (lo, hi) = cfg.distance_range_for(1000);
    let mut r = Vec::new();
    let mut t = Vec::new();
    for trial in 0..100 {
        for u in generate_scenario(&cfg, 1000, trial).unwrap().users {
            r.push(u.distance());
            t.push(u.angle());
        }
    }
    let n = r.len() as f64;
    let critical = 1.628 / n.sqrt();
    let near = r.iter().filter(|&&x| x < 565.2).count() as f64 / n;
    assert!((near - 0.5).abs() <= 0.01, "near-field fraction {near}");
    assert!(r.iter().all(|&x| (40.0..=1090.4 + 1e-9).contains(&x)));
    let d_ks = ks_statistic(&mut r, lo, hi);
    let a_ks = ks_statistic(&mut t, -FRAC_PI_4, FRAC_PI_4);
    assert!(d_ks < critical, "distance KS {d_ks} vs {critical}");
    assert!(a_ks < critical, "angle KS {a_ks} vs {critical}");
}

#[test]
fn desk_campaign_rate_grows_with_snr() {
    let cfg = CampaignConfig::default();
    let res = run_campaign(&cfg).unwrap();
    assert!(res.failures.is_empty());
    assert_eq!(res.rows.len(), cfg.row_count());
    let summary = summarize(&res.rows);
    for &m in &cfg.antenna_counts {
        for method in Method::ALL {
            let curve: Vec<f64> = summary
                .iter()
                .filter(|s| s.m == m && s.method == method && s.model == ChannelModel::Spherical)
                .map(|s| s.mean_sum_rate)
                .collect();
            assert_eq!(curve.len(), cfg.snr_grid_db.len());
            assert!(
                curve.windows(2).all(|w| w[1] >= w[0]),
                "M={m} {method}: {curve:?}"
            );
        }
    }
}

#[test]
fn csv_round_trip_and_plot_script() {
    let mut cfg = CampaignConfig::default();
    cfg.num_users = 20;
    cfg.antenna_counts = vec![32];
    cfg.trials = 3;
    let res = run_campaign(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("campaign.csv");
    emit_csv(&res.rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CAMPAIGN_HEADER);
    assert_eq!(text.lines().count(), cfg.row_count() + 1);
    let parsed = parse_campaign_csv(&text).unwrap();
    assert_eq!(campaign_csv(&parsed), text);
    let script = dir.path().join("plot.py");
    emit_plot_script(&parsed, &path, "fig", &script).unwrap();
    assert!(std::fs::read_to_string(&script).unwrap().contains("matplotlib"));
}

#[test]
fn summary_means_recompute_from_rows() {
    let mut cfg = CampaignConfig::default();
    cfg.num_users = 30;
    cfg.antenna_counts = vec![32, 64];
    cfg.trials = 7;
    let res = run_campaign(&cfg).unwrap();
    let parsed = parse_campaign_csv(&campaign_csv(&res.rows)).unwrap();
    for s in summarize(&parsed) {
        let group: Vec<f64> = parsed
            .iter()
            .filter(|r| r.snr_db == s.snr_db && r.m == s.m && r.model == s.model && r.method == s.method)
            .map(|r| r.sum_rate)
            .collect();
        let mean = group.iter().sum::<f64>() / group.len() as f64;
        assert!((mean - s.mean_sum_rate).abs() <= 1e-12 * mean.abs().max(1.0));
    }
}
