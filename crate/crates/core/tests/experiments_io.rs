use platform_sim::abm::{self, SimConfig};
use platform_sim::experiments::{
    default_horizon, emit_plot, history_panels, padded_range, policy_grid, read_grid_csv,
    read_history_csv, read_sweep_csv, render_svg, run_baseline, sensitivity_sweep, summarize_run,
    to_csv, welfare_means, write_csv, GridSpec, Plot, Series, SweepParameter, SweepSpec,
};
use platform_sim::metrics::{MetricsRow, METRICS_COLUMNS};

fn small(seed: u64) -> SimConfig {
    SimConfig {
        n_human_creators: 6,
        n_ai_creators: 4,
        n_consumers: 20,
        steps: 40,
        introduce_ai_step: 15,
        seed,
        ..SimConfig::default()
    }
}

fn plot(points: Vec<(f64, f64)>) -> Plot {
    Plot {
        title: "t".to_string(),
        x_label: "x".to_string(),
        y_label: "y".to_string(),
        series: vec![Series {
            name: "s".to_string(),
            points,
        }],
        marker: None,
    }
}

#[test]
fn history_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("history.csv");
    let history = abm::run(&small(1)).unwrap().history;
    write_csv(&history, &path).unwrap();
    assert_eq!(read_history_csv(&path).unwrap(), history);

    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), METRICS_COLUMNS.join(","));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), history.len() + 1);
}

#[test]
fn empty_history_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv::<MetricsRow>(&[], &path).unwrap();
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        format!("{}\n", METRICS_COLUMNS.join(","))
    );
    assert!(read_history_csv(&path).unwrap().is_empty());
}

#[test]
fn floats_use_shortest_round_trip_form() {
    let rows = abm::run(&small(2)).unwrap().history;
    let text = to_csv(&rows);
    let fields: Vec<&str> = text.lines().nth(5).unwrap().split(',').collect();
    let value = rows[4].avg_quality;
    let column = METRICS_COLUMNS
        .iter()
        .position(|c| *c == "avg_quality")
        .unwrap();
    assert_eq!(fields[column], value.to_string());
}

#[test]
fn write_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    let err = write_csv::<MetricsRow>(&[], &path).unwrap_err();
    assert!(err.to_string().contains("missing"));
}

#[test]
fn two_points_make_one_polyline() {
    let svg = render_svg(&plot(vec![(0.0, 1.0), (1.0, 3.0)])).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    let start = svg.find("points=\"").unwrap() + 8;
    let end = start + svg[start..].find('"').unwrap();
    assert_eq!(svg[start..end].split(' ').count(), 2);
}

#[test]
fn plots_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let history = abm::run(&small(3)).unwrap().history;
    let panels = history_panels(&history, 15);
    assert_eq!(panels.len(), 7);
    for (stem, p) in &panels {
        let a = dir.path().join(format!("{stem}-a.svg"));
        let b = dir.path().join(format!("{stem}-b.svg"));
        emit_plot(p, &a).unwrap();
        emit_plot(p, &b).unwrap();
        let svg = std::fs::read(&a).unwrap();
        assert_eq!(svg, std::fs::read(&b).unwrap());
        let text = String::from_utf8(svg).unwrap();
        assert!(text.contains("class=\"marker\""));
        assert!(text.contains("class=\"axis\""));
    }
}

#[test]
fn axis_range_is_padded_five_percent() {
    let (lo, hi) = padded_range([2.0, 12.0, 7.0].into_iter()).unwrap();
    assert!((lo - 1.5).abs() < 1e-12 && (hi - 12.5).abs() < 1e-12);
    assert!(render_svg(&plot(vec![])).is_err());
}

#[test]
fn fee_sweep_counts_runs_and_rows() {
    let spec = SweepSpec {
        parameter: SweepParameter::PlatformFee,
        values: vec![0.0, 0.2, 0.4],
        seeds: (1..=5).collect(),
        base_config: small(0),
    };
    let result = sensitivity_sweep(&spec, 1).unwrap();
    assert_eq!(result.cells.len(), 15);
    assert_eq!(result.rows.len(), 3);
    for (i, cell) in result.cells.iter().enumerate() {
        assert_eq!(cell.value, spec.values[i / 5]);
        assert_eq!(cell.seed, spec.seeds[i % 5]);
    }
    for (v, row) in result.rows.iter().enumerate() {
        assert_eq!(row.parameter, "platform_fee");
        assert_eq!(row.n_seeds, 5);
        let cells = &result.cells[v * 5..v * 5 + 5];
        let mean = |f: fn(&platform_sim::experiments::SweepCell) -> f64| {
            cells.iter().map(f).sum::<f64>() / 5.0
        };
        assert!((row.mean_w - mean(|c| c.summary.longterm.w)).abs() < 1e-9);
        assert!((row.mean_cs - mean(|c| c.summary.longterm.cs)).abs() < 1e-9);
        assert!((row.mean_ps - mean(|c| c.summary.longterm.ps)).abs() < 1e-9);
    }
}

#[test]
fn single_cell_sweep_matches_a_direct_run() {
    let base = small(9);
    let spec = SweepSpec {
        parameter: SweepParameter::Subsidy,
        values: vec![0.3],
        seeds: vec![9],
        base_config: base.clone(),
    };
    let row = &sensitivity_sweep(&spec, 1).unwrap().rows[0];
    let config = SimConfig {
        subsidy: 0.3,
        ..base
    };
    let history = run_baseline(&config).unwrap().history;
    let expected = welfare_means(&history, default_horizon(config.steps), config.steps).unwrap();
    assert_eq!(
        (row.mean_w, row.mean_cs, row.mean_ps),
        (expected.w, expected.cs, expected.ps)
    );
}

#[test]
fn window_means_are_per_tick_flows() {
    let history = abm::run(&small(4)).unwrap().history;
    let m = welfare_means(&history, 20, 40).unwrap();
    let cs: f64 = (20..40)
        .map(|k| {
            let prev = history[k - 1].consumer_surplus;
            history[k].consumer_surplus - prev
        })
        .sum::<f64>()
        / 20.0;
    assert!((m.cs - cs).abs() < 1e-9);
    assert!((m.w - m.cs - m.ps).abs() < 1e-12);
}

#[test]
fn sweep_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        parameter: SweepParameter::OverloadThreshold,
        values: vec![50.0, 500.0],
        seeds: vec![1, 2],
        base_config: small(0),
    };
    let rows = sensitivity_sweep(&spec, 1).unwrap().rows;
    let path = dir.path().join("sweep.csv");
    write_csv(&rows, &path).unwrap();
    assert_eq!(read_sweep_csv(&path).unwrap(), rows);
}

fn grid(seeds: Vec<u64>) -> GridSpec {
    GridSpec {
        fees: vec![0.1, 0.2],
        biases: vec![0.5, 1.0],
        subsidies: vec![0.0, 0.5],
        seeds,
        base_config: small(0),
        horizon_split: None,
    }
}

#[test]
fn grid_counts_runs_and_ranks_rows() {
    let result = policy_grid(&grid(vec![1, 2, 3]), 1).unwrap();
    assert_eq!(result.cells.len(), 24);
    assert_eq!(result.rows.len(), 8);
    for (i, row) in result.rows.iter().enumerate() {
        assert_eq!(row.rank, i + 1);
    }
    for pair in result.rows.windows(2) {
        assert!(pair[0].longterm_w >= pair[1].longterm_w);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    write_csv(&result.rows, &path).unwrap();
    assert_eq!(read_grid_csv(&path).unwrap(), result.rows);
}

#[test]
fn single_policy_grid_matches_a_direct_run() {
    let spec = GridSpec {
        fees: vec![0.25],
        biases: vec![0.75],
        subsidies: vec![0.1],
        seeds: vec![5],
        base_config: small(0),
        horizon_split: Some(10),
    };
    let rows = policy_grid(&spec, 1).unwrap().rows;
    assert_eq!(rows.len(), 1);
    let config = SimConfig {
        platform_fee: 0.25,
        recommend_bias: 0.75,
        subsidy: 0.1,
        seed: 5,
        ..small(0)
    };
    let s = summarize_run(&config, 10).unwrap();
    assert_eq!(rows[0].longterm_w, s.longterm.w);
    assert_eq!(rows[0].longterm_cs, s.longterm.cs);
    assert_eq!(rows[0].longterm_ps, s.longterm.ps);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec = grid(vec![1, 2]);
    let serial = policy_grid(&spec, 1).unwrap();
    for threads in [0, 2, 3] {
        assert_eq!(policy_grid(&spec, threads).unwrap(), serial);
    }
    let sweep = SweepSpec {
        parameter: SweepParameter::NAiCreators,
        values: vec![0.0, 2.0, 8.0],
        seeds: vec![1, 2],
        base_config: small(0),
    };
    assert_eq!(
        sensitivity_sweep(&sweep, 4).unwrap(),
        sensitivity_sweep(&sweep, 1).unwrap()
    );
}

#[test]
fn cells_rerun_in_isolation_reproduce_their_entries() {
    let spec = grid(vec![4, 7]);
    let result = policy_grid(&spec, 0).unwrap();
    for cell in &result.cells {
        let config = SimConfig {
            platform_fee: cell.policy.fee,
            recommend_bias: cell.policy.bias,
            subsidy: cell.policy.subsidy,
            seed: cell.seed,
            ..spec.base_config.clone()
        };
        let summary = summarize_run(&config, default_horizon(config.steps)).unwrap();
        assert_eq!(summary, cell.summary);
        assert!(
            (summary.fees_collected - summary.subsidies_paid - summary.ledger_balance).abs() < 1e-9
        );
    }
}

#[test]
fn invalid_cells_are_rejected_before_running() {
    let spec = GridSpec {
        fees: vec![0.1, 1.5],
        ..grid(vec![1])
    };
    let err = policy_grid(&spec, 1).unwrap_err();
    assert!(err.is_validation());
    assert!(err.to_string().contains("platform_fee"));

    let sweep = SweepSpec {
        parameter: SweepParameter::NAiCreators,
        values: vec![2.5],
        seeds: vec![1],
        base_config: small(0),
    };
    assert!(sensitivity_sweep(&sweep, 1).unwrap_err().is_validation());
    let empty = SweepSpec {
        values: vec![],
        ..sweep
    };
    assert!(sensitivity_sweep(&empty, 1).unwrap_err().is_validation());
}

#[test]
fn zero_steps_give_an_empty_history() {
    let config = SimConfig {
        steps: 0,
        introduce_ai_step: 0,
        ..small(1)
    };
    let result = run_baseline(&config).unwrap();
    assert!(result.history.is_empty());
    assert!(result.summary.is_err());
}

#[test]
fn baseline_without_ai_has_no_ai_shock() {
    let config = SimConfig {
        n_ai_creators: 0,
        steps: 120,
        introduce_ai_step: 60,
        ..small(6)
    };
    let summary = run_baseline(&config).unwrap().summary.unwrap();
    assert_eq!(summary.delta.get("n_ai_active"), Some(0.0));
}
