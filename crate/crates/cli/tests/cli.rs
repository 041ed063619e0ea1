use std::process::{Command, Output};

fn byzcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_byzcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HEADER: &str = "scheme,p,n,G,h_p,h_g,analytic_ratio,empirical_ratio,stderr,trials,seed";

#[test]
fn analytic_sweep_has_exact_header_and_empty_empirical_columns() {
    let o = byzcode(&["sweep", "--p", "0,0.03,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 9);
    assert_eq!(lines[1], "error-correction,0,1000,10,60,200,0,,,0,2008");
    assert_eq!(lines[2], "error-correction,0.03,1000,10,60,200,0.03,,,0,2008");
    assert_eq!(lines[5], "packet,0.03,1000,10,60,200,0.03,,,0,2008");
    assert_eq!(lines[9], "generation,0.5,1000,10,60,200,0.0195117,,,0,2008");
}

#[test]
fn rows_are_sorted_and_ratios_bounded() {
    let o = byzcode(&["figure3", "--p-step", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 5 * 11);
    let keys: Vec<(f64, usize)> = rows
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    for r in &rows {
        assert_eq!(r[0], "generation");
        let ratio: f64 = r[6].parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio));
    }
}

#[test]
fn simulated_sweep_is_reproducible_and_within_tolerance() {
    let args = [
        "sweep",
        "--p",
        "0,0.02,0.1,0.4",
        "--scheme",
        "error-correction,packet",
        "--trials",
        "20000",
    ];
    let a = byzcode(&args);
    let b = byzcode(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let analytic: f64 = f[6].parse().unwrap();
        let empirical: f64 = f[7].parse().unwrap();
        let se: f64 = f[8].parse().unwrap();
        assert!((empirical - analytic).abs() <= (3.0 * se).max(0.005), "{line}");
    }
    let other = byzcode(&[
        "sweep",
        "--p",
        "0.1",
        "--scheme",
        "error-correction",
        "--trials",
        "2000",
        "--seed",
        "5",
    ]);
    let again = byzcode(&[
        "sweep",
        "--p",
        "0.1",
        "--scheme",
        "error-correction",
        "--trials",
        "2000",
        "--seed",
        "6",
    ]);
    assert_ne!(other.stdout, again.stdout);
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("byzcode-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig45.csv");
    let o = byzcode(&["figure45", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(HEADER));
    // 101 coarse points plus 90 zoom points not already on the coarse grid.
    assert_eq!(text.lines().count(), 1 + 3 * 191);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(byzcode(&["sweep", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(byzcode(&["sweep", "--G", "0"]).status.code(), Some(2));
    assert_eq!(byzcode(&["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(byzcode(&["accounting", "--G", "0"]).status.code(), Some(2));
    assert_eq!(byzcode(&["fig2", "--G", "6"]).status.code(), Some(2));
    assert_eq!(
        byzcode(&["sweep", "--out", "/nonexistent-dir/x.csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        byzcode(&["validate", "--criterion", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn validate_filter_and_tamper_hook() {
    let ok = byzcode(&["validate", "--criterion", "peak"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("PASS [2 peak]"), "{text}");

    let crossover = byzcode(&["validate", "--criterion", "crossover"]);
    assert_eq!(crossover.status.code(), Some(0));
    let tampered = byzcode(&["validate", "--criterion", "crossover", "--tamper"]);
    assert_eq!(tampered.status.code(), Some(1));
    assert!(stdout(&tampered).starts_with("FAIL [1 crossover]"));
}

#[test]
fn accounting_defaults() {
    let o = byzcode(&["accounting"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("6.00% of n"), "{text}");
    assert!(text.contains("2.00% of nG"), "{text}");
    assert!(text.contains("k = 100, log q = 8"), "{text}");
    assert!(text.contains("1.00% of payload"), "{text}");
    assert!(text.contains("not part of h_p"), "{text}");
}

#[test]
fn fig2_summary() {
    let o = byzcode(&["fig2", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("F received = D forwarded + E forwarded in 50/50 trials"),
        "{text}"
    );
    assert!(text.contains("node C flagged in 0 trials"), "{text}");
    let clean = byzcode(&["fig2", "--trials", "10", "--edge", "C->E=0"]);
    assert!(stdout(&clean).contains("F decoded the full generation in 10/10 trials"));
}
