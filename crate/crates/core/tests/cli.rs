use std::process::{Command, Output};

fn memsbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memsbench"))
        .args(args)
        .output()
        .expect("memsbench runs")
}

fn stdout(args: &[&str]) -> String {
    let out = memsbench(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn map_examples() {
    assert_eq!(stdout(&["map", "rs-to-mems", "81", "28"]), "1 2 2 27\n");
    assert_eq!(stdout(&["map", "mems-to-rs", "1", "1", "1", "1"]), "1 1\n");
    assert_eq!(
        stdout(&["map", "mems-to-rs", "1", "2", "2", "27"]),
        "81 28\n"
    );
}

#[test]
fn map_round_trips_the_corners() {
    for (r, s) in [
        (1, 1),
        (6400, 1),
        (1, 67_500),
        (6400, 67_500),
        (3217, 40_001),
    ] {
        let phys = stdout(&["map", "rs-to-mems", &r.to_string(), &s.to_string()]);
        let words: Vec<&str> = phys.split_whitespace().collect();
        let mut args = vec!["map", "mems-to-rs"];
        args.extend(&words);
        assert_eq!(stdout(&args), format!("{r} {s}\n"));
    }
}

#[test]
fn out_of_range_addresses_fail() {
    for args in [
        &["map", "rs-to-mems", "6401", "1"][..],
        &["map", "rs-to-mems", "0", "1"],
        &["map", "mems-to-rs", "1", "1", "2501", "1"],
    ] {
        let out = memsbench(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("memsbench: "));
    }
}

#[test]
fn info_reports_the_device() {
    let text = stdout(&["info"]);
    for needle in [
        "R_x = 80",
        "S_x = 2500",
        "N_APT = 1280",
        "seek_model = \"average\"",
        "region_size_bits = 4320000",
    ] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}

#[test]
fn device_config_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("memsbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        "R_x = 8\nR_y = 8\nN_APT = 16\nseek_model = \"distance\"\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();

    let text = stdout(&["--device-config", path, "info"]);
    assert!(text.contains("R_x = 8\n"));
    assert!(text.contains("seek_model = \"distance\""));
    let text = stdout(&["--device-config", path, "--seek-model", "average", "info"]);
    assert!(text.contains("seek_model = \"average\""));
    assert_eq!(
        memsbench(&["--device-config", path, "map", "rs-to-mems", "65", "1"])
            .status
            .code(),
        Some(1)
    );

    std::fs::write(dir.join("bad.toml"), "R_x = \"many\"\n").unwrap();
    let bad = dir.join("bad.toml");
    let out = memsbench(&["--device-config", bad.to_str().unwrap(), "info"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

const SPATIAL: &[&str] = &[
    "bench",
    "spatial",
    "--query-sizes",
    "0.01%,0.1%",
    "--aspects",
    "4,1",
    "--repeats",
    "2",
    "--seed",
    "7",
];

#[test]
fn spatial_bench_writes_sorted_csv() {
    let text = stdout(SPATIAL);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("experiment,placement,query_size,aspect,qx,qy,meas_total_s"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // two experiments, three placements, two sweep points each
    assert_eq!(rows.len(), 12);
    let keys: Vec<(String, String)> = rows
        .iter()
        .map(|r| (r[0].to_string(), r[1].to_string()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in &rows {
        let meas: f64 = r[6].parse().unwrap();
        assert!(meas > 0.0);
    }
}

#[test]
fn bench_output_is_reproducible() {
    assert_eq!(stdout(SPATIAL), stdout(SPATIAL));
    let rel = [
        "bench",
        "relational",
        "--sizes",
        "5",
        "--nproj",
        "2",
        "--placement",
        "relational-parallel,nsm-griffin",
        "--repeats",
        "1",
    ];
    let first = stdout(&rel);
    assert_eq!(first, stdout(&rel));
    assert_eq!(first.lines().count(), 5);
}

#[test]
fn bench_writes_to_a_file() {
    let path = std::env::temp_dir().join(format!("memsbench-out-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let printed = stdout(&[
        "bench",
        "relational",
        "--sizes",
        "5",
        "--nproj",
        "1",
        "--placement",
        "dsm-griffin",
        "--repeats",
        "1",
        "--out",
        p,
    ]);
    assert!(printed.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(written.starts_with("experiment,placement,data_mb"));
}

#[test]
fn placements_are_checked() {
    for args in [
        &["bench", "relational", "--placement", "btree"][..],
        &["bench", "spatial", "--placement", "relational-parallel"],
        &["bench", "spatial", "--curve", "peano"],
        &["bench", "relational", "--nproj", "2.5"],
    ] {
        let out = memsbench(args);
        assert_ne!(out.status.code(), Some(0), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}
