use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn cdpic(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_cdpic"))
        .args(args)
        .output()
        .unwrap();
    (
        output.status.code().unwrap(),
        String::from_utf8(output.stdout).unwrap(),
        String::from_utf8(output.stderr).unwrap(),
    )
}

fn table_rows(out: &str) -> Vec<String> {
    out.lines()
        .filter(|l| l.starts_with('C') && l.contains(" | "))
        .map(|l| {
            l.split(" | ")
                .skip(2)
                .map(str::trim)
                .collect::<Vec<_>>()
                .join(" ")
                .replace('−', "-")
        })
        .collect()
}

#[test]
fn construct_output_matches_fixtures() {
    for (args, name) in [
        (["12", "3", "3"], "m12_k3_s3.json"),
        (["12", "4", "4"], "m12_k4_s4.json"),
        (["16", "7", "1"], "m16_k7_s1.json"),
        (["16", "7", "2"], "m16_k7_s2.json"),
        (["10", "7", "3"], "m10_k7_s3.json"),
    ] {
        let (code, out, _) = cdpic(&["construct", "--m", args[0], "--k", args[1], "--s", args[2]]);
        assert_eq!(code, 0);
        let fixture = std::fs::read_to_string(fixture(name)).unwrap();
        let strip = |text: &str| {
            let mut doc = cdpic::ScheduleDocument::parse(text).unwrap();
            doc.note = None;
            doc
        };
        assert_eq!(strip(&out), strip(&fixture), "{name}");
    }
}

#[test]
fn uncoded_spacing_table() {
    let path = fixture("m12_k4_s4.json");
    let (code, out, _) = cdpic(&["verify", "--table", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(
        table_rows(&out),
        [
            "- - X5 X7 X9 X11",
            "X1 - - X7 X9 X11",
            "X1 - - X7 X9 X11",
            "X1 X3 - - X9 X11",
            "X1 X3 - - X9 X11",
            "X1 X3 X5 - - X11",
            "X1 X3 X5 - - X11",
            "X1 X3 X5 X7 - -",
            "X1 X3 X5 X7 - -",
            "- X3 X5 X7 X9 -",
            "- X3 X5 X7 X9 -",
            "- - X5 X7 X9 X11",
        ]
    );
}

#[test]
fn rotated_half_window_table() {
    let path = fixture("m11_k6_s5_rotated.json");
    let (code, out, _) = cdpic(&["verify", "--table", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    // The last cell for C10 is printed as "-" in the source table although
    // X10 is outside that client's window; the decoder's value is kept.
    assert_eq!(
        table_rows(&out),
        [
            "X0 X10 X9 X8 X7 X10",
            "X0 X10 X9 X8 X1 X10",
            "X0 X10 X9 X2 X1 X10",
            "X0 X10 X3 X2 X1 X10",
            "X0 X4 X3 X2 X1 -",
            "- X4 X3 X2 X1 X5",
            "X6 X4 X3 X2 - X5",
            "X6 X4 X3 - X7 X5",
            "X6 X4 - X8 X7 X5",
            "X6 - X9 X8 X7 X5",
            "X6 X10 X9 X8 X7 X10",
        ]
    );
}

#[test]
fn verify_reads_stdin_and_is_byte_stable() {
    let text = std::fs::read_to_string(fixture("m16_k7_s2.json")).unwrap();
    let run = || {
        let mut child = Command::new(env!("CARGO_BIN_EXE_cdpic"))
            .args(["verify", "--table", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
        let output = child.wait_with_output().unwrap();
        assert!(output.status.success());
        output.stdout
    };
    let first = run();
    assert_eq!(first, run());
    let out = String::from_utf8(first).unwrap();
    assert!(out.contains("served per transmission: 12 12 9 9 (sum 42, C*S 32, decode events 48)"));
    assert!(out.ends_with("satisfied: yes\n"));
}

#[test]
fn exit_codes() {
    let corrupt = fixture("corrupt_foreign_payload.json");
    let (code, _, err) = cdpic(&["verify", corrupt.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("C12 does not hold X4"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.json");
    std::fs::write(
        &short,
        r#"{"instance":{"M":12,"C":12,"K":3,"S":2},"regime":"manual","transmissions":[{"tx":0,"xor":[1]},{"tx":3,"xor":[4]}]}"#,
    )
    .unwrap();
    let (code, out, _) = cdpic(&["verify", short.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("satisfied: no"));

    let (code, _, _) = cdpic(&["construct", "--m", "12", "--k", "12", "--s", "1"]);
    assert_eq!(code, 2);
    let (code, _, _) = cdpic(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) = cdpic(&["construct", "--m", "12", "--k", "3", "--s", "x"]);
    assert_eq!(code, 2);

    let (code, _, err) = cdpic(&["construct", "--m", "12", "--k", "8", "--s", "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("E_high"), "{err}");

    let (code, _, err) = cdpic(&["oracle", "--m", "20", "--k", "14", "--s", "1"]);
    assert_eq!(code, 5);
    assert!(err.contains("candidate cap"), "{err}");
    let (code, _, _) = cdpic(&[
        "oracle",
        "--m",
        "10",
        "--k",
        "4",
        "--s",
        "3",
        "--depth-cap",
        "3",
    ]);
    assert_eq!(code, 5);
}

#[test]
fn construct_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, out, _) = cdpic(&[
        "construct",
        "--m",
        "12",
        "--k",
        "3",
        "--s",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (code, out, _) = cdpic(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("regime: A"));
}

#[test]
fn oracle_reports_the_constructed_length() {
    let (code, out, _) = cdpic(&["oracle", "--m", "8", "--k", "4", "--s", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("n_min: 3"));
    assert!(out.contains("constructed: 3 (D_half) pass"));
    let witness = &out[out.find('{').unwrap()..];
    let schedule = cdpic::ScheduleDocument::parse(witness)
        .unwrap()
        .to_schedule()
        .unwrap();
    assert_eq!(schedule.len(), 3);

    let (code, out, _) = cdpic(&[
        "oracle",
        "--m",
        "7",
        "--k",
        "2",
        "--s",
        "2",
        "--uncoded-only",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("search: uncoded"));
}

#[test]
fn progressive_mode_can_only_help() {
    let path = fixture("m16_k7_s2.json");
    let (_, st, _) = cdpic(&["verify", path.to_str().unwrap()]);
    let (code, pr, _) = cdpic(&["verify", "--mode", "progressive", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(st.contains("mode: static"));
    assert!(pr.contains("mode: progressive"));
}

#[test]
fn definition2_layout_round_trips() {
    let (code, out, _) = cdpic(&[
        "construct",
        "--m",
        "12",
        "--k",
        "3",
        "--s",
        "3",
        "--convention",
        "definition2",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("\"convention\": \"aligned\""));
    let doc = cdpic::ScheduleDocument::parse(&out).unwrap();
    assert_eq!(doc.transmissions[0].xor, vec![0]);

    let mut child = Command::new(env!("CARGO_BIN_EXE_cdpic"))
        .args(["verify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(out.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn efficiency_with_payload_columns() {
    let (code, out, _) = cdpic(&[
        "efficiency",
        "--m",
        "10",
        "--k",
        "6",
        "--s",
        "3",
        "--samples",
        "2000",
    ]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(
        row,
        ["3", "8", "4", "50.00", "1254400", "1254.4", "10035200", "10035.2"]
    );
}

#[test]
fn shuffle_rejects_bad_compression() {
    let (code, _, err) = cdpic(&[
        "shuffle",
        "--m",
        "10",
        "--k",
        "6",
        "--s",
        "3",
        "--compression",
        "1.5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("compression"), "{err}");
}
