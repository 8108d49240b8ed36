use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ahp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahp"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .expect("binary runs")
}

fn assert_golden(args: &[&str], expected: &str) {
    let out = ahp(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let golden = std::fs::read(fixture("expected").join(expected)).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&golden), "{expected}");
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn solve_goldens() {
    assert_golden(&["solve", "--input", "ones3.json", "--method", "both"], "solve_ones3_both.json");
    assert_golden(
        &["solve", "--input", "inconsistent3.json", "--method", "lls", "--format", "json"],
        "solve_inconsistent3_lls.json",
    );
    assert_golden(&["solve", "--input", "inconsistent3.json", "--method", "se"], "solve_inconsistent3_se.json");
    assert_golden(&["solve", "--input", "criteria.csv", "--format", "table"], "solve_criteria_table.txt");
}

#[test]
fn group_goldens() {
    assert_golden(
        &["group", "--input", "expert1.json", "--weight", "0.5", "--input", "expert2.json", "--weight", "0.5", "--verify-kl"],
        "group_two_experts.json",
    );
    assert_golden(&["group", "--input", "inconsistent3.json", "--weight", "1"], "group_single.json");
}

// Values computed independently at 30 digits; the goldens must carry them.
#[test]
fn goldens_carry_reference_values() {
    let solve = json(&std::fs::read(fixture("expected/solve_inconsistent3_lls.json")).unwrap());
    let w = &solve["lls"]["priorities"]["w"];
    for (k, expected) in [0.558_424_543_094_797_3, 0.319_618_263_935_975_6, 0.121_957_192_969_227_1]
        .into_iter()
        .enumerate()
    {
        assert!((w[k].as_f64().unwrap() - expected).abs() < 1e-15);
    }
    let sigma2 = solve["lls"]["consistency"]["sigma2"].as_f64().unwrap();
    assert!((sigma2 - 0.054_800_651_297_721_81).abs() < 1e-15);

    let ones = json(&std::fs::read(fixture("expected/solve_ones3_both.json")).unwrap());
    for key in [&ones["lls"]["priorities"]["w"], &ones["se"]["principal_w"]] {
        assert!(key.as_array().unwrap().iter().all(|v| v.as_f64() == Some(1.0 / 3.0)));
    }
    assert_eq!(ones["lls"]["consistency"]["sigma2"].as_f64(), Some(0.0));
    assert_eq!(ones["se"]["mu"].as_f64(), Some(0.0));

    let group = json(&std::fs::read(fixture("expected/group_two_experts.json")).unwrap());
    assert_eq!(group["group_w"]["w"], serde_json::json!([0.8, 0.2]));
    assert_eq!(group["kl_verification"]["passed"], serde_json::json!(true));
}

#[test]
fn single_expert_group_matches_solve() {
    let group = json(&ahp(&["group", "--input", "inconsistent3.json", "--weight", "1"]).stdout);
    let solve = json(&ahp(&["solve", "--input", "inconsistent3.json", "--method", "lls"]).stdout);
    assert_eq!(group["group_w"], solve["lls"]["priorities"]);
    assert_eq!(group["experts"][0]["consistency"], solve["lls"]["consistency"]);
}

#[test]
fn exit_codes() {
    let out = ahp(&["solve", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("parse_error") && stderr.contains("line 3, field 3"), "{stderr}");

    let out = ahp(&["group", "--input", "expert1.json", "--weight", "0.5", "--input", "expert2.json", "--weight", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weight_error"));

    let out = ahp(&["group", "--input", "expert1.json", "--input", "ones3.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatched_dimensions"));

    let out = ahp(&["group", "--input", "expert1.json", "--input", "expert2.json", "--weight", "1"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(ahp(&["solve", "--input", "missing.json"]).status.code(), Some(4));
    assert_eq!(ahp(&["solve"]).status.code(), Some(2));
}

#[test]
fn strict_scale_rejects_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.json");
    std::fs::write(&path, r#"{"n":2,"upper":[[0,1,12]]}"#).unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(ahp(&["solve", "--input", path]).status.code(), Some(0));
    let out = ahp(&["solve", "--input", path, "--strict-scale"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scale_violation"));
}

#[test]
fn output_round_trips_through_json() {
    let out = ahp(&["solve", "--input", "criteria.csv", "--format", "json"]);
    let report: ahp::report::SolveReport = serde_json::from_slice(&out.stdout).unwrap();
    let a = ahp::format::load_matrix(&fixture("criteria.csv"), None, false).unwrap();
    assert_eq!(report, ahp::report::SolveReport::new(&a, ahp::report::Method::Both, 1e-9));
    assert_eq!(report.labels, ["cost", "quality", "speed"]);
}

#[test]
fn compare_is_deterministic() {
    let args = ["compare", "--input", "criteria.csv", "--trials", "50", "--noise", "0.3", "--seed", "9", "--format", "json"];
    let a = ahp(&args);
    let b = ahp(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a.stdout);
    assert_eq!(report["simulation"]["trials"], 50);

    let out = ahp(&["compare", "--input", "ones3.json", "--trials", "10", "--noise", "0", "--format", "json"]);
    let report = json(&out.stdout);
    assert!(report["simulation"]["lls_error"]["max"].as_f64().unwrap() <= 1e-8);
    assert!(report["simulation"]["se_error"]["max"].as_f64().unwrap() <= 1e-8);

    let table = String::from_utf8(ahp(&["compare", "--input", "criteria.csv"]).stdout).unwrap();
    assert!(table.contains("rankings agree: yes"));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn spawn_serve(port: u16, store: &Path) -> Server {
    Server(
        Command::new(env!("CARGO_BIN_EXE_ahp"))
            .args(["serve", "--port", &port.to_string(), "--store", store.to_str().unwrap()])
            .env_remove("AHP_STORE")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    )
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).ok()?;
    stream.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    write!(stream, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut response = String::new();
    stream.read_to_string(&mut response).ok()?;
    Some(response)
}

fn wait_for_health(port: u16) -> String {
    let deadline = Instant::now() + Duration::from_secs(20);
    loop {
        if let Some(response) = http_get(port, "/api/v1/health") {
            return response;
        }
        assert!(Instant::now() < deadline, "server did not come up");
        std::thread::sleep(Duration::from_millis(50));
    }
}

#[test]
fn serve_health_and_store_creation() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("nested/store");
    let port = free_port();
    let mut server = spawn_serve(port, &store);
    let response = wait_for_health(port);
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains(r#"{"status":"ok"}"#));
    assert!(store.is_dir());

    #[cfg(unix)]
    {
        Command::new("kill").args(["-TERM", &server.0.id().to_string()]).status().unwrap();
        let deadline = Instant::now() + Duration::from_secs(20);
        let status = loop {
            if let Some(status) = server.0.try_wait().unwrap() {
                break status;
            }
            assert!(Instant::now() < deadline, "server ignored SIGTERM");
            std::thread::sleep(Duration::from_millis(50));
        };
        assert_eq!(status.code(), Some(0));
        assert!(store.join("sessions.json").is_file());
    }
}

#[test]
fn serve_port_in_use_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let holder = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = holder.local_addr().unwrap().port();
    let out = Command::new(env!("CARGO_BIN_EXE_ahp"))
        .args(["serve", "--port", &port.to_string(), "--store", dir.path().to_str().unwrap()])
        .env_remove("AHP_STORE")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("io_error"));
}

#[test]
fn store_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = dir.path().join("env-store");
    let from_flag = dir.path().join("flag-store");
    let port = free_port();
    let _server = Server(
        Command::new(env!("CARGO_BIN_EXE_ahp"))
            .args(["serve", "--port", &port.to_string(), "--store", from_flag.to_str().unwrap()])
            .env("AHP_STORE", &from_env)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    wait_for_health(port);
    assert!(from_env.is_dir());
    assert!(!from_flag.exists());
}
