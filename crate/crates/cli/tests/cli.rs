use std::path::Path;
use std::process::{Command, Output};

fn growthlab(args: &[&str], cwd: &Path, out_root: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_growthlab"));
    cmd.args(args).current_dir(cwd).env_remove("GROWTHLAB_OUT");
    if let Some(root) = out_root {
        cmd.env("GROWTHLAB_OUT", root);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn list_names_required_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = growthlab(&["list"], dir.path(), None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "figure1-grid",
        "figure2-sigma1.5",
        "figure2-sigma2.0",
        "figure2-sigma2.5",
        "figure2-sigma3.0",
        "figure3-trap",
        "figureEC3-levels",
        "policy-subsidies",
        "nonrivalry-table",
        "accumulation-check",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn preset_honours_out_and_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("explicit");
    let o = growthlab(&["preset", "policy-subsidies", "--out", out.to_str().unwrap()], dir.path(), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("policy.csv").exists() && out.join("manifest.json").exists());

    let root = dir.path().join("root");
    let o = growthlab(&["preset", "accumulation-check"], dir.path(), Some(&root));
    assert_eq!(code(&o), 0);
    let written: Vec<_> = std::fs::read_dir(&root).unwrap().collect();
    assert_eq!(written.len(), 1);
    let sub = written[0].as_ref().unwrap().path();
    assert!(sub.join("manifest.json").exists());

    let o = growthlab(&["preset", "nope"], dir.path(), Some(&root));
    assert_eq!(code(&o), 2);
}

#[test]
fn run_and_validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("root");
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let good = write("good.cfg", "[params]\nsigma = 2.5\n[experiment]\nkind = bgp\n[output]\ndir = good\n");
    let unknown = write("unknown.cfg", "[params]\nomega = 1\n[experiment]\nkind = bgp\n");
    let infeasible = write("infeasible.cfg", "[params]\nrho = 0.01\n[experiment]\nkind = bgp\n[output]\ndir = bad\n");
    let column = write("column.cfg", "[experiment]\nkind = policy\n[output]\ndir = col\ncolumns = tau_labor,nonsense\n");
    let stuck = write("stuck.cfg", "[experiment]\nkind = transition\nhorizon = 5\n[output]\ndir = stuck\n");

    let v = |p: &Path| growthlab(&["validate", p.to_str().unwrap()], dir.path(), Some(&root));
    assert_eq!(code(&v(&good)), 0);
    let o = v(&unknown);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega"));
    assert_eq!(code(&v(&infeasible)), 2);
    assert!(!root.exists());

    let r = |p: &Path| growthlab(&["run", p.to_str().unwrap()], dir.path(), Some(&root));
    assert_eq!(code(&r(&good)), 0);
    assert!(root.join("good/bgp.csv").exists());
    assert_eq!(code(&r(&infeasible)), 2);
    let o = r(&column);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonsense"));
    assert_eq!(code(&r(&stuck)), 3);
    for d in ["bad", "col", "stuck"] {
        assert!(!root.join(d).exists(), "{d}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = growthlab(&["preset", "figure2-sigma1.5", "--out", d.to_str().unwrap()], dir.path(), None);
        assert_eq!(code(&o), 0);
    }
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
}
