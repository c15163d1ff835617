use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> String {
    format!("{}/problems/{name}.dc", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{name}.dc"));
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffconv"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(report: &str, key: &str) -> Vec<String> {
    let prefix = format!("{key}: ");
    report
        .lines()
        .filter_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .collect()
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&run(&["verify", &problem("mass_law")])), 0);
    assert_eq!(code(&run(&["verify", &problem("heat_weighted")])), 0);

    let o = run(&["verify", &problem("heat_trivial"), "--format", "machine"]);
    assert_eq!(code(&o), 1);
    assert_eq!(field(&stdout(&o), "residual"), ["u_x1x1"]);

    let o = run(&["verify", &problem("malformed")]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("offset 1"), "{err}");
}

#[test]
fn input_errors_exit_two() {
    let header_late = scratch(
        "header_late",
        "n: 1\npotential: u\nvector m: u ; -u_x1\nconvection: u\n",
    );
    let no_vector = scratch("no_vector", "n: 1\npotential: u\n");
    let unknown_key = scratch("unknown_key", "n: 1\npotential: u\nflux: u\n");
    for f in [&header_late, &no_vector, &unknown_key] {
        assert_eq!(code(&run(&["verify", f])), 2, "{f}");
    }
    assert_eq!(code(&run(&["verify", "/nonexistent/file.dc"])), 2);
    assert_eq!(code(&run(&["transform", &problem("heat_trivial")])), 2);
    assert_eq!(code(&run(&["noether", &problem("mass_law")])), 2);
    assert_eq!(code(&run(&["catalog", "--case", "Tab9.*"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn split_reports_determining_and_classifying_equations() {
    let generic = stdout(&run(&[
        "split",
        &problem("split_generic"),
        "--format",
        "machine",
    ]));
    assert!(
        field(&generic, "determining.1").contains(&"T_uu = 0".to_string()),
        "{generic}"
    );

    let heat = stdout(&run(&[
        "split",
        &problem("split_heat"),
        "--format",
        "machine",
    ]));
    assert_eq!(
        field(&heat, "classifying"),
        ["u*alpha_t + u*alpha_x1x1 + u*alpha_x2x2 = 0"]
    );

    let shifted = stdout(&run(&[
        "split",
        &problem("split_convection_equals_potential"),
        "--format",
        "machine",
    ]));
    assert_eq!(
        field(&shifted, "classifying"),
        ["u*alpha_t - u^2*alpha_x1 + u^2*alpha_x1x1 = 0"]
    );
}

#[test]
fn machine_reports_are_deterministic() {
    for args in [
        vec![
            "transform",
            &problem("transform_equivalence"),
            "--format",
            "machine",
            "--seed",
            "7",
        ],
        vec!["catalog", "Tab1.*", "--n", "2", "--format", "machine"],
        vec!["numcheck", &problem("heat_numcheck"), "--format", "machine"],
        vec!["noether", &problem("pair_noether"), "--format", "machine"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seeds_select_different_equivalence_elements() {
    let f = problem("transform_equivalence");
    let a = stdout(&run(&[
        "transform",
        &f,
        "--format",
        "machine",
        "--seed",
        "1",
    ]));
    let b = stdout(&run(&[
        "transform",
        &f,
        "--format",
        "machine",
        "--seed",
        "2",
    ]));
    assert_ne!(field(&a, "potential"), field(&b, "potential"));
    for r in [a, b] {
        assert_eq!(field(&r, "failed"), ["0"]);
    }
}

#[test]
fn explicit_transformations_keep_the_law() {
    let o = run(&[
        "transform",
        &problem("transform_scaling"),
        "--format",
        "machine",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "image"), ["1/2*u ; -1/2*u_x1"]);
}

#[test]
fn second_table_passes_in_the_plane() {
    let o = run(&[
        "catalog", "--case", "Tab2.*", "--n", "2", "--format", "machine",
    ]);
    assert_eq!(code(&o), 0);
    let r = stdout(&o);
    assert_eq!(field(&r, "unresolved"), ["0"]);
    assert!(field(&r, "resolution").iter().any(|x| x == "corrected"));
}

#[test]
fn heat_weight_is_conserved_numerically() {
    let o = run(&["numcheck", &problem("heat_numcheck"), "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let drift: f64 = field(&stdout(&o), "drift")[0].parse().unwrap();
    assert!(drift < 1e-4, "{drift}");

    let o = run(&["numcheck", &problem("heat_energy"), "--format", "machine"]);
    assert_eq!(code(&o), 1);
    assert_eq!(field(&stdout(&o), "strictly_decreasing"), ["true"]);
}

#[test]
fn bracket_relations() {
    assert_eq!(code(&run(&["brackets", &problem("pair_brackets")])), 0);

    let o = run(&["brackets", "--n", "2", "--format", "machine"]);
    assert_eq!(code(&o), 1);
    let r = stdout(&o);
    let failing: Vec<&str> = r
        .split("\n\n")
        .filter(|b| b.contains("status: fail"))
        .filter_map(|b| b.lines().find_map(|l| l.strip_prefix("subject: ")))
        .collect();
    assert_eq!(
        failing,
        ["[P_1, G_1] = D_2 (n=2)", "[P_t, G_1] = P_1 (n=2)"]
    );
}

#[test]
fn noether_vectors_and_rejected_scaling() {
    let o = run(&["noether", &problem("pair_noether"), "--format", "machine"]);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "residual").len(), 4);

    let z = scratch(
        "pair_z",
        "n: 2\ndiffusivity: exp(u)\ngenerator Z: catalog\n",
    );
    let o = run(&["noether", &z, "--format", "machine"]);
    assert_eq!(code(&o), 1);

    let missing = scratch(
        "pair_missing_witness",
        "n: 2\ndiffusivity: exp(u)\ngenerator D_2: catalog\n",
    );
    let o = run(&["noether", &missing]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness"));
}
