#![allow(dead_code)]

use std::path::PathBuf;

use qdef::corpus;

pub fn corpus_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDENS").is_some()
}

/// Elaboration goldens: file relative to the corpus root and CLI arguments.
pub fn elaboration_cases() -> Vec<(String, Vec<String>)> {
    corpus::elaboration_inputs()
        .into_iter()
        .map(|(name, base, formula)| {
            let args = vec![
                "elaborate".to_string(),
                "--base".to_string(),
                format!("corpus:bases/{base}.base.json"),
                "--".to_string(),
                formula.to_string(),
            ];
            (format!("goldens/elaborate/{name}.txt"), args)
        })
        .collect()
}

/// Every CLI golden, elaboration included.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let mut cases = elaboration_cases();
    let script = |name: &str| format!("corpus:scripts/{name}.json");
    for s in corpus::all_scripts() {
        cases.push((format!("goldens/check/{}.txt", s.name), vec!["check".into(), "--script".into(), script(&s.name)]));
    }
    let mut valid: Vec<String> = corpus::worked_scripts().into_iter().map(|s| s.name).collect();
    valid.push(corpus::conversions().name);
    for name in &valid {
        cases.push((format!("goldens/classify/{name}.txt"), vec!["classify".into(), "--script".into(), script(name)]));
        cases.push((
            format!("goldens/normalize/{name}.txt"),
            vec!["normalize".into(), "--trace".into(), "--script".into(), script(name)],
        ));
        cases.push((format!("goldens/audit/{name}.txt"), vec!["audit".into(), "--script".into(), script(name)]));
    }
    cases
}

pub fn run_cli(args: &[String]) -> qdef::cli::Outcome {
    let mut full = vec!["qdef".to_string()];
    full.extend(args.iter().cloned());
    qdef::cli::run(full)
}
