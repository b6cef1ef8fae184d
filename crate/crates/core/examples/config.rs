//! Building a run from a JSON config, the same way the CLI does.

use vsa_lab::cli::run_scenario;
use vsa_lab::config::{self, Scenario};

fn main() {
    let text = r#"{
        "vsm": { "k_s": 40000 },
        "mixing": "paper-literal",
        "friction": { "enabled": true },
        "trials": 2
    }"#;
    let cfg = config::from_json_str(text).unwrap();
    println!("{}", config::to_json(&cfg));

    let bad = config::from_json_str(r#"{"gains": {"k_pp": -1}}"#).unwrap_err();
    println!("rejected: {bad}");

    for report in run_scenario(Scenario::Loadshare, &cfg).unwrap() {
        for row in report.rows {
            println!("{:<32} {}", row.metric, row.value);
        }
    }
}
