//! Runs a reduced verification campaign (decomposition identities, component
//! estimates per regime, Hardy inequalities) and prints the report.

use netspace::{run_campaign, CampaignConfig, QuadratureSpec};

fn main() -> netspace::Result<()> {
    let cfg = CampaignConfig {
        seeds: (0..12).collect(),
        resolutions: vec![16],
        tau_choices: vec![(2, 2), (4, 4)],
        t_per_regime: 3,
        ..CampaignConfig::default()
    };
    cfg.validate()?;

    let report = run_campaign(&cfg, &QuadratureSpec::default())?;
    print!("{}", report.to_text());
    if !report.all_pass() {
        std::process::exit(1);
    }
    Ok(())
}
