use serde::{Deserialize, Serialize};

use backprop_mcts::backup::{Knots, WeightProfile};

use super::num;
use crate::{CliError, Context};

fn default_w0() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpProfileConfig {
    /// A list or the tuple text `"(-10.0, ..., -4.0)"`.
    pub knots: Knots,
    pub horizon: usize,
    #[serde(default = "default_w0")]
    pub w0: f64,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let config: DumpProfileConfig = ctx.source.parse()?;
    let profile = WeightProfile::build(&config.knots.0, config.horizon, config.w0)
        .map_err(|e| ctx.source.invalid(format!("knots: {e}")))?;
    let rows = (0..=profile.horizon()).map(|t| {
        vec![
            t.to_string(),
            num(profile.log_density(t as f64)),
            num(profile.weight(t)),
        ]
    });
    let path = ctx.out.write_csv("profile.csv", &["t", "p", "w"], rows)?;
    println!(
        "wrote {} rows to {} | w(0) = {} | w({}) = {}",
        profile.horizon() + 1,
        path.display(),
        profile.weight(0),
        profile.horizon(),
        profile.weight(profile.horizon())
    );
    ctx.finish(&config)
}
