use lattice_flow::Rational;

use crate::{CliError, CliResult};

/// Parse `a/b:c/d:step` into the values `a/b, a/b + step, …` not exceeding `c/d`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<Rational>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts[..] else {
        return Err(CliError::Usage(format!("grid must look like start:end:step, got {spec:?}")));
    };
    let parse = |s: &str| s.parse::<Rational>().map_err(|e| CliError::Usage(e.to_string()));
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if !step.is_positive() {
        return Err(CliError::Usage(format!("grid step must be positive, got {step}")));
    }
    let mut out = Vec::new();
    let mut y = start;
    while y <= end {
        out.push(y.clone());
        y += &step;
    }
    Ok(out)
}
