//! Problem configuration file: one `key value...` pair per line.
//!
//! ```text
//! N 8
//! Y 1.0
//! rho 1.0
//! domain 0 1
//! dirichlet 1 1
//! flag 256
//! fmt 12 10
//! K 3
//! L 3
//! layout serial
//! ```
//!
//! `dirichlet` may repeat; `flag` is optional and defaults to
//! `4Y/(rho Delta^2)`. Comments start with `#`.

use anyhow::{anyhow, bail, Context, Result};

use qfem_core::fem::FemProblem1D;
use qfem_core::geometry::Layout;
use qfem_core::oracle::OracleConfig;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: FemProblem1D,
    pub oracle: OracleConfig,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut n_nodes: Option<u32> = None;
    let mut elasticity: Option<f64> = None;
    let mut density: Option<f64> = None;
    let mut domain: Option<(f64, f64)> = None;
    let mut dirichlet: Vec<(u32, u32)> = Vec::new();
    let mut flag: Option<f64> = None;
    let mut fmt: Option<(u32, u32)> = None;
    let mut k_order: Option<u32> = None;
    let mut l_iterations: Option<u32> = None;
    let mut layout = Layout::Serial;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        let ctx = |what: &str| format!("line {line_no}: {what}");
        match key {
            "N" => n_nodes = Some(parse_one(&rest).with_context(|| ctx("N <count>"))?),
            "Y" => elasticity = Some(parse_one(&rest).with_context(|| ctx("Y <value>"))?),
            "rho" => density = Some(parse_one(&rest).with_context(|| ctx("rho <value>"))?),
            "domain" => {
                let (a, b) = parse_two(&rest).with_context(|| ctx("domain <a> <b>"))?;
                domain = Some((a, b));
            }
            "dirichlet" => {
                let (lo, hi) = parse_two(&rest).with_context(|| ctx("dirichlet <lo> <hi>"))?;
                dirichlet.push((lo, hi));
            }
            "flag" => flag = Some(parse_one(&rest).with_context(|| ctx("flag <value>"))?),
            "fmt" => {
                let (r, p) = parse_two(&rest).with_context(|| ctx("fmt <r> <p>"))?;
                fmt = Some((r, p));
            }
            "K" => k_order = Some(parse_one(&rest).with_context(|| ctx("K <order>"))?),
            "L" => l_iterations = Some(parse_one(&rest).with_context(|| ctx("L <iterations>"))?),
            "layout" => {
                layout = match rest.first().copied() {
                    Some("serial") => Layout::Serial,
                    Some("parallel") => Layout::Parallel,
                    other => bail!("line {line_no}: layout must be serial|parallel, got {other:?}"),
                }
            }
            other => bail!("line {line_no}: unknown key `{other}`"),
        }
    }

    let n_nodes = n_nodes.ok_or_else(|| anyhow!("missing `N`"))?;
    let elasticity = elasticity.ok_or_else(|| anyhow!("missing `Y`"))?;
    let density = density.ok_or_else(|| anyhow!("missing `rho`"))?;
    let domain = domain.ok_or_else(|| anyhow!("missing `domain`"))?;
    let (r, p) = fmt.ok_or_else(|| anyhow!("missing `fmt`"))?;
    let k_order = k_order.ok_or_else(|| anyhow!("missing `K`"))?;
    let l_iterations = l_iterations.ok_or_else(|| anyhow!("missing `L`"))?;

    let problem = FemProblem1D::new(n_nodes, elasticity, density, domain, dirichlet, flag)
        .map_err(|e| anyhow!("invalid problem: {e}"))?;
    let mut oracle = OracleConfig::new(r, p, k_order, l_iterations);
    oracle.layout = layout;
    Ok(RunConfig { problem, oracle })
}

fn parse_one<T: std::str::FromStr>(rest: &[&str]) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let tok = rest.first().ok_or_else(|| anyhow!("missing value"))?;
    tok.parse().map_err(|e| anyhow!("bad value `{tok}`: {e}"))
}

fn parse_two<T: std::str::FromStr + Copy>(rest: &[&str]) -> Result<(T, T)>
where
    T::Err: std::fmt::Display,
{
    if rest.len() < 2 {
        bail!("expected two values");
    }
    let a = rest[0]
        .parse()
        .map_err(|e| anyhow!("bad value `{}`: {e}", rest[0]))?;
    let b = rest[1]
        .parse()
        .map_err(|e| anyhow!("bad value `{}`: {e}", rest[1]))?;
    Ok((a, b))
}
