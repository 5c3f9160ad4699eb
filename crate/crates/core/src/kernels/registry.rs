//! String ids for kernels, as used by the CLI and config files.
//!
//! ```text
//! bspline:3              fejer
//! jackson:b=1,m=2        bochner-riesz:g=1,d=1
//! scaled:2:bspline:2     shifted:0.5:bspline:1
//! fejer*bspline:2        (one factor per axis)
//! ```
//!
//! A single univariate id is replicated on every axis.

use crate::error::{Error, Result};

use super::{Kernel, ProductKernel, RadialKernel, UnivariateKernel};

pub const KNOWN_KERNELS: &[&str] = &[
    "bspline:<m>",
    "fejer",
    "jackson:b=<beta>,m=<m>",
    "bochner-riesz:g=<gamma>,d=<dim>",
    "scaled:<factor>:<id>",
    "shifted:<offset>:<id>",
    "<id>*<id>*...",
];

fn unknown(id: &str) -> Error {
    Error::UnknownKernel {
        id: id.to_string(),
        known: KNOWN_KERNELS.join(", "),
    }
}

fn number<T: std::str::FromStr>(id: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| unknown(id))
}

/// `key=value` pairs after the family name.
fn params<'a>(id: &str, s: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    s.split(',')
        .map(|kv| kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| unknown(id)))
        .collect()
}

/// Parse one univariate id; `allow_demo` admits the non-integrable `sinc`.
pub fn parse_univariate(id: &str, allow_demo: bool) -> Result<UnivariateKernel> {
    let id = id.trim();
    let (head, rest) = match id.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (id, None),
    };
    match (head, rest) {
        ("fejer", None) => Ok(UnivariateKernel::fejer()),
        ("sinc", None) if allow_demo => {
            log_demo_warning();
            Ok(UnivariateKernel::sinc_demo())
        }
        ("sinc", None) => Err(Error::InvalidArgument(
            "sinc is not integrable and is only available as a demo".into(),
        )),
        ("bspline", Some(m)) => UnivariateKernel::bspline(number(id, m)?),
        ("jackson", Some(p)) => {
            let mut beta = None;
            let mut m = None;
            for (k, v) in params(id, p)? {
                match k {
                    "b" | "beta" => beta = Some(number(id, v)?),
                    "m" => m = Some(number(id, v)?),
                    _ => return Err(unknown(id)),
                }
            }
            match (beta, m) {
                (Some(b), Some(m)) => UnivariateKernel::jackson(b, m),
                _ => Err(unknown(id)),
            }
        }
        ("scaled" | "shifted", Some(r)) => {
            let (value, base) = r.split_once(':').ok_or_else(|| unknown(id))?;
            let value: f64 = number(id, value)?;
            let base = parse_univariate(base, allow_demo)?;
            if head == "scaled" {
                UnivariateKernel::custom(value, 0.0, base)
            } else {
                UnivariateKernel::custom(1.0, value, base)
            }
        }
        _ => Err(unknown(id)),
    }
}

fn log_demo_warning() {
    eprintln!("warning: sinc kernel is not in L1; sums are truncated and bounds do not apply");
}

fn parse_radial(id: &str, rest: &str, dim: usize) -> Result<Kernel> {
    let mut g = None;
    let mut d = None;
    for (k, v) in params(id, rest)? {
        match k {
            "g" | "gamma" => g = Some(number(id, v)?),
            "d" | "dim" => d = Some(number::<usize>(id, v)?),
            _ => return Err(unknown(id)),
        }
    }
    let g = g.ok_or_else(|| unknown(id))?;
    let d = d.unwrap_or(dim);
    if d != dim {
        return Err(Error::ArityMismatch {
            expected: dim,
            found: d,
        });
    }
    Ok(RadialKernel::new(g, d)?.into())
}

/// Parse a kernel id for dimension `dim`.
pub fn parse_kernel(id: &str, dim: usize, allow_demo: bool) -> Result<Kernel> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let id = id.trim();
    if let Some(rest) = id.strip_prefix("bochner-riesz:") {
        return parse_radial(id, rest, dim);
    }
    if id.contains('*') {
        let factors = id
            .split('*')
            .map(|f| parse_univariate(f, allow_demo))
            .collect::<Result<Vec<_>>>()?;
        if factors.len() != dim {
            return Err(Error::ArityMismatch {
                expected: dim,
                found: factors.len(),
            });
        }
        return Ok(ProductKernel::new(factors)?.into());
    }
    Ok(ProductKernel::replicate(parse_univariate(id, allow_demo)?, dim)?.into())
}
