use std::fmt;
use std::str::FromStr;

/// Kernel function. Only the linear kernel is currently provided; new
/// kinds slot in here without changing the trainer or model APIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelSpec {
    #[default]
    Linear,
}

impl KernelSpec {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(KernelSpec::Linear),
            other => Err(format!("unsupported kernel `{other}`")),
        }
    }
}
