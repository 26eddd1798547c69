//! Closed-form query budgets.
//!
//! Log bases: the witness term is a ratio of natural logs, the Q* terms use
//! log₂, and everything in the noisy budget and the sample-size constraints
//! uses natural log. [`BoundReport`] echoes these so printed numbers can be
//! audited.

use std::fmt;

use thiserror::Error;

use crate::cut::{StructuralParams, INFINITE};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("beta must lie in (0, 1), got {0}")]
    Beta(f64),
    #[error("delta must lie in (0, 1), got {0}")]
    Delta(f64),
    #[error("flip probability must lie in [0, 1/2), got {0}")]
    FlipProbability(f64),
    #[error("the sample-size constraints need p > 0; use the noiseless learner")]
    Noiseless,
    #[error("kappa must be finite and at least 1")]
    KappaUndefined,
    #[error("kappa = {kappa} exceeds n = {n}")]
    KappaTooLarge { kappa: u32, n: usize },
    #[error("k must be at least 1")]
    NoClasses,
    #[error("sample size must be at least 2, got {0}")]
    SampleTooSmall(u64),
    #[error("kl lower bound needs min(x, y) > 0")]
    KlDomain,
    #[error("no sample size up to {0} satisfies the constraints")]
    NoSolution(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub m: usize,
    pub kappa: u32,
    pub c_min: usize,
    pub delta: f64,
    pub p: f64,
}

impl BoundInputs {
    /// Fills the structural fields from an analysis. An uncut labeling has
    /// no κ; it is taken as 1, which only multiplies terms that are zero.
    pub fn from_params(params: &StructuralParams, delta: f64, p: f64) -> Result<Self, BoundsError> {
        let kappa = match params.kappa {
            None => 1,
            Some(INFINITE) => return Err(BoundsError::KappaUndefined),
            Some(k) => k,
        };
        Ok(BoundInputs {
            n: params.n,
            k: params.k,
            beta: params.beta,
            m: params.m,
            kappa,
            c_min: params.c_min,
            delta,
            p,
        })
    }

    fn validate(&self) -> Result<(), BoundsError> {
        check_beta(self.beta)?;
        check_delta(self.delta)?;
        if self.k == 0 {
            return Err(BoundsError::NoClasses);
        }
        if self.kappa == 0 || self.kappa == INFINITE {
            return Err(BoundsError::KappaUndefined);
        }
        if self.kappa as usize > self.n {
            return Err(BoundsError::KappaTooLarge { kappa: self.kappa, n: self.n });
        }
        if !(0.0..0.5).contains(&self.p) {
            return Err(BoundsError::FlipProbability(self.p));
        }
        Ok(())
    }
}

fn check_beta(beta: f64) -> Result<(), BoundsError> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Beta(beta))
    }
}

fn check_delta(delta: f64) -> Result<(), BoundsError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Delta(delta))
    }
}

/// Ceiling that ignores float noise just above an integer.
fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9).ceil()
}

/// Random samples needed to see every class with probability `1 − delta`.
pub fn witness_bound(beta: f64, delta: f64) -> Result<f64, BoundsError> {
    check_beta(beta)?;
    check_delta(delta)?;
    Ok((1.0 / (beta * delta)).ln() / (1.0 / (1.0 - beta)).ln())
}

fn search_terms(i: &BoundInputs) -> f64 {
    let n = i.n as f64;
    let kappa = i.kappa as f64;
    i.m as f64 * ceil_tol(n.log2() - kappa.log2()) + i.c_min as f64 * (ceil_tol(kappa.log2()) + 1.0)
}

pub fn q_star(inputs: &BoundInputs) -> Result<f64, BoundsError> {
    inputs.validate()?;
    Ok(witness_bound(inputs.beta, inputs.delta)? + search_terms(inputs))
}

pub fn q_star_pair(inputs: &BoundInputs) -> Result<f64, BoundsError> {
    Ok(inputs.k as f64 * q_star(inputs)?)
}

/// Q* without the witness term, for when every class is already known.
pub fn q1_star(inputs: &BoundInputs) -> Result<f64, BoundsError> {
    inputs.validate()?;
    Ok(search_terms(inputs))
}

/// KL divergence between Bernoulli(x) and Bernoulli(y), in nats.
/// Infinite when `y` is 0 or 1 and `x` differs from it.
pub fn bernoulli_kl(x: f64, y: f64) -> f64 {
    fn term(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    }
    term(x, y) + term(1.0 - x, 1.0 - y)
}

pub fn kl_lower_bound(x: f64, y: f64) -> Result<f64, BoundsError> {
    let lo = x.min(y);
    if lo <= 0.0 {
        return Err(BoundsError::KlDomain);
    }
    Ok((y - x).powi(2) / (2.0 * lo))
}

/// One of the four sample-size conditions, evaluated at a given M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl Constraint {
    pub fn satisfied(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Parameters of the sample-size constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeInputs {
    pub k: usize,
    pub beta: f64,
    pub p: f64,
    pub delta: f64,
    /// Q* evaluated at δ/4.
    pub q_star_quarter: f64,
}

impl SampleSizeInputs {
    fn validate(&self) -> Result<(), BoundsError> {
        check_beta(self.beta)?;
        check_delta(self.delta)?;
        if self.k == 0 {
            return Err(BoundsError::NoClasses);
        }
        if self.p == 0.0 {
            return Err(BoundsError::Noiseless);
        }
        if !(0.0..0.5).contains(&self.p) {
            return Err(BoundsError::FlipProbability(self.p));
        }
        Ok(())
    }

    /// Right-hand sides of the four constraints; the first compares against
    /// M / ln M, the rest against M.
    fn thresholds(&self) -> [f64; 4] {
        let k = self.k as f64;
        let gap4 = (2.0 * self.p - 1.0).powi(4);
        let misvote = if self.k == 1 {
            0.0
        } else {
            2.0 / (self.beta * bernoulli_kl(0.5, self.p))
                * (8.0 * (k - 1.0) * self.q_star_quarter / self.delta).ln()
        };
        [
            128.0 * k / (self.beta * gap4),
            12.0 / self.beta * (4.0 * k / self.delta).ln(),
            8.0 / self.delta,
            misvote,
        ]
    }

    pub fn check(&self, m: u64) -> Result<[Constraint; 4], BoundsError> {
        self.validate()?;
        let [a, b, c, d] = self.thresholds();
        let mf = m as f64;
        Ok([
            Constraint { name: "sample_over_log", lhs: mf / mf.ln(), rhs: a },
            Constraint { name: "class_coverage", lhs: mf, rhs: b },
            Constraint { name: "confidence", lhs: mf, rhs: c },
            Constraint { name: "misvote", lhs: mf, rhs: d },
        ])
    }
}

const M_SEARCH_LIMIT: u64 = 1 << 48;

/// Smallest M ≥ 3 meeting all four constraints.
pub fn solve_min_m(inputs: &SampleSizeInputs) -> Result<u64, BoundsError> {
    inputs.validate()?;
    let ok = |m: u64| inputs.check(m).map(|cs| cs.iter().all(Constraint::satisfied));
    // M / ln M is increasing for M ≥ 3, so the predicate is monotone.
    let mut hi = 3u64;
    while !ok(hi)? {
        if hi >= M_SEARCH_LIMIT {
            return Err(BoundsError::NoSolution(M_SEARCH_LIMIT));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo < 3 {
        return Ok(hi);
    }
    // ok(lo) is false, ok(hi) is true.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Seeds times the per-node budget, plus the clustering cost.
pub fn noisy_budget(k: usize, p: f64, m: u64, q_star_quarter: f64) -> Result<f64, BoundsError> {
    if m < 2 {
        return Err(BoundsError::SampleTooSmall(m));
    }
    if !(0.0..0.5).contains(&p) {
        return Err(BoundsError::FlipProbability(p));
    }
    let mf = m as f64;
    let k = k as f64;
    Ok(q_star_quarter * mf + 128.0 * mf * k * k * mf.ln() / (2.0 * p - 1.0).powi(4))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyReport {
    pub q_star_quarter: f64,
    pub min_m: u64,
    pub noisy_budget: f64,
    pub constraints: [Constraint; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub witness_term: f64,
    pub q_star: f64,
    pub q_star_pair: f64,
    pub q1_star: f64,
    pub noisy: Option<NoisyReport>,
}

impl BoundReport {
    /// `sample_size` overrides the solved M in the noisy section.
    pub fn compute(inputs: &BoundInputs, noisy: bool, sample_size: Option<u64>) -> Result<Self, BoundsError> {
        let witness_term = witness_bound(inputs.beta, inputs.delta)?;
        let q = q_star(inputs)?;
        let noisy = if noisy {
            let q4 = q_star(&BoundInputs { delta: inputs.delta / 4.0, ..*inputs })?;
            let s = SampleSizeInputs { k: inputs.k, beta: inputs.beta, p: inputs.p, delta: inputs.delta, q_star_quarter: q4 };
            let min_m = solve_min_m(&s)?;
            let m = sample_size.unwrap_or(min_m);
            Some(NoisyReport {
                q_star_quarter: q4,
                min_m,
                noisy_budget: noisy_budget(inputs.k, inputs.p, m, q4)?,
                constraints: s.check(m)?,
            })
        } else {
            None
        };
        Ok(BoundReport {
            inputs: *inputs,
            witness_term,
            q_star: q,
            q_star_pair: q_star_pair(inputs)?,
            q1_star: q1_star(inputs)?,
            noisy,
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.inputs;
        writeln!(f, "n={}", i.n)?;
        writeln!(f, "k={}", i.k)?;
        writeln!(f, "beta={}", i.beta)?;
        writeln!(f, "m={}", i.m)?;
        writeln!(f, "kappa={}", i.kappa)?;
        writeln!(f, "c_min={}", i.c_min)?;
        writeln!(f, "delta={}", i.delta)?;
        writeln!(f, "p={}", i.p)?;
        writeln!(f, "log_base_witness=e")?;
        writeln!(f, "log_base_q_star=2")?;
        writeln!(f, "log_base_noisy=e")?;
        writeln!(f, "witness_term={:.6}", self.witness_term)?;
        writeln!(f, "q_star={:.6}", self.q_star)?;
        writeln!(f, "q_star_pair={:.6}", self.q_star_pair)?;
        write!(f, "q1_star={:.6}", self.q1_star)?;
        if let Some(nr) = &self.noisy {
            writeln!(f)?;
            writeln!(f, "q_star_quarter={:.6}", nr.q_star_quarter)?;
            writeln!(f, "min_M={}", nr.min_m)?;
            write!(f, "noisy_budget={:.6}", nr.noisy_budget)?;
            for c in &nr.constraints {
                let state = if c.satisfied() { "satisfied" } else { "violated" };
                write!(f, "\nconstraint_{}={} lhs={:.6} rhs={:.6}", c.name, state, c.lhs, c.rhs)?;
            }
        }
        Ok(())
    }
}
