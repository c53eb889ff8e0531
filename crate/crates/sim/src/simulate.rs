//! Rejection sampling of each design's observation scheme, reproducible
//! from a 64-bit seed.

use partreg_core::{
    BinaryRecord, CsRecord, CsSample, DtRecord, DtSample, LtRecord, LtSample, LtrcRecord,
    LtrcSample, RtRecord, RtSample,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{SimError, SimResult};
use crate::truth::DesignTruth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Design {
    Plain,
    CaseControl,
    XTruncated,
    LeftTruncated,
    Ltrc,
    RightTruncated,
    DoubleTruncated,
    CurrentStatus,
}

impl Design {
    pub const ALL: [Design; 8] = [
        Design::Plain,
        Design::CaseControl,
        Design::XTruncated,
        Design::LeftTruncated,
        Design::Ltrc,
        Design::RightTruncated,
        Design::DoubleTruncated,
        Design::CurrentStatus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Design::Plain => "plain",
            Design::CaseControl => "case_control",
            Design::XTruncated => "x_truncated",
            Design::LeftTruncated => "left_truncated",
            Design::Ltrc => "ltrc",
            Design::RightTruncated => "right_truncated",
            Design::DoubleTruncated => "double_truncated",
            Design::CurrentStatus => "current_status",
        }
    }

    pub fn from_name(name: &str) -> Option<Design> {
        Design::ALL.iter().copied().find(|d| d.name() == name)
    }
}

/// Records of one simulated dataset, in the shape its estimators consume.
#[derive(Debug, Clone)]
pub enum DesignSample {
    Binary(Vec<BinaryRecord>),
    LeftTruncated(LtSample),
    Ltrc(LtrcSample),
    RightTruncated(RtSample),
    DoubleTruncated(DtSample),
    CurrentStatus(CsSample),
}

impl DesignSample {
    /// Covariate values of the usable records.
    pub fn xs(&self) -> Vec<f64> {
        match self {
            DesignSample::Binary(rows) => rows.iter().filter(|r| r.s).map(|r| r.x).collect(),
            DesignSample::LeftTruncated(s) => s.xs().to_vec(),
            DesignSample::Ltrc(s) => s.xs().to_vec(),
            DesignSample::RightTruncated(s) => s.xs().to_vec(),
            DesignSample::DoubleTruncated(s) => s.xs().to_vec(),
            DesignSample::CurrentStatus(s) => s.xs().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DesignSample::Binary(rows) => rows.len(),
            DesignSample::LeftTruncated(s) => s.len(),
            DesignSample::Ltrc(s) => s.len(),
            DesignSample::RightTruncated(s) => s.len(),
            DesignSample::DoubleTruncated(s) => s.len(),
            DesignSample::CurrentStatus(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct Simulated {
    pub sample: DesignSample,
    /// Accepted / raw draws: the empirical estimate of E α(X).
    pub acceptance_rate: f64,
    pub raw_draws: u64,
}

/// SplitMix64 step, for deriving independent per-replication seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const PROBE_DRAWS: u64 = 10_000;
const MIN_ACCEPTANCE: f64 = 1e-3;

/// Draw records of the design until `n` satisfy its sampling condition.
/// Deterministic for a given (seed, parameters); designs whose acceptance
/// rate falls below 1e-3 over a 10⁴-draw probe are rejected as infeasible.
pub fn simulate_design(
    truth: &DesignTruth,
    design: Design,
    n: usize,
    seed: u64,
) -> SimResult<Simulated> {
    if n == 0 {
        return Err(SimError::Config("cannot simulate an empty dataset".into()));
    }
    match design {
        Design::LeftTruncated | Design::Ltrc | Design::RightTruncated
        | Design::DoubleTruncated | Design::CurrentStatus => {
            truth.check_centered_error()?;
        }
        _ => {}
    }
    if design == Design::LeftTruncated {
        truth.check_truncation_support()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: u64 = 0;
    let mut accepted: usize = 0;

    macro_rules! fill {
        ($draw:expr) => {{
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                raw += 1;
                if let Some(rec) = $draw(&mut rng)? {
                    out.push(rec);
                    accepted += 1;
                }
                if raw >= PROBE_DRAWS && (accepted as f64) < MIN_ACCEPTANCE * raw as f64 {
                    return Err(SimError::Infeasible {
                        rate: accepted as f64 / raw as f64,
                        raw,
                    });
                }
            }
            out
        }};
    }

    let sample = match design {
        Design::Plain => {
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<BinaryRecord>> {
                let x = truth.x.sample(rng);
                let y = rng.random_range(0.0..1.0) < truth.p_at(x)?;
                Ok(Some(BinaryRecord::new(x, y)))
            });
            DesignSample::Binary(rows)
        }
        Design::CaseControl => {
            let (l0, l1) = truth.sampling_rates.ok_or_else(|| {
                SimError::Config("case-control design requires sampling rates".into())
            })?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<BinaryRecord>> {
                let x = truth.x.sample(rng);
                let y = rng.random_range(0.0..1.0) < truth.p_at(x)?;
                let rate = if y { l1 } else { l0 };
                let s = rng.random_range(0.0..1.0) < rate;
                Ok(if s { Some(BinaryRecord::new(x, y)) } else { None })
            });
            DesignSample::Binary(rows)
        }
        Design::XTruncated => {
            let (a, b) = truth.x_interval.ok_or_else(|| {
                SimError::Config("x-truncated design requires an interval".into())
            })?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<BinaryRecord>> {
                let x = truth.x.sample(rng);
                let y = rng.random_range(0.0..1.0) < truth.p_at(x)?;
                Ok(if a <= x && x <= b { Some(BinaryRecord::new(x, y)) } else { None })
            });
            DesignSample::Binary(rows)
        }
        Design::LeftTruncated => {
            let t_dist = truth
                .t
                .ok_or_else(|| SimError::Config("left truncation requires T".into()))?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<LtRecord>> {
                let x = truth.x.sample(rng);
                let y = truth.m_at(x) + truth.eps.sample(rng);
                let t = t_dist.sample(rng);
                Ok(if t <= y { Some(LtRecord::new(x, t, y)) } else { None })
            });
            DesignSample::LeftTruncated(LtSample::new(rows)?)
        }
        Design::Ltrc => {
            let t_dist =
                truth.t.ok_or_else(|| SimError::Config("ltrc requires T".into()))?;
            let c_dist =
                truth.c.ok_or_else(|| SimError::Config("ltrc requires C".into()))?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<LtrcRecord>> {
                let x = truth.x.sample(rng);
                let y = truth.m_at(x) + truth.eps.sample(rng);
                let t = t_dist.sample(rng);
                let c = c_dist.sample(rng);
                let z = y.min(c);
                Ok(if t <= z { Some(LtrcRecord::new(x, t, z, y <= c)) } else { None })
            });
            DesignSample::Ltrc(LtrcSample::new(rows)?)
        }
        Design::RightTruncated => {
            let c_dist = truth
                .c
                .ok_or_else(|| SimError::Config("right truncation requires C".into()))?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<RtRecord>> {
                let x = truth.x.sample(rng);
                let y = truth.m_at(x) + truth.eps.sample(rng);
                let c = c_dist.sample(rng);
                Ok(if y <= c { Some(RtRecord::new(x, y, c)) } else { None })
            });
            DesignSample::RightTruncated(RtSample::new(rows)?)
        }
        Design::DoubleTruncated => {
            let t_dist = truth
                .t
                .ok_or_else(|| SimError::Config("double truncation requires T".into()))?;
            let c_dist = truth
                .c
                .ok_or_else(|| SimError::Config("double truncation requires C".into()))?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<DtRecord>> {
                let x = truth.x.sample(rng);
                let y = truth.m_at(x) + truth.eps.sample(rng);
                let t = t_dist.sample(rng);
                let c = c_dist.sample(rng);
                Ok(if t <= y && y <= c { Some(DtRecord::new(x, t, y, c)) } else { None })
            });
            DesignSample::DoubleTruncated(DtSample::new(rows)?)
        }
        Design::CurrentStatus => {
            let c_dist = truth
                .c
                .ok_or_else(|| SimError::Config("current status requires an inspection C".into()))?;
            let rows = fill!(|rng: &mut ChaCha8Rng| -> SimResult<Option<CsRecord>> {
                let x = truth.x.sample(rng);
                let y = truth.m_at(x) + truth.eps.sample(rng);
                let c = c_dist.sample(rng);
                Ok(Some(CsRecord::new(x, c, y <= c)))
            });
            DesignSample::CurrentStatus(CsSample::new(rows)?)
        }
    };
    Ok(Simulated { sample, acceptance_rate: accepted as f64 / raw as f64, raw_draws: raw })
}
