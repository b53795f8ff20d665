//! Schedule constructions for each regime, plus the dispatcher that also
//! handles `M != C`.
//!
//! Every constructor works in the `After` window layout and relabels messages
//! when the instance uses the aligned layout; the two layouts differ by a
//! shift of one message index. Constructed schedules are always run through
//! the static decoder before being returned.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::decoder::{run_schedule, DecodeError, DecodeMode, DecodingReport};
use crate::instance::{
    regime_a_holds, regime_b_holds, regime_c_holds, regime_d_holds, regime_e_holds, ClientId,
    InstanceError, MessageId, ProblemInstance, Regime, UncodedThreshold, WindowConvention,
};

/// One broadcast: the XOR of `payload` sent by `transmitter`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transmission {
    pub transmitter: ClientId,
    pub payload: BTreeSet<MessageId>,
}

impl Transmission {
    pub fn new(transmitter: ClientId, payload: impl IntoIterator<Item = MessageId>) -> Self {
        Transmission {
            transmitter,
            payload: payload.into_iter().collect(),
        }
    }

    pub fn is_uncoded(&self) -> bool {
        self.payload.len() == 1
    }
}

/// An ordered list of transmissions for one instance. `regime` is `None` for
/// schedules that did not come out of a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub instance: ProblemInstance,
    pub transmissions: Vec<Transmission>,
    pub regime: Option<Regime>,
}

impl Schedule {
    pub fn manual(instance: ProblemInstance, transmissions: Vec<Transmission>) -> Self {
        Schedule {
            instance,
            transmissions,
            regime: None,
        }
    }

    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn decode(&self, mode: DecodeMode) -> Result<DecodingReport, DecodeError> {
        run_schedule(&self.instance, &self.transmissions, mode)
    }

    /// The same symbols and transmitters offered to a different number of
    /// clients.
    pub fn with_clients(&self, c: usize) -> Result<Schedule, InstanceError> {
        Ok(Schedule {
            instance: self.instance.with_clients(c)?,
            transmissions: self.transmissions.clone(),
            regime: self.regime,
        })
    }

    pub fn regime_label(&self) -> String {
        self.regime
            .map_or_else(|| "manual".to_string(), |r| r.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("{instance}: the {regime} construction requires {condition}")]
    RegimeMismatch {
        instance: ProblemInstance,
        regime: Regime,
        condition: &'static str,
    },
    #[error("{0}: regime constructions are stated for M = C")]
    NotSquare(ProblemInstance),
    #[error(
        "payload escape: {transmitter} would have to encode {message}, outside its window \
         (e={e} divides K={k})"
    )]
    PayloadEscape {
        transmitter: ClientId,
        message: MessageId,
        e: usize,
        k: usize,
    },
    #[error("paired-XOR growth reached {cap} transmissions without satisfying every client")]
    CapExceeded { cap: usize },
    #[error("{regime} schedule leaves {} client(s) short of S={demand}", unsatisfied.len())]
    VerificationFailed {
        regime: Regime,
        demand: usize,
        unsatisfied: Vec<ClientId>,
    },
    #[error("not constructible: {0}")]
    NotConstructible(String),
    #[error("no client holds every message of {payload:?}")]
    NoHolder { payload: Vec<MessageId> },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

fn require_square(instance: &ProblemInstance) -> Result<(), SchemeError> {
    if instance.is_square() {
        Ok(())
    } else {
        Err(SchemeError::NotSquare(*instance))
    }
}

fn mismatch(instance: &ProblemInstance, regime: Regime, condition: &'static str) -> SchemeError {
    SchemeError::RegimeMismatch {
        instance: *instance,
        regime,
        condition,
    }
}

fn pair(client: usize, a: usize, b: usize, m: usize) -> Transmission {
    Transmission::new(ClientId(client % m), [MessageId(a % m), MessageId(b % m)])
}

/// Builds in the `After` layout, relabels for the aligned layout, verifies.
fn build(
    instance: &ProblemInstance,
    regime: Regime,
    body: impl FnOnce(&ProblemInstance) -> Result<Vec<Transmission>, SchemeError>,
) -> Result<Schedule, SchemeError> {
    let canonical = instance.with_window_convention(WindowConvention::After);
    let mut transmissions = body(&canonical)?;
    if instance.convention() == WindowConvention::Aligned {
        let m = instance.m();
        for t in &mut transmissions {
            t.payload = t
                .payload
                .iter()
                .map(|x| MessageId((x.0 + m - 1) % m))
                .collect();
        }
    }
    verified(Schedule {
        instance: *instance,
        transmissions,
        regime: Some(regime),
    })
}

fn verified(schedule: Schedule) -> Result<Schedule, SchemeError> {
    let report = schedule.decode(DecodeMode::Static)?;
    if report.satisfied {
        Ok(schedule)
    } else {
        Err(SchemeError::VerificationFailed {
            regime: schedule.regime.unwrap_or(Regime::Unclassified),
            demand: schedule.instance.s(),
            unsatisfied: report.unsatisfied_clients(),
        })
    }
}

fn empty(instance: &ProblemInstance, regime: Regime) -> Schedule {
    Schedule {
        instance: *instance,
        transmissions: Vec::new(),
        regime: Some(regime),
    }
}

fn uncoded_spread(instance: &ProblemInstance, count: usize) -> Vec<Transmission> {
    let m = instance.m();
    let spacing = m / count;
    (0..count)
        .map(|j| {
            Transmission::new(
                ClientId(j * spacing % m),
                [MessageId((1 + j * spacing) % m)],
            )
        })
        .collect()
}

/// `S+1` uncoded messages spaced `floor(M/(S+1))` apart.
pub fn construct_regime_a(instance: &ProblemInstance) -> Result<Schedule, SchemeError> {
    require_square(instance)?;
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    if s == 0 {
        return Ok(empty(instance, Regime::A));
    }
    if !regime_a_holds(m, k, s) {
        return Err(mismatch(instance, Regime::A, "K <= floor(M/(S+1))"));
    }
    build(instance, Regime::A, |canon| {
        Ok(uncoded_spread(canon, s + 1))
    })
}

/// `S+n` uncoded messages spaced `floor(M/(S+n))` apart.
pub fn construct_regime_b(instance: &ProblemInstance, n: usize) -> Result<Schedule, SchemeError> {
    require_square(instance)?;
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    let regime = Regime::B { n };
    if s == 0 {
        return Ok(empty(instance, regime));
    }
    if !regime_b_holds(m, k, s, n) {
        return Err(mismatch(
            instance,
            regime,
            "(n-1) floor(M/(S+n-1)) < K <= n floor(M/(S+n)) <= floor((M+2)/3)",
        ));
    }
    build(instance, regime, |canon| Ok(uncoded_spread(canon, s + n)))
}

/// Pairs `X_{1+jd} + X_{K+jd}` from client `jd`, `d = M-2K+1`. Two
/// transmissions for `S = 1`; for larger `S` the sequence grows until every
/// client is satisfied, giving up after `M` transmissions.
pub fn construct_regime_c(instance: &ProblemInstance) -> Result<Schedule, SchemeError> {
    require_square(instance)?;
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    if s == 0 {
        return Ok(empty(instance, Regime::CMid));
    }
    if !regime_c_holds(m, k) {
        return Err(mismatch(
            instance,
            Regime::CMid,
            "floor((M+2)/3) < K < floor(M/2)",
        ));
    }
    let stride = m - 2 * k + 1;
    if s == 1 {
        return build(instance, Regime::CMid, |_| {
            Ok(vec![
                pair(0, 1, k, m),
                pair(stride, stride + 1, m - k + 1, m),
            ])
        });
    }

    let canonical = instance.with_window_convention(WindowConvention::After);
    let mut transmissions = Vec::new();
    for j in 0..m {
        let offset = j * stride;
        transmissions.push(pair(offset, 1 + offset, k + offset, m));
        let report = run_schedule(&canonical, &transmissions, DecodeMode::Static)?;
        if report.satisfied {
            return build(instance, Regime::CMid, |_| Ok(transmissions));
        }
    }
    Err(SchemeError::CapExceeded { cap: m })
}

/// Transmitter offsets `0, K-2, K-3, ...` (mod C), skipping offsets already
/// used, until `S+1` distinct transmitters exist.
pub fn regime_d_offsets(k: usize, s: usize, c: usize) -> Vec<usize> {
    let mut offsets = vec![0usize];
    let mut next = k as i64 - 2;
    while offsets.len() < s + 1 && offsets.len() < c {
        let o = next.rem_euclid(c as i64) as usize;
        if !offsets.contains(&o) {
            offsets.push(o);
        }
        next -= 1;
    }
    offsets
}

/// Client `j` sends the first and last message of its window,
/// `X_{j+1} + X_{j+K}`.
pub fn construct_regime_d(instance: &ProblemInstance) -> Result<Schedule, SchemeError> {
    construct_regime_d_rotated(instance, 0)
}

/// [`construct_regime_d`] with every transmitter shifted by `rotation`.
pub fn construct_regime_d_rotated(
    instance: &ProblemInstance,
    rotation: usize,
) -> Result<Schedule, SchemeError> {
    require_square(instance)?;
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    if s == 0 {
        return Ok(empty(instance, Regime::DHalf));
    }
    if !regime_d_holds(m, k) {
        return Err(mismatch(
            instance,
            Regime::DHalf,
            "K in {floor(M/2), floor(M/2)+1}",
        ));
    }
    build(instance, Regime::DHalf, |_| {
        Ok(regime_d_offsets(k, s, m)
            .into_iter()
            .map(|o| {
                let j = o + rotation;
                pair(j, j + 1, j + k, m)
            })
            .collect())
    })
}

/// Client `j` in `0..=S` sends `e+1` messages spaced `floor(K/e)` apart,
/// `e = K - floor(M/2)`.
pub fn construct_regime_e(instance: &ProblemInstance) -> Result<Schedule, SchemeError> {
    require_square(instance)?;
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    if s == 0 {
        return Ok(empty(instance, Regime::EHigh));
    }
    if !regime_e_holds(m, k) {
        return Err(mismatch(instance, Regime::EHigh, "K > floor(M/2)+1"));
    }
    let e = k - m / 2;
    let step = k / e;
    build(instance, Regime::EHigh, |canon| {
        (0..=s)
            .map(|j| {
                let transmitter = ClientId(j % m);
                let payload: Vec<MessageId> =
                    (0..=e).map(|i| canon.message(j + 1 + i * step)).collect();
                if let Some(&message) = payload.iter().find(|&&x| !canon.holds(transmitter, x)) {
                    return Err(SchemeError::PayloadEscape {
                        transmitter,
                        message,
                        e,
                        k,
                    });
                }
                Ok(Transmission::new(transmitter, payload))
            })
            .collect()
    })
}

fn construct_square(square: &ProblemInstance, regime: Regime) -> Result<Schedule, SchemeError> {
    match regime {
        Regime::A => construct_regime_a(square),
        Regime::B { n } => construct_regime_b(square, n),
        Regime::CMid => construct_regime_c(square),
        Regime::DHalf => construct_regime_d(square),
        Regime::EHigh => construct_regime_e(square),
        Regime::Unclassified => Err(SchemeError::NotConstructible(format!(
            "{square}: K falls between the uncoded and coded cases; use the exhaustive search"
        ))),
    }
}

fn smallest_holder(instance: &ProblemInstance, payload: &BTreeSet<MessageId>) -> Option<ClientId> {
    instance
        .clients()
        .find(|&client| instance.holds_all(client, payload))
}

/// Builds a schedule for any valid instance.
///
/// With `M = C` this dispatches on [`Regime`]. With `C > M` the square
/// schedule is reused as is: client `i + M` has the same window as client `i`.
/// With `M > C` uncoded schedules are reused when `K <= (C+2)/3` and coded
/// ones when `K >= floor(M/2)`, moving each transmission to the smallest
/// client that holds its payload when the original transmitter is missing.
pub fn construct(instance: &ProblemInstance) -> Result<Schedule, SchemeError> {
    let regime = instance.regime();
    if instance.s() == 0 {
        return Ok(empty(instance, regime));
    }
    let (m, c, k) = (instance.m(), instance.c(), instance.k());
    let square = instance
        .with_clients(m)
        .expect("an instance stays valid with C = M");

    if c >= m {
        let base = construct_square(&square, regime)?;
        return verified(Schedule {
            instance: *instance,
            transmissions: base.transmissions,
            regime: base.regime,
        });
    }

    let (base, uncoded) = if UncodedThreshold::of(instance).by_clients {
        if !regime.is_uncoded() {
            return Err(SchemeError::NotConstructible(format!(
                "{instance}: K <= (C+2)/3 but (M, K, S) is in regime {regime}"
            )));
        }
        (construct_square(&square, regime)?, true)
    } else if k >= m / 2 {
        let coded = if regime_d_holds(m, k) {
            construct_regime_d(&square)?
        } else {
            construct_regime_e(&square)?
        };
        (coded, false)
    } else {
        return Err(SchemeError::NotConstructible(format!(
            "{instance}: M > C with floor((M+2)/3) < K < floor(M/2) needs a different code design"
        )));
    };

    let transmissions = base
        .transmissions
        .into_iter()
        .map(|t| {
            let keep =
                !uncoded && t.transmitter.0 < c && instance.holds_all(t.transmitter, &t.payload);
            let transmitter = if keep {
                t.transmitter
            } else {
                smallest_holder(instance, &t.payload).ok_or_else(|| SchemeError::NoHolder {
                    payload: t.payload.iter().copied().collect(),
                })?
            };
            Ok(Transmission {
                transmitter,
                payload: t.payload,
            })
        })
        .collect::<Result<Vec<_>, SchemeError>>()?;

    verified(Schedule {
        instance: *instance,
        transmissions,
        regime: base.regime,
    })
}
