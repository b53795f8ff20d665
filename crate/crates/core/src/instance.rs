//! Problem instances, side-information windows and regime classification.
//!
//! A CDPIC(S, K) instance has `M` messages and `C` clients. Client `i` holds a
//! window of `K` consecutive messages (indices modulo `M`) and wants any `S`
//! messages it does not already hold. Every transmission is made by a client
//! and may only combine messages from that client's own window.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a message class. Arithmetic is modulo `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MessageId(pub usize);

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// Index of a client. Arithmetic is modulo `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClientId(pub usize);

impl fmt::Display for ClientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// Where a client's window starts relative to its own index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowConvention {
    /// Client `i` holds `X_{i+1}, ..., X_{i+K}`. All constructions are stated
    /// against this layout.
    #[default]
    After,
    /// Client `i` holds `X_i, ..., X_{i+K-1}`.
    Aligned,
}

impl WindowConvention {
    pub(crate) fn start_offset(self) -> usize {
        match self {
            WindowConvention::After => 1,
            WindowConvention::Aligned => 0,
        }
    }
}

impl fmt::Display for WindowConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowConvention::After => f.write_str("after"),
            WindowConvention::Aligned => f.write_str("aligned"),
        }
    }
}

impl FromStr for WindowConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "after" | "examples" => Ok(WindowConvention::After),
            "aligned" | "definition2" => Ok(WindowConvention::Aligned),
            other => Err(format!(
                "unknown window convention `{other}` (expected `after` or `definition2`)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("need at least 2 messages, got M={0}")]
    TooFewMessages(usize),
    #[error("need at least 2 clients, got C={0}")]
    TooFewClients(usize),
    #[error("window size must satisfy 1 <= K < M, got K={k}, M={m}")]
    WindowOutOfRange { m: usize, k: usize },
    #[error("demand S={s} exceeds the M-K={max} messages a client can still receive")]
    DemandTooLarge { s: usize, max: usize },
}

/// The tuple `(M, C, K, S)` plus the window convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    m: usize,
    c: usize,
    k: usize,
    s: usize,
    convention: WindowConvention,
}

impl ProblemInstance {
    pub fn new(m: usize, c: usize, k: usize, s: usize) -> Result<Self, InstanceError> {
        Self::with_convention(m, c, k, s, WindowConvention::After)
    }

    pub fn square(m: usize, k: usize, s: usize) -> Result<Self, InstanceError> {
        Self::new(m, m, k, s)
    }

    pub fn with_convention(
        m: usize,
        c: usize,
        k: usize,
        s: usize,
        convention: WindowConvention,
    ) -> Result<Self, InstanceError> {
        if m < 2 {
            return Err(InstanceError::TooFewMessages(m));
        }
        if c < 2 {
            return Err(InstanceError::TooFewClients(c));
        }
        if k == 0 || k >= m {
            return Err(InstanceError::WindowOutOfRange { m, k });
        }
        if s > m - k {
            return Err(InstanceError::DemandTooLarge { s, max: m - k });
        }
        Ok(ProblemInstance {
            m,
            c,
            k,
            s,
            convention,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn convention(&self) -> WindowConvention {
        self.convention
    }

    pub fn is_square(&self) -> bool {
        self.m == self.c
    }

    /// Same instance with a different client count.
    pub fn with_clients(&self, c: usize) -> Result<Self, InstanceError> {
        Self::with_convention(self.m, c, self.k, self.s, self.convention)
    }

    /// Same instance with a different demand.
    pub fn with_demand(&self, s: usize) -> Result<Self, InstanceError> {
        Self::with_convention(self.m, self.c, self.k, s, self.convention)
    }

    pub(crate) fn with_window_convention(&self, convention: WindowConvention) -> Self {
        ProblemInstance {
            convention,
            ..*self
        }
    }

    pub fn message(&self, index: usize) -> MessageId {
        MessageId(index % self.m)
    }

    pub fn client(&self, index: usize) -> ClientId {
        ClientId(index % self.c)
    }

    pub fn clients(&self) -> impl Iterator<Item = ClientId> {
        (0..self.c).map(ClientId)
    }

    /// First message of the client's window.
    pub fn window_start(&self, client: ClientId) -> usize {
        (client.0 + self.convention.start_offset()) % self.m
    }

    /// Whether `client` holds `message` as side information.
    pub fn holds(&self, client: ClientId, message: MessageId) -> bool {
        let start = self.window_start(client);
        (message.0 % self.m + self.m - start) % self.m < self.k
    }

    pub fn holds_all<'a>(
        &self,
        client: ClientId,
        messages: impl IntoIterator<Item = &'a MessageId>,
    ) -> bool {
        messages.into_iter().all(|&x| self.holds(client, x))
    }

    /// Regime of `(M, K, S)`. The client count is not consulted.
    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M={} C={} K={} S={}", self.m, self.c, self.k, self.s)?;
        if self.convention != WindowConvention::After {
            write!(f, " ({})", self.convention)?;
        }
        Ok(())
    }
}

/// The `K` consecutive messages held by `client`.
pub fn side_info(instance: &ProblemInstance, client: ClientId) -> BTreeSet<MessageId> {
    let start = instance.window_start(client);
    (0..instance.k())
        .map(|t| instance.message(start + t))
        .collect()
}

/// Case of the transmission-count summary that applies to `(M, K, S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `K <= floor(M/(S+1))`: `S+1` uncoded transmissions.
    A,
    /// Uncoded with `S+n` transmissions for the smallest qualifying `n`.
    B {
        n: usize,
    },
    /// `floor((M+2)/3) < K < floor(M/2)`: paired XOR.
    CMid,
    /// `K` in `{floor(M/2), floor(M/2)+1}`: paired XOR of first and last window messages.
    DHalf,
    /// `K > floor(M/2)+1`: XOR of `K - floor(M/2) + 1` spread messages.
    EHigh,
    Unclassified,
}

impl Regime {
    pub fn is_uncoded(&self) -> bool {
        matches!(self, Regime::A | Regime::B { .. })
    }

    /// Regimes whose construction meets the `S+1` lower bound.
    pub fn claims_s_plus_one(&self) -> bool {
        matches!(self, Regime::A | Regime::DHalf | Regime::EHigh)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::A => f.write_str("A"),
            Regime::B { n } => write!(f, "B(n={n})"),
            Regime::CMid => f.write_str("C_mid"),
            Regime::DHalf => f.write_str("D_half"),
            Regime::EHigh => f.write_str("E_high"),
            Regime::Unclassified => f.write_str("Unclassified"),
        }
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Regime::A),
            "C_mid" => Ok(Regime::CMid),
            "D_half" => Ok(Regime::DHalf),
            "E_high" => Ok(Regime::EHigh),
            "Unclassified" => Ok(Regime::Unclassified),
            _ => s
                .strip_prefix("B(n=")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(|n| Regime::B { n })
                .ok_or_else(|| format!("unknown regime `{s}`")),
        }
    }
}

/// `(n-1) floor(M/(S+n-1)) < K <= n floor(M/(S+n)) <= floor((M+2)/3)`.
pub fn regime_b_holds(m: usize, k: usize, s: usize, n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let lower = (n - 1) * (m / (s + n - 1));
    let upper = n * (m / (s + n));
    lower < k && k <= upper && upper <= m.div_ceil(3)
}

pub(crate) fn regime_a_holds(m: usize, k: usize, s: usize) -> bool {
    k <= m / (s + 1)
}

pub(crate) fn regime_c_holds(m: usize, k: usize) -> bool {
    m.div_ceil(3) < k && k < m / 2
}

pub(crate) fn regime_d_holds(m: usize, k: usize) -> bool {
    k == m / 2 || k == m / 2 + 1
}

pub(crate) fn regime_e_holds(m: usize, k: usize) -> bool {
    k > m / 2 + 1
}

/// Case of the transmission-count summary for `(M, K, S)`.
///
/// Windows up to `floor((M+2)/3)` are in the uncoded band, where A is tried
/// first and then B(n) for increasing `n`. Above that band the coded cases
/// C_mid, D_half and E_high partition the remaining `K`. A low `K` matching
/// neither A nor any B(n) falls through to the coded cases and otherwise is
/// reported as `Unclassified`.
pub fn classify_regime(instance: &ProblemInstance) -> Regime {
    let (m, k, s) = (instance.m(), instance.k(), instance.s());
    if k <= m.div_ceil(3) {
        if regime_a_holds(m, k, s) {
            return Regime::A;
        }
        if let Some(n) = (2..=m - s).find(|&n| regime_b_holds(m, k, s, n)) {
            return Regime::B { n };
        }
    }
    if regime_c_holds(m, k) {
        Regime::CMid
    } else if regime_d_holds(m, k) {
        Regime::DHalf
    } else if regime_e_holds(m, k) {
        Regime::EHigh
    } else {
        Regime::Unclassified
    }
}

/// The uncoded-optimality threshold evaluated against the client count and
/// against the message count. The two agree whenever `M = C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UncodedThreshold {
    /// `K <= (C+2)/3`
    pub by_clients: bool,
    /// `K <= floor((M+2)/3)`
    pub by_messages: bool,
}

impl UncodedThreshold {
    pub fn of(instance: &ProblemInstance) -> Self {
        UncodedThreshold {
            by_clients: 3 * instance.k() <= instance.c() + 2,
            by_messages: instance.k() <= instance.m().div_ceil(3),
        }
    }

    pub fn disagree(&self) -> bool {
        self.by_clients != self.by_messages
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> BTreeSet<MessageId> {
        v.iter().copied().map(MessageId).collect()
    }

    #[test]
    fn window_examples() {
        let inst = ProblemInstance::square(12, 3, 3).unwrap();
        assert_eq!(side_info(&inst, ClientId(0)), ids(&[1, 2, 3]));
        assert_eq!(side_info(&inst, ClientId(9)), ids(&[10, 11, 0]));
        let inst = ProblemInstance::square(16, 7, 1).unwrap();
        assert_eq!(side_info(&inst, ClientId(15)), ids(&[0, 1, 2, 3, 4, 5, 6]));
    }

    #[test]
    fn aligned_window_starts_at_client() {
        let inst =
            ProblemInstance::with_convention(12, 12, 3, 3, WindowConvention::Aligned).unwrap();
        assert_eq!(side_info(&inst, ClientId(0)), ids(&[0, 1, 2]));
        assert_eq!(side_info(&inst, ClientId(11)), ids(&[11, 0, 1]));
    }

    #[test]
    fn rejects_invalid_tuples() {
        assert_eq!(
            ProblemInstance::new(1, 4, 1, 0),
            Err(InstanceError::TooFewMessages(1))
        );
        assert_eq!(
            ProblemInstance::new(4, 1, 1, 0),
            Err(InstanceError::TooFewClients(1))
        );
        assert!(matches!(
            ProblemInstance::new(4, 4, 4, 0),
            Err(InstanceError::WindowOutOfRange { .. })
        ));
        assert!(matches!(
            ProblemInstance::new(4, 4, 0, 0),
            Err(InstanceError::WindowOutOfRange { .. })
        ));
        assert_eq!(
            ProblemInstance::new(10, 10, 6, 5),
            Err(InstanceError::DemandTooLarge { s: 5, max: 4 })
        );
        assert!(ProblemInstance::new(10, 10, 6, 4).is_ok());
    }

    #[test]
    fn clients_beyond_m_share_windows() {
        let inst = ProblemInstance::new(10, 20, 6, 3).unwrap();
        for i in 0..10 {
            assert_eq!(
                side_info(&inst, ClientId(i)),
                side_info(&inst, ClientId(i + 10))
            );
        }
    }

    #[test]
    fn regime_examples() {
        let r = |m, k, s| ProblemInstance::square(m, k, s).unwrap().regime();
        assert_eq!(r(12, 3, 3), Regime::A);
        assert_eq!(r(12, 4, 4), Regime::B { n: 2 });
        assert_eq!(r(10, 7, 3), Regime::EHigh);
        assert_eq!(r(11, 6, 5), Regime::DHalf);
        assert_eq!(r(16, 7, 1), Regime::CMid);
        assert_eq!(r(10, 6, 1), Regime::DHalf);
    }

    #[test]
    fn regime_names_round_trip() {
        for r in [
            Regime::A,
            Regime::B { n: 3 },
            Regime::CMid,
            Regime::DHalf,
            Regime::EHigh,
            Regime::Unclassified,
        ] {
            assert_eq!(r.to_string().parse::<Regime>().unwrap(), r);
        }
        assert!("B(n=x)".parse::<Regime>().is_err());
    }

    #[test]
    fn thresholds_coincide_when_square() {
        for m in 2..40 {
            for k in 1..m {
                let inst = ProblemInstance::square(m, k, 0).unwrap();
                assert!(!UncodedThreshold::of(&inst).disagree(), "M={m} K={k}");
            }
        }
        // M=12, C=6, K=3: 9 > 8 by clients, 3 <= 4 by messages.
        let inst = ProblemInstance::new(12, 6, 3, 1).unwrap();
        assert!(UncodedThreshold::of(&inst).disagree());
    }
}
