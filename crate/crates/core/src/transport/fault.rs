use serde::{Deserialize, Serialize};

use super::message::Party;

/// Deliberate protocol deviations a party can be scripted to make. Unlike
/// message mutations these change what an honest-looking party computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// Feed zero as the OLE receiver input of share conversions.
    ZeroOleInput,
    /// Garble a different function with the honest input encoding.
    WrongGarbledFunction,
    /// Draw committed-OT sender randomness outside the committed seed.
    OtOffSchedule,
    /// Choose dual-execution OT inputs that differ from the garbler-side input.
    InconsistentInput,
}

/// Activates `kind` for `party` while its phase starts with `phase_prefix`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyFault {
    pub party: Party,
    pub kind: FaultKind,
    #[serde(default)]
    pub phase_prefix: String,
}
