//! A five-class synthetic anti-spoofing world with three sensor modalities.
//!
//! Each presentation class leaves a characteristic signature across the
//! `rgb`, `depth`, and `ir` channels, discretized to small code alphabets.
//! The table is deliberately structured:
//!
//! * the clean `rgb` texture code alone identifies every class — a shortcut
//!   any classifier can latch onto;
//! * the other channels are genuinely ambiguous: a shaped paper mask shows
//!   the same facial relief as a live face on `depth`, and a latex mask
//!   mimics skin reflectance on `ir`, so those rows carry mixed live/attack
//!   evidence and a classifier's prior over that mixture matters;
//! * sensor noise and domain shift (extra noise plus a rotated `ir`
//!   encoding) degrade the shortcut at evaluation time.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forge::SampleRecord;
use crate::taxonomy::{load_tree_str, ReasoningTree};

/// JSON source of the toy world's reasoning taxonomy, bundled with the crate.
pub const TOY_TREE_JSON: &str = include_str!("../../data/toy_tree.json");

/// The reasoning taxonomy the toy world trains against.
///
/// Its shape is deliberately lopsided: the live subtree fans out into four
/// independent confirmation leaves (texture, relief, warmth, motion), so a
/// "real" verdict can be reached through many distinct evidence chains, while
/// each attack family is a single deep diagnostic chain with one verdict
/// leaf. Under a shared length budget the live class therefore admits far
/// more distinct reasoning paths than any attack class — the kind of
/// asymmetry that makes path-capped corpus construction skew its answer
/// marginal toward the path-rich class.
pub fn taxonomy() -> ReasoningTree {
    load_tree_str(TOY_TREE_JSON).expect("bundled toy tree is valid")
}

/// Number of distinct `rgb` observation codes.
pub const RGB_ARITY: u32 = 5;
/// Number of distinct `depth` observation codes.
pub const DEPTH_ARITY: u32 = 3;
/// Number of distinct `ir` observation codes.
pub const IR_ARITY: u32 = 3;

/// The five presentation classes the world can show a sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationClass {
    Real,
    Print,
    Replay,
    Mask,
    PaperMask,
}

impl PresentationClass {
    pub const ALL: [PresentationClass; 5] = [
        PresentationClass::Real,
        PresentationClass::Print,
        PresentationClass::Replay,
        PresentationClass::Mask,
        PresentationClass::PaperMask,
    ];

    /// The taxonomy leaf name this class corresponds to.
    pub fn label(self) -> &'static str {
        match self {
            PresentationClass::Real => "real",
            PresentationClass::Print => "print attack",
            PresentationClass::Replay => "replay attack",
            PresentationClass::Mask => "mask attack",
            PresentationClass::PaperMask => "paper mask attack",
        }
    }

    /// Noise-free `(rgb, depth, ir)` observation codes for this class.
    ///
    /// `rgb` is the texture read (0 skin, 1 print grain, 2 moiré, 3 latex,
    /// 4 paper fibre) and separates every class on its own. `depth` is
    /// facial relief (0 true 3-D face, 1 flat sheet, 2 rigid shell): a
    /// shaped paper mask reads as a real face there. `ir` is reflectance
    /// (0 skin-like, 1 paper-like, 2 screen glare): latex mimics skin, so
    /// a mask attack reads as live on `ir`.
    pub fn cue_row(self) -> (u32, u32, u32) {
        match self {
            PresentationClass::Real => (0, 0, 0),
            PresentationClass::Print => (1, 1, 1),
            PresentationClass::Replay => (2, 1, 2),
            PresentationClass::Mask => (3, 2, 0),
            PresentationClass::PaperMask => (4, 0, 1),
        }
    }

    /// Whether a verification system should accept this presentation.
    pub fn is_live(self) -> bool {
        matches!(self, PresentationClass::Real)
    }
}

/// Capture conditions for one data split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    /// Per-modality probability that the code is replaced by a uniform draw.
    pub noise: f64,
    /// Cyclic offset added to the `ir` code, modeling a sensor whose
    /// response bands are indexed differently.
    pub ir_rotation: u32,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self { noise: 0.05, ir_rotation: 0 }
    }
}

impl DomainSpec {
    /// A noticeably harder capture setup: noisier sensors and a swapped-in
    /// `ir` camera.
    pub fn shifted() -> Self {
        Self { noise: 0.25, ir_rotation: 1 }
    }
}

/// One observed presentation with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSample {
    pub class: PresentationClass,
    pub depth: u32,
    pub ir: u32,
    pub rgb: u32,
    pub sample_id: String,
}

impl SyntheticSample {
    /// Convert to the forge's manifest form: the class becomes the target
    /// label, the codes travel in the modality map.
    pub fn to_sample_record(&self) -> SampleRecord {
        SampleRecord {
            label: self.class.label().to_string(),
            modalities: BTreeMap::from([
                ("depth".to_string(), self.depth),
                ("ir".to_string(), self.ir),
                ("rgb".to_string(), self.rgb),
            ]),
            prompt: format!(
                "Observations: rgb={} depth={} ir={}. Decide whether the face \
                 presentation is genuine; if it is not, name the attack type.",
                self.rgb, self.depth, self.ir
            ),
            sample_id: self.sample_id.clone(),
        }
    }
}

/// Generate `count` samples under the given capture conditions.
///
/// Classes are assigned round-robin so every split is label-balanced to
/// within one sample. Per modality, noise replaces the class cue with a
/// uniform draw over that modality's alphabet; the `ir` rotation is applied
/// after noise, as a property of the capturing sensor.
pub fn generate_samples(
    count: usize,
    domain: &DomainSpec,
    seed: u64,
    id_prefix: &str,
) -> Vec<SyntheticSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let class = PresentationClass::ALL[i % PresentationClass::ALL.len()];
            let (mut rgb, mut depth, mut ir) = class.cue_row();
            if rng.gen_range(0.0..1.0) < domain.noise {
                rgb = rng.gen_range(0..RGB_ARITY);
            }
            if rng.gen_range(0.0..1.0) < domain.noise {
                depth = rng.gen_range(0..DEPTH_ARITY);
            }
            if rng.gen_range(0.0..1.0) < domain.noise {
                ir = rng.gen_range(0..IR_ARITY);
            }
            ir = (ir + domain.ir_rotation) % IR_ARITY;
            SyntheticSample {
                class,
                depth,
                ir,
                rgb,
                sample_id: format!("{id_prefix}-{i:04}"),
            }
        })
        .collect()
}
