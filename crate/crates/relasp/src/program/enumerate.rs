//! Exhaustive model enumeration.
//!
//! Every subset of the program signature is tested against the requested
//! semantics. This is the ground truth the encoders are verified
//! against, so it stays a plain sweep; the only concession to speed is a
//! bitmask representation of rules and interpretations. A unit test pins
//! the bitmask evaluation to the definitional checks in the parent
//! module.

use super::{dep_arcs_acyclic, Interpretation, LogicProgram, ProgAtom, RuleKind};

/// Default cap on the signature size for [`enumerate_models`].
pub const DEFAULT_SIGNATURE_BOUND: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Stable,
    Supported,
    /// Supported models whose true `dep` atoms span an acyclic digraph.
    AcyclicSupported,
}

#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Keep at most this many models, flagging truncation.
    pub limit: Option<usize>,
    /// Refuse signatures larger than this.
    pub max_signature: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { limit: None, max_signature: DEFAULT_SIGNATURE_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("signature has {size} atoms, above the exhaustive sweep bound {bound}")]
    SignatureTooLarge { size: usize, bound: usize },
}

/// Models in ascending order of their atom sets, possibly truncated.
#[derive(Debug, Clone)]
pub struct ModelList {
    pub models: Vec<Interpretation>,
    pub truncated: bool,
}

struct MaskRule {
    choice: bool,
    head: u64,
    pos: u64,
    neg: u64,
}

struct MaskProgram {
    rules: Vec<MaskRule>,
    /// Bit and endpoints of every `dep` atom in the signature.
    dep_bits: Vec<(u64, u32, u32)>,
}

impl MaskProgram {
    fn build(program: &LogicProgram, signature: &[ProgAtom]) -> Self {
        let bit_of = |atom: &ProgAtom| -> u64 {
            let i = signature.binary_search(atom).expect("rule atom in signature");
            1u64 << i
        };
        let rules = program
            .rules()
            .iter()
            .map(|r| MaskRule {
                choice: r.kind == RuleKind::Choice,
                head: bit_of(&r.head),
                pos: r.pos.iter().map(bit_of).fold(0, |m, b| m | b),
                neg: r.neg.iter().map(bit_of).fold(0, |m, b| m | b),
            })
            .collect();
        let dep_bits = signature
            .iter()
            .filter_map(|a| match a {
                ProgAtom::Dep(p, q) => Some((bit_of(a), *p, *q)),
                _ => None,
            })
            .collect();
        MaskProgram { rules, dep_bits }
    }

    /// Supported model check. Classical satisfaction of the normal rules
    /// is folded in: a satisfied body with a false head rejects at once.
    fn is_supported(&self, interp: u64) -> bool {
        let mut heads = 0u64;
        for rule in &self.rules {
            let body = interp & rule.pos == rule.pos && interp & rule.neg == 0;
            if !body {
                continue;
            }
            if rule.choice {
                if rule.head & interp != 0 {
                    heads |= rule.head;
                }
            } else {
                if rule.head & interp == 0 {
                    return false;
                }
                heads |= rule.head;
            }
        }
        heads == interp
    }

    /// Stable model check: fixpoint of the reduct, compared to `interp`.
    fn is_stable(&self, interp: u64) -> bool {
        let mut derived = 0u64;
        loop {
            let mut changed = false;
            for rule in &self.rules {
                if rule.neg & interp != 0 {
                    continue;
                }
                if rule.choice && rule.head & interp == 0 {
                    continue;
                }
                if derived & rule.pos == rule.pos && derived & rule.head == 0 {
                    derived |= rule.head;
                    changed = true;
                }
            }
            if !changed {
                return derived == interp;
            }
        }
    }

    fn is_acyclic(&self, interp: u64) -> bool {
        let arcs: Vec<(u32, u32)> = self
            .dep_bits
            .iter()
            .filter(|(bit, _, _)| bit & interp != 0)
            .map(|&(_, p, q)| (p, q))
            .collect();
        dep_arcs_acyclic(&arcs)
    }
}

/// Sweeps all `2^|signature|` interpretations and returns those that are
/// models under `semantics`, sorted ascending, truncated at the limit.
pub fn enumerate_models(
    program: &LogicProgram,
    semantics: Semantics,
    options: &EnumerateOptions,
) -> Result<ModelList, EnumerateError> {
    let signature: Vec<ProgAtom> = program.signature().iter().copied().collect();
    let n = signature.len();
    if n > options.max_signature {
        return Err(EnumerateError::SignatureTooLarge { size: n, bound: options.max_signature });
    }
    assert!(n < 64, "mask sweep holds a signature in one machine word");

    let masks = MaskProgram::build(program, &signature);
    let mut found: Vec<u64> = Vec::new();
    for interp in 0..(1u64 << n) {
        let accept = match semantics {
            Semantics::Stable => masks.is_stable(interp),
            Semantics::Supported => masks.is_supported(interp),
            Semantics::AcyclicSupported => {
                masks.is_supported(interp) && masks.is_acyclic(interp)
            }
        };
        if accept {
            found.push(interp);
        }
    }

    let mut models: Vec<Interpretation> = found
        .into_iter()
        .map(|mask| {
            Interpretation::new(
                signature
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &a)| a),
            )
        })
        .collect();
    models.sort();
    let mut truncated = false;
    if let Some(limit) = options.limit {
        if models.len() > limit {
            models.truncate(limit);
            truncated = true;
        }
    }
    Ok(ModelList { models, truncated })
}
