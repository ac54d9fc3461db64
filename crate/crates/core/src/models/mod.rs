//! Builders for the benchmark problem families, each constructible under
//! every decomposition variant, with seeded deterministic instance
//! generation.

mod ecc;
mod golfers;
mod golomb;
mod labs;
mod linear;
mod nonlinear;

pub use ecc::{hamming_distance, lee_distance};
pub use labs::{energy_node, energy_value};

use crate::engine::{Store, VarId};
use crate::error::{Error, Result};
use crate::propagators::{post_decomposed, post_fixed, ChainShape, DecomposeOptions, Relation};
use crate::views::{AnyView, DispatchMode};

/// The decomposition variants compared by the benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// One auxiliary variable and one primitive propagator per subexpression.
    Vars,
    /// Auxiliary variables, with n-ary global propagators for sums.
    VarsGlobal,
    /// One compile-time-specialized view per constraint.
    ViewsStatic,
    /// One runtime-dispatched view tree per constraint.
    ViewsDynamic,
    /// Static views combined with global sum propagators.
    ViewsStaticGlobal,
    /// Dynamic views combined with global sum propagators.
    ViewsDynamicGlobal,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 6] = [
        ModelVariant::Vars,
        ModelVariant::VarsGlobal,
        ModelVariant::ViewsStatic,
        ModelVariant::ViewsDynamic,
        ModelVariant::ViewsStaticGlobal,
        ModelVariant::ViewsDynamicGlobal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelVariant::Vars => "vars",
            ModelVariant::VarsGlobal => "vars-global",
            ModelVariant::ViewsStatic => "views-static",
            ModelVariant::ViewsDynamic => "views-dynamic",
            ModelVariant::ViewsStaticGlobal => "views-static-global",
            ModelVariant::ViewsDynamicGlobal => "views-dynamic-global",
        }
    }

    pub fn parse(s: &str) -> Option<ModelVariant> {
        ModelVariant::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn is_global(&self) -> bool {
        matches!(
            self,
            ModelVariant::VarsGlobal
                | ModelVariant::ViewsStaticGlobal
                | ModelVariant::ViewsDynamicGlobal
        )
    }

    /// The view dispatch mode, or None for the auxiliary-variable variants.
    pub fn dispatch(&self) -> Option<DispatchMode> {
        match self {
            ModelVariant::Vars | ModelVariant::VarsGlobal => None,
            ModelVariant::ViewsStatic | ModelVariant::ViewsStaticGlobal => {
                Some(DispatchMode::Static)
            }
            ModelVariant::ViewsDynamic | ModelVariant::ViewsDynamicGlobal => {
                Some(DispatchMode::Dynamic)
            }
        }
    }
}

/// Distance measure for the error-correcting-codes family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Hamming,
    Lee,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Hamming => "hamming",
            Metric::Lee => "lee",
        }
    }
}

/// One benchmark instance description.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InstanceSpec {
    /// Random system of linear equations <n, d, c, a, seed>.
    Linear { n: usize, d: i64, c: usize, a: usize, seed: u64 },
    /// Random system of nonlinear equations <n, d, c, a1, a2, seed>.
    Nonlinear { n: usize, d: i64, c: usize, a1: usize, a2: usize, seed: u64 },
    /// Social golfers <w, g, s>.
    Golfers { w: usize, g: usize, s: usize },
    /// Golomb ruler decision problem <m, length>.
    Golomb { m: usize, length: i64 },
    /// Low-autocorrelation binary sequences, minimizing the energy.
    Labs { n: usize },
    /// Fixed-length error correcting codes <a, n, l, d, metric>.
    Ecc { a: i64, n: usize, l: usize, d: i64, metric: Metric },
}

impl InstanceSpec {
    pub fn id(&self) -> String {
        match self {
            InstanceSpec::Linear { n, d, c, a, seed } => format!("linear-{n}-{d}-{c}-{a}-s{seed}"),
            InstanceSpec::Nonlinear { n, d, c, a1, a2, seed } => {
                format!("nonlinear-{n}-{d}-{c}-{a1}-{a2}-s{seed}")
            }
            InstanceSpec::Golfers { w, g, s } => format!("golfers-{w}-{g}-{s}"),
            InstanceSpec::Golomb { m, length } => format!("golomb-{m}-{length}"),
            InstanceSpec::Labs { n } => format!("labs-{n}"),
            InstanceSpec::Ecc { a, n, l, d, metric } => {
                format!("ecc-{}-{a}-{n}-{l}-{d}", metric.name())
            }
        }
    }

    pub fn problem(&self) -> &'static str {
        match self {
            InstanceSpec::Linear { .. } => "linear",
            InstanceSpec::Nonlinear { .. } => "nonlinear",
            InstanceSpec::Golfers { .. } => "golfers",
            InstanceSpec::Golomb { .. } => "golomb",
            InstanceSpec::Labs { .. } => "labs",
            InstanceSpec::Ecc { .. } => "ecc",
        }
    }

    /// True when the problem is an optimization (branch-and-bound) run.
    pub fn is_optimization(&self) -> bool {
        matches!(self, InstanceSpec::Labs { .. })
    }

    /// The variants this model supports. Global forms exist only where the
    /// family pairs naturally with a global propagator.
    pub fn allowed_variants(&self) -> Vec<ModelVariant> {
        match self {
            InstanceSpec::Labs { .. } => vec![
                ModelVariant::Vars,
                ModelVariant::VarsGlobal,
                ModelVariant::ViewsStatic,
                ModelVariant::ViewsDynamic,
            ],
            _ => ModelVariant::ALL.to_vec(),
        }
    }

    pub fn build(&self, variant: ModelVariant, opts: &BuildOptions) -> Result<BuiltModel> {
        if !self.allowed_variants().contains(&variant) {
            return Err(Error::UnsupportedVariant(format!(
                "{} does not support {}",
                self.problem(),
                variant.name()
            )));
        }
        match self {
            InstanceSpec::Linear { n, d, c, a, seed } => {
                linear::build(*n, *d, *c, *a, *seed, variant, opts)
            }
            InstanceSpec::Nonlinear { n, d, c, a1, a2, seed } => {
                nonlinear::build(*n, *d, *c, *a1, *a2, *seed, variant, opts)
            }
            InstanceSpec::Golfers { w, g, s } => golfers::build(*w, *g, *s, variant, opts),
            InstanceSpec::Golomb { m, length } => golomb::build(*m, *length, variant, opts),
            InstanceSpec::Labs { n } => labs::build(*n, variant, opts),
            InstanceSpec::Ecc { a, n, l, d, metric } => {
                ecc::build(*a, *n, *l, *d, *metric, variant, opts)
            }
        }
    }
}

/// Build-time knobs that are not part of the instance identity.
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Shape of binary-sum folds in decompositions.
    pub chain: ChainShape,
    /// Share the repeated |x-y| subexpression of the Lee distance within
    /// each distance constraint of the auxiliary-variable models (the
    /// classical four-auxiliaries-per-position decomposition). Sharing
    /// never happens across constraints or in any other model.
    pub share_lee: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { chain: ChainShape::LeftChain, share_lee: true }
    }
}

impl BuildOptions {
    pub(crate) fn decompose(&self) -> DecomposeOptions {
        DecomposeOptions { chain: self.chain }
    }
}

/// A model posted into a fresh store.
pub struct BuiltModel {
    pub store: Store,
    pub decision_vars: Vec<VarId>,
    pub objective: Option<AnyView>,
    /// Textual model dump: variables, constraints in canonical prefix form,
    /// and the objective if any. Identical across variants.
    pub dump: String,
    pub aux_vars: usize,
}

/// Portable deterministic generator: a 64-bit linear congruential generator,
/// output taken from the high 32 bits of the state.
#[derive(Clone, Debug)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    const MUL: u64 = 6364136223846793005;
    const INC: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> SeededRng {
        SeededRng { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(Self::MUL).wrapping_add(Self::INC);
        (self.state >> 32) as u32
    }

    /// Uniform-ish value in `[lo..hi]` (modulo reduction; the tiny bias is
    /// irrelevant next to the portability requirement).
    pub fn next_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u32() as u64 % span) as i64
    }

    /// A k-subset of 0..n, uniform over sorted combinations by rejection.
    pub fn combination(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        loop {
            let mut pick: Vec<usize> =
                (0..k).map(|_| self.next_u32() as usize % n).collect();
            pick.sort_unstable();
            pick.dedup();
            if pick.len() == k {
                return pick;
            }
        }
    }
}

/// Shared builder scaffolding: tracks decision variables and accumulates the
/// canonical dump while posting relations per variant.
pub(crate) struct ModelCtx {
    pub store: Store,
    pub decision: Vec<VarId>,
    dump_vars: Vec<String>,
    dump_cons: Vec<String>,
    pub aux_vars: usize,
}

impl ModelCtx {
    pub fn new() -> ModelCtx {
        ModelCtx {
            store: Store::new(),
            decision: Vec::new(),
            dump_vars: Vec::new(),
            dump_cons: Vec::new(),
            aux_vars: 0,
        }
    }

    pub fn var(&mut self, name: &str, lo: i64, hi: i64) -> Result<VarId> {
        let v = self.store.new_var_named(name, lo, hi)?;
        self.decision.push(v);
        self.dump_vars.push(format!("var {name} {lo} {hi}"));
        Ok(v)
    }

    fn render(&self, rel: &Relation) -> String {
        let dom = self.store.dom();
        rel.to_prefix(&|v| dom.name(v).to_string())
    }

    /// Records a constraint in the dump without posting it (for builders
    /// that post a hand-shaped decomposition themselves).
    pub fn dump_relation(&mut self, rel: &Relation) {
        let line = self.render(rel);
        self.dump_cons.push(line);
    }

    /// Posts a constraint under the decomposition variant being measured.
    pub fn relation(
        &mut self,
        rel: &Relation,
        variant: ModelVariant,
        opts: &BuildOptions,
    ) -> Result<()> {
        self.dump_cons.push(self.render(rel));
        let d = post_decomposed(&mut self.store, rel, variant, &opts.decompose())?;
        self.aux_vars += d.aux_vars.len();
        Ok(())
    }

    /// Posts a constraint in the fixed form shared by all variants
    /// (orderings, symmetry breaking).
    pub fn fixed(&mut self, rel: &Relation) -> Result<()> {
        self.dump_cons.push(self.render(rel));
        post_fixed(&mut self.store, rel)
    }

    pub fn finish(self, objective: Option<(String, AnyView)>) -> BuiltModel {
        let mut dump = String::new();
        for l in &self.dump_vars {
            dump.push_str(l);
            dump.push('\n');
        }
        for l in &self.dump_cons {
            dump.push_str(l);
            dump.push('\n');
        }
        let objective = match objective {
            Some((line, view)) => {
                dump.push_str(&format!("minimize {line}\n"));
                Some(view)
            }
            None => None,
        };
        BuiltModel {
            store: self.store,
            decision_vars: self.decision,
            objective,
            dump,
            aux_vars: self.aux_vars,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_deterministic_and_stable() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        let xs: Vec<u32> = (0..8).map(|_| a.next_u32()).collect();
        let ys: Vec<u32> = (0..8).map(|_| b.next_u32()).collect();
        assert_eq!(xs, ys);
        // frozen first output for seed 42 pins the exact generator
        assert_eq!(xs[0], 2440530669);
    }

    #[test]
    fn combinations_are_sorted_distinct() {
        let mut rng = SeededRng::new(7);
        for _ in 0..200 {
            let c = rng.combination(10, 4);
            assert_eq!(c.len(), 4);
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert!(c.iter().all(|&i| i < 10));
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ModelVariant::ALL {
            assert_eq!(ModelVariant::parse(v.name()), Some(v));
        }
        assert_eq!(ModelVariant::parse("nope"), None);
    }
}
