//! Depth debate: the provers walk the normalized circuit from the root,
//! Prover 0 choosing at AND levels and Prover 1 at OR levels; the verifier
//! follows the selector bits and reads the literal it lands on.

use std::sync::Arc;

use crate::circuit::{Kind, NRef, NormalizedCircuit};
use crate::debate::{
    memo_get, memo_set, Ask, DebateSystem, IndexSpace, Memo, Pending, Probe, ProverStrategy,
    QueryLogic, Scripted, View,
};
use crate::error::{Error, Result};

struct KwLogic {
    nc: Arc<NormalizedCircuit>,
    space: IndexSpace,
}

impl QueryLogic for KwLogic {
    fn space(&self) -> IndexSpace {
        self.space
    }

    fn ell_bound(&self) -> usize {
        self.nc.depth() + 1
    }

    fn decide(&self, p: &Probe<'_>) -> Result<bool, Ask> {
        let mut node = self.nc.root();
        let mut level = 0;
        loop {
            let pick = p.read(self.space.n + level)?;
            match self.nc.nodes()[node].ops[pick as usize] {
                NRef::Lit { var, positive } => return Ok(p.read(var)? == positive),
                NRef::Node(c) => {
                    node = c;
                    level += 1;
                }
            }
        }
    }
}

struct KwProver {
    nc: Arc<NormalizedCircuit>,
    role: usize,
}

struct NodeValues(Vec<bool>);

impl ProverStrategy for KwProver {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        if memo_get::<NodeValues>(memo).is_none() {
            memo_set(memo, NodeValues(self.nc.node_values(view.x())));
        }
        let values = &memo_get::<NodeValues>(memo).unwrap().0;
        let mut node = self.nc.root();
        for t in 0..view.position() {
            let pick = view.read(t)?;
            match self.nc.nodes()[node].ops[pick as usize] {
                NRef::Lit { .. } => return Ok(false),
                NRef::Node(c) => node = c,
            }
        }
        let n = self.nc.nodes()[node];
        debug_assert_eq!(n.kind == Kind::And, self.role == 0);
        // Prover 0 wants a child of value 0, Prover 1 one of value 1.
        let want = self.role == 1;
        let value = |r: NRef| crate::circuit::nref_value(r, view.x(), values);
        Ok(value(n.ops[0]) != want && value(n.ops[1]) == want)
    }
}

/// Builds the depth debate over a normalized circuit of depth `d`:
/// `k = ⌈d/2⌉` rounds, at most `d + 1` probes.
pub fn build_kw_debate(nc: &NormalizedCircuit) -> Result<DebateSystem> {
    if !nc.is_alternating() {
        return Err(Error::Precondition(
            "circuit is not leveled and alternating with an AND root".into(),
        ));
    }
    let nc = Arc::new(nc.clone());
    let n = nc.n_inputs();
    let k = nc.depth().div_ceil(2);
    let space = IndexSpace::new(n, k);
    let verifier = Arc::new(Scripted(KwLogic {
        nc: nc.clone(),
        space,
    }));
    let strategies: [Arc<dyn ProverStrategy>; 2] = [
        Arc::new(KwProver {
            nc: nc.clone(),
            role: 0,
        }),
        Arc::new(KwProver { nc, role: 1 }),
    ];
    DebateSystem::new(n, k, strategies, verifier, "kw")
}
