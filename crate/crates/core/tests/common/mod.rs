//! Shared test support: random instance generation and independently coded
//! oracles. The oracles deliberately re-derive everything from the raw
//! definitions with their own quantifier loops, so they share no code with
//! the implementation paths they cross-check.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;

use rlz_core::instance::{Instance, InstanceDoc};
use rlz_core::paks::{saturate_pole, FinitePaks};
use rlz_core::rl::{PushTable, RealizabilityLattice, StackSet, TermSet};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_fixture(name: &str) -> Instance {
    let path = fixture_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    InstanceDoc::parse(&text)
        .unwrap_or_else(|e| panic!("parsing {name}: {e}"))
        .to_instance()
        .unwrap_or_else(|e| panic!("building {name}: {e}"))
}

/// Names of the committed structure fixtures, smallest first.
pub const FIXTURE_NAMES: &[&str] = &[
    "unit_full.json",
    "unit_empty.json",
    "pair_empty.json",
    "saturated_a.json",
    "saturated_b.json",
    "saturated_c.json",
];

/// The pinned fixture used wherever a single nontrivial algebra is needed.
pub const NONTRIVIAL_FIXTURE: &str = "saturated_a.json";

pub fn load_all_fixtures() -> Vec<(String, Instance)> {
    FIXTURE_NAMES
        .iter()
        .map(|name| (name.to_string(), load_fixture(name)))
        .collect()
}

// ---------------------------------------------------------------------------
// Random generation.

pub fn random_rl(rng: &mut impl Rng, max_terms: usize, max_stacks: usize) -> RealizabilityLattice {
    let nt = rng.gen_range(1..=max_terms);
    let ns = rng.gen_range(1..=max_stacks);
    let density: f64 = rng.gen_range(0.0..=1.0);
    let mut pole = Vec::new();
    for t in 0..nt {
        for s in 0..ns {
            if rng.gen_bool(density) {
                pole.push((t, s));
            }
        }
    }
    RealizabilityLattice::with_sizes(nt, ns, &pole).unwrap()
}

pub struct RawTables {
    pub app: Vec<Vec<usize>>,
    pub push: PushTable,
    pub save: Vec<usize>,
    pub k: usize,
    pub s: usize,
    pub cc: usize,
}

pub fn random_tables(rng: &mut impl Rng, nt: usize, ns: usize) -> RawTables {
    let app = (0..nt)
        .map(|_| (0..nt).map(|_| rng.gen_range(0..nt)).collect())
        .collect();
    let push_rows: Vec<Vec<usize>> = (0..nt)
        .map(|_| (0..ns).map(|_| rng.gen_range(0..ns)).collect())
        .collect();
    let save = (0..ns).map(|_| rng.gen_range(0..nt)).collect();
    RawTables {
        app,
        push: PushTable::new(push_rows, nt, ns).unwrap(),
        save,
        k: rng.gen_range(0..nt),
        s: rng.gen_range(0..nt),
        cc: rng.gen_range(0..nt),
    }
}

/// Fully random structure; almost always fails the axioms. Used to compare
/// the axiom sweep against the oracle.
pub fn random_paks_raw(rng: &mut impl Rng, max_size: usize) -> FinitePaks {
    let nt = rng.gen_range(1..=max_size);
    let ns = rng.gen_range(1..=max_size);
    let tables = random_tables(rng, nt, ns);
    let density: f64 = rng.gen_range(0.0..=1.0);
    let mut pole = Vec::new();
    for t in 0..nt {
        for s in 0..ns {
            if rng.gen_bool(density) {
                pole.push((t, s));
            }
        }
    }
    let rl = RealizabilityLattice::with_sizes(nt, ns, &pole).unwrap();
    FinitePaks::new(
        rl,
        tables.app,
        tables.push,
        tables.save,
        tables.k,
        tables.s,
        tables.cc,
    )
    .unwrap()
}

/// Random tables with a random seed pole saturated under the axiom
/// consequences; always valid.
pub fn random_paks_saturated(
    rng: &mut impl Rng,
    nt: usize,
    ns: usize,
    seed_len: usize,
) -> FinitePaks {
    let tables = random_tables(rng, nt, ns);
    saturate_tables(rng, tables, nt, ns, seed_len)
}

/// Like [`random_paks_saturated`] but with per-term push styles (identity,
/// constant, shift, random) and a biased application image. Structured push
/// rows keep the saturated pole rows partial, which is what produces algebra
/// carriers beyond the two-point lattice.
pub fn random_paks_structured(
    rng: &mut impl Rng,
    nt: usize,
    ns: usize,
    seed_len: usize,
) -> FinitePaks {
    let app = (0..nt)
        .map(|_| {
            (0..nt)
                .map(|_| rng.gen_range(0..nt.max(2)) % nt)
                .collect()
        })
        .collect();
    let push_rows: Vec<Vec<usize>> = (0..nt)
        .map(|_| {
            let style = rng.gen_range(0..4);
            let c = rng.gen_range(0..ns);
            (0..ns)
                .map(|pi| match style {
                    0 => pi,
                    1 => c,
                    2 => (pi + c) % ns,
                    _ => rng.gen_range(0..ns),
                })
                .collect()
        })
        .collect();
    let save = (0..ns).map(|_| rng.gen_range(0..nt)).collect();
    let tables = RawTables {
        app,
        push: PushTable::new(push_rows, nt, ns).unwrap(),
        save,
        k: rng.gen_range(0..nt),
        s: rng.gen_range(0..nt),
        cc: rng.gen_range(0..nt),
    };
    saturate_tables(rng, tables, nt, ns, seed_len)
}

/// Structured generator aimed at rich closed-set lattices: stacks are split
/// into layered components, pushes act as saturating shifts within the
/// component of the stack, and the seed pole lives in the first component.
/// Stacks in later components that no row reaches keep the filter proper.
pub fn random_paks_layered(rng: &mut impl Rng, nt: usize, ns: usize) -> FinitePaks {
    let comp_count = rng.gen_range(1..=2.min(ns));
    let split = if comp_count == 2 {
        rng.gen_range(1..ns)
    } else {
        ns
    };
    let comp_top = |pi: usize| if pi < split { split - 1 } else { ns - 1 };
    let push_rows: Vec<Vec<usize>> = (0..nt)
        .map(|_| {
            let hop = rng.gen_range(0..=1usize);
            (0..ns).map(|pi| (pi + hop).min(comp_top(pi))).collect()
        })
        .collect();
    let app = (0..nt)
        .map(|_| (0..nt).map(|_| rng.gen_range(0..nt)).collect())
        .collect();
    let save = (0..ns).map(|_| rng.gen_range(0..nt)).collect();
    let tables = RawTables {
        app,
        push: PushTable::new(push_rows, nt, ns).unwrap(),
        save,
        k: rng.gen_range(0..nt),
        s: rng.gen_range(0..nt),
        cc: rng.gen_range(0..nt),
    };
    let seed_len = rng.gen_range(1..=2);
    let seed: Vec<(usize, usize)> = (0..seed_len)
        .map(|_| (rng.gen_range(0..nt), rng.gen_range(0..split)))
        .collect();
    let pole = saturate_pole(
        nt, ns, &tables.app, &tables.push, &tables.save, tables.k, tables.s, tables.cc, &seed,
    );
    let rl = RealizabilityLattice::with_sizes(nt, ns, &pole).unwrap();
    FinitePaks::new(
        rl,
        tables.app,
        tables.push,
        tables.save,
        tables.k,
        tables.s,
        tables.cc,
    )
    .unwrap()
}

/// Hand-built valid structure: terms carry a rank, application decrements
/// the rank, push is a saturating shift on a chain of stacks, and the pole
/// relates a term to every stack at or above its rank. All five axioms and
/// the strong converse hold; the derived algebra is a four-element chain.
pub fn rank_chain_paks() -> FinitePaks {
    let nt = 4;
    let ns = 4;
    let rank = [3usize, 2, 1, 0];
    let names = ["A", "B", "C", "Z"];
    let term_names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let stack_names: Vec<String> = (0..ns).map(|i| format!("p{i}")).collect();
    let mut pole = Vec::new();
    for t in 0..nt {
        for pi in 0..ns {
            if pi >= rank[t] {
                pole.push((t, pi));
            }
        }
    }
    let rl = RealizabilityLattice::new(term_names, stack_names, &pole).unwrap();
    let app: Vec<Vec<usize>> = (0..nt)
        .map(|t| vec![(t + 1).min(nt - 1); nt])
        .collect();
    let push_rows: Vec<Vec<usize>> = (0..nt)
        .map(|_| (0..ns).map(|pi| (pi + 1).min(ns - 1)).collect())
        .collect();
    let push = PushTable::new(push_rows, nt, ns).unwrap();
    // K has rank 2 (index 1), S rank 3 (index 0), cc and saves rank 1.
    FinitePaks::new(rl, app, push, vec![2; ns], 1, 0, 2).unwrap()
}

fn saturate_tables(
    rng: &mut impl Rng,
    tables: RawTables,
    nt: usize,
    ns: usize,
    seed_len: usize,
) -> FinitePaks {
    let seed: Vec<(usize, usize)> = (0..seed_len)
        .map(|_| (rng.gen_range(0..nt), rng.gen_range(0..ns)))
        .collect();
    let pole = saturate_pole(
        nt, ns, &tables.app, &tables.push, &tables.save, tables.k, tables.s, tables.cc, &seed,
    );
    let rl = RealizabilityLattice::with_sizes(nt, ns, &pole).unwrap();
    FinitePaks::new(
        rl,
        tables.app,
        tables.push,
        tables.save,
        tables.k,
        tables.s,
        tables.cc,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Oracles.

/// Perpendicularity from the raw definition, iterating stacks outermost.
pub fn oracle_perp_of_terms(rl: &RealizabilityLattice, terms: TermSet) -> StackSet {
    let mut out = StackSet::EMPTY;
    for pi in 0..rl.stack_count() {
        let mut all = true;
        for t in 0..rl.term_count() {
            if terms.contains(t) && !rl.in_pole(t, pi) {
                all = false;
            }
        }
        if all {
            out.insert(pi);
        }
    }
    out
}

pub fn oracle_perp_of_stacks(rl: &RealizabilityLattice, stacks: StackSet) -> TermSet {
    let mut out = TermSet::EMPTY;
    for t in 0..rl.term_count() {
        let mut all = true;
        for pi in 0..rl.stack_count() {
            if stacks.contains(pi) && !rl.in_pole(t, pi) {
                all = false;
            }
        }
        if all {
            out.insert(t);
        }
    }
    out
}

/// All closed stack sets by closing every subset, as raw sorted bitsets.
pub fn oracle_closed_sets(rl: &RealizabilityLattice) -> Vec<u64> {
    assert!(rl.stack_count() <= 20, "oracle is exponential");
    let mut out: Vec<u64> = (0u64..(1 << rl.stack_count()))
        .map(|bits| {
            oracle_perp_of_terms(rl, oracle_perp_of_stacks(rl, StackSet(bits))).0
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Independently coded axiom verdicts `[S1, S2, S3, S4, S5, strong-S1,
/// S-eta]`: full sweeps, stacks outermost, implications written pointwise.
pub fn oracle_axiom_flags(p: &FinitePaks) -> [bool; 7] {
    let rl = p.rl();
    let nt = rl.term_count();
    let ns = rl.stack_count();
    let pole = |t: usize, pi: usize| rl.in_pole(t, pi);

    let mut s1 = true;
    let mut strong = true;
    for pi in 0..ns {
        for s in 0..nt {
            for t in 0..nt {
                let lhs = pole(t, p.push(s, pi));
                let rhs = pole(p.app(t, s), pi);
                s1 &= !lhs || rhs;
                strong &= !rhs || lhs;
            }
        }
    }

    let mut s2 = true;
    for pi in 0..ns {
        for s in 0..nt {
            for t in 0..nt {
                s2 &= !pole(t, pi) || pole(p.k(), p.push(t, p.push(s, pi)));
            }
        }
    }

    let mut s3 = true;
    for pi in 0..ns {
        for u in 0..nt {
            for s in 0..nt {
                for t in 0..nt {
                    let lhs = pole(p.app(p.app(t, u), p.app(s, u)), pi);
                    let rhs = pole(p.s(), p.push(t, p.push(s, p.push(u, pi))));
                    s3 &= !lhs || rhs;
                }
            }
        }
    }

    let mut s4 = true;
    for pi in 0..ns {
        for t in 0..nt {
            s4 &= !pole(t, p.push(p.save(pi), pi)) || pole(p.cc(), p.push(t, pi));
        }
    }

    let mut s5 = true;
    for pi2 in 0..ns {
        for pi in 0..ns {
            for t in 0..nt {
                s5 &= !pole(t, pi) || pole(p.save(pi), p.push(t, pi2));
            }
        }
    }

    let e = p.combinator_e();
    let mut eta = true;
    for pi in 0..ns {
        for s in 0..nt {
            for t in 0..nt {
                eta &= !pole(p.app(t, s), pi) || pole(p.app(e, t), p.push(s, pi));
            }
        }
    }

    [s1, s2, s3, s4, s5, strong, eta]
}
