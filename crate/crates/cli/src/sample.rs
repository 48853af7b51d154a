//! Monte Carlo execution. Runs are driven by a ChaCha8 generator seeded
//! from the command line, so a fixed seed reproduces the same counts.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapework::lang::{erase, Expr};
use tapework::semantics::{step, Config};
use tapework::Prob;

pub const STUCK: &str = "<stuck>";
pub const UNFINISHED: &str = "<unfinished>";

/// Draws one successor of `rho`, or `None` when it cannot step.
fn draw(rho: &Config, rng: &mut ChaCha8Rng) -> Option<Config> {
    let d = step::<Prob>(rho);
    let mut remaining = d.mass();
    for (next, w) in d.iter() {
        // Take `next` with probability w / remaining.
        let p = w / &remaining;
        let (num, den) = (p.numer().to_u64()?, p.denom().to_u64()?);
        if rng.random_range(0..den) < num {
            return Some(next.clone());
        }
        remaining -= w;
    }
    None
}

fn run_once(e: &Expr, depth: usize, rng: &mut ChaCha8Rng) -> String {
    let mut rho = Config::initial(e.clone());
    for _ in 0..depth {
        if rho.is_value() {
            break;
        }
        match draw(&rho, rng) {
            Some(next) => rho = next,
            None => return STUCK.to_string(),
        }
    }
    if rho.is_value() {
        erase(&rho.expr).to_string()
    } else {
        UNFINISHED.to_string()
    }
}

/// Outcome counts over `samples` independent runs of at most `depth` steps.
pub fn run(e: &Expr, samples: u64, seed: u64, depth: usize) -> BTreeMap<String, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        *counts.entry(run_once(e, depth, &mut rng)).or_insert(0) += 1;
    }
    counts
}
