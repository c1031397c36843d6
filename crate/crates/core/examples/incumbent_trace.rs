//! Prints the incumbent path of the modified conjugate direction search on
//! a bowl centred at (2,6), with and without its two variations.

use blockmatch::{AlgorithmId, CostProbe, DistanceCost, MatchResult, Matcher, ModConjOptions};

pub fn run() -> Vec<(String, MatchResult)> {
    let variants = [(false, false), (true, false), (false, true), (true, true)];
    variants
        .into_iter()
        .map(|(variation1, variation2)| {
            let matcher = Matcher::with_options(
                AlgorithmId::ModifiedConjugate,
                ModConjOptions {
                    variation1,
                    variation2,
                    full_cda: false,
                },
            );
            let mut probe = CostProbe::new(DistanceCost::new((2, 6)), 6, false);
            let result = matcher.search(&mut probe);
            (matcher.label(), result)
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    for (label, r) in run() {
        let path: Vec<String> = r.path.iter().map(ToString::to_string).collect();
        println!(
            "{label:<26} -> {} in {} points / {} steps: {}",
            r.vector,
            r.points,
            r.steps,
            path.join(" -> ")
        );
    }
}
