//! Any cost surface can drive the searches through `CostSource`. Here an
//! elongated valley with a three-pixel flat floor shows which floor point
//! each search settles on, and how many points it pays to get there.

use blockmatch::{AlgorithmId, CostProbe, CostSource, Matcher, MotionVector};

struct Valley {
    target: MotionVector,
}

impl CostSource for Valley {
    fn admits(&self, _mv: MotionVector) -> bool {
        true
    }

    fn cost(&self, mv: MotionVector) -> u64 {
        let ex = (mv.dx - self.target.dx).unsigned_abs() as u64;
        let ey = (mv.dy - self.target.dy).unsigned_abs() as u64;
        // Cheap along x, steep along y, flat inside a 1-pixel plateau.
        (ex.saturating_sub(1)) + 9 * ey
    }
}

pub fn run() -> Vec<(AlgorithmId, MotionVector, u64, usize)> {
    let target = MotionVector::new(-4, 3);
    AlgorithmId::ALL
        .into_iter()
        .map(|id| {
            let mut probe = CostProbe::new(Valley { target }, 6, false);
            let r = Matcher::new(id).search(&mut probe);
            (id, r.vector, r.cost, r.points)
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    for (id, mv, cost, points) in run() {
        println!("{:<20} {:>8} cost {:>3} after {:>3} points", id.label(), mv.to_string(), cost, points);
    }
}
