use blockmatch::{
    estimate_field, generate_displaced_star, generate_star, AlgorithmId, Frame, MotionVector,
    SearchConfig, StarSpec,
};

/// 4-connected black components with their pixel counts.
fn black_components(f: &Frame) -> Vec<usize> {
    let (w, h) = (f.width(), f.height());
    let mut seen = vec![false; w * h];
    let mut sizes = Vec::new();
    for start in 0..w * h {
        if seen[start] || f.pixels()[start] != 0 {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut push = |j: usize| {
                if !seen[j] && f.pixels()[j] == 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                push(i - 1);
            }
            if x + 1 < w {
                push(i + 1);
            }
            if y > 0 {
                push(i - w);
            }
            if y + 1 < h {
                push(i + w);
            }
        }
        sizes.push(size);
    }
    sizes
}

fn black_runs(row: &[u8]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (x, &p) in row.iter().enumerate() {
        match (p == 0, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                runs.push((s, x - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, row.len() - 1));
    }
    runs
}

#[test]
fn default_star_is_57_separate_squares() {
    let star = generate_star(&StarSpec::default()).unwrap();
    let comps = black_components(&star);
    assert_eq!(comps.len(), 57);
    assert!(comps.iter().all(|&c| c == 256));
    assert!(star.pixels().iter().all(|&p| p == 0 || p == 255));
}

#[test]
fn pitch_equal_to_square_gives_solid_bars() {
    let spec = StarSpec {
        pitch: 16,
        ..StarSpec::default()
    };
    let star = generate_star(&spec).unwrap();
    assert_eq!(black_runs(star.row(256)), vec![(8, 503)]);
    let column: Vec<u8> = (0..512).map(|y| star.get(256, y)).collect();
    assert_eq!(black_runs(&column), vec![(8, 503)]);
}

#[test]
fn displaced_squares_shift_outward() {
    let spec = StarSpec::default();
    let star = generate_star(&spec).unwrap();
    let disp = generate_displaced_star(&spec).unwrap();
    let runs_s = black_runs(star.row(256));
    let runs_d = black_runs(disp.row(256));
    // Runs ordered left to right: -x ray k=7..1, centre, +x ray k=1..7.
    assert_eq!(runs_s.len(), 15);
    assert_eq!(runs_d.len(), 15);
    // Centre and both k=1 squares are untouched.
    for i in 6..=8 {
        assert_eq!(runs_s[i], runs_d[i]);
    }
    // +x ray square k=4 moved right by 3.
    assert_eq!(runs_d[7 + 4].0 - runs_s[7 + 4].0, 3);
    // -x ray square k=4 moved left by 3.
    assert_eq!(runs_s[7 - 4].0 - runs_d[7 - 4].0, 3);
    for (k, (s, d)) in runs_s[8..].iter().zip(&runs_d[8..]).enumerate() {
        let shift = d.0 - s.0;
        assert_eq!(shift, k.min(7));
        assert!(shift <= 7);
    }
}

#[test]
fn shift_schedule_stays_in_range() {
    let spec = StarSpec::default();
    for sq in spec.squares(true).unwrap() {
        assert!(sq.shift.0.abs() <= 7 && sq.shift.1.abs() <= 7);
        if let Some((ux, uy)) = sq.ray {
            let d = sq.index.saturating_sub(1).min(7) as i64;
            assert_eq!(sq.shift, (ux * d, uy * d));
        }
    }
}

#[test]
fn displaced_star_differs_only_inside_footprints() {
    let spec = StarSpec::default();
    let star = generate_star(&spec).unwrap();
    let disp = generate_displaced_star(&spec).unwrap();
    let mut footprint = vec![false; 512 * 512];
    for sq in spec
        .squares(false)
        .unwrap()
        .into_iter()
        .chain(spec.squares(true).unwrap())
    {
        let (ox, oy) = sq.origin;
        for y in oy..oy + 16 {
            for x in ox..ox + 16 {
                footprint[y * 512 + x] = true;
            }
        }
    }
    for (i, (a, b)) in star.pixels().iter().zip(disp.pixels()).enumerate() {
        if a != b {
            assert!(footprint[i], "pixel {i} differs outside any square");
        }
    }
}

type PixelMap = fn(usize, usize, usize) -> (usize, usize);

fn transform(f: &Frame, map: impl Fn(usize, usize, usize) -> (usize, usize)) -> Frame {
    let n = f.width();
    Frame::from_fn(n, n, |x, y| {
        let (sx, sy) = map(x, y, n);
        f.get(sx, sy)
    })
    .unwrap()
}

#[test]
fn star_has_dihedral_symmetry() {
    let spec = StarSpec::default();
    for frame in [generate_star(&spec).unwrap(), generate_displaced_star(&spec).unwrap()] {
        let ops: [PixelMap; 4] = [
            |x, y, _| (y, x),
            |x, y, n| (n - 1 - x, y),
            |x, y, n| (x, n - 1 - y),
            |x, y, n| (n - 1 - y, x),
        ];
        for op in ops {
            assert_eq!(transform(&frame, op), frame);
        }
    }
}

#[test]
fn full_search_recovers_the_displacement_schedule() {
    // With a 496 px image the squares sit exactly on the 16 px block grid.
    let spec = StarSpec {
        image_size: 496,
        ..StarSpec::default()
    };
    let star = generate_star(&spec).unwrap();
    let disp = generate_displaced_star(&spec).unwrap();
    let config = SearchConfig {
        dm: 7,
        ..SearchConfig::default()
    };
    let field = estimate_field(&star, &disp, &config, AlgorithmId::FullSearch).unwrap();
    let squares = spec.squares(false).unwrap();
    let moved = spec.squares(true).unwrap();
    let mut checked = 0;
    for (sq, m) in squares.iter().zip(&moved) {
        assert_eq!((sq.ray, sq.index), (m.ray, m.index));
        let (ox, oy) = sq.origin;
        assert_eq!((ox % 16, oy % 16), (0, 0));
        let e = field.get(ox / 16, oy / 16);
        assert_eq!(
            e.vector,
            MotionVector::new(m.shift.0 as i32, m.shift.1 as i32),
            "square {:?} #{}",
            sq.ray,
            sq.index
        );
        assert_eq!(e.cost, 0);
        checked += 1;
    }
    assert!(checked > 50);
}
