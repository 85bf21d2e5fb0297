use vilenkin::group::Interval;
use vilenkin::hardy::{dyadic_atom, make_random_atom, PAtom};
use vilenkin::lab::suites::{maximal_suite, random_signal, strong_suite, AtomGrid};
use vilenkin::par::Execution;
use vilenkin::summability::WeightKind;
use vilenkin::transform::{transform_batch_with, transform_fast_with};
use vilenkin::{GroupSpec, Signal};

fn small_grid() -> AtomGrid {
    AtomGrid { levels: vec![3, 4], ps: vec![0.4, 0.5], atoms: 6, seed: 9, cap_factor: 2 }
}

#[test]
fn execution_modes_agree() {
    let spec = GroupSpec::new(vec![3, 4, 5, 2]).unwrap();
    let signals: Vec<Signal> = (0..4).map(|i| random_signal(&spec, 3, i)).collect();
    let seq = transform_batch_with(Execution::Sequential, &signals);
    let def = transform_batch_with(Execution::default(), &signals);
    for (a, b) in seq.iter().zip(&def) {
        assert_eq!(a.as_slice(), b.as_slice());
    }
    let one = transform_fast_with(Execution::default(), &signals[0]);
    assert_eq!(one.as_slice(), seq[0].as_slice());
}

#[test]
fn signal_and_atom_json_round_trip() {
    let spec = GroupSpec::new(vec![2, 3, 2]).unwrap();
    let f = random_signal(&spec, 1, 0);
    let back = Signal::from_json(&spec, &f.to_json()).unwrap();
    assert_eq!(back.as_slice(), f.as_slice());

    let atom = make_random_atom(&spec, 0.5, 1, 42).unwrap();
    let again = PAtom::from_json(&spec, &atom.to_json()).unwrap();
    assert_eq!(again.values().as_slice(), atom.values().as_slice());
    assert_eq!(again.support(), atom.support());
}

#[test]
fn dyadic_atom_has_extremal_sup() {
    let spec = GroupSpec::walsh(5).unwrap();
    let support = Interval::at_zero(&spec, 2).unwrap();
    let a = dyadic_atom(&spec, 0.5, &support).unwrap();
    let expected = (spec.big_m(2) as f64).powf(2.0);
    assert!((a.values().max_abs() - expected).abs() < 1e-9);
}

#[test]
fn experiments_are_deterministic() {
    let grid = small_grid();
    let fams = [WeightKind::Fejer, WeightKind::U { alpha: 0.5 }];
    let a = maximal_suite(&grid, &fams).unwrap();
    let b = maximal_suite(&grid, &fams).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let s1 = strong_suite(&grid, &fams).unwrap();
    let s2 = strong_suite(&grid, &fams).unwrap();
    assert_eq!(serde_json::to_string(&s1).unwrap(), serde_json::to_string(&s2).unwrap());
    assert_eq!(a.len(), grid.levels.len() * grid.ps.len() * fams.len());
}
