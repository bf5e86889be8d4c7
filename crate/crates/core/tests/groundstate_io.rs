//! Ground-state files, frequency rescaling, resampling and input readers.

use std::io::BufReader;
use std::sync::{Arc, OnceLock};

use approx::assert_relative_eq;

use nlslab::classifier::{classify, Membership};
use nlslab::families::{random_profiles, read_tabulated, Profile};
use nlslab::groundstate::{read_groundstate, rescale_omega, shoot, write_groundstate, GroundStateSolution, ShootOptions};
use nlslab::model::{Geometry, Grid, ModelParams};
use nlslab::Error;

fn grid(n: usize) -> Arc<Grid> {
    Arc::new(Grid::new(Geometry::Radial, 20.0, n, 3).unwrap())
}

fn q() -> &'static GroundStateSolution {
    static Q: OnceLock<GroundStateSolution> = OnceLock::new();
    Q.get_or_init(|| {
        let mp = ModelParams::new(3, 3.0, 0.0, 1.0, 1.0).unwrap();
        shoot(&mp, &grid(4000), &ShootOptions { tol: 1e-4, ..Default::default() }).unwrap()
    })
}

#[test]
fn groundstate_file_round_trip() {
    let q = q();
    let mut buf = Vec::new();
    write_groundstate(&mut buf, q).unwrap();
    let file = read_groundstate(BufReader::new(buf.as_slice())).unwrap();
    assert_eq!(file.params().unwrap(), q.mp);
    let back = file.solution().unwrap();
    assert_eq!(back.values(), q.values());
    assert_eq!(back.grid().nodes(), q.grid().nodes());
    assert_relative_eq!(back.action_value, q.action_value, max_relative = 1e-14);
}

#[test]
fn truncated_groundstate_file_is_rejected() {
    let mut buf = Vec::new();
    write_groundstate(&mut buf, q()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text.lines().take(40).map(|l| format!("{l}\n")).collect();
    assert!(read_groundstate(BufReader::new(cut.as_bytes())).and_then(|f| f.solution()).is_err());
    let garbled = text.replacen("e0\n", "e0 junk\n", 1);
    assert!(matches!(
        read_groundstate(BufReader::new(garbled.as_bytes())).and_then(|f| f.solution()),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn rescaling_matches_direct_shooting() {
    let q = q();
    let omega = 2.0;
    let scaled = rescale_omega(q, omega).unwrap();
    let direct = shoot(&q.mp.with_omega(omega), q.grid(), &ShootOptions { tol: 1e-4, ..Default::default() }).unwrap();
    let peak = direct.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let sup = scaled.values().iter().zip(direct.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(sup / peak < 1e-5, "sup {sup}");
    // S_{omega,0}(Q_omega) = omega^{1 - s_c} S_{1,0}(Q_1)
    assert_relative_eq!(direct.action_value, omega.powf(1.0 - q.mp.sc()) * q.action_value, max_relative = 1e-4);
}

#[test]
fn resampling_keeps_the_integrals() {
    let q = q();
    let coarse = q.profile.resample(&grid(1000)).unwrap();
    // midpoint quadrature at the coarser spacing
    assert_relative_eq!(coarse.mass(), q.profile.mass(), max_relative = 1e-3);
    let wide = Arc::new(Grid::new(Geometry::Radial, 60.0, 6000, 3).unwrap());
    let out = q.profile.resample(&wide).unwrap();
    assert_relative_eq!(out.mass(), q.profile.mass(), max_relative = 1e-4);
    let line = Arc::new(Grid::new(Geometry::Line, 20.0, 100, 1).unwrap());
    assert!(q.profile.resample(&line).is_err());
}

#[test]
fn tabulated_reader_checks_coordinates() {
    let g = grid(50);
    let mut text = String::from("# x re im\n\n");
    for &x in g.nodes() {
        text.push_str(&format!("{x:.17e} {} {}\n", (-x * x).exp(), 0.5 * x));
    }
    let f = read_tabulated(text.as_bytes(), &g).unwrap();
    assert_relative_eq!(f.values()[3].im, 0.5 * g.nodes()[3]);

    let shifted = text.replacen(&format!("{:.17e}", g.nodes()[4]), "0.123", 1);
    match read_tabulated(shifted.as_bytes(), &g) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let short: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
    assert!(read_tabulated(short.as_bytes(), &g).is_err());
}

#[test]
fn random_families_are_seeded() {
    let a = random_profiles("mixed", 30, 5).unwrap();
    assert_eq!(a, random_profiles("mixed", 30, 5).unwrap());
    assert_ne!(a, random_profiles("mixed", 30, 6).unwrap());
    assert!(random_profiles("comet", 3, 5).is_err());
    let kinds: std::collections::BTreeSet<_> = a.iter().map(Profile::name).collect();
    assert!(kinds.len() >= 2);
}

#[test]
fn scaled_ground_states_split_by_amplitude() {
    let q = q();
    let mp = q.mp.with_gamma(0.05);
    let bench = q.benchmark();
    for (c, want) in [(0.5, Membership::Plus), (0.9, Membership::Plus), (1.2, Membership::Minus), (2.0, Membership::Minus)] {
        let r = classify(&q.profile.scaled(c), &mp, &bench, None).unwrap();
        assert!(r.below_ground_state, "amplitude {c}");
        assert_eq!(r.memberships[..3], [want; 3], "amplitude {c}");
    }
}
