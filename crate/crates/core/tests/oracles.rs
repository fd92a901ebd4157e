//! Closest-product overlaps of the four-qubit benchmark states, computed by a
//! brute-force search that shares no code with the library iteration.

use gme_core::pure::{DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use gme_core::{pure_gme_multirestart, states, Complex64, PureState};
use std::f64::consts::PI;

const N: usize = 4;

/// `|<a(t0,p0) (x) ... |psi>|^2` with `a(t, p) = cos t |0> + e^{ip} sin t |1>`.
fn overlap_sq(psi: &[Complex64], angles: &[f64; 2 * N]) -> f64 {
    let locals: Vec<[Complex64; 2]> = (0..N)
        .map(|k| {
            let (t, p) = (angles[2 * k], angles[2 * k + 1]);
            [Complex64::new(t.cos(), 0.0), Complex64::from_polar(t.sin(), p)]
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, amp) in psi.iter().enumerate() {
        let mut coeff = *amp;
        for (k, loc) in locals.iter().enumerate() {
            let bit = (idx >> (N - 1 - k)) & 1;
            coeff *= loc[bit].conj();
        }
        acc += coeff;
    }
    acc.norm_sqr()
}

/// Pattern search with a shrinking step.
fn hill_climb(psi: &[Complex64], mut x: [f64; 2 * N]) -> f64 {
    let mut best = overlap_sq(psi, &x);
    let mut step = 0.2;
    while step > 1e-10 {
        let mut improved = false;
        for k in 0..2 * N {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * step;
                let v = overlap_sq(psi, &y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Grid over all eight angles, then local refinement of the best grid points.
fn brute_force_max_overlap(psi: &PureState) -> f64 {
    let amps: Vec<Complex64> = psi.amplitudes().iter().copied().collect();
    let g: usize = 5;
    let thetas: Vec<f64> = (0..g).map(|i| (i as f64 + 0.5) * (PI / 2.0) / g as f64).collect();
    let phis: Vec<f64> = (0..g).map(|i| i as f64 * 2.0 * PI / g as f64).collect();
    let mut scored: Vec<(f64, [f64; 2 * N])> = Vec::new();
    let total = g.pow(2 * N as u32);
    for code in 0..total {
        let mut c = code;
        let mut x = [0.0; 2 * N];
        for (k, slot) in x.iter_mut().enumerate() {
            let i = c % g;
            c /= g;
            *slot = if k % 2 == 0 { thetas[i] } else { phis[i] };
        }
        let v = overlap_sq(&amps, &x);
        if scored.len() < 8 || v > scored[scored.len() - 1].0 {
            scored.push((v, x));
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            scored.truncate(8);
        }
    }
    scored.iter().map(|(_, x)| hill_climb(&amps, *x)).fold(0.0, f64::max)
}

fn check(name: &str, psi: &PureState, expected_overlap: f64) {
    let oracle = brute_force_max_overlap(psi);
    assert!((oracle - expected_overlap).abs() < 1e-9, "{name}: oracle {oracle} vs {expected_overlap}");
    let lib = pure_gme_multirestart(psi, 20, 7, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
    assert!((lib.gme - (1.0 - oracle)).abs() < 1e-9, "{name}: library {} vs oracle {}", lib.gme, 1.0 - oracle);
}

#[test]
fn ghz4_overlap_is_one_half() {
    check("ghz", &states::ghz(4), 0.5);
}

#[test]
fn w4_overlap_is_27_over_64() {
    check("w", &states::w4(), 27.0 / 64.0);
}

#[test]
fn dicke4_overlap_is_3_over_8() {
    check("dicke", &states::dicke4(), 3.0 / 8.0);
}

#[test]
fn cluster4_overlap_is_one_quarter() {
    check("cluster", &states::cluster4(), 0.25);
}
