//! End-to-end identities that tie the test family, the averaged coefficients
//! and the operator together.

use approx::assert_relative_eq;
use rhaly_core::constructions::{
    beta_values, extremal_series, h_poly, min_truncation, phi_psi_n, polygonal_psi,
};
use rhaly_core::oracle;
use rhaly_core::rhaly::{apply_rhaly, g_function, generating_function, SequenceSpec};

fn specs(truncation: usize) -> Vec<SequenceSpec> {
    vec![
        SequenceSpec::Cesaro { truncation },
        SequenceSpec::PowerLaw {
            c: 1.0,
            s: 0.8,
            truncation,
        },
        SequenceSpec::PowerLaw {
            c: 2.0,
            s: 1.2,
            truncation,
        },
        SequenceSpec::Log { truncation },
    ]
}

#[test]
fn averaged_kernel_recovers_derivative_blocks() {
    // Psi_N(k/N) = beta_{k,N} undoes the averaging in R f_N on N..2N
    for p in [1.5, 2.0, 3.0] {
        for n in [8, 32, 128] {
            let t = min_truncation(n);
            let psi = polygonal_psi(&beta_values(p, n).unwrap(), n).unwrap();
            let h = h_poly(&psi, n).unwrap();
            let f = extremal_series(p, n, t).unwrap();
            for eta in specs(t) {
                let rf = apply_rhaly(&eta, &f).unwrap();
                let lhs = g_function(&eta).slice(n, 2 * n - 1).unwrap();
                let rhs = h.hadamard(&rf).slice(n, 2 * n - 1).unwrap();
                for k in n..2 * n {
                    assert_relative_eq!(lhs.coeff(k).re, rhs.coeff(k).re, max_relative = 1e-8);
                }
            }
        }
    }
}

#[test]
fn phi_kernel_recovers_plain_blocks() {
    // N (R f_N) * phi_N = Delta_N F with the H^1 normalization of f_N
    for n in [4, 16, 64] {
        let t = min_truncation(n);
        let (phi, _) = phi_psi_n(n, 1.0 - 1.0 / n as f64).unwrap();
        let f = extremal_series(1.0, n, t).unwrap();
        for eta in specs(t) {
            let rf = apply_rhaly(&eta, &f).unwrap();
            let got = rf.hadamard(&phi);
            let want = generating_function(&eta);
            for k in n..2 * n {
                assert_relative_eq!(n as f64 * got.coeff(k).re, want.coeff(k).re, max_relative = 1e-10);
            }
        }
    }
}

#[test]
fn operator_matches_dense_double_sum() {
    let f = extremal_series(2.0, 16, min_truncation(16)).unwrap();
    for eta in specs(min_truncation(16)) {
        let fast = apply_rhaly(&eta, &f).unwrap();
        let slow = oracle::dense_apply(&eta, &f);
        for (a, b) in fast.coeffs().iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }
}
