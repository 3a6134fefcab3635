//! Catalog of the data products and the single command emitting each.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Product {
    pub id: &'static str,
    pub description: &'static str,
    pub command: &'static str,
    pub files: &'static [&'static str],
}

pub fn products() -> Vec<Product> {
    vec![
        Product {
            id: "stark-spectrum",
            description: "Rotor energies and induced dipoles of the lowest (N,|M|) levels versus bias field",
            command: "mdc rotor scan",
            files: &["rotor_scan.csv"],
        },
        Product {
            id: "chain-1d",
            description: "1D exciton dispersion J(q), phonon spectrum f(q) and coupling function g(q)",
            command: "mdc phonon --dim 1",
            files: &["phonon_1d.csv"],
        },
        Product {
            id: "lattice-2d",
            description: "2D triangular-lattice J and both phonon branches along G-K-M-G",
            command: "mdc phonon --dim 2",
            files: &["phonon_2d.csv"],
        },
        Product {
            id: "spin-rotor",
            description: "Rotor spectrum with spin-rotation coupling at E_b = 3.05 B/mu0",
            command: "mdc rotor spin --Eb 3.05",
            files: &["rotor_spin.csv", "rotor_spin.json"],
        },
        Product {
            id: "trapped-density",
            description: "Density of a 100-molecule trapped crystal against the analytic profile, plus L and n(0) versus N",
            command: "mdc trap solve --n 100 --sweep 50,100,200,400,800",
            files: &["density_profile.csv", "density_scaling.csv", "trap_solve.json"],
        },
        Product {
            id: "trapped-spectra",
            description: "Exciton spectrum and longitudinal, y and z phonon branches at N = 800, gamma = 30, nu_perp = 1.2, with asymptotic overlays",
            command: "mdc trap spectra --n 800 --gamma 30 --nu-perp 1.2",
            files: &["exciton_spectrum.csv", "phonon_spectrum.csv", "trap_spectra.json"],
        },
        Product {
            id: "lindemann",
            description: "Local Lindemann parameter F(xi, tau) at N = 800 and the homogeneous F_h(tau)",
            command: "mdc trap lindemann --n 800 --taus 0,1,2,5",
            files: &["lindemann_profile.csv", "lindemann_homogeneous.csv"],
        },
        Product {
            id: "qubit-pairs",
            description: "Pair parameters kappa, epsilon and dipoles of one state pair",
            command: "mdc rotor pair --g 1,0 --e 2,0 --Eb 3.05",
            files: &["rotor_pair.json"],
        },
        Product {
            id: "cabr-case-study",
            description: "CaBr worked example: scales, W, optimal detuning, fidelity and gate time",
            command: "mdc case-study cabr",
            files: &["case_study_cabr.json"],
        },
    ]
}
