mod common;

use std::collections::HashMap;

use pird::baselines::{
    conditional_transfer_entropy, gaussian_mi, static_pid, submodel_innovation, transfer_entropy,
};
use pird::lattice::RedundancyLattice;
use pird::pird::{decompose, smmi_redundancy_of_groups, spectral_pird, CoarseRule};
use pird::spectral::{integrate_band, integrate_full, psd_from_var, spectral_mir, Band, FrequencyGrid};
use pird::var::VarModel;
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = VarModel> {
    (2usize..=4, 1usize..=4, 0.3f64..0.9, any::<u64>())
        .prop_map(|(q, p, r, seed)| VarModel::random_stable(q, p, r, seed).unwrap())
}

fn psd(model: &VarModel, n: usize) -> pird::SpectralMatrix {
    psd_from_var(model, &FrequencyGrid::new(n, model.fs()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moebius_inversion_reconstructs(m in 1usize..=4, values in prop::collection::vec(-2.0f64..2.0, 166)) {
        let lattice = RedundancyLattice::enumerate(m).unwrap();
        let red = &values[..lattice.len()];
        let pi = lattice.invert(red).unwrap();
        let back = lattice.accumulate(&pi);
        for (a, b) in back.iter().zip(red) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let total: f64 = pi.iter().sum();
        prop_assert!((total - red[lattice.top()]).abs() < 1e-12);
        let map: HashMap<_, _> = lattice.atoms().iter().cloned().zip(red.iter().copied()).collect();
        let pim = lattice.moebius_invert(&map).unwrap();
        for (atom, v) in lattice.atoms().iter().zip(&pi) {
            prop_assert_eq!(pim[atom], *v);
        }
    }

    #[test]
    fn psd_is_hermitian_positive(model in model_strategy()) {
        let p = psd(&model, 129);
        prop_assert!(p.check_invariants().is_ok());
    }

    #[test]
    fn spectral_mir_nonnegative_and_monotone(model in model_strategy()) {
        let p = psd(&model, 257);
        let q = model.dim();
        let all: Vec<usize> = (1..q).collect();
        let joint = spectral_mir(&p, 0, &all).unwrap();
        for s in 1..q {
            let single = spectral_mir(&p, 0, &[s]).unwrap();
            for (a, b) in single.values().iter().zip(joint.values()) {
                prop_assert!(*a >= -1e-10);
                prop_assert!(*a <= b + 1e-10);
            }
        }
    }

    #[test]
    fn decomposition_identities(model in model_strategy()) {
        let p = psd(&model, 257);
        let sources: Vec<usize> = (1..model.dim()).collect();
        let bands = Band::parse_list("A:0-0.1,B:0.1-0.3,C:0.3-0.5").unwrap();
        let res = decompose(&p, 0, &sources, &bands, CoarseRule::default()).unwrap();
        let joint = res.spectral.joint().values();
        for k in 0..joint.len() {
            let s: f64 = res.spectral.partial().iter().map(|pr| pr.values()[k]).sum();
            prop_assert!((s - joint[k]).abs() < 1e-9);
        }
        for t in &res.time {
            prop_assert!(t.route_gap() < 1e-9);
            prop_assert!((t.partial.iter().sum::<f64>() - t.joint).abs() < 1e-9);
        }
        // Bands partition the axis.
        let parts: f64 = res.time[1..].iter().map(|t| t.joint).sum();
        prop_assert!((parts - res.time[0].joint).abs() < 1e-9);
        if sources.len() >= 2 {
            for c in &res.coarse {
                let s = c.unique.iter().sum::<f64>() + c.redundancy + c.synergy;
                prop_assert!((s - c.joint).abs() < 1e-9);
                prop_assert!((c.delta - (c.redundancy - c.synergy)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn smmi_never_exceeds_mmi(model in model_strategy()) {
        let p = psd(&model, 257);
        let sources: Vec<usize> = (1..model.dim()).collect();
        let sp = spectral_pird(&p, 0, &sources).unwrap();
        let t = sp.integrate();
        for (i, atom) in sp.lattice().atoms().iter().enumerate() {
            let mmi = atom.elements().iter()
                .map(|e| integrate_full(sp.subset_mir(e).unwrap()))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(t.redundancy[i] <= mmi + 1e-12);
        }
    }

    #[test]
    fn redundancy_symmetry_and_subset_equality(model in model_strategy()) {
        prop_assume!(model.dim() >= 3);
        let p = psd(&model, 129);
        let a = smmi_redundancy_of_groups(&p, 0, &[vec![1], vec![2]]).unwrap();
        let b = smmi_redundancy_of_groups(&p, 0, &[vec![2], vec![1]]).unwrap();
        prop_assert_eq!(a.values(), b.values());
        let sup = smmi_redundancy_of_groups(&p, 0, &[vec![1], vec![2], vec![1, 2]]).unwrap();
        for (x, y) in sup.values().iter().zip(a.values()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn band_integrals_are_additive(model in model_strategy(), cut in 0.01f64..0.49) {
        let p = psd(&model, 257);
        let prof = spectral_mir(&p, 0, &[1]).unwrap();
        let lo = integrate_band(&prof, &Band::new("lo", 0.0, cut).unwrap()).unwrap();
        let hi = integrate_band(&prof, &Band::new("hi", cut, 0.5).unwrap()).unwrap();
        prop_assert!((lo + hi - integrate_full(&prof)).abs() < 1e-9);
    }

    #[test]
    fn information_measures_nonnegative(model in model_strategy()) {
        let g0 = model.zero_lag_covariance().unwrap();
        let q = model.dim();
        for s in 1..q {
            prop_assert!(gaussian_mi(&g0, 0, &[s]).unwrap() >= -1e-12);
            prop_assert!(transfer_entropy(&model, &[s], 0, None).unwrap() >= -1e-10);
            prop_assert!(conditional_transfer_entropy(&model, &[0], &[s], &[], None).unwrap() >= -1e-10);
        }
        if q >= 3 {
            let pid = static_pid(&model, 0, &[1, 2]).unwrap();
            let total = pid.unique.iter().sum::<f64>() + pid.redundancy + pid.synergy;
            prop_assert!((total - pid.joint).abs() < 1e-10);
        }
    }

    #[test]
    fn submodel_order_converges(model in model_strategy()) {
        let idx = [0usize];
        let a = submodel_innovation(&model, &idx, Some(64)).unwrap();
        let b = submodel_innovation(&model, &idx, Some(128)).unwrap();
        prop_assert!((a[(0, 0)].ln() - b[(0, 0)].ln()).abs() < 1e-6);
    }
}

#[test]
fn white_models_make_smmi_equal_mmi() {
    for case in common::white_models(8, 5) {
        let p = case.psd_on(65);
        let sp = spectral_pird(&p, 0, &case.sources()).unwrap();
        let t = sp.integrate();
        for (i, atom) in sp.lattice().atoms().iter().enumerate() {
            let mmi = atom
                .elements()
                .iter()
                .map(|e| integrate_full(sp.subset_mir(e).unwrap()))
                .fold(f64::INFINITY, f64::min);
            assert!((t.redundancy[i] - mmi).abs() < 1e-9, "{}", case.label);
        }
    }
}
