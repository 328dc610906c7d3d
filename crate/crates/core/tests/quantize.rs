mod common;

use common::*;
use spectator::dirac::{analyze, reduce, ReducedCanonicalSystem};
use spectator::mechanics::{decompose_lagrangian, legendre, mechanical_momenta};
use spectator::quantize::{
    angular_momentum_reduce, landau_levels, oscillator_spectrum, recognize_oscillator,
    recognize_oscillator_in, OscillatorForm, QuantizeError, SpectrumKind,
};
use spectator::symcore::{Expr, PhaseSpace, SymbolTable};
use std::sync::Arc;

const J: &str = "x1*p2 - x2*p1";

fn reduced(t: &Arc<SymbolTable>, ps: &PhaseSpace, l: &str) -> ReducedCanonicalSystem {
    let (h, prim) = limit_system(t, ps, l, "hbar*omega_c/2");
    let an = analyze(&h, &prim, ps, 5).unwrap();
    let names = [(t.get("X").unwrap(), t.get("P").unwrap())];
    reduce(&an, &h, &ps.coordinates(), &names).unwrap()
}

#[test]
fn effective_oscillator_of_full_system() {
    let (t, ps) = trap_table();
    let red = reduced(&t, &ps, L_FULL);
    let osc = recognize_oscillator(&red).unwrap();
    assert_eq!(osc.effective_mass, ex(&t, "mu*omega_c^2/omega_P^2"));
    assert_eq!(osc.effective_frequency, ex(&t, "omega_P^2/omega_c"));
    assert_eq!(osc.zero_point_offset, ex(&t, "hbar*omega_c/2"));
    assert!(osc.effective_mass.is_manifestly_positive());
    let rebuilt = osc.hamiltonian(&ex(&t, "X"), &ex(&t, "P"));
    assert_eq!(rebuilt, red.reduced_h);
}

#[test]
fn flux_free_oscillator_is_identical() {
    let (t, ps) = trap_table();
    let a = recognize_oscillator(&reduced(&t, &ps, L_FULL)).unwrap();
    let b = recognize_oscillator(&reduced(&t, &ps, L_NO_FLUX)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spectra() {
    let (t, ps) = trap_table();
    let hbar = ex(&t, "hbar");
    let osc = recognize_oscillator(&reduced(&t, &ps, L_FULL)).unwrap();
    let s = oscillator_spectrum(&osc, 3, &hbar);
    assert_eq!(s.kind, SpectrumKind::Oscillator);
    assert_eq!(s.levels.len(), 4);
    assert_eq!(
        *s.exact(0).unwrap(),
        ex(&t, "hbar*omega_P^2/(2*omega_c) + hbar*omega_c/2")
    );
    for n in 1..4 {
        let gap = s.exact(n).unwrap() - s.exact(n - 1).unwrap();
        assert_eq!(gap, ex(&t, "hbar*omega_P^2/omega_c"));
        assert!(gap.is_manifestly_positive());
    }

    let plain = recognize_oscillator_in(
        &ex(&t, "P^2/(2*mu) + 1/2*mu*omega_P^2*X^2"),
        t.get("X").unwrap(),
        t.get("P").unwrap(),
    )
    .unwrap();
    assert_eq!(plain.effective_mass, ex(&t, "mu"));
    assert_eq!(plain.effective_frequency, ex(&t, "omega_P"));
    assert!(plain.zero_point_offset.is_zero());
    assert_eq!(
        *oscillator_spectrum(&plain, 3, &hbar).exact(3).unwrap(),
        ex(&t, "7/2*hbar*omega_P")
    );

    let kinetic = OscillatorForm {
        effective_mass: ex(&t, "mu"),
        effective_frequency: ex(&t, "omega_c"),
        zero_point_offset: ex(&t, "0"),
        center: (ex(&t, "0"), ex(&t, "0")),
    };
    assert_eq!(
        *oscillator_spectrum(&kinetic, 0, &hbar).exact(0).unwrap(),
        ex(&t, "hbar*omega_c/2")
    );
}

#[test]
fn shifted_oscillator_is_completed() {
    let (t, _) = trap_table();
    let (x, p) = (t.get("X").unwrap(), t.get("P").unwrap());
    let h = ex(&t, "(P - 1)^2/(2*mu) + 1/2*mu*omega_P^2*(X - a)^2 + hbar");
    let osc = recognize_oscillator_in(&h, x, p).unwrap();
    assert_eq!(osc.center, (ex(&t, "a"), ex(&t, "1")));
    assert_eq!(osc.zero_point_offset, ex(&t, "hbar"));
    assert_eq!(osc.hamiltonian(&ex(&t, "X"), &ex(&t, "P")), h);
}

#[test]
fn non_oscillators_are_rejected() {
    let (t, _) = trap_table();
    let (x, p) = (t.get("X").unwrap(), t.get("P").unwrap());
    for h in ["P^2 + X*P + X^2", "P^2 - X^2", "P^2 + X^4", "P^2"] {
        assert!(
            matches!(
                recognize_oscillator_in(&ex(&t, h), x, p),
                Err(QuantizeError::NotAnOscillator(_))
            ),
            "{h}"
        );
    }
}

#[test]
fn angular_momentum_with_flux() {
    let (t, ps) = trap_table();
    let hbar = ex(&t, "hbar");
    let red = reduced(&t, &ps, L_FULL);
    let osc = recognize_oscillator(&red).unwrap();
    let am = angular_momentum_reduce(&ex(&t, J), &red, &osc, &hbar).unwrap();
    assert!(am.fractional_offset.equivalent(&ex(&t, "q*Phi0/(2*pi*c)")));
    assert_eq!(am.ladder_coefficient, hbar);
    assert_eq!(am.number_offset, ex(&t, "1/2"));
    assert!(am
        .zero_point
        .equivalent(&ex(&t, "hbar/2 + q*Phi0/(2*pi*c)")));
    assert_eq!(
        am.zero_point,
        &am.fractional_offset + &(&am.ladder_coefficient * &am.number_offset)
    );
    let eliminated = red.eliminate(&ex(&t, J)).unwrap();
    assert!(eliminated.equivalent(&ex(&t, "q*Phi0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)")));
}

#[test]
fn angular_momentum_without_flux() {
    let (t, ps) = trap_table();
    let hbar = ex(&t, "hbar");
    let red = reduced(&t, &ps, L_NO_FLUX);
    let osc = recognize_oscillator(&red).unwrap();
    let am = angular_momentum_reduce(&ex(&t, J), &red, &osc, &hbar).unwrap();
    assert!(am.fractional_offset.is_zero());
    assert_eq!(am.zero_point, ex(&t, "hbar/2"));
}

#[test]
fn zero_point_difference_is_the_flux_term() {
    let (t, ps) = trap_table();
    let hbar = ex(&t, "hbar");
    let zero_point = |l: &str| {
        let red = reduced(&t, &ps, l);
        let osc = recognize_oscillator(&red).unwrap();
        angular_momentum_reduce(&ex(&t, J), &red, &osc, &hbar).unwrap()
    };
    let with = zero_point(L_FULL);
    let without = zero_point(L_NO_FLUX);
    let diff = &with.zero_point - &without.zero_point;
    assert!(diff.equivalent(&ex(&t, "q*Phi0/(2*pi*c)")));

    // The offset carries no dependence on the field, the trap or the mass.
    let offset = with.fractional_offset.expand_aliases();
    for s in ["omega_c", "omega_P", "mu"] {
        assert!(
            offset.diff(t.get(s).unwrap()).is_zero(),
            "offset depends on {s}"
        );
    }
    // Setting the flux to zero recovers the flux-free result.
    let mut off = spectator::symcore::Bindings::new();
    off.insert(t.get("omega_0").unwrap(), ex(&t, "0"));
    assert_eq!(
        with.zero_point.substitute(&off).unwrap(),
        without.zero_point
    );
}

#[test]
fn spacing_does_not_depend_on_flux() {
    let (t, ps) = trap_table();
    let osc = recognize_oscillator(&reduced(&t, &ps, L_FULL)).unwrap();
    let omega = osc.effective_frequency.expand_aliases();
    for s in ["Phi0", "B0", "omega_0", "a"] {
        assert!(!omega.depends_on(t.get(s).unwrap()));
    }
}

#[test]
fn angular_momentum_decomposition_failure() {
    let (t, ps) = trap_table();
    let red = reduced(&t, &ps, L_FULL);
    let osc = recognize_oscillator(&red).unwrap();
    assert!(matches!(
        angular_momentum_reduce(&ex(&t, "x1"), &red, &osc, &ex(&t, "hbar")),
        Err(QuantizeError::DecompositionFailure(_))
    ));
}

#[test]
fn landau_levels_from_mechanical_momenta() {
    let (t, ps) = trap_table();
    let hbar = ex(&t, "hbar");
    let momenta = |l: &str| {
        let m = decompose_lagrangian(&ex(&t, l), &ps).unwrap();
        mechanical_momenta(&legendre(&m, &ps).unwrap().hamiltonian, &ps).unwrap()
    };
    for l in [L_FULL, L_NO_FLUX] {
        let (osc, s) = landau_levels(&momenta(l), 2, &hbar).unwrap();
        assert_eq!(s.kind, SpectrumKind::Landau);
        assert_eq!(*s.exact(0).unwrap(), ex(&t, "hbar*omega_c/2"));
        assert_eq!(*s.exact(1).unwrap(), ex(&t, "3/2*hbar*omega_c"));
        let direct = oscillator_spectrum(&osc, 2, &hbar);
        assert_eq!(direct.levels, s.levels);
    }
    assert_eq!(
        landau_levels(&momenta(L_NO_FIELD), 2, &hbar).unwrap_err(),
        QuantizeError::CommutingMomenta
    );
}

#[test]
fn exact_level_lookup() {
    let (t, _) = trap_table();
    let osc = OscillatorForm {
        effective_mass: ex(&t, "mu"),
        effective_frequency: ex(&t, "omega_c"),
        zero_point_offset: Expr::zero(&t),
        center: (Expr::zero(&t), Expr::zero(&t)),
    };
    let s = oscillator_spectrum(&osc, 1, &ex(&t, "hbar"));
    assert!(s.exact(2).is_none());
}
