//! Named parameter sets, one per reference experiment.
//!
//! Every preset starts from the fixed values `l = 1`, `m0 = 1`, `ml = 1.5`,
//! `k3 = 1`, `β = 1` and sets the damping and stiffness coefficients of its
//! experiment exactly. Input-2 presets read the two frequencies as the
//! magnitudes of the two largest real parts of the spectrum.

use cablemor::model::PhysicalParams;
use cablemor::signals::{Input2Mode, InputKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub summary: &'static str,
    pub gamma: f64,
    pub alpha: f64,
    pub alpha0: f64,
    pub alphal: f64,
    pub k0: f64,
    pub kl: f64,
    pub input: InputKind,
    pub r: Option<usize>,
    pub tf: Option<f64>,
    /// Run the unforced energy study as well.
    pub energy: bool,
}

impl Preset {
    /// The experiment coefficients on top of the fixed values.
    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            l: 1.0,
            m0: 1.0,
            ml: 1.5,
            k3: 1.0,
            beta: 1.0,
            gamma: self.gamma,
            alpha: self.alpha,
            alpha0: self.alpha0,
            alphal: self.alphal,
            k0: self.k0,
            kl: self.kl,
        }
    }

    pub fn input2_mode(&self) -> Option<Input2Mode> {
        (self.input == InputKind::EigCos2).then_some(Input2Mode::Literal)
    }
}

const BASE: Preset = Preset {
    name: "",
    aliases: &[],
    summary: "",
    gamma: 0.0,
    alpha: 0.0,
    alpha0: 0.0,
    alphal: 0.0,
    k0: 1.0,
    kl: 1.0,
    input: InputKind::Sine1,
    r: None,
    tf: None,
    energy: false,
};

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "exp_stab_ex1",
        summary: "Kelvin-Voigt and right-end damping; spectrum and energy decay",
        gamma: 0.1,
        alphal: 0.1,
        tf: Some(50.0),
        energy: true,
        ..BASE
    },
    Preset {
        name: "exp_stability2",
        summary: "no Kelvin-Voigt damping, all other coefficients small; oscillatory energy decay",
        alpha: 0.01,
        alpha0: 0.01,
        alphal: 0.01,
        k0: 0.01,
        kl: 0.01,
        tf: Some(100.0),
        energy: true,
        ..BASE
    },
    Preset {
        name: "small_damp_ex1_in2",
        aliases: &["example1_input2_smalldamp"],
        summary: "small damping, eigenvalue-tuned cosines",
        gamma: 0.001,
        alphal: 0.1,
        k0: 0.1,
        kl: 0.1,
        input: InputKind::EigCos2,
        r: Some(4),
        tf: Some(100.0),
        ..BASE
    },
    Preset {
        name: "small_damp_ex5_in4",
        summary: "small Kelvin-Voigt damping only, square wave",
        gamma: 0.001,
        k0: 0.1,
        kl: 0.1,
        input: InputKind::Square4,
        r: Some(8),
        tf: Some(100.0),
        ..BASE
    },
    Preset {
        name: "small_stiff_ex2_in1",
        summary: "viscous damping only, soft springs, sine input",
        alpha: 0.1,
        alpha0: 0.1,
        alphal: 0.1,
        k0: 0.001,
        kl: 0.001,
        input: InputKind::Sine1,
        ..BASE
    },
    Preset {
        name: "small_stiff_ex1_in4",
        summary: "Kelvin-Voigt and right-end damping, soft springs, square wave",
        gamma: 0.1,
        alphal: 0.1,
        k0: 0.001,
        kl: 0.001,
        input: InputKind::Square4,
        r: Some(4),
        ..BASE
    },
    Preset {
        name: "small_stiff_ex5_in4",
        summary: "Kelvin-Voigt damping only, soft springs, square wave on a long horizon",
        gamma: 0.1,
        k0: 0.001,
        kl: 0.001,
        input: InputKind::Square4,
        r: Some(4),
        tf: Some(300.0),
        ..BASE
    },
    Preset {
        name: "small_all_ex3_in2",
        summary: "all damping and stiffness small, eigenvalue-tuned cosines",
        gamma: 0.001,
        alpha: 0.001,
        k0: 0.001,
        kl: 0.001,
        input: InputKind::EigCos2,
        ..BASE
    },
    Preset {
        name: "small_all_ex3_in4",
        summary: "all damping and stiffness small, square wave",
        gamma: 0.001,
        alpha: 0.001,
        k0: 0.001,
        kl: 0.001,
        input: InputKind::Square4,
        ..BASE
    },
];

/// Case-insensitive lookup by name or alias.
pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| {
        p.name.eq_ignore_ascii_case(name) || p.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name_alias_and_case() {
        assert_eq!(find("exp_stab_Ex1").unwrap().name, "exp_stab_ex1");
        assert_eq!(
            find("example1_input2_smalldamp").unwrap().name,
            "small_damp_ex1_in2"
        );
        assert!(find("nope").is_none());
    }

    #[test]
    fn small_damping_input2_coefficients() {
        let p = find("example1_input2_smalldamp").unwrap().params();
        assert_eq!((p.gamma, p.alphal, p.k0, p.kl), (0.001, 0.1, 0.1, 0.1));
        assert_eq!((p.alpha0, p.alpha), (0.0, 0.0));
        assert_eq!((p.l, p.m0, p.ml, p.k3, p.beta), (1.0, 1.0, 1.5, 1.0, 1.0));
    }

    #[test]
    fn every_preset_is_valid_and_unique() {
        for (i, p) in PRESETS.iter().enumerate() {
            p.params().validate().unwrap();
            assert!(PRESETS[i + 1..].iter().all(|q| q.name != p.name));
        }
    }
}
