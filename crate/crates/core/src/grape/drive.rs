use serde::{Deserialize, Serialize};

use super::{Bounds, Control, ControlProblem};
use crate::basis::{Sector, Statistics};
use crate::error::Result;
use crate::operators::{build_chain, ChainDriveFrame, OnsiteConvention};

/// Which chain parameters are modulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveKind {
    /// Onsite energies `g_l`; couplings stay at the static value.
    #[default]
    #[serde(alias = "g")]
    Onsite,
    /// Onsite energies and nearest-neighbour couplings `J_l`.
    #[serde(alias = "gj")]
    OnsiteAndHopping,
}

/// Piecewise-constant drive of a nearest-neighbour chain, independent of the
/// excitation sector it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDrive {
    pub sites: usize,
    pub kind: DriveKind,
    /// `|g_l| ≤ gmax`.
    pub gmax: f64,
    /// `|J_l| ≤ jmax` when couplings are driven.
    pub jmax: f64,
    /// Static coupling used when only onsite energies are driven.
    pub hopping: f64,
    /// Anharmonicity `U`, ignored for hardcore sectors.
    pub interaction: f64,
    #[serde(default)]
    pub convention: OnsiteConvention,
}

impl ChainDrive {
    pub fn onsite(sites: usize, gmax: f64) -> Self {
        Self {
            sites,
            kind: DriveKind::Onsite,
            gmax,
            jmax: 1.0,
            hopping: 1.0,
            interaction: 0.0,
            convention: OnsiteConvention::default(),
        }
    }

    pub fn onsite_and_hopping(sites: usize, gmax: f64, jmax: f64) -> Self {
        Self {
            kind: DriveKind::OnsiteAndHopping,
            jmax,
            ..Self::onsite(sites, gmax)
        }
    }

    pub fn with_interaction(mut self, interaction: f64) -> Self {
        self.interaction = interaction;
        self
    }

    fn frame(&self, sector: &Sector) -> ChainDriveFrame {
        let interaction = match sector.statistics() {
            Statistics::Bosonic => 0.0,
            Statistics::Hardcore => f64::INFINITY,
        };
        ChainDriveFrame {
            onsite: vec![0.0; self.sites],
            hopping: vec![0.0; self.sites.saturating_sub(1)],
            interaction,
            convention: self.convention,
        }
    }

    /// Control problem on `sector` with `steps` equal steps over `period`.
    pub fn problem(&self, sector: &Sector, steps: usize, period: f64) -> Result<ControlProblem> {
        let mut drift = self.frame(sector);
        if sector.statistics() == Statistics::Bosonic {
            drift.interaction = self.interaction;
        }
        if self.kind == DriveKind::Onsite {
            drift.hopping.iter_mut().for_each(|j| *j = self.hopping);
        }
        let drift = build_chain(sector, &drift)?;

        let g_bounds = Bounds::symmetric(self.gmax)?;
        let mut controls = Vec::new();
        for l in 0..self.sites {
            let mut frame = self.frame(sector);
            frame.onsite[l] = 1.0;
            controls.push(Control::new(format!("g{}", l + 1), build_chain(sector, &frame)?, g_bounds));
        }
        if self.kind == DriveKind::OnsiteAndHopping {
            let j_bounds = Bounds::symmetric(self.jmax)?;
            for l in 0..self.sites.saturating_sub(1) {
                let mut frame = self.frame(sector);
                frame.hopping[l] = 1.0;
                controls.push(Control::new(format!("J{}", l + 1), build_chain(sector, &frame)?, j_bounds));
            }
        }
        ControlProblem::new(drift, controls, steps, period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grape::ControlSequence;

    #[test]
    fn step_hamiltonian_equals_chain_frame() {
        let sector = Sector::bosonic(3, 2).unwrap();
        let drive = ChainDrive::onsite_and_hopping(3, 5.0, 1.0).with_interaction(4.0);
        let p = drive.problem(&sector, 1, 1.0).unwrap();
        assert_eq!(p.control_names(), vec!["g1", "g2", "g3", "J1", "J2"]);
        let values = vec![0.5, -1.0, 2.0, 0.3, -0.7];
        let seq = ControlSequence::from_values(p.control_names(), 1, values).unwrap();
        let frame = ChainDriveFrame {
            onsite: vec![0.5, -1.0, 2.0],
            hopping: vec![0.3, -0.7],
            interaction: 4.0,
            convention: OnsiteConvention::NumberOperator,
        };
        let expected = build_chain(&sector, &frame).unwrap();
        let diff = p.step_hamiltonian(&seq, 0) - expected.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn onsite_drive_keeps_static_coupling() {
        let sector = Sector::hardcore(4, 2).unwrap();
        let p = ChainDrive::onsite(4, 5.0).problem(&sector, 3, 3.0).unwrap();
        assert_eq!(p.controls().len(), 4);
        let expected = build_chain(&sector, &ChainDriveFrame::uniform(4, 0.0, 1.0, f64::INFINITY)).unwrap();
        assert_eq!(p.drift().matrix(), expected.matrix());
    }
}
