use serde::{Deserialize, Serialize};

/// Which diagram algebra the sites carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Fully dense Temperley–Lieb: every site occupied, no crossings.
    DenseTL,
    /// Dilute Temperley–Lieb (Motzkin-like): empty sites allowed, no crossings.
    DiluteTL,
    /// Dense Brauer: every site occupied, crossings allowed.
    Brauer,
    /// Dilute Brauer: empty sites and crossings allowed.
    DiluteBrauer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// A diagram-algebra family: kind plus boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraFamily {
    pub kind: FamilyKind,
    pub boundary: Boundary,
}

impl AlgebraFamily {
    pub fn new(kind: FamilyKind, boundary: Boundary) -> Self {
        AlgebraFamily { kind, boundary }
    }

    pub fn dense_periodic() -> Self {
        Self::new(FamilyKind::DenseTL, Boundary::Periodic)
    }

    pub fn dilute_periodic() -> Self {
        Self::new(FamilyKind::DiluteTL, Boundary::Periodic)
    }

    pub fn dense_open() -> Self {
        Self::new(FamilyKind::DenseTL, Boundary::Open)
    }

    pub fn dilute_brauer_periodic() -> Self {
        Self::new(FamilyKind::DiluteBrauer, Boundary::Periodic)
    }

    /// Crossing diagrams (and the Π generator) are only meaningful for the
    /// Brauer kinds.
    pub fn allows_crossings(&self) -> bool {
        matches!(self.kind, FamilyKind::Brauer | FamilyKind::DiluteBrauer)
    }

    /// Dilute variants allow empty sites; dense variants require every site
    /// occupied.
    pub fn allows_empty(&self) -> bool {
        matches!(self.kind, FamilyKind::DiluteTL | FamilyKind::DiluteBrauer)
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }
}
