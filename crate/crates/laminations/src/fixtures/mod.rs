//! Named examples: towers with their critical portraits, and the
//! polynomials whose rays realize them.
//!
//! Every tower here was checked by tracing rays of the matching polynomial
//! over the tower's support at its default depth. The two degree-7 towers
//! are sampled data rather than pullbacks.

use num_complex::Complex64;

use crate::circle::parse_angle_list;
use crate::dynamics::{monic_centered, AffineChart, RayParams, SchemaPolynomial};
use crate::error::{DocumentError, DynamicsError};
use crate::io::TowerDoc;
use crate::lamination::{CriticalPortrait, FiniteLamination, PuzzleTower};

const DEGREE7_G0: &str = include_str!("degree7_g0.json");
const DEGREE7_G1: &str = include_str!("degree7_g1.json");

#[derive(Clone, Copy, Debug)]
enum Source {
    /// Level-0 classes and a portrait, separated by `;`.
    Pullback { level0: &'static str, portrait: &'static str },
    /// An embedded tower document.
    Data(&'static str),
    /// A lamination that is not meant to verify.
    Broken { classes: &'static str },
}

type PolynomialFn = fn() -> (Vec<Complex64>, AffineChart);

/// A named example.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub degree: u32,
    /// Depth at which the tower agrees with sampled rays.
    pub depth: usize,
    /// Newton tolerance that lets every ray of the tower land.
    pub ray_tolerance: f64,
    source: Source,
    polynomial: Option<PolynomialFn>,
}

fn classes(s: &str) -> Vec<crate::circle::AngleSet> {
    s.split(';').map(|c| parse_angle_list(c).expect("fixture angles parse")).collect()
}

impl Fixture {
    /// The tower at the fixture's default depth.
    pub fn tower(&self) -> Result<PuzzleTower, DocumentError> {
        self.tower_to(self.depth)
    }

    /// The tower extended (or truncated) to `depth`. Sampled towers cannot be
    /// extended past their data.
    pub fn tower_to(&self, depth: usize) -> Result<PuzzleTower, DocumentError> {
        match self.source {
            Source::Pullback { level0, portrait } => {
                let lam = FiniteLamination::new(self.degree, classes(level0))?;
                let portrait = CriticalPortrait::new(self.degree, classes(portrait))?;
                Ok(PuzzleTower::from_level0(lam).with_portrait(portrait)?.extend_to(depth)?)
            }
            Source::Data(text) => {
                let tower = crate::io::from_json::<TowerDoc>(text)?.to_tower()?;
                Ok(tower.truncate(depth)?)
            }
            Source::Broken { classes: c } => {
                Ok(PuzzleTower::from_level0(FiniteLamination::new(self.degree, classes(c))?))
            }
        }
    }

    /// Level 0 on its own.
    pub fn level0(&self) -> Result<FiniteLamination, DocumentError> {
        Ok(self.tower_to(0)?.level(0)?.clone())
    }

    pub fn portrait(&self) -> Option<CriticalPortrait> {
        match self.source {
            Source::Pullback { portrait, .. } => CriticalPortrait::new(self.degree, classes(portrait)).ok(),
            _ => None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.source, Source::Data(_))
    }

    /// Whether the level-0 lamination is supposed to verify.
    pub fn is_valid(&self) -> bool {
        !matches!(self.source, Source::Broken { .. })
    }

    /// The monic centered polynomial, if the fixture has one.
    pub fn polynomial(&self) -> Option<SchemaPolynomial> {
        let (coeffs, _) = (self.polynomial?)();
        Some(SchemaPolynomial::unicritical_like(self.degree, coeffs).expect("fixture coefficients are valid"))
    }

    /// Chart from the polynomial's original coordinates to the model.
    pub fn chart(&self) -> Option<AffineChart> {
        self.polynomial.map(|p| p().1)
    }

    pub fn ray_params(&self) -> RayParams {
        RayParams { newton_tol: self.ray_tolerance, ..RayParams::default() }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity_chart() -> AffineChart {
    AffineChart { scale: c(1.0, 0.0), shift: c(0.0, 0.0) }
}

fn centered(p: &[Complex64]) -> (Vec<Complex64>, AffineChart) {
    monic_centered(p).expect("fixture polynomial has degree at least 2")
}

fn basilica() -> (Vec<Complex64>, AffineChart) {
    (vec![c(-1.0, 0.0)], identity_chart())
}

fn rabbit() -> (Vec<Complex64>, AffineChart) {
    (vec![c(-0.12256116687665361, 0.7448617666197442)], identity_chart())
}

fn airplane() -> (Vec<Complex64>, AffineChart) {
    (vec![c(-1.7548776662466927, 0.0)], identity_chart())
}

fn quartic() -> (Vec<Complex64>, AffineChart) {
    (vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], identity_chart())
}

fn fixed_critical_cubic() -> (Vec<Complex64>, AffineChart) {
    (vec![c(1.5, 0.0), c(0.0, 0.0)], identity_chart())
}

/// `a z^3 - (a+1) z^2 + 1`.
pub fn capture_cubic(a: f64) -> Vec<Complex64> {
    vec![c(a, 0.0), c(-(a + 1.0), 0.0), c(0.0, 0.0), c(1.0, 0.0)]
}

pub const CAPTURE_A0: f64 = -0.25;

pub fn capture_a1() -> f64 {
    (11.0 - 3.0 * 17f64.sqrt()) / 4.0
}

fn capture0() -> (Vec<Complex64>, AffineChart) {
    centered(&capture_cubic(CAPTURE_A0))
}

fn capture1() -> (Vec<Complex64>, AffineChart) {
    centered(&capture_cubic(capture_a1()))
}

/// `z^3 + a z^2` with the free critical point `-2a/3` on a cycle of period 2.
fn period_two_cubic() -> (Vec<Complex64>, AffineChart) {
    let a = c(1.502609590604712, -0.779033852017150);
    centered(&[c(1.0, 0.0), a, c(0.0, 0.0), c(0.0, 0.0)])
}

/// Odd degree-7 coefficients `[z^7, z^5, z^3, z]`.
pub const DEGREE7_G0_COEFFICIENTS: [f64; 4] = [0.4590370886487578, 2.418074177297516, 2.9590370886487585, 0.0];
pub const DEGREE7_G1_COEFFICIENTS: [f64; 4] =
    [0.08182176524267852, 0.40478926901827395, 0.06411324230851224, -1.2588542614670832];

fn odd_septic(k: [f64; 4]) -> Vec<Complex64> {
    let z = c(0.0, 0.0);
    vec![c(k[0], 0.0), z, c(k[1], 0.0), z, c(k[2], 0.0), z, c(k[3], 0.0), z]
}

fn degree7_g0() -> (Vec<Complex64>, AffineChart) {
    centered(&odd_septic(DEGREE7_G0_COEFFICIENTS))
}

fn degree7_g1() -> (Vec<Complex64>, AffineChart) {
    centered(&odd_septic(DEGREE7_G1_COEFFICIENTS))
}

/// Coefficients `[1, b, c, 0]` of the cubic with fixed points `0`, `α`, `ᾱ`
/// whose multipliers at `α` and `ᾱ` are `μ` and `μ̄`. For `μ = 0` this is
/// `z^3 + 3z/2`.
pub fn f_mu_coefficients(mu: Complex64) -> Result<Vec<Complex64>, DynamicsError> {
    let (zeta, xi) = (mu.re, mu.im);
    if !mu.is_finite() || zeta == 1.0 {
        return Err(DynamicsError::InvalidParameter(format!("multiplier {mu} needs a real part other than 1")));
    }
    let root = c(2.0 * (1.0 - zeta), 0.0).sqrt();
    let b = -c(2.0 * xi, 0.0) / root;
    let lin = -(2.0 * zeta - 6.0 + 2.0 * xi * xi / (zeta - 1.0)) / 4.0;
    Ok(vec![c(1.0, 0.0), b, c(lin, 0.0), c(0.0, 0.0)])
}

/// The fixed point `α` of the cubic from [`f_mu_coefficients`].
pub fn f_mu_alpha(mu: Complex64) -> Complex64 {
    let (zeta, xi) = (mu.re, mu.im);
    let root = c(2.0 * (1.0 - zeta), 0.0).sqrt();
    c(xi, 0.0) / root + c((1.0 - zeta) / 2.0, 0.0).sqrt() * Complex64::i()
}

/// Monic centered model of the `μ` family member.
pub fn f_mu(mu: Complex64) -> Result<(SchemaPolynomial, AffineChart), DynamicsError> {
    let (coeffs, chart) = monic_centered(&f_mu_coefficients(mu)?)?;
    Ok((SchemaPolynomial::unicritical_like(3, coeffs)?, chart))
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "basilica",
        summary: "z^2 - 1; rays 1/3 and 2/3 land at the alpha fixed point",
        degree: 2,
        depth: 5,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "1/3,2/3", portrait: "1/5,7/10" },
        polynomial: Some(basilica),
    },
    Fixture {
        name: "rabbit",
        summary: "z^2 + c with a superattracting 3-cycle; rays 1/7, 2/7, 4/7 co-land",
        degree: 2,
        depth: 5,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "1/7,2/7,4/7", portrait: "5/63,73/126" },
        polynomial: Some(rabbit),
    },
    Fixture {
        name: "airplane",
        summary: "real z^2 + c with a superattracting 3-cycle",
        degree: 2,
        depth: 5,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "3/7,4/7;1/7,6/7;2/7,5/7", portrait: "2/9,13/18" },
        polynomial: Some(airplane),
    },
    Fixture {
        name: "quartic",
        summary: "z^4 - 1; rays 2/5 and 3/5 land at a common fixed point",
        degree: 4,
        depth: 4,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "2/5,3/5", portrait: "7/60,11/30,37/60,13/15" },
        polynomial: Some(quartic),
    },
    Fixture {
        name: "fixed-critical-cubic",
        summary: "z^3 + 3z/2 with both critical points fixed; rays 0 and 1/2 land at 0",
        degree: 3,
        depth: 4,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "0,1/2", portrait: "1/24,3/8;13/24,7/8" },
        polynomial: Some(fixed_critical_cubic),
    },
    Fixture {
        name: "capture-a0",
        summary: "a z^3 - (a+1) z^2 + 1 at a = -1/4; the free critical point maps to 0",
        degree: 3,
        depth: 4,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "1/8,3/8", portrait: "11/240,91/240;11/720,491/720" },
        polynomial: Some(capture0),
    },
    Fixture {
        name: "capture-a1",
        summary: "a z^3 - (a+1) z^2 + 1 at a = (11 - 3 sqrt 17)/4; the free critical point maps to a fixed point",
        degree: 3,
        depth: 4,
        ray_tolerance: 1e-7,
        source: Source::Pullback { level0: "1/8,3/8", portrait: "11/240,91/240;1/24,17/24" },
        polynomial: Some(capture1),
    },
    Fixture {
        name: "period-two-cubic",
        summary: "z^3 + a z^2 with the free critical point of period 2; the class {1/4,5/8} has period 2, not 1",
        degree: 3,
        depth: 5,
        ray_tolerance: 1e-10,
        source: Source::Pullback { level0: "1/4,5/8;3/4,7/8", portrait: "0,2/3;61/240,47/80" },
        polynomial: Some(period_two_cubic),
    },
    Fixture {
        name: "degree7-g0",
        summary: "odd degree-7 polynomial, postcritically finite; sampled to depth 2",
        degree: 7,
        depth: 2,
        ray_tolerance: 1e-10,
        source: Source::Data(DEGREE7_G0),
        polynomial: Some(degree7_g0),
    },
    Fixture {
        name: "degree7-g1",
        summary: "odd degree-7 polynomial with two critical points mapping to 0; sampled to depth 2",
        degree: 7,
        depth: 2,
        ray_tolerance: 1e-7,
        source: Source::Data(DEGREE7_G1),
        polynomial: Some(degree7_g1),
    },
    Fixture {
        name: "linked-chords",
        summary: "two crossing diameters; fails verification",
        degree: 2,
        depth: 0,
        ray_tolerance: 1e-10,
        source: Source::Broken { classes: "0,1/2;1/4,3/4" },
        polynomial: None,
    },
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
