//! Edge flows from vector fields and trajectories.

mod synthetic;
mod trajectory;

pub use synthetic::{synthetic_trajectories, Region, SyntheticParams, SyntheticTrajectory};
pub use trajectory::{
    lift_path, lift_trajectory, parse_trajectories, project_equirectangular, read_trajectories,
    shortest_path, snap, ParsedTrajectories, Sample, Trajectory,
};

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::complex::{Cochain, HexMeta, Point, SimplicialComplex};
use crate::error::{Error, Result};

/// Planar vector field.
#[derive(Clone)]
pub struct VectorField(Arc<dyn Fn(Point) -> Point + Send + Sync>);

impl VectorField {
    pub fn new(f: impl Fn(Point) -> Point + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(v: Point) -> Self {
        Self::new(move |_| v)
    }

    pub fn eval(&self, p: Point) -> Point {
        (self.0)(p)
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("VectorField(..)")
    }
}

/// Radius of the two balls supporting [`two_vortex_field`].
pub const FIELD_BALL_RADIUS: f64 = 0.7;

/// `[cos(x + y), sin(x - y)]` on the closed balls of radius 0.7 around
/// `(pi/4, pi/4)` and `(-pi/4, -pi/4)`, zero elsewhere.
pub fn two_vortex_field() -> VectorField {
    VectorField::new(|[x, y]| {
        let inside = |cx: f64, cy: f64| (x - cx).hypot(y - cy) <= FIELD_BALL_RADIUS;
        if inside(FRAC_PI_4, FRAC_PI_4) || inside(-FRAC_PI_4, -FRAC_PI_4) {
            [(x + y).cos(), (x - y).sin()]
        } else {
            [0.0, 0.0]
        }
    })
}

/// Flux of `field` across each hexagon side, by midpoint quadrature:
/// `f_e = (F(midpoint) . n_e) * length`.
pub fn discretize_field(
    field: &VectorField,
    complex: &SimplicialComplex,
    meta: &HexMeta,
) -> Result<Cochain> {
    if meta.sides.len() < complex.n_edges() {
        return Err(Error::MissingHexMeta(meta.sides.len()));
    }
    if meta.sides.len() > complex.n_edges() {
        return Err(Error::DimensionMismatch {
            expected: complex.n_edges(),
            got: meta.sides.len(),
        });
    }
    let values = meta.sides.iter().map(|side| {
        let v = field.eval(side.midpoint);
        (v[0] * side.normal[0] + v[1] * side.normal[1]) * side.length
    });
    Ok(Cochain::edge_flow(DVector::from_iterator(meta.sides.len(), values)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{hex_complex, hex_complex_from_cells, Rect};

    #[test]
    fn field_examples() {
        let f = two_vortex_field();
        let v = f.eval([FRAC_PI_4, FRAC_PI_4]);
        assert!(v[0].abs() < 1e-15 && v[1] == 0.0);
        assert_eq!(f.eval([2.0, 2.0]), [0.0, 0.0]);
        assert_eq!(f.eval([FRAC_PI_4 + 0.7 + 1e-9, FRAC_PI_4]), [0.0, 0.0]);
        let p = [-FRAC_PI_4 + 0.3, -FRAC_PI_4];
        assert_eq!(f.eval(p), [(p[0] + p[1]).cos(), (p[0] - p[1]).sin()]);
        // on the boundary circle (closed ball)
        let edge = [-FRAC_PI_4, -FRAC_PI_4 + 0.5];
        assert_ne!(f.eval(edge), [0.0, 0.0]);
    }

    #[test]
    fn zero_and_constant_fields() {
        let (x, _, meta) = hex_complex(Rect::new(-2.0, 2.0, -2.0, 2.0), 0.5).unwrap();
        let zero = discretize_field(&VectorField::constant([0.0, 0.0]), &x, &meta).unwrap();
        assert_eq!(zero.values, DVector::zeros(x.n_edges()));

        let (two, _, meta) = hex_complex_from_cells(&[(0, 0), (1, 0)], 0.4, [0.0, 0.0]).unwrap();
        let f = discretize_field(&VectorField::constant([1.0, 0.0]), &two, &meta).unwrap();
        assert_eq!(two.n_edges(), 1);
        assert!((f.values[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn linear_in_the_field_and_orientation_equivariant() {
        let (x, _, meta) = hex_complex(Rect::new(-2.0, 2.0, -2.0, 2.0), 0.4).unwrap();
        let a = VectorField::new(|[x, y]| [x * y, x - 2.0 * y]);
        let b = two_vortex_field();
        let (a2, b2) = (a.clone(), b.clone());
        let sum = VectorField::new(move |p| {
            let (u, v) = (a2.eval(p), b2.eval(p));
            [2.0 * u[0] - v[0], 2.0 * u[1] - v[1]]
        });
        let fa = discretize_field(&a, &x, &meta).unwrap().values;
        let fb = discretize_field(&b, &x, &meta).unwrap().values;
        let fs = discretize_field(&sum, &x, &meta).unwrap().values;
        assert!((fs - (fa.clone() * 2.0 - fb)).amax() < 1e-12);

        let mut flipped = meta.clone();
        for side in &mut flipped.sides {
            side.normal = [-side.normal[0], -side.normal[1]];
        }
        let ff = discretize_field(&a, &x, &flipped).unwrap().values;
        assert_eq!(ff, -fa);
    }

    #[test]
    fn missing_metadata() {
        let (x, _, mut meta) = hex_complex(Rect::new(-1.0, 1.0, -1.0, 1.0), 0.3).unwrap();
        meta.sides.pop();
        assert!(matches!(
            discretize_field(&two_vortex_field(), &x, &meta),
            Err(Error::MissingHexMeta(_))
        ));
    }
}
