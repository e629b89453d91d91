//! Piecewise-constant radial potentials with two control parameters.
//!
//! Units follow ħ²/2m = 1, so a layer height is an energy directly
//! comparable with k². The radial coordinate starts at the origin, where
//! the regular solution vanishes; layers are laid out outward from there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One radial shell of constant potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub width: f64,
    pub height: f64,
}

impl Layer {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        let layer = Layer { width, height };
        layer.check(0)?;
        Ok(layer)
    }

    fn check(&self, index: usize) -> Result<()> {
        if !self.width.is_finite() || self.width <= 0.0 {
            return Err(Error::InvalidParameter {
                layer: index,
                width: self.width,
            });
        }
        if !self.height.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "layer {index} has non-finite height"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Width,
    Height,
}

/// A (layer, field) slot driven by one control parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binding {
    pub layer: usize,
    pub field: Field,
}

impl Binding {
    pub fn height(layer: usize) -> Self {
        Binding {
            layer,
            field: Field::Height,
        }
    }

    pub fn width(layer: usize) -> Self {
        Binding {
            layer,
            field: Field::Width,
        }
    }
}

impl std::fmt::Display for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let field = match self.field {
            Field::Width => "width",
            Field::Height => "height",
        };
        write!(f, "layer[{}].{}", self.layer, field)
    }
}

/// A point (x₁, x₂) in control-parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub x1: f64,
    pub x2: f64,
}

impl ParamPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        ParamPoint { x1, x2 }
    }

    pub fn get(&self, i: usize) -> f64 {
        match i {
            0 => self.x1,
            1 => self.x2,
            _ => panic!("parameter index {i} out of range"),
        }
    }

    pub fn offset(&self, d1: f64, d2: f64) -> Self {
        ParamPoint {
            x1: self.x1 + d1,
            x2: self.x2 + d2,
        }
    }

    pub fn distance(&self, other: &ParamPoint) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// Layer list plus the bindings of x₁ and x₂.
///
/// A binding may be absent, in which case the corresponding parameter has
/// no effect on the potential and all its derivatives vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub name: String,
    layers: Vec<Layer>,
    bindings: [Option<Binding>; 2],
}

impl PotentialSpec {
    pub fn new(
        name: impl Into<String>,
        layers: Vec<Layer>,
        bindings: [Option<Binding>; 2],
    ) -> Result<Self> {
        for (i, layer) in layers.iter().enumerate() {
            layer.check(i)?;
        }
        for b in bindings.iter().flatten() {
            if b.layer >= layers.len() {
                return Err(Error::InvalidPotential(format!(
                    "binding {b} refers to a missing layer ({} layers)",
                    layers.len()
                )));
            }
        }
        if let [Some(a), Some(b)] = bindings {
            if a == b {
                return Err(Error::InvalidPotential(format!(
                    "x1 and x2 are both bound to {a}"
                )));
            }
        }
        Ok(PotentialSpec {
            name: name.into(),
            layers,
            bindings,
        })
    }

    /// The potential V ≡ 0.
    pub fn free() -> Self {
        PotentialSpec {
            name: "free".into(),
            layers: Vec::new(),
            bindings: [None, None],
        }
    }

    /// Inner trap of width 1.5 at the origin, then two barriers of width 1
    /// separated by a well of width 1. The barrier heights are x₁ and x₂.
    pub fn demo_double_barrier() -> Self {
        let layers = vec![
            Layer {
                width: 1.5,
                height: 0.0,
            },
            Layer {
                width: 1.0,
                height: 14.5,
            },
            Layer {
                width: 1.0,
                height: 0.0,
            },
            Layer {
                width: 1.0,
                height: 5.0,
            },
        ];
        PotentialSpec::new(
            "double-barrier",
            layers,
            [Some(Binding::height(1)), Some(Binding::height(3))],
        )
        .expect("demo potential is valid")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn bindings(&self) -> [Option<Binding>; 2] {
        self.bindings
    }

    /// The parameter point read off the base values of the bound slots.
    /// Unbound parameters read as zero.
    pub fn base_point(&self) -> ParamPoint {
        let read = |b: Option<Binding>| {
            b.map_or(0.0, |b| match b.field {
                Field::Width => self.layers[b.layer].width,
                Field::Height => self.layers[b.layer].height,
            })
        };
        ParamPoint::new(read(self.bindings[0]), read(self.bindings[1]))
    }

    /// Which parameter (0 or 1), if any, drives a given slot.
    pub(crate) fn slot_param(&self, layer: usize, field: Field) -> Option<usize> {
        self.bindings
            .iter()
            .position(|b| *b == Some(Binding { layer, field }))
    }

    /// Outer radius R = Σ widths at the base values.
    pub fn radius(&self) -> f64 {
        self.layers.iter().map(|l| l.width).sum()
    }

    pub fn max_height(&self) -> f64 {
        self.layers.iter().map(|l| l.height).fold(0.0, f64::max)
    }
}

/// Concrete layer list at a parameter point.
pub fn instantiate(spec: &PotentialSpec, p: ParamPoint) -> Result<Vec<Layer>> {
    if !p.x1.is_finite() || !p.x2.is_finite() {
        return Err(Error::Domain(format!("non-finite parameter point {p:?}")));
    }
    let mut layers = spec.layers.clone();
    for (i, binding) in spec.bindings.iter().enumerate() {
        if let Some(b) = binding {
            let value = p.get(i);
            match b.field {
                Field::Width => layers[b.layer].width = value,
                Field::Height => layers[b.layer].height = value,
            }
        }
    }
    for (i, layer) in layers.iter().enumerate() {
        layer.check(i)?;
    }
    Ok(layers)
}
