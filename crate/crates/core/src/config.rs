//! Plain-text potential definitions.
//!
//! One `key = value` entry per line; `#` starts a comment. Recognised keys:
//!
//! | key      | value                                   | repeat |
//! |----------|-----------------------------------------|--------|
//! | `name`   | free text                               | ≤ 1    |
//! | `layer`  | `width, height`                         | any    |
//! | `x1`     | `layer[i].height` or `layer[i].width`   | ≤ 1    |
//! | `x2`     | same as `x1`                            | ≤ 1    |
//! | `region` | `re_min, re_max, im_min, im_max`        | ≤ 1    |
//! | `grid`   | `n1, n2, x1_lo, x1_hi, x2_lo, x2_hi`    | ≤ 1    |
//!
//! Layers are listed from the origin outward and indexed from 0. Any other
//! key is an error.

use std::path::Path;

use crate::error::{Error, Result};
use crate::exceptional::ParamGrid;
use crate::potential::{Binding, Field, Layer, PotentialSpec};
use crate::zeros::SearchRegion;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub spec: PotentialSpec,
    pub region: Option<SearchRegion>,
    pub grid: Option<ParamGrid>,
}

pub fn load(path: impl AsRef<Path>) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config> {
    let mut name: Option<String> = None;
    let mut layers = Vec::new();
    let mut bindings: [Option<Binding>; 2] = [None, None];
    let mut region = None;
    let mut grid = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => {
                if name.replace(value.to_string()).is_some() {
                    return Err(Error::config(line_no, "duplicate `name`"));
                }
            }
            "layer" => {
                let v = numbers(value, 2, line_no)?;
                let layer =
                    Layer::new(v[0], v[1]).map_err(|e| Error::config(line_no, e.to_string()))?;
                layers.push(layer);
            }
            "x1" | "x2" => {
                let slot = if key == "x1" { 0 } else { 1 };
                if bindings[slot].is_some() {
                    return Err(Error::config(line_no, format!("duplicate `{key}`")));
                }
                bindings[slot] = Some(binding(value, line_no)?);
            }
            "region" => {
                let v = numbers(value, 4, line_no)?;
                let r = SearchRegion::new(v[0], v[1], v[2], v[3])
                    .map_err(|e| Error::config(line_no, e.to_string()))?;
                if region.replace(r).is_some() {
                    return Err(Error::config(line_no, "duplicate `region`"));
                }
            }
            "grid" => {
                let g = ParamGrid::parse(value).map_err(|msg| Error::config(line_no, msg))?;
                if grid.replace(g).is_some() {
                    return Err(Error::config(line_no, "duplicate `grid`"));
                }
            }
            other => return Err(Error::config(line_no, format!("unknown key `{other}`"))),
        }
    }

    let spec = PotentialSpec::new(name.unwrap_or_else(|| "unnamed".into()), layers, bindings)
        .map_err(|e| Error::config(0, e.to_string()))?;
    Ok(Config { spec, region, grid })
}

/// Renders a config that `parse` reads back to the same value.
pub fn render(cfg: &Config) -> String {
    let mut out = format!("name = {}\n", cfg.spec.name);
    for l in cfg.spec.layers() {
        out.push_str(&format!("layer = {:?}, {:?}\n", l.width, l.height));
    }
    for (i, b) in cfg.spec.bindings().iter().enumerate() {
        if let Some(b) = b {
            out.push_str(&format!("x{} = {}\n", i + 1, b));
        }
    }
    if let Some(r) = &cfg.region {
        let r = r.rect();
        out.push_str(&format!(
            "region = {:?}, {:?}, {:?}, {:?}\n",
            r.re_min, r.re_max, r.im_min, r.im_max
        ));
    }
    if let Some(g) = &cfg.grid {
        out.push_str(&format!(
            "grid = {}, {}, {:?}, {:?}, {:?}, {:?}\n",
            g.n1, g.n2, g.x1_lo, g.x1_hi, g.x2_lo, g.x2_hi
        ));
    }
    out
}

pub(crate) fn numbers(value: &str, n: usize, line: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = value
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::config(line, format!("bad number in `{value}`: {e}")))?;
    if v.len() != n {
        return Err(Error::config(
            line,
            format!("expected {n} comma-separated numbers, got {}", v.len()),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::config(line, "numbers must be finite"));
    }
    Ok(v)
}

fn binding(value: &str, line: usize) -> Result<Binding> {
    let bad = || {
        Error::config(
            line,
            format!("expected `layer[i].height|width`, got `{value}`"),
        )
    };
    let rest = value.strip_prefix("layer[").ok_or_else(bad)?;
    let (index, field) = rest.split_once("].").ok_or_else(bad)?;
    let layer: usize = index.trim().parse().map_err(|_| bad())?;
    let field = match field.trim() {
        "height" => Field::Height,
        "width" => Field::Width,
        _ => return Err(bad()),
    };
    Ok(Binding { layer, field })
}
