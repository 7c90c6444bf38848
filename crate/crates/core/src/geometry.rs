//! Resonator-chain and unit-cell geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

const DEFAULT_DELTA: f64 = 1e-3;
const DEFAULT_VB: f64 = 1.0;

/// A finite chain of `N` resonators `D_i = (x_i^L, x_i^R)` with `x_1^L = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub lengths: Vec<f64>,
    pub spacings: Vec<f64>,
    /// Gauge potential per resonator; a uniform chain repeats one value.
    pub gammas: Vec<f64>,
    pub delta: f64,
    pub v_b: f64,
    /// Per-resonator wave speeds, only used for complex-material systems.
    pub speeds: Option<Vec<C64>>,
}

/// One period of an infinite chain. `spacings[K-1]` links the cell to its
/// translate, so the cell length is `L = Σℓ + Σs`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCellSpec {
    pub lengths: Vec<f64>,
    pub spacings: Vec<f64>,
    pub gamma: f64,
    pub delta: f64,
    pub v_b: f64,
    pub speeds: Option<Vec<C64>>,
}

fn check_positive(name: &str, xs: &[f64]) -> Result<()> {
    for (i, &x) in xs.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Validation(format!(
                "non-positive {name} at index {i}: {x}"
            )));
        }
    }
    Ok(())
}

fn check_scalars(delta: f64, v_b: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Validation(format!("delta must be positive, got {delta}")));
    }
    if !(v_b.is_finite() && v_b > 0.0) {
        return Err(Error::Validation(format!("v_b must be positive, got {v_b}")));
    }
    Ok(())
}

fn check_speeds(speeds: &Option<Vec<C64>>, n: usize) -> Result<()> {
    if let Some(v) = speeds {
        if v.len() != n {
            return Err(Error::Validation(format!(
                "speeds has {} entries, expected {n}",
                v.len()
            )));
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0) {
            return Err(Error::Validation("speeds must be finite and non-zero".into()));
        }
    }
    Ok(())
}

impl ChainSpec {
    pub fn new(
        lengths: Vec<f64>,
        spacings: Vec<f64>,
        gammas: Vec<f64>,
        delta: f64,
        v_b: f64,
        speeds: Option<Vec<C64>>,
    ) -> Result<Self> {
        let n = lengths.len();
        if n == 0 {
            return Err(Error::Validation("chain needs at least one resonator".into()));
        }
        if spacings.len() + 1 != n {
            return Err(Error::Validation(format!(
                "inconsistent list lengths: {n} lengths need {} spacings, got {}",
                n - 1,
                spacings.len()
            )));
        }
        if gammas.len() != n {
            return Err(Error::Validation(format!(
                "inconsistent list lengths: {n} lengths but {} gammas",
                gammas.len()
            )));
        }
        check_positive("length", &lengths)?;
        check_positive("spacing", &spacings)?;
        if gammas.iter().any(|g| !g.is_finite()) {
            return Err(Error::Validation("gamma must be finite".into()));
        }
        check_scalars(delta, v_b)?;
        check_speeds(&speeds, n)?;
        Ok(ChainSpec { lengths, spacings, gammas, delta, v_b, speeds })
    }

    pub fn uniform(n: usize, length: f64, spacing: f64, gamma: f64, delta: f64, v_b: f64) -> Result<Self> {
        ChainSpec::new(
            vec![length; n],
            vec![spacing; n.saturating_sub(1)],
            vec![gamma; n],
            delta,
            v_b,
            None,
        )
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// True when all lengths, spacings and gammas coincide.
    pub fn is_uniform(&self) -> bool {
        let same = |xs: &[f64]| xs.windows(2).all(|w| w[0] == w[1]);
        same(&self.lengths) && same(&self.spacings) && same(&self.gammas)
    }
}

impl UnitCellSpec {
    pub fn new(
        lengths: Vec<f64>,
        spacings: Vec<f64>,
        gamma: f64,
        delta: f64,
        v_b: f64,
        speeds: Option<Vec<C64>>,
    ) -> Result<Self> {
        let k = lengths.len();
        if k == 0 {
            return Err(Error::Validation("unit cell needs at least one resonator".into()));
        }
        if spacings.len() != k {
            return Err(Error::Validation(format!(
                "inconsistent list lengths: a cell of {k} resonators needs {k} spacings, got {}",
                spacings.len()
            )));
        }
        check_positive("length", &lengths)?;
        check_positive("spacing", &spacings)?;
        if !gamma.is_finite() {
            return Err(Error::Validation("gamma must be finite".into()));
        }
        check_scalars(delta, v_b)?;
        check_speeds(&speeds, k)?;
        Ok(UnitCellSpec { lengths, spacings, gamma, delta, v_b, speeds })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn cell_length(&self) -> f64 {
        self.lengths.iter().sum::<f64>() + self.spacings.iter().sum::<f64>()
    }

    /// Half-width of the standard Brillouin zone, `π/L`.
    pub fn zone_edge(&self) -> f64 {
        std::f64::consts::PI / self.cell_length()
    }

    /// Finite chain made of `cells` copies of the cell (the trailing link
    /// spacing is dropped).
    pub fn repeat(&self, cells: usize) -> Result<ChainSpec> {
        if cells == 0 {
            return Err(Error::Validation("need at least one cell".into()));
        }
        let k = self.len();
        let n = k * cells;
        let lengths: Vec<f64> = (0..n).map(|i| self.lengths[i % k]).collect();
        let spacings: Vec<f64> = (0..n - 1).map(|i| self.spacings[i % k]).collect();
        let speeds = self
            .speeds
            .as_ref()
            .map(|v| (0..n).map(|i| v[i % k]).collect());
        ChainSpec::new(lengths, spacings, vec![self.gamma; n], self.delta, self.v_b, speeds)
    }
}

#[derive(Debug, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct RawChain {
    #[serde(skip_serializing_if = "Option::is_none")]
    lengths: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spacings: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gammas: Option<Vec<f64>>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speeds: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCellGeometry {
    lengths: Vec<f64>,
    spacings: Vec<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    cell: RawCellGeometry,
    gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speeds: Option<Vec<[f64; 2]>>,
}

fn parse_speeds(raw: Option<Vec<[f64; 2]>>) -> Option<Vec<C64>> {
    raw.map(|v| v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

fn pack_speeds(speeds: &Option<Vec<C64>>) -> Option<Vec<[f64; 2]>> {
    speeds.as_ref().map(|v| v.iter().map(|z| [z.re, z.im]).collect())
}

/// Parses a chain configuration. Either explicit `lengths`/`spacings`/`gammas`
/// lists or the uniform shorthand `N`/`length`/`spacing`/`gamma` may be used,
/// and the two can be mixed per field. `delta` defaults to 1e-3, `v_b` to 1.
pub fn chain_from_config(document: &str) -> Result<ChainSpec> {
    let raw: RawChain =
        serde_json::from_str(document).map_err(|e| Error::Config(e.to_string()))?;

    let n = match (&raw.lengths, raw.n) {
        (Some(l), Some(n)) if l.len() != n => {
            return Err(Error::Validation(format!(
                "inconsistent list lengths: N = {n} but {} lengths",
                l.len()
            )))
        }
        (Some(l), _) => l.len(),
        (None, Some(n)) => n,
        (None, None) => {
            return Err(Error::Config("either \"lengths\" or \"N\" is required".into()))
        }
    };
    if n == 0 {
        return Err(Error::Validation("chain needs at least one resonator".into()));
    }

    let lengths = match (raw.lengths, raw.length) {
        (Some(l), None) => l,
        (None, Some(x)) => vec![x; n],
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either \"lengths\" or \"length\", not both".into()))
        }
        (None, None) => return Err(Error::Config("missing \"lengths\"/\"length\"".into())),
    };
    let spacings = match (raw.spacings, raw.spacing) {
        (Some(s), None) => s,
        (None, Some(x)) => vec![x; n - 1],
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either \"spacings\" or \"spacing\", not both".into()))
        }
        (None, None) if n == 1 => Vec::new(),
        (None, None) => return Err(Error::Config("missing \"spacings\"/\"spacing\"".into())),
    };
    let gammas = match (raw.gammas, raw.gamma) {
        (Some(g), None) => g,
        (None, Some(x)) => vec![x; n],
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either \"gammas\" or \"gamma\", not both".into()))
        }
        (None, None) => return Err(Error::Config("missing \"gammas\"/\"gamma\"".into())),
    };
    ChainSpec::new(
        lengths,
        spacings,
        gammas,
        raw.delta.unwrap_or(DEFAULT_DELTA),
        raw.v_b.unwrap_or(DEFAULT_VB),
        parse_speeds(raw.speeds),
    )
}

/// Serialises a chain with explicit lists; `chain_from_config` reads it back
/// unchanged.
pub fn chain_to_config(chain: &ChainSpec) -> String {
    let raw = RawChain {
        lengths: Some(chain.lengths.clone()),
        spacings: Some(chain.spacings.clone()),
        gammas: Some(chain.gammas.clone()),
        delta: Some(chain.delta),
        v_b: Some(chain.v_b),
        speeds: pack_speeds(&chain.speeds),
        ..RawChain::default()
    };
    serde_json::to_string(&raw).expect("chain serialisation cannot fail")
}

pub fn cell_from_config(document: &str) -> Result<UnitCellSpec> {
    let raw: RawCell =
        serde_json::from_str(document).map_err(|e| Error::Config(e.to_string()))?;
    UnitCellSpec::new(
        raw.cell.lengths,
        raw.cell.spacings,
        raw.gamma,
        raw.delta.unwrap_or(DEFAULT_DELTA),
        raw.v_b.unwrap_or(DEFAULT_VB),
        parse_speeds(raw.speeds),
    )
}

pub fn cell_to_config(cell: &UnitCellSpec) -> String {
    let raw = RawCell {
        cell: RawCellGeometry { lengths: cell.lengths.clone(), spacings: cell.spacings.clone() },
        gamma: cell.gamma,
        delta: Some(cell.delta),
        v_b: Some(cell.v_b),
        speeds: pack_speeds(&cell.speeds),
    };
    serde_json::to_string(&raw).expect("cell serialisation cannot fail")
}

/// Endpoints `(x_i^L, x_i^R)` of every resonator.
pub fn resonator_positions(chain: &ChainSpec) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(chain.len());
    let mut x = 0.0;
    for (i, &l) in chain.lengths.iter().enumerate() {
        out.push((x, x + l));
        x += l;
        if let Some(s) = chain.spacings.get(i) {
            x += s;
        }
    }
    out
}

/// Chain of `2n+1` resonators with the gauge potential switching sign at
/// site `n+1`: `-gamma` on sites `1..=n` and `+gamma` on `n+1..=2n+1`.
/// With `gamma > 0` both halves push their modes towards the interface.
pub fn interface_chain(
    n: usize,
    gamma: f64,
    length: f64,
    spacing: f64,
    delta: f64,
    v_b: f64,
) -> Result<ChainSpec> {
    if n == 0 {
        return Err(Error::Validation("interface chain needs n >= 1".into()));
    }
    if gamma == 0.0 {
        return Err(Error::Validation("gamma = 0 has no interface".into()));
    }
    let total = 2 * n + 1;
    let gammas = (0..total).map(|i| if i < n { -gamma } else { gamma }).collect();
    ChainSpec::new(
        vec![length; total],
        vec![spacing; total - 1],
        gammas,
        delta,
        v_b,
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_expands() {
        let c = chain_from_config(
            r#"{"N":3, "length":1, "spacing":1, "gamma":1, "delta":0.001, "v_b":1}"#,
        )
        .unwrap();
        assert_eq!(c.lengths, vec![1.0; 3]);
        assert_eq!(c.spacings, vec![1.0; 2]);
        assert_eq!(c.gammas, vec![1.0; 3]);
        assert!(c.is_uniform());
    }

    #[test]
    fn explicit_lists_pass_through() {
        let c = chain_from_config(r#"{"lengths":[1,1], "spacings":[2], "gamma":0.5}"#).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.spacings, vec![2.0]);
    }

    #[test]
    fn rejects_bad_documents() {
        let e = chain_from_config(r#"{"lengths":[1,-1], "spacings":[1], "gamma":1}"#).unwrap_err();
        assert!(e.to_string().contains("non-positive length"));
        assert!(chain_from_config(r#"{"N":2, "length":1, "spacing":1, "gamma":1, "colour":3}"#).is_err());
        assert!(chain_from_config(r#"{"lengths":[1,1], "spacings":[1,1], "gamma":1}"#).is_err());
        assert!(chain_from_config(r#"{"lengths":[1,1], "spacings":[1], "gammas":[1]}"#).is_err());
        assert!(chain_from_config("not json").unwrap_err().is_validation());
    }

    #[test]
    fn speeds_parse() {
        let c = chain_from_config(
            r#"{"N":2, "length":1, "spacing":1, "gamma":0, "speeds":[[1,1.38],[1,-1.42]]}"#,
        )
        .unwrap();
        assert_eq!(c.speeds.unwrap()[1], C64::new(1.0, -1.42));
    }

    #[test]
    fn positions() {
        let c = ChainSpec::uniform(2, 1.0, 1.0, 0.0, 1e-3, 1.0).unwrap();
        assert_eq!(resonator_positions(&c), vec![(0.0, 1.0), (2.0, 3.0)]);
        let c = ChainSpec::uniform(1, 2.0, 1.0, 0.0, 1e-3, 1.0).unwrap();
        assert_eq!(resonator_positions(&c), vec![(0.0, 2.0)]);
        let c = ChainSpec::new(vec![1.0; 3], vec![1.0, 2.0], vec![0.0; 3], 1e-3, 1.0, None).unwrap();
        assert_eq!(resonator_positions(&c), vec![(0.0, 1.0), (2.0, 3.0), (5.0, 6.0)]);
    }

    #[test]
    fn interface_layout() {
        let c = interface_chain(1, 1.0, 1.0, 1.0, 1e-3, 1.0).unwrap();
        assert_eq!(c.gammas, vec![-1.0, 1.0, 1.0]);
        let c = interface_chain(2, 0.5, 1.0, 1.0, 1e-3, 1.0).unwrap();
        assert_eq!(c.gammas, vec![-0.5, -0.5, 0.5, 0.5, 0.5]);
        assert!(interface_chain(1, 0.0, 1.0, 1.0, 1e-3, 1.0).is_err());
    }

    #[test]
    fn cell_roundtrip_and_repeat() {
        let cell = cell_from_config(r#"{"cell":{"lengths":[1,1],"spacings":[1,2]},"gamma":0.5}"#).unwrap();
        assert_eq!(cell.cell_length(), 5.0);
        assert_eq!(cell_from_config(&cell_to_config(&cell)).unwrap(), cell);
        let chain = cell.repeat(3).unwrap();
        assert_eq!(chain.spacings, vec![1.0, 2.0, 1.0, 2.0, 1.0]);
        assert!(cell_from_config(r#"{"cell":{"lengths":[1],"spacings":[]},"gamma":0}"#).is_err());
    }
}
