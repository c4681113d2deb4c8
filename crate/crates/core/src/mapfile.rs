//! JSON map files: `{"nodes": [["0", "0"], ["1/2", "1"], ["1", "0"]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, parse_rational};

#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    nodes: Vec<(String, String)>,
}

/// Parses a map file. Coordinates are `p/q` strings; the first malformed
/// coordinate or violated map invariant is reported with its node index.
pub fn parse_map_json(text: &str) -> Result<PLMap> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("map file: {e}")))?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for (index, (x, y)) in file.nodes.iter().enumerate() {
        let parse = |s: &str| parse_rational(s).map_err(|e| Error::InvalidMap { index, reason: e.to_string() });
        nodes.push((parse(x)?, parse(y)?));
    }
    PLMap::new(nodes)
}

pub fn dump_map_json(m: &PLMap) -> String {
    let file = MapFile { nodes: m.nodes().iter().map(|(x, y)| (fmt_rational(x), fmt_rational(y))).collect() };
    serde_json::to_string_pretty(&file).expect("map serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for m in [PLMap::tent(), PLMap::snoha(3), PLMap::flip()] {
            assert_eq!(parse_map_json(&dump_map_json(&m)).unwrap(), m);
        }
    }

    #[test]
    fn first_violation() {
        let e = parse_map_json(r#"{"nodes": [["0","0"], ["1/2","x"], ["1","0"]]}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidMap { index: 1, .. }), "{e}");
        let e = parse_map_json(r#"{"nodes": [["0","0"], ["1/2","3/2"], ["1","0"]]}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidMap { index: 1, .. }), "{e}");
        assert!(matches!(parse_map_json("[]").unwrap_err(), Error::Parse(_)));
    }
}
