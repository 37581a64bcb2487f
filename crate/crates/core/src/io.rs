//! JSON file formats.
//!
//! Ground elements and message indices are 1-based in files and 0-based in
//! the library. Subsets in rank tables and matroids are bitmasks, element
//! `i` at bit `i - 1`.
//!
//! - polymatroid: `{"r": 4, "rank": {"<bitmask>": int, ..}}` or
//!   `{"q": 2, "ambient": 3, "generators": [[row, ..], ..]}`
//! - matroid: `{"r": 3, "independent": [bitmask, ..]}`
//! - network: see [`crate::network::Network`]
//! - solution: `{"q": 2, "k": [..], "n": 2, "global": {"<edge id>": [row, ..]}}`
//! - map: `{"f": {"<edge id>": element}}`

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::FncSolution;
use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};
use crate::matroid::Matroid;
use crate::polymatroid::{DiscretePolymatroid, Representation};
use crate::vector::Subset;

/// Serde adapter storing a 0-based index as its 1-based value.
pub mod one_based {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(D::Error::custom("indices are 1-based; 0 is not allowed"));
        }
        Ok(v as usize - 1)
    }

    pub mod vec {
        use serde::de::Error as _;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| *x as u64 + 1))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
            Vec::<u64>::deserialize(d)?
                .into_iter()
                .map(|v| match v {
                    0 => Err(D::Error::custom("indices are 1-based; 0 is not allowed")),
                    v => Ok(v as usize - 1),
                })
                .collect()
        }
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::de::Error as _;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(
            v: &BTreeMap<String, usize>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            s.collect_map(v.iter().map(|(k, x)| (k, *x as u64 + 1)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<BTreeMap<String, usize>, D::Error> {
            BTreeMap::<String, u64>::deserialize(d)?
                .into_iter()
                .map(|(k, v)| match v {
                    0 => Err(D::Error::custom(format!(
                        "{k:?}: indices are 1-based; 0 is not allowed"
                    ))),
                    v => Ok((k, v as usize - 1)),
                })
                .collect()
        }
    }
}

/// Parses JSON text, naming `what` and the line/column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    // untagged formats report shape errors without a position, so check syntax first
    serde_json::from_str::<serde::de::IgnoredAny>(text)
        .and_then(|_| serde_json::from_str(text))
        .map_err(|e| Error::Input(format!("{what}: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn to_json_pretty<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn de_error<'de, D: Deserializer<'de>>(e: Error) -> D::Error {
    use serde::de::Error as _;
    match e {
        Error::Input(msg) => D::Error::custom(msg),
        other => D::Error::custom(other),
    }
}

fn field_of(q: u32) -> Result<Field> {
    Field::new(q).map_err(|e| Error::Input(e.to_string()))
}

fn mat_of(field: Field, rows: &[Vec<i64>], what: impl Fn() -> String) -> Result<Mat> {
    Mat::from_rows(field, rows).map_err(|e| Error::Input(format!("{}: {e}", what())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RankTableFile {
    r: usize,
    rank: BTreeMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepresentationFile {
    q: u32,
    ambient: usize,
    generators: Vec<Vec<Vec<i64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolymatroidFile {
    Table(RankTableFile),
    Rep(RepresentationFile),
}

/// A polymatroid as read from a file: either an explicit rank table or a
/// representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolymatroidInput {
    Table(DiscretePolymatroid),
    Rep(Representation),
}

impl PolymatroidInput {
    pub fn polymatroid(&self) -> Result<DiscretePolymatroid> {
        match self {
            PolymatroidInput::Table(d) => Ok(d.clone()),
            PolymatroidInput::Rep(rep) => DiscretePolymatroid::from_representation(rep),
        }
    }

    pub fn representation(&self) -> Option<&Representation> {
        match self {
            PolymatroidInput::Rep(rep) => Some(rep),
            PolymatroidInput::Table(_) => None,
        }
    }
}

impl<'de> Deserialize<'de> for PolymatroidInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = PolymatroidFile::deserialize(d).map_err(|_| {
            D::Error::custom(
                "expected {\"r\", \"rank\"} or {\"q\", \"ambient\", \"generators\"} with no other fields",
            )
        })?;
        match file {
            PolymatroidFile::Table(t) => table_from_file(t),
            PolymatroidFile::Rep(r) => rep_from_file(r).map(PolymatroidInput::Rep),
        }
        .map_err(de_error::<D>)
    }
}

fn table_from_file(t: RankTableFile) -> Result<PolymatroidInput> {
    if t.r == 0 || t.r > crate::polymatroid::MAX_GROUND_SET {
        return Err(Error::GroundSetSize(t.r));
    }
    let size = 1usize << t.r;
    let mut rank: Vec<Option<u32>> = vec![None; size];
    for (key, value) in &t.rank {
        let mask: usize = key
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("rank key {key:?} is not a bitmask")))?;
        if mask >= size {
            return Err(Error::Input(format!(
                "rank key {key:?} mentions elements beyond r = {}",
                t.r
            )));
        }
        if rank[mask].replace(*value).is_some() {
            return Err(Error::Input(format!(
                "rank key {key:?} repeats subset {mask}"
            )));
        }
    }
    rank[0].get_or_insert(0);
    let rank = rank
        .into_iter()
        .enumerate()
        .map(|(mask, v)| {
            v.ok_or_else(|| {
                Error::Input(format!("rank of subset {} is missing", Subset(mask as u32)))
            })
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(PolymatroidInput::Table(
        DiscretePolymatroid::from_rank_table(t.r, rank)?,
    ))
}

fn rep_from_file(r: RepresentationFile) -> Result<Representation> {
    let field = field_of(r.q)?;
    if r.ambient == 0 {
        return Err(Error::Input("ambient dimension must be positive".into()));
    }
    let gens = r
        .generators
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            let m = mat_of(field, rows, || format!("generator {}", i + 1))?;
            if m.rows() != r.ambient || m.cols() == 0 {
                return Err(Error::Input(format!(
                    "generator {} must be {} x (>= 1), got {} x {}",
                    i + 1,
                    r.ambient,
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    if gens.is_empty() {
        return Err(Error::Input(
            "a representation needs at least one generator".into(),
        ));
    }
    Representation::new(field, r.ambient, gens)
}

impl Serialize for Representation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("q", &self.field().modulus())?;
        m.serialize_entry("ambient", &self.ambient())?;
        m.serialize_entry("generators", self.generators())?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rep_from_file(RepresentationFile::deserialize(d)?).map_err(de_error::<D>)
    }
}

/// Rank table form, subsets in increasing bitmask order.
impl Serialize for DiscretePolymatroid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Table<'a>(&'a [u32]);
        impl Serialize for Table<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (mask, v) in self.0.iter().enumerate() {
                    m.serialize_entry(&mask.to_string(), v)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("r", &self.ground_set_size())?;
        m.serialize_entry("rank", &Table(self.rank_table()))?;
        m.end()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatroidFile {
    r: usize,
    independent: Vec<u32>,
}

impl Serialize for Matroid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatroidFile {
            r: self.ground_set_size(),
            independent: self.independent_sets().map(Subset::bits).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matroid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MatroidFile::deserialize(d)?;
        Matroid::new(file.r, file.independent.into_iter().map(Subset)).map_err(de_error::<D>)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    q: u32,
    k: Vec<usize>,
    n: usize,
    global: BTreeMap<String, Vec<Vec<i64>>>,
}

impl Serialize for FncSolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("q", &self.field.modulus())?;
        m.serialize_entry("k", &self.k)?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("global", &self.global)?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for FncSolution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SolutionFile::deserialize(d)?;
        let field = field_of(file.q).map_err(de_error::<D>)?;
        let total: usize = file.k.iter().sum();
        let global = file
            .global
            .iter()
            .map(|(id, rows)| {
                let m = mat_of(field, rows, || format!("edge {id:?}"))?;
                if m.rows() != total {
                    return Err(Error::Input(format!(
                        "edge {id:?}: expected {total} rows, got {}",
                        m.rows()
                    )));
                }
                Ok((id.clone(), m))
            })
            .collect::<Result<_>>()
            .map_err(de_error::<D>)?;
        Ok(FncSolution {
            field,
            k: file.k,
            n: file.n,
            global,
        })
    }
}
