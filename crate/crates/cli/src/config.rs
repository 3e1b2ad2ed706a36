//! Configuration schema (TOML with a JSON mirror) and the small prefix
//! grammar for bundle expressions.

use anyhow::{anyhow, bail, Context};
use quiver_odl::chow::BaseSpace;
use quiver_odl::odl::Quantity;
use quiver_odl::quiver::{CaseTag, DimVector, Quiver};
use quiver_odl::resolution::{BundleExpr, ResType};
use quiver_odl::OrbitInvariants;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub quiver: QuiverSection,
    pub orbit: Option<OrbitSection>,
    pub variety: Option<VarietySection>,
    pub bundles: Option<BTreeMap<String, String>>,
    pub report: Option<ReportSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSection {
    pub family: String,
    pub orientation: Option<String>,
    pub n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub d: Vec<u32>,
    pub res_type: Option<String>,
    pub r1: Option<u32>,
    pub r2: Option<u32>,
    pub p1: Option<u32>,
    pub k1: Option<u32>,
    pub k2: Option<u32>,
    pub q1: Option<u32>,
    pub u1: Option<u32>,
    pub k: Option<Vec<u32>>,
    pub t: Option<Vec<u32>>,
    pub r: Option<Vec<u32>>,
    pub p: Option<Vec<u32>>,
    pub q: Option<Vec<u32>>,
    pub rij: Option<Vec<u32>>,
    pub r123: Option<u32>,
    /// dimension of the image sum for D4 (defaults to the
    /// inclusion-exclusion value of the intersection data)
    pub x: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietySection {
    pub base: String,
    #[serde(default)]
    pub cuts: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub quantities: Vec<String>,
}

pub fn load(path: &str) -> anyhow::Result<Config> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    if path.ends_with(".json") {
        serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {path}"))
    }
}

pub fn build_quiver(q: &QuiverSection) -> anyhow::Result<Quiver> {
    let orient = q.orientation.as_deref().unwrap_or("");
    match (q.family.as_str(), orient) {
        ("a2", _) => Ok(Quiver::a2()),
        ("a3", "sink-center") => Ok(Quiver::a3_sink_center()),
        ("a3", "source-center") => Ok(Quiver::a3_source_center()),
        ("a3", "one-way") => Ok(Quiver::a3_one_way()),
        ("an", "one-way") => {
            let n = q.n.ok_or_else(|| anyhow!("an quivers need n"))?;
            Ok(Quiver::a_n_one_way(n))
        }
        ("an", "source-sink-i") => {
            let n = q.n.ok_or_else(|| anyhow!("an quivers need n"))?;
            Ok(Quiver::a_n_source_sink_odd_sources(n))
        }
        ("an", "source-sink-ii") => {
            let n = q.n.ok_or_else(|| anyhow!("an quivers need n"))?;
            if n % 2 == 0 {
                bail!("source-sink-ii needs odd n");
            }
            Ok(Quiver::a_2mp1_type_ii(n))
        }
        ("d4", _) => Ok(Quiver::d4_sink_center()),
        (f, o) => bail!("unknown quiver family/orientation: {f} / {o}"),
    }
}

pub fn parse_res_type(s: &str) -> anyhow::Result<ResType> {
    Ok(match s {
        "i" => ResType::I,
        "ii" => ResType::II,
        "iii" => ResType::III,
        "iv" => ResType::IV,
        "v" => ResType::V,
        other => bail!("unknown resolution type {other} (expected i..v)"),
    })
}

pub fn build_invariants(quiver: &Quiver, o: &OrbitSection) -> anyhow::Result<OrbitInvariants> {
    let need = |v: &Option<u32>, name: &str| {
        v.ok_or_else(|| anyhow!("orbit section needs `{name}` for this quiver case"))
    };
    Ok(match quiver.case_tag {
        CaseTag::A3SinkCenter => OrbitInvariants::A3SinkCenter {
            r1: need(&o.r1, "r1")?,
            r2: need(&o.r2, "r2")?,
            p1: need(&o.p1, "p1")?,
        },
        CaseTag::A3SourceCenter => OrbitInvariants::A3SourceCenter {
            k1: need(&o.k1, "k1")?,
            k2: need(&o.k2, "k2")?,
            q1: need(&o.q1, "q1")?,
        },
        CaseTag::A3OneWay => OrbitInvariants::A3OneWay {
            r1: need(&o.r1, "r1")?,
            k2: need(&o.k2, "k2")?,
            u1: need(&o.u1, "u1")?,
        },
        CaseTag::A2 | CaseTag::AnOneWay => OrbitInvariants::AnOneWay {
            k: o.k.clone().ok_or_else(|| anyhow!("orbit section needs `k`"))?,
            t: o.t.clone().unwrap_or_default(),
        },
        CaseTag::A2mSourceSink | CaseTag::A2mp1TypeI | CaseTag::A2mp1TypeII => {
            OrbitInvariants::SourceSink {
                r: o.r.clone().ok_or_else(|| anyhow!("orbit section needs `r`"))?,
                p: o.p.clone().unwrap_or_default(),
                q: o.q.clone().unwrap_or_default(),
            }
        }
        CaseTag::D4SinkCenter => {
            let r = o.r.clone().ok_or_else(|| anyhow!("orbit section needs `r`"))?;
            if r.len() != 3 {
                bail!("D4 needs three ranks");
            }
            let r = [r[0], r[1], r[2]];
            match (&o.rij, o.x) {
                (Some(rij), _) => {
                    if rij.len() != 3 {
                        bail!("D4 needs three pairwise intersections r12, r13, r23");
                    }
                    let rij = [rij[0], rij[1], rij[2]];
                    let r123 = o.r123.unwrap_or(0);
                    let formula = (r.iter().map(|&v| v as i64).sum::<i64>()
                        - rij.iter().map(|&v| v as i64).sum::<i64>()
                        + r123 as i64)
                        .max(0) as u32;
                    OrbitInvariants::D4SinkCenter {
                        r,
                        rij,
                        r123,
                        s123: o.x.unwrap_or(formula),
                    }
                }
                (None, Some(x)) => {
                    // generic intersection profile for ranks spanning an
                    // x-dimensional space
                    let gen = |a: u32, b: u32| (a as i64 + b as i64 - x as i64).max(0) as u32;
                    let rij = [gen(r[0], r[1]), gen(r[0], r[2]), gen(r[1], r[2])];
                    let r123 =
                        (r.iter().map(|&v| v as i64).sum::<i64>() - 2 * x as i64).max(0) as u32;
                    OrbitInvariants::D4SinkCenter {
                        r,
                        rij,
                        r123,
                        s123: x,
                    }
                }
                (None, None) => bail!("D4 orbits need either `rij` (+`r123`) or `x`"),
            }
        }
        CaseTag::Other => bail!("untagged quivers have no invariant family"),
    })
}

pub fn parse_base(s: &str) -> anyhow::Result<BaseSpace> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("point") {
        return Ok(BaseSpace::Point);
    }
    let inner = t
        .strip_prefix("Gr(")
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| anyhow!("base must be `point` or `Gr(k,n)`, got {s}"))?;
    let parts: Vec<&str> = inner.split(',').map(|x| x.trim()).collect();
    if parts.len() != 2 {
        bail!("base must be Gr(k,n)");
    }
    Ok(BaseSpace::Grassmannian {
        k: parts[0].parse()?,
        n: parts[1].parse()?,
    })
}

/// Prefix grammar: dual(X), sum(A,B,...), tensor(A,B), wedge2(X),
/// sym2(X), det(X), O(m), U, Q, triv(r).
pub fn parse_bundle(s: &str) -> anyhow::Result<BundleExpr> {
    let mut p = Parser {
        text: s,
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        bail!("trailing input in bundle expression: {}", &p.text[p.pos..]);
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len()
            && self.text.as_bytes()[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> anyhow::Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text.as_bytes()[self.pos];
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            bail!("expected a name at position {start} of {:?}", self.text);
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn expect(&mut self, c: char) -> anyhow::Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            bail!("expected `{c}` at position {} of {:?}", self.pos, self.text)
        }
    }

    fn int(&mut self) -> anyhow::Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.text[self.pos..].starts_with('-') {
            self.pos += 1;
        }
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| anyhow!("expected an integer at {start} of {:?}", self.text))
    }

    fn expr(&mut self) -> anyhow::Result<BundleExpr> {
        let name = self.ident()?;
        Ok(match name.as_str() {
            "U" => BundleExpr::BaseU,
            "Q" => BundleExpr::BaseQ,
            "O" => {
                self.expect('(')?;
                let m = self.int()?;
                self.expect(')')?;
                BundleExpr::BaseO(m as i32)
            }
            "triv" => {
                self.expect('(')?;
                let r = self.int()?;
                self.expect(')')?;
                if r < 0 {
                    bail!("trivial bundles need a nonnegative rank");
                }
                BundleExpr::Trivial(r as u32)
            }
            "dual" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                BundleExpr::Dual(Box::new(e))
            }
            "wedge2" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                BundleExpr::Wedge2(Box::new(e))
            }
            "sym2" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                BundleExpr::Sym2(Box::new(e))
            }
            "det" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                BundleExpr::Det(Box::new(e))
            }
            "sum" => {
                self.expect('(')?;
                let mut items = vec![self.expr()?];
                loop {
                    self.skip_ws();
                    if self.text[self.pos..].starts_with(',') {
                        self.pos += 1;
                        items.push(self.expr()?);
                    } else {
                        break;
                    }
                }
                self.expect(')')?;
                BundleExpr::Sum(items)
            }
            "tensor" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                BundleExpr::Tensor(Box::new(a), Box::new(b))
            }
            other => bail!("unknown bundle constructor {other}"),
        })
    }
}

pub fn parse_quantities(names: &[String]) -> anyhow::Result<Vec<Quantity>> {
    names
        .iter()
        .map(|n| {
            Ok(match n.as_str() {
                "chi_O" => Quantity::ChiO,
                "chi_omega1" => Quantity::ChiOmega1,
                "chi_omega2" => Quantity::ChiOmega2,
                "minus_k_top" => Quantity::MinusKTop,
                "chi_minus_k" => Quantity::ChiMinusK,
                other => bail!("unknown quantity {other}"),
            })
        })
        .collect()
}

pub fn dim_vector(o: &OrbitSection, quiver: &Quiver) -> anyhow::Result<DimVector> {
    if o.d.len() != quiver.vertex_count {
        bail!(
            "dimension vector has {} entries, quiver has {} vertices",
            o.d.len(),
            quiver.vertex_count
        );
    }
    Ok(DimVector(o.d.clone()))
}
