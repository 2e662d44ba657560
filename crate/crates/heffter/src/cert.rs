//! Canonical line-oriented certificate files.
//!
//! Format: a `HEFFTER-CERT 1` version line, optional `#` comment lines, one
//! `field` header, a `kind` line, then the payload sections. Codes are
//! canonical element encodings in stored order. Canonical form is exactly
//! what the serializer emits: LF endings, no trailing whitespace, sections in
//! declared order; parsing then re-serializing a canonical file is
//! byte-identical.

use crate::construct::{check_net_seed, ConstructError, NetSeed};
use crate::cycles::{verify_base_cycles, Cycle, CycleError};
use crate::designs::{
    verify_heffter_space, verify_heffter_system, DesignError, HeffterSpace, HeffterSystem,
    OrderedBlock, SpaceClass,
};
use crate::field::{Elem, FieldCtx, FieldError};
use crate::search::{verify_packing, DifferencePacking, Ruler, SearchError};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldHeader {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    pub modulus: Vec<u64>,
    pub generator: u64,
}

impl FieldHeader {
    pub fn of(ctx: &FieldCtx) -> FieldHeader {
        let s = ctx.spec();
        FieldHeader {
            p: s.p,
            n: s.n,
            q: s.q,
            modulus: s.modulus.clone(),
            generator: s.generator.0,
        }
    }

    pub fn build_ctx(&self) -> Result<FieldCtx, FieldError> {
        FieldCtx::build(self.p, self.n, Some(&self.modulus), Some(self.generator))
    }

    fn line(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!(
            "field p={} n={} q={} modulus={} generator={}",
            self.p,
            self.n,
            self.q,
            coeffs.join(","),
            self.generator
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    HalfSet {
        elements: Vec<u64>,
    },
    System {
        halfset: Vec<u64>,
        blocks: Vec<Vec<u64>>,
    },
    Space {
        halfset: Vec<u64>,
        classes: Vec<(String, Vec<Vec<u64>>)>,
    },
    Ruler {
        elements: Vec<u64>,
    },
    Packing {
        rulers: Vec<Vec<u64>>,
    },
    NetSeed {
        x: u64,
        y: Vec<u64>,
    },
    BaseCycles {
        cycles: Vec<Vec<u64>>,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::HalfSet { .. } => "halfset",
            Payload::System { .. } => "system",
            Payload::Space { .. } => "space",
            Payload::Ruler { .. } => "ruler",
            Payload::Packing { .. } => "packing",
            Payload::NetSeed { .. } => "netseed",
            Payload::BaseCycles { .. } => "basecycles",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Raw comment lines (each starts with '#'), emitted after the version.
    pub comments: Vec<String>,
    pub field: FieldHeader,
    pub payload: Payload,
}

impl Certificate {
    pub fn new(ctx: &FieldCtx, payload: Payload) -> Certificate {
        Certificate {
            comments: Vec::new(),
            field: FieldHeader::of(ctx),
            payload,
        }
    }

    pub fn with_comment(mut self, text: &str) -> Certificate {
        self.comments.push(format!("# {text}").trim_end().to_string());
        self
    }

    pub fn for_space(ctx: &FieldCtx, space: &HeffterSpace) -> Certificate {
        Certificate::new(
            ctx,
            Payload::Space {
                halfset: space.halfset.elements().iter().map(|e| e.0).collect(),
                classes: space
                    .classes
                    .iter()
                    .map(|c| {
                        (
                            c.name.clone(),
                            c.blocks
                                .iter()
                                .map(|b| b.elements().iter().map(|e| e.0).collect())
                                .collect(),
                        )
                    })
                    .collect(),
            },
        )
    }

    pub fn for_system(ctx: &FieldCtx, system: &HeffterSystem) -> Certificate {
        Certificate::new(
            ctx,
            Payload::System {
                halfset: system.halfset.elements().iter().map(|e| e.0).collect(),
                blocks: system
                    .blocks
                    .iter()
                    .map(|b| b.elements().iter().map(|e| e.0).collect())
                    .collect(),
            },
        )
    }

    pub fn for_ruler(ctx: &FieldCtx, ruler: &Ruler) -> Certificate {
        Certificate::new(
            ctx,
            Payload::Ruler {
                elements: ruler.elements().iter().map(|e| e.0).collect(),
            },
        )
    }

    pub fn for_packing(ctx: &FieldCtx, packing: &DifferencePacking) -> Certificate {
        Certificate::new(
            ctx,
            Payload::Packing {
                rulers: packing
                    .rulers
                    .iter()
                    .map(|r| r.elements().iter().map(|e| e.0).collect())
                    .collect(),
            },
        )
    }

    pub fn for_net_seed(ctx: &FieldCtx, seed: &NetSeed) -> Certificate {
        Certificate::new(
            ctx,
            Payload::NetSeed {
                x: seed.x.0,
                y: seed.y.iter().map(|e| e.0).collect(),
            },
        )
    }

    pub fn for_base_cycles(ctx: &FieldCtx, cycles: &[Cycle]) -> Certificate {
        Certificate::new(
            ctx,
            Payload::BaseCycles {
                cycles: cycles
                    .iter()
                    .map(|c| c.vertices().iter().map(|e| e.0).collect())
                    .collect(),
            },
        )
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("HEFFTER-CERT {FORMAT_VERSION}\n"));
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.field.line());
        out.push('\n');
        out.push_str(&format!("kind {}\n", self.payload.kind()));
        let codes = |v: &[u64]| -> String {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match &self.payload {
            Payload::HalfSet { elements } => {
                out.push_str(&format!("halfset {}\n", codes(elements)));
            }
            Payload::System { halfset, blocks } => {
                out.push_str(&format!("halfset {}\n", codes(halfset)));
                for b in blocks {
                    out.push_str(&format!("block {}\n", codes(b)));
                }
            }
            Payload::Space { halfset, classes } => {
                out.push_str(&format!("halfset {}\n", codes(halfset)));
                for (name, blocks) in classes {
                    out.push_str(&format!("class {name}\n"));
                    for b in blocks {
                        out.push_str(&format!("block {}\n", codes(b)));
                    }
                }
            }
            Payload::Ruler { elements } => {
                out.push_str(&format!("ruler {}\n", codes(elements)));
            }
            Payload::Packing { rulers } => {
                for r in rulers {
                    out.push_str(&format!("ruler {}\n", codes(r)));
                }
            }
            Payload::NetSeed { x, y } => {
                out.push_str(&format!("x {x}\n"));
                out.push_str(&format!("y {}\n", codes(y)));
            }
            Payload::BaseCycles { cycles } => {
                for c in cycles {
                    out.push_str(&format!("cycle {}\n", codes(c)));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertError> {
        let err = |line: usize, msg: String| CertError::Parse { line, msg };
        let mut lines = text.lines().enumerate();
        let (ln, first) = lines
            .next()
            .ok_or_else(|| err(0, "empty certificate".into()))?;
        if first.trim_end() != format!("HEFFTER-CERT {FORMAT_VERSION}") {
            return Err(err(ln + 1, format!("bad version line {first:?}")));
        }

        let mut comments = Vec::new();
        let mut field: Option<FieldHeader> = None;
        let mut kind: Option<String> = None;
        let mut halfset: Option<Vec<u64>> = None;
        let mut classes: Vec<(String, Vec<Vec<u64>>)> = Vec::new();
        let mut blocks: Vec<Vec<u64>> = Vec::new();
        let mut rulers: Vec<Vec<u64>> = Vec::new();
        let mut cycles: Vec<Vec<u64>> = Vec::new();
        let mut x: Option<u64> = None;
        let mut y: Option<Vec<u64>> = None;

        let parse_codes = |ln: usize, s: &str| -> Result<Vec<u64>, CertError> {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| err(ln + 1, format!("bad code {t:?}")))
                })
                .collect()
        };

        for (ln, raw) in lines {
            let line = raw.trim_end();
            if line.is_empty() {
                return Err(err(ln + 1, "unexpected blank line".into()));
            }
            if line.starts_with('#') {
                if field.is_some() {
                    return Err(err(ln + 1, "comments must precede the field header".into()));
                }
                comments.push(line.to_string());
                continue;
            }
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "field" => {
                    let mut p = None;
                    let mut n = None;
                    let mut q = None;
                    let mut modulus = None;
                    let mut generator = None;
                    for kv in rest.split_whitespace() {
                        let (k, v) = kv
                            .split_once('=')
                            .ok_or_else(|| err(ln + 1, format!("bad field token {kv:?}")))?;
                        match k {
                            "p" => p = Some(v.parse().map_err(|_| err(ln + 1, "bad p".into()))?),
                            "n" => n = Some(v.parse().map_err(|_| err(ln + 1, "bad n".into()))?),
                            "q" => q = Some(v.parse().map_err(|_| err(ln + 1, "bad q".into()))?),
                            "modulus" => {
                                let coeffs: Result<Vec<u64>, _> =
                                    v.split(',').map(|c| c.parse::<u64>()).collect();
                                modulus = Some(
                                    coeffs.map_err(|_| err(ln + 1, "bad modulus".into()))?,
                                );
                            }
                            "generator" => {
                                generator = Some(
                                    v.parse().map_err(|_| err(ln + 1, "bad generator".into()))?,
                                )
                            }
                            other => {
                                return Err(err(ln + 1, format!("unknown field key {other:?}")))
                            }
                        }
                    }
                    field = Some(FieldHeader {
                        p: p.ok_or_else(|| err(ln + 1, "missing p".into()))?,
                        n: n.ok_or_else(|| err(ln + 1, "missing n".into()))?,
                        q: q.ok_or_else(|| err(ln + 1, "missing q".into()))?,
                        modulus: modulus.ok_or_else(|| err(ln + 1, "missing modulus".into()))?,
                        generator: generator
                            .ok_or_else(|| err(ln + 1, "missing generator".into()))?,
                    });
                }
                "kind" => kind = Some(rest.to_string()),
                "halfset" => halfset = Some(parse_codes(ln, rest)?),
                "class" => classes.push((rest.to_string(), Vec::new())),
                "block" => {
                    let b = parse_codes(ln, rest)?;
                    match classes.last_mut() {
                        Some((_, cls)) => cls.push(b),
                        None => blocks.push(b),
                    }
                }
                "ruler" => rulers.push(parse_codes(ln, rest)?),
                "cycle" => cycles.push(parse_codes(ln, rest)?),
                "x" => {
                    x = Some(
                        rest.parse()
                            .map_err(|_| err(ln + 1, "bad x code".into()))?,
                    )
                }
                "y" => y = Some(parse_codes(ln, rest)?),
                other => return Err(err(ln + 1, format!("unknown line tag {other:?}"))),
            }
        }

        let field = field.ok_or_else(|| err(0, "missing field header".into()))?;
        let kind = kind.ok_or_else(|| err(0, "missing kind line".into()))?;
        let payload = match kind.as_str() {
            "halfset" => Payload::HalfSet {
                elements: halfset.ok_or_else(|| err(0, "missing halfset line".into()))?,
            },
            "system" => Payload::System {
                halfset: halfset.ok_or_else(|| err(0, "missing halfset line".into()))?,
                blocks,
            },
            "space" => Payload::Space {
                halfset: halfset.ok_or_else(|| err(0, "missing halfset line".into()))?,
                classes,
            },
            "ruler" => Payload::Ruler {
                elements: rulers
                    .pop()
                    .filter(|_| rulers.is_empty())
                    .ok_or_else(|| err(0, "ruler certificate needs one ruler line".into()))?,
            },
            "packing" => Payload::Packing { rulers },
            "netseed" => Payload::NetSeed {
                x: x.ok_or_else(|| err(0, "missing x line".into()))?,
                y: y.ok_or_else(|| err(0, "missing y line".into()))?,
            },
            "basecycles" => Payload::BaseCycles { cycles },
            other => return Err(err(0, format!("unknown kind {other:?}"))),
        };
        Ok(Certificate {
            comments,
            field,
            payload,
        })
    }

    /// Rebuild the field context pinned by the header.
    pub fn field_ctx(&self) -> Result<FieldCtx, CertError> {
        Ok(self.field.build_ctx()?)
    }

    pub fn to_space(&self, ctx: &FieldCtx) -> Result<HeffterSpace, CertError> {
        match &self.payload {
            Payload::Space { halfset, classes } => {
                let hs: Vec<Elem> = halfset.iter().map(|&c| Elem(c)).collect();
                let halfset = ctx.validate_halfset(&hs)?;
                let classes = classes
                    .iter()
                    .map(|(name, blocks)| {
                        let blocks: Result<Vec<OrderedBlock>, DesignError> = blocks
                            .iter()
                            .map(|b| OrderedBlock::from_codes(b))
                            .collect();
                        Ok(SpaceClass {
                            name: name.clone(),
                            blocks: blocks?,
                        })
                    })
                    .collect::<Result<Vec<_>, DesignError>>()?;
                Ok(HeffterSpace::new(halfset, classes))
            }
            _ => Err(CertError::Parse {
                line: 0,
                msg: format!("expected a space certificate, found {}", self.payload.kind()),
            }),
        }
    }

    /// Run the verifier matching this certificate's kind.
    pub fn verify(&self) -> Result<VerifyOutcome, CertError> {
        let ctx = self.field_ctx()?;
        let outcome = match &self.payload {
            Payload::HalfSet { elements } => {
                let v: Vec<Elem> = elements.iter().map(|&c| Elem(c)).collect();
                match ctx.validate_halfset(&v) {
                    Ok(hs) => VerifyOutcome {
                        valid: true,
                        summary: format!("valid=true\nkind=halfset\nv={}\n", hs.len()),
                    },
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=halfset\nviolation={e}\n"),
                    },
                }
            }
            Payload::System { halfset, blocks } => {
                let hs: Vec<Elem> = halfset.iter().map(|&c| Elem(c)).collect();
                match ctx.validate_halfset(&hs) {
                    Ok(hs) => {
                        let blocks: Result<Vec<OrderedBlock>, DesignError> =
                            blocks.iter().map(|b| OrderedBlock::from_codes(b)).collect();
                        let blocks = blocks?;
                        let report = verify_heffter_system(&ctx, &hs, &blocks);
                        VerifyOutcome {
                            valid: report.valid(),
                            summary: report.summary(),
                        }
                    }
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=system\nviolation={e}\n"),
                    },
                }
            }
            Payload::Space { .. } => match self.to_space(&ctx) {
                Ok(space) => {
                    let report = verify_heffter_space(&ctx, &space);
                    VerifyOutcome {
                        valid: report.valid(),
                        summary: report.summary(),
                    }
                }
                Err(CertError::Field(e)) => VerifyOutcome {
                    valid: false,
                    summary: format!("valid=false\nkind=space\nviolation={e}\n"),
                },
                Err(e) => return Err(e),
            },
            Payload::Ruler { elements } => {
                let elems: Vec<Elem> = elements.iter().map(|&c| Elem(c)).collect();
                match crate::search::verify_ruler(&ctx, elems.len(), &elems) {
                    Ok(report) => VerifyOutcome {
                        valid: report.is_heffter_ruler(),
                        summary: format!(
                            "valid={}\nkind=ruler\nk={}\ngolomb={}\nresolvable={}\nzerosum={}\nsimple={}\n",
                            report.is_heffter_ruler(),
                            elems.len(),
                            report.golomb,
                            report.resolvable,
                            report.zero_sum,
                            report.simple
                        ),
                    },
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=ruler\nviolation={e}\n"),
                    },
                }
            }
            Payload::Packing { rulers } => {
                let packing = DifferencePacking {
                    rulers: rulers.iter().map(|r| Ruler::from_codes(r)).collect(),
                };
                match verify_packing(&ctx, &packing) {
                    Ok(report) => VerifyOutcome {
                        valid: report.valid(),
                        summary: format!(
                            "valid={}\nkind=packing\nn={}\ndisjoint={}\nsimple={}\n",
                            report.valid(),
                            rulers.len(),
                            report.overlap.is_none(),
                            report.simple()
                        ),
                    },
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=packing\nviolation={e}\n"),
                    },
                }
            }
            Payload::NetSeed { x, y } => {
                let seed = NetSeed {
                    x: Elem(*x),
                    y: y.iter().map(|&c| Elem(c)).collect(),
                };
                match check_net_seed(&ctx, &seed) {
                    Ok(n) => VerifyOutcome {
                        valid: true,
                        summary: format!("valid=true\nkind=netseed\nn={n}\n"),
                    },
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=netseed\nviolation={e}\n"),
                    },
                }
            }
            Payload::BaseCycles { cycles } => {
                let parsed: Result<Vec<Cycle>, CycleError> = cycles
                    .iter()
                    .map(|c| Cycle::new(c.iter().map(|&v| Elem(v)).collect()))
                    .collect();
                match parsed {
                    Ok(cs) => {
                        let report = verify_base_cycles(&ctx, &cs);
                        VerifyOutcome {
                            valid: report.valid(),
                            summary: format!(
                                "valid={}\nkind=basecycles\nn={}\nmissing={}\nrepeated={}\n",
                                report.valid(),
                                cs.len(),
                                report.missing.len(),
                                report.repeated.len()
                            ),
                        }
                    }
                    Err(e) => VerifyOutcome {
                        valid: false,
                        summary: format!("valid=false\nkind=basecycles\nviolation={e}\n"),
                    },
                }
            }
        };
        Ok(outcome)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub valid: bool,
    /// Flat key=value lines.
    pub summary: String,
}
