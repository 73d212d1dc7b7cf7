//! The `.gog` text format, a fixed TOML schema.
//!
//! ```toml
//! [graph]
//! vertices = ["v1", "v2"]
//! edges = [{ name = "e", source = "v1", target = "v2" }]
//!
//! [group.v1]
//! table = [[0, 1], [1, 0]]
//! labels = ["1", "a"]
//!
//! [group.v2]
//! perm_gens = ["(0 1)"]
//! degree = 2
//!
//! [group.e]
//! table = [[0]]
//!
//! [boundary.e]
//! into_source = [0]        # element indices or labels
//! into_target = ["()"]
//!
//! [basepoint]
//! vertex = "v1"
//!
//! [tree]                   # optional; computed breadth-first if absent
//! edges = ["e"]
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EdgeParts, GogError, GogParts, GraphOfGroups};
use crate::group::{FiniteGroup, Permutation, DEFAULT_CLOSURE_BOUND};

#[derive(Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<GraphSection>,
    #[serde(default)]
    group: BTreeMap<String, GroupSection>,
    #[serde(default)]
    boundary: BTreeMap<String, BoundarySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basepoint: Option<BaseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree: Option<TreeSection>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    #[serde(default)]
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<EdgeSection>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EdgeSection {
    name: Option<String>,
    source: Option<String>,
    target: Option<String>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perm_gens: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
}

#[derive(Deserialize, Serialize, Clone)]
#[serde(untagged)]
enum ElemRef {
    Index(usize),
    Label(String),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct BoundarySection {
    into_source: Option<Vec<ElemRef>>,
    into_target: Option<Vec<ElemRef>>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct BaseSection {
    vertex: Option<String>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TreeSection {
    edges: Vec<String>,
}

fn schema<T>(msg: impl Into<String>) -> Result<T, GogError> {
    Err(GogError::Schema(msg.into()))
}

/// Parses a `.gog` document. Group-theoretic invariants are not checked
/// here; run [`GraphOfGroups::validate`] on the result.
pub fn parse(text: &str) -> Result<GraphOfGroups, GogError> {
    let doc: Document = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        GogError::Parse { line, message: e.message().trim().to_string() }
    })?;
    let Some(graph) = doc.graph else {
        return schema("missing [graph] section (no vertices)");
    };
    if graph.vertices.is_empty() {
        return schema("[graph] lists no vertices");
    }
    let vertex_index = |name: &str| graph.vertices.iter().position(|v| v == name);
    let read_group = |cell: &str| -> Result<FiniteGroup, GogError> {
        let Some(sec) = doc.group.get(cell) else {
            return schema(format!("missing [group.{cell}]"));
        };
        let group = match (&sec.table, &sec.perm_gens) {
            (Some(table), None) => FiniteGroup::from_table_labeled(table, sec.labels.clone()),
            (None, Some(gens)) => {
                let Some(degree) = sec.degree else {
                    return schema(format!("[group.{cell}] has perm_gens but no degree"));
                };
                let perms = gens
                    .iter()
                    .map(|c| Permutation::parse_cycles(c, degree))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| GogError::Schema(format!("[group.{cell}]: {e}")))?;
                FiniteGroup::from_permutations(degree, &perms, DEFAULT_CLOSURE_BOUND)
            }
            (Some(_), Some(_)) => {
                return schema(format!("[group.{cell}] gives both table and perm_gens"))
            }
            (None, None) => return schema(format!("[group.{cell}] needs table or perm_gens")),
        };
        group.map_err(|e| GogError::Schema(format!("[group.{cell}]: {e}")))
    };
    let mut vertices = Vec::new();
    for v in &graph.vertices {
        vertices.push((v.clone(), read_group(v)?));
    }
    let mut edges = Vec::new();
    for (i, e) in graph.edges.iter().enumerate() {
        let Some(name) = e.name.clone() else {
            return schema(format!("edge #{i} in [graph] has no name"));
        };
        let end = |field: &Option<String>, what: &str| match field {
            None => schema(format!("edge {name} has no {what}")),
            Some(v) => vertex_index(v).map_or_else(
                || schema(format!("edge {name} references unknown vertex {v}")),
                Ok,
            ),
        };
        let source = end(&e.source, "source")?;
        let target = end(&e.target, "target")?;
        let group = read_group(&name)?;
        let Some(bd) = doc.boundary.get(&name) else {
            return schema(format!("missing [boundary.{name}]"));
        };
        let resolve = |refs: &Option<Vec<ElemRef>>, field: &str, vg: &FiniteGroup| {
            let Some(refs) = refs else {
                return schema(format!("[boundary.{name}] has no {field}"));
            };
            refs.iter()
                .map(|r| match r {
                    ElemRef::Index(i) => Ok(*i),
                    ElemRef::Label(l) => vg.find_element(l).map_or_else(
                        || schema(format!("[boundary.{name}] {field}: unknown element {l:?}")),
                        Ok,
                    ),
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let into_source = resolve(&bd.into_source, "into_source", &vertices[source].1)?;
        let into_target = resolve(&bd.into_target, "into_target", &vertices[target].1)?;
        edges.push(EdgeParts { name, source, target, group, into_source, into_target });
    }
    for cell in doc.group.keys() {
        if vertex_index(cell).is_none() && !edges.iter().any(|e| &e.name == cell) {
            return schema(format!("[group.{cell}] does not name a cell"));
        }
    }
    for e in doc.boundary.keys() {
        if !edges.iter().any(|x| &x.name == e) {
            return schema(format!("[boundary.{e}] does not name an edge"));
        }
    }
    let base = match doc.basepoint.and_then(|b| b.vertex) {
        None => return schema("missing [basepoint] vertex"),
        Some(v) => match vertex_index(&v) {
            Some(i) => i,
            None => return schema(format!("basepoint names unknown vertex {v}")),
        },
    };
    let tree = match doc.tree {
        None => None,
        Some(t) => Some(
            t.edges
                .iter()
                .map(|n| {
                    edges.iter().position(|e| &e.name == n).map_or_else(
                        || schema(format!("[tree] names unknown edge {n}")),
                        Ok,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    GraphOfGroups::new(GogParts { vertices, edges, base, tree })
}

fn group_section(g: &FiniteGroup) -> GroupSection {
    GroupSection {
        table: Some(g.rows()),
        labels: g.labels().map(|l| l.to_vec()),
        perm_gens: None,
        degree: None,
    }
}

/// Writes a document that [`parse`] maps back to an equal value. Groups are
/// always written as tables.
pub fn serialize(g: &GraphOfGroups) -> String {
    let mut doc = Document {
        graph: Some(GraphSection {
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeSection {
                    name: Some(e.name.clone()),
                    source: Some(g.vertex_name(e.source).to_string()),
                    target: Some(g.vertex_name(e.target).to_string()),
                })
                .collect(),
        }),
        basepoint: Some(BaseSection { vertex: Some(g.vertex_name(g.base()).to_string()) }),
        tree: Some(TreeSection {
            edges: g.tree_edges().iter().map(|&e| g.edge(e).name.clone()).collect(),
        }),
        ..Default::default()
    };
    for v in 0..g.vertex_count() {
        doc.group.insert(g.vertex_name(v).to_string(), group_section(g.vertex_group(v)));
    }
    for (i, e) in g.edges().iter().enumerate() {
        doc.group.insert(e.name.clone(), group_section(g.edge_group(i)));
        let refs = |m: &[usize]| Some(m.iter().map(|&x| ElemRef::Index(x)).collect());
        doc.boundary.insert(
            e.name.clone(),
            BoundarySection { into_source: refs(g.bd0(i)), into_target: refs(g.bd1(i)) },
        );
    }
    toml::to_string(&doc).expect("document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dinf_document() {
        let g = fixtures::dinf();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertex_name(g.base()), "v1");
        assert!(g.is_tree_edge(0));
    }

    #[test]
    fn round_trip() {
        for (name, g) in fixtures::all() {
            let text = serialize(&g);
            let back = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(back, g, "{name}");
            assert_eq!(back.validate(), g.validate());
        }
    }

    #[test]
    fn empty_document_has_no_vertices() {
        let err = parse("").unwrap_err();
        assert!(matches!(&err, GogError::Schema(m) if m.contains("no vertices")), "{err}");
    }

    #[test]
    fn unknown_vertex_names_the_edge() {
        let text = r#"
[graph]
vertices = ["v"]
edges = [{ name = "bad", source = "v", target = "w" }]
[group.v]
table = [[0]]
[group.bad]
table = [[0]]
[boundary.bad]
into_source = [0]
into_target = [0]
[basepoint]
vertex = "v"
"#;
        let err = parse(text).unwrap_err();
        assert!(matches!(&err, GogError::Schema(m) if m.contains("bad") && m.contains("w")), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse("[graph]\nvertices = [\"v\"\n").unwrap_err();
        assert!(matches!(err, GogError::Parse { line, .. } if line >= 2), "{err:?}");
    }

    #[test]
    fn labels_resolve_in_boundaries() {
        let text = r#"
[graph]
vertices = ["v"]
edges = [{ name = "t", source = "v", target = "v" }]
[group.v]
table = [[0, 1], [1, 0]]
labels = ["1", "c"]
[group.t]
table = [[0, 1], [1, 0]]
[boundary.t]
into_source = ["1", "c"]
into_target = [0, 1]
[basepoint]
vertex = "v"
"#;
        let g = parse(text).unwrap();
        assert_eq!(g.bd0(0), &[0, 1]);
        assert!(g.validate().is_empty());
    }
}
