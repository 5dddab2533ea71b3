//! Finite-element model description, the JSON model format, and global dof
//! numbering.
//!
//! A model is a set of 2D nodes carrying three dofs each (`ux`, `uy`, `rz`),
//! two-node elements (`spring`, `bar`, `beam2d`) and nodal restraints.
//! Restrained dofs are removed from the global numbering entirely.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("element {element}: unknown element kind `{kind}`")]
    UnknownKind { element: u64, kind: String },
    #[error("element {element}: property `{key}` is not valid for kind `{kind}`")]
    UnexpectedProperty {
        element: u64,
        kind: ElementKind,
        key: &'static str,
    },
    #[error("element {element}: missing property `{key}` for kind `{kind}`")]
    MissingProperty {
        element: u64,
        kind: ElementKind,
        key: &'static str,
    },
    #[error("element {element}: negative stiffness `{key}` = {value}")]
    NegativeStiffness {
        element: u64,
        key: &'static str,
        value: f64,
    },
    #[error("{what} references missing node {node}")]
    DanglingNode { what: String, node: u64 },
    #[error("element {element}: non-positive length {length}")]
    NonPositiveLength { element: u64, length: f64 },
    #[error("element {element}: both ends reference node {node}")]
    RepeatedNode { element: u64, node: u64 },
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("duplicate element id {0}")]
    DuplicateElement(u64),
    #[error("node {0} is restrained more than once")]
    DuplicateRestraint(u64),
    #[error("restraint on node {0} fixes no dofs")]
    EmptyRestraint(u64),
    #[error("restraint on node {node} lists `{dof}` twice")]
    RepeatedRestraintDof { node: u64, dof: Dof },
    #[error("{what} id must be a positive integer")]
    ZeroId { what: &'static str },
    #[error("node {0} has a non-finite coordinate")]
    NonFiniteCoordinate(u64),
    #[error("element {element}: non-finite property `{key}`")]
    NonFiniteProperty { element: u64, key: &'static str },
    #[error("model has no elements")]
    NoElements,
}

/// Local nodal dof direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dof {
    Ux,
    Uy,
    Rz,
}

impl Dof {
    pub const ALL: [Dof; 3] = [Dof::Ux, Dof::Uy, Dof::Rz];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dof::Ux => "ux",
            Dof::Uy => "uy",
            Dof::Rz => "rz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Spring,
    Bar,
    Beam2d,
}

impl ElementKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "spring" => Some(Self::Spring),
            "bar" => Some(Self::Bar),
            "beam2d" => Some(Self::Beam2d),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Spring => "spring",
            Self::Bar => "bar",
            Self::Beam2d => "beam2d",
        }
    }

    /// Number of local dofs (`n_e`).
    pub fn local_dofs(self) -> usize {
        match self {
            Self::Spring | Self::Bar => 4,
            Self::Beam2d => 6,
        }
    }

    /// Nodal directions an element of this kind connects, per end.
    pub fn nodal_dofs(self) -> &'static [Dof] {
        match self {
            Self::Spring | Self::Bar => &[Dof::Ux, Dof::Uy],
            Self::Beam2d => &Dof::ALL,
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind-specific stiffness parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementProps {
    /// Axial spring stiffness `k` [force/length].
    Spring { k: f64 },
    /// Axial rigidity `E·A` [force].
    Bar { ea: f64 },
    /// Axial rigidity `E·A` [force] and flexural rigidity `E·I` [force·length²].
    Beam2d { ea: f64, ei: f64 },
}

impl ElementProps {
    pub fn kind(&self) -> ElementKind {
        match self {
            Self::Spring { .. } => ElementKind::Spring,
            Self::Bar { .. } => ElementKind::Bar,
            Self::Beam2d { .. } => ElementKind::Beam2d,
        }
    }

    /// Multiply every stiffness parameter by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        match self {
            Self::Spring { k } => Self::Spring { k: k * factor },
            Self::Bar { ea } => Self::Bar { ea: ea * factor },
            Self::Beam2d { ea, ei } => Self::Beam2d {
                ea: ea * factor,
                ei: ei * factor,
            },
        }
    }

    fn entries(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Spring { k } => vec![("k", k)],
            Self::Bar { ea } => vec![("ea", ea)],
            Self::Beam2d { ea, ei } => vec![("ea", ea), ("ei", ei)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub id: u64,
    pub nodes: [u64; 2],
    pub props: ElementProps,
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        self.props.kind()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restraint {
    pub node: u64,
    pub fixed: Vec<Dof>,
}

impl Restraint {
    pub fn fixes(&self, dof: Dof) -> bool {
        self.fixed.contains(&dof)
    }
}

/// A validated finite-element model.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    nodes: Vec<Node>,
    elements: Vec<Element>,
    restraints: Vec<Restraint>,
    node_index: HashMap<u64, usize>,
}

impl Model {
    /// Build a model, checking referential integrity, geometry and stiffness
    /// parameters.
    pub fn new(
        nodes: Vec<Node>,
        elements: Vec<Element>,
        restraints: Vec<Restraint>,
    ) -> Result<Self, ModelError> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.id == 0 {
                return Err(ModelError::ZeroId { what: "node" });
            }
            if !node.x.is_finite() || !node.y.is_finite() {
                return Err(ModelError::NonFiniteCoordinate(node.id));
            }
            if node_index.insert(node.id, i).is_some() {
                return Err(ModelError::DuplicateNode(node.id));
            }
        }

        if elements.is_empty() {
            return Err(ModelError::NoElements);
        }
        let mut element_ids = HashSet::with_capacity(elements.len());
        for element in &elements {
            if element.id == 0 {
                return Err(ModelError::ZeroId { what: "element" });
            }
            if !element_ids.insert(element.id) {
                return Err(ModelError::DuplicateElement(element.id));
            }
            for &n in &element.nodes {
                if !node_index.contains_key(&n) {
                    return Err(ModelError::DanglingNode {
                        what: format!("element {}", element.id),
                        node: n,
                    });
                }
            }
            if element.nodes[0] == element.nodes[1] {
                return Err(ModelError::RepeatedNode {
                    element: element.id,
                    node: element.nodes[0],
                });
            }
            for (key, value) in element.props.entries() {
                if !value.is_finite() {
                    return Err(ModelError::NonFiniteProperty {
                        element: element.id,
                        key,
                    });
                }
                if value < 0.0 {
                    return Err(ModelError::NegativeStiffness {
                        element: element.id,
                        key,
                        value,
                    });
                }
            }
            let a = nodes[node_index[&element.nodes[0]]];
            let b = nodes[node_index[&element.nodes[1]]];
            let length = (b.x - a.x).hypot(b.y - a.y);
            if !(length > 0.0) {
                return Err(ModelError::NonPositiveLength {
                    element: element.id,
                    length,
                });
            }
        }

        let mut restrained = HashSet::with_capacity(restraints.len());
        for r in &restraints {
            if !node_index.contains_key(&r.node) {
                return Err(ModelError::DanglingNode {
                    what: "restraint".to_string(),
                    node: r.node,
                });
            }
            if !restrained.insert(r.node) {
                return Err(ModelError::DuplicateRestraint(r.node));
            }
            if r.fixed.is_empty() {
                return Err(ModelError::EmptyRestraint(r.node));
            }
            let mut seen = [false; 3];
            for &d in &r.fixed {
                if std::mem::replace(&mut seen[d.index()], true) {
                    return Err(ModelError::RepeatedRestraintDof {
                        node: r.node,
                        dof: d,
                    });
                }
            }
        }

        Ok(Self {
            nodes,
            elements,
            restraints,
            node_index,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn restraints(&self) -> &[Restraint] {
        &self.restraints
    }

    pub fn node(&self, id: u64) -> Option<&Node> {
        self.node_index.get(&id).map(|&i| &self.nodes[i])
    }

    /// End coordinates of an element.
    pub fn element_ends(&self, element: &Element) -> (Node, Node) {
        (
            self.nodes[self.node_index[&element.nodes[0]]],
            self.nodes[self.node_index[&element.nodes[1]]],
        )
    }

    pub fn element_length(&self, element: &Element) -> f64 {
        let (a, b) = self.element_ends(element);
        (b.x - a.x).hypot(b.y - a.y)
    }

    /// Same model with every element stiffness multiplied by `factor`.
    pub fn with_stiffness_scaled(&self, factor: f64) -> Result<Self, ModelError> {
        self.with_elements_scaled(|_| true, factor)
    }

    /// Same model with the stiffness of the selected elements multiplied by
    /// `factor`.
    pub fn with_elements_scaled(
        &self,
        mut select: impl FnMut(&Element) -> bool,
        factor: f64,
    ) -> Result<Self, ModelError> {
        let elements = self
            .elements
            .iter()
            .map(|e| {
                let mut e = *e;
                if select(&e) {
                    e.props = e.props.scaled(factor);
                }
                e
            })
            .collect();
        Self::new(self.nodes.clone(), elements, self.restraints.clone())
    }

    /// Same geometry and elements with every restraint removed.
    pub fn unrestrained(&self) -> Self {
        Self {
            restraints: Vec::new(),
            ..self.clone()
        }
    }

    /// Serialize to the canonical JSON model document.
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            nodes: self
                .nodes
                .iter()
                .map(|n| RawNode {
                    id: n.id,
                    x: n.x,
                    y: n.y,
                })
                .collect(),
            elements: self
                .elements
                .iter()
                .map(|e| {
                    let mut props = RawProps::default();
                    match e.props {
                        ElementProps::Spring { k } => props.k = Some(k),
                        ElementProps::Bar { ea } => props.ea = Some(ea),
                        ElementProps::Beam2d { ea, ei } => {
                            props.ea = Some(ea);
                            props.ei = Some(ei);
                        }
                    }
                    RawElement {
                        id: e.id,
                        kind: e.kind().as_str().to_string(),
                        nodes: e.nodes,
                        props,
                    }
                })
                .collect(),
            restraints: self
                .restraints
                .iter()
                .map(|r| RawRestraint {
                    node: r.node,
                    fixed: r.fixed.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("model serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    nodes: Vec<RawNode>,
    elements: Vec<RawElement>,
    #[serde(default)]
    restraints: Vec<RawRestraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: u64,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    id: u64,
    kind: String,
    nodes: [u64; 2],
    props: RawProps,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ea: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ei: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRestraint {
    node: u64,
    fixed: Vec<Dof>,
}

impl RawElement {
    fn into_element(self) -> Result<Element, ModelError> {
        let kind = ElementKind::parse(&self.kind).ok_or_else(|| ModelError::UnknownKind {
            element: self.id,
            kind: self.kind.clone(),
        })?;
        let RawProps { k, ea, ei } = self.props;
        let present = [("k", k), ("ea", ea), ("ei", ei)];
        let wanted: &[&'static str] = match kind {
            ElementKind::Spring => &["k"],
            ElementKind::Bar => &["ea"],
            ElementKind::Beam2d => &["ea", "ei"],
        };
        for (key, value) in present {
            match (wanted.contains(&key), value) {
                (true, None) => {
                    return Err(ModelError::MissingProperty {
                        element: self.id,
                        kind,
                        key,
                    })
                }
                (false, Some(_)) => {
                    return Err(ModelError::UnexpectedProperty {
                        element: self.id,
                        kind,
                        key,
                    })
                }
                _ => {}
            }
        }
        let props = match kind {
            ElementKind::Spring => ElementProps::Spring { k: k.unwrap() },
            ElementKind::Bar => ElementProps::Bar { ea: ea.unwrap() },
            ElementKind::Beam2d => ElementProps::Beam2d {
                ea: ea.unwrap(),
                ei: ei.unwrap(),
            },
        };
        Ok(Element {
            id: self.id,
            nodes: self.nodes,
            props,
        })
    }
}

/// Parse and validate a JSON model document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let nodes = raw
        .nodes
        .into_iter()
        .map(|n| Node {
            id: n.id,
            x: n.x,
            y: n.y,
        })
        .collect();
    let elements = raw
        .elements
        .into_iter()
        .map(RawElement::into_element)
        .collect::<Result<Vec<_>, _>>()?;
    let restraints = raw
        .restraints
        .into_iter()
        .map(|r| Restraint {
            node: r.node,
            fixed: r.fixed,
        })
        .collect();
    Model::new(nodes, elements, restraints)
}

/// Global index of a free dof, `None` when restrained.
pub type GlobalDof = Option<usize>;

/// Condensed global numbering of the free dofs.
///
/// Nodes are numbered in ascending id order, and within a node `ux < uy < rz`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    n: usize,
    nodes: BTreeMap<u64, [GlobalDof; 3]>,
    owners: Vec<(u64, Dof)>,
    element_dofs: Vec<Vec<GlobalDof>>,
}

impl DofMap {
    /// Number of free dofs.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_dofs(&self, node: u64) -> Option<&[GlobalDof; 3]> {
        self.nodes.get(&node)
    }

    pub fn global(&self, node: u64, dof: Dof) -> GlobalDof {
        self.nodes.get(&node).and_then(|d| d[dof.index()])
    }

    /// Node and direction of global dof `j`.
    pub fn owner(&self, j: usize) -> (u64, Dof) {
        self.owners[j]
    }

    /// `m_e` for the element at position `element` in the model's element list.
    pub fn element_dofs(&self, element: usize) -> &[GlobalDof] {
        &self.element_dofs[element]
    }

    pub fn num_elements(&self) -> usize {
        self.element_dofs.len()
    }

    /// Number of elements whose `m_e` contains each global dof.
    pub fn incidence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for m in &self.element_dofs {
            for j in m.iter().flatten() {
                counts[*j] += 1;
            }
        }
        counts
    }
}

/// Number the free dofs of a model.
pub fn build_dof_map(model: &Model) -> DofMap {
    let fixed: HashMap<u64, &Restraint> = model.restraints().iter().map(|r| (r.node, r)).collect();
    let mut ids: Vec<u64> = model.nodes().iter().map(|n| n.id).collect();
    ids.sort_unstable();

    let mut n = 0;
    let mut nodes = BTreeMap::new();
    let mut owners = Vec::new();
    for id in ids {
        let mut slots = [None; 3];
        for dof in Dof::ALL {
            if fixed.get(&id).is_some_and(|r| r.fixes(dof)) {
                continue;
            }
            slots[dof.index()] = Some(n);
            owners.push((id, dof));
            n += 1;
        }
        nodes.insert(id, slots);
    }

    let slots = &nodes;
    let element_dofs = model
        .elements()
        .iter()
        .map(|e| {
            let dirs = e.kind().nodal_dofs();
            e.nodes
                .iter()
                .flat_map(|node| dirs.iter().map(move |&d| slots[node][d.index()]))
                .collect()
        })
        .collect();

    DofMap {
        n,
        nodes,
        owners,
        element_dofs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPRING: &str = r#"{
        "nodes": [{"id": 1, "x": 0.0, "y": 0.0}, {"id": 2, "x": 1.0, "y": 0.0}],
        "elements": [{"id": 1, "kind": "spring", "nodes": [1, 2], "props": {"k": 1000.0}}],
        "restraints": [{"node": 1, "fixed": ["ux", "uy", "rz"]}]
    }"#;

    #[test]
    fn parses_single_spring() {
        let model = parse_model(SPRING).unwrap();
        assert_eq!(model.elements().len(), 1);
        assert_eq!(
            model.elements()[0].props,
            ElementProps::Spring { k: 1000.0 }
        );
        let map = build_dof_map(&model);
        assert_eq!(map.n(), 3);
        assert_eq!(map.element_dofs(0), &[None, None, Some(0), Some(1)]);
        assert_eq!(map.owner(2), (2, Dof::Rz));
    }

    #[test]
    fn dangling_reference() {
        let text = SPRING.replace("\"nodes\": [1, 2]", "\"nodes\": [1, 99]");
        assert_eq!(
            parse_model(&text),
            Err(ModelError::DanglingNode {
                what: "element 1".into(),
                node: 99
            })
        );
    }

    #[test]
    fn rejects_bad_documents() {
        let unknown_kind = SPRING.replace("\"spring\"", "\"shell\"");
        assert!(matches!(
            parse_model(&unknown_kind),
            Err(ModelError::UnknownKind { .. })
        ));

        let negative = SPRING.replace("1000.0", "-1.0");
        assert!(matches!(
            parse_model(&negative),
            Err(ModelError::NegativeStiffness { key: "k", .. })
        ));

        let coincident = SPRING.replace("\"x\": 1.0", "\"x\": 0.0");
        assert!(matches!(
            parse_model(&coincident),
            Err(ModelError::NonPositiveLength { element: 1, .. })
        ));

        let extra_key = SPRING.replace("\"k\": 1000.0", "\"k\": 1000.0, \"ei\": 2.0");
        assert!(matches!(
            parse_model(&extra_key),
            Err(ModelError::UnexpectedProperty { key: "ei", .. })
        ));

        let unknown_field = SPRING.replace("\"x\": 0.0,", "\"x\": 0.0, \"z\": 1.0,");
        assert!(matches!(
            parse_model(&unknown_field),
            Err(ModelError::Syntax { .. })
        ));

        let no_elements = r#"{"nodes": [{"id": 1, "x": 0, "y": 0}], "elements": []}"#;
        assert_eq!(parse_model(no_elements), Err(ModelError::NoElements));

        let repeated = SPRING.replace("[\"ux\", \"uy\", \"rz\"]", "[\"ux\", \"ux\"]");
        assert!(matches!(
            parse_model(&repeated),
            Err(ModelError::RepeatedRestraintDof {
                node: 1,
                dof: Dof::Ux
            })
        ));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("{\n  \"nodes\": [,\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn numbering_counts() {
        // two-node spring, node 1 fixed in ux only
        let text = SPRING.replace("[\"ux\", \"uy\", \"rz\"]", "[\"ux\"]");
        let map = build_dof_map(&parse_model(&text).unwrap());
        assert_eq!(map.n(), 5);
        assert_eq!(map.global(1, Dof::Ux), None);
        assert_eq!(map.global(1, Dof::Uy), Some(0));
        assert_eq!(map.global(2, Dof::Ux), Some(2));

        // a beam with one free node contributes exactly that node's 3 dofs
        let beam = SPRING
            .replace("\"spring\"", "\"beam2d\"")
            .replace("\"k\": 1000.0", "\"ea\": 1.0, \"ei\": 1.0");
        let map = build_dof_map(&parse_model(&beam).unwrap());
        assert_eq!(map.n(), 3);
        assert_eq!(
            map.element_dofs(0),
            &[None, None, None, Some(0), Some(1), Some(2)]
        );

        let all_fixed = SPRING.replace(
            "[{\"node\": 1, \"fixed\": [\"ux\", \"uy\", \"rz\"]}]",
            "[{\"node\": 1, \"fixed\": [\"ux\", \"uy\", \"rz\"]}, {\"node\": 2, \"fixed\": [\"rz\", \"uy\", \"ux\"]}]",
        );
        assert_eq!(build_dof_map(&parse_model(&all_fixed).unwrap()).n(), 0);
    }

    #[test]
    fn ordering_is_by_node_id_not_input_order() {
        let text = r#"{
            "nodes": [{"id": 7, "x": 1, "y": 0}, {"id": 3, "x": 0, "y": 0}],
            "elements": [{"id": 1, "kind": "bar", "nodes": [7, 3], "props": {"ea": 1}}],
            "restraints": [{"node": 3, "fixed": ["rz"]}, {"node": 7, "fixed": ["rz"]}]
        }"#;
        let map = build_dof_map(&parse_model(text).unwrap());
        assert_eq!(map.n(), 4);
        assert_eq!(map.owner(0), (3, Dof::Ux));
        assert_eq!(map.element_dofs(0), &[Some(2), Some(3), Some(0), Some(1)]);
        assert_eq!(map.incidence_counts(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn canonical_round_trip() {
        let model = parse_model(SPRING).unwrap();
        assert_eq!(parse_model(&model.to_json()).unwrap(), model);
    }
}
