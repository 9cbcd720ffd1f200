//! Knowledge graphs: directed graphs with typed edges, a text format, inverse
//! augmentation, and node-relation homomorphisms.
//!
//! Node and relation names are interned to dense integer ids at construction;
//! all algorithms work on ids and touch names only at I/O boundaries. A graph
//! is immutable once built.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A labeled directed edge `r(head, tail)`. The head is the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub rel: RelId,
    pub head: NodeId,
    pub tail: NodeId,
}

impl Fact {
    pub fn new(rel: RelId, head: NodeId, tail: NodeId) -> Self {
        Fact { rel, head, tail }
    }
}

/// A candidate triple `q(source, target)` that may or may not be a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkQuery {
    pub relation: RelId,
    pub source: NodeId,
    pub target: NodeId,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    rel_names: Vec<String>,
    rel_index: HashMap<String, RelId>,
    /// Facts in insertion order (dedup'd).
    facts: Vec<Fact>,
    fact_set: HashSet<Fact>,
    /// Per head node: (rel, tail), sorted.
    out: Vec<Vec<(RelId, NodeId)>>,
    /// Per tail node: (rel, head), sorted.
    inn: Vec<Vec<(RelId, NodeId)>>,
    /// Per relation: (head, tail), sorted.
    rel_facts: Vec<Vec<(NodeId, NodeId)>>,
}

impl KnowledgeGraph {
    pub fn builder() -> KgBuilder {
        KgBuilder::default()
    }

    /// Parse the triple text format: one fact per line as
    /// `head<TAB>relation<TAB>tail`, UTF-8, `#` comment lines, blank lines
    /// ignored. Ids are assigned in first-appearance order; duplicate lines
    /// collapse to one fact.
    pub fn parse(text: &str) -> Result<Self> {
        let mut b = KgBuilder::default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::MalformedLine {
                    line: lineno,
                    found: fields.len(),
                });
            }
            if fields.iter().any(|f| f.is_empty()) {
                return Err(Error::EmptyField { line: lineno });
            }
            let h = b.node(fields[0]);
            let r = b.rel(fields[1]);
            let t = b.node(fields[2]);
            b.fact(r, h, t);
        }
        Ok(b.build())
    }

    /// Serialize back to the triple format, facts in stored order. Re-parsing
    /// the output reproduces the name tables of a parsed graph.
    pub fn to_triples(&self) -> String {
        let mut s = String::new();
        for f in &self.facts {
            s.push_str(self.node_name(f.head));
            s.push('\t');
            s.push_str(self.rel_name(f.rel));
            s.push('\t');
            s.push_str(self.node_name(f.tail));
            s.push('\n');
        }
        s
    }

    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_rels(&self) -> usize {
        self.rel_names.len()
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_names.len() as u32).map(NodeId)
    }

    pub fn rels(&self) -> impl Iterator<Item = RelId> {
        (0..self.rel_names.len() as u32).map(RelId)
    }

    pub fn facts(&self) -> impl Iterator<Item = Fact> + '_ {
        self.facts.iter().copied()
    }

    pub fn has_fact(&self, f: Fact) -> bool {
        self.fact_set.contains(&f)
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.node_names[n.index()]
    }

    pub fn rel_name(&self, r: RelId) -> &str {
        &self.rel_names[r.index()]
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn rel_names(&self) -> &[String] {
        &self.rel_names
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn rel_id(&self, name: &str) -> Option<RelId> {
        self.rel_index.get(name).copied()
    }

    pub fn node_id_or_err(&self, name: &str) -> Result<NodeId> {
        self.node_id(name).ok_or_else(|| Error::UnknownName {
            kind: "node",
            name: name.to_string(),
        })
    }

    pub fn rel_id_or_err(&self, name: &str) -> Result<RelId> {
        self.rel_id(name).ok_or_else(|| Error::UnknownName {
            kind: "relation",
            name: name.to_string(),
        })
    }

    /// `(r, v)` pairs with `r(u, v)` a fact: edges leaving `u`.
    pub fn out_edges(&self, u: NodeId) -> &[(RelId, NodeId)] {
        &self.out[u.index()]
    }

    /// `(r, u)` pairs with `r(u, v)` a fact: edges entering `v`. The
    /// neighborhood of `v` under `r` is the set of `u` here with that `r`.
    pub fn in_edges(&self, v: NodeId) -> &[(RelId, NodeId)] {
        &self.inn[v.index()]
    }

    /// All `(head, tail)` pairs of a relation, sorted.
    pub fn facts_of_rel(&self, r: RelId) -> &[(NodeId, NodeId)] {
        &self.rel_facts[r.index()]
    }

    /// True if the undirected shadow is connected and every node is incident
    /// to a fact. The empty graph counts as connected.
    pub fn is_connected_shadow(&self) -> bool {
        let n = self.num_nodes();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![NodeId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(_, w) in self.out_edges(v).iter().chain(self.in_edges(v)) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// The augmented graph: one fresh inverse relation per relation, and an
    /// inverse fact `r⁻(v, u)` for every fact `r(u, v)` with `u ≠ v`.
    /// Self-loops get no inverse fact; inverse relations exist regardless.
    pub fn augment_inverses(&self) -> KnowledgeGraph {
        let mut b = KgBuilder::default();
        for name in &self.node_names {
            b.node(name);
        }
        for name in &self.rel_names {
            b.rel(name);
        }
        let mut inv = Vec::with_capacity(self.num_rels());
        for name in &self.rel_names {
            let mut candidate = format!("{name}^-");
            while b.rel_index.contains_key(&candidate) {
                candidate.push('\'');
            }
            inv.push(b.rel(&candidate));
        }
        for f in &self.facts {
            b.fact(f.rel, f.head, f.tail);
        }
        for f in &self.facts {
            if f.head != f.tail {
                b.fact(inv[f.rel.index()], f.tail, f.head);
            }
        }
        b.build()
    }
}

impl fmt::Display for KnowledgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kg({} nodes, {} relations, {} facts)",
            self.num_nodes(),
            self.num_rels(),
            self.num_facts()
        )
    }
}

#[derive(Debug, Default)]
pub struct KgBuilder {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    rel_names: Vec<String>,
    rel_index: HashMap<String, RelId>,
    facts: Vec<Fact>,
    fact_set: HashSet<Fact>,
}

impl KgBuilder {
    /// Intern a node name, returning its id.
    pub fn node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.node_index.get(name) {
            return id;
        }
        let id = NodeId(self.node_names.len() as u32);
        self.node_names.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        id
    }

    /// Intern a relation name, returning its id.
    pub fn rel(&mut self, name: &str) -> RelId {
        if let Some(&id) = self.rel_index.get(name) {
            return id;
        }
        let id = RelId(self.rel_names.len() as u32);
        self.rel_names.push(name.to_string());
        self.rel_index.insert(name.to_string(), id);
        id
    }

    /// Add a fact; returns false if it was already present.
    pub fn fact(&mut self, rel: RelId, head: NodeId, tail: NodeId) -> bool {
        assert!(head.index() < self.node_names.len(), "head out of range");
        assert!(tail.index() < self.node_names.len(), "tail out of range");
        assert!(rel.index() < self.rel_names.len(), "relation out of range");
        let f = Fact { rel, head, tail };
        if self.fact_set.insert(f) {
            self.facts.push(f);
            true
        } else {
            false
        }
    }

    pub fn fact_by_names(&mut self, head: &str, rel: &str, tail: &str) -> bool {
        let h = self.node(head);
        let r = self.rel(rel);
        let t = self.node(tail);
        self.fact(r, h, t)
    }

    pub fn build(self) -> KnowledgeGraph {
        let n = self.node_names.len();
        let m = self.rel_names.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut rel_facts = vec![Vec::new(); m];
        for f in &self.facts {
            out[f.head.index()].push((f.rel, f.tail));
            inn[f.tail.index()].push((f.rel, f.head));
            rel_facts[f.rel.index()].push((f.head, f.tail));
        }
        for v in &mut out {
            v.sort_unstable();
        }
        for v in &mut inn {
            v.sort_unstable();
        }
        for v in &mut rel_facts {
            v.sort_unstable();
        }
        KnowledgeGraph {
            node_names: self.node_names,
            node_index: self.node_index,
            rel_names: self.rel_names,
            rel_index: self.rel_index,
            facts: self.facts,
            fact_set: self.fact_set,
            out,
            inn,
            rel_facts,
        }
    }
}

/// A pair of total maps (π on nodes, φ on relations), indexed by source ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRelHomomorphism {
    pub node_map: Vec<NodeId>,
    pub rel_map: Vec<RelId>,
}

impl NodeRelHomomorphism {
    pub fn identity(g: &KnowledgeGraph) -> Self {
        NodeRelHomomorphism {
            node_map: g.nodes().collect(),
            rel_map: g.rels().collect(),
        }
    }

    pub fn map_fact(&self, f: Fact) -> Fact {
        Fact {
            rel: self.rel_map[f.rel.index()],
            head: self.node_map[f.head.index()],
            tail: self.node_map[f.tail.index()],
        }
    }

    /// The image of `src` under this map as a standalone graph. Node and
    /// relation names are taken from `dst`; every relation of `dst` hit by
    /// the relation map is kept, as are all relations when `keep_all_rels`.
    pub fn image(&self, src: &KnowledgeGraph, dst: &KnowledgeGraph) -> KnowledgeGraph {
        let mut b = KgBuilder::default();
        let mut node_seen: Vec<NodeId> = self.node_map.clone();
        node_seen.sort_unstable();
        node_seen.dedup();
        for n in node_seen {
            b.node(dst.node_name(n));
        }
        let mut rel_seen: Vec<RelId> = self.rel_map.clone();
        rel_seen.sort_unstable();
        rel_seen.dedup();
        for r in rel_seen {
            b.rel(dst.rel_name(r));
        }
        for f in src.facts() {
            let m = self.map_fact(f);
            let h = b.node(dst.node_name(m.head));
            let r = b.rel(dst.rel_name(m.rel));
            let t = b.node(dst.node_name(m.tail));
            b.fact(r, h, t);
        }
        b.build()
    }
}

/// True iff the maps are total on `src` and every fact of `src` lands on a
/// fact of `dst`.
pub fn validate_homomorphism(
    h: &NodeRelHomomorphism,
    src: &KnowledgeGraph,
    dst: &KnowledgeGraph,
) -> bool {
    if h.node_map.len() != src.num_nodes() || h.rel_map.len() != src.num_rels() {
        return false;
    }
    if h.node_map.iter().any(|n| n.index() >= dst.num_nodes())
        || h.rel_map.iter().any(|r| r.index() >= dst.num_rels())
    {
        return false;
    }
    src.facts().all(|f| dst.has_fact(h.map_fact(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const COUNTEREXAMPLE_TRIPLES: &str = "\
y\tr1\tv1
v1\tr1\ty
u\tr2\tx
y\tr2\tv2
v2\tr2\ty
x\tr3\ty
y\tr3\tx
";

    #[test]
    fn parse_single_fact() {
        let g = KnowledgeGraph::parse("a\tr\tb").unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.num_rels(), 1);
        assert_eq!(g.num_facts(), 1);
    }

    #[test]
    fn parse_counterexample_graph() {
        let g = KnowledgeGraph::parse(COUNTEREXAMPLE_TRIPLES).unwrap();
        assert_eq!(g.num_nodes(), 5);
        assert_eq!(g.num_rels(), 3);
        assert_eq!(g.num_facts(), 7);
        for n in ["u", "x", "y", "v1", "v2"] {
            assert!(g.node_id(n).is_some(), "missing node {n}");
        }
    }

    #[test]
    fn parse_duplicate_lines_collapse() {
        let g = KnowledgeGraph::parse("a\tr\tb\na\tr\tb\n").unwrap();
        assert_eq!(g.num_facts(), 1);
    }

    #[test]
    fn parse_comments_and_blanks() {
        let g = KnowledgeGraph::parse("# header\n\na\tr\tb\n  \n# done\n").unwrap();
        assert_eq!(g.num_facts(), 1);
    }

    #[test]
    fn parse_malformed_line_reports_number() {
        let err = KnowledgeGraph::parse("a\tr\tb\na\tb\n").unwrap_err();
        match err {
            Error::MalformedLine { line, found } => {
                assert_eq!(line, 2);
                assert_eq!(found, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn roundtrip_preserves_name_tables() {
        let g = KnowledgeGraph::parse(COUNTEREXAMPLE_TRIPLES).unwrap();
        let g2 = KnowledgeGraph::parse(&g.to_triples()).unwrap();
        assert_eq!(g.node_names(), g2.node_names());
        assert_eq!(g.rel_names(), g2.rel_names());
        assert_eq!(g.facts().collect::<Vec<_>>(), g2.facts().collect::<Vec<_>>());
    }

    #[test]
    fn augment_plain_fact() {
        let g = KnowledgeGraph::parse("u\tr\tv").unwrap();
        let a = g.augment_inverses();
        assert_eq!(a.num_rels(), 2);
        assert_eq!(a.num_facts(), 2);
        let r = a.rel_id("r").unwrap();
        let ri = a.rel_id("r^-").unwrap();
        let u = a.node_id("u").unwrap();
        let v = a.node_id("v").unwrap();
        assert!(a.has_fact(Fact::new(r, u, v)));
        assert!(a.has_fact(Fact::new(ri, v, u)));
    }

    #[test]
    fn augment_self_loop_gets_no_inverse_fact() {
        let g = KnowledgeGraph::parse("u\tr\tu").unwrap();
        let a = g.augment_inverses();
        assert_eq!(a.num_rels(), 2);
        assert_eq!(a.num_facts(), 1);
    }

    #[test]
    fn augment_empty() {
        let g = KnowledgeGraph::parse("").unwrap();
        let a = g.augment_inverses();
        assert_eq!(a.num_nodes(), 0);
        assert_eq!(a.num_rels(), 0);
        assert_eq!(a.num_facts(), 0);
    }

    #[test]
    fn augment_twice_never_duplicates_facts() {
        let g = KnowledgeGraph::parse("a\tr\tb\nb\ts\tc").unwrap();
        let a1 = g.augment_inverses();
        let a2 = a1.augment_inverses();
        // All facts of the first augmentation survive verbatim.
        for f in a1.facts() {
            let h = a2.node_id(a1.node_name(f.head)).unwrap();
            let r = a2.rel_id(a1.rel_name(f.rel)).unwrap();
            let t = a2.node_id(a1.node_name(f.tail)).unwrap();
            assert!(a2.has_fact(Fact::new(r, h, t)));
        }
        let set: HashSet<Fact> = a2.facts().collect();
        assert_eq!(set.len(), a2.num_facts());
    }

    #[test]
    fn identity_homomorphism_validates() {
        let g = KnowledgeGraph::parse(COUNTEREXAMPLE_TRIPLES).unwrap();
        let id = NodeRelHomomorphism::identity(&g);
        assert!(validate_homomorphism(&id, &g, &g));
    }

    /// The two-hop motif α(u₁,u₂), β(u₂,u₃) maps into the intro-style
    /// training graph with α↦provide, β↦research through the shared entity.
    #[test]
    fn motif_match_into_training_graph() {
        let train = KnowledgeGraph::parse(
            "Bloomberg\tprovide\tOxford\n\
             Bloomberg\tprovide\tHSBC\n\
             Bloomberg\tresearch\tFinance\n\
             HSBC\tresearch\tFinance\n\
             Oxford\tresearch\tFinance\n\
             Oxford\tresearch\tScience\n",
        )
        .unwrap();
        let pat = KnowledgeGraph::parse("u1\talpha\tu2\nu2\tbeta\tu3").unwrap();
        let h = NodeRelHomomorphism {
            node_map: vec![
                train.node_id("Bloomberg").unwrap(),
                train.node_id("Oxford").unwrap(),
                train.node_id("Finance").unwrap(),
            ],
            rel_map: vec![
                train.rel_id("provide").unwrap(),
                train.rel_id("research").unwrap(),
            ],
        };
        assert!(validate_homomorphism(&h, &pat, &train));
    }

    #[test]
    fn homomorphism_onto_missing_triple_fails() {
        let src = KnowledgeGraph::parse("a\tr\tb").unwrap();
        let dst = KnowledgeGraph::parse("x\tr\ty").unwrap();
        let h = NodeRelHomomorphism {
            node_map: vec![NodeId(1), NodeId(0)], // a↦y, b↦x: r(y,x) is absent
            rel_map: vec![RelId(0)],
        };
        assert!(!validate_homomorphism(&h, &src, &dst));
    }
}
