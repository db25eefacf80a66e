//! Social graph: users as vertices, interactions as typed directed edges.
//!
//! Content-sharing edges (posts, reposts, replies, mentions) carry the text
//! being foraged and are numbered densely `0..m`. Follow and friendship edges
//! are stored but never searched. Adjacency between content edges ignores
//! direction: two edges are adjacent when they share an endpoint.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::TermVector;

/// Opaque, non-empty user identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Option<Self> {
        let id = id.into();
        if id.is_empty() {
            None
        } else {
            Some(UserId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Post,
    Repost,
    Reply,
    Mention,
    Follow,
    Friendship,
}

impl EdgeKind {
    pub fn is_content(self) -> bool {
        matches!(
            self,
            EdgeKind::Post | EdgeKind::Repost | EdgeKind::Reply | EdgeKind::Mention
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Post => "post",
            EdgeKind::Repost => "repost",
            EdgeKind::Reply => "reply",
            EdgeKind::Mention => "mention",
            EdgeKind::Follow => "follow",
            EdgeKind::Friendship => "friendship",
        }
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "post" => Ok(EdgeKind::Post),
            "repost" | "retweet" => Ok(EdgeKind::Repost),
            "reply" => Ok(EdgeKind::Reply),
            "mention" => Ok(EdgeKind::Mention),
            "follow" => Ok(EdgeKind::Follow),
            "friendship" | "friend" => Ok(EdgeKind::Friendship),
            _ => Err(Error::UnknownEdgeKind(s.to_string())),
        }
    }
}

/// One line of the JSON Lines corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub id: String,
    pub author: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_user: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_post: Option<String>,
    #[serde(default)]
    pub text: String,
}

/// Dense id of a content-sharing edge, in `0..m`.
pub type EdgeId = usize;

#[derive(Debug, Clone)]
pub struct ContentEdge {
    pub id: EdgeId,
    pub post_id: String,
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
    pub raw_text: String,
    pub vector: TermVector,
}

#[derive(Debug, Clone)]
pub struct StructuralEdge {
    pub post_id: String,
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Default)]
pub struct SocialGraph {
    users: Vec<UserId>,
    user_index: HashMap<UserId, usize>,
    content: Vec<ContentEdge>,
    structural: Vec<StructuralEdge>,
    /// user index -> ids of incident content edges, ascending
    incidence: Vec<Vec<EdgeId>>,
    dangling_parents: usize,
}

impl SocialGraph {
    /// Builds the graph from parsed records, one edge per record.
    ///
    /// Original posts become self-loops on their author. A reply whose parent
    /// is unknown points to `target_user` when given, otherwise to its author,
    /// and is counted in [`SocialGraph::dangling_parents`].
    pub fn build(records: &[PostRecord]) -> Result<Self> {
        let mut g = SocialGraph::default();
        let mut post_author: HashMap<&str, usize> = HashMap::new();

        for rec in records {
            if post_author.contains_key(rec.id.as_str()) {
                return Err(Error::DuplicatePost(rec.id.clone()));
            }
            let kind: EdgeKind = rec.kind.parse()?;
            let author = UserId::new(rec.author.clone())
                .ok_or_else(|| Error::EmptyUser(rec.id.clone()))?;
            let source = g.intern(author);
            let explicit_target = match rec.target_user.as_deref() {
                Some("") | None => None,
                Some(t) => Some(g.intern(UserId(t.to_string()))),
            };

            let target = match (explicit_target, rec.parent_post.as_deref()) {
                (Some(t), _) => t,
                (None, Some(parent)) if !parent.is_empty() => match post_author.get(parent) {
                    Some(&a) => a,
                    None => {
                        g.dangling_parents += 1;
                        source
                    }
                },
                _ => source,
            };
            if explicit_target.is_some() {
                if let Some(parent) = rec.parent_post.as_deref() {
                    if !parent.is_empty() && !post_author.contains_key(parent) {
                        g.dangling_parents += 1;
                    }
                }
            }

            post_author.insert(rec.id.as_str(), source);
            if kind.is_content() {
                let id = g.content.len();
                g.incidence[source].push(id);
                if target != source {
                    g.incidence[target].push(id);
                }
                g.content.push(ContentEdge {
                    id,
                    post_id: rec.id.clone(),
                    source,
                    target,
                    kind,
                    raw_text: rec.text.clone(),
                    vector: TermVector::default(),
                });
            } else {
                g.structural.push(StructuralEdge {
                    post_id: rec.id.clone(),
                    source,
                    target,
                    kind,
                });
            }
        }
        Ok(g)
    }

    fn intern(&mut self, user: UserId) -> usize {
        if let Some(&i) = self.user_index.get(&user) {
            return i;
        }
        let i = self.users.len();
        self.users.push(user.clone());
        self.user_index.insert(user, i);
        self.incidence.push(Vec::new());
        i
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn user(&self, index: usize) -> &UserId {
        &self.users[index]
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.user_index.get(&UserId(id.to_string())).copied()
    }

    /// Number of content-sharing edges, `m`.
    pub fn content_len(&self) -> usize {
        self.content.len()
    }

    /// Total edge count, content plus structural.
    pub fn edge_len(&self) -> usize {
        self.content.len() + self.structural.len()
    }

    pub fn content_edges(&self) -> &[ContentEdge] {
        &self.content
    }

    pub fn structural_edges(&self) -> &[StructuralEdge] {
        &self.structural
    }

    pub fn edge(&self, id: EdgeId) -> Result<&ContentEdge> {
        self.content.get(id).ok_or(Error::UnknownEdge(id))
    }

    pub fn dangling_parents(&self) -> usize {
        self.dangling_parents
    }

    pub fn incident_edges(&self, user: usize) -> &[EdgeId] {
        &self.incidence[user]
    }

    pub(crate) fn set_vectors(&mut self, vectors: Vec<TermVector>) {
        assert_eq!(vectors.len(), self.content.len());
        for (edge, v) in self.content.iter_mut().zip(vectors) {
            edge.vector = v;
        }
    }

    /// Content edges other than `e` sharing at least one endpoint with it, ascending.
    pub fn adjacent_content_edges(&self, e: EdgeId) -> Result<Vec<EdgeId>> {
        let mut out = Vec::new();
        self.adjacent_into(e, &mut out)?;
        Ok(out)
    }

    /// Allocation-reusing form of [`SocialGraph::adjacent_content_edges`].
    pub fn adjacent_into(&self, e: EdgeId, out: &mut Vec<EdgeId>) -> Result<()> {
        let edge = self.edge(e)?;
        out.clear();
        out.extend(self.incidence[edge.source].iter().copied().filter(|&x| x != e));
        if edge.target != edge.source {
            let split = out.len();
            out.extend(self.incidence[edge.target].iter().copied().filter(|&x| x != e));
            if split > 0 && split < out.len() {
                out.sort_unstable();
                out.dedup();
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(id: &str, author: &str, kind: &str) -> PostRecord {
        PostRecord {
            id: id.into(),
            author: author.into(),
            kind: kind.into(),
            target_user: None,
            parent_post: None,
            text: format!("text of {id}"),
        }
    }

    #[test]
    fn single_post_is_self_loop() {
        let g = SocialGraph::build(&[rec("p1", "alice", "post")]).unwrap();
        assert_eq!(g.users().len(), 1);
        assert_eq!(g.content_len(), 1);
        let e = g.edge(0).unwrap();
        assert_eq!(e.source, e.target);
    }

    #[test]
    fn reply_shares_vertex_with_parent() {
        let mut reply = rec("p2", "bob", "reply");
        reply.parent_post = Some("p1".into());
        let g = SocialGraph::build(&[rec("p1", "alice", "post"), reply]).unwrap();
        assert_eq!(g.users().len(), 2);
        assert_eq!(g.content_len(), 2);
        assert_eq!(g.edge(1).unwrap().target, g.user_index("alice").unwrap());
        assert_eq!(g.adjacent_content_edges(0).unwrap(), vec![1]);
        assert_eq!(g.adjacent_content_edges(1).unwrap(), vec![0]);
        assert_eq!(g.dangling_parents(), 0);
    }

    #[test]
    fn follow_is_structural_only() {
        let mut follow = rec("f1", "bob", "follow");
        follow.target_user = Some("alice".into());
        let g = SocialGraph::build(&[rec("p1", "alice", "post"), follow]).unwrap();
        assert_eq!(g.content_len(), 1);
        assert_eq!(g.edge_len(), 2);
        assert!(g.adjacent_content_edges(0).unwrap().is_empty());
    }

    #[test]
    fn duplicate_and_unknown_kind_rejected() {
        let err = SocialGraph::build(&[rec("p1", "a", "post"), rec("p1", "b", "post")]).unwrap_err();
        assert!(matches!(err, Error::DuplicatePost(id) if id == "p1"));
        let err = SocialGraph::build(&[rec("p1", "a", "like")]).unwrap_err();
        assert!(matches!(err, Error::UnknownEdgeKind(k) if k == "like"));
    }

    #[test]
    fn dangling_parent_falls_back() {
        let mut r = rec("p2", "bob", "reply");
        r.parent_post = Some("missing".into());
        let g = SocialGraph::build(&[r.clone()]).unwrap();
        assert_eq!(g.dangling_parents(), 1);
        let e = g.edge(0).unwrap();
        assert_eq!(e.source, e.target);

        r.target_user = Some("carol".into());
        let g = SocialGraph::build(&[r]).unwrap();
        assert_eq!(g.dangling_parents(), 1);
        assert_eq!(g.edge(0).unwrap().target, g.user_index("carol").unwrap());
    }

    #[test]
    fn star_of_replies() {
        let mut recs = vec![];
        for i in 0..3 {
            let mut r = rec(&format!("r{i}"), &format!("u{i}"), "reply");
            r.target_user = Some("hub".into());
            recs.push(r);
        }
        let g = SocialGraph::build(&recs).unwrap();
        assert_eq!(g.adjacent_content_edges(0).unwrap(), vec![1, 2]);
        assert_eq!(g.adjacent_content_edges(1).unwrap(), vec![0, 2]);
        assert_eq!(g.adjacent_content_edges(2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn isolated_post_and_unknown_edge() {
        let g = SocialGraph::build(&[rec("p1", "a", "post"), rec("p2", "b", "post")]).unwrap();
        assert!(g.adjacent_content_edges(0).unwrap().is_empty());
        assert!(matches!(g.adjacent_content_edges(7), Err(Error::UnknownEdge(7))));
    }

    #[test]
    fn edge_shared_on_both_endpoints_listed_once() {
        let mut a = rec("p1", "a", "mention");
        a.target_user = Some("b".into());
        let mut b = rec("p2", "b", "mention");
        b.target_user = Some("a".into());
        let g = SocialGraph::build(&[a, b]).unwrap();
        assert_eq!(g.adjacent_content_edges(0).unwrap(), vec![1]);
    }
}
