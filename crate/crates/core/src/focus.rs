//! Zipper over terms: the proof focus.
//!
//! A [`Focused`] keeps the focused subterm plus the chain of frames leading
//! back to the root, so moves and in-place replacement only rebuild the spine.
//! Child indices are 1-based; a quantifier has exactly one child, its body.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::term::{Connective, Operator, Quantifier, Term};

/// Dotted child-index address, rendered `@` for the root and `@1.2` otherwise.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FocusPath(pub Vec<usize>);

impl FocusPath {
    pub fn root() -> Self {
        FocusPath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn segments(&self) -> &[usize] {
        &self.0
    }

    pub fn child(&self, index: usize) -> FocusPath {
        let mut segs = self.0.clone();
        segs.push(index);
        FocusPath(segs)
    }

    pub fn parent(&self) -> Option<FocusPath> {
        let (_, init) = self.0.split_last()?;
        Some(FocusPath(init.to_vec()))
    }

    pub fn starts_with(&self, prefix: &FocusPath) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl From<Vec<usize>> for FocusPath {
    fn from(v: Vec<usize>) -> Self {
        FocusPath(v)
    }
}

impl fmt::Display for FocusPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_path(self))
    }
}

impl std::str::FromStr for FocusPath {
    type Err = crate::syntax::SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_path(s)
    }
}

impl Serialize for FocusPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FocusPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FocusError {
    #[error("focus has no child {0}")]
    NoSuchChild(usize),
    #[error("focus is already at the root")]
    AtRoot,
    #[error("no sibling in that direction")]
    NoSibling,
    #[error("path {0} does not address a subterm")]
    InvalidPath(FocusPath),
}

/// Arrow-key moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Head {
    Conn(Connective),
    App(Operator),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Frame {
    Args {
        head: Head,
        left: Vec<Term>,
        right: Vec<Term>,
    },
    Body {
        kind: Quantifier,
        binders: Vec<String>,
    },
}

impl Frame {
    fn index(&self) -> usize {
        match self {
            Frame::Args { left, .. } => left.len() + 1,
            Frame::Body { .. } => 1,
        }
    }

    fn plug(&self, hole: Term) -> Term {
        match self {
            Frame::Args { head, left, right } => {
                let mut args = Vec::with_capacity(left.len() + 1 + right.len());
                args.extend(left.iter().cloned());
                args.push(hole);
                args.extend(right.iter().cloned());
                match head {
                    Head::Conn(op) => Term::Conn(*op, args),
                    Head::App(op) => Term::App(*op, args),
                }
            }
            Frame::Body { kind, binders } => Term::Quant(*kind, binders.clone(), Box::new(hole)),
        }
    }
}

/// A term with a focused subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Focused {
    frames: Vec<Frame>,
    focus: Term,
}

impl Focused {
    /// Focus on the root of `t`.
    pub fn new(t: Term) -> Self {
        Focused {
            frames: Vec::new(),
            focus: t,
        }
    }

    pub fn at_path(t: Term, path: &FocusPath) -> Result<Self, FocusError> {
        let mut f = Focused::new(t);
        for &k in path.segments() {
            f = f
                .descend(k)
                .map_err(|_| FocusError::InvalidPath(path.clone()))?;
        }
        Ok(f)
    }

    pub fn focus(&self) -> &Term {
        &self.focus
    }

    pub fn path(&self) -> FocusPath {
        FocusPath(self.frames.iter().map(Frame::index).collect())
    }

    /// The whole term, rebuilt from the frames.
    pub fn root(&self) -> Term {
        self.rebuild(self.focus.clone())
    }

    /// Binder names in scope at the focus, outermost first.
    pub fn binders_in_scope(&self) -> Vec<String> {
        self.frames
            .iter()
            .filter_map(|fr| match fr {
                Frame::Body { binders, .. } => Some(binders.clone()),
                Frame::Args { .. } => None,
            })
            .flatten()
            .collect()
    }

    fn rebuild(&self, hole: Term) -> Term {
        self.frames.iter().rev().fold(hole, |acc, fr| fr.plug(acc))
    }

    /// Move into child `child` (1-based). `descend(1)` is the "down" key.
    pub fn descend(&self, child: usize) -> Result<Focused, FocusError> {
        if child == 0 || child > self.focus.child_count() {
            return Err(FocusError::NoSuchChild(child));
        }
        let (frame, next) = match &self.focus {
            Term::Conn(op, args) => split_args(Head::Conn(*op), args, child),
            Term::App(op, args) => split_args(Head::App(*op), args, child),
            Term::Quant(kind, binders, body) => (
                Frame::Body {
                    kind: *kind,
                    binders: binders.clone(),
                },
                (**body).clone(),
            ),
            _ => return Err(FocusError::NoSuchChild(child)),
        };
        let mut frames = self.frames.clone();
        frames.push(frame);
        Ok(Focused {
            frames,
            focus: next,
        })
    }

    pub fn ascend(&self) -> Result<Focused, FocusError> {
        let mut frames = self.frames.clone();
        let frame = frames.pop().ok_or(FocusError::AtRoot)?;
        Ok(Focused {
            focus: frame.plug(self.focus.clone()),
            frames,
        })
    }

    pub fn next_sibling(&self) -> Result<Focused, FocusError> {
        let mut frames = self.frames.clone();
        match frames.last_mut() {
            Some(Frame::Args { left, right, .. }) if !right.is_empty() => {
                let next = right.remove(0);
                left.push(self.focus.clone());
                Ok(Focused {
                    frames,
                    focus: next,
                })
            }
            _ => Err(FocusError::NoSibling),
        }
    }

    pub fn prev_sibling(&self) -> Result<Focused, FocusError> {
        let mut frames = self.frames.clone();
        match frames.last_mut() {
            Some(Frame::Args { left, right, .. }) if !left.is_empty() => {
                let prev = left.pop().expect("nonempty");
                right.insert(0, self.focus.clone());
                Ok(Focused {
                    frames,
                    focus: prev,
                })
            }
            _ => Err(FocusError::NoSibling),
        }
    }

    /// Apply an arrow-key move: down enters child 1, up ascends, left/right
    /// step between siblings.
    pub fn apply_move(&self, m: Move) -> Result<Focused, FocusError> {
        match m {
            Move::Up => self.ascend(),
            Move::Down => self.descend(1),
            Move::Left => self.prev_sibling(),
            Move::Right => self.next_sibling(),
        }
    }

    /// New root with the focused subterm replaced by `new`.
    pub fn replace_focus(&self, new: Term) -> Term {
        self.rebuild(new)
    }

    /// Like [`replace_focus`](Self::replace_focus) but keeps the focus on the
    /// replaced subterm.
    pub fn with_focus(&self, new: Term) -> Focused {
        Focused {
            frames: self.frames.clone(),
            focus: new,
        }
    }
}

fn split_args(head: Head, args: &[Term], child: usize) -> (Frame, Term) {
    let i = child - 1;
    (
        Frame::Args {
            head,
            left: args[..i].to_vec(),
            right: args[i + 1..].to_vec(),
        },
        args[i].clone(),
    )
}

/// Subterm of `t` at `path`, if the path is valid.
pub fn subterm_at<'a>(t: &'a Term, path: &FocusPath) -> Option<&'a Term> {
    path.segments().iter().try_fold(t, |cur, &k| {
        if k == 0 {
            return None;
        }
        cur.children().get(k - 1).copied()
    })
}

/// Every valid path in `t`, pre-order.
pub fn all_paths(t: &Term) -> Vec<FocusPath> {
    let mut out = Vec::new();
    collect_paths(t, FocusPath::root(), &mut out);
    out
}

fn collect_paths(t: &Term, at: FocusPath, out: &mut Vec<FocusPath>) {
    out.push(at.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        collect_paths(c, at.child(i + 1), out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn second_goal() -> Term {
        let x = || Term::var("x");
        Term::forall(
            &["x"],
            Term::equiv(
                Term::member(x(), Term::intsct(Term::var("e1"), Term::var("e2"))),
                Term::member(x(), Term::intsct(Term::var("e2"), Term::var("e1"))),
            ),
        )
    }

    #[test]
    fn down_twice_reaches_first_membership() {
        let f = Focused::new(second_goal());
        let f = f.apply_move(Move::Down).unwrap().apply_move(Move::Down).unwrap();
        assert_eq!(f.path(), FocusPath(vec![1, 1]));
        assert_eq!(
            f.focus(),
            &Term::member(
                Term::var("x"),
                Term::intsct(Term::var("e1"), Term::var("e2"))
            )
        );
        assert_eq!(f.binders_in_scope(), vec!["x".to_string()]);
    }

    #[test]
    fn blocked_moves() {
        let f = Focused::new(second_goal());
        assert_eq!(f.ascend(), Err(FocusError::AtRoot));
        assert_eq!(f.next_sibling(), Err(FocusError::NoSibling));
        let body = f.descend(1).unwrap();
        assert_eq!(body.prev_sibling(), Err(FocusError::NoSibling));
        assert_eq!(f.descend(2), Err(FocusError::NoSuchChild(2)));
        assert_eq!(f.descend(0), Err(FocusError::NoSuchChild(0)));
    }

    #[test]
    fn move_and_back() {
        let f = Focused::new(second_goal()).descend(1).unwrap().descend(1).unwrap();
        assert_eq!(f.next_sibling().unwrap().prev_sibling().unwrap(), f);
        assert_eq!(f.descend(2).unwrap().ascend().unwrap(), f);
    }

    #[test]
    fn replace_keeps_rest() {
        let f = Focused::at_path(second_goal(), &FocusPath(vec![1, 1])).unwrap();
        assert_eq!(f.replace_focus(f.focus().clone()), second_goal());
        let new = f.replace_focus(Term::Const(true));
        assert_eq!(subterm_at(&new, &FocusPath(vec![1, 1])), Some(&Term::Const(true)));
        assert_eq!(subterm_at(&new, &FocusPath(vec![1, 2])), subterm_at(&second_goal(), &FocusPath(vec![1, 2])));
    }

    #[test]
    fn invalid_path_rejected() {
        assert_eq!(
            Focused::at_path(second_goal(), &FocusPath(vec![2, 1])),
            Err(FocusError::InvalidPath(FocusPath(vec![2, 1])))
        );
    }

    #[test]
    fn paths_enumerated_in_preorder() {
        let t = Term::and(Term::var("p"), Term::negate(Term::var("q")));
        let got: Vec<_> = all_paths(&t).into_iter().map(|p| p.0).collect();
        assert_eq!(got, vec![vec![], vec![1], vec![2], vec![2, 1]]);
    }
}
