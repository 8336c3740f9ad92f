use std::fmt;

/// 32-bit child reference.
///
/// Internal nodes are stored by index (top bit clear); leaves are stored as the
/// bitwise complement of the interval index, so a set top bit ends a traversal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(transparent)]
pub struct NodeRef(u32);

/// Largest leaf count a `NodeRef` can address.
pub const MAX_LEAVES: usize = 1 << 31;

const LEAF_BIT: u32 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Internal(usize),
    Leaf(usize),
}

impl NodeRef {
    #[inline]
    pub fn internal(index: usize) -> Self {
        debug_assert!(index < MAX_LEAVES);
        NodeRef(index as u32)
    }

    #[inline]
    pub fn leaf(index: usize) -> Self {
        debug_assert!(index < MAX_LEAVES);
        NodeRef(!(index as u32))
    }

    #[inline]
    pub fn from_bits(bits: u32) -> Self {
        NodeRef(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_leaf(self) -> bool {
        self.0 & LEAF_BIT != 0
    }

    #[inline]
    pub fn target(self) -> Target {
        if self.is_leaf() {
            Target::Leaf(!self.0 as usize)
        } else {
            Target::Internal(self.0 as usize)
        }
    }

    #[inline]
    pub fn as_internal(self) -> Option<usize> {
        (!self.is_leaf()).then_some(self.0 as usize)
    }

    #[inline]
    pub fn as_leaf(self) -> Option<usize> {
        self.is_leaf().then_some(!self.0 as usize)
    }
}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.target() {
            Target::Internal(j) => write!(f, "node {j}"),
            Target::Leaf(i) => write!(f, "leaf ~{i}"),
        }
    }
}

/// Two children: index 0 is taken for `ξ < C[j]`, index 1 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
#[repr(C)]
pub struct ForestNode {
    pub children: [NodeRef; 2],
}

impl ForestNode {
    pub fn new(left: NodeRef, right: NodeRef) -> Self {
        ForestNode {
            children: [left, right],
        }
    }

    pub fn left(&self) -> NodeRef {
        self.children[0]
    }

    pub fn right(&self) -> NodeRef {
        self.children[1]
    }
}
