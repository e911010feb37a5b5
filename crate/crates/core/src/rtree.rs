//! R-tree over bounding boxes with node-visit accounting.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::geometry::Mbr;

pub const DEFAULT_FANOUT: usize = 50;
pub const PAGE_SIZE: usize = 4096;

/// Bytes for one serialized node: a 16-byte header plus four `f64`
/// coordinates and an 8-byte child reference per slot.
pub fn node_bytes(fanout: usize) -> usize {
    16 + fanout * 40
}

/// Counts what a search touched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AccessStats {
    pub nodes_visited: u64,
    pub pages_read: u64,
    /// Records examined by a linear scan with no index.
    pub records_scanned: u64,
}

impl AccessStats {
    pub fn add(&mut self, o: &AccessStats) {
        self.nodes_visited += o.nodes_visited;
        self.pages_read += o.pages_read;
        self.records_scanned += o.records_scanned;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexError {
    FanoutTooSmall(usize),
    NotFound(u64),
    Duplicate(u64),
    InvalidMbr(u64),
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexError::FanoutTooSmall(n) => write!(f, "fanout {n} is below 4"),
            IndexError::NotFound(id) => write!(f, "id {id} is not indexed"),
            IndexError::Duplicate(id) => write!(f, "id {id} is already indexed"),
            IndexError::InvalidMbr(id) => write!(f, "bounding box for id {id} is not finite"),
        }
    }
}

impl core::error::Error for IndexError {}

#[derive(Clone, Copy, Debug)]
struct Entry {
    mbr: Mbr,
    /// Node index for internal nodes, payload id for leaves.
    child: u64,
}

#[derive(Clone, Debug)]
struct Node {
    /// Zero for leaves.
    level: u32,
    entries: Vec<Entry>,
}

#[derive(Clone, Debug)]
pub struct RTree {
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: usize,
    fanout: usize,
    min_fill: usize,
    pages_per_node: u64,
    items: BTreeMap<u64, Mbr>,
}

fn bounds(entries: &[Entry]) -> Mbr {
    let mut b = entries[0].mbr;
    for e in &entries[1..] {
        b = b.union(&e.mbr);
    }
    b
}

fn by_center(axis: usize) -> impl Fn(&Entry, &Entry) -> Ordering {
    move |a, b| {
        let (ca, cb) = (a.mbr.center(), b.mbr.center());
        let (va, vb) = if axis == 0 { (ca.x, cb.x) } else { (ca.y, cb.y) };
        va.partial_cmp(&vb).unwrap_or(Ordering::Equal).then(a.child.cmp(&b.child))
    }
}

fn enlargement(b: &Mbr, add: &Mbr) -> f64 {
    b.union(add).area() - b.area()
}

impl RTree {
    pub fn new(fanout: usize) -> Result<Self, IndexError> {
        if fanout < 4 {
            return Err(IndexError::FanoutTooSmall(fanout));
        }
        Ok(RTree {
            nodes: alloc::vec![Node {
                level: 0,
                entries: Vec::new()
            }],
            free: Vec::new(),
            root: 0,
            fanout,
            min_fill: core::cmp::max(2, fanout * 2 / 5),
            pages_per_node: node_bytes(fanout).div_ceil(PAGE_SIZE) as u64,
            items: BTreeMap::new(),
        })
    }

    /// Sort-tile-recursive bulk load.
    pub fn build(entries: Vec<(Mbr, u64)>, fanout: usize) -> Result<Self, IndexError> {
        let mut t = RTree::new(fanout)?;
        for &(m, id) in &entries {
            if !m.is_valid() {
                return Err(IndexError::InvalidMbr(id));
            }
            if t.items.insert(id, m).is_some() {
                return Err(IndexError::Duplicate(id));
            }
        }
        if entries.is_empty() {
            return Ok(t);
        }
        t.nodes.clear();
        let mut level_entries: Vec<Entry> = entries
            .into_iter()
            .map(|(mbr, id)| Entry { mbr, child: id })
            .collect();
        let mut level = 0u32;
        loop {
            let groups = str_pack(level_entries, fanout);
            let mut parents = Vec::with_capacity(groups.len());
            for g in groups {
                let mbr = bounds(&g);
                let idx = t.nodes.len();
                t.nodes.push(Node { level, entries: g });
                parents.push(Entry {
                    mbr,
                    child: idx as u64,
                });
            }
            if parents.len() == 1 {
                t.root = parents[0].child as usize;
                break;
            }
            level_entries = parents;
            level += 1;
        }
        Ok(t)
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of levels; zero for an empty tree.
    pub fn height(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.nodes[self.root].level as usize + 1
        }
    }

    pub fn get(&self, id: u64) -> Option<&Mbr> {
        self.items.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Mbr)> {
        self.items.iter().map(|(k, v)| (*k, v))
    }

    /// Ids whose box intersects `probe`, boundaries included.
    pub fn range_search(&self, probe: &Mbr, stats: &mut AccessStats) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self.root];
        while let Some(n) = stack.pop() {
            stats.nodes_visited += 1;
            stats.pages_read += self.pages_per_node;
            let node = &self.nodes[n];
            for e in &node.entries {
                if e.mbr.intersects(probe) {
                    if node.level == 0 {
                        out.push(e.child);
                    } else {
                        stack.push(e.child as usize);
                    }
                }
            }
        }
        out
    }

    fn alloc_node(&mut self, node: Node) -> usize {
        match self.free.pop() {
            Some(i) => {
                self.nodes[i] = node;
                i
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        }
    }

    pub fn insert(&mut self, mbr: Mbr, id: u64) -> Result<(), IndexError> {
        if !mbr.is_valid() {
            return Err(IndexError::InvalidMbr(id));
        }
        if self.items.contains_key(&id) {
            return Err(IndexError::Duplicate(id));
        }
        self.items.insert(id, mbr);
        self.insert_entry(Entry { mbr, child: id });
        Ok(())
    }

    fn insert_entry(&mut self, e: Entry) {
        if let Some(sibling) = self.insert_rec(self.root, e) {
            let old = self.root;
            let level = self.nodes[old].level + 1;
            let a = Entry {
                mbr: bounds(&self.nodes[old].entries),
                child: old as u64,
            };
            let b = Entry {
                mbr: bounds(&self.nodes[sibling].entries),
                child: sibling as u64,
            };
            self.root = self.alloc_node(Node {
                level,
                entries: alloc::vec![a, b],
            });
        }
    }

    /// Returns the index of a new sibling when `n` had to split.
    fn insert_rec(&mut self, n: usize, e: Entry) -> Option<usize> {
        if self.nodes[n].level == 0 {
            self.nodes[n].entries.push(e);
        } else {
            let slot = choose_subtree(&self.nodes[n].entries, &e.mbr);
            let child = self.nodes[n].entries[slot].child as usize;
            let split = self.insert_rec(child, e);
            self.nodes[n].entries[slot].mbr = bounds(&self.nodes[child].entries);
            if let Some(s) = split {
                let mbr = bounds(&self.nodes[s].entries);
                self.nodes[n].entries.push(Entry {
                    mbr,
                    child: s as u64,
                });
            }
        }
        if self.nodes[n].entries.len() > self.fanout {
            let entries = core::mem::take(&mut self.nodes[n].entries);
            let (a, b) = quadratic_split(entries, self.min_fill);
            self.nodes[n].entries = a;
            let level = self.nodes[n].level;
            Some(self.alloc_node(Node { level, entries: b }))
        } else {
            None
        }
    }

    pub fn remove(&mut self, id: u64) -> Result<(), IndexError> {
        let Some(mbr) = self.items.remove(&id) else {
            return Err(IndexError::NotFound(id));
        };
        let mut orphans = Vec::new();
        let found = self.remove_rec(self.root, &mbr, id, &mut orphans);
        debug_assert!(found);
        loop {
            let r = &self.nodes[self.root];
            if r.level > 0 && r.entries.len() == 1 {
                let child = r.entries[0].child as usize;
                self.free.push(self.root);
                self.root = child;
            } else {
                break;
            }
        }
        for e in orphans {
            self.insert_entry(e);
        }
        Ok(())
    }

    fn remove_rec(&mut self, n: usize, mbr: &Mbr, id: u64, orphans: &mut Vec<Entry>) -> bool {
        if self.nodes[n].level == 0 {
            return match self.nodes[n].entries.iter().position(|e| e.child == id) {
                Some(i) => {
                    self.nodes[n].entries.swap_remove(i);
                    true
                }
                None => false,
            };
        }
        for slot in 0..self.nodes[n].entries.len() {
            let e = self.nodes[n].entries[slot];
            if !e.mbr.contains(mbr) {
                continue;
            }
            let child = e.child as usize;
            if !self.remove_rec(child, mbr, id, orphans) {
                continue;
            }
            if self.nodes[child].entries.len() < self.min_fill {
                self.nodes[n].entries.swap_remove(slot);
                self.collect_leaves(child, orphans);
            } else {
                self.nodes[n].entries[slot].mbr = bounds(&self.nodes[child].entries);
            }
            return true;
        }
        false
    }

    fn collect_leaves(&mut self, n: usize, out: &mut Vec<Entry>) {
        let node = core::mem::replace(
            &mut self.nodes[n],
            Node {
                level: 0,
                entries: Vec::new(),
            },
        );
        self.free.push(n);
        if node.level == 0 {
            out.extend(node.entries);
        } else {
            for e in node.entries {
                self.collect_leaves(e.child as usize, out);
            }
        }
    }

    /// Checks structural invariants; used by tests.
    pub fn check_invariants(&self) -> bool {
        let mut leaf_depth = None;
        let mut count = 0usize;
        let ok = self.check_node(self.root, None, 0, &mut leaf_depth, &mut count);
        ok && count == self.items.len()
    }

    fn check_node(
        &self,
        n: usize,
        parent: Option<&Mbr>,
        depth: usize,
        leaf_depth: &mut Option<usize>,
        count: &mut usize,
    ) -> bool {
        let node = &self.nodes[n];
        if node.entries.len() > self.fanout {
            return false;
        }
        if n != self.root && node.entries.is_empty() {
            return false;
        }
        for e in &node.entries {
            if let Some(p) = parent {
                if !p.contains(&e.mbr) {
                    return false;
                }
            }
        }
        if node.level == 0 {
            *count += node.entries.len();
            match leaf_depth {
                Some(d) if *d != depth => return false,
                Some(_) => {}
                None => *leaf_depth = Some(depth),
            }
            return node
                .entries
                .iter()
                .all(|e| self.items.get(&e.child) == Some(&e.mbr));
        }
        node.entries.iter().all(|e| {
            self.nodes[e.child as usize].level + 1 == node.level
                && bounds(&self.nodes[e.child as usize].entries) == e.mbr
                && self.check_node(e.child as usize, Some(&e.mbr), depth + 1, leaf_depth, count)
        })
    }
}

fn str_pack(mut entries: Vec<Entry>, fanout: usize) -> Vec<Vec<Entry>> {
    let n = entries.len();
    let leaves = n.div_ceil(fanout);
    let slices = libm::ceil(libm::sqrt(leaves as f64)) as usize;
    let per_slice = slices * fanout;
    entries.sort_by(by_center(0));
    let mut groups = Vec::with_capacity(leaves);
    let mut rest = entries;
    while !rest.is_empty() {
        let take = core::cmp::min(per_slice, rest.len());
        let tail = rest.split_off(take);
        let mut slice = rest;
        rest = tail;
        slice.sort_by(by_center(1));
        while !slice.is_empty() {
            let take = core::cmp::min(fanout, slice.len());
            let tail = slice.split_off(take);
            groups.push(slice);
            slice = tail;
        }
    }
    groups
}

fn choose_subtree(entries: &[Entry], m: &Mbr) -> usize {
    let mut best = 0;
    let mut best_key = (f64::INFINITY, f64::INFINITY);
    for (i, e) in entries.iter().enumerate() {
        let key = (enlargement(&e.mbr, m), e.mbr.area());
        if key.0 < best_key.0 || (key.0 == best_key.0 && key.1 < best_key.1) {
            best = i;
            best_key = key;
        }
    }
    best
}

fn quadratic_split(mut entries: Vec<Entry>, min_fill: usize) -> (Vec<Entry>, Vec<Entry>) {
    let n = entries.len();
    let (mut si, mut sj, mut worst) = (0, 1, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let d = entries[i].mbr.union(&entries[j].mbr).area()
                - entries[i].mbr.area()
                - entries[j].mbr.area();
            if d > worst {
                worst = d;
                si = i;
                sj = j;
            }
        }
    }
    let b_seed = entries.swap_remove(sj);
    let a_seed = entries.swap_remove(si);
    let mut a = alloc::vec![a_seed];
    let mut b = alloc::vec![b_seed];
    let mut ba = a_seed.mbr;
    let mut bb = b_seed.mbr;
    while !entries.is_empty() {
        if a.len() + entries.len() == min_fill {
            a.append(&mut entries);
            break;
        }
        if b.len() + entries.len() == min_fill {
            b.append(&mut entries);
            break;
        }
        let mut pick = 0;
        let mut pick_diff = f64::NEG_INFINITY;
        for (k, e) in entries.iter().enumerate() {
            let diff = libm::fabs(enlargement(&ba, &e.mbr) - enlargement(&bb, &e.mbr));
            if diff > pick_diff {
                pick_diff = diff;
                pick = k;
            }
        }
        let e = entries.swap_remove(pick);
        let (da, db) = (enlargement(&ba, &e.mbr), enlargement(&bb, &e.mbr));
        let to_a = da < db || (da == db && (ba.area() < bb.area() || (ba.area() == bb.area() && a.len() <= b.len())));
        if to_a {
            ba = ba.union(&e.mbr);
            a.push(e);
        } else {
            bb = bb.union(&e.mbr);
            b.push(e);
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn boxes(n: usize, seed: u64) -> Vec<(Mbr, u64)> {
        let mut s = seed;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n)
            .map(|i| {
                let x = next() * 10000.0;
                let y = next() * 10000.0;
                (Mbr::square(Point::new(x, y), 20.0 + 30.0 * next()), i as u64)
            })
            .collect()
    }

    #[test]
    fn empty_tree() {
        let t = RTree::build(Vec::new(), 50).unwrap();
        let mut st = AccessStats::default();
        assert!(t.range_search(&Mbr::from_coords(0.0, 0.0, 1.0, 1.0), &mut st).is_empty());
        assert_eq!(st.nodes_visited, 1);
        assert_eq!(t.height(), 0);
        assert_eq!(RTree::build(Vec::new(), 3).err(), Some(IndexError::FanoutTooSmall(3)));
    }

    #[test]
    fn single_entry() {
        let m = Mbr::from_coords(0.0, 0.0, 1.0, 1.0);
        let t = RTree::build(alloc::vec![(m, 7)], 50).unwrap();
        assert_eq!(t.height(), 1);
        let mut st = AccessStats::default();
        assert_eq!(t.range_search(&Mbr::from_coords(1.0, 1.0, 2.0, 2.0), &mut st), [7]);
    }

    #[test]
    fn height_of_bulk_load() {
        let t = RTree::build(boxes(50_000, 1), 50).unwrap();
        assert_eq!(t.height(), 3);
        assert!(t.check_invariants());
    }

    #[test]
    fn page_accounting() {
        assert_eq!(node_bytes(50), 2016);
        let t = RTree::build(boxes(3000, 2), 50).unwrap();
        let mut st = AccessStats::default();
        t.range_search(&Mbr::from_coords(-10.0, -10.0, -5.0, -5.0), &mut st);
        assert_eq!(st.pages_read, st.nodes_visited);
        let mut all = AccessStats::default();
        t.range_search(&Mbr::from_coords(-1.0, -1.0, 1e5, 1e5), &mut all);
        assert!(st.nodes_visited < all.nodes_visited);
    }

    #[test]
    fn insert_remove_keeps_invariants() {
        let mut t = RTree::new(6).unwrap();
        for (m, id) in boxes(400, 3) {
            t.insert(m, id).unwrap();
        }
        assert!(t.check_invariants());
        for id in (0..400).step_by(3) {
            t.remove(id).unwrap();
        }
        assert!(t.check_invariants());
        assert_eq!(t.remove(0), Err(IndexError::NotFound(0)));
        assert_eq!(t.len(), 400 - 134);
    }
}
