//! Indexed max-priority queue over node ids.
//!
//! Binary max-heap of `(score, id)` with a position table, so the score of any
//! id can be changed in `O(log n)`. Equal scores are ordered by smaller id first.

use crate::error::{Error, Result};

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexedPriorityQueue<S> {
    heap: Vec<usize>,
    pos: Vec<usize>,
    score: Vec<Option<S>>,
}

impl<S: Copy + PartialOrd> IndexedPriorityQueue<S> {
    /// Empty queue accepting ids `0..capacity`.
    pub fn with_capacity(capacity: usize) -> Self {
        IndexedPriorityQueue {
            heap: Vec::with_capacity(capacity),
            pos: vec![ABSENT; capacity],
            score: vec![None; capacity],
        }
    }

    /// Heapifies `(id, score)` pairs in `O(n)`. Ids must be distinct and `< capacity`.
    pub fn from_pairs(capacity: usize, pairs: impl IntoIterator<Item = (usize, S)>) -> Self {
        let mut q = Self::with_capacity(capacity);
        for (id, s) in pairs {
            assert!(q.score[id].is_none(), "duplicate id {id}");
            q.pos[id] = q.heap.len();
            q.heap.push(id);
            q.score[id] = Some(s);
        }
        for i in (0..q.heap.len() / 2).rev() {
            q.sift_down(i);
        }
        q
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.pos.len() && self.pos[id] != ABSENT
    }

    pub fn get(&self, id: usize) -> Option<S> {
        if self.contains(id) {
            self.score[id]
        } else {
            None
        }
    }

    pub fn push(&mut self, id: usize, s: S) {
        assert!(!self.contains(id), "id {id} already queued");
        self.pos[id] = self.heap.len();
        self.heap.push(id);
        self.score[id] = Some(s);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn peek(&self) -> Option<(usize, S)> {
        self.heap.first().map(|&id| (id, self.score[id].unwrap()))
    }

    pub fn pop(&mut self) -> Option<(usize, S)> {
        let top = self.peek()?;
        self.remove_at(0);
        Some(top)
    }

    /// Changes the score of a queued id.
    pub fn update(&mut self, id: usize, s: S) -> Result<()> {
        if !self.contains(id) {
            return Err(Error::KeyAbsent(id));
        }
        self.score[id] = Some(s);
        self.sift_up(self.pos[id]);
        self.sift_down(self.pos[id]);
        Ok(())
    }

    pub fn remove(&mut self, id: usize) -> Result<S> {
        if !self.contains(id) {
            return Err(Error::KeyAbsent(id));
        }
        let s = self.score[id].unwrap();
        self.remove_at(self.pos[id]);
        Ok(s)
    }

    fn remove_at(&mut self, i: usize) {
        let last = self.heap.len() - 1;
        self.swap(i, last);
        let id = self.heap.pop().unwrap();
        self.pos[id] = ABSENT;
        self.score[id] = None;
        if i < self.heap.len() {
            let moved = self.heap[i];
            self.sift_up(i);
            self.sift_down(self.pos[moved]);
        }
    }

    /// Strict priority order: larger score, then smaller id.
    fn above(&self, a: usize, b: usize) -> bool {
        let (sa, sb) = (self.score[a].unwrap(), self.score[b].unwrap());
        sa > sb || (sa == sb && a < b)
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i]] = i;
        self.pos[self.heap[j]] = j;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.above(self.heap[i], self.heap[parent]) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.above(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !self.above(self.heap[child], self.heap[i]) {
                break;
            }
            self.swap(i, child);
            i = child;
        }
    }

    #[cfg(test)]
    fn heap_ok(&self) -> bool {
        (1..self.heap.len()).all(|i| !self.above(self.heap[i], self.heap[(i - 1) / 2]))
            && self.heap.iter().enumerate().all(|(i, &id)| self.pos[id] == i)
    }
}
