use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use super::{Event, EventKind};

struct Entry(Event);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap, reversed: earliest (time, seq) pops first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time_s
            .total_cmp(&self.0.time_s)
            .then(other.0.seq.cmp(&self.0.seq))
    }
}

/// Min-queue of events ordered by `(time_s, seq)`.
///
/// `seq` is assigned at scheduling time, so events at the same instant pop in
/// the order they were scheduled.
#[derive(Default)]
pub struct EventQueue {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
    now: f64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Current simulated time: the time of the last popped event.
    pub fn now(&self) -> f64 {
        self.now
    }

    /// # Panics
    ///
    /// If `time_s` lies before the last dispatched event.
    pub fn schedule(&mut self, time_s: f64, kind: EventKind) -> u64 {
        assert!(
            time_s >= self.now,
            "event scheduled in the past ({time_s} < {})",
            self.now
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry(Event { time_s, seq, kind }));
        seq
    }

    pub fn pop(&mut self) -> Option<Event> {
        let Entry(event) = self.heap.pop()?;
        self.now = event.time_s;
        Some(event)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
