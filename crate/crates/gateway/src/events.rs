use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use salt::Message;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Emitted,
    Actuated,
    Programmed,
    Cleared,
    SensorInjected,
    Faulted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    pub node: String,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<Message>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

struct Ring {
    records: VecDeque<EventRecord>,
    next_seq: u64,
}

/// Bounded history of events plus a live broadcast.
///
/// Sequence numbers start at 1 and increase by one per record. The last
/// `capacity` records stay available for replay.
pub struct EventLog {
    ring: Mutex<Ring>,
    capacity: usize,
    live: broadcast::Sender<EventRecord>,
}

impl EventLog {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        let (live, _) = broadcast::channel(capacity);
        EventLog {
            ring: Mutex::new(Ring {
                records: VecDeque::with_capacity(capacity),
                next_seq: 1,
            }),
            capacity,
            live,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn ring(&self) -> std::sync::MutexGuard<'_, Ring> {
        self.ring.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn publish(
        &self,
        node: &str,
        kind: EventKind,
        message: Option<Message>,
        detail: Option<String>,
    ) -> u64 {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64);
        let mut ring = self.ring();
        let record = EventRecord {
            seq: ring.next_seq,
            timestamp,
            node: node.to_string(),
            kind,
            message,
            detail,
        };
        ring.next_seq += 1;
        if ring.records.len() == self.capacity {
            ring.records.pop_front();
        }
        ring.records.push_back(record.clone());
        // sent under the lock so live order matches sequence order
        let _ = self.live.send(record);
        ring.records.back().map_or(0, |r| r.seq)
    }

    /// Sequence number of the newest record, 0 if none.
    pub fn latest(&self) -> u64 {
        self.ring().next_seq - 1
    }

    /// Buffered records with `seq > since`, oldest first.
    pub fn since(&self, since: u64) -> Vec<EventRecord> {
        self.ring()
            .records
            .iter()
            .filter(|r| r.seq > since)
            .cloned()
            .collect()
    }

    /// Subscribes to live records, then snapshots the buffer. Records
    /// published in between appear in both; readers drop duplicates by
    /// sequence number.
    pub fn subscribe(&self, since: u64) -> (broadcast::Receiver<EventRecord>, Vec<EventRecord>) {
        let rx = self.live.subscribe();
        (rx, self.since(since))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_keeps_last_records() {
        let log = EventLog::new(3);
        for i in 0..5 {
            log.publish(&format!("n{i}"), EventKind::Programmed, None, None);
        }
        let seqs: Vec<u64> = log.since(0).iter().map(|r| r.seq).collect();
        assert_eq!(seqs, [3, 4, 5]);
        assert_eq!(log.latest(), 5);
        assert!(log.since(5).is_empty());
    }

    #[test]
    fn subscriber_sees_later_records() {
        let log = EventLog::new(8);
        log.publish("a", EventKind::Cleared, None, None);
        let (mut rx, snapshot) = log.subscribe(0);
        assert_eq!(snapshot.len(), 1);
        log.publish("b", EventKind::Cleared, None, None);
        assert_eq!(rx.try_recv().unwrap().seq, 2);
    }

    #[test]
    fn record_json() {
        let log = EventLog::new(2);
        log.publish(
            "l1",
            EventKind::Actuated,
            Some(Message::hardware("led", ["on"]).unwrap()),
            None,
        );
        let v = serde_json::to_value(&log.since(0)[0]).unwrap();
        assert_eq!(v["kind"], "Actuated");
        assert_eq!(v["message"]["word"], "led");
        assert!(v.get("detail").is_none());
    }
}
