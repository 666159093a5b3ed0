"""Append-only protocol transcript.

Each event becomes one JSON object per line with a fixed field order::

    seq_no, tick, event_type, actor, peer, payload, counters

``counters`` is a snapshot taken after the event:

* ``qudits``      qudits put on the quantum channel
* ``payload``     classical field symbols that carry protocol data
* ``monitoring``  classical field symbols spent on identification,
                  basis broadcast, digests and verification replies
* ``key``         field symbols of key shared at the end of a chain

Efficiency is ``key / (qudits + payload)``; monitoring traffic is excluded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Counters:
    qudits: int = 0
    payload: int = 0
    monitoring: int = 0
    key: int = 0

    def snapshot(self) -> dict:
        return {"qudits": self.qudits, "payload": self.payload, "monitoring": self.monitoring, "key": self.key}


@dataclass
class Transcript:
    events: list = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)

    def record(self, tick, event_type, actor=None, peer=None, payload=None, *, qudits=0, payload_symbols=0, monitoring=0, key=0):
        c = self.counters
        c.qudits += qudits
        c.payload += payload_symbols
        c.monitoring += monitoring
        c.key += key
        event = {
            "seq_no": len(self.events),
            "tick": int(tick),
            "event_type": event_type,
            "actor": actor,
            "peer": peer,
            "payload": payload if payload is not None else {},
            "counters": c.snapshot(),
        }
        self.events.append(event)
        return event

    def of_type(self, event_type):
        return [e for e in self.events if e["event_type"] == event_type]

    def lines(self):
        for e in self.events:
            yield json.dumps(e, separators=(",", ":"))

    def dumps(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Transcript":
        tr = cls()
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    tr.events.append(json.loads(line))
        if tr.events:
            tr.counters = Counters(**tr.events[-1]["counters"])
        return tr
