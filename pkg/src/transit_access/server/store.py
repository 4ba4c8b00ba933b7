"""In-memory scenario store: per-id mutation locks, idle eviction.

Scenarios are session-scoped and exploratory; the store never persists.
Concurrent mutations of the same scenario are rejected (the API returns
409) rather than queued, so each scenario's history is a simple serial
order.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from ..scenario import Scenario

DEFAULT_IDLE_EVICTION_S = 3600.0


@dataclass
class ScenarioEntry:
    scenario: Scenario
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)


class ScenarioBusy(Exception):
    """Another mutation of the same scenario is in flight."""


class ScenarioStore:
    def __init__(self, idle_eviction_s: float = DEFAULT_IDLE_EVICTION_S):
        self._entries: dict[str, ScenarioEntry] = {}
        self._guard = threading.Lock()
        self._idle_eviction_s = idle_eviction_s

    def _evict_idle(self, now: float) -> None:
        dead = [
            sid for sid, entry in self._entries.items()
            if now - entry.last_access > self._idle_eviction_s
        ]
        for sid in dead:
            del self._entries[sid]

    def create(self, city: str, scenario_id: str | None = None) -> Scenario:
        with self._guard:
            now = time.monotonic()
            self._evict_idle(now)
            sid = scenario_id or uuid.uuid4().hex[:12]
            if sid in self._entries:
                raise KeyError(f"scenario id {sid} already exists")
            scenario = Scenario(id=sid, city=city)
            self._entries[sid] = ScenarioEntry(scenario)
            return scenario

    def get(self, scenario_id: str) -> Scenario | None:
        with self._guard:
            entry = self._entries.get(scenario_id)
            if entry is None:
                return None
            entry.last_access = time.monotonic()
            return entry.scenario

    def mutate(self, scenario_id: str, fn) -> Scenario:
        """Apply ``fn(scenario) -> scenario`` under the per-scenario lock.

        Raises KeyError for unknown ids and ScenarioBusy when a concurrent
        mutation holds the lock.
        """
        with self._guard:
            entry = self._entries.get(scenario_id)
            if entry is None:
                raise KeyError(scenario_id)
        if not entry.lock.acquire(blocking=False):
            raise ScenarioBusy(scenario_id)
        try:
            entry.scenario = fn(entry.scenario)
            entry.last_access = time.monotonic()
            return entry.scenario
        finally:
            entry.lock.release()
