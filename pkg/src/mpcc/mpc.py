"""Cost-model bookkeeping for a synchronous shared-nothing execution.

Machines exchange fixed-size records in rounds; the ledger records how many
rounds a run used and how many records each logical pass shuffled.  A pass
that reduces with an associative combiner (min, sum) can always be split
across machines, so only non-combinable passes are checked against the
per-machine receive budget in strict mode.

The key-value store models eventual visibility: a value put in round t can
be read in any round after t, never in round t itself.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import mix64


class MpcError(Exception):
    pass


class BudgetExceededError(MpcError):
    """A machine would receive more records in one round than it may hold."""


class DhtVisibilityError(MpcError):
    """A key written in the current round was read back in the same round."""


@dataclass
class CostModel:
    machines: int = 64
    budget_factor: float = 4.0
    record_size_bytes: int = 16
    strict: bool = False
    rounds_label_pass: int = 2
    rounds_contract_pass: int = 2
    rounds_merge_pass: int = 3

    def receive_budget(self, n, m):
        return int(np.ceil(self.budget_factor * (n + m) / self.machines))


@dataclass
class RoundEntry:
    round_index: int
    kind: str
    records: int
    dht_puts: int = 0
    dht_gets: int = 0


@dataclass
class RoundLedger:
    cost: CostModel = field(default_factory=CostModel)
    n0: int = 0
    m0: int = 0
    entries: list = field(default_factory=list)

    @property
    def rounds(self):
        return self.entries[-1].round_index + 1 if self.entries else 0

    @property
    def total_records(self):
        return sum(e.records for e in self.entries)

    @property
    def total_bytes(self):
        return self.total_records * self.cost.record_size_bytes

    def totals(self, kind=None):
        sel = self.entries if kind is None else [e for e in self.entries if e.kind == kind]
        return sum(e.records for e in sel)


def charge_pass(ledger, records, kind, rounds=1, dht_puts=0, dht_gets=0,
                dest=None, combinable=True):
    """Account one logical pass that spans `rounds` synchronous rounds.

    `dest` optionally gives the reduce-key vertex of every record; in strict
    mode a non-combinable pass is checked against the receive budget under
    hash partitioning of the keys.
    """
    if records < 0:
        raise ValueError("records must be non-negative")
    cost = ledger.cost
    if cost.strict and not combinable and dest is not None and len(dest) > 0:
        parts = mix64(np.asarray(dest, dtype=np.uint64)) % np.uint64(cost.machines)
        heaviest = int(np.bincount(parts.astype(np.int64), minlength=cost.machines).max())
        budget = cost.receive_budget(ledger.n0, ledger.m0)
        if heaviest > budget:
            raise BudgetExceededError(
                f"{kind}: one machine receives {heaviest} records, budget {budget}")
    start = ledger.entries[-1].round_index + 1 if ledger.entries else 0
    per = records // rounds
    for i in range(rounds):
        rec = records - per * (rounds - 1) if i == 0 else per
        ledger.entries.append(RoundEntry(
            round_index=start + i, kind=kind, records=rec,
            dht_puts=dht_puts if i == 0 else 0,
            dht_gets=dht_gets if i == 0 else 0))
    return ledger.entries[-1].round_index


_ABSENT = object()


class DhtHandle:
    """Distributed hash table with per-round visibility.

    Puts stage into the current round and become readable only after
    advance_round; reading a key staged this round raises, reading an
    absent key returns the `absent` marker.
    """

    absent = _ABSENT

    def __init__(self):
        self._store = {}
        self._pending = {}
        self.round = 0
        self.puts = 0
        self.gets = 0

    def put(self, key, value):
        self._pending[key] = value
        self.puts += 1

    def get(self, key):
        self.gets += 1
        if key in self._pending:
            raise DhtVisibilityError(f"key {key!r} was put in round {self.round}")
        return self._store.get(key, _ABSENT)

    def put_batch(self, keys, values):
        pending = self._pending
        for k, v in zip(keys, values):
            pending[int(k)] = v
        self.puts += len(keys)

    def get_batch(self, keys):
        self.gets += len(keys)
        store = self._store
        pending = self._pending
        out = []
        for k in keys:
            k = int(k)
            if k in pending:
                raise DhtVisibilityError(f"key {k} was put in round {self.round}")
            out.append(store.get(k, _ABSENT))
        return out


def advance_round(dht):
    """Commit staged puts; they become visible from the next round on."""
    dht._store.update(dht._pending)
    dht._pending.clear()
    dht.round += 1
    return dht.round
