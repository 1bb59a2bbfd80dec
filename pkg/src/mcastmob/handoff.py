"""Packet-level discrete-event simulation of a single handoff.

Simulates the join/prune dynamics on the delivery tree, and the Mobile IP
registration baseline, with a fixed per-link delay and independent per-hop
loss on both data and control transmissions. Wireless attachment is
instantaneous and lossless: the mobile and its base station are co-located
(each base station is a router), so latency is a pure function of wired hop
counts, mirroring the hop-count route analysis.

Timeline conventions: the correspondent node emits a data packet every
`packet_interval` ms starting at t=0; the handoff trigger (the moment the
mobile relocates) is placed on an emission boundary after the delivery
pipeline has filled. State changes (join/prune arrivals, registrations)
apply before same-instant data forwarding. A control hop that loses all its
copies is re-sent one refresh period later, which is how soft state recovers
a lost join.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

from .routing import MulticastTree
from .topology import PathOracle, Topology

STRATEGIES = ("plain_join", "triple_join", "advance_join")
OVERLAP_MODES = ("make_before_break", "break_before_make")

_CONTROL = 0  # heap priority: state changes beat same-time data
_DATA = 1
_MAX_RETRIES = 25  # stop re-sending a control hop after this many losses
_TAIL_INTERVALS = 3  # emissions kept flowing after the first delivery via new
_GIVE_UP_REFRESH = 2.0  # abort window (in refresh periods) when the graft never completes


class HandoffError(Exception):
    """Invalid handoff configuration or preconditions."""


@dataclass(frozen=True)
class HandoffConfig:
    """Wire-level knobs for one handoff simulation. Times are milliseconds."""

    per_hop_delay: float = 10.0
    packet_interval: float = 20.0
    message_loss_rate: float = 0.0
    strategy: str = "plain_join"
    advance_lead: float = 0.0
    overlap: str = "make_before_break"
    refresh_period: float = 60_000.0
    seed: int = 0

    def __post_init__(self):
        if self.per_hop_delay <= 0 or self.packet_interval <= 0 or self.refresh_period <= 0:
            raise HandoffError("delays, intervals and refresh period must be positive")
        if not (0.0 <= self.message_loss_rate < 1.0):
            raise HandoffError("message_loss_rate must be in [0, 1)")
        if self.strategy not in STRATEGIES:
            raise HandoffError(f"unknown strategy {self.strategy!r}")
        if self.overlap not in OVERLAP_MODES:
            raise HandoffError(f"unknown overlap mode {self.overlap!r}")
        if self.advance_lead < 0:
            raise HandoffError("advance_lead must be >= 0")


@dataclass(frozen=True)
class TransmissionPlan:
    """How a join/prune hop is (re)transmitted under the configured strategy."""

    copies_per_hop: int
    refresh_period: float


def apply_strategy(cfg: HandoffConfig, message="join") -> TransmissionPlan:
    """Copies per hop for a control message plus the soft-state refresh period.

    triple_join sends three back-to-back copies of joins and prunes; state
    is created when at least one copy survives. All strategies fall back to
    a refresh-period re-send when every copy of a hop is lost.
    """
    if message not in ("join", "prune"):
        raise HandoffError(f"unknown control message {message!r}")
    copies = 3 if cfg.strategy == "triple_join" else 1
    return TransmissionPlan(copies_per_hop=copies, refresh_period=cfg.refresh_period)


def per_hop_failure_probability(cfg: HandoffConfig) -> float:
    """Probability a control hop creates no state despite all its copies."""
    return cfg.message_loss_rate ** apply_strategy(cfg).copies_per_hop


@dataclass(frozen=True)
class HandoffReport:
    """Outcome of one simulated handoff.

    handoff_latency is the time from the relocation trigger to the first
    packet delivered through the new attachment point (inf when it never
    happens within the simulated window). control_path_hops is the graft
    length L for the multicast architecture and the registration distance B
    for Mobile IP. deliveries logs every packet handed to the mobile as
    (seq, time_ms, "old"/"new"), duplicates included.
    """

    strategy: str
    trigger_ms: float
    handoff_latency: float
    packets_lost: int
    packets_duplicated: int
    out_of_order: int
    control_messages: int
    control_path_hops: int
    packets_emitted: int
    packets_delivered: int
    first_new_delivery_ms: float | None
    deliveries: tuple[tuple[int, float, str], ...]


class _EventLoop:
    """Deterministic heap of (time, priority, insertion order, action)."""

    def __init__(self):
        self._heap = []
        self._n = 0

    def push(self, time, prio, action):
        heapq.heappush(self._heap, (time, prio, self._n, action))
        self._n += 1

    def run(self):
        while self._heap:
            time, _, _, action = heapq.heappop(self._heap)
            action(time)


class _Mailbox:
    """Delivery bookkeeping shared by both simulators."""

    def __init__(self):
        self.delivered: dict[int, float] = {}
        self.log: list[tuple[int, float, str]] = []
        self.duplicates = 0
        self.out_of_order = 0
        self.first_new: float | None = None
        self._max_seq = -1
        self.on_first_new = None

    def accept(self, seq, t, via):
        self.log.append((seq, t, via))
        if seq in self.delivered:
            self.duplicates += 1
        else:
            if seq < self._max_seq:
                self.out_of_order += 1
            self._max_seq = max(self._max_seq, seq)
            self.delivered[seq] = t
        if via == "new" and self.first_new is None:
            self.first_new = t
            if self.on_first_new is not None:
                self.on_first_new(t)


def _trigger_time(cfg, warm_hops):
    # relocate on an emission boundary once the pipeline to the old location is full
    t0 = (math.floor(warm_hops * cfg.per_hop_delay / cfg.packet_interval) + 2) * cfg.packet_interval
    if cfg.strategy == "advance_join" and cfg.advance_lead > 0:
        t0 = max(t0, math.ceil(cfg.advance_lead / cfg.packet_interval) * cfg.packet_interval)
    return t0


def _graft_walk(tree: MulticastTree, oracle: PathOracle, new):
    walk = [new]
    while walk[-1] not in tree.on_tree:
        walk.append(oracle.next_hop(walk[-1], tree.cn))
    return walk


def simulate_handoff(topo, oracle, tree, old, new, cfg, loss_fn=None) -> HandoffReport:
    """Simulate one handoff old -> new on the current delivery tree.

    The tree is read, never mutated. `loss_fn(kind, src, dst, attempt) ->
    bool` optionally overrides the seeded per-hop loss draw (test hook).
    """
    cn = tree.cn
    if tree.leaves != {old}:
        raise HandoffError("old must be the tree's only joined leaf")
    if new == cn:
        raise HandoffError("cannot hand off to the correspondent node")
    if new == old:
        raise HandoffError("handoff requires distinct old and new locations")
    oracle._check(new)

    d = cfg.per_hop_delay
    path_old = tree.branch_to_root(old)  # [old, ..., cn]
    walk = _graft_walk(tree, oracle, new)  # [new, ..., meet]
    graft_links = len(walk) - 1
    plan = apply_strategy(cfg)

    upstream = dict(tree.parent)
    for child, up in zip(walk, walk[1:]):
        upstream[child] = up
    fwd: dict[int, set[int]] = {}
    for child in path_old[:-1]:
        fwd.setdefault(tree.parent[child], set()).add(child)

    t0 = _trigger_time(cfg, len(path_old) - 1)
    join_time = t0 - (cfg.advance_lead if cfg.strategy == "advance_join" else 0.0)

    loop = _EventLoop()
    box = _Mailbox()
    rng = random.Random(cfg.seed)
    member = {"old": True, "new": False}
    counters = {"control": 0, "emitted": 0}

    def lost(kind, src, dst, copies, attempt):
        if loss_fn is not None:
            return loss_fn(kind, src, dst, attempt)
        return all(rng.random() < cfg.message_loss_rate for _ in range(copies))

    def attached(via, t):
        if via == "new":
            return t >= t0
        return cfg.overlap == "make_before_break" or t < t0

    def deliver_check(node, seq, t):
        # the old side is gated by attachment alone: with make_before_break the
        # mobile keeps accepting in-flight packets while the prune tears the
        # branch down, which is what makes the handoff lossless
        if node == old and attached("old", t):
            box.accept(seq, t, "old")
        if node == new and member["new"] and attached("new", t):
            box.accept(seq, t, "new")

    def forward(node, seq, t):
        for child in sorted(fwd.get(node, ())):
            if not lost("data", node, child, 1, 0):
                loop.push(t + d, _DATA, _data_at(child, seq))

    def _data_at(node, seq):
        def action(t):
            deliver_check(node, seq, t)
            forward(node, seq, t)

        return action

    def emit_deadline():
        if box.first_new is not None:
            return box.first_new + _TAIL_INTERVALS * cfg.packet_interval
        return t0 + _GIVE_UP_REFRESH * cfg.refresh_period + _TAIL_INTERVALS * cfg.packet_interval

    def emit(seq):
        def action(t):
            counters["emitted"] += 1
            forward(cn, seq, t)
            if t + cfg.packet_interval <= emit_deadline():
                loop.push(t + cfg.packet_interval, _DATA, emit(seq + 1))

        return action

    def send_control(kind, src, dst, on_arrive, attempt=0):
        def action(t):
            counters["control"] += plan.copies_per_hop
            if lost(kind, src, dst, plan.copies_per_hop, attempt):
                if attempt + 1 < _MAX_RETRIES:
                    loop.push(t + plan.refresh_period, _CONTROL,
                              send_control(kind, src, dst, on_arrive, attempt + 1))
            else:
                loop.push(t + d, _CONTROL, on_arrive)

        return action

    def join_arrive(idx):
        def action(t):
            node = walk[idx]
            fwd.setdefault(node, set()).add(walk[idx - 1])
            if idx < graft_links:
                loop.push(t, _CONTROL, send_control("join", node, walk[idx + 1], join_arrive(idx + 1)))

        return action

    def start_join(t):
        member["new"] = True
        if graft_links > 0:
            send_control("join", walk[0], walk[1], join_arrive(1))(t)

    def is_member_node(node):
        return (node == new and member["new"]) or (node == old and member["old"])

    # The prune walks up toward the CN collecting the branch to remove and
    # commits the teardown only when it reaches the fork (a node with other
    # downstream state, a joined member, or the CN). Packets already past
    # the fork keep draining to the old base station, so a lossless channel
    # with make_before_break never drops a packet.
    pending: list[tuple[int, int]] = []

    def _prune_step(node, from_child, t):
        if from_child is not None:
            pending.append((node, from_child))
        live = fwd.get(node, set()) - {c for n, c in pending if n == node}
        if live or node == cn or is_member_node(node):
            for holder, child in pending:
                fwd.get(holder, set()).discard(child)
            return
        up = upstream[node]
        send_control("prune", node, up, lambda tt: _prune_step(up, node, tt))(t)

    def start_prune(t):
        member["old"] = False
        _prune_step(old, None, t)

    if cfg.overlap == "make_before_break":
        box.on_first_new = lambda t: loop.push(t, _CONTROL, start_prune)

    loop.push(0.0, _DATA, emit(0))
    loop.push(join_time, _CONTROL, start_join)
    loop.run()

    latency = box.first_new - t0 if box.first_new is not None else math.inf
    return HandoffReport(
        strategy=cfg.strategy,
        trigger_ms=t0,
        handoff_latency=latency,
        packets_lost=counters["emitted"] - len(box.delivered),
        packets_duplicated=box.duplicates,
        out_of_order=box.out_of_order,
        control_messages=counters["control"],
        control_path_hops=graft_links,
        packets_emitted=counters["emitted"],
        packets_delivered=len(box.delivered),
        first_new_delivery_ms=box.first_new,
        deliveries=tuple(box.log),
    )


def simulate_mip_handoff(oracle, cn, ha, old, new, cfg, loss_fn=None) -> HandoffReport:
    """Mobile IP baseline: registration new -> HA, then packets redirect at the HA.

    Packets always travel CN -> HA, then down the tunnel to whichever
    location is registered when they reach the HA. The advance_join
    strategy has no Mobile IP analogue (registration cannot precede
    arrival) and is treated as a plain registration; copies are always 1.
    """
    for node in (cn, ha, old, new):
        oracle._check(node)
    if new == old:
        raise HandoffError("handoff requires distinct old and new locations")
    if new == cn:
        raise HandoffError("cannot hand off to the correspondent node")

    d = cfg.per_hop_delay
    path_a = oracle.shortest_path(cn, ha)
    tunnels = {"old": oracle.shortest_path(ha, old), "new": oracle.shortest_path(ha, new)}
    reg_path = oracle.shortest_path(new, ha)
    reg_hops = len(reg_path) - 1

    t0 = _trigger_time(cfg, len(path_a) - 1 + len(tunnels["old"]) - 1)

    loop = _EventLoop()
    box = _Mailbox()
    rng = random.Random(cfg.seed)
    state = {"registered": False}
    counters = {"control": 0, "emitted": 0}

    def lost(kind, src, dst, attempt):
        if loss_fn is not None:
            return loss_fn(kind, src, dst, attempt)
        return rng.random() < cfg.message_loss_rate

    def attached(via, t):
        if via == "new":
            return t >= t0
        return cfg.overlap == "make_before_break" or t < t0

    def hop_along(path, idx, seq, via):
        def action(t):
            if idx == len(path) - 1:
                if attached(via, t):
                    box.accept(seq, t, via)
                return
            if not lost("data", path[idx], path[idx + 1], 0):
                loop.push(t + d, _DATA, hop_along(path, idx + 1, seq, via))

        return action

    def dispatch(seq):
        # packet is at the HA: tunnel toward the currently registered location
        def action(t):
            via = "new" if state["registered"] else "old"
            path = tunnels[via]
            if len(path) == 1:
                if attached(via, t):
                    box.accept(seq, t, via)
            elif not lost("data", path[0], path[1], 0):
                loop.push(t + d, _DATA, hop_along(path, 1, seq, via))

        return action

    def leg_a(idx, seq):
        def action(t):
            if idx == len(path_a) - 1:
                dispatch(seq)(t)
            elif not lost("data", path_a[idx], path_a[idx + 1], 0):
                loop.push(t + d, _DATA, leg_a(idx + 1, seq))

        return action

    def emit_deadline():
        if box.first_new is not None:
            return box.first_new + _TAIL_INTERVALS * cfg.packet_interval
        return t0 + _GIVE_UP_REFRESH * cfg.refresh_period + _TAIL_INTERVALS * cfg.packet_interval

    def emit(seq):
        def action(t):
            counters["emitted"] += 1
            leg_a(0, seq)(t)
            if t + cfg.packet_interval <= emit_deadline():
                loop.push(t + cfg.packet_interval, _DATA, emit(seq + 1))

        return action

    def register_arrive(t):
        state["registered"] = True

    def reg_hop(idx, attempt=0):
        def action(t):
            counters["control"] += 1
            if lost("registration", reg_path[idx], reg_path[idx + 1], attempt):
                if attempt + 1 < _MAX_RETRIES:
                    loop.push(t + cfg.refresh_period, _CONTROL, reg_hop(idx, attempt + 1))
            elif idx + 1 == len(reg_path) - 1:
                loop.push(t + d, _CONTROL, register_arrive)
            else:
                loop.push(t + d, _CONTROL, reg_hop(idx + 1))

        return action

    def start_registration(t):
        if reg_hops == 0:
            register_arrive(t)
        else:
            reg_hop(0)(t)

    loop.push(0.0, _DATA, emit(0))
    loop.push(t0, _CONTROL, start_registration)
    loop.run()

    latency = box.first_new - t0 if box.first_new is not None else math.inf
    return HandoffReport(
        strategy="mobile_ip",
        trigger_ms=t0,
        handoff_latency=latency,
        packets_lost=counters["emitted"] - len(box.delivered),
        packets_duplicated=box.duplicates,
        out_of_order=box.out_of_order,
        control_messages=counters["control"],
        control_path_hops=reg_hops,
        packets_emitted=counters["emitted"],
        packets_delivered=len(box.delivered),
        first_new_delivery_ms=box.first_new,
        deliveries=tuple(box.log),
    )
