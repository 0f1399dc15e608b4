"""Deterministic round-based message-passing simulator with a pluggable
per-round adversary.

Execution is lock-step: all sends of round r are computed from node state
after round r-1, the adversary inspects the pending messages (plus the
full history and all node inputs) and takes at most one action, then
deliveries land. Corrupted recipients are not notified. Payloads are
bit-strings ('0'/'1' characters) of at most `bandwidth` bits per directed
edge per round.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class SimulationError(Exception):
    """Protocol wiring errors (not in-protocol faults, which are traced)."""


@dataclass(frozen=True)
class RoundMessage:
    round: int
    src: int
    dst: int
    edge_id: int
    payload: str  # bit-string as sent

    def slot(self) -> tuple[int, int]:
        return (self.edge_id, self.src)


@dataclass(frozen=True)
class AdversaryAction:
    """One action per round: corrupt a single directed in-flight message
    (replacement payload, or None to drop it) or eavesdrop a whole edge."""

    kind: str  # "corrupt" | "eavesdrop"
    edge_id: int
    src: int | None = None  # corrupt: sender side of the directed slot
    replacement: str | None = None  # corrupt: None means drop
    both_directions: bool = False  # looser model: hit both slots of the edge


@dataclass(frozen=True)
class Delivery:
    round: int
    src: int
    dst: int
    edge_id: int
    sent: str
    received: str | None  # None when the message was dropped
    corrupted: bool


@dataclass
class RoundTrace:
    """Replayable record of one protocol run."""

    rounds: int
    deliveries: list[Delivery] = field(default_factory=list)
    actions: list[tuple[int, AdversaryAction]] = field(default_factory=list)
    observations: list[tuple[int, RoundMessage]] = field(default_factory=list)
    faults: list[tuple[int, int, str]] = field(default_factory=list)
    outputs: dict[int, str] = field(default_factory=dict)
    skipped: list[tuple[int, int]] = field(default_factory=list)

    def actions_in_round(self, r: int) -> list[AdversaryAction]:
        return [a for rr, a in self.actions if rr == r]

    def export(self) -> str:
        lines = [f"rounds {self.rounds}"]
        for r1, r2 in self.skipped:
            lines.append(f"skip {r1} {r2}")
        for d in sorted(
            self.deliveries, key=lambda d: (d.round, d.edge_id, d.src)
        ):
            recv = d.received if d.received is not None else "-"
            lines.append(
                f"round {d.round} msg src={d.src} dst={d.dst} edge={d.edge_id} "
                f"sent={d.sent or '-'} recv={recv or '-'} corrupted={int(d.corrupted)}"
            )
        for r, a in self.actions:
            src = "-" if a.src is None else str(a.src)
            repl = a.replacement if a.replacement is not None else "-"
            lines.append(
                f"round {r} adv kind={a.kind} edge={a.edge_id} src={src} repl={repl or '-'}"
            )
        for r, m in self.observations:
            lines.append(
                f"round {r} eavesdropped src={m.src} dst={m.dst} edge={m.edge_id} "
                f"payload={m.payload or '-'}"
            )
        for r, node, why in self.faults:
            lines.append(f"round {r} fault node={node} reason={why}")
        for node in sorted(self.outputs):
            lines.append(f"output node={node} value={self.outputs[node]}")
        return "\n".join(lines) + "\n"


class AdversaryView:
    """Read-only window the adversary acts on: the graph, the pending
    round's messages, every node's input, and the whole history."""

    def __init__(self, graph, round_no, pending, inputs, trace):
        self.graph = graph
        self.round = round_no
        self.pending = tuple(pending)
        self.inputs = dict(inputs)
        self.trace = trace


class NullAdversary:
    """Takes no action, ever."""

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        return None


class FixedEdgeAdversary:
    """Corrupts one pending directed message on a fixed edge every round.

    mode "drop" removes the message; mode "flip" replaces it with its
    bitwise complement. Prefers the low-endpoint sender's slot when both
    directions carry messages.
    """

    def __init__(self, edge_id: int, mode: str = "drop"):
        if mode not in ("drop", "flip"):
            raise SimulationError(f"unknown fixed-edge mode {mode!r}")
        self.edge_id = edge_id
        self.mode = mode

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        candidates = [m for m in view.pending if m.edge_id == self.edge_id]
        if not candidates:
            return None
        m = min(candidates, key=lambda x: x.src)
        repl = None if self.mode == "drop" else _complement(m.payload)
        return AdversaryAction("corrupt", self.edge_id, m.src, repl)


class RoundRobinAdversary:
    """Cycles through the edge IDs, corrupting one pending message per
    round on the current edge when it carries any."""

    def __init__(self, num_edges: int, mode: str = "drop"):
        self.num_edges = num_edges
        self.mode = mode
        self._i = 0

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        eid = self._i % self.num_edges
        self._i += 1
        candidates = [m for m in view.pending if m.edge_id == eid]
        if not candidates:
            return None
        m = min(candidates, key=lambda x: x.src)
        repl = None if self.mode == "drop" else _complement(m.payload)
        return AdversaryAction("corrupt", eid, m.src, repl)


class RandomEdgeAdversary:
    """Corrupts a uniformly random pending directed message each round;
    replacement is a random bit-string of the same length."""

    def __init__(self, seed: int, mode: str = "random"):
        import random

        self._rng = random.Random(seed)
        self.mode = mode

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        if not view.pending:
            return None
        ordered = sorted(view.pending, key=lambda m: (m.edge_id, m.src))
        m = ordered[self._rng.randrange(len(ordered))]
        if self.mode == "drop":
            repl = None
        else:
            repl = "".join(
                "01"[self._rng.getrandbits(1)] for _ in range(len(m.payload))
            )
        return AdversaryAction("corrupt", m.edge_id, m.src, repl)


class GreedyMajorityBreaker:
    """Heuristic attacker on replicated traffic: drops one message from
    the (destination, payload) group currently most repeated, starving
    majority formation at that receiver."""

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        if not view.pending:
            return None
        groups: dict[tuple[int, str], list] = {}
        for m in view.pending:
            groups.setdefault((m.dst, m.payload), []).append(m)
        key = max(groups, key=lambda k: (len(groups[k]), -k[0]))
        m = min(groups[key], key=lambda x: (x.edge_id, x.src))
        return AdversaryAction("corrupt", m.edge_id, m.src, None)


class FixedEavesdropper:
    """Listens to both directions of one fixed edge every round."""

    def __init__(self, edge_id: int):
        self.edge_id = edge_id

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        return AdversaryAction("eavesdrop", self.edge_id)


class RoundRobinEavesdropper:
    """Listens to each edge in turn."""

    def __init__(self, num_edges: int):
        self.num_edges = num_edges
        self._i = 0

    def act(self, view: AdversaryView) -> AdversaryAction | None:
        eid = self._i % self.num_edges
        self._i += 1
        return AdversaryAction("eavesdrop", eid)


def _complement(bits: str) -> str:
    return "".join("1" if b == "0" else "0" for b in bits)


def make_adversary(spec: str, g, seed: int = 0):
    """Adversary factory for the CLI: null | fixed:<eid>[:flip] |
    random | greedy | roundrobin[:flip] | eavesdrop:<eid> |
    eavesdrop-roundrobin."""
    parts = spec.split(":")
    name = parts[0]
    if name == "null":
        return NullAdversary()
    if name == "fixed":
        mode = parts[2] if len(parts) > 2 else "drop"
        return FixedEdgeAdversary(int(parts[1]), mode)
    if name == "random":
        return RandomEdgeAdversary(seed)
    if name == "greedy":
        return GreedyMajorityBreaker()
    if name == "roundrobin":
        mode = parts[1] if len(parts) > 1 else "drop"
        return RoundRobinAdversary(g.m, mode)
    if name == "eavesdrop":
        return FixedEavesdropper(int(parts[1]))
    if name == "eavesdrop-roundrobin":
        return RoundRobinEavesdropper(g.m)
    raise SimulationError(f"unknown adversary {spec!r}")


def run_protocol(
    g,
    programs: dict[int, object],
    adversary,
    rounds: int,
    bandwidth: int,
    *,
    inputs: dict[int, str] | None = None,
    allow_fast_forward: bool = True,
    allow_both_directions: bool = False,
) -> RoundTrace:
    """Run `rounds` synchronous rounds of the node programs under the
    adversary and return the trace.

    Node programs implement round(r, inbox) -> {neighbor: payload} and
    output() -> str; inbox maps neighbor -> payload for messages delivered
    at the end of round r-1 (dropped messages simply do not appear).
    Programs may implement next_active_round(r) to let the driver skip
    runs of rounds in which no node sends and none is due to act; skipped
    spans are recorded in the trace.
    """
    if bandwidth < 1:
        raise SimulationError("bandwidth must be >= 1")
    inputs = inputs or {}
    trace = RoundTrace(rounds)
    inbox: dict[int, dict[int, str]] = {v: {} for v in range(g.n)}

    can_skip = allow_fast_forward and all(
        hasattr(p, "next_active_round") for p in programs.values()
    )
    r = 1
    while r <= rounds:
        pending: list[RoundMessage] = []
        for v in range(g.n):
            outs = programs[v].round(r, inbox[v]) or {}
            for dst in sorted(outs):
                payload = outs[dst]
                eid = g.edge_id(v, dst)
                if eid is None:
                    trace.faults.append((r, v, f"no edge to {dst}"))
                    continue
                if len(payload) > bandwidth:
                    trace.faults.append(
                        (r, v, f"bandwidth exceeded ({len(payload)} > {bandwidth})")
                    )
                    continue
                if payload and set(payload) - {"0", "1"}:
                    trace.faults.append((r, v, "payload is not a bit-string"))
                    continue
                pending.append(RoundMessage(r, v, dst, eid, payload))

        action = adversary.act(
            AdversaryView(g, r, pending, inputs, trace)
        )
        dropped_slot = None
        replacement = None
        observed_edge = None
        corrupt_whole_edge = False
        if action is not None:
            if action.kind == "corrupt":
                if action.both_directions:
                    if not allow_both_directions:
                        raise SimulationError(
                            "both-direction corruption requires allow_both_directions"
                        )
                    corrupt_whole_edge = True
                    replacement = action.replacement
                    if not any(m.edge_id == action.edge_id for m in pending):
                        raise SimulationError("adversary corrupted an idle edge")
                else:
                    if action.src is None:
                        raise SimulationError("corrupt action needs the sender side")
                    dropped_slot = (action.edge_id, action.src)
                    replacement = action.replacement
                    if not any(m.slot() == dropped_slot for m in pending):
                        raise SimulationError(
                            "adversary corrupted an empty slot "
                            f"(round {r}, edge {action.edge_id}, src {action.src})"
                        )
            elif action.kind == "eavesdrop":
                observed_edge = action.edge_id
            else:
                raise SimulationError(f"unknown action kind {action.kind!r}")
            trace.actions.append((r, action))

        inbox = {v: {} for v in range(g.n)}
        for m in pending:
            if observed_edge is not None and m.edge_id == observed_edge:
                trace.observations.append((r, m))
            hit = (dropped_slot is not None and m.slot() == dropped_slot) or (
                corrupt_whole_edge and m.edge_id == action.edge_id
            )
            if hit:
                if replacement is None:
                    trace.deliveries.append(
                        Delivery(r, m.src, m.dst, m.edge_id, m.payload, None, True)
                    )
                else:
                    inbox[m.dst][m.src] = replacement
                    trace.deliveries.append(
                        Delivery(
                            r, m.src, m.dst, m.edge_id, m.payload, replacement, True
                        )
                    )
            else:
                inbox[m.dst][m.src] = m.payload
                trace.deliveries.append(
                    Delivery(r, m.src, m.dst, m.edge_id, m.payload, m.payload, False)
                )

        nxt = r + 1
        if can_skip and not pending:
            targets = [programs[v].next_active_round(r) for v in range(g.n)]
            targets = [x for x in targets if x is not None]
            jump = min(targets) if targets else rounds + 1
            if jump > nxt:
                jump = min(jump, rounds + 1)
                trace.skipped.append((nxt, jump - 1))
                for v in range(g.n):
                    programs[v].advance_to(jump)
                nxt = jump
        r = nxt

    for v in range(g.n):
        trace.outputs[v] = programs[v].output()
    return trace


class EchoProgram:
    """Sends its input to every neighbor each round; remembers the last
    payload received from each neighbor."""

    def __init__(self, node: int, g, value: str):
        self.node = node
        self.neighbors = [w for w, _ in g.adjacency[node]]
        self.value = value
        self.last: dict[int, str] = {}

    def round(self, r, inbox):
        self.last.update(inbox)
        return {w: self.value for w in self.neighbors}

    def output(self) -> str:
        return ",".join(f"{w}:{self.last.get(w, '-')}" for w in sorted(self.neighbors))


class FloodMaxProgram:
    """Floods the maximum input value seen so far (fixed-width bits)."""

    def __init__(self, node: int, g, value: str):
        self.node = node
        self.neighbors = [w for w, _ in g.adjacency[node]]
        self.best = value

    def round(self, r, inbox):
        for payload in inbox.values():
            if len(payload) == len(self.best) and payload > self.best:
                self.best = payload
        return {w: self.best for w in self.neighbors}

    def output(self) -> str:
        return self.best


def make_program_factory(name: str, g, width: int = 8):
    """Base-program factory for the CLI: flood | echo. Inputs default to
    the node ID in fixed-width binary."""

    def value_of(node: int) -> str:
        return format(node, f"0{width}b")

    if name == "flood":
        return lambda node: FloodMaxProgram(node, g, value_of(node)), value_of
    if name == "echo":
        return lambda node: EchoProgram(node, g, value_of(node)), value_of
    raise SimulationError(f"unknown program {name!r}")
