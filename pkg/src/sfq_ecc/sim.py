"""Cycle-accurate synchronous simulation of synthesized netlists.

A cycle is the atomic time unit: clocked cells (XOR, DFF) latch whatever is
present on their data pins during cycle t and emit it at cycle t+1, while
splitters and SFQ-to-DC converters are transparent within a cycle.  The
clock network is treated as ideal here (fault injection is the business of
:mod:`sfq_ecc.ppv`), so a balanced two-stage encoder delivers each codeword
exactly two cycles after its message enters, one message per cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sfq_ecc import netlist as nl
from sfq_ecc.codes import LinearCode, encode
from sfq_ecc.netlist import Netlist, StructuralError


@dataclass
class SimResult:
    """Per-cycle output frames plus the pipeline latency in cycles."""

    outputs: list          # one np.ndarray of output bits per cycle
    latency: int
    output_ids: list


def latency(net: Netlist) -> int:
    """Clocked cells crossed on any input-to-converter path."""
    return net.depth()


class _Engine:
    """Reusable per-netlist evaluation order and wiring tables."""

    def __init__(self, net: Netlist):
        net.validate()
        self.net = net
        self.driver = {}
        for n in net.data_nets():
            self.driver[(n.dst, n.dst_pin)] = (n.src, n.src_port)
        # topological order over data nets for the combinational sweep
        fanin = {cid: [] for cid in net.cells}
        for n in net.data_nets():
            fanin[n.dst].append(n.src)
        order, seen = [], set()

        def visit(cid):
            if cid in seen:
                return
            seen.add(cid)
            for s in fanin[cid]:
                visit(s)
            order.append(cid)

        for cid in net.cells:
            visit(cid)
        self.order = order

    def run(self, frames, cycles: int):
        """Simulate ``cycles`` cycles; messages beyond ``frames`` are zero."""
        net = self.net
        reg = {cid: 0 for cid in net.cells if net.cells[cid].kind in nl.CLOCKED_KINDS}
        out_frames = []
        val: dict = {}

        def port_value(cell, port):
            key = (cell, port)
            return val[key]

        for t in range(cycles):
            frame = frames[t] if t < len(frames) else {i: 0 for i in net.inputs}
            val = {}
            for cid in self.order:
                c = net.cells[cid]
                if c.kind == nl.INPUT:
                    val[(cid, 0)] = int(frame.get(cid, 0))
                elif c.kind == nl.CLOCK_INPUT:
                    val[(cid, 0)] = 1
                elif c.kind in nl.CLOCKED_KINDS:
                    val[(cid, 0)] = reg[cid]
                elif c.kind == nl.SPLITTER:
                    src = self.driver[(cid, 0)]
                    v = port_value(*src)
                    val[(cid, 0)] = v
                    val[(cid, 1)] = v
                elif c.kind == nl.SFQ2DC:
                    val[(cid, 0)] = port_value(*self.driver[(cid, 0)])
            next_reg = {}
            for cid in reg:
                kind = net.cells[cid].kind
                if kind == nl.XOR:
                    a = port_value(*self.driver[(cid, 0)])
                    b = port_value(*self.driver[(cid, 1)])
                    next_reg[cid] = a ^ b
                else:  # DFF
                    next_reg[cid] = port_value(*self.driver[(cid, 0)])
            reg = next_reg
            out_frames.append(
                np.array([val[(o, 0)] for o in net.outputs], dtype=np.uint8))
        return out_frames


def simulate(net: Netlist, frames, cycles: int | None = None) -> SimResult:
    """Drive ``frames`` (one dict input-id -> bit per cycle) through the netlist.

    A new message may be injected every cycle; outputs appear ``latency``
    cycles after their message.  Raises :class:`StructuralError` before
    simulating anything if the netlist is unbalanced or ill-formed.
    """
    eng = _Engine(net)
    depth = net.depth()
    if cycles is None:
        cycles = len(frames) + depth
    return SimResult(outputs=eng.run(frames, cycles), latency=depth,
                     output_ids=list(net.outputs))


def message_frames(net: Netlist, messages) -> list:
    """Turn message bit-vectors into per-cycle input frames."""
    frames = []
    for m in messages:
        m = np.asarray(m, dtype=np.uint8)
        if m.size != len(net.inputs):
            raise ValueError(f"message length {m.size} != {len(net.inputs)} inputs")
        frames.append({inp: int(b) for inp, b in zip(net.inputs, m)})
    return frames


def verify_equivalence(net: Netlist, code: LinearCode):
    """Exhaustively compare netlist simulation against matrix encoding.

    Returns ``(True, None)`` or ``(False, counterexample_message)``.
    """
    depth = net.depth()
    for idx in range(2**code.k):
        m = code.messages[idx]
        res = simulate(net, message_frames(net, [m]), cycles=depth + 1)
        got = res.outputs[depth]
        if not np.array_equal(got, encode(code, m)):
            return False, m.copy()
    return True, None


def to_timeline(result: SimResult, clock_ghz: float, epoch_ns: float = 0.0):
    """Flatten a simulation into (time_ns, net_id, bit) event rows.

    Cycle t lands at ``floor(epoch/period)*period + t*period``: the epoch
    fixes which clock period injection happened in, and each subsequent
    edge is one period later.  Sub-period analog offsets are outside this
    model, so timestamps are aligned to edges (exact to within one period).
    """
    if clock_ghz <= 0:
        raise ValueError("clock frequency must be positive")
    period = 1.0 / clock_ghz
    base = np.floor(epoch_ns / period) * period if epoch_ns else 0.0
    rows = []
    for t, frame in enumerate(result.outputs):
        stamp = base + t * period
        for oid, bit in zip(result.output_ids, frame):
            rows.append((stamp, oid, int(bit)))
    return rows
