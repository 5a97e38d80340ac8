"""Gate-level netlist container for SFQ encoder circuits.

Cells come in six kinds: ``XOR`` and ``DFF`` are clocked, ``SPLITTER``
duplicates one pulse to two branches, ``SFQ2DC`` drives one codeword bit to
the DC interface, and ``INPUT``/``CLOCK_INPUT`` are sources.  Nets connect
exactly one driver port to exactly one sink pin; a validated netlist has
fan-out one everywhere, an acyclic data graph, and the same clocked depth on
every input-to-converter path.

Serialization is a versioned JSON document with stable cell ids, so two
synthesis runs of the same code diff cleanly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

XOR = "XOR"
DFF = "DFF"
SPLITTER = "SPLITTER"
SFQ2DC = "SFQ2DC"
INPUT = "INPUT"
CLOCK_INPUT = "CLOCK_INPUT"

CLOCKED_KINDS = (XOR, DFF)
DATA_PINS = {XOR: 2, DFF: 1, SPLITTER: 1, SFQ2DC: 1, INPUT: 0, CLOCK_INPUT: 0}
OUT_PORTS = {XOR: 1, DFF: 1, SPLITTER: 2, SFQ2DC: 1, INPUT: 1, CLOCK_INPUT: 1}

SERIAL_VERSION = 1


class StructuralError(RuntimeError):
    """A netlist violates a structural rule (fan-out, balance, pins...)."""


@dataclass(frozen=True)
class Cell:
    id: str
    kind: str
    role: str = ""  # splitters carry "data" or "clock"


@dataclass(frozen=True)
class Net:
    """Directed edge driver-port -> sink-pin.

    ``pin`` counts data pins 0..; the clock pin of a clocked cell is the
    string ``"clk"`` so data and clock graphs separate cleanly.
    """

    src: str
    src_port: int
    dst: str
    dst_pin: object


@dataclass
class Netlist:
    name: str
    cells: dict = field(default_factory=dict)   # id -> Cell, insertion ordered
    nets: list = field(default_factory=list)    # list[Net]
    outputs: list = field(default_factory=list)  # SFQ2DC ids, codeword order
    inputs: list = field(default_factory=list)   # INPUT ids, message order
    clock: str | None = None                     # CLOCK_INPUT id

    def add_cell(self, cid: str, kind: str, role: str = "") -> str:
        if cid in self.cells:
            raise StructuralError(f"duplicate cell id {cid!r}")
        self.cells[cid] = Cell(cid, kind, role)
        return cid

    def connect(self, src: str, dst: str, src_port: int = 0, dst_pin: object = 0):
        self.nets.append(Net(src, src_port, dst, dst_pin))

    # -- queries ----------------------------------------------------------

    def counts(self) -> dict:
        """Cell tally by kind, with splitters split into data/clock roles."""
        out = {k: 0 for k in (XOR, DFF, SPLITTER, SFQ2DC)}
        data_spl = clock_spl = 0
        for c in self.cells.values():
            if c.kind in out:
                out[c.kind] += 1
            if c.kind == SPLITTER:
                if c.role == "clock":
                    clock_spl += 1
                else:
                    data_spl += 1
        out["data_splitters"] = data_spl
        out["clock_splitters"] = clock_spl
        return out

    def clocked_cells(self):
        return [c.id for c in self.cells.values() if c.kind in CLOCKED_KINDS]

    def data_nets(self):
        return [n for n in self.nets if n.dst_pin != "clk"]

    def sinks_of(self, cid: str):
        return [n for n in self.nets if n.src == cid]

    def driver_of(self, cid: str, pin: object = 0):
        for n in self.nets:
            if n.dst == cid and n.dst_pin == pin:
                return n
        return None

    # -- validation -------------------------------------------------------

    def validate(self):
        """Check pin counts, fan-out one, acyclicity and path balance."""
        per_port: dict = {}
        per_pin: dict = {}
        for n in self.nets:
            if n.src not in self.cells or n.dst not in self.cells:
                raise StructuralError(f"net references unknown cell: {n}")
            per_port[(n.src, n.src_port)] = per_port.get((n.src, n.src_port), 0) + 1
            per_pin[(n.dst, n.dst_pin)] = per_pin.get((n.dst, n.dst_pin), 0) + 1
        for key, cnt in per_port.items():
            if cnt > 1:
                raise StructuralError(f"fan-out {cnt} at output port {key}")
        for key, cnt in per_pin.items():
            if cnt > 1:
                raise StructuralError(f"{cnt} drivers on input pin {key}")
        for c in self.cells.values():
            want = DATA_PINS[c.kind]
            have = sum(1 for (cid, pin), _ in per_pin.items()
                       if cid == c.id and pin != "clk")
            if have != want:
                raise StructuralError(
                    f"cell {c.id} ({c.kind}) has {have} data inputs, expected {want}")
            if c.kind in CLOCKED_KINDS and self.clock is not None:
                if (c.id, "clk") not in per_pin:
                    raise StructuralError(f"clocked cell {c.id} has no clock net")
        self._depths()  # raises on cycles / imbalance

    def _depths(self) -> dict:
        """Clocked depth of every cell output along data nets.

        Raises when converging paths disagree, which doubles as the
        balance check; the topological order detects cycles.
        """
        fanin: dict = {cid: [] for cid in self.cells}
        for n in self.data_nets():
            fanin[n.dst].append(n)
        depth: dict = {}
        order = []
        seen = set()

        def visit(cid, stack):
            if cid in seen:
                return
            if cid in stack:
                raise StructuralError(f"cycle through {cid}")
            stack.add(cid)
            for n in fanin[cid]:
                visit(n.src, stack)
            stack.discard(cid)
            seen.add(cid)
            order.append(cid)

        for cid in self.cells:
            visit(cid, set())
        for cid in order:
            c = self.cells[cid]
            if c.kind in (INPUT, CLOCK_INPUT):
                depth[cid] = 0
                continue
            ins = [depth[n.src] for n in fanin[cid]]
            if not ins:
                depth[cid] = 0
                continue
            if c.kind in CLOCKED_KINDS:
                if len(set(ins)) > 1:
                    raise StructuralError(
                        f"unbalanced inputs at {cid}: depths {sorted(set(ins))}")
                depth[cid] = ins[0] + 1
            else:
                if len(set(ins)) > 1:
                    raise StructuralError(
                        f"unbalanced inputs at {cid}: depths {sorted(set(ins))}")
                depth[cid] = ins[0]
        if self.outputs:
            out_depths = {depth[o] for o in self.outputs}
            if len(out_depths) > 1:
                raise StructuralError(f"outputs at unequal depths {sorted(out_depths)}")
        return depth

    def depth(self) -> int:
        """Clocked cells on any input-to-output path (the pipeline latency)."""
        d = self._depths()
        return max((d[o] for o in self.outputs), default=0)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": SERIAL_VERSION,
            "name": self.name,
            "cells": [
                {"id": c.id, "kind": c.kind, **({"role": c.role} if c.role else {})}
                for c in self.cells.values()
            ],
            "nets": [
                {"from": f"{n.src}:{n.src_port}", "to": f"{n.dst}:{n.dst_pin}"}
                for n in self.nets
            ],
            "outputs": list(self.outputs),
            "inputs": list(self.inputs),
            "clock": self.clock,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, doc: dict) -> "Netlist":
        if doc.get("version") != SERIAL_VERSION:
            raise StructuralError(f"unsupported netlist version {doc.get('version')!r}")
        nl = cls(name=doc.get("name", "netlist"))
        for c in doc["cells"]:
            nl.add_cell(c["id"], c["kind"], c.get("role", ""))
        for n in doc["nets"]:
            src, src_port = n["from"].rsplit(":", 1)
            dst, dst_pin = n["to"].rsplit(":", 1)
            pin: object = dst_pin if dst_pin == "clk" else int(dst_pin)
            nl.connect(src, dst, int(src_port), pin)
        nl.outputs = list(doc["outputs"])
        nl.inputs = list(doc.get("inputs", []))
        nl.clock = doc.get("clock")
        return nl

    @classmethod
    def from_json(cls, text: str) -> "Netlist":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise StructuralError(f"netlist JSON malformed: {e}") from e
        return cls.from_dict(doc)
