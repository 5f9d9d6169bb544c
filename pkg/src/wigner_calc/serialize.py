"""JSON records for kernels, chaos expansions and gradients.

* kernel: ``{"order": n, "entries": [{"idx": [...], "re": x, "im": y}, ...]}``
  with entries in lexicographic ``idx`` order;
* chaos expansion: array of kernel records sorted by degree;
* gradient: array of ``{"tuple": [...], "blocks": [{"degrees": [...], "kernel": <kernel>}]}``
  in lexicographic tuple order.

Floats are written with ``repr`` precision, so a round trip is bit-exact.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .chaos import ChaosExpansion
from .kernel import Kernel, MultiKernel
from .malliavin import Gradient

__all__ = ["ParseError", "deserialize", "from_record", "serialize", "to_record"]


class ParseError(ValueError):
    """Malformed record; ``location`` is a JSON path such as ``$[1].entries[0].idx``."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def kernel_record(k: Kernel) -> dict:
    return {"order": k.order,
            "entries": [{"idx": list(idx), "re": float(c.real), "im": float(c.imag)}
                        for idx, c in k.items()]}


def chaos_record(F: ChaosExpansion) -> list:
    return [kernel_record(k) for _, k in sorted(F.components.items())]


def gradient_record(G: MultiKernel) -> list:
    out = []
    for js, comp in G.components().items():
        out.append({"tuple": list(js),
                    "blocks": [{"degrees": list(deg), "kernel": kernel_record(k)}
                               for deg, k in comp.blocks.items()]})
    return out


def to_record(obj) -> Any:
    if isinstance(obj, Kernel):
        return kernel_record(obj)
    if isinstance(obj, ChaosExpansion):
        return chaos_record(obj)
    if isinstance(obj, MultiKernel) and obj.params >= 1 and obj.arity == obj.params + 1:
        return gradient_record(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj) -> str:
    return json.dumps(to_record(obj), separators=(",", ":"))


def _expect(cond: bool, loc: str, msg: str) -> None:
    if not cond:
        raise ParseError(loc, msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_kernel(rec, loc: str = "$") -> Kernel:
    _expect(isinstance(rec, dict), loc, "kernel record must be an object")
    _expect(set(rec) == {"order", "entries"}, loc, f"expected keys order/entries, got {sorted(rec)}")
    order = rec["order"]
    _expect(_is_int(order) and order >= 0, f"{loc}.order", "order must be a non-negative integer")
    entries = rec["entries"]
    _expect(isinstance(entries, list), f"{loc}.entries", "entries must be an array")
    idx, vals = [], []
    for i, e in enumerate(entries):
        eloc = f"{loc}.entries[{i}]"
        _expect(isinstance(e, dict) and set(e) == {"idx", "re", "im"}, eloc,
                "entry must have exactly idx/re/im")
        _expect(isinstance(e["idx"], list) and all(_is_int(a) and a >= 0 for a in e["idx"]),
                f"{eloc}.idx", "idx must be an array of non-negative integers")
        _expect(len(e["idx"]) == order, f"{eloc}.idx",
                f"idx has length {len(e['idx'])} but the kernel order is {order}")
        _expect(_is_num(e["re"]) and _is_num(e["im"]), eloc, "re/im must be numbers")
        idx.append(e["idx"])
        vals.append(complex(e["re"], e["im"]))
    if order == 0:
        _expect(len(vals) <= 1, f"{loc}.entries", "an order-0 kernel has one entry")
        return Kernel.scalar(vals[0] if vals else 0)
    return Kernel(order, np.array(idx, dtype=np.int64).reshape(len(idx), order), vals)


def parse_chaos(rec, loc: str = "$") -> ChaosExpansion:
    _expect(isinstance(rec, list), loc, "chaos expansion must be an array of kernel records")
    comps = {}
    for i, r in enumerate(rec):
        k = parse_kernel(r, f"{loc}[{i}]")
        _expect(k.order not in comps, f"{loc}[{i}]", f"duplicate degree {k.order}")
        comps[k.order] = k
    return ChaosExpansion(comps)


def parse_gradient(rec, loc: str = "$", order: int | None = None) -> Gradient:
    _expect(isinstance(rec, list), loc, "gradient must be an array")
    pieces = []
    for i, comp in enumerate(rec):
        cloc = f"{loc}[{i}]"
        _expect(isinstance(comp, dict) and set(comp) == {"tuple", "blocks"}, cloc,
                "component must have exactly tuple/blocks")
        js = comp["tuple"]
        _expect(isinstance(js, list) and js and all(_is_int(a) and a >= 0 for a in js),
                f"{cloc}.tuple", "tuple must be a non-empty array of non-negative integers")
        if order is None:
            order = len(js)
        _expect(len(js) == order, f"{cloc}.tuple", f"tuple length {len(js)} differs from order {order}")
        _expect(isinstance(comp["blocks"], list), f"{cloc}.blocks", "blocks must be an array")
        for b, blk in enumerate(comp["blocks"]):
            bloc = f"{cloc}.blocks[{b}]"
            _expect(isinstance(blk, dict) and set(blk) == {"degrees", "kernel"}, bloc,
                    "block must have exactly degrees/kernel")
            deg = blk["degrees"]
            _expect(isinstance(deg, list) and len(deg) == order + 1
                    and all(_is_int(a) and a >= 0 for a in deg), f"{bloc}.degrees",
                    f"degrees must be {order + 1} non-negative integers")
            k = parse_kernel(blk["kernel"], f"{bloc}.kernel")
            _expect(k.order == sum(deg), f"{bloc}.kernel", "kernel order must equal the sum of degrees")
            head = Kernel.basis(*js)
            pieces.append((tuple(deg), head.tensor(k)))
    if order is None:
        raise ParseError(loc, "cannot infer the order of an empty gradient")
    return Gradient._accumulate(order + 1, pieces, order)


def from_record(rec, kind: str | None = None):
    """Rebuild an object; ``kind`` is ``kernel``, ``chaos`` or ``gradient`` (inferred if omitted)."""
    if kind is None:
        if isinstance(rec, dict):
            kind = "kernel"
        elif isinstance(rec, list) and rec and isinstance(rec[0], dict) and "tuple" in rec[0]:
            kind = "gradient"
        else:
            kind = "chaos"
    if kind == "kernel":
        return parse_kernel(rec)
    if kind == "chaos":
        return parse_chaos(rec)
    if kind == "gradient":
        return parse_gradient(rec)
    raise ValueError(f"unknown record kind {kind!r}")


def deserialize(text: str, kind: str | None = None):
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_record(rec, kind)
