"""Monte Carlo simulation of temporal fault-tree semantics.

This is the independent oracle against which the closed-form gate formulas
are verified: it samples exponential failure times per basic event and
evaluates every node to an occurrence time (or "never"), with no shared
code or mathematics with the closed forms.

Determinism contract: every (basic event, sample block) pair has its own
counter-based random stream derived from the seed, a stable hash of the
event id and the block index.  Estimates are therefore bit-identical for a
fixed seed regardless of evaluation order or parallelism, and adding events
to a tree does not perturb the draws of existing events.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .model import BasicEvent, FaultTree, GateKind, GateNode, check_valid
from .tfn import TFN

try:  # compiled kernel if the extension was built, numpy fallback otherwise
    from . import _simkernel as _kernel
except ImportError:  # pragma: no cover - depends on build environment
    from . import _simkernel_py as _kernel

from . import _simkernel_py

_KIND_CODE = {
    GateKind.AND: 1,
    GateKind.OR: 2,
    GateKind.PAND: 3,
    GateKind.POR: 4,
}

_MASK64 = (1 << 64) - 1


def kernel_name() -> str:
    """Name of the kernel selected at import ("cython" or "python")."""
    return _kernel.KERNEL_NAME


def available_kernels() -> dict[str, object]:
    """Kernels present in this installation, keyed by name."""
    kernels = {_simkernel_py.KERNEL_NAME: _simkernel_py}
    if _kernel is not _simkernel_py:
        kernels[_kernel.KERNEL_NAME] = _kernel
    return kernels


@dataclass(frozen=True)
class SimulationConfig:
    samples: int
    seed: int
    t: float
    block_size: int = 1 << 18

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("simulation requires samples >= 1")
        if self.block_size < 1:
            raise DomainError("block_size must be >= 1")
        if not math.isfinite(self.t) or self.t < 0:
            raise DomainError(f"mission time must be finite and >= 0, got {self.t}")


@dataclass(frozen=True)
class SimulationEstimate:
    probability: float
    std_error: float
    samples: int


@dataclass(frozen=True)
class _FlatTree:
    kinds: np.ndarray
    offsets: np.ndarray
    children: np.ndarray
    leaf_rows: np.ndarray
    leaf_ids: tuple[str, ...]
    leaf_rates: np.ndarray


def _flatten(tree: FaultTree) -> _FlatTree:
    order = tree.postorder()
    index = {node_id: i for i, node_id in enumerate(order)}
    kinds = np.zeros(len(order), dtype=np.int8)
    leaf_rows = np.full(len(order), -1, dtype=np.int32)
    offsets = np.zeros(len(order) + 1, dtype=np.int32)
    children: list[int] = []
    leaf_ids: list[str] = []
    leaf_rates: list[float] = []

    for i, node_id in enumerate(order):
        node = tree.node(node_id)
        if isinstance(node, BasicEvent):
            leaf_rows[i] = len(leaf_ids)
            leaf_ids.append(node_id)
            # For fuzzy rates the peak (most likely) component is simulated.
            leaf_rates.append(node.rate.peak)
        else:
            kinds[i] = _KIND_CODE[node.kind]
            for child in node.children:
                children.append(index[child])
        offsets[i + 1] = len(children)

    return _FlatTree(
        kinds=kinds,
        offsets=offsets,
        children=np.asarray(children, dtype=np.int32),
        leaf_rows=leaf_rows,
        leaf_ids=tuple(leaf_ids),
        leaf_rates=np.asarray(leaf_rates, dtype=np.float64),
    )


def _leaf_key(leaf_id: str) -> int:
    digest = hashlib.blake2b(leaf_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _leaf_times(seed: int, leaf_id: str, block: int, n: int, rate: float) -> np.ndarray:
    """Exponential occurrence times for one event and sample block.

    One uniform draw per sample via inverse transform, so the stream
    position is a pure function of (seed, event, block).
    """
    ss = np.random.SeedSequence([seed & _MASK64, _leaf_key(leaf_id), block])
    gen = np.random.Generator(np.random.Philox(ss))
    u = gen.random(n)
    return -np.log1p(-u) / rate


def simulate_tree(
    tree: FaultTree, config: SimulationConfig, kernel: object | None = None
) -> SimulationEstimate:
    """Estimate the top-event probability by direct sampling.

    Fuzzy leaf rates are simulated at their peak component; use three runs
    with the component-specific rates to verify a fuzzy formula.
    """
    flat = _flatten(tree)
    if kernel is None:
        kernel = _kernel
    hits = 0
    done = 0
    block = 0
    while done < config.samples:
        n = min(config.block_size, config.samples - done)
        times = np.empty((len(flat.leaf_ids), n), dtype=np.float64)
        for row, leaf_id in enumerate(flat.leaf_ids):
            times[row] = _leaf_times(config.seed, leaf_id, block, n, flat.leaf_rates[row])
        hits += kernel.count_top(
            flat.kinds, flat.offsets, flat.children, flat.leaf_rows, times, config.t
        )
        done += n
        block += 1
    p = hits / config.samples
    std_error = math.sqrt(p * (1.0 - p) / config.samples)
    return SimulationEstimate(probability=p, std_error=std_error, samples=config.samples)


def simulate_gate(
    kind: GateKind | str,
    rates: Sequence[float | TFN],
    t: float,
    samples: int,
    seed: int,
    kernel: object | None = None,
) -> SimulationEstimate:
    """Single-gate convenience wrapper around :func:`simulate_tree`."""
    if isinstance(kind, str):
        kind = GateKind[kind.upper()]
    events = {}
    child_ids = []
    for i, rate in enumerate(rates):
        if not isinstance(rate, TFN):
            rate = TFN.crisp(float(rate))
        event_id = f"E{i + 1}"
        events[event_id] = BasicEvent(event_id, rate)
        child_ids.append(event_id)
    tree = check_valid(
        FaultTree(
            top_id="G",
            events=events,
            gates={"G": GateNode("G", kind, tuple(child_ids))},
        )
    )
    return simulate_tree(tree, SimulationConfig(samples=samples, seed=seed, t=t), kernel=kernel)
