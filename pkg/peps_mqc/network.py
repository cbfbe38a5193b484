"""
Exact contraction of small honeycomb patches into physical state vectors.

A layout lists, per wire, the chain of horizontal sites from the right boundary towards the left one, and the mid
squares that join two circles vertically. Legs are labelled by hashable names and contracted with one
``np.einsum`` call; every leg shared by two tensors is summed, every other leg is either closed by a boundary vector
or left open.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from peps_mqc.exceptions import InputError, ResourceCapError, ShapeError
from peps_mqc.honeycomb import MODEL, SiteRole
from peps_mqc.numerics import KET_0, KET_PLUS, as_vector, to_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Boundaries:
    """
    ``left`` holds the bra components closing every chain on the readout side, ``right`` one ket per wire
    (missing wires default to |0>), ``dangling`` closes vertical circle legs without a mid square.
    """

    left: np.ndarray = field(default_factory=lambda: KET_0.copy())
    right: Tuple[np.ndarray, ...] = ()
    dangling: np.ndarray = field(default_factory=lambda: KET_PLUS.copy())

    def right_for(self, wire: int) -> np.ndarray:
        if wire < len(self.right):
            return as_vector(self.right[wire], 2)
        return KET_0

    def to_dict(self) -> dict:
        return {
            "left": to_pairs(self.left),
            "right": [to_pairs(ket) for ket in self.right],
            "dangling": to_pairs(self.dangling),
        }


@dataclass(frozen=True)
class Layout:
    chains: Tuple[Tuple[str, ...], ...]
    roles: Mapping[str, SiteRole]
    mids: Mapping[str, Tuple[str, str]] = field(default_factory=dict)
    order: Tuple[str, ...] = ()

    def __post_init__(self):
        chains = tuple(tuple(chain) for chain in self.chains)
        order = tuple(self.order) or tuple(name for chain in chains for name in chain) + tuple(self.mids)
        if not order:
            raise InputError("the layout has no sites")
        known = set(name for chain in chains for name in chain) | set(self.mids)
        if set(order) != known or len(order) != len(known):
            raise InputError("the site order must list every layout site exactly once")
        for mid, (upper, lower) in self.mids.items():
            for circle in (upper, lower):
                if circle in known and self.roles.get(circle) is not SiteRole.CIRCLE:
                    raise InputError(f"mid square {mid} must join two circles, {circle} is not one")
        object.__setattr__(self, "chains", chains)
        object.__setattr__(self, "order", order)

    @classmethod
    def row(cls, length: int) -> "Layout":
        """A single wire of ``length`` horizontal squares."""
        names = tuple(f"S0.{k}" for k in range(length))
        return cls((names,), {name: SiteRole.SQUARE_HORIZONTAL for name in names})

    @classmethod
    def from_pattern(cls, pattern) -> "Layout":
        chains: List[List[str]] = [[] for _ in range(pattern.n_wires)]
        roles: Dict[str, SiteRole] = {}
        mids: Dict[str, Tuple[str, str]] = {}
        horizontal = sorted(
            (site for site in pattern.sites if site.role is not SiteRole.SQUARE_VERTICAL_MID),
            key=lambda site: (site.column, site.role is SiteRole.CIRCLE),
        )
        for site in horizontal:
            chains[site.wire].append(site.name)
            roles[site.name] = site.role
        for site in pattern.sites:
            if site.role is SiteRole.SQUARE_VERTICAL_MID:
                roles[site.name] = site.role
                mids[site.name] = (f"K{site.wire}.{site.column}", f"K{site.wire + 1}.{site.column}")
        return cls(tuple(tuple(chain) for chain in chains), roles, mids, tuple(site.name for site in pattern.sites))

    @property
    def n_sites(self) -> int:
        return len(self.order)

    def restricted(self, names: Sequence[str]) -> "Layout":
        """The sub-layout on ``names``; legs that pointed to dropped sites become open."""
        keep = set(names)
        missing = keep - set(self.order)
        if missing:
            raise InputError(f"sites {sorted(missing)} are not in the layout")
        for chain in self.chains:
            kept = [position for position, name in enumerate(chain) if name in keep]
            if kept and kept != list(range(kept[0], kept[-1] + 1)):
                raise InputError("a restricted chain must be a contiguous run of sites")
        chains = tuple(tuple(name for name in chain if name in keep) for chain in self.chains)
        return Layout(
            chains,
            {name: role for name, role in self.roles.items() if name in keep},
            {mid: pair for mid, pair in self.mids.items() if mid in keep},
            tuple(names),
        )

    def to_dict(self) -> dict:
        return {
            "chains": [list(chain) for chain in self.chains],
            "mids": {mid: list(pair) for mid, pair in self.mids.items()},
            "order": list(self.order),
        }


class TensorNetwork:
    """A bag of tensors with named legs, contracted in one einsum."""

    def __init__(self):
        self.tensors: List[np.ndarray] = []
        self.legs: List[Tuple[Hashable, ...]] = []

    def add(self, tensor, legs: Sequence[Hashable]):
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.ndim != len(legs):
            raise ShapeError(f"tensor of rank {tensor.ndim} given {len(legs)} legs")
        self.tensors.append(tensor)
        self.legs.append(tuple(legs))

    def dangling_legs(self) -> List[Hashable]:
        counts: Dict[Hashable, int] = {}
        for legs in self.legs:
            for leg in legs:
                counts[leg] = counts.get(leg, 0) + 1
        return [leg for leg, count in counts.items() if count == 1]

    def contract(self, output: Sequence[Hashable]) -> np.ndarray:
        dangling = set(self.dangling_legs())
        if set(output) != dangling:
            raise ShapeError(
                f"output legs {sorted(map(str, output))} differ from the open legs {sorted(map(str, dangling))}"
            )
        labels: Dict[Hashable, int] = {}
        operands = []
        for tensor, legs in zip(self.tensors, self.legs):
            operands.extend([tensor, [labels.setdefault(leg, len(labels)) for leg in legs]])
        if len(labels) > 52:
            raise ResourceCapError(f"{len(labels)} legs exceed what a single contraction can label")
        return np.einsum(*operands, [labels[leg] for leg in output], optimize=True)


def build_network(
    layout: Layout,
    boundaries: Optional[Boundaries] = None,
    square=None,
    circle=None,
) -> Tuple[TensorNetwork, List[Hashable]]:
    """
    Builds the network of ``layout``. With ``boundaries`` every chain end and dangling vertical leg is closed; without,
    those legs stay open and are returned after the physical legs in a fixed order.
    """
    square = MODEL.square.entries if square is None else np.asarray(square, dtype=complex)
    circle = MODEL.circle.entries if circle is None else np.asarray(circle, dtype=complex)
    network = TensorNetwork()
    open_legs: List[Hashable] = []

    for wire, chain in enumerate(layout.chains):
        for position, name in enumerate(chain):
            # bond k of a chain sits between site k - 1 (towards the right boundary) and site k
            col = ("h", wire, position)
            row = ("h", wire, position + 1)
            if layout.roles[name] is SiteRole.CIRCLE:
                network.add(circle, [("p", name), ("v", name), row, col])
            else:
                network.add(square, [("p", name), row, col])
        if not chain:
            continue
        right_leg, left_leg = ("h", wire, 0), ("h", wire, len(chain))
        if boundaries is None:
            open_legs.extend([right_leg, left_leg])
        else:
            network.add(boundaries.right_for(wire), [right_leg])
            network.add(as_vector(boundaries.left, 2), [left_leg])

    for mid, (upper, lower) in layout.mids.items():
        network.add(square, [("p", mid), ("v", lower), ("v", upper)])
        for name in (upper, lower):
            if name not in layout.roles:
                open_legs.append(("v", name))

    joined = {name for pair in layout.mids.values() for name in pair}
    for name in layout.order:
        if layout.roles[name] is SiteRole.CIRCLE and name not in joined:
            if boundaries is None:
                open_legs.append(("v", name))
            else:
                network.add(as_vector(boundaries.dangling, 2), [("v", name)])

    physical = [("p", name) for name in layout.order]
    return network, physical + open_legs


def contract_layout(
    layout: Layout,
    boundaries: Optional[Boundaries] = None,
    max_dim: int = 4 ** 10,
    square=None,
    circle=None,
) -> np.ndarray:
    """
    Physical tensor of the patch, one axis per site in ``layout.order``; open virtual legs (if any) follow as extra
    axes of dimension 2.
    """
    network, output = build_network(layout, boundaries, square, circle)
    dim = 2 ** (len(output) - layout.n_sites) * 4 ** layout.n_sites
    if dim > max_dim:
        raise ResourceCapError(f"patch dimension {dim} exceeds the cap of {max_dim}")
    logger.debug("contracting %d tensors into %d open legs", len(network.tensors), len(output))
    return network.contract(output)
