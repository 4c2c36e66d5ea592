"""Max/min expressions over affine leaves and their DC conversion.

Conversion recurses through combine("max") and combine("min"), so piece
counts grow multiplicatively with nesting depth.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..exceptions import ValidationError
from .affine import AffineMap, ArrayLike
from .dc import DCFunction, combine

Leaf = Union[AffineMap, DCFunction]
Node = Union["LatticeExpr", AffineMap, DCFunction]


@dataclass(frozen=True)
class LatticeExpr:
    """A MAX or MIN node with at least two children."""

    op: str
    children: Tuple[Node, ...]

    def __post_init__(self) -> None:
        if self.op not in ("max", "min"):
            raise ValidationError(f"lattice node must be 'max' or 'min', got {self.op!r}")
        if len(self.children) < 2:
            raise ValidationError(f"{self.op} node needs at least two children")
        dims = {_node_dim(c) for c in self.children}
        if len(dims) != 1:
            raise ValidationError(f"lattice leaves have mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return _node_dim(self.children[0])

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """Direct pointwise evaluation."""
        vals = np.stack([np.asarray(_node_eval(c, x), dtype=float) for c in self.children])
        out = vals.max(axis=0) if self.op == "max" else vals.min(axis=0)
        return float(out) if out.ndim == 0 else out


def lattice_max(*children: Node) -> LatticeExpr:
    return LatticeExpr("max", tuple(children))


def lattice_min(*children: Node) -> LatticeExpr:
    return LatticeExpr("min", tuple(children))


def _node_dim(node: Node) -> int:
    if isinstance(node, (LatticeExpr, AffineMap, DCFunction)):
        return node.dim
    raise ValidationError(f"malformed lattice node of type {type(node).__name__}")


def _node_eval(node: Node, x: ArrayLike) -> Union[float, np.ndarray]:
    return node(x)


def lattice_to_dc(expr: Node) -> DCFunction:
    """
    Convert a lattice expression to an equivalent DC function.

    Raises:
        ValidationError: malformed tree.
    """
    if isinstance(expr, DCFunction):
        return expr
    if isinstance(expr, AffineMap):
        return DCFunction.affine(expr.a, expr.b)
    if not isinstance(expr, LatticeExpr):
        raise ValidationError(f"malformed lattice node of type {type(expr).__name__}")
    parts = [lattice_to_dc(child) for child in expr.children]
    return combine(expr.op, *parts)
