"""Reverse-mode algorithmic differentiation over random variables.

Valuation code operates on :class:`DifferentiableRV` values; every operation
appends an :class:`OperationNode` to the owning :class:`Tape`. The reverse
sweep in :func:`backward` propagates path-wise adjoints. The final
expectation stays outside the tape: ``dE(result)/d(input)`` is the mean of
the returned adjoint of ``input``.

Indicator nodes keep their trigger ``X``. When the sweep reaches one, the
incoming adjoint ``A`` is multiplied by ``strategy.injection(X)`` and added to
the adjoint of ``X``.

Example::

    tape = Tape()
    s0 = tape.input(1.0)
    payoff = ((s0 * growth - 1.05).indicator()) * 0.95
    delta = derivative_of_expectation(payoff, s0, strategy)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence, Union


from .errors import StochADError, TapeError
from .randomvar import RandomVariable


class IndicatorDerivative(Protocol):
    def injection(self, x: RandomVariable) -> RandomVariable: ...


@dataclass(frozen=True)
class OperationNode:
    op: str
    parents: tuple[int, ...]
    value: RandomVariable
    trigger: RandomVariable | None = None
    name: str | None = None


def _ones_like(rv: RandomVariable) -> RandomVariable:
    return RandomVariable.constant(1.0)


# Local partial derivatives d(node)/d(parent_k), given the parent values
# and the node value.
_PARTIALS: dict[str, Callable[..., Sequence[RandomVariable]]] = {
    "add": lambda a, b, out: (_ones_like(a), _ones_like(b)),
    "sub": lambda a, b, out: (_ones_like(a), RandomVariable.constant(-1.0)),
    "mul": lambda a, b, out: (b, a),
    "div": lambda a, b, out: (1.0 / b, -out / b),
    "neg": lambda a, out: (RandomVariable.constant(-1.0),),
    "exp": lambda a, out: (out,),
    "log": lambda a, out: (1.0 / a,),
    "sqrt": lambda a, out: (0.5 / out,),
    "square": lambda a, out: (2.0 * a,),
    # sub-gradient: towards a where a > b, ties go to b
    "max": lambda a, b, out: ((a - b).indicator(), 1.0 - (a - b).indicator()),
}


class Tape:
    """An append-only record of operations in topological order."""

    def __init__(self):
        self.nodes: list[OperationNode] = []

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, op: str, parents: Sequence[int], value, trigger=None, name=None) -> int:
        parents = tuple(int(p) for p in parents)
        for p in parents:
            if not 0 <= p < len(self.nodes):
                raise TapeError(f"parent node {p} is not on this tape")
        if op not in _PARTIALS and op not in ("input", "constant", "indicator", "expectation"):
            raise TapeError(f"unknown operation {op!r}")
        self.nodes.append(OperationNode(op, parents, RandomVariable(value), trigger, name))
        return len(self.nodes) - 1

    def input(self, value, name: str | None = None) -> "DifferentiableRV":
        """A differentiation variable (model parameter or random input)."""
        return DifferentiableRV(self, self.record("input", (), value, name=name))

    def constant(self, value) -> "DifferentiableRV":
        return DifferentiableRV(self, self.record("constant", (), value))

    def _lift(self, other) -> "DifferentiableRV":
        if isinstance(other, DifferentiableRV):
            if other.tape is not self:
                raise TapeError("operand belongs to a different tape")
            return other
        return self.constant(other)

    def node(self, node_id: int) -> OperationNode:
        try:
            return self.nodes[node_id]
        except (IndexError, TypeError):
            raise TapeError(f"unknown node {node_id!r}") from None

    def indicator_nodes(self) -> list[int]:
        return [i for i, node in enumerate(self.nodes) if node.op == "indicator"]


Operand = Union["DifferentiableRV", RandomVariable, float, int]


class DifferentiableRV:
    """A random variable whose operations are recorded on a tape."""

    __slots__ = ("tape", "node_id")
    __array_priority__ = 1000

    def __init__(self, tape: Tape, node_id: int):
        tape.node(node_id)
        self.tape = tape
        self.node_id = node_id

    @property
    def value(self) -> RandomVariable:
        return self.tape.nodes[self.node_id].value

    def __repr__(self) -> str:
        return f"DifferentiableRV(node={self.node_id}, value={self.value!r})"

    def _unary(self, op: str, value: RandomVariable, **kw) -> "DifferentiableRV":
        return DifferentiableRV(self.tape, self.tape.record(op, (self.node_id,), value, **kw))

    def _binary(self, other: Operand, op: str, fn, swap=False) -> "DifferentiableRV":
        other = self.tape._lift(other)
        a, b = (other, self) if swap else (self, other)
        value = fn(a.value, b.value)
        return DifferentiableRV(self.tape, self.tape.record(op, (a.node_id, b.node_id), value))

    def __add__(self, other):
        return self._binary(other, "add", RandomVariable.__add__)

    def __radd__(self, other):
        return self._binary(other, "add", RandomVariable.__add__, swap=True)

    def __sub__(self, other):
        return self._binary(other, "sub", RandomVariable.__sub__)

    def __rsub__(self, other):
        return self._binary(other, "sub", RandomVariable.__sub__, swap=True)

    def __mul__(self, other):
        return self._binary(other, "mul", RandomVariable.__mul__)

    def __rmul__(self, other):
        return self._binary(other, "mul", RandomVariable.__mul__, swap=True)

    def __truediv__(self, other):
        return self._binary(other, "div", RandomVariable.__truediv__)

    def __rtruediv__(self, other):
        return self._binary(other, "div", RandomVariable.__truediv__, swap=True)

    def __neg__(self):
        return self._unary("neg", -self.value)

    def exp(self):
        return self._unary("exp", self.value.exp())

    def log(self):
        return self._unary("log", self.value.log())

    def sqrt(self):
        return self._unary("sqrt", self.value.sqrt())

    def square(self):
        return self._unary("square", self.value * self.value)

    def maximum(self, other: Operand):
        return self._binary(other, "max", RandomVariable.maximum)

    def indicator(self):
        """``1_{X>0}``; its derivative is supplied by the strategy at sweep time."""
        return self._unary("indicator", self.value.indicator(), trigger=self.value)

    def expectation(self):
        """``E(self)`` as a deterministic node on the tape."""
        return self._unary("expectation", RandomVariable.constant(self.value.expectation()))


@dataclass
class AdjointResult:
    """Path-wise adjoints ``d result / d node`` keyed by node id.

    Nodes that do not influence the result, and constant nodes, are absent
    and read as 0.
    """

    adjoints: dict[int, RandomVariable] = field(default_factory=dict)

    def __getitem__(self, node) -> RandomVariable:
        node_id = node.node_id if isinstance(node, DifferentiableRV) else node
        return self.adjoints.get(node_id, RandomVariable.constant(0.0))

    def __contains__(self, node) -> bool:
        node_id = node.node_id if isinstance(node, DifferentiableRV) else node
        return node_id in self.adjoints


def _resolve(result) -> tuple[Tape, int]:
    if not isinstance(result, DifferentiableRV):
        raise TapeError("result must be a DifferentiableRV")
    return result.tape, result.node_id


def backward(result: DifferentiableRV, strategy: IndicatorDerivative,
             overrides: dict[int, IndicatorDerivative] | None = None) -> AdjointResult:
    """Reverse sweep from ``result`` with seed adjoint 1.

    Args:
        result: Node to differentiate.
        strategy: Replacement for the derivative of every indicator node.
        overrides: Per-indicator-node replacements taking precedence over
            ``strategy``.
    """
    tape, root = _resolve(result)
    overrides = overrides or {}
    adjoints: dict[int, RandomVariable] = {root: RandomVariable.constant(1.0)}

    def accumulate(node_id: int, contribution: RandomVariable):
        current = adjoints.get(node_id)
        adjoints[node_id] = contribution if current is None else current + contribution

    for node_id in range(root, -1, -1):
        incoming = adjoints.get(node_id)
        if incoming is None:
            continue
        node = tape.nodes[node_id]
        if node.op in ("input", "constant"):
            continue
        if node.op == "indicator":
            replacement = overrides.get(node_id, strategy)
            try:
                local = replacement.injection(node.trigger)
            except StochADError as exc:
                raise type(exc)(f"indicator node {node_id}: {exc}") from exc
            accumulate(node.parents[0], incoming * local)
        elif node.op == "expectation":
            accumulate(node.parents[0], RandomVariable.constant(incoming.expectation()))
        else:
            parent_values = [tape.nodes[p].value for p in node.parents]
            partials = _PARTIALS[node.op](*parent_values, node.value)
            for parent, partial in zip(node.parents, partials):
                if tape.nodes[parent].op == "constant":
                    continue  # constants are not differentiated
                if partial.is_deterministic and partial.values == 1.0:
                    accumulate(parent, incoming)
                else:
                    accumulate(parent, incoming * partial)
    return AdjointResult(adjoints)


def derivative_of_expectation(result: DifferentiableRV, wrt: DifferentiableRV,
                              strategy: IndicatorDerivative) -> float:
    """``d/d theta E(result)`` for the input node ``wrt``."""
    if wrt.tape is not result.tape:
        raise TapeError("input belongs to a different tape")
    return backward(result, strategy)[wrt].expectation()


@dataclass(frozen=True)
class ConstantDerivative:
    """Replaces the indicator derivative by a fixed number."""

    value: float

    def injection(self, x: RandomVariable) -> RandomVariable:
        return RandomVariable.constant(self.value)


def adjoint_at_indicator_via_two_runs(result: DifferentiableRV, indicator_node,
                                      strategy: IndicatorDerivative | None = None) -> RandomVariable:
    """Extract the adjoint ``A`` arriving at an indicator as ``A1 - A0``.

    ``A1`` (``A0``) is the adjoint of the trigger when the derivative of this
    indicator is replaced by 1 (0). Other indicators use ``strategy``, or a
    zero derivative if none is given.
    """
    tape, _ = _resolve(result)
    node_id = indicator_node.node_id if isinstance(indicator_node, DifferentiableRV) else indicator_node
    node = tape.node(node_id)
    if node.op != "indicator":
        raise TapeError(f"node {node_id} is a {node.op!r} node, not an indicator")
    others = strategy if strategy is not None else ConstantDerivative(0.0)
    trigger = node.parents[0]
    a1 = backward(result, others, {node_id: ConstantDerivative(1.0)})[trigger]
    a0 = backward(result, others, {node_id: ConstantDerivative(0.0)})[trigger]
    return a1 - a0
