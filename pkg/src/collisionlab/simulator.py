"""Exact real-amplitude state-vector simulation of query algorithms.

A basis state is |workspace, index, output>: a fixed-width workspace
bitstring (holding, among other things, the query-answer field), a query
index register, and a one-bit accept register (output 2 means accept).
Between queries an algorithm applies input-independent orthogonal layers
over Q(sqrt(2)); a query rewrites every basis state at once according to
the oracle semantics:

  standard  |w, i, z> -> |w XOR enc(value_i), i, z>   (answer field XOR)
  erasing   |w, i, z> -> |w, value_i, z>              (index replaced)

Exact mode stores QSqrt2 amplitudes and checks norms exactly; float mode
runs the same circuits in double precision.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .instances import Instance
from .qsqrt2 import QSqrt2, ZERO

FLOAT_NORM_TOL = 1e-12
MEASURE_NORM_TOL = 1e-9


@dataclass(frozen=True)
class BasisState:
    workspace: int
    index: int
    output: int  # 1 = reject, 2 = accept; stored as-is, encoded as one bit


class StateSpace:
    """Shape of the basis: workspace width, index range, answer field."""

    __slots__ = ("workspace_bits", "index_size", "answer_offset", "answer_bits", "dim")

    def __init__(
        self,
        index_size: int,
        workspace_bits: int = 0,
        answer_offset: int = 0,
        answer_bits: int = 0,
    ):
        if index_size < 1:
            raise ValueError("index_size must be >= 1")
        if workspace_bits < 0 or answer_bits < 0 or answer_offset < 0:
            raise ValueError("negative register width")
        if answer_offset + answer_bits > workspace_bits:
            raise ValueError("answer field does not fit in the workspace")
        self.workspace_bits = workspace_bits
        self.index_size = index_size
        self.answer_offset = answer_offset
        self.answer_bits = answer_bits
        self.dim = (1 << workspace_bits) * index_size * 2

    def encode(self, state: BasisState) -> int:
        if not 0 <= state.workspace < (1 << self.workspace_bits):
            raise ValueError("workspace out of range")
        if not 1 <= state.index <= self.index_size:
            raise ValueError("index out of range")
        if state.output not in (1, 2):
            raise ValueError("output must be 1 or 2")
        return (
            (state.workspace * self.index_size + (state.index - 1)) * 2
            + (state.output - 1)
        )

    def decode(self, ordinal: int) -> BasisState:
        ordinal, z = divmod(ordinal, 2)
        w, i = divmod(ordinal, self.index_size)
        return BasisState(workspace=w, index=i + 1, output=z + 1)

    def basis_states(self):
        return (self.decode(k) for k in range(self.dim))

    def encode_answer(self, value: int) -> int:
        """Answer-field image of a queried value, as a workspace XOR mask."""
        if value >= (1 << self.answer_bits):
            raise ValueError(
                f"field overflow: value {value} needs more than "
                f"{self.answer_bits} answer bits"
            )
        return value << self.answer_offset

    def __eq__(self, other):
        return isinstance(other, StateSpace) and (
            self.workspace_bits,
            self.index_size,
            self.answer_offset,
            self.answer_bits,
        ) == (
            other.workspace_bits,
            other.index_size,
            other.answer_offset,
            other.answer_bits,
        )


class Layer:
    """Orthogonal matrix over Q(sqrt(2)), stored as sparse columns.

    cols[j] lists (row, entry) pairs of column j.  Orthogonality
    (U^T U = I) is checked exactly on demand; algorithm construction
    rejects non-orthogonal layers.
    """

    __slots__ = ("dim", "cols", "_float_cols")

    def __init__(self, dim: int, cols: list[list[tuple[int, QSqrt2]]]):
        if len(cols) != dim:
            raise ValueError("column count must equal dim")
        self.dim = dim
        self.cols = cols
        self._float_cols = None

    @staticmethod
    def identity(dim: int) -> "Layer":
        one = QSqrt2(1)
        return Layer(dim, [[(j, one)] for j in range(dim)])

    @staticmethod
    def from_dense(rows: list[list[QSqrt2]]) -> "Layer":
        dim = len(rows)
        cols: list[list[tuple[int, QSqrt2]]] = [[] for _ in range(dim)]
        for r, row in enumerate(rows):
            if len(row) != dim:
                raise ValueError("matrix must be square")
            for c, v in enumerate(row):
                if not v.is_zero():
                    cols[c].append((r, v))
        return Layer(dim, cols)

    def to_dense(self) -> list[list[QSqrt2]]:
        rows = [[ZERO for _ in range(self.dim)] for _ in range(self.dim)]
        for c, col in enumerate(self.cols):
            for r, v in col:
                rows[r][c] = v
        return rows

    def float_cols(self):
        if self._float_cols is None:
            self._float_cols = [
                [(r, float(v)) for r, v in col] for col in self.cols
            ]
        return self._float_cols

    def is_orthogonal(self) -> bool:
        """Exact check that columns are orthonormal."""
        as_dicts = [dict(col) for col in self.cols]
        for i in range(self.dim):
            ci = as_dicts[i]
            # Diagonal entry of U^T U.
            total = ZERO
            for v in ci.values():
                total = total + v * v
            if total != QSqrt2(1):
                return False
        for i in range(self.dim):
            ci = as_dicts[i]
            for j in range(i + 1, self.dim):
                cj = as_dicts[j]
                small, big = (ci, cj) if len(ci) <= len(cj) else (cj, ci)
                dot = ZERO
                for r, v in small.items():
                    w = big.get(r)
                    if w is not None:
                        dot = dot + v * w
                if not dot.is_zero():
                    return False
        return True

    def compose(self, inner: "Layer") -> "Layer":
        """self @ inner: the layer that applies inner first, then self."""
        if self.dim != inner.dim:
            raise ValueError("dimension mismatch")
        cols: list[list[tuple[int, QSqrt2]]] = []
        for col in inner.cols:
            acc: dict[int, QSqrt2] = {}
            for mid, v in col:
                for row, w in self.cols[mid]:
                    cur = acc.get(row)
                    val = v * w if cur is None else cur + v * w
                    if val.is_zero():
                        acc.pop(row, None)
                    else:
                        acc[row] = val
            cols.append(sorted(acc.items()))
        return Layer(self.dim, cols)

    def to_json(self) -> list[list[list[str]]]:
        return [[v.to_strings() for v in row] for row in self.to_dense()]

    @staticmethod
    def from_json(rows) -> "Layer":
        dense = [[QSqrt2.from_strings(entry) for entry in row] for row in rows]
        return Layer.from_dense(dense)


class StateVector:
    """Sparse amplitude vector over a StateSpace.

    mode "exact" holds QSqrt2 amplitudes, mode "float" holds doubles.
    Entries are keyed internally by basis ordinal; items() exposes
    (BasisState, amplitude) pairs.
    """

    __slots__ = ("space", "mode", "entries")

    def __init__(self, space: StateSpace, mode: str = "exact", entries=None):
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        self.space = space
        self.mode = mode
        self.entries: dict[int, object] = entries if entries is not None else {}

    @staticmethod
    def from_basis_state(
        space: StateSpace, state: BasisState, mode: str = "exact"
    ) -> "StateVector":
        amp = QSqrt2(1) if mode == "exact" else 1.0
        return StateVector(space, mode, {space.encode(state): amp})

    def items(self):
        for ordinal, amp in self.entries.items():
            yield self.space.decode(ordinal), amp

    def amplitude(self, state: BasisState):
        zero = ZERO if self.mode == "exact" else 0.0
        return self.entries.get(self.space.encode(state), zero)

    def squared_norm(self):
        if self.mode == "exact":
            total = ZERO
            for amp in self.entries.values():
                total = total + amp * amp
            return total
        return sum(a * a for a in self.entries.values())

    def acceptance_weight(self):
        """Total squared amplitude on output = 2 states."""
        if self.mode == "exact":
            total = ZERO
            for ordinal, amp in self.entries.items():
                if ordinal & 1:
                    total = total + amp * amp
            return total
        return sum(a * a for k, a in self.entries.items() if k & 1)

    def as_float(self) -> "StateVector":
        if self.mode == "float":
            return self
        return StateVector(
            self.space, "float", {k: float(v) for k, v in self.entries.items()}
        )


def _check_norm_preserved(before, after, mode: str, what: str):
    if mode == "exact":
        if before != after:
            raise AssertionError(f"{what} changed the exact squared norm")
    else:
        if abs(before - after) > FLOAT_NORM_TOL:
            raise AssertionError(f"{what} drifted the squared norm by {abs(before-after)}")


def apply_unitary(state: StateVector, layer: Layer) -> StateVector:
    """Apply one input-independent orthogonal layer."""
    if layer.dim != state.space.dim:
        raise ValueError("layer dimension does not match state space")
    cols = layer.cols if state.mode == "exact" else layer.float_cols()
    out: dict[int, object] = {}
    if state.mode == "exact":
        for ordinal, amp in state.entries.items():
            for row, v in cols[ordinal]:
                cur = out.get(row)
                val = v * amp if cur is None else cur + v * amp
                if val.is_zero():
                    out.pop(row, None)
                else:
                    out[row] = val
    else:
        for ordinal, amp in state.entries.items():
            for row, v in cols[ordinal]:
                out[row] = out.get(row, 0.0) + v * amp
        out = {k: v for k, v in out.items() if v != 0.0}
    result = StateVector(state.space, state.mode, out)
    _check_norm_preserved(state.squared_norm(), result.squared_norm(), state.mode, "unitary layer")
    return result


def apply_standard_query(state: StateVector, inst: Instance) -> StateVector:
    """XOR the queried value's encoding into the answer field of every
    basis state.  A bijection on basis states, so norm is untouched."""
    space = state.space
    if space.index_size != inst.num_query_indices:
        raise ValueError("instance does not match the state space index register")
    masks = [
        space.encode_answer(inst.query_value(i)) * space.index_size * 2
        for i in range(1, space.index_size + 1)
    ]
    out: dict[int, object] = {}
    for ordinal, amp in state.entries.items():
        idx = (ordinal >> 1) % space.index_size
        out[ordinal ^ masks[idx]] = amp
    result = StateVector(space, state.mode, out)
    _check_norm_preserved(state.squared_norm(), result.squared_norm(), state.mode, "standard query")
    return result


def erasing_targets(inst: Instance) -> list[int]:
    """Index-register image of the erasing map, one entry per address.

    Collision inputs map address i to x_i; set-comparison inputs map
    address (b, i), laid out as b*2n + v on a 4n-value register, to
    (b, x_i) or (b, y_i).  Raises unless the mapped sequences are
    one-to-one, since only injective inputs define a basis map.
    """
    if inst.kind == "collision":
        if len(set(inst.x)) != inst.n:
            raise ValueError("erasing oracle undefined for non-injective input")
        return [v for v in inst.x]
    assert inst.y is not None
    if len(set(inst.x)) != inst.n or len(set(inst.y)) != inst.n:
        raise ValueError("erasing oracle undefined for non-injective input")
    two_n = 2 * inst.n
    targets = []
    for b, seq in ((0, inst.x), (1, inst.y)):
        targets.extend(b * two_n + v for v in seq)
    return targets


def erasing_space(inst: Instance, workspace_bits: int = 0) -> StateSpace:
    """State space whose index register holds erasing-oracle outputs:
    {1..n} for collision inputs, {0,1} x {1..2n} (size 4n) for pairs."""
    size = inst.n if inst.kind == "collision" else 4 * inst.n
    return StateSpace(index_size=size, workspace_bits=workspace_bits)


def apply_erasing_query(state: StateVector, inst: Instance) -> StateVector:
    """Replace the index register content by the queried value.

    Defined only on basis states whose index is a valid query address:
    i <= n for collision inputs, and b*2n + i with i <= n for pairs.
    Injectivity of the input makes this an inner-product-preserving
    basis map.
    """
    space = state.space
    targets = erasing_targets(inst)
    if inst.kind == "collision":
        expected = inst.n
        def address(idx: int) -> int | None:
            return idx if idx <= inst.n else None
    else:
        expected = 4 * inst.n
        two_n = 2 * inst.n
        def address(idx: int) -> int | None:
            b, v = divmod(idx - 1, two_n)
            return idx if v + 1 <= inst.n else None
    if space.index_size != expected:
        raise ValueError("state space does not match the erasing-oracle layout")
    out: dict[int, object] = {}
    for ordinal, amp in state.entries.items():
        idx = (ordinal >> 1) % space.index_size + 1
        addr = address(idx)
        if addr is None:
            raise ValueError(
                f"erasing query applied to a state outside the query domain (index {idx})"
            )
        if inst.kind == "collision":
            new_idx = targets[addr - 1]
        else:
            b = (addr - 1) // (2 * inst.n)
            i = (addr - 1) % (2 * inst.n) + 1
            new_idx = targets[b * inst.n + i - 1]
        new_ordinal = ordinal + (new_idx - idx) * 2
        if new_ordinal in out:
            raise AssertionError("erasing map collided; input claimed injective")
        out[new_ordinal] = amp
    result = StateVector(space, state.mode, out)
    _check_norm_preserved(state.squared_norm(), result.squared_norm(), state.mode, "erasing query")
    return result


@dataclass
class QueryAlgorithm:
    """A T-query algorithm: layers U_0 .. U_T with a query between each.

    kind names the expected instance kind; the index register enumerates
    query addresses (n for collision, 2n for set-comparison pairs).  The
    workspace layout, answer-field placement and initial basis state are
    explicit metadata since no canonical choice exists.
    """

    name: str
    kind: str  # "collision" | "setcomp"
    n: int
    T: int
    oracle_kind: str  # "standard" | "erasing"
    space: StateSpace
    layers: list[Layer]
    initial: BasisState = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.kind not in ("collision", "setcomp"):
            raise ValueError("kind must be 'collision' or 'setcomp'")
        if self.oracle_kind not in ("standard", "erasing"):
            raise ValueError("oracle_kind must be 'standard' or 'erasing'")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if len(self.layers) != self.T + 1:
            raise ValueError(f"need exactly T+1 = {self.T + 1} layers")
        expected_index = self.n if self.kind == "collision" else 2 * self.n
        if self.oracle_kind == "standard" and self.space.index_size != expected_index:
            raise ValueError("index register must enumerate the query addresses")
        if self.initial is None:
            self.initial = BasisState(workspace=0, index=1, output=1)
        self.space.encode(self.initial)  # range check
        for t, layer in enumerate(self.layers):
            if layer.dim != self.space.dim:
                raise ValueError(f"layer {t} dimension mismatch")
            if not layer.is_orthogonal():
                raise ValueError(f"layer {t} is not orthogonal")

    @property
    def alphabet_size(self) -> int:
        return self.n if self.kind == "collision" else 2 * self.n

    def check_instance(self, inst: Instance):
        if inst.kind != self.kind or inst.n != self.n:
            raise ValueError("instance incompatible with algorithm")

    def run(self, inst: Instance, mode: str = "exact") -> StateVector:
        """Apply U_0, then (query, U_t) for t = 1..T; returns the final state."""
        self.check_instance(inst)
        query = (
            apply_standard_query if self.oracle_kind == "standard" else apply_erasing_query
        )
        state = StateVector.from_basis_state(self.space, self.initial, mode)
        state = apply_unitary(state, self.layers[0])
        for t in range(1, self.T + 1):
            state = query(state, inst)
            state = apply_unitary(state, self.layers[t])
        norm = state.squared_norm()
        if mode == "exact":
            assert norm == QSqrt2(1)
        else:
            assert abs(norm - 1.0) <= FLOAT_NORM_TOL
        return state

    # -- description file ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "n": self.n,
            "T": self.T,
            "oracle_kind": self.oracle_kind,
            "workspace_bits": self.space.workspace_bits,
            "index_size": self.space.index_size,
            "answer_offset": self.space.answer_offset,
            "answer_bits": self.space.answer_bits,
            "initial": {
                "workspace": self.initial.workspace,
                "index": self.initial.index,
                "output": self.initial.output,
            },
            "layers": [layer.to_json() for layer in self.layers],
        }

    @staticmethod
    def from_json(doc: dict) -> "QueryAlgorithm":
        space = StateSpace(
            index_size=int(doc["index_size"]),
            workspace_bits=int(doc["workspace_bits"]),
            answer_offset=int(doc["answer_offset"]),
            answer_bits=int(doc["answer_bits"]),
        )
        init = doc["initial"]
        return QueryAlgorithm(
            name=doc.get("name", "unnamed"),
            kind=doc["kind"],
            n=int(doc["n"]),
            T=int(doc["T"]),
            oracle_kind=doc["oracle_kind"],
            space=space,
            layers=[Layer.from_json(rows) for rows in doc["layers"]],
            initial=BasisState(
                workspace=int(init["workspace"]),
                index=int(init["index"]),
                output=int(init["output"]),
            ),
        )

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @staticmethod
    def load(path) -> "QueryAlgorithm":
        with open(path, encoding="utf-8") as fh:
            return QueryAlgorithm.from_json(json.load(fh))


def acceptance_probability(alg: QueryAlgorithm, inst: Instance, mode: str = "exact"):
    """Probability of measuring output 2 after the full circuit.

    Exact mode returns a QSqrt2 value (checked to lie in [0, 1]); float
    mode returns a double.
    """
    final = alg.run(inst, mode)
    p = final.acceptance_weight()
    if mode == "exact":
        assert QSqrt2(0) <= p <= QSqrt2(1)
    else:
        assert -FLOAT_NORM_TOL <= p <= 1 + FLOAT_NORM_TOL
        p = min(max(p, 0.0), 1.0)
    return p


def sample_measurement(state: StateVector, rng: random.Random) -> BasisState:
    """Draw one basis state with probability equal to its squared amplitude."""
    weights = []
    ordinals = []
    for ordinal, amp in state.entries.items():
        w = float(amp) ** 2 if state.mode == "exact" else amp * amp
        ordinals.append(ordinal)
        weights.append(w)
    total = sum(weights)
    if abs(total - 1.0) > MEASURE_NORM_TOL:
        raise ValueError(f"state is not normalized (squared norm {total})")
    r = rng.random() * total
    acc = 0.0
    for ordinal, w in zip(ordinals, weights):
        acc += w
        if r < acc:
            return state.space.decode(ordinal)
    return state.space.decode(ordinals[-1])
