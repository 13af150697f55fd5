import math
import logging
from enum import Enum
from functools import lru_cache
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.sparse as sparse
from sympy import Rational
from sympy.physics.wigner import clebsch_gordan

from config.constants import TOLERANCES, TRUNCATION
from config.messages import ERROR_MESSAGES
from utils.errors import InvalidLabelError, TowerMismatchError
from utils.hilbert import (BasisLabel, SpaceSpec, Tower, TruncatedState, block_labels,
                           enumerate_basis, label_index)

logger = logging.getLogger(__name__)


class OperatorTag(Enum):
    JL_PLUS = "JL+"
    JL_MINUS = "JL-"
    JL_0 = "JL0"
    JM_PLUS = "JM+"
    JM_MINUS = "JM-"
    JM_0 = "JM0"
    LAMBDA = "Lambda"
    CASIMIR = "J2"
    S = "S"
    V = "V"


@dataclass(frozen=True)
class OperatorKind:
    """Operator tag plus, for the bi-tensors, the doubled molecular and lab indices."""

    tag: OperatorTag
    two_q: int = 0
    two_q_prime: int = 0

    def __post_init__(self):
        allowed = {OperatorTag.S: (-1, 1), OperatorTag.V: (-2, 0, 2)}.get(self.tag, (0,))
        if self.two_q not in allowed or self.two_q_prime not in allowed:
            raise InvalidLabelError(ERROR_MESSAGES["invalid_operator"].format(
                tag=self.tag.value, two_q=self.two_q, two_q_prime=self.two_q_prime))

    @classmethod
    def spinor(cls, two_q: int, two_q_prime: int) -> "OperatorKind":
        return cls(OperatorTag.S, two_q, two_q_prime)

    @classmethod
    def vector(cls, q: int, q_prime: int) -> "OperatorKind":
        return cls(OperatorTag.V, 2 * q, 2 * q_prime)

    @property
    def is_tensor(self) -> bool:
        return self.tag in (OperatorTag.S, OperatorTag.V)

    @property
    def two_rank(self) -> int:
        return {OperatorTag.S: 1, OperatorTag.V: 2}.get(self.tag, 0)

    def with_indices(self, two_q: int, two_q_prime: int) -> "OperatorKind":
        return OperatorKind(self.tag, two_q, two_q_prime)

    def __str__(self) -> str:
        if self.is_tensor:
            return f"{self.tag.value}({self.two_q}/2,{self.two_q_prime}/2)"
        return self.tag.value


JL_PLUS = OperatorKind(OperatorTag.JL_PLUS)
JL_MINUS = OperatorKind(OperatorTag.JL_MINUS)
JL_0 = OperatorKind(OperatorTag.JL_0)
JM_PLUS = OperatorKind(OperatorTag.JM_PLUS)
JM_MINUS = OperatorKind(OperatorTag.JM_MINUS)
JM_0 = OperatorKind(OperatorTag.JM_0)
LAMBDA = OperatorKind(OperatorTag.LAMBDA)
CASIMIR = OperatorKind(OperatorTag.CASIMIR)

LAB_OPERATORS = (JL_PLUS, JL_MINUS, JL_0)
MOLECULAR_OPERATORS = (JM_PLUS, JM_MINUS, JM_0)


def spinor_components() -> List[OperatorKind]:
    return [OperatorKind.spinor(q, qp) for q in (-1, 1) for qp in (-1, 1)]


def vector_components() -> List[OperatorKind]:
    return [OperatorKind.vector(q, qp) for q in (-1, 0, 1) for qp in (-1, 0, 1)]


@dataclass(frozen=True)
class RotorConstants:
    A0: float
    A1: float
    A2: float

    def __post_init__(self):
        if not all(math.isfinite(value) for value in (self.A0, self.A1, self.A2)):
            raise ValueError(f"Rotor constants must be finite: {self}")

    @property
    def is_spherical(self) -> bool:
        return self.A0 == self.A1 == self.A2


@lru_cache(maxsize=None)
def clebsch(two_j1: int, two_m1: int, two_j2: int, two_m2: int, two_j3: int, two_m3: int) -> float:
    return float(clebsch_gordan(Rational(two_j1, 2), Rational(two_j2, 2), Rational(two_j3, 2),
                                Rational(two_m1, 2), Rational(two_m2, 2), Rational(two_m3, 2)))


def _ladder(two_j: int, two_x: int, raise_: bool) -> float:
    # sqrt((j -+ x)(j +- x + 1)) in doubled units
    if raise_:
        return 0.5 * math.sqrt(max((two_j - two_x) * (two_j + two_x + 2), 0))
    return 0.5 * math.sqrt(max((two_j + two_x) * (two_j - two_x + 2), 0))


def _tensor_action(kind: OperatorKind, label: BasisLabel) -> List[Tuple[BasisLabel, float]]:
    two_rank = kind.two_rank
    n = label.two_j
    two_k_target = label.two_k + kind.two_q
    two_m_target = label.two_m + kind.two_q_prime
    images = []
    for n_target in range(n + two_rank, n - two_rank - 1, -2):
        if n_target < 0 or abs(two_k_target) > n_target or abs(two_m_target) > n_target:
            continue
        value = (math.sqrt((n + 1) / (n_target + 1))
                 * clebsch(n, label.two_k, two_rank, kind.two_q, n_target, two_k_target)
                 * clebsch(n, label.two_m, two_rank, kind.two_q_prime, n_target, two_m_target))
        if value != 0.0:
            images.append((BasisLabel(n_target, two_k_target, two_m_target), value))
    return images


def action(kind: OperatorKind, label: BasisLabel) -> List[Tuple[BasisLabel, float]]:
    """Images of one basis vector as (target label, coefficient) pairs."""
    n, two_k, two_m = label.two_j, label.two_k, label.two_m
    tag = kind.tag
    if kind.is_tensor:
        return _tensor_action(kind, label)
    if tag is OperatorTag.JL_PLUS:
        return [(BasisLabel(n, two_k, two_m + 2), _ladder(n, two_m, True))] if two_m < n else []
    if tag is OperatorTag.JL_MINUS:
        return [(BasisLabel(n, two_k, two_m - 2), _ladder(n, two_m, False))] if two_m > -n else []
    if tag is OperatorTag.JM_PLUS:
        return [(BasisLabel(n, two_k - 2, two_m), _ladder(n, two_k, False))] if two_k > -n else []
    if tag is OperatorTag.JM_MINUS:
        return [(BasisLabel(n, two_k + 2, two_m), _ladder(n, two_k, True))] if two_k < n else []
    diagonal = {
        OperatorTag.JL_0: two_m / 2,
        OperatorTag.JM_0: two_k / 2,
        OperatorTag.LAMBDA: n / 2,
        OperatorTag.CASIMIR: n / 2 * (n / 2 + 1),
    }[tag]
    return [(label, diagonal)] if diagonal != 0.0 else []


def _reach(kind: OperatorKind) -> int:
    return kind.two_rank


@lru_cache(maxsize=256)
def operator_matrix(kind: OperatorKind, space: SpaceSpec, target: SpaceSpec) -> sparse.csr_matrix:
    if kind.tag is OperatorTag.S and (space.tower is Tower.INTEGER or target.tower is Tower.INTEGER):
        raise TowerMismatchError(ERROR_MESSAGES["spinor_on_integer_tower"])
    rows, cols, values = [], [], []
    for two_j in space.two_j_values():
        for label in block_labels(two_j):
            col = label_index(space, label)
            for image, value in action(kind, label):
                if target.contains(image):
                    rows.append(label_index(target, image))
                    cols.append(col)
                    values.append(value)
    logger.debug(f"Assembled {kind} on {space} -> {target}: {len(values)} nonzeros")
    return sparse.csr_matrix((values, (rows, cols)), shape=(target.dim, space.dim), dtype=complex)


def truncated_matrix(kind: OperatorKind, space: SpaceSpec) -> sparse.csr_matrix:
    return operator_matrix(kind, space, space)


def apply(kind: OperatorKind, state: TruncatedState) -> TruncatedState:
    space = state.space
    if kind.tag is OperatorTag.S and space.tower is Tower.INTEGER:
        raise TowerMismatchError(ERROR_MESSAGES["spinor_on_integer_tower"])
    extended = space.extended(_reach(kind))
    image = operator_matrix(kind, space, extended) @ state.to_vector()
    kept, lost = image[:space.dim], image[space.dim:]
    dropped = float(np.vdot(lost, lost).real)
    if dropped > TRUNCATION["dropped_weight_warning"] * max(state.norm_squared(), 1.0):
        logger.debug(f"{kind} raised weight {dropped:.3e} above two_j_max={space.two_j_max}")
    return TruncatedState.from_vector(space, kept, dropped_weight=dropped)


def expectation_value(kind: OperatorKind, state: TruncatedState) -> complex:
    vector = state.to_vector()
    return complex(np.vdot(vector, truncated_matrix(kind, state.space) @ vector) / np.vdot(vector, vector))


def act(kind: OperatorKind, state: TruncatedState) -> TruncatedState:
    """Matrix-free apply over the support of state; images above the cap go to dropped_weight."""
    if kind.tag is OperatorTag.S and state.space.tower is Tower.INTEGER:
        raise TowerMismatchError(ERROR_MESSAGES["spinor_on_integer_tower"])
    kept: Dict[BasisLabel, complex] = {}
    lost: Dict[BasisLabel, complex] = {}
    for label, amplitude in state.coeffs.items():
        for image, value in action(kind, label):
            bucket = kept if state.space.contains(image) else lost
            bucket[image] = bucket.get(image, 0j) + value * amplitude
    dropped = float(sum(abs(value) ** 2 for value in lost.values()))
    return TruncatedState(state.space, kept, dropped_weight=dropped)


def direct_expectation(kind: OperatorKind, state: TruncatedState) -> complex:
    image = act(kind, state)
    total = 0j
    for label, value in image.coeffs.items():
        total += np.conj(state.amplitude(label)) * value
    return complex(total / state.norm_squared())


def adjoint_partner(kind: OperatorKind) -> Tuple[OperatorKind, float]:
    """Operator and sign whose product equals the adjoint of kind."""
    partners = {
        OperatorTag.JL_PLUS: JL_MINUS, OperatorTag.JL_MINUS: JL_PLUS,
        OperatorTag.JM_PLUS: JM_MINUS, OperatorTag.JM_MINUS: JM_PLUS,
    }
    if kind.is_tensor:
        sign = -1.0 if ((kind.two_q - kind.two_q_prime) // 2) % 2 else 1.0
        return kind.with_indices(-kind.two_q, -kind.two_q_prime), sign
    return partners.get(kind.tag, kind), 1.0


def adjoint_check(kind: OperatorKind, space: SpaceSpec) -> float:
    partner, sign = adjoint_partner(kind)
    forward = truncated_matrix(kind, space).toarray()
    backward = sign * truncated_matrix(partner, space).toarray()
    return float(np.max(np.abs(forward.conj().T - backward), initial=0.0))


def _commutator(a: sparse.spmatrix, b: sparse.spmatrix) -> sparse.spmatrix:
    return a @ b - b @ a


def _max_abs(matrix: sparse.spmatrix) -> float:
    matrix = sparse.csr_matrix(matrix)
    return float(np.max(np.abs(matrix.data), initial=0.0))


def _tensor_relations(kind: OperatorKind, space: SpaceSpec, ops: Dict[str, sparse.spmatrix]) -> Dict[str, float]:
    two_rank = kind.two_rank
    tensor = truncated_matrix(kind, space)
    two_q, two_qp = kind.two_q, kind.two_q_prime

    def shifted(dq: int, dqp: int, coefficient: float) -> sparse.spmatrix:
        nq, nqp = two_q + dq, two_qp + dqp
        if coefficient == 0.0 or abs(nq) > two_rank or abs(nqp) > two_rank:
            return sparse.csr_matrix(tensor.shape, dtype=complex)
        return coefficient * truncated_matrix(kind.with_indices(nq, nqp), space)

    lab_up = 0.5 * math.sqrt(max((two_rank - two_qp) * (two_rank + two_qp + 2), 0))
    lab_down = 0.5 * math.sqrt(max((two_rank + two_qp) * (two_rank - two_qp + 2), 0))
    mol_up = 0.5 * math.sqrt(max((two_rank - two_q) * (two_rank + two_q + 2), 0))
    mol_down = 0.5 * math.sqrt(max((two_rank + two_q) * (two_rank - two_q + 2), 0))
    return {
        f"[JL0,{kind}]": _max_abs(_commutator(ops["JL0"], tensor) - (two_qp / 2) * tensor),
        f"[JL+,{kind}]": _max_abs(_commutator(ops["JL+"], tensor) - shifted(0, 2, lab_up)),
        f"[JL-,{kind}]": _max_abs(_commutator(ops["JL-"], tensor) - shifted(0, -2, lab_down)),
        f"[JM0,{kind}]": _max_abs(_commutator(ops["JM0"], tensor) - (two_q / 2) * tensor),
        f"[JM-,{kind}]": _max_abs(_commutator(ops["JM-"], tensor) - shifted(2, 0, mol_up)),
        f"[JM+,{kind}]": _max_abs(_commutator(ops["JM+"], tensor) - shifted(-2, 0, mol_down)),
    }


def commutator_defect(space: SpaceSpec) -> Dict[str, Any]:
    ops = {kind.tag.value: truncated_matrix(kind, space) for kind in LAB_OPERATORS + MOLECULAR_OPERATORS}
    casimir = truncated_matrix(CASIMIR, space)
    identity = sparse.identity(space.dim, dtype=complex, format="csr")
    relations = {
        "[JL0,JL+]-JL+": _max_abs(_commutator(ops["JL0"], ops["JL+"]) - ops["JL+"]),
        "[JL0,JL-]+JL-": _max_abs(_commutator(ops["JL0"], ops["JL-"]) + ops["JL-"]),
        "[JL+,JL-]-2JL0": _max_abs(_commutator(ops["JL+"], ops["JL-"]) - 2 * ops["JL0"]),
        "[JM0,JM+]+JM+": _max_abs(_commutator(ops["JM0"], ops["JM+"]) + ops["JM+"]),
        "[JM0,JM-]-JM-": _max_abs(_commutator(ops["JM0"], ops["JM-"]) - ops["JM-"]),
        "[JM+,JM-]+2JM0": _max_abs(_commutator(ops["JM+"], ops["JM-"]) + 2 * ops["JM0"]),
        "J2-lab": _max_abs(casimir - ops["JL-"] @ ops["JL+"] - ops["JL0"] @ (ops["JL0"] + identity)),
        "J2-molecular": _max_abs(casimir - ops["JM+"] @ ops["JM-"] - ops["JM0"] @ (ops["JM0"] + identity)),
    }
    for lab in LAB_OPERATORS:
        for mol in MOLECULAR_OPERATORS:
            relations[f"[{lab},{mol}]"] = _max_abs(_commutator(ops[lab.tag.value], ops[mol.tag.value]))
    tensors = vector_components()
    if space.tower is Tower.HALF_INTEGER:
        tensors = spinor_components() + tensors
    for kind in tensors:
        relations.update(_tensor_relations(kind, space, ops))
    max_defect = max(relations.values())
    logger.info(f"Commutator check on {space}: {len(relations)} relations, max defect {max_defect:.2e}")
    return {
        "relations": relations,
        "max_defect": max_defect,
        "passed": max_defect <= TOLERANCES["algebra"],
    }


def selection_rule_violations(kind: OperatorKind, space: SpaceSpec) -> int:
    """Count nonzero elements that break the shift rules of a bi-tensor."""
    matrix = sparse.coo_matrix(operator_matrix(kind, space, space.extended(kind.two_rank)))
    target_labels = _labels_by_index(space.extended(kind.two_rank))
    source_labels = _labels_by_index(space)
    allowed_steps = {1} if kind.tag is OperatorTag.S else {0, 2}
    violations = 0
    for row, col, value in zip(matrix.row, matrix.col, matrix.data):
        if abs(value) <= TOLERANCES["algebra"]:
            continue
        image, source = target_labels[row], source_labels[col]
        shift_ok = (image.two_k - source.two_k == kind.two_q and image.two_m - source.two_m == kind.two_q_prime)
        rank_ok = abs(image.two_j - source.two_j) in allowed_steps
        if not (shift_ok and rank_ok):
            violations += 1
    return violations


@lru_cache(maxsize=32)
def _labels_by_index(space: SpaceSpec) -> Tuple[BasisLabel, ...]:
    return tuple(enumerate_basis(space))


def spin_matrices(two_j: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standard (raising, lowering, diagonal) spin-j matrices on ascending projections."""
    size = two_j + 1
    raising = np.zeros((size, size))
    for index in range(size - 1):
        two_x = -two_j + 2 * index
        raising[index + 1, index] = _ladder(two_j, two_x, True)
    diagonal = np.diag(np.arange(-two_j, two_j + 1, 2) / 2)
    return raising, raising.T.copy(), diagonal


def molecular_components(two_j: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """J^M_1, J^M_2, J^M_0 acting on the k index of one block."""
    k_raise, k_lower, k_zero = spin_matrices(two_j)
    jm_plus, jm_minus = k_lower, k_raise
    return (jm_plus + jm_minus) / 2, (jm_plus - jm_minus) / 2j, k_zero


def rotor_block(constants: RotorConstants, two_j: int) -> np.ndarray:
    """A1 (J^M_1)^2 + A2 (J^M_2)^2 + A0 (J^M_0)^2 on the k index only."""
    j1, j2, j0 = molecular_components(two_j)
    return constants.A1 * j1 @ j1 + constants.A2 * j2 @ j2 + constants.A0 * j0 @ j0


def rotor_hamiltonian(constants: RotorConstants, space: SpaceSpec) -> Dict[int, np.ndarray]:
    return {two_j: np.kron(rotor_block(constants, two_j), np.eye(two_j + 1)) for two_j in space.two_j_values()}


def block_diagonal(blocks: Dict[int, np.ndarray], space: SpaceSpec) -> sparse.csr_matrix:
    return sparse.block_diag([blocks[two_j] for two_j in space.two_j_values()], format="csr")
