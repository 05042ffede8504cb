"""Small dense complex-matrix quantum mechanics.

States, observables and POVMs are plain numpy complex arrays wrapped in thin
validated containers.  Everything here is sized for dimensions up to 64, where
a dense symmetric eigensolver is exact for all practical purposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, DimensionMismatch, NotHermitian
from .probvec import ProbVec

HERM_TOL = 1e-9
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
EIG_MERGE_TOL = 1e-8    # eigenvalues closer than this share one projector
PRODUCT_BIN_TOL = 1e-9  # eigenvalue products closer than this share one outcome
MAX_DIM = 64

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


def _as_square_complex(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise BadParameter("matrix entries must be finite")
    return a


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector onto the given (normalized) vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as orthonormal
    columns, so ``m = V diag(w) V^dagger``.
    """
    a = _as_square_complex(m)
    if a.shape[0] > MAX_DIM:
        raise BadParameter(f"dimension {a.shape[0]} exceeds the supported maximum {MAX_DIM}")
    if np.max(np.abs(a - a.conj().T)) > HERM_TOL:
        raise NotHermitian(
            f"matrix deviates from Hermitian by {np.max(np.abs(a - a.conj().T)):.3e}"
        )
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    return w[::-1].copy(), v[:, ::-1].copy()


@dataclass(frozen=True, eq=False)
class DensityState:
    """A density operator, optionally tagged with a bipartite factorization."""

    matrix: np.ndarray
    dims: tuple[int, int] | None = None

    def __post_init__(self):
        a = _as_square_complex(self.matrix)
        if np.max(np.abs(a - a.conj().T)) > HERM_TOL:
            raise NotHermitian("density matrix is not Hermitian within tolerance")
        if abs(np.trace(a).real - 1.0) > TRACE_TOL or abs(np.trace(a).imag) > TRACE_TOL:
            raise BadParameter(f"density matrix trace {np.trace(a):.12f} is not 1")
        wmin = float(np.linalg.eigvalsh((a + a.conj().T) / 2.0)[0])
        if wmin < -PSD_TOL:
            raise BadParameter(f"density matrix has negative eigenvalue {wmin:.3e}")
        if self.dims is not None:
            da, db = self.dims
            if da * db != a.shape[0]:
                raise DimensionMismatch(
                    f"factorization {self.dims} incompatible with dimension {a.shape[0]}"
                )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Povm:
    """A positive operator-valued measurement: effects summing to the identity."""

    effects: tuple[np.ndarray, ...]
    outcome_labels: tuple[str, ...]

    def __post_init__(self):
        effs = tuple(_as_square_complex(e) for e in self.effects)
        if len(effs) == 0:
            raise BadParameter("a POVM needs at least one effect")
        if len(self.outcome_labels) != len(effs):
            raise DimensionMismatch("one outcome label per effect is required")
        d = effs[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in effs:
            if e.shape[0] != d:
                raise DimensionMismatch("all effects must share one dimension")
            if np.max(np.abs(e - e.conj().T)) > HERM_TOL:
                raise NotHermitian("POVM effect is not Hermitian within tolerance")
            if float(np.linalg.eigvalsh((e + e.conj().T) / 2.0)[0]) < -PSD_TOL:
                raise BadParameter("POVM effect has a negative eigenvalue beyond tolerance")
            total += e
        if np.max(np.abs(total - np.eye(d))) > 1e-8:
            raise BadParameter("POVM effects do not sum to the identity")
        frozen = []
        for e in effs:
            e = e.copy()
            e.setflags(write=False)
            frozen.append(e)
        object.__setattr__(self, "effects", tuple(frozen))
        object.__setattr__(self, "outcome_labels", tuple(str(x) for x in self.outcome_labels))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def effect_for(self, label: str) -> np.ndarray:
        try:
            return self.effects[self.outcome_labels.index(str(label))]
        except ValueError:
            raise BadParameter(
                f"unknown outcome {label!r}; known labels {self.outcome_labels}"
            ) from None


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian observable with merged eigenprojectors, eigenvalues descending."""

    matrix: np.ndarray
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]
    outcome_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.outcome_labels:
            object.__setattr__(
                self, "outcome_labels", tuple(f"{ev:.12g}" for ev in self.eigenvalues)
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nondegenerate(self) -> bool:
        return len(self.eigenvalues) == self.dim

    def povm(self) -> Povm:
        return Povm(self.projectors, self.outcome_labels)


def observable_from_matrix(m, outcome_labels: tuple[str, ...] | None = None) -> Observable:
    """Build an :class:`Observable` by spectral decomposition, merging degeneracies."""
    w, v = eig_hermitian(m)
    eigenvalues: list[float] = []
    projectors: list[np.ndarray] = []
    i = 0
    while i < len(w):
        j = i
        while j + 1 < len(w) and abs(w[j + 1] - w[i]) <= EIG_MERGE_TOL:
            j += 1
        block = v[:, i : j + 1]
        eigenvalues.append(float(np.mean(w[i : j + 1])))
        projectors.append(block @ block.conj().T)
        i = j + 1
    labels = outcome_labels if outcome_labels is not None else ()
    return Observable(_as_square_complex(m), tuple(eigenvalues), tuple(projectors), labels)


_PAULI_LABELS = {"x": ("+", "-"), "y": ("+i", "-i"), "z": ("0", "1")}


def pauli_observable(axis: str) -> Observable:
    """The Pauli observable along ``x``, ``y`` or ``z``.

    Projectors are built as (I +/- sigma) / 2, whose entries are exact dyadic
    floats, so overlap computations between Pauli eigenbases are bit-exact.
    """
    try:
        labels = _PAULI_LABELS[axis]
    except KeyError:
        raise BadParameter(f"unknown Pauli axis {axis!r}") from None
    m = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}[axis]
    return Observable(m, (1.0, -1.0), ((PAULI_I + m) / 2.0, (PAULI_I - m) / 2.0), labels)


def bloch_observable(direction) -> Observable:
    """Qubit observable n . sigma for a unit Bloch vector n."""
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise BadParameter("direction must be a unit 3-vector")
    m = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    pp = (PAULI_I + m) / 2.0
    pm = (PAULI_I - m) / 2.0
    return Observable(m, (1.0, -1.0), (pp, pm), ("+", "-"))


def born_stats(state: DensityState, meas: Povm) -> ProbVec:
    """Measurement statistics of ``state`` under ``meas`` via the Born rule."""
    if state.dim != meas.dim:
        raise DimensionMismatch(
            f"state dimension {state.dim} does not match POVM dimension {meas.dim}"
        )
    probs = np.array([float(np.trace(e @ state.matrix).real) for e in meas.effects])
    probs = np.clip(probs, 0.0, None)
    return ProbVec(probs)


def product_observable_stats(state: DensityState, a: Observable, b: Observable) -> ProbVec:
    """Statistics of the joint observable a (x) b, binned by eigenvalue product.

    Outcomes whose eigenvalue products agree within ``PRODUCT_BIN_TOL`` are
    merged into one bin; the returned distribution is indexed by the distinct
    products in descending order.
    """
    if state.dims is None:
        raise DimensionMismatch("state needs a bipartite factorization")
    da, db = state.dims
    if a.dim != da or b.dim != db:
        raise DimensionMismatch(
            f"observables of dimension ({a.dim}, {b.dim}) do not fit factors {state.dims}"
        )
    pairs = []
    for ev_a, proj_a in zip(a.eigenvalues, a.projectors):
        for ev_b, proj_b in zip(b.eigenvalues, b.projectors):
            prob = float(np.trace(np.kron(proj_a, proj_b) @ state.matrix).real)
            pairs.append((ev_a * ev_b, max(prob, 0.0)))
    pairs.sort(key=lambda t: -t[0])
    binned: list[float] = []
    current_value = None
    for value, prob in pairs:
        if current_value is not None and abs(value - current_value) <= PRODUCT_BIN_TOL:
            binned[-1] += prob
        else:
            binned.append(prob)
            current_value = value
    return ProbVec(binned)


def partial_trace(state: DensityState, keep: str) -> DensityState:
    """Reduce a bipartite state to one factor; ``keep`` is ``"A"`` or ``"B"``."""
    if state.dims is None:
        raise DimensionMismatch("state needs a bipartite factorization")
    da, db = state.dims
    r = state.matrix.reshape(da, db, da, db)
    if keep == "A":
        out = np.einsum("ijkj->ik", r)
    elif keep == "B":
        out = np.einsum("ijil->jl", r)
    else:
        raise BadParameter(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityState(out)


def kron_state(a: DensityState, b: DensityState) -> DensityState:
    """Product state a (x) b with the factorization recorded."""
    return DensityState(np.kron(a.matrix, b.matrix), dims=(a.dim, b.dim))


def von_neumann_entropy(state: DensityState) -> float:
    """Spectral entropy of the state in bits."""
    w = np.linalg.eigvalsh(state.matrix)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def maximally_entangled_ket(d: int = 2) -> np.ndarray:
    """The ket sum_i |ii> / sqrt(d)."""
    ket = np.zeros(d * d, dtype=complex)
    for i in range(d):
        ket[i * d + i] = 1.0
    return ket / np.sqrt(d)


def bell_phi_plus() -> DensityState:
    """The two-qubit maximally entangled state (|00> + |11>) / sqrt(2)."""
    return DensityState(projector(maximally_entangled_ket(2)), dims=(2, 2))


def maximally_mixed(d: int, dims: tuple[int, int] | None = None) -> DensityState:
    return DensityState(np.eye(d, dtype=complex) / d, dims=dims)


def werner(w: float) -> DensityState:
    """Two-qubit Werner-type mixture w |Phi+><Phi+| + (1 - w) I/4."""
    if not 0.0 <= w <= 1.0:
        raise BadParameter(f"mixing parameter must lie in [0, 1], got {w}")
    m = w * projector(maximally_entangled_ket(2)) + (1.0 - w) * np.eye(4) / 4.0
    return DensityState(m, dims=(2, 2))


def isotropic(d: int, f: float) -> DensityState:
    """Isotropic state with singlet fraction ``f`` on a d x d system."""
    if d < 2:
        raise BadParameter("local dimension must be at least 2")
    if not 0.0 <= f <= 1.0:
        raise BadParameter(f"singlet fraction must lie in [0, 1], got {f}")
    p = projector(maximally_entangled_ket(d))
    rest = (np.eye(d * d) - p) / (d * d - 1)
    return DensityState(f * p + (1.0 - f) * rest, dims=(d, d))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def mub_bases(d: int, m: int) -> tuple[Observable, ...]:
    """``m`` mutually unbiased bases in prime dimension ``d``, as observables.

    For d = 2 these are the Pauli z, x, y eigenbases.  For odd primes the
    Weyl-Heisenberg construction is used: basis ``k`` has vectors with
    components omega^(k l^2 + j l) / sqrt(d) against the computational basis,
    preceded by the computational basis itself.
    """
    if not _is_prime(d):
        raise BadParameter(f"dimension {d} is not prime")
    if not 2 <= m <= d + 1:
        raise BadParameter(f"number of bases must lie in [2, {d + 1}], got {m}")
    if d == 2:
        # Pauli z, x, y eigenbases, relabeled by basis-vector index.
        relabeled = tuple(
            Observable(o.matrix, o.eigenvalues, o.projectors, ("0", "1"))
            for o in (pauli_observable("z"), pauli_observable("x"), pauli_observable("y"))
        )
        return relabeled[:m]
    omega = np.exp(2j * np.pi / d)
    eigenvalues = tuple(float(x) for x in range(d - 1, -1, -1))
    bases: list[Observable] = []
    comp = tuple(projector(np.eye(d)[:, j]) for j in range(d))
    matrix = sum(ev * p for ev, p in zip(eigenvalues, comp))
    bases.append(Observable(matrix, eigenvalues, comp, tuple(str(j) for j in range(d))))
    for k in range(d):
        projs = []
        for j in range(d):
            ls = np.arange(d)
            vec = omega ** ((k * ls * ls + j * ls) % d) / np.sqrt(d)
            projs.append(projector(vec))
        matrix = sum(ev * p for ev, p in zip(eigenvalues, projs))
        bases.append(Observable(matrix, eigenvalues, tuple(projs), tuple(str(j) for j in range(d))))
        if len(bases) == m:
            break
    return tuple(bases[:m])


def correlation_tensor(state: DensityState) -> np.ndarray:
    """Pauli correlation tensor T[mu, nu] = tr(sigma_mu (x) sigma_nu rho) of a two-qubit state."""
    if state.dims != (2, 2):
        raise DimensionMismatch("correlation tensor is defined for two-qubit states")
    t = np.empty((4, 4))
    for mu in range(4):
        for nu in range(4):
            t[mu, nu] = float(np.trace(np.kron(_PAULIS[mu], _PAULIS[nu]) @ state.matrix).real)
    return t


def state_from_correlation_tensor(t: np.ndarray) -> DensityState:
    """Rebuild the two-qubit state from its Pauli correlation tensor."""
    t = np.asarray(t, dtype=float)
    if t.shape != (4, 4):
        raise DimensionMismatch("correlation tensor must be 4 x 4")
    m = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            m += t[mu, nu] * np.kron(_PAULIS[mu], _PAULIS[nu])
    return DensityState(m / 4.0, dims=(2, 2))


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state via normalized complex Gaussian components."""
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_pure_state(d: int, rng: np.random.Generator,
                      dims: tuple[int, int] | None = None) -> DensityState:
    return DensityState(projector(random_ket(d, rng)), dims=dims)


def random_mixed_state(d: int, rng: np.random.Generator,
                       dims: tuple[int, int] | None = None) -> DensityState:
    """Random mixed state: partial trace of a random pure state on a doubled space."""
    ket = random_ket(d * d, rng)
    big = DensityState(projector(ket), dims=(d, d))
    reduced = partial_trace(big, "A")
    return DensityState(reduced.matrix, dims=dims)


def random_product_state(da: int, db: int, rng: np.random.Generator) -> DensityState:
    return kron_state(random_mixed_state(da, rng), random_mixed_state(db, rng))


def random_separable_state(da: int, db: int, rng: np.random.Generator,
                           max_terms: int = 16) -> DensityState:
    """Random convex mixture of up to ``max_terms`` random product states."""
    n = int(rng.integers(1, max_terms + 1))
    weights = rng.exponential(size=n)
    weights /= weights.sum()
    m = np.zeros((da * db, da * db), dtype=complex)
    for w in weights:
        m += w * random_product_state(da, db, rng).matrix
    return DensityState(m, dims=(da, db))


def random_qubit_observable(rng: np.random.Generator) -> Observable:
    """Dichotomic qubit observable along a uniformly random Bloch direction."""
    v = rng.normal(size=3)
    return bloch_observable(v / np.linalg.norm(v))


def schmidt_observables(ket: np.ndarray, dims: tuple[int, int]):
    """Local measurement pairs adapted to the Schmidt bases of a bipartite ket.

    Returns ``(x_list, y_list)`` with two observables per party: the Schmidt
    basis itself, and its Fourier rotation (conjugated on the second party so
    that outcomes stay correlated).  For every entangled pure state the
    matched-outcome correlations in these measurements exceed what any
    product state can reach, which is how sampled pure states are witnessed.
    """
    da, db = dims
    ket = np.asarray(ket, dtype=complex).reshape(da * db)
    ket = ket / np.linalg.norm(ket)
    u, s, vh = np.linalg.svd(ket.reshape(da, db))
    d = min(da, db)
    if da != db:
        raise DimensionMismatch("Schmidt measurement pairs need equal local dimensions")
    omega = np.exp(2j * np.pi / d)
    basis_a = [u[:, i] for i in range(d)]
    basis_b = [vh[i, :] for i in range(d)]
    eigenvalues = tuple(float(x) for x in range(d - 1, -1, -1))
    labels = tuple(str(i) for i in range(d))

    def make(vectors) -> Observable:
        projs = tuple(projector(v) for v in vectors)
        matrix = sum(ev * p for ev, p in zip(eigenvalues, projs))
        return Observable(matrix, eigenvalues, projs, labels)

    fourier_a = [
        sum(omega ** (i * k) * basis_a[i] for i in range(d)) / np.sqrt(d) for k in range(d)
    ]
    fourier_b = [
        sum(omega ** (-i * k) * basis_b[i] for i in range(d)) / np.sqrt(d) for k in range(d)
    ]
    return ([make(basis_a), make(fourier_a)], [make(basis_b), make(fourier_b)])
