"""Pauli-string Hamiltonians and variance extraction.

Pauli word convention: character ``i`` of a word acts on qubit ``i`` and
qubit 0 is the most significant bit of a computational-basis index, so
``"ZI"`` is ``kron(Z, I)``.

Four ways of getting ``Var(H)`` are provided: averaging the exact variance
over sampled states (:func:`sampled_variance`), the spectral-range bounds
(:func:`popoviciu_bound`, :func:`bhatia_davis_bound`), the coefficient sum
(:func:`coeff_sum_bound`), and the near-eigenstate shortcut, which is simply
``Var(H) = 0``.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from functools import cached_property
from importlib import resources

import numpy as np

from .errors import CapacityError, DomainError, InsufficientDataError, ParseError
from .rng import stream

MAX_DENSE_QUBITS = 6

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliHamiltonian:
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        merged: dict[str, float] = {}
        width = None
        for coeff, word in self.terms:
            coeff = float(coeff)
            word = word.upper()
            if not np.isfinite(coeff):
                raise DomainError(f"non-finite coefficient on {word}")
            if not word or set(word) - set("IXYZ"):
                raise DomainError(f"bad Pauli word {word!r}")
            if width is None:
                width = len(word)
            elif len(word) != width:
                raise DomainError(f"Pauli word {word!r} has length {len(word)}, expected {width}")
            merged[word] = merged.get(word, 0.0) + coeff
        if not merged:
            raise DomainError("Hamiltonian has no terms")
        object.__setattr__(self, "terms", tuple((c, w) for w, c in merged.items()))

    @classmethod
    def from_terms(cls, terms) -> "PauliHamiltonian":
        return cls(tuple((float(c), str(w)) for c, w in terms))

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])

    @property
    def identity_coefficient(self) -> float:
        ident = "I" * self.n_qubits
        return sum(c for c, w in self.terms if w == ident)

    @cached_property
    def matrix(self) -> np.ndarray:
        if self.n_qubits > MAX_DENSE_QUBITS:
            raise CapacityError(
                f"{self.n_qubits} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
            )
        dim = 2**self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for coeff, word in self.terms:
            out += coeff * pauli_matrix(word)
        return out

    def scaled(self, alpha: float) -> "PauliHamiltonian":
        return PauliHamiltonian(tuple((alpha * c, w) for c, w in self.terms))

    def shifted(self, alpha: float) -> "PauliHamiltonian":
        return PauliHamiltonian(self.terms + ((alpha, "I" * self.n_qubits),))

    def groups(self) -> list["MeasurementGroup"]:
        """Greedy qubit-wise commuting partition of the non-identity terms,
        in order of first appearance."""
        ident = "I" * self.n_qubits
        groups: list[MeasurementGroup] = []
        for coeff, word in self.terms:
            if word == ident:
                continue
            for g in groups:
                if g.accepts(word):
                    g.add(coeff, word)
                    break
            else:
                g = MeasurementGroup(["I"] * self.n_qubits, [])
                g.add(coeff, word)
                groups.append(g)
        return groups

    def to_text(self) -> str:
        return "".join(f"{c!r} {w}\n" for c, w in self.terms)


@dataclass
class MeasurementGroup:
    basis: list[str]  # per qubit, "I" means unconstrained (measured in Z)
    members: list[tuple[float, str]]

    def accepts(self, word: str) -> bool:
        return all(b == "I" or p == "I" or b == p for b, p in zip(self.basis, word))

    def add(self, coeff: float, word: str):
        for i, p in enumerate(word):
            if p != "I":
                self.basis[i] = p
        self.members.append((coeff, word))


@functools.lru_cache(maxsize=512)
def pauli_matrix(word: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for ch in word:
        out = np.kron(out, PAULI[ch])
    out.flags.writeable = False
    return out


_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coeff>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*\*?\s*(?P<word>[IXYZ]+)\b"
)


def parse_pauli(text: str) -> PauliHamiltonian:
    """Parse ``coefficient WORD`` terms.

    Terms may sit one per line or be chained with ``+``/``-`` on a line
    (``0.5 XX - 0.2 * ZZ``). ``#`` starts a comment; an optional leading
    ``H =`` is ignored.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        pos = 0
        head = re.match(r"\s*H\s*=", line)
        if head:
            pos = head.end()
        first = True
        while pos < len(line):
            if not line[pos:].strip():
                break
            m = _TERM_RE.match(line, pos)
            if not m or (not first and m.group("sign") is None):
                col = pos + (len(line[pos:]) - len(line[pos:].lstrip())) + 1
                raise ParseError(f"expected 'coefficient WORD', got {line[pos:].strip()!r}",
                                 where=f"line {lineno}, column {col}")
            coeff = float(m.group("coeff"))
            if m.group("sign") == "-":
                coeff = -coeff
            terms.append((coeff, m.group("word")))
            pos = m.end()
            first = False
        line_end = line.rstrip()
        if line_end.endswith(("+", "-")):
            raise ParseError("dangling operator", where=f"line {lineno}, column {len(line_end)}")
    if not terms:
        raise ParseError("no terms found")
    try:
        return PauliHamiltonian.from_terms(terms)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def load_h2_fixture() -> PauliHamiltonian:
    """Four-qubit STO-3G H2 Hamiltonian with the 15 published coefficients."""
    text = resources.files("shotvar.data").joinpath("h2_sto3g.pauli").read_text()
    return parse_pauli(text)


@dataclass(frozen=True)
class SpectrumBounds:
    lambda_min: float
    lambda_max: float
    exact: bool = True

    def __post_init__(self):
        if self.lambda_min > self.lambda_max:
            raise DomainError("lambda_min > lambda_max")


def spectrum_bounds(H: PauliHamiltonian) -> SpectrumBounds:
    ev = np.linalg.eigvalsh(H.matrix)
    return SpectrumBounds(float(ev[0]), float(ev[-1]), exact=True)


def popoviciu_bound(bounds: SpectrumBounds) -> float:
    return 0.25 * (bounds.lambda_max - bounds.lambda_min) ** 2


def bhatia_davis_bound(bounds: SpectrumBounds, mean_h: float, tol: float = 1e-12) -> float:
    lo, hi = bounds.lambda_min, bounds.lambda_max
    if not (lo - tol <= mean_h <= hi + tol):
        raise DomainError(f"mean {mean_h} outside spectrum [{lo}, {hi}]")
    return max(0.0, (hi - mean_h) * (mean_h - lo))


def coeff_sum_bound(H: PauliHamiltonian, include_identity: bool = True, squared: bool = False) -> float:
    """Loose variance bound from the Pauli coefficients: sum of ``|a_i|``
    (or ``a_i**2`` when ``squared``)."""
    ident = "I" * H.n_qubits
    vals = [abs(c) for c, w in H.terms if include_identity or w != ident]
    return float(sum(v * v for v in vals) if squared else sum(vals))


def as_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def expectation(H: PauliHamiltonian, rho: np.ndarray) -> float:
    rho = as_density(rho)
    _check_dim(H, rho)
    return float(np.real(np.trace(rho @ H.matrix)))


def exact_variance(H: PauliHamiltonian, state: np.ndarray) -> float:
    """``Tr(rho H^2) - Tr(rho H)^2`` for a density matrix or state vector."""
    rho = as_density(state)
    _check_dim(H, rho)
    Hm = H.matrix
    rh = rho @ Hm
    return float(np.real(np.trace(rh @ Hm)) - np.real(np.trace(rh)) ** 2)


def sampled_variance(H: PauliHamiltonian, states) -> float:
    states = list(states)
    if not states:
        raise InsufficientDataError("need at least one state")
    return float(np.mean([exact_variance(H, s) for s in states]))


def haar_states(n_qubits: int, count: int = 200, seed: int = 0) -> list[np.ndarray]:
    """Haar-random pure states (normalised complex Gaussian vectors)."""
    rng = stream(seed, "haar", n_qubits)
    dim = 2**n_qubits
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return list(z)


def _check_dim(H: PauliHamiltonian, rho: np.ndarray):
    dim = 2**H.n_qubits
    if rho.shape != (dim, dim):
        raise DomainError(f"state has shape {rho.shape}, Hamiltonian needs ({dim}, {dim})")
