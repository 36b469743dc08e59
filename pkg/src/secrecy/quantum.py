"""Finite-dimensional states, channels and distance measures.

Everything in this package works with explicit complex matrices over small
tensor products of subsystems.  A state is a density operator together with
the list of subsystem dimensions; operations such as partial traces, system
permutations, purifications and Stinespring dilations are plain index
gymnastics on numpy arrays.

Conventions
-----------
* Subsystem 0 is the leftmost (most significant) tensor factor.
* All logarithms are base 2 and ``0 * log 0 == 0``.
* Fidelity is the *root* fidelity ``F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1``,
  extended to subnormalized operators by the usual
  ``+ sqrt((1 - tr rho)(1 - tr sigma))`` term.
* Purified distance is ``P = sqrt(1 - F_gen^2)``.
* Eigenvalues of nominally-PSD matrices in ``[-1e-10, 0]`` are clipped to
  zero; anything more negative is treated as a genuine error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERM_TOL = 1e-8
TRACE_TOL = 1e-8
PSD_CLIP = 1e-10  # magnitude below which negative eigenvalues are noise

LN2 = math.log(2.0)


class ValidationError(ValueError):
    """Raised when a matrix fails a structural check (hermiticity, PSD, trace)."""


# ---------------------------------------------------------------------------
# basic matrix helpers
# ---------------------------------------------------------------------------

def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def herm_clip(a: np.ndarray) -> np.ndarray:
    """Symmetrize a nominally Hermitian matrix (kills rounding noise)."""
    return 0.5 * (a + dagger(a))


def psd_eigvals(a: np.ndarray, clip: float = PSD_CLIP) -> np.ndarray:
    """Eigenvalues of a nominally PSD Hermitian matrix, small negatives clipped.

    Raises ValidationError if any eigenvalue is below ``-clip``.
    """
    if not is_hermitian(a):
        raise ValidationError("matrix is not Hermitian within tolerance")
    vals = np.linalg.eigvalsh(herm_clip(a))
    if vals.size and vals[0] < -clip:
        raise ValidationError(f"matrix has negative eigenvalue {vals[0]:.3e}")
    return np.clip(vals, 0.0, None)


def psd_sqrt(a: np.ndarray, clip: float = PSD_CLIP) -> np.ndarray:
    """Matrix square root of a PSD matrix via its eigenbasis."""
    a = herm_clip(a)
    vals, vecs = np.linalg.eigh(a)
    if vals.size and vals[0] < -clip:
        raise ValidationError(f"matrix has negative eigenvalue {vals[0]:.3e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ dagger(vecs)


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, left factor most significant."""
    out = np.array([[1.0 + 0.0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def binary_entropy(p: float) -> float:
    if p < 0.0 or p > 1.0:
        raise ValueError(f"probability out of range: {p}")
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            out -= q * math.log2(q)
    return out


def shannon_entropy(p: Sequence[float]) -> float:
    out = 0.0
    for q in p:
        if q < -1e-12:
            raise ValueError("negative probability")
        if q > 0.0:
            out -= q * math.log2(q)
    return out


# ---------------------------------------------------------------------------
# density operators
# ---------------------------------------------------------------------------

@dataclass
class DensityOperator:
    """A (possibly subnormalized) density operator over named tensor factors.

    Parameters
    ----------
    mat : complex matrix of shape (D, D) with D = prod(dims)
    dims : subsystem dimensions, leftmost factor first
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, mat: np.ndarray, dims: Sequence[int] | int,
                 validate: bool = True):
        mat = np.asarray(mat, dtype=complex)
        if isinstance(dims, (int, np.integer)):
            dims = (int(dims),)
        dims = tuple(int(d) for d in dims)
        d = int(np.prod(dims)) if dims else 1
        if mat.shape != (d, d):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match dims {dims}")
        self.mat = mat
        self.dims = dims
        if validate:
            self.validate()

    # -- structural checks -------------------------------------------------
    def validate(self, require_normalized: bool = False) -> None:
        if not is_hermitian(self.mat):
            raise ValidationError("density operator is not Hermitian")
        psd_eigvals(self.mat)
        t = self.trace()
        if t < -TRACE_TOL or t > 1.0 + TRACE_TOL:
            raise ValidationError(f"trace {t} outside [0, 1]")
        if require_normalized and abs(t - 1.0) > TRACE_TOL:
            raise ValidationError(f"state is not normalized (trace {t})")

    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def copy(self) -> "DensityOperator":
        return DensityOperator(self.mat.copy(), self.dims, validate=False)

    # -- index gymnastics --------------------------------------------------
    def _as_tensor(self) -> np.ndarray:
        return self.mat.reshape(self.dims + self.dims)

    def permute(self, order: Sequence[int]) -> "DensityOperator":
        """Reorder subsystems: new factor k is old factor order[k]."""
        order = list(order)
        if sorted(order) != list(range(len(self.dims))):
            raise ValueError(f"bad permutation {order} for {len(self.dims)} systems")
        n = len(self.dims)
        t = self._as_tensor().transpose(order + [n + o for o in order])
        new_dims = tuple(self.dims[o] for o in order)
        d = int(np.prod(new_dims))
        return DensityOperator(t.reshape(d, d), new_dims, validate=False)

    def partial_trace(self, keep: Sequence[int]) -> "DensityOperator":
        """Trace out everything except the subsystems in ``keep`` (order kept)."""
        keep = list(keep)
        n = len(self.dims)
        if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
            raise ValueError(f"bad keep set {keep} for {n} subsystems")
        drop = [i for i in range(n) if i not in keep]
        t = self._as_tensor()
        # trace out dropped indices one at a time, highest first so the
        # remaining positions stay valid
        for i in sorted(drop, reverse=True):
            t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
        kept_sorted = [i for i in range(n) if i in keep]
        new_dims = tuple(self.dims[i] for i in kept_sorted)
        d = int(np.prod(new_dims)) if new_dims else 1
        rho = DensityOperator(t.reshape(d, d), new_dims or (1,), validate=False)
        if kept_sorted != keep:
            rho = rho.permute([kept_sorted.index(k) for k in keep])
        return rho

    def eigvals(self) -> np.ndarray:
        return psd_eigvals(self.mat)


def product_state(*states: DensityOperator) -> DensityOperator:
    mat = tensor(*[s.mat for s in states])
    dims = tuple(d for s in states for d in s.dims)
    return DensityOperator(mat, dims, validate=False)


def pure_state(vec: np.ndarray, dims: Sequence[int] | int) -> DensityOperator:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return DensityOperator(np.outer(v, v.conj()), dims, validate=False)


def basis_state(index: int, dim: int) -> DensityOperator:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return pure_state(v, dim)


def maximally_entangled(d: int) -> DensityOperator:
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0 / math.sqrt(d)
    return pure_state(v, (d, d))


def classical_state(p: Sequence[float]) -> DensityOperator:
    p = np.asarray(p, dtype=float)
    return DensityOperator(np.diag(p).astype(complex), len(p), validate=False)


def cq_state(probs: Sequence[float], states: Sequence[DensityOperator]) -> DensityOperator:
    """Classical-quantum state sum_x p(x) |x><x| (x) rho_x."""
    if len(probs) != len(states):
        raise ValueError("probs and states length mismatch")
    dims_q = states[0].dims
    dq = states[0].dim
    m = len(probs)
    out = np.zeros((m * dq, m * dq), dtype=complex)
    for x, (p, rho) in enumerate(zip(probs, states)):
        if rho.dims != dims_q:
            raise ValueError("all conditional states must share dims")
        out[x * dq:(x + 1) * dq, x * dq:(x + 1) * dq] = p * rho.mat
    return DensityOperator(out, (m,) + dims_q, validate=False)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def fidelity(rho: DensityOperator | np.ndarray,
             sigma: DensityOperator | np.ndarray) -> float:
    """Generalized root fidelity of two subnormalized density operators.

    ``F = || sqrt(rho) sqrt(sigma) ||_1 + sqrt((1 - tr rho)(1 - tr sigma))``;
    for normalized inputs the second term vanishes.
    """
    r = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    s = sigma.mat if isinstance(sigma, DensityOperator) else np.asarray(sigma, dtype=complex)
    root = trace_norm(psd_sqrt(r) @ psd_sqrt(s))
    tr, ts = float(np.real(np.trace(r))), float(np.real(np.trace(s)))
    slack = max(0.0, 1.0 - tr) * max(0.0, 1.0 - ts)
    return root + math.sqrt(slack)


def purified_distance(rho: DensityOperator | np.ndarray,
                      sigma: DensityOperator | np.ndarray) -> float:
    f = min(1.0, fidelity(rho, sigma))
    return math.sqrt(max(0.0, 1.0 - f * f))


def trace_distance(rho: DensityOperator | np.ndarray,
                   sigma: DensityOperator | np.ndarray) -> float:
    r = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho)
    s = sigma.mat if isinstance(sigma, DensityOperator) else np.asarray(sigma)
    return 0.5 * trace_norm(r - s)


# ---------------------------------------------------------------------------
# entropies (von Neumann family)
# ---------------------------------------------------------------------------

def von_neumann_entropy(rho: DensityOperator | np.ndarray) -> float:
    mat = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho)
    vals = psd_eigvals(mat)
    out = 0.0
    for v in vals:
        if v > 0.0:
            out -= v * math.log2(v)
    return out


def conditional_entropy(rho: DensityOperator, a_sys: Sequence[int],
                        b_sys: Sequence[int]) -> float:
    """S(A|B) = S(AB) - S(B) for the listed subsystem index groups."""
    ab = rho.partial_trace(list(a_sys) + list(b_sys))
    b = rho.partial_trace(list(b_sys))
    return von_neumann_entropy(ab) - (von_neumann_entropy(b) if b_sys else 0.0)


def mutual_information(rho: DensityOperator, a_sys: Sequence[int],
                       b_sys: Sequence[int]) -> float:
    a = rho.partial_trace(list(a_sys))
    b = rho.partial_trace(list(b_sys))
    ab = rho.partial_trace(list(a_sys) + list(b_sys))
    return (von_neumann_entropy(a) + von_neumann_entropy(b)
            - von_neumann_entropy(ab))


def conditional_mutual_information(rho: DensityOperator, a_sys: Sequence[int],
                                   b_sys: Sequence[int],
                                   c_sys: Sequence[int]) -> float:
    """I(A:B|C) = S(AC) + S(BC) - S(C) - S(ABC); empty C gives I(A:B)."""
    if not c_sys:
        return mutual_information(rho, a_sys, b_sys)
    sac = von_neumann_entropy(rho.partial_trace(list(a_sys) + list(c_sys)))
    sbc = von_neumann_entropy(rho.partial_trace(list(b_sys) + list(c_sys)))
    sc = von_neumann_entropy(rho.partial_trace(list(c_sys)))
    sabc = von_neumann_entropy(rho.partial_trace(list(a_sys) + list(b_sys) + list(c_sys)))
    return sac + sbc - sc - sabc


# ---------------------------------------------------------------------------
# purification and channels
# ---------------------------------------------------------------------------

def purify(rho: DensityOperator, rank_cutoff: float = 1e-12) -> DensityOperator:
    """Purify onto a fresh final subsystem of dimension rank(rho).

    Returns the pure state on dims ``rho.dims + (rank,)``.
    """
    vals, vecs = np.linalg.eigh(herm_clip(rho.mat))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    if vals.size and np.min(vals) < -PSD_CLIP:
        raise ValidationError("cannot purify: matrix not PSD")
    keep = [i for i, v in enumerate(vals) if v > rank_cutoff]
    r = max(1, len(keep))
    d = rho.dim
    vec = np.zeros(d * r, dtype=complex)
    for k in range(min(r, len(keep))):
        i = keep[k]
        lam = math.sqrt(max(0.0, vals[i]))
        # |psi> = sum_i sqrt(lam_i) |e_i>_AB |k>_C
        vec += lam * np.kron(vecs[:, i], _unit(r, k))
    return pure_state(vec, rho.dims + (r,))


def _unit(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[k] = 1.0
    return v


@dataclass
class Isometry:
    """V : C^{d_in} -> C^{d_out} with V^dag V = 1, d_out = prod(out_dims)."""

    mat: np.ndarray
    out_dims: tuple[int, ...]

    def __init__(self, mat: np.ndarray, out_dims: Sequence[int]):
        mat = np.asarray(mat, dtype=complex)
        out_dims = tuple(int(d) for d in out_dims)
        if mat.shape[0] != int(np.prod(out_dims)):
            raise ValidationError("isometry row count does not match out_dims")
        g = dagger(mat) @ mat
        if np.max(np.abs(g - np.eye(mat.shape[1]))) > 1e-7:
            raise ValidationError("matrix is not an isometry")
        self.mat = mat
        self.out_dims = out_dims

    @property
    def dim_in(self) -> int:
        return self.mat.shape[1]

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.dim != self.dim_in:
            raise ValueError("dimension mismatch")
        return DensityOperator(self.mat @ rho.mat @ dagger(self.mat),
                               self.out_dims, validate=False)


@dataclass
class QuantumChannel:
    """A cptp map given by Kraus operators dim_out x dim_in."""

    kraus: list[np.ndarray]
    dim_in: int
    dim_out: int

    def __init__(self, kraus: Iterable[np.ndarray], tol: float = 1e-7):
        kraus = [np.asarray(k, dtype=complex) for k in kraus]
        if not kraus:
            raise ValidationError("channel needs at least one Kraus operator")
        d_out, d_in = kraus[0].shape
        if any(k.shape != (d_out, d_in) for k in kraus):
            raise ValidationError("Kraus operators have inconsistent shapes")
        acc = sum(dagger(k) @ k for k in kraus)
        if np.max(np.abs(acc - np.eye(d_in))) > tol:
            raise ValidationError("Kraus operators are not trace preserving")
        self.kraus = kraus
        self.dim_in = d_in
        self.dim_out = d_out

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        return sum(k @ mat @ dagger(k) for k in self.kraus)

    def __call__(self, rho: DensityOperator) -> DensityOperator:
        if rho.dim != self.dim_in:
            raise ValueError("dimension mismatch")
        return DensityOperator(self.apply_matrix(rho.mat), (self.dim_out,),
                               validate=False)

    def choi(self) -> np.ndarray:
        """Choi matrix J = (id (x) N)(Gamma), input factor first.

        J is indexed by (i, e), (j, e') with
        J[(i,e),(j,e')] = <e| N(|i><j|) |e'> and satisfies tr_out J = 1_in,
        N(rho) = tr_in[ J (rho^T (x) 1_out) ].
        """
        d_in, d_out = self.dim_in, self.dim_out
        j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
        for k in self.kraus:
            # vec with input index major: w[(i, e)] = K[e, i]
            w = k.T.reshape(-1)
            j += np.outer(w, w.conj())
        return j

    def stinespring(self) -> Isometry:
        """Dilation V : in -> out (x) env with env dimension = #Kraus."""
        r = len(self.kraus)
        v = np.zeros((self.dim_out * r, self.dim_in), dtype=complex)
        for k_idx, k in enumerate(self.kraus):
            for e in range(self.dim_out):
                v[e * r + k_idx, :] = k[e, :]
        return Isometry(v, (self.dim_out, r))


def channel_from_choi(j: np.ndarray, d_in: int, d_out: int,
                      eig_cutoff: float = 1e-10) -> QuantumChannel:
    """Recover Kraus operators from a Choi matrix (eigenvalues <= cutoff dropped)."""
    j = herm_clip(np.asarray(j, dtype=complex))
    vals, vecs = np.linalg.eigh(j)
    kraus = []
    for i in range(len(vals)):
        if vals[i] > eig_cutoff:
            w = math.sqrt(vals[i]) * vecs[:, i]
            kraus.append(w.reshape(d_in, d_out).T)
    return QuantumChannel(kraus)


def apply_channel(rho: DensityOperator, channel: QuantumChannel,
                  target: int) -> DensityOperator:
    """Apply a channel to one subsystem, identity on the rest."""
    n = len(rho.dims)
    if target < 0 or target >= n:
        raise ValueError("bad target subsystem")
    if rho.dims[target] != channel.dim_in:
        raise ValueError("channel input dim does not match target subsystem")
    # move target to front, act blockwise, move back
    order = [target] + [i for i in range(n) if i != target]
    front = rho.permute(order)
    d_rest = front.dim // channel.dim_in
    out = np.zeros((channel.dim_out * d_rest, channel.dim_out * d_rest),
                   dtype=complex)
    for k in channel.kraus:
        big_k = np.kron(k, np.eye(d_rest))
        out += big_k @ front.mat @ dagger(big_k)
    new_dims = (channel.dim_out,) + front.dims[1:]
    res = DensityOperator(out, new_dims, validate=False)
    inv = [order.index(i) for i in range(n)]
    return res.permute(inv)


def apply_isometry(rho: DensityOperator, iso: Isometry,
                   target: int) -> DensityOperator:
    """Apply an isometry to one subsystem; its output factors replace it in place."""
    n = len(rho.dims)
    if rho.dims[target] != iso.dim_in:
        raise ValueError("isometry input dim does not match target subsystem")
    order = [target] + [i for i in range(n) if i != target]
    front = rho.permute(order)
    d_rest = front.dim // iso.dim_in
    big_v = np.kron(iso.mat, np.eye(d_rest))
    out = big_v @ front.mat @ dagger(big_v)
    new_dims = iso.out_dims + front.dims[1:]
    res = DensityOperator(out, new_dims, validate=False)
    # move the new factors back to the target position
    k = len(iso.out_dims)
    rest_positions = list(range(k, k + n - 1))  # current slots of other systems
    final = []
    for i in range(n):
        if i == target:
            final.extend(range(k))
        else:
            j = order.index(i) - 1  # position among the "rest"
            final.append(rest_positions[j])
    return res.permute(final)


# ---------------------------------------------------------------------------
# seeded random ensembles
# ---------------------------------------------------------------------------

def random_pure(dim: int, rng: np.random.Generator) -> DensityOperator:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return pure_state(v, dim)


def random_density(dims: Sequence[int] | int, rng: np.random.Generator,
                   rank: int | None = None) -> DensityOperator:
    """Haar-induced random state: trace an environment off a random pure state."""
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),)
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    r = d if rank is None else int(rank)
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    mat = g @ dagger(g)
    mat /= np.real(np.trace(mat))
    return DensityOperator(mat, dims, validate=False)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d_in: int, d_out: int, kraus_count: int,
                   rng: np.random.Generator) -> QuantumChannel:
    """Random cptp map from the first block column of a Haar unitary."""
    big = random_unitary(d_out * kraus_count, rng)[:, :d_in] if d_out * kraus_count >= d_in \
        else None
    if big is None:
        raise ValueError("need d_out * kraus_count >= d_in")
    kraus = [big[k * d_out:(k + 1) * d_out, :] for k in range(kraus_count)]
    # note big is an isometry column block, so sum K^dag K = 1 automatically
    return QuantumChannel(kraus)
