"""Dense interior-point solver for small complex Hermitian semidefinite programs.

Primal standard form over Hermitian PSD blocks X = (X_1, ..., X_k):

    minimize    sum_j <C_j, X_j>
    subject to  sum_j <A_ij, X_j> = b_i   (i = 1..m),   X_j >= 0,

with <A, B> = tr(A B) (real for Hermitian pairs).  The dual is

    maximize    b^T y
    subject to  sum_i y_i A_ij + S_j = C_j,   S_j >= 0.

Complex data is embedded into real symmetric matrices of doubled size via
M -> [[Re M, -Im M], [Im M, Re M]], solved by a homogeneous self-dual
Mehrotra predictor-corrector method with Nesterov-Todd scaling, and the
complex solution is read back off the invariant subspace.  Infeasibility is
reported through Farkas-type certificates extracted from the homogeneous
iterate.  Everything is dense and deterministic: fixed starting point, fixed
iteration schedule, no randomization.

An LMI layer (`LmiBuilder`) converts problems of the form

    minimize c^T y  subject to  F_0 + sum_k y_k F_k >= 0  (blockwise)

into the standard form above (A_k = -F_k, b_k = -c_k), which is how the
smooth-entropy, fidelity and decoder programs elsewhere in this package are
phrased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp


class SdpError(ValueError):
    """Malformed problem data (non-Hermitian matrices, bad dimensions...)."""


class SdpStatus(Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class SdpTolerances:
    """Stopping tolerances for the interior-point loop."""

    gap: float = 1e-8          # relative duality gap
    feas: float = 1e-8         # relative primal/dual residuals
    max_iter: int = 200
    cert: float = 1e-9         # quality required of an infeasibility certificate


def _herm_violation(m) -> float:
    if sp.issparse(m):
        d = m - m.conj().T
        return 0.0 if d.nnz == 0 else float(np.max(np.abs(d.data)))
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


class SdpProblem:
    """Primal-standard-form SDP with complex Hermitian blocks.

    block_dims lists one PSD block dimension per variable block; the
    objective is given per block, and each equality constraint is a mapping
    from block index to a Hermitian matrix (blocks omitted from the mapping
    count as zero) together with a real right-hand side.
    """

    def __init__(self, block_dims: Sequence[int],
                 c_blocks: Sequence[np.ndarray] | None = None):
        self.block_dims = [int(d) for d in block_dims]
        if any(d <= 0 for d in self.block_dims):
            raise SdpError("block dimensions must be positive")
        if c_blocks is None:
            c_blocks = [np.zeros((d, d), dtype=complex) for d in self.block_dims]
        self.c_blocks = [np.asarray(c.toarray() if sp.issparse(c) else c,
                                    dtype=complex) for c in c_blocks]
        if len(self.c_blocks) != len(self.block_dims):
            raise SdpError("one objective block per variable block required")
        for d, c in zip(self.block_dims, self.c_blocks):
            if c.shape != (d, d):
                raise SdpError("objective block shape mismatch")
            if _herm_violation(c) > 1e-8:
                raise SdpError("objective block is not Hermitian")
        self._rows: list[tuple[dict[int, object], float]] = []

    @property
    def num_constraints(self) -> int:
        return len(self._rows)

    def add_constraint(self, blocks: dict[int, object], rhs: float) -> None:
        """Add  sum_j <blocks[j], X_j> = rhs  (matrices dense or sparse)."""
        if not blocks:
            raise SdpError("constraint touches no block")
        clean: dict[int, object] = {}
        for j, mat in blocks.items():
            j = int(j)
            if j < 0 or j >= len(self.block_dims):
                raise SdpError(f"constraint references unknown block {j}")
            d = self.block_dims[j]
            if not sp.issparse(mat):
                mat = np.asarray(mat, dtype=complex)
            if mat.shape != (d, d):
                raise SdpError("constraint block shape mismatch")
            if _herm_violation(mat) > 1e-8:
                raise SdpError("constraint block is not Hermitian")
            clean[j] = mat
        norm = max((float(abs(m).max()) if not sp.issparse(m)
                    else (float(np.max(np.abs(m.data))) if m.nnz else 0.0))
                   for m in clean.values())
        if norm == 0.0:
            raise SdpError("constraint matrix is identically zero")
        rhs = complex(rhs)
        if abs(rhs.imag) > 1e-10:
            raise SdpError("right-hand side must be real")
        self._rows.append((clean, float(rhs.real)))

    # -- real symmetric embedding ------------------------------------------
    def compile(self) -> "_RealConic":
        if not self._rows:
            raise SdpError("problem has no constraints")
        dims = [2 * d for d in self.block_dims]
        offs = np.concatenate([[0], np.cumsum([d * d for d in dims])])
        total = int(offs[-1])
        m = len(self._rows)

        c_vec = np.zeros(total)
        for j, cb in enumerate(self.c_blocks):
            c_vec[offs[j]:offs[j + 1]] = _embed(cb).reshape(-1)

        rows_acc: list[np.ndarray] = []
        cols_acc: list[np.ndarray] = []
        vals_acc: list[np.ndarray] = []
        b = np.zeros(m)
        for i, (blocks, rhs) in enumerate(self._rows):
            b[i] = 2.0 * rhs
            for j, mat in blocks.items():
                coo = sp.coo_matrix(mat) if not sp.issparse(mat) else mat.tocoo()
                d = self.block_dims[j]
                r, cc, v = coo.row, coo.col, coo.data
                # [[Re, -Im], [Im, Re]] written into the flat vector
                er = np.concatenate([r, r + d, r, r + d])
                ec = np.concatenate([cc, cc + d, cc + d, cc])
                ev = np.concatenate([v.real, v.real, -v.imag, v.imag])
                keep = ev != 0.0
                rows_acc.append(np.full(keep.sum(), i))
                cols_acc.append(offs[j] + er[keep] * (2 * d) + ec[keep])
                vals_acc.append(ev[keep])
        arows = np.concatenate(rows_acc) if rows_acc else np.zeros(0, int)
        acols = np.concatenate(cols_acc) if cols_acc else np.zeros(0, int)
        avals = np.concatenate(vals_acc) if vals_acc else np.zeros(0)
        a = sp.coo_matrix((avals, (arows, acols)), shape=(m, total)).tocsr()
        return _RealConic(dims, list(offs), c_vec, a, b)


def _embed(mat: np.ndarray) -> np.ndarray:
    """Complex Hermitian -> real symmetric of doubled size."""
    re, im = mat.real, mat.imag
    return np.block([[re, -im], [im, re]])


def _extract(mat_r: np.ndarray) -> np.ndarray:
    """Read a complex Hermitian matrix back off its doubled real embedding."""
    n = mat_r.shape[0] // 2
    re = 0.5 * (mat_r[:n, :n] + mat_r[n:, n:])
    im = 0.5 * (mat_r[n:, :n] - mat_r[:n, n:])
    out = re + 1j * im
    return 0.5 * (out + out.conj().T)


@dataclass
class SdpSolution:
    status: SdpStatus
    primal_value: float | None = None
    dual_value: float | None = None
    gap: float | None = None
    iterations: int = 0
    primal_blocks: list[np.ndarray] | None = None
    dual_y: np.ndarray | None = None
    dual_slack_blocks: list[np.ndarray] | None = None
    primal_residual: float | None = None
    dual_residual: float | None = None
    min_eig_primal: float | None = None
    min_eig_slack: float | None = None
    certificate: dict | None = None
    message: str = ""


# ---------------------------------------------------------------------------
# real conic core
# ---------------------------------------------------------------------------

class _RealConic:
    """Compiled real symmetric problem plus per-block sparse views."""

    def __init__(self, dims, offs, c_vec, a, b):
        self.dims = dims
        self.offs = offs
        self.total = int(offs[-1])
        self.c_vec = c_vec
        self.A = a
        self.b = b
        self.m = len(b)
        # per-block column slices, active rows, and "tall" stacked forms used
        # by the Schur-complement assembly
        self.acol, self.act, self.atall = [], [], []
        for j, d in enumerate(dims):
            col = a[:, offs[j]:offs[j + 1]].tocsr()
            nnz_rows = np.flatnonzero(np.diff(col.indptr))
            self.act.append(nnz_rows)
            sub = col[nnz_rows].tocoo()
            self.acol.append(sp.csr_matrix((sub.data, (sub.row, sub.col)),
                                           shape=(len(nnz_rows), d * d)))
            tall = sp.coo_matrix(
                (sub.data, (sub.row * d + sub.col // d, sub.col % d)),
                shape=(len(nnz_rows) * d, d))
            self.atall.append(tall.tocsr())

    def vec(self, blocks: list[np.ndarray]) -> np.ndarray:
        return np.concatenate([bl.reshape(-1) for bl in blocks])

    def unvec(self, v: np.ndarray) -> list[np.ndarray]:
        return [v[self.offs[j]:self.offs[j + 1]].reshape(d, d)
                for j, d in enumerate(self.dims)]


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _eigh_floor(mat: np.ndarray):
    vals, vecs = np.linalg.eigh(mat)
    floor = max(1e-14 * float(vals[-1]), 1e-300) if vals[-1] > 0 else 1e-300
    return np.maximum(vals, floor), vecs


@dataclass
class _Scal:
    W: np.ndarray
    R: np.ndarray
    Ri: np.ndarray
    lam: np.ndarray
    lv: np.ndarray
    lQ: np.ndarray


def _nt_block(x: np.ndarray, s: np.ndarray) -> _Scal:
    sv, sq = _eigh_floor(s)
    s_half = (sq * np.sqrt(sv)) @ sq.T
    s_mh = (sq / np.sqrt(sv)) @ sq.T
    t = _sym(s_half @ x @ s_half)
    tv, tq = _eigh_floor(t)
    t_half = (tq * np.sqrt(tv)) @ tq.T
    w = _sym(s_mh @ t_half @ s_mh)
    wv, wq = _eigh_floor(w)
    r = (wq * np.sqrt(wv)) @ wq.T
    ri = (wq / np.sqrt(wv)) @ wq.T
    lam = _sym(0.5 * (ri @ x @ ri + r @ s @ r))
    lv, lq = _eigh_floor(lam)
    return _Scal(w, r, ri, lam, lv, lq)


def _lyap(scal: _Scal, t: np.ndarray) -> np.ndarray:
    """Solve lam o U = T (o = symmetrized product) in lam's eigenbasis."""
    tt = scal.lQ.T @ t @ scal.lQ
    u = 2.0 * tt / (scal.lv[:, None] + scal.lv[None, :])
    return scal.lQ @ u @ scal.lQ.T


def _alpha_psd(scal: _Scal, dt: np.ndarray) -> float:
    """Largest alpha with lam + alpha*dt >= 0 (dt in scaled space)."""
    a = scal.lQ.T @ dt @ scal.lQ
    rs = 1.0 / np.sqrt(scal.lv)
    emin = float(np.linalg.eigvalsh(_sym(a * rs[:, None] * rs[None, :]))[0])
    return math.inf if emin >= -1e-16 else 1.0 / (-emin)


_SCHUR_CHUNK = 3_000_000  # doubles per assembly chunk


def _schur(rc: _RealConic, scals: list[_Scal]) -> np.ndarray:
    m = rc.m
    big = np.zeros((m, m))
    for j, d in enumerate(rc.dims):
        act = rc.act[j]
        if len(act) == 0:
            continue
        w = scals[j].W
        rows_per = max(1, _SCHUR_CHUNK // (d * d))
        for c0 in range(0, len(act), rows_per):
            c1 = min(c0 + rows_per, len(act))
            nc = c1 - c0
            t1 = rc.atall[j][c0 * d:c1 * d] @ w           # stacked U_k W
            t2 = w @ t1.reshape(nc, d, d).transpose(1, 0, 2).reshape(d, nc * d)
            g = t2.reshape(d, nc, d).transpose(1, 0, 2).reshape(nc, d * d)
            contrib = rc.acol[j] @ g.T                     # (n_act, nc)
            big[np.ix_(act, act[c0:c1])] += contrib
    return _sym(big)


def _w_apply(rc: _RealConic, scals: list[_Scal], v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    for j, d in enumerate(rc.dims):
        sl = slice(rc.offs[j], rc.offs[j + 1])
        w = scals[j].W
        out[sl] = (w @ v[sl].reshape(d, d) @ w).reshape(-1)
    return out


def _make_solver(big: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    tr = float(np.trace(big)) / max(1, big.shape[0])
    for jitter in (0.0, 1e-13 * tr, 1e-10 * tr, 1e-7 * tr):
        try:
            cho = sla.cho_factor(big + jitter * np.eye(big.shape[0]),
                                 lower=True, check_finite=False)
            return lambda r: sla.cho_solve(cho, r, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        except sla.LinAlgError:  # pragma: no cover - scipy alias
            continue
    vals, vecs = np.linalg.eigh(big)
    inv = np.where(vals > 1e-14 * max(vals[-1], 1e-300), 1.0 / vals, 0.0)
    return lambda r: vecs @ (inv * (vecs.T @ r))


@dataclass
class _RawResult:
    status: SdpStatus
    x: list[np.ndarray]
    y: np.ndarray
    s: list[np.ndarray]
    tau: float
    kappa: float
    iterations: int
    message: str


def _ipm(rc: _RealConic, tol: SdpTolerances,
         descale: tuple | None = None) -> _RawResult:
    nb = len(rc.dims)
    nu = float(sum(rc.dims))
    xb = [np.eye(d) for d in rc.dims]
    sb = [np.eye(d) for d in rc.dims]
    y = np.zeros(rc.m)
    tau, kap = 1.0, 1.0
    c, b, a = rc.c_vec, rc.b, rc.A
    if descale is None:
        row_scale = np.ones(rc.m)
        scale_b = scale_c = 1.0
        normb = 1.0 + float(np.linalg.norm(b))
        normc = 1.0 + float(np.linalg.norm(c))
    else:
        # convergence is judged on the original (un-scaled) data magnitudes
        row_scale, scale_b, scale_c, normb, normc = descale
    status, msg = None, ""
    it = 0
    stall = 0
    rescues = 10

    def try_certificates(quality: float) -> SdpStatus | None:
        by = float(b @ y)
        if by > 1e-12:
            u = y / by
            z = rc.unvec(-(a.T @ u))
            scale = max(1.0, max(float(np.max(np.abs(zj))) for zj in z))
            emin = min(float(np.linalg.eigvalsh(_sym(zj))[0]) for zj in z)
            if emin >= -quality * scale:
                return SdpStatus.PRIMAL_INFEASIBLE
        x = rc.vec(xb)
        cx = float(c @ x)
        if cx < -1e-12:
            wv = x / (-cx)
            if float(np.max(np.abs(a @ wv))) <= quality * max(1.0, float(np.max(np.abs(wv)))):
                return SdpStatus.DUAL_INFEASIBLE
        return None

    for it in range(1, tol.max_iter + 1):
        x = rc.vec(xb)
        s = rc.vec(sb)
        mu = (float(x @ s) + tau * kap) / (nu + 1.0)

        # de-homogenized optimality test, in original data units
        if tau > 1e-10:
            obj = scale_b * scale_c
            pv = float(c @ x) / tau * obj
            dv = float(b @ y) / tau * obj
            pres = scale_b * float(np.linalg.norm(
                (a @ x / tau - b) * row_scale)) / normb
            dres = scale_c * float(np.linalg.norm(
                c - a.T @ y / tau - s / tau)) / normc
            gap = abs(pv - dv) / (1.0 + abs(pv) + abs(dv))
            if pres <= tol.feas and dres <= tol.feas and gap <= tol.gap:
                status, msg = SdpStatus.OPTIMAL, "converged"
                break

        cert = try_certificates(tol.cert)
        if cert is not None:
            status, msg = cert, "certificate found"
            break
        if tau < 1e-12 * max(1.0, kap) or mu < 1e-18:
            break

        # Nesterov-Todd scaling and Schur factorization
        scals = [_nt_block(xb[j], sb[j]) for j in range(nb)]
        big = _schur(rc, scals)
        solver = _make_solver(big)
        wc = _w_apply(rc, scals, c)
        awc = a @ wc
        cwc = float(c @ wc)
        u1 = solver(awc + b)
        bmawc = b - awc
        den = float(bmawc @ u1) + cwc + kap / tau

        def directions(rhs_p, rhs_d, rhs_g, rhs_tk, us):
            lt = rc.vec([scals[j].R @ us[j] @ scals[j].R for j in range(nb)])
            wrd = _w_apply(rc, scals, rhs_d)
            rhs1 = rhs_p - a @ lt - a @ wrd
            rhs2 = rhs_g + float(c @ lt) + float(wc @ rhs_d) + rhs_tk / tau
            u2 = solver(rhs1)
            dtau = (rhs2 - float(bmawc @ u2)) / den if abs(den) > 1e-300 else 0.0
            dy = u2 + dtau * u1
            ds = -(a.T @ dy) + c * dtau - rhs_d
            dx = lt - _w_apply(rc, scals, ds)
            dkap = (rhs_tk - kap * dtau) / tau
            return dx, dy, ds, dtau, dkap

        rp = a @ x - b * tau
        rd = -(a.T @ y) + c * tau - s
        rg = float(b @ y) - float(c @ x) - kap

        # affine (predictor) direction
        us_aff = [-scals[j].lam for j in range(nb)]
        dxa, dya, dsa, dta, dka = directions(-rp, -rd, -rg, -tau * kap, us_aff)
        dxa_b, dsa_b = rc.unvec(dxa), rc.unvec(dsa)
        dxt_a = [_sym(scals[j].Ri @ dxa_b[j] @ scals[j].Ri) for j in range(nb)]
        dst_a = [_sym(scals[j].R @ dsa_b[j] @ scals[j].R) for j in range(nb)]
        alpha = 1.0
        for j in range(nb):
            alpha = min(alpha, _alpha_psd(scals[j], dxt_a[j]))
            alpha = min(alpha, _alpha_psd(scals[j], dst_a[j]))
        if dta < 0:
            alpha = min(alpha, -tau / dta)
        if dka < 0:
            alpha = min(alpha, -kap / dka)
        alpha_aff = min(1.0, 0.98 * alpha) if alpha != math.inf else 1.0

        mu_aff = ((float((x + alpha_aff * dxa) @ (s + alpha_aff * dsa))
                   + (tau + alpha_aff * dta) * (kap + alpha_aff * dka))
                  / (nu + 1.0))
        sigma = min(1.0, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))

        # combined (corrector) direction
        us = []
        for j in range(nb):
            cross = _sym(dxt_a[j] @ dst_a[j])
            t = sigma * mu * np.eye(rc.dims[j]) - scals[j].lam @ scals[j].lam \
                - cross
            us.append(_lyap(scals[j], _sym(t)))
        f = 1.0 - sigma
        dx, dy, ds, dta2, dka2 = directions(
            -f * rp, -f * rd, -f * rg,
            sigma * mu - tau * kap - dta * dka, us)
        dx_b, ds_b = rc.unvec(dx), rc.unvec(ds)
        alpha = 1.0 / 0.98
        for j in range(nb):
            dxt = _sym(scals[j].Ri @ dx_b[j] @ scals[j].Ri)
            dst = _sym(scals[j].R @ ds_b[j] @ scals[j].R)
            alpha = min(alpha, _alpha_psd(scals[j], dxt))
            alpha = min(alpha, _alpha_psd(scals[j], dst))
        if dta2 < 0:
            alpha = min(alpha, -tau / dta2)
        if dka2 < 0:
            alpha = min(alpha, -kap / dka2)
        step = min(1.0, 0.98 * alpha)

        if step < 1e-8 and rescues > 0:
            # corrector stalled: fall back to a damped pure-centering step
            # (unchanged residuals, target the central path at the current
            # mu), which usually restores step lengths on the next sweep
            rescues -= 1
            us_c = [_lyap(scals[j],
                          _sym(mu * np.eye(rc.dims[j])
                               - scals[j].lam @ scals[j].lam))
                    for j in range(nb)]
            dx, dy, ds, dta2, dka2 = directions(
                0.0 * rp, 0.0 * rd, 0.0, mu - tau * kap, us_c)
            dx_b, ds_b = rc.unvec(dx), rc.unvec(ds)
            alpha = 1.0 / 0.9
            for j in range(nb):
                dxt = _sym(scals[j].Ri @ dx_b[j] @ scals[j].Ri)
                dst = _sym(scals[j].R @ ds_b[j] @ scals[j].R)
                alpha = min(alpha, _alpha_psd(scals[j], dxt))
                alpha = min(alpha, _alpha_psd(scals[j], dst))
            if dta2 < 0:
                alpha = min(alpha, -tau / dta2)
            if dka2 < 0:
                alpha = min(alpha, -kap / dka2)
            step = min(1.0, 0.9 * alpha)

        if step < 1e-8:
            stall += 1
            if stall >= 3:
                msg = "step size collapsed"
                break
        else:
            stall = 0

        for j in range(nb):
            xb[j] = _sym(xb[j] + step * dx_b[j])
            sb[j] = _sym(sb[j] + step * ds_b[j])
        y = y + step * dy
        tau += step * dta2
        kap += step * dka2

    if status is None:
        cert = try_certificates(1e-7)
        if cert is not None:
            status, msg = cert, "certificate found after iteration limit"
        else:
            status = SdpStatus.NUMERICAL_FAILURE
            msg = msg or "iteration limit reached"
    return _RawResult(status, xb, y, sb, tau, kap, it, msg)


# ---------------------------------------------------------------------------
# public driver
# ---------------------------------------------------------------------------

def solve(problem: SdpProblem,
          tolerances: SdpTolerances | None = None) -> SdpSolution:
    """Solve a primal-standard-form Hermitian SDP.

    On status OPTIMAL the returned blocks satisfy the constraints and PSD
    conditions within the tolerances, re-verified here outside the solver
    loop; infeasible statuses carry an improving-ray certificate.
    """
    tol = tolerances or SdpTolerances()
    rc = problem.compile()

    # mild pre-scaling: per-row constraint norms, then global b/c norms
    row_scale = np.ones(rc.m)
    for i in range(rc.m):
        lo, hi = rc.A.indptr[i], rc.A.indptr[i + 1]
        nrm = float(np.linalg.norm(rc.A.data[lo:hi]))
        row_scale[i] = max(nrm, 1e-12)
    d_inv = sp.diags(1.0 / row_scale)
    a_s = (d_inv @ rc.A).tocsr()
    b_s = rc.b / row_scale
    sb = max(1.0, float(np.linalg.norm(b_s)))
    sc = max(1.0, float(np.linalg.norm(rc.c_vec)))
    rcs = _RealConic(rc.dims, rc.offs, rc.c_vec / sc, a_s, b_s / sb)

    normb = 1.0 + float(np.linalg.norm(rc.b))
    normc = 1.0 + float(np.linalg.norm(rc.c_vec))
    raw = _ipm(rcs, tol, descale=(row_scale, sb, sc, normb, normc))

    sol = SdpSolution(status=raw.status, iterations=raw.iterations,
                      message=raw.message)
    if raw.status is SdpStatus.OPTIMAL:
        tau = raw.tau
        xb = [sb * blk / tau for blk in raw.x]
        y = sc * (raw.y / row_scale) / tau
        slk = [sc * blk / tau for blk in raw.s]
        sol.primal_blocks = [_extract(blk) for blk in xb]
        sol.dual_y = y
        sol.dual_slack_blocks = [_extract(blk) for blk in slk]
        sol.primal_value = 0.5 * float(rc.c_vec @ rc.vec(xb))
        sol.dual_value = 0.5 * float(rc.b @ y)
        _verify(rc, sol, solver_slack=slk)
    elif raw.status is SdpStatus.PRIMAL_INFEASIBLE:
        y = sc * (raw.y / row_scale)
        byv = float(rc.b @ y) / 2.0
        y = y / byv if abs(byv) > 1e-300 else y
        zc = rc.unvec(-(rc.A.T @ y))
        sol.certificate = {
            "kind": "farkas_dual",
            "y": y,
            "slack_blocks": [_extract(zj) for zj in zc],
            "note": "sum_i y_i A_i <= 0 (approx) with b.y = 1",
        }
        sol.dual_y = y
    elif raw.status is SdpStatus.DUAL_INFEASIBLE:
        x = rc.vec(raw.x) * sb
        cx = 0.5 * float(rc.c_vec @ x)
        scale = -cx if cx < -1e-300 else 1.0
        blocks = [_extract(blk * sb / scale) for blk in raw.x]
        sol.certificate = {
            "kind": "improving_ray",
            "blocks": blocks,
            "note": "A(X) = 0 (approx), X >= 0, <C,X> = -1",
        }
        sol.primal_blocks = blocks
    return sol


def _verify(rc: _RealConic, sol: SdpSolution,
            solver_slack: list[np.ndarray]) -> None:
    """Recompute feasibility residuals and eigenvalue floors from scratch."""
    xb = sol.primal_blocks
    y = sol.dual_y
    x_r = rc.vec([_embed(blk) for blk in xb])
    res = rc.A @ x_r - rc.b
    sol.primal_residual = 0.5 * float(np.max(np.abs(res))) if rc.m else 0.0
    sol.min_eig_primal = min(
        float(np.linalg.eigvalsh(0.5 * (blk + blk.conj().T))[0])
        for blk in xb)
    # slack recomputed from y; residual = distance to the slack the solver kept
    s_r = rc.unvec(rc.c_vec - rc.A.T @ y)
    slack = [_extract(sj) for sj in s_r]
    sol.dual_residual = max(
        float(np.max(np.abs(chk - _extract(it_s))))
        for chk, it_s in zip(slack, solver_slack))
    sol.dual_slack_blocks = slack
    sol.min_eig_slack = min(
        float(np.linalg.eigvalsh(blk)[0]) for blk in slack)
    sol.gap = abs(sol.primal_value - sol.dual_value)


@dataclass
class FeasibilityResult:
    feasible: bool | None
    witness: list[np.ndarray] | None = None
    certificate: dict | None = None
    solution: SdpSolution | None = None


def check_feasibility(problem: SdpProblem,
                      tolerances: SdpTolerances | None = None) -> FeasibilityResult:
    """Decide feasibility of {X >= 0 : constraints} for a zero-objective problem."""
    for c in problem.c_blocks:
        if float(np.max(np.abs(c))) > 1e-12:
            raise SdpError("feasibility check requires a zero objective")
    sol = solve(problem, tolerances)
    if sol.status is SdpStatus.OPTIMAL:
        return FeasibilityResult(True, witness=sol.primal_blocks, solution=sol)
    if sol.status is SdpStatus.PRIMAL_INFEASIBLE:
        return FeasibilityResult(False, certificate=sol.certificate, solution=sol)
    return FeasibilityResult(None, solution=sol)


# ---------------------------------------------------------------------------
# LMI front end
# ---------------------------------------------------------------------------

@dataclass
class VarRef:
    name: str
    kind: str            # "real" | "herm" | "cplx"
    shape: tuple[int, ...]
    offset: int          # first parameter index
    nparams: int

    def param(self, *key) -> int:
        """Parameter index for ("diag", i) / ("re", i, j) / ("im", i, j)."""
        if self.kind == "real":
            return self.offset
        if self.kind == "herm":
            d = self.shape[0]
            tag = key[0]
            if tag == "diag":
                return self.offset + key[1]
            i, j = key[1], key[2]
            if not i < j:
                raise ValueError("off-diagonal parameters use i < j")
            pair = d + 2 * (i * d - i * (i + 1) // 2 + (j - i - 1))
            return self.offset + pair + (0 if tag == "re" else 1)
        r, c = self.shape
        tag, i, j = key
        return self.offset + 2 * (i * c + j) + (0 if tag == "re" else 1)

    def trace_real_coeffs(self) -> list[tuple[int, float]]:
        """Parameter indices and weights so that sum = Re tr(value)."""
        if self.kind == "real":
            return [(self.offset, 1.0)]
        if self.kind == "herm":
            return [(self.param("diag", i), 1.0) for i in range(self.shape[0])]
        r, c = self.shape
        return [(self.param("re", i, i), 1.0) for i in range(min(r, c))]


class LmiBuilder:
    """Assemble  min c^T y  s.t.  F_0 + sum_k y_k F_k >= 0  blockwise.

    Variables are real scalars, Hermitian matrices, or general complex
    matrices, each flattened into real parameters y_k.  Placements add the
    variable (or an arbitrary per-parameter matrix) into LMI blocks; the
    build step maps everything onto the primal-standard-form solver and the
    optimal y is read back from the dual multipliers.
    """

    def __init__(self):
        self.nparams = 0
        self.vars: dict[str, VarRef] = {}
        self.block_dims: list[int] = []
        self._f0: list[dict] = []       # per block: {(r,c): complex}
        self._terms: list[dict] = []    # per block: {param: {(r,c): complex}}
        self._obj: dict[int, float] = {}

    # -- variables ---------------------------------------------------------
    def real_var(self, name: str) -> VarRef:
        return self._new_var(name, "real", (), 1)

    def herm_var(self, name: str, d: int) -> VarRef:
        return self._new_var(name, "herm", (d, d), d * d)

    def cplx_var(self, name: str, rows: int, cols: int) -> VarRef:
        return self._new_var(name, "cplx", (rows, cols), 2 * rows * cols)

    def _new_var(self, name, kind, shape, nparams) -> VarRef:
        if name in self.vars:
            raise SdpError(f"duplicate variable {name}")
        ref = VarRef(name, kind, shape, self.nparams, nparams)
        self.vars[name] = ref
        self.nparams += nparams
        return ref

    # -- blocks and placements ---------------------------------------------
    def new_block(self, size: int) -> int:
        self.block_dims.append(int(size))
        self._f0.append({})
        self._terms.append({})
        return len(self.block_dims) - 1

    def _bump(self, blk: int, param: int, r: int, c: int, v: complex) -> None:
        if v == 0:
            return
        ent = self._terms[blk].setdefault(param, {})
        ent[(r, c)] = ent.get((r, c), 0.0) + v

    def add_const(self, blk: int, mat: np.ndarray, at: tuple[int, int] = (0, 0),
                  herm_pair: bool = False) -> None:
        """Add a constant matrix to F_0 (with its adjoint mirrored if asked)."""
        mat = np.asarray(mat, dtype=complex)
        r0, c0 = at
        f0 = self._f0[blk]
        for (i, j), v in np.ndenumerate(mat):
            if v != 0:
                f0[(r0 + i, c0 + j)] = f0.get((r0 + i, c0 + j), 0.0) + v
                if herm_pair:
                    f0[(c0 + j, r0 + i)] = f0.get((c0 + j, r0 + i), 0.0) \
                        + np.conj(v)

    def add_herm(self, blk: int, var: VarRef, at: int = 0,
                 coeff: float = 1.0) -> None:
        """Place coeff * (Hermitian variable) at diagonal offset `at`."""
        if var.kind != "herm":
            raise SdpError("add_herm needs a Hermitian variable")
        d = var.shape[0]
        for i in range(d):
            self._bump(blk, var.param("diag", i), at + i, at + i, coeff)
        for i in range(d):
            for j in range(i + 1, d):
                pre, pim = var.param("re", i, j), var.param("im", i, j)
                self._bump(blk, pre, at + i, at + j, coeff)
                self._bump(blk, pre, at + j, at + i, coeff)
                self._bump(blk, pim, at + i, at + j, coeff * 1j)
                self._bump(blk, pim, at + j, at + i, coeff * (-1j))

    def add_cplx(self, blk: int, var: VarRef, at: tuple[int, int],
                 coeff: float = 1.0) -> None:
        """Place coeff*X at `at` and coeff*X^dag mirrored across the diagonal."""
        if var.kind != "cplx":
            raise SdpError("add_cplx needs a complex matrix variable")
        r, c = var.shape
        r0, c0 = at
        for i in range(r):
            for j in range(c):
                pre, pim = var.param("re", i, j), var.param("im", i, j)
                self._bump(blk, pre, r0 + i, c0 + j, coeff)
                self._bump(blk, pre, c0 + j, r0 + i, coeff)
                self._bump(blk, pim, r0 + i, c0 + j, coeff * 1j)
                self._bump(blk, pim, c0 + j, r0 + i, coeff * (-1j))

    def add_scalar(self, blk: int, var: VarRef, mat: np.ndarray,
                   at: tuple[int, int] = (0, 0)) -> None:
        """Place (scalar variable) * mat, mat Hermitian about the offset."""
        if var.kind != "real":
            raise SdpError("add_scalar needs a real scalar variable")
        mat = np.asarray(mat, dtype=complex)
        r0, c0 = at
        for (i, j), v in np.ndenumerate(mat):
            self._bump(blk, var.offset, r0 + i, c0 + j, v)

    def add_param_term(self, blk: int, param: int, mat) -> None:
        """Raw placement: parameter contributes the given Hermitian matrix."""
        coo = sp.coo_matrix(mat)
        for i, j, v in zip(coo.row, coo.col, coo.data):
            self._bump(blk, param, int(i), int(j), complex(v))

    # -- objective and build -----------------------------------------------
    def minimize(self, coeffs: Sequence[tuple[int, float]]) -> None:
        for k, w in coeffs:
            self._obj[k] = self._obj.get(k, 0.0) + float(w)

    def build(self) -> "LmiProgram":
        prob = SdpProblem(self.block_dims,
                          [self._dict_to_mat(self._f0[b], self.block_dims[b])
                           for b in range(len(self.block_dims))])
        used = set()
        for b in range(len(self.block_dims)):
            used.update(self._terms[b].keys())
        if used != set(range(self.nparams)):
            missing = sorted(set(range(self.nparams)) - used)
            raise SdpError(f"parameters with no LMI contribution: {missing[:5]}")
        for k in range(self.nparams):
            blocks = {}
            for bidx in range(len(self.block_dims)):
                ent = self._terms[bidx].get(k)
                if ent:
                    blocks[bidx] = -self._dict_to_mat(ent, self.block_dims[bidx])
            prob.add_constraint(blocks, -self._obj.get(k, 0.0))
        return LmiProgram(self, prob)

    @staticmethod
    def _dict_to_mat(entries: dict, d: int):
        if not entries:
            return sp.coo_matrix((d, d), dtype=complex)
        rr = np.array([k[0] for k in entries], dtype=int)
        cc = np.array([k[1] for k in entries], dtype=int)
        vv = np.array(list(entries.values()), dtype=complex)
        return sp.coo_matrix((vv, (rr, cc)), shape=(d, d))


@dataclass
class LmiSolution:
    status: SdpStatus
    value: float | None
    y: np.ndarray | None
    vars: dict[str, object]
    sdp: SdpSolution

    @property
    def infeasible(self) -> bool:
        """No y makes all LMI blocks PSD."""
        return self.status is SdpStatus.DUAL_INFEASIBLE

    @property
    def unbounded(self) -> bool:
        return self.status is SdpStatus.PRIMAL_INFEASIBLE


class LmiProgram:
    def __init__(self, builder: LmiBuilder, problem: SdpProblem):
        self.builder = builder
        self.problem = problem

    def solve(self, tolerances: SdpTolerances | None = None) -> LmiSolution:
        sol = solve(self.problem, tolerances)
        if sol.status is not SdpStatus.OPTIMAL:
            return LmiSolution(sol.status, None, None, {}, sol)
        y = sol.dual_y
        out: dict[str, object] = {}
        for name, ref in self.builder.vars.items():
            out[name] = _var_value(ref, y)
        return LmiSolution(sol.status, -sol.dual_value, y, out, sol)


def _var_value(ref: VarRef, y: np.ndarray):
    if ref.kind == "real":
        return float(y[ref.offset])
    if ref.kind == "herm":
        d = ref.shape[0]
        m = np.zeros((d, d), dtype=complex)
        for i in range(d):
            m[i, i] = y[ref.param("diag", i)]
        for i in range(d):
            for j in range(i + 1, d):
                v = y[ref.param("re", i, j)] + 1j * y[ref.param("im", i, j)]
                m[i, j] = v
                m[j, i] = np.conj(v)
        return m
    r, c = ref.shape
    m = np.zeros((r, c), dtype=complex)
    for i in range(r):
        for j in range(c):
            m[i, j] = y[ref.param("re", i, j)] + 1j * y[ref.param("im", i, j)]
    return m
