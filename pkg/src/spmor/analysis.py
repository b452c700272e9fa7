"""Moments, moment-matching reports, frequency sweeps and error metrics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import csv
import io

import numpy as np

from .densela import lu_factor, max_norm
from .errors import GridMismatch, PoleOrSingular, SingularMatrix
from .linearize import linearize
from .systems import FirstOrderSystem

EPS_GUARD = 1e-300
MATCH_TOL = 1e-8
DOUBLED_MATCH_TOL = 1e-6
PSD_SHIFT = 1e-10


def _first_order(model):
    from .reduce import ReducedModel

    if isinstance(model, ReducedModel):
        return model.system
    if isinstance(model, FirstOrderSystem):
        return model
    return linearize(model)[0]


@dataclass(frozen=True)
class MomentTable:
    """``mu_i = L M^i R``, so that ``H(s) = sum (-1)^i mu_i (s - s0)^i``."""

    s0: complex
    entries: tuple

    @property
    def k(self):
        return len(self.entries)

    def series(self, s):
        """Truncated expansion evaluated at `s`."""
        if not self.entries:
            raise ValueError("empty moment table")
        d = s - self.s0
        return sum((-d) ** i * mu for i, mu in enumerate(self.entries))

    def to_dict(self):
        from .serialize import matrix_to_json

        return {
            "s0": [float(np.real(self.s0)), float(np.imag(self.s0))],
            "k": self.k,
            "convention": "H(s) = sum_i (-1)^i mu_i (s - s0)^i",
            "moments": [matrix_to_json(mu) for mu in self.entries],
        }


def compute_moments(sys, s0, k):
    """Moments by repeated solves with one factorization of ``s0 E - A``.

    ``w_0 = (s0 E - A)^{-1} B``, ``w_i = (s0 E - A)^{-1} E w_{i-1}``,
    ``mu_i = L w_i``; D is added to ``mu_0``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    fo = _first_order(sys)
    try:
        lu = lu_factor(fo.pencil(s0))
    except SingularMatrix as exc:
        raise PoleOrSingular(f"s0 = {s0} is a pole: {exc}") from None
    entries = []
    w = None
    for i in range(k):
        w = lu.solve(fo.B) if i == 0 else lu.solve(fo.E @ w)
        mu = fo.L @ w
        if i == 0 and np.any(fo.D != 0):
            mu = mu + fo.D
        entries.append(mu)
    return MomentTable(s0, tuple(entries))


@dataclass(frozen=True)
class MatchReport:
    matched_count: int
    errors: tuple
    j: int
    hermitian: bool
    s0_real: bool
    method: str
    tol: float

    @property
    def k(self):
        return len(self.errors)

    @property
    def expected_bound(self):
        if self.hermitian and self.s0_real and self.method in ("sprim", "higher_order"):
            return 2 * self.j
        return self.j

    @property
    def meets_bound(self):
        return self.matched_count >= min(self.expected_bound, self.k)

    def to_dict(self):
        return {
            "method": self.method,
            "matched_count": self.matched_count,
            "k": self.k,
            "tol": self.tol,
            "errors": list(self.errors),
            "j": self.j,
            "hermitian": self.hermitian,
            "s0_real": self.s0_real,
            "expected_bound": self.expected_bound,
            "meets_bound": self.meets_bound,
        }


def moment_errors(full, reduced):
    """Relative Frobenius error per moment index."""
    out = []
    for a, b in zip(full.entries, reduced.entries):
        den = max(np.linalg.norm(a), EPS_GUARD)
        out.append(float(np.linalg.norm(a - b) / den))
    return tuple(out)


def match_report(full, reduced, s0, k, tol=MATCH_TOL):
    """Compare the first `k` moments of `full` and a ReducedModel about `s0`."""
    errs = moment_errors(compute_moments(full, s0, k), compute_moments(reduced.system, s0, k))
    matched = 0
    for e in errs:
        if not e < tol:
            break
        matched += 1
    return MatchReport(
        matched_count=matched,
        errors=errs,
        j=reduced.j,
        hermitian=bool(reduced.hermitian_source),
        s0_real=bool(np.imag(s0) == 0),
        method=reduced.kind,
        tol=tol,
    )


def projected_output_identity(full, reduced, i_max=None):
    """Max-norm defects of ``L M^i V = L_n M_n^i`` for ``i = 0..i_max``.

    `i_max` defaults to ``reduced.j``. Returns a tuple of defects.
    """
    fo, red = _first_order(full), reduced.system
    s0 = reduced.s0
    i_max = reduced.j if i_max is None else i_max
    lu = lu_factor(fo.pencil(s0))
    lun = lu_factor(red.pencil(s0))
    left = fo.L @ reduced.V
    right = red.L
    out = [max_norm(left - right)]
    X, Xn = reduced.V, np.eye(red.N1)
    for _ in range(i_max):
        X = lu.solve(fo.E @ X)
        Xn = lun.solve(red.E @ Xn)
        out.append(max_norm(fo.L @ X - red.L @ Xn))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """Samples of ``H(2 pi i f)``; failed points hold NaN and are listed."""

    f: np.ndarray
    H: np.ndarray
    failed: tuple = ()
    provenance: dict = field(default_factory=dict)

    @property
    def s(self):
        return 2j * np.pi * self.f

    def to_csv(self, entries=None):
        """CSV text; `entries` is a list of 1-based ``(i, j)`` pairs (default all)."""
        p, m = self.H.shape[1:]
        if entries is None:
            entries = [(i + 1, j + 1) for i in range(p) for j in range(m)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["f_hz"]
        for i, j in entries:
            if not (1 <= i <= p and 1 <= j <= m):
                raise ValueError(f"entry ({i}, {j}) outside a {p}x{m} response")
            header += [f"re(H_{i}_{j})", f"im(H_{i}_{j})", f"abs(H_{i}_{j})"]
        w.writerow(header)
        for f, Hk in zip(self.f, self.H):
            row = [repr(float(f))]
            for i, j in entries:
                h = Hk[i - 1, j - 1]
                row += [repr(float(h.real)), repr(float(h.imag)), repr(float(abs(h)))]
            w.writerow(row)
        return buf.getvalue()


def frequency_grid(f_min, f_max, points, scale="log"):
    if points < 2:
        raise ValueError("points must be >= 2")
    if not f_max > f_min:
        raise ValueError("f_max must exceed f_min")
    if scale == "log":
        if f_min <= 0:
            raise ValueError("log grid needs f_min > 0")
        return np.logspace(np.log10(f_min), np.log10(f_max), points)
    if scale == "linear":
        return np.linspace(f_min, f_max, points)
    raise ValueError(f"scale must be 'log' or 'linear', got {scale!r}")


def sweep(model, f_min, f_max, points, scale="log", workers=None, provenance=None):
    """Evaluate ``H(2 pi i f)`` on a log or linear grid.

    Points are independent; `workers > 1` evaluates them on a thread pool.
    A point where the pencil is singular is recorded in ``failed`` with NaN
    entries instead of aborting the sweep.
    """
    f = frequency_grid(f_min, f_max, points, scale)
    return sweep_points(model, f, workers, provenance)


def sweep_points(model, f, workers=None, provenance=None):
    f = np.asarray(f, dtype=float)
    if np.any(np.diff(f) <= 0):
        raise ValueError("frequencies must be strictly increasing")

    def point(fk):
        try:
            return model.transfer(2j * np.pi * fk)
        except SingularMatrix:
            return None

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(point, f))
    else:
        vals = [point(fk) for fk in f]
    shape = next((v.shape for v in vals if v is not None), None)
    if shape is None:
        fo = _first_order(model)
        shape = (fo.p, fo.m)
    H = np.full((len(f),) + shape, np.nan + 0j)
    failed = []
    for k, v in enumerate(vals):
        if v is None:
            failed.append(k)
        else:
            H[k] = v
    return FrequencyResponse(f, H, tuple(failed), dict(provenance or {}))


@dataclass(frozen=True)
class ErrorSummary:
    per_point: tuple
    max: float
    mean: float
    failed: tuple = ()

    def to_dict(self):
        return {"max": self.max, "mean": self.mean, "failed": list(self.failed)}


def sweep_error(a, b):
    """Pointwise ``||H_a - H_b||_F / ||H_a||_F`` with `a` as the reference.

    Points that failed in either response are excluded from max and mean.
    """
    if a.f.shape != b.f.shape or not np.array_equal(a.f, b.f):
        raise GridMismatch("frequency grids differ")
    if a.H.shape != b.H.shape:
        raise GridMismatch(f"response shapes differ: {a.H.shape[1:]} vs {b.H.shape[1:]}")
    errs = []
    for Ha, Hb in zip(a.H, b.H):
        den = max(np.linalg.norm(Ha), EPS_GUARD)
        errs.append(float(np.linalg.norm(Ha - Hb) / den))
    errs = np.array(errs)
    failed = tuple(sorted(set(a.failed) | set(b.failed)))
    good = np.isfinite(errs)
    if not good.any():
        return ErrorSummary(tuple(errs), float("nan"), float("nan"), failed)
    return ErrorSummary(tuple(errs), float(errs[good].max()), float(errs[good].mean()), failed)


@dataclass(frozen=True)
class PassivityReport:
    points: tuple
    failures: tuple

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "samples": len(self.points),
            "failures": [[float(np.real(s)), float(np.imag(s))] for s in self.failures],
        }


def passivity_sample(sys, points):
    """Shifted-Cholesky test of ``H(s) + H(s)^H >= 0`` at each right-half-plane `s`."""
    failures = []
    for s in points:
        if not np.real(s) > 0:
            raise ValueError(f"sample {s} is not in the open right half-plane")
        try:
            H = sys.transfer(s)
        except SingularMatrix:
            failures.append(s)
            continue
        M = H + H.conj().T
        shift = PSD_SHIFT * max(np.linalg.norm(H, 2), EPS_GUARD)
        try:
            np.linalg.cholesky(M + shift * np.eye(M.shape[0]))
        except np.linalg.LinAlgError:
            failures.append(s)
    return PassivityReport(tuple(points), tuple(failures))
