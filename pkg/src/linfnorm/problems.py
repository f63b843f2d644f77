"""Problem ingestion from manifest + Matrix Market files, plus built-in
fixture generators."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DimensionMismatch, ParseError
from .structured import MatrixFactor, ScalarTerm, StructuredTF

#: environment variable pointing at optional external benchmark data
DATA_DIR_ENV = "LINFNORM_DATA_DIR"

#: problems at or below this order are stored dense
DENSE_CUTOFF = 200


def _load_matrix(path: Path):
    try:
        mat = scipy.io.mmread(os.fspath(path))
    except (ValueError, OSError) as err:
        raise ParseError(f"{path}: {err}") from err
    if sp.issparse(mat):
        if max(mat.shape) <= DENSE_CUTOFF:
            return np.asarray(mat.todense())
        return mat.tocsc()
    return np.asarray(mat)


def _load_factor(entries, base: Path, name: str, expected_shape):
    if not isinstance(entries, list) or not entries:
        raise ParseError(f"factor {name!r} must be a non-empty list of terms")
    terms = []
    for entry in entries:
        try:
            term = ScalarTerm(degree=int(entry.get("k", 0)),
                              delay=float(entry.get("tau", 0.0)))
            rel = entry["matrix"]
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError(f"bad term in factor {name!r}: {entry}") from err
        mat = _load_matrix(base / rel)
        if mat.shape != expected_shape:
            raise DimensionMismatch(
                f"{name}: matrix {rel} has shape {mat.shape}, "
                f"expected {expected_shape}")
        terms.append((term, mat))
    return MatrixFactor(terms)


def load_problem(manifest_path):
    """Builds a validated StructuredTF from a JSON manifest.

    The manifest lists, per factor, the scalar term (k, tau) and a Matrix
    Market file path relative to the manifest.  Returns (tf, config) where
    config is the manifest's optional default solver settings (a dict).
    """
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise ParseError(f"{manifest_path}:{err.lineno}: {err.msg}") from err
    except OSError as err:
        raise ParseError(str(err)) from err
    try:
        dims = doc["dimensions"]
        n, m, p = int(dims["n"]), int(dims["m"]), int(dims["p"])
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"{manifest_path}: missing or bad 'dimensions'") from err
    base = manifest_path.parent
    b = _load_factor(doc.get("B"), base, "B_factor", (n, m))
    c = _load_factor(doc.get("C"), base, "C_factor", (p, n))
    d = _load_factor(doc.get("D"), base, "D_factor", (n, n))
    tf = StructuredTF(c_factor=c, d_factor=d, b_factor=b)
    return tf, dict(doc.get("config", {}))


def delay_coupling_matrix(n: int):
    """The n-by-n matrix with ones on the sub/superdiagonal and in the
    (1,1) and (n,n) entries."""
    t = sp.diags([np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil")
    t[0, 0] = 1.0
    t[n - 1, n - 1] = 1.0
    return t.tocsc()


def make_delay_fixture(n: int, tau: float = 1.0, beta: float = 0.01,
                       theta: float = 5.0) -> StructuredTF:
    """Single-delay benchmark system of order n.

    E = theta*I + T, A0 = (1/tau)(1/beta + 1)(T - theta*I),
    A1 = (1/tau)(1/beta - 1)(T - theta*I), with T the coupling matrix above;
    B = e1 + e2 and C = B^T.  D(s) = s*E - A0 - exp(-tau*s)*A1.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if beta == 0:
        raise ValueError("beta must be nonzero")
    t = delay_coupling_matrix(n)
    eye = sp.identity(n, format="csc")
    e = theta * eye + t
    a0 = (1.0 / tau) * (1.0 / beta + 1.0) * (t - theta * eye)
    a1 = (1.0 / tau) * (1.0 / beta - 1.0) * (t - theta * eye)
    b = np.zeros((n, 1))
    b[0, 0] = 1.0
    b[1, 0] = 1.0
    c = b.T.copy()
    if n <= DENSE_CUTOFF:
        e, a0, a1 = (np.asarray(x.todense()) for x in (e, a0, a1))
    d_factor = MatrixFactor([
        (ScalarTerm(degree=1), e),
        (ScalarTerm(degree=0), -a0),
        (ScalarTerm(degree=0, delay=tau), -a1),
    ])
    return StructuredTF(
        c_factor=MatrixFactor([(ScalarTerm(), c)]),
        d_factor=d_factor,
        b_factor=MatrixFactor([(ScalarTerm(), b)]),
    )


def descriptor_tf(e, a, b, c) -> StructuredTF:
    """Convenience wrapper for H(s) = C (sE - A)^{-1} B."""
    return StructuredTF(
        c_factor=MatrixFactor([(ScalarTerm(), np.atleast_2d(c))]),
        d_factor=MatrixFactor([(ScalarTerm(degree=1), e),
                               (ScalarTerm(), -a)]),
        b_factor=MatrixFactor([(ScalarTerm(), np.atleast_2d(b))]),
    )


def benchmark_dir() -> Path | None:
    """Directory with optional external benchmark data, or None."""
    path = os.environ.get(DATA_DIR_ENV)
    return Path(path) if path else None


def load_benchmark(name: str):
    """Loads an external benchmark (E.mtx, A.mtx, B.mtx, C.mtx under
    <data dir>/<name>/); returns None when the data is absent."""
    base = benchmark_dir()
    if base is None:
        return None
    folder = base / name
    files = {k: folder / f"{k}.mtx" for k in ("E", "A", "B", "C")}
    if not all(f.exists() for f in files.values()):
        return None
    mats = {k: _load_matrix(f) for k, f in files.items()}
    return descriptor_tf(mats["E"], mats["A"], mats["B"], mats["C"])
