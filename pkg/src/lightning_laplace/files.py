"""JSON files for geometry, boundary data and solutions; CSV helpers."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .basis import Basis, PoleCluster
from .boundarydata import BoundarySpec, bc_from_json
from .errors import DataError, GeometryError
from .geometry import Domain, domain_from_json
from .solver import Solution


def _read_json(path, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{what} file {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise DataError(f"{what} file {path}: top level must be an object")
    return data


def load_domain(path) -> Domain:
    data = _read_json(path, "geometry")
    try:
        return domain_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GeometryError):
            raise
        raise GeometryError(f"geometry file {path}: {exc}") from None


def load_bc(path, domain: Domain) -> BoundarySpec:
    return bc_from_json(_read_json(path, "boundary data"), domain)


def _pairs(z) -> list:
    z = np.asarray(z, dtype=complex)
    return [[float(v.real), float(v.imag)] for v in z]


def _unpairs(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def solution_to_json(sol: Solution, domain: Domain | None = None) -> dict:
    basis = sol.basis
    out = {
        "expansion_point": [float(basis.expansion_point.real), float(basis.expansion_point.imag)],
        "N1": basis.n_poles,
        "N2": basis.poly_degree,
        "N": basis.dof_count,
        "n": sol.n,
        "M": sol.M,
        "poles": _pairs(basis.poles),
        "a": _pairs(sol.a),
        "b": _pairs(sol.b),
        "clusters": [
            {
                "corner_index": int(c.corner_index),
                "size": len(c),
                "distances": [float(d) for d in c.distances],
                "local_scale": float(c.local_scale),
            }
            for c in basis.clusters
        ],
        "diameter": float(sol.diameter),
        "tolerance": float(sol.tolerance),
        "boundary_error": float(sol.boundary_error),
        "fine_mesh_error": float(sol.fine_mesh_error),
        "converged": bool(sol.converged),
        "weighted": bool(sol.weighted),
        "metadata": {k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in sol.metadata.items()},
    }
    if domain is not None:
        out["domain"] = domain.to_json()
    return out


def solution_from_json(data: dict) -> Solution:
    try:
        poles = _unpairs(data["poles"])
        clusters = []
        start = 0
        for c in data["clusters"]:
            k = int(c["size"])
            clusters.append(
                PoleCluster(int(c["corner_index"]), poles[start : start + k], np.array(c["distances"]), c["local_scale"])
            )
            start += k
        zs = complex(*data["expansion_point"])
        basis = Basis(tuple(clusters), int(data["N2"]), zs)
        b = _unpairs(data["b"])
        b[0] = b[0].real
        return Solution(
            basis,
            _unpairs(data["a"]),
            b,
            float(data["diameter"]),
            float(data["boundary_error"]),
            fine_mesh_error=float(data.get("fine_mesh_error", float("nan"))),
            converged=bool(data.get("converged", False)),
            weighted=bool(data.get("weighted", False)),
            tolerance=float(data.get("tolerance", float("nan"))),
            n=int(data.get("n", 0)),
            M=int(data.get("M", 0)),
            metadata=dict(data.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed solution file: {exc!r}") from None


def save_solution(sol: Solution, path, domain: Domain | None = None) -> None:
    Path(path).write_text(json.dumps(solution_to_json(sol, domain), indent=1), encoding="utf-8")


def load_solution(path):
    """(Solution, Domain or None) from a solution file."""
    data = _read_json(path, "solution")
    dom = domain_from_json(data["domain"]) if "domain" in data else None
    return solution_from_json(data), dom


def read_points_csv(path) -> np.ndarray:
    pts = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                pts.append(complex(float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header
                raise DataError(f"{path}: line {lineno}: expected x,y") from None
    return np.array(pts, dtype=complex)


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
