"""JSON model and certificate files.

Model files are objects with a ``kind`` field:

``single``      ``{"A": matrix}``
``hull``        ``{"A": [matrix, ...]}``
``synthesis``   ``{"A": matrix or list, "B": matrix or list, "C": matrix}``
``interval``    ``{"lower": matrix, "upper": matrix}``, optionally with ``B``
                and ``C`` to make a synthesis model over the corner hull
``motor-speed``     ``{"gamma": g}``, optionally ``"hull": "parameter"``
``motor-position``  ``{"gamma": g}``

Matrices are nested row lists. In certificates the vertex matrix ``V`` is
stored as a list of its columns (one vertex per inner list), matching the
column-major ``vec`` convention used throughout the package.
"""
import dataclasses
import json
import os
import tempfile

import numpy as np

from . import contraction, simplex
from .contraction import ContractionCertificate
from .plants import IntervalMatrix, corners, hull, motor_position_model, motor_speed_model, single, synthesis
from .polytope import VPolytope

CERT_FORMAT = "polylyap-certificate"
CERT_VERSION = 1
MODEL_KINDS = ("single", "hull", "synthesis", "interval", "motor-speed", "motor-position")


class FileFormatError(ValueError):
    pass


def _matrix(obj, name):
    try:
        a = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{name} is not a numeric matrix") from exc
    if a.ndim != 2:
        raise FileFormatError(f"{name} must be a 2-D nested list, got {a.ndim}-D")
    return a


def _matrix_list(obj, name):
    try:
        a = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{name} is not a numeric matrix list") from exc
    if a.ndim == 2:
        return [a]
    if a.ndim != 3 or a.shape[0] == 0:
        raise FileFormatError(f"{name} must be a matrix or a non-empty list of matrices")
    return list(a)


def _require(doc, key, kind):
    if key not in doc:
        raise FileFormatError(f"model kind {kind!r} needs field {key!r}")
    return doc[key]


def read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path, doc):
    """Write ``doc`` atomically (temporary file in the same directory, then rename)."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def model_from_doc(doc, gamma=None, hull_kind=None):
    """Build a :class:`PlantModel` from a parsed model document.

    ``gamma`` and ``hull_kind`` override the document for the motor kinds.
    """
    if not isinstance(doc, dict):
        raise FileFormatError("model document must be a JSON object")
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise FileFormatError(f"unknown model kind {kind!r}; expected one of {', '.join(MODEL_KINDS)}")
    try:
        if kind == "single":
            return single(_matrix(_require(doc, "A", kind), "A"))
        if kind == "hull":
            return hull(_matrix_list(_require(doc, "A", kind), "A"))
        if kind == "synthesis":
            return synthesis(
                _matrix_list(_require(doc, "A", kind), "A"),
                _matrix_list(_require(doc, "B", kind), "B"),
                _matrix(_require(doc, "C", kind), "C"),
            )
        if kind == "interval":
            im = IntervalMatrix(_matrix(_require(doc, "lower", kind), "lower"), _matrix(_require(doc, "upper", kind), "upper"))
            mats = corners(im)
            if "B" in doc or "C" in doc:
                return synthesis(mats, _matrix_list(_require(doc, "B", kind), "B"), _matrix(_require(doc, "C", kind), "C"))
            return single(mats[0]) if len(mats) == 1 else hull(mats)
        g = float(gamma if gamma is not None else doc.get("gamma", 1.0))
        if kind == "motor-speed":
            return motor_speed_model(g, hull_kind or doc.get("hull", "interval"))
        return motor_position_model(g)
    except FileFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FileFormatError(str(exc)) from exc


def load_model(path, gamma=None, hull_kind=None):
    return model_from_doc(read_json(path), gamma, hull_kind)


def model_to_doc(model):
    """Explicit document (``single``, ``hull`` or ``synthesis``) for ``model``."""
    if model.kind == "single":
        return {"kind": "single", "A": model.a[0].tolist()}
    if model.kind == "hull":
        return {"kind": "hull", "A": [a.tolist() for a in model.a]}
    return {
        "kind": "synthesis",
        "A": [a.tolist() for a in model.a],
        "B": [b.tolist() for b in model.b],
        "C": model.c.tolist(),
    }


def _trace_summary(report):
    out = []
    for r in sorted({e.restart for e in report.trace}):
        entries = [e for e in report.trace if e.restart == r]
        out.append({
            "restart": r,
            "iterations": entries[-1].iteration,
            "eta_first": entries[0].eta,
            "eta_last": entries[-1].eta,
            "basis_changes": sum(e.basis_changed for e in entries),
        })
    return out


def tolerances():
    return {
        "eq_tol": contraction.EQ_TOL,
        "metzler_tol": contraction.METZLER_TOL,
        "decay_tol": contraction.DECAY_TOL,
        "lp_feas_tol": simplex.FEAS_TOL,
        "lp_opt_tol": simplex.OPT_TOL,
    }


def certificate_to_doc(cert, model, config=None, report=None):
    doc = {
        "format": CERT_FORMAT,
        "version": CERT_VERSION,
        "n": cert.v.n,
        "m": cert.v.m,
        "eta": float(cert.eta),
        "V": cert.v.v.T.tolist(),
        "M": [np.asarray(mb).tolist() for mb in cert.m_list],
        "K": None if cert.gain is None else np.asarray(cert.gain).tolist(),
        "model": model_to_doc(model),
        "tolerances": tolerances(),
    }
    if config is not None:
        doc["config"] = dataclasses.asdict(config)
    if report is not None:
        doc["search"] = {
            "status": report.status,
            "restart": report.restart,
            "iterations": report.iterations,
            "restarts": _trace_summary(report),
        }
    return doc


def certificate_from_doc(doc):
    """Return ``(certificate, model)`` from a parsed certificate document."""
    if not isinstance(doc, dict) or doc.get("format") != CERT_FORMAT:
        raise FileFormatError("not a polylyap certificate file")
    for key in ("V", "M", "eta", "model"):
        if key not in doc:
            raise FileFormatError(f"certificate is missing field {key!r}")
    cols = _matrix(doc["V"], "V")
    m_list = tuple(_matrix_list(doc["M"], "M"))
    gain = None if doc.get("K") is None else _matrix(doc["K"], "K")
    try:
        v = VPolytope(cols.T.copy())
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc
    for mb in m_list:
        if mb.shape != (v.m, v.m):
            raise FileFormatError(f"each M must be {v.m}x{v.m}, got {mb.shape}")
    model = model_from_doc(doc["model"])
    if model.n != v.n:
        raise FileFormatError(f"certificate V has n = {v.n} but its model has n = {model.n}")
    cert = ContractionCertificate(v=v, m_list=m_list, eta=float(doc["eta"]), gain=gain)
    return cert, model


def save_certificate(path, cert, model, config=None, report=None):
    write_json(path, certificate_to_doc(cert, model, config, report))


def load_certificate(path):
    return certificate_from_doc(read_json(path))


def load_points(path):
    """Points as an (N, n) array from JSON (list of points) or comma/space separated text."""
    if str(path).endswith(".json"):
        pts = np.array(read_json(path), dtype=float)
    else:
        with open(path) as f:
            text = f.read()
        rows = [ln.replace(",", " ").split() for ln in text.splitlines()]
        rows = [r for r in rows if r and not r[0].startswith("#")]
        try:
            pts = np.array([[float(x) for x in r] for r in rows], dtype=float)
        except ValueError as exc:
            raise FileFormatError(f"{path}: points must be numeric") from exc
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or not np.all(np.isfinite(pts)):
        raise FileFormatError(f"{path}: expected a finite list of points")
    return pts
