"""JSON spec files, run manifests and result writers.

Spec file layout::

    {
      "params": {"b": 0.3, "mu": 1.0},
      "insertions": [
        {"alpha": -0.3, "point": [0.0, 0.2], "label": 1},
        {"n": 1, "point": [0.5, -0.1]}
      ],
      "torus": {"T": 8.0, "N": 64},
      "config": {"rel_tol": 1e-8}
    }

``alpha`` is a number or ``[re, im]``; ``n`` gives ``alpha = n b``, so the
screening number is ``-sum(n)``.  Labels default to list order.  The
optional ``monomial`` key describes a smeared product for ``omega``::

    "monomial": [{"n": 1, "center": [0, 0], "half_widths": [0.1, 0.1],
                  "scale": [1, 0]}]
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from pathlib import Path

from .algebra import BumpFunction, SmearedMonomial
from .correlators import Charge, CorrelatorSpec, Insertion, ModelParams
from .errors import ConfigError
from .kernels import TorusSpec
from .quadrature import QuadratureConfig

__all__ = [
    "WORKERS_ENV",
    "default_workers",
    "charge_from_json",
    "charge_to_json",
    "spec_from_dict",
    "spec_to_dict",
    "load_spec",
    "save_spec",
    "monomial_from_dict",
    "torus_from_dict",
    "make_manifest",
    "to_jsonable",
    "write_json",
    "write_csv",
]

WORKERS_ENV = "LIOUVILLE_CYL_WORKERS"


def default_workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


def charge_from_json(entry, b):
    if "alpha" in entry:
        a = entry["alpha"]
        if isinstance(a, (list, tuple)):
            if len(a) != 2:
                raise ConfigError(f"complex alpha needs [re, im], got {a!r}")
            return complex(float(a[0]), float(a[1]))
        return float(a)
    if "n" in entry:
        return float(entry["n"]) * float(b)
    raise ConfigError(f"insertion needs 'alpha' or 'n': {entry!r}")


def charge_to_json(alpha):
    alpha = complex(alpha.alpha if isinstance(alpha, Charge) else alpha)
    if alpha.imag == 0.0:
        return alpha.real
    return [alpha.real, alpha.imag]


def spec_from_dict(d):
    try:
        params = d["params"]
        b = float(params["b"])
        mu = float(params.get("mu", 1.0))
        rows = d["insertions"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"spec is missing field {exc}") from None
    charges, points, labels = [], [], []
    for i, row in enumerate(rows):
        charges.append(charge_from_json(row, b))
        p = row.get("point")
        if p is None or len(p) != 2:
            raise ConfigError(f"insertion {i} needs point [t, x]")
        points.append((float(p[0]), float(p[1])))
        labels.append(int(row.get("label", i + 1)))
    return CorrelatorSpec.build(b, mu, charges, points, labels)


def spec_to_dict(spec):
    return {
        "params": {"b": spec.params.b, "mu": spec.params.mu},
        "insertions": [
            {
                "alpha": charge_to_json(ins.charge),
                "point": [ins.point.t, ins.point.x],
                "label": ins.label,
            }
            for ins in spec.insertions
        ],
    }


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def load_spec(path):
    """Return ``(spec, extras)`` where extras holds the optional keys."""
    d = _read_json(path)
    spec = spec_from_dict(d)
    extras = {k: v for k, v in d.items() if k not in ("params", "insertions")}
    return spec, extras


def save_spec(spec, path, **extras):
    d = spec_to_dict(spec)
    d.update(extras)
    write_json(d, path)


def monomial_from_dict(rows, b):
    m = SmearedMonomial()
    for row in rows:
        if "n" not in row:
            raise ConfigError("monomial factors need an integer 'n'")
        sc = row.get("scale", 1.0)
        scale = complex(*sc) if isinstance(sc, (list, tuple)) else complex(sc)
        f = BumpFunction(tuple(row["center"]), tuple(row["half_widths"]), scale)
        m = m * SmearedMonomial.single(f, int(row["n"]))
    return m


def torus_from_dict(d):
    if d is None:
        return None
    return TorusSpec(float(d["T"]), int(d.get("N", 64)))


def to_jsonable(obj):
    """Recursively convert complex numbers and numpy scalars for JSON."""
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return to_jsonable(obj.item())
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


def make_manifest(command, params=None, cfg=None, spec=None, out=None, version=None):
    if version is None:
        from . import __version__ as version
    spec_field = spec
    if isinstance(spec, CorrelatorSpec):
        spec_field = spec_to_dict(spec)
    elif isinstance(spec, (str, Path)):
        spec_field = str(spec)
    if isinstance(params, ModelParams):
        params = {"b": params.b, "mu": params.mu}
    return {
        "command": command,
        "params": params,
        "spec": spec_field,
        "cfg": (cfg or QuadratureConfig()).to_dict(),
        "output": None if out is None else str(out),
        "workers": default_workers(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "version": version,
    }


def write_json(payload, path=None):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=False)
    if path is None:
        return text
    Path(path).write_text(text + "\n")
    return text


def write_csv(rows, columns, path, manifest=None):
    """Write rows with a header; the manifest goes in ``#`` comment lines."""
    with open(path, "w", newline="") as fh:
        if manifest is not None:
            for line in json.dumps(to_jsonable(manifest), indent=None).splitlines():
                fh.write(f"# manifest: {line}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([r.get(c, "") for c in columns])
