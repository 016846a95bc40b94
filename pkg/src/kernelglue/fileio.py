"""JSON document formats for kernels, trees, certificates, and reports.

Complex scalars are stored as two-element arrays ``[re, im]`` of decimal
floats.  Matrices are written in full (no triangular compression), and
floats serialize via Python's shortest round-trip representation, so a
write/read cycle reproduces every entry bit for bit.  Loaders ignore
unknown keys (e.g. a timestamp added by the CLI).
"""

from __future__ import annotations

import json
from numbers import Real

import numpy as np

from .errors import FileFormatError
from .kernels import IndexedKernel, PsdCertificate, make_kernel
from .realization import RealizationSpec, SampleBatch, VerificationReport
from .trees import GluingTree


def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair_to_complex(obj) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, Real) and not isinstance(x, bool) for x in obj)
    ):
        raise FileFormatError(f"expected a two-element [re, im] array, got {obj!r}")
    return complex(float(obj[0]), float(obj[1]))


def matrix_to_rows(m: np.ndarray) -> list[list[list[float]]]:
    return [[complex_to_pair(z) for z in row] for row in np.asarray(m)]


def vector_to_pairs(v: np.ndarray) -> list[list[float]]:
    return [complex_to_pair(z) for z in np.asarray(v).reshape(-1)]


def _require(doc: dict, key: str, kind: str):
    if not isinstance(doc, dict) or key not in doc:
        raise FileFormatError(f"{kind} document is missing the {key!r} field")
    return doc[key]


def kernel_to_document(k: IndexedKernel) -> dict:
    return {"labels": list(k.labels), "entries": matrix_to_rows(k.entries)}


def kernel_from_document(doc: dict) -> IndexedKernel:
    labels = _require(doc, "labels", "kernel")
    rows = _require(doc, "entries", "kernel")
    if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
        raise FileFormatError("kernel 'labels' must be an array of strings")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FileFormatError("kernel 'entries' must be an array of rows")
    entries = [[pair_to_complex(z) for z in row] for row in rows]
    lengths = {len(row) for row in entries}
    if len(entries) != len(labels) or lengths not in ({len(labels)}, set()):
        raise FileFormatError(
            f"kernel 'entries' must be a {len(labels)}x{len(labels)} matrix"
        )
    return make_kernel(labels, entries)


def tree_to_document(tree: GluingTree) -> dict:
    return {
        "nodes": [kernel_to_document(k) for k in tree.nodes],
        "edges": [[i, j, label] for i, j, label in tree.edges],
    }


def tree_from_document(doc: dict) -> GluingTree:
    nodes = _require(doc, "nodes", "tree")
    edges = _require(doc, "edges", "tree")
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise FileFormatError("tree 'nodes' and 'edges' must be arrays")
    kernels = tuple(kernel_from_document(n) for n in nodes)
    parsed = []
    for e in edges:
        if (
            not isinstance(e, list)
            or len(e) != 3
            or not isinstance(e[0], int)
            or not isinstance(e[1], int)
            or not isinstance(e[2], str)
        ):
            raise FileFormatError(f"tree edge must be [i, j, \"label\"], got {e!r}")
        parsed.append((e[0], e[1], e[2]))
    return GluingTree(kernels, tuple(parsed))


def certificate_to_document(cert: PsdCertificate) -> dict:
    return {
        "verdict": bool(cert.verdict),
        "min_eigenvalue": float(cert.min_eigenvalue),
        "tolerance_used": float(cert.tolerance_used),
        "witness": None if cert.witness is None else vector_to_pairs(cert.witness),
    }


def realization_to_document(spec: RealizationSpec) -> dict:
    return {
        "labels": list(spec.labels),
        "basepoint": spec.basepoint,
        "basepoint_index": spec.basepoint_index,
        "mean": vector_to_pairs(spec.mean),
        "covariance": matrix_to_rows(spec.covariance),
    }


def report_to_document(report: VerificationReport) -> dict:
    return {
        "passed": bool(report.passed),
        "max_abs_deviation": float(report.max_abs_deviation),
        "mc_tol": float(report.mc_tol),
        "samples": int(report.n_samples),
        "seed": int(report.seed),
        "certificate": certificate_to_document(report.certificate),
        "product": kernel_to_document(report.product),
        "empirical": kernel_to_document(report.empirical),
    }


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def format_sample_batch(batch: SampleBatch) -> str:
    """Tabular export: a header carrying seed and labels, one row per draw,
    comma-separated complex values as ``re+imi`` with 17 significant digits.
    """
    lines = [f"# seed={batch.seed} labels={','.join(batch.labels)}"]
    for row in batch.samples:
        lines.append(",".join(_format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def load_document(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top-level JSON value must be an object")
    return doc


def load_kernel(path: str) -> IndexedKernel:
    return kernel_from_document(load_document(path))


def load_tree(path: str) -> GluingTree:
    return tree_from_document(load_document(path))


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"
