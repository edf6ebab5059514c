"""Hamiltonian, polynomial, phase and curve files."""

import csv
import io
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import IoError, ParseError, QSPForgeError
from .lcu import PauliHamiltonian, PauliTerm
from .polynomial import Polynomial
from .qsp import PhaseSequence


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def parse_hamiltonian(text):
    """Parse ``<coefficient> <PauliString>`` lines; ``#`` starts a comment."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _from_json(stripped)
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<coefficient> <pauli>', got {raw!r}", lineno)
        try:
            c = float(parts[0])
            terms.append(PauliTerm(c, parts[1]))
        except (ValueError, QSPForgeError) as exc:
            raise ParseError(str(exc), lineno) from exc
        if not np.isfinite(c):
            raise ParseError("coefficient is not finite", lineno)
    if not terms:
        raise ParseError("no terms found")
    lengths = {len(t.string) for t in terms}
    if len(lengths) != 1:
        raise ParseError("Pauli strings have different lengths")
    return PauliHamiltonian(terms, lengths.pop())


def _from_json(text):
    try:
        d = json.loads(text)
        terms = [PauliTerm(float(t["c"]), t["p"]) for t in d["terms"]]
        return PauliHamiltonian(terms, int(d["n"]))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed Hamiltonian record: {exc}") from exc


def load_hamiltonian(path):
    """Read a Hamiltonian in the text or JSON format (detected from content)."""
    return parse_hamiltonian(_read(path))


def format_hamiltonian(H):
    return "".join(f"{t.coefficient:.17g} {t.string}\n" for t in H.terms)


def save_hamiltonian(H, path):
    """Write the text format, or JSON when ``path`` ends in ``.json``."""
    if str(path).endswith(".json"):
        d = {"n": H.qubit_count,
             "terms": [{"c": t.coefficient, "p": t.string} for t in H.terms]}
        _write(path, json.dumps(d, indent=1) + "\n")
    else:
        _write(path, format_hamiltonian(H))


def load_h2_fixture():
    """Four-qubit Jordan-Wigner H2 Hamiltonian shipped with the package."""
    text = resources.files("qspforge").joinpath("data/h2_jw.txt").read_text()
    return parse_hamiltonian(text)


def _load_json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc


def load_polynomial(path):
    return Polynomial.from_dict(_load_json(path))


def save_polynomial(poly, path):
    _write(path, json.dumps(poly.to_dict(), indent=1) + "\n")


def load_phases(path):
    return PhaseSequence.from_dict(_load_json(path))


def save_phases(seq, path):
    _write(path, json.dumps(seq.to_dict(), indent=1) + "\n")


def format_curve(rows):
    """CSV text, one column per ``(label, values)`` pair, LF line endings.

    Curves put ``("t", ...)`` and ``("exact", ...)`` first, then one column
    per approximation.
    """
    labels = [label for label, _ in rows]
    cols = [np.asarray(v, dtype=float) for _, v in rows]
    if not cols or any(c.shape != cols[0].shape or c.ndim != 1 for c in cols):
        raise QSPForgeError("curve columns must be equal-length vectors")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(labels)
    for vals in zip(*cols):
        w.writerow([f"{v:.17g}" for v in vals])
    return buf.getvalue()


def save_curve(rows, path):
    _write(path, format_curve(rows))
