import json

import numpy as np
import pytest

from qspforge.errors import IoError, ParseError
from qspforge.io import (
    format_curve,
    load_h2_fixture,
    load_hamiltonian,
    load_phases,
    load_polynomial,
    parse_hamiltonian,
    save_curve,
    save_hamiltonian,
    save_phases,
    save_polynomial,
)
from qspforge.lcu import PauliHamiltonian
from qspforge.linalg import is_hermitian
from qspforge.polynomial import Polynomial
from qspforge.qsp import PhaseSequence


def random_hamiltonian(rng, n=3, terms=6):
    strings = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(terms)]
    return PauliHamiltonian(list(zip(rng.standard_normal(terms) / 7, strings)), n)


def test_parse_single_term():
    H = parse_hamiltonian("1.0 ZZ\n")
    assert H.qubit_count == 2
    assert H.as_multiset() == [("ZZ", 1.0)]


def test_parse_comments_and_blank_lines():
    H = parse_hamiltonian("# header\n\n0.5 XI  # trailing\n-0.25 IZ\n")
    assert H.as_multiset() == [("IZ", -0.25), ("XI", 0.5)]


def test_parse_error_line_number():
    with pytest.raises(ParseError) as info:
        parse_hamiltonian("abc XZ\n")
    assert info.value.lineno == 1
    with pytest.raises(ParseError) as info:
        parse_hamiltonian("1.0 XZ\n0.5 XQ\n")
    assert info.value.lineno == 2


def test_parse_length_mismatch():
    with pytest.raises(ParseError):
        parse_hamiltonian("1.0 XZ\n1.0 X\n")


@pytest.mark.parametrize("suffix", [".txt", ".json"])
def test_round_trip_exact(rng, tmp_path, suffix):
    for k in range(10):
        H = random_hamiltonian(rng)
        path = tmp_path / f"h{k}{suffix}"
        save_hamiltonian(H, path)
        assert load_hamiltonian(path).as_multiset() == H.as_multiset()


def test_json_format_fields(tmp_path):
    path = tmp_path / "h.json"
    save_hamiltonian(PauliHamiltonian([(0.5, "XY")]), path)
    d = json.loads(path.read_text())
    assert d == {"n": 2, "terms": [{"c": 0.5, "p": "XY"}]}


def test_h2_fixture():
    H = load_h2_fixture()
    assert H.qubit_count == 4
    assert len(H.terms) == 15
    M = H.to_matrix()
    assert is_hermitian(M, 1e-12)
    # FCI ground energy of H2 in STO-3G near equilibrium is about -1.137 Ha.
    assert np.linalg.eigvalsh(M)[0] == pytest.approx(-1.137, abs=2e-3)


def test_missing_file_raises_io_error(tmp_path):
    with pytest.raises(IoError):
        load_hamiltonian(tmp_path / "absent.txt")
    with pytest.raises(IoError):
        save_curve([("t", [0.0])], tmp_path / "no" / "such" / "dir.csv")


def test_curve_format():
    text = format_curve([("t", [0.0, 0.5]), ("exact", [1.0, 0.1]), ("d5", [1.0, 0.2])])
    assert text == "t,exact,d5\n0,1,1\n0.5,0.10000000000000001,0.20000000000000001\n"


def test_curve_file_line_endings(tmp_path):
    path = tmp_path / "c.csv"
    save_curve([("t", np.linspace(0, 1, 3)), ("exact", np.ones(3))], path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.count(b"\n") == 4
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(back[:, 0], np.linspace(0, 1, 3))


def test_curve_rejects_ragged():
    with pytest.raises(ValueError):
        format_curve([("t", [0.0, 1.0]), ("exact", [1.0])])


def test_polynomial_and_phase_files(tmp_path):
    poly = Polynomial([0.0, 0.3, 0.0, -0.2], "chebyshev")
    save_polynomial(poly, tmp_path / "p.json")
    back = load_polynomial(tmp_path / "p.json")
    np.testing.assert_array_equal(back.coefficients, poly.coefficients)
    seq = PhaseSequence.qsp([0.1, -0.4, 0.25])
    save_phases(seq, tmp_path / "s.json")
    np.testing.assert_array_equal(load_phases(tmp_path / "s.json").phases, seq.phases)


def test_bad_json_is_parse_error(tmp_path):
    path = tmp_path / "p.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_polynomial(path)
