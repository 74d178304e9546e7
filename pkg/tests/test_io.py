import json

import numpy as np
import pytest

from qorlicz.channels import QuantumChannel, random_kraus_channel
from qorlicz.io import (InputError, decode_matrix, dumps, encode_channel, encode_matrix, encode_state,
                        load_json, parse_algebra, parse_channel, parse_crossed, parse_state, parse_young)
from qorlicz.linalg import random_complex, random_density
from qorlicz.standard_form import StandardForm


def test_matrix_round_trip(rng):
    a = random_complex(rng, (3, 3))
    assert np.array_equal(decode_matrix(json.loads(json.dumps(encode_matrix(a)))), a)


@pytest.mark.parametrize("bad", [[[1, 2, 3]], [[[1, 0], [0, 0]]], "x", [[[1, 0, 0]]], [[[float("nan"), 0]]]])
def test_decode_rejects(bad):
    with pytest.raises(InputError):
        decode_matrix(bad)


def test_state_and_channel_round_trip(rng):
    sf = StandardForm(random_density(rng, 3))
    assert np.allclose(parse_state(encode_state(sf)).rho, sf.rho)
    T = random_kraus_channel(rng, 3)
    assert np.allclose(parse_channel(encode_channel(T)).superop, T.superop)
    S = QuantumChannel.transpose(2)
    assert np.allclose(parse_channel(encode_channel(S)).superop, S.superop)
    assert np.allclose(parse_channel({"builtin": "identity", "n": 3}).superop, np.eye(9))


def test_unknown_keys_rejected():
    with pytest.raises(InputError):
        parse_state({"rho": encode_matrix(np.eye(2) / 2), "sigma": 1})
    with pytest.raises(InputError):
        parse_channel({"builtin": "identity", "colour": "red"})
    with pytest.raises(InputError):
        parse_young({"kind": "psi_e", "param": {}})
    with pytest.raises(InputError):
        parse_algebra({"blocks": [], "extra": 0})
    with pytest.raises(InputError):
        parse_crossed({"q": 0.5, "n": 4})


def test_schema_errors():
    with pytest.raises(InputError):
        parse_state({})
    with pytest.raises(InputError):
        parse_state({"rho": encode_matrix(np.eye(2))})
    with pytest.raises(InputError):
        parse_channel({})
    with pytest.raises(InputError):
        parse_channel({"builtin": "swap"})
    with pytest.raises(InputError):
        parse_channel({"kraus": [encode_matrix(np.eye(2)), encode_matrix(np.eye(2))]})
    with pytest.raises(InputError):
        parse_algebra({"blocks": [{"dim": 0, "weight": 1}]})
    with pytest.raises(InputError):
        parse_crossed({"m": [0, 1, 2], "channel": {"builtin": "identity", "n": 2}})


def test_load_json_errors(tmp_path):
    with pytest.raises(InputError):
        load_json(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(InputError):
        load_json(p)


def test_algebra_and_crossed_parsing():
    alg = parse_algebra({"blocks": [{"dim": 2, "weight": 0.5}, {"dim": 1, "weight": 2}]})
    assert alg.blocks == ((2, 0.5), (1, 2.0))
    state, T = parse_crossed({"q": 0.25, "N": 4, "m": [0, 2]})
    assert state.q == 0.25 and state.exponents == (0, 2) and T is None


def test_dumps_is_deterministic_and_handles_specials():
    obj = {"b": np.float64(np.inf), "a": [np.int64(3), 1 + 2j, np.bool_(True), float("nan")]}
    text = dumps(obj)
    assert text == dumps(dict(reversed(list(obj.items()))))
    assert json.loads(text) == {"a": [3, [1.0, 2.0], True, "nan"], "b": "inf"}
