"""JSON encodings of strategies, schemes and graphs, and report writers.

Complex numbers are written as [re, im] pairs; vectors as lists of pairs and
matrices as lists of rows. Layouts are lists of [name, qubits].
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import attacks, commit
from .qla import PureState, RegisterLayout, Unitary

SIG_DIGITS = 12


class MalformedInput(ValueError):
    """Input file does not follow the documented schema."""


def _need(d, key, what):
    if key not in d:
        raise MalformedInput(f"{what}: missing field {key!r}")
    return d[key]


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(obj) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as e:
        raise MalformedInput(f"bad complex array: {e}") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise MalformedInput("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_layout(lay: RegisterLayout) -> list:
    return [[n, q] for n, q in lay.registers]


def decode_layout(obj) -> RegisterLayout:
    try:
        return RegisterLayout(tuple((str(n), int(q)) for n, q in obj))
    except (TypeError, ValueError) as e:
        raise MalformedInput(f"bad register list: {e}") from None


def encode_state(s: PureState) -> dict:
    return {"registers": encode_layout(s.layout), "amplitudes": encode_complex(s.vector)}


def decode_state(d) -> PureState:
    try:
        return PureState(decode_complex(_need(d, "amplitudes", "state")),
                         decode_layout(_need(d, "registers", "state")))
    except MalformedInput:
        raise
    except ValueError as e:
        raise MalformedInput(f"state: {e}") from None


def encode_unitary(U: Unitary) -> dict:
    return {"registers": encode_layout(U.layout), "matrix": encode_complex(U.matrix)}


def decode_unitary(d) -> Unitary:
    try:
        return Unitary(decode_complex(_need(d, "matrix", "unitary")),
                       decode_layout(_need(d, "registers", "unitary")))
    except MalformedInput:
        raise
    except ValueError as e:
        raise MalformedInput(f"unitary: {e}") from None


# --------------------------------------------------------------------------- #
# committer strategies

def encode_strategy(s: commit.CommitterStrategy) -> dict:
    bit = list(s.bit) if isinstance(s.bit, tuple) else s.bit
    return {"type": "strategy", "state": encode_state(s.initial), "bit": bit,
            "reveal": None if s.reveal is None else encode_unitary(s.reveal)}


def decode_strategy(d) -> commit.CommitterStrategy:
    bit = _need(d, "bit", "strategy")
    bit = tuple(int(b) for b in bit) if isinstance(bit, list) else int(bit)
    rev = d.get("reveal")
    return commit.CommitterStrategy(decode_state(_need(d, "state", "strategy")), bit,
                                    None if rev is None else decode_unitary(rev))


# --------------------------------------------------------------------------- #
# no-go schemes

def encode_crs(s: attacks.CrsScheme) -> dict:
    return {"type": "crs", "registers": encode_layout(s.states[0][0].layout),
            "probs": [float(p) for p in s.probs],
            "states": [[encode_complex(a.vector), encode_complex(b.vector)] for a, b in s.states]}


def _state_pairs(d, what):
    lay = decode_layout(_need(d, "registers", what))
    try:
        return tuple((PureState(decode_complex(a), lay), PureState(decode_complex(b), lay))
                     for a, b in _need(d, "states", what))
    except ValueError as e:
        raise MalformedInput(f"{what}: {e}") from None


def decode_crs(d) -> attacks.CrsScheme:
    try:
        return attacks.CrsScheme(np.asarray(_need(d, "probs", "crs scheme"), dtype=float),
                                 _state_pairs(d, "crs scheme"))
    except MalformedInput:
        raise
    except ValueError as e:
        raise MalformedInput(f"crs scheme: {e}") from None


def encode_correlated(s: attacks.CorrelatedScheme, with_povm: bool = True) -> dict:
    out = {"type": "correlated", "registers": encode_layout(s.layout),
           "dist": s.dist.tolist(),
           "states": [[encode_complex(a.vector), encode_complex(b.vector)] for a, b in s.states]}
    if with_povm:
        out["povm"] = [[encode_complex(L0), encode_complex(L1)] for L0, L1 in s.povm]
    return out


def decode_correlated(d) -> attacks.CorrelatedScheme:
    """``povm`` may be omitted: the support projectors of compatible states are used."""
    try:
        D = np.asarray(_need(d, "dist", "correlated scheme"), dtype=float)
        states = _state_pairs(d, "correlated scheme")
        if "povm" in d:
            povm = tuple((decode_complex(a), decode_complex(b)) for a, b in d["povm"])
        else:
            povm = attacks.support_povm(D, states)
        return attacks.CorrelatedScheme(D, states, povm)
    except MalformedInput:
        raise
    except ValueError as e:
        raise MalformedInput(f"correlated scheme: {e}") from None


def load_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{path}: not valid JSON ({e})") from None


# --------------------------------------------------------------------------- #
# reports

def round_sig(x, digits: int = SIG_DIGITS):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0 or not math.isfinite(x):
            return x
        return float(f"{x:.{digits - 1}e}")
    if isinstance(x, dict):
        return {k: round_sig(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v, digits) for v in x]
    return x


def rows_to_json(rows) -> str:
    return json.dumps([round_sig(r) for r in rows], sort_keys=True, indent=2) + "\n"


def rows_to_csv(rows) -> str:
    rows = [round_sig(r) for r in rows]
    cols = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else
                        ("" if v is None else repr(v) if isinstance(v, float) else v))
                    for k, v in r.items()})
    return buf.getvalue()
