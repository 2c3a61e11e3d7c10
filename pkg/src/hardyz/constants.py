"""Calibrated error constants and frozen experiment bands.

Values live in ``data/constants.json``; they are produced once by
``python -m hardyz.calibrate`` (seed 1) and never edited by hand.
"""
import json
from functools import lru_cache
from pathlib import Path

PATH = Path(__file__).with_name("data") / "constants.json"


@lru_cache(maxsize=1)
def load():
    with open(PATH, encoding="utf-8") as fh:
        return json.load(fh)


def rs_constant(order):
    """c_order in |RS_order(t) - Z(t)| <= c_order * t**(-(2*order+1)/4)."""
    return float(load()["rs"][str(order)])


def dirichlet_constant():
    return float(load()["c2"])


def afe_constant():
    return float(load()["c3"])


def band(name):
    return load()["bands"][name]
