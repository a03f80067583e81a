"""Exact stochastic-order certification and kinetic Monte Carlo for lattice
particle systems with multi-particle births, deaths and jumps.

The heavy lifting lives in the C++ extension; this wrapper decodes its JSON
documents into dictionaries. Exact rationals travel as "num/den" strings.
"""

import json as _json

from ._ipskit import (  # noqa: F401
    cli,
    model_conservative,
    model_epidemic,
    model_metapop_allee,
    model_tuberculosis,
    model_two_type_contact,
    simulate_coupled,
    simulate_single,
)
from . import _ipskit as _core

__all__ = [
    "model_epidemic",
    "model_two_type_contact",
    "model_tuberculosis",
    "model_conservative",
    "model_metapop_allee",
    "validate_model",
    "certify_attractive",
    "certify_order",
    "oracle_increasing_sets",
    "coupling_table",
    "ergodic_report",
    "simulate_single",
    "simulate_coupled",
    "cli",
]


def validate_model(model):
    return _json.loads(_core.validate_model(model))


def certify_attractive(model, jobs=1):
    return _json.loads(_core.certify_attractive(model, jobs))


def certify_order(lower, upper, jobs=1):
    return _json.loads(_core.certify_order(lower, upper, jobs))


def oracle_increasing_sets(lower, upper, p="1/1", cap=4):
    return _json.loads(_core.oracle_increasing_sets(lower, upper, p, cap))


def coupling_table(lower, upper, quad, p="1/1"):
    return _json.loads(_core.coupling_table(lower, upper, list(quad), p))


def ergodic_report(lambda_, beta, gamma, phi, M, d=1, mode="proof_supported"):
    return _json.loads(_core.ergodic_report(lambda_, beta, gamma, phi, M, d, mode))
