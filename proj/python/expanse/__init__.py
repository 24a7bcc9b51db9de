"""Numerical checks of the expansivity hierarchy of flows.

The heavy lifting happens in the compiled ``_expanse`` module; functions that
produce reports return plain dictionaries decoded from the same JSON the
command-line runner writes.
"""

import json

from ._expanse import (  # noqa: F401
    BudgetExceeded,
    Flow,
    Point,
    PseudoOrbit,
    bowen_ball_test,
    generate_pseudo_orbit,
    interval_flow_transit_time,
    make_flow as _make_flow,
    max_seam_jump,
    orbit_membership,
    rep_epsilon_check,
    x_delta_set,
)
from . import _expanse


def make_flow(**spec):
    """Catalog flow from keyword settings, e.g. make_flow(name="circles", radii="harmonic", depth=16)."""
    return _make_flow(json.dumps(spec))


def align_points(flow, x, y, **kw):
    return json.loads(_expanse._align_points(flow, x, y, **kw))


def check_property(flow, property, eps, delta, grid, **kw):
    return json.loads(_expanse._check_property(flow, property, eps, delta, grid, **kw))


def check_equicontinuity(flow, singular, eps, delta, grid, **kw):
    return json.loads(_expanse._check_equicontinuity(flow, singular, eps, delta, grid, **kw))


def ball_inclusion_check(flow, eps, delta, grid, ball_samples=8):
    return json.loads(_expanse._ball_inclusion_check(flow, eps, delta, grid, ball_samples))


def comparability_constants(flow, grid):
    return json.loads(_expanse._comparability_constants(flow, grid))


def local_norm_constant(flow, grid, pairs=10000, seed=1):
    return json.loads(_expanse._local_norm_constant(flow, grid, pairs, seed))


def find_shadow(flow, pseudo_orbit, eps):
    raw = _expanse._find_shadow(flow, pseudo_orbit, eps)
    return None if raw is None else json.loads(raw)


def spanning_cardinality(flow, grid, t, eps, h_sample=0.1, exact=False):
    return json.loads(_expanse._spanning_cardinality(flow, grid, t, eps, h_sample, exact))


def entropy_estimate(flow, grid, t_ladder, eps_ladder, h_sample=0.1):
    return json.loads(_expanse._entropy_estimate(flow, grid, t_ladder, eps_ladder, h_sample))


def run(task, config):
    """Runs a CLI task in-process; returns (exit_code, report)."""
    code, report = _expanse._execute_task(task, json.dumps(config))
    return code, json.loads(report)
