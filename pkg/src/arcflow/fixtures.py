"""Named spaces, arc-field fixtures and flows for the CLI and tests.

Space ids: r1, r2, r3, l2, hausdorff. Fixture ids are per space; run
``arcflow fixtures`` to list them. Conventions: u is the origin,
v = e1, so ``transVU`` translates by v - u.
"""

import functools

import numpy as np

from arcflow import l2control, spaces
from arcflow.arcs import ArcField
from arcflow.spaces import (
    CompactSet,
    GridFunction,
    GridSpec,
    euclidean_space,
    grid_space,
    hausdorff_space,
    heisenberg_field,
    make_dilation,
    make_translation,
    rotation_field,
    vector_field_arc,
)


@functools.lru_cache(maxsize=None)
def get_space(space_id, half_width=spaces.DEFAULT_HALF_WIDTH,
              dx=spaces.DEFAULT_DX):
    if space_id == "r1":
        return euclidean_space(1)
    if space_id == "r2":
        return euclidean_space(2)
    if space_id == "r3":
        return euclidean_space(3)
    if space_id == "l2":
        return grid_space(GridSpec(half_width, dx))
    if space_id == "hausdorff":
        return hausdorff_space()
    raise KeyError(f"unknown space id {space_id!r}")


def _unit(dim, axis):
    u = np.zeros(dim)
    u[axis] = 1.0
    return u


def _euclidean_fixtures(space, dim):
    fx = {}
    flows = {}

    def add(key, pair):
        arc, flow = pair
        fx[key] = arc
        flows[key] = flow

    for axis in range(dim):
        add(f"transE{axis + 1}", make_translation(_unit(dim, axis), space,
                                                  name=f"transE{axis + 1}"))
    add("transVU", make_translation(_unit(dim, 0), space, name="transVU"))
    arcU, flowU = make_dilation(np.zeros(dim), space, name="dilArcU")
    arcV, flowV = make_dilation(_unit(dim, 0), space, name="dilArcV")
    fx["dilArcU"], fx["dilArcV"] = arcU, arcV
    # flow-backed dilation fixtures: the exact exponential maps as arcs
    fx["dilU"] = flowU.as_arc_field()
    fx["dilV"] = flowV.as_arc_field()
    flows["dilU"], flows["dilV"] = flowU, flowV
    flows["dilArcU"], flows["dilArcV"] = flowU, flowV
    if dim == 1:
        fx["sinField"] = vector_field_arc(lambda x: np.sin(x), space, "sinField")
        fx["cosField"] = vector_field_arc(lambda x: np.cos(x), space, "cosField")
    if dim == 2:
        fx["rot"] = rotation_field(space)
    if dim == 3:
        heis_arc, heis_flow = heisenberg_field(space)
        fx["heisY"] = heis_arc
        flows["heisY"] = heis_flow
        fx["heisX"] = fx["transE1"]
        flows["heisX"] = flows["transE1"]
    return fx, flows


def _l2_fixtures(space, spec):
    h = GridFunction.gaussian(spec)
    fx = {}
    flows = {}
    for key, builder in (("X", lambda: l2control.l2_X(h, space)),
                         ("Y", lambda: l2control.l2_Y(space)),
                         ("V", lambda: l2control.l2_V(space)),
                         ("W", lambda: l2control.l2_W(space))):
        arc, flow = builder()
        fx[key] = arc
        flows[key] = flow
    from arcflow.hermite import gaussian_derivative
    x = spec.nodes()
    for n in (1, 2):
        gn = GridFunction(spec, gaussian_derivative(n, x))
        fx[f"Z{n}"] = ArcField(
            space, lambda f, t, gn=gn: spaces.grid_axpy(t, gn, f),
            f"Z{n}", is_exact_flow=True)
    return fx, flows


def _hausdorff_fixtures(space):
    fx = {}
    flows = {}
    for key, pair in (
            ("transE1", spaces.set_translation(np.array([1.0, 0.0]), space)),
            ("transE2", spaces.set_translation(np.array([0.0, 1.0]), space)),
            ("dilU", spaces.set_dilation(np.zeros(2), space)),
            ("dilV", spaces.set_dilation(np.array([1.0, 0.0]), space))):
        arc, flow = pair
        fx[key] = arc
        flows[key] = flow
    # the flow-backed dilation arcs, matching the euclidean registry
    fx["dilU"], fx["dilV"] = flows["dilU"].as_arc_field(), flows["dilV"].as_arc_field()
    return fx, flows


@functools.lru_cache(maxsize=None)
def get_registry(space_id, half_width=spaces.DEFAULT_HALF_WIDTH,
                 dx=spaces.DEFAULT_DX):
    """(arc fixtures, flow fixtures) for a space id."""
    space = get_space(space_id, half_width, dx)
    if space_id in ("r1", "r2", "r3"):
        return _euclidean_fixtures(space, int(space_id[1]))
    if space_id == "l2":
        return _l2_fixtures(space, GridSpec(half_width, dx))
    if space_id == "hausdorff":
        return _hausdorff_fixtures(space)
    raise KeyError(f"unknown space id {space_id!r}")


def default_base_point(space_id, half_width=spaces.DEFAULT_HALF_WIDTH,
                       dx=spaces.DEFAULT_DX):
    if space_id in ("r1", "r2", "r3"):
        return np.zeros(int(space_id[1]))
    if space_id == "l2":
        return GridFunction.zero(GridSpec(half_width, dx))
    if space_id == "hausdorff":
        return CompactSet(np.zeros((1, 2)))
    raise KeyError(f"unknown space id {space_id!r}")


def parse_point(space_id, text, half_width=spaces.DEFAULT_HALF_WIDTH,
                dx=spaces.DEFAULT_DX):
    """Parse a CLI point: coordinates for R^n, named functions for l2."""
    if text is None:
        return default_base_point(space_id, half_width, dx)
    if space_id in ("r1", "r2", "r3"):
        coords = np.array([float(c) for c in text.split(",")])
        dim = int(space_id[1])
        if coords.shape != (dim,):
            raise ValueError(f"expected {dim} coordinates, got {coords.shape[0]}")
        return coords
    if space_id == "l2":
        spec = GridSpec(half_width, dx)
        if text == "zero":
            return GridFunction.zero(spec)
        if text == "gauss":
            return GridFunction.gaussian(spec)
        if text == "chi01":
            return GridFunction.indicator(0.0, 1.0, spec)
        raise ValueError(f"unknown l2 point {text!r}; use zero|gauss|chi01")
    if space_id == "hausdorff":
        rows = [tuple(float(c) for c in pair.split(","))
                for pair in text.split(";")]
        return CompactSet(np.array(rows))
    raise KeyError(f"unknown space id {space_id!r}")
