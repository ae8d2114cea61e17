"""JSON instance and report files.

Every number is written as a decimal string with 12 significant digits
and every object has a fixed key order, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import json
from typing import Any

from .discretizer import Certificate, DiscretizationResult
from .instances import (band_distribution, gen_kstep_tight, gen_loss_tight,
                        gen_product)
from .model import (ContinuousDistribution, DiscreteTypeDistribution,
                    PricingFunction, Report, Segment, SeparationLine)

SCHEMA = 1
GENERATORS = ("kstep-tight", "loss-tight", "band", "product")


class FileFormatError(ValueError):
    pass


def num(x: float) -> str:
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def parse_num(x, what="number") -> float:
    try:
        return float(x)
    except (TypeError, ValueError):
        raise FileFormatError(f"bad {what}: {x!r}") from None


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    if data.get("schema", SCHEMA) != SCHEMA:
        raise FileFormatError(f"{path}: unsupported schema {data.get('schema')!r}")
    return data


# -- instances ---------------------------------------------------------------


def discrete_to_dict(dist: DiscreteTypeDistribution) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "discrete",
        "types": [{"theta": num(b.theta), "v": num(b.v), "prob": num(b.prob)}
                  for b in dist.types],
    }


def generator_to_dict(name: str, params: dict[str, Any]) -> dict:
    return {"schema": SCHEMA, "kind": "generator", "name": name,
            "params": {k: params[k] for k in sorted(params)}}


def _pairs(items, what):
    try:
        return [(parse_num(a, what), parse_num(b, what)) for a, b in items]
    except (TypeError, ValueError) as e:
        raise FileFormatError(f"bad {what} marginal: {e}") from None


def build_generator(name: str, params: dict[str, Any]):
    """Materialize a generator reference into a distribution."""
    p = dict(params)
    try:
        if name == "kstep-tight":
            return gen_kstep_tight(int(parse_num(p["k"])), parse_num(p["r"]), parse_num(p["eps"]))
        if name == "loss-tight":
            return gen_loss_tight(int(parse_num(p["k"])), parse_num(p.get("d", 1e4)),
                                  parse_num(p.get("eps", 1e-6)))
        if name == "band":
            return band_distribution()
        if name == "product":
            return gen_product(_pairs(p["theta"], "theta"), _pairs(p["v"], "v"))
    except KeyError as e:
        raise FileFormatError(f"generator {name!r} needs parameter {e.args[0]!r}") from None
    raise FileFormatError(f"unknown generator {name!r}; expected one of {', '.join(GENERATORS)}")


def instance_from_dict(data: dict) -> DiscreteTypeDistribution | ContinuousDistribution:
    kind = data.get("kind")
    if kind == "discrete":
        types = data.get("types")
        if not isinstance(types, list):
            raise FileFormatError("discrete instance needs a 'types' list")
        try:
            triples = [(parse_num(t["theta"], "theta"), parse_num(t["v"], "v"),
                        parse_num(t["prob"], "prob")) for t in types]
        except (KeyError, TypeError) as e:
            raise FileFormatError(f"type entries need theta, v and prob ({e})") from None
        return DiscreteTypeDistribution.from_triples(triples)
    if kind == "generator":
        return build_generator(data.get("name"), data.get("params") or {})
    raise FileFormatError(f"unknown instance kind {kind!r}")


def load_instance(path: str):
    return instance_from_dict(read_json(path))


# -- reports -----------------------------------------------------------------


def line_to_list(line: SeparationLine) -> list[dict]:
    return [{"slope": num(s.slope), "intercept": num(s.intercept)} for s in line.segments]


def pricing_to_list(p: PricingFunction) -> list[dict]:
    return [{"time": num(t), "price": num(price)} for t, price in p.steps]


def line_from_list(items) -> SeparationLine:
    try:
        return SeparationLine(tuple(Segment(parse_num(s["slope"]), parse_num(s["intercept"]))
                                    for s in items))
    except (KeyError, TypeError) as e:
        raise FileFormatError(f"bad line entry ({e})") from None


def report_to_dict(solver: str, line: SeparationLine, pricing: PricingFunction,
                   report: Report, certificate: Certificate | None = None,
                   extra: dict | None = None) -> dict:
    out = {
        "schema": SCHEMA,
        "solver": solver,
        "revenue": num(report.revenue),
        "time_loss": num(report.time_loss),
        "line": line_to_list(line),
        "pricing": pricing_to_list(pricing),
        "decisions": [
            {"theta": num(d.buyer.theta), "v": num(d.buyer.v), "prob": num(d.buyer.prob),
             "buys": d.buys, "time": num(d.time), "payment": num(d.payment)}
            for d in report.decisions
        ],
    }
    if certificate is not None:
        disc = certificate.discretization
        out["certification"] = {
            "epsilon": num(disc.epsilon),
            "eta": num(disc.eta),
            "error_bound": num(certificate.error_bound),
            "continuous_lower": num(certificate.lower),
            "continuous_upper": num(certificate.upper),
        }
    if extra:
        out.update(extra)
    return out


def discretization_to_dict(res: DiscretizationResult) -> dict:
    out = discrete_to_dict(res.dist)
    out["discretization"] = {
        "epsilon": num(res.epsilon),
        "eta": num(res.eta),
        "error_bound": num(res.error_bound),
        "v_max": num(res.v_max),
        "raw_mass": num(res.raw_mass),
    }
    return out
