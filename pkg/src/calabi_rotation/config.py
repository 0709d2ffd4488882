"""Strict JSON run configuration.

The schema lives next to this module in ``config.schema.json``; unknown keys
anywhere in the document are rejected.  Missing optional sections are filled
from ``DEFAULTS`` so that the echoed configuration in a report is complete.
"""
import copy
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema

from . import hamiltonian as hm
from .errors import ConfigError, DomainError

DEFAULTS = {
    "estimator": {
        "samples": 100_000,
        "seed": 0,
        "workers": 1,
        "chunk_size": 8192,
        "tolerance": 1e-10,
        "max_step": None,
        "calabi_orders": [64, 64, 32],
        "radial_order": 64,
    },
    "experiments": ["all"],
    "diagnostics": {
        "jacobian_points": 20,
        "lemma1_samples": 20_000,
        "symmetry_samples": 20_000,
        "cauchy_points": 4,
        "times": [0.0, 0.5, 1.0],
    },
    "assertions": {
        "sigma_multiplier": 3.0,
        "max_relative_residual": None,
        "max_relative_stderr": None,
        "calabi_tolerance": 1e-10,
        "jacobian_tolerance": 1e-6,
        "cauchy_tolerance": 1e-6,
    },
    "output": {
        "report": "report.json",
        "trace_pairs": [[[0.5, 0.0], [-0.3, 0.2]], [[0.1, 0.6], [0.0, -0.45]]],
    },
}


def schema():
    text = resources.files(__package__).joinpath("config.schema.json").read_text()
    return json.loads(text)


def build_hamiltonian(node):
    """HamiltonianSpec from a validated ``{"name": ..., "params": [...]}`` node."""
    name = node["name"]
    params = list(node.get("params", []))
    extra = set(node) - {"name", "params"}

    def expect(n_params, keys=()):
        if (n_params is not None and len(params) != n_params) or extra != set(keys):
            want = f"{n_params} params" if n_params is not None else "params"
            raise ConfigError(f"{name} takes {want}" + (f" and {sorted(keys)}" if keys else ""))

    try:
        if name == "zero":
            expect(0)
            return hm.zero()
        if name == "radial-polynomial":
            expect(3)
            a, k, rho = params
            if k != int(k):
                raise ConfigError("radial-polynomial exponent k must be an integer")
            return hm.radial_polynomial(a, int(k), rho)
        if name == "radial-bump":
            expect(2)
            return hm.radial_bump(*params)
        if name == "moving-bump":
            keys = {"support_radius"} & extra
            expect(3, keys)
            return hm.moving_bump(*params, rho=node.get("support_radius"))
        if name == "time-scaled":
            if not params:
                raise ConfigError("time-scaled needs at least one coefficient")
            expect(None, {"inner"})
            return hm.time_scaled(params, build_hamiltonian(node["inner"]))
        expect(0, {"first", "second"})
        return hm.concatenate(build_hamiltonian(node["first"]), build_hamiltonian(node["second"]))
    except DomainError as exc:
        raise ConfigError(f"invalid {name} Hamiltonian: {exc}") from exc


def _merge(defaults, given):
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration plus the Hamiltonian it describes."""

    document: dict
    hamiltonian: object

    @property
    def estimator(self):
        return self.document["estimator"]

    @property
    def diagnostics(self):
        return self.document["diagnostics"]

    @property
    def assertions(self):
        return self.document["assertions"]

    @property
    def output(self):
        return self.document["output"]

    @property
    def experiments(self):
        names = set(self.document["experiments"])
        if "all" in names:
            return ("theorem-check", "diagnostics")
        return tuple(e for e in ("theorem-check", "diagnostics") if e in names)


def parse_config(document, seed=None, samples=None, workers=None):
    """Validate a decoded JSON document and apply command-line overrides."""
    try:
        jsonschema.validate(document, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    doc = _merge(DEFAULTS, document)
    for key, value in (("seed", seed), ("samples", samples), ("workers", workers)):
        if value is not None:
            doc["estimator"][key] = value
    est = doc["estimator"]
    if est["seed"] < 0 or est["samples"] < 100 or est["workers"] < 1:
        raise ConfigError("need seed >= 0, samples >= 100 and workers >= 1")
    for pair in doc["output"]["trace_pairs"]:
        for x, y in pair:
            if x * x + y * y >= 1.0:
                raise ConfigError("trace pair points must lie in the open unit disc")
        if pair[0] == pair[1]:
            raise ConfigError("trace pair points must be distinct")
    return RunConfig(doc, build_hamiltonian(doc["hamiltonian"]))


def _reject_duplicates(pairs):
    keys = [k for k, _ in pairs]
    dup = {k for k in keys if keys.count(k) > 1}
    if dup:
        raise ConfigError(f"duplicate key(s) {sorted(dup)}")
    return dict(pairs)


def load_config(path, **overrides):
    """Read, decode and validate a config file.  Every failure is a ConfigError."""
    try:
        with open(path) as fh:
            document = json.load(fh, object_pairs_hook=_reject_duplicates)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    return parse_config(document, **overrides)
