"""Experiment configuration: one JSON document drives every CLI command.

The schema is enforced before any work starts; validation failures carry
the JSON path of the offending field. See docs/config_schema.md for the
field dictionary.
"""

import copy
import json

import jsonschema

from ..envs.config import OBSERVABILITIES, REPRESENTATIONS, EnvConfig
from ..envs.generators import FAMILIES
from ..rl.sac import SACConfig


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2 at the CLI)."""


_HIDDEN = {"type": "array", "items": {"type": "integer", "minimum": 1},
           "minItems": 0, "maxItems": 8}

ENV_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["family"],
    "properties": {
        "family": {"enum": sorted(FAMILIES)},
        "body": {"enum": ["sphere", "s_shape"]},
        "sphere_radius": {"type": "number", "exclusiveMinimum": 0},
        "reward_goal": {"type": "number", "exclusiveMinimum": 0},
        "reward_free": {"type": "number", "exclusiveMaximum": 0},
        "reward_collision": {"type": "number", "exclusiveMaximum": 0},
        "goal_tolerance": {"type": "number", "exclusiveMinimum": 0},
        "max_linear_speed": {"type": "number", "exclusiveMinimum": 0},
        "max_angular_speed": {"type": "number", "exclusiveMinimum": 0},
        "rotation_weight": {"type": "number", "minimum": 0},
        "substep": {"type": "number", "exclusiveMinimum": 0},
        "max_steps": {"type": "integer", "minimum": 1},
        "cloud_size": {"type": "integer", "minimum": 1},
        "representation": {"enum": list(REPRESENTATIONS)},
        "observability": {"enum": list(OBSERVABILITIES)},
        "ray_count": {"type": "integer", "minimum": 1},
        "image_resolution": {"type": "integer", "minimum": 8},
    },
}

NETWORK_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["pointnet", "mlp", "cnn"]},
        "point_hidden": _HIDDEN,
        "feature_size": {"type": "integer", "minimum": 1},
        "head_hidden": _HIDDEN,
        "cnn_channels": {"type": "integer", "minimum": 1},
    },
}

RL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "lr": {"type": "number", "exclusiveMinimum": 0},
        "batch_size": {"type": "integer", "minimum": 1},
        "discount": {"type": "number", "exclusiveMinimum": 0,
                     "exclusiveMaximum": 1},
        "polyak": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "target_entropy": {"type": ["number", "null"]},
        "init_alpha": {"type": "number", "exclusiveMinimum": 0},
        "buffer_capacity": {"type": "integer", "minimum": 1},
        "her_fraction": {"type": "number", "minimum": 0, "maximum": 1},
        "her_strategy": {"enum": ["future", "rollout"]},
        "updates_per_step": {"type": "number", "minimum": 0},
        "warmup_steps": {"type": "integer", "minimum": 0},
        "warmup_random_steps": {"type": "integer", "minimum": 0},
        "total_steps": {"type": "integer", "minimum": 1},
        "eval_every": {"type": "integer", "minimum": 1},
        "eval_episodes": {"type": "integer", "minimum": 1},
    },
}

BC_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "demo_steps": {"type": "integer", "minimum": 1},
        "epochs": {"type": "integer", "minimum": 1},
        "lr": {"type": "number", "exclusiveMinimum": 0},
        "batch_size": {"type": "integer", "minimum": 1},
        "planner_budget": {"type": "integer", "minimum": 1},
    },
}

PLANNER_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "budget": {"type": "integer", "minimum": 1},
        "shortcut_iters": {"type": "integer", "minimum": 0},
        "goal_bias": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

METHOD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["learner"],
    "properties": {
        "name": {"type": "string"},
        "learner": {"enum": ["rl", "bc", "straight_line", "birrt"]},
        "network": NETWORK_SCHEMA,
        "rl": RL_SCHEMA,
        "bc": BC_SCHEMA,
        "planner": PLANNER_SCHEMA,
    },
}

EXPERIMENT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "seed", "env"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "out_dir": {"type": "string"},
        "env": ENV_SCHEMA,
        "learner": {"enum": ["rl", "bc", "straight_line", "birrt"]},
        "network": NETWORK_SCHEMA,
        "rl": RL_SCHEMA,
        "bc": BC_SCHEMA,
        "planner": PLANNER_SCHEMA,
        "eval_problems": {"type": "integer", "minimum": 1},
        "eval_problem_seed": {"type": "integer", "minimum": 0},
        "methods": {"type": "array", "items": METHOD_SCHEMA, "minItems": 1},
    },
}

DEFAULT_NETWORK = {"kind": "pointnet", "point_hidden": [256, 256],
                   "feature_size": 256, "head_hidden": [256, 256, 256]}
DEFAULT_BC = {"demo_steps": 100_000, "epochs": 60, "lr": 1e-3,
              "batch_size": 256, "planner_budget": 50_000}
DEFAULT_PLANNER = {"budget": 50_000, "shortcut_iters": 100, "goal_bias": 0.05}


def _check_consistency(doc):
    env = doc["env"]
    family = FAMILIES[env["family"]]
    rep = env.get("representation", "boundary_normals")
    obs = env.get("observability", "global")
    body = env.get("body", family.default_body)
    net = doc.get("network", {}).get("kind", "pointnet")
    if body == "s_shape" and family.dim != 3:
        raise ConfigError("env.body: the S-shape body needs a 3D family")
    if rep == "image":
        if family.dim != 2:
            raise ConfigError("env.representation: image mode is 2D-only")
        if net != "cnn":
            raise ConfigError("network.kind: image observations need cnn")
    else:
        if net == "cnn":
            raise ConfigError("network.kind: cnn needs image observations")
    if obs == "local" and rep != "boundary_normals":
        raise ConfigError(
            "env.observability: local sensing produces oriented points; "
            "set representation to boundary_normals")
    for i, method in enumerate(doc.get("methods", [])):
        sub = dict(doc, **{k: v for k, v in method.items() if k != "name"})
        sub.pop("methods", None)
        _check_consistency(sub)


def validate(doc):
    """Schema-validate an experiment document; raises ConfigError."""
    try:
        jsonschema.validate(doc, EXPERIMENT_SCHEMA)
    except jsonschema.ValidationError as e:
        path = "$" + "".join(f".{p}" if isinstance(p, str) else f"[{p}]"
                             for p in e.absolute_path)
        raise ConfigError(f"{path}: {e.message}") from None
    if "methods" not in doc and "learner" not in doc:
        raise ConfigError("$: either 'learner' or 'methods' is required")
    _check_consistency(doc)
    return doc


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from None
    return validate(doc)


def env_config_of(doc):
    env = dict(doc["env"])
    family = FAMILIES[env.pop("family")]
    env.pop("body", None)
    env.pop("sphere_radius", None)
    env.setdefault("max_steps", family.default_max_steps)
    return EnvConfig(**env)


def sac_config_of(doc):
    return SACConfig(**doc.get("rl", {}))


def network_of(doc):
    net = dict(DEFAULT_NETWORK)
    net.update(doc.get("network", {}))
    return net


def bc_of(doc):
    bc = dict(DEFAULT_BC)
    bc.update(doc.get("bc", {}))
    return bc


def planner_of(doc):
    pl = dict(DEFAULT_PLANNER)
    pl.update(doc.get("planner", {}))
    return pl


def method_documents(doc):
    """Expand a multi-method document into per-method experiment docs."""
    if "methods" not in doc:
        return [(doc.get("name", "method"), doc)]
    out = []
    for i, method in enumerate(doc["methods"]):
        sub = copy.deepcopy(doc)
        sub.pop("methods")
        name = method.get("name", f"{method['learner']}_{i}")
        for key, value in method.items():
            if key != "name":
                sub[key] = value
        sub["name"] = name
        out.append((name, sub))
    return out
