"""Bayesian networks: forward sampling, exact effect oracles, and the two
bundled synthetic benchmark generators.

Group 1 data comes from a fully observed net where the treatment has
observed causes and the outcome depends on the treatment and two binary
covariates, with effect heterogeneity spanning positive, zero and negative
cells. Group 2 adds three hidden variables feeding the outcome side only
(one of them proxied by an observed covariate); their columns are dropped
from the emitted dataset. Both generators append noise columns independent
of everything, half continuous and half binary by default, and report
per-row ground truth: the exact conditional effect given the observed
pretreatment values, and potential outcomes sampled under both arms from a
shared exogenous draw.
"""

import csv
import io
import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from .data import ColumnSpec, Dataset
from .errors import (
    MissingCptRow,
    NonBinary,
    RowSumViolation,
    TNotParent,
    UnknownNode,
)
from .graph import Dag

_ROW_SUM_TOL = 1e-9

RESPONSE_LABELS = ("nonresponse0", "positive", "negative", "nonresponse1")


class BayesNet:
    """DAG plus one conditional probability table per node.

    CPTs are dense arrays of shape (#parent configurations, arity), indexed
    by the row-major flat code over ``cpt_parents[node]`` (a fixed parent
    ordering). ``hidden`` marks nodes that generators sample but do not
    emit as dataset columns.
    """

    def __init__(self, dag, categories, cpts, cpt_parents, hidden=()):
        self.dag = dag
        self.categories = {v: tuple(categories[v]) for v in dag.nodes}
        self.hidden = frozenset(hidden)
        for v in self.hidden:
            if v not in categories:
                raise UnknownNode(v)
        self.cpt_parents = {}
        self.cpts = {}
        for v in dag.nodes:
            if v not in cpts:
                raise MissingCptRow(v)
            order = tuple(cpt_parents.get(v, ()))
            if set(order) != dag.parents(v):
                raise ValueError(
                    f"cpt parent order for {v!r} does not match the graph"
                )
            table = np.asarray(cpts[v], dtype=np.float64)
            n_rows = 1
            for p in order:
                n_rows *= len(self.categories[p])
            if table.shape != (n_rows, len(self.categories[v])):
                raise MissingCptRow(v)
            sums = table.sum(axis=1)
            bad = np.nonzero(np.abs(sums - 1.0) > _ROW_SUM_TOL)[0]
            if bad.size:
                config = self._unflatten(order, int(bad[0]))
                raise RowSumViolation(v, config, float(sums[bad[0]]))
            if (table < 0).any():
                raise ValueError(f"negative probability in CPT of {v!r}")
            self.cpt_parents[v] = order
            self.cpts[v] = table

    def arity(self, v):
        return len(self.categories[v])

    def _unflatten(self, order, flat):
        codes = []
        for p in reversed(order):
            a = self.arity(p)
            codes.append(flat % a)
            flat //= a
        return tuple(
            self.categories[p][c] for p, c in zip(order, reversed(codes))
        )

    def flat_index(self, v, code_of):
        """Row-major flat CPT row index; ``code_of`` maps parent name to
        an int or int array."""
        idx = 0
        for p in self.cpt_parents[v]:
            idx = idx * self.arity(p) + code_of[p]
        return idx

    def __eq__(self, other):
        return (
            isinstance(other, BayesNet)
            and self.dag == other.dag
            and self.categories == other.categories
            and self.hidden == other.hidden
            and self.cpt_parents == other.cpt_parents
            and all(np.array_equal(self.cpts[v], other.cpts[v]) for v in self.dag.nodes)
        )

    # ------------------------------------------------------------------ json

    def to_json(self):
        payload = {
            "nodes": list(self.dag.nodes),
            "edges": [list(e) for e in self.dag.edges],
            "hidden": sorted(self.hidden),
            "categories": {v: list(self.categories[v]) for v in self.dag.nodes},
            "cpt_parents": {v: list(self.cpt_parents[v]) for v in self.dag.nodes},
            "cpts": {v: self.cpts[v].tolist() for v in self.dag.nodes},
        }
        return json.dumps(payload, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        dag = Dag(payload["nodes"], [tuple(e) for e in payload["edges"]])
        return cls(
            dag,
            payload["categories"],
            payload["cpts"],
            payload["cpt_parents"],
            payload.get("hidden", ()),
        )


def _column_kind(net, v):
    if net.categories[v] == ("0", "1"):
        return "binary"
    return "categorical"


def dataset_from_codes(net, codes, roles=None):
    """Wrap sampled code arrays as a Dataset, skipping hidden nodes."""
    roles = roles or {}
    specs = []
    arrays = {}
    for v in net.dag.nodes:
        if v in net.hidden:
            continue
        kind = _column_kind(net, v)
        cats = net.categories[v] if kind == "categorical" else None
        specs.append(ColumnSpec(v, kind, roles.get(v, "covariate"), cats))
        arrays[v] = codes[v]
    return Dataset(specs, arrays)


def sample(net, n, seed):
    """Forward-sample ``n`` rows in topological order; deterministic per seed."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    return dataset_from_codes(net, _forward_sample(net, n, rng))


def _forward_sample(net, n, rng, skip=(), forced=None):
    """Sample every node (except ``skip``) given optional forced columns."""
    codes = {} if forced is None else dict(forced)
    for v in net.dag.topological_order():
        if v in codes:
            continue
        if v in skip:
            continue
        cpt = net.cpts[v]
        idx = net.flat_index(v, codes) if net.cpt_parents[v] else 0
        cdf = np.cumsum(cpt, axis=1)
        rows = cdf[idx] if net.cpt_parents[v] else np.broadcast_to(cdf[0], (n, cpt.shape[1]))
        u = rng.random(n)
        codes[v] = (rows[:, :-1] <= u[:, None]).sum(axis=1).astype(np.int64)
    return codes


def _conditional_effects(net, t, y, observed, n):
    """Exact conditional effect of ``t`` on ``y`` given observed pretreatment
    values, marginalizing hidden nodes by enumeration."""
    if t not in net.dag.parents(y):
        raise TNotParent(t, y)
    if net.arity(y) != 2:
        raise NonBinary(y)
    pre_nodes = [v for v in net.dag.nodes if v not in (t, y)]
    hidden = [v for v in pre_nodes if v in net.hidden]
    for v in pre_nodes:
        if v not in hidden and v not in observed:
            raise UnknownNode(v)

    cpt_y = net.cpts[y]

    def delta(code_of):
        with_t = dict(code_of)
        with_t[t] = 1
        idx1 = net.flat_index(y, with_t)
        with_t[t] = 0
        idx0 = net.flat_index(y, with_t)
        return cpt_y[idx1, 1] - cpt_y[idx0, 1]

    if not hidden:
        out = np.asarray(delta(observed), dtype=np.float64)
        return out if out.shape == (n,) else np.full(n, float(out))

    num = np.zeros(n)
    den = np.zeros(n)
    for config in product(*(range(net.arity(h)) for h in hidden)):
        code_of = dict(observed)
        for h, c in zip(hidden, config):
            code_of[h] = c
        w = np.ones(n)
        for v in pre_nodes:
            idx = net.flat_index(v, code_of) if net.cpt_parents[v] else 0
            vc = code_of[v]
            w = w * np.asarray(net.cpts[v][idx, vc])
        num += w * delta(code_of)
        den += w
    return num / den


def true_effect(net, t, y, row):
    """Conditional effect for one row (a mapping of node name to code)."""
    observed = {
        v: np.asarray([row[v]], dtype=np.int64)
        for v in net.dag.nodes
        if v not in (t, y) and v not in net.hidden
    }
    return float(_conditional_effects(net, t, y, observed, 1)[0])


def true_effects(net, t, y, data):
    """Vectorized conditional effects for every row of a dataset (or a
    mapping of node name to code array)."""
    if isinstance(data, Dataset):
        n = data.n_rows
        observed = {
            v: data.values(v)
            for v in net.dag.nodes
            if v not in (t, y) and v not in net.hidden and v in data
        }
    else:
        observed = dict(data)
        n = len(next(iter(observed.values())))
    return _conditional_effects(net, t, y, observed, n)


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------


@dataclass
class GroundTruth:
    effect: np.ndarray
    response: np.ndarray
    potential_y0: np.ndarray
    potential_y1: np.ndarray

    def __len__(self):
        return len(self.effect)

    def take(self, idx):
        idx = np.asarray(idx)
        return GroundTruth(
            self.effect[idx],
            self.response[idx],
            self.potential_y0[idx],
            self.potential_y1[idx],
        )

    def write_csv(self, path, meta=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if meta:
                fh.write(f"# {meta}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["row", "effect", "response", "potential_y0", "potential_y1"])
            for i in range(len(self.effect)):
                writer.writerow(
                    [
                        i,
                        repr(float(self.effect[i])),
                        self.response[i],
                        int(self.potential_y0[i]),
                        int(self.potential_y1[i]),
                    ]
                )

    @classmethod
    def read_csv(cls, path):
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = [ln for ln in fh.read().splitlines() if not ln.startswith("#")]
        reader = csv.DictReader(io.StringIO("\n".join(lines)))
        effect, response, y0, y1 = [], [], [], []
        for row in reader:
            effect.append(float(row["effect"]))
            response.append(row["response"])
            y0.append(int(row["potential_y0"]))
            y1.append(int(row["potential_y1"]))
        return cls(
            np.array(effect),
            np.array(response, dtype=object),
            np.array(y0, dtype=np.int64),
            np.array(y1, dtype=np.int64),
        )


def response_labels(y0, y1):
    """Map joint potential outcomes to the four response classes."""
    idx = 2 * np.asarray(y0, dtype=np.int64) + np.asarray(y1, dtype=np.int64)
    return np.array(RESPONSE_LABELS, dtype=object)[idx]


# ---------------------------------------------------------------------------
# bundled synthetic networks
# ---------------------------------------------------------------------------


def _bernoulli_cpt(parent_arities, p_of):
    """Rows [1-p, p] for every parent configuration (row-major)."""
    rows = []
    for config in product(*(range(a) for a in parent_arities)):
        p = p_of(*config)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} out of range")
        rows.append([1.0 - p, p])
    return np.array(rows)


def _binary_categories(names):
    return {v: ("0", "1") for v in names}


def group1_network():
    """Fully observed generator: T has observed causes, Y depends on
    (T, X8, X9) with cell effects +0.18 / +0.50 / -0.37 / -0.05."""
    nodes = ["T", "Y"] + [f"X{i}" for i in range(1, 11)]
    edges = [
        ("X1", "X5"),
        ("X7", "X5"),
        ("X3", "X6"),
        ("X5", "T"),
        ("X6", "T"),
        ("X4", "X8"),
        ("X10", "X8"),
        ("X2", "X9"),
        ("X8", "Y"),
        ("X9", "Y"),
        ("T", "Y"),
    ]
    dag = Dag(nodes, edges)
    roots = {"X1": 0.45, "X2": 0.55, "X3": 0.5, "X4": 0.4, "X7": 0.5, "X10": 0.6}
    cpts = {}
    cpt_parents = {}
    for v, p in roots.items():
        cpts[v] = np.array([[1.0 - p, p]])
        cpt_parents[v] = ()
    cpts["X5"] = _bernoulli_cpt((2, 2), lambda x1, x7: 0.2 + 0.35 * x1 + 0.3 * x7)
    cpt_parents["X5"] = ("X1", "X7")
    cpts["X6"] = _bernoulli_cpt((2,), lambda x3: 0.3 + 0.4 * x3)
    cpt_parents["X6"] = ("X3",)
    cpts["X8"] = _bernoulli_cpt((2, 2), lambda x4, x10: 0.15 + 0.35 * x4 + 0.35 * x10)
    cpt_parents["X8"] = ("X4", "X10")
    cpts["X9"] = _bernoulli_cpt((2,), lambda x2: 0.3 + 0.45 * x2)
    cpt_parents["X9"] = ("X2",)
    cpts["T"] = _bernoulli_cpt((2, 2), lambda x5, x6: 0.25 + 0.3 * x5 + 0.2 * x6)
    cpt_parents["T"] = ("X5", "X6")

    # cell effects by (x8, x9): +0.18 / +0.50 / -0.37 / -0.05; heterogeneous
    # signs, no knife-edge zero atom, and margins large enough that no
    # parent's marginal association with Y cancels out (faithfulness would
    # fail otherwise)
    def outcome_p(t, x8, x9):
        base = 0.2 + 0.38 * x8 + 0.2 * x9
        lift = 0.18 + 0.32 * x9 - 0.55 * x8
        return base + t * lift

    cpts["Y"] = _bernoulli_cpt((2, 2, 2), outcome_p)
    cpt_parents["Y"] = ("T", "X8", "X9")
    return BayesNet(dag, _binary_categories(nodes), cpts, cpt_parents)


def group2_network():
    """Hidden-variable generator: U1 confounds X8/X10, U2 and U3 are hidden
    parents of Y, X4 is a strong proxy of U3. The hidden paths never touch
    T, so its propensity stays unconfounded."""
    nodes = ["T", "Y"] + [f"X{i}" for i in range(1, 11)] + ["U1", "U2", "U3"]
    edges = [
        ("X1", "X5"),
        ("X7", "X5"),
        ("X3", "X6"),
        ("X5", "T"),
        ("X6", "T"),
        ("U1", "X8"),
        ("U1", "X10"),
        ("X2", "X9"),
        ("U2", "X9"),
        ("U3", "X4"),
        ("X8", "Y"),
        ("X9", "Y"),
        ("U2", "Y"),
        ("U3", "Y"),
        ("T", "Y"),
    ]
    dag = Dag(nodes, edges)
    roots = {"X1": 0.45, "X2": 0.55, "X3": 0.5, "X7": 0.5, "U1": 0.5, "U2": 0.45, "U3": 0.55}
    cpts = {}
    cpt_parents = {}
    for v, p in roots.items():
        cpts[v] = np.array([[1.0 - p, p]])
        cpt_parents[v] = ()
    cpts["X4"] = _bernoulli_cpt((2,), lambda u3: 0.15 + 0.7 * u3)
    cpt_parents["X4"] = ("U3",)
    cpts["X5"] = _bernoulli_cpt((2, 2), lambda x1, x7: 0.2 + 0.35 * x1 + 0.3 * x7)
    cpt_parents["X5"] = ("X1", "X7")
    cpts["X6"] = _bernoulli_cpt((2,), lambda x3: 0.3 + 0.4 * x3)
    cpt_parents["X6"] = ("X3",)
    cpts["X8"] = _bernoulli_cpt((2,), lambda u1: 0.25 + 0.5 * u1)
    cpt_parents["X8"] = ("U1",)
    cpts["X9"] = _bernoulli_cpt((2, 2), lambda x2, u2: 0.1 + 0.3 * x2 + 0.4 * u2)
    cpt_parents["X9"] = ("X2", "U2")
    cpts["X10"] = _bernoulli_cpt((2,), lambda u1: 0.3 + 0.4 * u1)
    cpt_parents["X10"] = ("U1",)
    cpts["T"] = _bernoulli_cpt((2, 2), lambda x5, x6: 0.25 + 0.3 * x5 + 0.2 * x6)
    cpt_parents["T"] = ("X5", "X6")

    def outcome_p(t, x8, x9, u2, u3):
        base = 0.12 + 0.22 * x8 + 0.14 * u2 + 0.10 * u3
        lift = 0.04 + 0.30 * x9 - 0.26 * x8 + 0.08 * u3
        return base + t * lift

    cpts["Y"] = _bernoulli_cpt((2, 2, 2, 2, 2), outcome_p)
    cpt_parents["Y"] = ("T", "X8", "X9", "U2", "U3")
    return BayesNet(dag, _binary_categories(nodes), cpts, cpt_parents, hidden=("U1", "U2", "U3"))


@dataclass(frozen=True)
class SynthConfig:
    group: str
    seed: int
    n_samples: int = 10000
    n_noise_vars: int = 90
    continuous_fraction: float = 0.5

    def __post_init__(self):
        if self.group not in ("group1", "group2"):
            raise ValueError(f"unknown group {self.group!r}")
        if self.seed is None:
            raise ValueError("seed is required")
        if self.n_samples <= 0:
            raise ValueError("n_samples must be positive")
        if self.n_noise_vars < 0:
            raise ValueError("n_noise_vars must be >= 0")
        if not 0.0 <= self.continuous_fraction <= 1.0:
            raise ValueError("continuous_fraction must be in [0, 1]")


def sample_with_ground_truth(net, t, y, n, rng):
    """Forward-sample every node while tracking exact ground truth for the
    effect of ``t`` on ``y``.

    Potential outcomes for both arms share one exogenous uniform per row,
    so the four response classes are jointly coherent with the factual
    outcome. Requires a childless outcome (otherwise its descendants would
    be inconsistent with the counterfactual draw).
    """
    if t not in net.dag.parents(y):
        raise TNotParent(t, y)
    if net.arity(y) != 2 or net.arity(t) != 2:
        raise NonBinary(y if net.arity(y) != 2 else t)
    if net.dag.descendants(y):
        raise ValueError(f"outcome {y!r} has descendants; ground truth undefined")
    codes = _forward_sample(net, n, rng, skip=(y,))

    cpt_y = net.cpts[y]
    with_t = dict(codes)
    with_t[t] = 1
    p1 = cpt_y[net.flat_index(y, with_t), 1]
    with_t[t] = 0
    p0 = cpt_y[net.flat_index(y, with_t), 1]
    u_y = rng.random(n)
    y1 = (u_y < p1).astype(np.int64)
    y0 = (u_y < p0).astype(np.int64)
    codes[y] = np.where(codes[t] == 1, y1, y0)

    observed = {
        v: codes[v] for v in net.dag.nodes if v not in (t, y) and v not in net.hidden
    }
    effect = _conditional_effects(net, t, y, observed, n)
    truth = GroundTruth(
        effect=effect,
        response=response_labels(y0, y1),
        potential_y0=y0,
        potential_y1=y1,
    )
    return codes, truth


def generate_group(cfg):
    """Sample a benchmark dataset with ground truth.

    Returns (dataset, ground_truth, net). Hidden columns (group2) are
    sampled but not emitted.
    """
    net = group1_network() if cfg.group == "group1" else group2_network()
    n = cfg.n_samples
    rng = np.random.default_rng(cfg.seed)
    codes, truth = sample_with_ground_truth(net, "T", "Y", n, rng)

    n_cont = int(round(cfg.continuous_fraction * cfg.n_noise_vars))
    specs = [
        ColumnSpec("T", "binary", "treatment"),
        ColumnSpec("Y", "binary", "outcome"),
    ]
    arrays = {"T": codes["T"], "Y": codes["Y"]}
    for i in range(1, 11):
        name = f"X{i}"
        specs.append(ColumnSpec(name, "binary", "covariate"))
        arrays[name] = codes[name]
    for i in range(1, cfg.n_noise_vars + 1):
        name = f"N{i}"
        if i <= n_cont:
            specs.append(ColumnSpec(name, "continuous", "noise"))
            arrays[name] = rng.standard_normal(n)
        else:
            specs.append(ColumnSpec(name, "binary", "noise"))
            arrays[name] = rng.integers(0, 2, size=n).astype(np.int64)
    return Dataset(specs, arrays), truth, net
