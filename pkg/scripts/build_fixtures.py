"""Regenerate the bundled fixtures under src/causaluplift/fixtures/.

Run from the repo root: python3 scripts/build_fixtures.py
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from causaluplift.bif import emit_bif, parse_bif  # noqa: E402
from causaluplift.datagen import BayesNet, _bernoulli_cpt  # noqa: E402
from causaluplift.graph import Dag  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "src", "causaluplift", "fixtures")


def pretreatment_example():
    """Small DAG matching the pretreatment setting: P8/P9 are parents of Y,
    P1/P2 are isolated, P3..P9 are ancestors of T and/or Y."""
    nodes = [f"P{i}" for i in range(1, 10)] + ["T", "Y"]
    edges = [
        ("P3", "T"),
        ("P4", "T"),
        ("P5", "T"),
        ("P4", "P8"),
        ("P6", "P8"),
        ("P7", "P9"),
        ("P8", "Y"),
        ("P9", "Y"),
        ("T", "Y"),
    ]
    return Dag(nodes, edges)


def clinic20_network():
    """20-node benchmark net with a childless referral target (3 parents)."""
    b = ("0", "1")
    t3 = ("low", "mid", "high")
    categories = {
        "Age": t3,
        "Diet": t3,
        "Smoker": b,
        "Exercise": b,
        "FamilyHistory": b,
        "Stress": b,
        "Obesity": b,
        "BloodPressure": b,
        "Cholesterol": b,
        "Diabetes": b,
        "HeartDisease": b,
        "Angina": b,
        "HeartRate": b,
        "ChestPain": b,
        "Breathless": b,
        "ECGAbnormal": b,
        "EnzymeHigh": b,
        "Fatigue": b,
        "Recovery": b,
        "Referral": b,
    }
    nodes = list(categories)
    edges = [
        ("Diet", "Obesity"),
        ("Exercise", "Obesity"),
        ("Age", "BloodPressure"),
        ("Stress", "BloodPressure"),
        ("Diet", "Cholesterol"),
        ("Smoker", "Cholesterol"),
        ("Obesity", "Diabetes"),
        ("FamilyHistory", "Diabetes"),
        ("BloodPressure", "HeartDisease"),
        ("Cholesterol", "HeartDisease"),
        ("HeartDisease", "Angina"),
        ("Exercise", "Angina"),
        ("HeartDisease", "HeartRate"),
        ("Stress", "HeartRate"),
        ("Angina", "ChestPain"),
        ("HeartDisease", "Breathless"),
        ("Obesity", "Breathless"),
        ("HeartDisease", "ECGAbnormal"),
        ("HeartDisease", "EnzymeHigh"),
        ("Diabetes", "Fatigue"),
        ("Stress", "Fatigue"),
        ("EnzymeHigh", "Recovery"),
        ("ChestPain", "Referral"),
        ("ECGAbnormal", "Referral"),
        ("Breathless", "Referral"),
    ]
    dag = Dag(nodes, edges)

    cpts = {}
    parents = {}

    def root(name, row):
        cpts[name] = np.array([row])
        parents[name] = ()

    root("Age", [0.3, 0.4, 0.3])
    root("Diet", [0.35, 0.4, 0.25])
    root("Smoker", [0.6, 0.4])
    root("Exercise", [0.45, 0.55])
    root("FamilyHistory", [0.7, 0.3])
    root("Stress", [0.55, 0.45])

    def binary(name, parent_names, fn):
        arities = tuple(len(categories[p]) for p in parent_names)
        cpts[name] = _bernoulli_cpt(arities, fn)
        parents[name] = tuple(parent_names)

    binary("Obesity", ["Diet", "Exercise"], lambda d, e: 0.15 + 0.22 * d - 0.12 * e + 0.12)
    binary("BloodPressure", ["Age", "Stress"], lambda a, s: 0.12 + 0.18 * a + 0.25 * s)
    binary("Cholesterol", ["Diet", "Smoker"], lambda d, s: 0.12 + 0.16 * d + 0.3 * s)
    binary("Diabetes", ["Obesity", "FamilyHistory"], lambda o, f: 0.1 + 0.35 * o + 0.3 * f)
    binary(
        "HeartDisease",
        ["BloodPressure", "Cholesterol"],
        lambda b_, c: 0.08 + 0.35 * b_ + 0.35 * c,
    )
    binary("Angina", ["HeartDisease", "Exercise"], lambda h, e: 0.12 + 0.55 * h - 0.07 * e + 0.07)
    binary("HeartRate", ["HeartDisease", "Stress"], lambda h, s: 0.15 + 0.35 * h + 0.3 * s)
    binary("ChestPain", ["Angina"], lambda a: 0.12 + 0.65 * a)
    binary(
        "Breathless",
        ["HeartDisease", "Obesity"],
        lambda h, o: 0.1 + 0.45 * h + 0.3 * o,
    )
    binary("ECGAbnormal", ["HeartDisease"], lambda h: 0.1 + 0.65 * h)
    binary("EnzymeHigh", ["HeartDisease"], lambda h: 0.12 + 0.6 * h)
    binary("Fatigue", ["Diabetes", "Stress"], lambda d, s: 0.15 + 0.35 * d + 0.3 * s)
    binary("Recovery", ["EnzymeHigh"], lambda e: 0.75 - 0.5 * e)
    binary(
        "Referral",
        ["ChestPain", "ECGAbnormal", "Breathless"],
        lambda c, e, b_: 0.06 + 0.32 * c + 0.3 * e + 0.25 * b_,
    )
    return BayesNet(dag, categories, cpts, parents)


def main():
    os.makedirs(FIXTURES, exist_ok=True)

    dag = pretreatment_example()
    with open(os.path.join(FIXTURES, "pretreatment_example.json"), "w") as fh:
        fh.write(dag.to_json())

    net = clinic20_network()
    text = emit_bif(net, name="clinic20")
    assert parse_bif(text) == net, "fixture does not round-trip"
    with open(os.path.join(FIXTURES, "clinic20.bif"), "w") as fh:
        fh.write(text)
    print("wrote fixtures to", FIXTURES)


if __name__ == "__main__":
    main()
