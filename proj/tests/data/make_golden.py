"""Regenerates the golden evaluation fixture and its expected report.

Metrics here are computed independently of the C++ code.
"""
import json
import os
import re

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = ["center", "grid_2x2", "grid_3x3", "o_ic", "o_ig", "l_r", "u_d"]


def tokenize(s):
    return re.findall(r"[\[\],;|]|[^\s\[\],;|]+", s)


def entity(box, t, s, c, a):
    return "[%s], %d, %d, %d, %d" % (", ".join(box), t, s, c, a)


CENTER = ("0.5", "0.5", "1", "1")
LEFT = ("0.25", "0.5", "0.5", "1")
RIGHT = ("0.75", "0.5", "0.5", "1")


def constant_rules(components):
    slot = lambda attr: {"attribute": attr, "rule": "constant", "param": 0}
    return [{"number_position": slot("number"), "type": slot("type"),
             "size": slot("size"), "color": slot("color")} for _ in range(components)]


def problem(pid, config, components, answers, correct):
    return {"id": pid, "config": config, "assignments": constant_rules(components),
            "context": [answers[correct]] * 8, "answer_set": answers,
            "correct_index": correct, "rules_present": ["constant"]}


problems = [
    problem("center_0", "center", 1,
            [entity(CENTER, *v) for v in [(3, 3, 5, 7), (3, 3, 6, 7), (3, 2, 5, 7), (3, 2, 6, 7),
                                          (4, 3, 5, 7), (4, 3, 6, 7), (4, 2, 5, 7), (4, 2, 6, 7)]], 0),
    problem("center_1", "center", 1,
            [entity(CENTER, *v) for v in [(1, 0, 0, 0), (1, 0, 1, 0), (2, 0, 0, 0), (2, 0, 1, 0),
                                          (1, 1, 0, 0), (1, 1, 1, 0), (2, 1, 0, 0), (2, 1, 1, 0)]], 2),
    problem("l_r_0", "l_r", 2,
            [entity(LEFT, t, 2, 3, 4) + "; " + entity(RIGHT, 5, s, c, 2)
             for t, s, c in [(2, 4, 3), (1, 5, 3), (2, 5, 3), (1, 4, 6),
                             (2, 4, 6), (1, 4, 3), (1, 5, 6), (2, 5, 6)]], 5),
]

predictions = [
    {"id": "center_0", "tokens": problems[0]["answer_set"][0]},
    {"id": "center_1", "tokens": tokenize(entity(CENTER, 1, 0, 0, 0))},
    {"id": "l_r_0", "tokens": entity(LEFT, 1, 2, 3, 4)},
]


def edit(a, b):
    d = [[i + j if i * j == 0 else 0 for j in range(len(b) + 1)] for i in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


def f1(p, r):
    from collections import Counter
    o = sum((Counter(p) & Counter(r)).values())
    if o == 0:
        return 0.0
    pr, rc = o / len(p), o / len(r)
    return 2 * pr * rc / (pr + rc)


cells = {}
for prob, pred in zip(problems, predictions):
    toks = pred["tokens"] if isinstance(pred["tokens"], list) else tokenize(pred["tokens"])
    ref = tokenize(prob["answer_set"][prob["correct_index"]])
    choices = [tokenize(c) for c in prob["answer_set"]]
    dists = [edit(toks, c) for c in choices]
    pick = dists.index(min(dists))
    acc = sum(1 for i in range(len(ref)) if i < len(toks) and toks[i] == ref[i]) / len(ref)
    row = cells.setdefault(prob["config"], [])
    row.append((acc, float(pick == prob["correct_index"]), f1(toks, ref), edit(toks, ref) / len(ref)))


def mean_cell(rows):
    n = len(rows)
    return {"count": n, "token_accuracy": sum(r[0] for r in rows) / n,
            "choice_accuracy": sum(r[1] for r in rows) / n,
            "f1": sum(r[2] for r in rows) / n, "ter": sum(r[3] for r in rows) / n}


configurations = {c: (mean_cell(cells[c]) if c in cells else None) for c in CONFIGS}
present = [v for v in configurations.values() if v]
average = {"count": sum(v["count"] for v in present)}
for k in ["token_accuracy", "choice_accuracy", "f1", "ter"]:
    average[k] = sum(v[k] for v in present) / len(present)

report = {"model": "golden", "scenario": "fixture", "predictions": len(predictions),
          "configurations": configurations, "average": average, "missing_ids": []}

with open(os.path.join(HERE, "golden_fixture.jsonl"), "w") as f:
    f.write(json.dumps({"meta": {"tool": "hand-written fixture"}}) + "\n")
    for p in problems:
        f.write(json.dumps(p) + "\n")
with open(os.path.join(HERE, "golden_predictions.jsonl"), "w") as f:
    for p in predictions:
        f.write(json.dumps(p) + "\n")
with open(os.path.join(HERE, "golden_report.json"), "w") as f:
    json.dump(report, f, indent=2)
    f.write("\n")
print(json.dumps(report, indent=2))
