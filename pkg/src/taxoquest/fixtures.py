"""Bundled ten-vertex demo hierarchy and its frozen reference gain tables.

The reference values below are the known-good per-round gain numbers for
two scripted walkthroughs on the demo tree (single target v5 with budget 2,
and targets {v5, v8} with budget 2 and two selections).  verify-fixtures
recomputes both walkthroughs cell by cell against these constants.
"""

from __future__ import annotations

from importlib import resources

from .hierarchy import Hierarchy, load_hierarchy

DEMO_LABELS = ["v0", "v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8", "v9"]


def demo_hierarchy() -> Hierarchy:
    """The packaged 10-vertex demo tree."""
    data = resources.files("taxoquest").joinpath("data/demo10.tsv").read_text()
    return load_hierarchy(data, "edge-list")


# Single-target walkthrough: T = {v5}, b = 2.  Round one sees the full tree;
# the reference says v3 is asked, the answer is No, and the second round runs
# on the six survivors.  Keys are vertex labels.
SINGLE_ROUND1 = {
    "g_yes": {"v1": 9, "v2": 20, "v3": 17, "v4": 20, "v5": 19,
              "v6": 20, "v7": 20, "v8": 20, "v9": 20},
    "g_no": {"v1": 19, "v2": 1, "v3": 11, "v4": 2, "v5": 5,
             "v6": 3, "v7": 3, "v8": 3, "v9": 3},
    "p_yes": {"v1": 0.8, "v2": 0.1, "v3": 0.4, "v4": 0.1, "v5": 0.2,
              "v6": 0.1, "v7": 0.1, "v8": 0.1, "v9": 0.1},
    "p_no": {"v1": 0.2, "v2": 0.9, "v3": 0.6, "v4": 0.9, "v5": 0.8,
             "v6": 0.9, "v7": 0.9, "v8": 0.9, "v9": 0.9},
    "gain": {"v1": 11, "v2": 2.9, "v3": 13.4, "v4": 3.8, "v5": 7.8,
             "v6": 4.7, "v7": 4.7, "v8": 4.7, "v9": 4.7},
}
SINGLE_QUESTION1 = "v3"
SINGLE_ANSWER1 = "No"
SINGLE_ROUND2_GAIN = {"v1": 6, "v2": 2.33, "v4": 3.17, "v5": 6, "v9": 4}
SINGLE_QUESTION2 = "v5"

# Multi-target walkthrough: T = {v5, v8}, b = 2, k = 2.  Round one asks v3
# (answer Yes), round two asks v5 (answer Yes), and the final selection is
# {v3, v5} at penalty 1 against the true targets.
MULTI_ROUND1 = {
    "g_yes": {"v1": 8, "v2": 1, "v3": 12, "v4": 9, "v5": 10,
              "v6": 12, "v7": 12, "v8": 12, "v9": 11},
    "g_no": {"v1": 19, "v2": 1, "v3": 11, "v4": 2, "v5": 5,
             "v6": 3, "v7": 3, "v8": 3, "v9": 3},
    "gain": {"v1": 9.85, "v2": 1, "v3": 11.59, "v4": 3.4, "v5": 6.8,
             "v6": 4.8, "v7": 4.8, "v8": 4.8, "v9": 4.6},
}
MULTI_QUESTION1 = "v3"
MULTI_ANSWER1 = "Yes"
MULTI_ROUND2 = {
    "g_yes": {"v2": 0, "v4": 0, "v5": 1, "v6": 0, "v7": 0, "v8": 0, "v9": 2},
    "g_no": {"v2": 1, "v4": 1, "v5": 3, "v6": 1, "v7": 1, "v8": 1, "v9": 2},
    "gain": {"v2": 0.75, "v4": 0.75, "v5": 2.12, "v6": 0.75, "v7": 0.75,
             "v8": 0.75, "v9": 2},
}
MULTI_QUESTION2 = "v5"
MULTI_ANSWER2 = "Yes"
MULTI_FINAL_SELECTION = ("v3", "v5")
MULTI_FINAL_PENALTY = 1

# Vertices with no gain row in round two: pruned from the potential set, or
# (multi, v3) already confirmed and hence outside the candidate pool.
SINGLE_ROUND2_PRUNED = ("v3", "v6", "v7", "v8")
MULTI_ROUND2_EXCLUDED = ("v1", "v3")

# Printed reference values carry at most two decimals; a recomputed cell
# matches when it rounds to the printed value under that precision.
CELL_TOLERANCE = 0.005
