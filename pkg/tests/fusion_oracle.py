"""Hand-written truth table for the fusion rule.

Keyed by (labels agree, s_p > t_p, s_i > t_i, sign of s_p - s_i); the
value is the expected (accepted, branch or deny reason, label source).
"""

import itertools

import numpy as np

A, P, I = "AGREED", "PCA", "ICA"
DA, DP, DI = "agreed-below-threshold", "pca-below-threshold", "ica-below-threshold"

TABLE = {
    # agree   p>tp   i>ti   cmp   -> accepted, branch/reason, label from
    (True,  True,  True,  +1): (True,  A,  "p"),
    (True,  True,  True,   0): (True,  A,  "p"),
    (True,  True,  True,  -1): (True,  A,  "p"),
    (True,  True,  False, +1): (False, DA, None),
    (True,  True,  False,  0): (False, DA, None),
    (True,  True,  False, -1): (False, DA, None),
    (True,  False, True,  +1): (False, DA, None),
    (True,  False, True,   0): (False, DA, None),
    (True,  False, True,  -1): (False, DA, None),
    (True,  False, False, +1): (False, DA, None),
    (True,  False, False,  0): (False, DA, None),
    (True,  False, False, -1): (False, DA, None),
    (False, True,  True,  +1): (True,  P,  "p"),
    (False, True,  True,   0): (True,  I,  "i"),   # tie goes to ICA
    (False, True,  True,  -1): (True,  I,  "i"),
    (False, True,  False, +1): (True,  P,  "p"),
    (False, True,  False,  0): (False, DI, None),
    (False, True,  False, -1): (False, DI, None),
    (False, False, True,  +1): (False, DP, None),
    (False, False, True,   0): (True,  I,  "i"),
    (False, False, True,  -1): (True,  I,  "i"),
    (False, False, False, +1): (False, DP, None),
    (False, False, False,  0): (False, DI, None),
    (False, False, False, -1): (False, DI, None),
}

SCORES = [k / 10 for k in range(-10, 11)]
THRESHOLDS = [k / 10 for k in range(-9, 11)]


def expected(lp, sp, li, si, tp, ti):
    key = (lp == li, sp > tp, si > ti, int(np.sign(sp - si)))
    accepted, tag, source = TABLE[key]
    label = {"p": lp, "i": li, None: None}[source]
    return accepted, tag, label


def grid():
    """Every (lp, sp, li, si, tp, ti) on the discretized grid, both label cases."""
    for (lp, li), sp, si, tp, ti in itertools.product(
            [(1, 1), (1, 2)], SCORES, SCORES, THRESHOLDS[::2], THRESHOLDS[::2]):
        yield lp, sp, li, si, tp, ti
