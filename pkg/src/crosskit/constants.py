"""Thresholds found by running the exact verifier, pinned for the tests."""

from __future__ import annotations

# smallest m for which verify_instance passes on random k=2 tile sets;
# m=2 fails check (c) because a filtering funnel meets two core columns
M_STAR = 3
M_STAR_SWEEP = {2: "c", 3: None}

# generous constant in the coordinate bound BIT_LENGTH_C * log2(m * k + 1);
# measured maxima are 24 bits at (m, k) = (2, 1) and 54 bits at (5, 2)
BIT_LENGTH_C = 32
