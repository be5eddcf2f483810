# Graded traces on the rank-one Heisenberg algebra at a weight cutoff, and the
# genus-one conditions they satisfy.

from collections import Counter

from pseudotrace import qtrace
from pseudotrace.modekit import builtin, from_json, star_n, u1

V = builtin("heisenberg", 5)
print(V.name, "graded dimensions:", V.dims())

a = V.state(V.labels.index("a(-1) 1"))
print("a *_0 a =", star_n(V, a, a, 0))
print("U(1) omega =", u1(V, V.omega))

# the shifted trace of the vacuum is the partition generating function times q^{-1/24}
S = qtrace.shifted_trace(qtrace.TraceContext(V))
print("S(1) =", S(V.one()))
print("S(omega) =", S(V.omega))

# every condition comes back as a residual series; for a genuine trace they are all zero
print(Counter(r["status"] for r in qtrace.conformal_block_reports(S)))

# a random linear map fails them
R = qtrace.random_map(V, 3, seed=1)
print("random map, wp2 residual:", qtrace.check_condition_wp2(R, a, a, q_order=3))

# residues whose weight passes the cutoff are reported, not guessed
grid = qtrace.residue_lemma_grid(builtin("heisenberg", 6), 3)
print("residue lemma:", Counter(r["status"] for r in grid))

# a toy grading where L(0) has a Jordan block: the trace picks up a log q term
toy = {
    "D": 2, "closed": True, "c": "0", "vacuum": 0,
    "weights": [0, 0, 2], "labels": ["1", "b", "w"], "omega": {"2": "1"},
    "modes": {
        "0": {"-1": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
        "1": {"-1": [[0, 0, 0], [1, 0, 0], [0, 0, 0]]},
        "2": {"-1": [[0, 0, 0], [0, 0, 0], [1, 0, 0]], "1": [[0, 1, 0], [0, 0, 0], [0, 0, 2]]},
    },
}
W = from_json(toy, validate=False)
T = qtrace.shifted_trace(qtrace.TraceContext(W), q_order=2)
print("log toy, S(b) =", T(W.state(1)))
