"""Quick end-to-end check of the extension module."""
import json

import treegrade as tg

path = tg.Graph(9, [(i, i + 1) for i in range(8)])
assert path.distance(0, 8) == 8
assert path.open_ball(4, 2) == [3, 4, 5]

s = tg.Structure(path, [list(range(5)), list(range(4, 9))], m=1)
assert s.complete_certificates() == []
report = s.verify()
assert report["verified"] == 1, report

t = s.build()
dist = t.distortion()
assert dist["lipschitz_violations"] == 0 and dist["bound_satisfied"], dist
assert t.check()["passed"]
phi = t.collapse()
assert sorted(set(phi)) == list(range(9))

g, pieces = tg.generate(json.dumps({"family": "grid", "n": 5}))
grid = tg.Structure(g, pieces, m=2)
assert grid.verify()["refuted"] == 10

cycle = tg.Graph(30, [(i, (i + 1) % 30) for i in range(30)])
assert not cycle.manning(2.0)["passed"]

rt = tg.generate(json.dumps({"family": "random_tree_graded", "pieces": 4, "min_size": 3,
                             "max_size": 6, "max_arc": 2, "seed": 5}))
again = tg.TreeGraded.from_json(rt.to_json())
assert again.vertex_count == rt.vertex_count
emb = rt.embed()
assert emb["lipschitz_violations"] == 0 and emb["sum_violations"] == 0, emb

try:
    tg.Structure(path, [[0, 1], []], m=1)
except ValueError:
    pass
else:
    raise AssertionError("empty piece accepted")

print("smoke ok:", t, rt)
