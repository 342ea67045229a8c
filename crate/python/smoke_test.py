"""Smoke test for the `csem` extension module.

Build the module first:

    cargo build --release -p csem-py --features extension-module

then run `python3 python/smoke_test.py`. The script copies the built shared
library next to itself as `csem.so` unless `csem` is already importable.
"""

import json
import math
import os
import shutil
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)


def import_csem():
    try:
        import csem  # noqa: F401
        return csem
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libcsem.so")
        if os.path.exists(lib):
            dest = os.path.join(tempfile.mkdtemp(), "csem.so")
            shutil.copy(lib, dest)
            sys.path.insert(0, os.path.dirname(dest))
            import csem
            return csem
    sys.exit("csem extension not built; see the module docstring")


def main():
    csem = import_csem()

    charts = csem.synth_charts(seed=3, tables=4)
    assert charts, "no charts synthesized"
    first = json.loads(charts[0])
    assert "<svg" in csem.render_svg(charts[0])
    levels = [level for level, _ in csem.insights(charts[0])]
    assert levels == ["visual", "statistics", "task"], levels

    model = csem.DualEncoder(seed=1, dim=32)
    q = model.embed_text(first["title"])
    assert len(q) == 32 and abs(math.fsum(x * x for x in q) - 1.0) < 1e-9
    vecs = [model.embed_chart(c) for c in charts]
    index = csem.VectorIndex([json.loads(c)["id"] for c in charts], vecs)
    assert len(index) == len(charts)
    hits = index.search(vecs[0], k=3)
    assert hits[0][0] == first["id"], hits

    m = csem.metrics([1, 3, None])
    assert abs(m["MRR@10"] - 4 / 9) < 1e-12 and abs(m["NDCG@10"] - 0.5) < 1e-12, m

    loss, _, _ = csem.info_nce([[1.0, 0.0]] * 4, [[1.0, 0.0]] * 4)
    assert abs(loss - math.log(4)) < 1e-9

    assert not csem.consensus([True] * 4 + [False] * 5)
    assert csem.consensus([True] * 5 + [False] * 4)

    with tempfile.TemporaryDirectory() as out:
        lines = csem.run_pipeline("synth", out, seed=5, tables=3)
        assert os.path.exists(os.path.join(out, "charts.jsonl")), lines

    print("python smoke test passed")


if __name__ == "__main__":
    main()
