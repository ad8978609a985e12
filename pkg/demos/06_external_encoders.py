"""Plugging in external encoders: EMB1 files and the stdio protocol.

Pretrained-model embeddings enter the engine two ways, both demonstrated
here with stand-ins:

* an EMB1 file (binary: magic, dim, count, then id + float32 records)
  precomputed by an exporter and served by FileEncoder;
* a live subprocess speaking newline-delimited JSON — request
  {"id", "path"}, response {"id", "dim", "values"} — wrapped by
  StdioEncoderClient, which pipelines requests and matches responses
  by id in any order.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from vismem import (
    ImageBuffer,
    MemoryStore,
    FileEncoder,
    load_embedding_file,
    run_conformance_check,
    write_embedding_file,
    write_png,
)

tmp = Path(tempfile.mkdtemp(prefix="vismem-demo-"))

# --- EMB1 round trip -------------------------------------------------------

rng = np.random.default_rng(5)
records = [(f"img-{i:03d}", rng.standard_normal(768).astype(np.float32)) for i in range(10)]
emb_path = tmp / "encodings.emb1"
write_embedding_file(emb_path, 768, records)
loaded = load_embedding_file(emb_path)
print(f"EMB1 round trip: wrote {len(records)} records, loaded {len(loaded)},"
      f" bit-identical: {all(np.array_equal(loaded[i], v) for i, v in records)}")

encoder = FileEncoder(str(emb_path))
store = MemoryStore.build(records)
probe = records[3][1] + rng.normal(0, 0.05, 768).astype(np.float32)
print(f"nearest to a jittered copy of img-003: {store.nearest(probe).id}")

# --- stdio protocol --------------------------------------------------------

PEER = r"""
import sys, json
for line in sys.stdin:
    req = json.loads(line)
    h = float(sum(req["id"].encode()) % 101)
    print(json.dumps({"id": req["id"], "dim": 8, "values": [h + k for k in range(8)]}), flush=True)
"""

paths = []
for i in range(64):
    p = tmp / f"probe-{i:02d}.png"
    write_png(p, ImageBuffer.constant(8, 8, 1, i))
    paths.append(p)

report = run_conformance_check([sys.executable, "-c", PEER], paths, expected_dim=8)
print(f"stdio conformance: {report.answered}/{report.requests} answered, "
      f"dim {report.dim}, bijective={report.bijective}, passed={report.passed}")
