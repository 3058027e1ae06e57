"""Attribute against a real model server.

The engine is model-agnostic: anything exposing the wire protocol
(GET /v1/meta, POST /v1/classify, POST /v1/fill-mask) can be
interpreted. Start the reference server from the server/ package, e.g.

    margattr-server serve --config server_config.yaml

then point this script at it:

    MARGIN_ATTR_ENDPOINT=http://127.0.0.1:8471 python demos/06_remote_oracle.py
"""

import os
import sys

from margattr import MarginalizationConfig, Sentence, attribute, remote_oracle
from margattr.remote import fetch_meta

endpoint = os.environ.get("MARGIN_ATTR_ENDPOINT")
if not endpoint:
    print("set MARGIN_ATTR_ENDPOINT to a running model server and re-run")
    sys.exit(0)

meta = fetch_meta(endpoint)
print("server meta:", meta)

clf, lm = remote_oracle(endpoint, timeout=30.0)

# ship raw ids from the server's own vocabulary; here: a short sequence
# of mid-range ids as a placeholder for a real tokenized sentence
sentence = Sentence(ids=tuple(range(10, 16)))
cfg = MarginalizationConfig(target_class=0, sigma=1e-3)
attr = attribute(sentence, cfg, clf, lm)

print("token-id scores toward class 0 (bits):")
for tid, score in zip(sentence.ids, attr.scores):
    print(f"  id {tid:<6} {score:+.4f}")
