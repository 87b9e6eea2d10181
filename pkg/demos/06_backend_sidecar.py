"""The inference sidecar and its wire protocol, end to end in one process.

Starts the backend server with a synthetic model roster on an ephemeral
port, then drives it through the evaluation toolkit's HTTP client: roster
listing, per-layer token embeddings with the truncation flag, sentence
embeddings, and cross-encoder scores.

For real models, run the server standalone instead:
    anssim-backend --port 8765                 # default transformer roster
    anssim-backend --port 8765 --synthetic     # same aliases, no downloads
    ANSSIM_BACKEND_URL=http://127.0.0.1:8765 anssim check-backend
"""

import threading

from anssim import HttpBackend, bertscore, sas_score
from anssim_backend.models import ModelSpec
from anssim_backend.server import make_server

specs = [
    ModelSpec.from_dict(
        {"alias": "tok", "kind": "token_encoder", "synthetic": True,
         "num_layers": 4, "dim": 64, "max_tokens": 8}
    ),
    ModelSpec.from_dict(
        {"alias": "sent", "kind": "sentence_encoder", "synthetic": True, "dim": 16}
    ),
    ModelSpec.from_dict(
        {"alias": "cross", "kind": "cross_encoder", "synthetic": True}
    ),
]
server = make_server(specs, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_port}"
print(f"sidecar serving on {url}\n")

client = HttpBackend(url)

print("GET /v1/models:")
for info in client.models().values():
    print(f"  {info.alias}: {info.kind.value}, layers={info.num_layers}, "
          f"dim={info.dim}, revision={info.revision}")

print("\nPOST /v1/embed_tokens (layers 0 and 4):")
(result,) = client.embed_tokens(["tens of thousands"], "tok", [0, 4])
print(f"  tokens: {result.tokens}")
for layer, matrix in result.layers.items():
    print(f"  layer {layer}: matrix {matrix.shape}")

(long_result,) = client.embed_tokens(["one two three four five six seven "
                                      "eight nine"], "tok", [0])
print(f"  9-token text with max_tokens=8 -> truncated={long_result.truncated}, "
      f"{len(long_result.tokens)} tokens kept")

print("\nPOST /v1/embed_sentence:")
vectors = client.embed_sentence(["forty thousand", "forty thousand"], "sent")
print(f"  2 texts -> {vectors.shape}, identical inputs give identical vectors: "
      f"{(vectors[0] == vectors[1]).all()}")

print("\nPOST /v1/cross_score:")
scores = client.cross_score([("40,000", "tens of thousands"),
                             ("40,000", "40,000")], "cross")
print(f"  scores: {[round(s, 3) for s in scores]}")

print("\nsemantic metrics run unchanged over the wire:")
print(f"  bertscore f1('uv light', 'uv light') = "
      f"{bertscore('uv light', 'uv light', client, 'tok', 2).f1:.3f}")
print(f"  sas('a b', 'a b') = {sas_score('a b', 'a b', client, 'cross'):.3f}")

server.shutdown()
print("\nserver stopped.")
