"""HTTP/JSON server exposing the model roster on localhost.

Endpoints:
    GET  /v1/models
    POST /v1/embed_tokens   {"model", "texts", "layers"}
    POST /v1/embed_sentence {"model", "texts"}
    POST /v1/cross_score    {"model", "pairs"}

Errors are JSON: {"error": {"type": <name>, "message": <detail>}}. Requests
are handled on a thread per connection; inference on each model is
serialized by its lock. Startup loads every configured model and exits
non-zero if any fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .models import (
    DEFAULT_MODELS,
    LoadedModel,
    ModelKind,
    ModelSpec,
    RequestError,
    load_roster,
    parse_config,
    synthetic_roster_config,
)

MAX_BODY_BYTES = 32 * 1024 * 1024


class BackendHandler(BaseHTTPRequestHandler):
    server_version = "anssim-backend/0.1"
    roster: dict[str, LoadedModel] = {}
    quiet = True

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        if not self.quiet:
            super().log_message(format, *args)

    # --- plumbing ---------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_body(self, status: int, error_type: str, message: str) -> None:
        self._send_json(status, {"error": {"type": error_type, "message": message}})

    def _read_request(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if length <= 0:
            raise RequestError("BadRequest", "request body required")
        if length > MAX_BODY_BYTES:
            raise RequestError("BadRequest", "request body too large", status=413)
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError as exc:
            raise RequestError("BadRequest", f"invalid JSON body: {exc}") from exc

    def _model(self, request: dict, kind: ModelKind) -> LoadedModel:
        alias = request.get("model")
        if not isinstance(alias, str):
            raise RequestError("BadRequest", 'field "model" must be a string')
        model = self.roster.get(alias)
        if model is None:
            raise RequestError(
                "UnknownModel", f"no model with alias {alias!r}", status=404
            )
        if model.kind is not kind:
            raise RequestError(
                "WrongModelKind",
                f"model {alias!r} is a {model.kind.value}, endpoint needs "
                f"{kind.value}",
            )
        return model

    @staticmethod
    def _string_list(request: dict, field: str) -> list[str]:
        value = request.get(field)
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise RequestError("BadRequest", f'field "{field}" must be a string list')
        return value

    # --- endpoints ---------------------------------------------------------

    def do_GET(self):
        try:
            if self.path == "/v1/models":
                models = [model.describe() for model in self.roster.values()]
                self._send_json(200, {"models": models})
            else:
                self._send_error_body(404, "NotFound", f"no route {self.path}")
        except Exception as exc:  # pragma: no cover - defensive
            self._send_error_body(500, "InternalError", str(exc))

    def do_POST(self):
        try:
            request = self._read_request()
            if self.path == "/v1/embed_tokens":
                self._embed_tokens(request)
            elif self.path == "/v1/embed_sentence":
                self._embed_sentence(request)
            elif self.path == "/v1/cross_score":
                self._cross_score(request)
            else:
                self._send_error_body(404, "NotFound", f"no route {self.path}")
        except RequestError as exc:
            self._send_error_body(exc.status, exc.error_type, str(exc))
        except Exception as exc:  # keep the worker thread alive
            self._send_error_body(500, "InternalError", str(exc))

    def _embed_tokens(self, request: dict) -> None:
        model = self._model(request, ModelKind.TOKEN_ENCODER)
        texts = self._string_list(request, "texts")
        layers = request.get("layers")
        if (
            not isinstance(layers, list)
            or not layers
            or not all(isinstance(l, int) and not isinstance(l, bool) for l in layers)
        ):
            raise RequestError(
                "BadRequest", 'field "layers" must be a non-empty integer list'
            )
        model.check_layers(layers)
        with model.lock:
            results = model.embed_tokens(texts, layers)
        self._send_json(
            200,
            {
                "results": [
                    {
                        "tokens": result.tokens,
                        "layers": {
                            str(layer): matrix.tolist()
                            for layer, matrix in result.layers.items()
                        },
                        "truncated": result.truncated,
                    }
                    for result in results
                ]
            },
        )

    def _embed_sentence(self, request: dict) -> None:
        model = self._model(request, ModelKind.SENTENCE_ENCODER)
        texts = self._string_list(request, "texts")
        with model.lock:
            vectors = model.embed_sentence(texts)
        self._send_json(200, {"vectors": vectors.tolist()})

    def _cross_score(self, request: dict) -> None:
        model = self._model(request, ModelKind.CROSS_ENCODER)
        pairs = request.get("pairs")
        if not isinstance(pairs, list) or not all(
            isinstance(p, list)
            and len(p) == 2
            and all(isinstance(t, str) for t in p)
            for p in pairs
        ):
            raise RequestError(
                "BadRequest", 'field "pairs" must be a list of [str, str]'
            )
        with model.lock:
            scores = model.cross_score([(a, b) for a, b in pairs])
        self._send_json(200, {"scores": scores})


def make_server(
    specs: list[ModelSpec], host: str = "127.0.0.1", port: int = 8765, quiet=True
) -> ThreadingHTTPServer:
    """Load every model, then bind; raises if any model fails to load."""
    roster = load_roster(specs)

    class Handler(BackendHandler):
        pass

    Handler.roster = roster
    Handler.quiet = quiet
    return ThreadingHTTPServer((host, port), Handler)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anssim-backend",
        description="Serve token/sentence embeddings and cross-encoder scores "
        "over HTTP/JSON.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--config", help="JSON file with a models list")
    parser.add_argument(
        "--synthetic",
        action="store_true",
        help="serve the default aliases with synthetic models (no downloads)",
    )
    parser.add_argument("--verbose", action="store_true", help="log requests")
    args = parser.parse_args(argv)

    try:
        if args.config:
            with open(args.config, encoding="utf-8") as handle:
                specs = parse_config(handle.read())
        elif args.synthetic:
            specs = [ModelSpec.from_dict(e) for e in synthetic_roster_config()]
        else:
            specs = [ModelSpec.from_dict(e) for e in DEFAULT_MODELS]
        server = make_server(specs, args.host, args.port, quiet=not args.verbose)
    except Exception as exc:
        print(f"anssim-backend: startup failed: {exc}", file=sys.stderr)
        return 1

    aliases = ", ".join(sorted(spec.alias for spec in specs))
    print(
        f"anssim-backend serving {aliases} on http://{args.host}:{server.server_port}"
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
