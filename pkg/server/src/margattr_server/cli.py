"""Entry point: serve models or replay golden fixtures."""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="margattr-server")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_serve = sub.add_parser("serve", help="run the model server")
    p_serve.add_argument("--config", help="YAML file with ServerConfig fields")
    p_serve.add_argument("--mlm", dest="mlm_model", help="masked-LM checkpoint or hub id")
    p_serve.add_argument("--classifier", dest="classifier_model", help="classifier checkpoint or hub id")
    p_serve.add_argument("--tokenizer", help="tokenizer source (default: classifier)")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--top-k", dest="top_k", type=int)
    p_serve.add_argument("--prob-floor", dest="prob_floor", type=float)
    p_serve.add_argument("--device")

    p_check = sub.add_parser("check", help="replay golden fixtures against a running server")
    p_check.add_argument("--fixtures", required=True, help="directory of fixture JSON files")
    p_check.add_argument("--url", required=True, help="server base URL")
    p_check.add_argument("--timeout", type=float, default=30.0)

    args = parser.parse_args(argv)

    if args.subcommand == "check":
        from .fixtures import golden_fixture_check

        report = golden_fixture_check(args.fixtures, args.url, timeout=args.timeout)
        print(report.summary())
        return 0 if report.passed else 1

    from .config import load_config

    overrides = {
        key: getattr(args, key)
        for key in ("mlm_model", "classifier_model", "tokenizer", "host", "port",
                    "top_k", "prob_floor", "device")
    }
    try:
        cfg = load_config(args.config, **overrides)
    except (TypeError, ValueError) as exc:
        print(f"margattr-server: bad configuration: {exc}", file=sys.stderr)
        return 1

    import uvicorn

    from .app import create_app
    from .backend import ModelBackend

    app = create_app(ModelBackend(cfg))
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
