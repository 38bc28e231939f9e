"""Command-line entry points.

Subcommands:

* ``build-lm``  build the 20-model grid for a corpus and archive it
* ``extract``   run one window of text against an archived repository
* ``replay``    feed a speaker-tagged transcript through a session, export it
* ``serve``     start the HTTP/WebSocket service
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from relsnip.extraction import ExtractionConfig
from relsnip.session import (Engine, export_session, persist_repository,
                             window_result_dict)
from relsnip.tone import ReplayToneClient, ToneClientConfig

DEFAULT_DATA_DIR = "relsnip-data"


def _collect_corpus_paths(specs) -> list[Path]:
    paths = []
    for spec in specs:
        p = Path(spec)
        if p.is_dir():
            paths.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        elif p.is_file():
            paths.append(p)
        else:
            raise SystemExit(f"error: corpus path {spec} does not exist")
    if not paths:
        raise SystemExit("error: corpus is empty")
    return paths


def _resolve_repository(engine: Engine, repo: str) -> str:
    p = Path(repo)
    if p.is_dir():
        return engine.load_repository_dir(p)
    return repo


def _mode(value: str) -> str:
    return {"auto": "automatic", "automatic": "automatic",
            "manual": "manual"}[value]


def cmd_build_lm(args) -> int:
    engine = Engine(store_dir=None, warm_wfsts=False)
    repo_id = engine.ingest_repository(paths=_collect_corpus_paths(args.corpus))
    repo = engine.get_repository(repo_id)
    persist_repository(repo, args.out)
    print(repo_id)
    return 0


def cmd_extract(args) -> int:
    engine = Engine(store_dir=args.data_dir, warm_wfsts=False)
    repo_id = _resolve_repository(engine, args.repo)
    config = ExtractionConfig(z=args.z, mode=_mode(args.mode))
    session = engine.create_session(repo_id, config)
    result = engine.append_exchange(session, "stakeholder", args.window)
    json.dump(window_result_dict(result), sys.stdout, indent=2, ensure_ascii=False)
    print()
    return 0


def cmd_replay(args) -> int:
    tone_client = None
    if args.tone_fixture:
        tone_client = ReplayToneClient.from_file(args.tone_fixture)
    # Replays are reference runs: a fixed clock keeps the export byte-stable.
    engine = Engine(store_dir=args.data_dir, tone_client=tone_client,
                    tone_config=ToneClientConfig(fallback_enabled=args.tone_fixture is None),
                    clock=lambda: 0.0, warm_wfsts=False)
    repo_id = _resolve_repository(engine, args.repo)
    session = engine.replay(repo_id, args.transcript)
    payload = export_session(session, "json")
    Path(args.out).write_text(payload, encoding="utf-8")
    print(f"wrote {args.out} ({len(session.history)} windows)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from relsnip.service import create_app

    engine = Engine(store_dir=args.data_dir)
    uvicorn.run(create_app(engine), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relsnip")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-lm", help="build and archive the model grid for a corpus")
    p.add_argument("--corpus", nargs="+", required=True,
                   help="plain-text files or directories of them")
    p.add_argument("--out", required=True, help="archive output directory")
    p.set_defaults(func=cmd_build_lm)

    p = sub.add_parser("extract", help="extract terms and snippets for one window of text")
    p.add_argument("--repo", required=True,
                   help="archive directory or repository id under --data-dir")
    p.add_argument("--window", required=True, help="window text")
    p.add_argument("--z", type=int, default=5, help="max highlighted terms")
    p.add_argument("--mode", choices=["auto", "automatic", "manual"],
                   default="automatic")
    p.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("replay", help="run a transcript through a session and export JSON")
    p.add_argument("--repo", required=True)
    p.add_argument("--transcript", required=True,
                   help="UTF-8 lines: A<TAB>text (analyst) or B<TAB>text (stakeholder)")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--tone-fixture",
                   help="JSON file of recorded tone responses keyed by turn text")
    p.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="start the HTTP/WebSocket service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
