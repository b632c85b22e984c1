"""Command-line entry point: interactive REPL, batch test checking, and
the session service."""

from __future__ import annotations

import argparse
import sys

from .errors import DiscoError
from .repl import OutputBlock, ReplConfig, ReplState, render_block, render_error


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="disco",
        description="The Disco teaching language: REPL, property tester, session service.",
    )
    p.add_argument("files", nargs="*", help=".disco files to load before the prompt")
    p.add_argument("--seed", type=int, default=0, help="random seed for property testing")
    p.add_argument("--ascii", action="store_true", help="ASCII output instead of Unicode")
    p.add_argument("--samples", type=int, default=100, help="samples per randomized property")
    p.add_argument("--exhaustive-threshold", type=int, default=10_000,
                   help="exhaustively check domains up to this size")
    p.add_argument("--check", action="store_true",
                   help="batch mode: load files, run their tests, exit 1 on failure")
    p.add_argument("--serve", type=int, metavar="PORT", default=None,
                   help="run the HTTP session service on PORT")
    p.add_argument("--serve-host", default="127.0.0.1",
                   help="bind address for --serve (default: localhost)")
    p.add_argument("--offline", action="store_true", help="disable all network access")
    return p


def config_from_args(args) -> ReplConfig:
    return ReplConfig(
        seed=args.seed,
        samples=args.samples,
        exhaustive_threshold=args.exhaustive_threshold,
        unicode=not args.ascii,
        offline=args.offline,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)

    if args.serve is not None:
        from .server import ServerConfig, serve

        serve(ServerConfig(repl=config, host=args.serve_host, port=args.serve))
        return 0

    state = ReplState(config)

    failed = False
    for path in args.files:
        blocks = _load(state, path)
        for b in blocks:
            print(render_block(b), end="")
            if b.kind == "error" or (b.kind == "test-report" and "Certainly false" in b.text):
                failed = True

    if args.check:
        return 1 if failed else 0

    return repl_loop(state)


def _load(state: ReplState, path: str) -> list[OutputBlock]:
    try:
        return state.exec_input(f":load {path}")
    except DiscoError as e:
        return [render_error(e)]


def repl_loop(state: ReplState) -> int:
    while True:
        try:
            line = input("Disco> ")
        except EOFError:
            print()
            return 0
        except KeyboardInterrupt:
            print()
            continue
        if not line.strip():
            continue
        for block in state.exec_input(line):
            print(render_block(block), end="")
        if state.quit_requested:
            return 0


if __name__ == "__main__":
    sys.exit(main())
