"""Command-line client.

Subcommands parse and validate a JSON config, send it to the HTTP service
(an in-process instance by default, or a remote one via --server), and render
the structured response into CSV files. All floats are written with repr(),
the shortest string that round-trips to the same double, so outputs are
byte-comparable across runs and worker counts.

Every failure prints a single line starting with "error:" to stderr and
exits nonzero.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path
from typing import Iterable

import httpx

from .config import ObservableOutput, RunConfig, parse_config
from .errors import QtrajError


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems in the error: line format."""

    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qtraj", description="Lindblad models: master equation "
                     "and stochastic pure-state trajectories over HTTP.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_commands = {
        "evolve-master": (_cmd_master, "integrate the master equation, write master.csv"),
        "trajectory": (_cmd_trajectory,
                       "run n_traj stochastic trajectories, write trajectory_<i>.csv"),
        "ensemble": (_cmd_ensemble,
                     "run an ensemble and write the mean state to ensemble_mean.csv"),
        "invariance-check": (_cmd_invariance,
                             "compare one path against its re-representation, "
                             "write invariance.csv, exit nonzero on bound violation"),
        "poincare": (_cmd_poincare,
                     "sample one trajectory stroboscopically, write poincare.csv"),
    }
    for name, (handler, help_text) in run_commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", default=None,
                       help="output directory (falls back to out_path in the config)")
        p.add_argument("--seed", type=int, default=None,
                       help="override master_seed from the config")
        p.add_argument("--workers", type=int, default=1,
                       help="process count; results are identical for any value")
        p.add_argument("--server", default=None,
                       help="base URL of a running service (default: in-process)")
        p.set_defaults(func=handler)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def _load_config(args) -> RunConfig:
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise QtrajError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    cfg = parse_config(text)
    if args.seed is not None:
        # revalidate rather than mutate, so the override hits the same checks
        cfg = RunConfig.model_validate(
            {**cfg.model_dump(mode="json"), "master_seed": args.seed})
    return cfg


def _out_dir(args, cfg: RunConfig) -> Path:
    target = args.out if args.out is not None else cfg.out_path
    if target is None:
        raise QtrajError("no output directory: pass --out or set out_path in the config")
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _post(server: str | None, path: str, payload: dict) -> dict:
    async def go() -> httpx.Response:
        if server is None:
            from .service import app

            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport, base_url="http://qtraj.local",
                                         timeout=None) as client:
                return await client.post(path, json=payload)
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            return await client.post(path, json=payload)

    response = asyncio.run(go())
    if response.status_code != 200:
        raise QtrajError(f"server returned {response.status_code}: {_detail(response)}")
    return response.json()


def _detail(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        return response.text.strip() or "no detail"
    if isinstance(detail, list) and detail:
        first = detail[0]
        loc = ".".join(str(part) for part in first.get("loc", []))
        return f"{loc}: {first.get('msg', 'invalid')}"
    return str(detail)


def _run(args, endpoint: str) -> tuple[RunConfig, Path, dict]:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    data = _post(args.server, endpoint,
                 {"config": cfg.model_dump(mode="json"), "workers": args.workers})
    return cfg, out, data


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: Iterable[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")


def _density_header(dim: int) -> list[str]:
    cols = ["t"]
    for i in range(dim):
        for j in range(dim):
            cols.append(f"re_rho_{i}_{j}")
            cols.append(f"im_rho_{i}_{j}")
    return cols


def _density_rows(times: list[float], states: list[list[list[float]]]) -> Iterable[list[str]]:
    for t, snap in zip(times, states):
        row = [_fmt(t)]
        for re, im in snap:
            row.append(_fmt(re))
            row.append(_fmt(im))
        yield row


def _write_density_csv(path: Path, dim: int, times, states) -> None:
    _write_csv(path, _density_header(dim), _density_rows(times, states))


def _safe_name(name: str) -> str:
    return name.replace(":", "_")


def _write_trajectory_csv(path: Path, cfg: RunConfig, dim: int,
                          times: list[float], payload: dict) -> None:
    header = ["t"]
    blocks: list[list[list[float]]] = []
    for output in cfg.outputs:
        if output == "states":
            for n in range(dim):
                header.append(f"re_psi_{n}")
                header.append(f"im_psi_{n}")
            blocks.append(payload["states"])
        elif isinstance(output, ObservableOutput):
            safe = _safe_name(output.observable)
            header.append(f"re_{safe}")
            header.append(f"im_{safe}")
            blocks.append([[pair] for pair in payload["observables"][output.observable]])

    def rows():
        for idx, t in enumerate(times):
            row = [_fmt(t)]
            for block in blocks:
                for re, im in block[idx]:
                    row.append(_fmt(re))
                    row.append(_fmt(im))
            yield row

    _write_csv(path, header, rows())


def _cmd_master(args) -> int:
    cfg, out, data = _run(args, "/run/master")
    target = out / "master.csv"
    _write_density_csv(target, data["dim"], data["times"], data["states"])
    print(f"wrote {target} ({len(data['times'])} snapshots, dim {data['dim']})")
    return 0


def _cmd_trajectory(args) -> int:
    cfg, out, data = _run(args, "/run/trajectory")
    times = data["times"]
    for payload in data["trajectories"]:
        i = payload["index"]
        _write_trajectory_csv(out / f"trajectory_{i}.csv", cfg, data["dim"], times, payload)
        if cfg.method == "jump":
            _write_csv(out / f"jumps_{i}.csv", ["t", "channel"],
                       ([_fmt(t), str(int(ch))] for t, ch in payload["jumps"]))
    n = len(data["trajectories"])
    print(f"wrote {n} trajectory file(s) to {out} ({len(times)} snapshots each)")
    return 0


def _cmd_ensemble(args) -> int:
    cfg, out, data = _run(args, "/run/ensemble")
    target = out / "ensemble_mean.csv"
    _write_density_csv(target, data["dim"], data["times"], data["mean_states"])
    print(f"wrote {target} (mean over {data['n_traj']} trajectories)")
    return 0


def _cmd_invariance(args) -> int:
    cfg, out, data = _run(args, "/run/invariance")
    target = out / "invariance.csv"
    _write_csv(target, ["t", "trace_distance"],
               ([_fmt(t), _fmt(d)] for t, d in zip(data["times"], data["trace_distances"])))
    if data["bound"] is None:
        print(f"invariance-check {data['mode']}: max trace distance "
              f"{data['max_distance']:.6e} (report only)")
        return 0
    verdict = "PASS" if data["passed"] else "FAIL"
    print(f"invariance-check {data['mode']}: max trace distance "
          f"{data['max_distance']:.6e}, bound {data['bound']:.6e}: {verdict}")
    if not data["passed"]:
        print(f"error: pathwise invariance violated: max trace distance "
              f"{data['max_distance']:.6e} exceeds bound {data['bound']:.6e}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_poincare(args) -> int:
    cfg, out, data = _run(args, "/run/poincare")
    target = out / "poincare.csv"
    _write_csv(target, ["t", "x", "p"],
               ([_fmt(t), _fmt(x), _fmt(p)]
                for t, x, p in zip(data["times"], data["x"], data["p"])))
    print(f"wrote {target} ({len(data['times'])} section points)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qtraj.service:app", host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except QtrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
