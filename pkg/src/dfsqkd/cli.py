"""Command-line front end: sessions, attack sweeps, and table reproduction.

Documents are emitted as JSON (full, nested) or CSV (flat records).  Rates
are serialized as fractions in [0, 1] rounded to 6 significant digits.  A
run embeds its config and seed, so re-running the same invocation produces
byte-identical output.

Exit codes: 0 success, 2 protocol abort, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .adversary import ATTACK_IDS, AttackKind, UnsupportedAttackError
from .codewords import Variant
from .noise import Fixed, UniformPerQuartet
from .oracle import attack_report, mc_error_rates, table_rows
from .protocol import SessionConfig, run_session

EXIT_OK = 0
EXIT_ABORT = 2
EXIT_USAGE = 64

SWEEP_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
OUTPUT_DIR_ENV = "DFSQKD_OUTPUT_DIR"

_CNOT_CONTROLS = {"34": (2, 3), "24": (1, 3)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _round6(x: float) -> float:
    return float(f"{x:.6g}")


def _variant(name: str) -> Variant:
    return Variant.DEPHASING if name == "dephasing" else Variant.ROTATION


def _build_attack(args) -> AttackKind:
    return AttackKind(args.attack, p=args.p, cnot_controls=_CNOT_CONTROLS[args.cnot_controls])


def _noise_policy(args):
    if args.noise == "uniform":
        return UniformPerQuartet(args.noise_lo, args.noise_hi)
    return Fixed(args.noise_value)


def _config_echo(cfg: SessionConfig, attack: AttackKind) -> dict:
    if isinstance(cfg.noise_policy, Fixed):
        noise = {"policy": "fixed", "value": cfg.noise_policy.value}
    else:
        noise = {"policy": "uniform", "lo": cfg.noise_policy.lo, "hi": cfg.noise_policy.hi}
    return {
        "variant": cfg.variant.value,
        "n": cfg.n,
        "delta": cfg.delta,
        "abort_threshold": cfg.abort_threshold,
        "seed": cfg.seed,
        "noise": noise,
        "noise_split": cfg.noise_split,
        "attack": {
            "kind": attack.kind,
            "p": attack.p,
            "cnot_controls": list(attack.cnot_controls),
        },
    }


def _rates_doc(e_x: float, e_z: float, e_a: float) -> dict:
    return {"e_x": _round6(e_x), "e_z": _round6(e_z), "e_a": _round6(e_a)}


def _run_document(cfg: SessionConfig, attack: AttackKind, result) -> dict:
    eve = None
    if result.eve_stats is not None:
        eve = {
            "intercepted": result.eve_stats.intercepted_count,
            "pre_accuracy": _maybe6(result.eve_stats.pre_accuracy),
            "post_accuracy": _maybe6(result.eve_stats.post_accuracy),
        }
    doc = {
        "document": "session_report",
        "config": _config_echo(cfg, attack),
        "result": {
            "aborted": result.aborted,
            "error_rates": _rates_doc(
                result.observed_e_x, result.observed_e_z, result.observed_e_a
            ),
            "alice_key_length": len(result.alice_raw_key),
            "bob_key_length": len(result.bob_raw_key),
            "keys_agree": (not result.aborted)
            and result.alice_raw_key == result.bob_raw_key,
            "inconsistent_count": result.inconsistent_count,
            "sifted_fraction": _round6(len(result.bob_raw_key) / cfg.total_quartets),
            "eve": eve,
        },
        "transcript": [_jsonable(msg) for msg in result.transcript],
    }
    return doc


def _maybe6(x: float | None) -> float | None:
    return None if x is None else _round6(x)


def _jsonable(msg: dict) -> dict:
    out = {}
    for k, v in msg.items():
        if isinstance(v, float):
            out[k] = _round6(v)
        elif isinstance(v, list):
            out[k] = [int(i) for i in v]
        else:
            out[k] = v
    return out


def _flat_record(doc: dict, skip=("transcript", "rows")) -> dict:
    flat: dict = {}

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(value, list):
            flat[prefix] = json.dumps(value)
        else:
            flat[prefix] = value

    for key, value in doc.items():
        if key in skip:
            continue
        walk(key, value)
    return flat


def _emit(doc: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        if "rows" in doc:
            records = doc["rows"]
        else:
            records = [_flat_record(doc)]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(records[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        text = buf.getvalue()
    if args.output is None:
        sys.stdout.write(text)
        return
    path = args.output
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w") as fh:
        fh.write(text)


def cmd_run(args, parser) -> int:
    attack = _build_attack(args)
    cfg = SessionConfig(
        n=args.n,
        delta=args.delta,
        variant=_variant(args.variant),
        noise_policy=_noise_policy(args),
        abort_threshold=args.threshold,
        seed=args.seed,
        noise_split=args.noise_split,
    )
    try:
        result = run_session(cfg, attack)
    except UnsupportedAttackError as exc:
        parser.error(str(exc))
    _emit(_run_document(cfg, attack, result), args)
    return EXIT_ABORT if result.aborted else EXIT_OK


def cmd_tables(args, parser) -> int:
    variants = (
        [Variant.DEPHASING, Variant.ROTATION]
        if args.variant == "both"
        else [_variant(args.variant)]
    )
    rows = []
    for variant in variants:
        for row in table_rows(variant):
            rows.append(
                {
                    "variant": row.variant,
                    "attack": row.attack,
                    "e_x": _round6(row.e_x),
                    "e_z": _round6(row.e_z),
                    "e_a_computed": _round6(row.e_a_computed),
                    "e_a_paper": _round6(row.e_a_paper),
                    "matches_paper": row.matches_paper,
                }
            )
    _emit({"document": "attack_tables", "rows": rows}, args)
    return EXIT_OK


def cmd_sweep(args, parser) -> int:
    variant = _variant(args.variant)
    rows = []
    for i, p in enumerate(SWEEP_GRID):
        attack = AttackKind(args.attack, p=p, cnot_controls=_CNOT_CONTROLS[args.cnot_controls])
        try:
            mc = mc_error_rates(variant, attack, args.trials, args.seed + i)
        except UnsupportedAttackError as exc:
            parser.error(str(exc))
        rows.append(
            {
                "p": p,
                "e_x": _round6(mc.e_x),
                "e_z": _round6(mc.e_z),
                "e_a": _round6(mc.e_a),
                "se_x": _round6(mc.se_x),
                "se_z": _round6(mc.se_z),
                "se_a": _round6(mc.se_a),
            }
        )
    doc = {
        "document": "sweep_report",
        "config": {
            "variant": variant.value,
            "attack": args.attack,
            "trials": args.trials,
            "seed": args.seed,
        },
        "rows": rows,
    }
    _emit(doc, args)
    return EXIT_OK


def cmd_oracle(args, parser) -> int:
    variant = _variant(args.variant)
    attack = _build_attack(args)
    try:
        report = attack_report(variant, attack)
    except UnsupportedAttackError as exc:
        parser.error(str(exc))
    doc = {
        "document": "oracle_report",
        "variant": variant.value,
        "attack": {
            "kind": attack.kind,
            "p": attack.p,
            "cnot_controls": list(attack.cnot_controls),
        },
        "rates": _rates_doc(report.rates.e_x, report.rates.e_z, report.rates.e_a),
        "eve_pre_accuracy": _maybe6(report.eve_pre_accuracy),
        "eve_post_accuracy": _maybe6(report.eve_post_accuracy),
        "branch_count": report.branch_count,
    }
    _emit(doc, args)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="output path (default stdout); relative paths "
                   f"resolve under ${OUTPUT_DIR_ENV} when set")


def _add_attack_args(p: argparse.ArgumentParser, default="none"):
    p.add_argument("--attack", choices=ATTACK_IDS, default=default)
    p.add_argument("--p", type=float, default=1.0, help="interception probability")
    p.add_argument("--cnot-controls", choices=sorted(_CNOT_CONTROLS), default="34",
                   help="photon pair whose parity the cnot attacks extract")


def build_parser() -> _Parser:
    parser = _Parser(prog="dfsqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one key-distribution session")
    run.add_argument("--variant", choices=("dephasing", "rotation"), required=True)
    run.add_argument("--n", type=int, default=64, help="key quartets")
    run.add_argument("--delta", type=int, default=16, help="check quartets per basis")
    run.add_argument("--threshold", type=float, default=0.01, help="abort threshold on e_a")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--noise", choices=("fixed", "uniform"), default="fixed")
    run.add_argument("--noise-value", type=float, default=0.0)
    run.add_argument("--noise-lo", type=float, default=0.0)
    run.add_argument("--noise-hi", type=float, default=0.0)
    run.add_argument("--noise-split", type=float, default=1.0,
                     help="fraction of the noise applied before the adversary")
    _add_attack_args(run)
    _add_common(run)
    run.set_defaults(func=cmd_run)

    tables = sub.add_parser("tables", help="reproduce the attack error-rate tables")
    tables.add_argument("--variant", choices=("dephasing", "rotation", "both"), default="both")
    _add_common(tables)
    tables.set_defaults(func=cmd_tables)

    sweep = sub.add_parser("sweep", help="Monte Carlo rates vs interception probability")
    sweep.add_argument("--variant", choices=("dephasing", "rotation"), required=True)
    sweep.add_argument("--trials", type=int, default=2000,
                       help="check quartets per basis per grid point")
    sweep.add_argument("--seed", type=int, default=0)
    _add_attack_args(sweep, default="mrp-x")
    _add_common(sweep)
    sweep.set_defaults(func=cmd_sweep)

    oracle = sub.add_parser("oracle", help="exact rates and Eve information for one attack")
    oracle.add_argument("--variant", choices=("dephasing", "rotation"), required=True)
    _add_attack_args(oracle)
    _add_common(oracle)
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError) as exc:
        print(f"dfsqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
