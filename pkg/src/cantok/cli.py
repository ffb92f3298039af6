"""Command-line front end: ingest -> TANG -> tokenize -> extract -> score.

Each subcommand writes machine-readable files named ``<id hex>_<kind>.<ext>``
into the output directory and prints a summary table ordered by ascending
arbitration id. Exit codes: 0 success, 1 input error, 2 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bitlab, signals, synth, tokenizer
from .errors import CantokError, InvariantError
from .frames import IdTrace, Trace, load_trace, partition_by_id, write_candump
from .tokenizer import TokenizerConfig


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, help="capture or spec file")
    p.add_argument("--format", choices=("candump", "csv"), default="candump")
    p.add_argument("--endianness", choices=("big", "little"), default="big")
    p.add_argument("--threshold", type=int, default=0, metavar="UINT")
    p.add_argument("--padding-mode", choices=("exclude", "strict"), default="exclude")
    p.add_argument("--ids", default=None, help="comma-separated id filter, e.g. 0x100,0x200")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of aborting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantok",
        description="Reverse-engineer CAN payload structure from traffic captures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tang", help="per-id transition count vectors")
    _add_common(p)
    p = sub.add_parser("tokenize", help="greedy signal/padding clustering")
    _add_common(p)
    p = sub.add_parser("extract", help="unsigned-integer series per signal")
    _add_common(p)

    p = sub.add_parser("synth", help="generate a trace from a ground-truth spec")
    p.add_argument("--input", "-i", required=True, help="ground-truth JSON spec")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("score", help="compare a tokenization to ground truth")
    p.add_argument("--tokenization", "-t", default=None, help="tokenization JSON")
    p.add_argument("--input", "-i", default=None, help="trace to tokenize (alternative to -t)")
    p.add_argument("--format", choices=("candump", "csv"), default="candump")
    p.add_argument("--endianness", choices=("big", "little"), default="big")
    p.add_argument("--threshold", type=int, default=0, metavar="UINT")
    p.add_argument("--padding-mode", choices=("exclude", "strict"), default="exclude")
    p.add_argument("--ground-truth", "-g", required=True, help="ground-truth JSON spec")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--lenient", action="store_true")
    return parser


def _config(args) -> TokenizerConfig:
    return TokenizerConfig(
        endianness=args.endianness,
        threshold=args.threshold,
        padding_mode=args.padding_mode,
    )


def _id_filter(args) -> set[int] | None:
    if args.ids is None:
        return None
    return {int(tok, 16) for tok in args.ids.split(",") if tok}


def _select_groups(trace: Trace, wanted: set[int] | None) -> list[tuple[tuple[int, int], IdTrace]]:
    """Analyzable (id, dlc) groups in ascending id order."""
    groups = []
    for key, idtrace in partition_by_id(trace).items():
        if wanted is not None and key[0] not in wanted:
            continue
        if len(idtrace) < 2:
            print(
                f"warning: skipping id 0x{key[0]:X} dlc {key[1]}: "
                f"only {len(idtrace)} frame(s)",
                file=sys.stderr,
            )
            continue
        groups.append((key, idtrace))
    return sorted(groups, key=lambda kv: kv[0])


def _stems(groups) -> dict[tuple[int, int], str]:
    """File-name stem per group; mixed-dlc ids get a dlc suffix."""
    by_id: dict[int, int] = {}
    for (arb_id, _), _g in groups:
        by_id[arb_id] = by_id.get(arb_id, 0) + 1
    return {
        key: f"{key[0]:04X}" + (f"_dlc{key[1]}" if by_id[key[0]] > 1 else "")
        for key, _g in groups
    }


def _load(args) -> Trace:
    return load_trace(args.input, format=args.format, strict=not args.lenient)


def cmd_tang(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    groups = _select_groups(_load(args), _id_filter(args))
    if not groups:
        print("warning: no analyzable ids", file=sys.stderr)
        return 0
    stems = _stems(groups)
    print(f"{'id':>10} {'dlc':>3} {'frames':>8} {'active_bits':>11} {'max_transitions':>15}")
    for key, idtrace in groups:
        tang = bitlab.tang_from_idtrace(idtrace)
        bitlab.export_tang_csv(tang, outdir / f"{stems[key]}_tang.csv")
        active = int((tang.counts > 0).sum())
        print(
            f"{tokenizer.format_id(key[0]):>10} {key[1]:>3} {len(idtrace):>8} "
            f"{active:>11} {int(tang.counts.max()):>15}"
        )
    return 0


def cmd_tokenize(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    config = _config(args)
    groups = _select_groups(_load(args), _id_filter(args))
    if not groups:
        print("warning: no analyzable ids", file=sys.stderr)
        return 0
    stems = _stems(groups)
    print(f"{'id':>10} {'dlc':>3} {'signals':>8} {'padding':>8}")
    for key, idtrace in groups:
        tok = tokenizer.tokenize(bitlab.tang_from_idtrace(idtrace), config)
        tokenizer.export_tokenization_json(tok, outdir / f"{stems[key]}_tokens.json")
        print(
            f"{tokenizer.format_id(key[0]):>10} {key[1]:>3} "
            f"{len(tok.signal_clusters):>8} {len(tok.padding_clusters):>8}"
        )
    return 0


def cmd_extract(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    config = _config(args)
    groups = _select_groups(_load(args), _id_filter(args))
    if not groups:
        print("warning: no analyzable ids", file=sys.stderr)
        return 0
    stems = _stems(groups)
    print(f"{'id':>10} {'cluster':>9} {'width':>5} {'unique':>8} {'mean|d|':>10}")
    for key, idtrace in groups:
        tok = tokenizer.tokenize(bitlab.tang_from_idtrace(idtrace), config)
        summaries = []
        for c in tok.signal_clusters:
            series = signals.extract_series(idtrace, c, config.endianness)
            signals.export_series_csv(
                series, outdir / f"{stems[key]}_sig{c.lo}-{c.hi}.csv"
            )
            summary = signals.summarize(series)
            summaries.append(signals.summary_to_dict(series, summary))
            print(
                f"{tokenizer.format_id(key[0]):>10} {f'[{c.lo}..{c.hi}]':>9} "
                f"{c.width:>5} {summary.unique_value_count:>8} "
                f"{summary.mean_abs_first_difference:>10.6f}"
            )
        signals.export_summary_json(summaries, outdir / f"{stems[key]}_summary.json")
    return 0


def cmd_synth(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    gt = synth.load_ground_truth(args.input)
    trace = synth.generate_trace(gt)
    stem = f"{gt.arbitration_id:04X}"
    write_candump(trace, outdir / f"{stem}_trace.log")
    synth.save_ground_truth(gt, outdir / f"{stem}_groundtruth.json")
    print(
        f"{tokenizer.format_id(gt.arbitration_id)}: wrote {gt.frame_count} frames, "
        f"{len(gt.specs)} signal(s)"
    )
    return 0


def cmd_score(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    gt = synth.load_ground_truth(args.ground_truth)
    if args.tokenization:
        with open(args.tokenization) as fh:
            data = json.load(fh)
        tok = _tokenization_from_dict(data)
    elif args.input:
        trace = load_trace(args.input, format=args.format, strict=not args.lenient)
        toks = tokenizer.tokenize_trace(trace, _config(args))
        key = (gt.arbitration_id, gt.bit_width // 8)
        if key not in toks:
            raise CantokError(
                f"trace has no analyzable group for id "
                f"{tokenizer.format_id(gt.arbitration_id)} dlc {gt.bit_width // 8}"
            )
        tok = toks[key]
    else:
        raise CantokError("score needs --tokenization or --input")
    report = synth.score_tokenization(tok, gt)
    data = synth.score_to_dict(report)
    data["boundary_precision"] = round(data["boundary_precision"], 6)
    data["boundary_recall"] = round(data["boundary_recall"], 6)
    stem = f"{gt.arbitration_id:04X}"
    with open(outdir / f"{stem}_score.json", "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    print(f"{'metric':<22} value")
    for k, v in data.items():
        print(f"{k:<22} {v}")
    return 0


def _tokenization_from_dict(data: dict) -> tokenizer.Tokenization:
    cfg = data.get("config", {})
    clusters = tuple(
        tokenizer.TokenCluster(
            kind=c["kind"],
            lo=c["lo"],
            hi=c["hi"],
            lsb_index=c.get("lsb"),
            msb_index=c.get("msb"),
            lsb_transitions=c.get("lsb_transitions"),
        )
        for c in data["clusters"]
    )
    return tokenizer.Tokenization(
        arbitration_id=int(str(data["id"]), 16),
        bit_width=data["bit_width"],
        clusters=clusters,
        config=TokenizerConfig(
            endianness=cfg.get("endianness", "big"),
            threshold=cfg.get("threshold", 0),
            padding_mode=cfg.get("padding_mode", "exclude"),
        ),
    )


_COMMANDS = {
    "tang": cmd_tang,
    "tokenize": cmd_tokenize,
    "extract": cmd_extract,
    "synth": cmd_synth,
    "score": cmd_score,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (CantokError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
