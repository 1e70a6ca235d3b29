"""``towerkit`` command line.

Every leaf command takes ``--format text|json`` (``--json`` for short) and
``--config PATH``.  In JSON mode failures print ``{"error": {...}}`` and exit
with status 2; a computed verdict, including a negative one, exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from towerkit import chainring, obstruction, prosequence, tower
from towerkit.config import RunConfig, load_config
from towerkit.errors import ParseError, TowerkitError
from towerkit.magnus import auto_depth, beta, depth, format_series
from towerkit.words import parse_word

EXIT_ERROR = 2


class CommandError(TowerkitError):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _index_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output", choices=("text", "json"), default=None)
    common.add_argument("--json", dest="output", action="store_const", const="json")
    common.add_argument("--config", default=None, help="key=value config file")

    parser = argparse.ArgumentParser(prog="towerkit", description="Relator tower, Magnus depth and pro-group checks.")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, func, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("tower", help="the relator tower").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "relators", cmd_tower_relators, "relators r_{i,j} of one level")
    p.add_argument("--level", type=_positive, required=True)

    g = groups.add_parser("magnus", help="Magnus embedding").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "embed", cmd_magnus_embed, "truncated series beta(w)")
    p.add_argument("--word", required=True)
    p.add_argument("--degree", type=_positive, required=True)
    p = leaf(g, "depth", cmd_magnus_depth, "Delta-adic depth of a word")
    p.add_argument("--word", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--degree", type=_positive)
    mode.add_argument("--auto", action="store_true", help="escalate the cap up to the ceiling (default)")

    g = groups.add_parser("obstruct", help="filtration obstruction").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "p", cmd_obstruct_p, "relator depths and p_i")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--ceiling", type=_positive)
    p = leaf(g, "refute", cmd_obstruct_refute, "sampled refutation of r_{i,j} = h*w")
    p.add_argument("--i", dest="i", type=_positive, required=True)
    p.add_argument("--k", dest="k", type=_positive, required=True)
    p.add_argument("--samples", type=_positive, default=200)
    p.add_argument("--seed", type=int)
    p.add_argument("--cap", type=_positive)
    p.add_argument("--workers", type=_positive)

    g = groups.add_parser("proseq", help="inverse sequences and witnesses").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "verify-ap", cmd_verify_ap, "check the tower's plain perfectness witnesses")
    p.add_argument("--max-level", type=_positive, required=True)
    p.add_argument("--augmentation", choices=("standard", "maximal"), default="standard")
    p = leaf(g, "verify-strong", cmd_verify_strong, "check a strong perfectness witness file")
    p.add_argument("--max-level", type=_positive, required=True)
    p.add_argument("--witness", required=True, help="witness or sequence JSON document")
    p = leaf(g, "subseq", cmd_subseq, "pass to a subsequence of the tower")
    p.add_argument("--indices", type=_index_list, required=True)
    p.add_argument("--transport", action="store_true", help="carry the perfectness witnesses along")
    p.add_argument("--export", action="store_true", help="print the full sequence document")
    p = leaf(g, "export", cmd_export, "print the witnessed tower as a sequence document")
    p.add_argument("--max-level", type=_positive, required=True)
    p.add_argument("--augmentation", choices=("standard", "maximal"), default="standard")

    g = groups.add_parser("chain", help="group-ring chain complexes").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "homology", cmd_chain_homology, "kernel and cokernel of the boundary")
    p.add_argument("--blocks", type=_positive, required=True)
    p.add_argument("--show-complex", action="store_true")
    p = leaf(g, "limit", cmd_chain_limit, "direct limit along block inclusions")
    p.add_argument("--max-blocks", type=_positive, required=True)
    return parser


# -- commands: each returns (json document, text) ---------------------------------------


def cmd_tower_relators(args, cfg: RunConfig):
    lv = tower.relators(args.level, cfg.word_length_ceiling)
    lines = [f"level {lv.level}: unreduced length 4^{lv.level} = {lv.unreduced_length}"]
    for j, w in enumerate(lv.words, start=1):
        lines.append(f"r_{{{lv.level},{j}}} = {w}   (reduced length {len(w)})")
    return lv.to_json(), "\n".join(lines)


def _word(text: str):
    return parse_word(text)


def cmd_magnus_embed(args, cfg: RunConfig):
    w = _word(args.word)
    s = beta(w, args.degree, cfg.term_bound)
    doc = {"word": str(w), "series": s.to_json()}
    return doc, f"beta({w}) = {format_series(s)}  (mod Delta^{args.degree + 1})"


def cmd_magnus_depth(args, cfg: RunConfig):
    w = _word(args.word)
    if args.degree is not None:
        d = depth(beta(w, args.degree, cfg.term_bound))
        cap = args.degree
    else:
        d = auto_depth(w, hint=1, ceiling=cfg.cap_ceiling, term_bound=cfg.term_bound)
        cap = cfg.cap_ceiling
    doc = {"word": str(w), "cap": cap, "depth": d.to_json(), "display": str(d)}
    return doc, str(d)


def cmd_obstruct_p(args, cfg: RunConfig):
    ceiling = args.ceiling or cfg.cap_ceiling
    fr = obstruction.compute_p(args.level, ceiling, term_bound=cfg.term_bound)
    return fr.to_json(), fr.text()


def cmd_obstruct_refute(args, cfg: RunConfig):
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        if cfg.output == "json":
            raise CommandError("--seed is required for sampling commands in JSON mode")
        seed = 0
    report = obstruction.refute_sap_instance(
        args.i,
        args.k,
        samples=args.samples,
        seed=seed,
        cap=args.cap,
        cap_ceiling=cfg.cap_ceiling,
        term_bound=cfg.term_bound,
        workers=args.workers or cfg.workers,
    )
    return report.to_json(), report.text()


def _verdict_doc(name: str, seq, failures: list[str], extra=None) -> tuple[dict, str]:
    verdict = "verified" if not failures else "rejected"
    doc = {"check": name, "levels": list(seq.labels), "verdict": verdict, "failures": failures}
    doc.update(extra or {})
    text = [f"{name} on levels {list(seq.labels)}: {verdict}"]
    text += [f"  {f}" for f in failures]
    return doc, "\n".join(text)


def cmd_verify_ap(args, cfg: RunConfig):
    seq = tower.witnessed_tower(args.max_level, args.augmentation)
    failures = prosequence.verify_sequence(seq) + prosequence.check_perfectness(seq, seq.witness, prosequence.PLAIN)
    return _verdict_doc("plain perfectness", seq, failures, {"small": seq.small})


def cmd_verify_strong(args, cfg: RunConfig):
    doc = json.loads(Path(args.witness).read_text())
    if doc.get("schema") == "towerkit.sequence":
        seq = prosequence.sequence_from_json(doc)
        if seq.witness is None:
            raise CommandError("sequence document carries no witness")
        if seq.labels[-1] > args.max_level:
            seq = prosequence.take_subsequence(seq, [lb for lb in seq.labels if lb <= args.max_level], transport=True)
        witness = seq.witness
    else:
        witness = prosequence.witness_from_json(doc)
        seq = tower.tower_sequence(args.max_level)
    failures = prosequence.verify_sequence(seq) + prosequence.check_perfectness(seq, witness, prosequence.STRONG)
    return _verdict_doc("strong perfectness", seq, failures, {"small": seq.small})


def cmd_subseq(args, cfg: RunConfig):
    indices = args.indices
    seq = tower.witnessed_tower(max(indices) if indices else 1)
    sub = prosequence.take_subsequence(seq, indices, transport=args.transport)
    failures = prosequence.verify_sequence(sub)
    if args.transport:
        failures += prosequence.check_perfectness(sub, sub.witness, prosequence.PLAIN)
    if args.export:
        doc = prosequence.sequence_to_json(sub)
        return doc, prosequence.dumps(doc)
    kernels = {lv.label: len(lv.kernel) for lv in sub.levels[1:]}
    return _verdict_doc(
        "subsequence" + (" with transported witnesses" if args.transport else ""),
        sub,
        failures,
        {"kernel_generators": {str(k): v for k, v in kernels.items()}},
    )


def cmd_export(args, cfg: RunConfig):
    doc = prosequence.sequence_to_json(tower.witnessed_tower(args.max_level, args.augmentation))
    return doc, prosequence.dumps(doc)


def cmd_chain_homology(args, cfg: RunConfig):
    c = chainring.build_complex(args.blocks)
    h = chainring.homology(c)
    doc = {"blocks": args.blocks, **h.to_json()}
    text = h.text()
    if args.show_complex:
        doc["complex"] = c.to_json()
        text += "\n" + json.dumps(c.to_json(), indent=2)
    return doc, text


def cmd_chain_limit(args, cfg: RunConfig):
    lim = chainring.direct_limit(args.max_blocks)
    lines = [
        f"m={s['blocks']}: ranks {s['ranks']}, inclusion to m+1: "
        f"{chainring.UPPER} {s['maps'][chainring.UPPER]}, {chainring.LOWER} {s['maps'][chainring.LOWER]}"
        for s in lim.stages
    ]
    lines.append(f"direct limit: H_{chainring.UPPER} = (ZG)^{lim.kernel_rank}, H_{chainring.LOWER} = (ZG)^{lim.cokernel_rank}")
    return lim.to_json(), "\n".join(lines)


# -- driver ---------------------------------------------------------------------------


def _error_doc(exc: BaseException) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["position"] = exc.position
    return {"error": err}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    json_mode = args.output == "json"
    try:
        cfg = load_config(args.config).updated(output=args.output)
        json_mode = cfg.output == "json"
        doc, text = args.func(args, cfg)
    except (TowerkitError, ValueError, OSError, RecursionError) as exc:
        if json_mode:
            print(json.dumps(_error_doc(exc)))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if json_mode:
        print(json.dumps(doc, indent=2))
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
