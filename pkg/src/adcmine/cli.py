"""Command line front end.

Reads a CSV, builds the predicate space and pair evidence, enumerates
minimal approximately-valid denial constraints, and writes them as text
or JSON lines.  Results go to --output (default stdout) and depend only
on the logical inputs; timings and notices go to stderr so reruns stay
byte-identical.

Exit codes: 0 success, 2 bad configuration, 3 bad input data,
4 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from dataclasses import dataclass

from .approx import ApproxFunction, FnKind
from .dataset import DataError, Dataset, load_csv
from .enumeration import EmittedDC, InternalError, enumerate_dcs
from .evidence import _backend_name, build_evidence, load_cache, save_cache
from .predicates import PredicateSpace, generate_predicate_space
from .sampling import SampleSpec, draw_sample

_FN_KINDS = {"f1": FnKind.F1, "f2": FnKind.F2, "f3": FnKind.F3_GREEDY}


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adcmine",
        description="Mine minimal approximate denial constraints from a CSV table.",
    )
    p.add_argument("--input", required=True, help="CSV file to mine")
    p.add_argument("--header", action=argparse.BooleanOptionalAction, default=True,
                   help="first CSV line holds column names (default: yes)")
    p.add_argument("--null", default="", metavar="TOKEN",
                   help="cell text treated as null (default: empty string)")
    p.add_argument("--function", choices=("f1", "f2", "f3"), default="f1",
                   help="approximation function (default: f1)")
    p.add_argument("--epsilon", type=float, required=True,
                   help="violation budget in [0, 1]")
    p.add_argument("--sample", type=float, default=None, metavar="FRACTION",
                   help="estimate from a row sample of this fraction")
    p.add_argument("--alpha", type=float, default=0.05,
                   help="confidence parameter for sampled acceptance (default: 0.05)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    p.add_argument("--common-threshold", type=float, default=0.3, metavar="T",
                   help="minimum shared-value overlap for cross-column predicates "
                        "(default: 0.3)")
    p.add_argument("--output", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for the evidence scan (default: 1)")
    p.add_argument("--evidence-cache", default=None, metavar="PATH",
                   help="reuse or create a binary evidence cache at PATH")
    return p


@dataclass
class RunConfig:
    input: str
    has_header: bool
    null_token: str
    function: FnKind
    epsilon: float
    sample: SampleSpec | None
    alpha: float
    common_threshold: float
    output: str
    format: str
    threads: int
    evidence_cache: str | None

    @classmethod
    def from_args(cls, a: argparse.Namespace) -> "RunConfig":
        if a.epsilon < 0:
            raise ValueError("--epsilon must be >= 0")
        if a.threads < 1:
            raise ValueError("--threads must be >= 1")
        if not 0.0 <= a.common_threshold <= 1.0:
            raise ValueError("--common-threshold must lie in [0, 1]")
        sample = None
        if a.sample is not None:
            sample = SampleSpec(a.sample, a.seed)
            if not 0.0 < a.alpha < 0.5:
                raise ValueError("--alpha must lie in (0, 0.5)")
        if sample is not None and a.evidence_cache is not None:
            raise ValueError("--evidence-cache cannot be combined with --sample")
        return cls(a.input, a.header, a.null, _FN_KINDS[a.function], a.epsilon,
                   sample, a.alpha, a.common_threshold, a.output, a.format,
                   a.threads, a.evidence_cache)


def _load_or_build_evidence(d: Dataset, space: PredicateSpace, cfg: RunConfig,
                            need_vios: bool, err):
    if cfg.evidence_cache is not None:
        try:
            e, v = load_cache(cfg.evidence_cache)
            if e.n_preds == len(space) and e.n_rows == d.n_rows:
                print("evidence cache: hit", file=err)
                return e, v
            print("evidence cache: shape mismatch, rebuilding", file=err)
        except FileNotFoundError:
            pass
        except DataError as exc:
            print(f"evidence cache: unreadable ({exc}), rebuilding", file=err)
        e, v = build_evidence(d, space, threads=cfg.threads, with_vios=True)
        save_cache(cfg.evidence_cache, e, v)
        return e, v
    return build_evidence(d, space, threads=cfg.threads, with_vios=need_vios)


def _text_lines(space: PredicateSpace, found: list[EmittedDC],
                stats_pairs: list[tuple[str, object]]):
    for dc in found:
        yield space.render_dc(dc.hitting_set)
    for key, val in stats_pairs:
        yield f"# {key}: {val}"


def _jsonl_lines(space: PredicateSpace, found: list[EmittedDC],
                 stats_pairs: list[tuple[str, object]]):
    for dc in found:
        rec = {
            "dc": space.render_dc(dc.hitting_set),
            "predicates": [space.render(p) for p in dc.dc_predicates],
            "size": len(dc.dc_predicates),
            "violations": dc.violations,
            "score": dc.score,
        }
        if dc.sampled is not None:
            rec["sampled"] = dc.sampled
        yield json.dumps(rec, ensure_ascii=False)
    yield json.dumps({"stats": {k.replace(" ", "_"): v for k, v in stats_pairs}},
                     ensure_ascii=False)


def run(cfg: RunConfig, out, err) -> int:
    d = load_csv(cfg.input, has_header=cfg.has_header, null_token=cfg.null_token)
    if d.n_rows < 2:
        raise DataError("need at least 2 rows to form tuple pairs")
    space = generate_predicate_space(d, cfg.common_threshold)
    if len(space) == 0:
        raise DataError("no predicates could be formed from this table")

    d_scan = d
    sample_rows = None
    if cfg.sample is not None:
        d_scan, rows = draw_sample(d, cfg.sample.fraction, cfg.sample.seed)
        sample_rows = int(rows.shape[0])
        print(f"sampling: {sample_rows} of {d.n_rows} rows "
              f"(fraction {cfg.sample.fraction}, seed {cfg.sample.seed})", file=err)

    need_vios = cfg.function is not FnKind.F1
    t0 = time.perf_counter()
    e, v = _load_or_build_evidence(d_scan, space, cfg, need_vios, err)
    t1 = time.perf_counter()

    if cfg.function is FnKind.F1:
        fn = ApproxFunction.f1(d_scan.n_rows)
    elif cfg.function is FnKind.F2:
        fn = ApproxFunction.f2(v, d_scan.n_rows)
    else:
        fn = ApproxFunction.f3_greedy(v, d_scan.n_rows)

    sample_alpha = None
    if cfg.sample is not None:
        if cfg.function is FnKind.F1:
            sample_alpha = cfg.alpha
        else:
            print("notice: sampling with the tuple-based functions carries no "
                  "statistical guarantee; scores describe the sample only", file=err)

    found, stats = enumerate_dcs(e, space, fn, cfg.epsilon,
                                 sample_alpha=sample_alpha, sort_output=True)
    t2 = time.perf_counter()

    if stats.empty_dc_accepted:
        print("warning: epsilon exceeds total violation rate; empty DC accepted",
              file=err)

    stats_pairs: list[tuple[str, object]] = [
        ("rows", d.n_rows),
        ("predicates", len(space)),
        ("distinct evidence sets", e.n_distinct),
        ("pair universe", e.pair_universe),
        ("dcs", len(found)),
    ]
    if sample_rows is not None:
        stats_pairs.insert(1, ("sample rows", sample_rows))

    lines = (_text_lines if cfg.format == "text" else _jsonl_lines)(
        space, found, stats_pairs)
    if cfg.output == "-":
        for line in lines:
            out.write(line + "\n")
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            for line in lines:
                fh.write(line + "\n")

    print(f"timing: evidence {t1 - t0:.2f}s, enumeration {t2 - t1:.2f}s "
          f"({_backend_name()} backend, {stats.nodes} nodes)", file=err)
    return 0


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, sys.stdout, sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
