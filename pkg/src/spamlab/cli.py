"""Command line entry point.

A JSON config file (``--config``) is the canonical input; flags override
its fields. Exit codes: 0 success, 1 a pipeline stage failed (see the
``FAILED`` file in the output directory), 2 invalid configuration or corpus.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigurationError, SpamLabError
from .pipeline import (FEATURE_SIZES, PREP_FLAGS, RunConfig, StageError, ablate_features, ablate_preprocessing,
                       compare_repeats, explain_run, replot, run_pipeline)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--corpus-root", help="corpus directory (falls back to $ENRON_CORPUS_DIR)")
    p.add_argument("--output-dir", "-o")
    p.add_argument("--seed", type=int)
    p.add_argument("--dict-size", type=int)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--folds", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--threads", type=int, help="cap on worker and BLAS threads")
    p.add_argument("--models", help="comma-separated model kinds, e.g. rf,xgb,mlp")
    p.add_argument("--no-balance", action="store_true", help="keep the original class sizes")
    p.add_argument("--no-timing", action="store_true", help="skip prediction timing")
    for flag in PREP_FLAGS:
        p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--explain-models", help="comma-separated model kinds to attribute")
    p.add_argument("--explain-instances", type=int)
    p.add_argument("--explain-permutations", type=int)
    p.add_argument("--quiet", "-q", action="store_true")


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    simple = {"corpus_root": args.corpus_root, "output_dir": args.output_dir, "seed": args.seed,
              "dict_size": args.dict_size, "train_fraction": args.train_fraction, "folds": args.folds,
              "repeats": args.repeats, "threads": args.threads}
    for key, val in simple.items():
        if val is not None:
            setattr(cfg, key, val)
    if args.models:
        by_kind = {m["kind"] if isinstance(m, dict) else m: m for m in cfg.models}
        cfg.models = [by_kind.get(k.strip(), {"kind": k.strip()}) for k in args.models.split(",") if k.strip()]
    if args.no_balance:
        cfg.balance = False
    if args.no_timing:
        cfg.timing = False
    prep = dict(cfg.prep)
    for flag in PREP_FLAGS:
        v = getattr(args, flag)
        if v is not None:
            prep[flag] = v
    cfg.prep = prep
    if args.explain_models:
        cfg.explain.models = [k.strip() for k in args.explain_models.split(",") if k.strip()]
    if args.explain_instances is not None:
        cfg.explain.instances = args.explain_instances
    if args.explain_permutations is not None:
        cfg.explain.permutations = args.explain_permutations
    return cfg


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spamlab", description="Spam classifier benchmark runs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="full pipeline: metrics, significance, ROC, attributions, plots")
    _add_run_flags(p)
    p = sub.add_parser("ablate-features", help="cross-validated F-score per dictionary size")
    _add_run_flags(p)
    p.add_argument("--sizes", default=",".join(map(str, FEATURE_SIZES)))
    p = sub.add_parser("ablate-prep", help="preprocessing on versus off")
    _add_run_flags(p)
    p.add_argument("--off-flags", help="JSON object of flags for the 'off' arm (default: all false)")
    p = sub.add_parser("compare", help="paired t-tests over repeated seeded hold-out splits")
    _add_run_flags(p)
    p = sub.add_parser("explain", help="Shapley attributions and summary.svg only")
    _add_run_flags(p)
    p = sub.add_parser("plot", help="redraw roc.svg and summary.svg from an output directory")
    p.add_argument("output_dir")
    p.add_argument("--top-k", type=int, default=10)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    log = None if getattr(args, "quiet", False) else (lambda msg: print(msg, file=sys.stderr))
    try:
        if args.command == "plot":
            for name in replot(args.output_dir, args.top_k):
                print(name)
            return 0
        cfg = build_config(args)
        cfg.validate()
        if args.command == "run":
            bundle = run_pipeline(cfg, log)
            if not bundle.ok:
                print(f"failed in stage {bundle.failed_stage}; see {bundle.output_dir / 'FAILED'}", file=sys.stderr)
                return 1
            for name, f, fs, auc, aucs in bundle.summary_rows():
                print(f"{name:20s} F={_pct(f)} ± {_pct(fs)}  AUC={_num(auc)} ± {_num(aucs)}")
        elif args.command == "ablate-features":
            try:
                sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            except ValueError:
                raise ConfigurationError(f"bad --sizes {args.sizes!r}") from None
            for row in ablate_features(cfg, sizes, log):
                print(f"{row['dict_size']:5d}  F={_pct(row['mean_fscore'])}")
        elif args.command == "ablate-prep":
            off = None
            if args.off_flags:
                try:
                    off = json.loads(args.off_flags)
                except json.JSONDecodeError as e:
                    raise ConfigurationError(f"bad --off-flags: {e}") from None
                if not isinstance(off, dict) or set(off) - set(PREP_FLAGS):
                    raise ConfigurationError(f"--off-flags keys must be among {list(PREP_FLAGS)}")
            for row in ablate_preprocessing(cfg, off, log):
                print(f"{row['model']:20s} on={_pct(row['fscore_on'])} off={_pct(row['fscore_off'])} ratio={_num(row['ratio'])}")
        elif args.command == "compare":
            _, matrix = compare_repeats(cfg, log)
            n_sig = sum(r.significant for r in matrix.results)
            print(f"{matrix.n_comparisons} comparisons, {n_sig} significant after Bonferroni")
        elif args.command == "explain":
            for model, ranking in explain_run(cfg, log).items():
                print(f"{model}: " + ", ".join(f.feature for f in ranking))
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except StageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except SpamLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def _pct(v) -> str:
    return "  n/a" if v is None else f"{100 * v:5.1f}%"


def _num(v) -> str:
    return "n/a" if v is None else f"{v:.3f}"


if __name__ == "__main__":
    sys.exit(main())
