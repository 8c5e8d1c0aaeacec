"""Command-line front end: chain descriptions, tower files, reports.

Input files are JSON with a versioned ``schema`` field.  A chain description
(``solch-chain/1``) names one of three kinds — ``builder`` (a named
construction plus parameters), ``permutation_tower`` (explicit level
tables), or ``fp_presentation`` (a presentation plus per-level subgroup
words) — and builds to a tower file (``solch-tower/1``).  Reports serialize
with their certification depth and search bounds alongside every verdict.

Exit codes: 0 ok, 2 parse/schema error, 3 validation failure, 4 budget
exceeded.  Verdicts are never encoded in exit codes.

Bounds default to depth 6, word length 6, degree cap 200,000, seed 0;
each is overridable by a flag, by an environment variable (``SOLCH_DEPTH``,
``SOLCH_MAX_WORD_LEN``, ``SOLCH_DEGREE_CAP``, ``SOLCH_SEED``), or by the
description's ``options`` block, in that order of precedence.
"""

import argparse
import json
import os
import sys

from .builders import (CATALOG, free_tree_sqa_fixture, fp_tower, odometer,
                       rt_klein)
from .fpgroup import Presentation, WordSyntaxError
from .invariants import (NotKernelCandidate, analyze, classify, holonomy_test,
                         sqa_violation_search, stability_report,
                         equivalence_probe, virtual_regularity_probe,
                         virtual_regularity_scan)
from .permgroup import GroupSizeError
from .tower import ChainTower, validate

CHAIN_SCHEMA = "solch-chain/1"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_BUDGET = 4

DEFAULT_BOUNDS = {
    "depth": 6,
    "max_word_length": 6,
    "degree_cap": 200_000,
    "seed": 0,
}

_ENV_NAMES = {
    "depth": "SOLCH_DEPTH",
    "max_word_length": "SOLCH_MAX_WORD_LEN",
    "degree_cap": "SOLCH_DEGREE_CAP",
    "seed": "SOLCH_SEED",
}


class _CliError(Exception):
    """Carries an exit code and a message for the error stream."""

    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _bound(name, flag_value, options):
    """Resolve one bound: flag > environment > description option > default."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(_ENV_NAMES[name])
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _CliError(EXIT_PARSE, "%s must be an integer, got %r"
                            % (_ENV_NAMES[name], env))
    if options and name in options:
        value = options[name]
        if not isinstance(value, int):
            raise _CliError(EXIT_PARSE, "option %r must be an integer" % name)
        return value
    return DEFAULT_BOUNDS[name]


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _CliError(EXIT_PARSE, "cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_PARSE, "%s is not valid JSON: %s" % (path, exc))


def _dump_json(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def _load_tower(path):
    data = _load_json(path)
    try:
        tower = ChainTower.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise _CliError(EXIT_PARSE, "%s: %s" % (path, exc))
    report = validate(tower)
    if not report.ok:
        raise _CliError(EXIT_VALIDATION, "%s failed validation: %s"
                        % (path, "; ".join(report.violations)))
    return tower


# ---------------------------------------------------------------------------
# chain descriptions

# Parametric builders exposed to description files; catalog names are
# accepted as well (with no parameters).
_PARAMETRIC_BUILDERS = {
    "odometer": (odometer, ("scales",)),
    "rt_klein": (rt_klein, ("depth",)),
    "free_tree_sqa": (free_tree_sqa_fixture, ("depth",)),
}


def _build_description(data):
    """Build a ChainTower from a parsed description dict."""
    if not isinstance(data, dict):
        raise _CliError(EXIT_PARSE, "description must be a JSON object")
    if data.get("schema") != CHAIN_SCHEMA:
        raise _CliError(EXIT_PARSE, "expected schema %r, got %r"
                        % (CHAIN_SCHEMA, data.get("schema")))
    kind = data.get("kind")
    if kind == "builder":
        return _build_builder(data)
    if kind == "permutation_tower":
        return _build_permutation_tower(data)
    if kind == "fp_presentation":
        return _build_fp_presentation(data)
    raise _CliError(EXIT_PARSE, "unknown description kind %r" % kind)


def _check_depth_field(data, implied):
    depth = data.get("depth")
    if depth is not None and depth != implied:
        raise _CliError(EXIT_PARSE, "depth field %r does not match the "
                        "described depth %d" % (depth, implied))


def _build_builder(data):
    name = data.get("builder")
    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise _CliError(EXIT_PARSE, "builder params must be an object")
    if name in _PARAMETRIC_BUILDERS:
        fn, allowed = _PARAMETRIC_BUILDERS[name]
        extra = set(params) - set(allowed)
        if extra:
            raise _CliError(EXIT_PARSE, "builder %r does not take %s"
                            % (name, sorted(extra)))
        if "depth" in allowed and "depth" not in params and "depth" in data:
            params = dict(params, depth=data["depth"])
        tower = fn(**params)
    elif name in CATALOG:
        if params:
            raise _CliError(EXIT_PARSE,
                            "catalog fixture %r takes no parameters" % name)
        tower = CATALOG[name].factory()
    else:
        raise _CliError(EXIT_PARSE, "unknown builder %r (run `solch catalog` "
                        "for the list)" % name)
    _check_depth_field(data, tower.depth)
    return tower


def _build_permutation_tower(data):
    body = {
        "schema": "solch-tower/1",
        "gen_names": data.get("generators"),
        "levels": data.get("levels"),
        "source": {"kind": "permutation_tower"},
    }
    if not isinstance(body["gen_names"], list) or not body["gen_names"]:
        raise _CliError(EXIT_PARSE, "generators must be a nonempty list")
    if not isinstance(body["levels"], list):
        raise _CliError(EXIT_PARSE, "levels must be a list")
    _check_depth_field(data, len(body["levels"]) - 1)
    try:
        return ChainTower.from_json_dict(body)
    except (ValueError, KeyError, TypeError) as exc:
        raise _CliError(EXIT_PARSE, "bad level tables: %s" % exc)


def _build_fp_presentation(data):
    names = data.get("generators")
    relators = data.get("relators")
    level_words = data.get("level_subgroup_words")
    if not isinstance(names, list) or not names:
        raise _CliError(EXIT_PARSE, "generators must be a nonempty list")
    if not isinstance(relators, list):
        raise _CliError(EXIT_PARSE, "relators must be a list")
    if not isinstance(level_words, list) or not level_words:
        raise _CliError(EXIT_PARSE,
                        "level_subgroup_words must be a nonempty list")
    _check_depth_field(data, len(level_words))
    try:
        pres = Presentation(tuple(names), list(relators))
    except WordSyntaxError as exc:
        raise _CliError(EXIT_PARSE, "bad relator: %s" % exc)
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, "bad presentation: %s" % exc)
    max_cosets = (data.get("options") or {}).get("max_cosets", 100_000)
    try:
        return fp_tower(pres, level_words, max_cosets=max_cosets)
    except WordSyntaxError as exc:
        raise _CliError(EXIT_PARSE, "bad subgroup word: %s" % exc)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_build(args, out):
    data = _load_json(args.description)
    try:
        tower = _build_description(data)
    except GroupSizeError as exc:
        raise _CliError(EXIT_BUDGET, str(exc))
    except _CliError:
        raise
    except (ValueError, TypeError) as exc:
        raise _CliError(EXIT_VALIDATION, str(exc))
    options = data.get("options")
    if options is not None:
        if not isinstance(options, dict):
            raise _CliError(EXIT_PARSE, "options must be an object")
        tower.source = dict(tower.source, options=options)
    report = validate(tower)
    if not report.ok:
        raise _CliError(EXIT_VALIDATION, "built tower failed validation: %s"
                        % "; ".join(report.violations))
    payload = tower.to_json_dict()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            _dump_json(payload, fh)
    else:
        _dump_json(payload, out)
    return EXIT_OK


def _cmd_validate(args, out):
    data = _load_json(args.tower)
    try:
        tower = ChainTower.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise _CliError(EXIT_PARSE, "%s: %s" % (args.tower, exc))
    report = validate(tower)
    _dump_json({"ok": report.ok, "flags": report.flags,
                "violations": report.violations}, out)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def _cmd_analyze(args, out):
    tower = _load_tower(args.tower)
    options = (tower.source or {}).get("options")
    depth = _bound("depth", args.depth, options)
    depth = min(depth, tower.depth)
    max_len = _bound("max_word_length", args.max_word_len, options)
    degree_cap = _bound("degree_cap", args.degree_cap, options)
    seed = _bound("seed", args.seed, options)
    try:
        report = analyze(tower, depth=depth, max_word_length=max_len,
                         degree_cap=degree_cap, seed=seed)
    except GroupSizeError as exc:
        # budget exceeded: emit what is known, flagged, and exit 4
        _dump_json({
            "schema": "solch-report/1",
            "source": tower.source,
            "bounds": {"depth": depth, "max_word_length": max_len,
                       "degree_cap": degree_cap, "seed": seed},
            "degrees": tower.degrees,
            "budget_exceeded": str(exc),
        }, out)
        return EXIT_BUDGET
    if args.format == "text":
        out.write(report.to_text())
    else:
        _dump_json(report.to_json_dict(), out)
    return EXIT_OK


def _cmd_classify(args, out):
    tower = _load_tower(args.tower)
    depth = min(_bound("depth", args.depth, None), tower.depth)
    verdict = classify(tower, depth)
    _dump_json(verdict.to_json(), out)
    return EXIT_OK


def _cmd_stability(args, out):
    tower = _load_tower(args.tower)
    depth = min(_bound("depth", args.depth, None), tower.depth)
    _dump_json(stability_report(tower, depth).to_json(), out)
    return EXIT_OK


def _cmd_holonomy(args, out):
    tower = _load_tower(args.tower)
    depth = min(_bound("depth", args.depth, None), tower.depth)
    try:
        verdict = holonomy_test(tower, args.word, depth)
    except WordSyntaxError as exc:
        raise _CliError(EXIT_PARSE, "bad word: %s" % exc)
    except NotKernelCandidate as exc:
        # moving the basepoint is an outcome, not an error
        _dump_json({"word": exc.word_string, "eligible": False,
                    "moved_at_level": exc.level,
                    "moved_to": exc.moved_to}, out)
        return EXIT_OK
    _dump_json(verdict.to_json(), out)
    return EXIT_OK


def _cmd_sqa(args, out):
    tower = _load_tower(args.tower)
    depth = min(_bound("depth", args.depth, None), tower.depth)
    max_len = _bound("max_word_length", args.max_word_len, None)
    _dump_json(sqa_violation_search(tower, depth, max_len).to_json(), out)
    return EXIT_OK


def _cmd_equiv(args, out):
    tower_a = _load_tower(args.tower_a)
    tower_b = _load_tower(args.tower_b)
    depth = args.depth
    if depth is None:
        depth = min(_bound("depth", None, None), tower_a.depth, tower_b.depth)
    try:
        verdict = equivalence_probe(tower_a, tower_b, depth)
    except ValueError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc))
    _dump_json(verdict.to_json(), out)
    return EXIT_OK


def _cmd_vr(args, out):
    tower = _load_tower(args.tower)
    depth = min(_bound("depth", args.depth, None), tower.depth)
    try:
        if args.word:
            result = virtual_regularity_probe(tower, args.word, depth=depth)
            _dump_json(result.to_json(), out)
        else:
            scan = virtual_regularity_scan(tower, max_index=args.max_index,
                                           depth=depth)
            _dump_json(scan.to_json(), out)
    except WordSyntaxError as exc:
        raise _CliError(EXIT_PARSE, "bad subgroup word: %s" % exc)
    except ValueError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc))
    return EXIT_OK


def _cmd_catalog(args, out):
    entries = []
    for name, entry in CATALOG.items():
        entries.append({"name": name, "kind": "catalog",
                        "summary": entry.summary})
    for name, (_, params) in _PARAMETRIC_BUILDERS.items():
        entries.append({"name": name, "kind": "parametric",
                        "params": list(params)})
    _dump_json({"builders": entries}, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_depth(parser):
    parser.add_argument("--depth", type=int, default=None,
                        help="certification depth (default: SOLCH_DEPTH or 6,"
                             " clamped to the tower depth)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="solch",
        description="Build and analyze group-chain towers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a tower file from a chain "
                                     "description")
    p.add_argument("description", help="chain description JSON file")
    p.add_argument("-o", "--output", default=None,
                   help="tower file to write (default: stdout)")
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("validate", help="validate a tower file")
    p.add_argument("tower")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("analyze", help="full invariant report")
    p.add_argument("tower")
    _add_depth(p)
    p.add_argument("--max-word-len", type=int, default=None,
                   help="word-length bound for kernel/SQA searches")
    p.add_argument("--degree-cap", type=int, default=None,
                   help="largest level degree to materialize")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for the conjugator sampling fallback")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("classify", help="regularity classification")
    p.add_argument("tower")
    _add_depth(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("stability", help="discriminant stability report")
    p.add_argument("tower")
    _add_depth(p)
    p.set_defaults(fn=_cmd_stability)

    p = sub.add_parser("holonomy", help="germinal holonomy of one word")
    p.add_argument("tower")
    p.add_argument("word", help="word over the tower generators, "
                                "e.g. 'a b^-1'")
    _add_depth(p)
    p.set_defaults(fn=_cmd_holonomy)

    p = sub.add_parser("sqa", help="search for SQA violations")
    p.add_argument("tower")
    _add_depth(p)
    p.add_argument("--max-word-len", type=int, default=None)
    p.set_defaults(fn=_cmd_sqa)

    p = sub.add_parser("equiv", help="probe two towers for equivalence")
    p.add_argument("tower_a")
    p.add_argument("tower_b")
    _add_depth(p)
    p.set_defaults(fn=_cmd_equiv)

    p = sub.add_parser("vr", help="virtual regularity probe or scan")
    p.add_argument("tower")
    p.add_argument("--word", action="append", default=None,
                   help="subgroup generator word (repeatable); omitted: scan "
                        "index-bounded normal subgroups")
    p.add_argument("--max-index", type=int, default=12,
                   help="index bound for the scan (default 12)")
    _add_depth(p)
    p.set_defaults(fn=_cmd_vr)

    p = sub.add_parser("catalog", help="list available builders")
    p.set_defaults(fn=_cmd_catalog)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except _CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.code
    except GroupSizeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
