"""Verification driver: seeded suites, instance checks, JSON reports.

The report writer is deliberately boring.  Every value is text, an int
or a bool, keys are sorted, and nothing wall-clock-dependent goes into
the JSON; timing is written to stderr on request instead.  Identical
configuration must give identical report bytes.
"""

import argparse
import hashlib
import itertools
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from random import Random

from . import __version__
from .alternator import (
    IDENTITY_NAMES,
    AlternatorInstance,
    check_identity,
    random_case,
    random_element,
    random_invariant,
)
from .errors import (
    AltkitError,
    ConfigInvalid,
    ParseError,
    SchemaError,
    UnsupportedBase,
)
from .gen_etale import (
    b_plus,
    diagonal_support_probe,
    is_generically_etale,
    make_norm_map_plus,
    verify_pullback_plus,
)
from .norm_universal import (
    PullbackInstance,
    make_norm_map,
    trace_formula_check,
    traceexp_check,
    vector_text,
    verify_pullback,
)
from .ring_core import GF, QQ, ZZ, AlgebraMap, FiniteFreeAlgebra, PolyRing
from .span_solver import coordinates, coordinates_of_invariant
from .tensor_algebra import MAX_ARITY, TensorSpace

__all__ = [
    "SUITE_NAMES",
    "SuiteConfig",
    "make_suite_config",
    "run_suite",
    "run_instance",
    "run_probe",
    "render_report",
    "main",
]

SCHEMA_VERSION = 1

# every suite the verify command knows; the first six take random data,
# the pullback pair replays bundled fixtures, the probe draws point sets
SUITE_NAMES = IDENTITY_NAMES + (
    "traceexp",
    "trace_formula",
    "basis",
    "pullback_etale",
    "pullback_gen_etale",
    "probe_diagonal",
)

_FIXTURE_FILES = {
    "pullback_etale": "sqrt2.json",
    "pullback_gen_etale": "t2_minus_s.json",
}


def parse_ring(text):
    """Ring spec to (scalars, canonical text); "q" or "fp:<p>"."""
    spec = str(text).strip().lower()
    if spec == "q":
        return QQ, "q"
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:])
        except ValueError:
            raise ConfigInvalid(f"bad modulus in ring spec {text!r}") from None
        try:
            return GF(p), f"fp:{p}"
        except UnsupportedBase as e:
            raise ConfigInvalid(str(e)) from None
    raise ConfigInvalid(f"unknown ring spec {text!r}; expected q or fp:<p>")


@dataclass(frozen=True)
class SuiteConfig:
    ring_text: str
    ns: tuple
    cases: int
    seed: int
    max_degree: int | None
    max_terms: int | None
    identities: tuple


def _parse_ns(n):
    if isinstance(n, str):
        parts = [p.strip() for p in n.split(",") if p.strip()]
        try:
            ns = [int(p) for p in parts]
        except ValueError:
            raise ConfigInvalid(f"bad arity list {n!r}") from None
    else:
        ns = list(n)
    if not ns:
        raise ConfigInvalid("empty arity list")
    for k in ns:
        if not isinstance(k, int) or not 2 <= k <= MAX_ARITY:
            raise ConfigInvalid(f"arity {k!r} outside 2..{MAX_ARITY}")
    return tuple(sorted(set(ns)))


def _parse_identities(identities):
    if isinstance(identities, str):
        parts = [p.strip() for p in identities.split(",") if p.strip()]
    else:
        parts = list(identities)
    if not parts:
        raise ConfigInvalid("empty identity list")
    if "all" in parts:
        return SUITE_NAMES
    for p in parts:
        if p not in SUITE_NAMES:
            raise ConfigInvalid(
                f"unknown identity {p!r}; known: {', '.join(SUITE_NAMES)}"
            )
    return tuple(name for name in SUITE_NAMES if name in set(parts))


def make_suite_config(
    ring="q",
    n="2,3",
    cases=100,
    seed=0,
    max_degree=None,
    max_terms=None,
    identities="all",
):
    _, ring_text = parse_ring(ring)
    ns = _parse_ns(n)
    if not isinstance(cases, int) or cases < 1:
        raise ConfigInvalid(f"cases must be a positive integer, got {cases!r}")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigInvalid(f"seed must fit in 64 bits, got {seed!r}")
    for label, bound in (("max_degree", max_degree), ("max_terms", max_terms)):
        if bound is not None and (not isinstance(bound, int) or bound < 1):
            raise ConfigInvalid(f"{label} must be a positive integer")
    return SuiteConfig(
        ring_text=ring_text,
        ns=ns,
        cases=cases,
        seed=seed,
        max_degree=max_degree,
        max_terms=max_terms,
        identities=_parse_identities(identities),
    )


def _case_seed(seed, suite, ring_text, n, index):
    # a per-case generator keyed by position, so thread scheduling and
    # case order cannot leak into the drawn data
    tag = f"{seed}:{suite}:{ring_text}:{n}:{index}".encode()
    return int.from_bytes(hashlib.sha256(tag).digest()[:8], "big")


def _thread_count():
    raw = os.environ.get("ALTKIT_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise ConfigInvalid(f"ALTKIT_THREADS must be an integer, got {raw!r}")
    if count < 1:
        raise ConfigInvalid(f"ALTKIT_THREADS must be positive, got {raw!r}")
    return count


def _bounds(config, n):
    # identities are multilinear, so small sparse inputs carry the same
    # evidence; n = 4 and up shrink further to keep orbit sums quick
    degree = config.max_degree if config.max_degree else (3 if n < 4 else 2)
    terms = config.max_terms if config.max_terms else (3 if n < 4 else 2)
    return degree, terms


def _identity_case(name):
    def run(env, rng):
        data = random_case(name, rng, env.space, env.max_terms, env.max_degree)
        w = check_identity(name, env.space, data)
        return w.ok, w.lhs_text, w.rhs_text

    return run


def _traceexp_case(env, rng):
    ys = tuple(
        random_element(rng, env.space, env.max_terms, env.max_degree)
        for _ in range(env.space.n)
    )
    w = traceexp_check(env.ctx, ys)
    return w.ok, w.lhs_text, w.rhs_text


def _trace_formula_case(env, rng):
    z = random_element(rng, env.space, env.max_terms, env.max_degree)
    w = trace_formula_check(env.ctx, z)
    return w.ok, w.lhs_text, w.rhs_text


def _basis_case(env, rng):
    # reconstruction identities are asserted inside the coordinate
    # routines; reaching the return means both held exactly
    y = random_invariant(rng, env.space, env.max_degree, full=False)
    coordinates_of_invariant(env.ctx, y)
    z = random_element(rng, env.space, env.max_terms, env.max_degree)
    coordinates(env.ctx, z)
    return True, "", ""


def _probe_points(env, rng):
    scalars, n = env.scalars, env.space.n
    if scalars.kind == "Fp":
        k = 1
        while scalars.p**k < n:
            k += 1
        pool = list(itertools.product(range(scalars.p), repeat=k))
        return [tuple(p) for p in rng.sample(pool, n)]
    k = 1 + rng.randrange(2)
    points, seen = [], set()
    while len(points) < n:
        p = tuple(rng.randint(-9, 9) for _ in range(k))
        if p not in seen:
            seen.add(p)
            points.append(p)
    return points


def _probe_case(env, rng):
    points = _probe_points(env, rng)
    if diagonal_support_probe(env.scalars, points):
        return False, f"distinct points {points}", "expected off-diagonal"
    repeated = list(points)
    repeated[-1] = repeated[0]
    if not diagonal_support_probe(env.scalars, repeated):
        return False, f"repeated points {repeated}", "expected on-diagonal"
    return True, "", ""


_CASES = {name: _identity_case(name) for name in IDENTITY_NAMES}
_CASES["traceexp"] = _traceexp_case
_CASES["trace_formula"] = _trace_formula_case
_CASES["basis"] = _basis_case
_CASES["probe_diagonal"] = _probe_case


class _RowEnv:
    """Shared per-row state: one ambient ring, one anchor tuple."""

    def __init__(self, scalars, n, max_degree, max_terms):
        self.scalars = scalars
        self.space = TensorSpace(n, PolyRing(scalars, ("t",)))
        t = self.space.ring.variable("t")
        self.ctx = AlternatorInstance(self.space, [t**i for i in range(n)])
        self.max_degree = max_degree
        self.max_terms = max_terms


def _run_row(name, scalars, config, n):
    max_degree, max_terms = _bounds(config, n)
    env = _RowEnv(scalars, n, max_degree, max_terms)
    case = _CASES[name]

    def one(index):
        rng = Random(_case_seed(config.seed, name, config.ring_text, n, index))
        try:
            ok, lhs, rhs = case(env, rng)
        except (AltkitError, AssertionError) as e:
            ok, lhs, rhs = False, f"{type(e).__name__}: {e}", ""
        return index, ok, lhs, rhs

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(config.cases)))
    else:
        results = [one(i) for i in range(config.cases)]
    results.sort(key=lambda r: r[0])
    failures = [
        {"case": index, "lhs": lhs, "rhs": rhs}
        for index, ok, lhs, rhs in results
        if not ok
    ]
    return {
        "identity": name,
        "ring": config.ring_text,
        "n": n,
        "cases_run": config.cases,
        "failures": failures,
    }


def _bundled_fixture(filename):
    path = resources.files("altkit").joinpath("fixtures", filename)
    return _load_json(path.read_text(encoding="utf-8"), filename)


def _fixture_row(name):
    filename = _FIXTURE_FILES[name]
    inst, meta = build_instance(_bundled_fixture(filename))
    verifier = verify_pullback if meta["mode"] == "etale" else verify_pullback_plus
    witnesses = verifier(inst)
    failures = [
        {"case": i, "lhs": w.lhs_text, "rhs": w.rhs_text}
        for i, w in enumerate(witnesses)
        if not w.ok
    ]
    return {
        "identity": name,
        "ring": "q",
        "n": inst.E.rank,
        "cases_run": len(witnesses),
        "failures": failures,
    }


def run_suite(config):
    """Execute every configured suite row; see SUITE_NAMES for vocabulary.

    Fixture-backed rows ignore the ring/arity/cases settings: they replay
    the bundled instance and count its witnesses as cases.
    """
    scalars, _ = parse_ring(config.ring_text)
    suites = []
    for name in config.identities:
        if name in _FIXTURE_FILES:
            suites.append(_fixture_row(name))
            continue
        for n in config.ns:
            suites.append(_run_row(name, scalars, config, n))
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact": {"name": "altkit", "version": __version__},
        "config": {
            "ring": config.ring_text,
            "n": list(config.ns),
            "cases": config.cases,
            "seed": config.seed,
            "max_degree": config.max_degree,
            "max_terms": config.max_terms,
            "identities": list(config.identities),
        },
        "suites": suites,
        "failures_total": sum(len(s["failures"]) for s in suites),
        "timing": {"wall_s": None},
    }


# ---------------------------------------------------------------------------
# instance files


def _expect(cond, path, msg):
    if not cond:
        raise SchemaError(f"{path}: {msg}")


def _field(obj, key, path, kind=None):
    _expect(isinstance(obj, dict), path, "expected an object")
    _expect(key in obj, path, f"missing key {key!r}")
    value = obj[key]
    if kind is not None:
        _expect(isinstance(value, kind), f"{path}.{key}", "wrong type")
    return value


def _load_json(text, where):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{where}: invalid JSON: {e}") from None


def _build_base(spec, path):
    _expect(isinstance(spec, dict), path, "expected an object")
    kind = _field(spec, "kind", path, str)
    if kind == "Q":
        return QQ
    if kind == "Z":
        return ZZ
    if kind == "Fp":
        p = _field(spec, "p", path, int)
        try:
            return GF(p)
        except UnsupportedBase as e:
            raise SchemaError(f"{path}.p: {e}") from None
    if kind == "poly":
        names = _field(spec, "vars", path, list)
        _expect(bool(names), f"{path}.vars", "needs at least one variable")
        for v in names:
            _expect(
                isinstance(v, str) and v.isidentifier(),
                f"{path}.vars",
                f"bad variable name {v!r}",
            )
        _expect(
            len(set(names)) == len(names), f"{path}.vars", "duplicate variable"
        )
        scalars = _build_base(
            spec.get("scalars", {"kind": "Q"}), f"{path}.scalars"
        )
        _expect(
            not isinstance(scalars, PolyRing),
            f"{path}.scalars",
            "nested polynomial scalars unsupported",
        )
        return PolyRing(scalars, tuple(names))
    raise SchemaError(f"{path}.kind: unknown base kind {kind!r}")


def _parse_coeff(base, text, path):
    _expect(isinstance(text, str), path, "coefficients are strings")
    try:
        return base.parse(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _parse_vector(base, vec, rank, path):
    _expect(isinstance(vec, list), path, "expected a list")
    _expect(len(vec) == rank, path, f"expected {rank} entries")
    return tuple(
        _parse_coeff(base, entry, f"{path}[{i}]") for i, entry in enumerate(vec)
    )


def build_instance(data):
    """Instance JSON to a PullbackInstance plus its metadata.

    A polynomial base slots its variables in front of the map variables,
    so the anchor ring sees them as ordinary generators mapping to scalar
    multiples of the unit.
    """
    _expect(isinstance(data, dict), "$", "expected a top-level object")
    mode = data.get("mode", "etale")
    _expect(mode in ("etale", "gen_etale"), "$.mode", f"unknown mode {mode!r}")
    name = data.get("name", "")
    _expect(isinstance(name, str), "$.name", "expected a string")

    alg = _field(data, "algebra", "$", dict)
    base = _build_base(_field(alg, "base", "$.algebra"), "$.algebra.base")
    rank = _field(alg, "rank", "$.algebra", int)
    _expect(2 <= rank <= MAX_ARITY, "$.algebra.rank", f"outside 2..{MAX_ARITY}")
    unit = _parse_vector(
        base, _field(alg, "unit", "$.algebra"), rank, "$.algebra.unit"
    )
    rows = _field(alg, "structure", "$.algebra", list)
    _expect(len(rows) == rank, "$.algebra.structure", f"expected {rank} rows")
    structure = []
    for i, row in enumerate(rows):
        _expect(
            isinstance(row, list) and len(row) == rank,
            f"$.algebra.structure[{i}]",
            f"expected {rank} entries",
        )
        structure.append(
            tuple(
                _parse_vector(base, vec, rank, f"$.algebra.structure[{i}][{j}]")
                for j, vec in enumerate(row)
            )
        )
    E = FiniteFreeAlgebra(base, rank, tuple(structure), unit)

    map_spec = _field(data, "map", "$", dict)
    map_vars = _field(map_spec, "vars", "$.map", list)
    _expect(bool(map_vars), "$.map.vars", "needs at least one variable")
    for v in map_vars:
        _expect(
            isinstance(v, str) and v.isidentifier(),
            "$.map.vars",
            f"bad variable name {v!r}",
        )
    images_spec = _field(map_spec, "images", "$.map", list)
    _expect(
        len(images_spec) == len(map_vars),
        "$.map.images",
        "one image per map variable",
    )
    if isinstance(base, PolyRing):
        _expect(
            not set(base.vars) & set(map_vars),
            "$.map.vars",
            "collides with a base variable",
        )
        source = PolyRing(base.coeff, tuple(base.vars) + tuple(map_vars))
        images = [
            E.element([base.variable(v) * c for c in unit]) for v in base.vars
        ]
    else:
        source = PolyRing(base, tuple(map_vars))
        images = []
    images.extend(
        E.element(_parse_vector(base, vec, rank, f"$.map.images[{i}]"))
        for i, vec in enumerate(images_spec)
    )
    f = AlgebraMap(source, E, images)

    tuple_x = _field(data, "tuple_x", "$", list)
    _expect(len(tuple_x) == rank, "$.tuple_x", f"expected {rank} entries")
    xs = []
    for i, text in enumerate(tuple_x):
        _expect(isinstance(text, str), f"$.tuple_x[{i}]", "entries are strings")
        try:
            xs.append(source.parse(text))
        except ParseError as e:
            raise ParseError(f"$.tuple_x[{i}]: {e}") from None
    return PullbackInstance(f, xs), {"mode": mode, "name": name}


def _mapped_constants(inst, image_of):
    ctx, base = inst.ctx, inst.E.base
    rows = []
    for i in range(inst.E.rank):
        for j in range(i, inst.E.rank):
            mapped = [
                image_of(c) for c in coordinates(ctx, ctx.x[i] * ctx.x[j])
            ]
            expected = inst.basis_coords(inst.fx[i] * inst.fx[j])
            rows.append(
                {
                    "i": i + 1,
                    "j": j + 1,
                    "mapped": vector_text(base, mapped),
                    "expected": vector_text(base, expected),
                }
            )
    return rows


def run_instance(path, mode=None):
    """Load an instance file, verify it, report the mapped constants."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"{path}: {e}") from None
    inst, meta = build_instance(_load_json(text, os.path.basename(path)))
    mode = mode or meta["mode"]
    base = inst.E.base
    if mode == "etale":
        nm = make_norm_map(inst)
        witnesses = verify_pullback(inst)
        saturation = None
    else:
        nm = make_norm_map_plus(inst)
        witnesses = verify_pullback_plus(inst)
        quotient = b_plus(inst)
        saturation = {
            "rank": quotient.rank,
            "zero_ring": quotient.is_zero_ring,
        }
    failures = sum(1 for w in witnesses if not w.ok)
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact": {"name": "altkit", "version": __version__},
        "instance": {
            "file": os.path.basename(str(path)),
            "name": meta["name"],
            "mode": mode,
        },
        "discriminant": base.to_text(inst.d),
        "etale": inst.is_etale,
        "generically_etale": is_generically_etale(inst),
        "saturation": saturation,
        "constants": _mapped_constants(inst, nm.localized_image),
        "witnesses": [
            {"name": w.name, "ok": w.ok, "lhs": w.lhs_text, "rhs": w.rhs_text}
            for w in witnesses
        ],
        "failures_total": failures,
    }


# ---------------------------------------------------------------------------
# point probes


def run_probe(payload):
    """Probe a JSON point set: {"ring", "points", optional "tuples"}."""
    data = _load_json(payload, "--points")
    _expect(isinstance(data, dict), "$", "expected a top-level object")
    try:
        scalars, ring_text = parse_ring(data.get("ring", "q"))
    except ConfigInvalid as e:
        raise SchemaError(f"$.ring: {e}") from None
    raw_points = _field(data, "points", "$", list)
    points = []
    for i, point in enumerate(raw_points):
        _expect(isinstance(point, list), f"$.points[{i}]", "expected a list")
        coords = []
        for j, c in enumerate(point):
            if isinstance(c, bool) or not isinstance(c, (int, str)):
                raise SchemaError(
                    f"$.points[{i}][{j}]: coordinates are ints or strings"
                )
            coords.append(
                _parse_coeff(scalars, c, f"$.points[{i}][{j}]")
                if isinstance(c, str)
                else c
            )
        points.append(tuple(coords))
    tuples = data.get("tuples")
    if tuples is not None:
        _expect(isinstance(tuples, list), "$.tuples", "expected a list")
        tuples = [
            tuple(tuple(int(e) for e in mono) for mono in group)
            for group in tuples
        ]
    on_diagonal = diagonal_support_probe(scalars, points, tuples)
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact": {"name": "altkit", "version": __version__},
        "ring": ring_text,
        "points": raw_points,
        "tuples": data.get("tuples"),
        "on_diagonal": on_diagonal,
        "failures_total": 0,
    }


# ---------------------------------------------------------------------------
# entry point


def render_report(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _emit(report, out):
    text = render_report(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.get("failures_total", 0) == 0 else 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="altkit",
        description="Exact verification of alternator identities and norm maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run seeded identity suites")
    verify.add_argument("--ring", default="q", help="q or fp:<p> (default q)")
    verify.add_argument("--n", default="2,3", help="comma list of arities")
    verify.add_argument("--cases", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument(
        "--identity",
        default="all",
        help="comma list from: " + ", ".join(SUITE_NAMES) + ", or all",
    )
    verify.add_argument("--max-degree", type=int, default=None)
    verify.add_argument("--max-terms", type=int, default=None)
    verify.add_argument("--out", default=None, help="write report to a file")
    verify.add_argument(
        "--emit-timing",
        action="store_true",
        help="print wall time to stderr; the report itself stays untimed",
    )

    instance = sub.add_parser("instance", help="verify one instance file")
    instance.add_argument("--file", required=True)
    instance.add_argument(
        "--mode",
        choices=("etale", "gen_etale"),
        default=None,
        help="override the file's own mode",
    )
    instance.add_argument("--out", default=None)

    probe = sub.add_parser(
        "probe-diagonal", help="repeated-point test for a point set"
    )
    probe.add_argument(
        "--points",
        required=True,
        help='JSON text {"ring", "points", "tuples"?}, or @file to read it',
    )
    probe.add_argument("--out", default=None)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            config = make_suite_config(
                ring=args.ring,
                n=args.n,
                cases=args.cases,
                seed=args.seed,
                max_degree=args.max_degree,
                max_terms=args.max_terms,
                identities=args.identity,
            )
            started = time.monotonic()
            report = run_suite(config)
            if args.emit_timing:
                print(
                    f"wall_s={time.monotonic() - started:.3f}",
                    file=sys.stderr,
                )
        elif args.command == "instance":
            report = run_instance(args.file, args.mode)
        else:
            payload = args.points
            if payload.startswith("@"):
                try:
                    with open(payload[1:], encoding="utf-8") as fh:
                        payload = fh.read()
                except OSError as e:
                    raise ParseError(f"{payload[1:]}: {e}") from None
            report = run_probe(payload)
    except AltkitError as e:
        print(f"altkit: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return _emit(report, args.out)


if __name__ == "__main__":
    sys.exit(main())
