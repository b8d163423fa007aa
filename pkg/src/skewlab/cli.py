"""Command-line surface: certify, orbit-pair, pullback, verify, demo.

Exit codes: 0 success, 2 malformed configuration, 3 invariant or
precondition violation, 4 a recorded contraction ratio exceeded its bound,
5 the base lacks the requested capability.  SKEWLAB_THREADS caps worker
threads; output ordering is deterministic regardless of scheduling.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import random
import sys as _sys

from .attractor import (
    GraphFunction,
    build_preinvariant,
    match_fraction,
    positive_fraction,
    pullback_grid,
    pullback_graph_finite,
    pullback_phi,
    verify_attractor,
    verify_preinvariance,
)
from .bases import CircleRotation, FiniteOrbitBase, OneSidedWord
from .catalog import CATALOG, coinflip_attractor_graph, make_keller, make_product
from .config import load_system
from .errors import (
    CapabilityError,
    ConfigError,
    CoverageError,
    DomainError,
    InvariantError,
    PreconditionError,
)
from .fiber import certify
from .nonauto import bound_violations, iterate_pair, isoclinic_guard, trace_to_csv
from .parallel import worker_count
from .skew import classify, orbit

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_BOUND = 4
EXIT_CAPABILITY = 5


@contextlib.contextmanager
def _out_stream(path: str | None):
    if path is None or path == "-":
        yield _sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _default_theta(base):
    if isinstance(base, CircleRotation):
        return 0.0
    if isinstance(base, FiniteOrbitBase):
        return base.points[0]
    return base.zero_word()


def _resolve_theta(base, raw: str | None):
    if raw is None:
        return _default_theta(base)
    return base.parse_point(raw)


def _emit_json(doc) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2))


def cmd_certify(args) -> int:
    cfg, system = load_system(args.config)
    grid = args.grid or cfg.defaults["grid"]
    theta = _resolve_theta(system.base, args.theta)
    fm = system.fiber_at(theta)
    cert = certify(fm, grid)
    _emit_json(
        {
            "system": system.label,
            "theta": system.base.format_point(theta),
            "form": fm.form,
            "certificate": cert.to_dict(),
        }
    )
    return EXIT_OK


def cmd_orbit_pair(args) -> int:
    cfg, system = load_system(args.config)
    theta = _resolve_theta(system.base, args.theta)
    steps = cfg.defaults["steps"] if args.steps is None else args.steps
    if steps == 0:
        with _out_stream(args.out) as fh:
            fh.write("n,x,y,kappa,ratio,bound,b\n")
        return EXIT_OK
    seq = system.map_sequence(theta)
    trace = iterate_pair(seq, args.x0, args.y0, steps, grid_size=cfg.defaults["grid"])
    with _out_stream(args.out) as fh:
        trace_to_csv(trace, fh)
    bad = bound_violations(trace)
    if bad:
        print(
            f"bound violation at steps {bad}: recorded ratio exceeded its bound",
            file=_sys.stderr,
        )
        return EXIT_BOUND
    return EXIT_OK


def cmd_pullback(args) -> int:
    cfg, system = load_system(args.config)
    depth = args.depth or cfg.defaults["depth"]
    stop_delta = 0.0 if args.no_early_stop else 1e-12

    if args.theta is not None:
        theta = system.base.parse_point(args.theta)
        seq = pullback_phi(system, theta, depth, stop_delta=stop_delta,
                           allow_partial=True)
        _emit_json(
            {
                "theta": seq.theta_repr,
                "depth_used": seq.depth_used,
                "delta": None if math.isinf(seq.delta) else seq.delta,
                "nonincreasing": seq.nonincreasing(),
                "truncated": seq.truncated,
                "values": seq.values,
            }
        )
        return EXIT_OK

    base = system.base
    if isinstance(base, CircleRotation):
        grid = args.grid or cfg.defaults["grid"]
        res = pullback_grid(
            system, grid_size=grid, depth=depth, stop_delta=stop_delta,
            workers=worker_count(),
        )
        with _out_stream(args.out) as fh:
            res.graph.to_csv(fh, base=base)
        summary = res.to_dict()
        summary["positive_fraction"] = positive_fraction(res.graph)
        print(json.dumps(summary, sort_keys=True), file=_sys.stderr)
        return EXIT_OK
    if isinstance(base, FiniteOrbitBase):
        graph, depths = pullback_graph_finite(system, depth, stop_delta=stop_delta)
        with _out_stream(args.out) as fh:
            graph.to_csv(fh, base=base)
        print(
            json.dumps({"depth_used": depths}, sort_keys=True), file=_sys.stderr
        )
        return EXIT_OK
    raise CapabilityError("base not invertible: no pullback for this system")


def cmd_verify(args) -> int:
    cfg, system = load_system(args.config)
    with open(args.phi, newline="") as fh:
        graph = GraphFunction.from_csv(fh, system.base, system.a)
    rng = random.Random(args.seed)
    thetas = system.base.sample_points(args.samples, rng)
    starts = [
        (theta, rng.uniform(0.05 * system.a, 0.95 * system.a)) for theta in thetas
    ]
    steps = cfg.defaults["steps"] if args.steps is None else args.steps
    tol = args.tol if args.tol is not None else cfg.defaults["tol"]
    verdict = verify_attractor(system, graph, starts, steps, tol)
    preinv = [
        verify_preinvariance(system, graph, theta, args.horizon, tol).to_dict()
        for theta in thetas[: min(3, len(thetas))]
    ]
    _emit_json(
        {
            "attractor": verdict.to_dict(),
            "preinvariance": preinv,
            "graph_provenance": graph.provenance,
        }
    )
    return EXIT_OK


def _claims_noinvattr(fast: bool) -> list[tuple[bool, str]]:
    from .catalog import make_noinvattr

    system = make_noinvattr(64)
    claims = []

    pts = orbit(system, (0.0, 0.5), 5)
    x5 = pts[-1][1]
    claims.append(
        (
            x5 >= 1.0 - 1e-9,
            f"forward orbit from (0.0, 0.5): x_5 = {x5!r} is within 1e-9 of 1 "
            "(gap squares every step)",
        )
    )

    seq = pullback_phi(system, 0.0, 40, stop_delta=0.0)
    halving = all(v <= 2.0 ** -(n + 1) for n, v in enumerate(seq.values))
    claims.append(
        (
            halving and len(seq.values) == 40,
            "backward-transported top values at the collision point satisfy "
            "phi_n <= 2^-n for n <= 40 (weak map at most halves)",
        )
    )

    graph = build_preinvariant(system)
    claims.append(
        (
            graph.value(1.0) == 1.0 and graph.value(-1.0) == 0.0,
            "constructed preinvariant graph: value 1 at the right fixed point, "
            "0 at the left fixed point (largest fixed fiber values)",
        )
    )

    theta = system.base.parse_point("-0.5")  # chain point at index -2
    rep = verify_preinvariance(system, graph, theta, 80, 1e-9)
    claims.append(
        (rep.ok, f"graph is preinvariant along the chain (residual-free from n = {rep.first_good_n})")
    )

    contradiction = halving and x5 >= 1.0 - 1e-9
    claims.append(
        (
            contradiction,
            "no invariant attracting graph exists over this base: invariance "
            "forces the value at the collision point below 2^-40, while "
            "attraction forces values near 1 along the forward chain",
        )
    )
    return claims


def _claims_coinflip_two(fast: bool) -> list[tuple[bool, str]]:
    from .catalog import make_coinflip
    from .bases import TwoSidedWord

    system = make_coinflip("two")
    graph = coinflip_attractor_graph()
    max_len = 6 if fast else 10
    starts = []
    for length in range(1, max_len + 1):
        for code in range(2 ** length):
            bits = tuple((code >> i) & 1 for i in range(length))
            w = TwoSidedWord((0,), bits, (1,), 0)
            starts.append((w, 0.0))
            starts.append((w, 1.0))
    verdict = verify_attractor(system, graph, starts, steps=max_len + 2, tol=1e-15)
    ok = verdict.verdict == "attracting" and all(
        r.achieved_step is not None and r.achieved_step <= 1 and r.max_dev_after == 0.0
        for r in verdict.records
    )
    return [
        (
            ok,
            f"reading the bit at -1 is an exact attractor: deviation 0 from step 1 "
            f"on all {len(starts)} starts (words up to length {max_len})",
        )
    ]


def _claims_coinflip_one(fast: bool) -> list[tuple[bool, str]]:
    from .catalog import make_coinflip

    system = make_coinflip("one")
    rng = random.Random(20260809)
    n_words = 2000 if fast else 10 ** 4
    flat = GraphFunction.from_callable(1.0, lambda w: 0.0, label="constant 0")
    starts = [
        (OneSidedWord(tuple(rng.randrange(2) for _ in range(20)), (0,)), 0.0)
        for _ in range(n_words)
    ]
    freq = match_fraction(system, flat, 20, starts, tol=0.0)
    claims = [
        (
            abs(freq - 0.5) <= 0.05,
            f"a constant candidate graph matches the step-20 fiber value on "
            f"{freq:.3f} of {n_words} random words (no simple graph attracts; "
            "a fair bit decides each match)",
        )
    ]

    words = [
        OneSidedWord((1, 0, 1), (0, 1)),
        OneSidedWord((0, 0, 1, 1), (1,)),
        OneSidedWord((), (1, 0, 0)),
    ]
    graph = build_preinvariant(system, points=words)
    verdict = verify_attractor(
        system, graph, [(w, 0.0) for w in words], steps=12, tol=1e-15
    )
    claims.append(
        (
            verdict.verdict == "attracting",
            "orbit-keyed construction on preperiodic words attracts exactly "
            "after each word's transient",
        )
    )
    return claims


def _claims_keller(fast: bool) -> list[tuple[bool, str]]:
    system = make_keller()
    grid = 1024 if fast else 4096
    res = pullback_grid(system, grid_size=grid, depth=4000, stop_delta=1e-12)
    claims = [
        (
            res.monotone_ok,
            f"pullback values never increase at any of the {grid} grid nodes "
            f"(max increase {res.max_increase!r})",
        ),
        (
            res.delta < 1e-9,
            f"pullback converged after {res.sweeps} sweeps (last delta {res.delta!r})",
        ),
    ]
    rng = random.Random(7)
    nodes = [rng.randrange(grid) / grid for _ in range(1000)]
    bad = 0
    for theta in nodes:
        rep = verify_preinvariance(system, res.graph, theta, 1, 1e-6)
        bad += not rep.ok
    claims.append(
        (bad == 0, "preinvariance residual < 1e-6 at 1000 sampled grid nodes")
    )
    frac = positive_fraction(res.graph)
    claims.append(
        (
            frac >= 0.9 or frac <= 0.1,
            f"positive-node fraction is {frac:.4f}: the limit graph is observed "
            "to be essentially 0 or essentially positive, never mixed",
        )
    )
    return claims


def _claims_product_hump(fast: bool) -> list[tuple[bool, str]]:
    system = CATALOG["product-hump"].build()
    cls = classify(system, 12, grid_size=1024)
    claims = [
        (
            cls.kind == "isoclinic-equiconcave" and abs((cls.beta or 0) - 4.0) < 1e-3,
            f"scaled hump family classifies as isoclinic-equiconcave with "
            f"beta = {cls.beta!r} (range [0, 0.6] below the isoclinic point 2/3)",
        )
    ]
    seq = system.map_sequence(0.1)
    trace = iterate_pair(seq, 0.3, 0.62, 80)
    guard = isoclinic_guard(seq, trace)
    gap = abs(trace.rows[-1].x - trace.rows[-1].y)
    claims.append(
        (
            guard.hypothesis_ok and not guard.flip_violations and gap < 1e-6,
            f"orbit pair converges (final gap {gap!r}) with all "
            f"{guard.flips} order flips inside their contraction bounds",
        )
    )

    unscaled = make_product(
        {"form": "quadratic-hump", "k": 4.0},
        {"form": "constant", "c": 1.0},
        CircleRotation(CATALOG["keller"].params["omega"]),
        label="full-hump",
    )
    cls2 = classify(unscaled, 8, grid_size=1024)
    seq2 = unscaled.map_sequence(0.1)
    trace2 = iterate_pair(seq2, 0.2, 0.21, 40)
    guard2 = isoclinic_guard(seq2, trace2)
    claims.append(
        (
            cls2.kind == "unclassified" and not guard2.hypothesis_ok,
            "the unscaled hump admits no such certificate: range reaches 1 and "
            f"the confinement hypothesis fails at step {guard2.first_violation[0] if guard2.first_violation else '?'}",
        )
    )
    return claims


_DEMOS = {
    "noinvattr": _claims_noinvattr,
    "coinflip-one": _claims_coinflip_one,
    "coinflip-two": _claims_coinflip_two,
    "keller": _claims_keller,
    "product-hump": _claims_product_hump,
}


def cmd_demo(args) -> int:
    fn = _DEMOS.get(args.name)
    if fn is None:
        raise ConfigError(f"unknown demo {args.name!r} (known: {sorted(_DEMOS)})")
    claims = fn(args.fast)
    ok_all = True
    for ok, text in claims:
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'} - {text}")
    return EXIT_OK if ok_all else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlab",
        description="skew products with concave interval fibers: "
        "certificates, orbit traces, attractor graphs",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("certify", help="concavity certificate of a fiber map")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--theta", default=None)
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("orbit-pair", help="paired orbit trace with bounds, as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--theta", default=None)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_orbit_pair)

    p = sub.add_parser("pullback", help="pullback graph over the base, as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--theta", default=None)
    p.add_argument("--no-early-stop", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_pullback)

    p = sub.add_parser("verify", help="attractor and preinvariance verification")
    p.add_argument("--config", required=True)
    p.add_argument("--phi", required=True, help="graph CSV to verify")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--horizon", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("demo", help="run a bundled scenario and report claims")
    p.add_argument("name", help=f"one of {sorted(_DEMOS)}")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(handler=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return EXIT_CONFIG
    try:
        worker_count()  # validate SKEWLAB_THREADS up front
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except (InvariantError, PreconditionError, DomainError, CoverageError) as exc:
        print(f"invariant violation: {exc}", file=_sys.stderr)
        return EXIT_INVARIANT
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=_sys.stderr)
        return EXIT_CAPABILITY


if __name__ == "__main__":
    raise SystemExit(main())
