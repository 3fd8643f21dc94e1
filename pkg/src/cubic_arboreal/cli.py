"""Command-line front end: every operation as a reproducible subcommand.

One binary, subcommand style, flags only.  Every JSON report is an envelope
{"meta": ..., "payload": ...}: the meta block carries tool version, the full
flag set, seed, worker count, and elapsed time (the reproducibility
contract); the payload carries the result plus a `claim` string naming the
quantitative statement the subcommand reproduces.  CSV output prefixes the
same metadata as `# key=value` comment lines.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capability
error (request beyond a configured budget).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import CapabilityError, UsageError

CLAIMS = {
    "order": "|E_1| = 6, |E_2| = 648, |Aut(T_2)| = 1296, |H_2| = 81; "
             "|E_n| = 2^(3^(n-1)) * 3^((3^n-1)/2)",
    "enumerate": "E_2 has exactly 648 elements, all acting evenly on the 9 "
                 "depth-2 leaves; H_2 is its 81-element Sylow 3-subgroup",
    "sample": "uniform sampling over E_n without rejection (forced-sign root label)",
    "dimension": "Hausdorff dimensions: lim log|E_n|/log|Aut(T_n)| = "
                 "1 - log2/(3 log6) ~ 0.871; for H_n the limit is log3/log6 ~ 0.613",
    "normality": "E_n is normal in Aut(T_n) iff n <= 2; H_n is normal in E_n iff n = 1",
    "fixratio": "the proportion x_n of E_n fixing a leaf satisfies x_2 = 79/162 "
                "and n*x_n -> 2",
    "sandwich": "rho^n(2/3) <= x_{n+1} <= phi^n(1) with both bounds ~ 2/n",
    "disc-check": "Disc(f^2(z) - x) = [2^16 * 3^9 * x^2 (x-1)^2]^2 identically",
    "eisenstein": "f^n(z) - x is Eisenstein at 3 whenever v_3(x) = 1",
    "newton-polygon": "the Newton polygon of f(z) - y at 2 has a length-2 "
                      "segment of slope -+1/2 when v_2(y) = +-1",
    "dagger": "the local base-point condition: v_3(x) = 1 and "
              "(v_2(x) = +-1 or v_2(1-x) = 1)",
    "chebotarev": "factor patterns of f^n(z) - x mod p equidistribute like "
                  "cycle types of the depth-n group",
    "orbit-density": "primes dividing some orbit value y_i or y_i - 1 have "
                     "density zero (finite-bound density is reported)",
    "newton-density": "primes where Newton's method for z^3 - z converges "
                      "p-adically have density zero",
    "conjugacy-check": "eta^{-1} o N o eta = f for eta(z) = 1/(1-2z), "
                       "N(z) = 2z^3/(3z^2-1)",
}


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    epilog_lines = ["claims reproduced per subcommand:"]
    epilog_lines += [f"  {name:16s} {claim}" for name, claim in CLAIMS.items()]
    parser = argparse.ArgumentParser(
        prog="cubic-arboreal",
        description="Tree-automorphism groups for f(z) = -2z^3 + 3z^2: exact "
                    "counts, local criteria, and prime-density experiments.",
        epilog="\n".join(epilog_lines),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, *, n=False, group=False, x=False, y0=False,
            bound=False, seed=False, samples=False, workers=False,
            exactness=False):
        sp = sub.add_parser(name, help=CLAIMS[name])
        if n:
            sp.add_argument("--n", type=int, required=(n == "required"))
        if group:
            sp.add_argument("--group", choices=("E", "H", "AUT"), default="E")
        if x:
            sp.add_argument("--x", type=_fraction, default=Fraction(3, 2))
        if y0:
            sp.add_argument("--y0", type=_fraction, default=Fraction(2))
        if bound:
            sp.add_argument("--bound", type=int, default=None)
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if samples:
            sp.add_argument("--samples", type=int, default=None)
        if workers:
            sp.add_argument("--workers", type=int, default=1)
        if exactness:
            mode = sp.add_mutually_exclusive_group()
            mode.add_argument("--exact", action="store_true")
            mode.add_argument("--float", dest="use_float", action="store_true")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--out", default=None)
        sp.set_defaults(handler=handler)
        return sp

    add("order", _cmd_order, n="required", group=True)
    add("enumerate", _cmd_enumerate, n="required", group=True)
    add("sample", _cmd_sample, n="required", group=True, seed=True, samples=True)
    add("dimension", _cmd_dimension, n=True, group=True)
    add("normality", _cmd_normality, n="required", group=True)
    add("fixratio", _cmd_fixratio, n="required", exactness=True)
    add("sandwich", _cmd_sandwich, n="required")
    add("disc-check", _cmd_disc_check)
    add("eisenstein", _cmd_eisenstein, n="required", x=True)
    add("newton-polygon", _cmd_newton_polygon, n=True, x=True)
    add("dagger", _cmd_dagger, x=True)
    add("chebotarev", _cmd_chebotarev, n="required", x=True, bound=True,
        seed=True, samples=True, workers=True)
    add("orbit-density", _cmd_orbit, y0=True, bound=True, workers=True)
    add("newton-density", _cmd_newton, y0=True, bound=True, workers=True)
    add("conjugacy-check", _cmd_conjugacy, y0=True, bound=True, seed=True,
        samples=True, workers=True)
    return parser


# ---------------------------------------------------------------------------
# Handlers: each returns (payload dict, csv rows or None, text or None, status)
# ---------------------------------------------------------------------------


def _cmd_order(args):
    from .en_groups import order

    value = order(args.group, args.n)
    payload = {"group": args.group, "n": args.n, "order": str(value)}
    return payload, [("group", "n", "order"), (args.group, args.n, value)], str(value), 0


def _cmd_enumerate(args):
    from .en_groups import enumerate_group
    from .tree_core import cycle_type, cycle_type_str, format_portrait, sign_leaves

    rows = [("index", "portrait", "sign", "cycle_type")]
    items = []
    for i, g in enumerate(enumerate_group(args.group, args.n)):
        entry = (i, format_portrait(g), sign_leaves(g), cycle_type_str(cycle_type(g)))
        rows.append(entry)
        items.append({"portrait": entry[1], "sign": entry[2], "cycle_type": entry[3]})
    payload = {"group": args.group, "n": args.n, "count": len(items), "elements": items}
    text = "\n".join(r[1] for r in rows[1:])
    return payload, rows, text, 0


def _cmd_sample(args):
    from .en_groups import sample_portrait
    from .tree_core import format_portrait

    import numpy as np

    count = args.samples or 1
    rng = np.random.default_rng(args.seed)
    portraits = [format_portrait(sample_portrait(args.group, args.n, rng))
                 for _ in range(count)]
    payload = {"group": args.group, "n": args.n, "seed": args.seed,
               "samples": count, "portraits": portraits}
    rows = [("index", "portrait")] + [(i, s) for i, s in enumerate(portraits)]
    return payload, rows, "\n".join(portraits), 0


def _cmd_dimension(args):
    from .en_groups import hausdorff_limit, hausdorff_ratio

    n = args.n or 5
    ratios = [hausdorff_ratio(args.group, k) for k in range(1, n + 1)]
    limit = hausdorff_limit(args.group)
    payload = {"group": args.group, "ratios": ratios, "limit": limit}
    rows = [("n", "ratio")] + [(k + 1, r) for k, r in enumerate(ratios)]
    rows.append(("limit", limit))
    text = "\n".join([f"ratio at n={k+1}: {r:.6f}" for k, r in enumerate(ratios)]
                     + [f"limit: {limit:.6f}"])
    return payload, rows, text, 0


def _cmd_normality(args):
    from .en_groups import normality_witness
    from .tree_core import format_portrait

    mode = "E-in-AUT" if args.group in ("E", "AUT") else "H-in-E"
    witness = normality_witness(mode, args.n)
    if witness is None:
        payload = {"mode": mode, "n": args.n, "normal": True}
        text = f"{mode} at n={args.n}: normal (verified exhaustively)"
        rows = [("mode", "n", "normal"), (mode, args.n, True)]
    else:
        conjugator, element, conj = (format_portrait(w) for w in witness)
        payload = {"mode": mode, "n": args.n, "normal": False,
                   "conjugator": conjugator, "element": element,
                   "conjugate_outside": conj}
        text = (f"{mode} at n={args.n}: NOT normal\n"
                f"  conjugator: {conjugator}\n  element:    {element}\n"
                f"  conjugate:  {conj}  (outside the subgroup)")
        rows = [("mode", "n", "normal", "conjugator", "element", "conjugate"),
                (mode, args.n, False, conjugator, element, conj)]
    return payload, rows, text, 0


def _cmd_fixratio(args):
    from .fix_counting import (fix_ratio, fix_ratio_float_sequence, phi_iter,
                               rho_iter)

    mode = "float" if args.use_float else ("exact" if args.exact else "auto")
    value = fix_ratio(args.n, mode)
    xs = fix_ratio_float_sequence(args.n)
    rows = [("n", "x_n", "rho_lower", "phi_upper", "n_times_x")]
    for k in range(1, args.n + 1):
        lower = rho_iter(k - 1) if k > 1 else 2.0 / 3.0
        upper = phi_iter(k - 1)
        rows.append((k, xs[k - 1], lower, upper, k * xs[k - 1]))
    payload = {"n": args.n, "mode": mode, "x_n": str(value),
               "x_n_float": float(value), "n_times_x": args.n * float(value)}
    return payload, rows, str(value), 0


def _cmd_sandwich(args):
    from .fix_counting import sandwich_check

    report = sandwich_check(args.n)
    rows = [("n", "rho_lower", "x_next", "phi_upper")]
    rows += [(n, str(lo), str(x), str(hi)) for n, lo, x, hi in report.exact_rows]
    payload = {
        "n_max": report.n_max, "n_exact": report.n_exact, "slack": report.slack,
        "all_strict": report.all_strict,
        "exact_rows": [[n, str(lo), str(x), str(hi)]
                       for n, lo, x, hi in report.exact_rows],
        "holds": True,
    }
    text = (f"sandwich holds for n <= {report.n_max} "
            f"(exact through n = {report.n_exact}, float slack {report.slack})")
    return payload, rows, text, 0


def _cmd_disc_check(args):
    from .poly_rational import (disc_identity_rhs, disc_second_iterate_in_x,
                                verify_disc_identity)

    ok = verify_disc_identity()
    lhs = disc_second_iterate_in_x()
    rhs = disc_identity_rhs()
    payload = {"identity": "Disc(f^2(z) - x) = [2^16 * 3^9 * x^2 (x-1)^2]^2",
               "verified": ok,
               "coefficients": [str(c) for c in lhs.c]}
    text = (f"Disc(f^2(z) - x) == (2^16*3^9)^2 * x^4 * (x-1)^4: "
            f"{'verified' if ok else 'FAILED'}")
    rows = [("degree", "coefficient")] + [(i, str(c)) for i, c in enumerate(rhs.c)]
    return payload, rows, text, 0 if ok else 1


def _cmd_eisenstein(args):
    from .poly_rational import eisenstein_check, f_iterate, psub, pfrac

    results = []
    for k in range(1, args.n + 1):
        poly = psub(f_iterate(k), pfrac([args.x]))
        results.append((k, eisenstein_check(poly, 3)))
    payload = {"x": str(args.x), "prime": 3,
               "eisenstein": {str(k): ok for k, ok in results}}
    rows = [("n", "eisenstein_at_3")] + results
    text = "\n".join(f"f^{k}(z) - {args.x} Eisenstein at 3: {ok}" for k, ok in results)
    return payload, rows, text, 0 if all(ok for _, ok in results) else 1


def _cmd_newton_polygon(args):
    from .poly_rational import f_iterate, newton_polygon, pfrac, psub

    n = args.n or 1
    poly = psub(f_iterate(n), pfrac([args.x]))
    payload = {"x": str(args.x), "n": n, "polygons": {}}
    rows = [("prime", "slope", "length")]
    lines = []
    for p in (2, 3):
        np_ = newton_polygon(poly, p)
        segs = [[str(s), int(l)] for s, l in np_.segments]
        payload["polygons"][str(p)] = {"z_order": np_.z_order, "segments": segs}
        for s, l in np_.segments:
            rows.append((p, str(s), l))
        lines.append(f"p={p}: z_order={np_.z_order}, segments="
                     + ", ".join(f"(slope {s}, length {l})" for s, l in np_.segments))
    return payload, rows, "\n".join(lines), 0


def _cmd_dagger(args):
    from .poly_rational import dagger_check

    holds, cert = dagger_check(args.x)
    cert_str = {k: ("inf" if v == float("inf") else v) for k, v in cert.items()}
    payload = {"x": str(args.x), "holds": holds, "certificate": cert_str}
    rows = [("x", "holds", *cert_str.keys()), (str(args.x), holds, *cert_str.values())]
    text = f"({args.x}): {'satisfies' if holds else 'fails'} the local condition {cert_str}"
    return payload, rows, text, 0


def _cmd_chebotarev(args):
    from .experiments import chebotarev_scan

    report = chebotarev_scan(
        args.n, args.x, args.bound or 10**5, workers=args.workers,
        seed=args.seed, group_samples=args.samples or 10**6)
    payload = report.payload_dict()
    payload["claim"] = CLAIMS["chebotarev"]
    rows = list(report.csv_rows())
    text = (f"depth {args.n}, x = {args.x}, bound {report.bound}: "
            f"tv_distance = {report.tv_distance:.4f}, "
            f"root_frequency = {report.root_frequency:.4f} "
            f"over {report.retained_count} retained primes")
    return payload, rows, text, 0


def _cmd_orbit(args):
    from .experiments import orbit_density_scan

    report = orbit_density_scan(args.y0, args.bound or 10**6, workers=args.workers)
    payload = report.payload_dict()
    rows = list(report.csv_rows())
    text = (f"orbit of {args.y0}: density {report.density:.4f} over "
            f"{report.retained_count} primes <= {report.bound}")
    return payload, rows, text, 0


def _cmd_newton(args):
    from .experiments import newton_density_scan

    report = newton_density_scan(args.y0, args.bound or 10**6, workers=args.workers)
    payload = report.payload_dict()
    rows = list(report.csv_rows())
    text = (f"Newton orbit of {args.y0}: density {report.density:.4f} over "
            f"{report.retained_count} retained primes <= {report.bound}")
    return payload, rows, text, 0


def _cmd_conjugacy(args):
    from .experiments import conjugacy_check, scan_agreement

    ok = conjugacy_check(samples=args.samples or 100, seed=args.seed)
    payload = {"identity_holds": ok, "pointwise_samples": args.samples or 100}
    lines = [f"eta^-1 o N o eta == f: {'verified' if ok else 'FAILED'}"]
    rows = [("check", "result"), ("identity", ok)]
    status = 0 if ok else 1
    if args.bound:
        agreement = scan_agreement(args.y0, args.bound, workers=args.workers)
        payload["agreement"] = agreement.payload_dict()
        lines.append(
            f"prime-by-prime agreement with the conjugate orbit scan up to "
            f"{args.bound}: {agreement.agree} "
            f"({agreement.compared} compared, excluded {agreement.excluded})")
        rows.append(("agreement", agreement.agree))
        status = status if agreement.agree else 1
    return payload, rows, "\n".join(lines), status


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def _meta(args, elapsed: float) -> dict:
    command = {}
    for key, value in sorted(vars(args).items()):
        if key in ("handler",) or value is None:
            continue
        command[key] = str(value) if isinstance(value, Fraction) else value
    return {
        "version": __version__,
        "schema_version": "1",
        "command": command,
        "seed": getattr(args, "seed", None),
        "workers": getattr(args, "workers", None),
        "elapsed_s": elapsed,
    }


def _write(args, payload, rows, text, elapsed):
    fmt = args.format
    if fmt == "json":
        doc = {"meta": _meta(args, elapsed), "payload": payload}
        body = json.dumps(doc, sort_keys=True, default=str)
    elif fmt == "csv":
        meta = _meta(args, elapsed)
        lines = [f"# {k}={json.dumps(v, sort_keys=True, default=str)}"
                 for k, v in sorted(meta.items())]
        lines += [",".join(str(c) for c in row) for row in rows]
        body = "\n".join(lines)
    else:
        body = text if text is not None else json.dumps(payload, sort_keys=True,
                                                        default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        payload, rows, text, status = args.handler(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except CapabilityError as e:
        print(f"capability error: {e}", file=sys.stderr)
        return 3
    _write(args, payload, rows, text, time.monotonic() - start)
    return status


if __name__ == "__main__":
    sys.exit(main())
