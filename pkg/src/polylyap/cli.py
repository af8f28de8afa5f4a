"""Command-line interface.

Subcommands::

    polylyap verify MODEL [--cert CERT | --out CERT] [search flags]
    polylyap synthesize MODEL --out CERT [search flags]
    polylyap eval CERT POINTS
    polylyap plot CERT OUT.csv

Exit status is 0 on success, 1 when a search or check fails and 2 on
malformed input.
"""
import argparse
import logging
import sys

import numpy as np

from . import __version__
from .contraction import DECAY_TOL, decay_margins, sampled_decay_check, verify_certificate
from .files import FileFormatError, load_certificate, load_model, load_points, save_certificate
from .geometry import hull_facets, polygon_order
from .polytope import minkowski_dual, minkowski_primal
from .search import SearchConfig, find_polyhedron, synthesize

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

log = logging.getLogger("polylyap")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _search_flags(p):
    p.add_argument("--vertices", "-m", type=int, default=None, help="number of polytope vertices (default 2n)")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--epsilon", type=float, default=0.05, help="initial step budget relative to max |V| entry")
    p.add_argument("--eta-tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--step", choices=("fast", "full"), default="fast")
    p.add_argument("--gamma", type=float, default=None, help="uncertainty factor for motor models")
    p.add_argument("--hull", choices=("interval", "parameter"), default=None, help="corner hull for motor-speed")
    p.add_argument("--kappa", type=float, default=1e3, help="gain box |K_ij| <= kappa")
    p.add_argument("--samples", type=int, default=0, help="also check decay at this many random points")


def build_parser():
    p = _Parser(prog="polylyap", description="Polyhedral Lyapunov functions by LP-based vertex search.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check a certificate or search for one")
    v.add_argument("model")
    v.add_argument("--cert", help="certificate to re-check instead of searching")
    v.add_argument("--out", help="where to write the certificate found by the search")
    _search_flags(v)

    s = sub.add_parser("synthesize", help="search for a polytope and output-feedback gain")
    s.add_argument("model")
    s.add_argument("--out", help="where to write the certificate")
    _search_flags(s)

    e = sub.add_parser("eval", help="gauge, decay and margin at given points")
    e.add_argument("cert")
    e.add_argument("points", help="JSON list of points or comma/space separated text")

    q = sub.add_parser("plot", help="write polytope geometry as CSV")
    q.add_argument("cert")
    q.add_argument("out")
    return p


def _config(args, model):
    m = args.vertices if args.vertices is not None else 2 * model.n
    return SearchConfig(
        m=m,
        max_iter=args.max_iter,
        epsilon0=args.epsilon,
        eta_tol=args.eta_tol,
        seed=args.seed,
        step_mode=args.step,
        restarts=args.restarts,
        kappa=args.kappa,
    )


def _print_cert(cert):
    print(f"eta = {cert.eta!r}")
    if cert.gain is not None:
        print("K = " + np.array2string(np.asarray(cert.gain), precision=17, separator=", "))


def _check(cert, model, samples):
    if not verify_certificate(cert, model):
        print("certificate FAILED verification")
        return False
    if samples > 0 and not sampled_decay_check(cert, model, samples=samples):
        print(f"certificate FAILED the decay check at {samples} sample points")
        return False
    return True


def _run_search(args, synth):
    model = load_model(args.model, args.gamma, args.hull)
    if synth and not model.synthesis:
        raise FileFormatError("synthesize needs a synthesis model (kind synthesis or motor-position)")
    if not synth and model.synthesis:
        raise FileFormatError("verify takes analysis models; use synthesize for synthesis models")
    cfg = _config(args, model)
    report = synthesize(model, cfg) if synth else find_polyhedron(model, cfg)
    print(f"status = {report.status}")
    print(f"iterations = {report.iterations}")
    if not report.certified:
        return EXIT_FAIL
    cert = report.certificate
    print(f"restart = {report.restart}")
    _print_cert(cert)
    if not _check(cert, model, args.samples):
        return EXIT_FAIL
    if args.out:
        save_certificate(args.out, cert, model, cfg, report)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args):
    if args.cert is None:
        return _run_search(args, synth=False)
    model = load_model(args.model, args.gamma, args.hull)
    cert, _ = load_certificate(args.cert)
    if cert.v.n != model.n:
        raise FileFormatError(f"certificate has n = {cert.v.n}, model has n = {model.n}")
    _print_cert(cert)
    if not _check(cert, model, args.samples):
        return EXIT_FAIL
    print("certificate verified")
    return EXIT_OK


def cmd_synthesize(args):
    return _run_search(args, synth=True)


def cmd_eval(args):
    cert, model = load_certificate(args.cert)
    if not verify_certificate(cert, model):
        print("certificate FAILED verification")
        return EXIT_FAIL
    pts = load_points(args.points)
    if pts.shape[1] != cert.v.n:
        raise FileFormatError(f"points have dimension {pts.shape[1]}, certificate has n = {cert.v.n}")
    ok = True
    print(",".join([f"x{i}" for i in range(cert.v.n)] + ["psi_primal", "psi_dual", "max_decay", "margin", "ok"]))
    for x, (_, decays, margin) in zip(pts, decay_margins(cert, model, pts)):
        primal = minkowski_primal(cert.v, x)
        dual, _ = minkowski_dual(cert.v, x)
        good = margin >= -DECAY_TOL
        ok &= good
        coords = ",".join(f"{c:.17g}" for c in x)
        print(f"{coords},{primal:.17g},{dual:.17g},{max(decays):.17g},{margin:.17g},{'yes' if good else 'NO'}")
    return EXIT_OK if ok else EXIT_FAIL


def plot_rows(v):
    """CSV lines for the geometry of the vertex matrix ``v``."""
    n = v.shape[0]
    if n == 2:
        lines = ["x,y"]
        for j in polygon_order(v):
            lines.append(f"{v[0, j]:.17g},{v[1, j]:.17g}")
        return lines
    if n == 3:
        lines = ["kind,a,b,c"]
        for j in range(v.shape[1]):
            lines.append(f"vertex,{v[0, j]:.17g},{v[1, j]:.17g},{v[2, j]:.17g}")
        for i, j, k in hull_facets(v):
            lines.append(f"facet,{i},{j},{k}")
        return lines
    raise FileFormatError(f"plot supports n = 2 or 3, certificate has n = {n}")


def cmd_plot(args):
    cert, _ = load_certificate(args.cert)
    lines = plot_rows(cert.v.v)
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({len(lines) - 1} rows)")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "synthesize": cmd_synthesize, "eval": cmd_eval, "plot": cmd_plot}


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    try:
        return COMMANDS[args.command](args)
    except (FileFormatError, OSError) as exc:
        print(f"polylyap: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # Dimension and model-validation errors raised by the library.
        print(f"polylyap: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
