"""Command-line interface: stable, osb, classify, emit, selftest.

Exit codes:
  0  success / superbase found
  1  invalid input or usage error
  2  no stable coefficients
  3  no obtuse superbase exists
  4  inconclusive quick search, a search cap was exceeded, or a selftest failure
  5  slope below the changemaker range
  6  superbase graph is not planar
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .alexpoly import (
    is_lspace_form,
    parse_laurent,
    parse_polynomial,
    torsion_coefficients,
    torsion_counts,
)
from .changemaker import (
    build_half_integer_lattice,
    build_integer_lattice,
    genus,
    half_integer_from_sigma,
    lattice_from_sigma,
    n_invariant,
    stable_coefficients,
)
from .classify import (
    certificate,
    classify,
    classify_rho,
    report_json,
    report_text,
    run_slope,
    slope_text,
)
from .errors import AltSurgError, NotPlanar, SearchSpaceOverflow, SlopeTooSmall
from .goeritz import emit_branching_set, planarity
from .lattice import validate_superbase
from .osb_search import DEFAULT_CAP_NODES, DEFAULT_CAP_VECTORS, FOUND, FULL, NONE, QUICK

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_STABLE = 2
EXIT_NONE = 3
EXIT_INCONCLUSIVE = 4
EXIT_SLOPE_TOO_SMALL = 5
EXIT_NOT_PLANAR = 6


def int_list(text, sep=","):
    try:
        return [int(x) for x in text.replace(" ", "").split(sep) if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers separated by '{sep}': {text!r}")


def parse_slope(text):
    """Integer or half-integer slope written as n, p/2 or x.5."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            q = Fraction(int(num), int(den))
        elif "." in text:
            q = Fraction(text)
        else:
            q = Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot read slope {text!r}")
    if q.denominator not in (1, 2):
        raise argparse.ArgumentTypeError(
            f"slope {text} is out of scope: only integer and half-integer slopes are supported")
    return q


def _emit(args, payload, text=None):
    if args.json or text is None:
        out = json.dumps(payload, indent=2, sort_keys=True)
    else:
        out = text
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def rho_text(rho, g, N):
    return f"rho=[{','.join(map(str, rho))}] g={g} N={N}"


def _polynomial(args):
    if args.laurent is not None:
        return parse_laurent(args.laurent)
    return parse_polynomial(args.alexander)


# ---------------------------------------------------------------------------

def cmd_stable(args):
    if args.rho is not None:
        rho = tuple(sorted(args.rho, reverse=True))
        g = genus(rho)
        N = n_invariant(rho)
        _emit(args, {"rho": list(rho), "genus": g, "N": N}, rho_text(rho, g, N))
        return EXIT_OK
    p = _polynomial(args)
    if p.genus_degree == 0:
        _emit(args, {"rho": [], "genus": 0, "N": None, "unknot_form": True},
              "unknot form: constant polynomial, nothing to analyse")
        return EXIT_OK
    profile = torsion_coefficients(p)
    rho = None
    if is_lspace_form(profile):
        counts = torsion_counts(profile)
        rho = stable_coefficients(counts, p.genus_degree, counts.t0)
    if rho is None:
        _emit(args, {"rho": None, "genus": p.genus_degree, "outcome": "NoStableCoefficients"},
              "no stable coefficients")
        return EXIT_NO_STABLE
    N = n_invariant(rho)
    _emit(args, {"rho": list(rho), "genus": genus(rho), "N": N},
          rho_text(rho, genus(rho), N))
    return EXIT_OK


def _lattice_for(args):
    q = args.slope
    if args.sigma is not None:
        if q.denominator == 1:
            L = lattice_from_sigma(args.sigma)
            if L.n != q:
                raise SlopeTooSmall(f"sigma has norm {L.n}, not {q}")
        else:
            L = half_integer_from_sigma(args.sigma)
            if L.slope != q:
                raise SlopeTooSmall(f"sigma gives slope {slope_text(L.slope)}, not {slope_text(q)}")
        return L
    if q.denominator == 1:
        return build_integer_lattice(args.rho, int(q))
    return build_half_integer_lattice(args.rho, int(q + Fraction(1, 2)))


def cmd_osb(args):
    try:
        L = _lattice_for(args)
    except SlopeTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SLOPE_TOO_SMALL
    try:
        result = run_slope(L, args.mode, args.cap_vectors, args.cap_nodes)
    except SearchSpaceOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    cert = certificate(result)
    status = cert["status"]
    text = f"slope {cert['slope']}: {status}"
    if status == FOUND:
        text += f", planar={cert['planar']}, det={cert['determinant']}"
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(cert, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(text)
    elif args.json:
        print(json.dumps(cert, indent=2, sort_keys=True))
    else:
        print(text)
    return {FOUND: EXIT_OK, NONE: EXIT_NONE}.get(status, EXIT_INCONCLUSIVE)


# ---------------------------------------------------------------------------
# batch classification

def parse_batch_line(line, lineno):
    """``[id,]payload`` where payload is ``a_g;...;a_0`` or ``rho:r1;r2;...``."""
    line = line.strip()
    if not line or line.startswith("#"):
        return None
    ident = str(lineno)
    if "," in line:
        ident, line = (part.strip() for part in line.split(",", 1))
    try:
        if line.startswith("rho:"):
            return ident, {"rho": int_list(line[4:], ";")}
        return ident, {"alexander": int_list(line, ";")}
    except argparse.ArgumentTypeError as exc:
        raise ValueError(f"batch line {lineno}: {exc}")


def classify_record(job):
    ident, payload, mode, cap_vectors, cap_nodes, mirror = job
    try:
        if "rho" in payload:
            c = classify_rho(payload["rho"], mode, cap_vectors, cap_nodes)
        else:
            c = classify(parse_polynomial(payload["alexander"]), mode, cap_vectors, cap_nodes)
        return {"id": ident, **report_json(c, mirror)}
    except SearchSpaceOverflow as exc:
        partial = exc.partial or {}
        done = partial.get("classification")
        return {"id": ident, "input": payload, "error": "SearchSpaceOverflow", "message": str(exc),
                "completed_slopes": sorted(done.searches) if done else []}
    except (AltSurgError, TypeError) as exc:
        return {"id": ident, "input": payload, "error": type(exc).__name__, "message": str(exc)}


def _completed_ids(path):
    """Ids of complete records; a trailing partial line is cut off."""
    if not os.path.exists(path):
        return []
    with open(path, "rb") as fh:
        data = fh.read()
    keep = data[:data.rfind(b"\n") + 1]
    if keep != data:
        with open(path, "wb") as fh:
            fh.write(keep)
    return [json.loads(line)["id"] for line in keep.decode().splitlines() if line.strip()]


def run_batch(path, out, mode=FULL, cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES,
              threads=1, mirror=False, limit=None):
    """Classify every line of ``path`` into JSONL at ``out``, resuming if possible.

    ``limit`` stops after that many new records (used to simulate interruption).
    """
    jobs = []
    seen = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parsed = parse_batch_line(line, lineno)
            if parsed is None:
                continue
            ident, payload = parsed
            if ident in seen:
                raise ValueError(f"duplicate id {ident!r} in batch input")
            seen.add(ident)
            jobs.append((ident, payload, mode, cap_vectors, cap_nodes, mirror))
    done = _completed_ids(out)
    if done != [j[0] for j in jobs[:len(done)]]:
        raise ValueError(f"{out} does not hold a prefix of this batch; refusing to resume")
    pending = jobs[len(done):]
    if limit is not None:
        pending = pending[:limit]
    written = 0
    with open(out, "a") as fh:
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                records = pool.map(classify_record, pending)
                for record in records:
                    _write_record(fh, record)
                    written += 1
        else:
            for job in pending:
                _write_record(fh, classify_record(job))
                written += 1
    return written


def _write_record(fh, record):
    fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
    fh.flush()
    os.fsync(fh.fileno())


def cmd_classify(args):
    if args.batch:
        if not args.out:
            print("error: --batch needs --out for the JSONL results", file=sys.stderr)
            return EXIT_INPUT
        n = run_batch(args.batch, args.out, args.mode, args.cap_vectors, args.cap_nodes,
                      args.threads, args.mirror)
        print(f"{n} records written to {args.out}")
        return EXIT_OK
    try:
        if args.rho is not None:
            c = classify_rho(args.rho, args.mode, args.cap_vectors, args.cap_nodes)
        else:
            c = classify(_polynomial(args), args.mode, args.cap_vectors, args.cap_nodes)
    except SearchSpaceOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    _emit(args, report_json(c, args.mirror), report_text(c, args.mirror))
    return EXIT_OK


def cmd_emit(args):
    with open(args.certificate) as fh:
        cert = json.load(fh)
    if cert.get("status") != FOUND:
        print("error: the certificate does not contain a superbase", file=sys.stderr)
        return EXIT_INPUT
    lat = cert["lattice"]
    if lat["flavor"] == "integer":
        L = lattice_from_sigma(lat["sigma"])
    else:
        L = half_integer_from_sigma(lat["sigma"])
    B = validate_superbase(L, cert["vectors"])
    emb = planarity(B.graph)
    try:
        data = emit_branching_set(emb, B)
    except NotPlanar as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PLANAR
    payload = data.to_json()
    args.json = True
    _emit(args, payload)
    return EXIT_OK


def cmd_selftest(args):
    from .acceptance import run_all

    results = run_all()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[QUICK, FULL], default=FULL)
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for batch classification")
    common.add_argument("--cap-vectors", type=int, default=DEFAULT_CAP_VECTORS)
    common.add_argument("--cap-nodes", type=int, default=DEFAULT_CAP_NODES)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", help="write output to this file")

    parser = argparse.ArgumentParser(prog="altsurg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p, rho=True):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--alexander", type=int_list,
                           help="coefficients a_g,...,a_1,a_0 from the top degree down (write --alexander=-1,1 for a leading minus)")
        group.add_argument("--laurent", type=int_list, help="full symmetric coefficient list")
        if rho:
            group.add_argument("--rho", type=int_list, help="stable coefficients")
        return group

    p = sub.add_parser("stable", parents=[common], help="stable coefficients, genus and N")
    source(p)
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("osb", parents=[common], help="obtuse superbase search at one slope")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--rho", type=int_list)
    group.add_argument("--sigma", type=int_list, help="changemaker vector (inner vector for half-integers)")
    p.add_argument("--slope", type=parse_slope, required=True, help="n, p/2 or x.5")
    p.set_defaults(func=cmd_osb)

    p = sub.add_parser("classify", parents=[common], help="classify alternating surgery slopes")
    group = source(p)
    group.add_argument("--batch", help="file with one input per line")
    p.add_argument("--mirror", action="store_true", help="report slopes for the mirror image")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("emit", parents=[common], help="alternating diagram data from a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("selftest", parents=[common], help="run the reproduction corpus")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which is taken by "no stable coefficients"
        return EXIT_INPUT if exc.code == 2 else exc.code
    try:
        return args.func(args)
    except SlopeTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SLOPE_TOO_SMALL
    except (AltSurgError, TypeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
