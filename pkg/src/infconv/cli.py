"""Command-line front end.

Subcommands: partitions | law | convolve | wishart | selftest.  Output in
json, csv, or pretty text; all numbers printed at 12 significant digits so
runs are byte-reproducible given the same flags and seed.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 mathematical domain error.

An optional --config file holds flat key=value pairs (format, seed, K, kind,
order, c, cprime, N, trials, kmax); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import cumulants as _cum
from . import laws as _laws
from .convolve import ProductKind, convolve_by_transform, verify
from .dual import DualScalar
from .errors import (
    ConfigError,
    InfconvError,
    InvalidInputError,
    MathDomainError,
)
from .laws import InfLaw, TransformKind
from .partitions import (
    MAX_NC_N,
    MAX_NCL_N,
    SetPartition,
    enumerate_nc,
    enumerate_ncl,
    linked_class,
    parse_partition_text,
)
from .series import DualSeries
from .wishart import WishartConfig, estimate_moments, product_experiment

class _Unset:
    def __repr__(self):
        return "<unset>"


_UNSET = _Unset()

_CONFIG_KEYS = {
    "format": str,
    "seed": int,
    "K": int,
    "kind": str,
    "order": str,
    "c": float,
    "cprime": float,
    "N": str,
    "trials": int,
    "kmax": int,
}


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # avoid '-0'
    return f"{x:.12g}"


def _cfmt(x: complex) -> str:
    x = complex(x)
    if x.imag == 0:
        return _fmt(x.real)
    return f"{_fmt(x.real)}{'+' if x.imag >= 0 else '-'}{_fmt(abs(x.imag))}j"


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit_json(obj) -> str:
    return json.dumps(_round12(obj), indent=2, sort_keys=False)


def _load_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def _pick(args, config: dict, key: str, default):
    val = getattr(args, key, _UNSET)
    if val is not _UNSET and val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _read_law(path: str) -> InfLaw:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InvalidInputError(f"cannot read law file: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed law JSON: {exc}") from exc
    try:
        return InfLaw.from_json_obj(obj)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, InfconvError):
            raise
        raise InvalidInputError(f"bad law object: {exc}") from exc


# -- partitions ----------------------------------------------------------------


def cmd_partitions(args, config: dict, out) -> int:
    n = args.n
    kind = _pick(args, config, "kind", "nc")
    if kind not in ("nc", "ncl"):
        raise ConfigError("kind must be nc or ncl")
    fmt = _pick(args, config, "format", "pretty")
    classof = getattr(args, "classof", None)
    if classof is not None:
        if classof == "1n":
            sigma = SetPartition.of(n, [list(range(1, n + 1))])
        else:
            sigma = parse_partition_text(classof, n=n, linked=False)
        items = linked_class(sigma)
    elif kind == "nc":
        items = enumerate_nc(n)
    else:
        items = enumerate_ncl(n)
    forms = [str(p) for p in items]
    if fmt == "json":
        obj = {"n": n, "kind": kind, "count": len(forms), "partitions": forms}
        if classof is not None:
            obj["classof"] = classof
        out.write(_emit_json(obj) + "\n")
    elif fmt == "csv":
        out.write("partition\n")
        for f in forms:
            out.write(f'"{f}"\n')
    else:
        for f in forms:
            out.write(f + "\n")
        out.write(f"count: {len(forms)}\n")
    return 0


# -- law -----------------------------------------------------------------------


def _series_rows(s: DualSeries):
    for k in range(s.order + 1):
        v = s.coeff(k)
        yield k, v


def cmd_law(args, config: dict, out) -> int:
    law = _read_law(args.infile)
    K = _pick(args, config, "K", None)
    if K is not None:
        if not 1 <= K <= law.K:
            raise ConfigError(f"K must be in 1..{law.K} for this law")
        law = law.truncated(K)
    emit = args.emit
    fmt = _pick(args, config, "format", "pretty")
    if emit == "transform":
        kind_name = _pick(args, config, "kind", None)
        if kind_name is None:
            raise ConfigError("emit=transform needs --kind")
        kind = TransformKind.from_name(kind_name)
        series = _laws.transform(kind, law)
        if fmt == "json":
            out.write(_emit_json({"kind": kind.value,
                                  "series": series.to_json_obj()}) + "\n")
        elif fmt == "csv":
            out.write("n,re,im,re_prime,im_prime\n")
            for k, v in _series_rows(series):
                out.write(f"{k},{_fmt(v.body.real)},{_fmt(v.body.imag)},"
                          f"{_fmt(v.eps.real)},{_fmt(v.eps.imag)}\n")
        else:
            out.write(f"{kind.value} (order {series.order})\n")
            for k, v in _series_rows(series):
                out.write(f"  z^{k}: {_cfmt(v.body)} (d: {_cfmt(v.eps)})\n")
        return 0
    if emit == "cumulants":
        cv = _cum.cumulants_from_moments(law)
        if fmt == "json":
            out.write(_emit_json(cv.to_json_obj()) + "\n")
        elif fmt == "csv":
            out.write("n,kappa,kappa_prime\n")
            for i in range(cv.K):
                out.write(f"{i + 1},{_cfmt(cv.kappa[i])},{_cfmt(cv.kappa_prime[i])}\n")
        else:
            for i in range(cv.K):
                out.write(f"kappa[{i + 1}] = {_cfmt(cv.kappa[i])}   "
                          f"kappa'[{i + 1}] = {_cfmt(cv.kappa_prime[i])}\n")
        return 0
    if emit == "tcoeffs":
        tv = _cum.t_coeffs_from_moments(law)
        if fmt == "json":
            out.write(_emit_json(tv.to_json_obj()) + "\n")
        elif fmt == "csv":
            out.write("n,t,t_prime\n")
            for i in range(tv.K):
                out.write(f"{i},{_cfmt(tv.t[i])},{_cfmt(tv.t_prime[i])}\n")
        else:
            for i in range(tv.K):
                out.write(f"t[{i}] = {_cfmt(tv.t[i])}   "
                          f"t'[{i}] = {_cfmt(tv.t_prime[i])}\n")
        return 0
    raise ConfigError(f"unknown emit target {emit!r}")


# -- convolve --------------------------------------------------------------------


def _law_pretty(law: InfLaw, out):
    for i in range(law.K):
        out.write(f"m[{i + 1}] = {_cfmt(law.m[i])}   "
                  f"m'[{i + 1}] = {_cfmt(law.m_prime[i])}\n")


def cmd_convolve(args, config: dict, out) -> int:
    kind = ProductKind.from_name(_pick(args, config, "kind", "free"))
    lawx = _read_law(args.law_x)
    lawy = _read_law(args.law_y)
    K = _pick(args, config, "K", None)
    order = _pick(args, config, "order", "yx")
    fmt = _pick(args, config, "format", "pretty")
    product = convolve_by_transform(kind, lawx, lawy, K=K, order=order)
    report = None
    if args.verify:
        vk = K if K is not None else min(lawx.K, lawy.K)
        vk = min(vk, 8 if kind is not ProductKind.BOOLEAN else 10)
        report = verify(kind, lawx, lawy, vk, order=order)
    if fmt == "json":
        obj = {"kind": kind.value, "law": product.to_json_obj()}
        if report is not None:
            obj["verify"] = report.to_json_obj()
        out.write(_emit_json(obj) + "\n")
    elif fmt == "csv":
        out.write("n,m,m_prime\n")
        for i in range(product.K):
            out.write(f"{i + 1},{_cfmt(product.m[i])},{_cfmt(product.m_prime[i])}\n")
        if report is not None:
            out.write(f"# verify pass={report.passed} body={report.deviation_body:.3e}"
                      f" eps={report.deviation_eps:.3e}\n")
    else:
        out.write(f"{kind.value} product law (K = {product.K})\n")
        _law_pretty(product, out)
        if report is not None:
            out.write(f"verify: {'pass' if report.passed else 'FAIL'} "
                      f"(body {report.deviation_body:.3e}, "
                      f"eps {report.deviation_eps:.3e}, tol {report.tol:g})\n")
    if report is not None and not report.passed:
        return 1
    return 0


# -- wishart ---------------------------------------------------------------------


def _parse_sizes(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    try:
        return tuple(int(p) for p in str(text).split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad size list {text!r}") from exc


def cmd_wishart(args, config: dict, out) -> int:
    c = _pick(args, config, "c", None)
    if c is None:
        raise ConfigError("wishart needs --c")
    cfg = WishartConfig(
        c=float(c),
        c_prime=float(_pick(args, config, "cprime", 0.0)),
        N_list=_parse_sizes(_pick(args, config, "N", "100,200,400")),
        trials=int(_pick(args, config, "trials", 1000)),
        k_max=int(_pick(args, config, "kmax", 4)),
        seed=int(_pick(args, config, "seed", 0)),
    )
    est = product_experiment(cfg) if args.product else estimate_moments(cfg)
    fmt = _pick(args, config, "format", "pretty")
    if fmt == "json":
        text = _emit_json(est.to_json_obj()) + "\n"
    elif fmt == "csv":
        text = est.to_csv()
    else:
        lines = [f"{'N':>6} {'k':>2} {'mean':>16} {'stderr':>12} {'phi_pred':>16} "
                 f"{'phi_prime_est':>16} {'phi_prime_pred':>16}"]
        for r in est.rows:
            lines.append(f"{r.N:>6} {r.k:>2} {_fmt(r.mean):>16} {_fmt(r.stderr):>12} "
                         f"{_fmt(r.phi_pred):>16} {_fmt(r.phi_prime_est):>16} "
                         f"{_fmt(r.phi_prime_pred):>16}")
        lines.append("extrapolated:")
        for e in est.extrapolation:
            lines.append(f"  k={e.k} phi = {_fmt(e.phi_est)} +- {_fmt(e.phi_stderr)} "
                         f"(pred {_fmt(e.phi_pred)}), phi' = {_fmt(e.phi_prime_est)} "
                         f"+- {_fmt(e.phi_prime_stderr)} (pred {_fmt(e.phi_prime_pred)})")
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0 if est.checks_pass() else 1


# -- selftest --------------------------------------------------------------------


def _rand_law(rng, K=8, m1_lo=0.7, m1_hi=1.3) -> InfLaw:
    # first moment kept away from 0: S/T reversion conditioning degrades
    # sharply as the mean shrinks
    m = rng.uniform(-1, 1, K)
    mp = rng.uniform(-1, 1, K)
    m[0] = rng.uniform(m1_lo, m1_hi)
    return InfLaw.from_moments(
        [DualScalar(complex(a), complex(b)) for a, b in zip(m, mp)]
    )


def _selftest_checks():
    from .partitions import non_minimal_elements
    from .triangular import block_transform, block_transform_formula, \
        centered_alternating_check

    rng = np.random.default_rng(314159)

    def partition_counts():
        catalan = [1]
        for n in range(1, 9):
            catalan.append(sum(catalan[i] * catalan[n - 1 - i] for i in range(n)))
        for n in range(1, 9):
            if len(enumerate_nc(n)) != catalan[n]:
                return f"NC({n}) count mismatch"
        schroder = [1]
        for n in range(1, 8):
            schroder.append(schroder[n - 1]
                            + sum(schroder[k] * schroder[n - 1 - k] for k in range(n)))
        for n in range(1, 8):
            if len(enumerate_ncl(n)) != schroder[n - 1]:
                return f"NCL({n}) count mismatch"
        sigma = SetPartition.of(3, [[1, 2, 3]])
        if len(linked_class(sigma)) != 2:
            return "linked class of the full block on 3 points"
        if non_minimal_elements(parse_partition_text("{{1,2},{2,3}}", linked=True)) != (3,):
            return "non-minimal elements"
        return None

    def series_roundtrips():
        for _ in range(10):
            f = DualSeries.from_coeffs(
                [DualScalar(complex(a), complex(b))
                 for a, b in zip(rng.uniform(-1, 1, 9), rng.uniform(-1, 1, 9))]
            )
            f.body[0] = 0.4 + rng.uniform(0, 0.5)
            g = f * f.inv()
            if not g.almost_equal(DualSeries.constant(1.0, g.order), 1e-10):
                return "mul/inv roundtrip"
            h = f.copy()
            h.body[0] = 0.0
            h.eps[0] = 0.0
            h.body[1] = 1.0 + rng.uniform(0, 1)
            r = h.reversion()
            if not h.compose(r).almost_equal(DualSeries.identity(h.order), 1e-10):
                return "compose/reversion roundtrip"
        return None

    def transform_roundtrips():
        for _ in range(10):
            law = _rand_law(rng)
            for kind in TransformKind:
                f = _laws.transform(kind, law)
                back = _laws.law_from_transform(kind, f)
                db, de = law.truncated(back.K).max_abs_diff(back)
                if db > 1e-10 or de > 1e-10:
                    return f"{kind.value} roundtrip ({db:.2e}, {de:.2e})"
                d = _laws.d_transform(kind, law)
                _, eps = f.eps_split()
                db, _ = d.max_abs_diff(eps)
                if db > 1e-9:
                    return f"d-{kind.value} vs eps part ({db:.2e})"
        return None

    def cumulant_routes():
        fp = _cum.constant_cumulant_law(1.0, 0.0, K=8)
        catalan = [1, 2, 5, 14, 42, 132, 429, 1430]
        if any(abs(fp.m[i] - catalan[i]) > 1e-10 for i in range(8)):
            return "free Poisson(1) moments"
        for _ in range(5):
            law = _rand_law(rng)
            cv = _cum.cumulants_from_moments(law)
            back = _cum.moments_from_cumulants(cv)
            db, de = law.max_abs_diff(back)
            if db > 1e-10 or de > 1e-10:
                return "moment/cumulant roundtrip"
            tv = _cum.t_coeffs_from_moments(law)
            backt = _cum.moments_from_t(tv)
            db, de = law.max_abs_diff(backt)
            if db > 1e-9 or de > 1e-9:
                return "moment/t roundtrip"
            ka = _cum.kappa_from_t(tv, route="linked")
            kb = _cum.kappa_from_t(tv, route="interval")
            if max(abs(x - y) for x, y in zip(ka.kappa, kb.kappa)) > 1e-9:
                return "t-to-cumulant routes"
        return None

    def convolution_theorems():
        for _ in range(5):
            lx, ly = _rand_law(rng, K=6), _rand_law(rng, K=6)
            for kind in ProductKind:
                orders = ("yx", "xy") if kind is ProductKind.MONOTONE else ("yx",)
                for order in orders:
                    rep = verify(kind, lx, ly, 6, order=order)
                    if not rep.passed:
                        return f"{kind.value} ({order}) deviates {rep.deviation_body:.2e}"
        from .convolve import boolean_mixed_moments
        lx, ly = _rand_law(rng, K=6), _rand_law(rng, K=6)
        phi = boolean_mixed_moments(lx, ly)
        wrong = InfLaw.from_moments([phi(("x", "y") * k) for k in range(1, 7)])
        right = convolve_by_transform(ProductKind.FREE, lx, ly, 6)
        if wrong.max_abs_diff(right)[0] < 1e-3:
            return "negative control did not deviate"
        return None

    def triangular_blocks():
        for _ in range(5):
            law = _rand_law(rng)
            b = DualSeries.from_coeffs([0] + [complex(v) for v in rng.uniform(-0.8, 0.8, 6)])
            c = DualSeries.from_coeffs([0] + [complex(v) for v in rng.uniform(-0.8, 0.8, 6)])
            for kind in (TransformKind.PSI, TransformKind.ETA_PLAIN,
                         TransformKind.KAPPA, TransformKind.RHO, TransformKind.T):
                got = block_transform(kind, law, b, c)
                want = block_transform_formula(kind, law, b, c)
                if got.max_abs_diff(want) > 1e-9:
                    return f"{kind.value} block routes"
        lx, ly = _rand_law(rng, K=3), _rand_law(rng, K=3)
        rep = centered_alternating_check(lx, ly, max_word_len=5, model="free")
        if rep.max_body > 1e-9 or rep.max_eps > 1e-9:
            return "free centered words"
        repb = centered_alternating_check(lx, ly, max_word_len=5, model="boolean")
        if repb.max_body < 1e-6:
            return "boolean centered words should not vanish"
        return None

    def wishart_limit():
        law = _cum.constant_cumulant_law(1.0, 2.0, K=8)
        tv = _cum.t_coeffs_from_moments(law)
        want_t = [1.0, 1.0] + [0.0] * 6
        want_tp = [2.0] + [0.0] * 7
        if max(abs(a - b) for a, b in zip(tv.t, want_t)) > 1e-10:
            return "limit t-vector"
        if max(abs(a - b) for a, b in zip(tv.t_prime, want_tp)) > 1e-10:
            return "limit t-prime vector"
        return None

    def wishart_smoke():
        cfg = WishartConfig(c=1.0, c_prime=1.0, N_list=(48, 96), trials=120,
                            k_max=2, seed=20260814)
        a = estimate_moments(cfg)
        b = estimate_moments(cfg)
        if a.to_json() != b.to_json():
            return "nondeterministic estimates"
        row = next(r for r in a.rows if r.N == 96 and r.k == 1)
        if abs(row.mean - 97 / 96) > 4 * row.stderr:
            return "k=1 mean off its exact value"
        return None

    return [
        ("partition counts", partition_counts),
        ("series roundtrips", series_roundtrips),
        ("transform roundtrips and derivatives", transform_roundtrips),
        ("cumulant and t-coefficient routes", cumulant_routes),
        ("convolution theorems", convolution_theorems),
        ("triangular block routes", triangular_blocks),
        ("wishart limit t-vector", wishart_limit),
        ("wishart monte carlo smoke", wishart_smoke),
    ]


def cmd_selftest(args, config: dict, out) -> int:
    failures = 0
    for name, fn in _selftest_checks():
        try:
            msg = fn()
        except InfconvError as exc:
            msg = str(exc)
        if msg is None:
            out.write(f"ok   {name}\n")
        else:
            failures += 1
            out.write(f"FAIL {name}: {msg}\n")
    total = len(_selftest_checks())
    out.write(f"{total - failures} passed, {failures} failed\n")
    return 1 if failures else 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="flat key=value config file; flags override")
    common.add_argument("--format", choices=("json", "csv", "pretty"),
                        default=argparse.SUPPRESS,
                        help="output format (default pretty)")
    p = argparse.ArgumentParser(
        prog="infconv",
        description="Infinitesimal laws, transforms, convolutions, Wishart checks.",
    )
    p.add_argument("--config", default=None,
                   help="flat key=value config file; flags override")
    p.add_argument("--format", choices=("json", "csv", "pretty"), default=_UNSET,
                   help="output format (default pretty)")
    sub = p.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("partitions", parents=[common],
                        help="enumerate non-crossing (linked) partitions")
    pp.add_argument("n", type=int)
    pp.add_argument("--kind", choices=("nc", "ncl"), default=_UNSET)
    pp.add_argument("--classof", default=None,
                    help="'1n' or a partition literal; prints its linked class")

    pl = sub.add_parser("law", parents=[common], help="transforms, cumulants, t-coefficients of a law")
    pl.add_argument("--in", dest="infile", required=True,
                    help="law JSON file, or - for stdin")
    pl.add_argument("--emit", choices=("transform", "cumulants", "tcoeffs"),
                    required=True)
    pl.add_argument("--kind", default=_UNSET,
                    help="transform kind (psi, eta_tilde, eta_plain, kappa, rho, s, t)")
    pl.add_argument("-K", dest="K", type=int, default=_UNSET,
                    help="truncate the law to K moments first")

    pc = sub.add_parser("convolve", parents=[common], help="multiplicative convolution of two laws")
    pc.add_argument("--kind", choices=("free", "boolean", "monotone"), default=_UNSET)
    pc.add_argument("--law-x", dest="law_x", required=True)
    pc.add_argument("--law-y", dest="law_y", required=True)
    pc.add_argument("-K", dest="K", type=int, default=_UNSET)
    pc.add_argument("--order", choices=("yx", "xy"), default=_UNSET,
                    help="monotone product order")
    pc.add_argument("--verify", action="store_true",
                    help="cross-check against the independence oracle")

    pw = sub.add_parser("wishart", parents=[common], help="Monte Carlo vs the limit law")
    pw.add_argument("--c", type=float, default=_UNSET)
    pw.add_argument("--cprime", type=float, default=_UNSET)
    pw.add_argument("--N", default=_UNSET, help="comma-separated sizes")
    pw.add_argument("--trials", type=int, default=_UNSET)
    pw.add_argument("--kmax", type=int, default=_UNSET)
    pw.add_argument("--seed", type=int, default=_UNSET)
    pw.add_argument("--product", action="store_true",
                    help="two independent matrices, traces of (X1 X2)^k")
    pw.add_argument("--out", default=None, help="write the report to a file")

    sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    return p


_COMMANDS = {
    "partitions": cmd_partitions,
    "law": cmd_law,
    "convolve": cmd_convolve,
    "wishart": cmd_wishart,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args.config) if args.config else {}
        if "format" in config and config["format"] not in ("json", "csv", "pretty"):
            raise ConfigError("config format must be json, csv, or pretty")
        return _COMMANDS[args.command](args, config, sys.stdout)
    except MathDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
