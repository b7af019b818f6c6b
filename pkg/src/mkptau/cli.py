"""Command-line runner: build a scenario's tau table, run the selected checks, report.

Exit codes: 0 all checks pass, 1 some residual is nonzero, 2 invalid
configuration, 3 the tau table changed when the mode window was enlarged.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import hierarchy as hy
from .algebra.kernels import BACKEND
from .algebra.timepoly import Q
from .errors import ConfigurationError, NormalizationError
from .fermion import CliffordSpec, Factor, ModeWindow, required_window, tables_agree, tau_table

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_UNSTABLE = 0, 1, 2, 3

COEFFICIENT_POOL = (Q(1), Q(-1), Q(1, 2), Q(-1, 2), Q(2), Q(-2), Q(1, 3), Q(-1, 3))

BUILTIN = {
    "default": {"N": 3, "window": [-3, 3], "random_factors": 3},
    "identity": {"N": 3, "window": [-3, 3], "clifford": []},
    "t1-fixture": {"N": 1, "window": [-2, 2], "clifford": ["factor 1 0 1 -1 3/1"]},
}


def generate_random_clifford(n_components: int, window: ModeWindow, count: int, seed: int,
                             pool=COEFFICIENT_POOL) -> CliffordSpec:
    """``count`` particle-hole factors ``psi_i psi*_j`` with ``i >= 0 > j`` inside ``window``.

    A particle-hole product never returns a vacuum to itself, so every
    ``tau^p(0)`` stays 1 and the wave functions are defined.
    """
    if count < 0:
        raise ConfigurationError("factor count must be non-negative")
    rng = random.Random(seed)
    factors = []
    for _ in range(count):
        a = rng.randint(1, n_components)
        b = rng.randint(1, n_components)
        i = rng.randrange(0, window.hi) if window.hi > 0 else 0
        j = rng.randrange(window.lo, 0)
        factors.append(Factor(a, i, b, j, rng.choice(pool)))
    return CliffordSpec(tuple(factors))


@dataclass
class Scenario:
    name: str
    n_components: int
    window: ModeWindow
    p_range: tuple
    clifford: CliffordSpec
    degree: int = 3
    max_order: int = 3
    z_max: int = 3
    k_trunc: int = 3
    suite: tuple = ()
    seed: int = 0
    negative_control: str | None = None
    source: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {
            "name": self.name,
            "N": self.n_components,
            "window": [self.window.lo, self.window.hi],
            "p_range": list(self.p_range),
            "clifford": self.clifford.to_text().splitlines(),
            "D": self.degree,
            "K_t": self.max_order,
            "Z_max": self.z_max,
            "K_trunc": self.k_trunc,
            "suite": list(self.suite),
            "seed": self.seed,
            "negative_control": self.negative_control,
        }


def _int(cfg, key, default):
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigurationError(f"{key} must be an integer, got {v!r}")
    return v


def load_scenario(source: str | None = None, overrides: dict | None = None) -> Scenario:
    """Scenario from a built-in name or a JSON file, with CLI overrides applied last."""
    cfg: dict = {}
    base = Path(".")
    if source is None:
        source = "default"
    if source in BUILTIN:
        cfg = dict(BUILTIN[source], name=source)
    else:
        path = Path(source)
        try:
            cfg = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigurationError(f"no scenario file or built-in scenario named {source!r}") from None
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{source}: invalid JSON ({e})") from None
        if not isinstance(cfg, dict):
            raise ConfigurationError(f"{source}: a scenario must be a JSON object")
        cfg.setdefault("name", path.stem)
        base = path.parent
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v

    n = _int(cfg, "N", 3)
    if n < 1:
        raise ConfigurationError("N must be at least 1")
    win = cfg.get("window", [-3, 3])
    if not (isinstance(win, list) and len(win) == 2):
        raise ConfigurationError("window must be a pair [lo, hi]")
    window = ModeWindow(int(win[0]), int(win[1]))
    D = _int(cfg, "D", 3)
    K_t = _int(cfg, "K_t", 3)
    Z_max = _int(cfg, "Z_max", 3)
    K_trunc = _int(cfg, "K_trunc", 3)
    seed = _int(cfg, "seed", 0)
    if D < 2:
        raise ConfigurationError("D must be at least 2 (checks run through degree D-1)")
    if K_t < 2 or Z_max < 1 or K_trunc < 1:
        raise ConfigurationError("need K_t >= 2, Z_max >= 1 and K_trunc >= 1")

    if "clifford" in cfg:
        g = _parse_clifford(cfg["clifford"], base)
    else:
        g = generate_random_clifford(n, window, _int(cfg, "random_factors", 3), seed)
    g.validate(n, window)

    pr = cfg.get("p_range")
    if pr is None:
        # room for W to order K_trunc + 3 on both sides of the modes of g
        pr = [window.lo - 3 * K_trunc, window.hi + K_trunc]
    if not (isinstance(pr, list) and len(pr) == 2 and pr[0] <= pr[1]):
        raise ConfigurationError("p_range must be a pair [lo, hi] with lo <= hi")

    suite = cfg.get("suite", "all")
    suite = _parse_suite(suite)
    nc = cfg.get("negative_control")
    if nc not in hy.CORRUPTIONS:
        raise ConfigurationError(f"unknown negative control {nc!r}; choose from {list(hy.CORRUPTIONS[1:])}")
    return Scenario(str(cfg["name"]), n, window, (int(pr[0]), int(pr[1])), g, D, K_t, Z_max, K_trunc,
                    suite, seed, nc, cfg)


def _parse_clifford(value, base: Path) -> CliffordSpec:
    if isinstance(value, dict) and "file" in value:
        try:
            return CliffordSpec.from_text((base / value["file"]).read_text())
        except FileNotFoundError:
            raise ConfigurationError(f"Clifford file {value['file']!r} not found") from None
    if isinstance(value, str):
        return CliffordSpec.from_text(value)
    if isinstance(value, list) and all(isinstance(x, str) for x in value):
        return CliffordSpec.from_text("\n".join(value))
    raise ConfigurationError("clifford must be factor lines, a text block or {\"file\": path}")


def _parse_suite(suite) -> tuple:
    if suite == "all" or suite == ["all"]:
        return tuple(sorted(CHECKS))
    if isinstance(suite, str):
        suite = [s.strip() for s in suite.split(",") if s.strip()]
    unknown = [s for s in suite if s not in CHECKS]
    if unknown or not suite:
        raise ConfigurationError(f"unknown check ids {unknown}; available: {sorted(CHECKS)}")
    return tuple(sorted(set(suite)))


# -- checks -----------------------------------------------------------------

def _components(H):
    return range(1, H.n + 1)


def run_bilinear(H, sc):
    total = inst = 0
    for n in (0, 1, 2):
        for p in range(H.p_lo + n, H.p_hi + 1):
            for a in _components(H):
                for b in _components(H):
                    total += len(hy.check_bilinear_identity(H, n, a, b, p))
                    inst += 1
    return total, inst, {"n": [0, 1, 2], "degree_per_alphabet": H.D - 1, "miwa_depth": "full"}


def run_hirota(H, sc):
    total = inst = 0
    idx = list(_components(H))
    per = {}
    for which in hy.HIROTA:
        k = 0
        for p in range(H.p_lo, H.p_hi + 1):
            for a in idx:
                for b in idx:
                    for c in idx:
                        if which == "H8" and len({a, b, c}) < 3:
                            continue
                        if which in ("H9", "H10") and (a == b or c != idx[0]):
                            continue
                        if which == "H11" and (a == c or b != idx[0]):
                            continue
                        r = hy.check_hirota(H, which, p, a, b, c, z_max=sc.z_max)
                        total += sum(len(x) for x in r.coeffs.values())
                        k += 1
        per[which] = k
        inst += k
    return total, inst, {"instances": per, "z_order": sc.z_max - 1, "degree": H.D - 1}


def run_pairing(H, sc):
    total = inst = 0
    for p in range(H.p_lo, H.p_hi + 1):
        for p2 in range(max(H.p_lo, p - 2), p + 1):
            m = hy.check_ba_bilinear_pairing(H, p, p2)
            total += sum(len(x) for row in m for x in row)
            inst += 1
    return total, inst, {"p_minus_p2": [0, 1, 2]}


def run_antisymmetry(H, sc):
    total = inst = 0
    for p in range(H.p_lo, H.p_hi + 1):
        total += sum(len(x + y) for rw, rv in zip(H.w(1, p), H.v(1, p)) for x, y in zip(rw, rv))
        inst += 1
    return total, inst, {}


def run_ba_construction(H, sc):
    total = 0
    for adjoint in (False, True):
        total += hy._count(hy.baker_akhiezer(H, adjoint) - hy.baker_from_wave(H, adjoint))
    return total, 2 * (H.p_hi - H.p_lo + 1), {"series_depth": H.depth}


def run_wave_operator(H, sc):
    from .psdo import PseudoDiffOp, pdo_invert, pdo_mul

    K = sc.k_trunc
    W = hy.build_wave_operator(H, K)
    Wi = hy.wave_operator_inverse(H, K)
    G = pdo_invert(W)
    prod = pdo_mul(W, Wi)
    ident = PseudoDiffOp.identity(H.n, H.space).truncate(window=prod.window)
    r1 = (prod - ident).truncate(order=K)
    r2 = (Wi - G).truncate(order=K)
    return hy._count(r1) + hy._count(r2), 2, {"order": K, "product_window": list(prod.window),
                                              "inverse_window": list(Wi.window)}


def run_linear(H, sc):
    total = inst = 0
    for adjoint in (False, True):
        for fn in (hy.check_linear_problem_t1, hy.check_linear_problem_components):
            F = fn(H, adjoint)
            total += hy._count(F)
            inst += len(F.values)
    return total, inst, {"degree": H.D - 1}


def run_flows(H, sc):
    total = inst = 0
    for a in [None, *_components(H)]:
        for m in (1, 2):
            r = hy.check_flow_equations(H, a, m)
            for F in r.values():
                total += hy._count(F)
                inst += len(F.values)
            S = hy.check_sato_equation(H, a, m, sc.k_trunc)
            total += hy._count(S)
            inst += 1
    return total, inst, {"m": [1, 2], "order": sc.k_trunc, "degree": H.D - 1}


def run_lax(H, sc):
    K = sc.k_trunc
    total = inst = 0
    s = hy.check_spectral_problem(H, K)["residual"]
    total += hy._count(s)
    inst += len(s.values)
    windows = {}
    for a in [None, *_components(H)]:
        for m in (1, 2):
            R = hy.check_lax_equation(H, a, m, K)
            total += hy._count(R)
            inst += 1
            windows[f"{'all' if a is None else a},{m}"] = list(R.window)
    total += hy._count(hy.check_zero_curvature(H))
    inst += 1
    return total, inst, {"order": K, "m": [1, 2], "lax_windows": windows}


CHECKS = {
    "antisymmetry": run_antisymmetry,
    "ba-construction": run_ba_construction,
    "bilinear": run_bilinear,
    "flows": run_flows,
    "hirota": run_hirota,
    "lax": run_lax,
    "linear": run_linear,
    "pairing": run_pairing,
    "wave-operator": run_wave_operator,
}


# -- runner ------------------------------------------------------------------

def fock_window(sc: Scenario) -> ModeWindow:
    need = required_window(sc.p_range[0], sc.p_range[1], sc.clifford)
    return ModeWindow(min(need.lo, sc.window.lo), max(need.hi, sc.window.hi))


def run_scenario(sc: Scenario, out=None) -> tuple[dict, int]:
    """Run one scenario; returns the structured report and the exit code."""
    out = out or sys.stdout
    w1 = fock_window(sc)
    w2 = w1.enlarged(1)
    p_lo, p_hi = sc.p_range
    print(f"scenario {sc.name}: N={sc.n_components} window={sc.window} p=[{p_lo},{p_hi}] D={sc.degree} "
          f"K_t={sc.max_order} Z_max={sc.z_max} K_trunc={sc.k_trunc} seed={sc.seed}", file=out)
    for line in sc.clifford.to_text().splitlines():
        print(f"  {line}", file=out)

    table = tau_table(p_lo, p_hi, sc.clifford, sc.n_components, w1)
    wider = tau_table(p_lo, p_hi, sc.clifford, sc.n_components, w2)
    stable = tables_agree(table, wider, sc.degree)
    report = {
        "scenario": sc.echo(),
        "engine": {
            "backend": BACKEND,
            "fock_window": [w1.lo, w1.hi],
            "window_stability": {"pass": stable, "window": [w1.lo, w1.hi], "enlarged": [w2.lo, w2.hi],
                                 "degree": sc.degree},
            "truncation": {
                "D": sc.degree, "K_t": sc.max_order, "Z_max": sc.z_max, "K_trunc": sc.k_trunc,
                "check_degree": sc.degree - 1, "tau": "exact",
            },
        },
        "checks": [],
    }
    print(f"window stability {w1} -> {w2}: {'ok' if stable else 'UNSTABLE'}", file=out)
    if not stable:
        report["pass"] = False
        return report, EXIT_UNSTABLE
    if p_lo <= 0 <= p_hi:
        t0 = table.tau(0).to_text()
        report["tau0"] = t0
        print(f"tau^0 = {t0}", file=out)

    H = hy.Hierarchy(table, sc.max_order, sc.degree, corrupt=sc.negative_control)
    ok = True
    for cid in sc.suite:
        t = time.perf_counter()
        residual, instances, detail = CHECKS[cid](H, sc)
        dt = time.perf_counter() - t
        passed = residual == 0
        ok &= passed
        report["checks"].append({"id": cid, "pass": passed, "residual_terms": residual, "instances": instances,
                                 "detail": detail, "elapsed_s": round(dt, 3)})
        print(f"{'PASS' if passed else 'FAIL'} {cid:16s} residual_terms={residual} instances={instances} "
              f"({dt:.2f}s)", file=out)
    report["pass"] = ok
    print(f"result: {'PASS' if ok else 'FAIL'}", file=out)
    return report, EXIT_PASS if ok else EXIT_FAIL


def report_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mkptau", description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="default",
                    help=f"JSON scenario file or built-in name ({', '.join(sorted(BUILTIN))})")
    ap.add_argument("--suite", help=f"comma-separated check ids or 'all' ({', '.join(sorted(CHECKS))})")
    ap.add_argument("--report", help="write the structured JSON report here")
    ap.add_argument("--seed", type=int, help="seed for random Clifford generation")
    ap.add_argument("--degree", type=int, help="degree cap D")
    ap.add_argument("--negative-control", choices=[c for c in hy.CORRUPTIONS if c],
                    help="deliberately corrupt one ingredient; the suite must then fail")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"suite": args.suite, "seed": args.seed, "D": args.degree,
                 "negative_control": args.negative_control}
    try:
        sc = load_scenario(args.scenario, overrides)
        report, code = run_scenario(sc)
    except (ConfigurationError, NormalizationError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.report:
        Path(args.report).write_text(report_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
