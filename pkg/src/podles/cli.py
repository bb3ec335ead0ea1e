"""Command line interface: deterministic emission of the laboratory's tables.

Subcommands: spherical, awcheck, genfun, gram, growth, gaussian, validate.
Exit codes: 0 all asserted invariants pass, 2 falsification or failed
invariant (with a machine-readable summary on stdout), 3 insufficient
precision for a rank decision (raise precision_bits).
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import gmpy2
from gmpy2 import mpfr

from . import __version__
from . import genfun as gf
from . import gnslab as gl
from . import oqalg as oq
from . import uqrep as uq
from .linalg import Mat, norm
from .precision import (FalsificationError, PrecisionContext, PrecisionError,
                        format_real)
from .qseries import QContext, theta_grid
from .reports import failure_summary, write_table


@dataclass(frozen=True)
class RunConfig:
    q: str = "0.5"
    a: str = "0.3"
    precision_bits: int = 256
    n_max: int = 6
    gram_N: int = 3
    convention: str = "right"
    theta_grid: int = 64
    lambda_steps: int = 12
    output_format: str = "csv"
    output_dir: str = "out"
    seed: int = 0
    threads: int = 1

    def context(self) -> QContext:
        prec = PrecisionContext(bits=self.precision_bits)
        with prec:
            qv = mpfr(self.q)
            if not (0 < qv < 1):
                raise ValueError(f"q must lie in (0,1), got {self.q}")
            av = mpfr(self.a)
            if not (0 <= av <= mpfr(1) / 2):
                warnings.warn(f"a = {self.a} outside the classification range [0, 1/2]",
                              stacklevel=2)
        return QContext(self.q, self.a, prec)


def _fmt(cfg: RunConfig, x) -> str:
    return format_real(x, cfg.precision_bits)


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands; each returns (files, failures)


def cmd_spherical(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        vec_rows, coef_rows, res_rows = [], [], []
        for n in range(0, cfg.n_max + 1):
            for conv in ("left", "right"):
                v = uq.spherical_vector(n, conv, ctx) if n > 0 else [gmpy2.mpc(1)]
                for m, x in enumerate(v):
                    vec_rows.append({"n": n, "i": m - n, "convention": conv,
                                     "re": _fmt(cfg, x.real), "im": _fmt(cfg, x.imag)})
            if n >= 1:
                cs = uq.kernel_coeffs(n, ctx)
                for m, c in enumerate(cs):
                    coef_rows.append({"n": n, "i": m - n,
                                      "re": _fmt(cfg, c.real), "im": _fmt(cfg, c.imag)})
                ops = uq.op_matrices(n, ctx)
                kv = uq.kernel_vector(n, ctx)
                ann = norm(ops.X.matvec(kv))
                sym = max(abs(cs[i] - cs[len(cs) - 1 - i]) for i in range(len(cs)))
                res_rows.append({"n": n, "annihilation_residual": _fmt(cfg, ann),
                                 "symmetry_deviation": _fmt(cfg, sym)})
                if ann >= ctx.prec.tol_residual:
                    failures.append({"check": "kernel_annihilation", "n": n,
                                     "residual": _fmt(cfg, ann)})
                if sym >= ctx.prec.tol_residual:
                    failures.append({"check": "kernel_symmetry", "n": n,
                                     "residual": _fmt(cfg, sym)})
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        # serialized spherical-spherical coideal elements, full precision
        elements = {}
        for conv in ("left", "right"):
            for n in range(1, cfg.n_max + 1):
                v = uq.spherical_vector(n, conv, ctx)
                el = oq.matrix_coefficient(n, v, v)
                elements[f"{conv}:{n}"] = oq.serialize(el, cfg.precision_bits)
        (out / "spherical_elements.json").write_text(
            json.dumps(elements, indent=1, sort_keys=True) + "\n", encoding="ascii")
        files.append(out / "spherical_elements.json")
        files.append(write_table(out / "spherical_vectors", "spherical_vectors", 1, cfg,
                                 ["n", "i", "convention", "re", "im"], vec_rows,
                                 cfg.output_format, __version__))
        files.append(write_table(out / "kernel_coeffs", "kernel_coeffs", 1, cfg,
                                 ["n", "i", "re", "im"], coef_rows,
                                 cfg.output_format, __version__))
        files.append(write_table(out / "kernel_residuals", "kernel_residuals", 1, cfg,
                                 ["n", "annihilation_residual", "symmetry_deviation"],
                                 res_rows, cfg.output_format, __version__))
    return files, failures


def cmd_awcheck(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        from .qseries import askey_wilson, askey_wilson_base_q
        rows, grid_rows = [], []
        thetas = theta_grid(cfg.theta_grid)
        for n in range(0, cfg.n_max + 1):
            Qn, _, diag = gf.q_poly_report(n, ctx)
            dev = mpfr(0)
            for j, th in enumerate(thetas):
                x = gmpy2.cos(th)
                fv = Qn(x).real
                cv = diag.get("constant", mpfr(1)) * askey_wilson(n, x, ctx)
                bq = askey_wilson_base_q(n, x, ctx)
                dev = max(dev, abs(fv - cv))
                grid_rows.append({"n": n, "j": j, "x": _fmt(cfg, x),
                                  "fourier": _fmt(cfg, fv), "closed": _fmt(cfg, cv),
                                  "closed_base_q_reading": _fmt(cfg, bq)})
            rows.append({"n": n, "max_abs_deviation": _fmt(cfg, dev),
                         "ratio": _fmt(cfg, diag["ratio"]),
                         "shape_residual": _fmt(cfg, diag["shape_residual"]),
                         "verdict": diag["verdict"]})
            if dev >= ctx.prec.tol_rank:
                failures.append({"check": "two_route_agreement", "n": n,
                                 "max_abs_deviation": _fmt(cfg, dev),
                                 "verdict": diag["verdict"],
                                 "normalization_ratio": _fmt(cfg, diag["ratio"])})
        out = Path(cfg.output_dir)
        files.append(write_table(out / "awcheck", "awcheck", 1, cfg,
                                 ["n", "max_abs_deviation", "ratio", "shape_residual",
                                  "verdict"], rows, cfg.output_format, __version__))
        files.append(write_table(out / "awcheck_grid", "awcheck_grid", 1, cfg,
                                 ["n", "j", "x", "fourier", "closed",
                                  "closed_base_q_reading"], grid_rows,
                                 cfg.output_format, __version__))
    return files, failures


def cmd_genfun(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        F = gf.build_functional(ctx, cfg.n_max, convention=cfg.convention)
        rows = [{"n": 0, "raw_limit_derivative_mode": _fmt(cfg, 0),
                 "raw_limit_paper_constant": _fmt(cfg, 0),
                 "finite_difference_oracle": _fmt(cfg, 0),
                 "lambda_n": _fmt(cfg, 0)}]
        for n in range(1, cfg.n_max + 1):
            rows.append({"n": n,
                         "raw_limit_derivative_mode": _fmt(cfg, F.raw_derivative[n]),
                         "raw_limit_paper_constant": _fmt(cfg, F.raw_paper_constant[n]),
                         "finite_difference_oracle": _fmt(cfg, F.fd_oracle[n]),
                         "lambda_n": _fmt(cfg, F.lambdas[n])})
        if F.lambdas[0] != 0:
            failures.append({"check": "lambda_0_zero"})
        out = Path(cfg.output_dir)
        files.append(write_table(out / "genfun", "genfun", 1, cfg,
                                 ["n", "raw_limit_derivative_mode",
                                  "raw_limit_paper_constant",
                                  "finite_difference_oracle", "lambda_n"], rows,
                                 cfg.output_format, __version__))
    return files, failures


def cmd_gram(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        F = gf.build_functional(ctx, max(cfg.n_max, 2 * cfg.gram_N),
                                convention=cfg.convention)
        space = gl.gram(cfg.gram_N, F, cfg.convention, ctx)
        rows = [{"N": cfg.gram_N, "index": j, "eigenvalue": _fmt(cfg, e),
                 "kept": int(e > ctx.prec.tol_rank)}
                for j, e in enumerate(space.eigenvalues)]
        out = Path(cfg.output_dir)
        files.append(write_table(out / "gram_spectrum", "gram_spectrum", 1, cfg,
                                 ["N", "index", "eigenvalue", "kept"], rows,
                                 cfg.output_format, __version__))
        verdict = [{"N": cfg.gram_N, "min_eigenvalue": _fmt(cfg, space.eigenvalues[0]),
                    "rank": space.rank, "spectral_gap": _fmt(cfg, space.spectral_gap),
                    "psd": int(space.eigenvalues[0] >= -ctx.prec.tol_rank)}]
        files.append(write_table(out / "gram_verdict", "gram_verdict", 1, cfg,
                                 ["N", "min_eigenvalue", "rank", "spectral_gap", "psd"],
                                 verdict, cfg.output_format, __version__))
    return files, failures


def cmd_growth(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        F = gf.build_functional(ctx, max(cfg.n_max, 2 * cfg.gram_N),
                                convention=cfg.convention)
        table = gl.growth_table(cfg.gram_N, F, cfg.convention, ctx)
        rows = []
        for n in range(0, cfg.gram_N + 1):
            labels = table.labels[n]
            for i, g in enumerate(table.diagonals[n]):
                lab = labels[i]
                rows.append({"n": n, "i": i,
                             "eigenvalue_label": _fmt(cfg, lab) if lab is not None else "",
                             "g": _fmt(cfg, g),
                             "is_zero": int(abs(g) < ctx.prec.tol_rank)})
            if table.offdiag_max[n] >= ctx.prec.tol_rank:
                failures.append({"check": "growth_offdiagonal", "n": n,
                                 "max": _fmt(cfg, table.offdiag_max[n])})
            zeros = [i for i, g in enumerate(table.diagonals[n])
                     if abs(g) < ctx.prec.tol_rank]
            if n >= 1 and len(zeros) != 1:
                failures.append({"check": "growth_single_zero_diagonal", "n": n,
                                 "zero_indices": zeros})
        out = Path(cfg.output_dir)
        files.append(write_table(out / "growth", "growth", 1, cfg,
                                 ["n", "i", "eigenvalue_label", "g", "is_zero"], rows,
                                 cfg.output_format, __version__))
        trend = [{"n": n, "min_nonspherical": _fmt(cfg, table.min_nonspherical[n])}
                 for n in range(1, cfg.gram_N + 1)]
        files.append(write_table(out / "growth_trend", "growth_trend", 1, cfg,
                                 ["n", "min_nonspherical"], trend,
                                 cfg.output_format, __version__))
    return files, failures


def cmd_gaussian(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        rows = []
        for N in range(2, cfg.gram_N + 1):
            F = gf.build_functional(ctx, 2 * N, convention=cfg.convention)
            rep = gl.gaussian_rank(N, F, cfg.convention, ctx)
            rows.append({"N": N, "dim_image": rep.dim_image, "rank_NG": rep.rank_ng,
                         "dim_gaussian_part": rep.dim_gaussian_part,
                         "rank_gap": _fmt(cfg, rep.rank_gap),
                         "max_discard_mass": _fmt(cfg, rep.max_discard_mass),
                         "excluded_vectors": rep.excluded_vectors})
            if rep.dim_gaussian_part != 0:
                failures.append({"check": "purely_non_gaussian", "N": N,
                                 "dim_gaussian_part": rep.dim_gaussian_part})
        out = Path(cfg.output_dir)
        files.append(write_table(out / "gaussian", "gaussian", 1, cfg,
                                 ["N", "dim_image", "rank_NG", "dim_gaussian_part",
                                  "rank_gap", "max_discard_mass", "excluded_vectors"],
                                 rows, cfg.output_format, __version__))
    return files, failures


def cmd_validate(cfg: RunConfig):
    ctx = cfg.context()
    files, failures = [], []
    with ctx.prec:
        rows = []

        def relation_rows(s):
            with ctx.prec:
                r = uq.rep(s, ctx)
                q = ctx.q
                ident = Mat.identity(r.dim)
                checks = {
                    "k_kinv": (r.k @ r.k_inv) - ident,
                    "ke_qqek": (r.k @ r.e) - (r.e @ r.k).scale(q * q),
                    "kf_fk": (r.k @ r.f) - (r.f @ r.k).scale(1 / (q * q)),
                    "ef_fe_cartan": (r.e @ r.f) - (r.f @ r.e)
                                    - (r.k - r.k_inv).scale(1 / (q - 1 / q)),
                    "e_star": r.e.dagger() - (r.f @ r.k),
                    "AD_identity": (r.A @ r.D) - ident,
                    "AB_qBA": (r.A @ r.B) - (r.B @ r.A).scale(q),
                    "AC_qinvCA": (r.A @ r.C) - (r.C @ r.A).scale(1 / q),
                    "BC_CB_cartan": (r.B @ r.C) - (r.C @ r.B)
                                    - ((r.A @ r.A) - (r.D @ r.D)).scale(1 / (q - 1 / q)),
                    "B_star": r.B.dagger() - r.C,
                }
                return [(s, name, M.max_abs()) for name, M in checks.items()]

        spins = [Fraction(k, 2) for k in range(0, 2 * cfg.n_max + 1)]
        for batch in _map_ordered(relation_rows, spins, cfg.threads):
            for s, name, dev in batch:
                rows.append({"check": "relation", "subject": f"s={s}:{name}",
                             "residual": _fmt(cfg, dev),
                             "threshold": _fmt(cfg, ctx.prec.tol_residual),
                             "ok": int(dev < ctx.prec.tol_residual)})
                if dev >= ctx.prec.tol_residual:
                    failures.append({"check": "relation", "subject": f"s={s}:{name}",
                                     "residual": _fmt(cfg, dev)})
        for n in range(0, min(cfg.n_max, 3) + 1):
            for m in range(n, min(cfg.n_max, 3) + 1):
                cg = uq.cg_decompose(Fraction(n), Fraction(m), ctx)
                rn, rm = uq.rep(n, ctx), uq.rep(m, ctx)
                comp = Mat.zeros(rn.dim * rm.dim, rn.dim * rm.dim)
                worst = mpfr(0)
                for k, W in cg.isometries.items():
                    rk = uq.rep(k, ctx)
                    worst = max(worst, ((W.dagger() @ W)
                                        - Mat.identity(rk.dim)).max_abs())
                    comp = comp + (W @ W.dagger())
                worst = max(worst, (comp - Mat.identity(rn.dim * rm.dim)).max_abs())
                rows.append({"check": "cg", "subject": f"({n},{m})",
                             "residual": _fmt(cfg, worst),
                             "threshold": _fmt(cfg, ctx.prec.tol_residual),
                             "ok": int(worst < ctx.prec.tol_residual)})
                if worst >= ctx.prec.tol_residual:
                    failures.append({"check": "cg", "subject": f"({n},{m})",
                                     "residual": _fmt(cfg, worst)})
        for s in range(0, min(cfg.n_max, 2) + 1):
            rep_r = uq.validate_R_candidate(Fraction(s), ctx)
            for tag in ("S", "S_inv"):
                rows.append({"check": "R_candidate",
                             "subject": f"s={s}:{tag}:identity",
                             "residual": _fmt(cfg, rep_r[f"residual_identity_{tag}"]),
                             "threshold": "", "ok": ""})
                rows.append({"check": "R_candidate",
                             "subject": f"s={s}:{tag}:identity_flipped",
                             "residual": _fmt(cfg,
                                              rep_r[f"residual_identity_flipped_{tag}"]),
                             "threshold": "", "ok": ""})
                dev = rep_r[f"spectrum_vs_reference_{tag}"]
                rows.append({"check": "R_candidate",
                             "subject": f"s={s}:{tag}:spectrum_vs_[a+2i]",
                             "residual": _fmt(cfg, dev) if dev is not None else "",
                             "threshold": "", "ok": ""})
        out = Path(cfg.output_dir)
        files.append(write_table(out / "validate", "validate", 1, cfg,
                                 ["check", "subject", "residual", "threshold", "ok"],
                                 rows, cfg.output_format, __version__))
    return files, failures


COMMANDS = {
    "spherical": cmd_spherical,
    "awcheck": cmd_awcheck,
    "genfun": cmd_genfun,
    "gram": cmd_gram,
    "growth": cmd_growth,
    "gaussian": cmd_gaussian,
    "validate": cmd_validate,
}


def _load_config_file(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


_INT_FIELDS = {"precision_bits", "n_max", "gram_N", "theta_grid", "lambda_steps",
               "seed", "threads"}


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        raw = _load_config_file(args.config)
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}; "
                             f"valid keys: {sorted(known)}")
        fields = {k: (int(v) if k in _INT_FIELDS else v) for k, v in raw.items()}
        cfg = replace(cfg, **fields)
    overrides = {}
    for flag, name in (("q", "q"), ("a", "a"), ("precision", "precision_bits"),
                       ("nmax", "n_max"), ("gram_n", "gram_N"),
                       ("convention", "convention"), ("theta_grid", "theta_grid"),
                       ("lambda_steps", "lambda_steps"), ("out", "output_dir"),
                       ("format", "output_format"), ("threads", "threads"),
                       ("seed", "seed")):
        v = getattr(args, flag)
        if v is not None:
            overrides[name] = v
    return replace(cfg, **overrides)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="podles",
                                description="quantized SU(2) / Podles sphere laboratory")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--q", type=str, default=None)
    p.add_argument("--a", type=str, default=None)
    p.add_argument("--precision", type=int, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--gram-n", dest="gram_n", type=int, default=None)
    p.add_argument("--convention", choices=["left", "right"], default=None)
    p.add_argument("--theta-grid", dest="theta_grid", type=int, default=None)
    p.add_argument("--lambda-steps", dest="lambda_steps", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", type=str, default=None)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    cfg = build_config(args)
    try:
        files, failures = COMMANDS[args.command](cfg)
    except PrecisionError as exc:
        print(json.dumps({"status": "error", "advice": "raise precision_bits",
                          "detail": str(exc)}, sort_keys=True))
        return 3
    except (FalsificationError, ArithmeticError) as exc:
        print(failure_summary([{"check": "falsification", "detail": str(exc)}]))
        return 2
    for f in files:
        print(f)
    if failures:
        print(failure_summary(failures))
        return 2
    print(json.dumps({"status": "ok", "command": args.command}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
