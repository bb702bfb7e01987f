"""Configuration-driven experiment runner.

Single JSON config; all real-valued entries are decimal strings so configs
round-trip identically across platforms.  Sample-point jitter flows from one
64-bit linear congruential generator, so every output is reproducible
byte-for-byte from (config, seed).
"""

from __future__ import annotations

import json
import os
import sys

import click
import mpmath as mp
from mpmath import mpf, mpc

from . import asymptotics as az
from . import continuation as ct
from . import faber as fb
from . import geometry as geo
from . import moments as mo
from .errors import BergmanLabError
from .precision import Lcg, bits, real_to_str

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_CONFIG = 2

DEFAULTS = {
    "domain": "disk",
    "precision_bits": 256,
    "degree_max": 16,
    "quadrature": {"nodes_per_panel": 48, "grading_levels": 24,
                   "max_panel_denom": 16},
    "annulus": {"rho_in": "0.3", "circle_samples": 4096,
                "newton_tol_log2": 100},
    "samples": {"interior": [], "exterior": [], "n_values": [8, 16],
                "jitter_count": 0, "jitter_box": ["-0.2", "0.2",
                                                  "-0.2", "0.2"]},
    "raster": {"nx": 24, "ny": 24, "pad": "0.15"},
    "laurent_radius": "1.3",
    "seed": 1,
    "criteria": list(range(1, 13)),
    "output_dir": "out",
}


class ConfigError(Exception):
    pass


def _merge(base, over):
    out = dict(base)
    for k, v in over.items():
        if k in base and isinstance(base[k], dict) and isinstance(v, dict):
            out[k] = _merge(base[k], v)
        else:
            out[k] = v
    return out


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    cfg = _merge(DEFAULTS, raw)
    if int(cfg["precision_bits"]) < 128:
        raise ConfigError("precision_bits must be >= 128")
    if int(cfg["degree_max"]) < 1:
        raise ConfigError("degree_max must be >= 1")
    rho = float(cfg["annulus"]["rho_in"])
    if not (0 < rho < 1):
        raise ConfigError("annulus.rho_in must lie in (0, 1)")
    return cfg


class Runner:
    """Resolved config plus lazily-built shared objects."""

    def __init__(self, cfg, out_dir):
        self.cfg = cfg
        self.out = out_dir
        self.prec = int(cfg["precision_bits"])
        self.d = geo.domain_from_spec(cfg["domain"], prec_bits=self.prec)
        q = cfg["quadrature"]
        self.scheme = mo.QuadratureScheme(
            nodes_per_panel=int(q["nodes_per_panel"]),
            grading_levels=int(q["grading_levels"]),
            max_panel_denom=int(q["max_panel_denom"]))
        a = cfg["annulus"]
        self.acfg = ct.AnnulusConfig(
            rho_in=str(a["rho_in"]),
            circle_samples=int(a["circle_samples"]),
            newton_tol_log2=int(a["newton_tol_log2"]))
        self.N = int(cfg["degree_max"])
        self._sys = None
        self._gram = None
        self._fab = None

    def gram(self):
        if self._gram is None:
            self._gram = mo.gram(self.d, self.N, self.scheme)
        return self._gram

    def system(self):
        if self._sys is None:
            self._sys = mo.orthonormalize(self.gram())
        return self._sys

    def faber(self):
        if self._fab is None:
            with bits(self.prec + 32):
                R = mpf(self.cfg["laurent_radius"])
                M = int(mp.ceil((self.prec - 24) / mp.log(R, 2)))
                L = fb.psi_laurent(self.d, R, M)
                self._fab = fb.faber_polys(self.d, L, self.N)
        return self._fab

    def sample_points(self, kind):
        pts = [mpc(mpf(re), mpf(im))
               for (re, im) in self.cfg["samples"][kind]]
        count = int(self.cfg["samples"].get("jitter_count", 0))
        if kind == "interior" and count:
            lo_r, hi_r, lo_i, hi_i = [mpf(s) for s in
                                      self.cfg["samples"]["jitter_box"]]
            lcg = Lcg(int(self.cfg["seed"]))
            for _ in range(count):
                pts.append(lcg.complex_in_box(lo_r, hi_r, lo_i, hi_i))
        return pts

    def fmt(self, x):
        return real_to_str(mpf(x), self.prec)

    def write_text(self, name, text):
        path = os.path.join(self.out, name)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return path

    def write_csv(self, name, header, rows):
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(row))
        return self.write_text(name, "\n".join(lines) + "\n")

    def echo_config(self):
        self.write_text("config.json",
                        json.dumps(self.cfg, indent=2, sort_keys=True) + "\n")


def _cmd_ortho(r: Runner):
    sysm = r.system()
    r.write_text("system.json", sysm.to_json() + "\n")
    rows = [[str(n), r.fmt(sysm.leading[n])] for n in range(r.N + 1)]
    r.write_csv("lambda.csv", ["n", "lambda_n"], rows)


def _cmd_tables(r: Runner):
    sysm = r.system()
    fab = r.faber()
    g = r.gram()
    rows = []
    with bits(r.prec + 32):
        for n in range(r.N + 1):
            eps = fb.epsilon_nn(r.d, g, fab, n)
            beta = fb.beta_nn(r.d, sysm, fab, g, n)
            resid = fb.lambda_identity_residual(r.d, sysm, fab, g, n)
            rows.append([str(n), r.fmt(eps), r.fmt(beta), r.fmt(resid)])
    r.write_csv("identity.csv", ["n", "eps_nn", "beta_nn",
                                 "identity_residual"], rows)
    arow = []
    with bits(r.prec + 32):
        for n in range(min(r.N, 12) + 1):
            for k in range(n + 1):
                a = fb.alpha(r.d, sysm, n, k)
                arow.append([str(n), str(k), r.fmt(a.real), r.fmt(a.imag)])
    r.write_csv("alpha.csv", ["n", "k", "re", "im"], arow)
    hn = min(4, r.N)
    with bits(r.prec + 32):
        hs = fb.hg_tables(r.d, sysm, hn, min(8, r.N - hn - 1) if r.N > hn + 1
                          else 1)
    hrows = [[str(hn), str(j), r.fmt(v.real), r.fmt(v.imag)]
             for j, v in enumerate(hs)]
    r.write_csv("h_table.csv", ["n", "j", "re", "im"], hrows)


def _cmd_zeros(r: Runner):
    sysm = r.system()
    rows = []
    for n in range(1, r.N + 1):
        zs = az.poly_zeros(sysm, n, radius=r.d.capacity)
        for rec in az.zero_diagnostics(zs, r.d):
            zeta = rec["zero"]
            rows.append([str(n), r.fmt(zeta.real), r.fmt(zeta.imag),
                         r.fmt(rec["dist_gamma"]), r.fmt(rec["dist_L"]),
                         r.fmt(rec["dist_corners"])])
    r.write_csv("zeros.csv", ["n", "re", "im", "dist_gamma", "dist_L",
                              "dist_corners"], rows)


def _cmd_asymptotics(r: Runner):
    sysm = r.system()
    nvals = [int(n) for n in r.cfg["samples"]["n_values"]]
    dev_rows = []
    for z in r.sample_points("exterior") + r.sample_points("interior"):
        for n in nvals:
            rec = az.deviation(r.d, sysm, n, z, r.acfg)
            dev_rows.append([str(n), r.fmt(rec.z.real), r.fmt(rec.z.imag),
                             rec.regime, r.fmt(abs(rec.A_n))])
    r.write_csv("deviations.csv", ["n", "re_z", "im_z", "regime", "abs_A_n"],
                dev_rows)
    prof_rows = []
    for z in r.sample_points("interior"):
        res = ct.classify_point(r.d, z, r.acfg)
        fit = az.nth_root_profile(r.d, sysm, z, range(1, r.N + 1))
        for (n, val) in fit.samples:
            prof_rows.append([str(n), r.fmt(val), r.fmt(res.r)])
    r.write_csv("profile.csv", ["n", "nth_root", "r_z"], prof_rows)


def _cmd_continuation(r: Runner):
    ras = r.cfg["raster"]
    recs = ct.omega_star_raster(r.d, r.acfg, int(ras["nx"]), int(ras["ny"]),
                                pad=float(ras["pad"]))
    rows = [["%.17f" % rec["x"], "%.17f" % rec["y"], str(rec["p"]),
             "%.17f" % rec["r"], str(rec["in_omega_star"])] for rec in recs]
    r.write_csv("raster.csv", ["x", "y", "p", "r", "in_omega_star"], rows)


def _cmd_verify(r: Runner):
    from . import acceptance
    selected = [int(c) for c in r.cfg["criteria"]]
    lines = []
    all_ok = True
    for res in acceptance.run_criteria(selected):
        status = "PASS" if res.passed else "FAIL"
        line = f"[{status}] criterion {res.cid}: {res.name} — {res.detail}"
        lines.append(line)
        click.echo(line)
        all_ok = all_ok and res.passed
    r.write_text("verify_report.txt", "\n".join(lines) + "\n")
    if not all_ok:
        raise BergmanLabError("one or more acceptance criteria failed")


_COMMANDS = {
    "ortho": _cmd_ortho,
    "tables": _cmd_tables,
    "zeros": _cmd_zeros,
    "asymptotics": _cmd_asymptotics,
    "continuation": _cmd_continuation,
    "verify": _cmd_verify,
}


@click.command()
@click.argument("subcommand",
                type=click.Choice(sorted(_COMMANDS), case_sensitive=True))
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="JSON experiment config")
@click.option("--out", "out_dir", default=None,
              type=click.Path(), help="output directory (overrides config)")
def main(subcommand, config_path, out_dir):
    """High-precision Bergman-polynomial experiments."""
    try:
        cfg = load_config(config_path)
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    out = out_dir or cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    runner = Runner(cfg, out)
    runner.echo_config()
    try:
        with bits(runner.prec + 32):
            _COMMANDS[subcommand](runner)
    except BergmanLabError as e:
        click.echo(f"computation error: {e}", err=True)
        sys.exit(EXIT_COMPUTE)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
