"""Command-line front end.

Subcommands cover every pipeline stage: ``resonances``, ``dispersion``,
``phasematch``, ``jsi``, ``comb``, ``ted``, ``herald-width``, ``fit-airy``
and ``analyze``.  All emitted files are CSV (or header-annotated matrix
CSV) with units declared in the header and floats printed at 17
significant digits, so identical configuration and seed reproduce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
from scipy.constants import c as C_LIGHT

from . import analysis, cavity, material, resonator, sfwm, temporal
from .channels import ChannelTable
from .config import RunConfig
from .errors import (ConfigError, DegenerateCavityError, FileFormatError, FitError,
                     GridError, MaterialRangeError, NoResonanceError,
                     UnsupportedModeError)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def _write_matrix(path, row_label, row_axis, col_label, col_axis, matrix, value_label):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {col_label}: " + ",".join(_fmt(v) for v in col_axis) + "\n")
        fh.write(f"# {row_label}: " + ",".join(_fmt(v) for v in row_axis) + "\n")
        fh.write(f"# values: {value_label}; one row per {row_label} entry\n")
        for row in matrix:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


class _Context:
    """Everything the subcommands need, built once from a RunConfig."""

    def __init__(self, cfg: RunConfig, threads: int = 1):
        self.cfg = cfg
        self.threads = max(1, int(threads))
        self.table = ChannelTable.default()
        if cfg.sphere.material_file:
            self.material = material.load_material(cfg.sphere.material_file)
        else:
            self.material = material.fused_silica()
        self.sphere = resonator.SphereSpec(radius=cfg.sphere.radius_m, material=self.material)
        lam_p = cfg.pump_wavelength_nm(self.table) * 1e-9
        pol, q = cfg.mode.polarization, cfg.mode.q
        if cfg.mode.l is None:
            self.mode, self.lambda_mode = resonator.find_mode_near(self.sphere, lam_p, pol, q)
        else:
            self.mode = resonator.ModeIndex(l=cfg.mode.l, q=q, polarization=pol)
            self.lambda_mode = resonator.resonance_wavelength(self.sphere, self.mode)
        center_hz = C_LIGHT / self.lambda_mode
        halfspan_hz = max(5.0e12, 0.8 * cfg.grids.omega_span_hz + 1.0e12)
        self.disp = resonator.dispersion_for(
            self.sphere, pol, q, round(center_hz / 1e9) * 1e9, halfspan_hz
        )
        self.couplings = cavity.CouplingSpec(
            l_ref=self.mode.l, q_pump=cfg.couplings.q_pump,
            q_signal=cfg.couplings.q_signal, q_idler=cfg.couplings.q_idler,
        )
        self.pump = cavity.PumpSweepSpec(
            center_frequency=self.disp.resonance_frequency(self.mode.l),
            linewidth_hz=cfg.pump.linewidth_hz,
            resonance_fwhm_hz=cfg.pump.resonance_fwhm_hz,
            sweep_span_hz=cfg.pump.sweep_span_hz,
        )
        n_bulk = float(material.refractive_index(self.material, self.lambda_mode))
        self.kerr = sfwm.NonlinearParams(
            pump_power_w=cfg.pump.power_w, n2_m2_per_w=cfg.kerr.n2_m2_per_w,
            a_eff_m2=cfg.kerr.a_eff_m2,
        ).kerr_mismatch(cfg.couplings.q_pump, n_bulk, cfg.sphere.radius_m)

    def spectrum(self, span_hz=None, step_hz=None, **kw) -> sfwm.BiphotonSpectrum:
        cfg = self.cfg
        return sfwm.spectral_intensity(
            self.disp, self.mode.l, self.couplings, self.pump,
            span_hz=span_hz or cfg.grids.omega_span_hz,
            step_hz=step_hz if step_hz is not None else cfg.grids.omega_step_hz,
            window_fwhm_multiples=cfg.grids.pump_window_fwhm_multiples,
            include_phasematching=cfg.include_phasematching,
            kerr_rad_per_m=self.kerr,
            normalization=cfg.normalization,
            n_threads=self.threads, **kw,
        )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_resonances(ctx: _Context, args, out_dir):
    disp = ctx.disp
    n_side = int(np.ceil(ctx.cfg.grids.omega_span_hz * np.pi / disp.fsr(disp.w_ref))) + 2
    rows = []
    for l in range(ctx.mode.l - n_side, ctx.mode.l + n_side + 1):
        d = disp.resonance_detune(l)
        w = disp.w_ref + d
        fsr = disp.resonance_detune(l + 1) - d
        rows.append((str(l), str(ctx.mode.q), ctx.mode.polarization,
                     _fmt(2 * np.pi * C_LIGHT / w * 1e9), _fmt(w / 2 / np.pi / 1e12),
                     _fmt(fsr / 2 / np.pi / 1e9)))
    _write_rows(os.path.join(out_dir, "resonances.csv"),
                "l,q,polarization,lambda_nm,freq_THz,fsr_GHz", rows)


def _cmd_dispersion(ctx: _Context, args, out_dir):
    disp = ctx.disp
    span = 2 * np.pi * ctx.cfg.grids.omega_span_hz
    grid = disp.w_ref + np.linspace(-span / 2, span / 2, 201)
    rows = []
    for w in grid:
        rows.append((_fmt(w / 2 / np.pi / 1e12), _fmt(disp.k(w)), _fmt(disp.n_eff(w)),
                     _fmt(disp.fsr(w) / 2 / np.pi / 1e9)))
    _write_rows(os.path.join(out_dir, "dispersion.csv"),
                "freq_THz,k_rad_per_m,n_eff,fsr_GHz", rows)


def _cmd_phasematch(ctx: _Context, args, out_dir):
    disp = ctx.disp
    w_p0 = disp.resonance_frequency(ctx.mode.l)
    pump_off = np.linspace(-0.5, 0.5, 41) * 2 * np.pi * ctx.cfg.pump.sweep_span_hz
    big_om = np.linspace(-0.5, 0.5, 201) * 2 * np.pi * ctx.cfg.grids.omega_span_hz
    _, g2 = sfwm.phasematch_strength(disp, (w_p0 + pump_off)[:, None],
                                     big_om[None, :], ctx.kerr)
    _write_matrix(os.path.join(out_dir, "phasematch.csv"),
                  "pump_offset_Hz", pump_off / (2 * np.pi),
                  "omega_offset_Hz", big_om / (2 * np.pi),
                  g2, "phasematching strength |g|^2 (dimensionless)")


def _cmd_jsi(ctx: _Context, args, out_dir):
    disp = ctx.disp
    for region in range(args.regions):
        j = region * args.stride
        ws0 = disp.resonance_frequency(ctx.mode.l + j)
        wi0 = disp.resonance_frequency(ctx.mode.l - j)
        half = np.pi * args.region_span_hz  # angular half-span
        ws = ws0 + np.linspace(-half, half, args.region_points)
        wi = wi0 + np.linspace(-half, half, args.region_points)
        mat_ = sfwm.jsi_2d(disp, ws, wi, ctx.mode.l, ctx.couplings, ctx.pump,
                           include_phasematching=True, kerr_rad_per_m=ctx.kerr)
        _write_matrix(os.path.join(out_dir, f"jsi_region_{region:03d}.csv"),
                      "omega_s_Hz", ws / (2 * np.pi), "omega_i_Hz", wi / (2 * np.pi),
                      mat_, f"joint spectral intensity (arb.), mode pair j={j}")


def _cmd_comb(ctx: _Context, args, out_dir):
    spec = ctx.spectrum()
    rows = zip(spec.omega / (2 * np.pi), spec.values)
    _write_rows(os.path.join(out_dir, "comb.csv"), "omega_offset_Hz,intensity_arb",
                [(f, v) for f, v in rows])


def _cmd_ted(ctx: _Context, args, out_dir):
    spec = ctx.spectrum()
    ted = temporal.ted_from_spectrum(spec, pad_factor=args.pad_factor)
    ted.write_csv(os.path.join(out_dir, "ted.csv"))


def _cmd_herald_width(ctx: _Context, args, out_dir):
    if args.ted_csv:
        env = temporal.TedTrace.read_csv(args.ted_csv)
        env = temporal.envelope_of(env)
    else:
        fsr_hz = ctx.disp.fsr(ctx.disp.w_ref) / (2 * np.pi)
        spec = ctx.spectrum(span_hz=0.8 * fsr_hz)
        ted = temporal.ted_from_spectrum(spec, pad_factor=args.pad_factor)
        env = temporal.envelope_of(ted)
    shape = temporal.infer_peak_lineshape(env)
    lam_p = ctx.cfg.pump_wavelength_nm(ctx.table) * 1e-9
    if ctx.cfg.signal_dwdm_channel is not None:
        lam_s = ctx.table.lookup("DWDM", ctx.cfg.signal_dwdm_channel)[0] * 1e-9
        lam_i = analysis.energy_conserving_idler(lam_p, lam_s)
    else:
        lam_i = lam_p
    q = analysis.q_from_linewidth(C_LIGHT / lam_i, shape.fwhm_hz)
    _write_rows(os.path.join(out_dir, "herald_lineshape.csv"),
                "omega_offset_Hz,lineshape_unit_max",
                list(zip(shape.omega / (2 * np.pi), shape.values)))
    _write_rows(os.path.join(out_dir, "herald_report.csv"), "quantity,value,unit", [
        ("delta_nu", _fmt(shape.fwhm_hz), "Hz"),
        ("idler_wavelength", _fmt(lam_i * 1e9), "nm"),
        ("q_factor", _fmt(q), "dimensionless"),
        ("ted_fwhm", _fmt(shape.time_fwhm_s), "s"),
        ("ted_inv_e_full_width", _fmt(shape.time_inv_e_full_width_s), "s"),
        ("windowed", str(bool(shape.windowed)).lower(), "flag"),
    ])


def _synthetic_scan(ctx: _Context, rng) -> cavity.TransmissionScan:
    fwhm = ctx.cfg.pump.resonance_fwhm_hz
    disp = ctx.disp
    r_p = cavity.reflectivity_for_fwhm(disp, ctx.mode.l, fwhm, pump=True)
    d0 = disp.resonance_detune(ctx.mode.l)
    off = np.linspace(-6 * fwhm, 6 * fwhm, 481)
    a = cavity.pump_airy_intensity(disp, d0 + 2 * np.pi * off, r_p, 1 - r_p**2)
    a = a / a.max()
    trans = 1.0 - 0.6 * a + 0.01 * rng.standard_normal(off.size)
    return cavity.TransmissionScan(freq_offset_hz=off, transmittance=trans)


def _cmd_fit_airy(ctx: _Context, args, out_dir):
    if args.scan:
        scan = cavity.TransmissionScan.read_csv(args.scan)
    else:
        scan = _synthetic_scan(ctx, np.random.default_rng(args.seed))
        scan.write_csv(os.path.join(out_dir, "airy_scan_synthetic.csv"))
    fit = cavity.fit_airy(scan)
    _write_rows(os.path.join(out_dir, "airy_fit.csv"), "quantity,value,unit", [
        ("center_offset", _fmt(fit.center_hz), "Hz"),
        ("fwhm", _fmt(fit.fwhm_hz), "Hz"),
        ("fwhm_sigma", _fmt(fit.fwhm_sigma_hz), "Hz"),
        ("depth", _fmt(fit.depth), "transmittance"),
        ("residual_rms", _fmt(fit.residual_rms), "transmittance"),
        ("baseline", _fmt(fit.baseline), "transmittance"),
    ])


def _cmd_analyze(ctx: _Context, args, out_dir):
    if not args.spectrogram:
        raise ConfigError("analyze: --spectrogram FILE is required")
    sg = analysis.ingest_spectrogram(args.spectrogram)
    marg = analysis.marginals(sg)
    _write_rows(os.path.join(out_dir, "analyze_spectral_marginal.csv"),
                "lambda_nm,counts", list(zip(marg.lambda_nm, marg.spectral)))
    _write_rows(os.path.join(out_dir, "analyze_temporal_marginal.csv"),
                "T_us,counts", list(zip(marg.t_s * 1e6, marg.temporal)))
    lam_i0 = args.lambda_i0 or float(marg.lambda_nm[int(np.argmax(marg.spectral))])
    env = analysis.ted_envelope(sg, lam_i0, args.group_size)
    env.write_csv(os.path.join(out_dir, "analyze_ted_envelope.csv"))
    baseline = float(np.median(np.sort(env.values)[: max(1, env.values.size // 5)]))
    centered = temporal.TedTrace(time=env.time,
                                 values=np.maximum(env.values - baseline, 0.0))
    shape = temporal.infer_peak_lineshape(centered)
    q = analysis.q_from_linewidth(C_LIGHT / (lam_i0 * 1e-9), shape.fwhm_hz)
    rows = [
        ("lambda_i0", _fmt(lam_i0), "nm"),
        ("delta_nu", _fmt(shape.fwhm_hz), "Hz"),
        ("q_factor", _fmt(q), "dimensionless"),
        ("ted_fwhm", _fmt(shape.time_fwhm_s), "s"),
        ("ted_inv_e_full_width", _fmt(shape.time_inv_e_full_width_s), "s"),
        ("windowed", str(bool(shape.windowed)).lower(), "flag"),
    ]
    if ctx.cfg.signal_dwdm_channel is not None:
        lam_p = ctx.cfg.pump_wavelength_nm(ctx.table) * 1e-9
        lam_s = ctx.table.lookup("DWDM", ctx.cfg.signal_dwdm_channel)[0] * 1e-9
        lam_pred = analysis.energy_conserving_idler(lam_p, lam_s) * 1e9
        half_width = ctx.table.lookup("DWDM", ctx.cfg.signal_dwdm_channel)[1] / 2.0
        rows.append(("idler_predicted", _fmt(lam_pred), "nm"))
        rows.append(("energy_conservation_ok",
                     str(bool(abs(lam_pred - lam_i0) <= half_width)).lower(), "flag"))
    _write_rows(os.path.join(out_dir, "analyze_lineshape.csv"),
                "omega_offset_Hz,lineshape_unit_max",
                list(zip(shape.omega / (2 * np.pi), shape.values)))
    _write_rows(os.path.join(out_dir, "analyze_report.csv"), "quantity,value,unit", rows)


_COMMANDS = {
    "resonances": _cmd_resonances,
    "dispersion": _cmd_dispersion,
    "phasematch": _cmd_phasematch,
    "jsi": _cmd_jsi,
    "comb": _cmd_comb,
    "ted": _cmd_ted,
    "herald-width": _cmd_herald_width,
    "fit-airy": _cmd_fit_airy,
    "analyze": _cmd_analyze,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgmcomb", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON run configuration")
        sp.add_argument("--out-dir", default=None, help="output directory (default: config out_dir)")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed for synthetic-noise steps")
        sp.add_argument("--threads", type=int, default=1, help="grid-evaluation threads")
        if name == "jsi":
            sp.add_argument("--regions", type=int, default=3)
            sp.add_argument("--stride", type=int, default=1,
                            help="plot every stride-th diagonal mode pair")
            sp.add_argument("--region-span-hz", type=float, default=3e8)
            sp.add_argument("--region-points", type=int, default=121)
        if name in ("ted", "herald-width"):
            sp.add_argument("--pad-factor", type=int, default=4)
        if name == "herald-width":
            sp.add_argument("--ted-csv", default=None, help="measured TED to analyze")
        if name == "fit-airy":
            sp.add_argument("--scan", default=None, help="transmission scan CSV")
        if name == "analyze":
            sp.add_argument("--spectrogram", default=None, help="spectrogram file")
            sp.add_argument("--group-size", type=int, default=100)
            sp.add_argument("--lambda-i0", type=float, default=None,
                            help="TED column wavelength (nm); default: marginal peak")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.read(args.config) if args.config else RunConfig().validate()
    out_dir = args.out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    ctx = _Context(cfg, threads=args.threads)
    _COMMANDS[args.command](ctx, args, out_dir)
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileFormatError as exc:
        print(f"file format error: {exc}", file=sys.stderr)
        return 3
    except (MaterialRangeError, NoResonanceError, UnsupportedModeError,
            GridError, DegenerateCavityError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 4
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
