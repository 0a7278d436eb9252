from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

import argparse
import csv
import io
import logging
import math

import numpy as np
import simplejson as json

from .cascade import Normalization, degree_grid
from .core import (
    PRESETS,
    ModelDomainError,
    TransmissionProfileParams,
    preset_values,
)
from .fitting import ParameterBoundsError
from .montecarlo import SamplingTableError
from .quadrature import QuadratureError, QuadratureSpec
from .shrinkage import ShrinkageParams, get_model

PROFILE_KEYS = ("a", "e", "c")
SHRINKAGE_KEYS = ("sigma", "eps_shift", "eta")
PARAMETER_KEYS = PROFILE_KEYS + SHRINKAGE_KEYS

# Options that are never read from a parameter file.
_NOT_IN_FILE = frozenset(
    (
        "preset",
        "params_file",
        "help",
        "verbosity",
        "settings",
        "pythonpath",
        "traceback",
        "no_color",
        "force_color",
        "skip_checks",
    )
)

# Exit codes
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def config_error(msg):
    return CommandError(msg, returncode=EXIT_CONFIG)


def parse_grid(text):
    """
    Parse a start:stop:step degree range.
    """
    parts = str(text).split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            "grid must be start:stop:step in degrees, got %r" % (text,)
        )
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("grid %r is not numeric" % (text,))
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise argparse.ArgumentTypeError("grid %r is not finite" % (text,))
    if not step > 0:
        raise argparse.ArgumentTypeError("grid step must be positive")
    if stop < start:
        raise argparse.ArgumentTypeError("grid stop must not be below start")
    return (start, stop, step)


def positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("%r is not an integer" % (text,))
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1, got %d" % v)
    return v


def nonnegative_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("%r is not an integer" % (text,))
    if v < 0:
        raise argparse.ArgumentTypeError("must not be negative, got %d" % v)
    return v


def angle_list(text):
    try:
        values = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("%r is not a list of angles" % (text,))
    if len(values) != 4:
        raise argparse.ArgumentTypeError(
            "need four analyzer angles a,a',b,b' in degrees"
        )
    return values


def quadrature_spec(options):
    def pick(name, setting, default):
        v = options.get(name)
        if v is None:
            return getattr(settings, setting, default)
        return v

    return QuadratureSpec(
        base_nodes=pick("quad_nodes", "QUAD_BASE_NODES", 64),
        rel_tol=pick("quad_rtol", "QUAD_RTOL", 1e-10),
        abs_tol=pick("quad_atol", "QUAD_ATOL", 1e-12),
        max_doublings=getattr(settings, "QUAD_MAX_DOUBLINGS", 6),
    )


class RunConfig(object):
    """
    Fully resolved options of one command run: where the model parameters
    came from, the grid, the normalization and where the output goes.
    """

    def __init__(self, command, options, default_preset, default_format="csv"):
        self.command = command
        self.options = options

        self.preset = options.get("preset")
        inline = [k for k in PARAMETER_KEYS if options.get(k) is not None]
        if self.preset and options.get("params_file"):
            raise config_error("Give either --preset or --params-file, not both")
        if self.preset and inline:
            raise config_error(
                "--preset cannot be combined with --%s" % inline[0].replace("_", "-")
            )
        if self.preset:
            self.source = "preset"
        elif options.get("_file_parameters"):
            self.source = "file"
        elif inline:
            self.source = "flags"
        else:
            self.source = "default"

        base = self.preset or default_preset
        try:
            values = dict(preset_values(base))
        except ModelDomainError as e:
            raise config_error(str(e))
        for k in PARAMETER_KEYS:
            if options.get(k) is not None:
                values[k] = float(options[k])
        self.params = values

        try:
            self.profile = TransmissionProfileParams(
                **{k: values[k] for k in PROFILE_KEYS}
            )
        except ModelDomainError as e:
            raise config_error(str(e))
        self.shrinkage = None
        if all(k in values for k in SHRINKAGE_KEYS):
            try:
                self.shrinkage = ShrinkageParams(
                    **{k: values[k] for k in SHRINKAGE_KEYS}
                )
            except ModelDomainError as e:
                raise config_error(str(e))

        self.grid_spec = options.get("grid") or parse_grid(
            getattr(settings, "DEFAULT_GRID", "0:90:1")
        )
        try:
            self.grid = degree_grid(*self.grid_spec)
        except ModelDomainError as e:
            raise config_error(str(e))
        self.normalization = Normalization(options.get("normalization") or "unit0")
        self.format = options.get("format") or default_format
        self.out = options.get("out")
        try:
            self.spec = quadrature_spec(options)
        except ValueError as e:
            raise config_error(str(e))

    def get(self, name, setting=None, default=None):
        """
        Option value, else the named setting, else default.
        """
        v = self.options.get(name)
        if v is None and setting is not None:
            v = getattr(settings, setting, default)
        if v is None:
            return default
        return v

    def parameter_record(self):
        r = {"source": self.source}
        if self.preset:
            r["preset"] = self.preset
        r.update(self.profile.as_dict())
        if self.shrinkage is not None:
            r.update(self.shrinkage.as_dict())
        return r


def shrinkage_model(cfg):
    return get_model(
        cfg.profile,
        cfg.shrinkage,
        cfg.spec,
        cache_points=getattr(settings, "KERNEL_CACHE_POINTS", 1441),
        table_points=getattr(settings, "OUTPUT_TABLE_POINTS", 181),
    )


def format_number(v):
    if isinstance(v, (bool, int)):
        return str(v)
    return "%.*g" % (getattr(settings, "CSV_SIGNIFICANT_DIGITS", 12), v)


def render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) for v in row])
    return buf.getvalue()


def render_json(doc):
    return json.dumps(doc, indent=2) + "\n"


def emit(command, text, path=None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        command.stdout.write(text, ending="")


def table_document(cfg, header, rows, **extra):
    doc = {
        "schema": 1,
        "command": cfg.command,
        "params": cfg.parameter_record(),
        "normalization": cfg.normalization.value,
        "columns": list(header),
        "rows": [[float(v) for v in row] for row in rows],
    }
    doc.update(extra)
    return doc


class TransmissionCommand(BaseCommand):
    """
    Base of the model commands. Adds the parameter, grid, output and
    quadrature flags, merges a parameter file, resolves a RunConfig and maps
    failures onto exit codes.
    """

    default_preset = "fig1-simple"
    default_format = "csv"
    formats = ("csv", "json")
    # unit0 curves are divided by their own value at alpha = 0
    needs_zero = False

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super(TransmissionCommand, self).create_parser(
            prog_name, subcommand, **kwargs
        )
        self._actions = dict(
            (a.dest, a) for a in parser._actions if a.dest not in _NOT_IN_FILE
        )
        return parser

    def add_arguments(self, parser):
        source = parser.add_argument_group("model parameters")
        source.add_argument(
            "--preset", choices=sorted(PRESETS), help="Named parameter set"
        )
        source.add_argument(
            "--params-file", help="JSON file with option values (keys as flags)"
        )
        source.add_argument("--a", type=float)
        source.add_argument("--e", type=float)
        source.add_argument("--c", type=float)
        source.add_argument("--sigma", type=float)
        source.add_argument("--eps-shift", type=float)
        source.add_argument("--eta", type=float, help="Watershed angle in radians")

        parser.add_argument(
            "--grid", type=parse_grid, help="start:stop:step in degrees"
        )
        parser.add_argument(
            "--normalization", choices=[n.value for n in Normalization]
        )
        parser.add_argument("--out", help="Write output to this file")
        parser.add_argument("--format", choices=self.formats)
        parser.add_argument("--quad-nodes", type=positive_int)
        parser.add_argument("--quad-rtol", type=float)
        parser.add_argument("--quad-atol", type=float)

    def _merge_file(self, options):
        path = options.get("params_file")
        if not path:
            return options
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise config_error("Cannot read parameter file %s: %s" % (path, e))
        if not isinstance(data, dict):
            raise config_error("Parameter file %s must hold a JSON object" % path)

        inline = [k for k in PARAMETER_KEYS if options.get(k) is not None]
        if inline and any(k in data for k in PARAMETER_KEYS):
            raise config_error(
                "--%s cannot be combined with model parameters from %s"
                % (inline[0].replace("_", "-"), path)
            )

        merged = dict(options)
        for key, value in data.items():
            action = self._actions.get(key)
            if action is None:
                raise config_error("Unknown key %r in parameter file %s" % (key, path))
            if options.get(key) is not None:
                # flags override the file
                continue
            try:
                if isinstance(value, bool) or value is None:
                    if action.type is not None:
                        raise TypeError("expected a value, got %r" % (value,))
                elif action.type is not None:
                    value = action.type(str(value))
                if action.choices is not None and value not in action.choices:
                    raise ValueError("%r is not one of %s" % (value, list(action.choices)))
            except (TypeError, ValueError, argparse.ArgumentTypeError) as e:
                raise config_error(
                    "Invalid value for key %r in parameter file %s: %s" % (key, path, e)
                )
            merged[key] = value
        merged["_file_parameters"] = any(k in data for k in PARAMETER_KEYS)
        return merged

    def _setup_logging(self, verbosity):
        if verbosity >= 2:
            logging.getLogger("polcascade").setLevel(logging.DEBUG)

    def handle(self, *args, **options):
        self._setup_logging(options.get("verbosity", 1))
        options = self._merge_file(options)
        cfg = RunConfig(
            self.command_name,
            options,
            self.natural_preset(options),
            self.default_format,
        )
        if cfg.format not in self.formats:
            raise config_error(
                "%s writes %s only" % (self.command_name, ", ".join(self.formats))
            )
        if (
            self.needs_zero
            and cfg.normalization is Normalization.UNIT_AT_ZERO
            and not np.any(np.abs(cfg.grid) <= 1e-15)
        ):
            raise config_error("--normalization unit0 needs 0 in the grid")
        try:
            self.run(cfg)
        except ParameterBoundsError as e:
            raise config_error(str(e))
        except (QuadratureError, SamplingTableError, ModelDomainError, ArithmeticError) as e:
            raise CommandError(
                "Numeric failure in %s: %s" % (self.command_name, e),
                returncode=EXIT_NUMERIC,
            )

    def natural_preset(self, options):
        return self.default_preset

    @property
    def command_name(self):
        return self.__module__.rsplit(".", 1)[-1].replace("_", "-")

    def run(self, cfg):
        raise NotImplementedError()

    def write_table(self, cfg, header, rows, **extra):
        if cfg.format == "json":
            emit(self, render_json(table_document(cfg, header, rows, **extra)), cfg.out)
        else:
            emit(self, render_csv(header, rows), cfg.out)

    def write_document(self, cfg, doc):
        emit(self, render_json(doc), cfg.out)

    def write_side_record(self, cfg, doc, suffix):
        """
        Auxiliary JSON record next to the main output, or on stderr when the
        main output goes to stdout.
        """
        if cfg.out:
            emit(self, render_json(doc), cfg.out + suffix)
        else:
            self.stderr.style_func = None
            self.stderr.write(render_json(doc), ending="")
